"""Trial families and certification of the Lieb-Thirring inequalities.

A trial family is a finite orthonormal set of zero-mean functions, given by
coefficients over an orthonormal eigenbasis (see
:func:`liebthirring.harmonics.eigenbasis`). Both sides of

    int rho^{(n+2)/n}  <=  k * sum_j ||grad psi_j||^2

are then computable: the right side spectrally and exactly, the left side
in closed form for full shells (where ``rho`` is constant), by product
quadrature on S^2, S^3 and SO(3), or by Monte Carlo on higher spheres.
"""
from __future__ import annotations

import math
import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate
from scipy.special import roots_gegenbauer

from .constants import ConstantReport, Source, analytic_constant
from .engine import as_constant_report, derive_constant
from .errors import (
    CertificationError,
    DomainError,
    InsufficientSamplesError,
    MeasureMismatchError,
)
from .harmonics import EigenBasis, eigenbasis, gegenbauer, gradient_energy, zonal_basis
from .quadrature import MAX_DEGREE, build_rule, integrate as quad_integrate, monte_carlo_sphere
from .spectra import ManifoldId, Measure, cumulative_count, sphere_multiplicity, _sphere_area

CERT_RTOL = 1e-9
DEFAULT_SAMPLES = 1_000_000


@dataclass(frozen=True)
class TrialFamily:
    """``psi_j = sum_b coefficients[j, b] * basis_b``."""

    manifold: ManifoldId
    basis: EigenBasis
    coefficients: np.ndarray
    kind: str
    descriptor: str

    def __post_init__(self):
        C = np.atleast_2d(self.coefficients)
        if C.shape[1] != self.basis.size:
            raise DomainError("coefficient width does not match the basis")
        object.__setattr__(self, "coefficients", C)

    @property
    def size(self) -> int:
        return self.coefficients.shape[0]

    @property
    def max_level(self) -> int:
        return max(self.basis.levels)

    def gram(self) -> np.ndarray:
        C = self.coefficients
        return C @ C.conj().T

    def orthonormality_error(self) -> float:
        return float(np.abs(self.gram() - np.eye(self.size)).max())

    def values(self, points) -> np.ndarray:
        return self.coefficients @ self.basis.evaluate(points)

    def density(self, points) -> np.ndarray:
        return np.sum(np.abs(self.values(points)) ** 2, axis=0)


def full_shell_family(manifold: ManifoldId, n_max: int, seed: int = 0) -> TrialFamily:
    """Every eigenfunction of levels ``1..n_max``; ``rho`` is then constant."""
    if n_max < 1:
        raise DomainError("n_max must be >= 1")
    basis = eigenbasis(manifold, range(1, n_max + 1), seed=seed)
    return TrialFamily(manifold, basis, np.eye(basis.size), "shells", f"shells:{n_max}")


def single_harmonic_family(manifold: ManifoldId, level: int, index: int = 0) -> TrialFamily:
    """One normalized eigenfunction.

    On S^{m-1} with ``m >= 5`` it is the zonal harmonic about the last
    coordinate axis and ``index`` must be 0.
    """
    if manifold.kind != "so3" and manifold.spectral_model.m >= 5:
        if index != 0:
            raise DomainError("only the zonal harmonic (index 0) is available for m >= 5")
        pole = np.zeros(manifold.spectral_model.m)
        pole[-1] = 1.0
        basis = zonal_basis(manifold, level, pole)
    else:
        basis = eigenbasis(manifold, [level])
    if not 0 <= index < basis.size:
        raise DomainError(f"index must lie in 0..{basis.size - 1}")
    C = np.zeros((1, basis.size), dtype=complex if basis.is_complex else float)
    C[0, index] = 1.0
    return TrialFamily(manifold, basis, C, "single", f"single:{level}:{index}")


def random_mixture_family(
    manifold: ManifoldId, span_levels, size: int, seed: int
) -> TrialFamily:
    """First ``size`` rows of a seeded Haar-random unitary mixing of the span."""
    basis = eigenbasis(manifold, span_levels, seed=seed)
    if not 1 <= size <= basis.size:
        raise DomainError(f"size must lie in 1..{basis.size}")
    rng = np.random.Generator(np.random.Philox(seed))
    A = rng.standard_normal((basis.size, basis.size))
    if basis.is_complex:
        A = A + 1j * rng.standard_normal((basis.size, basis.size))
    Q, R = np.linalg.qr(A)
    Q = Q * (np.diag(R) / np.abs(np.diag(R)))
    lv = list(basis.levels)
    desc = f"mix:{lv[0]}..{lv[-1]}:{size}:seed={seed}"
    return TrialFamily(manifold, basis, Q[:size], "mix", desc)


# ---------------------------------------------------------------------------
# left-hand side
# ---------------------------------------------------------------------------


def _exponent(manifold):
    n = manifold.dim
    return (n + 2) / n


def shell_lhs(manifold: ManifoldId, n_max: int) -> float:
    """``vol * (N/vol)^p`` for the full shells ``1..n_max`` (``rho = N/vol``)."""
    V = manifold.volume
    N = cumulative_count(manifold, n_max)
    return V * (N / V) ** _exponent(manifold)


def zonal_lhs_reference(manifold: ManifoldId, level: int) -> float:
    """``int rho^p`` for one normalized zonal harmonic, as a 1-D integral.

    With ``t = x.pole`` the surface measure becomes
    ``|S^{m-2}| (1-t^2)^{(m-3)/2} dt``; the integrand is split at the zeros
    of the Gegenbauer polynomial, where ``|.|^{2p}`` is not smooth.
    """
    m = manifold.spectral_model.m
    p = _exponent(manifold)
    alpha = (m - 2) / 2
    amp = sphere_multiplicity(m, level) / _sphere_area(m)
    c1 = gegenbauer(alpha, level, 1.0)

    def f(t):
        g = gegenbauer(alpha, level, t) / c1
        return (amp * g * g) ** p * (1 - t * t) ** ((m - 3) / 2)

    zeros = np.sort(roots_gegenbauer(level, alpha)[0])
    edges = np.concatenate([[-1.0], zeros, [1.0]])
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        val, _ = integrate.quad(f, a, b, epsabs=0.0, epsrel=1e-13, limit=200)
        total += val
    geo = _sphere_area(m - 1) * total
    # normalized measure: rho_N = V rho_G and dmu_N = dmu_G / V
    V = manifold.geometric_volume / manifold.volume
    return V ** (p - 1) * geo


def _quadrature_degree(family):
    p = _exponent(family.manifold)
    return min(MAX_DEGREE, int(math.ceil(2 * p * family.max_level)) + 8)


def family_lhs(family: TrialFamily, method: str = "auto", *, samples=DEFAULT_SAMPLES,
               seed: int = 0, degree: int | None = None) -> tuple[float, float, str]:
    """``(value, stderr, method)`` for ``int rho^p``."""
    man = family.manifold
    p = _exponent(man)
    if method == "auto":
        if family.kind == "shells":
            method = "closed"
        elif man.kind == "so3" or man.spectral_model.m <= 4:
            method = "quadrature"
        else:
            method = "montecarlo"
    if method == "closed":
        if family.kind != "shells":
            raise DomainError("closed-form lhs needs a full-shell family")
        return shell_lhs(man, family.max_level), 0.0, method
    if method == "quadrature":
        rule = build_rule(man, degree or _quadrature_degree(family))
        val = quad_integrate(rule, lambda x: family.density(x) ** p)
        return float(np.real(val)), 0.0, method
    if method == "montecarlo":
        if man.kind == "so3":
            raise DomainError("Monte Carlo is only provided on spheres")
        m = man.spectral_model.m
        val, err = monte_carlo_sphere(m, samples, seed, lambda x: family.density(x) ** p)
        # monte_carlo_sphere integrates against surface measure
        val, err = val / (man.geometric_volume / man.volume), err / (man.geometric_volume / man.volume)
        if err > 0.01 * abs(val):
            raise InsufficientSamplesError(
                f"stderr {err:.3g} exceeds 1% of the estimate {val:.3g}; raise the sample count"
            )
        return val, err, method
    raise DomainError(f"unknown lhs method {method!r}")


# ---------------------------------------------------------------------------
# certification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InequalityReport:
    family: str
    lhs: float
    rhs_energy: float
    constant_used: ConstantReport
    ratio: float
    certified: bool
    lhs_stderr: float = 0.0
    lhs_method: str = ""

    @property
    def empirical_lower_bound(self) -> float:
        return self.ratio

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "lhs": self.lhs,
            "lhs_stderr": self.lhs_stderr,
            "lhs_method": self.lhs_method,
            "rhs_energy": self.rhs_energy,
            "ratio": self.ratio,
            "constant": self.constant_used.value,
            "constant_source": self.constant_used.source.value,
            "certified": self.certified,
            "empirical_lower_bound": self.empirical_lower_bound,
        }


def _compatible(a: ManifoldId, b: ManifoldId) -> bool:
    return a.spectral_model.kind == b.spectral_model.kind and a.spectral_model.m == b.spectral_model.m


def evaluate_inequality(family: TrialFamily, constant: ConstantReport, lhs_method: str = "auto",
                        **kwargs) -> InequalityReport:
    """Evaluate both sides for one family and certify ``ratio <= constant``.

    The tolerance is ``constant * (1 + 1e-9)`` plus three standard errors
    when the left side was sampled.
    """
    if family.manifold.measure is not constant.measure:
        raise MeasureMismatchError(
            f"family uses the {family.manifold.measure.value} measure, "
            f"constant the {constant.measure.value} one"
        )
    if not _compatible(family.manifold, constant.manifold):
        raise DomainError(
            f"constant for {constant.manifold.label} used on {family.manifold.label}"
        )
    lhs, err, method = family_lhs(family, lhs_method, **kwargs)
    rhs = gradient_energy(family)
    ratio = lhs / rhs
    slack = 3 * err / rhs
    certified = ratio <= constant.value * (1 + CERT_RTOL) + slack
    return InequalityReport(family.descriptor, lhs, rhs, constant, ratio, bool(certified), err, method)


@dataclass
class SweepSummary:
    manifold: ManifoldId
    constant: ConstantReport
    reports: list[InequalityReport] = field(default_factory=list)

    @property
    def max_ratio(self) -> float:
        return max(r.ratio for r in self.reports)

    @property
    def best_family(self) -> str:
        return max(self.reports, key=lambda r: r.ratio).family

    @property
    def all_certified(self) -> bool:
        return all(r.certified for r in self.reports)

    def to_dict(self) -> dict:
        return {
            **self.manifold.to_dict(),
            "constant": self.constant.to_dict(),
            "max_ratio": self.max_ratio,
            "best_family": self.best_family,
            "all_certified": self.all_certified,
            "reports": [r.to_dict() for r in self.reports],
        }


def _workers():
    try:
        return max(1, int(os.environ.get("LIEBTHIRRING_THREADS", "1")))
    except ValueError:
        return 1


def sweep_constant(manifold: ManifoldId, constant_source: Source | str = Source.ANALYTIC,
                   cutoff: float = 1e6) -> ConstantReport:
    if Source(constant_source) is Source.ANALYTIC:
        return analytic_constant(manifold)
    return as_constant_report(derive_constant(manifold, "exact", cutoff), manifold)


def sweep(manifold: ManifoldId, families, constant_source: Source | str = Source.ANALYTIC,
          *, cutoff: float = 1e6, **kwargs) -> SweepSummary:
    """Evaluate every family; any uncertified family raises :class:`CertificationError`."""
    families = list(families)
    if not families:
        raise DomainError("sweep needs at least one family")
    const = sweep_constant(manifold, constant_source, cutoff)
    with ThreadPoolExecutor(max_workers=_workers()) as pool:
        reports = list(pool.map(lambda f: evaluate_inequality(f, const, **kwargs), families))
    summary = SweepSummary(manifold, const, reports)
    bad = [r for r in reports if not r.certified]
    if bad:
        lines = "; ".join(f"{r.family}: ratio {r.ratio!r} > {const.value!r}" for r in bad)
        raise CertificationError(f"{manifold.label}: uncertified families: {lines}", reports)
    return summary


# ---------------------------------------------------------------------------
# family specifications
# ---------------------------------------------------------------------------

_RANGE = re.compile(r"^(\d+)(?:\.\.(\d+))?$")


def _parse_range(text):
    mt = _RANGE.match(text)
    if not mt:
        raise DomainError(f"bad level range {text!r}; use N or A..B")
    a = int(mt.group(1))
    b = int(mt.group(2) or a)
    if b < a:
        raise DomainError(f"empty level range {text!r}")
    return a, b


def parse_families(manifold: ManifoldId, text: str, seed: int = 0) -> list[TrialFamily]:
    """Build families from a comma-separated specification.

    * ``shells:A..B`` (or ``shells:N``) - full shells ``1..n`` for each ``n``;
    * ``single:L[:I]`` - basis function ``I`` of level ``L``;
    * ``mix:A..B:SIZE[:COUNT]`` - ``COUNT`` random mixtures of levels
      ``A..B`` with seeds ``seed, seed+1, ...``.
    """
    out = []
    for item in filter(None, (s.strip() for s in text.split(","))):
        head, _, rest = item.partition(":")
        parts = rest.split(":") if rest else []
        if head == "shells" and len(parts) == 1:
            a, b = _parse_range(parts[0])
            out += [full_shell_family(manifold, n, seed=seed) for n in range(a, b + 1)]
        elif head == "single" and len(parts) in (1, 2):
            idx = int(parts[1]) if len(parts) == 2 else 0
            out.append(single_harmonic_family(manifold, int(parts[0]), idx))
        elif head == "mix" and len(parts) in (2, 3):
            a, b = _parse_range(parts[0])
            count = int(parts[2]) if len(parts) == 3 else 1
            out += [
                random_mixture_family(manifold, range(a, b + 1), int(parts[1]), seed + s)
                for s in range(count)
            ]
        else:
            raise DomainError(f"cannot parse family spec {item!r}")
    if not out:
        raise DomainError("empty family specification")
    return out


DEFAULT_FAMILIES = {
    "sphere:3": "shells:1..4,single:1:0,single:1:1,single:2:2,single:3:3,mix:1..2:4:3",
    "sphere:4": "shells:1..3,single:1:0,single:2:4,mix:1..2:5:3",
    "su2": "shells:1..3,single:1:0,single:2:4,mix:1..2:5:3",
    "sphere:5": "shells:1..2,single:1,single:2,mix:1..2:4:3",
    "sphere:6": "shells:1..2,single:1,single:2,mix:1..2:4:3",
    "so3": "shells:1..3,single:1:0,single:2:7,mix:1..2:6:3",
}


def default_manifolds() -> list[ManifoldId]:
    return [
        ManifoldId.sphere(3),
        ManifoldId.sphere(4),
        ManifoldId.sphere(5),
        ManifoldId.sphere(6),
        ManifoldId.su2(Measure.GEOMETRIC),
        ManifoldId.so3(Measure.NORMALIZED),
        ManifoldId.so3(Measure.GEOMETRIC),
    ]


def default_sweep(constant_source: Source | str = Source.ANALYTIC, seed: int = 0,
                  samples: int = DEFAULT_SAMPLES) -> list[SweepSummary]:
    """Spheres m = 3..6, SU(2) and SO(3) under both measures."""
    out = []
    for man in default_manifolds():
        fams = parse_families(man, DEFAULT_FAMILIES[man.label], seed)
        out.append(sweep(man, fams, constant_source, samples=samples, seed=seed))
    return out
