"""Constant derivation from an eigenvalue counting function.

For a counting density ``C`` on an ``n``-dimensional manifold the gradient
energy of an orthonormal family is bounded below pointwise by

    I(rho) = int_0^inf (sqrt(rho) - sqrt(C(E)))_+^2 dE,

so ``inf_rho I(rho)/rho^{(n+2)/n}`` is the reciprocal of a valid
Lieb-Thirring constant. This module evaluates ``I`` (exactly for step
functions, by antiderivative or adaptive quadrature for power laws) and
searches for the infimum of the ratio.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from . import __version__
from .constants import ConstantReport, Source, envelope_Km, so3_envelope
from .errors import DomainError, InconclusiveError, OutOfRangeError
from .spectra import (
    Envelope,
    ExactStep,
    ManifoldId,
    Measure,
    PaperC,
    Spectrum,
    build_spectrum,
    weyl_coefficient,
)

GOLDEN = (math.sqrt(5) - 1) / 2
FLAT_RTOL = 1e-10


class Method(str, enum.Enum):
    CLOSED_FORM = "closed_form"
    QUADRATURE = "quadrature"


class Mode(str, enum.Enum):
    PAPER_ENVELOPE = "envelope"
    EXACT_STEP = "exact"


@dataclass(frozen=True)
class DerivedBound:
    infimum_of_ratio: float
    constant: float
    argmin_rho: float
    method: Method
    est_error: float = 0.0
    tail_limit: float | None = None
    grid: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.est_error < 0:
            raise DomainError("est_error must be nonnegative")

    @property
    def argmin_at_infinity(self) -> bool:
        return math.isinf(self.argmin_rho)

    def to_dict(self) -> dict:
        return {
            "infimum_of_ratio": self.infimum_of_ratio,
            "constant": self.constant,
            "argmin_rho": None if self.argmin_at_infinity else self.argmin_rho,
            "argmin_at_infinity": self.argmin_at_infinity,
            "method": self.method.value,
            "est_error": self.est_error,
            "tail_limit": self.tail_limit,
            "grid": self.grid,
        }


def _bound(inf_ratio, argmin, method, est_error=0.0, tail=None, grid=None):
    return DerivedBound(
        infimum_of_ratio=float(inf_ratio),
        constant=1.0 / float(inf_ratio),
        argmin_rho=float(argmin),
        method=method,
        est_error=float(est_error),
        tail_limit=tail,
        grid=grid or {},
    )


def describe_counting(c) -> dict:
    if isinstance(c, ExactStep):
        return {
            "form": "exact_step",
            "manifold": c.spectrum.manifold.label,
            "measure": c.spectrum.manifold.measure.value,
            "cutoff": c.cutoff,
            "levels": len(c.spectrum.levels),
            "scale": c.scale,
        }
    if isinstance(c, Envelope):
        return {"form": "envelope", "K": c.K, "exponent": c.exponent}
    return {"form": "paper_c", "K": c.K, "exponent": c.exponent, "threshold": c.threshold}


# ---------------------------------------------------------------------------
# I(rho)
# ---------------------------------------------------------------------------


def _power_antiderivative(E, rho, K, a):
    # d/dE of this is rho - 2 sqrt(rho K) E^{a/2} + K E^a
    return (
        rho * E
        - 2 * np.sqrt(rho * K) * E ** (a / 2 + 1) / (a / 2 + 1)
        + K * E ** (a + 1) / (a + 1)
    )


def _I_exact(counting, rho):
    rho = np.asarray(rho, dtype=float)
    if isinstance(counting, ExactStep):
        lam, c = counting.step_table()
        if np.any(rho > c[-1]):
            raise OutOfRangeError(
                f"rho up to {rho.max():.6g} needs eigenvalues beyond the cutoff "
                f"{counting.cutoff} (count there is {c[-1]:.6g})"
            )
        r = np.atleast_1d(rho)[:, None]
        gaps = np.diff(lam)
        terms = np.clip(np.sqrt(r) - np.sqrt(c[:-1]), 0.0, None) ** 2 * gaps
        out = lam[0] * r[:, 0] + terms.sum(axis=1)
        return out.reshape(rho.shape)
    K, a = counting.K, counting.exponent
    Estar = (rho / K) ** (1 / a)
    if isinstance(counting, Envelope):
        return _power_antiderivative(Estar, rho, K, a)
    T = counting.threshold
    flat = rho <= K * T**a
    Eh = np.where(flat, T, Estar)
    return T * rho + np.where(
        flat, 0.0, _power_antiderivative(Eh, rho, K, a) - _power_antiderivative(T, rho, K, a)
    )


def _I_quad(counting, rho):
    if isinstance(counting, ExactStep):
        raise DomainError("step counting functions are always integrated exactly")
    K, a = counting.K, counting.exponent
    T = counting.threshold if isinstance(counting, PaperC) else 0.0

    def one(r):
        Estar = max((r / K) ** (1 / a), T)
        f = lambda E: max(math.sqrt(r) - math.sqrt(float(counting(E))), 0.0) ** 2
        total = r * T
        if Estar > T:
            val, _ = integrate.quad(f, T, Estar, epsabs=0.0, epsrel=1e-12, limit=200)
            total += val
        return total

    rho = np.asarray(rho, dtype=float)
    return np.vectorize(one, otypes=[float])(rho)


def I_of_rho(counting, rho, integrator: str = "exact"):
    """``int_0^inf (sqrt(rho) - sqrt(C(E)))_+^2 dE``.

    ``integrator="exact"`` sums step intervals exactly or uses the closed
    antiderivative for power laws; ``"quad"`` uses adaptive quadrature in
    ``E`` (power laws only) and serves as an independent check.
    """
    if np.any(np.asarray(rho) <= 0):
        raise DomainError("rho must be positive")
    if integrator == "exact":
        out = _I_exact(counting, rho)
    elif integrator == "quad":
        out = _I_quad(counting, rho)
    else:
        raise DomainError(f"unknown integrator {integrator!r}")
    return float(out) if np.ndim(out) == 0 else out


def ratio(counting, rho, dim: int, integrator: str = "exact"):
    """``I(rho) / rho^{(dim+2)/dim}``."""
    p = (dim + 2) / dim
    return I_of_rho(counting, rho, integrator) / np.asarray(rho, dtype=float) ** p


def K_scaling_reduction(counting, rho: float) -> tuple[float, float]:
    """Map ``rho`` to the unit-K problem: ``I(rho) = K * I_1(rho / K)``."""
    if isinstance(counting, ExactStep):
        K = counting.scale
    else:
        K = counting.K
    return rho / K, K


def unit_counting(counting):
    """The same counting function with its scale factor set to 1."""
    if isinstance(counting, Envelope):
        return Envelope(1.0, counting.exponent)
    if isinstance(counting, PaperC):
        return PaperC(counting.threshold, counting.exponent, 1.0)
    return ExactStep(counting.spectrum, 1.0)


# ---------------------------------------------------------------------------
# closed forms and tails
# ---------------------------------------------------------------------------


def power_law_coefficient(n: float) -> float:
    """``lim I(rho)/rho^{(n+2)/n}`` for ``C(E) = E^{n/2}``: ``n^2/((n+2)(n+4))``."""
    return n * n / ((n + 2) * (n + 4))


def envelope_closed_form(n: int, K: float) -> DerivedBound:
    """Ratio infimum for ``C(E) = K E^{n/2}``: ``(2/n) K^{-2/n} n^3/(2(n+2)(n+4))``."""
    if n < 2 or int(n) != n:
        raise DomainError("n must be an integer >= 2")
    if not K > 0:
        raise DomainError("K must be positive")
    val = (2 / n) * K ** (-2 / n) * n**3 / (2 * (n + 2) * (n + 4))
    return _bound(val, math.inf, Method.CLOSED_FORM, 0.0, tail=val)


def tail_limit(counting, dim: int) -> float | None:
    """``lim_{rho -> inf}`` of the ratio, when it is known in closed form.

    Power laws use their own coefficient; step functions use the leading
    (Weyl) coefficient of their spectrum.
    """
    if isinstance(counting, ExactStep):
        w = float(weyl_coefficient(counting.spectrum.manifold)) * counting.scale
        return power_law_coefficient(dim) * w ** (-2 / dim)
    if not math.isclose(2 * counting.exponent, dim, rel_tol=0, abs_tol=1e-12):
        return None
    return power_law_coefficient(dim) * counting.K ** (-2 / dim)


def natural_scale(counting) -> float:
    """Value of the counting function just above its first jump."""
    if isinstance(counting, ExactStep):
        return counting.step_table()[1][0]
    if isinstance(counting, PaperC):
        return counting.K * counting.threshold**counting.exponent
    return counting.K


def tau_rho(spectrum: Spectrum, rho: float, convention: str = "count") -> float:
    """Smallest eigenvalue ``lambda`` with ``#{lambda_j <= lambda} >= rho``.

    ``convention="count"`` applies this to every ``rho > 0``;
    ``convention="eigenvalue"`` returns 0 when ``rho < lambda_1``.
    """
    if not rho > 0:
        raise DomainError("rho must be positive")
    if convention not in ("count", "eigenvalue"):
        raise DomainError(f"unknown convention {convention!r}")
    if convention == "eigenvalue" and rho < spectrum.levels[0].eigenvalue:
        return 0.0
    for lev, cum in zip(spectrum.levels, spectrum.cumulative):
        if cum >= rho:
            return float(lev.eigenvalue)
    raise OutOfRangeError(
        f"rho={rho} exceeds the count {spectrum.total_count} available below the cutoff"
    )


# ---------------------------------------------------------------------------
# infimum search
# ---------------------------------------------------------------------------


def golden_section(f, a: float, b: float, tol: float = 1e-10, max_iter: int = 500):
    """Minimise a unimodal ``f`` on ``[a, b]`` until ``b - a <= tol``."""
    x1 = b - GOLDEN * (b - a)
    x2 = a + GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - GOLDEN * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + GOLDEN * (b - a)
            f2 = f(x2)
    if f1 <= f2:
        return x1, f1, abs(f2 - f1)
    return x2, f2, abs(f2 - f1)


@dataclass(frozen=True)
class EngineProblem:
    """A counting function on a ``dim``-dimensional manifold plus a rho grid.

    The grid runs over ``[rho_min, rho_max] * natural_scale(counting)`` with
    ``points`` log-spaced nodes. Step counting functions are further capped
    at a quarter of their largest available count.
    """

    counting: object
    dim: int
    rho_min: float = 1e-4
    rho_max: float = 1e8
    points: int = 512
    integrator: str = "exact"

    def __post_init__(self):
        if self.dim < 1 or int(self.dim) != self.dim:
            raise DomainError("dim must be a positive integer")
        if not (0 < self.rho_min < self.rho_max) or self.points < 3:
            raise DomainError("bad rho grid")

    @property
    def exponent(self) -> float:
        return (self.dim + 2) / self.dim

    def rho_range(self) -> tuple[float, float]:
        s = natural_scale(self.counting)
        lo, hi = self.rho_min * s, self.rho_max * s
        if isinstance(self.counting, ExactStep):
            hi = min(hi, self.counting.step_table()[1][-1] / 4)
            if hi <= lo:
                raise InconclusiveError("spectrum cutoff too small for a ratio search")
        return lo, hi


def infimum_ratio(problem: EngineProblem) -> DerivedBound:
    """``inf_rho I(rho)/rho^p`` by grid search, golden-section refinement and tail check."""
    c, n = problem.counting, problem.dim
    lo, hi = problem.rho_range()
    grid = np.geomspace(lo, hi, problem.points)
    values = ratio(c, grid, n, problem.integrator)
    tail = tail_limit(c, n)
    meta = {
        "rho_min": lo,
        "rho_max": hi,
        "points": problem.points,
        "spacing": "log",
        "integrator": problem.integrator,
        "refine": "golden_section",
        "refine_tol_log_rho": 1e-10,
        "counting": describe_counting(c),
        "dim": n,
        "exponent": problem.exponent,
    }

    i = int(np.argmin(values))
    if i == 0 and values[1] - values[0] <= FLAT_RTOL * abs(values[0]):
        # a flat ratio (pure power law) has no meaningful edge minimum
        i = 1
    if i == 0:
        raise InconclusiveError("ratio minimum sits at the lower end of the rho grid")
    if i < len(grid) - 1:
        f = lambda t: float(ratio(c, math.exp(t), n, problem.integrator))
        t, best, spread = golden_section(f, math.log(grid[i - 1]), math.log(grid[i + 1]))
        finite_arg, finite_val, finite_err = math.exp(t), best, spread
    else:
        if tail is None:
            raise InconclusiveError(
                "ratio still decreasing at the top of the rho grid and no tail limit is known"
            )
        finite_arg, finite_val, finite_err = math.inf, float(values[-1]), abs(values[-1] - tail)

    if tail is not None and tail < finite_val:
        return _bound(tail, math.inf, Method.QUADRATURE, abs(values[-1] - tail), tail, meta)
    return _bound(finite_val, finite_arg, Method.QUADRATURE, finite_err, tail, meta)


# ---------------------------------------------------------------------------
# manifold front end
# ---------------------------------------------------------------------------


def envelope_counting(manifold: ManifoldId) -> PaperC:
    """The thresholded power-law density used in the analytic proofs."""
    if manifold.kind == "so3":
        env = so3_envelope(manifold.measure)
        return PaperC(env.threshold, env.exponent, env.K)
    m = 4 if manifold.kind == "su2" else manifold.m
    if m < 3:
        raise DomainError("no constant is derived for the circle (m = 2)")
    env = envelope_Km(m)
    K = env.K
    if manifold.measure is Measure.NORMALIZED:
        K *= manifold.geometric_volume
    return PaperC(env.threshold, env.exponent, K)


def exact_counting(manifold: ManifoldId, cutoff: float) -> ExactStep:
    """Step density ``#{lambda_j < E} / vol`` of the true spectrum."""
    if manifold.spectral_model.kind == "sphere" and manifold.spectral_model.m < 3:
        raise DomainError("no constant is derived for the circle (m = 2)")
    return ExactStep(build_spectrum(manifold, cutoff), 1.0 / manifold.volume)


def derive_constant(
    manifold: ManifoldId,
    mode: Mode | str = Mode.PAPER_ENVELOPE,
    cutoff: float = 1e6,
    points: int = 512,
) -> DerivedBound:
    """Derive a Lieb-Thirring constant for ``manifold``.

    ``mode="envelope"`` reproduces the analytic constants; ``mode="exact"``
    uses the true step counting function truncated at ``cutoff``, which
    can only sharpen the bound.
    """
    mode = Mode(mode)
    if mode is Mode.PAPER_ENVELOPE:
        counting = envelope_counting(manifold)
    else:
        counting = exact_counting(manifold, cutoff)
    bound = infimum_ratio(EngineProblem(counting, manifold.dim, points=points))
    bound.grid.update({"mode": mode.value, "manifold": manifold.to_dict(), "version": __version__})
    return bound


def as_constant_report(bound: DerivedBound, manifold: ManifoldId, name: str = "") -> ConstantReport:
    return ConstantReport(
        manifold=manifold,
        name=name or f"k_{manifold.label}_numeric",
        value=bound.constant,
        exact_form="",
        source=Source.NUMERIC_INFIMUM,
        digits=repr(bound.constant),
        note=f"est_error of the infimum: {bound.est_error:.3g}",
    )
