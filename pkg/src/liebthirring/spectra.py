"""Closed-form Laplace-Beltrami spectra of S^{m-1}, SU(2) and SO(3).

Eigenvalues and multiplicities are exact Python integers. The zero
eigenvalue (constant functions) is never part of a :class:`Spectrum`.

Two counting conventions coexist and are kept apart on purpose:

* :meth:`Spectrum.count_below` counts eigenvalues ``< E`` (the rank of the
  spectral projection onto energies below ``E``);
* :meth:`Spectrum.count_upto` and the ``*_cumulative_count`` closed forms
  count levels ``<= E``.
"""
from __future__ import annotations

import bisect
import enum
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DomainError, EmptySpectrumError, OutOfRangeError


class Measure(str, enum.Enum):
    NORMALIZED = "normalized"
    GEOMETRIC = "geometric"


def _sphere_area(m: int) -> float:
    # 2 pi^{m/2} / Gamma(m/2) in log space
    return math.exp(math.log(2.0) + 0.5 * m * math.log(math.pi) - math.lgamma(0.5 * m))


@dataclass(frozen=True)
class ManifoldId:
    """Identifies a manifold together with its measure convention.

    ``kind`` is one of ``"sphere"``, ``"so3"``, ``"su2"``. For spheres ``m`` is
    the *ambient* dimension, so ``ManifoldId.sphere(3)`` is the 2-sphere.
    """

    kind: str
    m: int | None = None
    measure: Measure = Measure.GEOMETRIC

    def __post_init__(self):
        if self.kind not in ("sphere", "so3", "su2"):
            raise DomainError(f"unknown manifold kind {self.kind!r}")
        if self.kind == "sphere":
            if self.m is None or int(self.m) != self.m or self.m < 2:
                raise DomainError(f"sphere requires integer m >= 2, got {self.m!r}")
        elif self.m is not None:
            raise DomainError(f"{self.kind} takes no dimension parameter")
        object.__setattr__(self, "measure", Measure(self.measure))

    @classmethod
    def sphere(cls, m: int, measure: Measure | str = Measure.GEOMETRIC) -> "ManifoldId":
        return cls("sphere", m, Measure(measure))

    @classmethod
    def so3(cls, measure: Measure | str = Measure.NORMALIZED) -> "ManifoldId":
        return cls("so3", None, Measure(measure))

    @classmethod
    def su2(cls, measure: Measure | str = Measure.GEOMETRIC) -> "ManifoldId":
        return cls("su2", None, Measure(measure))

    @classmethod
    def parse(cls, text: str, measure: Measure | str | None = None) -> "ManifoldId":
        """Parse ``sphere:<m>``, ``so3`` or ``su2``.

        ``<m>`` is the ambient dimension: ``sphere:3`` is S^2. When
        ``measure`` is omitted the default is geometric, except for SO(3)
        which defaults to the normalized Haar measure.
        """
        text = text.strip().lower()
        if text.startswith("sphere:"):
            try:
                m = int(text.split(":", 1)[1])
            except ValueError:
                raise DomainError(f"bad sphere dimension in {text!r}") from None
            return cls.sphere(m, measure or Measure.GEOMETRIC)
        if text == "so3":
            return cls.so3(measure or Measure.NORMALIZED)
        if text == "su2":
            return cls.su2(measure or Measure.GEOMETRIC)
        raise DomainError(f"unknown manifold {text!r}; expected sphere:<m>, so3 or su2")

    def with_measure(self, measure: Measure | str) -> "ManifoldId":
        return ManifoldId(self.kind, self.m, Measure(measure))

    @property
    def label(self) -> str:
        return f"sphere:{self.m}" if self.kind == "sphere" else self.kind

    @property
    def dim(self) -> int:
        if self.kind == "sphere":
            return self.m - 1
        return 3

    @property
    def geometric_volume(self) -> float:
        if self.kind == "sphere":
            return _sphere_area(self.m)
        if self.kind == "so3":
            return math.pi**2
        return 2 * math.pi**2

    @property
    def volume(self) -> float:
        if self.measure is Measure.NORMALIZED:
            return 1.0
        return self.geometric_volume

    @property
    def spectral_model(self) -> "ManifoldId":
        """The manifold whose spectrum this one shares (SU(2) is S^3)."""
        if self.kind == "su2":
            return ManifoldId.sphere(4, self.measure)
        return self

    def to_dict(self) -> dict:
        return {"manifold": self.label, "measure": self.measure.value}


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------


def _check_int(name, value, lo):
    if isinstance(value, bool) or int(value) != value:
        raise DomainError(f"{name} must be an integer, got {value!r}")
    if value < lo:
        raise DomainError(f"{name} must be >= {lo}, got {value}")
    return int(value)


def sphere_eigenvalue(m: int, n: int) -> int:
    """Eigenvalue ``n(n+m-2)`` of the positive Laplacian on S^{m-1}."""
    m = _check_int("m", m, 2)
    n = _check_int("n", n, 0)
    return n * (n + m - 2)


def sphere_multiplicity(m: int, n: int) -> int:
    """Dimension ``(2n+m-2)(n+m-3)!/((m-2)! n!)`` of the degree-n harmonics."""
    m = _check_int("m", m, 2)
    n = _check_int("n", n, 1)
    num = (2 * n + m - 2) * math.factorial(n + m - 3)
    den = math.factorial(m - 2) * math.factorial(n)
    q, r = divmod(num, den)
    assert r == 0
    return q


def sphere_cumulative_count(m: int, n: int) -> int:
    """Number of nonconstant eigenfunctions of S^{m-1} with level ``<= n``.

    Closed form ``m(m+2n-1)(m+n-2)!/(m! n!) - 1``.
    """
    m = _check_int("m", m, 2)
    n = _check_int("n", n, 1)
    num = m * (m + 2 * n - 1) * math.factorial(m + n - 2)
    den = math.factorial(m) * math.factorial(n)
    q, r = divmod(num, den)
    assert r == 0
    return q - 1


def so3_eigenvalue(ell: int) -> int:
    ell = _check_int("ell", ell, 0)
    return ell * (ell + 1)


def so3_multiplicity(ell: int) -> int:
    ell = _check_int("ell", ell, 1)
    return (2 * ell + 1) ** 2


def so3_cumulative_count(n: int) -> int:
    """``sum_{l=1}^n (2l+1)^2 = (4n^3 + 12n^2 + 11n)/3``."""
    n = _check_int("n", n, 1)
    q, r = divmod(4 * n**3 + 12 * n**2 + 11 * n, 3)
    assert r == 0
    return q


def level_eigenvalue(manifold: ManifoldId, n: int) -> int:
    model = manifold.spectral_model
    if model.kind == "sphere":
        return sphere_eigenvalue(model.m, n)
    return so3_eigenvalue(n)


def level_multiplicity(manifold: ManifoldId, n: int) -> int:
    model = manifold.spectral_model
    if model.kind == "sphere":
        return sphere_multiplicity(model.m, n)
    return so3_multiplicity(n)


def cumulative_count(manifold: ManifoldId, n: int) -> int:
    model = manifold.spectral_model
    if model.kind == "sphere":
        return sphere_cumulative_count(model.m, n)
    return so3_cumulative_count(n)


def weyl_coefficient(manifold: ManifoldId) -> Fraction:
    """Leading coefficient ``w`` of the level count, ``N(E) ~ w E^{dim/2}``.

    Refers to the raw eigenvalue count, independent of the measure.
    """
    model = manifold.spectral_model
    if model.kind == "sphere":
        # cumulative count ~ 2 n^{m-1}/(m-1)!, n ~ sqrt(E)
        return Fraction(2, math.factorial(model.m - 1))
    return Fraction(4, 3)


# ---------------------------------------------------------------------------
# spectra
# ---------------------------------------------------------------------------


class EigenLevel(NamedTuple):
    index: int
    eigenvalue: int
    multiplicity: int


@dataclass(frozen=True)
class Spectrum:
    """Nonzero eigenvalue levels up to (and including) ``cutoff``."""

    manifold: ManifoldId
    levels: tuple[EigenLevel, ...]
    cutoff: float
    _cum: tuple[int, ...] = field(init=False, repr=False, compare=False)
    _eigs: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.levels:
            raise EmptySpectrumError("spectrum has no nonzero levels")
        cum, total = [], 0
        for lev in self.levels:
            total += lev.multiplicity
            cum.append(total)
        object.__setattr__(self, "_cum", tuple(cum))
        object.__setattr__(self, "_eigs", tuple(lev.eigenvalue for lev in self.levels))

    @property
    def dim(self) -> int:
        return self.manifold.dim

    @property
    def volume(self) -> float:
        return self.manifold.volume

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.array([lev.eigenvalue for lev in self.levels], dtype=float)

    @property
    def multiplicities(self) -> list[int]:
        return [lev.multiplicity for lev in self.levels]

    @property
    def cumulative(self) -> tuple[int, ...]:
        """Running totals of multiplicities, as exact integers."""
        return self._cum

    @property
    def total_count(self) -> int:
        return self._cum[-1]

    def _check(self, E):
        if E > self.cutoff:
            raise OutOfRangeError(f"E={E} exceeds the spectrum cutoff {self.cutoff}")

    def count_below(self, E: float) -> int:
        """``#{lambda_j < E}`` counted with multiplicity."""
        self._check(E)
        k = bisect.bisect_left(self._eigs, E)
        return self._cum[k - 1] if k else 0

    def count_upto(self, E: float) -> int:
        """``#{lambda_j <= E}`` counted with multiplicity."""
        self._check(E)
        k = bisect.bisect_right(self._eigs, E)
        return self._cum[k - 1] if k else 0

    def to_dict(self) -> dict:
        return {
            "manifold": self.manifold.label,
            "measure": self.manifold.measure.value,
            "levels": [[lev.eigenvalue, lev.multiplicity] for lev in self.levels],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def build_spectrum(manifold: ManifoldId, cutoff: float) -> Spectrum:
    """All nonzero eigenvalue levels ``<= cutoff``, ascending."""
    if not cutoff > 0:
        raise DomainError(f"cutoff must be positive, got {cutoff}")
    levels = []
    n = 1
    while True:
        lam = level_eigenvalue(manifold, n)
        if lam > cutoff:
            break
        levels.append(EigenLevel(n, lam, level_multiplicity(manifold, n)))
        n += 1
    if not levels:
        raise EmptySpectrumError(
            f"cutoff {cutoff} is below the first eigenvalue "
            f"{level_eigenvalue(manifold, 1)} of {manifold.label}"
        )
    return Spectrum(manifold, tuple(levels), float(cutoff))


# ---------------------------------------------------------------------------
# counting functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExactStep:
    """``scale * #{lambda_j < E}`` for a truncated spectrum.

    ``scale`` is ``1/vol`` when the counting function should describe the
    pointwise density of the spectral projection under a geometric measure.
    """

    spectrum: Spectrum
    scale: float = 1.0

    @property
    def dim(self) -> int:
        return self.spectrum.dim

    @property
    def cutoff(self) -> float:
        return self.spectrum.cutoff

    def __call__(self, E):
        if np.ndim(E) == 0:
            c = self.spectrum.count_below(E)
            return c if self.scale == 1.0 else self.scale * c
        E = np.asarray(E, dtype=float)
        if np.any(E > self.cutoff):
            raise OutOfRangeError(f"energies exceed the spectrum cutoff {self.cutoff}")
        cum = np.concatenate([[0.0], np.array(self.spectrum.cumulative, dtype=float)])
        k = np.searchsorted(self.spectrum.eigenvalues, E, side="left")
        return self.scale * cum[k]

    def step_table(self) -> tuple[np.ndarray, np.ndarray]:
        """Eigenvalues and the (scaled) count just above each of them."""
        return (
            self.spectrum.eigenvalues,
            self.scale * np.array(self.spectrum.cumulative, dtype=float),
        )


@dataclass(frozen=True)
class Envelope:
    """Power-law majorant ``K * E**exponent``."""

    K: float
    exponent: float

    def __post_init__(self):
        if not (self.K > 0 and self.exponent > 0):
            raise DomainError("Envelope needs K > 0 and exponent > 0")

    @property
    def scale(self) -> float:
        return self.K

    @property
    def dim(self) -> float:
        return 2 * self.exponent

    def __call__(self, E):
        return self.K * np.asarray(E, dtype=float) ** self.exponent


@dataclass(frozen=True)
class PaperC:
    """``K * C(E)`` with ``C(E) = E**exponent`` above ``threshold``, else 0."""

    threshold: float
    exponent: float
    K: float = 1.0

    def __post_init__(self):
        if not (self.K > 0 and self.exponent > 0 and self.threshold >= 0):
            raise DomainError("PaperC needs K > 0, exponent > 0, threshold >= 0")

    @property
    def scale(self) -> float:
        return self.K

    @property
    def dim(self) -> float:
        return 2 * self.exponent

    def __call__(self, E):
        E = np.asarray(E, dtype=float)
        out = np.where(E > self.threshold, self.K * np.abs(E) ** self.exponent, 0.0)
        return float(out) if out.ndim == 0 else out


CountingFunction = ExactStep | Envelope | PaperC


def counting_value(c: CountingFunction, E: float):
    """Evaluate a counting function; negative energies are rejected."""
    if np.any(np.asarray(E) < 0):
        raise DomainError("E must be nonnegative")
    return c(E)


def levels_between(manifold: ManifoldId, levels: Sequence[int]) -> list[EigenLevel]:
    return [
        EigenLevel(n, level_eigenvalue(manifold, n), level_multiplicity(manifold, n))
        for n in levels
    ]
