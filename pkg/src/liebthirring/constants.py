"""Explicit Lieb-Thirring constants on spheres, SU(2) and SO(3).

Values are computed with :mod:`mpmath` at 50 significant digits and
reported as doubles. Every analytic report also carries ``exact_form``, a
SymPy-parsable expression of the same number, so the value can be
re-derived independently with :func:`evaluate_exact_form`.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import mpmath

from .errors import DomainError
from .spectra import ManifoldId, Measure

DPS = 50


class Source(str, enum.Enum):
    ANALYTIC = "analytic"
    NUMERIC_INFIMUM = "numeric_infimum"


@dataclass(frozen=True)
class ConstantReport:
    manifold: ManifoldId
    name: str
    value: float
    exact_form: str
    source: Source = Source.ANALYTIC
    digits: str = ""
    note: str = ""

    @property
    def measure(self) -> Measure:
        return self.manifold.measure

    def to_dict(self) -> dict:
        return {
            "manifold": self.manifold.label,
            "measure": self.measure.value,
            "name": self.name,
            "value": self.value,
            "exact_form": self.exact_form,
            "source": self.source.value,
            "digits": self.digits,
            "note": self.note,
        }


@dataclass(frozen=True)
class EnvelopeBound:
    """Counting bound ``K * E**exponent`` valid above ``threshold``."""

    K: float
    exponent: float
    threshold: float

    def __post_init__(self):
        if not (self.K > 0 and self.exponent > 0 and self.threshold >= 0):
            raise DomainError("EnvelopeBound needs K, exponent > 0 and threshold >= 0")


def _report(manifold, name, value_mp, exact_form, note=""):
    return ConstantReport(
        manifold=manifold,
        name=name,
        value=float(value_mp),
        exact_form=exact_form,
        source=Source.ANALYTIC,
        digits=mpmath.nstr(value_mp, 40),
        note=note,
    )


def evaluate_exact_form(expr: str, digits: int = DPS):
    """Evaluate an ``exact_form`` string with SymPy to ``digits`` digits."""
    import sympy

    return sympy.sympify(expr).evalf(digits)


def _check_m(m, lo=3):
    if isinstance(m, bool) or int(m) != m or m < lo:
        raise DomainError(f"m must be an integer >= {lo}, got {m!r}")
    return int(m)


# ---------------------------------------------------------------------------
# sphere constants
# ---------------------------------------------------------------------------


def _sphere_area_mp(m):
    return 2 * mpmath.exp(mpmath.mpf(m) / 2 * mpmath.log(mpmath.pi) - mpmath.loggamma(mpmath.mpf(m) / 2))


def sphere_area(m: int) -> float:
    """Area ``2 pi^{m/2} / Gamma(m/2)`` of the unit sphere S^{m-1}."""
    m = _check_m(m, 2)
    with mpmath.workdps(DPS):
        return float(_sphere_area_mp(m))


def _Km_mp(m):
    m = mpmath.mpf(m)
    return (m + 1) * (m - 1) ** ((m - 3) / 2) / (_sphere_area_mp(m) * mpmath.factorial(m - 1))


def envelope_Km(m: int) -> EnvelopeBound:
    """Envelope ``K_m E^{(m-1)/2}`` of the sphere counting density, ``E > m-1``.

    ``K_m = (m+1)(m-1)^{(m-3)/2} / (sigma_m (m-1)!)``; the density is the
    eigenvalue count divided by the sphere area.
    """
    m = _check_m(m)
    with mpmath.workdps(DPS):
        K = _Km_mp(m)
    return EnvelopeBound(K=float(K), exponent=(m - 1) / 2, threshold=float(m - 1))


def so3_envelope(measure: Measure | str = Measure.NORMALIZED) -> EnvelopeBound:
    """``K = 9 sqrt(2)/4`` (normalized Haar), divided by pi^2 for the geometric measure."""
    K = 9 * math.sqrt(2) / 4
    if Measure(measure) is Measure.GEOMETRIC:
        K /= math.pi**2
    return EnvelopeBound(K=K, exponent=1.5, threshold=2.0)


def _sphere_constant_mp(m):
    m = mpmath.mpf(m)
    q = (m + 1) / (m - 1)
    return (m + 3) / (_sphere_area_mp(m) * mpmath.factorial(m - 1)) ** (2 / (m - 1)) * q**q


_PRETTY_FORMS = {
    3: "3/pi",
    4: "35/18*(25/(6*pi**4))**(1/3)",
    5: "3*sqrt(3/2)/(2*pi)",
    6: "21/10*(3**3*7**2/(2*5**4*pi**6))**(1/5)",
}


def _sphere_constant_form(m):
    if m in _PRETTY_FORMS:
        return _PRETTY_FORMS[m]
    return (
        f"({m}+3)/(2*pi**({m}/2)/gamma({m}/2)*factorial({m - 1}))**(2/{m - 1})"
        f"*(({m}+1)/({m}-1))**(({m}+1)/({m}-1))"
    )


def theorem1_constant(m: int) -> ConstantReport:
    """Upper bound for the Lieb-Thirring constant of S^{m-1}, surface measure."""
    m = _check_m(m)
    with mpmath.workdps(DPS):
        value = _sphere_constant_mp(m)
    return _report(ManifoldId.sphere(m), f"k_S{m - 1}", value, _sphere_constant_form(m))


def su2_constant() -> ConstantReport:
    """The m = 4 constant, on SU(2) with vol(SU(2)) = 2 pi^2."""
    with mpmath.workdps(DPS):
        value = mpmath.mpf(35) / 18 * mpmath.cbrt(mpmath.mpf(25) / (6 * mpmath.pi**4))
    return _report(ManifoldId.su2(Measure.GEOMETRIC), "k_SU2", value, _PRETTY_FORMS[4])


def so3_constants() -> tuple[ConstantReport, ConstantReport]:
    """``(normalized, geometric)`` SO(3) constants; they differ by pi^{4/3}."""
    with mpmath.workdps(DPS):
        norm = mpmath.mpf(35) / (2 * mpmath.cbrt(9))
        geo = norm / mpmath.pi ** (mpmath.mpf(4) / 3)
    return (
        _report(ManifoldId.so3(Measure.NORMALIZED), "k_SO3", norm, "35/(2*3**(2/3))"),
        _report(ManifoldId.so3(Measure.GEOMETRIC), "k_SO3", geo, "35/(2*3**(2/3)*pi**(4/3))"),
    )


def analytic_constant(manifold: ManifoldId) -> ConstantReport:
    """The analytic constant matching ``manifold`` and its measure.

    Normalized sphere and SU(2) constants follow from the geometric ones by
    rescaling: with ``V`` the volume and ``n`` the dimension the bound
    picks up a factor ``V^{2/n}``.
    """
    if manifold.kind == "so3":
        norm, geo = so3_constants()
        return norm if manifold.measure is Measure.NORMALIZED else geo
    if manifold.kind == "su2":
        geo = su2_constant()
        m = 4
    else:
        if manifold.m < 3:
            raise DomainError("no constant is derived for the circle (m = 2)")
        m = manifold.m
        geo = theorem1_constant(m)
    if manifold.measure is Measure.GEOMETRIC:
        return geo
    n = m - 1
    with mpmath.workdps(DPS):
        value = mpmath.mpf(geo.digits) * _sphere_area_mp(m) ** (mpmath.mpf(2) / n)
    form = f"({geo.exact_form})*(2*pi**({m}/2)/gamma({m}/2))**(2/{n})"
    return _report(manifold, geo.name, value, form, note="rescaled to the normalized measure")


# ---------------------------------------------------------------------------
# Euclidean reference constants
# ---------------------------------------------------------------------------


def classical_L(gamma: float, n: int) -> float:
    """``Gamma(g+1) / (2^n pi^{n/2} Gamma(g + n/2 + 1))``."""
    if gamma < 0:
        raise DomainError("gamma must be >= 0")
    n = _check_m(n, 1)
    with mpmath.workdps(DPS):
        g = mpmath.mpf(gamma)
        logv = (
            mpmath.loggamma(g + 1)
            - n * mpmath.log(2)
            - mpmath.mpf(n) / 2 * mpmath.log(mpmath.pi)
            - mpmath.loggamma(g + mpmath.mpf(n) / 2 + 1)
        )
        return float(mpmath.exp(logv))


def kn_from_L1n(n: int, L1n: float) -> float:
    """Orthonormal-family constant ``k_n = (2/n)(1+n/2)^{(n+2)/n} L_{1,n}^{2/n}``."""
    n = _check_m(n, 1)
    if not L1n > 0:
        raise DomainError("L1n must be positive")
    with mpmath.workdps(DPS):
        nn = mpmath.mpf(n)
        return float(2 / nn * (1 + nn / 2) ** ((nn + 2) / nn) * mpmath.mpf(L1n) ** (2 / nn))


# ---------------------------------------------------------------------------
# the ratio functional on spheres
# ---------------------------------------------------------------------------


def J(rho: float, m: int) -> float:
    """Closed form of ``I_1(rho)/rho^{(m+1)/(m-1)}`` for the unit-K sphere problem.

    Valid for ``rho > (m-1)^{(m-1)/2}``; strictly decreasing there with limit
    ``(m-1)^2/((m+1)(m+3))``.
    """
    m = _check_m(m)
    with mpmath.workdps(DPS):
        r = mpmath.mpf(rho)
        mm = mpmath.mpf(m)
        if r <= (mm - 1) ** ((mm - 1) / 2):
            raise DomainError(f"J(rho, {m}) needs rho > {(m - 1) ** ((m - 1) / 2)}")
        p = (mm + 1) / (mm - 1)
        rp = r**p
        num = (
            (mm - 1) ** 2 * rp
            + 8 * (mm + 1) * (mm - 1) ** ((mm + 3) / 4) * mpmath.sqrt(r)
            - 2 * (mm + 3) * (mm - 1) ** ((mm + 1) / 2)
        )
        return float(num / (rp * (mm + 1) * (mm + 3)))


def J_limit(m: int) -> float:
    m = _check_m(m)
    return (m - 1) ** 2 / ((m + 1) * (m + 3))


# ---------------------------------------------------------------------------
# comparison with published bounds
# ---------------------------------------------------------------------------

# Literature columns, copied verbatim (not recomputed): Ilyin (S^{m-1} for
# all m), Ilyin-Laptev (S^2 only), Pan (S^4).
LITERATURE = {
    3: {"ilyin": "≈1.777", "ilyin_laptev": "3π/32≈0.2945", "pan": "-"},
    4: {"ilyin": "≈1.645", "ilyin_laptev": "-", "pan": "-"},
    5: {"ilyin": "≈1.755", "ilyin_laptev": "-", "pan": "0.1728"},
    6: {"ilyin": "≈2.009", "ilyin_laptev": "-", "pan": "-"},
}

PUBLISHED_VALUES = {3: "0.956", 4: "0.6800", 5: "0.5847", 6: "0.5377"}


@dataclass(frozen=True)
class ComparisonRow:
    m: int
    report: ConstantReport
    printed: str
    literature: dict = field(default_factory=dict)
    note: str = ""

    @property
    def rounded(self) -> str:
        return f"{self.report.value:.4f}"

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "theorem1": self.report.value,
            "rounded": self.rounded,
            "exact_form": self.report.exact_form,
            "printed": self.printed,
            **self.literature,
            "note": self.note,
        }


def table1() -> list[ComparisonRow]:
    rows = []
    for m in range(3, 7):
        rep = theorem1_constant(m)
        note = ""
        if m == 3:
            note = "3/pi = 0.95493...; the printed 0.956 rounds the third decimal up"
        elif m == 5:
            note = "0.58477...; the printed 0.5847 is truncated, not rounded"
        rows.append(ComparisonRow(m, rep, PUBLISHED_VALUES[m], dict(LITERATURE[m]), note))
    return rows
