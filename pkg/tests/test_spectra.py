import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from liebthirring.errors import DomainError, EmptySpectrumError, OutOfRangeError
from liebthirring.spectra import (
    Envelope,
    ExactStep,
    ManifoldId,
    Measure,
    PaperC,
    build_spectrum,
    counting_value,
    cumulative_count,
    level_multiplicity,
    so3_cumulative_count,
    so3_eigenvalue,
    so3_multiplicity,
    sphere_cumulative_count,
    sphere_eigenvalue,
    sphere_multiplicity,
    weyl_coefficient,
)


def test_sphere_examples():
    assert sphere_eigenvalue(3, 1) == 2
    assert sphere_multiplicity(3, 2) == 5
    assert sphere_multiplicity(4, 2) == 9
    assert sphere_cumulative_count(3, 3) == 15
    assert sphere_cumulative_count(4, 2) == 13


def test_so3_examples():
    assert so3_eigenvalue(2) == 6
    assert so3_multiplicity(1) == 9
    assert [so3_cumulative_count(n) for n in (1, 2, 3)] == [9, 34, 83]


def test_circle_multiplicity_is_two():
    assert all(sphere_multiplicity(2, n) == 2 for n in range(1, 50))


@pytest.mark.parametrize("bad", [0, -1, 1.5, True])
def test_level_index_must_be_positive_integer(bad):
    with pytest.raises(DomainError):
        sphere_multiplicity(3, bad)


def test_sphere_dimension_below_two_rejected():
    with pytest.raises(DomainError):
        sphere_eigenvalue(1, 1)


def test_multiplicity_matches_harmonic_polynomial_count():
    # dim H_n = dim P_n - dim P_{n-2} with dim P_n = C(n+m-1, m-1)
    for m in range(2, 9):
        for n in range(1, 40):
            dim = math.comb(n + m - 1, m - 1) - (math.comb(n + m - 3, m - 1) if n >= 2 else 0)
            assert sphere_multiplicity(m, n) == dim


@given(st.integers(2, 12), st.integers(1, 300))
def test_cumulative_count_is_running_sum(m, n):
    assert sphere_cumulative_count(m, n) - sphere_cumulative_count(m, n - 1 if n > 1 else 1) == (
        sphere_multiplicity(m, n) if n > 1 else 0
    )


@given(st.integers(2, 12), st.integers(1, 200))
def test_su2_matches_three_sphere(m, n):
    su2 = ManifoldId.su2()
    assert level_multiplicity(su2, n) == sphere_multiplicity(4, n)
    assert cumulative_count(su2, n) == sphere_cumulative_count(4, n)


def test_weyl_coefficients():
    assert weyl_coefficient(ManifoldId.sphere(3)) == Fraction(2, 2)
    assert weyl_coefficient(ManifoldId.sphere(5)) == Fraction(2, 24)
    assert weyl_coefficient(ManifoldId.so3()) == Fraction(4, 3)


@pytest.mark.parametrize("m", [3, 4, 5])
def test_weyl_asymptotics(m):
    n = 4000
    lam = sphere_eigenvalue(m, n)
    est = float(weyl_coefficient(ManifoldId.sphere(m))) * lam ** ((m - 1) / 2)
    assert abs(sphere_cumulative_count(m, n) / est - 1) < 2e-3


def test_manifold_parse_and_measure_defaults():
    assert ManifoldId.parse("sphere:3").dim == 2
    assert ManifoldId.parse("so3").measure is Measure.NORMALIZED
    assert ManifoldId.parse("su2").measure is Measure.GEOMETRIC
    assert ManifoldId.parse("SO3", "geometric").geometric_volume == pytest.approx(math.pi**2)
    assert ManifoldId.su2().geometric_volume == pytest.approx(2 * math.pi**2)
    assert ManifoldId.sphere(3, Measure.NORMALIZED).volume == 1.0
    with pytest.raises(DomainError):
        ManifoldId.parse("torus")


def test_spectrum_counting_is_strict():
    spec = build_spectrum(ManifoldId.sphere(3), 20)
    assert spec.count_below(2) == 0
    assert spec.count_upto(2) == 3
    assert spec.count_below(2 + 1e-12) == 3
    assert spec.count_below(6.5) == 8
    assert spec.total_count == 3 + 5 + 7 + 9


def test_spectrum_errors():
    with pytest.raises(EmptySpectrumError):
        build_spectrum(ManifoldId.sphere(3), 1.0)
    spec = build_spectrum(ManifoldId.so3(), 30)
    with pytest.raises(OutOfRangeError):
        spec.count_below(31)


def test_spectrum_json_round_trip():
    spec = build_spectrum(ManifoldId.so3(), 12)
    data = json.loads(spec.to_json())
    assert data == {"manifold": "so3", "measure": "normalized", "levels": [[2, 9], [6, 25], [12, 49]]}


def test_exact_step_matches_spectrum_and_scales():
    man = ManifoldId.sphere(3)
    spec = build_spectrum(man, 100)
    c = ExactStep(spec)
    E = np.array([0.0, 2.0, 2.5, 6.0, 50.0])
    assert list(c(E)) == [spec.count_below(e) for e in E]
    half = ExactStep(spec, scale=0.5)
    assert half(50.0) == pytest.approx(0.5 * c(50.0))


@given(st.floats(0, 1e4))
@settings(max_examples=50)
def test_envelope_dominates_sphere_density_above_threshold(E):
    # K_m E^{(m-1)/2} >= count/area for E > m-1
    from liebthirring.constants import envelope_Km

    m = 3
    env = envelope_Km(m)
    spec = build_spectrum(ManifoldId.sphere(m), 1e4)
    if E > env.threshold:
        assert Envelope(env.K, env.exponent)(E) >= spec.count_below(E) / (4 * math.pi) * (1 - 1e-12)


def test_envelope_counting_vanishes_below_threshold():
    c = PaperC(threshold=2.0, exponent=1.5, K=3.0)
    assert c(1.99) == 0.0
    assert c(4.0) == pytest.approx(24.0)
    with pytest.raises(DomainError):
        counting_value(c, -1.0)
