import math

import numpy as np
import pytest

from liebthirring.constants import sphere_area
from liebthirring.errors import DomainError
from liebthirring.harmonics import sphere_basis_S2
from liebthirring.quadrature import (
    MAX_DEGREE,
    build_rule,
    integrate,
    monte_carlo_sphere,
    sample_sphere,
)
from liebthirring.spectra import ManifoldId, Measure

MANIFOLDS = [
    ManifoldId.sphere(3),
    ManifoldId.sphere(3, Measure.NORMALIZED),
    ManifoldId.sphere(4),
    ManifoldId.su2(),
    ManifoldId.so3(),
    ManifoldId.so3(Measure.GEOMETRIC),
]


@pytest.mark.parametrize("man", MANIFOLDS, ids=lambda m: f"{m.label}-{m.measure.value}")
def test_weights_sum_to_volume(man):
    rule = build_rule(man, 9)
    assert rule.weights.sum() == pytest.approx(man.volume, rel=1e-11)
    assert np.all(rule.weights > 0)


def test_sphere_nodes_are_unit_vectors():
    for man in (ManifoldId.sphere(3), ManifoldId.sphere(4)):
        rule = build_rule(man, 7)
        assert np.allclose(np.linalg.norm(rule.nodes, axis=1), 1.0, atol=1e-14)


@pytest.mark.parametrize("deg", [2, 4, 6, 10])
def test_monomial_moments_s2(deg):
    # int x_3^k over S^2 = 4 pi / (k + 1) for even k
    rule = build_rule(ManifoldId.sphere(3), deg)
    val = integrate(rule, lambda x: x[:, 2] ** deg)
    assert val == pytest.approx(4 * math.pi / (deg + 1), rel=1e-11)


def test_monomial_moments_s3():
    # int x_1^2 x_4^2 over S^3 = 2 pi^2 / 24 (Gaussian moment ratio)
    rule = build_rule(ManifoldId.sphere(4), 4)
    val = integrate(rule, lambda x: x[:, 0] ** 2 * x[:, 3] ** 2)
    assert val == pytest.approx(2 * math.pi**2 / 24, rel=1e-11)


def test_orthonormality_s2_up_to_degree():
    n_max = 6
    rule = build_rule(ManifoldId.sphere(3), 2 * n_max)
    rows = [sphere_basis_S2(n, ell, rule.nodes) for n in range(n_max + 1) for ell in range(1, 2 * n + 2)]
    B = np.array(rows)
    G = (B * rule.weights) @ B.T
    assert np.abs(G - np.eye(len(rows))).max() < 1e-11


def test_rule_errors():
    with pytest.raises(DomainError):
        build_rule(ManifoldId.sphere(5), 4)
    with pytest.raises(DomainError):
        build_rule(ManifoldId.sphere(3), MAX_DEGREE + 1)
    with pytest.raises(DomainError):
        build_rule(ManifoldId.sphere(3), 0)


def test_integrate_reports_bad_nodes():
    rule = build_rule(ManifoldId.sphere(3), 4)
    with pytest.raises(DomainError, match="node"):
        integrate(rule, lambda x: np.where(x[:, 0] > 0, np.inf, 0.0))
    with pytest.raises(DomainError, match="shape"):
        integrate(rule, lambda x: x)


def test_sample_sphere_is_reproducible_and_unit():
    a = sample_sphere(5, 100, seed=3)
    assert np.array_equal(a, sample_sphere(5, 100, seed=3))
    assert np.allclose(np.linalg.norm(a, axis=1), 1.0)


@pytest.mark.parametrize("m", [3, 5, 6])
def test_monte_carlo_second_moment(m):
    # int x_1^2 = area/m
    val, err = monte_carlo_sphere(m, 200_000, 11, lambda x: x[:, 0] ** 2)
    exact = sphere_area(m) / m
    assert abs(val - exact) < 4 * err
    assert err < 0.01 * exact


def test_monte_carlo_chunking_does_not_change_samples():
    f = lambda x: x[:, 0] ** 4
    a = monte_carlo_sphere(4, 10_000, 5, f, chunk=10_000)
    b = monte_carlo_sphere(4, 10_000, 5, f, chunk=3_000)
    assert a[0] == pytest.approx(b[0], rel=1e-12)


def test_monte_carlo_needs_samples():
    with pytest.raises(DomainError):
        monte_carlo_sphere(5, 10, 0, lambda x: x[:, 0])
