import dataclasses
import math

import numpy as np
import pytest

from liebthirring import verify
from liebthirring.constants import analytic_constant, so3_constants, theorem1_constant
from liebthirring.errors import (
    CertificationError,
    DomainError,
    InsufficientSamplesError,
    MeasureMismatchError,
)
from liebthirring.harmonics import gradient_energy
from liebthirring.quadrature import build_rule
from liebthirring.spectra import ManifoldId, Measure
from liebthirring.verify import (
    evaluate_inequality,
    family_lhs,
    full_shell_family,
    parse_families,
    random_mixture_family,
    single_harmonic_family,
    sweep,
    zonal_lhs_reference,
)

S2 = ManifoldId.sphere(3)
SO3N = ManifoldId.so3(Measure.NORMALIZED)
SO3G = ManifoldId.so3(Measure.GEOMETRIC)


def test_full_shell_sizes_and_density():
    f = full_shell_family(S2, 1)
    assert f.size == 3
    x = build_rule(S2, 4).nodes
    assert np.allclose(f.density(x), 3 / (4 * math.pi), rtol=1e-13)
    g = full_shell_family(SO3N, 1)
    assert g.size == 9
    assert np.allclose(g.density(build_rule(SO3N, 4).nodes), 9.0, rtol=1e-12)
    assert full_shell_family(ManifoldId.sphere(4), 2).size == 13
    with pytest.raises(DomainError):
        full_shell_family(S2, 0)


def test_shell_example_two_sphere():
    rep = evaluate_inequality(full_shell_family(S2, 1), theorem1_constant(3))
    assert rep.lhs == pytest.approx(9 / (4 * math.pi), rel=1e-14)
    assert rep.rhs_energy == pytest.approx(6.0)
    assert rep.ratio == pytest.approx(3 / (8 * math.pi), rel=1e-14)
    assert rep.certified and rep.empirical_lower_bound == rep.ratio


def test_single_harmonic_example_two_sphere():
    fam = single_harmonic_family(S2, 1, index=1)  # order 0, proportional to cos(theta)
    rep = evaluate_inequality(fam, theorem1_constant(3))
    assert rep.lhs == pytest.approx(9 / (20 * math.pi), rel=1e-12)
    assert rep.rhs_energy == pytest.approx(2.0)
    assert rep.ratio == pytest.approx(9 / (40 * math.pi), rel=1e-12)
    assert rep.certified


def test_shell_example_so3():
    norm, _ = so3_constants()
    rep = evaluate_inequality(full_shell_family(SO3N, 1), norm)
    assert rep.lhs == pytest.approx(9 ** (5 / 3), rel=1e-14)
    assert rep.rhs_energy == pytest.approx(18.0)
    assert rep.ratio == pytest.approx(9 ** (5 / 3) / 18, rel=1e-14)
    assert rep.certified


@pytest.mark.parametrize(
    "man", [S2, ManifoldId.sphere(4), ManifoldId.su2(), SO3N, SO3G, ManifoldId.sphere(3, Measure.NORMALIZED)],
    ids=lambda m: f"{m.label}-{m.measure.value}",
)
def test_shell_closed_form_matches_quadrature(man):
    for n in (1, 2, 3):
        fam = full_shell_family(man, n)
        closed = family_lhs(fam, "closed")[0]
        quad = family_lhs(fam, "quadrature")[0]
        assert quad == pytest.approx(closed, rel=1e-9)


@pytest.mark.parametrize("man", [S2, ManifoldId.sphere(4), SO3N, ManifoldId.sphere(5)], ids=lambda m: m.label)
def test_full_span_mixture_matches_shells(man):
    shell = full_shell_family(man, 2)
    mix = random_mixture_family(man, [1, 2], shell.size, seed=8)
    assert mix.orthonormality_error() < 1e-12
    r_shell = family_lhs(shell)[0] / gradient_energy(shell)
    if man.kind == "sphere" and man.m >= 5:
        # no product rule; compare densities pointwise instead
        pts = np.random.default_rng(0).standard_normal((50, man.m))
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
        assert np.allclose(mix.density(pts), shell.density(pts), rtol=1e-10)
        assert gradient_energy(mix) == pytest.approx(gradient_energy(shell), rel=1e-12)
    else:
        r_mix = family_lhs(mix)[0] / gradient_energy(mix)
        assert r_mix == pytest.approx(r_shell, rel=1e-10)


def test_mixture_examples():
    fam = random_mixture_family(S2, [1], 1, seed=3)
    assert gradient_energy(fam) == pytest.approx(2.0, rel=1e-14)
    big = random_mixture_family(SO3N, [1, 2], 20, seed=1)
    assert big.orthonormality_error() < 1e-12
    assert np.iscomplexobj(big.coefficients)
    with pytest.raises(DomainError):
        random_mixture_family(S2, [1], 4, seed=0)


@pytest.mark.parametrize("man", [S2, ManifoldId.sphere(4), SO3N], ids=lambda m: m.label)
def test_families_have_zero_mean(man):
    rule = build_rule(man, 8)
    for fam in (full_shell_family(man, 2), random_mixture_family(man, [1, 2], 3, seed=2)):
        means = fam.values(rule.nodes) @ rule.weights
        assert np.abs(means).max() < 1e-12


def test_zonal_reference_matches_quadrature_on_two_sphere():
    # single harmonic index n+1 (order 0) is the zonal harmonic about x_3
    for n in (1, 2, 4):
        fam = single_harmonic_family(S2, n, index=n)
        assert family_lhs(fam)[0] == pytest.approx(zonal_lhs_reference(S2, n), rel=1e-9)


@pytest.mark.parametrize("m", [5, 6])
def test_monte_carlo_matches_zonal_reference(m):
    man = ManifoldId.sphere(m)
    for n in (1, 2):
        val, err, method = family_lhs(single_harmonic_family(man, n), samples=1_000_000)
        assert method == "montecarlo"
        assert abs(val - zonal_lhs_reference(man, n)) < 3 * err


def test_insufficient_samples():
    fam = single_harmonic_family(ManifoldId.sphere(6), 3)
    with pytest.raises(InsufficientSamplesError):
        family_lhs(fam, samples=1000)


def test_measure_mismatch():
    with pytest.raises(MeasureMismatchError):
        evaluate_inequality(full_shell_family(SO3G, 1), so3_constants()[0])
    with pytest.raises(DomainError):
        evaluate_inequality(full_shell_family(S2, 1), theorem1_constant(5))


def test_uncertified_family_is_reported():
    tiny = dataclasses.replace(theorem1_constant(3), value=1e-3)
    assert not evaluate_inequality(full_shell_family(S2, 1), tiny).certified


def test_sweep_aborts_on_violation(monkeypatch):
    tiny = dataclasses.replace(theorem1_constant(3), value=1e-3)
    monkeypatch.setattr(verify, "analytic_constant", lambda man: tiny)
    with pytest.raises(CertificationError) as exc:
        sweep(S2, parse_families(S2, "shells:1..2"))
    assert len(exc.value.reports) == 2
    assert "shells:1" in str(exc.value)


def test_sweep_two_sphere_shells():
    s = sweep(S2, parse_families(S2, "shells:1..6"))
    assert s.all_certified and len(s.reports) == 6
    assert s.max_ratio == max(r.ratio for r in s.reports)
    assert [r.family for r in s.reports] == [f"shells:{n}" for n in range(1, 7)]


def test_sweep_so3_measure_covariance():
    fams_n = parse_families(SO3N, "shells:1..5")
    fams_g = parse_families(SO3G, "shells:1..5")
    a = sweep(SO3N, fams_n)
    b = sweep(SO3G, fams_g)
    for ra, rb in zip(a.reports, b.reports):
        assert rb.ratio == pytest.approx(ra.ratio / math.pi ** (4 / 3), rel=1e-10)


def test_sweep_empty():
    with pytest.raises(DomainError):
        sweep(S2, [])


@pytest.mark.parametrize("man", [S2, SO3N, ManifoldId.sphere(4)], ids=lambda m: m.label)
def test_numeric_infimum_constants_also_certify(man):
    fams = parse_families(man, "shells:1..3,single:1:0,mix:1..2:3:2")
    s = sweep(man, fams, "numeric_infimum")
    assert s.all_certified
    assert s.constant.value <= analytic_constant(man).value * (1 + 1e-9)


def test_parallel_sweep_is_deterministic(monkeypatch):
    fams = parse_families(S2, "mix:1..3:5:4")
    serial = sweep(S2, fams).to_dict()
    monkeypatch.setenv("LIEBTHIRRING_THREADS", "4")
    assert sweep(S2, fams).to_dict() == serial


def test_parse_families():
    fams = parse_families(S2, "shells:2..3, single:2:4, mix:1..2:3:2", seed=5)
    assert [f.descriptor for f in fams] == [
        "shells:2", "shells:3", "single:2:4", "mix:1..2:3:seed=5", "mix:1..2:3:seed=6",
    ]
    for bad in ("", "shells", "shells:3..1", "blob:1", "mix:1..2", "single:1:9"):
        with pytest.raises(DomainError):
            parse_families(S2, bad)


def test_single_harmonic_high_sphere_is_zonal_only():
    with pytest.raises(DomainError):
        single_harmonic_family(ManifoldId.sphere(5), 2, index=1)
