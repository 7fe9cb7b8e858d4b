import json
import math

import numpy as np
import pytest

from symcone.algebra import Algebra, Element, eigenvalues, inner, trace, unit
from symcone.funceq import (
    ResidualReport,
    ScalarField,
    SolutionFamily,
    cauchy_difference,
    cocycle_residual,
    generate_pexider_samples,
    homogeneity_defect,
    log_det_field,
    log_quadratic_residual,
    make_regular_solution,
    olkin_baker_residual,
    pexider_fit,
    sample_cone_pairs,
    sample_cone_points,
    sample_cone_triples,
    trace_field,
    wishart_dictionary,
    with_injected_defect,
)
from symcone.geometry import ConeElement
from symcone.harness import split

SYM1 = Algebra.sym_real(1)
SYM2 = Algebra.sym_real(2)
SYM3 = Algebra.sym_real(3)


@pytest.fixture(scope="module")
def sym3_pairs():
    return sample_cone_pairs(SYM3, 500, seed=101)


# ---------------------------------------------------------------------------
# solution families
# ---------------------------------------------------------------------------

def test_zero_family_is_identically_zero():
    fam = SolutionFamily(lam=0.0 * unit(SYM2), c1=0.0, c2=0.0, kappa=0.0)
    a, b, c, d = make_regular_solution(fam)
    assert a(unit(SYM2)) == b(unit(SYM2)) == c(unit(SYM2)) == 0.0
    assert d(0.5 * unit(SYM2)) == 0.0


def test_scalar_family_closed_form():
    fam = SolutionFamily(lam=-1.0 * unit(SYM1), c1=1.0, c2=2.0, kappa=0.0)
    a, _, _, _ = make_regular_solution(fam)
    for x in (0.5, 1.0, 3.0):
        assert a(Element(SYM1, [x])) == pytest.approx(-x + math.log(x), abs=1e-14)


def test_beta_component_at_half_unit():
    fam = SolutionFamily(lam=0.0 * unit(SYM2), c1=1.0, c2=1.0, kappa=0.0)
    _, _, _, d = make_regular_solution(fam)
    # det((1/2) e) = 1/4 on rank two, both log-det terms contribute
    assert d(0.5 * unit(SYM2)) == pytest.approx(-4.0 * math.log(2.0), abs=1e-12)


FAMILIES = [
    SolutionFamily(lam=0.0 * unit(SYM3), c1=0.0, c2=0.0, kappa=0.0),
    SolutionFamily(lam=-1.0 * unit(SYM3), c1=1.0, c2=2.0, kappa=0.0),
    SolutionFamily(lam=0.3 * unit(SYM3), c1=-0.7, c2=1.9, kappa=2.5),
]


@pytest.mark.parametrize("fam", FAMILIES, ids=["zero", "simple", "generic"])
def test_solution_families_solve_olkin_baker(fam, sym3_pairs):
    report = olkin_baker_residual(*make_regular_solution(fam), sym3_pairs)
    assert report.max_residual < 1e-10
    assert report.equation == "olkin-baker"
    assert report.n_pairs == len(sym3_pairs)


def test_family_with_generic_lambda(rng, sym3_pairs):
    lam = Element(SYM3, rng.standard_normal(SYM3.dim))
    fam = SolutionFamily(lam=lam, c1=0.8, c2=-0.2, kappa=-1.0)
    report = olkin_baker_residual(*make_regular_solution(fam), sym3_pairs)
    assert report.max_residual < 1e-10


def test_kappa_is_a_gauge_freedom(sym3_pairs):
    base = SolutionFamily(lam=0.2 * unit(SYM3), c1=1.0, c2=0.5, kappa=0.0)
    shifted = SolutionFamily(lam=base.lam, c1=base.c1, c2=base.c2, kappa=7.3)
    r0 = olkin_baker_residual(*make_regular_solution(base), sym3_pairs)
    r1 = olkin_baker_residual(*make_regular_solution(shifted), sym3_pairs)
    assert r0.max_residual < 1e-10 and r1.max_residual < 1e-10


def test_wishart_dictionary_solves_equation(sym3_pairs):
    a0 = ConeElement.certify(unit(SYM3))
    report = olkin_baker_residual(*wishart_dictionary(2.5, 4.0, a0), sym3_pairs)
    assert report.max_residual < 1e-10


def test_wishart_dictionary_anisotropic_scale(rng, sym3_pairs):
    c = unit(SYM3).coords.copy()
    c[0], c[3] = 2.0, 0.7
    a0 = ConeElement.certify(Element(SYM3, c))
    report = olkin_baker_residual(*wishart_dictionary(3.0, 2.0, a0), sym3_pairs)
    assert report.max_residual < 1e-10


def test_injected_defect_is_detected(sym3_pairs):
    fam = SolutionFamily(lam=0.0 * unit(SYM3), c1=1.0, c2=1.0, kappa=0.0)
    a, b, c, d = make_regular_solution(fam)
    report = olkin_baker_residual(a, b, c, with_injected_defect(d, 0.1), sym3_pairs)
    assert report.max_residual == pytest.approx(0.1, abs=1e-9)


def test_symmetric_substitution_identity(sym3_pairs):
    # swapping the arguments and substituting y = x collapses the equation to
    # 2c(x+y) + d(u) + d(e-u) = c(2x) + c(2y) + 2 d((1/2) e)
    fam = SolutionFamily(lam=0.4 * unit(SYM3), c1=1.3, c2=-0.5, kappa=1.0)
    _, _, c, d = make_regular_solution(fam)
    e = unit(SYM3)
    worst = 0.0
    for x, y in sym3_pairs[:200]:
        pair = split(x, y)
        lhs = 2.0 * c(x + y) + d(pair.u) + d(e - pair.u)
        rhs = c(2.0 * x) + c(2.0 * y) + 2.0 * d(0.5 * e)
        worst = max(worst, abs(lhs - rhs))
    assert worst < 1e-10


# ---------------------------------------------------------------------------
# log-quadratic identity
# ---------------------------------------------------------------------------

def test_log_det_satisfies_log_quadratic(sym3_pairs):
    product_form, conjugation_form = log_quadratic_residual(
        log_det_field(0.8), sym3_pairs[:300]
    )
    assert product_form.max_residual < 1e-9
    assert conjugation_form.max_residual < 1e-9


def test_trace_fails_log_quadratic(sym3_pairs):
    product_form, _ = log_quadratic_residual(trace_field(), sym3_pairs[:100])
    assert product_form.max_residual > 0.1


def test_zero_field_passes_trivially(sym3_pairs):
    product_form, conjugation_form = log_quadratic_residual(
        ScalarField(lambda x: 0.0), sym3_pairs[:50]
    )
    assert product_form.max_residual == 0.0
    assert conjugation_form.max_residual == 0.0


# ---------------------------------------------------------------------------
# homogeneity
# ---------------------------------------------------------------------------

def test_zero_order_homogeneous_field(rng):
    points = sample_cone_points(SYM2, 100, seed=5)
    r = SYM2.rank
    field = ScalarField(
        lambda x: float(np.sum(np.log(eigenvalues(x)))) - r * math.log(trace(x))
    )
    assert homogeneity_defect(field, [0.5, 2.0, 3.7], points) < 1e-12


def test_trace_is_not_homogeneous():
    points = sample_cone_points(SYM2, 50, seed=6)
    assert homogeneity_defect(trace_field(), [2.0], points) > 0.1


def test_reduced_log_det_field_vanishes():
    points = sample_cone_points(SYM2, 20, seed=7)
    field = ScalarField(lambda x: 0.0)
    assert homogeneity_defect(field, [0.5, 4.0], points) == 0.0


def test_homogeneity_rejects_bad_scale():
    with pytest.raises(ValueError):
        homogeneity_defect(trace_field(), [-1.0], [unit(SYM2)])


# ---------------------------------------------------------------------------
# cocycle equation
# ---------------------------------------------------------------------------

def test_cauchy_difference_of_log_det_satisfies_cocycle():
    triples = sample_cone_triples(SYM3, 300, seed=11)
    report = cocycle_residual(cauchy_difference(log_det_field()), triples)
    assert report.max_residual < 1e-10


def test_linear_field_has_zero_cauchy_difference():
    triples = sample_cone_triples(SYM2, 100, seed=12)
    lam = 0.7 * unit(SYM2)
    C = cauchy_difference(ScalarField(lambda x: inner(lam, x)))
    report = cocycle_residual(C, triples)
    assert report.max_residual < 1e-12


def test_squared_inner_product_fails_cocycle():
    triples = sample_cone_triples(SYM2, 100, seed=13)
    report = cocycle_residual(lambda x, y: inner(x, y) ** 2, triples)
    assert report.max_residual > 1.0


# ---------------------------------------------------------------------------
# Pexider recovery
# ---------------------------------------------------------------------------

def test_pexider_recovery():
    lam = unit(SYM2)
    samples = generate_pexider_samples(SYM2, lam, b=1.0, c=-2.0, count=500, seed=21)
    fit = pexider_fit(samples)
    assert np.abs(fit.lam.coords - lam.coords).max() < 1e-8
    assert fit.b == pytest.approx(1.0, abs=1e-8)
    assert fit.c == pytest.approx(-2.0, abs=1e-8)
    assert fit.max_residual < 1e-8


def test_pexider_constant_corollary():
    # lam = 0 degenerates to constant k with l = k - c and n = c
    lam = 0.0 * unit(SYM2)
    samples = generate_pexider_samples(SYM2, lam, b=3.0, c=-1.25, count=200, seed=22)
    k_value = 3.0 + (-1.25)
    fit = pexider_fit(samples)
    assert np.abs(fit.lam.coords).max() < 1e-10
    assert fit.c == pytest.approx(-1.25, abs=1e-10)
    assert fit.b == pytest.approx(k_value - fit.c, abs=1e-10)


def test_pexider_zero_data():
    lam = 0.0 * unit(SYM2)
    samples = generate_pexider_samples(SYM2, lam, b=0.0, c=0.0, count=100, seed=23)
    fit = pexider_fit(samples)
    assert np.abs(fit.lam.coords).max() < 1e-12
    assert abs(fit.b) < 1e-12 and abs(fit.c) < 1e-12


def test_pexider_rank_deficient_design():
    x = unit(SYM2)
    samples = [(x, x, 2.0, 1.0, 1.0)] * 30
    with pytest.raises(ValueError, match="rank"):
        pexider_fit(samples)


# ---------------------------------------------------------------------------
# plumbing
# ---------------------------------------------------------------------------

def test_residual_report_serialization():
    report = ResidualReport(
        equation="olkin-baker", algebra="symr:3", n_pairs=10,
        max_residual=1e-12, mean_residual=1e-13, seed=5,
    )
    doc = json.loads(report.to_json())
    assert set(doc) == {"equation", "algebra", "n_pairs", "max_residual", "mean_residual", "seed"}


def test_scalar_field_domain_tag():
    with pytest.raises(ValueError):
        ScalarField(lambda x: 0.0, domain="X")
    f = log_det_field(domain="D")
    assert f.domain == "D"


def test_sweep_samplers_are_deterministic():
    p1 = sample_cone_pairs(SYM2, 50, seed=77)
    p2 = sample_cone_pairs(SYM2, 50, seed=77)
    assert all(
        np.array_equal(a.coords, b.coords) and np.array_equal(c.coords, d.coords)
        for (a, c), (b, d) in zip(p1, p2)
    )


def test_empty_inputs_rejected():
    with pytest.raises(ValueError):
        olkin_baker_residual(*make_regular_solution(FAMILIES[0]), [])
