import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from maxblaschke.blaschke import (
    CriticalSet,
    FiniteBlaschke,
    compose,
    derivative_at_origin_order,
    evaluate,
)
from maxblaschke.disk import DiskAutomorphism
from maxblaschke.errors import InputError, NumericalError
from maxblaschke.metrics import PolarGrid
from maxblaschke.solver import solve_maximal
from maxblaschke.verify import (
    BoundaryProbe,
    CompetitorSpec,
    boundary_probes,
    boundary_quotient,
    default_competitor_specs,
    extremality_suite,
    fit_automorphism,
    left_factor_check,
    phi_boundary_bound,
    semigroup_check,
    union_suite,
)

C_ONE = CriticalSet.from_points([0.5])
C_TWO = CriticalSet.from_points([0.5, -0.5])
# functional values of the solved products (see test_solver for the oracles)
F_ONE = 0.8
F_TWO = 0.6164640249326709

# competitors are deflated by this factor to stay strictly admissible
DEFL = 1.0 - 1e-6


@pytest.fixture(scope="module")
def b_one():
    return solve_maximal(C_ONE).solution


@pytest.fixture(scope="module")
def b_two():
    return solve_maximal(C_TWO).solution


def test_larger_set_margin_closed_form(b_one):
    """Adjoining -0.5 shrinks the functional from 0.8 to the two-point
    value; the competitor is the deflated two-point solution."""
    spec = CompetitorSpec(kind="larger-critical-set", extra_points=(-0.5 + 0j,))
    out = extremality_suite(C_ONE, b_one, [spec])
    assert out["skipped"] == 0
    assert out["margin"] == pytest.approx(F_ONE - DEFL * F_TWO, abs=1e-9)
    assert out["pass"]


def test_scalar_margin_closed_form(b_one):
    out = extremality_suite(
        C_ONE, b_one, [CompetitorSpec(kind="scalar-multiple", scalar=0.9)])
    assert out["margin"] == pytest.approx(F_ONE * (1.0 - 0.9 * DEFL), abs=1e-9)


def test_automorphism_negation_margin(b_one):
    # T(z) = -z flips the functional's sign; the deflated competitor
    # scores -0.8 DEFL, so the margin is 0.8 (1 + DEFL)
    T = DiskAutomorphism(rotation=1.0, center=0j)
    out = extremality_suite(
        C_ONE, b_one, [CompetitorSpec(kind="postcompose-automorphism", automorphism=T)])
    assert out["margin"] == pytest.approx(F_ONE * (1.0 + DEFL), abs=1e-9)


def test_antiderivative_competitors_lose(b_one):
    rng = np.random.default_rng(11)
    specs = [
        CompetitorSpec(kind="antiderivative-family",
                       poly_coeffs=tuple(rng.normal(size=2) + 0j))
        for _ in range(10)
    ]
    out = extremality_suite(C_ONE, b_one, specs)
    assert out["skipped"] == 0
    assert out["margin"] >= -1e-9


def test_mixed_batch_wins_everything(b_two):
    rng = np.random.default_rng(3)
    specs = default_competitor_specs(C_TWO, 60, rng)
    out = extremality_suite(C_TWO, b_two, specs)
    assert out["samples"] == 60
    assert out["skipped"] == 0
    assert out["pass"]


def test_quadrature_functional_agrees_with_derivative(b_two):
    """Dual route: the suite's Cauchy-integral functional versus the direct
    coefficient formula.  The identity competitor is deflated by 1e-6, so a
    margin of exactly F * 1e-6 certifies the two routes agree."""
    T = DiskAutomorphism(rotation=-1.0, center=0j)  # identity map
    out = extremality_suite(
        C_TWO, b_two, [CompetitorSpec(kind="postcompose-automorphism", automorphism=T)])
    direct = derivative_at_origin_order(b_two, 0)
    assert out["margin"] == pytest.approx(F_TWO * 1e-6, abs=1e-12)
    assert direct == pytest.approx(F_TWO, abs=1e-10)


def test_competitor_spec_validation():
    with pytest.raises(InputError):
        CompetitorSpec(kind="unheard-of")
    with pytest.raises(InputError):
        CompetitorSpec(kind="scalar-multiple", scalar=1.5)
    with pytest.raises(InputError):
        CompetitorSpec(kind="postcompose-automorphism")


# ----------------------------------------------------------------------
# boundary behavior

def test_quotient_closed_form_for_squaring():
    """(1-r^2) 2r / (1-r^4) = 2r/(1+r^2) for B(z) = z^2."""
    B = FiniteBlaschke(zeros=(0j, 0j), eta=1.0)
    probe = BoundaryProbe(1.0 + 0j, radii=(0.9, 0.99, 0.999))
    out = boundary_quotient(B, probe)
    for r, q in zip(probe.radii, out["quotients"]):
        assert q == pytest.approx(2 * r / (1 + r * r), abs=1e-12)
    assert out["quotients"][0] == pytest.approx(0.9944751381215471, abs=1e-12)
    assert out["deviation"] <= 1e-3


def test_probes_keep_clear_of_critical_points():
    probes = boundary_probes(C_ONE)
    assert len(probes) == 8
    for p in probes:
        assert abs(p.direction - 0.5) >= 0.1
        assert abs(abs(p.direction) - 1.0) <= 1e-12


def test_phi_closed_forms(b_one):
    """1/phi sums (1-|a|^2)/|zeta-a|^2 over the zeros; for zeros {0, 0.8}
    the extremes sit at zeta = +-1: phi(1) = 1/10, phi(-1) = 9/10."""
    out = phi_boundary_bound(b_one)
    assert out["pass"]
    assert out["min_real"] == pytest.approx(0.1, abs=1e-12)
    assert out["max_real"] == pytest.approx(0.9, abs=1e-12)
    squared = phi_boundary_bound(FiniteBlaschke(zeros=(0j, 0j), eta=1.0))
    assert squared["min_real"] == pytest.approx(0.5, abs=1e-14)
    assert squared["max_real"] == pytest.approx(0.5, abs=1e-14)


def test_phi_needs_origin_zero():
    B = FiniteBlaschke(zeros=(0.5 + 0j,), eta=1.0)
    with pytest.raises(InputError):
        phi_boundary_bound(B)


# ----------------------------------------------------------------------
# automorphism fitting and the composition suites

@given(
    st.complex_numbers(max_magnitude=0.7, allow_nan=False,
                       allow_infinity=False),
    st.floats(min_value=0.0, max_value=2 * np.pi),
)
@settings(max_examples=60, deadline=None)
def test_fit_automorphism_recovers_known_map(c, theta):
    B = FiniteBlaschke(zeros=(0j, 0.5 + 0j), eta=1.0)
    # T(z) = eta (c - z)/(1 - conj(c) z) as a degree-1 product
    t_prod = FiniteBlaschke(zeros=(complex(c),), eta=-np.exp(1j * theta))
    composed = compose(t_prod, B)
    got = fit_automorphism(B, composed)
    z = 0.8 * np.exp(2j * np.pi * np.arange(16) / 16)
    assert evaluate(composed, z) == pytest.approx(
        got(evaluate(B, z)), abs=1e-9)


def test_fit_automorphism_rejects_degenerate_data():
    vanishing_at_quarter = FiniteBlaschke(zeros=(0.25 + 0j,), eta=1.0)
    target = FiniteBlaschke(zeros=(0j,), eta=1.0)
    with pytest.raises(NumericalError):
        fit_automorphism(vanishing_at_quarter, target)


def test_semigroup_composition(b_one):
    sq = FiniteBlaschke(zeros=(0j, 0j), eta=1.0)
    out = semigroup_check(b_one, sq)
    assert out["composite_degree"] == 4
    assert out["match_error"] <= 1e-8
    assert out["pass"]


def test_left_factor_of_composition(b_one):
    sq = FiniteBlaschke(zeros=(0j, 0j), eta=1.0)
    out = left_factor_check(sq, b_one)
    assert out["factor_degree"] == 2
    assert out["pass"]


def test_union_suite_pair():
    grid = PolarGrid(n_r=48, n_theta=160, r_max=0.9)
    out = union_suite(C_ONE, CriticalSet.from_points([-0.5]), 0.5, grid)
    assert out["pass"]
    assert out["zero_set_error"] <= 1e-8
    assert out["max_curvature"] <= -4.0 + 10.0 * grid.h**2


def test_union_suite_multiset():
    """Same set twice: the union is the double point, and the zero-set
    match (which compares multiplicity profiles) must still succeed."""
    grid = PolarGrid(n_r=48, n_theta=160, r_max=0.9)
    assert C_ONE.union(C_ONE).entries == ((0.5 + 0j, 2),)
    out = union_suite(C_ONE, C_ONE, 0.5, grid)
    assert out["pass"]
    assert out["zero_set_error"] <= 1e-8
