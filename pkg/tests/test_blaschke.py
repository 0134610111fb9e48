import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from maxblaschke.blaschke import (
    CriticalSet,
    FiniteBlaschke,
    compose,
    critical_numerator_coeffs,
    critical_points,
    derivative,
    derivative_at_origin_order,
    evaluate,
    reflect_check,
)
from maxblaschke.errors import InputError, NumericalError
from maxblaschke.roots import polynomial_roots


def zeros_strategy(max_len=4, max_radius=0.8):
    return st.lists(
        st.complex_numbers(max_magnitude=max_radius, allow_nan=False,
                           allow_infinity=False),
        min_size=1, max_size=max_len,
    )


def in_disk_critical_point(a):
    """In-disk critical point of z(z - a)/(1 - a z), real 0 < a < 1: the
    quadratic a c^2 - 2 c + a = 0 has roots (1 +- sqrt(1 - a^2))/a."""
    return (1.0 - math.sqrt(1.0 - a * a)) / a


# ----------------------------------------------------------------------
# critical sets

def test_critical_set_merges_and_orders():
    C = CriticalSet(((0.5 + 0j, 1), (0j, 2), (0.5 + 0j, 1)))
    assert C.entries == ((0j, 2), (0.5 + 0j, 2))
    assert C.total == 4
    assert C.origin_multiplicity == 2


def test_critical_set_input_validation():
    with pytest.raises(InputError):
        CriticalSet(((1.0 + 0j, 1),))
    with pytest.raises(InputError):
        CriticalSet(((0.5 + 0j, 0),))


def test_critical_set_union_and_contains():
    A = CriticalSet.from_points([0.5, 0.3j])
    B = CriticalSet.from_points([0.5, -0.2])
    U = A.union(B)
    assert dict(U.entries)[0.5 + 0j] == 2
    assert U.total == 4
    assert U.contains(A) and U.contains(B)
    assert not A.contains(U)


def test_critical_set_match_is_pseudo_hyperbolic():
    A = CriticalSet.from_points([0.5])
    B = CriticalSet.from_points([0.5 + 1e-10])
    assert A.match(B) < 2e-10
    with pytest.raises(NumericalError):
        A.match(CriticalSet(((0.5 + 0j, 2),)))  # profile mismatch


def test_critical_set_dict_round_trip():
    C = CriticalSet(((0.1 + 0.2j, 2), (0j, 1)))
    assert CriticalSet.from_dict(C.to_dict()) == C
    with pytest.raises(InputError):
        CriticalSet.from_dict({"points": [{"re": 0.1}]})


# ----------------------------------------------------------------------
# products and evaluation

def test_eta_is_normalized_and_zeros_sorted():
    B = FiniteBlaschke(zeros=(0.5 + 0j, -0.25 + 0j), eta=2j)
    assert abs(B.eta) == 1.0
    assert B.zeros == (-0.25 + 0j, 0.5 + 0j)


@given(zeros_strategy())
@settings(max_examples=150)
def test_modulus_below_one_inside_and_one_on_circle(zeros):
    B = FiniteBlaschke(zeros=tuple(zeros), eta=1.0)
    inside = np.array([0.4 + 0.1j, -0.2j, 0.65])
    assert np.all(np.abs(evaluate(B, inside)) < 1.0)
    circle = np.exp(1j * np.linspace(0.1, 5.9, 11))
    assert np.abs(evaluate(B, circle)) == pytest.approx(1.0, abs=1e-12)


def test_evaluate_at_own_zeros():
    B = FiniteBlaschke(zeros=(0.3 + 0.4j, -0.5j), eta=-1.0)
    assert evaluate(B, 0.3 + 0.4j) == pytest.approx(0.0, abs=1e-15)


@given(zeros_strategy(max_len=4, max_radius=0.7))
@settings(max_examples=100)
def test_derivative_matches_difference_quotient(zeros):
    B = FiniteBlaschke(zeros=tuple(zeros), eta=np.exp(0.4j))
    z, h = 0.21 - 0.17j, 1e-6
    fd = (evaluate(B, z + h) - evaluate(B, z - h)) / (2 * h)
    assert derivative(B, z) == pytest.approx(fd, abs=5e-8)


def test_evaluate_rejects_reflected_pole():
    B = FiniteBlaschke(zeros=(0.5 + 0j,), eta=1.0)
    with pytest.raises(NumericalError):
        evaluate(B, 2.0 + 0j)  # 1/conj(0.5)


def test_reflection_identity_holds():
    B = FiniteBlaschke(zeros=(0.4 + 0.1j, -0.3j, 0j), eta=1j)
    reflect_check(B, 1.7 - 0.4j)
    with pytest.raises(InputError):
        reflect_check(B, 0.0)


def test_derivative_at_origin_order_monomial():
    for m in range(0, 5):
        B = FiniteBlaschke(zeros=(0j,) * (m + 1), eta=1.0)
        assert derivative_at_origin_order(B, m) == pytest.approx(
            math.factorial(m + 1), abs=1e-12)
    with pytest.raises(InputError):
        derivative_at_origin_order(B, 0)


# ----------------------------------------------------------------------
# critical numerator

def test_critical_numerator_degree_and_reflection_symmetry():
    zeros = (0j, 0.6 + 0j, -0.2 + 0.3j)
    q = critical_numerator_coeffs(zeros)
    assert len(q) == 2 * len(zeros) - 1  # degree 2d - 2
    roots = polynomial_roots(q)
    # root multiset is closed under z -> 1/conj(z)
    reflected = 1.0 / np.conj(roots)
    for r in roots:
        assert np.min(np.abs(reflected - r)) < 1e-8


@pytest.mark.parametrize("a", [0.2, 0.5, 0.8])
def test_degree_two_critical_point_closed_form(a):
    B = FiniteBlaschke(zeros=(0j, complex(a)), eta=1.0)
    crit = critical_points(B)
    assert len(crit.entries) == 1
    p, mult = crit.entries[0]
    assert mult == 1
    assert p == pytest.approx(in_disk_critical_point(a), abs=1e-12)


def test_monomial_critical_points_collapse():
    B = FiniteBlaschke(zeros=(0j, 0j, 0j), eta=1.0)
    assert critical_points(B).entries == ((0j, 2),)


def test_identity_has_no_critical_points():
    B = FiniteBlaschke(zeros=(0j,), eta=1.0)
    assert critical_points(B).entries == ()


# ----------------------------------------------------------------------
# composition

def test_compose_degree_multiplies():
    B = FiniteBlaschke(zeros=(0j, 0.5 + 0j), eta=1.0)
    C = FiniteBlaschke(zeros=(0j, 0j), eta=1.0)
    A = compose(B, C)
    assert A.degree == 4
    z = np.array([0.3 - 0.2j, 0.1j, -0.55])
    assert evaluate(A, z) == pytest.approx(
        evaluate(B, evaluate(C, z)), abs=1e-12)


def test_compose_chain_rule_adds_critical_points():
    # crit(B o C) = crit(C) + preimages under C of crit(B)
    B = FiniteBlaschke(zeros=(0j, 0.5 + 0j), eta=1.0)
    C = FiniteBlaschke(zeros=(0j, 0j), eta=1.0)
    crit = critical_points(compose(B, C))
    assert crit.total == 3
    assert crit.origin_multiplicity == 1
