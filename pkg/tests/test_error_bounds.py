from math import e, exp, factorial, pi, sqrt

import numpy as np
import pytest

from polyharmonic_cubature import (InvalidRadii, LFPolynomial, MissingDerivativeBound,
                                   OrderTooHigh, PseudoPositiveMeasure, UnivariateMeasure,
                                   build_cubature, derivative_sup_estimate, holomorphic_bound,
                                   integrate_function, integrate_lf, jacobi_norm_closed_form,
                                   markov_bound)
from polyharmonic_cubature.error_bounds import component_norm_sq

EPS = np.finfo(float).eps

from oracles import bessel_g_derivative_sup, closed_form_component, exp_x_poisson_reference


@pytest.fixture(scope="module")
def exp_x_reference():
    return exp_x_poisson_reference()[0]


# closed-form norms

@pytest.mark.parametrize("s,k,value", [(1, 0, 1 / 36), (1, 1, 1 / 120), (2, 0, 1 / 600)])
def test_closed_form_values(s, k, value):
    assert jacobi_norm_closed_form(s, k) == pytest.approx(value, rel=1e-14)


def test_closed_form_no_overflow():
    v = jacobi_norm_closed_form(5, 60)
    assert 0 < v < 1e-15
    with pytest.raises(ValueError):
        jacobi_norm_closed_form(-1, 0)


@pytest.mark.parametrize("s", [1, 2, 3, 4, 5])
def test_closed_form_matches_recurrence(s):
    for k in range(0, 21, 4):
        norm = component_norm_sq(closed_form_component(k, 2.0), s) / sqrt(pi)
        assert norm == pytest.approx(jacobi_norm_closed_form(s, k), rel=1e-8)


def test_poisson_components_share_closed_form(poisson2):
    for (k, l), m in poisson2.components.items():
        expected = sqrt(pi) * jacobi_norm_closed_form(2, k)
        if k == 0:
            # the radial harmonic carries sqrt(2 pi) instead of 2 sqrt(pi)
            expected /= sqrt(2)
        assert component_norm_sq(m, 2) == pytest.approx(expected, rel=1e-9)


# derivative sup estimates

def test_derivative_sup_examples():
    assert derivative_sup_estimate(lambda t: t**3, (0, 1), 2) == pytest.approx(7.5, rel=1e-10)
    assert derivative_sup_estimate(np.exp, (0, 1), 4) == pytest.approx(1.25 * e, rel=1e-2)
    assert derivative_sup_estimate(lambda t: 3 * t**2 - t + 1, (0, 1), 4) == 0.0
    with pytest.raises(OrderTooHigh):
        derivative_sup_estimate(np.exp, (0, 1), 40, degree=64)


def test_derivative_sup_estimate_dominates_true_sup():
    for s in (1, 2, 3):
        for c in (0.5, 1.0, 2.0):
            est = derivative_sup_estimate(lambda t: np.exp(c * t), (0.25, 1.0), 2 * s)
            assert est >= c ** (2 * s) * exp(c)


# Markov bounds

def unit_norm_measure():
    """``2 r (1 - r**2) dr``: the k = 0 closed-form family without its constant."""
    m = UnivariateMeasure.from_density(lambda r: 2 * r * (1 - r * r), 0.0, 1.0)
    return PseudoPositiveMeasure({(0, 1): m}, 0.0, 1.0, 0)


def test_bound_for_quadratic_in_t():
    rep = markov_bound(unit_norm_measure(), 1, {(0, 1): 2.0})
    assert rep.total_bound == pytest.approx(1 / 36, rel=1e-12)
    assert rep.contributions[(0, 1)].norm_sq == pytest.approx(1 / 36, rel=1e-12)
    assert rep.certified


def test_holds_accepts_roundoff_slack():
    rep = markov_bound(unit_norm_measure(), 1, {(0, 1): 0.0}, observed_error=1e-17)
    assert not rep.holds()
    assert rep.holds(slack=1e-16)


def test_bound_is_attained_for_quadratic_in_t():
    # g(t) = t**2 has constant second derivative, so the bound is an equality
    mu = unit_norm_measure()
    f = LFPolynomial({(0, 1): [0.0, 0.0, 1.0]})
    err = integrate_lf(mu, f) - integrate_lf(build_cubature(mu, 1), f)
    assert err == pytest.approx(1 / 36, rel=1e-10)


@pytest.mark.parametrize("s", [1, 2, 3])
def test_zero_bound_for_exact_class(poisson2, s):
    rng = np.random.default_rng(s)
    f = LFPolynomial({key: rng.normal(size=2 * s) for key in poisson2.components})
    sups = {}
    for key, p in f.components.items():
        sups[key] = derivative_sup_estimate(lambda t, p=p: np.polyval(p[::-1], t), (0, 1), 2 * s)
    observed = abs(integrate_lf(poisson2, f) - integrate_lf(build_cubature(poisson2, s), f))
    rep = markov_bound(poisson2, s, sups, observed, certified=False)
    assert rep.total_bound == 0.0
    assert observed <= 1e-9


def test_missing_derivative_bound(poisson2):
    with pytest.raises(MissingDerivativeBound):
        markov_bound(poisson2, 1, {(0, 1): 1.0})


def test_components_with_few_atoms_need_no_bound():
    m = UnivariateMeasure.atomic([0.5], [1.0])
    rep = markov_bound(PseudoPositiveMeasure({(3, 1): m}, 0.0, 1.0, 3), 1, {})
    assert rep.total_bound == 0.0


@pytest.mark.parametrize("s", [1, 2, 3, 4])
def test_bound_holds_for_exp_x(poisson2_k16, exp_x_reference, s):
    f = lambda r, t: np.exp(r * np.cos(t))
    observed = abs(integrate_function(build_cubature(poisson2_k16, s), f) - exp_x_reference)
    sups = {key: bessel_g_derivative_sup(key[0], s) for key in poisson2_k16.components}
    rep = markov_bound(poisson2_k16, s, sups, observed)
    # at s = 4 the true error is below the double precision floor of both sides
    assert rep.holds(slack=8 * EPS * exp_x_reference), (observed, rep.total_bound)


@pytest.mark.parametrize("m,s", [(2, 1), (3, 1), (4, 2), (6, 2), (7, 3)])
def test_bound_holds_for_radial_monomials(poisson2, m, s):
    f = LFPolynomial({(0, 1): [0.0] * m + [1.0 / sqrt(2 * pi)]})
    observed = abs(integrate_lf(poisson2, f) - integrate_lf(build_cubature(poisson2, s), f))
    sup = factorial(m) / factorial(m - 2 * s) / sqrt(2 * pi)
    rep = markov_bound(poisson2, s, {(0, 1): sup, **{k: 0.0 for k in poisson2.components if k != (0, 1)}},
                       observed)
    # m = 2s has a constant 2s-th derivative, where the bound is attained
    assert observed > 0 and rep.holds(slack=8 * EPS * abs(integrate_lf(poisson2, f)))


@pytest.mark.parametrize("c,s", [(1.0, 1), (2.0, 2), (-1.5, 2), (3.0, 3)])
def test_bound_holds_for_radial_exponentials(poisson2, c, s):
    # f = exp(c r**2) radial; g(t) = sqrt(2 pi) exp(c t) through the constant harmonic
    fkl = {(0, 1): lambda r: sqrt(2 * pi) * np.exp(c * r * r)}
    observed = abs(integrate_lf(poisson2, fkl) - integrate_lf(build_cubature(poisson2, s), fkl))
    sup = sqrt(2 * pi) * abs(c) ** (2 * s) * max(exp(c), 1.0)
    rep = markov_bound(poisson2, s, {key: (sup if key == (0, 1) else 0.0) for key in poisson2.components},
                       observed)
    assert rep.holds(slack=8 * EPS * abs(integrate_lf(poisson2, fkl)))


# holomorphic bound

def test_holomorphic_bound_radii(poisson2):
    with pytest.raises(InvalidRadii):
        holomorphic_bound(1.0, 1.0, 1.0, 1, poisson2)
    with pytest.raises(InvalidRadii):
        holomorphic_bound(1.0, 0.5, 1.0, 1, poisson2)


def test_holomorphic_bound_exp_x(poisson2_k16, exp_x_reference):
    f = lambda r, t: np.exp(r * np.cos(t))
    observed = abs(integrate_function(build_cubature(poisson2_k16, 2), f) - exp_x_reference)
    # |exp(z1)| <= exp(rho) on the complex ball of radius rho
    b2 = holomorphic_bound(exp(2.0), 2.0, 1.0, 2, poisson2_k16)
    b3 = holomorphic_bound(exp(3.0), 3.0, 1.0, 2, poisson2_k16)
    assert np.isfinite(b2) and b2 >= observed
    assert b3 <= b2


def test_holomorphic_bound_polynomial(poisson2):
    f = LFPolynomial({(0, 1): [1.0, 2.0, -1.0], (2, 1): [0.5, 1.0]})
    observed = abs(integrate_lf(poisson2, f) - integrate_lf(build_cubature(poisson2, 3), f))
    assert observed <= 1e-12
    assert holomorphic_bound(20.0, 2.0, 1.0, 3, poisson2) >= observed
