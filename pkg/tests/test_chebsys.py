import warnings
from math import e, exp, pi, sqrt

import numpy as np
import pytest
import sympy
from numpy.polynomial import chebyshev as C
from scipy import integrate

from polyharmonic_cubature import (BasisFunction, ChebyshevBasis, NoConvergence, PoissonDensity,
                                   StripMeasure, UnivariateMeasure, WeakTplusWarning, annulus_basis,
                                   build_annulus_cubature, build_strip_cubature, from_density,
                                   gauss_jacobi, integrate_function, integrate_lf, integrate_strip,
                                   markov_quadrature, polynomial_basis, strip_basis, verify_tplus)
from polyharmonic_cubature.chebsys import annulus_component

r_sym = sympy.symbols("r", positive=True)


def as_sympy(u):
    expr = r_sym**u.power * sympy.log(r_sym) ** u.log_power
    return expr * sympy.exp(sympy.nsimplify(u.rate) * r_sym) if u.rate else expr


def radial_operator(expr, k):
    return sympy.diff(expr, r_sym, 2) + sympy.diff(expr, r_sym) / r_sym - k**2 * expr / r_sym**2


def numerical_operator(f, k, a=0.6, b=1.9, degree=48):
    """Radial operator applied through a Chebyshev interpolant (no symbolic algebra)."""
    p = C.Chebyshev.interpolate(f, degree, domain=[a, b])
    return lambda r: p.deriv(2)(r) + p.deriv(1)(r) / r - k * k * p(r) / r**2


def exponents(basis):
    return [(u.power, u.log_power) for u in basis.functions]


# bases

def test_annulus_basis_examples():
    assert exponents(annulus_basis(5, 1)) == [(-5, 0), (-3, 0), (5, 0), (7, 0)]
    assert exponents(annulus_basis(0, 1)) == [(0, 0), (0, 1), (2, 0), (2, 1)]
    assert exponents(annulus_basis(8, 2)) == [(e, 0) for e in (-8, -6, -4, -2, 8, 10, 12, 14)]
    assert len(annulus_basis(1, 3)) == 12
    assert len(set(exponents(annulus_basis(1, 3)))) == 12


@pytest.mark.parametrize("k,s", [(0, 1), (0, 2), (1, 1), (1, 2), (2, 2), (3, 2), (5, 1), (8, 2), (2, 3)])
def test_annulus_basis_annihilated_symbolically(k, s):
    for u in annulus_basis(k, s).functions:
        expr = as_sympy(u)
        for _ in range(2 * s):
            expr = sympy.simplify(radial_operator(expr, k))
        assert expr == 0, (k, s, u.label)


@pytest.mark.parametrize("k,s", [(0, 1), (3, 1), (5, 1), (2, 2)])
def test_annulus_basis_not_annihilated_by_lower_power(k, s):
    # the top functions need every factor of the iterated operator
    top = annulus_basis(k, s).functions[-1]
    expr = as_sympy(top)
    for _ in range(2 * s - 1):
        expr = sympy.simplify(radial_operator(expr, k))
    assert expr != 0


@pytest.mark.parametrize("k", [0, 2, 5])
def test_annulus_basis_annihilated_numerically(k):
    # composing spectral differentiation amplifies roundoff, so this runs at s = 1;
    # higher orders are covered by the symbolic check above
    r = np.linspace(0.7, 1.8, 50)
    twice = lambda u: numerical_operator(numerical_operator(u, k), k)(r)
    scale = np.max(np.abs(twice(BasisFunction(k + 4))))
    for u in annulus_basis(k, 1).functions:
        assert np.max(np.abs(twice(u))) <= 1e-6 * scale


def test_basis_derivatives():
    u = BasisFunction(3, 1, -2.0)
    x = np.linspace(0.5, 2.0, 7)
    expr = as_sympy(u)
    for d in range(4):
        ref = sympy.lambdify(r_sym, sympy.diff(expr, r_sym, d))(x)
        np.testing.assert_allclose(u(x, d), ref, rtol=1e-12, atol=1e-12)


def test_strip_basis_examples():
    b = strip_basis(2, 1)
    assert [(u.power, u.rate) for u in b.functions] == [(0, -2.0), (1, -2.0), (0, 2.0), (1, 2.0)]
    assert [(u.power, u.rate) for u in strip_basis(0, 1).functions] == [(j, 0.0) for j in range(4)]
    b = strip_basis(1, 2)
    assert len(b) == 8
    assert [u.power for u in b.functions] == [0, 1, 2, 3, 0, 1, 2, 3]


# T+ certificates

def test_tplus_polynomials():
    v = verify_tplus(polynomial_basis(4, (0.5, 2.0)), trials=200)
    assert v.passed and v.min_det > 0


def test_tplus_exponentials():
    assert verify_tplus(strip_basis(2, 1, (0.0, 1.0)), trials=200).passed
    assert verify_tplus(strip_basis(1, 2, (0.0, 1.0)), trials=200).passed


def test_tplus_sign_flip_fails():
    funcs = (lambda t, d=0: t**0 if d == 0 else 0 * t,
             lambda t, d=0: t if d == 0 else (t**0 if d == 1 else 0 * t),
             lambda t, d=0: -(t**2) if d == 0 else (-2 * t if d == 1 else -2 + 0 * t))
    v = verify_tplus(ChebyshevBasis(funcs, (0.0, 1.0), ("1", "t", "-t^2")), trials=50)
    assert not v.passed
    assert len(v.witness) == 3
    assert all(0 < x < 1 for x in v.witness)
    assert v.min_det < 0


@pytest.mark.parametrize("k,s", [(4, 1), (8, 2), (12, 3)])
def test_tplus_annulus_proven_range(k, s):
    assert verify_tplus(annulus_basis(k, s, (0.5, 1.0))).passed


# Markov quadrature

def test_markov_lebesgue_two_point():
    tau = markov_quadrature(polynomial_basis(4), [1, 1 / 2, 1 / 3, 1 / 4], 1, (0.0, 1.0))
    np.testing.assert_allclose(tau.nodes, [(3 - sqrt(3)) / 6, (3 + sqrt(3)) / 6], rtol=1e-12)
    np.testing.assert_allclose(tau.weights, [0.5, 0.5], rtol=1e-12)


@pytest.mark.parametrize("s", [1, 2, 3])
def test_markov_agrees_with_gauss(s):
    m = UnivariateMeasure.from_density(lambda t: np.sqrt(t) * (1.2 - t), 0.0, 1.0)
    basis = polynomial_basis(4 * s)
    moments = m.integrate(lambda t: basis.matrix(t).T)
    tau = markov_quadrature(basis, moments, s, (0.0, 1.0))
    g = gauss_jacobi(m, 2 * s)
    # monomial moments are badly conditioned at 4s = 12, so compare absolutely
    np.testing.assert_allclose(tau.nodes, g.nodes, rtol=0, atol=1e-10)
    np.testing.assert_allclose(tau.weights, g.weights, rtol=0, atol=1e-10 * g.weights.sum())


def test_markov_exponential_system():
    basis = ChebyshevBasis((BasisFunction(0), BasisFunction(1), BasisFunction(0, 0, 1.0),
                            BasisFunction(1, 0, 1.0)), (0.0, 1.0))
    m = np.array([1.0, 0.5, e - 1, 1.0])
    tau = markov_quadrature(basis, m, 1)
    assert tau.n_atoms == 2
    assert np.all(tau.weights > 0)
    assert np.all((tau.nodes > 0) & (tau.nodes < 1))
    assert np.max(np.abs(basis.matrix(tau.nodes).T @ tau.weights - m)) <= 1e-10 * np.max(np.abs(m))


@pytest.mark.parametrize("basis,s", [
    (annulus_basis(5, 2, (0.5, 1.0)), 2),
    (annulus_basis(0, 1, (0.5, 1.0)), 1),
    (strip_basis(3, 2, (0.0, 1.0)), 2),
])
def test_markov_recovers_atoms(basis, s):
    a, b = basis.interval
    x = a + (b - a) * np.array([0.13, 0.31, 0.58, 0.87])[: 2 * s]
    w = np.array([0.7, 1.3, 0.4, 1.1])[: 2 * s]
    tau = markov_quadrature(basis, basis.matrix(x).T @ w, s)
    np.testing.assert_allclose(tau.nodes, x, rtol=1e-10)
    np.testing.assert_allclose(tau.weights, w, rtol=1e-10)


def test_markov_reports_no_convergence():
    basis = polynomial_basis(4)
    with pytest.raises(NoConvergence) as err:
        markov_quadrature(basis, [1, 1 / 2, 1 / 3, 1 / 4], 1, (0.0, 1.0), max_iter=0)
    assert err.value.residual > 0


def test_markov_shape_check():
    with pytest.raises(ValueError):
        markov_quadrature(polynomial_basis(4), [1, 0.5, 1 / 3], 1, (0.0, 1.0))


def lambda_density(k):
    """``r**-k dmu_{k,1}`` for the damped Poisson density: ``2 sqrt(pi) r**(k+1) (1 - r**2)``."""
    return lambda r: 2 * sqrt(pi) * r ** (k + 1) * (1 - r * r)


@pytest.mark.parametrize("k,s", [(4, 1), (6, 1), (8, 2), (12, 2)])
def test_markov_krein_minimality(k, s):
    a, b = 0.5, 1.0
    basis = annulus_basis(k, s, (a, b))
    dens = lambda_density(k)
    moments = np.array([integrate.quad(lambda r: u(r) * dens(r), a, b, epsabs=0, epsrel=1e-13)[0]
                        for u in basis.functions])
    tau = markov_quadrature(basis, moments, s, (a, b))
    extremal = tau.weights.sum()
    # competitors: a fine positive discretization of the same measure, perturbed
    # inside the nullspace of the moment map so every moment is preserved
    x, wq = np.polynomial.legendre.leggauss(40)
    x = a + (b - a) * (x + 1) / 2
    w0 = wq * (b - a) / 2 * dens(x)
    U = basis.matrix(x).T
    null = np.linalg.svd(U)[2][U.shape[0]:]
    rng = np.random.default_rng(k + 100 * s)
    for _ in range(100):
        v = null.T @ rng.normal(size=null.shape[0])
        neg = v < 0
        step = 0.95 * np.min(w0[neg] / -v[neg]) * rng.uniform()
        nu = w0 + step * v
        assert np.all(nu >= 0)
        assert np.max(np.abs(U @ nu - moments)) <= 1e-9 * np.max(np.abs(moments))
        assert extremal <= nu.sum() + 1e-12 * extremal


# annulus cubature

@pytest.fixture(scope="module")
def annulus_cubatures(poisson2_annulus):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", WeakTplusWarning)
        return {s: build_annulus_cubature(poisson2_annulus, s) for s in (1, 2)}


@pytest.mark.parametrize("s", [1, 2])
def test_annulus_cardinality_and_positivity(poisson2_annulus, annulus_cubatures, s):
    cub = annulus_cubatures[s]
    assert cub.kind == "annulus"
    assert set(cub.components) == set(poisson2_annulus.components)
    for m in cub.components.values():
        assert m.n_atoms <= 2 * s
        assert np.all(m.weights > 0)
        assert np.all((m.nodes > 0.5) & (m.nodes < 1.0))


@pytest.mark.parametrize("s", [1, 2])
def test_annulus_exact_on_basis(poisson2_annulus, annulus_cubatures, s):
    cub = annulus_cubatures[s]
    for key in poisson2_annulus.components:
        for u in annulus_basis(key[0], s).functions:
            f = {key: u}
            exact = integrate_lf(poisson2_annulus, f)
            assert integrate_lf(cub, f) == pytest.approx(exact, rel=1e-8, abs=1e-12)


def test_annulus_negative_power(annulus_cubatures):
    # Re (x + iy)**-3 = r**-3 cos 3t; only the (3, 1) component sees it
    f = lambda r, t: r**-3.0 * np.cos(3 * t)
    ref = integrate.quad(lambda r: 2 * pi * r * (1 - r * r), 0.5, 1.0, epsabs=0, epsrel=1e-13)[0]
    direct = integrate.dblquad(lambda t, r: f(r, t) * PoissonDensity(2.0)(r, t) * r,
                               0.5, 1.0, 0.0, 2 * pi, epsabs=1e-12, epsrel=1e-12)[0]
    assert direct == pytest.approx(ref, rel=1e-9)
    assert integrate_function(annulus_cubatures[1], f) == pytest.approx(ref, rel=1e-8)


def test_annulus_harmonic_polynomial(annulus_cubatures, poisson2_annulus):
    f = lambda r, t: r**4 * np.cos(4 * t) + 2 * r**2 * np.sin(2 * t) + r * np.cos(t)
    ref = integrate_function(poisson2_annulus, f)
    for cub in annulus_cubatures.values():
        assert integrate_function(cub, f) == pytest.approx(ref, rel=1e-9)


def test_annulus_passthrough():
    m = UnivariateMeasure.atomic([0.7], [1.5], support=(0.5, 1.0))
    from polyharmonic_cubature import PseudoPositiveMeasure
    cub = build_annulus_cubature(PseudoPositiveMeasure({(2, 1): m}, 0.5, 1.0, 2), 1)
    assert cub.components[(2, 1)] is m


def test_annulus_certificate_attached_below_proven_range(poisson2_annulus):
    m = poisson2_annulus.components[(1, 1)]
    _, verdict = annulus_component(m, 1, 1, 0.5, 1.0)
    assert verdict is not None
    _, verdict = annulus_component(poisson2_annulus.components[(6, 1)], 6, 1, 0.5, 1.0)
    assert verdict is None


def test_annulus_needs_positive_inner_radius(poisson2):
    from polyharmonic_cubature import InvalidSupport
    with pytest.raises(InvalidSupport):
        build_annulus_cubature(poisson2, 1)


# strip cubature

@pytest.fixture(scope="module")
def strip():
    leb = UnivariateMeasure.lebesgue(0.0, 1.0)
    half = UnivariateMeasure.from_density(lambda t: 0.5 + 0 * t, 0.0, 1.0)
    # dmu = dt (1 + cos 2y) dy / (2 pi)
    return StripMeasure({-2: half, 0: leb, 2: half}, 0.0, 1.0)


@pytest.mark.parametrize("s", [1, 2])
def test_strip_exponential_mode(strip, s):
    cub = build_strip_cubature(strip, s)
    f = lambda t, y: np.exp(-2 * t) * np.cos(2 * y)
    exact = (1 - exp(-2)) / 4
    assert integrate_strip(strip, f) == pytest.approx(exact, rel=1e-12)
    assert integrate_strip(cub, f) == pytest.approx(exact, rel=1e-9)
    for m in cub.components.values():
        assert m.n_atoms <= 2 * s and np.all(m.weights > 0)


def test_strip_polynomial_mode(strip):
    cub = build_strip_cubature(strip, 1)
    f = lambda t, y: t**3 + 0 * y
    assert integrate_strip(cub, f) == pytest.approx(0.25, rel=1e-12)


def test_strip_truncated_mode(strip):
    cub = build_strip_cubature(strip, 1)
    f = lambda t, y: np.cos(5 * y) + 0 * t
    assert integrate_strip(cub, f) == pytest.approx(0.0, abs=1e-14)
    assert integrate_strip(strip, f) == pytest.approx(0.0, abs=1e-14)


def test_strip_exact_on_exponential_family(strip):
    cub = build_strip_cubature(strip, 2)
    for j in range(4):
        for sign in (-1, 1):
            f = lambda t, y: t**j * np.exp(sign * 2 * t) * np.cos(2 * y) + t ** (j + 4) * 0
            assert integrate_strip(cub, f) == pytest.approx(integrate_strip(strip, f), rel=1e-9)
