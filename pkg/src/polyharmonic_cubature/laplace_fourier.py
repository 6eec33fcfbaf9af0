"""Laplace-Fourier (Gauss-decomposed) form of bivariate polynomials.

Orthonormal circular harmonics on the unit circle::

    Y_0     = 1 / sqrt(2 pi)
    Y_{k,1} = r**k cos(k theta) / sqrt(pi)
    Y_{k,2} = r**k sin(k theta) / sqrt(pi)        (k >= 1)

A polynomial ``P`` is stored componentwise as ``P(x) = sum p_{k,l}(|x|^2) Y_{k,l}(x)``
with univariate coefficient arrays ``p_{k,l}`` in the variable ``t = r**2``.
"""

from dataclasses import dataclass, field
from math import comb, sqrt, pi

import numpy as np

from .errors import InsufficientSamples, MissingMoment
from .measures import MomentSequence

Y0 = 1.0 / sqrt(2.0 * pi)
YK = 1.0 / sqrt(pi)
OMEGA = 2.0 * pi
IMAG_TOL = 1e-13
CHOP_TOL = 1e-13


def component_indices(k_max):
    """All ``(k, l)`` pairs with ``k <= k_max`` in canonical order."""
    out = [(0, 1)]
    for k in range(1, k_max + 1):
        out += [(k, 1), (k, 2)]
    return out


def harmonic_norm(k):
    return Y0 if k == 0 else YK


def angular_harmonic(k, l, theta):
    """``Y_{k,l}`` restricted to the unit circle."""
    theta = np.asarray(theta, dtype=float)
    if k == 0:
        return np.full_like(theta, Y0)
    return YK * (np.cos(k * theta) if l == 1 else np.sin(k * theta))


@dataclass(frozen=True)
class BivariatePolynomial:
    """Real polynomial ``sum c_{a,b} x**a y**b`` stored as ``{(a, b): c}``."""

    coefficients: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (a, b), c in self.coefficients.items():
            a, b = int(a), int(b)
            if a < 0 or b < 0:
                raise ValueError("exponents must be non-negative")
            c = float(c)
            if c != 0.0:
                clean[(a, b)] = clean.get((a, b), 0.0) + c
        object.__setattr__(self, "coefficients", clean)

    @classmethod
    def from_array(cls, arr):
        arr = np.asarray(arr, dtype=float)
        return cls({(a, b): arr[a, b] for a, b in zip(*np.nonzero(arr))})

    def to_array(self):
        deg = self.degree
        arr = np.zeros((deg + 1, deg + 1))
        for (a, b), c in self.coefficients.items():
            arr[a, b] = c
        return arr

    @property
    def degree(self):
        return max((a + b for a, b in self.coefficients), default=0)

    def norm(self):
        return max((abs(c) for c in self.coefficients.values()), default=0.0)

    def __call__(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        out = np.zeros(np.broadcast(x, y).shape)
        for (a, b), c in self.coefficients.items():
            out = out + c * x**a * y**b
        return out

    def __add__(self, other):
        out = dict(self.coefficients)
        for key, c in other.coefficients.items():
            out[key] = out.get(key, 0.0) + c
        return BivariatePolynomial(out)

    def __sub__(self, other):
        return self + BivariatePolynomial({k: -c for k, c in other.coefficients.items()})


@dataclass(frozen=True)
class LFPolynomial:
    """``{(k, l): coefficients of p_{k,l}(t)}`` with ascending powers of ``t = r**2``."""

    components: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (k, l), p in self.components.items():
            p = np.atleast_1d(np.asarray(p, dtype=float)).copy()
            if k < 0 or l not in ((1,) if k == 0 else (1, 2)):
                raise ValueError(f"invalid component index {(k, l)}")
            p.setflags(write=False)
            clean[(int(k), int(l))] = p
        object.__setattr__(self, "components", clean)

    def coefficient_function(self, key):
        """``f_{k,l}(r) = r**k p_{k,l}(r**2)`` as a vectorized callable."""
        k = key[0]
        p = self.components[key]
        return lambda r: np.asarray(r, dtype=float) ** k * np.polynomial.polynomial.polyval(
            np.asarray(r, dtype=float) ** 2, p)

    def __call__(self, r, theta):
        r = np.asarray(r, dtype=float)
        theta = np.asarray(theta, dtype=float)
        out = np.zeros(np.broadcast(r, theta).shape)
        for (k, l), p in self.components.items():
            out = out + (r**k * np.polynomial.polynomial.polyval(r * r, p)
                         * angular_harmonic(k, l, theta))
        return out


def _binomial_expansion(a, b):
    """Coefficients ``Z[m, n]`` of ``x**a y**b = sum Z[m,n] z**m zbar**n``."""
    Z = np.zeros((a + b + 1, a + b + 1), dtype=complex)
    scale = 2.0 ** (-a) * (2j) ** (-b)
    for i in range(a + 1):
        ci = comb(a, i)
        for j in range(b + 1):
            Z[i + j, a - i + b - j] += scale * ci * comb(b, j) * (-1) ** (b - j)
    return Z


def lf_decompose(p):
    """Gauss decomposition of a real bivariate polynomial into harmonic components."""
    deg = p.degree
    Z = np.zeros((deg + 1, deg + 1), dtype=complex)
    for (a, b), c in p.coefficients.items():
        Zab = _binomial_expansion(a, b)
        Z[: Zab.shape[0], : Zab.shape[1]] += c * Zab
    # A[k][j]: coefficient of r**(2j + |k|) e^{i k theta}
    half = deg // 2 + 1
    A = np.zeros((2 * deg + 1, half), dtype=complex)
    for m in range(deg + 1):
        for n in range(deg + 1 - m):
            if Z[m, n] != 0:
                A[m - n + deg, min(m, n)] += Z[m, n]
    tol = IMAG_TOL * max(p.norm(), np.finfo(float).tiny)
    comps = {}
    zero = A[deg]
    if np.max(np.abs(zero.imag), initial=0.0) > tol:
        raise ArithmeticError("imaginary residue in the radial component")
    if np.any(zero.real != 0):
        comps[(0, 1)] = sqrt(2.0 * pi) * zero.real
    for k in range(1, deg + 1):
        plus, minus = A[deg + k], A[deg - k]
        cos_c = plus + minus
        sin_c = 1j * (plus - minus)
        if max(np.max(np.abs(cos_c.imag)), np.max(np.abs(sin_c.imag))) > tol:
            raise ArithmeticError(f"imaginary residue in harmonic degree {k}")
        if np.any(cos_c.real != 0):
            comps[(k, 1)] = sqrt(pi) * cos_c.real
        if np.any(sin_c.real != 0):
            comps[(k, 2)] = sqrt(pi) * sin_c.real
    return LFPolynomial({key: _trim(v) for key, v in comps.items()})


def _trim(p):
    nz = np.nonzero(p)[0]
    return p[: nz[-1] + 1] if nz.size else p[:1]


def _polymul2d(A, B):
    out = np.zeros((A.shape[0] + B.shape[0] - 1, A.shape[1] + B.shape[1] - 1))
    for (i, j), c in np.ndenumerate(A):
        if c != 0:
            out[i : i + B.shape[0], j : j + B.shape[1]] += c * B
    return out


def solid_harmonic_array(k, l):
    """Monomial coefficient array of ``Y_{k,l}(x, y)``."""
    arr = np.zeros((k + 1, k + 1))
    if k == 0:
        arr[0, 0] = Y0
        return arr
    for m in range(k + 1):
        # (x + i y)**k = sum C(k,m) x**(k-m) (i y)**m
        c = comb(k, m)
        if l == 1 and m % 2 == 0:
            arr[k - m, m] = c * (-1) ** (m // 2) * YK
        elif l == 2 and m % 2 == 1:
            arr[k - m, m] = c * (-1) ** ((m - 1) // 2) * YK
    return arr


def _radial_power_array(j):
    arr = np.zeros((2 * j + 1, 2 * j + 1))
    for i in range(j + 1):
        arr[2 * i, 2 * (j - i)] = comb(j, i)
    return arr


def lf_recompose(lf):
    """Monomial form of ``sum p_{k,l}(|x|^2) Y_{k,l}(x)``."""
    deg = max((k + 2 * (len(p) - 1) for (k, _), p in lf.components.items()), default=0)
    total = np.zeros((deg + 1, deg + 1))
    for (k, l), p in lf.components.items():
        Y = solid_harmonic_array(k, l)
        for j, c in enumerate(p):
            if c == 0:
                continue
            term = _polymul2d(_radial_power_array(j), Y)
            total[: term.shape[0], : term.shape[1]] += c * term
    return BivariatePolynomial.from_array(total)


def polyharmonic_order(lf):
    """Smallest ``s >= 1`` with ``Laplacian**s P = 0``: one plus the largest ``deg p_{k,l}``."""
    scale = max((np.max(np.abs(p)) for p in lf.components.values()), default=0.0)
    if scale == 0:
        return 1
    top = -1
    for p in lf.components.values():
        nz = np.nonzero(np.abs(p) > CHOP_TOL * scale)[0]
        if nz.size:
            top = max(top, int(nz[-1]))
    return top + 1 if top >= 0 else 1


def fourier_coefficients_sampled(f, r, K, M):
    """Laplace-Fourier coefficients ``f_{k,l}(r)``, ``k <= K``, by the M-point trapezoid rule.

    ``f(r, theta)`` must broadcast over numpy arrays. ``r`` may be a scalar
    or an array; each value of the returned dict has the shape of ``r``.
    """
    if M < 4 * K + 4:
        raise InsufficientSamples(f"M={M} < 4K+4={4 * K + 4}")
    r = np.asarray(r, dtype=float)
    theta = 2.0 * pi * np.arange(M) / M
    vals = np.asarray(f(r[..., None], theta), dtype=float)
    vals = np.broadcast_to(vals, r.shape + (M,))
    F = np.fft.rfft(vals, axis=-1) * (2.0 * pi / M)
    out = {(0, 1): F[..., 0].real * Y0}
    for k in range(1, K + 1):
        out[(k, 1)] = F[..., k].real * YK
        out[(k, 2)] = -F[..., k].imag * YK
    return out


def distributed_moments(c, k, l, jmax):
    """``c_j^{(k,l)} = T_c(|x|^{2j} Y_{k,l}(x))`` for ``j = 0..jmax`` from raw moments ``c[(a, b)]``."""
    values = []
    for j in range(jmax + 1):
        poly = lf_recompose(LFPolynomial({(k, l): np.eye(j + 1)[j]}))
        total = 0.0
        for key, coef in poly.coefficients.items():
            if key not in c:
                raise MissingMoment(f"moment {key} is required")
            total += coef * c[key]
        values.append(total)
    return MomentSequence(tuple(values), origin=f"distributed moments (k={k}, l={l})")
