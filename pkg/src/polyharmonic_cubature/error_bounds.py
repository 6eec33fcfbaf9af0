"""Error bounds for the polyharmonic Gauss-Jacobi cubature.

For each component the cubature error is governed by the ``2s``-th
derivative of ``g_{k,l}(t) = f_{k,l}(sqrt t) t**(-k/2)`` on ``[rho**2, R**2]``
times the squared norm of the degree-``s`` monic orthogonal polynomial of
the squared-radius image measure.
"""

from dataclasses import dataclass
from math import factorial, lgamma, exp, pi, sqrt

import numpy as np
from numpy.polynomial import chebyshev as C

from .errors import InvalidRadii, MissingDerivativeBound, OrderTooHigh
from .measures import image_measure
from .orthopoly import monic_norm_sq, recurrence_from_measure

SAFETY = 1.25
CHOP = 1e-14


@dataclass(frozen=True)
class ComponentBound:
    derivative_sup: float
    norm_sq: float
    term: float


@dataclass(frozen=True)
class ErrorReport:
    contributions: dict
    total_bound: float
    order: int
    certified: bool = True
    observed_error: float = None

    def holds(self, slack=0.0):
        """Whether the observed error respects the bound, up to an absolute ``slack`` for roundoff."""
        return self.observed_error is None or self.observed_error <= self.total_bound + slack


def component_norm_sq(m, s):
    """``∫ pi_s(t)**2`` against the image of ``m`` under ``r -> r**2``; zero for rank ``<= s``."""
    return monic_norm_sq(recurrence_from_measure(image_measure(m, "square"), s + 1), s)


def markov_bound(mu, s, deriv_sup, observed_error=None, certified=True):
    """Markov-type bound ``(1/(2s)!) sum sup|g_{k,l}^{(2s)}| * ||pi_s||**2``.

    ``deriv_sup`` maps component indices to the derivative sups; set
    ``certified=False`` when they come from :func:`derivative_sup_estimate`.
    """
    contributions = {}
    for key, m in mu.components.items():
        norm = component_norm_sq(m, s)
        if key not in deriv_sup:
            if norm == 0.0:
                continue
            raise MissingDerivativeBound(f"no derivative bound for component {key}")
        sup = float(deriv_sup[key])
        if sup < 0:
            raise ValueError("derivative sups must be non-negative")
        contributions[key] = ComponentBound(sup, norm, sup * norm)
    total = sum(c.term for c in contributions.values()) / factorial(2 * s)
    return ErrorReport(contributions, float(total), s, certified, observed_error)


def derivative_sup_estimate(g, interval, order, degree=None):
    """Heuristic ``sup |g^{(order)}|`` on ``interval`` via Chebyshev interpolation, times 1.25."""
    n = max(64, 8 * order) if degree is None else int(degree)
    if order > n / 2:
        raise OrderTooHigh(f"order {order} too high for interpolation degree {n}")
    a, b = (float(v) for v in interval)
    p = C.Chebyshev.interpolate(g, n, domain=[a, b])
    coef = p.coef
    big = np.max(np.abs(coef))
    keep = np.nonzero(np.abs(coef) >= CHOP * big)[0]
    if keep.size == 0:
        return 0.0
    p = C.Chebyshev(coef[: keep[-1] + 1], domain=[a, b])
    d = p.deriv(order)
    if np.all(d.coef == 0):
        return 0.0
    x = np.linspace(a, b, 16 * n + 1)
    crit = d.deriv().roots()
    crit = crit[np.isreal(crit)].real
    crit = crit[(crit >= a) & (crit <= b)]
    sup = float(np.max(np.abs(d(np.concatenate([x, crit])))))
    return SAFETY * sup


def jacobi_norm_closed_form(s, k):
    """``s!(s+k+1)!/(2s+k+1)! * (s+1)!(s+k)!/(2s+k+2)!`` in log-gamma arithmetic."""
    if s < 0 or k < 0:
        raise ValueError("need s, k >= 0")
    lf = lambda n: lgamma(n + 1)
    return exp(lf(s) + lf(s + k + 1) - lf(2 * s + k + 1)
               + lf(s + 1) + lf(s + k) - lf(2 * s + k + 2))


def holomorphic_bound(max_abs_f_on_rho, rho, R, s, mu, omega=2.0 * pi):
    """Bound for integrands holomorphic on the complex ball of radius ``rho > R``.

    The component sum is truncated at ``mu.k_max``; the remainder is majorized
    by the largest computed norm times the geometric tail of ``rho**-k``
    (two harmonics per degree).
    """
    if not rho > R:
        raise InvalidRadii(f"need rho > R (got rho={rho}, R={R})")
    if not R > 0:
        raise InvalidRadii("R must be positive")
    total = 0.0
    max_norm = 0.0
    for (k, _), m in mu.components.items():
        norm = component_norm_sq(m, s)
        max_norm = max(max_norm, norm)
        total += rho ** (-k) * norm
    K = mu.k_max
    if rho > 1:
        total += 2.0 * max_norm * rho ** (-(K + 1)) / (1.0 - 1.0 / rho)
    elif max_norm > 0:
        return float("inf")
    prefactor = sqrt(omega) * rho**2 / (rho**2 - R**2) ** (2 * s + 1)
    return float(prefactor * max_abs_f_on_rho * total)
