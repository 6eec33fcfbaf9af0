"""Vectorized globally-adaptive Gauss quadrature on a finite interval.

Every leaf interval carries a Gauss-Legendre estimate on the whole interval
and one on its two halves; their difference is the local error estimate
(a nested pair in the spirit of Gauss-Kronrod, but built only from
Legendre rules). Leaves whose error exceeds their length-proportional share
of the tolerance are bisected until the total estimate meets the tolerance.

Integrands are evaluated on whole batches of points at once: ``f`` receives
a 1-D array of abscissae and returns either an array of the same length or
a 2-D array ``(m, N)`` holding ``m`` integrands.
"""

from dataclasses import dataclass

import numpy as np

from .errors import NonIntegrable

DEFAULT_EPSREL = 1e-12
DEFAULT_LIMIT = 2**20
_ORDER = 20
_X, _W = np.polynomial.legendre.leggauss(_ORDER)
_EPS = np.finfo(float).eps
_WORST_FRACTION = 0.05


@dataclass(frozen=True)
class AdaptiveResult:
    value: np.ndarray
    error: float
    nodes: np.ndarray
    weights: np.ndarray
    intervals: int


def _rule(lo, hi):
    """Gauss-Legendre abscissae/weights for each interval, shape (n, ORDER)."""
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    return mid[:, None] + half[:, None] * _X[None, :], half[:, None] * _W[None, :]


def _eval(f, x):
    flat = x.ravel()
    vals = np.asarray(f(flat), dtype=float)
    vals = np.atleast_2d(vals)
    if vals.shape[-1] != flat.size:
        vals = np.broadcast_to(vals, (vals.shape[0], flat.size))
    return vals.reshape((vals.shape[0],) + x.shape)


def _integrate_rule(f, lo, hi):
    x, w = _rule(lo, hi)
    vals = _eval(f, x)
    return (vals * w).sum(axis=-1), (np.abs(vals) * w).sum(axis=-1)


def integrate(f, a, b, epsrel=DEFAULT_EPSREL, epsabs=0.0, limit=DEFAULT_LIMIT):
    """Integrate ``f`` over ``[a, b]``.

    Returns an :class:`AdaptiveResult`; ``value`` has shape ``(m,)`` for
    ``m`` stacked integrands. Raises :class:`NonIntegrable` when the error
    estimate cannot be driven below tolerance within ``limit`` leaves, or
    when the integrand produces non-finite values.
    """
    a = float(a)
    b = float(b)
    if not b > a:
        raise ValueError("integration interval must satisfy a < b")
    lo = np.array([a])
    hi = np.array([b])
    coarse, _ = _integrate_rule(f, lo, hi)
    mid = 0.5 * (lo + hi)
    left, left_abs = _integrate_rule(f, lo, mid)
    right, right_abs = _integrate_rule(f, mid, hi)
    while True:
        fine = left + right
        if not np.all(np.isfinite(fine)):
            raise NonIntegrable("integrand is not finite on the sample points")
        err = np.max(np.abs(fine - coarse), axis=0)
        total = fine.sum(axis=1)
        magnitude = (left_abs + right_abs).sum(axis=1)
        # roundoff floor: no estimate is trusted below a few ulps of |f|
        tol = np.maximum(np.maximum(epsabs, epsrel * np.abs(total)),
                         50 * _EPS * magnitude)
        tol = float(np.min(tol))
        total_err = float(err.sum())
        if total_err <= tol:
            break
        width = hi - lo
        # bisect leaves over their share of the tolerance, but only those near
        # the worst one so roundoff-dominated leaves are not refined forever
        split = (err > tol * width / (b - a)) & (err >= _WORST_FRACTION * err.max())
        if not split.any():
            split[np.argmax(err)] = True
        # intervals too narrow to bisect further are frozen as they are
        split &= width > 8 * _EPS * np.maximum(np.abs(lo), np.abs(hi))
        if not split.any():
            raise NonIntegrable(
                f"adaptive quadrature stalled (error {total_err:.3e} > {tol:.3e})")
        if lo.size + split.sum() > limit:
            raise NonIntegrable(
                f"subdivision limit {limit} reached (error {total_err:.3e})")
        keep = ~split
        new_lo = np.concatenate([lo[split], mid[split]])
        new_hi = np.concatenate([mid[split], hi[split]])
        new_coarse = np.concatenate([left[:, split], right[:, split]], axis=1)
        new_mid = 0.5 * (new_lo + new_hi)
        nl, nl_abs = _integrate_rule(f, new_lo, new_mid)
        nr, nr_abs = _integrate_rule(f, new_mid, new_hi)
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        mid = np.concatenate([mid[keep], new_mid])
        coarse = np.concatenate([coarse[:, keep], new_coarse], axis=1)
        left = np.concatenate([left[:, keep], nl], axis=1)
        right = np.concatenate([right[:, keep], nr], axis=1)
        left_abs = np.concatenate([left_abs[:, keep], nl_abs], axis=1)
        right_abs = np.concatenate([right_abs[:, keep], nr_abs], axis=1)
    x_left, w_left = _rule(lo, mid)
    x_right, w_right = _rule(mid, hi)
    nodes = np.concatenate([x_left.ravel(), x_right.ravel()])
    weights = np.concatenate([w_left.ravel(), w_right.ravel()])
    order = np.argsort(nodes, kind="stable")
    return AdaptiveResult(total, total_err, nodes[order], weights[order], lo.size)


def quad(f, a, b, epsrel=DEFAULT_EPSREL, epsabs=0.0, limit=DEFAULT_LIMIT):
    """Scalar convenience wrapper around :func:`integrate`."""
    res = integrate(f, a, b, epsrel=epsrel, epsabs=epsabs, limit=limit)
    return float(res.value[0]) if res.value.size == 1 else res.value
