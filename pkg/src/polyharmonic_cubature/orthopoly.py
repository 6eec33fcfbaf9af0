"""Three-term recurrences and Gauss rules for univariate measures."""

from dataclasses import dataclass

import numpy as np

from .errors import RankTooLow, ZeroMeasure
from .measures import UnivariateMeasure
from .tridiagonal import tridiagonal_eigen

# squared-norm cutoff relative to the cancellation-free size of the
# recurrence terms that produced pi_r
RANK_TOL = 1e-24


@dataclass(frozen=True)
class RecurrenceCoefficients:
    """Monic recurrence ``pi_{j+1} = (t - alpha_j) pi_j - beta_j pi_{j-1}``.

    ``beta[0]`` is the total mass. ``rank`` counts the coefficients actually
    available; it is smaller than ``requested`` exactly when the measure has
    fewer than ``requested`` support points.
    """

    alpha: np.ndarray
    beta: np.ndarray
    requested: int
    support: tuple = (0.0, np.inf)

    @property
    def n(self):
        return self.requested

    @property
    def rank(self):
        return len(self.alpha)

    def evaluate(self, t, degree):
        """Values of the monic orthogonal polynomial ``pi_degree`` at ``t``."""
        if degree > self.rank:
            raise RankTooLow(f"pi_{degree} needs rank >= {degree}")
        t = np.asarray(t, dtype=float)
        prev = np.zeros_like(t)
        cur = np.ones_like(t)
        for j in range(degree):
            prev, cur = cur, (t - self.alpha[j]) * cur - (self.beta[j] * prev if j else 0.0)
        return cur


def recurrence_from_measure(m, n):
    """Discretized Stieltjes procedure for the first ``n`` recurrence coefficients."""
    if n < 1:
        raise ValueError("n must be >= 1")
    x, w = m.discretize(2 * n + 1)
    mass = float(np.sum(w))
    if not mass > 0:
        raise ZeroMeasure("total mass must be positive")
    alpha = []
    beta = []
    prev = np.zeros_like(x)
    cur = np.ones_like(x)
    norm_prev = 1.0
    for j in range(n):
        norm = float(np.dot(w, cur * cur))
        if j > 0:
            a_prev, b_prev = alpha[-1], beta[-1]
            scale = float(np.dot(w, (np.abs(x - a_prev) * np.abs(prev)
                                     + (b_prev * np.abs(prev_prev) if j > 1 else 0.0)) ** 2))
            if norm <= RANK_TOL * scale:
                break
        a_j = float(np.dot(w, x * cur * cur)) / norm
        b_j = norm if j == 0 else norm / norm_prev
        alpha.append(a_j)
        beta.append(b_j)
        prev_prev = prev
        prev, cur = cur, (x - a_j) * cur - (b_j * prev if j else 0.0)
        norm_prev = norm
    return RecurrenceCoefficients(np.array(alpha), np.array(beta), n, tuple(m.support))


def gauss_nodes_weights(rc, s):
    """``s``-point Gauss rule from the Jacobi matrix of ``rc`` (Golub-Welsch)."""
    if s < 1:
        raise ValueError("s must be >= 1")
    if rc.rank < s:
        raise RankTooLow(f"effective rank {rc.rank} < {s}")
    nodes, first = tridiagonal_eigen(rc.alpha[:s], np.sqrt(rc.beta[1:s]))
    weights = rc.beta[0] * first**2
    a, b = rc.support
    if np.isfinite(b):
        nodes = np.clip(nodes, a, b)
    else:
        a, b = nodes[0], nodes[-1]
    return UnivariateMeasure.atomic(nodes, weights, support=(a, b), label=f"gauss{s}")


def monic_norm_sq(rc, s):
    """``||pi_s||^2 = beta_0 * ... * beta_s``; zero when the rank is too low."""
    if s < 0:
        raise ValueError("s must be >= 0")
    if rc.rank < s + 1:
        return 0.0
    return float(np.prod(rc.beta[: s + 1]))


def gauss_jacobi(m, s):
    """Gauss-Jacobi measure of order ``s``; measures with at most ``s`` support points pass through."""
    if m.is_atomic and m.n_atoms <= s:
        return m
    rc = recurrence_from_measure(m, s + 1)
    if rc.rank <= s:
        if m.is_atomic:
            return m
        raise RankTooLow(f"density measure reports numerical rank {rc.rank}")
    return gauss_nodes_weights(rc, s)
