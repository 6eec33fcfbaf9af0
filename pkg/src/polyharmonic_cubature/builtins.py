"""Registry of builtin densities and integrands on the unit disk.

Densities carry their Laplace-Fourier coefficients in closed form. Sampling
those coefficients by the trapezoid rule aliases badly near ``r = 1`` where
the Poisson kernel concentrates, so the analytic route is preferred whenever
it exists.
"""

from dataclasses import dataclass
from math import pi, sqrt
from typing import Optional

import numpy as np


@dataclass(frozen=True)
class PoissonDensity:
    """Poisson kernel of the unit disk, optionally damped by ``1 - r**alpha``."""

    alpha: Optional[float] = None

    def __call__(self, r, theta):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            kernel = (1.0 - r * r) / (1.0 - 2.0 * r * np.cos(theta) + r * r)
        return kernel * self._damping(r)

    def _damping(self, r):
        return 1.0 if self.alpha is None else 1.0 - np.asarray(r, dtype=float) ** self.alpha

    def coefficient(self, k, l):
        """Closed-form ``w_{k,l}(r)``; ``None`` for identically vanishing components."""
        if l == 2:
            return None
        c = sqrt(2.0 * pi) if k == 0 else 2.0 * sqrt(pi)
        return lambda r: c * np.asarray(r, dtype=float) ** k * self._damping(r)


@dataclass(frozen=True)
class ConstantDensity:
    value: float = 1.0

    def __call__(self, r, theta):
        return np.full(np.broadcast(np.asarray(r), np.asarray(theta)).shape, self.value)

    def coefficient(self, k, l):
        if k != 0:
            return None
        c = sqrt(2.0 * pi) * self.value
        return lambda r: np.full_like(np.asarray(r, dtype=float), c)


def density(builtin, alpha=None, value=1.0):
    if builtin == "poisson_alpha":
        return PoissonDensity(alpha)
    if builtin == "constant":
        return ConstantDensity(value)
    raise KeyError(f"unknown density builtin {builtin!r}")


DENSITY_IDS = ("poisson_alpha", "constant")


def _exp_x(r, theta):
    return np.exp(r * np.cos(theta))


def _one(r, theta):
    return np.ones(np.broadcast(np.asarray(r), np.asarray(theta)).shape)


def _r2(r, theta):
    return np.broadcast_to(np.asarray(r, dtype=float) ** 2, np.broadcast(r, theta).shape)


def _x(r, theta):
    return r * np.cos(theta)


def _abs_x(r, theta):
    return np.abs(r * np.cos(theta))


FUNCTIONS = {
    "exp_x": _exp_x,
    "one": _one,
    "r2": _r2,
    "x": _x,
    "abs_x": _abs_x,
}


def function(name):
    try:
        return FUNCTIONS[name]
    except KeyError:
        raise KeyError(f"unknown function builtin {name!r}") from None
