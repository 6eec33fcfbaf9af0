"""Univariate non-negative measures on compact subintervals of [0, inf).

A measure is either finitely atomic or given by a density. Densities are
stored in a *base* variable together with a power map ``t -> t**power``;
the measure itself is the push-forward of ``density(t) dt`` under that map.
Image measures under squaring or square roots therefore never require a
change-of-variables singularity to be integrated numerically: every integral
is evaluated in the base variable.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import adaptive
from .errors import InvalidSupport, NonIntegrable, TooShort

MERGE_TOL = 1e-14
PSD_TOL = 1e-10
_SPOT_CHECK_POINTS = 257


def _power(x, p):
    if p == 1.0:
        return x
    if p == 2.0:
        return x * x
    if p == 0.5:
        return np.sqrt(x)
    return x**p


@dataclass(frozen=True, eq=False)
class UnivariateMeasure:
    """Non-negative measure on the interval ``support = (a, b)``.

    Use :meth:`atomic`, :meth:`from_density` or :meth:`lebesgue` rather than
    the raw constructor.
    """

    support: tuple
    nodes: Optional[np.ndarray] = None
    weights: Optional[np.ndarray] = None
    density: Optional[Callable] = None
    base: Optional[tuple] = None
    power: float = 1.0
    label: str = ""
    _preimage: Optional[tuple] = field(default=None, repr=False)
    _cache: dict = field(default_factory=dict, repr=False)

    # construction ---------------------------------------------------------

    @classmethod
    def atomic(cls, nodes, weights, support=None, label="atoms"):
        nodes = np.asarray(nodes, dtype=float).ravel()
        weights = np.asarray(weights, dtype=float).ravel()
        if nodes.size == 0 or nodes.size != weights.size:
            raise InvalidSupport("atomic measure needs matching, non-empty nodes/weights")
        if not (np.all(np.isfinite(nodes)) and np.all(np.isfinite(weights))):
            raise InvalidSupport("atoms must be finite")
        if np.any(weights <= 0):
            raise InvalidSupport("atomic weights must be strictly positive")
        order = np.argsort(nodes, kind="stable")
        nodes, weights = nodes[order], weights[order]
        if support is None:
            support = (float(nodes[0]), float(nodes[-1]))
        a, b = _check_interval(support)
        if nodes[0] < a or nodes[-1] > b:
            raise InvalidSupport(f"atoms outside the support interval [{a}, {b}]")
        nodes, weights = _merge(nodes, weights, MERGE_TOL * (b - a))
        nodes.setflags(write=False)
        weights.setflags(write=False)
        return cls(support=(a, b), nodes=nodes, weights=weights, label=label)

    @classmethod
    def from_density(cls, density, a, b, label="density", check=True):
        """Measure ``density(t) dt`` on ``[a, b]``; ``density`` must be vectorized."""
        a, b = _check_interval((a, b))
        if not b > a:
            raise InvalidSupport("a density needs an interval of positive length")
        m = cls(support=(a, b), density=density, base=(a, b), label=label)
        if check:
            m.spot_check()
        return m

    @classmethod
    def lebesgue(cls, a=0.0, b=1.0):
        return cls.from_density(lambda t: np.ones_like(t), a, b, label="lebesgue")

    # basic properties -----------------------------------------------------

    @property
    def kind(self):
        return "atomic" if self.nodes is not None else "density"

    @property
    def is_atomic(self):
        return self.nodes is not None

    @property
    def n_atoms(self):
        return self.nodes.size if self.is_atomic else None

    def density_eval(self, x):
        """Density of the measure in its own variable (change of variables applied)."""
        if self.is_atomic:
            raise TypeError("atomic measures have no density")
        x = np.asarray(x, dtype=float)
        p = self.power
        if p == 1.0:
            return self.density(x)
        t = _power(x, 1.0 / p)
        with np.errstate(divide="ignore", invalid="ignore"):
            jac = np.abs(_power(x, 1.0 / p - 1.0) / p) if p != 1 else 1.0
        return self.density(t) * jac

    def spot_check(self):
        """Verify non-negativity of the density on a grid of the base interval."""
        if self.is_atomic:
            return
        a, b = self.base
        grid = np.linspace(a, b, _SPOT_CHECK_POINTS)
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = np.asarray(self.density(grid), dtype=float)
        if not np.all(np.isfinite(vals[1:-1])):
            raise InvalidSupport("density is not finite in the interior of its support")
        finite = vals[np.isfinite(vals)]
        scale = np.max(np.abs(finite)) if finite.size else 0.0
        if finite.size and finite.min() < -PSD_TOL * scale:
            raise InvalidSupport(f"density is negative ({finite.min():.3e})")

    # integration ----------------------------------------------------------

    def integrate(self, u, epsrel=adaptive.DEFAULT_EPSREL, epsabs=0.0):
        """Integrate ``u`` (vectorized; may stack several integrands) against the measure.

        Returns a float for a single integrand, an array for stacked ones.
        """
        if self.is_atomic:
            vals = np.atleast_2d(np.asarray(u(self.nodes), dtype=float))
            out = vals @ self.weights
        else:
            a, b = self.base
            p = self.power
            dens = self.density

            def integrand(t):
                return np.asarray(u(_power(t, p)), dtype=float) * dens(t)

            out = adaptive.integrate(integrand, a, b, epsrel=epsrel, epsabs=epsabs).value
        if not np.all(np.isfinite(out)):
            raise NonIntegrable("integral is not finite")
        return float(out[0]) if out.size == 1 else out

    @property
    def mass(self):
        if "mass" not in self._cache:
            self._cache["mass"] = (float(np.sum(self.weights)) if self.is_atomic
                                   else self.integrate(np.ones_like))
        return self._cache["mass"]

    def discretize(self, degree):
        """Composite rule ``(x, w)`` integrating polynomials of ``degree`` against the measure.

        Atomic measures return their atoms. For densities the partition of
        the base interval is refined adaptively until Chebyshev polynomials
        ``T_0..T_degree`` (scaled to the support) are integrated to the
        default relative tolerance.
        """
        if self.is_atomic:
            return self.nodes, self.weights
        cached = self._cache.get("rule")
        if cached is not None and cached[0] >= degree:
            return cached[1], cached[2]
        a, b = self.support
        lo, hi = self.base
        p = self.power
        dens = self.density
        center, half = 0.5 * (a + b), 0.5 * (b - a)
        ks = np.arange(degree + 1)[:, None]

        def integrand(t):
            x = np.clip((_power(t, p) - center) / half, -1.0, 1.0)
            return np.cos(ks * np.arccos(x)) * dens(t)

        # Chebyshev moments may cancel to nearly zero, so accuracy is asked
        # relative to the total mass rather than to each moment
        res = adaptive.integrate(integrand, lo, hi, epsabs=adaptive.DEFAULT_EPSREL * self.mass)
        x = _power(res.nodes, p)
        w = res.weights * dens(res.nodes)
        self._cache["rule"] = (degree, x, w)
        return x, w


def _check_interval(support):
    a, b = (float(v) for v in support)
    if not (np.isfinite(a) and np.isfinite(b)):
        raise InvalidSupport("support must be a compact interval")
    if a < 0 or b < a:
        raise InvalidSupport(f"support [{a}, {b}] must satisfy 0 <= a <= b < inf")
    return a, b


def _merge(nodes, weights, tol):
    if nodes.size < 2:
        return nodes.copy(), weights.copy()
    groups = np.concatenate([[0], np.cumsum(np.diff(nodes) > tol)])
    if groups[-1] == nodes.size - 1:
        return nodes.copy(), weights.copy()
    merged_w = np.bincount(groups, weights=weights)
    merged_x = np.bincount(groups, weights=weights * nodes) / merged_w
    return merged_x, merged_w


@dataclass(frozen=True)
class MomentSequence:
    values: tuple
    origin: str = ""

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if len(vals) < 1 or not all(np.isfinite(vals)):
            raise ValueError("a moment sequence needs at least one finite entry")
        object.__setattr__(self, "values", vals)

    def __len__(self):
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def as_array(self):
        return np.array(self.values)


@dataclass(frozen=True)
class StieltjesVerdict:
    is_positive_definite: bool
    is_stieltjes: bool
    min_eigenvalues: tuple


def power_moment(m, j, exponent_shift=0):
    """``∫ t**(j + exponent_shift) dm(t)``."""
    if j < 0:
        raise ValueError("j must be non-negative")
    e = j + exponent_shift
    if m.is_atomic:
        if e < 0 and np.any(m.nodes <= 0):
            raise InvalidSupport("negative power of an atom at the origin")
        return float(np.sum(m.weights * m.nodes**e))
    key = ("power", e)
    if key not in m._cache:
        with np.errstate(divide="ignore"):
            m._cache[key] = m.integrate(lambda t: t**e)
    return m._cache[key]


def generalized_moment(m, u):
    """``∫ u dm`` for a vectorized callable ``u``."""
    return m.integrate(u)


def stieltjes_check(c):
    """Hankel positive-semidefiniteness of ``c`` and of its shift ``c[1:]``."""
    c = np.asarray(c.values if isinstance(c, MomentSequence) else c, dtype=float)
    if c.size < 2:
        raise TooShort("need at least two moments")
    n = c.size
    m0 = (n + 1) // 2
    m1 = n // 2
    idx0 = np.add.outer(np.arange(m0), np.arange(m0))
    idx1 = np.add.outer(np.arange(m1), np.arange(m1)) + 1
    mins = []
    passes = []
    for H in (c[idx0], c[idx1]):
        eig = np.linalg.eigvalsh(H)
        scale = np.max(np.abs(eig))
        mins.append(float(eig[0]))
        passes.append(bool(eig[0] >= -PSD_TOL * scale))
    return StieltjesVerdict(passes[0], passes[0] and passes[1], tuple(mins))


def image_measure(m, mapping):
    """Push ``m`` forward under ``t -> t**2`` (``"square"``) or ``t -> sqrt(t)`` (``"sqrt"``)."""
    if mapping not in ("square", "sqrt"):
        raise ValueError("mapping must be 'square' or 'sqrt'")
    a, b = m.support
    if a < 0:
        raise InvalidSupport("image measures need support in [0, inf)")
    inverse = "sqrt" if mapping == "square" else "square"
    if m._preimage is not None and m._preimage[1] == inverse:
        return m._preimage[0]
    p = 2.0 if mapping == "square" else 0.5
    support = (_power(a, p), _power(b, p))
    if m.is_atomic:
        nodes = _power(m.nodes, p)
        out = UnivariateMeasure(support=support, nodes=nodes, weights=m.weights,
                                label=f"{mapping}({m.label})", _preimage=(m, mapping))
    else:
        out = UnivariateMeasure(support=support, density=m.density, base=m.base,
                                power=m.power * p, label=f"{mapping}({m.label})",
                                _preimage=(m, mapping))
    return out
