"""Polyharmonic Gauss-Jacobi cubature on disks and annuli.

A measure on the plane is carried by its component measures ``mu_{k,l}`` on
``[rho, R]``; they satisfy ``∫ f dmu = sum ∫ f_{k,l}(r) r**-k dmu_{k,l}(r)``
where ``f_{k,l}`` are the Laplace-Fourier coefficients of ``f``. A cubature
has the same shape with finitely atomic components, so both sides integrate
through one code path.
"""

from dataclasses import dataclass, field
from math import isfinite

import numpy as np

from .errors import InsufficientSamples, InvalidSupport, NotPseudoPositive
from .laplace_fourier import (LFPolynomial, component_indices, fourier_coefficients_sampled,
                              angular_harmonic)
from .measures import UnivariateMeasure, image_measure, power_moment
from .orthopoly import gauss_jacobi

DEFAULT_K_MAX = 16
GRID_RADII = 256
POSITIVITY_TOL = 1e-10
ZERO_COMPONENT_TOL = 1e-12
SUPPORT_SLACK = 1e-12
CHEBYSHEV_SLACK = 1e-10
SUMMABILITY_DELTA = 0.1


def _check_components(components, rho, R):
    for key, m in components.items():
        a, b = m.support
        slack = SUPPORT_SLACK * max(R, 1.0)
        if a < rho - slack or b > R + slack:
            raise InvalidSupport(f"component {key} support [{a}, {b}] not within [{rho}, {R}]")


@dataclass(frozen=True)
class PseudoPositiveMeasure:
    """Component measures ``{(k, l): UnivariateMeasure}`` on the annulus ``rho <= r <= R``."""

    components: dict
    rho: float
    R: float
    k_max: int = DEFAULT_K_MAX

    def __post_init__(self):
        if not (0 <= self.rho < self.R < np.inf):
            raise InvalidSupport("need 0 <= rho < R < inf")
        comps = dict(sorted(self.components.items()))
        _check_components(comps, self.rho, self.R)
        k_top = max((k for k, _ in comps), default=0)
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "k_max", max(int(self.k_max), k_top))


@dataclass(frozen=True)
class Cubature:
    """Atomic component measures of a cubature of order ``order``.

    ``kind`` is ``"ball"`` (at most ``order`` atoms per component) or
    ``"annulus"`` (at most ``2 * order``). In both cases the stored atoms
    integrate through the ``r**-k`` identity shared with the source measure.
    """

    components: dict
    order: int
    rho: float
    R: float
    k_max: int = DEFAULT_K_MAX
    kind: str = "ball"
    certificates: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        comps = dict(sorted(self.components.items()))
        cap = self.order if self.kind == "ball" else 2 * self.order
        for key, m in comps.items():
            if not m.is_atomic:
                raise TypeError(f"cubature component {key} is not atomic")
            if m.n_atoms > cap:
                raise ValueError(f"component {key} has {m.n_atoms} > {cap} atoms")
        _check_components(comps, self.rho, self.R)
        object.__setattr__(self, "components", comps)

    @property
    def n_atoms(self):
        return sum(m.n_atoms for m in self.components.values())

    def as_measure(self):
        return PseudoPositiveMeasure(self.components, self.rho, self.R, self.k_max)


def _max_abs_on_grid(w, radii, M):
    theta = 2.0 * np.pi * np.arange(M) / M
    vals = np.asarray(w(radii[:, None], theta[None, :]), dtype=float)
    finite = vals[np.isfinite(vals)]
    return float(np.max(np.abs(finite))) if finite.size else 0.0


def _sampled_coefficient(w, key, M):
    k, l = key
    theta = 2.0 * np.pi * np.arange(M) / M
    ang = angular_harmonic(k, l, theta) * (2.0 * np.pi / M)

    def coef(r):
        r = np.asarray(r, dtype=float)
        return np.asarray(w(r[..., None], theta), dtype=float) @ ang

    return coef


def from_density(w, rho, R, k_max=DEFAULT_K_MAX, M=None, coefficients=None, label="w"):
    """Component measures ``dmu_{k,l} = r**(k+1) w_{k,l}(r) dr`` of a planar density ``w(r, theta)``.

    ``coefficients(k, l)`` may supply closed-form ``w_{k,l}`` callables (or
    ``None`` for a vanishing component); otherwise they are sampled with the
    ``M``-point trapezoid rule on each circle. Components whose coefficient
    never exceeds ``1e-12 * max|w|`` on the check grid are dropped.
    """
    if M is None:
        M = max(4 * k_max + 4, 64)
    if M < 4 * k_max + 4:
        raise InsufficientSamples(f"M={M} < 4K+4={4 * k_max + 4}")
    if coefficients is None and hasattr(w, "coefficient"):
        coefficients = w.coefficient
    radii = rho + (R - rho) * (np.arange(GRID_RADII) + 0.5) / GRID_RADII
    scale = _max_abs_on_grid(w, radii, M)
    components = {}
    for key in component_indices(k_max):
        k, l = key
        if coefficients is not None:
            coef = coefficients(k, l)
            if coef is None:
                continue
        else:
            coef = _sampled_coefficient(w, key, M)
        vals = np.asarray(coef(radii), dtype=float)
        worst = int(np.argmin(vals))
        if vals[worst] < -POSITIVITY_TOL * scale:
            raise NotPseudoPositive(key, float(radii[worst]), float(vals[worst]))
        if np.max(np.abs(vals)) <= ZERO_COMPONENT_TOL * scale:
            continue

        def dens(r, coef=coef, k=k):
            r = np.asarray(r, dtype=float)
            return np.maximum(r ** (k + 1) * coef(r), 0.0)

        components[key] = UnivariateMeasure.from_density(
            dens, rho, R, label=f"{label}[{k},{l}]", check=False)
    return PseudoPositiveMeasure(components, float(rho), float(R), k_max)


def gauss_jacobi_component(m, s):
    """Order-``s`` Gauss-Jacobi rule in ``r**2``, pulled back to ``r``."""
    if m.is_atomic and m.n_atoms <= s:
        return m
    nu = gauss_jacobi(image_measure(m, "square"), s)
    return image_measure(nu, "sqrt")


def build_cubature(mu, s):
    """Polyharmonic Gauss-Jacobi cubature of order ``s``: exact whenever ``Laplacian**(2s) f = 0``."""
    if s < 1:
        raise ValueError("s must be >= 1")
    comps = {key: gauss_jacobi_component(m, s) for key, m in mu.components.items()}
    return Cubature(comps, s, mu.rho, mu.R, mu.k_max, "ball")


def _component_integral(m, k, fkl, epsabs=0.0):
    def integrand(r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = np.asarray(fkl(r), dtype=float) * r ** (-float(k))
        return np.where(r > 0, vals, 0.0)

    return m.integrate(integrand, epsabs=epsabs)


def integrate_lf(target, f, epsabs=0.0):
    """``sum ∫ f_{k,l}(r) r**-k d target_{k,l}``.

    ``f`` is an :class:`LFPolynomial` or a map ``(k, l) -> f_{k,l}`` callable.
    Components present on only one side contribute zero.
    """
    total = 0.0
    for key, m in target.components.items():
        if isinstance(f, LFPolynomial):
            p = f.components.get(key)
            if p is None:
                continue
            # f_{k,l}(r) r**-k = p(r**2)
            total += sum(c * power_moment(m, 2 * j) for j, c in enumerate(p) if c != 0)
        else:
            fkl = f.get(key)
            if fkl is None:
                continue
            total += _component_integral(m, key[0], fkl, epsabs)
    return float(total)


def _sampling_size(k_max, M):
    if M is None:
        M = max(4 * k_max + 4, 64)
    if M < 4 * k_max + 4:
        raise InsufficientSamples(f"M={M} < 4K+4={4 * k_max + 4}")
    return M


def integrate_function(target, f, M=None):
    """Integrate ``f(r, theta)`` against a cubature or a component measure.

    Laplace-Fourier coefficients of ``f`` are sampled on circles with the
    ``M``-point trapezoid rule. For atomic targets this costs one FFT per atom.
    """
    M = _sampling_size(target.k_max, M)
    keys = list(target.components)
    if all(m.is_atomic for m in target.components.values()):
        nodes = np.concatenate([target.components[key].nodes for key in keys]) if keys else []
        coefs = fourier_coefficients_sampled(f, np.asarray(nodes), target.k_max, M)
        total = 0.0
        start = 0
        for key in keys:
            m = target.components[key]
            n = m.n_atoms
            r = m.nodes
            fk = coefs[key][start : start + n]
            total += float(np.dot(m.weights, fk * r ** (-float(key[0]))))
            start += n
        return total
    callables = {key: (lambda r, key=key: fourier_coefficients_sampled(f, r, key[0], M)[key])
                 for key in keys}
    # sampled coefficients carry roundoff of order eps * max|f| on every
    # circle; ask for no more than that from each component
    radii = np.linspace(target.rho, target.R, 33)
    theta = 2.0 * np.pi * np.arange(M) / M
    f_scale = float(np.max(np.abs(f(radii[:, None], theta[None, :]))))
    weight = sum(power_moment(m, 0, -key[0]) for key, m in target.components.items())
    return integrate_lf(target, callables, epsabs=1e-15 * f_scale * weight)


@dataclass(frozen=True)
class InequalityRow:
    index: tuple
    cubature_side: float
    measure_side: float
    passed: bool


def verify_chebyshev_inequality(mu, cub):
    """Compare ``∫ r**-k dsigma_{k,l}`` with ``∫ r**-k dmu_{k,l}`` per component."""
    rows = []
    for key, m in mu.components.items():
        k = key[0]
        right = power_moment(m, 0, -k)
        sigma = cub.components.get(key)
        left = power_moment(sigma, 0, -k) if sigma is not None else 0.0
        if sigma is m:
            left = right
        rows.append(InequalityRow(key, left, right, left <= right + CHEBYSHEV_SLACK * abs(right)))
    return rows


@dataclass(frozen=True)
class SummabilityReport:
    terms: tuple
    partial_sums: tuple
    divergence_flag: bool
    decay_exponent: float


def summability_report(mu, tail_fit=True):
    """Partial sums of ``sum_{k,l} ∫ r**-k dmu_{k,l}`` over ``k = 0..k_max``.

    With ``tail_fit`` the top half of the per-degree terms is fitted to a
    power law ``C k**-p``; divergence is flagged when ``p < 1 + 0.1``.
    """
    K = mu.k_max
    terms = np.zeros(K + 1)
    for (k, l), m in mu.components.items():
        terms[k] += power_moment(m, 0, -k)
    partial = np.cumsum(terms)
    flag = not all(isfinite(t) for t in terms)
    exponent = float("nan")
    if tail_fit and not flag:
        ks = np.arange(max(1, (K + 1) // 2), K + 1)
        tail = terms[ks]
        scale = np.max(terms) if terms.size else 0.0
        alive = tail > ZERO_COMPONENT_TOL * scale
        if alive.sum() >= 2:
            slope = np.polyfit(np.log(ks[alive]), np.log(tail[alive]), 1)[0]
            exponent = float(-slope)
            flag = exponent < 1.0 + SUMMABILITY_DELTA
        else:
            exponent = float("inf")
    return SummabilityReport(tuple(float(t) for t in terms), tuple(float(p) for p in partial),
                             bool(flag), exponent)


@dataclass(frozen=True)
class ConvergenceRow:
    s: int
    value: float
    abs_error: float


def convergence_table(mu, f, s_list, reference, M=None, build=build_cubature):
    """Cubature values of ``f`` for each order in ``s_list`` against a reference value."""
    rows = []
    for s in sorted(s_list):
        cub = build(mu, s)
        if isinstance(f, LFPolynomial):
            value = integrate_lf(cub, f)
        else:
            value = integrate_function(cub, f, M)
        rows.append(ConvergenceRow(int(s), value, abs(value - reference)))
    return rows
