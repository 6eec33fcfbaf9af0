"""Polyharmonic Gauss-Jacobi cubature built from univariate Gauss rules per harmonic component.

Annuli and periodic strips use Markov quadrature on Chebyshev systems instead.
"""

from .errors import *  # noqa: F401,F403
from .measures import (MomentSequence, StieltjesVerdict, UnivariateMeasure, generalized_moment,
                       image_measure, power_moment, stieltjes_check)
from .orthopoly import (RecurrenceCoefficients, gauss_jacobi, gauss_nodes_weights, monic_norm_sq,
                        recurrence_from_measure)
from .laplace_fourier import (OMEGA, Y0, YK, BivariatePolynomial, LFPolynomial, angular_harmonic,
                              component_indices, distributed_moments, fourier_coefficients_sampled,
                              lf_decompose, lf_recompose, polyharmonic_order)
from .cubature import (Cubature, PseudoPositiveMeasure, build_cubature, convergence_table,
                       from_density, integrate_function, integrate_lf, summability_report,
                       verify_chebyshev_inequality)
from .chebsys import (BasisFunction, ChebyshevBasis, StripCubature, StripMeasure, annulus_basis,
                      build_annulus_cubature, build_strip_cubature, integrate_strip,
                      markov_quadrature, polynomial_basis, strip_basis, verify_tplus)
from .error_bounds import (ErrorReport, derivative_sup_estimate, holomorphic_bound,
                           jacobi_norm_closed_form, markov_bound)
from .builtins import ConstantDensity, PoissonDensity

__version__ = "0.1.0"
