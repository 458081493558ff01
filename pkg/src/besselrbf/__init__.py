"""
Orthonormal Bessel RBF wavelet series, continuous Bessel transforms and
causal time-space RBF wavelets, with brute-force projection oracles.
"""
__version__ = "0.1.0"

from .errors import (ConfigError, ConvergenceError, DegenerateCalibrationError, DivergenceError,
                     EmptyDomainError, MissingZerothTermError, NumericalFailure, OutsideConeError)
from .specfun import ZeroTable, bessel_j, bessel_j_asymptotic, bessel_y, bessel_zeros
from .domain import (BallDomain, QuadratureRule, SpaceTimePoint, WaveContext, ball_rule, cone_rule,
                     dist, gauss_legendre, heaviside, integrate, spacetime_dist,
                     truncated_infinite_rule, unit_sphere_area)
from .series import (BesselRBFBasis, Expansion, basis_eval, basis_matrix, coeff_alpha, coeff_alpha0, default_rule,
                     expand, gram,
                     l2_error, project_oracle, reconstruct, reconstruct_zeroth)
from .transform import (CalibrationResult, CenterGrid, SpectralGrid, TransformData, calibrate_constant,
                        center_grid, forward_bessel, forward_grid, inverse_bessel, inverse_biorthogonal,
                        kernel_g, roundtrip_report, spectral_grid)
from .spacetime import (SpaceTimeBasis, SpaceTimeExpansion, st_basis_eval, st_basis_matrix, st_coeff_alpha,
                        st_coeff_alpha0, st_expand, st_gram, st_project_oracle, st_reconstruct)
from . import fields
