"""curvlab: numerical checks of curvature integral identities on hypersurfaces.

The package computes higher-order mean curvature data on closed
hypersurfaces in warped-product ambient spaces and verifies, by
quadrature and pointwise evaluation, the classical and weighted
Minkowski-type integral identities, the Heintze-Karcher-type
mean-curvature gap, the Newton-Maclaurin inequality chain, the thin-torus
counterexamples to radial rigidity without monotonicity, and the soliton
equation of weighted generalized inverse curvature flows.
"""

from . import ambient, radial, report, rigidity, surfaces, symfun, verify
from .ambient import (ConditionReport, RicciCoefficients, WarpedSpace,
                      check_conditions, make_space, potential, ricci_coeffs)
from .errors import (ConstructionError, CurvlabError, DomainError,
                     HypothesisViolation, SamplingError)
from .radial import RadialFunction, WeightFamily, from_expression
from .rigidity import (SolitonSpec, radial_condition_residual,
                       ratio_condition_residual, soliton_proof_chain,
                       soliton_residual)
from .surfaces import (SurfaceCloud, SurfaceSpec, build_surface,
                       elliptic_point_check, star_shapedness, torus_profiles)
from .symfun import (garding_sample, maclaurin_ratio_gap, newton_spectrum,
                     normalized_h, restricted_h, sigma)
from .verify import (IdentityResidual, brendle_gap, classical_hm_residual,
                     divergence_theorem_check, weighted_hm_residual,
                     xi_ric_sign_check)

__version__ = "0.1.0"
