"""degindex: degree-theoretic eigenvalue counting for vector Sturm-Liouville
operators.

The central object is the family A_z u = -(P u' + Q u)' + Q^T u' + (S + C_z) u
on (0, length) with C_z = C0 + t K Id + i s Id, z = t + i s.  The package
computes the Brouwer degree of the boundary-determinant map over a rectangle,
the Morse index via a strip winding of det G_{is}(x), closed forms for planar
constant-coefficient problems, and an independent finite-difference spectral
oracle for cross-checking.
"""

from .analytic import (PlanarConstantProblem, char_residual, det_g_analytic,
                       lambda_pm, lambda_pm_linearization, local_degree_sign,
                       nilpotent_invariance_check)
from .boundary import (DeterminantSample, boundary_matrix,
                       dirichlet_consistency_check, logdet_sample, rho,
                       write_samples_csv)
from .degree import (BoundaryTrace, DegreeResult, degree_index, localize_zeros,
                     winding, winding_of_complex_map)
from .errors import (BoundaryZeroError, CrossCheckError, DegenerateLinearizationError,
                     DegenerateOperatorError, DegenerateThresholdError, DegindexError,
                     EndpointDegenerateError, MatchingAmbiguityError,
                     NonConvergenceError, NotAConjugatePointError,
                     PropagationBlowupError, TuringConditionError, ValidationError)
from .fundamental import (FundamentalSolution, fundamental_at, jb_matrices,
                          liouville_defect, phi_entire, propagate)
from .morse import (ConjugatePoint, ConjugateReport, choose_delta,
                    local_degree_at, morse_via_degree, scan_conjugate_points,
                    strip_winding)
from .oracle import (CrossingEvent, CrossingLedger, default_grid_size,
                     discretize, eigenvalues, morse_index, spectral_flow)
from .problem import (BoundaryCondition, CoefficientField, ProblemSpec,
                      Rectangle, ValidationReport, constant_spec,
                      default_rectangle, default_strip_height, load_problem,
                      save_problem, spec_from_dict, spec_to_dict, validate)
from .rd import (ConjugateSets, IndexAgreementReport, TuringReport,
                 conjugate_sets, count_negative_eigenvalues,
                 degree_equals_negative_count, local_degree_table, require_turing,
                 sample_turing_problem, turing_report)

__version__ = "0.1.0"


def bundled_problem(name: str) -> ProblemSpec:
    """Load one of the packaged example problems by name (without .json)."""
    from importlib import resources

    path = resources.files("degindex").joinpath("problems", f"{name}.json")
    with resources.as_file(path) as p:
        return load_problem(p)[0]
