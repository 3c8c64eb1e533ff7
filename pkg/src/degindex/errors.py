"""Exception hierarchy.

Every error that corresponds to a violated precondition carries the name of
that precondition in ``precondition`` so front ends can report it verbatim.
"""


class DegindexError(Exception):
    precondition: str | None = None


class ValidationError(DegindexError):
    """Problem data violates a structural invariant."""

    precondition = "problem-valid"

    def __init__(self, violations):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class PropagationBlowupError(DegindexError):
    """Non-finite values encountered while integrating the fundamental system."""

    precondition = "propagation-finite"

    def __init__(self, x):
        self.x = float(x)
        super().__init__(f"non-finite fundamental solution near x = {self.x:.6g}")


class BoundaryZeroError(DegindexError):
    """The determinant map vanishes (numerically) on the contour: 0 in rho(boundary)."""

    precondition = "0 not in rho(boundary)"


class NonConvergenceError(DegindexError):
    """Adaptive winding failed to settle within the refinement budget."""

    precondition = "winding-converged"


class DegenerateOperatorError(DegindexError):
    """An eigenvalue sits within the gap tolerance of the imaginary axis."""

    precondition = "operator-nondegenerate"


class EndpointDegenerateError(DegenerateOperatorError):
    precondition = "path-endpoints-hyperbolic"


class MatchingAmbiguityError(DegindexError):
    """Eigenvalue continuation could not be disambiguated at the finest step."""

    precondition = "eigenvalue-matching-resolvable"


class TuringConditionError(DegindexError):
    precondition = "turing-conditions"


class DegenerateThresholdError(DegindexError):
    precondition = "thresholds-nondegenerate"


class NotAConjugatePointError(DegindexError):
    precondition = "x0-is-conjugate-point"


class DegenerateLinearizationError(DegindexError):
    precondition = "linearization-nondegenerate"


class CrossCheckError(DegindexError):
    """Two independent routes to the same integer disagreed."""

    precondition = "cross-check-consistent"

    def __init__(self, message, **values):
        self.values = values
        detail = ", ".join(f"{k}={v}" for k, v in values.items())
        super().__init__(f"{message} ({detail})" if detail else message)
