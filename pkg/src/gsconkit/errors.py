"""Exception hierarchy.

``InputError`` subclasses signal bad inputs or violated preconditions
(CLI exit code 2). ``CheckFailed`` subclasses signal that a verified
property did not hold (CLI exit code 1).
"""


class GsconkitError(Exception):
    exit_code = 2


class InputError(GsconkitError, ValueError):
    exit_code = 2


class CheckFailed(GsconkitError):
    exit_code = 1


def _make(name, base, doc):
    return type(name, (base,), {"__doc__": doc})


# qcore
IndexOutOfRange = _make("IndexOutOfRange", InputError, "Qubit or row index outside the register.")
DenseLimitExceeded = _make("DenseLimitExceeded", InputError, "Dense operator would exceed the configured qubit cap.")
NonFinite = _make("NonFinite", InputError, "NaN or infinite entries.")
DimensionMismatch = _make("DimensionMismatch", InputError, "Operands have incompatible sizes.")
NotHermitian = _make("NotHermitian", InputError, "Operator is not Hermitian within tolerance.")
NotUnitary = _make("NotUnitary", InputError, "Gate matrix is not unitary within tolerance.")
InvalidState = _make("InvalidState", InputError, "Amplitude vector is not a unit vector of length 2**n.")
InvalidWord = _make("InvalidWord", InputError, "Malformed Pauli word.")
NoConvergence = _make("NoConvergence", CheckFailed, "Iterative solver did not converge.")

# decomp
NotSplittable = _make("NotSplittable", InputError, "Pauli word is already 2-local.")
PulseOutOfRange = _make("PulseOutOfRange", InputError, "Pulse time outside the admissible range.")
NoSolution = _make("NoSolution", CheckFailed, "Depth-4 root finding failed.")
NormBudgetExceeded = _make("NormBudgetExceeded", InputError, "Sum of term norms exceeds 1.")
NormTooLarge = _make("NormTooLarge", InputError, "Operator norm above the small-unitary bound.")
InvalidTerm = _make("InvalidTerm", InputError, "Term cannot be emitted as local gates.")

# pathfollow
DegeneratePair = _make("DegeneratePair", InputError, "States are nearly antipodal; subdivide first.")
SubdivisionLimit = _make("SubdivisionLimit", CheckFailed, "Adaptive subdivision hit its cap without meeting the target.")
EnergyPreconditionViolated = _make("EnergyPreconditionViolated", InputError, "Endpoint energy above threshold.")
NegativeEigenvalue = _make("NegativeEigenvalue", InputError, "Operator is not positive semidefinite.")
InvalidPath = _make("InvalidPath", InputError, "Path is not unit-norm or violates its Lipschitz constant.")

# gscon
LocalityViolation = _make("LocalityViolation", CheckFailed, "Gate acts on more qubits than allowed.")
LengthExceeded = _make("LengthExceeded", CheckFailed, "Sequence longer than the instance bound.")
BipartitionViolation = _make("BipartitionViolation", CheckFailed, "Gate straddles the bipartition.")
InvalidEndpoints = _make("InvalidEndpoints", InputError, "Endpoint does not satisfy the formula.")
InvalidInstance = _make("InvalidInstance", InputError, "Instance invariants do not hold.")
EpsilonOutOfRange = _make("EpsilonOutOfRange", InputError, "epsilon must lie in [0, 1/2).")
NotKOrthogonal = _make("NotKOrthogonal", InputError, "Subspaces are connected by a k-local operator.")
EndpointTooFar = _make("EndpointTooFar", InputError, "Sequence does not reach the target within epsilon.")

# flux
InvalidCircuit = _make("InvalidCircuit", InputError, "Streaming circuit violates its phase pattern.")
WeightNonPositive = _make("WeightNonPositive", InputError, "Hamiltonian weights must be positive.")
ProofLengthMismatch = _make("ProofLengthMismatch", InputError, "Proof length differs from the number of streamed bits.")
NegativeCoefficient = _make("NegativeCoefficient", InputError, "Coefficients must be nonnegative.")
ZeroCoefficients = _make("ZeroCoefficients", InputError, "Both coefficients are zero.")
InvalidPattern = _make("InvalidPattern", InputError, "Circuit lacks the proof steps this state needs.")
HypothesisViolated = _make("HypothesisViolated", InputError, "Lower bound hypothesis does not hold.")
EnergyHypothesisViolated = _make("EnergyHypothesisViolated", InputError, "State energy above the hypothesis.")
ZeroWeight = _make("ZeroWeight", InputError, "Total term weight is zero.")
InvalidThresholds = _make("InvalidThresholds", InputError, "Completeness must exceed soundness.")


class TieAtStep(InputError):
    """a_t == b_t at a proof step; the input was not low energy."""

    def __init__(self, step, msg=None):
        self.step = step
        super().__init__(msg or f"a_t == b_t at proof step {step}")


# cli
UnknownCommand = _make("UnknownCommand", InputError, "Unknown subcommand.")
MalformedInput = _make("MalformedInput", InputError, "Input file could not be parsed.")
