"""Static two-player quantum games.

States are density matrices, strategies are physical operations carried as
Kraus sets or chi matrices over the matrix-unit basis, payoffs come from a
referee's measurement folded into Hermitian payoff operators, and expected
payoffs are contractions of rank-4 payoff tensors with the two players' chi
matrices.  Includes a certified best-response solver over the full strategy
set, epsilon-Nash verification, and a fully reproducible built-in quantized
prisoner's dilemma.
"""

from .equilibrium import (
    BestResponseResult,
    NashReport,
    ResponseProblem,
    SolverOptions,
    best_response,
    response_problem,
    response_value,
    unitary_oracle,
    verify_nash,
)
from .errors import (
    CompletenessViolation,
    CrossCheckFailure,
    DimensionMismatch,
    FixtureCorrupt,
    InconsistentMeasurement,
    InfeasibleProjection,
    LengthMismatch,
    NoConvergence,
    NonRealPayoff,
    NotHermitian,
    NotInOmega,
    NotPositive,
    ParseError,
    QGameError,
    TraceConditionViolation,
    TraceNotOne,
    UnsupportedDimension,
    ValidationError,
)
from .game import (
    ClassicalBimatrix,
    PayoffTensor,
    QuantumGame,
    SimulationResult,
    build_game,
    classical_reduction,
    payoff_contract,
    payoff_direct,
    payoff_operator,
    payoff_tensor_general,
    payoff_tensor_matrix_unit,
    simulate_play,
)
from .games_builtin import (
    NamedGame,
    ewl_equilibrium_strategies,
    ewl_prisoners_dilemma,
    ewl_referee_measurement,
    figure1_reference_tensors,
)
from .linalg import hermitian_eigen, is_psd, kron, matrix_unit
from .quantum import (
    ChiMatrix,
    DensityMatrix,
    KrausChannel,
    Povm,
    apply_channel,
    apply_chi,
    apply_product_channel,
    chi_to_kraus,
    identity_channel,
    identity_chi,
    kraus_to_chi,
    maximally_mixing_chi,
    measure_probs,
    sample_outcome,
    shift_channel,
    validate_chi,
    validate_density,
    validate_kraus,
    validate_povm,
)

__version__ = "0.1.0"
