"""Dense statevector simulation, the phase estimation / Grover / counting
stack built on it, and quantum dictionaries that entangle a key register
with integer values."""
__version__ = "0.1.0"

from .errors import InvalidArgument
from .kernels import BACKEND, available_backends
from .state import (
    MAX_QUBITS,
    OutcomeHistogram,
    PairTransform,
    QuantumState,
    Register,
    RegisterLayout,
    apply_pair_transform,
    marginal,
    new_state,
    probabilities,
    sample,
    sample_histogram,
)
from .circuits import Circuit, Gate, GateKind, qft_circuit, run, unitary_matrix
from .algorithms import (
    CountingResult,
    OracleSpec,
    PhaseEstimationConfig,
    amplitude_amplify,
    build_oracle,
    estimate_amplitude,
    grover_search,
    phase_estimation,
    quantum_count,
)
from .qdict import (
    CompleteTable,
    DictionarySpec,
    PartialTable,
    Polynomial,
    count_value_eq,
    count_value_lt,
    encode,
    lookup,
    qubo_minimize,
)
from .render import render_complex_histogram

__all__ = [
    "__version__",
    "InvalidArgument",
    "BACKEND",
    "available_backends",
    "MAX_QUBITS",
    "OutcomeHistogram",
    "PairTransform",
    "QuantumState",
    "Register",
    "RegisterLayout",
    "apply_pair_transform",
    "marginal",
    "new_state",
    "probabilities",
    "sample",
    "sample_histogram",
    "Circuit",
    "Gate",
    "GateKind",
    "qft_circuit",
    "run",
    "unitary_matrix",
    "CountingResult",
    "OracleSpec",
    "PhaseEstimationConfig",
    "amplitude_amplify",
    "build_oracle",
    "estimate_amplitude",
    "grover_search",
    "phase_estimation",
    "quantum_count",
    "CompleteTable",
    "DictionarySpec",
    "PartialTable",
    "Polynomial",
    "count_value_eq",
    "count_value_lt",
    "encode",
    "lookup",
    "qubo_minimize",
    "render_complex_histogram",
]
