"""Sparse simulation of controlled unitary gates on mixed-level qudit registers."""
from .circuit import (
    Circuit,
    SpanGate,
    WireRotation,
    WireSwap,
    apply_circuit,
    compile_circuit,
    embed,
    generalized_step,
    rotate_wires,
    step_gate,
    swap_wires,
)
from .cug import (
    Conditional,
    CugSpec,
    CugStats,
    UBlock,
    build_cug,
    build_cug_naive,
    build_cug_span,
    decomposition_terms,
    format_decomposition,
)
from .errors import (
    CircuitFileError,
    CugSimError,
    InvalidArgumentError,
    InvalidConditionalError,
    InvalidDimensionError,
    InvalidStateError,
    LevelMismatchError,
    NotUnitaryError,
    ResourceGuardError,
    ShapeError,
    SpanError,
    SpecError,
    WireIndexError,
)
from .fileformat import CircuitFile, parse_circuit, parse_cug_spec
from .gates import (
    gate_from_name,
    grover_g,
    hadamard,
    not_gate,
    phase_qubit,
    phase_qudit,
    projector,
    qft_gate,
    r_shift,
    swap_gate,
)
from .register import RegisterProfile
from .state import (
    MeasurementOutcome,
    StateVector,
    basis_state,
    equal_superposition,
    list_states,
    measure_all,
    measure_wire,
    parse_listing,
    register_marginal,
    wire_marginal,
)
from .tensor import SparseMatrix, add_scaled, identity, kron_all, mat_mul, mat_vec, unitarity_check

__version__ = "0.1.0"
