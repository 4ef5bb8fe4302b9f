"""Single-qubit Markovian evolutions compiled into forking quantum circuits.

The pipeline: split a dissipation matrix into weighted rank-one constituents,
rotate each into a one-parameter canonical family, realize every canonical
channel as an even mixture of two quasi-extreme channels via their Stinespring
dilations, and schedule the constituents with a second-order product formula.
"""

from ._kernels import BACKEND, available_backends
from .channels import (
    ChoiMatrix,
    DensityMatrix,
    GeneratorMatrix,
    KrausSet,
    TransferMatrix,
    bloch_vector,
    choi_from_kraus,
    choi_from_transfer,
    density_from_bloch,
    generator_matrix,
    kraus_from_choi,
    lindblad_action,
    one_one_norm,
    transfer_from_choi,
    transfer_from_generator,
    transfer_from_kraus,
)
from .circuits import (
    CircuitIR,
    Gate,
    circuit_unitary,
    controlled_su2,
    emit_qasm,
    forking_circuit,
    gate_counts,
    hamiltonian_gate,
    synthesize_stinespring,
    zyz,
    zyz_matrix,
)
from .decompose import (
    ConstituentTerm,
    DecomposedGenerator,
    GeneratorSpec,
    canonical_gks,
    canonical_vector,
    canonicalize_vector,
    decompose,
    lift_so3_to_su2,
)
from .errors import (
    BadEpsilon,
    ConfigError,
    DomainError,
    LindforkError,
    NegativeTime,
    NonHermitianInput,
    NotPSD,
    NotSO3,
    NotSpecialUnitary,
    NotUnitary,
    ValidationError,
)
from .extreme import (
    CanonicalChannelParams,
    ExtremeChannelPair,
    beta_blocks,
    canonical_choi,
    canonical_params,
    canonical_transfer,
    contraction_matrix,
    extreme_pair,
)
from .simulator import (
    DensityState,
    Trajectory,
    ode_oracle,
    partial_trace,
    product_state,
    run_step,
    run_trajectory,
    trace_distance,
)
from .trotter import StepFactor, TrotterPlan, error_bound, plan, reference_product

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BadEpsilon",
    "CanonicalChannelParams",
    "ChoiMatrix",
    "CircuitIR",
    "ConfigError",
    "ConstituentTerm",
    "DecomposedGenerator",
    "DensityMatrix",
    "DensityState",
    "DomainError",
    "ExtremeChannelPair",
    "Gate",
    "GeneratorMatrix",
    "GeneratorSpec",
    "KrausSet",
    "LindforkError",
    "NegativeTime",
    "NonHermitianInput",
    "NotPSD",
    "NotSO3",
    "NotSpecialUnitary",
    "NotUnitary",
    "StepFactor",
    "Trajectory",
    "TransferMatrix",
    "TrotterPlan",
    "ValidationError",
    "available_backends",
    "beta_blocks",
    "bloch_vector",
    "canonical_choi",
    "canonical_gks",
    "canonical_params",
    "canonical_transfer",
    "canonical_vector",
    "canonicalize_vector",
    "choi_from_kraus",
    "choi_from_transfer",
    "circuit_unitary",
    "contraction_matrix",
    "controlled_su2",
    "decompose",
    "density_from_bloch",
    "emit_qasm",
    "error_bound",
    "extreme_pair",
    "forking_circuit",
    "gate_counts",
    "generator_matrix",
    "hamiltonian_gate",
    "kraus_from_choi",
    "lift_so3_to_su2",
    "lindblad_action",
    "ode_oracle",
    "one_one_norm",
    "partial_trace",
    "plan",
    "product_state",
    "reference_product",
    "run_step",
    "run_trajectory",
    "synthesize_stinespring",
    "trace_distance",
    "transfer_from_choi",
    "transfer_from_generator",
    "transfer_from_kraus",
    "zyz",
    "zyz_matrix",
]
