"""Dense density-matrix execution of the synthesized circuits, plus the
Runge-Kutta master-equation oracle the results are compared against.

States are immutable values; every operation returns a new one. Registers
are small (five qubits at most), so everything is exact dense algebra.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as kernels
from .channels import DensityMatrix, bloch_vector, generator_matrix, matrix_from_coords, pauli_coords
from .circuits import Gate, forking_circuit, unitary_from_hamiltonian
from .decompose import DecomposedGenerator, GeneratorSpec, decompose
from .errors import EmptyKeepSet, IndexOutOfRange, ValidationError
from .extreme import canonical_params, extreme_pair
from .trotter import StepFactor, TrotterPlan

_DURATION_EPS = 1e-12
_ZERO = np.array([1.0, 0.0], dtype=np.complex128)
_PLUS = np.array([1.0, 1.0], dtype=np.complex128) / np.sqrt(2.0)


@dataclass(frozen=True, eq=False)
class DensityState:
    """Multi-qubit density matrix; qubit 0 is the most significant index."""

    n: int
    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=np.complex128)
        dim = 1 << self.n
        if m.shape != (dim, dim):
            raise ValidationError(f"state for {self.n} qubits must be {dim}x{dim}")
        tr = complex(np.trace(m))
        if abs(tr.real - 1.0) > 1e-9 or abs(tr.imag) > 1e-9:
            raise ValidationError(f"state trace {tr} != 1")
        if np.abs(m - m.conj().T).max() > 1e-9:
            raise ValidationError("state is not Hermitian within 1e-9")
        object.__setattr__(self, "matrix", m.copy())


def product_state(*factors: np.ndarray) -> DensityState:
    """Product density matrix from a mix of pure vectors and 2x2 matrices."""
    full = np.array([[1.0]], dtype=np.complex128)
    n = 0
    for f in factors:
        f = np.asarray(f, dtype=np.complex128)
        if f.ndim == 1:
            f = f / np.linalg.norm(f)
            f = np.outer(f, f.conj())
        full = np.kron(full, f)
        n += 1
    return DensityState(n, full)


def apply_gate(state: DensityState, g: Gate) -> DensityState:
    if any(q < 0 or q >= state.n for q in g.qubits):
        raise IndexOutOfRange(f"gate {g.kind} on {g.qubits} exceeds {state.n} qubits")
    out = kernels.apply_unitary(state.matrix, g.local_unitary(), list(g.qubits), state.n)
    return DensityState(state.n, out)


def partial_trace(state: DensityState, keep) -> DensityState:
    keep = sorted({int(q) for q in keep})
    if not keep:
        raise EmptyKeepSet("partial trace must keep at least one qubit")
    if keep[0] < 0 or keep[-1] >= state.n:
        raise IndexOutOfRange(f"keep set {keep} exceeds {state.n} qubits")
    out = kernels.partial_trace_keep(state.matrix, keep, state.n)
    return DensityState(len(keep), out)


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    """(1/2)||rho - sigma||_1 for 2x2 inputs, via the closed-form trace norm."""
    m = np.asarray(rho, np.complex128) - np.asarray(sigma, np.complex128)
    fro2 = float(np.sum(np.abs(m) ** 2))
    det = abs(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])
    return 0.5 * math.sqrt(fro2 + 2.0 * det)


def run_step(
    rho_sys: DensityMatrix,
    factor: StepFactor,
    dec: DecomposedGenerator,
    fork1: np.ndarray | None = None,
    fork2: np.ndarray | None = None,
) -> DensityMatrix:
    """Execute one product factor on the system state.

    k = 0 conjugates by the Hamiltonian step unitary. k >= 1 assembles
    ancilla |+>, a fresh environment |0>, the system, and two fork registers
    (|0> unless overridden), runs the forking circuit for the term's channel
    at the factor's duration, and traces back down to the system. Auxiliary
    registers are new every call, so nothing leaks between steps.
    """
    if factor.duration < _DURATION_EPS:
        return rho_sys
    if factor.k == 0:
        u = unitary_from_hamiltonian(dec.hamiltonian, factor.duration)
        return DensityMatrix(u @ rho_sys.matrix @ u.conj().T)

    term = next((t for t in dec.terms if t.k == factor.k), None)
    if term is None:
        raise ValidationError(f"plan factor k={factor.k} has no matching term")
    pair = extreme_pair(canonical_params(term.theta, factor.duration))
    circ = forking_circuit(pair, term.lift, ancilla_prep=False)
    state = product_state(
        _PLUS,
        _ZERO,
        rho_sys.matrix,
        _ZERO if fork1 is None else fork1,
        _ZERO if fork2 is None else fork2,
    )
    for g in circ.gates:
        state = apply_gate(state, g)
    reduced = partial_trace(state, [2])
    return DensityMatrix(reduced.matrix)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Sampled evolution: (time, Bloch vector, trace distance to oracle)."""

    times: np.ndarray
    bloch: np.ndarray  # shape (len(times), 3)
    oracle_distance: np.ndarray

    def __post_init__(self) -> None:
        t = np.asarray(self.times, dtype=float)
        b = np.asarray(self.bloch, dtype=float)
        d = np.asarray(self.oracle_distance, dtype=float)
        if not (len(t) == b.shape[0] == len(d)) or b.shape[1:] != (3,):
            raise ValidationError("trajectory arrays misaligned")
        if np.any(np.diff(t) <= 0):
            raise ValidationError("trajectory times must strictly increase")
        if np.any(np.linalg.norm(b, axis=1) > 1.0 + 1e-8):
            raise ValidationError("Bloch vector left the unit ball")
        for name, arr in (("times", t), ("bloch", b), ("oracle_distance", d)):
            object.__setattr__(self, name, arr.copy())

    def to_csv(self) -> str:
        lines = ["t,bloch_x,bloch_y,bloch_z,oracle_trace_distance"]
        for t, (x, y, z), d in zip(self.times, self.bloch, self.oracle_distance):
            lines.append(f"{t:.17g},{x:.17g},{y:.17g},{z:.17g},{d:.17g}")
        return "\n".join(lines) + "\n"


def ode_oracle(
    gspec: GeneratorSpec, rho0: DensityMatrix, t: float, steps: int | None = None
) -> DensityMatrix:
    """Classic RK4 on the Pauli-coordinate form of the master equation.

    The default step count keeps h^4 well under 1e-10: h = 1e-3 * min(1,
    1/||L||), shrinking with the generator's scale so stiff inputs stay
    accurate.
    """
    gen = generator_matrix(gspec.hamiltonian, gspec.gks_matrix).matrix
    if t == 0:
        return rho0
    if steps is None:
        scale = float(np.linalg.norm(gen, 2))
        h_target = 1e-3 * min(1.0, 1.0 / scale) if scale > 0 else t
        steps = max(1, math.ceil(t / h_target))
    if steps < 1:
        raise ValidationError("RK4 needs at least one step")
    h = t / steps
    r = pauli_coords(rho0.matrix).real
    for _ in range(steps):
        k1 = gen @ r
        k2 = gen @ (r + 0.5 * h * k1)
        k3 = gen @ (r + 0.5 * h * k2)
        k4 = gen @ (r + h * k3)
        r = r + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return DensityMatrix(matrix_from_coords(r))


def run_trajectory(
    gspec: GeneratorSpec, p: TrotterPlan, rho0: DensityMatrix, samples: int = 10
) -> Trajectory:
    """Run the full plan, sampling at block boundaries nearest to an even
    time grid; every sample also records the distance to the RK4 oracle."""
    if samples < 2:
        raise ValidationError("need at least two samples (endpoints)")
    dec = decompose(gspec)
    n = p.n_steps
    marks = sorted({round(i * n / (samples - 1)) for i in range(samples)})

    times, blochs, dists = [], [], []
    state = rho0

    def record(block_idx: int) -> None:
        t_here = block_idx * p.tau
        oracle = ode_oracle(gspec, rho0, t_here)
        times.append(t_here)
        blochs.append(bloch_vector(state.matrix))
        dists.append(trace_distance(state.matrix, oracle.matrix))

    record(0)
    if p.tau <= 0.0:  # zero-time plan: a single sample is all that exists
        return Trajectory(np.array(times), np.array(blochs), np.array(dists))
    for block in range(1, n + 1):
        for factor in p.block:
            state = run_step(state, factor, dec)
        if block in marks:
            record(block)
    return Trajectory(np.array(times), np.array(blochs), np.array(dists))
