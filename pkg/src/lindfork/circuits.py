"""Gate-level synthesis: IR, one-qubit decompositions, controlled blocks,
the five-qubit forking circuit, and OpenQASM 2.0 emission.

Qubit index 0 is the leftmost (most significant) tensor factor everywhere,
matching the register order ancilla, environment, system, fork1, fork2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .errors import (
    NotSpecialUnitary,
    NotUnitary,
    UnloweredGate,
    ValidationError,
)
from .extreme import ExtremeChannelPair
from .numerics import require_hermitian

#: Rotations with |angle| below this are dropped during lowering.
ANGLE_EPS = 1e-14

ANCILLA, ENVIRONMENT, SYSTEM, FORK1, FORK2 = range(5)
FORKING_ROLES: Mapping[int, str] = {
    ANCILLA: "ancilla",
    ENVIRONMENT: "environment",
    SYSTEM: "system",
    FORK1: "fork1",
    FORK2: "fork2",
}

_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
_SWAP = np.eye(4, dtype=np.complex128)[[0, 2, 1, 3]]
HADAMARD = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2.0)

#: gate kind -> (total qubits, number of leading control qubits)
_KINDS: Mapping[str, tuple[int, int]] = {
    "x": (1, 0),
    "ry": (1, 0),
    "rz": (1, 0),
    "phase": (1, 0),
    "cnot": (2, 1),
    "ccnot": (3, 2),
    "cswap": (3, 1),
    "u1q": (1, 0),
}
_LOWERED_KINDS = frozenset({"x", "ry", "rz", "cnot", "ccnot"})


def rotation_y(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


def rotation_z(theta: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


@dataclass(frozen=True, eq=False)
class Gate:
    """One IR gate. ``qubits`` lists controls first, then targets; the first
    listed qubit is the most significant index of :meth:`local_unitary`."""

    kind: str
    qubits: tuple[int, ...]
    angle: float = 0.0
    matrix: np.ndarray | None = None
    on_zero: tuple[bool, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValidationError(f"unknown gate kind {self.kind!r}")
        arity, n_controls = _KINDS[self.kind]
        if len(self.qubits) != arity or len(set(self.qubits)) != arity:
            raise ValidationError(f"{self.kind} needs {arity} distinct qubits, got {self.qubits}")
        if not math.isfinite(self.angle):
            raise ValidationError("gate angle must be finite")
        if self.on_zero and len(self.on_zero) != n_controls:
            raise ValidationError("one on-zero flag per control qubit")
        if self.kind == "u1q":
            if self.matrix is None:
                raise ValidationError("u1q gate needs a matrix")
            object.__setattr__(self, "matrix", _require_unitary(self.matrix))

    @property
    def controls_on_zero(self) -> tuple[bool, ...]:
        return self.on_zero or (False,) * _KINDS[self.kind][1]

    def local_unitary(self) -> np.ndarray:
        """Dense matrix on the gate's own qubits, open controls included."""
        if self.kind == "x":
            return _X.copy()
        if self.kind == "ry":
            return rotation_y(self.angle)
        if self.kind == "rz":
            return rotation_z(self.angle)
        if self.kind == "phase":
            return np.exp(1j * self.angle) * np.eye(2, dtype=np.complex128)
        if self.kind == "u1q":
            return self.matrix.copy()
        body = {"cnot": _X, "ccnot": _X, "cswap": _SWAP}[self.kind]
        n_controls = _KINDS[self.kind][1]
        wants = tuple(0 if z else 1 for z in self.controls_on_zero)
        dim_body = body.shape[0]
        out = np.zeros((2**n_controls * dim_body,) * 2, dtype=np.complex128)
        for bits in range(2**n_controls):
            pattern = tuple((bits >> (n_controls - 1 - i)) & 1 for i in range(n_controls))
            blk = body if pattern == wants else np.eye(dim_body)
            sl = slice(bits * dim_body, (bits + 1) * dim_body)
            out[sl, sl] = blk
        return out


@dataclass(frozen=True, eq=False)
class CircuitIR:
    qubit_count: int
    roles: Mapping[int, str] = field(default_factory=dict)
    gates: tuple[Gate, ...] = ()

    def __post_init__(self) -> None:
        for g in self.gates:
            if any(q < 0 or q >= self.qubit_count for q in g.qubits):
                raise ValidationError(f"gate {g.kind} touches qubits {g.qubits} outside register")

    def lowered(self) -> "CircuitIR":
        out: list[Gate] = []
        for g in self.gates:
            out.extend(_lower_gate(g))
        return CircuitIR(self.qubit_count, self.roles, tuple(out))

    @property
    def is_lowered(self) -> bool:
        return all(g.kind in _LOWERED_KINDS and not any(g.controls_on_zero) for g in self.gates)


def _require_unitary(u: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    u = np.asarray(u, dtype=np.complex128)
    if u.shape != (2, 2) or np.abs(u.conj().T @ u - np.eye(2)).max() > tol:
        raise NotUnitary("matrix is not a 2x2 unitary within tolerance")
    return u.copy()


def zyz(u: np.ndarray) -> tuple[float, float, float, float]:
    """Angles (delta, alpha, theta, beta) with
    u = e^{i delta} Rz(alpha) Ry(theta) Rz(beta) and theta in [0, pi].

    Degenerate cases need no branching: when the relevant entry vanishes its
    phase reads as 0 and the reconstruction still holds.
    """
    u = _require_unitary(u)
    delta = 0.5 * np.angle(u[0, 0] * u[1, 1] - u[0, 1] * u[1, 0])
    v = np.exp(-1j * delta) * u
    theta = 2.0 * math.atan2(abs(v[1, 0]), abs(v[0, 0]))
    alpha = float(np.angle(v[1, 1]) + np.angle(v[1, 0]))
    beta = float(np.angle(v[1, 1]) - np.angle(v[1, 0]))
    return float(delta), alpha, float(theta), beta


def zyz_matrix(delta: float, alpha: float, theta: float, beta: float) -> np.ndarray:
    """Reconstruction companion to :func:`zyz`."""
    return np.exp(1j * delta) * (rotation_z(alpha) @ rotation_y(theta) @ rotation_z(beta))


def _rotations(pairs: Iterable[tuple[str, float]], qubit: int) -> list[Gate]:
    """Rotation gates in time order, dropping angles below ``ANGLE_EPS``."""
    return [Gate(kind, (qubit,), angle=a) for kind, a in pairs if abs(a) > ANGLE_EPS]


def controlled_su2(
    u: np.ndarray, control: int, target: int, control_on_zero: bool = False
) -> list[Gate]:
    """Controlled one-qubit gate from two CNOTs and single-qubit rotations.

    Splits u = A X B X C with A B C = 1, so the rotations cancel when the
    control is off. Open controls are realized by X-conjugation. Identity
    targets produce an empty sequence.
    """
    u = _require_unitary(u)
    if abs(np.linalg.det(u) - 1.0) > 1e-10:
        raise NotSpecialUnitary("controlled target must have determinant 1")
    if np.abs(u - np.eye(2)).max() < ANGLE_EPS:
        return []
    _, alpha, theta, beta = zyz(u)
    seq: list[Gate] = []
    seq += _rotations([("rz", (beta - alpha) / 2.0)], target)
    seq.append(Gate("cnot", (control, target)))
    seq += _rotations([("rz", -(alpha + beta) / 2.0), ("ry", -theta / 2.0)], target)
    seq.append(Gate("cnot", (control, target)))
    seq += _rotations([("ry", theta / 2.0), ("rz", alpha)], target)
    if control_on_zero:
        x = Gate("x", (control,))
        seq = [x, *seq, x]
    return seq


def synthesize_stinespring(
    pair: ExtremeChannelPair, which: int, env: int, sys: int
) -> list[Gate]:
    """Gate sequence for one of the pair's Stinespring dilations on (env, sys).

    The dilation factors into an inner rotation block sandwiched by two
    open CNOTs; the two inner open CNOTs cancel and are never emitted. The
    identity channel yields an empty sequence.
    """
    if which not in (1, 2):
        raise ValidationError("which must be 1 or 2")
    sign = 1.0 if which == 1 else -1.0
    phi1, phi2 = sign * pair.phi1, sign * pair.phi2
    u_a = rotation_z(phi1) @ rotation_y(2.0 * pair.alpha) @ rotation_z(phi1)
    u_b = rotation_z(phi2) @ rotation_y(2.0 * (np.pi / 2.0 - pair.beta)) @ rotation_z(-phi2)
    inner = controlled_su2(u_b, control=sys, target=env, control_on_zero=True)
    inner += controlled_su2(u_a, control=sys, target=env, control_on_zero=False)
    if not inner:
        return []
    flip = Gate("cnot", (env, sys), on_zero=(True,))
    return [flip, *inner, flip]


def forking_circuit(
    pair: ExtremeChannelPair, u_k: np.ndarray, ancilla_prep: bool = True
) -> CircuitIR:
    """Five-qubit circuit whose system marginal is the frame-conjugated
    canonical channel: an ancilla in |+> coherently routes the system
    through either dilation, and tracing everything but the system leaves
    the equal mixture of the two quasi-extreme channels.

    ``ancilla_prep=False`` omits the Hadamard for callers that inject the
    ancilla state directly (the density simulator does).
    """
    u_k = _require_unitary(u_k)
    gates: list[Gate] = []
    if ancilla_prep:
        gates.append(Gate("u1q", (ANCILLA,), matrix=HADAMARD))
    conjugated = np.abs(u_k - np.eye(2)).max() > ANGLE_EPS
    if conjugated:
        gates.append(Gate("u1q", (SYSTEM,), matrix=u_k))
    swaps = [
        Gate("cswap", (ANCILLA, ENVIRONMENT, FORK1)),
        Gate("cswap", (ANCILLA, SYSTEM, FORK2)),
    ]
    gates += swaps
    gates += synthesize_stinespring(pair, 1, ENVIRONMENT, SYSTEM)
    gates += synthesize_stinespring(pair, 2, FORK1, FORK2)
    gates += swaps
    if conjugated:
        gates.append(Gate("u1q", (SYSTEM,), matrix=u_k.conj().T))
    return CircuitIR(5, FORKING_ROLES, tuple(gates))


def unitary_from_hamiltonian(h: np.ndarray, s: float) -> np.ndarray:
    """exp(-i h s) up to global phase, evaluated analytically from the
    Pauli components of h (the traceful part only contributes phase)."""
    h = require_hermitian(h, what="Hamiltonian")
    sx = h[0, 1].real
    sy = -h[0, 1].imag
    sz = (h[0, 0].real - h[1, 1].real) / 2.0
    norm = math.hypot(sx, math.hypot(sy, sz))
    omega = norm * s
    if abs(omega) < ANGLE_EPS:
        return np.eye(2, dtype=np.complex128)
    axis = np.array([sx, sy, sz]) / norm
    w = math.cos(omega)
    xyz = math.sin(omega) * axis
    return np.array(
        [
            [w - 1j * xyz[2], -1j * xyz[0] - xyz[1]],
            [-1j * xyz[0] + xyz[1], w + 1j * xyz[2]],
        ]
    )


def hamiltonian_gate(h: np.ndarray, s: float, qubit: int = 0) -> list[Gate]:
    """Rotations realizing exp(-i h s) up to global phase; a zero or
    identity-proportional step emits nothing."""
    u = unitary_from_hamiltonian(h, s)
    if np.abs(u - np.eye(2)).max() < ANGLE_EPS:
        return []
    _, alpha, theta, beta = zyz(u)
    return _rotations([("rz", beta), ("ry", theta), ("rz", alpha)], qubit)


def _lower_gate(g: Gate) -> list[Gate]:
    flags = g.controls_on_zero
    wraps = [Gate("x", (q,)) for q, z in zip(g.qubits, flags) if z]
    if g.kind in ("x", "ry", "rz"):
        return [g]
    if g.kind == "phase":
        return []  # uncontrolled global phase: unobservable
    if g.kind == "u1q":
        _, alpha, theta, beta = zyz(g.matrix)
        return _rotations([("rz", beta), ("ry", theta), ("rz", alpha)], g.qubits[0])
    if g.kind == "cnot":
        core = [Gate("cnot", g.qubits)]
    elif g.kind == "ccnot":
        core = [Gate("ccnot", g.qubits)]
    elif g.kind == "cswap":
        ctrl, a, b = g.qubits
        core = [
            Gate("cnot", (b, a)),
            Gate("ccnot", (ctrl, a, b)),
            Gate("cnot", (b, a)),
        ]
    else:  # pragma: no cover - kinds are exhaustive
        raise UnloweredGate(g.kind)
    return [*wraps, *core, *wraps]


def embed_unitary(u: np.ndarray, qubits: tuple[int, ...], n: int) -> np.ndarray:
    """Expand a local gate matrix to the full 2^n register."""
    k = len(qubits)
    t = np.eye(1 << n, dtype=np.complex128).reshape((2,) * n + (1 << n,))
    t = np.tensordot(np.asarray(u, np.complex128).reshape((2,) * (2 * k)), t,
                     axes=[list(range(k, 2 * k)), list(qubits)])
    t = np.moveaxis(t, list(range(k)), list(qubits))
    return t.reshape(1 << n, 1 << n)


def circuit_unitary(circ: CircuitIR) -> np.ndarray:
    """Multiply the circuit out to one matrix (small registers only)."""
    m = np.eye(1 << circ.qubit_count, dtype=np.complex128)
    for g in circ.gates:
        m = embed_unitary(g.local_unitary(), g.qubits, circ.qubit_count) @ m
    return m


def gate_counts(circ: CircuitIR) -> dict[str, int]:
    """{"one_qubit", "cnot", "ccnot"} totals for a lowered circuit."""
    counts = {"one_qubit": 0, "cnot": 0, "ccnot": 0}
    for g in circ.gates:
        if g.kind in ("x", "ry", "rz") and not any(g.controls_on_zero):
            counts["one_qubit"] += 1
        elif g.kind in ("cnot", "ccnot") and not any(g.controls_on_zero):
            counts[g.kind] += 1
        else:
            raise UnloweredGate(f"{g.kind} gate in a circuit submitted for counting")
    return counts


def emit_qasm(circ: CircuitIR) -> str:
    """OpenQASM 2.0 text for a lowered circuit, angles at 17 significant digits."""
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg q[{circ.qubit_count}];"]
    for g in circ.gates:
        if any(g.controls_on_zero) or g.kind not in _LOWERED_KINDS:
            raise UnloweredGate(f"{g.kind} gate must be lowered before emission")
        if g.kind == "x":
            lines.append(f"x q[{g.qubits[0]}];")
        elif g.kind in ("ry", "rz"):
            lines.append(f"{g.kind}({g.angle:.17g}) q[{g.qubits[0]}];")
        elif g.kind == "cnot":
            lines.append(f"cx q[{g.qubits[0]}],q[{g.qubits[1]}];")
        else:
            lines.append(f"ccx q[{g.qubits[0]}],q[{g.qubits[1]}],q[{g.qubits[2]}];")
    return "\n".join(lines) + "\n"
