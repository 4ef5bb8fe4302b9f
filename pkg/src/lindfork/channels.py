"""Qubit state/channel representations and conversions.

Single-qubit channels are carried in four interchangeable forms — transfer
(affine/Pauli) matrix, Choi matrix, Kraus set, and the generator matrix that
produces the semigroup — plus the 1->1 superoperator norm estimator used by
the step planner.

Conventions, fixed once for the whole package:

* Pauli basis G_a = {1, sx, sy, sz}/sqrt(2); coordinates r_a = tr(G_a rho).
* Maximally entangled reference |Omega> = (|00> + |11>)/sqrt(2); the Choi
  matrix is (T (x) id)|Omega><Omega| and carries trace 1. (K (x) 1)|Omega>
  stacks K row-major over sqrt(2); all Choi<->Kraus code relies on this.
* The beta = 2*tau normalization appears only in the extreme-channel module.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NegativeTime, NotPSD, ValidationError
from .numerics import DEFAULT_TOL, hermitian_eig, matrix_exp, require_hermitian, validate_psd

SIGMA = np.array(
    [
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=np.complex128,
)
#: Normalized Pauli basis: orthonormal under tr(G_a^dag G_b) = delta_ab.
G_BASIS = SIGMA / np.sqrt(2.0)

#: |Omega> = (|00> + |11>)/sqrt(2) as a length-4 vector.
OMEGA = np.array([1.0, 0.0, 0.0, 1.0], dtype=np.complex128) / np.sqrt(2.0)

#: Kraus extraction drops Choi eigenvalues below this (numerical rank cut).
KRAUS_CUTOFF = 1e-12

_U23 = np.eye(4)[[0, 2, 1, 3]]  # permutation swapping basis states 1 and 2


def pauli_coords(m: np.ndarray) -> np.ndarray:
    """Coordinates of a 2x2 matrix in the normalized Pauli basis (complex)."""
    return np.einsum("aij,ji->a", G_BASIS, np.asarray(m, dtype=np.complex128))


def matrix_from_coords(r: np.ndarray) -> np.ndarray:
    """Inverse of :func:`pauli_coords`."""
    return np.einsum("a,aij->ij", np.asarray(r, dtype=np.complex128), G_BASIS)


def bloch_vector(rho: np.ndarray) -> np.ndarray:
    """(x, y, z) with rho = (1 + x sx + y sy + z sz)/2."""
    return np.real(np.einsum("aij,ji->a", SIGMA[1:], np.asarray(rho, dtype=np.complex128)))


def density_from_bloch(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return (SIGMA[0] + np.einsum("a,aij->ij", v, SIGMA[1:])) / 2.0


@dataclass(frozen=True)
class DensityMatrix:
    """2x2 state: Hermitian, unit trace, positive within tolerance."""

    matrix: np.ndarray
    tol: float = field(default=DEFAULT_TOL, compare=False)

    def __post_init__(self) -> None:
        m = require_hermitian(self.matrix, tol=self.tol * 1e2, what="density matrix")
        tr = complex(np.trace(m)).real
        if abs(tr - 1.0) > self.tol * 1e2:
            raise ValidationError(f"density matrix trace {tr} != 1")
        _, clamped = validate_psd(m, tol=self.tol)
        object.__setattr__(self, "matrix", clamped / np.trace(clamped).real)

    @property
    def bloch(self) -> np.ndarray:
        return bloch_vector(self.matrix)

    @classmethod
    def from_bloch(cls, v: np.ndarray, tol: float = DEFAULT_TOL) -> "DensityMatrix":
        v = np.asarray(v, dtype=float)
        r = float(np.linalg.norm(v))
        if r > 1.0 + tol * 1e2:
            raise ValidationError(f"Bloch vector norm {r} exceeds 1")
        return cls(density_from_bloch(np.clip(v, -1.0, 1.0) if r <= 1.0 else v / r), tol)


@dataclass(frozen=True)
class GeneratorMatrix:
    """4x4 real matrix of a GKSL generator in the G_a basis (first row 0)."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=float)
        if m.shape != (4, 4):
            raise ValidationError("generator matrix must be 4x4")
        top = float(np.abs(m[0]).max())
        if top > DEFAULT_TOL:
            raise ValidationError(f"generator first row not zero (max {top:.3e}); not trace-annihilating")
        object.__setattr__(self, "matrix", m.copy())


@dataclass(frozen=True)
class TransferMatrix:
    """4x4 real matrix of a trace-preserving map in the G_a basis."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=float)
        if m.shape != (4, 4):
            raise ValidationError("transfer matrix must be 4x4")
        defect = float(np.abs(m[0] - np.array([1.0, 0, 0, 0])).max())
        if defect > 1e-8:
            raise ValidationError(f"transfer matrix first row defect {defect:.3e}; map not trace preserving")
        object.__setattr__(self, "matrix", m.copy())

    def apply(self, rho: np.ndarray) -> np.ndarray:
        """Action on a 2x2 operator via Pauli coordinates."""
        return matrix_from_coords(self.matrix @ pauli_coords(rho))


@dataclass(frozen=True)
class ChoiMatrix:
    """4x4 Choi matrix, trace-1 normalization."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = require_hermitian(self.matrix, tol=1e-8, what="Choi matrix")
        tr = complex(np.trace(m)).real
        if abs(tr - 1.0) > 1e-8:
            raise ValidationError(f"Choi trace {tr} != 1")
        object.__setattr__(self, "matrix", m)


@dataclass(frozen=True)
class KrausSet:
    """Kraus operators of a channel; completeness sum K^dag K = 1 enforced."""

    operators: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        ops = tuple(np.asarray(k, dtype=np.complex128).copy() for k in self.operators)
        if not 1 <= len(ops) <= 4:
            raise ValidationError(f"KrausSet needs 1..4 operators, got {len(ops)}")
        total = sum(k.conj().T @ k for k in ops)
        defect = float(np.abs(total - np.eye(2)).max())
        if defect > 1e-9:
            raise ValidationError(f"Kraus completeness defect {defect:.3e}")
        object.__setattr__(self, "operators", ops)

    def apply(self, rho: np.ndarray) -> np.ndarray:
        rho = np.asarray(rho, dtype=np.complex128)
        return sum(k @ rho @ k.conj().T for k in self.operators)


def lindblad_action(h: np.ndarray, a: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """Generator applied to a 2x2 operator:

    L(rho) = -i[H, rho] + sum_ij A_ij (s_i rho s_j - {s_j s_i, rho}/2).
    """
    h = np.asarray(h, dtype=np.complex128)
    a = np.asarray(a, dtype=np.complex128)
    rho = np.asarray(rho, dtype=np.complex128)
    out = -1j * (h @ rho - rho @ h)
    for i in range(3):
        for j in range(3):
            if a[i, j] == 0:
                continue
            sj_si = SIGMA[j + 1] @ SIGMA[i + 1]
            out = out + a[i, j] * (
                SIGMA[i + 1] @ rho @ SIGMA[j + 1] - 0.5 * (sj_si @ rho + rho @ sj_si)
            )
    return out


def generator_matrix(h: np.ndarray, a: np.ndarray) -> GeneratorMatrix:
    """Matrix of the generator, L_ab = tr[G_a^dag L(G_b)]."""
    cols = np.empty((4, 4), dtype=np.complex128)
    for b in range(4):
        cols[:, b] = pauli_coords(lindblad_action(h, a, G_BASIS[b]))
    residue = float(np.abs(cols.imag).max())
    if residue > DEFAULT_TOL:
        raise ValidationError(f"generator matrix imaginary residue {residue:.3e}")
    return GeneratorMatrix(cols.real)


def transfer_from_generator(gen: GeneratorMatrix, t: float) -> TransferMatrix:
    """T_t = exp(t L)."""
    if t < 0:
        raise NegativeTime(f"time {t} < 0")
    return TransferMatrix(matrix_exp(gen.matrix, t).real)


def choi_from_transfer(tm: TransferMatrix) -> ChoiMatrix:
    """tau = (1/4) sum_ij T_ij sigma_i (x) sigma_j^T."""
    tau = np.zeros((4, 4), dtype=np.complex128)
    for i in range(4):
        for j in range(4):
            tau += tm.matrix[i, j] * np.kron(SIGMA[i], SIGMA[j].T)
    return ChoiMatrix(tau / 4.0)


def transfer_from_choi(cm: ChoiMatrix) -> TransferMatrix:
    """Inverse of :func:`choi_from_transfer`: T_ij = tr[(sigma_i (x) sigma_j^T) tau]."""
    t = np.empty((4, 4), dtype=np.complex128)
    for i in range(4):
        for j in range(4):
            t[i, j] = np.trace(np.kron(SIGMA[i], SIGMA[j].T) @ cm.matrix)
    residue = float(np.abs(t.imag).max())
    if residue > 1e-9:
        raise ValidationError(f"transfer reconstruction imaginary residue {residue:.3e}")
    return TransferMatrix(t.real)


def choi_from_kraus(ks: KrausSet) -> ChoiMatrix:
    """tau = sum_j v_j v_j^dag with v_j = (K_j (x) 1)|Omega> (row-major stack)."""
    tau = np.zeros((4, 4), dtype=np.complex128)
    for k in ks.operators:
        v = k.reshape(-1) / np.sqrt(2.0)
        tau += np.outer(v, v.conj())
    return ChoiMatrix(tau)


def kraus_from_choi(cm: ChoiMatrix, cutoff: float = KRAUS_CUTOFF) -> KrausSet:
    """Spectral Kraus extraction; eigenvalues below ``cutoff`` are dropped."""
    _, clamped = validate_psd(cm.matrix, tol=DEFAULT_TOL)
    eig = hermitian_eig(clamped)
    ops = []
    for lam, vec in zip(eig.eigenvalues, eig.eigenvectors.T):
        if lam < cutoff:
            continue
        ops.append(np.sqrt(2.0 * lam) * vec.reshape(2, 2))
    if not ops:
        raise NotPSD("Choi matrix has no eigenvalue above the Kraus cutoff")
    return KrausSet(tuple(ops))


def transfer_from_kraus(ks: KrausSet) -> TransferMatrix:
    t = np.empty((4, 4), dtype=np.complex128)
    for b in range(4):
        out = ks.apply(G_BASIS[b])
        t[:, b] = pauli_coords(out)
    residue = float(np.abs(t.imag).max())
    if residue > 1e-9:
        raise ValidationError(f"transfer-from-Kraus imaginary residue {residue:.3e}")
    return TransferMatrix(t.real)


def dual_beta(beta: np.ndarray) -> np.ndarray:
    """beta matrix of the dual channel: (U23^dag beta U23)^*; an involution."""
    beta = np.asarray(beta, dtype=np.complex128)
    return (_U23.T @ beta @ _U23).conj()


# --------------------------------------------------------------------------
# 1->1 superoperator norm estimate
# --------------------------------------------------------------------------

_GRID_PER_SPHERE = 64  # 8 inclinations x 8 azimuths per Bloch sphere
_REFINE_ITERS = 50


def _rank_one_values(s: np.ndarray, psi: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """||S(|psi><phi|)||_1 for every (psi, phi) pair; inputs shape (..., 2)."""
    p0, p1 = psi[..., 0][:, None], psi[..., 1][:, None]
    f0, f1 = phi[..., 0][None, :].conj(), phi[..., 1][None, :].conj()
    x = np.stack(
        [
            f0 * p0 + f1 * p1,
            f0 * p1 + f1 * p0,
            -1j * f0 * p1 + 1j * f1 * p0,
            f0 * p0 - f1 * p1,
        ],
        axis=-1,
    ) / np.sqrt(2.0)
    y = x @ s.T
    m00 = (y[..., 0] + y[..., 3]) / np.sqrt(2.0)
    m11 = (y[..., 0] - y[..., 3]) / np.sqrt(2.0)
    m01 = (y[..., 1] - 1j * y[..., 2]) / np.sqrt(2.0)
    m10 = (y[..., 1] + 1j * y[..., 2]) / np.sqrt(2.0)
    fro2 = abs(m00) ** 2 + abs(m01) ** 2 + abs(m10) ** 2 + abs(m11) ** 2
    det = np.abs(m00 * m11 - m01 * m10)
    # Trace norm of a 2x2 matrix: sqrt(||M||_F^2 + 2|det M|).
    return np.sqrt(fro2 + 2.0 * det)


def _spinor(u: np.ndarray, mu: np.ndarray) -> np.ndarray:
    return np.stack([np.cos(u / 2.0), np.exp(1j * mu) * np.sin(u / 2.0)], axis=-1)


def one_one_norm(s: np.ndarray) -> float:
    """Estimate of sup_{||X||_1 = 1} ||S(X)||_1 for a 4x4 real superoperator.

    The supremum of this convex functional is attained at extreme points of
    the trace-norm unit ball, i.e. rank-one X = |psi><phi|, so the search
    space is two Bloch spheres: a 64x64 joint grid (each sphere sampled 8x8)
    followed by 50 pattern-search refinement iterations. Documented as a
    high-accuracy estimate, never exceeding the true norm.
    """
    s = np.asarray(s, dtype=float)
    u_lin = (np.arange(8) + 0.5) * (np.pi / 8.0)
    mu_lin = np.arange(8) * (np.pi / 4.0)
    uu, mm = np.meshgrid(u_lin, mu_lin, indexing="ij")
    pts = _spinor(uu.ravel(), mm.ravel())  # 64 points per sphere
    vals = _rank_one_values(s, pts, pts)  # 64x64 joint grid
    flat = int(np.argmax(vals))
    i, j = divmod(flat, pts.shape[0])
    angles = np.array(
        [uu.ravel()[i], mm.ravel()[i], uu.ravel()[j], mm.ravel()[j]], dtype=float
    )

    def value_at(a: np.ndarray) -> float:
        psi = _spinor(a[0:1], a[1:2])
        phi = _spinor(a[2:3], a[3:4])
        return float(_rank_one_values(s, psi, phi)[0, 0])

    best = value_at(angles)
    step = np.pi / 8.0
    for _ in range(_REFINE_ITERS):
        improved = False
        for axis in range(4):
            for sign in (1.0, -1.0):
                cand = angles.copy()
                cand[axis] += sign * step
                v = value_at(cand)
                if v > best:
                    best, angles, improved = v, cand, True
        if not improved:
            step /= 2.0
    return best
