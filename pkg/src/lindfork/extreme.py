"""Canonical one-axis channel at finite time, split into two quasi-extreme parts.

For the canonical dissipator with angle theta run for time s, the transfer
matrix has a closed form. Its Choi matrix is an equal mixture of two rank-two
("quasi-extreme") channels whose Kraus pairs and Stinespring dilations are
explicit in the parameters below — this is what the circuit layer consumes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import ChoiMatrix, KrausSet, TransferMatrix, choi_from_kraus, choi_from_transfer
from .errors import DomainError, ValidationError

#: Below this, 0/0 contraction ratios are declared degenerate.
DEGENERACY_EPS = 1e-12


def _clamped_sqrt(x: float) -> float:
    if x < -DEGENERACY_EPS:
        raise DomainError(f"square-root argument {x} below tolerance")
    return float(np.sqrt(max(x, 0.0)))


@dataclass(frozen=True)
class CanonicalChannelParams:
    """Closed-form data of the canonical channel at angle theta, time s."""

    theta: float
    s: float
    lam1: float
    lam2: float
    lam3: float
    m3: float
    a: float
    b: float
    c: float
    d: float

    def __post_init__(self) -> None:
        if abs(self.a**2 + self.c**2 - 2.0) > 1e-12 or abs(self.b**2 + self.d**2 - 2.0) > 1e-12:
            raise ValidationError("Choi diagonal normalization violated")


def canonical_params(theta: float, s: float) -> CanonicalChannelParams:
    """Evaluate the closed-form channel parameters."""
    if not -np.pi / 4 - 1e-12 <= theta <= np.pi / 4 + 1e-12:
        raise DomainError(f"theta {theta} outside [-pi/4, pi/4]")
    if s < 0:
        raise DomainError(f"time {s} < 0")
    sin_t, cos_t = np.sin(theta), np.cos(theta)
    lam1 = float(np.exp(-2.0 * s * sin_t**2))
    lam2 = float(np.exp(-2.0 * s * cos_t**2))
    lam3 = float(np.exp(-2.0 * s))
    m3 = float(np.sin(2.0 * theta) * (lam3 - 1.0))
    return CanonicalChannelParams(
        theta=theta,
        s=s,
        lam1=lam1,
        lam2=lam2,
        lam3=lam3,
        m3=m3,
        a=_clamped_sqrt(1.0 + lam3 + m3),
        b=_clamped_sqrt(1.0 - lam3 + m3),
        c=_clamped_sqrt(1.0 - lam3 - m3),
        d=_clamped_sqrt(1.0 + lam3 - m3),
    )


def canonical_transfer(p: CanonicalChannelParams) -> TransferMatrix:
    """Pauli-basis transfer matrix: diagonal contractions plus a z-shift."""
    m = np.zeros((4, 4))
    m[0, 0] = 1.0
    m[1, 1], m[2, 2], m[3, 3] = p.lam1, p.lam2, p.lam3
    m[3, 0] = p.m3
    return TransferMatrix(m)


def canonical_choi(p: CanonicalChannelParams) -> ChoiMatrix:
    return choi_from_transfer(canonical_transfer(p))


def beta_blocks(p: CanonicalChannelParams) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Blocks (A, B, C) of beta = 2*Choi, split by the second tensor index.

    Rows/columns {|00>, |10>} give A, {|01>, |11>} give B, and C is the cross
    block; beta = [[A, C], [C^T, B]] after that reordering.
    """
    beta = 2.0 * canonical_choi(p).matrix.real
    even, odd = [0, 2], [1, 3]
    return beta[np.ix_(even, even)], beta[np.ix_(odd, odd)], beta[np.ix_(even, odd)]


def contraction_matrix(p: CanonicalChannelParams) -> np.ndarray:
    """R = A^{-1/2} C B^{-1/2}; singular values <= 1 (it is a contraction)."""
    if min(p.a, p.b, p.c, p.d) ** 2 < DEGENERACY_EPS:
        raise DomainError("contraction undefined: a Choi diagonal entry vanishes")
    a_blk, b_blk, c_blk = beta_blocks(p)
    a_inv = np.diag(1.0 / np.sqrt(np.diagonal(a_blk)))
    b_inv = np.diag(1.0 / np.sqrt(np.diagonal(b_blk)))
    return a_inv @ c_blk @ b_inv


@dataclass(frozen=True)
class ExtremeChannelPair:
    """Two quasi-extreme channels averaging to the canonical channel."""

    params: CanonicalChannelParams
    phi1: float
    phi2: float
    alpha: float  # cos(alpha) = a/sqrt(2), sin(alpha) = c/sqrt(2)
    beta: float  # cos(beta) = b/sqrt(2), sin(beta) = d/sqrt(2)
    kraus1: KrausSet
    kraus2: KrausSet
    u1: np.ndarray  # 4x4, environment qubit is the first tensor factor
    u2: np.ndarray
    degenerate: bool

    def __post_init__(self) -> None:
        for u, ks in ((self.u1, self.kraus1), (self.u2, self.kraus2)):
            u = np.asarray(u, dtype=np.complex128)
            if np.abs(u.conj().T @ u - np.eye(4)).max() > 1e-10:
                raise ValidationError("Stinespring matrix is not unitary")
            stacked = np.vstack([k for k in ks.operators])
            if np.abs(u[:, :2] - stacked).max() > 1e-10:
                raise ValidationError("first block-column does not stack the Kraus pair")

    def choi_pair(self) -> tuple[ChoiMatrix, ChoiMatrix]:
        return choi_from_kraus(self.kraus1), choi_from_kraus(self.kraus2)


def _stinespring(alpha: float, beta: float, phi1: float, phi2: float) -> np.ndarray:
    ca, sa = np.cos(alpha), np.sin(alpha)
    cb, sb = np.cos(beta), np.sin(beta)
    e1, e2 = np.exp(-1j * phi1), np.exp(1j * phi2)
    return np.array(
        [
            [ca * e1, 0, 0, -sa],
            [0, sb, -cb * e2.conjugate(), 0],
            [0, cb * e2, sb, 0],
            [sa, 0, 0, ca * e1.conjugate()],
        ],
        dtype=np.complex128,
    )


def extreme_pair(p: CanonicalChannelParams) -> ExtremeChannelPair:
    """Construct the two quasi-extreme channels for the canonical channel.

    The angles come from the contraction ratios; when a ratio degenerates to
    0/0 (theta = +-pi/4, or s = 0) the corresponding angle is set to 0 —
    any value gives the same channel there because the Kraus entry it
    multiplies vanishes — and the pair is flagged degenerate.
    """
    if p.lam1 - p.lam2 < -1e-12:
        raise ValidationError("lam1 < lam2; canonical angle outside its domain")
    # Single-sqrt forms of a*d and b*c: exact at the branch points (s = 0
    # gives ad = 2, ratio exactly 1), where the two-factor product leaves
    # sqrt(2)*sqrt(2) dust that arccos amplifies to sqrt(eps)-size angles.
    ad = _clamped_sqrt((1.0 + p.lam3) ** 2 - p.m3**2)
    bc = _clamped_sqrt((1.0 - p.lam3) ** 2 - p.m3**2)
    degenerate = ad < DEGENERACY_EPS or bc < DEGENERACY_EPS or p.s < DEGENERACY_EPS
    phi1 = 0.0 if ad < DEGENERACY_EPS else float(np.arccos(np.clip((p.lam1 + p.lam2) / ad, -1, 1)))
    phi2 = 0.0 if bc < DEGENERACY_EPS else float(np.arccos(np.clip((p.lam1 - p.lam2) / bc, -1, 1)))
    alpha = float(np.arctan2(p.c, p.a))
    beta = float(np.arctan2(p.d, p.b))

    inv_rt2 = 1.0 / np.sqrt(2.0)
    pairs = []
    for sign in (+1.0, -1.0):
        k_top = inv_rt2 * np.array(
            [[p.a * np.exp(-1j * sign * phi1), 0], [0, p.d]], dtype=np.complex128
        )
        k_bot = inv_rt2 * np.array(
            [[0, p.b * np.exp(1j * sign * phi2)], [p.c, 0]], dtype=np.complex128
        )
        pairs.append(KrausSet((k_top, k_bot)))
    u1 = _stinespring(alpha, beta, phi1, phi2)
    u2 = _stinespring(alpha, beta, -phi1, -phi2)
    return ExtremeChannelPair(
        params=p,
        phi1=phi1,
        phi2=phi2,
        alpha=alpha,
        beta=beta,
        kraus1=pairs[0],
        kraus2=pairs[1],
        u1=u1,
        u2=u2,
        degenerate=degenerate,
    )
