"""Split a GKSL generator into canonical one-axis dissipators.

The GKS matrix A is spectrally decomposed; each eigenvector is phase-rotated
and frame-rotated into the canonical form (cos(theta), -i sin(theta), 0), so
every dissipative term becomes a known single-parameter channel conjugated by
a fixed qubit unitary. The Hamiltonian term rides along untouched.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import SIGMA
from .errors import (
    NegativeTime,
    NotSO3,
    NotUnitVector,
    ValidationError,
)
from .numerics import DEFAULT_TOL, hermitian_eig, require_hermitian, validate_psd

#: Eigenvalues of the GKS matrix below this weight contribute no dissipator.
WEIGHT_CUTOFF = 1e-12
_DEGENERACY_EPS = 1e-12


def canonical_vector(theta: float) -> np.ndarray:
    """The canonical dissipation axis (cos(theta), -i sin(theta), 0)."""
    return np.array([np.cos(theta), -1j * np.sin(theta), 0.0], dtype=np.complex128)


def canonical_gks(theta: float) -> np.ndarray:
    """Rank-one GKS matrix a(theta) a(theta)^dag of the canonical dissipator."""
    a = canonical_vector(theta)
    return np.outer(a, a.conj())


@dataclass(frozen=True)
class GeneratorSpec:
    """Problem input: Hamiltonian, GKS matrix, and evolution time."""

    hamiltonian: np.ndarray  # 2x2 Hermitian
    gks_matrix: np.ndarray  # 3x3 PSD
    time: float

    def __post_init__(self) -> None:
        h = require_hermitian(self.hamiltonian, tol=DEFAULT_TOL, what="Hamiltonian")
        a = require_hermitian(self.gks_matrix, tol=DEFAULT_TOL, what="GKS matrix")
        _, a = validate_psd(a, tol=DEFAULT_TOL)
        if self.time < 0:
            raise NegativeTime(f"evolution time {self.time} < 0")
        object.__setattr__(self, "hamiltonian", h)
        object.__setattr__(self, "gks_matrix", a)


@dataclass(frozen=True)
class ConstituentTerm:
    """One dissipative term: weight, canonical angle, and the frame change."""

    k: int
    weight: float  # eigenvalue of the GKS matrix
    vector: np.ndarray  # unit eigenvector a_k
    theta: float
    psi: float  # phase applied during canonicalization
    rotation: np.ndarray  # C_k in SO(3)
    lift: np.ndarray  # U_k in SU(2), adjoint action = C_k

    def __post_init__(self) -> None:
        c, u = np.asarray(self.rotation, float), np.asarray(self.lift, np.complex128)
        if np.abs(c.T @ c - np.eye(3)).max() > 1e-10 or abs(np.linalg.det(c) - 1) > 1e-10:
            raise NotSO3("constituent rotation is not special orthogonal")
        if np.abs(u.conj().T @ u - np.eye(2)).max() > 1e-10 or abs(np.linalg.det(u) - 1) > 1e-10:
            raise ValidationError("constituent lift is not special unitary")
        rebuilt = c.T @ canonical_gks(self.theta) @ c
        target = np.outer(self.vector, np.asarray(self.vector).conj())
        if np.abs(rebuilt - target).max() > 1e-9:
            raise ValidationError("rotated canonical GKS matrix does not rebuild the term")
        object.__setattr__(self, "rotation", c.copy())
        object.__setattr__(self, "lift", u.copy())
        object.__setattr__(self, "vector", np.asarray(self.vector, np.complex128).copy())


@dataclass(frozen=True)
class DecomposedGenerator:
    hamiltonian: np.ndarray
    terms: tuple[ConstituentTerm, ...]

    def reconstruct_gks(self) -> np.ndarray:
        """Sum of weight * C^T A(theta) C over all terms."""
        out = np.zeros((3, 3), dtype=np.complex128)
        for t in self.terms:
            out += t.weight * (t.rotation.T @ canonical_gks(t.theta) @ t.rotation)
        return out


def spectral_split(a: np.ndarray) -> list[tuple[float, np.ndarray]]:
    """Eigen-decompose a PSD 3x3 matrix into weighted unit vectors.

    Weights come out descending; weights below ``WEIGHT_CUTOFF`` are dropped.
    """
    m = require_hermitian(a, tol=1e-8, what="GKS matrix")
    _, m = validate_psd(m, tol=DEFAULT_TOL)
    eig = hermitian_eig(m)
    out = []
    for lam, vec in zip(eig.eigenvalues, eig.eigenvectors.T):
        if lam < WEIGHT_CUTOFF:
            continue
        out.append((float(lam), vec / np.linalg.norm(vec)))
    return out


def canonicalize_vector(a: np.ndarray) -> tuple[float, float, np.ndarray]:
    """Rotate a unit complex 3-vector to the form (cos(theta), -i sin(theta), 0).

    Returns (theta, psi, G) with G in SO(3) and G (e^{i psi} a) equal to the
    canonical form; theta lands in [0, pi/4]. The phase psi makes the real and
    imaginary parts orthogonal with the real part no shorter; G then maps them
    onto +x and -y. Since the induced channel depends on a only through
    a a^dag, any global phase of the input gives the same theta.
    """
    a = np.asarray(a, dtype=np.complex128)
    if a.shape != (3,):
        raise NotUnitVector("expected a complex 3-vector")
    if abs(np.linalg.norm(a) - 1.0) > 1e-10:
        raise NotUnitVector(f"vector norm {np.linalg.norm(a)} != 1")

    k1 = float(a.real @ a.real - a.imag @ a.imag)
    k2 = float(2.0 * (a.real @ a.imag))
    if abs(k1) < _DEGENERACY_EPS and abs(k2) < _DEGENERACY_EPS:
        psi = 0.0
    elif abs(k1) < _DEGENERACY_EPS:
        psi = (np.pi / 4.0) * np.sign(-k2)
    else:
        psi = 0.5 * np.arctan2(-k2, k1)
    ap = np.exp(1j * psi) * a
    # The atan2 branch already forces |re| >= |im|; fall back by a quarter
    # turn if rounding ever lands on the other solution of tan(2 psi).
    if ap.real @ ap.real - ap.imag @ ap.imag < -_DEGENERACY_EPS:
        psi += np.pi / 2.0
        ap = np.exp(1j * psi) * a

    r_norm = float(np.linalg.norm(ap.real))
    i_norm = float(np.linalg.norm(ap.imag))
    theta = float(np.arcsin(min(i_norm, 1.0)))
    u = ap.real / r_norm
    if i_norm < _DEGENERACY_EPS:
        # Imaginary direction is free; pick a deterministic unit normal to u.
        cx = np.cross(u, np.array([1.0, 0.0, 0.0]))
        cy = np.cross(u, np.array([0.0, 1.0, 0.0]))
        v = cx if np.linalg.norm(cx) >= np.linalg.norm(cy) else cy
        v = v / np.linalg.norm(v)
    else:
        v = ap.imag / i_norm
    g = np.vstack([u, -v, np.cross(u, -v)])
    canon = g @ ap
    if np.abs(canon - canonical_vector(theta)).max() > 1e-10:
        raise ValidationError("canonicalization failed to reach target form")
    return theta, float(psi), g


def adjoint_rep(u: np.ndarray) -> np.ndarray:
    """3x3 real matrix c with U^dag sigma_alpha U = sum_g c[alpha, g] sigma_g."""
    u = np.asarray(u, dtype=np.complex128)
    c = np.empty((3, 3), dtype=np.complex128)
    for alpha in range(3):
        conj = u.conj().T @ SIGMA[alpha + 1] @ u
        for gam in range(3):
            c[alpha, gam] = np.trace(SIGMA[gam + 1] @ conj) / 2.0
    residue = float(np.abs(c.imag).max())
    if residue > 1e-10:
        raise ValidationError(f"adjoint representation has imaginary residue {residue:.3e}")
    return c.real


def lift_so3_to_su2(c: np.ndarray) -> np.ndarray:
    """An SU(2) element whose adjoint action reproduces the given rotation.

    Axis and angle are read off the rotation matrix (quaternion extraction,
    largest-pivot branch for stability near angle pi), giving
    U = exp(-i phi n.sigma / 2). Both conjugation directions are then checked
    against the rotation and the matching one returned — the double-cover
    sign is left alone.
    """
    c = np.asarray(c, dtype=float)
    if c.shape != (3, 3) or np.abs(c.T @ c - np.eye(3)).max() > 1e-9:
        raise NotSO3("input is not orthogonal within 1e-9")
    if abs(np.linalg.det(c) - 1.0) > 1e-9:
        raise NotSO3(f"determinant {np.linalg.det(c)} != +1")

    t = float(np.trace(c))
    diag = np.diagonal(c)
    if t >= diag.max():
        s = 2.0 * np.sqrt(max(1.0 + t, 0.0))
        w = s / 4.0
        x = (c[2, 1] - c[1, 2]) / s
        y = (c[0, 2] - c[2, 0]) / s
        z = (c[1, 0] - c[0, 1]) / s
    elif diag[0] >= diag[1] and diag[0] >= diag[2]:
        s = 2.0 * np.sqrt(max(1.0 + c[0, 0] - c[1, 1] - c[2, 2], 0.0))
        x = s / 4.0
        w = (c[2, 1] - c[1, 2]) / s
        y = (c[0, 1] + c[1, 0]) / s
        z = (c[0, 2] + c[2, 0]) / s
    elif diag[1] >= diag[2]:
        s = 2.0 * np.sqrt(max(1.0 + c[1, 1] - c[0, 0] - c[2, 2], 0.0))
        y = s / 4.0
        w = (c[0, 2] - c[2, 0]) / s
        x = (c[0, 1] + c[1, 0]) / s
        z = (c[1, 2] + c[2, 1]) / s
    else:
        s = 2.0 * np.sqrt(max(1.0 + c[2, 2] - c[0, 0] - c[1, 1], 0.0))
        z = s / 4.0
        w = (c[1, 0] - c[0, 1]) / s
        x = (c[0, 2] + c[2, 0]) / s
        y = (c[1, 2] + c[2, 1]) / s

    u = np.array([[w - 1j * z, -1j * x - y], [-1j * x + y, w + 1j * z]])
    u /= np.sqrt(np.linalg.det(u))  # renormalize rounding drift off det=1

    # Convention guard: accept whichever conjugation direction realizes c.
    rep = adjoint_rep(u)
    if np.abs(rep - c).max() <= 1e-9:
        return u
    if np.abs(rep - c.T).max() <= 1e-9:
        return u.conj().T
    raise ValidationError("no conjugation convention reproduces the rotation")


def decompose(gspec: GeneratorSpec) -> DecomposedGenerator:
    """Full canonical decomposition of the generator."""
    terms = []
    for k, (weight, vec) in enumerate(spectral_split(gspec.gks_matrix), start=1):
        theta, psi, g = canonicalize_vector(vec)
        u = lift_so3_to_su2(g)
        terms.append(
            ConstituentTerm(
                k=k, weight=weight, vector=vec, theta=theta, psi=psi, rotation=g, lift=u
            )
        )
    out = DecomposedGenerator(hamiltonian=gspec.hamiltonian, terms=tuple(terms))
    defect = float(np.abs(out.reconstruct_gks() - gspec.gks_matrix).max())
    if defect > 1e-9:
        raise ValidationError(f"decomposition rebuild defect {defect:.3e}")
    return out
