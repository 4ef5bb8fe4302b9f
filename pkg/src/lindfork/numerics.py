"""Dense linear algebra on tiny complex matrices.

Everything in the pipeline lives in dimensions 2..32, so the solvers are the
package's own kernels (cyclic Jacobi, scaling-and-squaring exponential) rather
than external LAPACK wrappers; see ``lindfork._kernels`` for backend
selection. All functions are pure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import NonHermitianInput, NotPSD

#: Global default tolerance for validation predicates (overridable per call).
DEFAULT_TOL = 1e-10

#: Hard ceiling for treating an input as Hermitian at all.
HERMITIAN_REJECT = 1e-8


@dataclass(frozen=True)
class HermitianEig:
    """Spectral decomposition with eigenvalues sorted descending.

    ``eigenvectors[:, k]`` belongs to ``eigenvalues[k]``; each column's phase
    is canonicalized (largest-magnitude component real positive) so equal
    inputs produce identical output arrays.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def hermiticity_defect(m: np.ndarray) -> float:
    """Max-abs entry of m - m^dag."""
    m = np.asarray(m)
    return float(np.abs(m - m.conj().T).max()) if m.size else 0.0


def require_hermitian(m: np.ndarray, *, tol: float = HERMITIAN_REJECT, what: str = "matrix") -> np.ndarray:
    """Symmetrized copy of ``m``, or NonHermitianInput past tolerance."""
    m = np.asarray(m, dtype=np.complex128)
    defect = hermiticity_defect(m)
    if defect > tol:
        raise NonHermitianInput(f"{what} deviates from Hermitian by {defect:.3e} (tol {tol:.1e})")
    return (m + m.conj().T) / 2.0


def hermitian_eig(m: np.ndarray, *, tol: float = HERMITIAN_REJECT) -> HermitianEig:
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending."""
    sym = require_hermitian(m, tol=tol)
    w, v = _kernels.jacobi_eigh(sym)
    w = w[::-1].copy()
    v = v[:, ::-1].copy()
    # Deterministic phases: rotate each column so its largest-|.| entry is
    # real positive (argmax takes the first maximum, fixing degenerate ties).
    for k in range(v.shape[1]):
        idx = int(np.argmax(np.abs(v[:, k])))
        pivot = v[idx, k]
        if abs(pivot) > 0.0:
            v[:, k] *= np.conj(pivot) / abs(pivot)
    return HermitianEig(eigenvalues=w, eigenvectors=v)


def matrix_exp(m: np.ndarray, scale: float = 1.0) -> np.ndarray:
    """exp(scale * m); returns the identity exactly when scale == 0."""
    m = np.asarray(m, dtype=np.complex128)
    if scale == 0.0:
        return np.eye(m.shape[0], dtype=np.complex128)
    return _kernels.expm_taylor(scale * m)


def validate_psd(m: np.ndarray, tol: float = DEFAULT_TOL) -> tuple[bool, np.ndarray]:
    """Check positive semidefiniteness and clamp negligible negative modes.

    Returns ``(True, clamped)`` where eigenvalues in [-tol, 0) are set to 0
    and the matrix reassembled; raises NotPSD when any eigenvalue < -tol.
    """
    eig = hermitian_eig(m)
    w_min = float(eig.eigenvalues.min()) if eig.eigenvalues.size else 0.0
    if w_min < -tol:
        raise NotPSD(f"min eigenvalue {w_min:.3e} below -{tol:.1e}")
    if w_min >= 0.0:
        return True, np.asarray(m, dtype=np.complex128).copy()
    w = np.clip(eig.eigenvalues, 0.0, None)
    v = eig.eigenvectors
    return True, (v * w) @ v.conj().T
