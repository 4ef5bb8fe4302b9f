"""NumPy reference implementations of the four numeric kernels.

These are the fallback used when the compiled core is unavailable, and the
ground truth the compiled core is tested against. All functions accept and
return ``complex128`` arrays and never mutate their inputs.
"""

from __future__ import annotations

import numpy as np

# Cyclic Jacobi: relative off-diagonal threshold and sweep cap. Quadratic
# convergence makes ~10 sweeps enough for n <= 32; the cap guards NaN inputs.
JACOBI_TOL = 1e-14
JACOBI_MAX_SWEEPS = 100

# Scaling-and-squaring: scale until the 1-norm is below _EXPM_THETA, then run
# a fixed-order Taylor series (remainder < 0.25^21/21! ~ 1e-32 at the cutoff).
_EXPM_THETA = 0.25
_EXPM_ORDER = 20


def jacobi_eigh(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Returns ``(w, v)`` with eigenvalues ascending and eigenvectors in the
    columns of ``v``. The input is assumed Hermitian; only the caller-side
    wrapper enforces that. Off-diagonal mass is annihilated pairwise with
    complex Givens rotations until its Frobenius norm falls below
    ``JACOBI_TOL`` relative to the input's norm.
    """
    a = np.array(a, dtype=np.complex128)
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    if n == 1:
        return a.real.diagonal().copy(), v

    scale = np.linalg.norm(a)
    if scale == 0.0:
        return np.zeros(n), v
    stop = JACOBI_TOL * scale
    # Per-element skip threshold: n^2 elements can each hide stop/n of mass.
    skip = stop / (n * n)

    off_mask = ~np.eye(n, dtype=bool)
    for _ in range(JACOBI_MAX_SWEEPS):
        # Sum the off-diagonal squares directly: computing them as
        # total - diagonal cancels catastrophically near convergence.
        off = np.linalg.norm(a[off_mask])
        if off <= stop:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                beta = a[p, q]
                if abs(beta) <= skip:
                    continue
                # Phase out the off-diagonal element, then apply the
                # symmetric-Schur rotation of the resulting real 2x2 block.
                phase = beta / abs(beta)
                alpha = a[p, p].real
                gamma = a[q, q].real
                b = abs(beta)
                tau = (gamma - alpha) / (2.0 * b)
                t = np.sign(tau) / (abs(tau) + np.sqrt(1.0 + tau * tau)) if tau != 0 else 1.0
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # V = diag(1, conj(phase)) . [[c, s], [-s, c]] in the (p,q) plane.
                vpp, vpq = c, s
                vqp, vqq = -s * np.conj(phase), c * np.conj(phase)
                # A <- V^dag A V, columns then rows.
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = col_p * vpp + col_q * vqp
                a[:, q] = col_p * vpq + col_q * vqq
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = np.conj(vpp) * row_p + np.conj(vqp) * row_q
                a[q, :] = np.conj(vpq) * row_p + np.conj(vqq) * row_q
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                col_p = v[:, p].copy()
                col_q = v[:, q].copy()
                v[:, p] = col_p * vpp + col_q * vqp
                v[:, q] = col_p * vpq + col_q * vqq

    w = np.diag(a).real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def expm_taylor(a: np.ndarray) -> np.ndarray:
    """exp(a) by scaling-and-squaring around a fixed-order Taylor series."""
    a = np.asarray(a, dtype=np.complex128)
    n = a.shape[0]
    norm1 = np.abs(a).sum(axis=0).max() if n else 0.0
    squarings = 0
    if norm1 > _EXPM_THETA:
        squarings = int(np.ceil(np.log2(norm1 / _EXPM_THETA)))
        a = a / (2.0**squarings)
    eye = np.eye(n, dtype=np.complex128)
    # Horner evaluation of sum_{k<=ORDER} a^k / k!.
    result = eye.copy()
    for k in range(_EXPM_ORDER, 0, -1):
        result = eye + (a @ result) / k
    for _ in range(squarings):
        result = result @ result
    return result


def apply_unitary(rho: np.ndarray, u: np.ndarray, qubits: tuple[int, ...], n: int) -> np.ndarray:
    """Conjugate an n-qubit density matrix by a gate on the listed qubits.

    Qubit 0 is the leftmost (most significant) tensor factor; the gate matrix
    is indexed by the listed qubits in order, first listed most significant.
    """
    k = len(qubits)
    t = np.asarray(rho, dtype=np.complex128).reshape((2,) * (2 * n))
    ut = np.asarray(u, dtype=np.complex128).reshape((2,) * (2 * k))
    row_axes = list(qubits)
    col_axes = [n + q for q in qubits]
    t = np.tensordot(ut, t, axes=(list(range(k, 2 * k)), row_axes))
    t = np.moveaxis(t, range(k), row_axes)
    t = np.tensordot(np.conj(ut), t, axes=(list(range(k, 2 * k)), col_axes))
    t = np.moveaxis(t, range(k), col_axes)
    return t.reshape(2**n, 2**n)


def partial_trace_keep(rho: np.ndarray, keep: tuple[int, ...], n: int) -> np.ndarray:
    """Trace out every qubit not in ``keep`` (result ordered by ascending index)."""
    keep = sorted(keep)
    t = np.asarray(rho, dtype=np.complex128).reshape((2,) * (2 * n))
    # Repeated einsum labels on row/col axes of traced qubits perform the sum.
    row = [chr(97 + q) for q in range(n)]
    col = [row[q] if q not in keep else chr(97 + n + q) for q in range(n)]
    out = [row[q] for q in keep] + [col[q] for q in keep]
    t = np.einsum("".join(row + col) + "->" + "".join(out), t)
    d = 2 ** len(keep)
    return t.reshape(d, d)
