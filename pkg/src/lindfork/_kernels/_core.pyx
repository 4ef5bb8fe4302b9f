# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementations of the four numeric kernels.

Semantics match ``_pykernels`` exactly (same signatures, same conventions);
the equivalence is enforced by the backend test suite. The hot paths are the
gate conjugations and partial traces on multi-qubit density matrices, where
the typed loops avoid the tensordot/einsum reshuffling overhead.
"""

import numpy as np

cimport cython
from libc.math cimport ceil, fabs, log2, sqrt

JACOBI_TOL = 1e-14
JACOBI_MAX_SWEEPS = 100

_EXPM_THETA = 0.25
_EXPM_ORDER = 20


def jacobi_eigh(a):
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Returns ``(w, v)`` with eigenvalues ascending and eigenvectors in the
    columns of ``v``.
    """
    cdef double complex[:, :] am
    cdef double complex[:, :] vm
    cdef Py_ssize_t n, p, q, i, sweep
    cdef double complex beta, phase, cvp, cvq, tmp_p, tmp_q
    cdef double alpha, gamma, b, tau, t, c, s, off, scale, stop, skip
    cdef double complex vpp, vpq, vqp, vqq

    a = np.array(a, dtype=np.complex128, order="C")
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    if n == 1:
        return a.real.diagonal().copy(), v

    scale = float(np.linalg.norm(a))
    if scale == 0.0:
        return np.zeros(n), v
    stop = JACOBI_TOL * scale
    skip = stop / (n * n)

    am = a
    vm = v
    for sweep in range(JACOBI_MAX_SWEEPS):
        off = 0.0
        for p in range(n):
            for q in range(n):
                if p != q:
                    off += (am[p, q].real * am[p, q].real
                            + am[p, q].imag * am[p, q].imag)
        off = sqrt(off)
        if off <= stop:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                beta = am[p, q]
                b = sqrt(beta.real * beta.real + beta.imag * beta.imag)
                if b <= skip:
                    continue
                phase = beta / b
                alpha = am[p, p].real
                gamma = am[q, q].real
                tau = (gamma - alpha) / (2.0 * b)
                if tau != 0.0:
                    t = (1.0 if tau > 0 else -1.0) / (fabs(tau) + sqrt(1.0 + tau * tau))
                else:
                    t = 1.0
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                vpp = c
                vpq = s
                vqp = -s * phase.conjugate()
                vqq = c * phase.conjugate()
                # A <- V^dag A V, columns then rows.
                for i in range(n):
                    tmp_p = am[i, p]
                    tmp_q = am[i, q]
                    am[i, p] = tmp_p * vpp + tmp_q * vqp
                    am[i, q] = tmp_p * vpq + tmp_q * vqq
                for i in range(n):
                    tmp_p = am[p, i]
                    tmp_q = am[q, i]
                    am[p, i] = vpp.conjugate() * tmp_p + vqp.conjugate() * tmp_q
                    am[q, i] = vpq.conjugate() * tmp_p + vqq.conjugate() * tmp_q
                am[p, q] = 0.0
                am[q, p] = 0.0
                am[p, p] = am[p, p].real
                am[q, q] = am[q, q].real
                for i in range(n):
                    cvp = vm[i, p]
                    cvq = vm[i, q]
                    vm[i, p] = cvp * vpp + cvq * vqp
                    vm[i, q] = cvp * vpq + cvq * vqq

    w = np.diag(a).real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


cdef void _matmul(double complex[:, :] out, double complex[:, :] x,
                  double complex[:, :] y, Py_ssize_t n):
    cdef Py_ssize_t i, j, k
    cdef double complex acc
    for i in range(n):
        for j in range(n):
            acc = 0.0
            for k in range(n):
                acc = acc + x[i, k] * y[k, j]
            out[i, j] = acc


def expm_taylor(a):
    """exp(a) by scaling-and-squaring around a fixed-order Taylor series."""
    cdef Py_ssize_t n, i, j, k, sq, squarings
    cdef double norm1, colsum
    cdef double complex[:, :] am, rm, wm

    a = np.array(a, dtype=np.complex128, order="C")
    n = a.shape[0]
    if n == 0:
        return np.eye(0, dtype=np.complex128)
    am = a
    norm1 = 0.0
    for j in range(n):
        colsum = 0.0
        for i in range(n):
            colsum += sqrt(am[i, j].real * am[i, j].real
                           + am[i, j].imag * am[i, j].imag)
        if colsum > norm1:
            norm1 = colsum
    squarings = 0
    if norm1 > _EXPM_THETA:
        squarings = <Py_ssize_t>ceil(log2(norm1 / _EXPM_THETA))
        a = a / (2.0 ** squarings)
        am = a

    result = np.eye(n, dtype=np.complex128)
    work = np.empty((n, n), dtype=np.complex128)
    rm = result
    wm = work
    # Horner evaluation of sum_{k<=ORDER} a^k / k!.
    for k in range(_EXPM_ORDER, 0, -1):
        _matmul(wm, am, rm, n)
        for i in range(n):
            for j in range(n):
                rm[i, j] = wm[i, j] / k
            rm[i, i] = rm[i, i] + 1.0
    for sq in range(squarings):
        _matmul(wm, rm, rm, n)
        for i in range(n):
            for j in range(n):
                rm[i, j] = wm[i, j]
    return result


def apply_unitary(rho, u, qubits, n):
    """Conjugate an n-qubit density matrix by a gate on the listed qubits.

    Qubit 0 is the leftmost (most significant) tensor factor; the gate matrix
    is indexed by the listed qubits in order, first listed most significant.
    """
    cdef Py_ssize_t nq = n
    cdef Py_ssize_t k = len(qubits)
    cdef Py_ssize_t dim = 1 << nq
    cdef Py_ssize_t dg = 1 << k
    cdef Py_ssize_t base, col, row, a_idx, b_idx, j, gate_mask
    cdef double complex acc
    cdef Py_ssize_t[16] pos
    cdef Py_ssize_t[64] spread

    rho = np.array(rho, dtype=np.complex128, order="C")
    u = np.ascontiguousarray(u, dtype=np.complex128)
    cdef double complex[:, :] rm = rho
    cdef double complex[:, :] um = u

    gate_mask = 0
    for j in range(k):
        pos[j] = 1 << (nq - 1 - <Py_ssize_t>qubits[j])
        gate_mask |= pos[j]
    for a_idx in range(dg):
        spread[a_idx] = 0
        for j in range(k):
            if (a_idx >> (k - 1 - j)) & 1:
                spread[a_idx] |= pos[j]

    out = np.empty((dim, dim), dtype=np.complex128)
    cdef double complex[:, :] om = out

    # Rows: out1 = (U on qubits) @ rho.
    for base in range(dim):
        if base & gate_mask:
            continue
        for col in range(dim):
            for a_idx in range(dg):
                acc = 0.0
                for b_idx in range(dg):
                    acc = acc + um[a_idx, b_idx] * rm[base | spread[b_idx], col]
                om[base | spread[a_idx], col] = acc
    # Columns: out = out1 @ (U on qubits)^dag.
    for base in range(dim):
        if base & gate_mask:
            continue
        for row in range(dim):
            for a_idx in range(dg):
                acc = 0.0
                for b_idx in range(dg):
                    acc = acc + om[row, base | spread[b_idx]] * um[a_idx, b_idx].conjugate()
                rm[row, base | spread[a_idx]] = acc
    return rho


def partial_trace_keep(rho, keep, n):
    """Trace out every qubit not in ``keep`` (result ordered by ascending index)."""
    cdef Py_ssize_t nq = n
    keep = sorted(keep)
    cdef Py_ssize_t m = len(keep)
    cdef Py_ssize_t d = 1 << m
    cdef Py_ssize_t nt = nq - m
    cdef Py_ssize_t dt = 1 << nt
    cdef Py_ssize_t i, j, t, q, idx
    cdef Py_ssize_t[16] kpos
    cdef Py_ssize_t[16] tpos
    cdef double complex acc

    rho = np.ascontiguousarray(rho, dtype=np.complex128)
    cdef double complex[:, :] rm = rho

    for i in range(m):
        kpos[i] = 1 << (nq - 1 - <Py_ssize_t>keep[i])
    idx = 0
    for q in range(nq):
        if q not in keep:
            tpos[idx] = 1 << (nq - 1 - q)
            idx += 1

    out = np.zeros((d, d), dtype=np.complex128)
    cdef double complex[:, :] om = out
    cdef Py_ssize_t ri, rj, tspread

    for i in range(d):
        ri = 0
        for q in range(m):
            if (i >> (m - 1 - q)) & 1:
                ri |= kpos[q]
        for j in range(d):
            rj = 0
            for q in range(m):
                if (j >> (m - 1 - q)) & 1:
                    rj |= kpos[q]
            acc = 0.0
            for t in range(dt):
                tspread = 0
                for q in range(nt):
                    if (t >> (nt - 1 - q)) & 1:
                        tspread |= tpos[q]
                acc = acc + rm[ri | tspread, rj | tspread]
            om[i, j] = acc
    return out
