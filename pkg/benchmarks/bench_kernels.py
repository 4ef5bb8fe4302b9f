"""Benchmark the compiled kernel core against the NumPy reference backend.

Times the four hot kernels on the workloads the simulator actually runs:
Jacobi eigensolves on Choi-sized Hermitian matrices, Taylor matrix
exponentials, gate conjugation on a five-qubit density matrix, and the
partial trace back down to the system qubit.

Usage:
    python benchmarks/bench_kernels.py [--repeats N] [--inner N]
"""

from __future__ import annotations

import argparse
import statistics
import time

import numpy as np

from lindfork._kernels import available_backends


def make_workloads(rng: np.random.Generator) -> dict[str, tuple]:
    def hermitian(n: int) -> np.ndarray:
        m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        return (m + m.conj().T) / 2.0

    def unitary(n: int) -> np.ndarray:
        q, r = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
        return q * (np.diagonal(r) / np.abs(np.diagonal(r))).conj()

    def density(n_qubits: int) -> np.ndarray:
        dim = 1 << n_qubits
        m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        m = m @ m.conj().T
        return m / np.trace(m)

    state5 = density(5)
    return {
        "jacobi_eigh (4x4)": ("jacobi_eigh", (hermitian(4),)),
        "jacobi_eigh (8x8)": ("jacobi_eigh", (hermitian(8),)),
        "expm_taylor (4x4)": ("expm_taylor", (1j * hermitian(4),)),
        "apply_unitary (1q gate, 5q state)": (
            "apply_unitary",
            (state5, unitary(2), [2], 5),
        ),
        "apply_unitary (3q gate, 5q state)": (
            "apply_unitary",
            (state5, unitary(8), [0, 1, 2], 5),
        ),
        "partial_trace_keep (5q -> 1q)": ("partial_trace_keep", (state5, [2], 5)),
    }


def time_call(fn, args, repeats: int, inner: int) -> float:
    """Median seconds per call over `repeats` batches of `inner` calls."""
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        for _ in range(inner):
            fn(*args)
        samples.append((time.perf_counter() - t0) / inner)
    return statistics.median(samples)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=7, help="timing batches")
    parser.add_argument("--inner", type=int, default=200, help="calls per batch")
    args = parser.parse_args()

    backends = available_backends()
    if "compiled" not in backends:
        print("compiled backend not built; timing the python backend only")

    rng = np.random.default_rng(0)
    workloads = make_workloads(rng)

    name_w = max(len(k) for k in workloads)
    header = f"{'kernel':<{name_w}}  " + "".join(f"{b:>12}" for b in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))

    for label, (attr, call_args) in workloads.items():
        per_backend = {}
        for bname, module in backends.items():
            fn = getattr(module, attr)
            out = fn(*call_args)  # warm up and sanity-run once
            if isinstance(out, tuple):
                out = out[0]
            if not np.all(np.isfinite(np.asarray(out))):
                raise RuntimeError(f"{bname}:{attr} returned non-finite values")
            per_backend[bname] = time_call(fn, call_args, args.repeats, args.inner)
        row = f"{label:<{name_w}}  " + "".join(
            f"{per_backend[b] * 1e6:>10.1f}us" for b in backends
        )
        if len(per_backend) == 2:
            row += f"{per_backend['python'] / per_backend['compiled']:>9.1f}x"
        print(row)

    if len(backends) == 2:
        worst = 0.0
        for attr, call_args in workloads.values():
            outs = []
            for module in backends.values():
                out = getattr(module, attr)(*call_args)
                if isinstance(out, tuple):  # (eigenvalues, eigenvectors)
                    w, v = out
                    out = v @ np.diag(w) @ v.conj().T
                outs.append(out)
            worst = max(worst, float(np.abs(outs[0] - outs[1]).max()))
        print(f"\ncross-backend agreement: max deviation {worst:.3g}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
