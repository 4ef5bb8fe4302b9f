"""Kernel backend selection.

The compiled Cython core is preferred when importable; the NumPy reference
implementation is the fallback. ``LF_BACKEND`` forces the choice:

* ``auto`` (default) — compiled if available, else python
* ``compiled``       — compiled or ImportError
* ``python``         — always the NumPy reference
"""

from __future__ import annotations

import os

from . import _pykernels

_choice = os.environ.get("LF_BACKEND", "auto").strip().lower()
if _choice not in ("auto", "compiled", "python"):
    raise ValueError(f"LF_BACKEND must be auto|compiled|python, got {_choice!r}")

_impl = None
if _choice in ("auto", "compiled"):
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
    except ImportError:
        if _choice == "compiled":
            raise ImportError(
                "LF_BACKEND=compiled but lindfork._kernels._core is not built; "
                "reinstall with a C compiler or use LF_BACKEND=python"
            ) from None
        _impl = None
if _impl is None:
    _impl = _pykernels

BACKEND: str = "python" if _impl is _pykernels else "compiled"

jacobi_eigh = _impl.jacobi_eigh
expm_taylor = _impl.expm_taylor
apply_unitary = _impl.apply_unitary
partial_trace_keep = _impl.partial_trace_keep


def available_backends() -> dict[str, object]:
    """Importable backends by name (used by tests and the benchmark)."""
    found: dict[str, object] = {"python": _pykernels}
    try:
        from . import _core  # type: ignore[attr-defined]

        found["compiled"] = _core
    except ImportError:
        pass
    return found
