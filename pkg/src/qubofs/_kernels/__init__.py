"""Solver inner loops, with a compiled core and a NumPy fallback.

Both implementations receive all randomness as pre-generated arrays and
apply floating-point operations in the same per-element order, so they
produce identical results; which one runs is an implementation detail.
The compiled core is preferred when the extension built successfully.
Set ``QUBOFS_PURE_PYTHON=1`` to force the fallback.
"""

import os

if os.environ.get("QUBOFS_PURE_PYTHON"):
    from . import fallback as _impl

    BACKEND = "python"
else:
    try:
        from . import _core as _impl

        BACKEND = "compiled"
    except ImportError:
        from . import fallback as _impl

        BACKEND = "python"

exhaustive_scan = _impl.exhaustive_scan
anneal_chunk = _impl.anneal_chunk
tabu_search = _impl.tabu_search

__all__ = ["BACKEND", "exhaustive_scan", "anneal_chunk", "tabu_search"]
