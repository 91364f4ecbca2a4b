"""Kernel backend selection.

The hot loops (stencils, time stepping, bound iteration) exist twice: a
compiled Cython extension ``htpde._kernels`` and a pure-NumPy fallback
``htpde._kernels_py`` with identical semantics.  The compiled module is
preferred when importable; set the environment variable ``HTPDE_PURE_PYTHON=1``
to force the fallback (used by the backend benchmark and for debugging).
"""

from __future__ import annotations

import os

_force_py = os.environ.get("HTPDE_PURE_PYTHON", "").strip() not in ("", "0")

if _force_py:
    from . import _kernels_py as kernels
else:
    try:
        from . import _kernels as kernels  # type: ignore[no-redef]
    except ImportError:  # extension not built
        from . import _kernels_py as kernels  # type: ignore[no-redef]

BACKEND: str = "compiled" if kernels.IS_COMPILED else "python"

__all__ = ["kernels", "BACKEND"]
