"""Kernel backend selection.

The compiled kernels are preferred when the extension built; setting
``FRAMEQ_PURE_PYTHON=1`` forces the pure-Python reference kernels.  Both
expose identical functions and produce identical results.
"""

import os

if os.environ.get("FRAMEQ_PURE_PYTHON"):
    from . import _poly_core as core
else:
    try:
        from . import _poly_core_cy as core  # type: ignore[no-redef]
    except ImportError:
        from . import _poly_core as core  # type: ignore[no-redef]

BACKEND = core.BACKEND_NAME


def backend_name() -> str:
    """Name of the active kernel backend: "cython" or "python"."""
    return BACKEND
