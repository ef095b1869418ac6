"""Import-time selection of the integer-kernel backend.

The compiled extension is preferred when it imports; setting the environment
variable ``MAGNUS_LAB_PURE=1`` forces the pure-Python fallback (used by the
benchmark and by the backend parity tests).
"""

import os

if os.environ.get("MAGNUS_LAB_PURE", "") not in ("", "0"):
    from . import _kernels_py as _impl
else:
    try:
        from . import _speedups as _impl  # type: ignore[no-redef]
    except ImportError:
        from . import _kernels_py as _impl

imat_mul = _impl.imat_mul
normalize_packed = _impl.normalize_packed
series_mul_packed = _impl.series_mul_packed


def backend_name() -> str:
    """Name of the active kernel backend: "cython" or "python"."""
    return _impl.BACKEND
