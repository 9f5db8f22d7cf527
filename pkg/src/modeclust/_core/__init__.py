"""Kernel backend selection.

The hot numeric kernels exist twice: a Cython extension (``_kernels``) and
a pure-Python reference (``_purepy``).  The compiled backend is used when
it imported cleanly; setting the environment variable
``MODECLUST_PURE_PYTHON`` to anything but ``0``/empty forces the fallback.
Both backends produce bit-identical results.
"""

import os

if os.environ.get("MODECLUST_PURE_PYTHON", "").strip() not in ("", "0"):
    from . import _purepy as _impl
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
        BACKEND = "compiled"
    except ImportError:
        from . import _purepy as _impl
        BACKEND = "python"

dip_counts = _impl.dip_counts
kdip2_counts = _impl.kdip2_counts
kdip3_counts = _impl.kdip3_counts
taut_knots = _impl.taut_knots
kmedoids_cost = _impl.kmedoids_cost
kmedoids_cuts = _impl.kmedoids_cuts

__all__ = [
    "BACKEND",
    "dip_counts",
    "kdip2_counts",
    "kdip3_counts",
    "taut_knots",
    "kmedoids_cost",
    "kmedoids_cuts",
]
