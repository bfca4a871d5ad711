"""Backend selection for the numeric hot loops.

The compiled extension is used when it was built; set ``UWB_VPTL_PURE=1``
to force the numpy fallback.
"""

import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("UWB_VPTL_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py

triangulate_batch = _impl.triangulate_batch
moving_average = _impl.moving_average
rolling_mean_std = _impl.rolling_mean_std

__all__ = ["BACKEND", "triangulate_batch", "moving_average", "rolling_mean_std"]
