"""Inner-loop contour kernels with a compiled core and a NumPy fallback.

The smoothing, differentiation, and peak-picking loops run once per band,
per pass, per frame, so they dominate batch extraction time.  They exist in
two interchangeable implementations:

* ``lmkit.kernels._ckernels`` - Cython extension, used when compiled.
* ``lmkit.kernels.pykernels`` - pure NumPy, always available.

Set ``LMKIT_PURE_PYTHON=1`` in the environment to force the NumPy backend
(the kernel benchmark uses this to compare the two).  ``BACKEND`` reports
which implementation is active.
"""

import os

from . import pykernels

if os.environ.get("LMKIT_PURE_PYTHON"):
    _impl = pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = pykernels
        BACKEND = "python"

moving_average = _impl.moving_average
kernel_smooth = _impl.kernel_smooth
rate_of_rise = _impl.rate_of_rise
peak_pick = _impl.peak_pick

__all__ = [
    "BACKEND",
    "moving_average",
    "kernel_smooth",
    "rate_of_rise",
    "peak_pick",
    "pykernels",
]
