"""Backend selection for the hot kernels.

The compiled extension is used when it imports; otherwise the numpy
implementations take over. Set ``DRIFTMIMO_PURE_PYTHON=1`` to force the
fallback (useful for benchmarking and for checking backend agreement).
"""

import os

from . import _kernels_py as python_backend

compiled_backend = None
if not os.environ.get("DRIFTMIMO_PURE_PYTHON"):
    try:
        from . import _kernels as compiled_backend
    except ImportError:  # extension not built
        compiled_backend = None

_impl = compiled_backend if compiled_backend is not None else python_backend
BACKEND = "cython" if compiled_backend is not None else "python"

sinusoid_sum = _impl.sinusoid_sum
vonmises_accept = _impl.vonmises_accept
bessel_series = _impl.bessel_series
bessel_trapezoid = _impl.bessel_trapezoid
histogram_uniform = _impl.histogram_uniform

__all__ = [
    "BACKEND",
    "compiled_backend",
    "python_backend",
    "sinusoid_sum",
    "vonmises_accept",
    "bessel_series",
    "bessel_trapezoid",
    "histogram_uniform",
]
