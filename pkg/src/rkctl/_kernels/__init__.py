"""Kernel backend selection.

The compiled extension is preferred when importable; set RKCTL_FORCE_NUMPY=1
to force the pure-numpy fallback (used by the benchmark and backend-parity
tests). ``BACKEND`` records the active choice.
"""

import os

from . import numpy_impl

if os.environ.get("RKCTL_FORCE_NUMPY"):
    impl = numpy_impl
    BACKEND = "numpy"
else:
    try:
        from . import _compiled as impl
        BACKEND = "compiled"
    except ImportError:
        impl = numpy_impl
        BACKEND = "numpy"

advection_rhs_1d = impl.advection_rhs_1d
advection_rhs_2d = impl.advection_rhs_2d
fv_rhs_1d = impl.fv_rhs_1d
fv_rhs_2d = impl.fv_rhs_2d
euler_rhs_1d = impl.euler_rhs_1d
