"""Select the polynomial kernel at import time.

The compiled kernel is used when it was built; ``DIALG_PURE=1`` forces the
pure-Python fallback (the test suite runs both).
"""
import os

BACKEND = "python"
if os.environ.get("DIALG_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernel_c as kernel  # noqa: F401
        BACKEND = "cython"
    except ImportError:  # pragma: no cover - depends on the build
        kernel = None
else:
    kernel = None

if kernel is None:
    from . import _kernel_py as kernel  # noqa: F811

from . import _kernel_py as pure_kernel  # noqa: E402

__all__ = ["kernel", "pure_kernel", "BACKEND"]
