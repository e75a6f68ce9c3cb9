"""Backend selection for the QSP hot loops.

The compiled extension is used when it imports; otherwise, or when the
environment variable ``TDHSIM_PURE_PYTHON`` is set to a non-empty value
other than ``0``, the numpy fallback is used.  ``BACKEND`` names the
active choice.
"""

import os

from . import _kernels_py

_force_py = os.environ.get("TDHSIM_PURE_PYTHON", "") not in ("", "0")

try:
    if _force_py:
        raise ImportError("pure-python backend requested")
    from . import _kernels as _impl

    BACKEND = "cython"
except ImportError:
    _impl = _kernels_py
    BACKEND = "python"

qsp_top_left = _impl.qsp_top_left
qsp_top_left_grad = _impl.qsp_top_left_grad


def compiled_available() -> bool:
    try:
        from . import _kernels  # noqa: F401
    except ImportError:
        return False
    return True
