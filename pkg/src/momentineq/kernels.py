"""Backend selection for the row kernels.

The compiled extension is used when it imports; set ``MOMENTINEQ_BACKEND=python``
to force the NumPy fallback.
"""
import os

from . import _pure

BACKEND = "python"
if os.environ.get("MOMENTINEQ_BACKEND", "").lower() != "python":
    try:
        from . import _kernels as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = _pure
else:
    _impl = _pure

sp_rows = _impl.sp_rows
invert_rows = _impl.invert_rows
neg_logsumexp_rows = _impl.neg_logsumexp_rows

__all__ = ["BACKEND", "sp_rows", "invert_rows", "neg_logsumexp_rows"]
