"""Tree hot kernels: compiled extension with a pure-numpy fallback.

The compiled module is preferred when importable; set OMX_NO_NATIVE=1
to force the fallback (useful for parity checks and benchmarking).
"""

import os

if os.environ.get("OMX_NO_NATIVE"):
    from . import _fallback as _impl
else:
    try:
        from . import _native as _impl
    except ImportError:
        from . import _fallback as _impl

IMPL = _impl.IMPL
best_split = _impl.best_split
tree_apply = _impl.tree_apply
