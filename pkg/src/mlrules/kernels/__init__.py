"""Counting kernels with a compiled core and a pure-numpy fallback.

The compiled extension is preferred when present; set ``MLRULES_PURE=1`` to
force the fallback (used by the kernel benchmark and equivalence tests).
"""

import os

from . import pure

if os.environ.get("MLRULES_PURE"):
    _impl = pure
    BACKEND = "pure"
else:
    try:
        from . import _fast as _impl
        BACKEND = "compiled"
    except ImportError:
        _impl = pure
        BACKEND = "pure"

label_pos_counts = _impl.label_pos_counts
confusion_counts = _impl.confusion_counts
subset_correct_count = _impl.subset_correct_count


def available_backends():
    backends = {"pure": pure}
    try:
        from . import _fast
        backends["compiled"] = _fast
    except ImportError:
        pass
    return backends
