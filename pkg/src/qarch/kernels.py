"""Backend selection for the statevector kernels.

The compiled extension is used when it imports; otherwise the numpy
fallback. Set ``QARCH_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os

from . import _fallback

if os.environ.get("QARCH_PURE_PYTHON", "") not in ("", "0"):
    _impl = _fallback
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl
        BACKEND = "compiled"
    except ImportError:
        _impl = _fallback
        BACKEND = "python"

apply_gates = _impl.apply_gates
expect_z = _impl.expect_z
expect_and_shift_grad = _impl.expect_and_shift_grad

__all__ = ["BACKEND", "apply_gates", "expect_z", "expect_and_shift_grad"]
