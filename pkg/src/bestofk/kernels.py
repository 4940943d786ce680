"""Kernel selection: compiled extension if built, numpy fallback otherwise.

Set BESTOFK_PURE_PYTHON=1 to force the fallback (used by the parity tests and
the benchmark). Both backends produce identical output for identical inputs,
so the choice never affects results, only speed.
"""

from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("BESTOFK_PURE_PYTHON"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _kernels_py

HAVE_COMPILED = _impl is not _kernels_py
BACKEND = "compiled" if HAVE_COMPILED else "python"

step_csr = _impl.step_csr
step_complete = _impl.step_complete
