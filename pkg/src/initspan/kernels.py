"""Kernel backend selection.

Prefers the compiled extension; falls back to the numpy implementation
when the extension is absent (pure-source install) or when the
INITSPAN_PURE_PYTHON environment variable is set to a non-empty value.
Both backends implement identical contracts; `benchmarks/bench_kernels.py`
compares their throughput.
"""

from __future__ import annotations

import os

from . import kernels_py

if os.environ.get("INITSPAN_PURE_PYTHON"):
    _impl = kernels_py
else:
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = kernels_py

BACKEND = _impl.BACKEND
log_partition = _impl.log_partition
forward_backward = _impl.forward_backward
viterbi = _impl.viterbi
