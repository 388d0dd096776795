"""Kernel backend selection.

The compiled extension is preferred; the numpy implementation is the fallback.
Set INSBANK_KERNEL=numpy (or =cython) to force a backend.
"""
from __future__ import annotations

import os

from . import _kernels_py

_forced = os.environ.get("INSBANK_KERNEL", "").lower()

if _forced == "numpy":
    kernels = _kernels_py
else:
    try:
        from . import _kernels as kernels  # type: ignore[no-redef]
    except ImportError:
        if _forced == "cython":
            raise
        kernels = _kernels_py

BACKEND: str = kernels.BACKEND

responsibility_step = kernels.responsibility_step
availability_step = kernels.availability_step
blend = kernels.blend
