"""Tick kernel selection.

The compiled extension is used when it was built; otherwise the pure-Python
reference takes over. Set ``TRUSTSWARM_PURE_PYTHON=1`` to force the fallback.
"""
from __future__ import annotations

import os

from . import _pykernel

py_tick = _pykernel.tick

try:
    if os.environ.get("TRUSTSWARM_PURE_PYTHON"):
        raise ImportError("pure-Python kernel forced by environment")
    from ._ckernel import tick as c_tick
except ImportError:
    c_tick = None

tick = c_tick if c_tick is not None else py_tick
BACKEND = "cython" if c_tick is not None else "python"
