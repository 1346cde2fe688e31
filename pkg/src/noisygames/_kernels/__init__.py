"""Kernel backend selection: compiled extension with pure-Python fallback.

The compiled extension is preferred when it imports cleanly; set
NGA_KERNEL=python to force the fallback (useful for benchmarking and
for debugging the extension).
"""

import os

from . import pyref

if os.environ.get("NGA_KERNEL", "").lower() == "python":
    mean_zeta = pyref.mean_zeta
    BACKEND = "python"
else:
    try:
        from ._zeta_cy import mean_zeta

        BACKEND = "cython"
    except ImportError:  # extension not built
        mean_zeta = pyref.mean_zeta
        BACKEND = "python"

__all__ = ["mean_zeta", "BACKEND", "pyref"]
