"""Kernel backend selection.

The compiled extension is used when it imports cleanly, unless the
environment variable ``CROCKER_LAB_PURE=1`` forces the numpy fallback.
"""
import os

from . import _fallback as fallback

kernels = None
if os.environ.get("CROCKER_LAB_PURE") != "1":
    try:
        from . import _kernels as kernels
    except ImportError:  # extension not built
        kernels = None

compiled = kernels is not None
name = "cython" if compiled else "python"
