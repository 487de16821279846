"""Greedy maxmin (farthest point) subsampling."""
from __future__ import annotations

import numpy as np

from . import _backend
from .errors import EmptyCloud

DEFAULT_TARGET = 500


def greedy_maxmin(cloud, target: int = DEFAULT_TARGET, seed_index: int = 0,
                  *, return_indices: bool = False, backend: str | None = None):
    """Pick ``target`` points, each farthest from those already chosen.

    Starts at ``seed_index``; ties go to the lowest original index.  Returns
    ``(subcloud, cover_radius)`` where the cover radius is the largest
    distance from an unselected point to the selection (0 when nothing is
    dropped).  With ``return_indices`` the selected indices and the
    insertion radii are appended to the tuple.
    """
    x = np.ascontiguousarray(cloud, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    n = x.shape[0]
    if n == 0:
        raise EmptyCloud("cannot subsample an empty cloud")
    if target < 1:
        raise ValueError("target must be at least 1")
    if not 0 <= seed_index < n:
        raise IndexError(f"seed_index {seed_index} out of range for {n} points")
    if target >= n:
        idx = np.arange(n)
        out = (x.copy(), 0.0)
        return out + (idx, None) if return_indices else out
    if backend == "python" or (backend is None and not _backend.compiled):
        impl = _backend.fallback
    else:
        impl = _backend.kernels
    idx, radii, cover = impl.maxmin(x, int(target), int(seed_index))
    out = (x[idx], float(cover))
    return out + (np.asarray(idx), np.asarray(radii)) if return_indices else out
