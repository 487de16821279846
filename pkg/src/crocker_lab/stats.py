"""Pearson and Spearman correlation with average ranks for ties."""
from __future__ import annotations

import math

import numpy as np

from .errors import ZeroVariance


def paired(x, y):
    """Drop positions where either value is missing; returns (x, y, n_dropped)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ValueError("series must have equal length")
    ok = np.isfinite(x) & np.isfinite(y)
    return x[ok], y[ok], int((~ok).sum())


def pearson(x, y) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.size < 2:
        raise ValueError("need two equal-length series of at least 2 values")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = math.fsum((dx * dx).tolist())
    syy = math.fsum((dy * dy).tolist())
    if sxx == 0.0 or syy == 0.0:
        raise ZeroVariance("correlation undefined for a constant series")
    r = math.fsum((dx * dy).tolist()) / (math.sqrt(sxx) * math.sqrt(syy))
    return max(-1.0, min(1.0, r))


def rank(values) -> np.ndarray:
    """1-based ranks; tied values share the mean of their rank range."""
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise ValueError("cannot rank an empty series")
    order = np.argsort(v, kind="mergesort")
    ranks = np.empty(v.size)
    sv = v[order]
    start = 0
    for stop in range(1, v.size + 1):
        if stop == v.size or sv[stop] != sv[start]:
            ranks[order[start:stop]] = 0.5 * (start + stop - 1) + 1.0
            start = stop
    return ranks


def spearman(x, y) -> float:
    return pearson(rank(x), rank(y))
