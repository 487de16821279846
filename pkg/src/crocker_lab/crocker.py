"""Betti vectors on a shared partition and CROCKER matrices over a sweep."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import NoFiniteBars, ParseError
from .persistence import PersistenceDiagram, betti_numbers

DEFAULT_BINS = 100
DISPLAY_CAP = 6
BLANK = -1  # sentinel for clipped display cells


@dataclass(frozen=True)
class Partition:
    values: np.ndarray

    @property
    def bins(self) -> int:
        return len(self.values) - 1

    @property
    def max_value(self) -> float:
        return float(self.values[-1])

    @property
    def step(self) -> float:
        return self.max_value / self.bins


@dataclass(frozen=True)
class CrockerMatrix:
    """``cells[i, j]`` is the Betti number at ``partition.values[i]`` for
    control value ``etas[j]``."""

    dim: int
    partition: Partition
    etas: np.ndarray
    cells: np.ndarray


def uniform_partition(max_value: float, bins: int = DEFAULT_BINS) -> Partition:
    if bins < 1:
        raise ValueError("bins must be >= 1")
    return Partition(np.linspace(0.0, max_value, bins + 1))


def global_partition(diagrams: Sequence[PersistenceDiagram], bins: int = DEFAULT_BINS) -> Partition:
    """Split ``[0, M]`` into ``bins`` equal pieces, ``M`` being the largest
    finite death over all diagrams."""
    deaths = [d.deaths[np.isfinite(d.deaths)] for d in diagrams]
    finite = np.concatenate(deaths) if deaths else np.empty(0)
    if finite.size == 0:
        raise NoFiniteBars("no finite bar in any diagram")
    return uniform_partition(float(finite.max()), bins)


def betti_vector(diagram: PersistenceDiagram, partition: Partition) -> np.ndarray:
    return betti_numbers(diagram, partition.values)


def crocker_matrix(diagrams: Sequence[PersistenceDiagram], partition: Partition,
                   etas=None) -> CrockerMatrix:
    if len({d.dim for d in diagrams}) > 1:
        raise ValueError("diagrams must share one homology dimension")
    dim = diagrams[0].dim if diagrams else 0
    etas = np.arange(len(diagrams), dtype=float) if etas is None else np.asarray(etas, float)
    cells = np.zeros((len(partition.values), len(diagrams)), dtype=np.int64)
    for j, dgm in enumerate(diagrams):
        cells[:, j] = betti_vector(dgm, partition)
    return CrockerMatrix(dim, partition, etas, cells)


def l1_norm(vector) -> int:
    return int(np.asarray(vector, dtype=np.int64).sum())


def l1_norms(matrix: CrockerMatrix) -> np.ndarray:
    return matrix.cells.sum(axis=0)


def clip_for_display(matrix, cap: int = DISPLAY_CAP) -> np.ndarray:
    """Copy of the cells with values above ``cap`` replaced by ``BLANK``."""
    if cap < 1:
        raise ValueError("cap must be >= 1")
    cells = matrix.cells if isinstance(matrix, CrockerMatrix) else np.asarray(matrix)
    out = np.array(cells, dtype=np.int64, copy=True)
    out[out > cap] = BLANK
    return out


# ------------------------------------------------------------------ CSV

def _fmt(v: float) -> str:
    return repr(float(v))


def crocker_to_csv(matrix: CrockerMatrix, transpose: bool = False) -> str:
    """Default layout: first row holds the eps values after a blank cell,
    then one row per control value.  ``transpose`` swaps the axes."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    eps = matrix.partition.values
    if not transpose:
        w.writerow([""] + [_fmt(e) for e in eps])
        for j, eta in enumerate(matrix.etas):
            w.writerow([_fmt(eta)] + [str(int(v)) for v in matrix.cells[:, j]])
    else:
        w.writerow([""] + [_fmt(e) for e in matrix.etas])
        for i, e in enumerate(eps):
            w.writerow([_fmt(e)] + [str(int(v)) for v in matrix.cells[i, :]])
    return buf.getvalue()


def crocker_from_csv(text: str, dim: int = 0, transpose: bool = False) -> CrockerMatrix:
    try:
        rows = [r for r in csv.reader(io.StringIO(text)) if r]
        if not rows or rows[0][0] != "":
            raise ParseError("CROCKER CSV must start with a blank cell")
        head = np.array([float(v) for v in rows[0][1:]])
        labels = np.array([float(r[0]) for r in rows[1:]])
        body = np.array([[int(v) for v in r[1:]] for r in rows[1:]], dtype=np.int64)
    except (ValueError, IndexError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"malformed CROCKER CSV: {exc}") from exc
    if body.size and body.shape[1] != head.size:
        raise ParseError("row length does not match header")
    if transpose:
        eps, etas, cells = labels, head, body.reshape(len(labels), len(head))
    else:
        eps, etas, cells = head, labels, body.reshape(len(labels), len(head)).T
    return CrockerMatrix(dim, Partition(eps), etas, cells)
