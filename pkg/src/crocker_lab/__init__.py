"""Betti-vector summaries (CROCKER plots) of attractors across parameter
sweeps, compared with maximum Lyapunov exponents."""
from ._backend import compiled, name as backend
from .crocker import CrockerMatrix, Partition, crocker_matrix, global_partition, l1_norm
from .dynamics import SystemSpec, catalog, get_system, integrate
from .lyapunov import LyapunovEstimate, benettin_mle, divergence_curve, rosenstein_mle
from .persistence import (PersistenceDiagram, betti_curve, betti_curve_integral,
                          cloud_persistence, rips_persistence, wasserstein_distance,
                          wasserstein_to_empty)
from .subsample import greedy_maxmin

__version__ = "0.1.0"
