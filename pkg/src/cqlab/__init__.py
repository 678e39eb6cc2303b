"""cqlab: critical-edge combinatorics and query-complexity bounds for clique
and dense-subgraph search in G(n, 1/2)."""

from .common import INFINITE
from ._kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["INFINITE", "BACKEND", "__version__"]
