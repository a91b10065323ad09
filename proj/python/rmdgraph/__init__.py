"""Rank-modulated degree graphs.

Density-adaptive graph construction for clustering and semi-supervised
learning on unbalanced data, plus the baseline graphs (k-NN, epsilon,
full-RBF, b-matching), cut metrics and their large-sample limits.
"""

from ._rmdgraph import *  # noqa: F401,F403
from ._rmdgraph import __doc__ as _core_doc  # noqa: F401

__all__ = [name for name in dir() if not name.startswith("_")]
