"""Regression-tree container and kernel backend selection.

The compiled kernel is used when it imports; set ``FMCLOSS_PURE_PYTHON=1`` to
force the numpy fallback.
"""
import os
from dataclasses import dataclass

import numpy as np

from . import _tree_py

VARIANCE = _tree_py.VARIANCE
NEWTON = _tree_py.NEWTON

_ext = None
if os.environ.get("FMCLOSS_PURE_PYTHON") != "1":
    try:
        from . import _tree_ext as _ext
    except ImportError:  # extension not built
        _ext = None

BACKEND = "cython" if _ext is not None else "python"
_impl = _ext if _ext is not None else _tree_py


def kernels(backend=None):
    """Return the kernel module for ``backend`` ('cython', 'python' or None for active)."""
    if backend is None:
        return _impl
    if backend == "python":
        return _tree_py
    if backend == "cython":
        if _ext is None:
            raise ImportError("compiled tree kernel is not available")
        return _ext
    raise ValueError(f"unknown backend {backend!r}")


def presort(X):
    """Stable per-feature argsort of the rows of ``X``, shape ``(p, n)``."""
    return np.ascontiguousarray(np.argsort(X, axis=0, kind="stable").T, dtype=np.intp)


@dataclass(frozen=True)
class Tree:
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    @classmethod
    def grow(cls, X, sorted_rows, features, include, a, b, criterion, *, max_depth,
             min_samples_split=2, min_samples_leaf=1, min_child_weight=0.0, reg_lambda=0.0,
             gamma=0.0, backend=None):
        """Grow a tree on the rows flagged in ``include`` (see ``_tree_py.grow_tree``)."""
        arrays = kernels(backend).grow_tree(
            X, sorted_rows, features, include, a, b, criterion, int(max_depth), int(min_samples_split),
            int(min_samples_leaf), float(min_child_weight), float(reg_lambda), float(gamma))
        return cls(*arrays)

    @property
    def n_nodes(self):
        return len(self.feature)

    @property
    def depth(self):
        depth = np.zeros(self.n_nodes, dtype=int)
        for node in range(self.n_nodes):  # preorder: parents precede children
            if self.feature[node] >= 0:
                depth[self.left[node]] = depth[node] + 1
                depth[self.right[node]] = depth[node] + 1
        return int(depth.max())

    def apply(self, X, backend=None):
        X = np.ascontiguousarray(X, dtype=np.float64)
        return kernels(backend).apply_tree(X, self.feature, self.threshold, self.left, self.right)

    def predict(self, X, backend=None):
        return self.value[self.apply(X, backend)]

    def to_dict(self):
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            np.asarray(d["feature"], dtype=np.intp),
            np.asarray(d["threshold"], dtype=np.float64),
            np.asarray(d["left"], dtype=np.intp),
            np.asarray(d["right"], dtype=np.intp),
            np.asarray(d["value"], dtype=np.float64),
        )
