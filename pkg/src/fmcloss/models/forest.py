"""Random forest regression with per-sample weights.

Weights enter the split criterion and leaf means; bootstrap resampling is
uniform over rows. Each tree sees a random fraction of the predictors.
"""
from dataclasses import asdict, dataclass

import numpy as np

from .tree import VARIANCE, Tree, presort


@dataclass(frozen=True)
class ForestParams:
    n_estimators: int = 50
    max_depth: int = 8
    min_samples_split: int = 2
    min_samples_leaf: int = 1
    max_features: float = 0.8
    bootstrap: bool = True


@dataclass(frozen=True, eq=False)
class ForestModel:
    trees: tuple
    params: ForestParams
    n_features: int

    family = "forest"

    def predict(self, X, backend=None):
        X = np.ascontiguousarray(X, dtype=np.float64)
        if len(X) == 0:
            return np.empty(0)
        return np.mean([t.predict(X, backend) for t in self.trees], axis=0)

    def to_dict(self):
        return {"family": self.family, "params": asdict(self.params),
                "n_features": self.n_features, "trees": [t.to_dict() for t in self.trees]}

    @classmethod
    def from_dict(cls, d):
        return cls(tuple(Tree.from_dict(t) for t in d["trees"]), ForestParams(**d["params"]),
                   int(d["n_features"]))


def n_features_per_tree(fraction, p):
    if isinstance(fraction, float) and fraction <= 1.0:
        return max(1, int(fraction * p))
    return min(p, max(1, int(fraction)))


def fit_forest(X, y, w, seed=0, params=None, sorted_rows=None, backend=None):
    params = params or ForestParams()
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    n, p = X.shape
    if n == 0:
        raise ValueError("cannot fit a forest on an empty dataset")
    if n < params.min_samples_split:
        raise ValueError(f"need at least min_samples_split={params.min_samples_split} rows")
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise ValueError("weights must be finite and non-negative")
    if not np.any(w > 0):
        raise ValueError("all sample weights are zero")
    if sorted_rows is None:
        sorted_rows = presort(X)
    k = n_features_per_tree(params.max_features, p)
    trees = []
    for stream in np.random.SeedSequence(seed).spawn(params.n_estimators):
        rng = np.random.default_rng(stream)
        if params.bootstrap:
            counts = np.bincount(rng.integers(0, n, n), minlength=n).astype(np.float64)
        else:
            counts = np.ones(n)
        feats = np.sort(rng.choice(p, size=k, replace=False)).astype(np.intp)
        bw = counts * w
        include = bw > 0
        if not include.any():
            raise ValueError("bootstrap sample carries no weight")
        trees.append(Tree.grow(X, sorted_rows, feats, include, bw * y, bw, VARIANCE,
                               max_depth=params.max_depth,
                               min_samples_split=params.min_samples_split,
                               min_samples_leaf=params.min_samples_leaf, backend=backend))
    return ForestModel(tuple(trees), params, p)
