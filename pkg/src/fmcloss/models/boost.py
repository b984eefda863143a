"""Second-order gradient boosted trees driven by the weighted squared-error loss."""
from dataclasses import asdict, dataclass

import numpy as np

from ..loss import grad_hess, weighted_mse
from .tree import NEWTON, Tree, presort


@dataclass(frozen=True)
class BoostParams:
    max_depth: int = 4
    eta: float = 0.1
    min_child_weight: float = 1.0
    subsample: float = 0.8
    colsample_bytree: float = 0.9
    n_estimators: int = 120
    gamma: float = 0.1
    reg_lambda: float = 1.0


@dataclass(frozen=True, eq=False)
class BoostModel:
    base_score: float
    trees: tuple
    params: BoostParams
    n_features: int
    history: tuple = ()

    family = "boost"

    def predict(self, X, backend=None):
        X = np.ascontiguousarray(X, dtype=np.float64)
        out = np.full(len(X), self.base_score)
        if len(X) == 0:
            return out
        for t in self.trees:
            out += self.params.eta * t.predict(X, backend)
        return out

    def to_dict(self):
        return {"family": self.family, "base_score": self.base_score,
                "params": asdict(self.params), "n_features": self.n_features,
                "trees": [t.to_dict() for t in self.trees]}

    @classmethod
    def from_dict(cls, d):
        return cls(float(d["base_score"]), tuple(Tree.from_dict(t) for t in d["trees"]),
                   BoostParams(**d["params"]), int(d["n_features"]))


def fit_boost(X, y, w, seed=0, params=None, sorted_rows=None, backend=None, record_loss=False):
    """Fit ``n_estimators`` Newton-step trees to the weighted squared error.

    ``w`` are the loss weights for each training row. With ``record_loss`` the
    training weighted MSE before the first and after every round is kept in
    ``history``.
    """
    params = params or BoostParams()
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    n, p = X.shape
    if n == 0:
        raise ValueError("cannot fit on an empty dataset")
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise ValueError("weights must be finite and non-negative")
    if not np.any(w > 0):
        raise ValueError("all sample weights are zero")
    if sorted_rows is None:
        sorted_rows = presort(X)
    base = float(np.sum(w * y) / np.sum(w))
    pred = np.full(n, base)
    k = max(1, int(params.colsample_bytree * p))
    all_feats = np.arange(p, dtype=np.intp)
    trees = []
    history = [weighted_mse(y, pred, w)] if record_loss else []
    for stream in np.random.SeedSequence(seed).spawn(params.n_estimators):
        rng = np.random.default_rng(stream)
        g, h = grad_hess(y, pred, w)
        if not (np.all(np.isfinite(g)) and np.all(np.isfinite(h))):
            raise FloatingPointError("non-finite gradient or hessian")
        include = rng.random(n) < params.subsample if params.subsample < 1 else np.ones(n, bool)
        feats = (np.sort(rng.choice(p, size=k, replace=False)).astype(np.intp)
                 if k < p else all_feats)
        if not include.any():
            include[rng.integers(n)] = True
        tree = Tree.grow(X, sorted_rows, feats, include, g, h, NEWTON, max_depth=params.max_depth,
                         min_child_weight=params.min_child_weight,
                         reg_lambda=params.reg_lambda, gamma=params.gamma, backend=backend)
        trees.append(tree)
        pred += params.eta * tree.predict(X, backend)
        if record_loss:
            history.append(weighted_mse(y, pred, w))
    return BoostModel(base, tuple(trees), params, p, tuple(history))
