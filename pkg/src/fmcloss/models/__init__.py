"""Model families trained under arbitrary per-sample weights."""
import json

import numpy as np

from .boost import BoostModel, BoostParams, fit_boost
from .forest import ForestModel, ForestParams, fit_forest
from .linear import LinearModel, SingularDesignError, fit_linear
from .tree import BACKEND

FAMILIES = ("linear", "forest", "boost")
_CLASSES = {"linear": LinearModel, "forest": ForestModel, "boost": BoostModel}

__all__ = [
    "BACKEND", "BoostModel", "BoostParams", "FAMILIES", "ForestModel", "ForestParams",
    "LinearModel", "SingularDesignError", "fit_boost", "fit_forest", "fit_linear",
    "fit_model", "load_model", "predict", "save_model",
]


def fit_model(family, X, y, w, seed=0, forest_params=None, boost_params=None, sorted_rows=None):
    if family == "linear":
        return fit_linear(X, y, w)
    if family == "forest":
        return fit_forest(X, y, w, seed, forest_params, sorted_rows)
    if family == "boost":
        return fit_boost(X, y, w, seed, boost_params, sorted_rows)
    raise ValueError(f"unknown model family {family!r}")


def predict(model, X):
    X = np.asarray(X, dtype=np.float64)
    if X.size == 0:
        return np.empty(0)
    if X.ndim != 2 or X.shape[1] != model.n_features:
        raise ValueError(f"expected {model.n_features} features, got shape {X.shape}")
    return model.predict(X)


def save_model(model, path):
    with open(path, "w") as fh:
        json.dump(model.to_dict(), fh)


def load_model(path):
    with open(path) as fh:
        d = json.load(fh)
    try:
        cls = _CLASSES[d["family"]]
    except KeyError as exc:
        raise ValueError(f"unknown model family in {path}") from exc
    return cls.from_dict(d)
