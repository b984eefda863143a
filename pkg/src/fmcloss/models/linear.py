"""Weighted least-squares linear regression."""
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from ..features import FEATURES, N_FEATURES


class SingularDesignError(ValueError):
    """The weighted design matrix does not have full column rank."""

    def __init__(self, columns):
        self.columns = list(columns)
        super().__init__(f"design is rank deficient; collinear column(s): {', '.join(self.columns)}")


@dataclass(frozen=True, eq=False)
class LinearModel:
    intercept: float
    coefficients: np.ndarray
    noise_variance: float

    family = "linear"

    @property
    def n_features(self):
        return len(self.coefficients)

    def predict(self, X):
        return self.intercept + np.asarray(X, dtype=np.float64) @ self.coefficients

    def to_dict(self):
        return {"family": self.family, "intercept": self.intercept,
                "coefficients": self.coefficients.tolist(),
                "noise_variance": self.noise_variance}

    @classmethod
    def from_dict(cls, d):
        return cls(float(d["intercept"]), np.asarray(d["coefficients"], dtype=np.float64),
                   float(d["noise_variance"]))


def _column_names(p):
    names = list(FEATURES) if p == N_FEATURES else [f"x{i}" for i in range(p)]
    return ["intercept"] + names


def fit_linear(X, y, w, drop_collinear=False):
    """Minimise sum w_i (y_i - b0 - x_i.b)^2 by pivoted QR of the sqrt(w)-scaled design.

    A rank-deficient design raises :class:`SingularDesignError` naming the
    offending columns, unless ``drop_collinear`` is set, in which case those
    columns get a zero coefficient and the rest are fitted as usual.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    n, p = X.shape
    if y.shape != (n,) or w.shape != (n,):
        raise ValueError("X, y and w disagree in length")
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise ValueError("weights must be finite and non-negative")
    n_pos = int((w > 0).sum())
    if n_pos < p + 1 and not drop_collinear:
        raise ValueError(f"need at least {p + 1} positively weighted rows, got {n_pos}")
    if n_pos == 0:
        raise ValueError("all weights are zero")
    sw = np.sqrt(w)
    Z = np.column_stack([np.ones(n), X]) * sw[:, None]
    rhs = sw * y
    Q, R, piv = scipy.linalg.qr(Z, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    tol = max(Z.shape) * np.finfo(float).eps * diag[0]
    rank = int((diag > tol).sum())
    beta = np.zeros(p + 1)
    if rank < p + 1:
        if not drop_collinear:
            names = _column_names(p)
            raise SingularDesignError(names[i] for i in sorted(piv[rank:]))
        keep = np.sort(piv[:rank])
        Q, R = scipy.linalg.qr(Z[:, keep], mode="economic")
        beta[keep] = scipy.linalg.solve_triangular(R, Q.T @ rhs)
    else:
        beta[piv] = scipy.linalg.solve_triangular(R, Q.T @ rhs)
    resid = y - beta[0] - X @ beta[1:]
    dof = n_pos - rank
    sigma2 = float(np.sum(w * resid * resid) / dof) if dof > 0 else 0.0
    return LinearModel(float(beta[0]), beta[1:].copy(), sigma2)
