"""Empirical distributions of (prediction, outcome) pairs."""

from dataclasses import dataclass

import numpy as np

from .simplex import check_simplex_rows, one_hot

WEIGHT_TOL = 1e-9


@dataclass(frozen=True)
class EmpiricalDistribution:
    """Weighted sample of predictions ``V`` (n x k) and integer labels.

    Weights default to uniform and must sum to one.
    """

    V: np.ndarray
    labels: np.ndarray
    weights: np.ndarray = None

    def __post_init__(self):
        V = check_simplex_rows(self.V)
        labels = np.asarray(self.labels, dtype=int).reshape(-1)
        n, k = V.shape
        if n == 0:
            raise ValueError("empirical distribution must be non-empty")
        if labels.shape[0] != n:
            raise ValueError("one label per prediction")
        if labels.min() < 0 or labels.max() >= k:
            raise ValueError(f"labels must lie in [0, {k})")
        if self.weights is None:
            w = np.full(n, 1.0 / n)
        else:
            w = np.asarray(self.weights, dtype=float).reshape(-1)
            if w.shape[0] != n or np.any(w < 0) or not np.all(np.isfinite(w)):
                raise ValueError("weights must be n finite non-negative numbers")
            if abs(w.sum() - 1.0) > WEIGHT_TOL:
                raise ValueError(f"weights sum to {w.sum():.12g}, expected 1")
        for a in (V, labels, w):
            a.flags.writeable = False
        object.__setattr__(self, "V", V)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "weights", w)

    @property
    def n(self):
        return self.V.shape[0]

    @property
    def k(self):
        return self.V.shape[1]

    @property
    def Y(self):
        return one_hot(self.labels, self.k)

    @property
    def residuals(self):
        return self.Y - self.V

    def correlation(self, W):
        """Weighted mean of ``<y - v, W_i>`` for witness values ``W`` (n x k)."""
        return float(self.weights @ np.sum(self.residuals * W, axis=1))

    def subset(self, idx):
        idx = np.asarray(idx)
        w = self.weights[idx]
        return EmpiricalDistribution(self.V[idx], self.labels[idx], w / w.sum())

    def with_predictions(self, V):
        return EmpiricalDistribution(V, self.labels, self.weights)

    @classmethod
    def from_records(cls, records):
        """Build from ``(v, y)`` or ``(v, y, w)`` tuples; weights are normalized."""
        records = list(records)
        V = np.array([r[0] for r in records], dtype=float)
        labels = np.array([r[1] for r in records], dtype=int)
        if records and len(records[0]) > 2:
            w = np.array([r[2] for r in records], dtype=float)
            return cls(V, labels, w / w.sum())
        return cls(V, labels)


def aggregate(emp):
    """Group samples by identical prediction vector.

    Returns ``(U, R, mass)``: the distinct predictions (sorted
    lexicographically), the summed weighted residual ``sum_i w_i (y_i - v_i)``
    of each group, and each group's total weight. Every weighted calibration
    error depends on the data only through these.
    """
    U, inverse = np.unique(emp.V, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    R = np.zeros_like(U)
    np.add.at(R, inverse, emp.weights[:, None] * emp.residuals)
    mass = np.bincount(inverse, weights=emp.weights, minlength=U.shape[0])
    return U, R, mass
