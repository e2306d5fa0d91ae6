"""Geometry of the probability simplex.

Points of the simplex are plain float64 numpy arrays. ``make_simplex`` is the
validating constructor; everything else accepts anything array-like and
assumes it already lies on the simplex.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionTooSmall, NotOnSimplex

CLAMP_TOL = 1e-12
SUM_TOL = 1e-9


def make_simplex(x, sum_tol=SUM_TOL):
    """Validate ``x`` as a point of the simplex and return a read-only copy.

    Coordinates in ``[-1e-12, 0)`` are clamped to zero; anything more
    negative, or a coordinate sum off by more than ``sum_tol``, raises
    :class:`NotOnSimplex`.
    """
    v = np.array(x, dtype=float)
    if v.ndim != 1 or v.size < 1:
        raise NotOnSimplex(f"expected a non-empty 1-d vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise NotOnSimplex("coordinates must be finite")
    if v.min() < -CLAMP_TOL:
        raise NotOnSimplex(f"negative coordinate {v.min():.3g}")
    v[v < 0] = 0.0
    if abs(v.sum() - 1.0) > sum_tol:
        raise NotOnSimplex(f"coordinates sum to {v.sum():.12g}")
    v.flags.writeable = False
    return v


def check_simplex_rows(V, sum_tol=SUM_TOL):
    """Row-wise version of :func:`make_simplex` for an ``(n, k)`` array."""
    V = np.array(V, dtype=float, ndmin=2)
    if V.ndim != 2 or V.shape[1] < 1:
        raise NotOnSimplex(f"expected an (n, k) array, got shape {V.shape}")
    if not np.all(np.isfinite(V)):
        raise NotOnSimplex("coordinates must be finite")
    if V.size and V.min() < -CLAMP_TOL:
        raise NotOnSimplex(f"negative coordinate {V.min():.3g}")
    V[V < 0] = 0.0
    bad = np.abs(V.sum(axis=1) - 1.0) > sum_tol
    if np.any(bad):
        i = int(np.flatnonzero(bad)[0])
        raise NotOnSimplex(f"row {i} sums to {V[i].sum():.12g}")
    return V


def one_hot(labels, k):
    """Expand integer labels in ``[0, k)`` into rows of the identity."""
    labels = np.asarray(labels, dtype=int)
    if labels.size and (labels.min() < 0 or labels.max() >= k):
        raise ValueError(f"labels must lie in [0, {k})")
    return np.eye(k)[labels]


def project_to_simplex(x):
    """Euclidean projection onto the simplex (sort-and-threshold).

    Works on a single vector or row-wise on an ``(n, k)`` array.
    """
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    X = np.atleast_2d(x)
    k = X.shape[1]
    U = -np.sort(-X, axis=1)
    css = np.cumsum(U, axis=1) - 1.0
    ind = np.arange(1, k + 1)
    cond = U - css / ind > 0
    rho = k - 1 - np.argmax(cond[:, ::-1], axis=1)
    theta = css[np.arange(X.shape[0]), rho] / (rho + 1)
    P = np.maximum(X - theta[:, None], 0.0)
    return P[0] if single else P


def lift(v):
    """Map ``v`` to ``v/3 + e_1/3 + e_2/3``; rows are lifted independently."""
    v = np.asarray(v, dtype=float)
    if v.shape[-1] < 2:
        raise DimensionTooSmall("lift needs k >= 2")
    out = v / 3.0
    out[..., 0] += 1.0 / 3.0
    out[..., 1] += 1.0 / 3.0
    return out


def l1_distances(A, B):
    """Pairwise l1 distances between the rows of ``A`` and ``B``."""
    A = np.atleast_2d(A)
    B = np.atleast_2d(B)
    return np.abs(A[:, None, :] - B[None, :, :]).sum(axis=-1)


def sample_simplex(rng, n, k, alpha=1.0):
    """``n`` Dirichlet(alpha) draws; a scalar ``alpha`` means a symmetric prior."""
    alpha = np.broadcast_to(np.asarray(alpha, dtype=float), (k,))
    return rng.dirichlet(alpha, size=n)


@dataclass(frozen=True)
class Packing:
    points: np.ndarray
    eps: float
    k: int

    def __len__(self):
        return len(self.points)

    def min_pairwise_distance(self):
        if len(self.points) < 2:
            return np.inf
        D = l1_distances(self.points, self.points)
        return D[np.triu_indices(len(self.points), 1)].min()

    def min_vertex_distance(self):
        if len(self.points) == 0:
            return np.inf
        # ||v - e_i||_1 = 2 (1 - v_i)
        return 2.0 * (1.0 - self.points.max())


VERTEX_MARGIN = 1.0 / 3.0


def greedy_packing(k, eps, candidate_budget=None, seed=0, batch=256):
    """Randomized greedy l1 packing of the simplex.

    Candidates are flat-Dirichlet draws. A candidate is admitted when it is at
    l1 distance at least ``eps`` from every admitted point and at least 1/3
    from every vertex. The loop stops after ``candidate_budget`` consecutive
    rejections; by default the budget is ``10 * len(packing) + 1000`` and is
    re-evaluated as the packing grows.

    For large ``eps`` and tiny ``k`` the packing may come back empty; that is
    a legitimate answer, not an error.
    """
    if k < 2:
        raise DimensionTooSmall("greedy_packing needs k >= 2")
    if not 0 < eps < 0.5:
        raise ValueError("eps must lie in (0, 1/2)")
    rng = np.random.default_rng(seed)
    # a vertex distance >= 1/3 is the same as every coordinate <= 5/6
    max_coord = 1.0 - VERTEX_MARGIN / 2.0
    points = np.empty((0, k))
    rejections = 0
    while True:
        budget = candidate_budget if candidate_budget is not None else 10 * len(points) + 1000
        if rejections >= budget:
            break
        for c in sample_simplex(rng, batch, k):
            if c.max() > max_coord or (
                len(points) and np.abs(points - c).sum(axis=1).min() < eps
            ):
                rejections += 1
            else:
                points = np.vstack([points, c])
                rejections = 0
            budget = candidate_budget if candidate_budget is not None else 10 * len(points) + 1000
            if rejections >= budget:
                break
    points.flags.writeable = False
    return Packing(points=points, eps=float(eps), k=int(k))


def sample_categorical(rng, P):
    """One categorical draw per row of ``P`` (rows need not be normalized)."""
    P = np.atleast_2d(P)
    cdf = np.cumsum(P, axis=1)
    u = rng.random(P.shape[0]) * cdf[:, -1]
    return np.minimum((cdf < u[:, None]).sum(axis=1), P.shape[1] - 1)
