"""Independent reference implementations used to check the library.

None of these call the code under test. They trade speed for simplicity,
for example grids in place of dynamic programs.
"""

import itertools
import math

import numpy as np
from scipy.ndimage import maximum_filter1d


def bisect_projection(x, iters=200):
    """Simplex projection by bisection on the threshold of ``max(x - theta, 0)``."""
    x = np.asarray(x, dtype=float)
    lo, hi = x.min() - 1.0, x.max()
    for _ in range(iters):
        mid = (lo + hi) / 2
        if np.maximum(x - mid, 0).sum() > 1:
            lo = mid
        else:
            hi = mid
    return np.maximum(x - (lo + hi) / 2, 0)


def features(v, d):
    """Monomial features by enumerating index tuples directly."""
    v = np.asarray(v, dtype=float)
    out = []
    for length in range(d + 1):
        for idx in itertools.product(range(len(v)), repeat=length):
            out.append(np.prod(v[list(idx)]) if idx else 1.0)
    return np.array(out)


def dual_norm_explicit(anchors, coeffs, d, scale=1.0):
    theta = sum(c * features(a, d) for a, c in zip(anchors, coeffs))
    return abs(scale) * float(np.linalg.norm(theta))


def grid_smooth_scalar(t, c, step=1e-3):
    """Grid DP for ``max sum c_i phi_i`` with ``|phi_i - phi_j| <= |t_i - t_j|``, ``|phi| <= 1``.

    ``phi`` is restricted to a grid of the given step; neighbouring grid
    values may differ by at most ``floor(gap / step)`` cells, which never
    exceeds the true constraint, so the result is a lower bound.
    """
    order = np.argsort(t, kind="stable")
    t, c = np.asarray(t, float)[order], np.asarray(c, float)[order]
    grid = np.linspace(-1, 1, int(round(2 / step)) + 1)
    F = c[0] * grid
    for i in range(1, len(t)):
        radius = int(math.floor((t[i] - t[i - 1]) / step + 1e-9))
        F = maximum_filter1d(F, size=2 * radius + 1, mode="nearest") + c[i] * grid
    return float(F.max())


def _envelope_value(hA, cA, cB, DAB, upper):
    """Objective when the B group is set to its best envelope given A."""
    if upper:
        hB = np.minimum(1.0, np.min(hA[..., :, None] + DAB, axis=-2))
    else:
        hB = np.maximum(-1.0, np.max(hA[..., :, None] - DAB, axis=-2))
    return (hA * cA).sum(axis=-1) + (hB * cB).sum(axis=-1)


def lipschitz_bruteforce(c, D, step=1e-3):
    """``max c.h`` over ``|h_i - h_j| <= D_ij``, ``|h| <= 1`` for up to ~6 points.

    Points with ``c = 0`` are dropped (a Lipschitz extension always exists).
    The smaller sign group ``A`` is gridded except for its last member, which
    is solved exactly over its breakpoints; the other group takes its optimal
    envelope ``min(1, min_a h_a + D)`` (or the mirrored max form).
    """
    c = np.asarray(c, dtype=float)
    pos, neg = np.flatnonzero(c > 0), np.flatnonzero(c < 0)
    if len(pos) == 0 or len(neg) == 0:
        return float(np.abs(c).sum())
    A, B = (pos, neg) if len(pos) <= len(neg) else (neg, pos)
    upper = c[B[0]] > 0
    cA, cB = c[A], c[B]
    DAA, DAB = D[np.ix_(A, A)], D[np.ix_(A, B)]
    grid = np.linspace(-1, 1, int(round(2 / step)) + 1)
    m = len(A)
    # grid the first m-1 members of A
    if m > 1:
        mesh = np.stack(np.meshgrid(*([grid] * (m - 1)), indexing="ij"), axis=-1).reshape(-1, m - 1)
        ok = np.ones(len(mesh), dtype=bool)
        for i, j in itertools.combinations(range(m - 1), 2):
            ok &= np.abs(mesh[:, i] - mesh[:, j]) <= DAA[i, j] + 1e-12
        mesh = mesh[ok]
    else:
        mesh = np.zeros((1, 0))
    last = m - 1
    lo = np.full(len(mesh), -1.0)
    hi = np.full(len(mesh), 1.0)
    for i in range(m - 1):
        lo = np.maximum(lo, mesh[:, i] - DAA[i, last])
        hi = np.minimum(hi, mesh[:, i] + DAA[i, last])
    feasible = lo <= hi + 1e-12
    mesh, lo, hi = mesh[feasible], lo[feasible], hi[feasible]
    # breakpoints of the last member's concave objective
    cands = [lo, hi]
    for b in range(len(B)):
        bound = 1.0 if upper else -1.0
        others = [mesh[:, i] + (DAB[i, b] if upper else -DAB[i, b]) for i in range(m - 1)]
        for target in [np.full(len(mesh), bound)] + others:
            cands.append(target - DAB[last, b] if upper else target + DAB[last, b])
    best = -np.inf
    for x in cands:
        x = np.clip(x, lo, hi)
        hA = np.column_stack([mesh, x])
        best = max(best, float(_envelope_value(hA, cA, cB, DAB, upper).max()))
    return best


def fsce_bruteforce(U, R, step=1e-3):
    D = np.abs(U[:, None, :] - U[None, :, :]).sum(axis=-1)
    return sum(lipschitz_bruteforce(R[:, ell], D, step) for ell in range(U.shape[1]))


def group_residuals(V, labels, weights):
    """Distinct rows and their summed weighted residuals, via a dictionary."""
    groups = {}
    k = V.shape[1]
    for v, y, w in zip(V, labels, weights):
        key = tuple(v)
        r = -w * np.asarray(v, dtype=float)
        r[y] += w
        groups[key] = groups.get(key, np.zeros(k)) + r
    keys = sorted(groups)
    return np.array(keys), np.array([groups[key] for key in keys])


def decision_by_directions(U, R, n_dirs=20000, seed=0):
    """Best halfspace split of the rows of ``U`` found by random directions."""
    rng = np.random.default_rng(seed)
    best = float(np.linalg.norm(R.sum(axis=0)))
    for a in rng.standard_normal((n_dirs, U.shape[1])):
        proj = U @ a
        order = np.argsort(proj)
        cum = np.cumsum(R[order], axis=0)
        total = cum[-1]
        for j in range(len(order) - 1):
            if proj[order[j + 1]] - proj[order[j]] > 1e-12:
                best = max(best, float(np.linalg.norm(cum[j]) + np.linalg.norm(total - cum[j])))
    return best


def min_norm_on_simplex(p_coeffs, a, d, k, n_points=400, seed=0):
    """Smallest feature-space norm of ``v -> p(a.v)`` restricted to the simplex.

    The natural representation puts ``eta_i a^{(x)i}`` in the degree-i block;
    projecting it onto the span of sampled simplex features gives the
    minimum-norm representation that agrees on the simplex.
    """
    theta = np.concatenate([p_coeffs[i] * features_tensor(a, i) for i in range(d + 1)])
    V = np.random.default_rng(seed).dirichlet(np.ones(k), size=n_points)
    Psi = np.array([features(v, d) for v in V])
    proj = np.linalg.pinv(Psi) @ (Psi @ theta)
    return float(np.linalg.norm(proj)), float(np.linalg.norm(theta))


def features_tensor(a, i):
    a = np.asarray(a, dtype=float)
    return np.array([np.prod(a[list(idx)]) if idx else 1.0
                     for idx in itertools.product(range(len(a)), repeat=i)])


def smooth_scalar_lp(t, c):
    """The scalar smooth-calibration LP with every pairwise constraint, via HiGHS."""
    from scipy.optimize import linprog

    t, c = np.asarray(t, float), np.asarray(c, float)
    n = len(t)
    rows, rhs = [], []
    for i, j in itertools.combinations(range(n), 2):
        for sgn in (1.0, -1.0):
            row = np.zeros(n)
            row[i], row[j] = sgn, -sgn
            rows.append(row)
            rhs.append(abs(t[i] - t[j]))
    res = linprog(-c, A_ub=np.array(rows) if rows else None, b_ub=rhs or None,
                  bounds=[(-1, 1)] * n, method="highs")
    return float(-res.fun)


def ssce_lp(V, labels, weights, m):
    U, R = group_residuals(V, labels, weights)
    best = 0.0
    for size in range(1, m + 1):
        for T in itertools.combinations(range(U.shape[1]), size):
            best = max(best, smooth_scalar_lp(U[:, T].sum(axis=1), R[:, T].sum(axis=1)))
    return best
