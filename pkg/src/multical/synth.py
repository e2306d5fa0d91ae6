"""Synthetic distributions: calibrated baselines and planted violations.

Every generator can return either ``n`` sampled rows or, with ``exact=True``,
the population itself as a weighted empirical distribution over the finite
support ``(v, y)`` pairs. Planted generators also return the exact
calibration error they plant.
"""

from dataclasses import dataclass

import numpy as np

from .data import EmpiricalDistribution
from .errors import BadPrior, InvalidMagnitude
from .simplex import check_simplex_rows, sample_categorical, sample_simplex


@dataclass(frozen=True)
class Prior:
    """Distribution of predictions: ``dirichlet``, ``uniform_vertices`` or ``fixed_points``."""

    kind: str
    k: int
    alpha: tuple = None
    points: np.ndarray = None

    @classmethod
    def dirichlet(cls, alpha):
        alpha = tuple(float(a) for a in alpha)
        if len(alpha) < 2 or min(alpha) <= 0:
            raise BadPrior("dirichlet needs at least two positive concentrations")
        return cls("dirichlet", len(alpha), alpha=alpha)

    @classmethod
    def uniform_vertices(cls, k):
        if k < 2:
            raise BadPrior("k must be at least 2")
        return cls("uniform_vertices", int(k))

    @classmethod
    def fixed_points(cls, points):
        try:
            P = check_simplex_rows(points)
        except ValueError as exc:
            raise BadPrior(f"fixed points must lie on the simplex: {exc}") from None
        if P.shape[0] == 0:
            raise BadPrior("fixed_points needs at least one point")
        return cls("fixed_points", P.shape[1], points=P)


def _population(points, cond, mass):
    """Weighted rows ``(v_g, y)`` with weight ``mass_g * cond_g[y]``, zero rows dropped."""
    g, y = np.nonzero(cond * mass[:, None] > 0)
    w = mass[g] * cond[g, y]
    return EmpiricalDistribution(points[g], y, w / w.sum())


def _largest_remainder(total, probs):
    raw = total * np.asarray(probs, dtype=float)
    out = np.floor(raw).astype(int)
    short = total - out.sum()
    out[np.argsort(-(raw - out), kind="stable")[:short]] += 1
    return out


def gen_calibrated(prior, n, seed=0, stratified=False, exact=False):
    """Calibrated data: ``v`` from the prior, ``y ~ v``.

    With a ``fixed_points`` prior, ``stratified=True`` splits ``n`` evenly
    across the points and the labels of each point by largest remainder, so
    group label frequencies match ``v`` as closely as ``n`` allows.
    ``exact=True`` returns the population (``fixed_points`` and
    ``uniform_vertices`` only).
    """
    if not isinstance(prior, Prior):
        raise BadPrior(f"unknown prior {prior!r}")
    rng = np.random.default_rng(seed)
    k = prior.k
    if prior.kind == "uniform_vertices":
        if exact:
            return _population(np.eye(k), np.eye(k), np.full(k, 1.0 / k))
        labels = rng.integers(k, size=n)
        return EmpiricalDistribution(np.eye(k)[labels], labels)
    if prior.kind == "dirichlet":
        if exact or stratified:
            raise BadPrior("a dirichlet prior has no finite population")
        V = sample_simplex(rng, n, k, np.array(prior.alpha))
        return EmpiricalDistribution(V, sample_categorical(rng, V))
    if prior.kind == "fixed_points":
        P = prior.points
        if exact:
            return _population(P, P, np.full(len(P), 1.0 / len(P)))
        if stratified:
            rows, labels = [], []
            for p, n_p in zip(P, _largest_remainder(n, np.full(len(P), 1.0 / len(P)))):
                counts = _largest_remainder(n_p, p)
                rows.extend([p] * n_p)
                labels.extend(np.repeat(np.arange(k), counts))
            return EmpiricalDistribution(np.array(rows).reshape(-1, k), labels)
        V = P[rng.integers(len(P), size=n)]
        return EmpiricalDistribution(V, sample_categorical(rng, V))
    raise BadPrior(f"unknown prior kind {prior.kind!r}")


def _planted(points, cond, n, seed, exact):
    mass = np.full(len(points), 1.0 / len(points))
    if exact:
        return _population(points, cond, mass)
    rng = np.random.default_rng(seed)
    idx = rng.integers(len(points), size=n)
    return EmpiricalDistribution(points[idx], sample_categorical(rng, cond[idx]))


def subset_plant_points(k, T, gap=1.0):
    """The two predictions of :func:`gen_subset_violation` and the direction ``u_T - u_rest``."""
    T = sorted(set(int(i) for i in T))
    rest = [i for i in range(k) if i not in T]
    if not T or not rest or T[0] < 0 or T[-1] >= k:
        raise ValueError("T must be a non-empty proper subset of range(k)")
    if not 0 < gap <= 1:
        raise ValueError("gap must lie in (0, 1]")
    u_T = np.zeros(k)
    u_T[T] = 1.0 / len(T)
    u_rest = np.zeros(k)
    u_rest[rest] = 1.0 / len(rest)
    t_plus, t_minus = (1 - gap) / 2, (1 + gap) / 2
    points = np.array([t_plus * u_T + (1 - t_plus) * u_rest,
                       t_minus * u_T + (1 - t_minus) * u_rest])
    return points, u_T - u_rest


def gen_subset_violation(k, T, magnitude, n=1000, seed=0, gap=1.0, exact=False):
    """Two equally likely predictions whose mass on ``T`` is off by ``+-magnitude``.

    The prediction with less mass on ``T`` (``(1 - gap)/2``) under-predicts
    ``T`` by ``magnitude``, the other (``(1 + gap)/2``) over-predicts it. The
    best 1-Lipschitz test function on the ``T``-mass is a line of slope 1
    between the two, so the planted error is ``magnitude * gap / 2``.
    Returns ``(emp, certified_alpha)``.
    """
    points, direction = subset_plant_points(k, T, gap)
    limit = (1 + gap) / 2
    if not 0 <= magnitude <= limit:
        raise InvalidMagnitude(f"magnitude must lie in [0, {limit}]")
    cond = np.array([points[0] + magnitude * direction, points[1] - magnitude * direction])
    cond = np.clip(cond, 0.0, None)
    return _planted(points, cond, n, seed, exact), magnitude * gap / 2


def default_sigmoid_support(k, j=0, j2=1):
    """Two predictions: half-half on ``j, j2``, and the midpoint of that with uniform."""
    pair = np.zeros(k)
    pair[[j, j2]] = 0.5
    return np.array([pair, 0.5 * pair + 0.5 / k])


def sigmoid(V, a, b, L):
    return np.tanh(L * (np.atleast_2d(V) @ np.asarray(a, dtype=float)) + b)


def gen_sigmoid_violation(k, a, b, L, magnitude, n=1000, seed=0, support=None, j=0, j2=1,
                          exact=False):
    """Residual ``magnitude * g(v) (e_j - e_j2)`` with ``g = tanh(L <a, v> + b)``.

    Predictions are uniform over ``support``. The planted weight
    ``g(v) (e_j - e_j2)`` correlates with the residual at exactly
    ``2 * magnitude * E[g(v)^2]``, returned as ``certified_alpha``.
    """
    if j == j2 or not (0 <= j < k and 0 <= j2 < k):
        raise ValueError("j and j2 must be distinct coordinates")
    points = default_sigmoid_support(k, j, j2) if support is None else check_simplex_rows(support)
    g = sigmoid(points, a, b, L)
    shift = magnitude * g
    if magnitude < 0 or np.any(points[:, j] + shift < -1e-12) or np.any(points[:, j2] - shift < -1e-12):
        raise InvalidMagnitude("magnitude pushes a conditional label law off the simplex")
    cond = points.copy()
    cond[:, j] += shift
    cond[:, j2] -= shift
    cond = np.clip(cond, 0.0, None)
    return _planted(points, cond, n, seed, exact), float(2 * magnitude * np.mean(g**2))
