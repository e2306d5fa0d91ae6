"""Exact calibration errors of empirical distributions.

All measures here are weighted calibration errors ``sup_w |E <y - v, w(v)>|``
for some class of weight functions. On an empirical distribution they only
depend on the summed residual of each distinct prediction vector, so every
function starts from :func:`multical.data.aggregate`.
"""

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .data import aggregate
from .errors import EmptySubset, TooLarge, TooManySubsets
from .lp import halfspace_realizable, lipschitz_lp
from .simplex import l1_distances

SUBSET_GUARD = 10**6
FSCE_GUARD = 500
DECISION_GUARD = 16
PSCE_MAX_K = 8


@dataclass
class CalibrationReport:
    measure_name: str
    value: float
    witness: object = None
    metadata: dict = field(default_factory=dict)

    def to_record(self):
        """Flat ``key=value`` lines, keys after ``measure`` and ``value`` sorted."""
        lines = [f"measure={self.measure_name}", f"value={float(self.value)!r}"]
        for key in sorted(self.metadata):
            val = self.metadata[key]
            if isinstance(val, (list, tuple)):
                val = ",".join(repr(float(x)) if isinstance(x, float) else str(x) for x in val)
            elif isinstance(val, float):
                val = repr(float(val))
            lines.append(f"{key}={val}")
        return "\n".join(lines) + "\n"


# -- bounded test functions ---------------------------------------------------

def _grouped_abs_sum(keys, resid):
    """``sum over distinct keys of |sum of resid in the group|``."""
    _, inv = np.unique(keys, axis=0, return_inverse=True)
    return float(np.abs(np.bincount(inv.reshape(-1), weights=resid)).sum())


def classwise_ce(emp):
    """Max over classes of the class-wise error with arbitrary bounded ``phi``."""
    U, R, _ = aggregate(emp)
    per_class = [_grouped_abs_sum(U[:, ell], R[:, ell]) for ell in range(emp.k)]
    best = int(np.argmax(per_class))
    return CalibrationReport("classwise", per_class[best],
                             metadata={"argmax_class": best, "per_class": per_class})


def _top(U):
    # np.argmax breaks ties toward the smallest index
    top = np.argmax(U, axis=1)
    return top, U[np.arange(U.shape[0]), top]


def confidence_ce(emp):
    U, R, _ = aggregate(emp)
    top, conf = _top(U)
    value = _grouped_abs_sum(conf, R[np.arange(U.shape[0]), top])
    return CalibrationReport("confidence", value)


def toplabel_ce(emp):
    U, R, _ = aggregate(emp)
    top, conf = _top(U)
    keys = np.column_stack([conf, top])
    value = _grouped_abs_sum(keys, R[np.arange(U.shape[0]), top])
    return CalibrationReport("toplabel", value)


def ece_canonical(emp):
    """Plug-in canonical ECE, ``E_v ||E[y|v] - v||_1`` over exact-v groups."""
    _, R, _ = aggregate(emp)
    return CalibrationReport("ece", float(np.abs(R).sum()))


# -- smooth calibration -------------------------------------------------------

def smooth_ce_scalar(t, c):
    """Exact ``max sum_i c_i phi_i`` over 1-Lipschitz ``phi`` bounded by 1.

    The constraints are ``|phi_i - phi_j| <= |t_i - t_j|`` and
    ``-1 <= phi_i <= 1``. After sorting, only neighbouring constraints
    matter, and the chain is solved by dynamic programming over concave
    piecewise-linear value functions. Returns ``(value, phi)`` with ``phi``
    aligned to the input order.
    """
    t = np.asarray(t, dtype=float).reshape(-1)
    c = np.asarray(c, dtype=float).reshape(-1)
    if t.shape != c.shape:
        raise ValueError("t and c must have the same length")
    if t.size == 0:
        return 0.0, np.zeros(0)
    ts, inv = np.unique(t, return_inverse=True)
    inv = inv.reshape(-1)
    cs = np.bincount(inv, weights=c, minlength=ts.size)
    gaps = np.diff(ts)

    xs = np.array([-1.0, 1.0])
    fs = cs[0] * xs
    peaks = np.empty(ts.size)
    for i in range(ts.size):
        j = int(np.argmax(fs))
        peaks[i] = xs[j]
        if i == ts.size - 1:
            break
        d = gaps[i]
        # window maximum of a concave function widens its peak by d each way
        xs = np.concatenate([xs[:j + 1] - d, xs[j:] + d])
        fs = np.concatenate([fs[:j + 1], fs[j:]])
        lo, hi = np.interp([-1.0, 1.0], xs, fs)
        inside = (xs > -1.0) & (xs < 1.0)
        xs = np.concatenate([[-1.0], xs[inside], [1.0]])
        fs = np.concatenate([[lo], fs[inside], [hi]])
        fs = fs + cs[i + 1] * xs

    phi = np.empty(ts.size)
    phi[-1] = peaks[-1]
    for i in range(ts.size - 2, -1, -1):
        phi[i] = np.clip(peaks[i], phi[i + 1] - gaps[i], phi[i + 1] + gaps[i])
    value = float(cs @ phi)
    return value, phi[inv]


def _subset_key(T):
    return ",".join(str(i) for i in sorted(T))


def _as_subset(T, k):
    T = sorted(set(int(i) for i in T))
    if not T:
        raise EmptySubset("subset T must be non-empty")
    if T[0] < 0 or T[-1] >= k:
        raise ValueError(f"subset indices must lie in [0, {k})")
    return T


def _subset_value(U, R, T):
    return smooth_ce_scalar(U[:, T].sum(axis=1), R[:, T].sum(axis=1))


def subset_smooth_ce(emp, T):
    """Smooth calibration error of the binary task "is the label in T"."""
    T = _as_subset(T, emp.k)
    U, R, _ = aggregate(emp)
    value, phi = _subset_value(U, R, T)
    return CalibrationReport("smooth_subset", value,
                             metadata={"T": _subset_key(T), "phi": list(phi)})


def _count_subsets(k, m):
    return sum(math.comb(k, j) for j in range(1, min(m, k) + 1))


def _subsets(k, m):
    for size in range(1, min(m, k) + 1):
        yield from itertools.combinations(range(k), size)


def ssce_m(emp, m):
    """Max of :func:`subset_smooth_ce` over non-empty ``T`` with ``|T| <= m``."""
    m = int(math.floor(m))
    if m < 1:
        raise EmptySubset("m must be at least 1")
    if _count_subsets(emp.k, m) > SUBSET_GUARD:
        raise TooManySubsets(f"{_count_subsets(emp.k, m)} subsets exceed {SUBSET_GUARD}")
    U, R, _ = aggregate(emp)
    best, best_T, best_phi = -np.inf, None, None
    for T in _subsets(emp.k, m):
        value, phi = _subset_value(U, R, list(T))
        if value > best:
            best, best_T, best_phi = value, T, phi
    return CalibrationReport("ssce", best, metadata={
        "m": m, "T": _subset_key(best_T), "phi": list(best_phi)})


def psce_directions(k, m, directions, seed):
    """Candidate projection directions for :func:`psce_oracle`."""
    cands = []
    for T in _subsets(k, int(math.floor(m))):
        a = np.zeros(k)
        a[list(T)] = 1.0
        cands.append(a)
    eye = np.eye(k)
    cands.extend(eye)
    cands.extend(-eye)
    rng = np.random.default_rng(seed)
    for a in rng.uniform(-1.0, 1.0, size=(directions, k)):
        sq = float(a @ a)
        if sq > m:
            a = a * math.sqrt(m / sq)
        cands.append(a)
    return np.array(cands)


def psce_oracle(emp, m, directions=64, seed=0):
    """Lower-bound oracle for the m-projected smooth calibration error.

    Each coordinate picks its own best direction from a candidate set (all
    subset indicators with ``|T| <= m``, the signed basis vectors and
    ``directions`` random vectors of ``[-1, 1]^k`` with squared norm at most
    ``m``) and its own Lipschitz ``phi``. ``phi`` is 1-Lipschitz on the whole
    range ``[-1, 1]`` of ``<a, v>``; on ``[0, 1]`` this is the usual class.
    """
    if emp.k > PSCE_MAX_K:
        raise TooLarge(f"psce oracle is limited to k <= {PSCE_MAX_K}")
    if m < 1:
        raise ValueError("m must be at least 1")
    U, R, _ = aggregate(emp)
    A = psce_directions(emp.k, m, directions, seed)
    T = U @ A.T
    per_coord = np.zeros(emp.k)
    best_dir = np.zeros(emp.k, dtype=int)
    for ell in range(emp.k):
        if not np.any(R[:, ell]):
            continue
        vals = [smooth_ce_scalar(T[:, a], R[:, ell])[0] for a in range(A.shape[0])]
        best_dir[ell] = int(np.argmax(vals))
        per_coord[ell] = vals[best_dir[ell]]
    return CalibrationReport("psce", float(per_coord.sum()), metadata={
        "m": m, "directions": directions, "seed": seed, "n_candidates": A.shape[0],
        "phi_domain": "lipschitz-extension-to-[-1,1]",
        "per_coordinate": list(per_coord)})


def fsce_exact(emp):
    """Full smooth calibration error by one l1-Lipschitz LP per coordinate."""
    U, R, _ = aggregate(emp)
    if U.shape[0] > FSCE_GUARD:
        raise TooLarge(f"{U.shape[0]} distinct predictions exceed the fsce guard {FSCE_GUARD}")
    D = l1_distances(U, U)
    per_coord = np.zeros(emp.k)
    for ell in range(emp.k):
        if np.any(R[:, ell]):
            per_coord[ell] = lipschitz_lp(R[:, ell], D)[0]
    return CalibrationReport("fsce", float(per_coord.sum()),
                             metadata={"per_coordinate": list(per_coord)})


def decision_ce_bruteforce(emp):
    """Two-action decision calibration error by enumerating halfspace splits.

    Every split ``(S, complement)`` of the distinct predictions is scored by
    ``||sum_S r|| + ||sum_rest r||``; candidates are tried best-first and the
    first one realizable as ``<a, v> > b`` gives the value.
    """
    U, R, _ = aggregate(emp)
    g = U.shape[0]
    if g > DECISION_GUARD:
        raise TooLarge(f"{g} distinct predictions exceed the decision guard {DECISION_GUARD}")
    masks = (np.arange(2**g)[:, None] >> np.arange(g)[None, :]) & 1
    inside = masks @ R
    total = R.sum(axis=0)
    scores = np.linalg.norm(inside, axis=1) + np.linalg.norm(total - inside, axis=1)
    for idx in np.argsort(-scores, kind="stable"):
        if halfspace_realizable(U, masks[idx].astype(bool)):
            return CalibrationReport("decision", float(scores[idx]),
                                     metadata={"split": "".join(map(str, masks[idx]))})
    raise AssertionError("the empty split is always realizable")


MEASURES = {
    "classwise": classwise_ce,
    "confidence": confidence_ce,
    "toplabel": toplabel_ce,
    "ece": ece_canonical,
    "ssce": ssce_m,
    "psce": psce_oracle,
    "fsce": fsce_exact,
    "decision": decision_ce_bruteforce,
    "smooth_subset": subset_smooth_ce,
}
