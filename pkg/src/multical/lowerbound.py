"""Hard instances for calibration testing and the collision experiment.

A hard family fixes a packing ``V`` of the simplex and a labeler that maps
each ``v`` in ``V`` to a one-hot ``w(v)`` drawn once from ``v``. Sampling
``v`` uniformly from ``V`` with ``y = w(v)`` is far from calibrated in full
smooth calibration error, yet a sample without repeated ``v`` looks exactly
like a calibrated one.
"""

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .data import EmpiricalDistribution, aggregate
from .errors import DimensionTooSmall, EmptyPacking
from .simplex import greedy_packing, sample_categorical

MIN_K = 3
MIN_TRIALS = 100
CSV_FIELDS = ("k", "eps", "V", "n", "trials", "p1", "p2", "gap", "seed")


@dataclass(frozen=True)
class HardFamily:
    packing: object
    labels: np.ndarray
    witness_scale: float

    @property
    def k(self):
        return self.packing.k

    @property
    def size(self):
        return len(self.packing)

    def labeler(self, i):
        """One-hot ``w(v_i)`` for the i-th packing point."""
        return np.eye(self.k)[self.labels[i]]

    def witness(self, V):
        """``(eps/2) w(v)`` at packing points ``V`` (rows must be packing points)."""
        idx = _locate(self.packing.points, np.atleast_2d(V))
        return self.witness_scale * np.eye(self.k)[self.labels[idx]]

    def certified_witness_value(self):
        """Exact ``E <y - v, (eps/2) w(v)>`` under the family, ``(eps/2) mean(1 - v[w(v)])``."""
        pts = self.packing.points
        hit = pts[np.arange(len(pts)), self.labels]
        return float(self.witness_scale * np.mean(1.0 - hit))

    def full_support(self):
        """Population of the family as a uniformly weighted empirical distribution."""
        return EmpiricalDistribution(self.packing.points, self.labels)

    def redraw(self, rng):
        """Same packing with a freshly drawn labeler."""
        return HardFamily(self.packing, sample_categorical(rng, self.packing.points), self.witness_scale)


def _locate(points, V):
    D = np.abs(points[None, :, :] - V[:, None, :]).sum(axis=-1)
    idx = D.argmin(axis=1)
    if np.any(D[np.arange(len(V)), idx] > 1e-12):
        raise ValueError("witness is defined only on packing points")
    return idx


def build_hard_family(k, eps, seed=0):
    if k < MIN_K:
        raise DimensionTooSmall(f"hard families need k >= {MIN_K}")
    packing = greedy_packing(k, eps, seed=seed)
    if len(packing) == 0:
        raise EmptyPacking(f"no packing points for k={k}, eps={eps}")
    rng = np.random.default_rng([seed, 1])
    return HardFamily(packing, sample_categorical(rng, packing.points), eps / 2.0)


def _check_packing(packing):
    if len(packing) == 0:
        raise EmptyPacking("packing is empty")


def sample_calibrated_on_v(packing, n, seed=0):
    """``v`` uniform on the packing, ``y ~ v``."""
    _check_packing(packing)
    rng = np.random.default_rng(seed)
    V = packing.points[rng.integers(len(packing), size=n)]
    return EmpiricalDistribution(V, sample_categorical(rng, V))


def sample_dw(family, n, seed=0):
    """``v`` uniform on the packing, ``y = w(v)``."""
    _check_packing(family.packing)
    rng = np.random.default_rng(seed)
    idx = rng.integers(family.size, size=n)
    return EmpiricalDistribution(family.packing.points[idx], family.labels[idx])


def collision_consistency_test(emp):
    """Accept unless two samples share ``v`` but disagree on ``y``."""
    _, inv = np.unique(emp.V, axis=0, return_inverse=True)
    inv = inv.reshape(-1)
    first = {}
    for g, y in zip(inv.tolist(), emp.labels.tolist()):
        if first.setdefault(g, y) != y:
            return False
    return True


def collision_ece_test(emp):
    """Accept when the plug-in ECE restricted to repeated predictions is positive."""
    _, inv, counts = np.unique(emp.V, axis=0, return_inverse=True, return_counts=True)
    repeated = counts[inv.reshape(-1)] > 1
    if not repeated.any():
        return False
    _, R, _ = aggregate(emp.subset(np.flatnonzero(repeated)))
    return bool(np.abs(R).sum() > 1e-12)


@dataclass(frozen=True)
class BirthdayResult:
    p1: float
    p2: float
    gap: float
    trials: int

    @property
    def sigma(self):
        """Binomial standard error of the difference of two acceptance rates."""
        var = self.p1 * (1 - self.p1) / self.trials + self.p2 * (1 - self.p2) / self.trials
        return float(np.sqrt(var))


def birthday_experiment(family, n, trials, test, seed=0, freeze_labeler=False, threads=1):
    """Acceptance rates of ``test`` on calibrated draws (p1) and on D_w draws (p2).

    The labeler is redrawn for every D_w trial unless ``freeze_labeler``.
    Trials use seeds spawned from ``seed``, so results do not depend on
    ``threads``.
    """
    if trials < MIN_TRIALS:
        raise ValueError(f"need at least {MIN_TRIALS} trials")
    seeds = np.random.SeedSequence(seed).spawn(trials)

    def run(ss):
        a, b, c = ss.spawn(3)
        cal = test(sample_calibrated_on_v(family.packing, n, a))
        fam = family if freeze_labeler else family.redraw(np.random.default_rng(b))
        return bool(cal), bool(test(sample_dw(fam, n, c)))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            out = list(pool.map(run, seeds))
    else:
        out = [run(ss) for ss in seeds]
    res = np.array(out, dtype=float)
    p1, p2 = float(res[:, 0].mean()), float(res[:, 1].mean())
    return BirthdayResult(p1, p2, abs(p1 - p2), trials)


def sweep_rows(k, eps, ns, trials, test, seed=0, threads=1):
    """One CSV record per sample size ``n`` for a single hard family."""
    family = build_hard_family(k, eps, seed)
    rows = []
    for n in ns:
        r = birthday_experiment(family, n, trials, test, seed, threads=threads)
        rows.append({"k": k, "eps": eps, "V": family.size, "n": n, "trials": trials,
                     "p1": r.p1, "p2": r.p2, "gap": r.gap, "seed": seed})
    return rows


def rows_to_csv(rows, fields=CSV_FIELDS):
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(fields), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({f: repr(float(v)) if isinstance(v, float) else v for f, v in row.items()})
    return buf.getvalue()
