"""Kernel auditors, the weak agnostic learner, and the audit/learn reductions.

The kernel learner returns the normalized kernel mean of the labels,
``u -> (1/(lam s)) sum_i z_i ker(v_i, u)`` with ``lam = sqrt(z' K z)``. Its RKHS
norm is ``1/s``, so by Cauchy-Schwarz it is bounded by 1 on the simplex.
Auditing runs the same rule on each coordinate of the residual ``y - v``.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .data import EmpiricalDistribution, aggregate
from .errors import BudgetExceeded, DimensionTooSmall, InsufficientData
from .kernels import DualRkhsFunction, MultinomialKernel, VectorDualFunction, quadratic_forms
from .simplex import lift, sample_categorical, sample_simplex

LAMBDA_TOL = 1e-12
CERT_POINTS = 10**4
CERT_SEED = 20240501
DEFAULT_HOLDOUT = 0.3
MIN_EVAL = 10

_cert_cache = {}


def certificate_points(k):
    """Fixed seeded Dirichlet(1) sample used for range certificates."""
    if k not in _cert_cache:
        pts = sample_simplex(np.random.default_rng(CERT_SEED + k), CERT_POINTS, k)
        pts.flags.writeable = False
        _cert_cache[k] = pts
    return _cert_cache[k]


@dataclass
class Witness:
    """Vector weight function returned by an auditor, with its certificates."""

    function: VectorDualFunction
    achieved_correlation: float
    range_certificate: float
    norm_certificate: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __call__(self, U):
        return self.function(U)

    def to_dict(self):
        return {
            "function": self.function.to_dict(),
            "achieved_correlation": float(self.achieved_correlation),
            "range_certificate": float(self.range_certificate),
            "norm_certificate": [float(x) for x in self.norm_certificate],
            "metadata": {k: _plain(v) for k, v in self.metadata.items()},
        }

    @classmethod
    def from_dict(cls, doc):
        return cls(VectorDualFunction.from_dict(doc["function"]),
                   float(doc["achieved_correlation"]),
                   float(doc["range_certificate"]),
                   np.array(doc["norm_certificate"], dtype=float),
                   dict(doc.get("metadata", {})))


def _plain(x):
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    return x


def certify(function, correlation, metadata=None):
    """Wrap ``function`` in a :class:`Witness`, filling both certificates."""
    vals = function(certificate_points(function.k))
    return Witness(function, float(correlation), float(np.max(np.abs(vals))),
                   function.norms(), dict(metadata or {}))


@dataclass
class LearnerOutput:
    hypothesis: object
    achieved_correlation: float


@dataclass(frozen=True)
class ResidualSample:
    z: np.ndarray
    ell: int
    sign: int


# -- kernel weak learner and auditor ----------------------------------------

def _normalizers(kern, anchors, Z):
    """``lam_l = sqrt(z_l' K z_l)`` for each column of ``Z``."""
    Q = quadratic_forms(kern, anchors, Z)
    return np.sqrt(np.clip(np.diag(Q), 0.0, None))


def kernel_weak_learn(V, z, kern):
    """Normalized kernel mean of real labels ``z`` in [-1, 1] at points ``V``."""
    V = np.atleast_2d(np.asarray(V, dtype=float))
    z = np.asarray(z, dtype=float).reshape(-1)
    if V.shape[0] == 0 or V.shape[0] != z.shape[0]:
        raise ValueError("need one label per point and at least one point")
    U, inv = np.unique(V, axis=0, return_inverse=True)
    zg = np.bincount(inv.reshape(-1), weights=z, minlength=U.shape[0])
    lam = _normalizers(kern, U, zg)[0]
    scale = 0.0 if lam <= LAMBDA_TOL else 1.0 / (lam * kern.s)
    h = DualRkhsFunction(kern, U, zg, scale)
    corr = float(np.mean(h(V) * z))
    return LearnerOutput(h, corr)


def _split(emp, holdout, seed):
    if holdout <= 0 or emp.n * holdout < MIN_EVAL or emp.n - int(emp.n * holdout) < 1:
        return emp, emp, True
    perm = np.random.default_rng(seed).permutation(emp.n)
    n_eval = int(round(emp.n * holdout))
    return emp.subset(np.sort(perm[n_eval:])), emp.subset(np.sort(perm[:n_eval])), False


def aggregated_correlation(emp, function):
    """``E <y - v, w(v)>`` evaluated once per distinct prediction."""
    U, R, _ = aggregate(emp)
    return float(np.sum(R * function(U)))


def kernel_audit(emp, kern, eval_emp=None, holdout=DEFAULT_HOLDOUT, seed=0):
    """Per-coordinate kernel mean of the residuals ``y - v``.

    Samples sharing a prediction vector are merged into one anchor. The
    correlation is measured on ``eval_emp`` if given, otherwise on a random
    ``holdout`` fraction that is withheld from fitting; when the data is too
    small to split, it is measured in-sample and flagged in the metadata.
    """
    if eval_emp is None:
        train, eval_emp, in_sample = _split(emp, holdout, seed)
    else:
        train, in_sample = emp, False
    U, R, _ = aggregate(train)
    lam = _normalizers(kern, U, R)
    scales = np.where(lam > LAMBDA_TOL, 1.0 / (np.maximum(lam, LAMBDA_TOL) * kern.s), 0.0)
    w = VectorDualFunction(kern, U, R.T, scales)
    corr = aggregated_correlation(eval_emp, w)
    return certify(w, corr, {
        "degree": kern.degree, "s": kern.s, "n_train": train.n, "n_eval": eval_emp.n,
        "in_sample": in_sample, "seed": seed})


# -- high-level auditors ------------------------------------------------------

def _safe_pow(base, exponent):
    try:
        return float(base) ** float(exponent)
    except OverflowError:
        return math.inf


def implied_sample_size(k, r, s, alpha, delta):
    """``k r^2 s^2 alpha^-2 log(1/delta)``, the sample size the guarantee asks for."""
    val = k * r * r * s * s / (alpha * alpha) * math.log(1.0 / delta)
    return math.inf if not math.isfinite(val) else int(math.ceil(val))


def _budgeted_audit(emp, kern, alpha, r, delta, max_n, holdout, seed, extra):
    beta = alpha / (3.0 * r * kern.s)
    n_req = implied_sample_size(emp.k, r, kern.s, alpha, delta)
    if max_n is not None and n_req > max_n:
        raise BudgetExceeded(f"implied sample size {n_req} exceeds the maximum {max_n}")
    wit = kernel_audit(emp, kern, holdout=holdout, seed=seed)
    wit.metadata.update(extra)
    wit.metadata.update({"alpha": alpha, "r": r, "beta": beta, "delta": delta,
                         "implied_n": n_req if math.isfinite(n_req) else "inf",
                         "detected": wit.achieved_correlation >= beta})
    return wit


def _check_alpha(alpha):
    if not 0 < alpha < 0.5:
        raise ValueError("alpha must lie in (0, 1/2)")


def projected_smooth_degree(alpha, c0=4.0):
    return int(math.ceil(c0 / alpha))


def audit_projected_smooth(emp, m, alpha, delta=0.1, *, c0=4.0, c1=4.0, c2=4.0, r=None,
                           max_n=None, holdout=DEFAULT_HOLDOUT, seed=0):
    """Auditor for m-projected smooth calibration through a degree ``ceil(c0/alpha)`` kernel.

    The detection threshold is ``beta = alpha/(3 r s)``. The default radius
    ``r = (c1 sqrt(m))**(c2/alpha)`` is astronomically large at moderate
    alpha; pass ``r`` to use a smaller radius.
    """
    _check_alpha(alpha)
    if not 2 <= m <= emp.k:
        raise ValueError(f"m must lie in [2, k={emp.k}]")
    kern = MultinomialKernel(projected_smooth_degree(alpha, c0))
    if r is None:
        r = _safe_pow(c1 * math.sqrt(m), c2 / alpha)
    return _budgeted_audit(emp, kern, alpha, r, delta, max_n, holdout, seed,
                           {"family": "psmooth", "m": m})


def sigmoid_degree(L, alpha, c3=1.0):
    return max(1, int(math.ceil(c3 * L * math.log(L / alpha))))


def audit_sigmoid(emp, L, alpha, delta=0.1, *, c3=1.0, r=None, max_n=None,
                  holdout=DEFAULT_HOLDOUT, seed=0):
    """Auditor for ``tanh(L <a, v> + b)`` weights, ``a`` in ``[-1, 1]^k``.

    Default radius is ``(4 sqrt(k))**d``, the norm bound for a bounded
    degree-d polynomial of a projection with ``||a||_2 <= sqrt(k)``.
    """
    _check_alpha(alpha)
    if L < 1:
        raise ValueError("L must be at least 1")
    kern = MultinomialKernel(sigmoid_degree(L, alpha, c3))
    if r is None:
        r = _safe_pow(4.0 * math.sqrt(emp.k), kern.degree)
    return _budgeted_audit(emp, kern, alpha, r, delta, max_n, holdout, seed,
                           {"family": "sigmoid", "L": L})


def audit_low_degree(emp, d, alpha, delta=0.1, *, max_n=None, holdout=DEFAULT_HOLDOUT,
                     seed=0):
    """Auditor for weights in the unit ball of the degree-d kernel space."""
    _check_alpha(alpha)
    return _budgeted_audit(emp, MultinomialKernel(int(d)), alpha, 1.0, delta, max_n,
                           holdout, seed, {"family": "lowdeg"})


# -- reductions ---------------------------------------------------------------

def _label_index(y, k):
    y = np.asarray(y)
    if y.ndim == 0:
        return int(y)
    if y.shape != (k,):
        raise ValueError("y must be a label index or a one-hot vector of length k")
    return int(np.argmax(y))


def residual_sample(v, y, rng):
    """Signed one-hot ``z`` with ``E[z | v, y] = (y - v)/2``.

    A fair coin picks ``z = +y``; otherwise ``z = -e_j`` with ``j ~ v``.
    """
    v = np.asarray(v, dtype=float)
    k = v.shape[0]
    if rng.random() < 0.5:
        ell, sign = _label_index(y, k), 1
    else:
        ell, sign = int(rng.choice(k, p=v / v.sum())), -1
    z = np.zeros(k)
    z[ell] = sign
    return ResidualSample(z, ell, sign)


def residual_samples(V, labels, rng):
    """Vectorized :func:`residual_sample`; returns ``(ell, sign)`` arrays."""
    V = np.atleast_2d(V)
    n = V.shape[0]
    heads = rng.random(n) < 0.5
    drawn = sample_categorical(rng, V)
    ell = np.where(heads, np.asarray(labels), drawn)
    sign = np.where(heads, 1, -1)
    return ell, sign


def _embed(h, j, k):
    coeffs = np.zeros((k, h.coeffs.shape[0]))
    coeffs[j] = h.coeffs
    scales = np.zeros(k)
    scales[j] = h.scale
    return VectorDualFunction(h.kernel, h.anchors, coeffs, scales)


def auditor_from_learner(emp, learner, alpha, n0, delta=0.1, select_frac=0.3, seed=0):
    """Build a witness from a weak agnostic learner called once per coordinate.

    ``learner(V, z)`` must return a :class:`LearnerOutput` whose hypothesis is
    a :class:`DualRkhsFunction`. The data is split into a learning part and a
    selection part; on the learning part each sample gets a residual draw
    and is routed to the coordinate it hits. Hypotheses are scored on the
    selection part and the best one is embedded into its coordinate.
    """
    rng = np.random.default_rng(seed)
    perm = rng.permutation(emp.n)
    n_sel = int(round(emp.n * select_frac))
    sel = emp.subset(np.sort(perm[:n_sel])) if n_sel > 0 else emp
    learn_idx = np.sort(perm[n_sel:])
    V, labels = emp.V[learn_idx], emp.labels[learn_idx]
    ell, sign = residual_samples(V, labels, rng)
    sizes = np.bincount(ell, minlength=emp.k)
    best = None
    for j in range(emp.k):
        if sizes[j] < n0:
            continue
        idx = ell == j
        out = learner(V[idx], sign[idx].astype(float))
        w = _embed(out.hypothesis, j, emp.k)
        corr = aggregated_correlation(sel, w)
        if best is None or corr > best[0]:
            best = (corr, j, w)
    if best is None:
        raise InsufficientData(f"no coordinate received n0={n0} samples (sizes {sizes.tolist()})")
    corr, j, w = best
    return certify(w, corr, {"coordinate": j, "partition_sizes": sizes.tolist(),
                             "alpha": alpha, "delta": delta, "n0": n0, "seed": seed,
                             "n_select": sel.n})


@dataclass(frozen=True)
class LiftedDifference:
    """``x -> (w(lift(x))_0 - w(lift(x))_1) / 2`` for a vector witness ``w``."""

    witness: object

    def __call__(self, X):
        W = self.witness(lift(np.asarray(X, dtype=float)))
        return 0.5 * (W[..., 0] - W[..., 1])


def learner_from_auditor(X, z, auditor, rng):
    """Agnostic learner for labels ``z`` in [-1, 1] built from an auditor.

    Predictions are ``v = lift(x)``; outcomes are drawn from
    ``v + (z/3)(e_0 - e_1)``, which stays on the simplex because the first two
    lifted coordinates are at least 1/3.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    z = np.asarray(z, dtype=float).reshape(-1)
    if X.shape[1] < 2:
        raise DimensionTooSmall("the lift needs k >= 2")
    V = lift(X)
    vstar = V.copy()
    vstar[:, 0] += z / 3.0
    vstar[:, 1] -= z / 3.0
    vstar = np.clip(vstar, 0.0, None)
    labels = sample_categorical(rng, vstar)
    wit = auditor(EmpiricalDistribution(V, labels))
    h = LiftedDifference(wit)
    return LearnerOutput(h, float(np.mean(h(X) * z)))


def lift_halfspace(a, b):
    """``(3a, b - a_0 - a_1)``, so ``<a', lift(v)> + b' = <a, v> + b``."""
    a = np.asarray(a, dtype=float)
    if a.shape[0] < 2:
        raise DimensionTooSmall("the lift needs k >= 2")
    return 3.0 * a, float(b - a[0] - a[1])

