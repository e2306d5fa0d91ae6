"""Witness-driven post-processing that never increases squared loss.

Each round asks an auditor for a witness ``w`` and moves every prediction to
``project(v + eta * w(v))``. The step size is picked from a dyadic grid to
maximize the decrease of the empirical squared loss, so the loss is
nonincreasing by construction. Rounds stop once the auditor's witness
correlates below ``beta_stop`` with the residuals.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .audit import kernel_audit
from .errors import NoProgress
from .kernels import MultinomialKernel, VectorDualFunction
from .simplex import project_to_simplex

STEP_GRID = tuple(2.0 ** -i for i in range(21))
PROGRESS_TOL = 1e-9
RECHECK_OFFSET = 1_000_003


def squared_loss(emp):
    """Weighted mean of ``||v - y||_2^2``; always in [0, 2] for one-hot ``y``."""
    return float(emp.weights @ np.sum(np.square(emp.V - emp.Y), axis=1))


def _loss(V, Y, weights):
    return float(weights @ np.sum(np.square(V - Y), axis=1))


@dataclass
class RecalibrationMap:
    """Replayable pipeline of ``(witness function, step size)`` updates."""

    steps: list = field(default_factory=list)

    def __call__(self, V):
        V = np.atleast_2d(np.asarray(V, dtype=float))
        for fn, eta in self.steps:
            V = project_to_simplex(V + eta * fn(V))
        return V

    def to_list(self):
        return [{"witness": fn.to_dict(), "step_size": float(eta)} for fn, eta in self.steps]

    @classmethod
    def from_list(cls, records):
        return cls([(VectorDualFunction.from_dict(r["witness"]), float(r["step_size"]))
                    for r in records])


@dataclass
class RecalibrationTrace:
    """Per-round ``(squared_loss, witness_correlation, step_size)`` records.

    ``squared_loss`` is the loss after the round's update; ``initial_loss``
    is the loss before any update.
    """

    initial_loss: float
    iterations: list = field(default_factory=list)
    final_map: RecalibrationMap = field(default_factory=RecalibrationMap)
    final_correlation: float = math.nan
    recheck_correlation: float = math.nan
    stopped_by: str = ""

    @property
    def losses(self):
        return [self.initial_loss] + [it[0] for it in self.iterations]

    def to_csv_rows(self):
        rows = [("iteration", "squared_loss", "witness_correlation", "step_size")]
        rows.extend((i + 1, *it) for i, it in enumerate(self.iterations))
        return rows


def kernel_auditor(degree, holdout=0.0):
    """Auditor callable ``(emp, seed) -> Witness`` backed by :func:`kernel_audit`."""
    kern = MultinomialKernel(degree)

    def auditor(emp, seed=0):
        return kernel_audit(emp, kern, holdout=holdout, seed=seed)
    return auditor


def default_max_iters(k, beta_stop):
    return int(math.ceil(16 * k / beta_stop**2))


def recalibrate(emp, auditor, beta_stop, max_iters=None, seed=0):
    """Run witness ascent until the auditor falls silent or the cap is hit.

    ``auditor(emp, seed)`` must return a :class:`~multical.audit.Witness`.
    Returns the recalibrated distribution and its trace. Raises
    :class:`NoProgress` when a witness with correlation at least
    ``beta_stop`` admits no loss-decreasing step.
    """
    if beta_stop <= 0:
        raise ValueError("beta_stop must be positive")
    if max_iters is None:
        max_iters = default_max_iters(emp.k, beta_stop)
    Y, weights = emp.Y, emp.weights
    V = np.array(emp.V)
    loss = _loss(V, Y, weights)
    trace = RecalibrationTrace(initial_loss=loss)
    for it in range(max_iters + 1):
        wit = auditor(emp.with_predictions(V), seed + it)
        corr = wit.achieved_correlation
        trace.final_correlation = corr
        if corr < beta_stop:
            trace.stopped_by = "silent"
            break
        if it == max_iters:
            trace.stopped_by = "max_iters"
            break
        W = wit(V)
        best_eta, best_V, best_loss = None, None, loss
        for eta in STEP_GRID:
            cand = project_to_simplex(V + eta * W)
            cand_loss = _loss(cand, Y, weights)
            if cand_loss < best_loss:
                best_eta, best_V, best_loss = eta, cand, cand_loss
        if best_eta is None:
            if corr > PROGRESS_TOL:
                raise NoProgress(f"no step size lowers the loss at correlation {corr:.3g}")
            trace.stopped_by = "stalled"
            break
        assert best_loss <= loss
        V, loss = best_V, best_loss
        trace.iterations.append((loss, corr, best_eta))
        trace.final_map.steps.append((wit.function, best_eta))
    out = emp.with_predictions(V)
    if trace.stopped_by == "silent":
        trace.recheck_correlation = auditor(out, seed + RECHECK_OFFSET).achieved_correlation
    return out, trace
