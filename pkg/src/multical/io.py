"""Line-delimited dataset files and witness documents.

A dataset has one JSON object per line: ``{"v": [...], "y": label}`` with an
optional weight ``"w"``. NaN and infinities are rejected.
"""

import json

import numpy as np

from .data import EmpiricalDistribution
from .errors import DatasetError
from .simplex import SUM_TOL, check_simplex_rows


def _reject_constant(name):
    raise DatasetError(f"non-finite number {name} is not allowed")


def parse_dataset(lines, sum_tol=SUM_TOL):
    V, labels, weights = [], [], []
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line, parse_constant=_reject_constant)
            v, y = rec["v"], rec["y"]
        except DatasetError as exc:
            raise DatasetError(f"line {lineno}: {exc}") from None
        except (ValueError, KeyError, TypeError) as exc:
            raise DatasetError(f"line {lineno}: malformed record ({exc})") from None
        if not isinstance(y, int) or isinstance(y, bool):
            raise DatasetError(f"line {lineno}: label must be an integer")
        if not isinstance(v, list) or not all(
                isinstance(x, (int, float)) and not isinstance(x, bool) for x in v):
            raise DatasetError(f"line {lineno}: v must be an array of numbers")
        w = rec.get("w", 1.0)
        if not isinstance(w, (int, float)) or isinstance(w, bool) or w < 0:
            raise DatasetError(f"line {lineno}: weight must be a non-negative number")
        V.append(v)
        labels.append(y)
        weights.append(float(w))
    if not V:
        raise DatasetError("dataset is empty")
    if len({len(v) for v in V}) != 1:
        raise DatasetError("all predictions must have the same dimension")
    w = np.array(weights)
    if w.sum() <= 0:
        raise DatasetError("weights sum to zero")
    try:
        P = check_simplex_rows(V, sum_tol)
        # rows accepted under a looser tolerance are renormalized
        off = np.abs(P.sum(axis=1) - 1.0) > SUM_TOL
        P[off] /= P[off].sum(axis=1, keepdims=True)
        return EmpiricalDistribution(P, labels, w / w.sum())
    except ValueError as exc:
        raise DatasetError(str(exc)) from None


def read_dataset(path, sum_tol=SUM_TOL):
    with open(path, encoding="utf-8") as fh:
        return parse_dataset(fh, sum_tol)


def format_dataset(emp):
    """Dataset text; weights are written only when they are not uniform."""
    uniform = np.all(emp.weights == emp.weights[0])
    out = []
    for i in range(emp.n):
        rec = {"v": [float(x) for x in emp.V[i]], "y": int(emp.labels[i])}
        if not uniform:
            rec["w"] = float(emp.weights[i])
        out.append(json.dumps(rec, allow_nan=False))
    return "\n".join(out) + "\n"


def write_text(path, text):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def dump_json(doc):
    return json.dumps(doc, allow_nan=False, indent=1, sort_keys=True) + "\n"
