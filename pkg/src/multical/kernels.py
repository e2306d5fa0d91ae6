"""Multinomial kernel and functions in its RKHS.

The degree-d multinomial kernel is ``ker_d(v, u) = sum_{i<=d} (v . u)^i``. On
the simplex ``v . v <= 1`` so ``ker_d(v, v) <= d + 1``, which is the uniform
bound ``s**2`` on the squared norm of a kernel section.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, TooLarge

FEATURE_GUARD = 10**6
GRAM_GUARD = 10**4
NEG_QUAD_TOL = 1e-8
_BLOCK = 2048


@dataclass(frozen=True)
class MultinomialKernel:
    degree: int

    def __post_init__(self):
        if int(self.degree) != self.degree or self.degree < 0:
            raise ValueError("degree must be a non-negative integer")

    @property
    def s(self):
        return math.sqrt(self.degree + 1)

    def from_inner(self, x):
        """Horner evaluation of ``1 + x + ... + x**d``."""
        x = np.asarray(x, dtype=float)
        out = np.ones_like(x)
        for _ in range(self.degree):
            out = out * x + 1.0
        return out

    def __call__(self, v, u):
        return kernel_eval(self, v, u)

    def gram(self, A, B=None):
        A = np.atleast_2d(np.asarray(A, dtype=float))
        B = A if B is None else np.atleast_2d(np.asarray(B, dtype=float))
        if A.shape[1] != B.shape[1]:
            raise DimensionMismatch(f"dimensions {A.shape[1]} and {B.shape[1]}")
        return self.from_inner(A @ B.T)


def kernel_eval(kern, v, u):
    v = np.asarray(v, dtype=float)
    u = np.asarray(u, dtype=float)
    if v.shape != u.shape:
        raise DimensionMismatch(f"shapes {v.shape} and {u.shape}")
    return float(kern.from_inner(float(v @ u)))


def feature_dimension(k, d):
    return sum(k**i for i in range(d + 1))


def explicit_feature_map(kern, v):
    """Monomial feature vector ``psi(v)`` indexed by all tuples of length <= d.

    Tuples are laid out by length, then lexicographically, so for ``k = 2,
    d = 2`` the order is (), (1), (2), (1,1), (1,2), (2,1), (2,2).
    """
    v = np.asarray(v, dtype=float)
    k = v.shape[-1]
    if feature_dimension(k, kern.degree) > FEATURE_GUARD:
        raise TooLarge(f"feature dimension for k={k}, d={kern.degree} exceeds {FEATURE_GUARD}")
    parts = [np.ones(1)]
    cur = np.ones(1)
    for _ in range(kern.degree):
        cur = np.kron(cur, v)
        parts.append(cur)
    return np.concatenate(parts)


def quadratic_forms(kern, anchors, C):
    """Return ``C.T @ K @ C`` without holding the full Gram matrix.

    ``C`` has one column per function; the result is square in the number of
    columns.
    """
    anchors = np.atleast_2d(anchors)
    C = np.asarray(C, dtype=float)
    if C.ndim == 1:
        C = C[:, None]
    n = anchors.shape[0]
    out = np.zeros((C.shape[1], C.shape[1]))
    for start in range(0, n, _BLOCK):
        stop = min(start + _BLOCK, n)
        KC = kern.gram(anchors[start:stop], anchors) @ C
        out += C[start:stop].T @ KC
    return out


def _sqrt_form(q):
    if q < -NEG_QUAD_TOL:
        raise ArithmeticError(f"quadratic form is negative beyond round-off: {q:.3g}")
    return math.sqrt(max(q, 0.0))


@dataclass(frozen=True)
class DualRkhsFunction:
    """``u -> scale * sum_i coeffs[i] * ker(anchors[i], u)``."""

    kernel: MultinomialKernel
    anchors: np.ndarray
    coeffs: np.ndarray
    scale: float = 1.0

    def __post_init__(self):
        anchors = np.atleast_2d(np.asarray(self.anchors, dtype=float))
        coeffs = np.asarray(self.coeffs, dtype=float).reshape(-1)
        if anchors.shape[0] != coeffs.shape[0]:
            raise ValueError("anchors and coeffs must have equal length")
        object.__setattr__(self, "anchors", anchors)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "scale", float(self.scale))

    @property
    def k(self):
        return self.anchors.shape[1]

    def __call__(self, U):
        return dual_eval(self, U)

    def norm(self):
        return rkhs_norm(self)


def dual_eval(f, U):
    """Evaluate ``f`` at one point (returns a float) or at the rows of ``U``."""
    U = np.asarray(U, dtype=float)
    if U.shape[-1] != f.k:
        raise DimensionMismatch(f"function lives on k={f.k}, got points with k={U.shape[-1]}")
    vals = f.scale * (f.kernel.gram(np.atleast_2d(U), f.anchors) @ f.coeffs)
    return float(vals[0]) if U.ndim == 1 else vals


def rkhs_norm(f):
    """``scale * sqrt(c' K c)`` with tiny negative round-off clamped to zero."""
    if len(f.coeffs) > GRAM_GUARD:
        raise TooLarge(f"{len(f.coeffs)} anchors exceed the dense Gram guard {GRAM_GUARD}")
    q = quadratic_forms(f.kernel, f.anchors, f.coeffs)[0, 0]
    return abs(f.scale) * _sqrt_form(q)


@dataclass(frozen=True)
class VectorDualFunction:
    """k-valued function whose components share a kernel and an anchor list.

    Component ``l`` is ``scales[l] * sum_i coeffs[l, i] * ker(anchors[i], u)``.
    """

    kernel: MultinomialKernel
    anchors: np.ndarray
    coeffs: np.ndarray
    scales: np.ndarray = field(default=None)

    def __post_init__(self):
        anchors = np.atleast_2d(np.asarray(self.anchors, dtype=float))
        coeffs = np.atleast_2d(np.asarray(self.coeffs, dtype=float))
        if coeffs.shape[1] != anchors.shape[0]:
            raise ValueError("coeffs must have one column per anchor")
        scales = (np.ones(coeffs.shape[0]) if self.scales is None
                  else np.asarray(self.scales, dtype=float).reshape(-1))
        if scales.shape[0] != coeffs.shape[0]:
            raise ValueError("one scale per component")
        object.__setattr__(self, "anchors", anchors)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "scales", scales)

    @property
    def k(self):
        return self.anchors.shape[1]

    @property
    def n_components(self):
        return self.coeffs.shape[0]

    def component(self, ell):
        return DualRkhsFunction(self.kernel, self.anchors, self.coeffs[ell], self.scales[ell])

    def __call__(self, U):
        U = np.asarray(U, dtype=float)
        if U.shape[-1] != self.k:
            raise DimensionMismatch(f"function lives on k={self.k}, got k={U.shape[-1]}")
        W = self.coeffs * self.scales[:, None]
        out = np.empty((np.atleast_2d(U).shape[0], self.n_components))
        U2 = np.atleast_2d(U)
        for start in range(0, U2.shape[0], _BLOCK):
            stop = min(start + _BLOCK, U2.shape[0])
            out[start:stop] = self.kernel.gram(U2[start:stop], self.anchors) @ W.T
        return out[0] if U.ndim == 1 else out

    def norms(self):
        if self.anchors.shape[0] > GRAM_GUARD:
            raise TooLarge(f"{self.anchors.shape[0]} anchors exceed the dense Gram guard")
        Q = quadratic_forms(self.kernel, self.anchors, self.coeffs.T)
        return np.abs(self.scales) * np.array([_sqrt_form(q) for q in np.diag(Q)])

    # serialization -----------------------------------------------------------

    def to_dict(self):
        return {
            "kind": "vector_dual",
            "degree": self.kernel.degree,
            "scales": [float(x) for x in self.scales],
            "coeffs": [[float(x) for x in row] for row in self.coeffs],
            "anchors": [[float(x) for x in row] for row in self.anchors],
        }

    @classmethod
    def from_dict(cls, doc):
        if doc.get("kind") != "vector_dual":
            raise ValueError(f"not a vector_dual document: kind={doc.get('kind')!r}")
        k = len(doc["anchors"][0]) if doc["anchors"] else 0
        anchors = np.array(doc["anchors"], dtype=float).reshape(-1, k)
        coeffs = np.array(doc["coeffs"], dtype=float).reshape(len(doc["scales"]), anchors.shape[0])
        return cls(MultinomialKernel(int(doc["degree"])), anchors, coeffs, np.array(doc["scales"]))


def dual_to_dict(f):
    return {
        "kind": "dual",
        "degree": f.kernel.degree,
        "scale": float(f.scale),
        "coeffs": [float(x) for x in f.coeffs],
        "anchors": [[float(x) for x in row] for row in f.anchors],
    }


def dual_from_dict(doc):
    if doc.get("kind") != "dual":
        raise ValueError(f"not a dual document: kind={doc.get('kind')!r}")
    return DualRkhsFunction(MultinomialKernel(int(doc["degree"])),
                            np.array(doc["anchors"], dtype=float),
                            np.array(doc["coeffs"], dtype=float), float(doc["scale"]))


def dumps(obj):
    """Serialize a dual function to JSON text; Python's float repr round-trips exactly."""
    doc = obj.to_dict() if isinstance(obj, VectorDualFunction) else dual_to_dict(obj)
    return json.dumps(doc, allow_nan=False)


def loads(text):
    doc = json.loads(text)
    if doc.get("kind") == "vector_dual":
        return VectorDualFunction.from_dict(doc)
    return dual_from_dict(doc)
