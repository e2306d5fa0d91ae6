"""Certified univariate polynomial approximants on [-1, 1].

Approximants are built by Chebyshev interpolation with degree doubling until
the error on a 2001-point grid is at most ``eps/2``, then divided by
``1 + eps/2`` so the result stays inside [-1, 1] while the error stays below
``eps``.
"""

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import chebyshev as C
from numpy.polynomial import polynomial as P

from .errors import DegreeBudgetExceeded

GRID_SIZE = 2001
JACKSON_CONSTANT = 64
CHEB_EVAL_DEGREE = 64


def certification_grid(size=GRID_SIZE):
    return np.linspace(-1.0, 1.0, size)


@dataclass(frozen=True)
class UnivariatePoly:
    """Polynomial stored by monomial coefficients ``coeffs[i]`` of ``t**i``.

    When the Chebyshev coefficients are known and the degree is high, they
    are used for evaluation; the monomial expansion is badly conditioned
    there.
    """

    coeffs: np.ndarray
    cheb: np.ndarray = None

    def __post_init__(self):
        object.__setattr__(self, "coeffs", np.atleast_1d(np.asarray(self.coeffs, dtype=float)))

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def __call__(self, t):
        if self.cheb is not None and self.degree > CHEB_EVAL_DEGREE:
            return C.chebval(t, self.cheb)
        return P.polyval(t, self.coeffs)


@dataclass(frozen=True)
class ApproxCertificate:
    target_eps: float
    measured_sup_error: float
    range_ok: bool
    degree: int

    @property
    def ok(self):
        return self.range_ok and self.measured_sup_error <= self.target_eps


def _vectorized(phi):
    def f(t):
        out = np.asarray(phi(t), dtype=float)
        if out.shape != np.shape(t):
            out = np.array([float(phi(x)) for x in np.ravel(t)]).reshape(np.shape(t))
        return out
    return f


def _interpolate(f, eps, budget, grid, target):
    degrees = [0]
    while degrees[-1] < budget:
        degrees.append(min(max(1, 2 * degrees[-1]), budget))
    for deg in degrees:
        cheb = C.chebinterpolate(f, deg)
        if np.max(np.abs(C.chebval(grid, cheb) - target)) <= eps / 2:
            return cheb
    raise DegreeBudgetExceeded(
        f"no interpolant within eps/2={eps / 2:g} up to degree {budget}"
    )


def _certify(f, cheb, eps, grid, target):
    cheb = cheb / (1.0 + eps / 2)
    poly = UnivariatePoly(C.cheb2poly(cheb), cheb)
    vals = poly(grid)
    cert = ApproxCertificate(
        target_eps=float(eps),
        measured_sup_error=float(np.max(np.abs(vals - target))),
        range_ok=bool(np.max(np.abs(vals)) <= 1.0 + 1e-12),
        degree=poly.degree,
    )
    return poly, cert


def jackson_approx(phi, eps):
    """Approximate a 1-Lipschitz ``phi: [-1,1] -> [-1,1]`` to uniform error ``eps``.

    Raises :class:`DegreeBudgetExceeded` if the degree needed exceeds
    ``64/eps``, which in practice means ``phi`` is not Lipschitz.
    """
    if not 0 < eps < 0.5:
        raise ValueError("eps must lie in (0, 1/2)")
    f = _vectorized(phi)
    grid = certification_grid()
    target = f(grid)
    if np.max(np.abs(target)) > 1 + 1e-12:
        raise ValueError("phi leaves [-1, 1] on the grid")
    slopes = np.abs(np.diff(target)) / np.diff(grid)
    if slopes.max() > 1 + 1e-9:
        raise ValueError(f"phi is not 1-Lipschitz on the grid (slope {slopes.max():.4g})")
    budget = int(math.floor(JACKSON_CONSTANT / eps))
    cheb = _interpolate(f, eps, budget, grid, target)
    return _certify(f, cheb, eps, grid, target)


def tanh_degree_budget(L, eps):
    return int(math.ceil(JACKSON_CONSTANT * L * max(1.0, math.log(L / eps))))


def tanh_approx(L, b, eps):
    """Approximate ``t -> tanh(L t + b)`` on [-1, 1] to uniform error ``eps``."""
    if not 0 < eps < 0.5:
        raise ValueError("eps must lie in (0, 1/2)")
    if L < 1:
        raise ValueError("L must be at least 1")

    def f(t):
        return np.tanh(L * np.asarray(t, dtype=float) + b)

    grid = certification_grid()
    target = f(grid)
    cheb = _interpolate(f, eps, tanh_degree_budget(L, eps), grid, target)
    return _certify(f, cheb, eps, grid, target)


def coeff_abs_sum(p):
    return float(np.sum(np.abs(p.coeffs)))


def composed_norm_bound(p, a):
    """Upper bound on the RKHS norm of ``v -> p(a . v)`` for the degree-deg(p) kernel.

    Returns ``sqrt(sum_i coeffs[i]**2 * ||a||**(2i))``.
    """
    r2 = float(np.sum(np.square(a)))
    powers = r2 ** np.arange(len(p.coeffs))
    return math.sqrt(float(np.sum(np.square(p.coeffs) * powers)))


def loose_norm_bound(p, a):
    """Closed form ``max(4, 4 ||a||_2) ** deg(p)``, valid when |p| <= 1 on [-1, 1]."""
    return max(4.0, 4.0 * float(np.linalg.norm(a))) ** p.degree


def chebyshev_t(n):
    """Monomial coefficients of the Chebyshev polynomial ``T_n``."""
    return UnivariatePoly(C.cheb2poly(np.eye(n + 1)[n]))
