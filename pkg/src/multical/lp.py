"""Small dense linear programs, solved with HiGHS through scipy."""

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from .errors import SolverFailure

_OPTIONS = {"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10}


def lipschitz_lp(c, D, bound=1.0):
    """Maximize ``c @ h`` over ``|h_i - h_j| <= D[i, j]`` and ``|h_i| <= bound``.

    Pairs with ``D[i, j] >= 2 * bound`` are implied by the box and dropped.
    Returns ``(value, h)``.
    """
    c = np.asarray(c, dtype=float)
    n = c.shape[0]
    if n == 0:
        return 0.0, np.zeros(0)
    iu, ju = np.triu_indices(n, 1)
    keep = D[iu, ju] < 2 * bound
    iu, ju = iu[keep], ju[keep]
    m = iu.shape[0]
    if m:
        rows = np.repeat(np.arange(2 * m), 2)
        cols = np.empty(4 * m, dtype=int)
        vals = np.empty(4 * m)
        # h_i - h_j <= D_ij, then h_j - h_i <= D_ij
        cols[0:2 * m:2], cols[1:2 * m:2] = iu, ju
        vals[0:2 * m:2], vals[1:2 * m:2] = 1.0, -1.0
        cols[2 * m::2], cols[2 * m + 1::2] = iu, ju
        vals[2 * m::2], vals[2 * m + 1::2] = -1.0, 1.0
        A = sparse.csr_matrix((vals, (rows, cols)), shape=(2 * m, n))
        b = np.concatenate([D[iu, ju], D[iu, ju]])
    else:
        A, b = None, None
    res = linprog(-c, A_ub=A, b_ub=b, bounds=[(-bound, bound)] * n,
                  method="highs-ds", options=_OPTIONS)
    if res.status != 0:
        raise SolverFailure(f"HiGHS failed: {res.message}")
    h = np.clip(res.x, -bound, bound)
    return float(c @ h), h


def halfspace_realizable(U, inside):
    """Is there ``(a, b)`` with ``<a, u> > b`` exactly on the rows flagged ``inside``?

    Points outside must satisfy ``<a, u> <= b``. Because the condition is
    scale-invariant, strict separation is tested with a unit margin.
    """
    U = np.atleast_2d(U)
    inside = np.asarray(inside, dtype=bool)
    if inside.all() or not inside.any():
        return True
    n, k = U.shape
    # variables (a, b); rows: -(<a,u> - b) <= -1 inside, <a,u> - b <= 0 outside
    A = np.hstack([U, -np.ones((n, 1))])
    A[inside] *= -1
    rhs = np.where(inside, -1.0, 0.0)
    res = linprog(np.zeros(k + 1), A_ub=A, b_ub=rhs, bounds=[(None, None)] * (k + 1),
                  method="highs")
    if res.status == 2:
        return False
    if res.status != 0:
        raise SolverFailure(f"HiGHS failed: {res.message}")
    return True
