"""Reference values computed without the package's solvers.

Each oracle uses only numpy, itertools and a direct scipy LP, so agreement
with the package is a genuine two-route check.
"""

import itertools

import numpy as np
from scipy.optimize import linprog


def trace_norm(Z):
    """Sum of singular values."""
    return float(np.linalg.svd(np.asarray(Z, float), compute_uv=False).sum())


def row_norm_sum(Z, q):
    """``sum_i ||row_i||_q`` for an ell_1 first factor and ell_q second factor."""
    return float(np.sum(np.linalg.norm(np.asarray(Z, float), ord=q, axis=1)))


def sign_vectors(n):
    return np.array(list(itertools.product((1.0, -1.0), repeat=n)))


def cross_polytope(n):
    E = np.eye(n)
    return np.vstack([E, -E])


def gauge(V, v):
    """``min sum |t|`` with ``V^T t = v``, the gauge of ``conv(+-V)``."""
    V = np.asarray(V, float)
    k = len(V)
    res = linprog(np.ones(2 * k), A_eq=np.hstack([V.T, -V.T]), b_eq=np.asarray(v, float),
                  bounds=(0, None), method="highs")
    assert res.status == 0
    return float(res.fun)


def vertex_pair_lp(VX, VY, Z):
    """Projective norm for polytope balls: LP over all vertex pairs (full symmetric lists)."""
    cols = np.array([np.outer(a, b).ravel() for a in VX for b in VY])
    res = linprog(np.ones(len(cols)), A_eq=cols.T, b_eq=np.asarray(Z, float).ravel(),
                  bounds=(0, None), method="highs")
    assert res.status == 0
    return float(res.fun)


def injective_sign_scan(Z):
    """Injective norm in ``ell_1 (x) ell_1``: max of ``s^T Z t`` over sign vectors."""
    Z = np.asarray(Z, float)
    S = sign_vectors(Z.shape[0])
    T = sign_vectors(Z.shape[1])
    return float(np.max(np.abs(S @ Z @ T.T)))
