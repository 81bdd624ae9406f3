"""Projective-norm solvers with dual certificates.

Every solver returns a :class:`ProjNormResult` holding a decomposition (the
upper bound) and a dual operator ``G`` whose pairing with the tensor, divided
by ``||G||``, is the lower bound. Available routes:

* :func:`proj_norm_oracle_hilbert` -- sum of singular values (Euclidean factors)
* :func:`proj_norm_oracle_l1`      -- sum of row norms (ell_1 first factor)
* :func:`proj_norm_exact_polyhedral` -- one LP over all vertex pairs
* :func:`proj_norm_colgen`         -- column generation for any pair
* :func:`proj_norm`                -- picks the best applicable route
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from . import banach
from .config import DEFAULT
from .errors import LPInfeasible, NotPolyhedral, VertexBudgetExceeded, WrongFamily
from .tensor import (
    Decomposition,
    DualOperator,
    Tensor,
    alternating_maximize,
    canonical_decomposition,
    canonical_sign,
    decomposition_to_json,
    merge_atoms,
    normalize_atoms,
    pairing,
)

log = logging.getLogger(__name__)

LP_TOL = 1e-10
MAX_VERTEX_PAIRS = 20000


@dataclass
class OpNormResult:
    value: float
    status: str  # "exact" or "lower_bound"
    attainer: np.ndarray
    attainer_y: np.ndarray | None = None

    def to_json(self):
        return {"value": self.value, "status": self.status, "attainer": self.attainer.tolist()}


@dataclass
class ProjNormResult:
    upper: float
    lower: float
    decomposition: Decomposition
    dual: DualOperator
    op_norm_status: str  # "exact", "upper_bounded" or "heuristic"
    method: str
    log: list = field(default_factory=list)
    budget_exceeded: bool = False
    warnings: list = field(default_factory=list)

    @property
    def gap(self):
        return self.upper - self.lower

    @property
    def value(self):
        return self.upper

    def to_json(self):
        return {
            "upper": self.upper,
            "lower": self.lower,
            "gap": self.gap,
            "method": self.method,
            "op_norm_status": self.op_norm_status,
            "decomposition": decomposition_to_json(self.decomposition),
            "dual": self.dual.G.tolist(),
            "iters": len(self.log),
        }


# ---------------------------------------------------------------- operator norm

def _exact_candidates(G, vertex_cap):
    """All locally best pairs ``(x, y, value)`` of an exact scan, or ``None``.

    Euclidean pairs give the singular pairs; an enumerable factor gives one
    pair per vertex with the best response on the other side.
    """
    X, Y, K = G.X, G.Y, G.kernel
    dx, dy = banach.euclidean_scaling(X), banach.euclidean_scaling(Y)
    if dx is not None and dy is not None:
        U, s, Vt = np.linalg.svd(K / dx[:, None] / dy[None, :], full_matrices=False)
        return U.T / dx, Vt / dy, s
    rank_one = _rank_one_candidates(G)
    if rank_one is not None:
        return rank_one
    xe = banach.is_enumerable(X, vertex_cap)
    ye = banach.is_enumerable(Y, vertex_cap)
    if xe and (not ye or len(banach.vertex_representatives(X, vertex_cap))
               <= len(banach.vertex_representatives(Y, vertex_cap))):
        R = banach.vertex_representatives(X, vertex_cap)
        Ys, vals = banach.ball_argmax_rows(Y, (R @ K) / Y.pairing_weights)
        return R, Ys, vals
    if ye:
        R = banach.vertex_representatives(Y, vertex_cap)
        Xs, vals = banach.ball_argmax_rows(X, (R @ K.T) / X.pairing_weights)
        return Xs, R, vals
    return None


def _rank_one_candidates(G, rel=1e-14):
    # ||f (x) g|| = ||f||_{X*} ||g||_{Y*}, attained at norming vectors of f and g
    K = G.kernel
    if min(K.shape) < 2 or not np.any(K):
        return None
    U, s, Vt = np.linalg.svd(K)
    if s[1] > rel * s[0]:
        return None
    f = s[0] * U[:, 0] / G.X.pairing_weights
    g = Vt[0] / G.Y.pairing_weights
    x, fx = banach.ball_argmax(G.X, f)
    y, gy = banach.ball_argmax(G.Y, g)
    return x[None, :], y[None, :], np.array([fx * gy])


def operator_norm(G, config=DEFAULT):
    """``||G|| = sup_{x in B_X} ||G(x)||_{Y*}``.

    Exact for Euclidean pairs (largest singular value of the rescaled kernel),
    for rank-one operators (product of the dual norms of the factors) and
    whenever one factor ball is an enumerable polytope; otherwise the best
    of a multistart alternating search, reported as ``lower_bound``.
    """
    cand = _exact_candidates(G, config.vertex_cap)
    if cand is not None:
        xs, ys, vals = cand
        k = int(np.argmax(vals))
        x = xs[k]
        if vals[k] == 0:
            x = _unit_vector(G.X)
        return OpNormResult(float(vals[k]), "exact", x, ys[k])
    As, Bs, vals = alternating_maximize(G.kernel, G.X, G.Y, config)
    k = int(np.argmax(vals))
    return OpNormResult(float(vals[k]), "lower_bound", As[k], Bs[k])


def _unit_vector(space):
    e = np.zeros(space.dim)
    e[0] = 1.0
    return e / banach.norm_eval(space, e)


def _box_bound(G, vertex_cap):
    # B_X sits inside the box prod [-r_i, r_i], r_i = ||e_i^*||_{X*}; scanning the
    # box corners bounds ||G|| from above
    X = G.X
    if X.dim > vertex_cap:
        return None
    # sup |x_i| over B_X is the dual norm of the i-th coordinate functional
    r = banach.dual_norms(X, np.diag(1.0 / X.pairing_weights))
    corners = banach.vertex_representatives(banach.lp(np.inf, X.dim), vertex_cap) * r
    _, vals = banach.ball_argmax_rows(G.Y, (corners @ G.kernel) / G.Y.pairing_weights)
    return float(np.max(vals))


# ---------------------------------------------------------------- oracles

def proj_norm_oracle_hilbert(t):
    """Projective norm of a tensor between Euclidean factors.

    The norm is the sum of the singular values of the rescaled coefficient
    matrix; the singular pairs give an optimal decomposition and ``U V^T`` a
    norm-one dual certificate.
    """
    dx, dy = banach.euclidean_scaling(t.X), banach.euclidean_scaling(t.Y)
    if dx is None or dy is None:
        raise WrongFamily("Hilbert oracle needs Euclidean factors (p = 2)")
    Zt = dx[:, None] * t.Z * dy[None, :]
    U, s, Vt = np.linalg.svd(Zt, full_matrices=False)
    keep = s > max(1e-300, 1e-15 * (s[0] if s.size else 0.0))
    d = Decomposition(s[keep], (U[:, keep] / dx[:, None]).T, Vt[keep] / dy)
    K = dx[:, None] * (U @ Vt) * dy[None, :]
    G = DualOperator.from_kernel(K, t.X, t.Y)
    upper = d.value()
    lower = pairing(G, t) if s.size else 0.0
    return ProjNormResult(upper, lower, d, G, "exact", "hilbert_oracle")


def proj_norm_oracle_l1(t):
    """Projective norm with an ell_1 first factor: the sum of the row norms."""
    dx = banach.l1_scaling(t.X)
    if dx is None:
        raise WrongFamily("ell_1 oracle needs an ell_1-type first factor (p = 1)")
    X, Y, Z = t.X, t.Y, t.Z
    row_norms = banach.norms(Y, Z)
    lam, xs, ys = [], [], []
    K = np.zeros_like(Z)
    for i in range(X.dim):
        if row_norms[i] == 0:
            continue
        e = np.zeros(X.dim)
        e[i] = 1.0 / dx[i]
        lam.append(dx[i] * row_norms[i])
        xs.append(e)
        ys.append(Z[i] / row_norms[i])
        f = banach.norming_functional(Y, Z[i])
        K[i] = dx[i] * Y.pairing_weights * f.coords
    d = Decomposition(lam, np.array(xs).reshape(-1, X.dim), np.array(ys).reshape(-1, Y.dim))
    G = DualOperator.from_kernel(K, X, Y)
    return ProjNormResult(d.value(), pairing(G, t), d, G, "exact", "l1_oracle")


# ---------------------------------------------------------------- LP machinery

def _solve_master(cols, b):
    """``min sum(lam)`` s.t. ``cols^T lam = b``, ``lam >= 0``; returns lam, dual, value."""
    tight = {"primal_feasibility_tolerance": LP_TOL, "dual_feasibility_tolerance": LP_TOL}
    # near-parallel columns occasionally trip HiGHS; retry without presolve, then loosened
    for options in (tight, {**tight, "presolve": False}, {}):
        res = linprog(np.ones(len(cols)), A_eq=cols.T, b_eq=b, bounds=(0, None),
                      method="highs", options=options)
        if res.status == 0:
            break
    if res.status != 0:
        raise LPInfeasible(f"master LP failed ({res.status}): {res.message}")
    lam = np.maximum(res.x, 0.0)
    # re-solve the active columns exactly to kill the feasibility slack
    S = np.flatnonzero(lam > 1e-13)
    if S.size:
        sol, *_ = np.linalg.lstsq(cols[S].T, b, rcond=None)
        if np.all(sol > 0):
            old = np.max(np.abs(cols[S].T @ lam[S] - b))
            new = np.max(np.abs(cols[S].T @ sol - b))
            if new <= old:
                lam = np.zeros_like(lam)
                lam[S] = sol
    return lam, np.asarray(res.eqlin.marginals), float(lam.sum())


def _decomposition_from_pool(lam, xs, ys, drop=1e-14):
    keep = np.flatnonzero(lam > drop)
    return Decomposition(lam[keep], xs[keep], ys[keep])


def proj_norm_exact_polyhedral(t, config=DEFAULT):
    """Exact projective norm when both unit balls are enumerable polytopes.

    The unit ball of the projective product is the convex hull of the
    products of vertices, so the norm is a finite LP over vertex pairs whose
    equality multipliers form the optimal dual operator.
    """
    X, Y = t.X, t.Y
    cap = config.vertex_cap
    try:
        # over-cap polytopes raise VertexBudgetExceeded here
        Rx = banach.vertex_representatives(X, cap)
        Vy = banach.vertices(Y, cap)
    except NotPolyhedral as exc:
        raise WrongFamily("both factors must have polyhedral unit balls") from exc
    if len(Rx) * len(Vy) > MAX_VERTEX_PAIRS:
        raise VertexBudgetExceeded(f"{len(Rx) * len(Vy)} vertex pairs exceed {MAX_VERTEX_PAIRS}")
    xs = np.repeat(Rx, len(Vy), axis=0)
    ys = np.tile(Vy, (len(Rx), 1))
    cols = np.einsum("ki,kj->kij", xs, ys).reshape(len(xs), -1)
    lam, M, upper = _solve_master(cols, t.Z.ravel())
    d = _decomposition_from_pool(lam, xs, ys)
    G = DualOperator.from_kernel(M.reshape(t.shape), X, Y)
    op = operator_norm(G, config)
    if op.value > 0:
        G = G.scaled(1.0 / op.value)
    lower = pairing(G, t)
    return ProjNormResult(upper, lower, d, G, "exact", "polyhedral_lp",
                          log=[{"iter": 0, "upper": upper, "priced": op.value, "atoms": len(cols)}])


# ---------------------------------------------------------------- column generation

def _svd_atoms(t):
    U, s, Vt = np.linalg.svd(t.Z, full_matrices=False)
    raw = [(s[k], U[:, k], Vt[k]) for k in range(len(s)) if s[k] > 1e-14 * s[0]]
    return normalize_atoms(raw, t.X, t.Y)


class _Pool:
    """Growing atom pool with deduplication up to sign."""

    def __init__(self, m, n, tol=1e-9):
        self.xs = np.zeros((0, m))
        self.ys = np.zeros((0, n))
        self.tol = tol

    def __len__(self):
        return len(self.xs)

    def add(self, x, y):
        x, y = canonical_sign(np.asarray(x, float), np.asarray(y, float))
        if len(self.xs):
            dup = (np.max(np.abs(self.xs - x), axis=1) <= self.tol) & \
                  (np.max(np.abs(self.ys - y), axis=1) <= self.tol)
            if np.any(dup):
                return False
        self.xs = np.vstack([self.xs, x])
        self.ys = np.vstack([self.ys, y])
        return True

    def keep(self, idx):
        self.xs = self.xs[idx]
        self.ys = self.ys[idx]

    def columns(self):
        return np.einsum("ki,kj->kij", self.xs, self.ys).reshape(len(self.xs), -1)


def _price(G, config, iteration, starts=None):
    """Candidate atoms ``(x, y, value)`` sorted by value and the exactness flag.

    An exact scan is used when one exists; otherwise a multistart
    alternating search, warm-started from ``starts`` (second factors).
    """
    cand = _exact_candidates(G, config.vertex_cap)
    exact = cand is not None
    if exact:
        xs, ys, vals = cand
    else:
        xs, ys, vals = alternating_maximize(G.kernel, G.X, G.Y, config, starts=starts,
                                            seed=(config.seed, iteration))
    order = np.argsort(-vals, kind="stable")
    return xs[order], ys[order], vals[order], exact


def _add_violated(pool, xs, ys, vals, threshold, cap):
    added = 0
    for x, y, v in zip(xs, ys, vals):
        if v <= threshold or added >= cap:
            break
        added += pool.add(x, y)
    return added


SMOOTHING = 0.5


def _rank_one_dual(t):
    """Best norm-one dual ``f (x) g`` built from norming functionals of singular pairs.

    Its pairing with ``z`` is a lower bound for the projective norm and the
    exact value when ``z`` has rank one.
    """
    X, Y = t.X, t.Y
    U, s, Vt = np.linalg.svd(t.Z, full_matrices=False)
    best, best_val = None, -np.inf
    for k in range(len(s)):
        if s[k] <= 1e-14 * s[0]:
            break
        f = banach.norming_functional(X, U[:, k]).coords
        g = banach.norming_functional(Y, Vt[k]).coords
        K = np.outer(X.pairing_weights * f, Y.pairing_weights * g)
        val = float(np.sum(K * t.Z))
        if abs(val) > best_val:
            best, best_val = np.sign(val) * K, abs(val)
    return best, best_val


def _vertex_merge(lam, xs, ys, Y, cap):
    """Regroup atoms by the vertices of ``B_Y``: ``sum_j u_j (x) r_j``.

    Each second factor is written as ``sum_j t_j r_j`` with ``sum |t_j| = 1``
    over the vertex representatives ``r_j`` (one small LP when it is not
    itself a vertex); the first factors sharing ``r_j`` are summed into
    ``u_j``. The tensor is unchanged and ``sum ||u_j||`` can only drop.
    """
    R = banach.vertex_representatives(Y, cap)
    U = np.zeros((len(R), xs.shape[1]))
    for l, x, y in zip(lam, xs, ys):
        if l <= 0:
            continue
        hit = np.flatnonzero(np.max(np.abs(R - y), axis=1) <= 1e-12)
        neg = np.flatnonzero(np.max(np.abs(R + y), axis=1) <= 1e-12)
        if hit.size:
            U[hit[0]] += l * x
            continue
        if neg.size:
            U[neg[0]] -= l * x
            continue
        k = len(R)
        res = linprog(np.ones(2 * k), A_eq=np.hstack([R.T, -R.T]), b_eq=y, bounds=(0, None),
                      method="highs")
        if res.status != 0:
            return None
        coef = res.x[:k] - res.x[k:]
        U += l * np.outer(coef, x)
    return R, U


def _vertex_polish(t, lam, xs, ys, K0, config):
    """Exact finish when the second factor ball is an enumerable polytope.

    After :func:`_vertex_merge`, the decomposition is optimal exactly when a
    norm-one dual sends each used vertex ``r_j`` to a norming functional of
    ``u_j``. These are linear equations in the kernel; the correction of
    ``K0`` of least Frobenius norm solving them is checked with the exact
    vertex scan. Returns ``(decomposition, kernel, lower)`` or ``None``.
    """
    X, Y = t.X, t.Y
    cap = config.vertex_cap
    if not banach.is_enumerable(Y, cap):
        return None
    merged = _vertex_merge(lam, xs, ys, Y, cap)
    if merged is None:
        return None
    R, U = merged
    w = banach.norms(X, U)
    used = np.flatnonzero(w > 1e-14 * max(w.max(), 1e-300))
    if not used.size:
        return None
    C = np.array([X.pairing_weights * banach.norming_functional(X, U[j]).coords for j in used]).T
    A = R[used].T
    K = K0 + (C - K0 @ A) @ np.linalg.pinv(A)
    G = DualOperator.from_kernel(K, X, Y)
    op = operator_norm(G, config)
    if op.status != "exact" or op.value <= 0:
        return None
    d = Decomposition(w[used], U[used] / w[used][:, None], R[used])
    return d, K / op.value, pairing(G, t) / op.value


def _polish(t, lam, xs, ys, K0, config):
    out = _vertex_polish(t, lam, xs, ys, K0, config)
    if out is not None:
        return out
    if banach.is_enumerable(t.X, config.vertex_cap):
        tt = Tensor(t.Y, t.X, t.Z.T)
        out = _vertex_polish(tt, lam, ys, xs, K0.T, config)
        if out is not None:
            d, K, lower = out
            return Decomposition(d.lambdas, d.ys, d.xs), K.T, lower
    return None


POLISH_GAP = 1e-3


def proj_norm_colgen(t, config=DEFAULT):
    """Projective norm by column generation over rank-one atoms.

    The restricted master LP minimises the total weight of atoms from a
    growing pool subject to reproducing ``Z``; its equality multipliers define
    a dual operator ``G`` and the pricing step looks for atoms with
    ``G(x)(y) > 1``. The pool starts from the coordinate expansion of ``Z``
    (plus its SVD atoms when ``config.svd_warm_start``).

    Every master dual ``M_k`` gives the lower bound ``upper_k / ||M_k||``; the
    best one so far is kept as a stability centre and the pricing is repeated
    at the midpoint of the centre and ``M_k``, which damps the oscillation of
    plain cutting planes. Iteration stops once no atom prices above
    ``1 + tol``, the relative gap to the best lower bound drops below ``tol``,
    or a budget is hit; in the last case the best decomposition so far is
    returned with ``budget_exceeded`` set.
    """
    X, Y = t.X, t.Y
    m, n = t.shape
    if not np.any(t.Z):
        G = DualOperator(np.zeros((m, n)), X, Y)
        return ProjNormResult(0.0, 0.0, Decomposition.empty(m, n), G, "exact", "colgen")
    tol = config.tol
    pool = _Pool(m, n)
    seeds = [canonical_decomposition(t)]
    if config.svd_warm_start:
        seeds.append(_svd_atoms(t))
    for d in seeds:
        for _, x, y in d:
            pool.add(x, y)

    b = t.Z.ravel()
    history = []
    budget_exceeded = False
    max_new = max(4, m + n)
    center, center_lower = None, -np.inf
    polished = None
    if config.svd_warm_start:
        center, center_lower = _rank_one_dual(t)
    for it in range(config.max_iters):
        lam, M, upper = _solve_master(pool.columns(), b)
        M = M.reshape(m, n)
        G = DualOperator.from_kernel(M, X, Y)
        active = pool.ys[lam > 0]
        xs, ys, vals, exact = _price(G, config, it, starts=active)
        priced = float(vals[0])
        lower = upper / max(priced, 1.0)
        if lower > center_lower:
            center, center_lower = M, lower
        history.append({"iter": it, "upper": upper, "priced": priced, "lower": center_lower,
                        "atoms": len(pool)})
        if priced <= 1.0 + tol or upper - center_lower <= tol * upper:
            break
        if exact and upper - center_lower <= POLISH_GAP * upper:
            out = _polish(t, lam, pool.xs, pool.ys, center / max(priced, 1.0), config)
            if out is not None and out[0].value() - out[2] <= tol * out[0].value():
                polished = out
                history[-1]["polished"] = out[2]
                break
        added = _add_violated(pool, xs, ys, vals, 1.0 + tol, max_new)
        if center is not M:
            Gs = DualOperator.from_kernel(SMOOTHING * center + (1 - SMOOTHING) * M, X, Y)
            sx, sy, _, _ = _price(Gs, config, it, starts=active)
            sv = np.einsum("ki,ij,kj->k", sx, G.kernel, sy)
            order = np.argsort(-sv, kind="stable")
            added += _add_violated(pool, sx[order], sy[order], sv[order], 1.0 + tol, max_new)
        if added == 0:
            log.debug("colgen stalled at iteration %d (priced %.3e)", it, priced)
            break
        if len(pool) > config.max_atoms:
            # drop inactive atoms with the lowest reduced pairing
            k = len(lam)
            score = np.einsum("ki,ij,kj->k", pool.xs[:k], G.kernel, pool.ys[:k])
            score = np.concatenate([np.where(lam > 0, np.inf, score), np.full(len(pool) - k, np.inf)])
            order = np.argsort(-score, kind="stable")[: config.max_atoms // 2]
            pool.keep(np.sort(order))
    else:
        budget_exceeded = True
        lam, M, upper = _solve_master(pool.columns(), b)
        M = M.reshape(m, n)

    if polished is not None:
        d, K, lower = polished
        G = DualOperator.from_kernel(K, X, Y)
        return ProjNormResult(d.value(), pairing(G, t), d, G, "exact", "colgen", history)

    d = _decomposition_from_pool(lam, pool.xs, pool.ys)
    # certify the centre and the final dual, keep the better bound
    best = None
    for K in ([M] if center is None or center is M else [center, M]):
        G = DualOperator.from_kernel(K, X, Y)
        op = operator_norm(G, config)
        status, norm = ("exact", op.value) if op.status == "exact" else ("heuristic", op.value)
        if status != "exact":
            bound = _box_bound(G, config.vertex_cap)
            if bound is not None and bound <= op.value * (1 + 1e-9):
                status, norm = "upper_bounded", bound
        lower = pairing(G, t) / norm if norm > 0 else 0.0
        rank = (status != "heuristic", lower)
        if best is None or rank > best[0]:
            best = (rank, G, norm, status, lower)
    _, G, norm, status, lower = best
    warnings = []
    if status == "heuristic":
        warnings.append("operator norm of the dual is heuristic; lower bound is not certified")
    if budget_exceeded:
        warnings.append(f"iteration budget {config.max_iters} exhausted")
    Gn = G.scaled(1.0 / norm) if norm > 0 else G
    return ProjNormResult(upper, pairing(Gn, t), d, Gn, status, "colgen", history,
                          budget_exceeded, warnings)


# ---------------------------------------------------------------- dispatch

def transpose_tensor(t):
    return Tensor(t.Y, t.X, t.Z.T)


def transpose_result(r):
    d = Decomposition(r.decomposition.lambdas, r.decomposition.ys, r.decomposition.xs)
    G = DualOperator(r.dual.G.T, r.dual.Y, r.dual.X)
    return ProjNormResult(r.upper, r.lower, d, G, r.op_norm_status, r.method, r.log,
                          r.budget_exceeded, r.warnings)


def proj_norm(t, config=DEFAULT, method="auto"):
    """Projective norm through the most exact applicable route.

    ``method`` may force one of ``"hilbert"``, ``"l1"``, ``"polyhedral"``,
    ``"colgen"``.
    """
    if method == "hilbert":
        return proj_norm_oracle_hilbert(t)
    if method == "l1":
        return proj_norm_oracle_l1(t)
    if method == "polyhedral":
        return proj_norm_exact_polyhedral(t, config)
    if method == "colgen":
        return proj_norm_colgen(t, config)
    if method != "auto":
        raise ValueError(f"unknown method {method!r}")
    X, Y = t.X, t.Y
    if banach.euclidean_scaling(X) is not None and banach.euclidean_scaling(Y) is not None:
        return proj_norm_oracle_hilbert(t)
    if banach.l1_scaling(X) is not None:
        return proj_norm_oracle_l1(t)
    if banach.l1_scaling(Y) is not None:
        return transpose_result(proj_norm_oracle_l1(transpose_tensor(t)))
    cap = config.vertex_cap
    if banach.is_enumerable(X, cap) and banach.is_enumerable(Y, cap):
        pairs = len(banach.vertex_representatives(X, cap)) * 2 * len(banach.vertex_representatives(Y, cap))
        if pairs <= MAX_VERTEX_PAIRS:
            return proj_norm_exact_polyhedral(t, config)
    return proj_norm_colgen(t, config)


def nuclear_norm(T, X, Y, config=DEFAULT, method="auto"):
    """Nuclear norm of ``T: X -> Y``.

    ``T`` is given by its kernel matrix of shape ``(X.dim, Y.dim)``: it is the
    coefficient matrix of the corresponding tensor in ``X* (x) Y``, so that
    ``T(x) = T^T (pi_X * x)``. In finite dimensions the canonical map from
    ``X* (x) Y`` onto the nuclear operators is injective, hence the nuclear
    norm equals that projective norm.
    """
    t = Tensor(banach.dual_space(X), Y, T)
    r = proj_norm(t, config, method)
    r.method = f"nuclear:{r.method}"
    return r


def apply_nuclear(T, X, x):
    """Evaluate the operator with kernel ``T`` at ``x in X``."""
    return np.asarray(T).T @ (X.pairing_weights * np.asarray(x))
