"""Finite-dimensional normed spaces and their linear oracles.

Four families are supported, all over the reals:

* ``lp``          -- ``||v|| = (sum |v_i|^p)^(1/p)``
* ``weighted_lp`` -- ``||v|| = ||(w_i v_i)_i||_p``; dual is ``weighted_lp(p', 1/w)``
* ``discrete_lp`` -- ``||v|| = (sum mu_i |v_i|^p)^(1/p)``, a step-function model of
  ``L_p(mu)`` whose pairing is ``<f, v> = sum mu_i f_i v_i``; dual is
  ``discrete_lp(p', mu)``
* ``polyhedral``  -- the gauge of the symmetric convex hull of a vertex list

``p = inf`` is ``math.inf``. Every space carries its conjugate exponent so
that dualising twice returns an identical descriptor.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull

from .errors import (
    DimensionMismatch,
    InputError,
    NonFiniteInput,
    NotPolyhedral,
    SchemaError,
    VertexBudgetExceeded,
    ZeroDirection,
    ZeroVector,
)

INF = math.inf
FAMILIES = ("lp", "weighted_lp", "discrete_lp", "polyhedral")
DEFAULT_VERTEX_CAP = 12


def conjugate_exponent(p):
    if p == 1:
        return INF
    if p == INF:
        return 1.0
    return p / (p - 1.0)


@dataclass(frozen=True)
class NormedSpace:
    """Descriptor of a finite-dimensional real normed space.

    Build instances with :func:`lp`, :func:`weighted_lp`, :func:`discrete_lp`
    or :func:`polyhedral` rather than calling the constructor directly.
    """

    family: str
    dim: int
    p: float = 2.0
    q: float = 2.0
    weights: tuple | None = None
    vertex_reps: tuple | None = None

    # cached arrays live in __dict__ and are not part of equality
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    @cached_property
    def w(self):
        if self.weights is None:
            return np.ones(self.dim)
        return np.asarray(self.weights, dtype=float)

    @cached_property
    def pairing_weights(self):
        """Weights ``pi`` of the duality pairing ``<f, v> = sum pi_i f_i v_i``."""
        if self.family == "discrete_lp":
            return self.w
        return np.ones(self.dim)

    @cached_property
    def V(self):
        return np.asarray(self.vertex_reps, dtype=float)

    def __repr__(self):
        if self.family == "lp":
            return f"lp(p={_fmt_p(self.p)}, dim={self.dim})"
        if self.family == "polyhedral":
            return f"polyhedral(dim={self.dim}, {len(self.vertex_reps)} vertex pairs)"
        return f"{self.family}(p={_fmt_p(self.p)}, dim={self.dim})"


def _fmt_p(p):
    return "inf" if p == INF else f"{p:g}"


def _check_p(p):
    if isinstance(p, str):
        if p.lower() in ("inf", "infinity"):
            return INF
        raise InputError(f"bad exponent {p!r}")
    p = float(p)
    if not (p >= 1.0):
        raise InputError(f"exponent must lie in [1, inf], got {p}")
    return p


def lp(p, dim):
    p = _check_p(p)
    if int(dim) < 1:
        raise InputError("dim must be >= 1")
    return NormedSpace("lp", int(dim), p, conjugate_exponent(p))


def weighted_lp(p, weights):
    p = _check_p(p)
    w = _positive_tuple(weights, "weights")
    return NormedSpace("weighted_lp", len(w), p, conjugate_exponent(p), w)


def discrete_lp(p, cell_measures):
    p = _check_p(p)
    mu = _positive_tuple(cell_measures, "cell_measures")
    return NormedSpace("discrete_lp", len(mu), p, conjugate_exponent(p), mu)


def _positive_tuple(values, name):
    arr = np.asarray(values, dtype=float).ravel()
    if arr.size == 0:
        raise InputError(f"{name} must be nonempty")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteInput(f"{name} must be finite")
    if np.any(arr <= 0):
        raise InputError(f"{name} must be strictly positive")
    return tuple(float(a) for a in arr)


def polyhedral(vertices, tol=1e-9):
    """Space whose unit ball is ``conv(+-v_k)``.

    Duplicate or antipodal vertices are merged, keeping the first
    representative; points strictly inside the hull are dropped so every
    stored vertex lies on the unit sphere.
    """
    V = np.atleast_2d(np.asarray(vertices, dtype=float))
    if V.size == 0:
        raise InputError("vertex list must be nonempty")
    if not np.all(np.isfinite(V)):
        raise NonFiniteInput("vertices must be finite")
    dim = V.shape[1]
    if np.linalg.matrix_rank(V) < dim:
        raise InputError("vertices must span the space")
    reps = []
    for v in V:
        if not np.any(v):
            continue
        if any(np.max(np.abs(v - r)) <= tol or np.max(np.abs(v + r)) <= tol for r in reps):
            continue
        reps.append(v)
    R = np.array(reps)
    keep = [k for k in range(len(R)) if _gauge(np.delete(R, k, axis=0), R[k]) >= 1.0 - tol]
    R = R[keep]
    return NormedSpace("polyhedral", dim, vertex_reps=tuple(tuple(float(a) for a in r) for r in R))


def _gauge(R, v):
    # min sum |t| s.t. R^T t = v; +inf when v is outside the span of R
    m = len(R)
    if m == 0:
        return INF if np.any(v) else 0.0
    A = np.hstack([R.T, -R.T])
    res = linprog(np.ones(2 * m), A_eq=A, b_eq=v, bounds=(0, None), method="highs",
                  options={"primal_feasibility_tolerance": 1e-10,
                           "dual_feasibility_tolerance": 1e-10})
    if res.status == 2:
        return INF
    if res.status != 0:
        raise RuntimeError(f"gauge LP failed: {res.message}")
    return float(res.fun)


def check_vector(space, v, name="vector"):
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.shape[0] != space.dim:
        raise DimensionMismatch(f"{name} has shape {v.shape}, space has dim {space.dim}")
    if not np.all(np.isfinite(v)):
        raise NonFiniteInput(f"{name} has non-finite entries")
    return v


def _measure(space):
    return space.w if space.family == "discrete_lp" else np.ones(space.dim)


def _scaled(space, v):
    # coordinates in which the family is an (ell_p, measure) norm
    return v * space.w if space.family == "weighted_lp" else v


def _mlp_norm(u, p, mu):
    a = np.abs(u)
    if p == INF:
        return float(a.max()) if a.size else 0.0
    if p == 1:
        return float(np.dot(mu, a))
    m = a.max()
    if m == 0:
        return 0.0
    return float(m * np.dot(mu, (a / m) ** p) ** (1.0 / p))


def norm_eval(space, v):
    """Norm of ``v`` in ``space``; polyhedral gauges come from a linear program."""
    v = check_vector(space, v)
    if space.family == "polyhedral":
        return _gauge(space.V, v)
    return _mlp_norm(_scaled(space, v), space.p, _measure(space))


def dual_norm_eval(space, f):
    """``sup { <f, x> : ||x|| <= 1 }`` under the space's own pairing."""
    f = check_vector(space, f, "functional")
    return _dual_norm(space, f)


def _dual_norm(space, f):
    if space.family == "polyhedral":
        return float(np.max(np.abs(space.V @ f)))
    g = f / space.w if space.family == "weighted_lp" else f
    return _mlp_norm(g, space.q, _measure(space))


def dual_norms(space, F):
    """Row-wise dual norms of a 2-D array (vectorised helper)."""
    F = np.atleast_2d(F)
    if space.family == "polyhedral":
        return np.max(np.abs(F @ space.V.T), axis=1)
    G = F / space.w if space.family == "weighted_lp" else F
    A = np.abs(G)
    mu = _measure(space)
    q = space.q
    if q == INF:
        return A.max(axis=1)
    if q == 1:
        return A @ mu
    m = A.max(axis=1)
    safe = np.where(m > 0, m, 1.0)
    return np.where(m > 0, m * ((A / safe[:, None]) ** q @ mu) ** (1.0 / q), 0.0)


def norms(space, X):
    """Row-wise norms; polyhedral rows each cost one LP."""
    X = np.atleast_2d(X)
    if space.family == "polyhedral":
        return np.array([_gauge(space.V, x) for x in X])
    return np.array([_mlp_norm(_scaled(space, x), space.p, _measure(space)) for x in X])


def ball_argmax(space, c):
    """Maximise ``<c, x>`` over the unit ball.

    Returns ``(x, value)`` with ``value == dual_norm_eval(space, c)``. Ties are
    broken deterministically: the smallest coordinate index for ``p = 1``,
    ``+1`` on zero coordinates for ``p = inf``, and the first stored vertex
    (in the order of :func:`vertices`) for polyhedral spaces.
    """
    c = check_vector(space, c, "direction")
    if not np.any(c):
        raise ZeroDirection("cannot maximise along the zero direction")
    return _ball_argmax(space, c)


def _ball_argmax(space, c):
    if space.family == "polyhedral":
        scores = space.V @ c
        k = int(np.argmax(np.abs(scores)))  # argmax returns the first maximiser
        s = 1.0 if scores[k] >= 0 else -1.0
        return s * space.V[k], float(abs(scores[k]))
    g = c / space.w if space.family == "weighted_lp" else c
    mu = _measure(space)
    p, q = space.p, space.q
    if p == 1:
        k = int(np.argmax(np.abs(g)))
        u = np.zeros(space.dim)
        u[k] = np.sign(g[k]) / mu[k]
        value = float(abs(g[k]))
    elif p == INF:
        u = np.where(g >= 0, 1.0, -1.0)
        value = float(np.dot(mu, np.abs(g)))
    else:
        value = _mlp_norm(g, q, mu)
        u = np.sign(g) * (np.abs(g) / value) ** (q - 1.0)
    x = u / space.w if space.family == "weighted_lp" else u
    return x, value


def ball_argmax_rows(space, C):
    """Row-wise :func:`ball_argmax` without input checks; zero rows give zero."""
    C = np.atleast_2d(C)
    if space.family == "polyhedral":
        S = C @ space.V.T
        k = np.argmax(np.abs(S), axis=1)
        val = np.abs(S[np.arange(len(C)), k])
        sgn = np.where(S[np.arange(len(C)), k] >= 0, 1.0, -1.0)
        return sgn[:, None] * space.V[k], val
    G = C / space.w if space.family == "weighted_lp" else C
    mu = _measure(space)
    p, q = space.p, space.q
    rows = np.arange(len(C))
    if p == 1:
        k = np.argmax(np.abs(G), axis=1)
        U = np.zeros_like(G)
        U[rows, k] = np.sign(G[rows, k]) / mu[k]
        val = np.abs(G[rows, k])
    elif p == INF:
        U = np.where(G >= 0, 1.0, -1.0)
        val = np.abs(G) @ mu
    else:
        val = dual_norms(space, C)
        safe = np.where(val > 0, val, 1.0)
        U = np.sign(G) * (np.abs(G) / safe[:, None]) ** (q - 1.0)
    X = U / space.w if space.family == "weighted_lp" else U
    return X, val


@dataclass(frozen=True)
class Functional:
    """A linear functional, stored by its coordinates in the dual space."""

    coords: np.ndarray
    space: NormedSpace

    def __call__(self, v):
        return float(np.dot(self.space.pairing_weights * self.coords, v))

    def norm(self):
        return norm_eval(self.space, self.coords)


def norming_functional(space, v):
    """A norm-one functional ``f`` with ``f(v) = ||v||``."""
    v = check_vector(space, v)
    if not np.any(v):
        raise ZeroVector("the zero vector has no norming functional")
    dual = dual_space(space)
    f, _ = _ball_argmax(dual, v)
    return Functional(f, dual)


def dual_space(space):
    if space.family == "lp":
        return NormedSpace("lp", space.dim, space.q, space.p)
    if space.family == "weighted_lp":
        return NormedSpace("weighted_lp", space.dim, space.q, space.p,
                           tuple(1.0 / w for w in space.weights))
    if space.family == "discrete_lp":
        return NormedSpace("discrete_lp", space.dim, space.q, space.p, space.weights)
    cache = space._cache
    if "dual" not in cache:
        cache["dual"] = NormedSpace("polyhedral", space.dim,
                                    vertex_reps=_polar_vertices(space.V))
    return cache["dual"]


def _polar_vertices(V, tol=1e-9):
    if V.shape[1] == 1:
        return ((1.0 / float(np.max(np.abs(V))),),)
    P = np.vstack([V, -V])
    hull = ConvexHull(P)
    reps = []
    for eq in hull.equations:
        a = eq[:-1] / (-eq[-1]) + 0.0
        if any(np.max(np.abs(a - r)) <= tol or np.max(np.abs(a + r)) <= tol for r in reps):
            continue
        reps.append(a)
    return tuple(tuple(float(t) for t in r) for r in reps)


def is_enumerable(space, vertex_cap=DEFAULT_VERTEX_CAP):
    """True when the unit ball is a polytope whose vertices can be listed."""
    if space.family == "polyhedral":
        return True
    if space.p == 1:
        return True
    return space.p == INF and space.dim <= vertex_cap


def vertex_representatives(space, vertex_cap=DEFAULT_VERTEX_CAP):
    """One vertex per antipodal pair, as rows of an array."""
    if space.family == "polyhedral":
        return space.V
    s = space.w if space.family == "weighted_lp" else np.ones(space.dim)
    if space.p == 1:
        unit = 1.0 / (s * _measure(space))
        return np.diag(unit)
    if space.p == INF:
        if space.dim > vertex_cap:
            raise VertexBudgetExceeded(
                f"ell_inf ball in dim {space.dim} has 2^{space.dim} vertices "
                f"(vertex_cap={vertex_cap})")
        rows = [(1.0,) + t for t in itertools.product((1.0, -1.0), repeat=space.dim - 1)]
        return np.array(rows) / s
    raise NotPolyhedral(f"{space!r} has a strictly convex unit ball")


def vertices(space, vertex_cap=DEFAULT_VERTEX_CAP):
    """Full symmetric vertex list ``[v0, -v0, v1, -v1, ...]``."""
    R = vertex_representatives(space, vertex_cap)
    out = np.empty((2 * len(R), space.dim))
    out[0::2] = R
    out[1::2] = -R + 0.0
    return out


def euclidean_scaling(space):
    """Diagonal ``d`` with ``||v|| = ||d * v||_2`` when the space is Euclidean."""
    if space.family == "polyhedral" or space.p != 2:
        return None
    if space.family == "weighted_lp":
        return space.w
    if space.family == "discrete_lp":
        return np.sqrt(space.w)
    return np.ones(space.dim)


def l1_scaling(space):
    """Diagonal ``d`` with ``||v|| = sum d_i |v_i|`` when the space is an ell_1."""
    if space.family == "polyhedral" or space.p != 1:
        return None
    return space.w.copy() if space.family != "lp" else np.ones(space.dim)


def restrict(space, idx):
    """The same family on the coordinate subset ``idx``."""
    idx = list(idx)
    if space.family == "polyhedral":
        raise NotPolyhedral("coordinate restriction of a polyhedral space is not norm-preserving")
    if space.family == "lp":
        return NormedSpace("lp", len(idx), space.p, space.q)
    return NormedSpace(space.family, len(idx), space.p, space.q,
                       tuple(space.weights[i] for i in idx))


def space_to_json(space):
    def enc(p):
        return "inf" if p == INF else p

    if space.family == "lp":
        return {"family": "lp", "p": enc(space.p), "dim": space.dim}
    if space.family == "weighted_lp":
        return {"family": "weighted_lp", "p": enc(space.p), "weights": list(space.weights)}
    if space.family == "discrete_lp":
        return {"family": "discrete_lp", "p": enc(space.p), "cell_measures": list(space.weights)}
    return {"family": "polyhedral", "vertices": [list(v) for v in space.vertex_reps]}


_ALLOWED = {
    "lp": {"family", "p", "dim"},
    "weighted_lp": {"family", "p", "weights", "dim"},
    "discrete_lp": {"family", "p", "cell_measures", "dim"},
    "polyhedral": {"family", "vertices", "dim"},
}


def space_from_json(obj):
    if not isinstance(obj, dict) or obj.get("family") not in _ALLOWED:
        raise SchemaError(f"bad space descriptor {obj!r}")
    fam = obj["family"]
    extra = set(obj) - _ALLOWED[fam]
    if extra:
        raise SchemaError(f"unknown fields in space descriptor: {sorted(extra)}")
    if fam == "lp":
        sp = lp(obj["p"], obj["dim"])
    elif fam == "weighted_lp":
        sp = weighted_lp(obj["p"], obj["weights"])
    elif fam == "discrete_lp":
        sp = discrete_lp(obj["p"], obj["cell_measures"])
    else:
        sp = polyhedral(obj["vertices"])
    if "dim" in obj and int(obj["dim"]) != sp.dim:
        raise DimensionMismatch(f"declared dim {obj['dim']} but descriptor has dim {sp.dim}")
    return sp
