"""Norm-one projections onto finite-dimensional ranges and the approximation pipeline.

Each :class:`Projection` factors as ``P = E R``: ``R`` maps ambient
coordinates to coordinates in the range and ``E`` embeds the range back
isometrically. For the proved constructions the range carries its own
:class:`~pitensor.banach.NormedSpace` (``range_space``), which is what lets a
tensor supported in ``range(P) (x) range(Q)`` be solved in small dimension and
its dual certificate lifted back to the ambient pair.

Infinite-dimensional spaces are modelled by finite coordinate models; the
mass of an infinite tail is carried as a certified number ``tail_bound``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import banach
from .attain import certify_attainment
from .config import DEFAULT
from .errors import (
    BadRange,
    EmptyBlock,
    InputError,
    NonMonotoneNorm,
    SolverInconclusive,
    TailTooHeavy,
    WrongFamily,
    ZeroMeasureBlock,
)
from .projnorm import proj_norm
from .tensor import (
    Decomposition,
    DualOperator,
    Tensor,
    decomposition_from_json,
    decomposition_to_json,
)

# ---------------------------------------------------------------- spaces without a family

@dataclass(frozen=True)
class AbsoluteNorm:
    """A norm on the plane used to glue two spaces, ``||(x, y)|| = N(||x||, ||y||)``.

    ``kind`` is ``"p"`` (the ``ell_p`` norm of the pair) or ``"polyhedral"``
    (the gauge of a symmetric planar polygon given by ``vertices``).
    """

    kind: str
    p: float = 2.0
    vertices: tuple | None = None

    def __post_init__(self):
        if self.kind == "polyhedral":
            object.__setattr__(self, "_space", banach.polyhedral(self.vertices))
        elif self.kind != "p":
            raise InputError(f"unknown absolute norm kind {self.kind!r}")

    def __call__(self, a, b):
        v = np.array([a, b], dtype=float)
        if self.kind == "p":
            return banach.norm_eval(banach.lp(self.p, 2), v)
        return banach.norm_eval(self._space, v)


def check_monotone(a, draws=200, seed=0):
    """Raise :class:`NonMonotoneNorm` unless ``N`` grows with ``|a|`` and ``|b|``.

    Sampled: pairs ``(u, v)`` with ``|u_i| <= |v_i|`` must satisfy
    ``N(u) <= N(v)``; every unit coordinate axis is also checked.
    """
    rng = np.random.default_rng(seed)
    V = np.abs(rng.standard_normal((draws, 2)))
    U = V * rng.random((draws, 2))
    probes = [(np.array([1.0, 0.0]), np.array([1.0, 1.0])),
              (np.array([0.0, 1.0]), np.array([1.0, 1.0]))]
    probes += list(zip(U, V))
    for u, v in probes:
        if a(*u) > a(*v) * (1 + 1e-12) + 1e-15:
            raise NonMonotoneNorm(
                f"N({u[0]:.6g}, {u[1]:.6g}) = {a(*u):.6g} > N({v[0]:.6g}, {v[1]:.6g}) = {a(*v):.6g}")


@dataclass(frozen=True, eq=False)
class DirectSumSpace:
    """``X (+)_a Y`` with the first ``X.dim`` coordinates in ``X``."""

    X: object
    Y: object
    a: AbsoluteNorm

    @property
    def dim(self):
        return self.X.dim + self.Y.dim

    def norm(self, v):
        v = np.asarray(v, dtype=float)
        return self.a(space_norm(self.X, v[: self.X.dim]), space_norm(self.Y, v[self.X.dim:]))


def space_norm(space, v):
    if isinstance(space, banach.NormedSpace):
        return banach.norm_eval(space, v)
    return space.norm(v)


# ---------------------------------------------------------------- projections

@dataclass(eq=False)
class Projection:
    """A projection ``P = E R`` with range spanned by the columns of ``E``.

    ``norm_status`` is ``"proved_one"`` when the construction guarantees
    ``||P|| = 1`` and ``"sampled"`` otherwise; ``norm_value`` holds a computed
    norm where one is available.
    """

    P: np.ndarray
    space: object
    embed: np.ndarray
    coords: np.ndarray
    range_space: object
    norm_status: str
    kind: str
    norm_value: float | None = None
    factors: tuple = ()
    norm_tag: str | None = None

    @property
    def range_basis(self):
        return self.embed.T

    @property
    def rank(self):
        return self.embed.shape[1]

    def __call__(self, v):
        if self.kind == "tensor":
            Pl, Pr = self.factors
            return Pl.P @ np.asarray(v, dtype=float) @ Pr.P.T
        return self.P @ np.asarray(v, dtype=float)

    def idempotence_defect(self):
        return float(np.max(np.abs(self.P @ self.P - self.P))) if self.P.size else 0.0

    def summary(self):
        return {"kind": self.kind, "dim": int(self.P.shape[0]), "rank": int(self.rank),
                "norm_status": self.norm_status}


def _projection(space, E, R, range_space, status, kind, norm_value=None):
    E = np.asarray(E, dtype=float)
    R = np.asarray(R, dtype=float)
    return Projection(E @ R, space, E, R, range_space, status, kind, norm_value)


def identity_projection(space):
    """``P = I``; always norm one."""
    I = np.eye(space.dim)
    return _projection(space, I, I, space, "proved_one", "identity")


def truncation_projection(space, k):
    """Keep the first ``k`` coordinates.

    Norm one on every ``ell_p`` model (weighted or with cell measures). On a
    polyhedral space the norm is computed exactly from the vertices and the
    status is ``"sampled"``.
    """
    if not (isinstance(k, (int, np.integer)) and 1 <= k <= space.dim):
        raise BadRange(f"truncation length must lie in [1, {space.dim}], got {k!r}")
    E = np.eye(space.dim)[:, :k]
    if space.family == "polyhedral":
        Pv = banach.vertex_representatives(space) @ (E @ E.T).T
        nv = float(np.max(banach.norms(space, Pv)))
        return _projection(space, E, E.T, None, "sampled", "truncation", nv)
    return _projection(space, E, E.T, banach.restrict(space, range(k)),
                       "proved_one", "truncation", 1.0)


def _check_partition(blocks, n):
    blocks = [list(map(int, b)) for b in blocks]
    if any(len(b) == 0 for b in blocks):
        raise EmptyBlock("partition contains an empty block")
    flat = [i for b in blocks for i in b]
    if any(i < 0 or i >= n for i in flat):
        raise BadRange(f"cell index outside 0..{n - 1}")
    if sorted(flat) != list(range(n)):
        raise BadRange("blocks must partition the cells exactly once")
    return blocks


def conditional_expectation_projection(space, blocks):
    """Average over each block of a coarse partition of the cells.

    ``(Pf)_i = sum_{j in A} mu_j f_j / mu(A)`` for the block ``A`` containing
    cell ``i``; the range is spanned by the block indicators and, with the
    block measures as cell measures, is again a ``discrete_lp`` space.
    """
    if space.family != "discrete_lp":
        raise WrongFamily("conditional expectation needs a discrete_lp space")
    blocks = _check_partition(blocks, space.dim)
    mu = np.asarray(space.weights)
    masses = np.array([mu[b].sum() for b in blocks])
    if np.any(masses <= 0):
        raise ZeroMeasureBlock("a block has zero total measure")
    E = np.zeros((space.dim, len(blocks)))
    R = np.zeros((len(blocks), space.dim))
    for j, b in enumerate(blocks):
        E[b, j] = 1.0
        R[j, b] = mu[b] / masses[j]
    rng = banach.discrete_lp(space.p, masses)
    return _projection(space, E, R, rng, "proved_one", "conditional_expectation", 1.0)


def _block_diag(A, B):
    out = np.zeros((A.shape[0] + B.shape[0], A.shape[1] + B.shape[1]))
    out[: A.shape[0], : A.shape[1]] = A
    out[A.shape[0]:, A.shape[1]:] = B
    return out


def direct_sum_projection(P, Q, a):
    """``(x, y) -> (Px, Qy)`` on ``X (+)_a Y``.

    Norm one when both parts are and ``a`` is monotone in each argument;
    a sampled monotonicity check guards the latter.
    """
    check_monotone(a)
    space = DirectSumSpace(P.space, Q.space, a)
    rng = None
    if P.range_space is not None and Q.range_space is not None:
        rng = DirectSumSpace(P.range_space, Q.range_space, a)
    status = "proved_one" if P.norm_status == Q.norm_status == "proved_one" else "sampled"
    return _projection(space, _block_diag(P.embed, Q.embed), _block_diag(P.coords, Q.coords),
                       rng, status, "direct_sum")


def tensor_projection(P, Q, norm_tag="pi"):
    """``Z -> P Z Q^T`` on coefficient matrices.

    ``P`` is the Kronecker product ``kron(P, Q)`` acting on the row-major
    flattening of ``Z``; it has norm one for the projective and the injective
    norm whenever both factors do.
    """
    if norm_tag not in ("pi", "epsilon"):
        raise InputError(f"norm_tag must be 'pi' or 'epsilon', got {norm_tag!r}")
    status = "proved_one" if P.norm_status == Q.norm_status == "proved_one" else "sampled"
    proj = _projection((P.space, Q.space), np.kron(P.embed, Q.embed), np.kron(P.coords, Q.coords),
                       None, status, "tensor")
    proj.factors = (P, Q)
    proj.norm_tag = norm_tag
    return proj


def sampled_contractivity(proj, draws=1000, seed=0):
    """Largest observed ``||Pv|| / ||v||`` over seeded random draws.

    Draws mix Gaussian, sparse and sign vectors so that both spread and
    concentrated directions are probed. Tensor projections are not handled
    here because their norms need a solver.
    """
    if proj.kind == "tensor":
        raise InputError("use a projective or injective norm routine for tensor projections")
    rng = np.random.default_rng(seed)
    n = proj.P.shape[0]
    worst = 0.0
    for k in range(draws):
        kind = k % 3
        if kind == 0:
            v = rng.standard_normal(n)
        elif kind == 1:
            v = rng.standard_normal(n) * (rng.random(n) < 0.3)
        else:
            v = rng.choice([-1.0, 1.0], n) * rng.random(n) ** 4
        nv = space_norm(proj.space, v)
        if nv == 0:
            continue
        worst = max(worst, space_norm(proj.space, proj(v)) / nv)
    return worst


# ---------------------------------------------------------------- metric pi witness

def _level_set_blocks(vectors):
    # cells on which every vector takes the same value are merged
    keys = {}
    for i, row in enumerate(np.asarray(vectors, dtype=float).T):
        keys.setdefault(tuple(row.tolist()), []).append(i)
    return sorted(keys.values())


def covering_projection(space, vectors, budgets):
    """Smallest natural norm-one projection with ``||v_i - P v_i|| < budgets[i]``.

    Truncation to the shortest sufficient prefix for ``ell_p`` models, the
    level-set conditional expectation (exact) for ``discrete_lp``, and the
    identity for polyhedral spaces.
    """
    V = np.atleast_2d(np.asarray(vectors, dtype=float))
    budgets = np.broadcast_to(np.asarray(budgets, dtype=float), (len(V),))
    if space.family == "polyhedral":
        return identity_projection(space)
    if space.family == "discrete_lp":
        return conditional_expectation_projection(space, _level_set_blocks(V))
    for k in range(1, space.dim + 1):
        P = truncation_projection(space, k)
        errs = banach.norms(space, V - V @ P.P.T)
        if np.all(errs < budgets):
            return P
    return truncation_projection(space, space.dim)


def metric_pi_witness(space, samples, eps):
    """A norm-one projection whose range ``eps``-approximates every sample.

    Returns the projection and the approximants ``P x_i``.
    """
    if not eps > 0:
        raise InputError("eps must be positive")
    P = covering_projection(space, samples, eps)
    S = np.atleast_2d(np.asarray(samples, dtype=float))
    return P, S @ P.P.T


# ---------------------------------------------------------------- norm agreement

def norm_agreement_check(P, Q, Z, config=DEFAULT):
    """Projective norm of ``Z`` in the ambient pair and in the range pair.

    ``Z`` must satisfy ``P Z Q^T = Z``. The range pair is described on the
    range bases of ``P`` and ``Q``; both solves use the best available route.
    """
    Z = np.asarray(Z, dtype=float)
    if P.range_space is None or Q.range_space is None:
        raise WrongFamily("both projections need a described range space")
    if np.max(np.abs(P.P @ Z @ Q.P.T - Z), initial=0.0) > 1e-9 * max(1.0, np.abs(Z).max()):
        raise BadRange("Z is not supported in the product of the ranges")
    amb = proj_norm(Tensor(P.space, Q.space, Z), config)
    res = proj_norm(Tensor(P.range_space, Q.range_space, P.coords @ Z @ Q.coords.T), config)
    return {"ambient": amb.upper, "restricted": res.upper,
            "difference": abs(amb.upper - res.upper),
            "ambient_method": amb.method, "restricted_method": res.method,
            "ambient_lower": amb.lower, "restricted_lower": res.lower}


# ---------------------------------------------------------------- series and pipeline

@dataclass(eq=False)
class SeriesTensor:
    """A finite head ``sum lambda_n x_n (x) y_n`` plus an infinite tail of mass <= ``tail_bound``."""

    X: banach.NormedSpace
    Y: banach.NormedSpace
    decomposition: Decomposition
    tail_bound: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.tail_bound) and self.tail_bound >= 0):
            raise InputError("tail_bound must be a nonnegative real")
        self.decomposition.validate(self.X, self.Y)

    def __len__(self):
        return len(self.decomposition)

    def head(self, k=None):
        d = self.decomposition if k is None else self.decomposition.subset(range(k))
        return Tensor(self.X, self.Y, np.einsum("k,ki,kj->ij", d.lambdas, d.xs, d.ys)
                      if len(d) else np.zeros((self.X.dim, self.Y.dim)))

    def to_json(self):
        return {"X": banach.space_to_json(self.X), "Y": banach.space_to_json(self.Y),
                "atoms": decomposition_to_json(self.decomposition),
                "tail_bound": float(self.tail_bound)}

    @classmethod
    def from_json(cls, obj):
        if not isinstance(obj, dict) or not set(obj) <= {"X", "Y", "atoms", "tail_bound"} \
                or not {"X", "Y", "atoms"} <= set(obj):
            raise InputError("series payload needs X, Y, atoms and optionally tail_bound")
        X = banach.space_from_json(obj["X"])
        Y = banach.space_from_json(obj["Y"])
        return cls(X, Y, decomposition_from_json(obj["atoms"], X, Y),
                   float(obj.get("tail_bound", 0.0)))


def geometric_diagonal(space_x, space_y, n, ratio=0.5, tail_bound=None):
    """``sum_{i<n} ratio^(i+1) e_i (x) e_i`` with unit-normalised basis vectors.

    The default ``tail_bound`` is the remaining geometric mass
    ``ratio^(n+1) / (1 - ratio)``.
    """
    lam, xs, ys = [], [], []
    for i in range(n):
        ex = np.zeros(space_x.dim)
        ey = np.zeros(space_y.dim)
        ex[i] = 1.0
        ey[i] = 1.0
        lam.append(ratio ** (i + 1))
        xs.append(ex / banach.norm_eval(space_x, ex))
        ys.append(ey / banach.norm_eval(space_y, ey))
    if tail_bound is None:
        tail_bound = ratio ** (n + 1) / (1 - ratio)
    return SeriesTensor(space_x, space_y, Decomposition(lam, xs, ys), tail_bound)


@dataclass
class PipelineResult:
    k: int
    mode: str
    range_dims: tuple
    z_prime: Tensor
    decomposition: Decomposition
    certificate: object
    distance_bound: float
    dropped_mass: float
    projection_errors: list
    budgets: list
    method: str
    op_norm_status: str
    projections: tuple
    restricted_certificate: object = None
    warnings: list = field(default_factory=list)

    @property
    def certified(self):
        return self.certificate.certified

    def to_json(self):
        return {
            "k": self.k,
            "mode": self.mode,
            "range_dims": list(self.range_dims),
            "projections": [p.summary() for p in self.projections],
            "z_prime": self.z_prime.Z.tolist(),
            "decomposition": decomposition_to_json(self.decomposition),
            "certificate": self.certificate.to_json(),
            "restricted_certificate": (self.restricted_certificate.to_json()
                                       if self.restricted_certificate else None),
            "distance_bound": self.distance_bound,
            "dropped_mass": self.dropped_mass,
            "projection_errors": [list(e) for e in self.projection_errors],
            "budgets": list(self.budgets),
            "method": self.method,
            "op_norm_status": self.op_norm_status,
            "warnings": list(self.warnings),
        }


def _uniformly_convex(space):
    return space.family != "polyhedral" and 1 < space.p < banach.INF


def approx_pipeline(u, eps, mode="a", config=DEFAULT, cert_tol=1e-6):
    """Approximate a series tensor within ``eps`` by a norm-attaining tensor.

    Mode ``"a"`` projects both factors; mode ``"b"`` keeps a uniformly
    convex second factor whole and projects only the first.

    1. keep the first ``k`` atoms, ``k`` minimal with dropped mass plus
       ``tail_bound`` below ``eps/2`` (mode ``"b"``: ``eps/3``);
    2. choose norm-one projections whose ranges approximate atom ``n``
       within ``eps/(4 k lambda_n)`` (mode ``"b"``: ``eps/(6 k lambda_n)``);
    3. project the atoms, giving ``z'``;
    4. solve the projective norm of ``z'`` in the range pair and lift the
       optimal decomposition and dual back to the ambient pair;
    5. certify attainment there.

    Raises
    ------
    TailTooHeavy
        If ``tail_bound`` alone exhausts the truncation budget.
    """
    if not eps > 0:
        raise InputError("eps must be positive")
    if mode not in ("a", "b"):
        raise InputError(f"mode must be 'a' or 'b', got {mode!r}")
    if mode == "b" and not _uniformly_convex(u.Y):
        raise WrongFamily("mode 'b' needs a uniformly convex second factor (1 < p < inf)")
    share = 2 if mode == "a" else 3
    head_budget = eps / share
    if u.tail_bound >= head_budget:
        raise TailTooHeavy(f"tail_bound {u.tail_bound:g} is not below eps/{share} = {head_budget:g}")

    d = u.decomposition
    lam = d.lambdas
    suffix = np.concatenate([np.cumsum(lam[::-1])[::-1], [0.0]])  # suffix[k] = sum_{n >= k}
    k = 0 if len(d) == 0 else next(j for j in range(1, len(d) + 1)
                                   if suffix[j] + u.tail_bound < head_budget)
    dropped = float(suffix[k])
    head = d.subset(range(k))
    per_atom = 4 if mode == "a" else 6
    budgets = eps / (per_atom * k * head.lambdas) if k else np.zeros(0)

    X, Y = u.X, u.Y
    if k:
        Px = covering_projection(X, head.xs, budgets)
        Qy = covering_projection(Y, head.ys, budgets) if mode == "a" else identity_projection(Y)
    else:
        Px, Qy = identity_projection(X), identity_projection(Y)
    xs_p = head.xs @ Px.P.T
    ys_p = head.ys @ Qy.P.T
    errors = [(float(banach.norm_eval(X, a - b)), float(banach.norm_eval(Y, c - e)))
              for a, b, c, e in zip(head.xs, xs_p, head.ys, ys_p)]
    Zp = np.einsum("k,ki,kj->ij", head.lambdas, xs_p, ys_p) if k else np.zeros((X.dim, Y.dim))
    z_prime = Tensor(X, Y, Zp)

    Xr, Yr = Px.range_space, Qy.range_space
    C = Px.coords @ Zp @ Qy.coords.T
    res = proj_norm(Tensor(Xr, Yr, C), config)
    warn = list(res.warnings)
    if res.op_norm_status == "heuristic":
        msg = "no exact-dual route in the range pair; certificate may be inconclusive"
        warnings.warn(msg, SolverInconclusive, stacklevel=2)
        warn.append(msg)

    rd = res.decomposition
    d_amb = Decomposition(rd.lambdas, rd.xs @ Px.embed.T, rd.ys @ Qy.embed.T)
    K_amb = Px.coords.T @ res.dual.kernel @ Qy.coords
    G_amb = DualOperator.from_kernel(K_amb, X, Y)
    restricted = certify_attainment(Tensor(Xr, Yr, C), rd, res.dual, cert_tol, config)
    cert = certify_attainment(z_prime, d_amb, G_amb, cert_tol, config)
    return PipelineResult(
        k=k, mode=mode, range_dims=(Px.rank, Qy.rank), z_prime=z_prime, decomposition=d_amb,
        certificate=cert, distance_bound=float(eps), dropped_mass=dropped,
        projection_errors=errors, budgets=[float(b) for b in budgets], method=res.method,
        op_norm_status=res.op_norm_status, projections=(Px, Qy),
        restricted_certificate=restricted, warnings=warn)
