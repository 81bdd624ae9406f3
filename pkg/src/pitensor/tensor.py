"""Tensors in ``X (x) Y``, atomic decompositions, dual operators, injective norm.

A tensor is stored as its coefficient matrix ``Z`` against the coordinate
bases: ``Z[i, j]`` multiplies ``e_i (x) f_j``. A dual operator ``G: X -> Y*``
acts on tensors through its *kernel* ``K = diag(pi_X) G diag(pi_Y)``, where
``pi`` are the pairing weights of the factors (cell measures for
``discrete_lp``, ones otherwise), so that ``G(x)(y) = x^T K y``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import banach
from .banach import NormedSpace
from .config import DEFAULT, start_streams
from .errors import DimensionMismatch, InputError, NonFiniteInput

ATOM_DROP_TOL = 1e-12
DEDUP_TOL = 1e-9


def _finite_matrix(M, name):
    M = np.array(M, dtype=float)
    if M.ndim != 2:
        raise DimensionMismatch(f"{name} must be a matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise NonFiniteInput(f"{name} has non-finite entries")
    return M


@dataclass(frozen=True, eq=False)
class Tensor:
    X: NormedSpace
    Y: NormedSpace
    Z: np.ndarray

    def __post_init__(self):
        Z = _finite_matrix(self.Z, "tensor matrix")
        if Z.shape != (self.X.dim, self.Y.dim):
            raise DimensionMismatch(
                f"matrix shape {Z.shape} does not match spaces ({self.X.dim}, {self.Y.dim})")
        object.__setattr__(self, "Z", Z)

    @property
    def shape(self):
        return self.Z.shape

    def __sub__(self, other):
        _same_spaces(self, other)
        return Tensor(self.X, self.Y, self.Z - other.Z)

    def __add__(self, other):
        _same_spaces(self, other)
        return Tensor(self.X, self.Y, self.Z + other.Z)

    def scaled(self, a):
        return Tensor(self.X, self.Y, a * self.Z)


def _same_spaces(a, b):
    if a.X != b.X or a.Y != b.Y:
        raise DimensionMismatch("tensors live in different spaces")


@dataclass(eq=False)
class Decomposition:
    """``z = sum_i lambdas[i] * xs[i] (x) ys[i]`` with positive weights.

    The factors are expected on the unit spheres of their spaces; use
    :func:`normalize_atoms` to bring raw rank-one terms into this form and
    :meth:`validate` to check it.
    """

    lambdas: np.ndarray
    xs: np.ndarray
    ys: np.ndarray

    def __post_init__(self):
        self.lambdas = np.asarray(self.lambdas, dtype=float).reshape(-1)
        k = len(self.lambdas)
        self.xs = np.asarray(self.xs, dtype=float).reshape(k, -1) if k else np.asarray(self.xs, dtype=float)
        self.ys = np.asarray(self.ys, dtype=float).reshape(k, -1) if k else np.asarray(self.ys, dtype=float)
        if len(self.xs) != k or len(self.ys) != k:
            raise DimensionMismatch("atom arrays have inconsistent lengths")
        for arr in (self.lambdas, self.xs, self.ys):
            if not np.all(np.isfinite(arr)):
                raise NonFiniteInput("decomposition has non-finite entries")

    @classmethod
    def empty(cls, m, n):
        return cls(np.zeros(0), np.zeros((0, m)), np.zeros((0, n)))

    @classmethod
    def from_atoms(cls, atoms, m=None, n=None):
        atoms = list(atoms)
        if not atoms:
            if m is None or n is None:
                raise InputError("dimensions are required for an empty decomposition")
            return cls.empty(m, n)
        lam = [a[0] for a in atoms]
        return cls(lam, np.array([a[1] for a in atoms], float), np.array([a[2] for a in atoms], float))

    def __len__(self):
        return len(self.lambdas)

    def __iter__(self):
        return iter(zip(self.lambdas, self.xs, self.ys))

    def value(self):
        return float(np.sum(self.lambdas))

    def subset(self, idx):
        idx = np.asarray(idx, dtype=int)
        return Decomposition(self.lambdas[idx], self.xs[idx], self.ys[idx])

    def validate(self, X, Y, tol=1e-9):
        if len(self) == 0:
            return
        if self.xs.shape[1] != X.dim or self.ys.shape[1] != Y.dim:
            raise DimensionMismatch("atoms do not match the factor dimensions")
        if np.any(self.lambdas <= 0):
            raise InputError("atom weights must be strictly positive")
        nx = banach.norms(X, self.xs)
        ny = banach.norms(Y, self.ys)
        if np.any(np.abs(nx - 1) > tol) or np.any(np.abs(ny - 1) > tol):
            raise InputError("atom factors must lie on the unit spheres")


@dataclass(frozen=True, eq=False)
class DualOperator:
    """An operator ``G: X -> Y*``, i.e. a bilinear form on ``X x Y``."""

    G: np.ndarray
    X: NormedSpace
    Y: NormedSpace
    _kernel: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        G = _finite_matrix(self.G, "dual operator")
        if G.shape != (self.X.dim, self.Y.dim):
            raise DimensionMismatch(f"operator shape {G.shape} does not match the spaces")
        object.__setattr__(self, "G", G)
        K = self.X.pairing_weights[:, None] * G * self.Y.pairing_weights[None, :]
        object.__setattr__(self, "_kernel", K)

    @classmethod
    def from_kernel(cls, K, X, Y):
        K = np.asarray(K, dtype=float)
        return cls(K / (X.pairing_weights[:, None] * Y.pairing_weights[None, :]), X, Y)

    @property
    def kernel(self):
        return self._kernel

    def __call__(self, x, y):
        """The number ``G(x)(y)``."""
        return float(np.asarray(x) @ self._kernel @ np.asarray(y))

    def action(self, x):
        """Coordinates of the functional ``G(x)`` in ``Y*``."""
        return (np.asarray(x) @ self._kernel) / self.Y.pairing_weights

    def adjoint_action(self, y):
        """Coordinates of ``x -> G(x)(y)`` in ``X*``."""
        return (self._kernel @ np.asarray(y)) / self.X.pairing_weights

    def scaled(self, a):
        return DualOperator(a * self.G, self.X, self.Y)

    def atom_pairings(self, d):
        if len(d) == 0:
            return np.zeros(0)
        return np.einsum("ki,ij,kj->k", d.xs, self._kernel, d.ys)


def assemble(d, X, Y):
    """The tensor ``sum lambda_i x_i y_i^T``."""
    if len(d) == 0:
        return Tensor(X, Y, np.zeros((X.dim, Y.dim)))
    if d.xs.shape[1] != X.dim or d.ys.shape[1] != Y.dim:
        raise DimensionMismatch("atoms do not match the factor dimensions")
    return Tensor(X, Y, np.einsum("k,ki,kj->ij", d.lambdas, d.xs, d.ys))


def normalize_atoms(raw, X, Y, atom_drop_tol=ATOM_DROP_TOL):
    """Fold norms and signed coefficients of raw terms into positive weights.

    Each entry of ``raw`` is ``(x, y)`` or ``(c, x, y)``. The result has unit
    factors, ``lambda = |c| ||x|| ||y||``, and the sign of ``c`` moved into
    ``x``. Terms with ``lambda < atom_drop_tol`` are dropped.
    """
    lam, xs, ys = [], [], []
    for term in raw:
        if len(term) == 2:
            c, (x, y) = 1.0, term
        elif len(term) == 3:
            c, x, y = term
        else:
            raise InputError("raw atoms are (x, y) or (c, x, y)")
        c = float(c)
        x = banach.check_vector(X, x)
        y = banach.check_vector(Y, y)
        if not np.isfinite(c):
            raise NonFiniteInput("non-finite atom coefficient")
        nx, ny = banach.norm_eval(X, x), banach.norm_eval(Y, y)
        weight = abs(c) * nx * ny
        if weight < atom_drop_tol:
            continue
        lam.append(weight)
        xs.append((np.sign(c) / nx) * x + 0.0)
        ys.append(y / ny)
    if not lam:
        return Decomposition.empty(X.dim, Y.dim)
    return Decomposition(lam, np.array(xs), np.array(ys))


def canonical_decomposition(t):
    """``sum Z_ij e_i (x) f_j`` in normal form."""
    idx = np.argwhere(t.Z != 0)
    m, n = t.shape
    raw = []
    for i, j in idx:
        x = np.zeros(m)
        y = np.zeros(n)
        x[i] = 1.0
        y[j] = 1.0
        raw.append((t.Z[i, j], x, y))
    return normalize_atoms(raw, t.X, t.Y)


def canonical_sign(x, y):
    """Flip ``(x, y) -> (-x, -y)`` so the first nonzero entry of ``x`` is positive."""
    nz = np.flatnonzero(np.abs(x) > 0)
    if nz.size and x[nz[0]] < 0:
        return -x + 0.0, -y + 0.0
    return x, y


def merge_atoms(d, tol=DEDUP_TOL):
    """Sum the weights of atoms equal up to ``tol`` after sign canonicalisation."""
    lam, xs, ys = [], [], []
    for l, x, y in d:
        x, y = canonical_sign(x, y)
        for k in range(len(xs)):
            if np.max(np.abs(xs[k] - x)) <= tol and np.max(np.abs(ys[k] - y)) <= tol:
                lam[k] += l
                break
        else:
            lam.append(l)
            xs.append(x)
            ys.append(y)
    if not lam:
        return Decomposition(np.zeros(0), d.xs[:0], d.ys[:0])
    return Decomposition(lam, np.array(xs), np.array(ys))


def pairing(G, t):
    """``G(z) = sum_ij K_ij Z_ij`` for the kernel ``K`` of ``G``."""
    if G.G.shape != t.Z.shape:
        raise DimensionMismatch(f"operator shape {G.G.shape} vs tensor shape {t.Z.shape}")
    return float(np.sum(G.kernel * t.Z))


def alternating_maximize(K, A, B, config=DEFAULT, starts=None, n_starts=None, seed=None):
    """Multistart alternating maximisation of ``a^T K b`` over ``B_A x B_B``.

    Each start draws its initial ``b`` from its own seeded stream; extra
    initial ``b`` rows can be supplied through ``starts``. Returns arrays
    ``(As, Bs, values)`` of the local maxima, one row per start, with the
    deterministic starts first.
    """
    n_starts = config.multistarts if n_starts is None else n_starts
    seed = config.seed if seed is None else seed
    rows = []
    if starts is not None:
        rows.extend(np.atleast_2d(starts))
    for rng in start_streams(seed, n_starts):
        rows.append(rng.standard_normal(B.dim))
    Bm = np.array(rows, dtype=float).reshape(-1, B.dim)
    piA = A.pairing_weights
    piB = B.pairing_weights
    prev = np.full(len(Bm), -np.inf)
    for _ in range(max(1, config.local_iters)):
        Am, _ = banach.ball_argmax_rows(A, (Bm @ K.T) / piA)
        Bm, vals = banach.ball_argmax_rows(B, (Am @ K) / piB)
        if np.all(vals - prev <= 1e-15 * np.maximum(1.0, np.abs(vals))):
            break
        prev = vals
    return Am, Bm, vals


@dataclass
class InjectiveNormResult:
    value: float
    method: str
    x_star: np.ndarray
    y_star: np.ndarray

    @property
    def exact(self):
        return self.method != "heuristic_lower_bound"


def injective_norm(t, config=DEFAULT):
    """``sup |x*(.) y*(.) applied to z|`` over the dual unit balls.

    Exact via the spectral norm when both factors are Euclidean, or by
    scanning the vertices of a polyhedral dual ball; otherwise a multistart
    alternating search returns a lower bound tagged ``heuristic_lower_bound``.
    """
    X, Y, Z = t.X, t.Y, t.Z
    Xs, Ys = banach.dual_space(X), banach.dual_space(Y)
    K = X.pairing_weights[:, None] * Z * Y.pairing_weights[None, :]
    if not np.any(Z):
        return InjectiveNormResult(0.0, "exact_zero", np.zeros(X.dim), np.zeros(Y.dim))

    dx, dy = banach.euclidean_scaling(Xs), banach.euclidean_scaling(Ys)
    if dx is not None and dy is not None:
        U, s, Vt = np.linalg.svd(K / dx[:, None] / dy[None, :])
        return InjectiveNormResult(float(s[0]), "spectral", U[:, 0] / dx, Vt[0] / dy)

    cap = config.vertex_cap
    options = []
    if banach.is_enumerable(Xs, cap):
        options.append(("x", len(banach.vertex_representatives(Xs, cap))))
    if banach.is_enumerable(Ys, cap):
        options.append(("y", len(banach.vertex_representatives(Ys, cap))))
    if options:
        # cheapest scan first; polyhedral targets need one LP per vertex
        def cost(opt):
            side, count = opt
            target = Y if side == "x" else X
            return (target.family == "polyhedral", count)

        side = min(options, key=cost)[0]
        if side == "x":
            R = banach.vertex_representatives(Xs, cap)
            images = (R * X.pairing_weights) @ Z
            vals = banach.norms(Y, images)
            k = int(np.argmax(vals))
            ystar = banach.norming_functional(Y, images[k]).coords if vals[k] > 0 else np.zeros(Y.dim)
            return InjectiveNormResult(float(vals[k]), "vertex_enumeration", R[k].copy(), ystar)
        R = banach.vertex_representatives(Ys, cap)
        images = (R * Y.pairing_weights) @ Z.T
        vals = banach.norms(X, images)
        k = int(np.argmax(vals))
        xstar = banach.norming_functional(X, images[k]).coords if vals[k] > 0 else np.zeros(X.dim)
        return InjectiveNormResult(float(vals[k]), "vertex_enumeration", xstar, R[k].copy())

    As, Bs, vals = alternating_maximize(K, Xs, Ys, config)
    k = int(np.argmax(vals))
    return InjectiveNormResult(float(vals[k]), "heuristic_lower_bound", As[k], Bs[k])


def tensor_to_json(t):
    return {"X": banach.space_to_json(t.X), "Y": banach.space_to_json(t.Y),
            "matrix": t.Z.tolist()}


def tensor_from_json(obj):
    if not isinstance(obj, dict) or set(obj) != {"X", "Y", "matrix"}:
        raise InputError("tensor payload needs exactly the fields X, Y, matrix")
    X = banach.space_from_json(obj["X"])
    Y = banach.space_from_json(obj["Y"])
    return Tensor(X, Y, obj["matrix"])


def decomposition_to_json(d):
    return [{"lambda": float(l), "x": x.tolist(), "y": y.tolist()} for l, x, y in d]


def decomposition_from_json(items, X, Y):
    atoms = []
    for it in items:
        if not isinstance(it, dict) or set(it) != {"lambda", "x", "y"}:
            raise InputError("decomposition atoms need exactly the fields lambda, x, y")
        atoms.append((float(it["lambda"]), banach.check_vector(X, it["x"]),
                      banach.check_vector(Y, it["y"])))
    return Decomposition.from_atoms(atoms, X.dim, Y.dim)
