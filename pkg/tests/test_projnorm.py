import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from pitensor import banach
from pitensor.config import SolverConfig
from pitensor.errors import VertexBudgetExceeded, WrongFamily
from pitensor.projnorm import (
    nuclear_norm,
    operator_norm,
    proj_norm,
    proj_norm_colgen,
    proj_norm_exact_polyhedral,
    proj_norm_oracle_hilbert,
    proj_norm_oracle_l1,
)
from pitensor.tensor import DualOperator, Tensor, assemble, injective_norm, pairing

from oracles import cross_polytope, row_norm_sum, sign_vectors, trace_norm, vertex_pair_lp

INF = math.inf


def _residual(r, t):
    return float(np.max(np.abs(assemble(r.decomposition, t.X, t.Y).Z - t.Z)))


# ---------------------------------------------------------------- operator norm

def test_operator_norm_identity():
    X = banach.lp(2, 2)
    r = operator_norm(DualOperator(np.eye(2), X, X))
    assert r.status == "exact" and r.value == pytest.approx(1.0)


def test_operator_norm_convention_row_action():
    # G(x)(y) = x^T G y, so the image of x is G^T x: the vertex (1,1) maps to (4, 6)
    G = np.array([[1.0, 2.0], [3.0, 4.0]])
    X, Y = banach.lp(INF, 2), banach.lp(1, 2)
    assert operator_norm(DualOperator(G, X, Y)).value == pytest.approx(6.0)
    # the column-action reading (x -> G x) is the transpose
    assert operator_norm(DualOperator(G.T, X, Y)).value == pytest.approx(7.0)


def test_operator_norm_l1_to_linf():
    G = DualOperator([[1, 2], [3, 4]], banach.lp(1, 2), banach.lp(1, 2))
    assert operator_norm(G).value == pytest.approx(4.0)


def test_operator_norm_attainer_contract(rng):
    for X, Y in [(banach.lp(INF, 3), banach.lp(3, 2)), (banach.lp(2, 3), banach.lp(2, 4)),
                 (banach.lp(1.5, 3), banach.lp(1, 2))]:
        G = DualOperator(rng.standard_normal((X.dim, Y.dim)), X, Y)
        r = operator_norm(G)
        assert r.status == "exact"
        assert banach.norm_eval(X, r.attainer) == pytest.approx(1.0, abs=1e-9)
        assert banach.dual_norm_eval(Y, G.action(r.attainer)) == pytest.approx(r.value, abs=1e-9)


def test_operator_norm_heuristic_is_lower_bound(rng):
    G = DualOperator(rng.standard_normal((3, 3)), banach.lp(3, 3), banach.lp(1.5, 3))
    r = operator_norm(G)
    assert r.status == "lower_bound"
    assert banach.dual_norm_eval(G.Y, G.action(r.attainer)) == pytest.approx(r.value, rel=1e-9)


# ---------------------------------------------------------------- oracles

def test_hilbert_examples():
    X = banach.lp(2, 2)
    r = proj_norm_oracle_hilbert(Tensor(X, X, np.diag([3.0, 4.0])))
    assert r.upper == pytest.approx(7.0)
    assert sorted(r.decomposition.lambdas.tolist()) == pytest.approx([3.0, 4.0])
    np.testing.assert_allclose(np.abs(r.dual.G), np.eye(2), atol=1e-12)
    assert proj_norm_oracle_hilbert(Tensor(X, X, np.eye(2))).upper == pytest.approx(2.0)
    assert proj_norm_oracle_hilbert(Tensor(X, X, [[0, 1], [0, 0]])).upper == pytest.approx(1.0)


def test_hilbert_rejects_other_families():
    with pytest.raises(WrongFamily):
        proj_norm_oracle_hilbert(Tensor(banach.lp(1, 2), banach.lp(2, 2), np.eye(2)))


def test_l1_examples():
    r = proj_norm_oracle_l1(Tensor(banach.lp(1, 2), banach.lp(2, 2), [[3, 4], [0, 5]]))
    assert r.upper == pytest.approx(10.0) and r.lower == pytest.approx(10.0)
    assert proj_norm_oracle_l1(Tensor(banach.lp(1, 2), banach.lp(1, 2), np.eye(2))).upper == 2.0
    r = proj_norm_oracle_l1(Tensor(banach.lp(1, 3), banach.lp(3, 2), [[0, 0], [1, -2], [0, 0]]))
    assert r.upper == pytest.approx(banach.norm_eval(banach.lp(3, 2), (1, -2)))
    with pytest.raises(WrongFamily):
        proj_norm_oracle_l1(Tensor(banach.lp(2, 2), banach.lp(1, 2), np.eye(2)))


@pytest.mark.parametrize("q", [1, 1.5, 2, 4, INF])
def test_l1_oracle_matches_row_norms(rng, q):
    Z = rng.standard_normal((5, 3))
    r = proj_norm_oracle_l1(Tensor(banach.lp(1, 5), banach.lp(q, 3), Z))
    assert r.upper == pytest.approx(row_norm_sum(Z, q), rel=1e-12)
    assert operator_norm(r.dual).value == pytest.approx(1.0, abs=1e-9)


def test_hilbert_oracle_matches_trace_norm(rng):
    for shape in [(4, 4), (5, 3), (2, 6)]:
        Z = rng.standard_normal(shape)
        t = Tensor(banach.lp(2, shape[0]), banach.lp(2, shape[1]), Z)
        r = proj_norm_oracle_hilbert(t)
        assert r.upper == pytest.approx(trace_norm(Z), rel=1e-12)
        assert r.lower == pytest.approx(r.upper, rel=1e-12)
        assert _residual(r, t) <= 1e-12


# ---------------------------------------------------------------- polyhedral LP

def test_polyhedral_examples():
    L = banach.lp(INF, 2)
    r = proj_norm_exact_polyhedral(Tensor(L, L, np.eye(2)))
    assert r.upper == pytest.approx(1.0)
    assert r.gap <= 1e-8
    assert set(np.round(r.decomposition.lambdas, 9)) == {0.5}
    O = banach.lp(1, 2)
    assert proj_norm_exact_polyhedral(Tensor(O, O, np.eye(2))).upper == pytest.approx(2.0)


def test_polyhedral_rank_one_vertices():
    X = banach.polyhedral([(1, 0.2), (0.3, 1), (1, -1)])
    Y = banach.polyhedral([(2, 0), (0, 1)])
    for v in banach.vertices(X):
        for w in banach.vertices(Y):
            r = proj_norm_exact_polyhedral(Tensor(X, Y, np.outer(v, w)))
            assert r.upper == pytest.approx(1.0, abs=1e-9)


def test_polyhedral_lp_matches_brute_force(rng):
    VX = rng.standard_normal((4, 3))
    VY = rng.standard_normal((3, 3))
    X, Y = banach.polyhedral(VX), banach.polyhedral(VY)
    full_x = np.vstack([VX, -VX])
    full_y = np.vstack([VY, -VY])
    for _ in range(5):
        t = Tensor(X, Y, rng.standard_normal((3, 3)))
        r = proj_norm_exact_polyhedral(t)
        assert r.upper == pytest.approx(vertex_pair_lp(full_x, full_y, t.Z), rel=1e-9)
        assert r.gap <= 1e-8
        assert _residual(r, t) <= 1e-9


def test_polyhedral_matches_cube_oracle(rng):
    for _ in range(5):
        Z = rng.standard_normal((3, 3))
        r = proj_norm_exact_polyhedral(Tensor(banach.lp(INF, 3), banach.lp(1, 3), Z))
        assert r.upper == pytest.approx(vertex_pair_lp(sign_vectors(3), cross_polytope(3), Z), rel=1e-9)


def test_polyhedral_monotone_under_ball_inclusion(rng):
    base = rng.standard_normal((3, 2))
    extra = rng.standard_normal((2, 2)) * 1.5
    small, big = banach.polyhedral(base), banach.polyhedral(np.vstack([base, extra]))
    Y = banach.lp(INF, 2)
    for _ in range(5):
        Z = rng.standard_normal((2, 2))
        assert (proj_norm_exact_polyhedral(Tensor(big, Y, Z)).upper
                <= proj_norm_exact_polyhedral(Tensor(small, Y, Z)).upper + 1e-9)


def test_polyhedral_budget():
    with pytest.raises(VertexBudgetExceeded):
        proj_norm_exact_polyhedral(Tensor(banach.lp(INF, 3), banach.lp(INF, 3), np.eye(3)),
                                   SolverConfig(vertex_cap=2))


# ---------------------------------------------------------------- column generation

@pytest.mark.parametrize("shape", [(4, 3), (3, 3)])
def test_colgen_matches_hilbert(rng, shape):
    cfg = SolverConfig(svd_warm_start=False)
    for _ in range(3):
        Z = rng.standard_normal(shape)
        r = proj_norm_colgen(Tensor(banach.lp(2, shape[0]), banach.lp(2, shape[1]), Z), cfg)
        assert abs(r.upper - trace_norm(Z)) <= 1e-5 * trace_norm(Z)
        assert r.op_norm_status == "exact"


@pytest.mark.parametrize("q", [2, INF, "poly"])
def test_colgen_matches_l1_oracle(rng, q):
    Y = banach.polyhedral([(1, 0, 0.5), (0, 1, 0.5), (0.3, -0.4, 1)]) if q == "poly" else banach.lp(q, 3)
    for _ in range(2):
        Z = rng.standard_normal((5, 3))
        t = Tensor(banach.lp(1, 5), Y, Z)
        ref = float(np.sum(banach.norms(Y, Z)))
        r = proj_norm_colgen(t)
        assert abs(r.upper - ref) <= 1e-6 * ref
        assert _residual(r, t) <= 1e-8


@pytest.mark.parametrize("p, q", [(1, 3), (1.5, 3), (2, INF), (INF, 1.5), (4, 4)])
def test_colgen_rank_one_law(rng, p, q):
    X, Y = banach.lp(p, 3), banach.lp(q, 3)
    x, y = rng.standard_normal(3), rng.standard_normal(3)
    r = proj_norm_colgen(Tensor(X, Y, np.outer(x, y)))
    assert r.upper == pytest.approx(banach.norm_eval(X, x) * banach.norm_eval(Y, y), abs=1e-8)


def test_colgen_weak_duality_general_pair(rng):
    X, Y = banach.lp(3, 3), banach.lp(1.5, 3)
    t = Tensor(X, Y, rng.standard_normal((3, 3)))
    r = proj_norm_colgen(t)
    assert r.op_norm_status in {"heuristic", "upper_bounded", "exact"}
    # the box bound is an honest upper bound on ||G||
    from pitensor.projnorm import _box_bound

    bound = _box_bound(r.dual, 12)
    assert pairing(r.dual, t) <= bound * r.upper + 1e-9
    assert r.lower <= r.upper + 1e-9
    assert _residual(r, t) <= 1e-8


def test_colgen_log_and_budget(rng):
    t = Tensor(banach.lp(3, 3), banach.lp(1.5, 3), rng.standard_normal((3, 3)))
    r = proj_norm_colgen(t, SolverConfig(max_iters=2))
    assert r.budget_exceeded
    assert len(r.log) <= 2
    assert r.upper >= r.lower - 1e-9


# ---------------------------------------------------------------- dispatch and nuclear

@pytest.mark.parametrize("X, Y, method", [
    (banach.lp(2, 3), banach.lp(2, 2), "hilbert_oracle"),
    (banach.lp(1, 3), banach.lp(3, 2), "l1_oracle"),
    (banach.lp(3, 3), banach.lp(1, 2), "l1_oracle"),
    (banach.lp(INF, 3), banach.lp(INF, 2), "polyhedral_lp"),
    (banach.lp(3, 3), banach.lp(4, 2), "colgen"),
])
def test_dispatch(rng, X, Y, method):
    t = Tensor(X, Y, rng.standard_normal((X.dim, Y.dim)))
    r = proj_norm(t)
    assert r.method == method
    assert _residual(r, t) <= 1e-8
    assert injective_norm(t).value <= r.upper + 1e-8


def test_transposed_l1_route_keeps_orientation(rng):
    Z = rng.standard_normal((3, 2))
    t = Tensor(banach.lp(3, 3), banach.lp(1, 2), Z)
    r = proj_norm(t)
    assert r.dual.G.shape == (3, 2)
    assert r.upper == pytest.approx(float(np.sum(np.linalg.norm(Z, 3, axis=0))), rel=1e-12)
    assert pairing(r.dual, t) == pytest.approx(r.upper, rel=1e-12)


def test_nuclear_examples():
    X = banach.lp(2, 2)
    assert nuclear_norm(np.eye(2), X, X).upper == pytest.approx(2.0)
    r = nuclear_norm([[3, 4], [0, 5]], banach.lp(INF, 2), banach.lp(2, 2))
    assert r.upper == pytest.approx(10.0)
    xs, y = np.array([1.0, -3.0]), np.array([2.0, 1.0])
    Xa, Ya = banach.lp(1.5, 2), banach.lp(4, 2)
    r = nuclear_norm(np.outer(xs, y), Xa, Ya)
    expected = banach.dual_norm_eval(Xa, xs) * banach.norm_eval(Ya, y)
    assert r.upper == pytest.approx(expected, abs=1e-8)


# ---------------------------------------------------------------- properties

finite = st.floats(-5, 5, allow_nan=False, allow_infinity=False)


@given(st.sampled_from([(1, 2), (2, 2), (INF, INF), (1, INF), (INF, 1), (2, 1)]),
       arrays(float, (3, 3), elements=finite))
def test_weak_duality_exact_routes(pq, Z):
    t = Tensor(banach.lp(pq[0], 3), banach.lp(pq[1], 3), Z)
    r = proj_norm(t)
    op = operator_norm(r.dual).value
    assert pairing(r.dual, t) <= op * r.upper + 1e-9 * max(1, r.upper)
    assert r.lower <= r.upper + 1e-9 * max(1, r.upper)
