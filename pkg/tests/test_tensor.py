import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from pitensor import banach
from pitensor.config import SolverConfig
from pitensor.errors import DimensionMismatch, InputError, NonFiniteInput
from pitensor.projnorm import proj_norm
from pitensor.tensor import (
    Decomposition,
    DualOperator,
    Tensor,
    assemble,
    canonical_decomposition,
    decomposition_from_json,
    decomposition_to_json,
    injective_norm,
    merge_atoms,
    normalize_atoms,
    pairing,
    tensor_from_json,
    tensor_to_json,
)

from oracles import injective_sign_scan

INF = math.inf
E1, E2 = np.array([1.0, 0.0]), np.array([0.0, 1.0])


def test_assemble_examples():
    X = banach.lp(2, 2)
    d = Decomposition.from_atoms([(1, E1, E1)])
    np.testing.assert_array_equal(assemble(d, X, X).Z, [[1, 0], [0, 0]])
    d = Decomposition.from_atoms([(1, E1, E1), (1, E2, E2)])
    np.testing.assert_array_equal(assemble(d, X, X).Z, np.eye(2))
    L = banach.lp(INF, 2)
    d = Decomposition.from_atoms([(0.5, (1, 1), (1, 1)), (0.5, (1, -1), (1, -1))])
    np.testing.assert_allclose(assemble(d, L, L).Z, np.eye(2))


def test_assemble_rejects_bad_dimensions():
    d = Decomposition.from_atoms([(1, (1, 0, 0), E1)])
    with pytest.raises(DimensionMismatch):
        assemble(d, banach.lp(2, 2), banach.lp(2, 2))


def test_normalize_atoms_examples():
    X = banach.lp(2, 2)
    d = normalize_atoms([((3, 0), (0, 2))], X, X)
    assert d.lambdas.tolist() == [6.0]
    np.testing.assert_array_equal(d.xs[0], E1)
    np.testing.assert_array_equal(d.ys[0], E2)
    d = normalize_atoms([(-2, E1, E1)], X, X)
    assert d.lambdas.tolist() == [2.0]
    np.testing.assert_array_equal(d.xs[0], -E1)
    assert len(normalize_atoms([(1e-15, E1, E1)], X, X)) == 0


def test_normalize_atoms_rejects_non_finite():
    X = banach.lp(2, 2)
    with pytest.raises(NonFiniteInput):
        normalize_atoms([(float("nan"), E1, E1)], X, X)
    with pytest.raises(NonFiniteInput):
        normalize_atoms([((np.inf, 0), E1)], X, X)


@pytest.mark.parametrize("G, Z, expected", [
    (np.eye(2), np.eye(2), 2.0),
    (np.eye(2), [[1, 0], [0, 0]], 1.0),
    ([[1, 2], [3, 4]], [[0, 1], [1, 0]], 5.0),
])
def test_pairing_examples(G, Z, expected):
    X = banach.lp(2, 2)
    assert pairing(DualOperator(G, X, X), Tensor(X, X, Z)) == expected


def test_pairing_shape_mismatch():
    X, Y = banach.lp(2, 2), banach.lp(2, 3)
    with pytest.raises(DimensionMismatch):
        pairing(DualOperator(np.eye(2), X, X), Tensor(X, Y, np.zeros((2, 3))))


def test_discrete_pairing_uses_cell_measures():
    mu = (0.25, 0.75)
    X = banach.discrete_lp(2, mu)
    G = DualOperator(np.ones((2, 2)), X, X)
    # G(x)(y) = sum mu_i x_i G_ij y_j mu_j
    x, y = np.array([1.0, 2.0]), np.array([3.0, -1.0])
    expected = sum(mu[i] * x[i] * y[j] * mu[j] for i in range(2) for j in range(2))
    assert G(x, y) == pytest.approx(expected)
    assert pairing(G, Tensor(X, X, np.outer(x, y))) == pytest.approx(expected)


@pytest.mark.parametrize("X, Y, Z, expected", [
    (banach.lp(2, 2), banach.lp(2, 2), np.eye(2), 1.0),
    (banach.lp(1, 2), banach.lp(1, 2), np.eye(2), 2.0),
    (banach.lp(3, 2), banach.lp(1.5, 3), [[1, 0, 0], [0, 0, 0]], 1.0),
    (banach.lp(INF, 2), banach.lp(2, 2), [[1, 0], [0, 0]], 1.0),
])
def test_injective_norm_examples(X, Y, Z, expected):
    assert injective_norm(Tensor(X, Y, Z)).value == pytest.approx(expected, abs=1e-9)


def test_injective_matches_sign_scan(rng):
    X = banach.lp(1, 4)
    for _ in range(10):
        Z = rng.standard_normal((4, 3))
        r = injective_norm(Tensor(X, banach.lp(1, 3), Z))
        assert r.exact
        assert r.value == pytest.approx(injective_sign_scan(Z), rel=1e-12)


def test_injective_heuristic_is_labelled(rng):
    r = injective_norm(Tensor(banach.lp(3, 3), banach.lp(1.5, 3), rng.standard_normal((3, 3))))
    assert r.method == "heuristic_lower_bound" and not r.exact


def test_merge_atoms_sums_duplicates_up_to_sign():
    d = Decomposition.from_atoms([(1, E1, E2), (2, -E1, -E2), (1, E2, E2)])
    m = merge_atoms(d)
    assert len(m) == 2
    assert sorted(m.lambdas.tolist()) == [1.0, 3.0]


def test_json_round_trip():
    X, Y = banach.lp(2, 2), banach.polyhedral([(1, 0), (0, 1)])
    t = Tensor(X, Y, [[1.5, -2], [0, 3]])
    back = tensor_from_json(tensor_to_json(t))
    assert back.X == X and back.Y == Y
    np.testing.assert_array_equal(back.Z, t.Z)
    d = canonical_decomposition(t)
    d2 = decomposition_from_json(decomposition_to_json(d), X, Y)
    np.testing.assert_array_equal(d2.lambdas, d.lambdas)
    with pytest.raises(InputError):
        tensor_from_json({"X": {}, "Y": {}})


# ---------------------------------------------------------------- properties

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
exps = st.sampled_from([1.0, 1.5, 2.0, 3.0, INF])


@given(exps, exps, st.lists(st.tuples(finite, arrays(float, 3, elements=finite),
                                      arrays(float, 2, elements=finite)), max_size=5))
def test_normalize_preserves_assembly(p, q, raw):
    X, Y = banach.lp(p, 3), banach.lp(q, 2)
    d = normalize_atoms(raw, X, Y)
    dropped = [(c, x, y) for c, x, y in raw
               if abs(c) * banach.norm_eval(X, x) * banach.norm_eval(Y, y) < 1e-12]
    target = sum((c * np.outer(x, y) for c, x, y in raw), np.zeros((3, 2)))
    target -= sum((c * np.outer(x, y) for c, x, y in dropped), np.zeros((3, 2)))
    np.testing.assert_allclose(assemble(d, X, Y).Z, target, atol=1e-10 * max(1, np.abs(target).max()))
    if len(d):
        np.testing.assert_allclose(banach.norms(X, d.xs), 1, atol=1e-12)
        np.testing.assert_allclose(banach.norms(Y, d.ys), 1, atol=1e-12)


@given(arrays(float, (2, 3), elements=finite), arrays(float, (2, 3), elements=finite),
       arrays(float, (2, 3), elements=finite), finite, finite)
def test_pairing_is_bilinear(G1, G2, Z, a, b):
    X, Y = banach.discrete_lp(2, (0.3, 0.7)), banach.lp(1, 3)
    t = Tensor(X, Y, Z)
    lhs = pairing(DualOperator(a * G1 + b * G2, X, Y), t)
    rhs = a * pairing(DualOperator(G1, X, Y), t) + b * pairing(DualOperator(G2, X, Y), t)
    assert lhs == pytest.approx(rhs, abs=1e-10 * (1 + abs(lhs)))


@given(exps, exps, arrays(float, 2, elements=finite), arrays(float, 3, elements=finite))
def test_injective_rank_one_law(p, q, x, y):
    X, Y = banach.lp(p, 2), banach.lp(q, 3)
    expected = banach.norm_eval(X, x) * banach.norm_eval(Y, y)
    r = injective_norm(Tensor(X, Y, np.outer(x, y)), SolverConfig(multistarts=4))
    assert r.value == pytest.approx(expected, abs=1e-9 * max(1, expected))


@pytest.mark.parametrize("p, q", [(1, 2), (2, 2), (INF, INF), (1, INF), (INF, 2)])
def test_injective_below_projective(rng, p, q):
    X, Y = banach.lp(p, 3), banach.lp(q, 3)
    for _ in range(5):
        t = Tensor(X, Y, rng.standard_normal((3, 3)))
        assert injective_norm(t).value <= proj_norm(t).upper + 1e-8
