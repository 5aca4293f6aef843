from __future__ import annotations

import json
from fractions import Fraction

import numpy as np
import pytest

from gdlab.diagonals import signed_cyclic_diagonal
from gdlab.operators import LinearMap, operator_norm
from gdlab.spaces import Lp
from gdlab.tensor import (
    DualForm,
    TensorDecomposition,
    balance,
    contract,
    improve_decomposition,
    injective_norm,
    merge_terms,
    projective_lower,
    projective_upper,
    same_tensor,
)
from oracles import dense_tensor, l1_operator_ball_vertices, polytope_bilinear_max


def _norm(M, dom, cod):
    return float(operator_norm(LinearMap(M, dom, cod)).value)


def test_contract_group_diagonal_is_identity():
    D = signed_cyclic_diagonal(3, 2)
    assert np.allclose(contract(D).floats(), np.eye(3))


def test_contract_rank_one_composition():
    X, Y = Lp(2, 2), Lp(3, 2)
    x, y = np.array([1.0, 2.0]), np.array([0.0, 1.0, 0.0])
    xs, ys = np.array([3.0, -1.0]), np.array([0.0, 1.0, 0.0])
    R = np.outer(x, ys)  # y* (x) x : Y -> X
    S = np.outer(y, xs)  # x* (x) y : X -> Y
    D = TensorDecomposition.from_terms(X, Y, [(R, S)])
    assert np.allclose(contract(D).floats(), np.outer(x, xs))


def test_contract_matches_matrix_sum():
    rng = np.random.default_rng(0)
    X, Y = Lp(2, 1), Lp(3, 2)
    Rs = rng.standard_normal((3, 2, 3))
    Ss = rng.standard_normal((3, 3, 2))
    cs = (Fraction(1, 2), Fraction(-1), Fraction(3))
    D = TensorDecomposition(X, Y, Rs, Ss, cs)
    direct = sum(float(c) * R @ S for c, R, S in zip(cs, Rs, Ss))
    assert np.allclose(contract(D).floats(), direct)
    assert np.allclose(D.dense(), dense_tensor(cs, Rs, Ss))


def test_projective_upper_single_term():
    rng = np.random.default_rng(1)
    X, Y = Lp(2, 1), Lp(2, "inf")
    R, S = rng.standard_normal((2, 2)), rng.standard_normal((2, 2))
    D = TensorDecomposition.from_terms(X, Y, [(R, S)])
    expect = _norm(R, Y, X) * _norm(S, X, Y)
    assert float(projective_upper(D).upper) == pytest.approx(expect, rel=1e-12)


@pytest.mark.parametrize("n,p", [(1, 1), (2, 1), (3, "inf"), (2, 2)])
def test_projective_upper_group_diagonal(n, p):
    est = projective_upper(signed_cyclic_diagonal(n, p))
    assert est.exact and est.upper == 1


def test_group_diagonal_term_counts():
    assert len(signed_cyclic_diagonal(1, 2)) == 2
    assert len(signed_cyclic_diagonal(2, 1)) == 8
    assert len(signed_cyclic_diagonal(3, "inf")) == 24


def test_balance_keeps_value():
    rng = np.random.default_rng(2)
    X = Lp(2, 2)
    R, S = rng.standard_normal((2, 2)), rng.standard_normal((2, 2))
    D = TensorDecomposition.from_terms(X, X, [(2 * R, S)])
    B = balance(D)
    assert same_tensor(B, D)
    assert float(projective_upper(B).upper) == pytest.approx(2 * _norm(R, X, X) * _norm(S, X, X), rel=1e-9)
    nR, nS = _norm(B.Rs[0], X, X), _norm(B.Ss[0], X, X)
    assert nR == pytest.approx(nS, rel=1e-9)


def test_merge_proportional_terms():
    rng = np.random.default_rng(3)
    X = Lp(2, 1)
    R, S = rng.standard_normal((2, 2)), rng.standard_normal((2, 2))
    D = TensorDecomposition.from_terms(X, X, [(R, S), (R, S)])
    M = merge_terms(D)
    assert len(M) == 1
    assert same_tensor(M, D)
    assert float(projective_upper(M).upper) == pytest.approx(float(projective_upper(D).upper), rel=1e-9)


@pytest.mark.parametrize("p", [1, 2, "inf"])
def test_improve_recovers_rank_one(p):
    rng = np.random.default_rng(4)
    X, Y = Lp(3, p), Lp(2, p)
    R, S = rng.standard_normal((3, 2)), rng.standard_normal((2, 3))
    target = _norm(R, Y, X) * _norm(S, X, Y)
    # three redundant terms summing to R (x) S
    a, b = rng.standard_normal((3, 2)), rng.standard_normal((3, 2))
    D = TensorDecomposition.from_terms(X, Y, [(R + a, S), (-a + b, S), (-b, S)])
    I = improve_decomposition(D, budget=30, seed=0)
    assert same_tensor(I, D)
    assert float(projective_upper(I).upper) <= target * 1.01
    assert projective_lower(D) >= target * 0.99 - 1e-12


def test_injective_factorized_form():
    rng = np.random.default_rng(5)
    X = Lp(2, 1)
    R0, S0 = rng.standard_normal((2, 2)), rng.standard_normal((2, 2))
    B = DualForm.factorized(R0, S0)
    verts = list(l1_operator_ball_vertices(2, 2))
    expect = max(abs(np.sum(R0 * V)) for V in verts) * max(abs(np.sum(S0 * V)) for V in verts)
    est = injective_norm(B, X, X)
    assert est.lower == pytest.approx(expect, rel=1e-9)
    assert est.upper >= est.lower


def test_injective_zero_form():
    B = DualForm(np.zeros((2, 2, 2, 2)))
    assert injective_norm(B, Lp(2, 1), Lp(2, 1)).value == 0


def test_injective_matches_vertex_brute_force():
    rng = np.random.default_rng(6)
    X = Lp(2, 1)
    verts = list(l1_operator_ball_vertices(2, 2))
    for _ in range(3):
        C = rng.standard_normal((2, 2, 2, 2))
        est = injective_norm(DualForm(C), X, X, budget=16, seed=0)
        brute = polytope_bilinear_max(C, verts, verts)
        assert est.lower <= brute + 1e-9
        assert est.lower >= 0.99 * brute


def test_projective_lower_examples():
    D = signed_cyclic_diagonal(2, 2)
    assert projective_lower(D) >= 1 - 1e-9
    X = Lp(2, 1)
    assert projective_lower(TensorDecomposition.zero(X, X)) == 0.0


def test_projective_lower_with_supplied_form():
    rng = np.random.default_rng(7)
    X = Lp(2, 1)
    R, S = rng.standard_normal((2, 2)), rng.standard_normal((2, 2))
    D = TensorDecomposition.from_terms(X, X, [(R, S)])
    iR, iS = np.unravel_index(np.abs(R).argmax(), R.shape), np.unravel_index(np.abs(S).argmax(), S.shape)
    G1, G2 = np.zeros((2, 2)), np.zeros((2, 2))
    G1[iR], G2[iS] = 1.0, 1.0
    lo = projective_lower(D, forms=[DualForm.factorized(G1, G2)])
    assert lo >= abs(R[iR] * S[iS]) - 1e-12
    assert lo <= float(projective_upper(D).upper) + 1e-9


def test_json_roundtrip():
    D = signed_cyclic_diagonal(2, 1)
    again = TensorDecomposition.from_json(json.dumps(D.to_json()))
    assert again.coeffs == D.coeffs
    assert np.array_equal(again.dense(), D.dense())
