from __future__ import annotations

import json
from fractions import Fraction

import numpy as np
import pytest

from gdlab.operators import (
    ExactUnavailable,
    LinearMap,
    adjoint,
    block_maps,
    is_monomial,
    kron,
    operator_norm,
    signed_permutation,
)
from gdlab.spaces import DimensionMismatch, Dual, ESum, Lp, TsirelsonTrunc
from oracles import opnorm_l1_domain, opnorm_linf_domain, opnorm_sampled


@pytest.mark.parametrize("p", [1, 1.5, 2, 3, "inf"])
def test_identity_norm(p):
    est = operator_norm(LinearMap.identity(Lp(3, p)))
    assert est.exact
    assert float(est.value) == pytest.approx(1.0, abs=1e-12)


def test_linf_to_l1_identity():
    est = operator_norm(LinearMap(np.eye(2), Lp(2, "inf"), Lp(2, 1)))
    assert est.exact and float(est.value) == pytest.approx(2.0)
    x = np.abs(np.asarray(est.witness["x"], dtype=float))
    assert np.allclose(x, [1, 1])
    assert opnorm_linf_domain(np.eye(2), 1) == 2.0


def test_diag_l1():
    est = operator_norm(LinearMap(np.diag([1.0, 2.0]), Lp(2, 1), Lp(2, 1)))
    assert est.exact and float(est.value) == pytest.approx(2.0)


def test_rational_route_is_exact_fraction():
    M = np.array([[Fraction(1, 3), Fraction(-2)], [Fraction(1), Fraction(1, 2)]], dtype=object)
    est = operator_norm(LinearMap(M, Lp(2, 1), Lp(2, 1)))
    assert est.exact and isinstance(est.value, Fraction)
    assert est.value == Fraction(5, 2)


@pytest.mark.parametrize("q", [1, 2, 3, np.inf])
def test_l1_domain_matches_column_oracle(q):
    rng = np.random.default_rng(int(q) if q != np.inf else 9)
    for _ in range(5):
        M = rng.standard_normal((3, 4))
        est = operator_norm(LinearMap(M, Lp(4, 1), Lp(3, q if q != np.inf else "inf")))
        assert est.exact
        assert float(est.value) == pytest.approx(opnorm_l1_domain(M, q), rel=1e-10)


@pytest.mark.parametrize("q", [1, 2, 3])
def test_linf_domain_matches_sign_oracle(q):
    rng = np.random.default_rng(q)
    M = rng.standard_normal((3, 4))
    est = operator_norm(LinearMap(M, Lp(4, "inf"), Lp(3, q)))
    assert est.exact
    assert float(est.value) == pytest.approx(opnorm_linf_domain(M, q), rel=1e-10)


def test_search_brackets_sampling_oracle():
    rng = np.random.default_rng(5)
    M = rng.standard_normal((3, 3))
    T = LinearMap(M, Lp(3, 3), Lp(3, 1.5))
    est = operator_norm(T, budget=30)
    sampled = opnorm_sampled(M, 3, 1.5)
    assert est.lower <= est.upper
    assert sampled <= float(est.upper) + 1e-9
    assert float(est.lower) >= sampled - 1e-3


def test_exact_mode_raises_when_unavailable():
    T = LinearMap(np.random.default_rng(0).standard_normal((3, 3)), Lp(3, 3), Lp(3, 1.5))
    with pytest.raises(ExactUnavailable):
        operator_norm(T, mode="exact")


def test_tsirelson_identity_to_l1():
    # brute force over {0,1,2}^4 finds ratio 4 at t_1+...+t_4, and ||x||_1 <= 4 sup|a_i| <= 4 ||x||
    est = operator_norm(LinearMap(np.eye(4), TsirelsonTrunc(1, 4), Lp(4, 1)))
    assert est.exact
    assert float(est.value) == pytest.approx(4.0, abs=1e-9)


def test_adjoint():
    I = LinearMap.identity(Lp(3, 2))
    A = adjoint(I)
    assert A.domain == Dual(Lp(3, 2)) and np.array_equal(A.floats(), np.eye(3))
    rng = np.random.default_rng(1)
    M = rng.standard_normal((2, 2))
    T = LinearMap(M, Lp(2, 1), Lp(2, 1))
    assert np.array_equal(adjoint(adjoint(T)).floats(), M)
    T_star = LinearMap(M.T, Lp(2, "inf"), Lp(2, "inf"))
    assert float(operator_norm(T).value) == pytest.approx(float(operator_norm(T_star).value), rel=1e-12)
    assert float(operator_norm(adjoint(T)).value) == pytest.approx(float(operator_norm(T).value), rel=1e-12)


def test_block_maps():
    E = ESum(Lp(2, 1), (Lp(2, "inf"), Lp(2, "inf")))
    i1, P1 = block_maps(E, 1)
    i2, P2 = block_maps(E, 2)
    assert np.array_equal((P1 @ i1).floats(), np.eye(2))
    assert not np.any((P1 @ i2).floats())
    assert float(operator_norm(i2).value) == pytest.approx(1.0)
    with pytest.raises(IndexError):
        block_maps(E, 3)


def test_is_monomial():
    assert is_monomial(np.array([[0, 1], [1, 0]]))
    shift = signed_permutation([1, 2, 0], [1, -1, 1])
    assert is_monomial(shift)
    assert not is_monomial(np.ones((2, 2)))


def test_kron_identity_and_shift():
    rng = np.random.default_rng(3)
    X = Lp(2, "inf")
    U = LinearMap(rng.standard_normal((2, 2)), X, X)
    nu = float(operator_norm(U).value)
    K = kron(LinearMap.identity(Lp(2, 2)), U)
    assert np.allclose(K.floats(), np.kron(np.eye(2), U.floats()))
    assert float(operator_norm(K).value) == pytest.approx(nu, rel=1e-9)
    S = kron(LinearMap(np.array([[0.0, 1.0], [1.0, 0.0]]), Lp(2, 1), Lp(2, 1)), U)
    assert float(operator_norm(S).value) == pytest.approx(nu, rel=1e-9)


def test_kron_all_ones_on_l1_of_l1():
    # the l_1-sum of l_1^1 is l_1^2, where the all-ones map has column norm 2
    A = LinearMap(np.ones((2, 2)), Lp(2, 1), Lp(2, 1))
    K = kron(A, LinearMap.identity(Lp(1, 1)))
    est = operator_norm(K)
    assert est.exact and float(est.value) == pytest.approx(2.0)
    assert opnorm_l1_domain(np.ones((2, 2)), 1) == 2.0


def test_kron_identity_needs_monomial():
    # ||H (x) I|| on l_2(l_inf^2) reaches 2 while ||H|| ||I|| = sqrt 2
    H = LinearMap(np.array([[1.0, 1.0], [1.0, -1.0]]), Lp(2, 2), Lp(2, 2))
    K = kron(H, LinearMap.identity(Lp(2, "inf")))
    assert float(operator_norm(K).lower) >= 2.0 - 1e-9
    assert float(operator_norm(H).value) == pytest.approx(np.sqrt(2))


def test_composition_checks_spaces():
    A = LinearMap(np.eye(2), Lp(2, 1), Lp(2, 2))
    B = LinearMap(np.eye(2), Lp(2, 1), Lp(2, 1))
    with pytest.raises(DimensionMismatch):
        A @ A
    assert (A @ B).domain == Lp(2, 1)


def test_json_roundtrip():
    T = LinearMap(np.array([[Fraction(1, 2), Fraction(0)], [Fraction(3), Fraction(-1)]], dtype=object),
                  Lp(2, 1), Lp(2, 2))
    again = LinearMap.from_json(json.loads(json.dumps(T.to_json())))
    assert again.domain == T.domain and again.codomain == T.codomain
    assert np.array_equal(again.floats(), T.floats())


@pytest.mark.parametrize("dom", ["1", "inf"])
def test_search_agrees_with_exact(dom):
    rng = np.random.default_rng(11)
    for q in ("1", "2", "3", "inf"):
        n = int(rng.integers(2, 7))
        M = rng.standard_normal((3, n))
        T = LinearMap(M, Lp(n, dom), Lp(3, q))
        exact = float(operator_norm(T, mode="exact").value)
        found = float(operator_norm(T, mode="search", budget=200, seed=0).lower)
        assert found <= exact + 1e-9
        assert exact <= found + 1e-6


def test_submultiplicative():
    rng = np.random.default_rng(12)
    for _ in range(10):
        X, Y, W = Lp(3, rng.choice(["1", "2", "3"])), Lp(2, rng.choice(["1", "inf", "1.5"])), Lp(3, "2")
        A = LinearMap(rng.standard_normal((3, 2)), Y, W)
        B = LinearMap(rng.standard_normal((2, 3)), X, Y)
        ab = operator_norm(A @ B, budget=20)
        a, b = operator_norm(A, budget=20), operator_norm(B, budget=20)
        assert float(ab.lower) <= float(a.upper) * float(b.upper) + 1e-9
