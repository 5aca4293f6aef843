"""Property-based checks across spaces, operators and tensors."""

from __future__ import annotations

import numpy as np
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from gdlab.operators import LinearMap, operator_norm
from gdlab.spaces import ESum, Lp, TsirelsonTrunc
from gdlab.tensor import TensorDecomposition, contract, improve_decomposition, projective_lower, projective_upper

finite = st.floats(-5, 5, allow_nan=False, allow_infinity=False)
p_values = st.sampled_from([1, 1.5, 2, 3, "inf"])


@st.composite
def spaces(draw, max_dim=4):
    kind = draw(st.sampled_from(["lp", "esum", "tsirelson"]))
    if kind == "lp":
        return Lp(draw(st.integers(1, max_dim)), draw(p_values))
    if kind == "tsirelson":
        return TsirelsonTrunc(draw(st.sampled_from([1, 2])), draw(st.integers(1, max_dim)))
    k = draw(st.integers(1, 2))
    inners = tuple(Lp(draw(st.integers(1, 2)), draw(p_values)) for _ in range(k))
    return ESum(Lp(k, draw(p_values)), inners)


@st.composite
def space_and_vectors(draw, count=2):
    X = draw(spaces())
    vs = [draw(arrays(float, X.dim, elements=finite)) for _ in range(count)]
    return X, vs


@settings(max_examples=60, deadline=None)
@given(space_and_vectors(), finite)
def test_norm_axioms(data, c):
    X, (x, y) = data
    nx, ny = float(X.norm(x)), float(X.norm(y))
    assert nx >= 0
    assert float(X.norm(x + y)) <= nx + ny + 1e-9 * (1 + nx + ny)
    assert abs(float(X.norm(c * x)) - abs(c) * nx) <= 1e-9 * (1 + abs(c) * nx)
    if not np.any(x):
        assert nx == 0


@settings(max_examples=60, deadline=None)
@given(space_and_vectors(), st.integers(0, 2 ** 8 - 1))
def test_sign_invariance(data, mask):
    X, (x, _) = data
    signs = np.array([-1.0 if (mask >> i) & 1 else 1.0 for i in range(X.dim)])
    assert abs(float(X.norm(signs * x)) - float(X.norm(x))) <= 1e-9 * (1 + float(X.norm(x)))


@settings(max_examples=40, deadline=None)
@given(space_and_vectors())
def test_duality_sandwich(data):
    X, (x, f) = data
    est = X.dual_estimate(f)
    assert float(est.lower) <= float(est.upper) + 1e-9
    assert abs(float(f @ x)) <= float(est.upper) * float(X.norm(x)) + 1e-7


@settings(max_examples=30, deadline=None)
@given(spaces(max_dim=3), spaces(max_dim=3), st.integers(0, 1000))
def test_operator_norm_brackets_ratios(X, Y, seed):
    rng = np.random.default_rng(seed)
    M = rng.standard_normal((Y.dim, X.dim))
    est = operator_norm(LinearMap(M, X, Y), budget=8, seed=seed)
    assert float(est.lower) <= float(est.upper) + 1e-9
    for x in rng.standard_normal((20, X.dim)):
        nx = float(X.norm(x))
        if nx > 0:
            assert float(Y.norm(M @ x)) / nx <= float(est.upper) * (1 + 1e-9) + 1e-9


@settings(max_examples=15, deadline=None)
@given(st.integers(1, 3), st.integers(1, 3), st.integers(1, 3), p_values, st.integers(0, 1000))
def test_improve_keeps_tensor_and_bounds(m, n, terms, p, seed):
    rng = np.random.default_rng(seed)
    X, Y = Lp(m, p), Lp(n, p)
    D = TensorDecomposition(X, Y, rng.standard_normal((terms, m, n)), rng.standard_normal((terms, n, m)))
    I = improve_decomposition(D, budget=5, seed=seed)
    assert np.allclose(I.dense(), D.dense(), atol=1e-9 * (1 + np.abs(D.dense()).max()))
    assert np.allclose(contract(I).floats(), contract(D).floats(), atol=1e-9)
    up_before = float(projective_upper(D).upper)
    up_after = float(projective_upper(I).upper)
    assert up_after <= up_before + 1e-9
    assert projective_lower(D, budget=2, seed=seed) <= up_after + 1e-7
