"""Generalized diagonals: construction, verification, symmetrization, minimization.

With bases ``x_k`` of X (dim m) and ``y_i`` of Y (dim n), the element
``p_{i,j} = sum_k (y_j^* (x) x_k) (x) (x_k^* (x) y_i)`` has terms
``R = x_k y_j^T`` (entry (k, j)) and ``S = y_i x_k^T`` (entry (i, k)). Any
combination ``sum a_ij p_ij`` with ``trace(a) = 1`` is a generalized diagonal
for F(X).
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .estimate import Estimate
from .operators import LinearMap, block_maps, is_monomial, signed_permutation
from .spaces import DimensionMismatch, ESum, Lp, SpaceSpec, unconditional_constant
from .tensor import (
    NormCache,
    TensorDecomposition,
    contract,
    improve_decomposition,
    projective_lower,
    projective_upper,
)

MAX_SIGN_DIM = 16
MAX_CYCLIC_DIM = 12


class NotADiagonal(ValueError):
    pass


def _exact_matrix(a) -> np.ndarray:
    """Keep rational inputs rational; everything else becomes float."""
    arr = np.asarray(a, dtype=object)
    if all(isinstance(v, (int, Fraction)) for v in arr.ravel()):
        return np.array([[Fraction(v) for v in row] for row in arr], dtype=object)
    return np.asarray(a, dtype=float)


@dataclass(frozen=True, eq=False)
class GeneralizedDiagonal:
    X: SpaceSpec
    Y: SpaceSpec
    coeffs: np.ndarray
    check_trace: bool = True

    def __post_init__(self):
        if self.X.dim < 1 or self.Y.dim < 1:
            raise DimensionMismatch("spaces must have positive dimension")
        a = _exact_matrix(self.coeffs)
        n = self.Y.dim
        if a.shape != (n, n):
            raise DimensionMismatch(f"coefficients must be {n} x {n}")
        object.__setattr__(self, "coeffs", a)
        if self.check_trace:
            tr = self.trace
            ok = tr == 1 if a.dtype == object else abs(tr - 1.0) <= 1e-12
            if not ok:
                raise NotADiagonal(f"trace of the coefficient matrix is {tr}, not 1")

    @property
    def trace(self):
        return sum(self.coeffs[i, i] for i in range(self.Y.dim))

    @property
    def is_rational(self) -> bool:
        return self.coeffs.dtype == object

    @classmethod
    def diagonal(cls, X, Y, c, check_trace=True) -> "GeneralizedDiagonal":
        c = list(c)
        zero = Fraction(0) if all(isinstance(v, (int, Fraction)) for v in c) else 0.0
        a = np.array([[c[i] if i == j else zero for j in range(len(c))] for i in range(len(c))], dtype=object)
        return cls(X, Y, a, check_trace)


def gd_expand(g: GeneralizedDiagonal) -> TensorDecomposition:
    """Expand sum a_ij p_ij into n^2 m rank-one-pair terms (zero coefficients skipped)."""
    m, n = g.X.dim, g.Y.dim
    Rs, Ss, cs = [], [], []
    for i in range(n):
        for j in range(n):
            a = g.coeffs[i, j]
            if a == 0:
                continue
            for k in range(m):
                R = np.zeros((m, n))
                R[k, j] = 1.0
                S = np.zeros((n, m))
                S[i, k] = 1.0
                Rs.append(R)
                Ss.append(S)
                cs.append(a)
    if not Rs:
        return TensorDecomposition.zero(g.X, g.Y)
    return TensorDecomposition(g.X, g.Y, np.array(Rs), np.array(Ss), tuple(cs))


def p_element(X: SpaceSpec, Y: SpaceSpec, i: int, j: int) -> TensorDecomposition:
    """p_{i,j} (0-based indices)."""
    a = np.zeros((Y.dim, Y.dim), dtype=object)
    a[:, :] = Fraction(0)
    a[i, j] = Fraction(1)
    return gd_expand(GeneralizedDiagonal(X, Y, a, check_trace=False))


@dataclass(frozen=True)
class GDReport:
    commutes: bool
    unit: bool
    commutation_residual: float
    unit_residual: float

    def as_dict(self) -> dict:
        return {"commutes": self.commutes, "unit": self.unit,
                "commutation_residual": self.commutation_residual, "unit_residual": self.unit_residual}


def commutation_residual(D: TensorDecomposition) -> float:
    """max over matrix units W = e_l e_k^T of ||W.D - D.W|| on the dense array."""
    A = D.dense()
    m = D.X.dim
    worst = 0.0
    for l in range(m):
        for k in range(m):
            left = np.zeros_like(A)
            left[l] = A[k]  # (W R)[a,b] = delta(a,l) R[k,b]
            right = np.zeros_like(A)
            right[..., k] = A[..., l]  # (S W)[c,d] = S[c,l] delta(k,d)
            worst = max(worst, float(np.abs(left - right).max(initial=0.0)))
    return worst


def verify_gd(D: TensorDecomposition, tol: float = 1e-10) -> GDReport:
    comm = commutation_residual(D)
    P = contract(D).matrix
    unit = float(np.abs(P - np.eye(D.X.dim)).max(initial=0.0))
    return GDReport(comm <= tol, unit <= tol, comm, unit)


def sign_average(D: TensorDecomposition) -> TensorDecomposition:
    """R (x) S -> 2^-n sum_t R U_t (x) U_t S, with U_t = diag(t) on the Y basis."""
    n = D.Y.dim
    if n > MAX_SIGN_DIM:
        raise ValueError(f"sign averaging is exhaustive; dim {n} > {MAX_SIGN_DIM}")
    if not len(D):
        return D
    signs = np.array(list(itertools.product((1.0, -1.0), repeat=n)))
    weight = Fraction(1, len(signs))
    Rs = (D.Rs[:, None, :, :] * signs[None, :, None, :]).reshape(-1, D.X.dim, n)
    Ss = (signs[None, :, :, None] * D.Ss[:, None, :, :]).reshape(-1, n, D.X.dim)
    cs = tuple(Fraction(c) * weight if isinstance(c, (int, Fraction)) else c * float(weight)
               for c in D.coeffs for _ in range(len(signs)))
    return D.replace(Rs, Ss, cs)


def sign_fix(g: GeneralizedDiagonal) -> GeneralizedDiagonal:
    """Apply R (x) S -> R (x) Lambda S with Lambda y_i = sign(a_ii) y_i.

    The result has |a_ii| on the diagonal. It is not renormalized, so its trace
    is sum |a_ii|; for a 1-unconditional Y the map is an isometry and the
    projective bounds of the two expansions agree.
    """
    n = g.Y.dim
    lam = []
    for i in range(n):
        a = g.coeffs[i, i]
        if a == 0:
            warnings.warn(f"diagonal entry {i} is zero; its sign is left unchanged", stacklevel=2)
            lam.append(1)
        else:
            lam.append(1 if a > 0 else -1)
    a = g.coeffs.copy()
    for i in range(n):
        a[i, :] = a[i, :] * lam[i]
    return GeneralizedDiagonal(g.X, g.Y, a, check_trace=False)


def sign_fix_decomposition(D: TensorDecomposition, lam: Sequence[int]) -> TensorDecomposition:
    L = np.diag(np.asarray(lam, dtype=float))
    return D.replace(D.Rs, np.einsum("ij,tjk->tik", L, D.Ss), D.coeffs)


def signed_cyclic_group(n: int) -> list[np.ndarray]:
    """The n 2^n matrices diag(t) sigma with sigma a cyclic shift."""
    if n > MAX_CYCLIC_DIM:
        raise ValueError(f"group has n 2^n elements; n = {n} exceeds {MAX_CYCLIC_DIM}")
    out = []
    for r in range(n):
        perm = [(j + r) % n for j in range(n)]
        for t in itertools.product((1.0, -1.0), repeat=n):
            out.append(signed_permutation(perm, t))
    return out


def signed_cyclic_diagonal(n: int, p) -> TensorDecomposition:
    """1/|G| sum_g g (x) g^{-1} on X = Y = l_p^n."""
    if n < 1:
        raise ValueError("n must be positive")
    X = Lp(n, p)
    G = signed_cyclic_group(n)
    # signed permutations are orthogonal, so g^{-1} = g^T
    Rs = np.array(G)
    Ss = np.array([g.T for g in G])
    c = Fraction(1, len(G))
    return TensorDecomposition(X, X, Rs, Ss, (c,) * len(G))


def assemble_tensor_diagonal(Dm: TensorDecomposition, dX: TensorDecomposition) -> TensorDecomposition:
    """Terms (R (x) U, S (x) V) acting on E(X) = E-sum with all inners equal to X.

    The E-side maps must be monomial so that ||R (x) U|| = ||R|| ||U||.
    """
    E, Xs = Dm.X, dX.X
    if Dm.Y != E or dX.Y != Xs:
        raise DimensionMismatch("both decompositions must act on a single space (Y = X)")
    for R, S in zip(Dm.Rs, Dm.Ss):
        if not (is_monomial(R) and is_monomial(S)):
            raise ValueError("E-side term is not monomial; the tensor-diagonal norm identity does not apply")
    outer = E.outer if isinstance(E, ESum) else E
    space = ESum(outer, tuple([Xs] * outer.dim))
    Rs, Ss, cs = [], [], []
    for c1, R1, S1 in zip(Dm.coeffs, Dm.Rs, Dm.Ss):
        for c2, R2, S2 in zip(dX.coeffs, dX.Rs, dX.Ss):
            Rs.append(np.kron(R1, R2))
            Ss.append(np.kron(S1, S2))
            cs.append(c1 * c2)
    return TensorDecomposition(space, space, np.array(Rs), np.array(Ss), tuple(cs))


def lpq_spaces(nks: Sequence[int], i: int, p, q):
    """(X_i, grid, X_{k_m}, ks, m) for the finite stage of the l_q-sum of l_p^{n_k}."""
    if i < 1 or i > len(nks):
        raise ValueError("i must index the supplied prefix")
    m = max(max(nks[:i]), i)
    ks = [k for k in range(1, len(nks) + 1) if nks[k - 1] >= m][:m]
    if len(ks) < m:
        raise ValueError(f"prefix too short: need {m} indices with n_k >= {m}, found {len(ks)}")
    Xi = _lpq_sum(nks[:i], p, q)
    Xk = _lpq_sum(nks[:ks[-1]], p, q)
    grid = ESum(Lp(m, q), tuple([Lp(m, p)] * m))
    return Xi, grid, Xk, ks, m


def _lpq_sum(dims, p, q) -> SpaceSpec:
    return ESum(Lp(len(dims), q), tuple(Lp(d, p) for d in dims))


def lpq_gd(nks: Sequence[int], i: int, p, q) -> TensorDecomposition:
    """A norm-one g.d. for F(X_i) inside F(X_{k_m}, X_i) (x) F(X_i, X_{k_m}).

    The grid diagonal on l_q^m(l_p^m) is the assembly of the two signed-cyclic
    diagonals; terms are pushed through R -> P1 R P2 and S -> i2 S i1 where
    i1: X_i -> grid, i2: grid -> X_{k_m} are coordinate embeddings and P1, P2
    their coordinate left inverses.
    """
    Xi, grid, Xk, ks, m = lpq_spaces(nks, i, p, q)
    Dm = assemble_tensor_diagonal(signed_cyclic_diagonal(m, q), signed_cyclic_diagonal(m, p))
    i1 = np.zeros((grid.dim, Xi.dim))
    for j in range(i):
        rows = grid.block(j)
        cols = Xi.block(j)
        i1[np.arange(rows.start, rows.start + nks[j]), np.arange(cols.start, cols.stop)] = 1.0
    i2 = np.zeros((Xk.dim, grid.dim))
    for j, k in enumerate(ks):
        rows = Xk.block(k - 1)
        cols = grid.block(j)
        i2[np.arange(rows.start, rows.start + m), np.arange(cols.start, cols.stop)] = 1.0
    P1, P2 = i1.T, i2.T
    Rs = np.einsum("ab,tbc,cd->tad", P1, Dm.Rs, P2)
    Ss = np.einsum("ab,tbc,cd->tad", i2, Dm.Ss, i1)
    return TensorDecomposition(Xi, Xk, Rs, Ss, Dm.coeffs)


@dataclass(frozen=True)
class GDMinimum:
    coeffs: tuple
    upper: float
    lower: float
    decomposition: Optional[TensorDecomposition] = None

    def as_estimate(self) -> Estimate:
        return Estimate(self.upper, self.lower, self.upper, self.upper - self.lower <= 1e-12)


def _evaluate(X, Y, c, cache, improve_budget, seed):
    g = GeneralizedDiagonal.diagonal(X, Y, c, check_trace=False)
    D = improve_decomposition(gd_expand(g), budget=improve_budget, seed=seed, cache=cache)
    return float(projective_upper(D, cache).upper), D


def min_gd_norm(X: SpaceSpec, Y: SpaceSpec, budget: int = 40, seed: int = 0,
                improve_budget: int = 4) -> GDMinimum:
    """Projected coordinate search over convex combinations sum c_i p_ii.

    Starts at the uniform point and at each vertex; a move shifts mass delta
    between two coordinates and delta halves when no move improves. The
    reported lower bound comes from weak duality on the best decomposition.
    """
    n = Y.dim
    if unconditional_constant(Y, budget=16, seed=seed) > 1 + 1e-9:
        raise ValueError("Y must have a 1-unconditional basis")
    cache = NormCache(budget=16, seed=seed)
    uniform = [Fraction(1, n)] * n
    starts = [uniform] + [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    best_val, best_c, best_D = np.inf, None, None
    # pi(D) = I_X and ||pi|| <= 1, so no g.d. goes below 1
    floor = 1.0 + 1e-12
    for c0 in starts:
        if best_val <= floor:
            break
        val, D = _evaluate(X, Y, c0, cache, improve_budget, seed)
        c = list(c0)
        delta = Fraction(1, 2 * n) if n > 1 else Fraction(0)
        steps = 0
        while delta > Fraction(1, 2 ** 12) and steps < budget and val > floor:
            moved = False
            for i, j in itertools.permutations(range(n), 2):
                if c[i] < delta:
                    continue
                trial = list(c)
                trial[i] -= delta
                trial[j] += delta
                steps += 1
                tv, tD = _evaluate(X, Y, trial, cache, improve_budget, seed)
                if tv < val - 1e-12:
                    c, val, D, moved = trial, tv, tD, True
                    break
            if not moved:
                delta /= 2
        if val < best_val:
            best_val, best_c, best_D = val, c, D
    lower = projective_lower(best_D, budget=4, seed=seed)
    return GDMinimum(tuple(best_c), best_val, lower, best_D)
