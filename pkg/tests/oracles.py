"""Independent brute-force oracles used to freeze expected values.

None of these import the package's algorithms; they work directly from the
definitions and are only fast enough for the small sizes used in tests.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache

import numpy as np


NEG = None


def _subsets(elems: tuple[int, ...]):
    """Nonempty subsets of ``elems`` as sorted tuples."""
    for r in range(1, len(elems) + 1):
        yield from itertools.combinations(elems, r)


def _family_max(support, value, admissible, skip_whole):
    """max over ordered families E_1 < ... < E_k of subsets of ``support`` with
    admissible(k, min E_1) of sum value(E_j); blocks are arbitrary sets.

    ``tail(B, j)`` is the best sum of exactly j ordered blocks inside the
    suffix B; every subset is tried as a block, so nothing about the norm
    is assumed.
    """

    @lru_cache(maxsize=None)
    def tail(start: int, j: int):
        if j == 0:
            return Fraction(0)
        B = support[start:]
        best = NEG
        for E in _subsets(B):
            nxt = support.index(E[-1]) + 1
            rest = tail(nxt, j - 1)
            if rest is NEG:
                continue
            s = value(E) + rest
            if best is NEG or s > best:
                best = s
        return best

    best = NEG
    for E1 in _subsets(support):
        for k in range(1, len(support) + 1):
            if not admissible(k, E1[0]):
                continue
            if skip_whole and k == 1 and E1 == support:
                continue  # 1/2 v(A) never wins and the recursion must be well founded
            rest = tail(support.index(E1[-1]) + 1, k - 1)
            if rest is NEG:
                continue
            s = value(E1) + rest
            if best is NEG or s > best:
                best = s
    return best


def tsirelson_brute(coeffs: dict[int, Fraction], strict: bool = False) -> Fraction:
    """Unrestricted-block fixed point of ||x|| = max(sup|a|, 1/2 max sum ||E_j x||)."""
    items = {i: abs(Fraction(a)) for i, a in coeffs.items() if a != 0}

    def admissible(k, lo):
        return k < lo if strict else k <= lo

    @lru_cache(maxsize=None)
    def v(support: tuple[int, ...]) -> Fraction:
        if not support:
            return Fraction(0)
        best = max(items[i] for i in support)
        fam = _family_max(support, v, admissible, skip_whole=True)
        if fam is not NEG and fam / 2 > best:
            best = fam / 2
        return best

    return v(tuple(sorted(items)))


def tsirelson_level_brute(coeffs: dict[int, Fraction], m: int) -> Fraction:
    """||x||_m by the level recursion, families of arbitrary subsets."""
    items = {i: abs(Fraction(a)) for i, a in coeffs.items() if a != 0}

    @lru_cache(maxsize=None)
    def lev(support: tuple[int, ...], level: int) -> Fraction:
        if not support:
            return Fraction(0)
        sup = max(items[i] for i in support)
        if level == 0:
            return sup
        best = lev(support, level - 1)
        fam = _family_max(support, lambda E: lev(E, level - 1), lambda k, lo: k <= lo, skip_whole=False)
        if fam is not NEG and fam / 2 > best:
            best = fam / 2
        return best

    return lev(tuple(sorted(items)), m)


def lp_norm(x, p) -> float:
    x = np.abs(np.asarray(x, dtype=float))
    if p == np.inf:
        return float(x.max(initial=0.0))
    return float((x ** p).sum() ** (1.0 / p))


def opnorm_l1_domain(M, q) -> float:
    """||M: l_1 -> l_q|| = max column l_q norm."""
    return max(lp_norm(M[:, j], q) for j in range(M.shape[1]))


def opnorm_linf_domain(M, q) -> float:
    """||M: l_inf -> l_q|| = max over sign vectors."""
    n = M.shape[1]
    return max(lp_norm(M @ np.array(s), q) for s in itertools.product((1.0, -1.0), repeat=n))


def opnorm_sampled(M, p, q, count=20000, seed=0) -> float:
    """Lower estimate from random directions (a grid-free sampling oracle)."""
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((count, M.shape[1]))
    num = np.array([lp_norm(M @ x, q) for x in X])
    den = np.array([lp_norm(x, p) for x in X])
    return float((num / den).max())


def polytope_bilinear_max(C, vertsR, vertsS) -> float:
    """max |sum C[a,b,c,d] R[a,b] S[c,d]| over vertex pairs."""
    return max(abs(float(np.einsum("abcd,ab,cd->", C, R, S))) for R in vertsR for S in vertsS)


def l1_operator_ball_vertices(m: int, n: int):
    """Vertices of {R : ||R: l_1^n -> l_1^m|| <= 1}: every column is some +-e_i."""
    cols = [s * np.eye(m)[i] for i in range(m) for s in (1.0, -1.0)]
    for choice in itertools.product(cols, repeat=n):
        yield np.column_stack(choice)


def dense_tensor(coeffs, Rs, Ss) -> np.ndarray:
    m, n = Rs[0].shape
    out = np.zeros((m, n, n, m))
    for c, R, S in zip(coeffs, Rs, Ss):
        for a in range(m):
            for b in range(n):
                for cc in range(n):
                    for d in range(m):
                        out[a, b, cc, d] += float(c) * R[a, b] * S[cc, d]
    return out
