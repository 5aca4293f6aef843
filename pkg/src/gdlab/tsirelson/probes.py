"""Desk-scale probes of block behaviour in T^(p).

``block_lp_probe`` checks the two bounds every admissible family of
normalized disjoint blocks must satisfy. ``co_condition2_probe`` searches for
low-distortion embeddings of span(t_1..t_n) into l_p^K; its values are upper
bounds on the distance to the best subspace found and certify nothing about
growth in n.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import linprog, minimize

from ..operators import LinearMap, hadamard_rows, operator_norm
from ..spaces import INF, Lp, TsirelsonTrunc
from .norm import FinSupp, as_finsupp, tp_norm

TOL = 1e-9


@dataclass(frozen=True)
class BlockProbe:
    ratio: float
    lower_bound: float
    upper_bound: Optional[float]
    admissible: bool
    lower_ok: Optional[bool]
    upper_ok: Optional[bool]

    @property
    def passed(self) -> bool:
        return self.lower_ok is not False and self.upper_ok is not False

    def as_dict(self) -> dict:
        return {"ratio": self.ratio, "lower_bound": self.lower_bound, "upper_bound": self.upper_bound,
                "admissible": self.admissible, "lower_ok": self.lower_ok, "upper_ok": self.upper_ok,
                "passed": self.passed}


def _admissible_blocks(supports: list[list[int]]) -> bool:
    for a, b in zip(supports, supports[1:]):
        if max(a) >= min(b):
            return False
    return len(supports) <= min(supports[0])


def block_lp_probe(blocks: Sequence, coeffs: Sequence, p: float = 1.0) -> BlockProbe:
    """r = ||sum c_j y_j||_(p) / ||c||_p for normalized disjoint blocks y_j.

    With the block supports as an admissible family, the fixed-point identity
    forces r >= 2^(-1/p); for p = 1 the l_1 majorization forces r <= 1.
    """
    ys = [as_finsupp(y, p) for y in blocks]
    if not ys or len(ys) != len(coeffs):
        raise ValueError("need one coefficient per block")
    supports = [y.support for y in ys]
    if any(not s for s in supports):
        raise ValueError("blocks must be nonzero")
    for y in ys:
        ny = float(tp_norm(y, p))
        if abs(ny - 1.0) > TOL:
            raise ValueError(f"block is not normalized (norm {ny})")
    admissible = _admissible_blocks(supports)
    flat = [i for s in supports for i in s]
    if len(set(flat)) != len(flat):
        raise ValueError("block supports overlap")
    if not admissible:
        warnings.warn("blocks are not an admissible family; the lower bound is not asserted", stacklevel=2)
    total: dict = {}
    exact = p == 1 and all(y.is_rational for y in ys) and all(isinstance(c, (int, Fraction)) for c in coeffs)
    for c, y in zip(coeffs, ys):
        for i, a in y.entries.items():
            total[i] = (Fraction(c) * a) if exact else float(c) * float(a)
    num = tp_norm(FinSupp(total, p=p), p)
    cn = np.linalg.norm(np.asarray([float(c) for c in coeffs]), ord=p)
    if cn == 0:
        raise ValueError("coefficients are all zero")
    if exact:
        ratio = float(Fraction(num) / sum(abs(Fraction(c)) for c in coeffs))
    else:
        ratio = float(num) / cn
    lower = 2.0 ** (-1.0 / p)
    lower_ok = (ratio >= lower - TOL) if admissible else None
    upper = 1.0 if p == 1 else None
    upper_ok = (ratio <= 1.0 + TOL) if p == 1 else None
    return BlockProbe(ratio, lower, upper, admissible, lower_ok, upper_ok)


# ---------------------------------------------------------------------------


def _min_norm_preimage(A: np.ndarray, g: np.ndarray, p: float) -> float:
    """min{||h||_q : A^T h = g}, q the conjugate of p, for p in {1, 2, inf}."""
    K, n = A.shape
    if p == 2:
        h = np.linalg.lstsq(A.T, g, rcond=None)[0]
        return float(np.linalg.norm(h))
    if p == 1:
        # q = inf: minimize t with -t <= h_i <= t
        c = np.r_[np.zeros(K), 1.0]
        A_ub = np.block([[np.eye(K), -np.ones((K, 1))], [-np.eye(K), -np.ones((K, 1))]])
        A_eq = np.hstack([A.T, np.zeros((n, 1))])
        res = linprog(c, A_ub=A_ub, b_ub=np.zeros(2 * K), A_eq=A_eq, b_eq=g,
                      bounds=[(None, None)] * K + [(0, None)], method="highs")
    else:
        # q = 1: split h = h+ - h-
        c = np.ones(2 * K)
        A_eq = np.hstack([A.T, -A.T])
        res = linprog(c, A_eq=A_eq, b_eq=g, bounds=(0, None), method="highs")
    if res.status != 0:
        return INF
    return float(res.fun)


def embedding_distortion(A: np.ndarray, X: TsirelsonTrunc, p: float, seed: int = 0) -> tuple[float, bool]:
    """Certified upper bound of ||A|| ||A^{-1}|| for A: X -> l_p^K, and whether it is exact.

    ||A^{-1}|| on the range equals max over extreme functionals g of X* of the
    least l_q norm of an h with A^T h = g; without dual vertices, any left
    inverse L gives ||A^{-1}|| <= ||L||.
    """
    K, n = A.shape
    if np.linalg.matrix_rank(A) < n:
        return INF, False
    Z = Lp(K, p)
    fwd = operator_norm(LinearMap(A, X, Z), budget=16, seed=seed)
    G = X.dual_extreme_points()
    if G is not None and p in (1.0, 2.0, INF):
        inv = max(_min_norm_preimage(A, g, p) for g in G)
        return float(fwd.upper) * inv, fwd.exact
    L = np.linalg.pinv(A)
    bwd = operator_norm(LinearMap(L, Z, X), budget=16, seed=seed)
    return float(fwd.upper) * float(bwd.upper), False


def _sample_directions(X: TsirelsonTrunc, count: int, rng) -> np.ndarray:
    V = X.extreme_points()
    pts = [] if V is None else list(V[:512])
    n = X.dim
    pts += list(np.eye(n))
    pts += list(rng.standard_normal((count, n)))
    P = np.array(pts)
    norms = np.asarray(X.norm_many(P), dtype=float)
    keep = norms > 0
    return P[keep] / norms[keep, None]


def co_condition2_probe(n: int, p: float = 1.0, K: int = 4, budget: int = 20, seed: int = 0) -> dict:
    """Best distortion found for embeddings span(t_1..t_n) -> l_p^K.

    The search minimizes a sampled surrogate (max ratio times max inverse
    ratio over fixed directions); the best few candidates are then certified
    by ``embedding_distortion``.
    """
    if not 1 <= n <= 6 or not 1 <= K <= 24:
        raise ValueError("desk-scale probe needs n <= 6 and K <= 24")
    if K < n:
        raise ValueError("K must be at least n")
    p = float(p)
    if not 1 <= p < INF:
        raise ValueError("T^(p) needs a finite p >= 1")
    X = TsirelsonTrunc(p, n)
    rng = np.random.default_rng(seed)
    V = _sample_directions(X, 64, rng)
    ordp = p

    def surrogate(flat):
        A = flat.reshape(K, n)
        img = np.linalg.norm(V @ A.T, ord=ordp, axis=1)
        if img.min() <= 1e-12:
            return INF
        return float(img.max() / img.min())

    starts = [np.vstack([np.eye(n), np.zeros((K - n, n))])]
    H = hadamard_rows(n)
    if len(H) <= K:
        starts.append(np.vstack([H, np.zeros((K - len(H), n))]))
    for i in range(budget):
        starts.append(np.random.default_rng([seed, i]).standard_normal((K, n)))
    found = []
    for A0 in starts:
        res = minimize(surrogate, A0.ravel(), method="Nelder-Mead",
                       options={"maxiter": 100 * K * n, "xatol": 1e-9, "fatol": 1e-12})
        A = res.x.reshape(K, n)
        found.append((min(res.fun, surrogate(A0.ravel())), A if res.fun <= surrogate(A0.ravel()) else A0))
    found.sort(key=lambda t: t[0])
    best, best_A, exact = INF, None, False
    for s, A in found[:4] + [(surrogate(a.ravel()), a) for a in starts[:2]]:
        d, ex = embedding_distortion(A, X, p, seed)
        if d < best:
            best, best_A, exact = d, A, ex
    return {"n": n, "p": p, "K": K, "upper": best, "surrogate": found[0][0],
            "exact_distortion": exact, "embedding": best_A}
