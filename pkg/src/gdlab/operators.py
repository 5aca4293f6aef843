"""Linear maps between SpaceSpecs and their operator norms.

``operator_norm`` tries exact routes first, in this order:

* zero and rank-one maps (``||u (x) v|| = ||u|| ||v||_*``),
* e-sum domains/codomains reduced to the blocks a map actually touches,
* block-monomial maps between e-sums (at most one nonzero block per block
  row and column; the norm is that of the monomial matrix of block norms),
* monomial maps between l_p spaces (diagonal operator norms),
* l_2 -> l_2 via the largest singular value,
* vertex enumeration of the domain ball, or of the codomain's dual ball.

Otherwise a seeded multi-start subgradient ascent gives a lower bound and ball
containments give a certified upper bound.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np
from scipy.optimize import minimize

from .estimate import Estimate
from .spaces import (
    INF,
    MAX_EXHAUSTIVE_SIGNS,
    MAX_VERTICES,
    DimensionMismatch,
    Dual,
    ESum,
    Lp,
    SpaceSpec,
    TsirelsonTrunc,
    sign_vectors,
    space_from_json,
)

DEFAULT_STARTS = 200


class ExactUnavailable(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class LinearMap:
    matrix: np.ndarray
    domain: SpaceSpec
    codomain: SpaceSpec

    def __post_init__(self):
        m = np.asarray(self.matrix)
        if m.dtype != object:
            m = np.array(m, dtype=float)
        m = np.atleast_2d(m)
        if m.shape != (self.codomain.dim, self.domain.dim):
            raise DimensionMismatch(
                f"matrix shape {m.shape} does not match {self.codomain.dim} x {self.domain.dim}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def shape(self):
        return self.matrix.shape

    @property
    def is_rational(self) -> bool:
        return self.matrix.dtype == object

    def floats(self) -> np.ndarray:
        return self.matrix.astype(float)

    def __matmul__(self, other: "LinearMap") -> "LinearMap":
        if not isinstance(other, LinearMap):
            return NotImplemented
        if other.codomain != self.domain:
            raise DimensionMismatch(f"cannot compose: {other.codomain} is not {self.domain}")
        return LinearMap(self.matrix @ other.matrix, other.domain, self.codomain)

    def __add__(self, other: "LinearMap") -> "LinearMap":
        if (other.domain, other.codomain) != (self.domain, self.codomain):
            raise DimensionMismatch("maps have different endpoints")
        return LinearMap(self.matrix + other.matrix, self.domain, self.codomain)

    def scaled(self, c) -> "LinearMap":
        return LinearMap(c * self.matrix, self.domain, self.codomain)

    def __call__(self, x):
        return self.matrix @ np.asarray(x)

    def to_json(self) -> dict:
        rows = [[str(a) if isinstance(a, Fraction) else float(a) for a in row] for row in self.matrix]
        return {"domain": self.domain.to_json(), "codomain": self.codomain.to_json(), "rows": rows}

    @classmethod
    def from_json(cls, obj) -> "LinearMap":
        if isinstance(obj, str):
            obj = json.loads(obj)
        rows = obj["rows"]
        if any(isinstance(a, str) for row in rows for a in row):
            mat = np.array([[Fraction(str(a)) for a in row] for row in rows], dtype=object)
        else:
            mat = np.array(rows, dtype=float)
        return cls(mat, space_from_json(obj["domain"]), space_from_json(obj["codomain"]))

    @classmethod
    def identity(cls, space: SpaceSpec, codomain: Optional[SpaceSpec] = None) -> "LinearMap":
        return cls(np.eye(space.dim), space, codomain or space)


# ---------------------------------------------------------------------------
# exact routes


def _simplified(T: LinearMap) -> LinearMap:
    dom, cod = T.domain.simplify(), T.codomain.simplify()
    if dom is T.domain and cod is T.codomain:
        return T
    return LinearMap(T.matrix, dom, cod)


def _result(value, x, route) -> Estimate:
    return Estimate.exactly(value, {"x": None if x is None else np.asarray(x, dtype=float), "route": route})


def _rank_one(T: LinearMap) -> Optional[Estimate]:
    M = T.floats()
    X, Y = T.domain, T.codomain
    if not (Y.norm_exact and X.dual_exact):
        return None
    cols = np.flatnonzero(np.any(M != 0, axis=0))
    rows = np.flatnonzero(np.any(M != 0, axis=1))
    if len(cols) == 1:
        u = M[:, cols[0]]
        v = np.zeros(X.dim)
        v[cols[0]] = 1.0
    elif len(rows) == 1:
        u = np.zeros(Y.dim)
        u[rows[0]] = 1.0
        v = M[rows[0]]
    else:
        i, j = np.unravel_index(np.argmax(np.abs(M)), M.shape)
        u = M[:, j] / M[i, j]
        v = M[i]
        if not np.allclose(np.outer(u, v), M, rtol=1e-14, atol=1e-15 * np.abs(M).max()):
            return None
    dual = X.dual_estimate(v)
    val = float(Y.norm(u)) * float(dual.value)
    return _result(val, X.dual_attainer(v), "rank-one")


def _lp_outer(space) -> bool:
    return isinstance(space, ESum) and isinstance(space.outer, Lp)


def _sub_esum(space: ESum, blocks: list[int]) -> SpaceSpec:
    if len(blocks) == 1:
        return space.inners[blocks[0]]
    return ESum(Lp(len(blocks), space.outer.p), tuple(space.inners[k] for k in blocks))


def _restrict_blocks(T: LinearMap) -> Optional[LinearMap]:
    M = T.floats()
    changed = False
    dom, cod = T.domain, T.codomain
    cols = np.arange(dom.dim)
    rows = np.arange(cod.dim)
    if _lp_outer(dom):
        used = [k for k in range(len(dom.inners)) if np.any(M[:, dom.block(k)] != 0)]
        if used and len(used) < len(dom.inners):
            cols = np.concatenate([np.arange(dom.dim)[dom.block(k)] for k in used])
            dom = _sub_esum(dom, used)
            changed = True
    if _lp_outer(cod):
        used = [k for k in range(len(cod.inners)) if np.any(M[cod.block(k), :] != 0)]
        if used and len(used) < len(cod.inners):
            rows = np.concatenate([np.arange(cod.dim)[cod.block(k)] for k in used])
            cod = _sub_esum(cod, used)
            changed = True
    if not changed:
        return None
    return LinearMap(T.matrix[np.ix_(rows, cols)], dom, cod)


def _block_monomial(T: LinearMap) -> Optional[Estimate]:
    dom, cod = T.domain, T.codomain
    if not (_lp_outer(dom) and _lp_outer(cod)):
        return None
    M = T.floats()
    nr, nc = len(cod.inners), len(dom.inners)
    pattern = np.zeros((nr, nc), dtype=bool)
    for r in range(nr):
        for c in range(nc):
            pattern[r, c] = np.any(M[cod.block(r), dom.block(c)] != 0)
    if pattern.sum(axis=0).max() > 1 or pattern.sum(axis=1).max() > 1:
        return None
    beta = np.zeros((nr, nc))
    attain = np.zeros(dom.dim)
    for r, c in zip(*np.nonzero(pattern)):
        block = LinearMap(M[cod.block(r), dom.block(c)], dom.inners[c], cod.inners[r])
        est = _exact(block)
        if est is None:
            return None
        beta[r, c] = est.value
        if est.witness and est.witness.get("x") is not None:
            attain[dom.block(c)] = est.witness["x"]
    outer = _exact(LinearMap(beta, dom.outer, cod.outer))
    if outer is None:
        return None
    x = None
    if outer.witness and outer.witness.get("x") is not None:
        u = np.abs(outer.witness["x"])
        x = np.concatenate([u[c] * attain[dom.block(c)] for c in range(nc)])
    return _result(outer.value, x, "block-monomial")


def _regroup(T: LinearMap) -> Optional[LinearMap]:
    """View an l_p side as an l_p-sum of coordinate groups matching the other side's blocks.

    l_p^d is isometric to (l_p^{d_1} + ... + l_p^{d_k})_{l_p} for any partition
    of coordinates, so a map between l_p^d and an l_p-outer e-sum can be made
    block-structured. Coordinates touching several blocks make this fail.
    """
    dom, cod = T.domain, T.codomain
    M = T.floats()
    if _lp_outer(cod) and isinstance(dom, Lp) and dom.p == cod.outer.p:
        groups = _groups(M, cod, axis=0)
        if groups is None:
            return None
        cols = np.concatenate([g for _, g in groups])
        new_dom = ESum(Lp(len(groups), dom.p), tuple(Lp(len(g), dom.p) for _, g in groups))
        rows = np.concatenate([np.arange(cod.dim)[cod.block(b)] for b, _ in groups])
        new_cod = _sub_esum_keep(cod, [b for b, _ in groups])
        return LinearMap(M[np.ix_(rows, cols)], new_dom, new_cod)
    if _lp_outer(dom) and isinstance(cod, Lp) and cod.p == dom.outer.p:
        groups = _groups(M.T, dom, axis=0)
        if groups is None:
            return None
        rows = np.concatenate([g for _, g in groups])
        new_cod = ESum(Lp(len(groups), cod.p), tuple(Lp(len(g), cod.p) for _, g in groups))
        cols = np.concatenate([np.arange(dom.dim)[dom.block(b)] for b, _ in groups])
        new_dom = _sub_esum_keep(dom, [b for b, _ in groups])
        return LinearMap(M[np.ix_(rows, cols)], new_dom, new_cod)
    return None


def _groups(M, E: ESum, axis):
    """For each column of M, the single block of E (indexing rows) it touches."""
    owner = {}
    for j in range(M.shape[1]):
        hit = [b for b in range(len(E.inners)) if np.any(M[E.block(b), j] != 0)]
        if len(hit) > 1:
            return None
        if hit:
            owner.setdefault(hit[0], []).append(j)
    if not owner:
        return None
    return [(b, np.array(owner[b])) for b in sorted(owner)]


def _sub_esum_keep(space: ESum, blocks: list[int]) -> ESum:
    return ESum(Lp(len(blocks), space.outer.p), tuple(space.inners[k] for k in blocks))


def is_monomial(T) -> bool:
    """At most one nonzero entry in each row and each column."""
    M = T.matrix if isinstance(T, LinearMap) else np.asarray(T)
    nz = np.asarray(M != 0, dtype=bool)
    return bool(nz.sum(axis=0).max(initial=0) <= 1 and nz.sum(axis=1).max(initial=0) <= 1)


def _monomial_lp(T: LinearMap) -> Optional[Estimate]:
    dom, cod = T.domain, T.codomain
    if not (isinstance(dom, Lp) and isinstance(cod, Lp) and is_monomial(T)):
        return None
    M = T.floats()
    cols = np.flatnonzero(np.any(M != 0, axis=0))
    a = np.abs(M[:, cols]).max(axis=0)
    p, q = dom.p, cod.p
    x = np.zeros(dom.dim)
    if p <= q:
        j = int(np.argmax(a))
        x[cols[j]] = 1.0
        return _result(float(a[j]), x, "monomial")
    r = INF if q == INF else (1.0 / (1.0 / q - 1.0 / p) if p != INF else q)
    val = float(np.linalg.norm(a, ord=r))
    # attainer: |x_j|^p proportional to a_j^r
    if p == INF:
        x[cols] = 1.0
    elif val > 0:
        x[cols] = (a / val) ** (r / p)
    return _result(val, x, "monomial")


def _spectral(T: LinearMap) -> Optional[Estimate]:
    if not (isinstance(T.domain, Lp) and isinstance(T.codomain, Lp) and T.domain.p == 2 and T.codomain.p == 2):
        return None
    U, s, Vt = np.linalg.svd(T.floats())
    return _result(float(s[0]), Vt[0], "svd")


def _vertex_cost(T: LinearMap):
    """(count, route) for the cheaper of the two enumeration routes."""
    options = []
    V = T.domain.extreme_points() if T.codomain.norm_exact else None
    if V is not None:
        options.append((len(V) * _norm_cost(T.codomain), "vertices", V))
    G = T.codomain.dual_extreme_points() if T.domain.dual_exact else None
    if G is not None:
        options.append((len(G) * _dual_cost(T.domain), "dual-vertices", G))
    return min(options, key=lambda o: o[0]) if options else None


def _norm_cost(space):
    return 1 if isinstance(space, Lp) else 50


def _dual_cost(space):
    if isinstance(space, Lp):
        return 1
    if isinstance(space, TsirelsonTrunc):
        V = space.extreme_points()
        return max(1, len(V) // 200) if V is not None else 50
    return 50


def dual_norm_many(space: SpaceSpec, F: np.ndarray) -> np.ndarray:
    if isinstance(space, Lp):
        return np.linalg.norm(F, ord=space.q, axis=-1)
    if isinstance(space, TsirelsonTrunc) and space.extreme_points() is not None:
        return (F @ space.extreme_points().T).max(axis=1)
    return np.array([float(space.dual_norm(f)) for f in F])


def _enumerate(T: LinearMap) -> Optional[Estimate]:
    opt = _vertex_cost(T)
    if opt is None:
        return None
    _, route, P = opt
    M = T.floats()
    if route == "vertices":
        vals = T.codomain.norm_many(P @ M.T)
        i = int(np.argmax(vals))
        return _result(float(vals[i]), P[i], route)
    Z = P @ M
    vals = dual_norm_many(T.domain, Z)
    i = int(np.argmax(vals))
    return _result(float(vals[i]), T.domain.dual_attainer(Z[i]), route)


def _exact(T: LinearMap) -> Optional[Estimate]:
    T = _simplified(T)
    M = T.floats()
    if not np.any(M):
        return _result(0.0, np.zeros(T.domain.dim), "zero")
    reduced = _restrict_blocks(T)
    if reduced is not None:
        est = _exact(reduced)
        if est is None:
            return None
        # the attainer lives on the reduced domain; report it without lifting
        return Estimate.exactly(est.value, {"x": None, "route": "block-restriction/" + est.witness["route"]})
    for route in (_rank_one, _block_monomial, _monomial_lp, _spectral, _enumerate):
        est = route(T)
        if est is not None:
            return est
    regrouped = _regroup(T)
    if regrouped is not None:
        est = _block_monomial(regrouped)
        if est is not None:
            return Estimate.exactly(est.value, {"x": None, "route": "regrouped/block-monomial"})
    return None


def _exact_rational(T: LinearMap) -> Optional[Estimate]:
    """Rational arithmetic for l_1 / l_inf domains with rational-valued codomain norms."""
    dom, cod = T.domain.simplify(), T.codomain.simplify()
    rational_cod = (isinstance(cod, Lp) and cod.p in (1, INF)) or (isinstance(cod, TsirelsonTrunc) and cod.p == 1)
    if not (isinstance(dom, Lp) and dom.p in (1, INF) and rational_cod):
        return None
    M = np.array([[Fraction(a) for a in row] for row in T.matrix], dtype=object)
    if dom.p == 1:
        pts = [np.array([Fraction(int(i == j)) for i in range(dom.dim)], dtype=object) for j in range(dom.dim)]
    else:
        if dom.dim > MAX_EXHAUSTIVE_SIGNS:
            return None
        pts = [np.array([Fraction(s) for s in signs], dtype=object)
               for signs in itertools.product((1, -1), repeat=dom.dim)]
    best, arg = Fraction(0), pts[0]
    for x in pts:
        val = cod.norm(M.dot(x))
        if val > best:
            best, arg = val, x
    return Estimate.exactly(best, {"x": np.array(arg, dtype=float), "route": "rational"})


# ---------------------------------------------------------------------------
# search and certified upper bounds


def _ascent(M, X: SpaceSpec, Y: SpaceSpec, x, max_iter=400):
    nx = float(X.norm(x))
    if nx == 0:
        return 0.0, x
    x = x / nx
    val = float(Y.norm(M @ x))
    step = 0.5
    for _ in range(max_iter):
        if val == 0:
            break
        gy = Y.subgradient(M @ x)
        z = M.T @ gy
        cands = []
        if X.cheap_dual:
            xp = X.dual_attainer(z)
            n = float(X.norm(xp))
            if n > 0:
                cands.append(xp / n)
        d = z / val - X.subgradient(x)
        xs = x + step * d
        n = float(X.norm(xs))
        if n > 0:
            cands.append(xs / n)
        best_val, best_x = val, x
        for c in cands:
            v = float(Y.norm(M @ c))
            if v > best_val:
                best_val, best_x = v, c
        if best_val > val:
            gain = (best_val - val) / val
            x, val = best_x, best_val
            if gain < 1e-10:
                break
        else:
            step *= 0.5
            if step < 1e-10:
                break
    return val, x


def search_norm(T: LinearMap, budget: int = DEFAULT_STARTS, seed: int = 0) -> tuple[float, np.ndarray]:
    """Best ||Tx||/||x|| over ``budget`` seeded ascent runs (basis vectors first)."""
    T = _simplified(T)
    M = T.floats()
    n = T.domain.dim
    best, arg = 0.0, np.zeros(n)
    for i in range(budget):
        if i < n:
            x0 = np.eye(n)[i]
        else:
            x0 = np.random.default_rng([seed, i]).standard_normal(n)
        val, x = _ascent(M, T.domain, T.codomain, x0)
        if val > best:
            best, arg = val, x
    return best, arg


def _containment_upper(T: LinearMap) -> float:
    """Certified upper bounds from comparing the domain ball with l_inf and l_1 balls."""
    dom, cod = T.domain, T.codomain
    M = T.floats()
    n = dom.dim
    bounds = [INF]
    basis_duals = [dom.dual_estimate(e).upper for e in np.eye(n)]
    c_inf = max(basis_duals)
    col_norms = [cod.norm_estimate(M[:, j]).upper for j in range(n)]
    if n <= MAX_EXHAUSTIVE_SIGNS:
        S = sign_vectors(n)
        bounds.append(c_inf * max(cod.norm_estimate(M @ s).upper for s in S))
        # ||x||_1 <= max_s ||s||_* ||x||
        c_one = max(dom.dual_estimate(s).upper for s in S)
        bounds.append(c_one * max(col_norms))
    if isinstance(dom, Lp) and isinstance(cod, Lp) and dom.p == cod.p:
        p = dom.p
        n11 = np.abs(M).sum(axis=0).max()
        n22 = np.linalg.norm(M, 2)
        nii = np.abs(M).sum(axis=1).max()
        if p <= 2:
            theta = 2 * (1 - 1 / p)
            bounds.append(n11 ** (1 - theta) * n22 ** theta)
        else:
            theta = 1 - 2 / p if p != INF else 1.0
            bounds.append(n22 ** (1 - theta) * nii ** theta)
    return float(min(bounds))


def operator_norm(T: LinearMap, mode: str = "auto", budget: int = DEFAULT_STARTS, seed: int = 0) -> Estimate:
    """Operator norm with an exactness flag.

    ``mode="exact"`` raises ``ExactUnavailable`` when no exact route applies;
    ``mode="search"`` skips the exact routes and returns the ascent value
    bracketed by a certified upper bound.
    """
    if mode not in ("auto", "exact", "search"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode != "search":
        est = _exact_rational(T) if T.is_rational else None
        if est is None:
            est = _exact(T)
        if est is not None:
            return est
        if mode == "exact":
            raise ExactUnavailable(f"no exact operator-norm route for {T.domain} -> {T.codomain}")
    lower, x = search_norm(T, budget, seed)
    upper = max(lower, _containment_upper(_simplified(T)))
    return Estimate(lower, lower, upper, upper - lower <= 1e-12 * max(1.0, upper), {"x": x, "route": "search"})


def opnorm_upper(T: LinearMap, budget: int = 20, seed: int = 0) -> float:
    return float(operator_norm(T, budget=budget, seed=seed).upper)


# ---------------------------------------------------------------------------
# constructions


def adjoint(T: LinearMap) -> LinearMap:
    return LinearMap(T.matrix.T, Dual(T.codomain), Dual(T.domain))


def block_maps(E: ESum, k: int) -> tuple[LinearMap, LinearMap]:
    """Embedding of and projection onto the k-th block (1-based) of an e-sum."""
    if not isinstance(E, ESum):
        raise TypeError("block maps need an e-sum")
    if not 1 <= k <= len(E.inners):
        raise IndexError(f"block {k} out of range 1..{len(E.inners)}")
    inner = E.inners[k - 1]
    J = np.zeros((E.dim, inner.dim))
    J[E.block(k - 1), :] = np.eye(inner.dim)
    return LinearMap(J, inner, E), LinearMap(J.T.copy(), E, inner)


def _outer_of(space: SpaceSpec, inner: SpaceSpec, count_hint=None) -> SpaceSpec:
    if isinstance(space, ESum):
        if any(s != inner for s in space.inners):
            raise DimensionMismatch("e-sum blocks do not all match the inner map's space")
        return space.outer
    return space


def kron(A: LinearMap, U: LinearMap) -> LinearMap:
    """A acting between outer coordinates, U inside every block: A (x) U on E(X).

    ``A`` may be given either between the outer spaces or between e-sums whose
    blocks equal U's domain/codomain.
    """
    dom_outer = _outer_of(A.domain, U.domain)
    cod_outer = _outer_of(A.codomain, U.codomain)
    dom = ESum(dom_outer, tuple([U.domain] * dom_outer.dim))
    cod = ESum(cod_outer, tuple([U.codomain] * cod_outer.dim))
    return LinearMap(np.kron(A.floats(), U.floats()), dom, cod)


def signed_permutation(perm, signs=None, space: Optional[SpaceSpec] = None) -> np.ndarray:
    n = len(perm)
    signs = np.ones(n) if signs is None else np.asarray(signs, dtype=float)
    M = np.zeros((n, n))
    for j, i in enumerate(perm):
        M[i, j] = signs[i]
    return M


def _unit_samples(X: SpaceSpec, count: int, rng) -> np.ndarray:
    V = X.extreme_points()
    pts = [] if V is None else list(V[:256])
    pts += list(np.eye(X.dim)) + list(rng.standard_normal((count, X.dim)))
    P = np.array(pts)
    nrm = np.asarray(X.norm_many(P), dtype=float)
    keep = nrm > 0
    return P[keep] / nrm[keep, None]


def banach_mazur_search(X: SpaceSpec, Y: SpaceSpec, budget: int = 32, seed: int = 0) -> Estimate:
    """Upper bound for d(X, Y) = inf ||T|| ||T^-1||.

    Nelder-Mead minimizes a sampled surrogate (max stretch over fixed unit
    vectors of X times max stretch of T^-1 over unit vectors of Y); the best
    candidates are then certified with operator-norm upper bounds.
    """
    if X.dim != Y.dim:
        raise DimensionMismatch("Banach-Mazur distance needs equal dimensions")
    n = X.dim
    rng = np.random.default_rng(seed)
    VX, VY = _unit_samples(X, 64 * n, rng), _unit_samples(Y, 64 * n, rng)

    def surrogate(flat):
        T = flat.reshape(n, n)
        if abs(np.linalg.det(T)) < 1e-12 * max(1.0, np.abs(T).max()) ** n:
            return INF
        fwd = np.asarray(Y.norm_many(VX @ T.T), dtype=float).max()
        bwd = np.asarray(X.norm_many(VY @ np.linalg.inv(T).T), dtype=float).max()
        return float(fwd * bwd)

    def certified(T):
        if abs(np.linalg.det(T)) < 1e-12 * max(1.0, np.abs(T).max()) ** n:
            return INF
        fwd = opnorm_upper(LinearMap(T, X, Y), budget=8, seed=seed)
        bwd = opnorm_upper(LinearMap(np.linalg.inv(T), Y, X), budget=8, seed=seed)
        return fwd * bwd

    starts = [np.eye(n)]
    if n & (n - 1) == 0:
        starts.append(_sylvester(n))
    while len(starts) < max(budget, 1):
        starts.append(rng.standard_normal((n, n)))
    found = []
    for T0 in starts[:max(budget, 1)]:
        found.append((surrogate(T0.ravel()), T0))
        if found[-1][0] - 1.0 <= 1e-12:
            continue
        res = minimize(surrogate, T0.ravel(), method="Nelder-Mead",
                       options={"maxiter": 200 * n * n, "xatol": 1e-10, "fatol": 1e-12})
        found.append((float(res.fun), res.x.reshape(n, n)))
    found.sort(key=lambda t: t[0])
    best, arg = INF, None
    for _, T in found[:4]:
        c = certified(T)
        if c < best:
            best, arg = c, T
    exact = best - 1.0 <= 1e-12
    return Estimate(best, 1.0, best, exact, arg)


def _sylvester(n: int) -> np.ndarray:
    H = np.array([[1.0]])
    while len(H) < n:
        H = np.block([[H, H], [H, -H]])
    return H


def hadamard_rows(n: int) -> np.ndarray:
    """Rows of a Sylvester Hadamard matrix truncated to n columns; E[h_b h_c] = delta_bc."""
    N = 1
    while N < n:
        N *= 2
    return _sylvester(N)[:, :n]
