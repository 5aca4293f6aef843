"""Finite decompositions of elements of F(Y,X) (x) F(X,Y).

A decomposition stores ``T`` terms ``c_t R_t (x) S_t`` with ``R_t: Y -> X``
(an ``m x n`` matrix) and ``S_t: X -> Y`` (``n x m``). The represented tensor
is the dense array ``D[a,b,c,d] = sum_t c_t R_t[a,b] S_t[c,d]``; two
decompositions are the same tensor exactly when these arrays agree.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import linprog

from .estimate import Estimate
from .operators import LinearMap, hadamard_rows, operator_norm
from .spaces import INF, DimensionMismatch, Lp, SpaceSpec, space_from_json

REL_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class TensorDecomposition:
    X: SpaceSpec
    Y: SpaceSpec
    Rs: np.ndarray
    Ss: np.ndarray
    coeffs: tuple = ()

    def __post_init__(self):
        m, n = self.X.dim, self.Y.dim
        Rs = np.asarray(self.Rs, dtype=float).reshape(-1, m, n)
        Ss = np.asarray(self.Ss, dtype=float).reshape(-1, n, m)
        if len(Rs) != len(Ss):
            raise DimensionMismatch("R and S term counts differ")
        coeffs = tuple(self.coeffs) if len(self.coeffs) else (Fraction(1),) * len(Rs)
        if len(coeffs) != len(Rs):
            raise DimensionMismatch("coefficient count differs from term count")
        Rs.setflags(write=False)
        Ss.setflags(write=False)
        object.__setattr__(self, "Rs", Rs)
        object.__setattr__(self, "Ss", Ss)
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def from_terms(cls, X, Y, terms: Sequence, coeffs=None) -> "TensorDecomposition":
        """Build from ``(R, S)`` pairs of LinearMaps or bare matrices."""
        Rs, Ss = [], []
        for R, S in terms:
            if isinstance(R, LinearMap):
                if (R.domain, R.codomain, S.domain, S.codomain) != (Y, X, X, Y):
                    raise DimensionMismatch("term endpoints do not match (Y -> X, X -> Y)")
                R, S = R.matrix, S.matrix
            Rs.append(np.asarray(R, dtype=float))
            Ss.append(np.asarray(S, dtype=float))
        m, n = X.dim, Y.dim
        return cls(X, Y, np.array(Rs).reshape(-1, m, n), np.array(Ss).reshape(-1, n, m),
                   tuple(coeffs) if coeffs is not None else ())

    @classmethod
    def zero(cls, X, Y) -> "TensorDecomposition":
        return cls(X, Y, np.zeros((0, X.dim, Y.dim)), np.zeros((0, Y.dim, X.dim)), ())

    def __len__(self):
        return len(self.Rs)

    @property
    def float_coeffs(self) -> np.ndarray:
        return np.array([float(c) for c in self.coeffs])

    def terms(self):
        for c, R, S in zip(self.coeffs, self.Rs, self.Ss):
            yield c, LinearMap(R, self.Y, self.X), LinearMap(S, self.X, self.Y)

    def dense(self) -> np.ndarray:
        if not len(self):
            m, n = self.X.dim, self.Y.dim
            return np.zeros((m, n, n, m))
        return np.einsum("t,tab,tcd->abcd", self.float_coeffs, self.Rs, self.Ss)

    def replace(self, Rs, Ss, coeffs) -> "TensorDecomposition":
        return TensorDecomposition(self.X, self.Y, Rs, Ss, tuple(coeffs))

    def __add__(self, other: "TensorDecomposition") -> "TensorDecomposition":
        _same_endpoints(self, other)
        return self.replace(np.concatenate([self.Rs, other.Rs]), np.concatenate([self.Ss, other.Ss]),
                            self.coeffs + other.coeffs)

    def scaled(self, c) -> "TensorDecomposition":
        return self.replace(self.Rs, self.Ss, tuple(c * a for a in self.coeffs))

    def to_json(self) -> dict:
        return {
            "X": self.X.to_json(),
            "Y": self.Y.to_json(),
            "terms": [{"coeff": str(c), "R": R.tolist(), "S": S.tolist()}
                      for c, R, S in zip(self.coeffs, self.Rs, self.Ss)],
        }

    @classmethod
    def from_json(cls, obj) -> "TensorDecomposition":
        if isinstance(obj, str):
            obj = json.loads(obj)
        X, Y = space_from_json(obj["X"]), space_from_json(obj["Y"])
        terms = obj["terms"]
        if not terms:
            return cls.zero(X, Y)
        coeffs = [Fraction(str(t.get("coeff", "1"))) for t in terms]
        return cls.from_terms(X, Y, [(t["R"], t["S"]) for t in terms], coeffs)


def _same_endpoints(a: TensorDecomposition, b: TensorDecomposition):
    if a.X != b.X or a.Y != b.Y:
        raise DimensionMismatch("decompositions live on different spaces")


def same_tensor(a: TensorDecomposition, b: TensorDecomposition, rel: float = REL_TOL) -> bool:
    da, db = a.dense(), b.dense()
    scale = max(1.0, np.abs(da).max(initial=0.0))
    return bool(np.abs(da - db).max(initial=0.0) <= rel * scale)


def contract(D: TensorDecomposition) -> LinearMap:
    """pi(D) = sum c_t R_t S_t as a map X -> X."""
    M = np.einsum("t,tab,tbd->ad", D.float_coeffs, D.Rs, D.Ss) if len(D) else np.zeros((D.X.dim, D.X.dim))
    return LinearMap(M, D.X, D.X)


# ---------------------------------------------------------------------------
# upper bounds


class NormCache:
    """Operator norms keyed by matrix bytes; decompositions repeat maps a lot."""

    def __init__(self, budget: int = 32, seed: int = 0):
        self.budget, self.seed = budget, seed
        self._store: dict = {}

    def __call__(self, M: np.ndarray, dom: SpaceSpec, cod: SpaceSpec) -> Estimate:
        M = np.ascontiguousarray(M, dtype=float) + 0.0  # fold -0.0 into 0.0
        key = (M.shape, M.tobytes(), id(dom), id(cod))
        est = self._store.get(key)
        if est is None:
            est = operator_norm(LinearMap(M, dom, cod), budget=self.budget, seed=self.seed)
            self._store[key] = (est, dom, cod)  # keep spaces alive so ids stay valid
            return est
        return est[0]


def _term_norms(D: TensorDecomposition, cache: Optional[NormCache]):
    cache = cache or NormCache()
    return ([cache(R, D.Y, D.X) for R in D.Rs], [cache(S, D.X, D.Y) for S in D.Ss])


def projective_upper(D: TensorDecomposition, cache: Optional[NormCache] = None) -> Estimate:
    """Evaluate sum |c_t| ||R_t|| ||S_t|| for this representation.

    Rational coefficients and binary float norms are summed exactly, so a group
    average of isometries evaluates to exactly 1. ``upper`` uses certified
    operator-norm upper bounds; ``exact`` means every norm was exact.
    """
    if not len(D):
        return Estimate.exactly(0.0)
    rn, sn = _term_norms(D, cache)
    total, certified = Fraction(0), Fraction(0)
    exact = True
    for c, r, s in zip(D.coeffs, rn, sn):
        a = abs(Fraction(c))
        total += a * Fraction(float(r.value)) * Fraction(float(s.value))
        certified += a * Fraction(float(r.upper)) * Fraction(float(s.upper))
        exact = exact and r.exact and s.exact
    return Estimate(float(total), float(total), float(certified), exact,
                    {"terms": len(D), "sum": total})


def bound_value(D, cache=None) -> float:
    return float(projective_upper(D, cache).value)


# ---------------------------------------------------------------------------
# improvement moves


def drop_zero_terms(D: TensorDecomposition) -> TensorDecomposition:
    keep = [t for t in range(len(D))
            if D.coeffs[t] != 0 and np.any(D.Rs[t]) and np.any(D.Ss[t])]
    if len(keep) == len(D):
        return D
    return D.replace(D.Rs[keep], D.Ss[keep], [D.coeffs[t] for t in keep])


def _proportional(A, B) -> Optional[float]:
    """alpha with B = alpha A exactly (to 1e-14 relative), else None."""
    i = np.unravel_index(np.argmax(np.abs(A)), A.shape)
    if A[i] == 0:
        return None
    alpha = B[i] / A[i]
    if np.allclose(B, alpha * A, rtol=0, atol=1e-14 * max(1.0, np.abs(B).max())):
        return float(alpha)
    return None


def merge_terms(D: TensorDecomposition) -> TensorDecomposition:
    """Combine terms sharing a proportional R (or S) factor."""
    Rs, Ss, cs = list(D.Rs), list(D.Ss), list(D.coeffs)
    changed = True
    while changed:
        changed = False
        for i in range(len(Rs)):
            for j in range(i + 1, len(Rs)):
                a = _proportional(Rs[i], Rs[j])
                if a is not None:
                    # c_i R S_i + c_j aR S_j = R (c_i S_i + a c_j S_j)
                    Ss[i] = float(cs[i]) * Ss[i] + a * float(cs[j]) * Ss[j]
                    cs[i] = Fraction(1)
                    del Rs[j], Ss[j], cs[j]
                    changed = True
                    break
                a = _proportional(Ss[i], Ss[j])
                if a is not None:
                    Rs[i] = float(cs[i]) * Rs[i] + a * float(cs[j]) * Rs[j]
                    cs[i] = Fraction(1)
                    del Rs[j], Ss[j], cs[j]
                    changed = True
                    break
            if changed:
                break
    if len(Rs) == len(D):
        return D
    m, n = D.X.dim, D.Y.dim
    return drop_zero_terms(D.replace(np.array(Rs).reshape(-1, m, n), np.array(Ss).reshape(-1, n, m), cs))


def balance(D: TensorDecomposition, cache: Optional[NormCache] = None) -> TensorDecomposition:
    """Rescale (R, S) -> (kR, S/k) with k = sqrt(||S||/||R||) so the factors have equal norm."""
    rn, sn = _term_norms(D, cache)
    Rs, Ss = D.Rs.copy(), D.Ss.copy()
    changed = False
    for t, (r, s) in enumerate(zip(rn, sn)):
        r, s = float(r.value), float(s.value)
        if r > 0 and s > 0 and abs(r - s) > 1e-15 * max(r, s):
            k = np.sqrt(s / r)
            Rs[t] *= k
            Ss[t] /= k
            changed = True
    return D.replace(Rs, Ss, D.coeffs) if changed else D


def svd_candidate(D: TensorDecomposition) -> TensorDecomposition:
    """Minimal-rank representation from the SVD of the (mn) x (nm) unfolding."""
    m, n = D.X.dim, D.Y.dim
    A = D.dense().reshape(m * n, n * m)
    U, s, Vt = np.linalg.svd(A, full_matrices=False)
    keep = s > 1e-13 * max(1.0, s[0] if len(s) else 0.0)
    U, s, Vt = U[:, keep], s[keep], Vt[keep]
    root = np.sqrt(s)
    Rs = (U * root).T.reshape(-1, m, n)
    Ss = (Vt * root[:, None]).reshape(-1, n, m)
    return D.replace(Rs, Ss, (Fraction(1),) * len(s))


def diagonal_profile(D: TensorDecomposition, rel: float = 1e-12) -> Optional[np.ndarray]:
    """c with D[a,b,c',d] = delta(a,d) delta(b,c') c[b], or None."""
    m, n = D.X.dim, D.Y.dim
    A = D.dense()
    c = np.array([A[0, b, b, 0] for b in range(n)])
    expected = np.einsum("ad,bc,b->abcd", np.eye(m), np.eye(n), c)
    if np.abs(A - expected).max(initial=0.0) <= rel * max(1.0, np.abs(A).max(initial=0.0)):
        return c
    return None


def shift_orbit_candidate(D: TensorDecomposition) -> Optional[TensorDecomposition]:
    """Cyclic-shift representation of delta(a,d) diag(c)[b,c'], sign-averaged over Y.

    Terms ``M_r U_h (x) U_h N_r`` with ``M_r[a,b] = delta(a, b+r mod m)``,
    ``N_r[b,a] = c_b delta(a, b+r mod m)`` and ``h`` running over Hadamard rows.
    The sign average removes the b != c' cross terms.
    """
    c = diagonal_profile(D)
    if c is None:
        return None
    m, n = D.X.dim, D.Y.dim
    H = hadamard_rows(n)
    Rs, Ss = [], []
    for r in range(m):
        M = np.zeros((m, n))
        M[(np.arange(n) + r) % m, np.arange(n)] = 1.0
        N = M.T * c[:, None]
        for h in H:
            Rs.append(M * h[None, :])
            Ss.append(h[:, None] * N)
    coeff = Fraction(1, len(H))
    return D.replace(np.array(Rs), np.array(Ss), (coeff,) * len(Rs))


def _mix_pair(D, i, j, rng):
    Mix = np.eye(2) + 0.3 * rng.standard_normal((2, 2))
    if abs(np.linalg.det(Mix)) < 1e-3:
        return None
    inv = np.linalg.inv(Mix)
    c = D.float_coeffs
    Ri, Rj = D.Rs[i], D.Rs[j]
    Si, Sj = c[i] * D.Ss[i], c[j] * D.Ss[j]
    # [R_i R_j] Mix Mix^{-1} [S_i; S_j]
    newR = [Mix[0, 0] * Ri + Mix[1, 0] * Rj, Mix[0, 1] * Ri + Mix[1, 1] * Rj]
    newS = [inv[0, 0] * Si + inv[0, 1] * Sj, inv[1, 0] * Si + inv[1, 1] * Sj]
    Rs, Ss = D.Rs.copy(), D.Ss.copy()
    Rs[i], Rs[j] = newR
    Ss[i], Ss[j] = newS
    cs = list(D.coeffs)
    cs[i] = cs[j] = Fraction(1)
    return D.replace(Rs, Ss, cs)


def improve_decomposition(D: TensorDecomposition, budget: int = 50, seed: int = 0,
                          cache: Optional[NormCache] = None) -> TensorDecomposition:
    """Search over representations of the same tensor for a smaller projective bound.

    Every accepted candidate represents the same dense array within 1e-9
    relative and does not increase the bound.
    """
    cache = cache or NormCache()
    best = drop_zero_terms(D)
    best_val = bound_value(best, cache)

    def offer(cand):
        nonlocal best, best_val
        if cand is None or not same_tensor(cand, D):
            return False
        v = bound_value(cand, cache)
        if v <= best_val + 1e-15 * max(1.0, best_val) and (v < best_val or len(cand) < len(best)):
            best, best_val = cand, v
            return True
        return False

    offer(merge_terms(best))
    offer(shift_orbit_candidate(best))
    if D.X.dim * D.Y.dim <= 144:
        offer(svd_candidate(best))
    rng = np.random.default_rng(seed)
    for _ in range(budget):
        if len(best) < 2:
            break
        i, j = rng.choice(len(best), size=2, replace=False)
        offer(_mix_pair(best, i, j, rng))
    return balance(best, cache)


# ---------------------------------------------------------------------------
# dual forms and lower bounds


@dataclass(frozen=True, eq=False)
class DualForm:
    """B(R, S) = sum coeffs[a,b,c,d] R[a,b] S[c,d].

    ``bound`` is an optional certified upper bound for the injective norm that
    the constructor knows analytically (contraction and factorized forms).
    """

    coeffs: np.ndarray
    bound: Optional[float] = None
    label: str = ""
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        arr = np.asarray(self.coeffs, dtype=float)
        if arr.ndim != 4 or not np.all(np.isfinite(arr)):
            raise ValueError("dual form needs a finite 4-index array")
        object.__setattr__(self, "coeffs", arr)

    def __call__(self, R, S) -> float:
        return float(np.einsum("abcd,ab,cd->", self.coeffs, np.asarray(R), np.asarray(S)))

    def pair(self, D: TensorDecomposition) -> float:
        return float(np.sum(self.coeffs * D.dense()))

    @classmethod
    def factorized(cls, G1, G2, bound=None, label="factorized") -> "DualForm":
        return cls(np.einsum("ab,cd->abcd", G1, G2), bound, label, {"G1": np.asarray(G1), "G2": np.asarray(G2)})

    @classmethod
    def contraction(cls, X: SpaceSpec, Y: SpaceSpec, x, g, label="contraction") -> "DualForm":
        """B(R,S) = g(R S x); |B| <= ||g||_* ||x|| ||R|| ||S||."""
        x, g = np.asarray(x, float), np.asarray(g, float)
        n = Y.dim
        coeffs = np.einsum("a,bc,d->abcd", g, np.eye(n), x)
        bound = float(X.norm(x)) * float(X.dual_estimate(g).upper)
        return cls(coeffs, bound, label)


def trace_dual(G: np.ndarray, dom: SpaceSpec, cod: SpaceSpec, budget: int = 40) -> tuple[float, float, np.ndarray]:
    """sup{<G,R> : ||R: dom -> cod|| <= 1} as (lower, upper, maximizer).

    Exact for an l_1 domain (column-wise dual norms), an l_inf codomain
    (row-wise norms) and l_2 -> l_2 (nuclear norm); polyhedral pairs go
    through a linear program over the vertex constraints; anything else uses
    cutting planes whose LP value is the certified upper bound.
    """
    dom, cod = dom.simplify(), cod.simplify()
    G = np.asarray(G, dtype=float)
    if not np.any(G):
        return 0.0, 0.0, np.zeros_like(G)
    if isinstance(dom, Lp) and dom.p == 1:
        R = np.zeros_like(G)
        total = 0.0
        for j in range(G.shape[1]):
            est = cod.dual_estimate(G[:, j])
            x = cod.dual_attainer(G[:, j])
            nx = float(cod.norm(x))
            if nx > 0:
                R[:, j] = x / nx
            total += float(est.value)
        return total, total, R
    if isinstance(cod, Lp) and cod.p == INF:
        R = np.zeros_like(G)
        total = 0.0
        for a in range(G.shape[0]):
            total += float(dom.norm(G[a]))
            R[a] = dom.subgradient(G[a])
        return total, total, R
    if isinstance(dom, Lp) and isinstance(cod, Lp) and dom.p == 2 and cod.p == 2:
        U, s, Vt = np.linalg.svd(G, full_matrices=False)
        return float(s.sum()), float(s.sum()), U @ Vt
    V = dom.extreme_points()
    F = cod.dual_extreme_points()
    if V is not None and F is not None and len(V) * len(F) <= 40000:
        return _polyhedral_trace_dual(G, V, F)
    return _cutting_trace_dual(G, dom, cod, budget)


def _polyhedral_trace_dual(G, V, F):
    m, n = G.shape
    # constraint f^T R v <= 1 is linear in vec(R) with coefficients f v^T
    A = np.einsum("ka,lb->klab", F, V).reshape(-1, m * n)
    res = linprog(-G.ravel(), A_ub=A, b_ub=np.ones(len(A)), bounds=(None, None), method="highs")
    if res.status != 0:
        raise RuntimeError(f"trace-dual LP failed: {res.message}")
    R = res.x.reshape(m, n)
    val = float(-res.fun)
    return val, val, R


def _cutting_trace_dual(G, dom, cod, budget):
    m, n = G.shape
    rows, rhs = [], []
    # |R_ab| <= ||x_a^*|| ||y_b|| for every R in the unit ball
    box = [(None, None)] * (m * n)
    for a in range(m):
        ea = np.eye(m)[a]
        ca = float(cod.dual_estimate(ea).upper)
        for b in range(n):
            eb = np.eye(n)[b]
            lim = ca * float(dom.norm(eb))
            box[a * n + b] = (-lim, lim)
    best_lower, best_R = 0.0, np.zeros_like(G)
    upper = INF
    for _ in range(budget):
        res = linprog(-G.ravel(), A_ub=np.array(rows) if rows else None, b_ub=np.array(rhs) if rows else None,
                      bounds=box, method="highs")
        if res.status != 0:
            break
        R = res.x.reshape(m, n)
        upper = min(upper, float(-res.fun))
        est = operator_norm(LinearMap(R, dom, cod), budget=8)
        nR = float(est.upper)
        if nR > 0:
            val = float(np.sum(G * R)) / nR
            if val > best_lower:
                best_lower, best_R = val, R / nR
        if nR <= 1 + 1e-9:
            break
        x = est.witness["x"] if est.witness and est.witness.get("x") is not None else None
        if x is None:
            break
        g = cod.subgradient(R @ x)
        rows.append(np.outer(g, x).ravel())
        rhs.append(1.0)
    return best_lower, max(best_lower, upper), best_R


def _op_ball_point(M, dom, cod, budget, seed):
    """An attainer x of ||M|| and the norming functional g of Mx."""
    est = operator_norm(LinearMap(M, dom, cod), budget=budget, seed=seed)
    x = est.witness.get("x") if est.witness else None
    if x is None or not np.any(M @ x):
        return float(est.value), None, None
    x = np.asarray(x, dtype=float)
    x = x / float(dom.norm(x))
    return float(est.value), x, cod.subgradient(M @ x)


def injective_norm(B: DualForm, X: SpaceSpec, Y: SpaceSpec, budget: int = 16, seed: int = 0) -> Estimate:
    """sup |B(R,S)| over the unit balls of F(Y,X) and F(X,Y) by alternating maximization.

    The value is the best pair found (a certified lower bound). The upper bound
    is the analytic bound carried by the form when present, else the
    alternating bound through the trace duals of the row/column slices.
    """
    m, n = X.dim, Y.dim
    C = B.coeffs
    if C.shape != (m, n, n, m):
        raise DimensionMismatch(f"form shape {C.shape} does not match ({m},{n},{n},{m})")
    if not np.any(C):
        return Estimate.exactly(0.0)
    if "G1" in B.meta:
        l1, u1, R = trace_dual(B.meta["G1"], Y, X)
        l2, u2, S = trace_dual(B.meta["G2"], X, Y)
        return Estimate(l1 * l2, l1 * l2, u1 * u2, abs(u1 * u2 - l1 * l2) <= 1e-12 * max(1.0, u1 * u2),
                        {"R": R, "S": S})
    best, arg = 0.0, None
    for k in range(max(1, budget)):
        rng = np.random.default_rng([seed, k])
        S = rng.standard_normal((n, m))
        S /= max(float(operator_norm(LinearMap(S, X, Y), budget=8, seed=seed).upper), 1e-300)
        prev = -INF
        for _ in range(50):
            GR = np.einsum("abcd,cd->ab", C, S)
            _, _, R = trace_dual(GR, Y, X)
            GS = np.einsum("abcd,ab->cd", C, R)
            val, _, S = trace_dual(GS, X, Y)
            if val <= prev * (1 + 1e-12) + 1e-15:
                break
            prev = val
        val = abs(B(R, S))
        if val > best:
            best, arg = val, (R, S)
    upper = B.bound if B.bound is not None else _crude_injective_upper(C, X, Y)
    upper = max(upper, best)
    return Estimate(best, best, upper, upper - best <= 1e-12 * max(1.0, upper), arg)


def _crude_injective_upper(C, X, Y) -> float:
    """sup_R sup_S B(R,S) <= sum over (a,b) of |<C[a,b], S>| bounds with |R_ab| <= ||x_a^*|| ||y_b||."""
    m, n = X.dim, Y.dim
    rx = [float(X.dual_estimate(e).upper) for e in np.eye(m)]
    ry = [float(Y.dual_estimate(e).upper) for e in np.eye(n)]
    nx = [float(X.norm(e)) for e in np.eye(m)]
    ny = [float(Y.norm(e)) for e in np.eye(n)]
    total = 0.0
    for a in range(m):
        for b in range(n):
            total += rx[a] * ny[b] * float(trace_dual(C[a, b], X, Y)[1])
    return total


def factorized_lower(D: TensorDecomposition, starts: int = 8, seed: int = 0, rounds: int = 20):
    """Best g1(R x1) g2(S x2) pairing over unit functionals/vectors, by alternation.

    Each such form has injective norm at most 1, so the pairing is a certified
    lower bound for the projective norm.
    """
    X, Y = D.X, D.Y
    A = D.dense()
    if not np.any(A):
        return 0.0, None
    m, n = X.dim, Y.dim
    best, arg = 0.0, None
    inits = []
    # start from the largest term so rank-one tensors are recovered at once
    if len(D):
        t = int(np.argmax([abs(float(c)) * np.abs(R).max() * np.abs(S).max()
                           for c, R, S in zip(D.coeffs, D.Rs, D.Ss)]))
        inits.append(D.Ss[t])
    for k in range(starts):
        inits.append(np.random.default_rng([seed, k]).standard_normal((n, m)))
    for S0 in inits:
        _, x2, g2 = _op_ball_point(S0, X, Y, 8, seed)
        if x2 is None:
            continue
        prev = -INF
        for _ in range(rounds):
            M1 = np.einsum("abcd,c,d->ab", A, g2, x2)
            v1, x1, g1 = _op_ball_point(M1, Y, X, 8, seed)
            if x1 is None:
                break
            M2 = np.einsum("abcd,a,b->cd", A, g1, x1)
            v2, x2n, g2n = _op_ball_point(M2, X, Y, 8, seed)
            if x2n is None:
                break
            x2, g2 = x2n, g2n
            val = abs(float(np.einsum("abcd,a,b,c,d->", A, g1, x1, g2, x2)))
            if val > best:
                best, arg = val, (g1, x1, g2, x2)
            if val <= prev * (1 + 1e-12):
                break
            prev = val
    return best, arg


def contraction_lower(D: TensorDecomposition) -> float:
    """||pi(D)|| bound: g(pi(D) x) with x attaining ||pi(D)|| and g norming pi(D)x."""
    P = contract(D)
    est = operator_norm(P, budget=16)
    x = est.witness.get("x") if est.witness else None
    if x is None or not np.any(P.matrix @ x):
        return float(est.lower) if est.exact else 0.0
    x = np.asarray(x, dtype=float)
    g = D.X.subgradient(P.matrix @ x)
    B = DualForm.contraction(D.X, D.Y, x, g)
    return abs(B.pair(D)) / B.bound if B.bound > 0 else 0.0


def projective_lower(D: TensorDecomposition, forms: Optional[Sequence[DualForm]] = None,
                     budget: int = 8, seed: int = 0) -> float:
    """Weak-duality lower bound max_B <D, B> / ||B||_inj over the given and generated forms."""
    if not np.any(D.dense()):
        return 0.0
    best = contraction_lower(D)
    fl, _ = factorized_lower(D, starts=budget, seed=seed)
    best = max(best, fl)
    for B in forms or ():
        up = float(injective_norm(B, D.X, D.Y, budget=budget, seed=seed).upper)
        if up > 0:
            best = max(best, abs(B.pair(D)) / up)
    return best
