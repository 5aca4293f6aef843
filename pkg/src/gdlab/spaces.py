"""Finite-dimensional normed spaces with a distinguished basis.

Every space knows its norm, a norming functional (``subgradient``), its dual
norm and a dual attainer.  Where the unit ball or the dual ball is a polytope
with a manageable number of vertices the vertices are exposed, which is what
makes exact operator norms possible downstream.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import HalfspaceIntersection

from .estimate import Estimate
from .tsirelson import norm as tsn

INF = math.inf
MAX_VERTICES = 2 ** 16
MAX_EXHAUSTIVE_SIGNS = 16


class DimensionMismatch(ValueError):
    pass


def _parse_p(p) -> float:
    if isinstance(p, str):
        p = INF if p.lower() in ("inf", "infinity", "oo") else float(p)
    p = float(p)
    if not (p >= 1):
        raise ValueError(f"p must lie in [1, inf], got {p}")
    return p


def conjugate(p: float) -> float:
    if p == 1:
        return INF
    if p == INF:
        return 1.0
    return p / (p - 1.0)


def _is_object(x) -> bool:
    return isinstance(x, np.ndarray) and x.dtype == object


def _vec(x, dim: int) -> np.ndarray:
    if isinstance(x, Vector):
        x = x.coords
    arr = np.asarray(x)
    if arr.dtype != object:
        arr = arr.astype(float)
    if arr.shape != (dim,):
        raise DimensionMismatch(f"expected a vector of length {dim}, got shape {arr.shape}")
    return arr


def sign_vectors(n: int) -> np.ndarray:
    return np.array(list(itertools.product((1.0, -1.0), repeat=n))).reshape(-1, n)


class SpaceSpec:
    """Base class.  Subclasses are frozen dataclasses."""

    dim: int

    # --- to override -------------------------------------------------
    def norm(self, x):
        raise NotImplementedError

    def subgradient(self, x) -> np.ndarray:
        """A functional g in the dual ball with <g, x> = ||x||."""
        raise NotImplementedError

    def dual_estimate(self, f) -> Estimate:
        raise NotImplementedError

    def dual_attainer(self, f) -> np.ndarray:
        """A vector x in the unit ball with <f, x> = ||f||_*."""
        raise NotImplementedError

    def extreme_points(self) -> Optional[np.ndarray]:
        return None

    def dual_extreme_points(self) -> Optional[np.ndarray]:
        return None

    @property
    def unconditional(self) -> bool:
        return False

    @property
    def norm_exact(self) -> bool:
        return True

    @property
    def dual_exact(self) -> bool:
        return True

    @property
    def cheap_dual(self) -> bool:
        """Whether ``dual_attainer`` is closed form (no LP)."""
        return True

    def to_json(self) -> dict:
        raise NotImplementedError

    def leading(self, n: int) -> "SpaceSpec":
        """The span of the first n basis vectors with the induced norm."""
        raise NotImplementedError(f"{type(self).__name__} has no leading-subspace rule")

    # --- shared ------------------------------------------------------
    def dual_norm(self, f) -> float:
        return self.dual_estimate(f).value

    def norm_estimate(self, x) -> Estimate:
        return Estimate.exactly(self.norm(x))

    def norm_many(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        return np.array([float(self.norm(row)) for row in X])

    def simplify(self) -> "SpaceSpec":
        return self

    def json(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


@dataclass(frozen=True)
class Lp(SpaceSpec):
    dim: int
    p: float = 2.0

    def __post_init__(self):
        if int(self.dim) < 1:
            raise ValueError("dimension must be positive")
        object.__setattr__(self, "dim", int(self.dim))
        object.__setattr__(self, "p", _parse_p(self.p))

    @property
    def q(self) -> float:
        return conjugate(self.p)

    @property
    def unconditional(self) -> bool:
        return True

    def norm(self, x):
        x = _vec(x, self.dim)
        if _is_object(x) and self.p in (1, INF):
            absx = [abs(a) for a in x]
            return sum(absx, Fraction(0)) if self.p == 1 else max(absx)
        return float(np.linalg.norm(x.astype(float), ord=self.p))

    def norm_many(self, X):
        X = np.asarray(X, dtype=float)
        return np.linalg.norm(X, ord=self.p, axis=-1)

    def subgradient(self, x):
        x = _vec(x, self.dim).astype(float)
        return _lp_subgradient(x, self.p)

    def dual_estimate(self, f):
        f = _vec(f, self.dim)
        return Estimate.exactly(Lp(self.dim, self.q).norm(f))

    def dual_attainer(self, f):
        f = _vec(f, self.dim).astype(float)
        return _lp_subgradient(f, self.q)

    def extreme_points(self):
        n = self.dim
        if self.p == 1 or n == 1:
            eye = np.eye(n)
            return np.vstack([eye, -eye])
        if self.p == INF and 2 ** n <= MAX_VERTICES:
            return sign_vectors(n)
        return None

    def dual_extreme_points(self):
        return Lp(self.dim, self.q).extreme_points()

    def leading(self, n):
        return Lp(n, self.p)

    def to_json(self):
        return {"kind": "lp", "dim": self.dim, "p": "inf" if self.p == INF else self.p}

    def __str__(self):
        p = "inf" if self.p == INF else f"{self.p:g}"
        return f"l_{p}^{self.dim}"


def _lp_subgradient(x: np.ndarray, p: float) -> np.ndarray:
    n = np.linalg.norm(x, ord=p)
    if n == 0:
        return np.zeros_like(x)
    if p == 1:
        return np.sign(x)
    if p == INF:
        g = np.zeros_like(x)
        i = int(np.argmax(np.abs(x)))
        g[i] = np.sign(x[i])
        return g
    return np.sign(x) * (np.abs(x) / n) ** (p - 1)


@dataclass(frozen=True)
class ESum(SpaceSpec):
    """``(X_1 + ... + X_k)_E``: norm of the vector of block norms in E."""

    outer: SpaceSpec
    inners: tuple = ()

    def __post_init__(self):
        inners = tuple(self.inners)
        object.__setattr__(self, "inners", inners)
        if self.outer.dim != len(inners):
            raise DimensionMismatch(f"outer space has dim {self.outer.dim} but {len(inners)} blocks were given")
        if not self.outer.unconditional:
            raise ValueError("the outer space of an e-sum needs a 1-unconditional basis")
        if not inners:
            raise ValueError("an e-sum needs at least one block")

    @cached_property
    def offsets(self) -> tuple[int, ...]:
        return tuple(np.cumsum([0] + [s.dim for s in self.inners]).tolist())

    @property
    def dim(self) -> int:
        return self.offsets[-1]

    def block(self, k: int) -> slice:
        """Coordinate slice of the k-th block (0-based)."""
        return slice(self.offsets[k], self.offsets[k + 1])

    def split(self, x):
        return [x[self.block(k)] for k in range(len(self.inners))]

    @property
    def unconditional(self) -> bool:
        return all(s.unconditional for s in self.inners)

    @property
    def norm_exact(self):
        return self.outer.norm_exact and all(s.norm_exact for s in self.inners)

    @property
    def dual_exact(self):
        return self.outer.dual_exact and all(s.dual_exact for s in self.inners)

    @property
    def cheap_dual(self):
        return self.outer.cheap_dual and all(s.cheap_dual for s in self.inners)

    def _inner_norms(self, x):
        vals = [s.norm(part) for s, part in zip(self.inners, self.split(x))]
        if all(isinstance(v, Fraction) for v in vals):
            return np.array(vals, dtype=object)
        return np.array([float(v) for v in vals])

    def norm(self, x):
        x = _vec(x, self.dim)
        return self.outer.norm(self._inner_norms(x))

    def subgradient(self, x):
        x = _vec(x, self.dim).astype(float)
        c = np.abs(self.outer.subgradient(self._inner_norms(x).astype(float)))
        return np.concatenate([ck * s.subgradient(part) for ck, s, part in zip(c, self.inners, self.split(x))])

    def dual_estimate(self, f):
        f = _vec(f, self.dim).astype(float)
        parts = [s.dual_estimate(part) for s, part in zip(self.inners, self.split(f))]
        lo = self.outer.dual_estimate(np.array([e.lower for e in parts]))
        hi = self.outer.dual_estimate(np.array([e.upper for e in parts]))
        val = self.outer.dual_estimate(np.array([e.value for e in parts]))
        exact = lo.exact and hi.exact and all(e.exact for e in parts)
        return Estimate(val.value, lo.lower, hi.upper, exact)

    def dual_attainer(self, f):
        f = _vec(f, self.dim).astype(float)
        duals = np.array([s.dual_norm(part) for s, part in zip(self.inners, self.split(f))])
        u = np.abs(self.outer.dual_attainer(duals))
        return np.concatenate([uk * s.dual_attainer(part) for uk, s, part in zip(u, self.inners, self.split(f))])

    def _embedded(self, k, pts):
        out = np.zeros((len(pts), self.dim))
        out[:, self.block(k)] = pts
        return out

    def _vertex_union(self, getter):
        pieces = []
        for k, s in enumerate(self.inners):
            pts = getter(s)
            if pts is None:
                return None
            pieces.append(self._embedded(k, pts))
        return np.vstack(pieces)

    def _vertex_product(self, getter):
        pts = [getter(s) for s in self.inners]
        if any(p is None for p in pts):
            return None
        if math.prod(len(p) for p in pts) > MAX_VERTICES:
            return None
        return np.array([np.concatenate(c) for c in itertools.product(*pts)])

    def _outer_kind(self):
        o = self.outer
        if isinstance(o, Lp):
            if o.p == 1 or o.dim == 1:
                return "l1"
            if o.p == INF:
                return "linf"
        return None

    def extreme_points(self):
        kind = self._outer_kind()
        if kind == "l1":
            return self._vertex_union(lambda s: s.extreme_points())
        if kind == "linf":
            return self._vertex_product(lambda s: s.extreme_points())
        return None

    def dual_extreme_points(self):
        kind = self._outer_kind()
        if kind == "l1":
            return self._vertex_product(lambda s: s.dual_extreme_points())
        if kind == "linf":
            return self._vertex_union(lambda s: s.dual_extreme_points())
        return None

    def leading(self, n):
        if n == self.dim:
            return self
        full = [k for k in range(len(self.inners)) if self.offsets[k + 1] <= n]
        inners = [self.inners[k] for k in full]
        rest = n - (self.offsets[len(full)])
        if rest:
            inners.append(self.inners[len(full)].leading(rest))
        return ESum(self.outer.leading(len(inners)), tuple(inners))

    def to_json(self):
        return {"kind": "esum", "outer": self.outer.to_json(), "inners": [s.to_json() for s in self.inners]}

    def __str__(self):
        return f"({', '.join(map(str, self.inners))})_{self.outer}"


@dataclass(frozen=True)
class TsirelsonTrunc(SpaceSpec):
    """span(t_1, ..., t_max_index) inside T^(p)."""

    p: float = 1.0
    max_index: int = 1
    admissibility: str = "nonstrict"

    def __post_init__(self):
        object.__setattr__(self, "p", _parse_p(self.p))
        if self.p == INF:
            raise ValueError("T^(p) is defined for finite p")
        if int(self.max_index) < 1:
            raise ValueError("max_index must be positive")
        object.__setattr__(self, "max_index", int(self.max_index))

    @property
    def dim(self) -> int:
        return self.max_index

    @property
    def unconditional(self) -> bool:
        return True

    @property
    def polyhedral(self) -> bool:
        return self.p == 1 and self.dim <= 10

    @property
    def dual_exact(self):
        return self.polyhedral

    @property
    def cheap_dual(self):
        return self.polyhedral and self.dim <= 8

    def _fs(self, x):
        return tsn.FinSupp({i + 1: a for i, a in enumerate(x)}, p=self.p)

    def norm(self, x):
        x = _vec(x, self.dim)
        if _is_object(x) and self.p == 1:
            return tsn.tp_norm(self._fs(x), 1, self.admissibility, exact=True)
        return float(tsn.tp_norm(self._fs(x.astype(float)), self.p, self.admissibility, exact=False))

    def norm_many(self, X):
        # ||x|| = max over tree weights w of (sum w_n |a_n|^p)^(1/p); the weight set is small for dim <= 8
        if self.dim > 8:
            return super().norm_many(X)
        A = np.abs(np.asarray(X, dtype=float).reshape(-1, self.dim)) ** self.p
        return (A @ self._weights.T).max(axis=1) ** (1.0 / self.p)

    def subgradient(self, x):
        x = _vec(x, self.dim).astype(float)
        val, w, support = tsn.tp_weights(self._fs(x), self.p, self.admissibility)
        g = np.zeros(self.dim)
        if val == 0:
            return g
        idx = np.array(support) - 1
        a = x[idx]
        if self.p == 1:
            g[idx] = w * np.sign(a)
        else:
            g[idx] = val ** (1 - self.p) * w * np.abs(a) ** (self.p - 1) * np.sign(a)
        return g

    @cached_property
    def _weights(self) -> np.ndarray:
        W = tsn.tstar_weight_vectors(self.dim, self.admissibility)
        return np.array([[float(a) for a in w] for w in W])

    def dual_estimate(self, f):
        f = _vec(f, self.dim).astype(float)
        V = self.extreme_points()
        if V is not None:
            i = int(np.argmax(V @ f))
            return Estimate(float(V[i] @ f), float(V[i] @ f), float(V[i] @ f), True, V[i].copy())
        return cutting_plane_dual(self, f)

    def dual_attainer(self, f):
        f = _vec(f, self.dim).astype(float)
        if self.polyhedral:
            V = self.extreme_points()
            if V is not None:
                return V[int(np.argmax(V @ f))].copy()
        return cutting_plane_dual(self, f).witness

    @cached_property
    def _vertices(self) -> Optional[np.ndarray]:
        if not self.polyhedral:
            return None
        return polytope_vertices(self._weights, self.dim)

    def extreme_points(self):
        return self._vertices

    def dual_extreme_points(self):
        if not self.polyhedral:
            return None
        return _all_sign_patterns(self._weights)

    def leading(self, n):
        return TsirelsonTrunc(self.p, n, self.admissibility)

    def to_json(self):
        return {"kind": "tsirelson", "p": self.p, "max_index": self.max_index, "admissibility": self.admissibility}

    def __str__(self):
        return f"T({self.p:g})_{self.max_index}"


def _all_sign_patterns(P: np.ndarray) -> Optional[np.ndarray]:
    """Every coordinate sign pattern of the rows of a nonnegative point set."""
    rows = []
    count = 0
    for w in P:
        supp = np.flatnonzero(w)
        count += 2 ** len(supp)
        if count > MAX_VERTICES:
            return None
        for signs in itertools.product((1.0, -1.0), repeat=len(supp)):
            v = np.zeros_like(w)
            v[supp] = w[supp] * np.array(signs)
            rows.append(v)
    return np.unique(np.array(rows), axis=0)


def polytope_vertices(W: np.ndarray, dim: int) -> Optional[np.ndarray]:
    """Vertices of ``{x : sum_i W[r, i] |x_i| <= 1 for every r}`` (W >= 0)."""
    if dim == 1:
        top = W.max()
        return np.array([[1.0 / top], [-1.0 / top]])
    halfspaces = np.vstack([
        np.hstack([W, -np.ones((len(W), 1))]),
        np.hstack([-np.eye(dim), np.zeros((dim, 1))]),
    ])
    eps = 0.5 / max(W.sum(axis=1).max(), 1.0)
    hs = HalfspaceIntersection(halfspaces, np.full(dim, eps))
    pts = np.where(np.abs(hs.intersections) < 1e-12, 0.0, hs.intersections)
    pts = np.unique(np.round(pts, 12), axis=0)
    return _all_sign_patterns(pts)


@dataclass(frozen=True)
class Dual(SpaceSpec):
    of: SpaceSpec = None

    @property
    def dim(self):
        return self.of.dim

    @property
    def unconditional(self):
        return self.of.unconditional

    @property
    def norm_exact(self):
        return self.of.dual_exact

    @property
    def dual_exact(self):
        return self.of.norm_exact

    @property
    def cheap_dual(self):
        return True

    def norm(self, x):
        return self.of.dual_norm(x)

    def norm_estimate(self, x):
        return self.of.dual_estimate(x)

    def subgradient(self, x):
        return self.of.dual_attainer(x)

    def dual_estimate(self, f):
        return self.of.norm_estimate(f)

    def dual_attainer(self, f):
        return self.of.subgradient(f)

    def extreme_points(self):
        return self.of.dual_extreme_points()

    def dual_extreme_points(self):
        return self.of.extreme_points()

    def simplify(self):
        if isinstance(self.of, Dual):
            # X** = X; avoids rounding in p -> q -> p
            return self.of.of.simplify()
        inner = self.of.simplify()
        if isinstance(inner, Dual):
            return inner.of
        if isinstance(inner, Lp):
            return Lp(inner.dim, inner.q)
        if isinstance(inner, ESum):
            return ESum(Dual(inner.outer).simplify(), tuple(Dual(s).simplify() for s in inner.inners))
        return Dual(inner)

    def leading(self, n):
        return Dual(self.of.leading(n))

    def to_json(self):
        return {"kind": "dual", "of": self.of.to_json()}

    def __str__(self):
        return f"({self.of})*"


@dataclass(frozen=True, eq=False)
class Custom(SpaceSpec):
    """A user-supplied norm.

    Either ``functionals`` (rows g_r, norm ``max_r |<g_r, x>|``, serializable and
    exact) or an ``oracle`` callable with an optional ``gradient`` callable.
    """

    dim: int
    functionals: Optional[np.ndarray] = None
    oracle: Optional[Callable] = None
    gradient: Optional[Callable] = None
    declared_unconditional: bool = False
    box: float = 1e6

    def __post_init__(self):
        if (self.functionals is None) == (self.oracle is None):
            raise ValueError("give exactly one of functionals or oracle")
        if self.functionals is not None:
            F = np.atleast_2d(np.asarray(self.functionals, dtype=float))
            if F.shape[1] != self.dim:
                raise DimensionMismatch("functionals must have dim columns")
            if np.linalg.matrix_rank(F) < self.dim:
                raise ValueError("functionals do not separate points; not a norm")
            F.setflags(write=False)
            object.__setattr__(self, "functionals", F)

    @property
    def unconditional(self):
        return self.declared_unconditional

    @property
    def dual_exact(self):
        return self.functionals is not None

    @property
    def cheap_dual(self):
        return False

    def norm(self, x):
        x = _vec(x, self.dim).astype(float)
        if self.functionals is not None:
            return float(np.max(np.abs(self.functionals @ x)))
        return float(self.oracle(x))

    def subgradient(self, x):
        x = _vec(x, self.dim).astype(float)
        if self.functionals is not None:
            vals = self.functionals @ x
            r = int(np.argmax(np.abs(vals)))
            return np.sign(vals[r]) * self.functionals[r]
        if self.gradient is not None:
            return np.asarray(self.gradient(x), dtype=float)
        return _numeric_gradient(self.oracle, x)

    def dual_estimate(self, f):
        f = _vec(f, self.dim).astype(float)
        if self.functionals is not None:
            x = _polyhedral_lp(self.functionals, f)
            val = float(f @ x)
            return Estimate(val, val, val, True, x)
        return cutting_plane_dual(self, f, box=self.box)

    def dual_attainer(self, f):
        f = _vec(f, self.dim).astype(float)
        if self.functionals is not None:
            return _polyhedral_lp(self.functionals, f)
        return cutting_plane_dual(self, f, box=self.box).witness

    def extreme_points(self):
        if self.functionals is None:
            return None
        if self.dim == 1:
            top = np.abs(self.functionals).max()
            return np.array([[1 / top], [-1 / top]])
        F = self.functionals
        hs = HalfspaceIntersection(np.vstack([np.hstack([F, -np.ones((len(F), 1))]),
                                              np.hstack([-F, -np.ones((len(F), 1))])]), np.zeros(self.dim))
        pts = np.unique(np.round(hs.intersections, 12), axis=0)
        return pts if len(pts) <= MAX_VERTICES else None

    def dual_extreme_points(self):
        if self.functionals is None:
            return None
        return np.vstack([self.functionals, -self.functionals])

    def to_json(self):
        if self.functionals is None:
            raise TypeError("oracle-backed custom spaces cannot be serialized")
        return {"kind": "custom", "dim": self.dim, "functionals": self.functionals.tolist(),
                "unconditional": self.declared_unconditional}

    def __str__(self):
        return f"custom^{self.dim}"


def _numeric_gradient(fun, x, h=1e-7):
    g = np.zeros_like(x)
    scale = max(1.0, float(np.max(np.abs(x))))
    for i in range(len(x)):
        e = np.zeros_like(x)
        e[i] = h * scale
        g[i] = (fun(x + e) - fun(x - e)) / (2 * h * scale)
    return g


def _polyhedral_lp(F, f):
    A = np.vstack([F, -F])
    res = linprog(-f, A_ub=A, b_ub=np.ones(len(A)), bounds=[(None, None)] * len(f), method="highs")
    if res.status != 0:
        raise RuntimeError(f"dual LP failed: {res.message}")
    return res.x


def cutting_plane_dual(space: SpaceSpec, f: np.ndarray, tol: float = 1e-10, max_iter: int = 400,
                       box: float = 1.0) -> Estimate:
    """sup{<f,x> : ||x|| <= 1} by outer linearization with norming functionals.

    Each cut <g, x> <= 1 with g a subgradient is valid for the unit ball, so the
    LP value is an upper bound; the rescaled LP solution gives a lower bound.
    ``box`` bounds |x_i| on the ball (1 for normalized 1-unconditional bases).
    """
    n = space.dim
    if not np.any(f):
        return Estimate(0.0, 0.0, 0.0, True, np.zeros(n))
    cuts = []
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        cuts.append(space.subgradient(e) / max(space.norm(e), 1e-300))
        cuts.append(space.subgradient(-e) / max(space.norm(e), 1e-300))
    lower, best_x, upper = 0.0, np.zeros(n), INF
    for _ in range(max_iter):
        A = np.array(cuts)
        res = linprog(-f, A_ub=A, b_ub=np.ones(len(A)), bounds=[(-box, box)] * n, method="highs")
        if res.status != 0:
            break
        x = res.x
        upper = min(upper, float(f @ x))
        nx = float(space.norm(x))
        if nx > 0:
            cand = float(f @ x) / max(nx, 1.0)
            if cand > lower:
                lower, best_x = cand, x / max(nx, 1.0)
        if upper - lower <= tol * max(1.0, abs(upper)):
            break
        g = space.subgradient(x)
        gx = float(g @ x)
        if gx <= 0:
            break
        cuts.append(g / (gx / nx) if nx > 0 else g)
    exact = upper - lower <= 1e-9 * max(1.0, abs(upper))
    return Estimate(lower, lower, upper, exact, best_x)


# ---------------------------------------------------------------------------
# vectors and module-level operations


@dataclass(frozen=True)
class Vector:
    coords: tuple
    space: SpaceSpec

    def __post_init__(self):
        coords = tuple(self.coords)
        if len(coords) != self.space.dim:
            raise DimensionMismatch(f"vector of length {len(coords)} does not live in a {self.space.dim}-dim space")
        object.__setattr__(self, "coords", coords)

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=object if any(isinstance(c, Fraction) for c in self.coords) else float)

    def to_json(self) -> list[str]:
        return vector_to_json(self.coords)


def vector_to_json(coords) -> list[str]:
    return [str(c) if isinstance(c, (Fraction, int)) else repr(float(c)) for c in coords]


def vector_from_json(items: Sequence[str], exact: bool = False):
    if exact:
        return np.array([Fraction(str(s)) for s in items], dtype=object)
    return np.array([float(Fraction(str(s))) if "/" in str(s) else float(s) for s in items])


def space_from_json(obj) -> SpaceSpec:
    if isinstance(obj, str):
        obj = json.loads(obj)
    kind = obj["kind"]
    if kind == "lp":
        return Lp(obj["dim"], obj.get("p", 2))
    if kind == "esum":
        return ESum(space_from_json(obj["outer"]), tuple(space_from_json(s) for s in obj["inners"]))
    if kind == "tsirelson":
        return TsirelsonTrunc(obj.get("p", 1), obj["max_index"], obj.get("admissibility", "nonstrict"))
    if kind == "dual":
        return Dual(space_from_json(obj["of"]))
    if kind == "custom":
        return Custom(obj["dim"], functionals=np.array(obj["functionals"], dtype=float),
                      declared_unconditional=bool(obj.get("unconditional", False)))
    raise ValueError(f"unknown space kind {kind!r}")


def _coords(space, v):
    if isinstance(v, Vector):
        if v.space != space and v.space.dim != space.dim:
            raise DimensionMismatch("vector belongs to a different space")
        return v.array
    return _vec(v, space.dim)


def norm(space: SpaceSpec, v):
    return space.norm(_coords(space, v))


def dual_norm(space: SpaceSpec, f) -> Estimate:
    return space.dual_estimate(_coords(space, f))


def random_unit_vector(space: SpaceSpec, seed: int = 0) -> Vector:
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(space.dim)
    while not np.any(x):
        x = rng.standard_normal(space.dim)
    return Vector(tuple(x / float(space.norm(x))), space)


def unconditional_constant(space: SpaceSpec, budget: int = 64, seed: int = 0, exhaustive: bool = True) -> float:
    """Largest ratio ||sum e_i a_i x_i|| / ||sum a_i x_i|| found; a lower bound
    for the unconditional constant of the basis."""
    n = space.dim
    if exhaustive and n > MAX_EXHAUSTIVE_SIGNS:
        raise ValueError(f"exhaustive sign enumeration needs dim <= {MAX_EXHAUSTIVE_SIGNS}")
    rng = np.random.default_rng(seed)
    signs = sign_vectors(n) if exhaustive else rng.choice((-1.0, 1.0), size=(256, n))
    coeffs = [np.ones(n)] + [rng.standard_normal(n) for _ in range(budget)]
    if n >= 2:
        coeffs += [np.eye(n)[0] + np.eye(n)[i] for i in range(1, n)]
    best = 1.0
    for a in coeffs:
        base = float(space.norm(a))
        if base == 0:
            continue
        vals = space.norm_many(signs * a)
        best = max(best, float(vals.max()) / base)
    return best


def cotype2_ratio(space: SpaceSpec, vectors) -> float:
    vs = [_coords(space, v).astype(float) for v in vectors]
    n = len(vs)
    if n == 0:
        raise ValueError("need at least one vector")
    if n > MAX_EXHAUSTIVE_SIGNS:
        raise ValueError(f"at most {MAX_EXHAUSTIVE_SIGNS} vectors")
    V = np.array(vs)
    top = math.sqrt(sum(float(space.norm(v)) ** 2 for v in vs))
    avg = float(space.norm_many(sign_vectors(n) @ V).mean())
    if avg == 0:
        return INF
    return top / avg


def banach_mazur_upper(X: SpaceSpec, Y: SpaceSpec, budget: int = 32, seed: int = 0) -> Estimate:
    """Best ||T|| ||T^-1|| over a seeded multi-start search; an upper bound for d(X, Y)."""
    from .operators import banach_mazur_search

    return banach_mazur_search(X, Y, budget, seed)
