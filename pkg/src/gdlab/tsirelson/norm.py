"""Exact Tsirelson-type norms on finitely supported sequences.

The norm of ``x = sum a_n t_n`` is the least fixed point of

    v(x) = max(max_n |a_n|, 1/2 * max sum_j v(E_j x))

over admissible families ``{k} <= E_1 < ... < E_k``.  Because every level
norm is 1-unconditional, ``v(E x)`` only grows when ``E`` is enlarged, so
each block may be replaced by its interval hull (taken on the support) and
the family by a contiguous partition that starts at the first admissible
support point.  That turns the recursion into an O(s^4) interval DP.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

Number = Union[int, float, Fraction]

MAX_SUPPORT = 24
ADMISSIBILITY = ("nonstrict", "strict")


class SupportTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class FinSupp:
    """Finitely supported coefficients over the basis ``t_1, t_2, ...``.

    ``entries`` maps a 1-based index to its coefficient.  Zero entries are
    dropped on construction.
    """

    entries: Mapping[int, Number] = field(default_factory=dict)
    p: float = 1.0

    def __post_init__(self):
        clean = {}
        for n, a in dict(self.entries).items():
            n = int(n)
            if n < 1:
                raise ValueError(f"basis indices start at 1, got {n}")
            if a != 0:
                clean[n] = a
        object.__setattr__(self, "entries", dict(sorted(clean.items())))
        if self.p < 1:
            raise ValueError(f"p must be >= 1, got {self.p}")

    @classmethod
    def from_coeffs(cls, coeffs: Sequence[Number], p: float = 1.0, start: int = 1) -> "FinSupp":
        return cls({start + i: a for i, a in enumerate(coeffs)}, p=p)

    @classmethod
    def basis(cls, n: int, p: float = 1.0) -> "FinSupp":
        return cls({n: 1}, p=p)

    @property
    def support(self) -> list[int]:
        return list(self.entries)

    @property
    def is_rational(self) -> bool:
        return all(isinstance(a, Rational) for a in self.entries.values())

    def restrict(self, indices: Iterable[int]) -> "FinSupp":
        keep = set(indices)
        return FinSupp({n: a for n, a in self.entries.items() if n in keep}, p=self.p)

    def to_dense(self, length: int | None = None) -> list[Number]:
        top = max(self.entries, default=0)
        length = top if length is None else length
        if top > length:
            raise ValueError(f"support reaches index {top} > {length}")
        out: list[Number] = [0] * length
        for n, a in self.entries.items():
            out[n - 1] = a
        return out

    def __len__(self) -> int:
        return len(self.entries)


def as_finsupp(x, p: float = 1.0) -> FinSupp:
    if isinstance(x, FinSupp):
        return x
    if isinstance(x, Mapping):
        return FinSupp(x, p=p)
    return FinSupp.from_coeffs(list(x), p=p)


def _check_admissibility(admissibility: str) -> int:
    if admissibility not in ADMISSIBILITY:
        raise ValueError(f"admissibility must be one of {ADMISSIBILITY}")
    return 0 if admissibility == "nonstrict" else 1


def _prepare(x: FinSupp, exact: bool | None, limit: int = MAX_SUPPORT):
    if len(x) > limit:
        raise SupportTooLarge(f"support size {len(x)} exceeds {limit}")
    if exact is None:
        exact = x.is_rational
    idx = list(x.entries)
    if exact:
        vals = [abs(Fraction(a)) for a in x.entries.values()]
    else:
        vals = [abs(float(a)) for a in x.entries.values()]
    return idx, vals, exact


def _half(v, exact):
    return v / 2 if exact else 0.5 * v


def _interval_dp(idx: list[int], vals: list, exact: bool, strict: int):
    """Fill ``v[c][b]``, the norm of x restricted to support positions c..b.

    ``how[c][b]`` is ``("coord", pos)`` or ``("split", [(c1, e1), ...])``.
    """
    s = len(idx)
    zero = Fraction(0) if exact else 0.0
    v = [[zero] * s for _ in range(s)]
    how: list[list] = [[None] * s for _ in range(s)]
    for b in range(s):
        # P[k][c]: best sum over partitions of [c..b] into k intervals,
        # with its last-cut positions to rebuild the family.
        P = [[None] * (s + 1) for _ in range(b + 2)]
        cut = [[None] * (s + 1) for _ in range(b + 2)]
        # best admissible P[k][c'] over c' >= c, kept per k
        Q = [None] * (b + 2)
        Qat = [None] * (b + 2)
        top_pos = b
        for c in range(b, -1, -1):
            if vals[c] > vals[top_pos]:
                top_pos = c
            for k in range(2, b - c + 2):
                best = None
                best_e = None
                for e in range(c, b):
                    rest = P[k - 1][e + 1]
                    if rest is None:
                        continue
                    cand = v[c][e] + rest
                    if best is None or cand > best:
                        best, best_e = cand, e
                P[k][c] = best
                cut[k][c] = best_e
                if best is not None and idx[c] >= k + strict:
                    if Q[k] is None or best > Q[k]:
                        Q[k], Qat[k] = best, c
            val = vals[top_pos]
            choice = ("coord", top_pos)
            for k in range(2, b + 2):
                if Q[k] is None:
                    continue
                cand = _half(Q[k], exact)
                if cand > val:
                    val = cand
                    choice = ("split", _unroll(k, Qat[k], b, cut))
            v[c][b] = val
            how[c][b] = choice
            P[1][c] = val
    return v, how


def _unroll(k: int, c: int, b: int, cut) -> list[tuple[int, int]]:
    blocks = []
    while k > 1:
        e = cut[k][c]
        blocks.append((c, e))
        c, k = e + 1, k - 1
    blocks.append((c, b))
    return blocks


@dataclass(frozen=True)
class NormWitness:
    """Value together with the admissible tree that attains it."""

    value: Number
    tree: tuple
    weights: dict[int, Number]
    exact: bool

    def describe(self) -> object:
        return _tree_json(self.tree)


def _tree_json(node):
    if node[0] == "coord":
        return {"t": node[1]}
    return {"half": [_tree_json(ch) for ch in node[1]]}


def _build_tree(c, b, how, idx, exact):
    kind, data = how[c][b]
    if kind == "coord":
        one = Fraction(1) if exact else 1.0
        return ("coord", idx[data]), {idx[data]: one}
    children = []
    weights: dict[int, Number] = {}
    for (c1, e1) in data:
        node, w = _build_tree(c1, e1, how, idx, exact)
        children.append(node)
        for n, a in w.items():
            weights[n] = weights.get(n, 0) + _half(a, exact)
    return ("split", tuple(children)), weights


def tstar_witness(x, admissibility: str = "nonstrict", exact: bool | None = None) -> NormWitness:
    x = as_finsupp(x)
    strict = _check_admissibility(admissibility)
    idx, vals, exact = _prepare(x, exact)
    if not idx:
        zero = Fraction(0) if exact else 0.0
        return NormWitness(zero, ("split", ()), {}, exact)
    v, how = _interval_dp(idx, vals, exact, strict)
    tree, weights = _build_tree(0, len(idx) - 1, how, idx, exact)
    return NormWitness(v[0][-1], tree, weights, exact)


def tstar_norm(x, admissibility: str = "nonstrict", exact: bool | None = None) -> Number:
    """Norm of ``x`` in the dual Tsirelson space T*.

    Rational input gives an exact ``Fraction``; pass ``exact=False`` to force
    floating point.
    """
    return tstar_witness(x, admissibility, exact).value


def tstar_level(x, m: int, admissibility: str = "nonstrict", exact: bool | None = None) -> Number:
    """The m-th level norm ``||x||_m`` of the defining recursion."""
    if m < 0:
        raise ValueError("level must be >= 0")
    x = as_finsupp(x)
    strict = _check_admissibility(admissibility)
    idx, vals, exact = _prepare(x, exact)
    zero = Fraction(0) if exact else 0.0
    s = len(idx)
    if s == 0:
        return zero
    # level 0: sup norm on every interval
    v = [[zero] * s for _ in range(s)]
    for c in range(s):
        run = zero
        for b in range(c, s):
            run = max(run, vals[b])
            v[c][b] = run
    for _ in range(m):
        nxt = [[zero] * s for _ in range(s)]
        for b in range(s):
            P = [[None] * (s + 1) for _ in range(b + 2)]
            for c in range(b, -1, -1):
                P[1][c] = v[c][b]
            Q = [None] * (b + 2)
            for c in range(b, -1, -1):
                for k in range(2, b - c + 2):
                    best = None
                    for e in range(c, b):
                        rest = P[k - 1][e + 1]
                        if rest is not None:
                            cand = v[c][e] + rest
                            if best is None or cand > best:
                                best = cand
                    P[k][c] = best
                # k = 1 is kept here: it never wins but the definition allows it
                for k in range(1, b - c + 2):
                    val = P[k][c]
                    if val is not None and idx[c] >= k + strict:
                        if Q[k] is None or val > Q[k]:
                            Q[k] = val
                best = v[c][b]
                for k in range(1, b + 2):
                    if Q[k] is not None:
                        best = max(best, _half(Q[k], exact))
                nxt[c][b] = best
        v = nxt
    return v[0][s - 1]


def _power(x: FinSupp, p: float) -> FinSupp:
    if p == 1:
        return FinSupp({n: abs(a) for n, a in x.entries.items()})
    return FinSupp({n: abs(float(a)) ** p for n, a in x.entries.items()})


def tp_norm(x, p: float = 1.0, admissibility: str = "nonstrict", exact: bool | None = None) -> Number:
    """Norm in the p-convexification ``T^(p)``: ``||sum |a_n|^p t_n||^(1/p)``."""
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    x = as_finsupp(x, p)
    if p == 1:
        return tstar_norm(_power(x, 1), admissibility, exact)
    if exact:
        raise ValueError("exact mode is only available for p = 1")
    return float(tstar_norm(_power(x, p), admissibility, exact=False)) ** (1.0 / p)


def tp_weights(x, p: float = 1.0, admissibility: str = "nonstrict") -> tuple[float, np.ndarray, list[int]]:
    """Value, attaining weight vector and support of the T^(p) norm.

    The norm equals ``(sum_n w_n |a_n|^p)^(1/p)`` for the returned weights and
    dominates that expression for every other admissible tree.
    """
    x = as_finsupp(x, p)
    wit = tstar_witness(_power(x, p), admissibility, exact=False)
    support = x.support
    w = np.array([float(wit.weights.get(n, 0.0)) for n in support])
    return float(wit.value) ** (1.0 / p), w, support


def _interval_families(positions: int, idx: list[int], strict: int):
    """Yield families of contiguous position intervals that satisfy admissibility."""
    for start in range(positions):
        for k in range(1, positions - start + 1):
            if idx[start] < k + strict:
                continue
            yield from _partitions(start, positions - 1, k)


def _partitions(c: int, b: int, k: int):
    if k == 1:
        yield [(c, b)]
        return
    for e in range(c, b - k + 2):
        for rest in _partitions(e + 1, b, k - 1):
            yield [(c, e)] + rest


def fixed_point_rhs(x, p: float = 1.0, admissibility: str = "nonstrict", exact: bool | None = None,
                    limit: int = 20) -> Number:
    """Right-hand side of the T^(p) fixed-point equation, with the top level
    enumerated explicitly and every block norm obtained from ``tp_norm``."""
    x = as_finsupp(x, p)
    strict = _check_admissibility(admissibility)
    if len(x) > limit:
        raise SupportTooLarge(f"support size {len(x)} exceeds {limit}")
    idx = x.support
    if exact is None:
        exact = p == 1 and x.is_rational
    if exact and p != 1:
        raise ValueError("exact mode is only available for p = 1")
    if not idx:
        return Fraction(0) if exact else 0.0
    conv = (lambda a: abs(Fraction(a))) if exact else (lambda a: abs(float(a)))
    sup = max(conv(a) for a in x.entries.values())

    @lru_cache(maxsize=None)
    def block(c: int, e: int):
        val = tp_norm(x.restrict(idx[c:e + 1]), p, admissibility, exact=exact if p == 1 else None)
        return val if p == 1 else float(val) ** p

    s = len(idx)
    # best[k][c]: max sum of block values over partitions of [c..s-1] into k intervals
    best = {}
    for c in range(s - 1, -1, -1):
        best[(1, c)] = block(c, s - 1)
        for k in range(2, s - c + 1):
            best[(k, c)] = max(block(c, e) + best[(k - 1, e + 1)] for e in range(c, s - k + 1))
    inner = None
    for (k, c), val in best.items():
        if idx[c] >= k + strict and (inner is None or val > inner):
            inner = val
    if inner is None:
        return sup
    if p == 1:
        return max(sup, _half(inner, exact))
    return max(float(sup), (0.5 * inner) ** (1.0 / p))


def fixed_point_residual(x, p: float = 1.0, admissibility: str = "nonstrict",
                         exact: bool | None = None) -> Number:
    """``|LHS - RHS|`` of the T^(p) fixed-point identity; exactly 0 for rational p = 1."""
    x = as_finsupp(x, p)
    if exact is None:
        exact = p == 1 and x.is_rational
    lhs = tp_norm(x, p, admissibility, exact=exact if p == 1 else None)
    rhs = fixed_point_rhs(x, p, admissibility, exact)
    return abs(lhs - rhs)


def _prune(vectors: set[tuple]) -> set[tuple]:
    """Drop weight vectors dominated coordinatewise by another one."""
    vs = sorted(vectors, key=lambda w: -sum(w))
    kept: list[tuple] = []
    for w in vs:
        if not any(all(a <= b for a, b in zip(w, u)) for u in kept):
            kept.append(w)
    return set(kept)


@lru_cache(maxsize=None)
def tstar_weight_vectors(dim: int, admissibility: str = "nonstrict") -> tuple[tuple[Fraction, ...], ...]:
    """Maximal tree weights ``w >= 0`` with ``||x|| = max_w sum w_n |a_n|`` on span(t_1..t_dim).

    Every admissible tree contributes ``1/2 * sum`` of its children's weights;
    leaves are unit vectors.  Only coordinatewise-maximal vectors are kept.
    """
    strict = _check_admissibility(admissibility)
    zero, half = Fraction(0), Fraction(1, 2)

    def unit(i):
        w = [zero] * dim
        w[i] = Fraction(1)
        return tuple(w)

    W: dict[tuple[int, int], set[tuple]] = {}
    for length in range(1, dim + 1):
        for c in range(0, dim - length + 1):
            b = c + length - 1
            out = {unit(i) for i in range(c, b + 1)}
            for k in range(2, length + 1):
                start = max(c, k + strict - 1)
                if b - start + 1 < k:
                    continue
                for parts in _partitions(start, b, k):
                    combos = {tuple([zero] * dim)}
                    for (c1, e1) in parts:
                        combos = {tuple(a + half * u for a, u in zip(acc, w)) for acc in combos for w in W[(c1, e1)]}
                    out |= combos
            W[(c, b)] = _prune(out)
    return tuple(sorted(W[(0, dim - 1)], reverse=True))
