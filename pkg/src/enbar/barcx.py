"""Level words, the iterated bar complex of a commutative algebra, and ∂_γ.

A level word of level 0 is a leaf (an input label or an algebra element); a
level word of level n is a nonempty tuple of level-(n-1) words, the tensor
factors of T^c(Σ T^{n-1}). A word in T^n = (T^cΣ)^n(I) is canonical (a
generator) when its leaves read 1, 2, ..., r from left to right.

Composites of T^n∘R are stored flat as ``(g, ps)``: a canonical word ``g`` of
arity k and a tuple of k operad elements, the i-th attached to the i-th leaf.
The differentials of the bar construction use the standard signs

    d[x_1|...|x_d] = Σ_i (-1)^{ε_{i-1}+1} [..|d x_i|..] + Σ_i (-1)^{ε_i} [..|x_i x_{i+1}|..]

with ε_i = Σ_{j≤i} (|x_j| + 1).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable

from enbar.exactlin import Ring, ZZ
from enbar.operads import CommutativeOperad, CompleteGraph, Operad, in_cell, kgraph_restrict
from enbar.symseq import Bijection, add_term, ordered_set_partitions

__all__ = [
    "word_degree",
    "word_leaves",
    "map_leaves",
    "words",
    "generators",
    "is_canonical",
    "canonicalize",
    "relabel_word",
    "format_word",
    "parse_word",
    "build_Tn",
    "shuffle_product",
    "deconcatenate",
    "CommutativeAlgebra",
    "IteratedBar",
    "SIGMA_C",
    "build_gamma",
    "in_tn_cell",
    "minimal_cell",
    "composite_in_cell",
    "composite_degree",
    "suspend_word",
    "harrison_complex",
    "TwistingHom",
]


# ---------------------------------------------------------------------------
# level words


def word_degree(w, n: int, leaf_degree: Callable[[object], int] | None = None) -> int:
    if n == 0:
        return leaf_degree(w) if leaf_degree else 0
    return len(w) + sum(word_degree(f, n - 1, leaf_degree) for f in w)


def word_leaves(w, n: int) -> list:
    if n == 0:
        return [w]
    out = []
    for f in w:
        out.extend(word_leaves(f, n - 1))
    return out


def map_leaves(w, n: int, f: Callable):
    if n == 0:
        return f(w)
    return tuple(map_leaves(x, n - 1, f) for x in w)


@lru_cache(maxsize=None)
def words(n: int, e: tuple) -> tuple:
    """All level-n words with leaf set ``e``."""
    if n == 0:
        return (e[0],) if len(e) == 1 else ()
    out = []
    for blocks in ordered_set_partitions(tuple(sorted(e))):
        for combo in itertools.product(*(words(n - 1, b) for b in blocks)):
            out.append(tuple(combo))
    return tuple(sorted(out, key=lambda w: format_word(w, n)))


@lru_cache(maxsize=None)
def generators(n: int, r: int, offset: int = 0) -> tuple:
    """Canonical words of level n on {offset+1, ..., offset+r}."""
    if n == 0:
        return (offset + 1,) if r == 1 else ()
    out = []

    def rec(start, remaining, prefix):
        if remaining == 0:
            out.append(tuple(prefix))
            return
        for size in range(1, remaining + 1):
            for f in generators(n - 1, size, start):
                prefix.append(f)
                rec(start + size, remaining - size, prefix)
                prefix.pop()

    rec(offset, r, [])
    return tuple(sorted(out, key=lambda w: format_word(w, n)))


def is_canonical(w, n: int) -> bool:
    return word_leaves(w, n) == list(range(1, len(word_leaves(w, n)) + 1))


def canonicalize(w, n: int):
    """``w = sign · relabel(u, g)`` with g canonical.

    Relabeling only renames leaves and never moves a tensor factor, so the
    sign is always +1 in this encoding.
    """
    leaves = word_leaves(w, n)
    pos = {l: i + 1 for i, l in enumerate(leaves)}
    g = map_leaves(w, n, lambda l: pos[l])
    return g, Bijection.from_values(leaves), 1


def relabel_word(w, n: int, u) -> object:
    m = u.mapping if isinstance(u, Bijection) else dict(u)
    return map_leaves(w, n, lambda l: m[l])


def format_word(w, n: int) -> str:
    if n == 0:
        return str(w)
    return "".join("(" + format_word(f, n - 1) + ")" for f in w)


def parse_word(s: str):
    """Parse the bracket encoding; returns ``(word, level)``."""
    s = s.strip()

    def parse_seq(i):
        items = []
        while i < len(s) and s[i] == "(":
            j = i + 1
            if s[j].isdigit():
                k = j
                while s[k].isdigit():
                    k += 1
                if s[k] != ")":
                    raise ValueError(f"bad word encoding {s!r}")
                items.append((int(s[j:k]), 0))
                i = k + 1
            else:
                sub, j2 = parse_seq(j)
                if s[j2] != ")":
                    raise ValueError(f"bad word encoding {s!r}")
                items.append(sub)
                i = j2 + 1
        if not items:
            raise ValueError(f"bad word encoding {s!r}")
        levels = {lv for _, lv in items}
        if len(levels) != 1:
            raise ValueError(f"mixed levels in {s!r}")
        return (tuple(x for x, _ in items), levels.pop() + 1), i

    (w, lv), end = parse_seq(0)
    if end != len(s):
        raise ValueError(f"trailing characters in {s!r}")
    return w, lv


def build_Tn(n: int, arity_max: int, ring: Ring = ZZ):
    """The Σ_*-module T^n as a SigmaModule (zero differential, relabeling without signs)."""
    from enbar.symseq import BasisElement, FunctionModule

    def bfn(e):
        return [BasisElement(w, word_degree(w, n), e) for w in words(n, e)]

    def rfn(m, x):
        return {BasisElement(relabel_word(x.label, n, m), x.degree, tuple(sorted(m.values()))): 1}

    return FunctionModule(bfn, rfn, None, name=f"T^{n}", ring=ring, arity_max=arity_max)


def suspend_word(w):
    """Single-factor embedding ΣT^{n-1} → T^n."""
    return (w,)


# ---------------------------------------------------------------------------
# shuffle product and deconcatenation on tensor sequences


def shuffle_product(x: tuple, y: tuple, factor_degree: Callable[[object], int]) -> dict:
    """Shuffles of the factor sequences x, y with Koszul signs on suspended degrees.

    ``factor_degree`` returns the degree of a factor before suspension.
    """
    dx = [factor_degree(f) + 1 for f in x]
    dy = [factor_degree(f) + 1 for f in y]
    p, q = len(x), len(y)
    out: dict = {}
    for pos in itertools.combinations(range(p + q), p):
        pset = set(pos)
        seq, sign, ix, iy = [], 0, 0, 0
        for t in range(p + q):
            if t in pset:
                # x-factor jumps over the y-factors already placed
                sign += dx[ix] * sum(dy[:iy])
                seq.append(x[ix])
                ix += 1
            else:
                seq.append(y[iy])
                iy += 1
        add_term(out, tuple(seq), -1 if sign % 2 else 1)
    return out


def deconcatenate(x: tuple) -> list[tuple[tuple, tuple]]:
    """Proper splits of the top-level factor sequence."""
    return [(x[:i], x[i:]) for i in range(1, len(x))]


# ---------------------------------------------------------------------------
# the iterated bar complex of a commutative algebra


class CommutativeAlgebra:
    """Interface: graded commutative algebra with basis, product and differential."""

    def degree(self, a) -> int:
        return 0

    def product(self, a, b) -> dict:
        raise NotImplementedError

    def differential(self, a) -> dict:
        return {}


class _SigmaC(CommutativeAlgebra):
    """The commutative operad as an algebra in Σ_*-modules: frozensets, product = union."""

    def product(self, a, b):
        return {a | b: 1}


SIGMA_C = _SigmaC()


class IteratedBar:
    """B^n(A) with A commutative; products at level ≥ 1 are shuffle products."""

    def __init__(self, algebra: CommutativeAlgebra):
        self.A = algebra
        self._deg: dict = {}

    def degree(self, w, n: int) -> int:
        if n == 0:
            return self.A.degree(w)
        key = (w, n)
        d = self._deg.get(key)
        if d is None:
            d = len(w) + sum(self.degree(f, n - 1) for f in w)
            self._deg[key] = d
        return d

    def product(self, x, y, n: int) -> dict:
        if n == 0:
            return self.A.product(x, y)
        return shuffle_product(x, y, lambda f: self.degree(f, n - 1))

    def differential(self, w, n: int) -> dict:
        if n == 0:
            return self.A.differential(w)
        out: dict = {}
        eps = 0
        for i, f in enumerate(w):
            s_int = -1 if (eps + 1) % 2 else 1
            for f2, c in self.differential(f, n - 1).items():
                add_term(out, w[:i] + (f2,) + w[i + 1:], s_int * c)
            eps += self.degree(f, n - 1) + 1
            if i + 1 < len(w):
                s = -1 if eps % 2 else 1
                for m, c in self.product(f, w[i + 1], n - 1).items():
                    add_term(out, w[:i] + (m,) + w[i + 2:], s * c)
        return out

    def linear_differential(self, v: dict, n: int) -> dict:
        out: dict = {}
        for w, c in v.items():
            for w2, c2 in self.differential(w, n).items():
                add_term(out, w2, c * c2)
        return out


def _nested_to_flat(w, n: int) -> tuple:
    """Nested word with operad-element leaves → flat ``(g, ps)``; for degree-0 leaves."""
    leaves = word_leaves(w, n)
    it = iter(range(1, len(leaves) + 1))
    g = map_leaves(w, n, lambda _l: next(it))
    return g, tuple(leaves)


@dataclass
class TwistingHom:
    """α: G^n → T^n∘R as a table generator → {(g', ps): coefficient}."""

    n: int
    operad: Operad
    table: dict

    def __call__(self, g) -> dict:
        return self.table.get(g, {})

    def to_json(self) -> str:
        import json

        from enbar.operads import format_simplex

        def enc_p(p):
            if isinstance(p, frozenset):
                return "c{" + "".join(str(v) for v in sorted(p)) + "}"
            if isinstance(p, tuple) and p and isinstance(p[0], tuple):
                return format_simplex(p)
            return str(p)

        doc = {}
        for g in sorted(self.table, key=lambda g: format_word(g, self.n)):
            terms = []
            for (h, ps), c in self.table[g].items():
                terms.append([c, format_word(h, self.n), [enc_p(p) for p in ps]])
            terms.sort(key=lambda t: (t[1], t[2], t[0]))
            doc[format_word(g, self.n)] = terms
        return json.dumps({"n": self.n, "operad": self.operad.name, "table": doc}, sort_keys=True, indent=1)


def build_gamma(n: int, arity_max: int, ring: Ring = ZZ) -> TwistingHom:
    """∂_γ on G^n(r), r ≤ arity_max: the bar differential of B^n(C) on unit leaves."""
    bar = IteratedBar(SIGMA_C)
    table = {}
    for r in range(1, arity_max + 1):
        for g in generators(n, r):
            w = map_leaves(g, n, lambda l: frozenset((l,)))
            out: dict = {}
            for w2, c in bar.differential(w, n).items():
                add_term(out, _nested_to_flat(w2, n), c)
            table[g] = out
    return TwistingHom(n, CommutativeOperad(ring, arity_max), table)


def composite_degree(x: tuple, n: int, operad: Operad) -> int:
    g, ps = x
    return word_degree(g, n) + sum(operad.degree(p) for p in ps)


# ---------------------------------------------------------------------------
# cells of T^n and of T^n∘R


def _leafset(w, n):
    return set(word_leaves(w, n))


def in_tn_cell(w, n: int, k: CompleteGraph) -> bool:
    """Membership of a level word in (T^n)_κ by the three inductive conditions."""
    if n == 0:
        return True
    blocks = [_leafset(f, n - 1) for f in w]
    where = {l: i for i, b in enumerate(blocks) for l in b}
    mu = k.mu
    for (a, b), m in mu.items():
        ia, ib = where[a], where[b]
        if ia == ib:
            continue
        if m < n - 1:
            return False
        if m == n - 1 and k.orient(a, b) != (ia < ib):
            return False
    return all(in_tn_cell(f, n - 1, kgraph_restrict(k, blocks[i])) for i, f in enumerate(w))


def minimal_cell(w, n: int, sigma: tuple | None = None) -> CompleteGraph:
    """Least κ = (μ, σ) with w ∈ (T^n)_κ, σ the increasing order unless given."""
    leaves = word_leaves(w, n)
    sigma = tuple(sorted(leaves)) if sigma is None else sigma
    weights = {}

    def sep(word, level, a, b):
        # level at which a and b fall into different factors, and whether a comes first
        blocks = [_leafset(f, level - 1) for f in word]
        ia = next(i for i, bl in enumerate(blocks) if a in bl)
        ib = next(i for i, bl in enumerate(blocks) if b in bl)
        if ia == ib:
            return sep(word[ia], level - 1, a, b)
        return level, ia < ib

    for a, b in itertools.combinations(sorted(leaves), 2):
        level, a_first = sep(w, n, a, b)
        agrees = a_first == (sigma.index(a) < sigma.index(b))
        weights[(a, b)] = level - 1 if agrees else level
    return CompleteGraph.make(weights, sigma)


def composite_in_cell(x: tuple, n: int, k: CompleteGraph, operad: Operad) -> bool:
    """Membership of a flat composite in (T^n∘R)_κ.

    Needs each attached element in the restricted cell and some θ with
    g ∈ (T^n)_θ and θ(κ|e_1, ..., κ|e_k) ≤ κ. For each global ordering of the
    leaf positions, the largest admissible θ is tested (cells are monotone).
    """
    g, ps = x
    blocks = [operad.inputs(p) for p in ps]
    if isinstance(ps[0], tuple) and ps and isinstance(ps[0][0], tuple):
        for p, b in zip(ps, blocks):
            if not in_cell(p, kgraph_restrict(k, b)):
                return False
    kk = len(ps)
    if kk == 1:
        return True
    mu = k.mu
    for order in itertools.permutations(range(1, kk + 1)):
        weights = {}
        ok = True
        for i, j in itertools.combinations(range(1, kk + 1), 2):
            i_first = order.index(i) < order.index(j)
            cross = [(a, b) for a in blocks[i - 1] for b in blocks[j - 1]]
            m = min(mu[tuple(sorted(p))] for p in cross)
            agree = all(
                k.orient(a, b) == i_first for a, b in cross if mu[tuple(sorted((a, b)))] == m
            )
            w = m if agree else m - 1
            if w < 0:
                ok = False
                break
            weights[(i, j)] = w
        if ok and in_tn_cell(g, n, CompleteGraph.make(weights, order)):
            return True
    return False


# ---------------------------------------------------------------------------
# Harrison complex


def harrison_complex(r: int, algebra_basis: Callable[[tuple], Iterable] | None = None,
                     algebra: CommutativeAlgebra | None = None):
    """Indecomposable quotient of B(A)(r) by shuffle products, for a Σ_*-algebra A.

    Returns ``(basis_by_degree, differential, relations_by_degree)`` where the
    relations span the shuffle image; the quotient is taken by evalhom.
    """
    algebra = algebra or SIGMA_C
    algebra_basis = algebra_basis or (lambda e: [frozenset(e)])
    bar = IteratedBar(algebra)
    e = tuple(range(1, r + 1))

    def bar_basis(e):
        out = []
        for blocks in ordered_set_partitions(e):
            for combo in itertools.product(*(algebra_basis(b) for b in blocks)):
                out.append(tuple(combo))
        return out

    basis: dict[int, list] = {}
    for w in bar_basis(e):
        basis.setdefault(bar.degree(w, 1), []).append(w)
    relations: dict[int, list] = {}
    for k in range(1, r):
        for u in itertools.combinations(e, k):
            if 1 not in u:
                continue  # graded commutativity makes the other order redundant
            v = tuple(x for x in e if x not in u)
            for x in bar_basis(u):
                for y in bar_basis(v):
                    rel = bar.product(x, y, 1)
                    if rel:
                        relations.setdefault(bar.degree(x, 1) + bar.degree(y, 1), []).append(rel)
    for d in basis:
        basis[d].sort(key=repr)
    return basis, (lambda w: bar.differential(w, 1)), relations
