"""Commutative, associative and Barratt-Eccles operads; complete graphs and cells.

Operad elements are plain hashable values carrying their input set:

* commutative word: ``frozenset`` of labels (the commutative word on that set);
* associative basis element: a tuple ordering of the input set;
* Barratt-Eccles simplex: a tuple ``(w_0, ..., w_d)`` of orderings of one set.

Linear combinations are dicts ``basis -> int``; structure constants are
integers, so results over another ring are obtained by reducing coefficients.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping

from enbar.exactlin import Ring, ZZ
from enbar.symseq import BasisElement, FunctionModule, SigmaModule, add_term

__all__ = [
    "Operad",
    "CommutativeOperad",
    "AssociativeOperad",
    "BarrattEccles",
    "commutative_operad",
    "associative_operad",
    "barratt_eccles",
    "simplex_faces",
    "simplex_differential",
    "augmentation_eps",
    "section_iota",
    "homotopy_nu",
    "CompleteGraph",
    "kgraph_leq",
    "kgraph_compose",
    "kgraph_restrict",
    "variations",
    "in_cell",
    "filtration_level",
    "enumerate_en",
    "format_simplex",
    "parse_simplex",
    "format_kgraph",
]


class Operad:
    """Interface shared by the concrete operads below."""

    name = "P"

    def __init__(self, ring: Ring = ZZ, arity_max: int = 4):
        self.ring = ring
        self.arity_max = arity_max

    def inputs(self, p) -> tuple:
        raise NotImplementedError

    def degree(self, p) -> int:
        raise NotImplementedError

    def unit(self, label):
        raise NotImplementedError

    def is_unit(self, p) -> bool:
        return len(self.inputs(p)) == 1 and self.degree(p) == 0

    def compose(self, p, ys: Mapping) -> dict:
        """``p(y_b : b ∈ inputs(p))``, each ``y_b`` plugged into input ``b``."""
        raise NotImplementedError

    def differential(self, p) -> dict:
        return {}

    def relabel(self, m: Mapping, p):
        raise NotImplementedError

    def basis(self, e: tuple) -> list:
        raise NotImplementedError

    def sigma_module(self, arity_max: int | None = None, degree_max: int | None = None) -> SigmaModule:
        def bfn(e):
            return [BasisElement(p, self.degree(p), e) for p in self.basis(e)]

        def rfn(m, x):
            q = self.relabel(m, x.label)
            return {BasisElement(q, x.degree, tuple(sorted(m[i] for i in x.inputs))): 1}

        def dfn(x):
            return {BasisElement(q, x.degree - 1, x.inputs): c for q, c in self.differential(x.label).items()}

        return FunctionModule(
            bfn, rfn, dfn, name=self.name, ring=self.ring,
            arity_max=arity_max or self.arity_max, degree_max=degree_max,
        )


class CommutativeOperad(Operad):
    name = "C"

    def inputs(self, p):
        return tuple(sorted(p))

    def degree(self, p):
        return 0

    def unit(self, label):
        return frozenset((label,))

    def compose(self, p, ys):
        if set(ys) != set(p):
            raise ValueError("composition inputs do not match")
        out = frozenset()
        for y in ys.values():
            out |= y
        return {out: 1}

    def relabel(self, m, p):
        return frozenset(m[i] for i in p)

    def basis(self, e):
        return [frozenset(e)] if e else []


class AssociativeOperad(Operad):
    name = "A"

    def inputs(self, p):
        return tuple(sorted(p))

    def degree(self, p):
        return 0

    def unit(self, label):
        return (label,)

    def compose(self, p, ys):
        if set(ys) != set(p):
            raise ValueError("composition inputs do not match")
        return {tuple(x for b in p for x in ys[b]): 1}

    def relabel(self, m, p):
        return tuple(m[i] for i in p)

    def basis(self, e):
        return list(itertools.permutations(e))


# ---------------------------------------------------------------------------
# Barratt-Eccles


def _nondegenerate(x) -> bool:
    return all(x[i] != x[i + 1] for i in range(len(x) - 1))


def simplex_faces(x):
    """Faces ``(i, face_i x)`` that are nondegenerate."""
    out = []
    for i in range(len(x)):
        f = x[:i] + x[i + 1:]
        if _nondegenerate(f):
            out.append((i, f))
    return out


def simplex_differential(x) -> dict:
    """δ(w_0,...,w_d) = Σ (-1)^i (..ŵ_i..), degenerate faces dropped."""
    out: dict = {}
    if len(x) <= 1:
        return out
    for i, f in simplex_faces(x):
        add_term(out, f, -1 if i % 2 else 1)
    return out


@lru_cache(maxsize=None)
def _multishuffles(dims: tuple) -> tuple:
    """All interleavings of ``dims[k]`` steps of kind k, with their signs."""
    total = sum(dims)
    out = []

    def rec(prefix, left):
        if len(prefix) == total:
            inv = 0
            for a in range(total):
                for b in range(a + 1, total):
                    if prefix[a] > prefix[b]:
                        inv += 1
            out.append((tuple(prefix), -1 if inv % 2 else 1))
            return
        for k, n in enumerate(left):
            if n:
                left2 = list(left)
                left2[k] -= 1
                prefix.append(k)
                rec(prefix, left2)
                prefix.pop()

    rec([], list(dims))
    return tuple(out)


@lru_cache(maxsize=200000)
def _be_compose(x: tuple, keys: tuple, ys: tuple) -> tuple:
    factors = (x,) + ys
    dims = tuple(len(f) - 1 for f in factors)
    slot = {b: k + 1 for k, b in enumerate(keys)}
    out: dict = {}
    for path, sign in _multishuffles(dims):
        idx = [0] * len(factors)
        verts = []
        for step in (None,) + path:
            if step is not None:
                idx[step] += 1
            w = x[idx[0]]
            verts.append(tuple(v for b in w for v in factors[slot[b]][idx[slot[b]]]))
        if _nondegenerate(verts):
            add_term(out, tuple(verts), sign)
    return tuple(sorted(out.items()))


class BarrattEccles(Operad):
    """Normalized chains on EΣ_r; optional cap ``level_max`` restricts to E_n."""

    name = "E"

    def inputs(self, p):
        return tuple(sorted(p[0]))

    def degree(self, p):
        return len(p) - 1

    def unit(self, label):
        return ((label,),)

    def compose(self, p, ys):
        if set(ys) != set(p[0]):
            raise ValueError("composition inputs do not match")
        keys = tuple(sorted(ys))
        return dict(_be_compose(p, keys, tuple(ys[b] for b in keys)))

    def differential(self, p):
        return simplex_differential(p)

    def relabel(self, m, p):
        return tuple(tuple(m[i] for i in w) for w in p)

    def basis(self, e, degree_max: int = 2, level_max: int | None = None):
        e = tuple(sorted(e))
        if level_max is not None:
            m = dict(zip(range(1, len(e) + 1), e))
            return [self.relabel(m, x) for x in enumerate_en(level_max, len(e)) if len(x) - 1 <= degree_max]
        out = []
        perms = list(itertools.permutations(e))
        layer = [(w,) for w in perms]
        for d in range(degree_max + 1):
            out.extend(x for x in layer if level_max is None or filtration_level(x) <= level_max)
            if d == degree_max:
                break
            layer = [x + (w,) for x in layer for w in perms if w != x[-1]]
        return out


def commutative_operad(ring: Ring = ZZ, arity_max: int = 4) -> CommutativeOperad:
    return CommutativeOperad(ring, arity_max)


def associative_operad(ring: Ring = ZZ, arity_max: int = 4) -> AssociativeOperad:
    return AssociativeOperad(ring, arity_max)


def barratt_eccles(ring: Ring = ZZ, arity_max: int = 4, degree_max: int = 2) -> BarrattEccles:
    E = BarrattEccles(ring, arity_max)
    E.degree_max = degree_max
    return E


def augmentation_eps(x: dict) -> dict:
    """ε: degree-0 simplices go to the commutative word, the rest to zero."""
    out: dict = {}
    for p, c in x.items():
        if len(p) == 1:
            add_term(out, frozenset(p[0]), c)
    return out


def section_iota(x: dict) -> dict:
    """ι: commutative word on e ↦ 0-simplex given by the increasing ordering of e."""
    return {(tuple(sorted(w)),): c for w, c in x.items()}


def homotopy_nu(x: tuple, sigma: tuple | None = None) -> dict:
    """ν(w_0..w_d) = (-1)^{d+1} (w_0..w_d, σ), zero when w_d = σ.

    The sign makes δν + νδ = id − ιε hold exactly with faces signed (-1)^i.
    """
    if sigma is None:
        sigma = tuple(sorted(x[0]))
    elif sorted(sigma) != sorted(x[0]):
        raise ValueError(f"ordering {sigma} does not order {sorted(x[0])}")
    if x[-1] == sigma:
        return {}
    return {x + (sigma,): 1 if len(x) % 2 == 0 else -1}


# ---------------------------------------------------------------------------
# complete graphs


@dataclass(frozen=True)
class CompleteGraph:
    """κ = (μ, σ): weights on unordered pairs and a global ordering σ."""

    weights: tuple  # sorted tuple of ((a, b), weight) with a < b
    sigma: tuple

    def __post_init__(self) -> None:
        pairs = [p for p, _ in self.weights]
        want = list(itertools.combinations(sorted(self.sigma), 2))
        if sorted(pairs) != want:
            raise ValueError("weights must be defined on exactly all pairs")

    @classmethod
    def make(cls, weights: Mapping, sigma) -> "CompleteGraph":
        w = {tuple(sorted(p)): v for p, v in weights.items()}
        return cls(tuple(sorted(w.items())), tuple(sigma))

    @classmethod
    def constant(cls, weight: int, sigma) -> "CompleteGraph":
        return cls.make({p: weight for p in itertools.combinations(sorted(sigma), 2)}, sigma)

    @property
    def mu(self) -> dict:
        return dict(self.weights)

    @property
    def inputs(self) -> tuple:
        return tuple(sorted(self.sigma))

    def orient(self, a, b) -> bool:
        """True when σ puts a before b."""
        return self.sigma.index(a) < self.sigma.index(b)


def kgraph_leq(k: CompleteGraph, p: CompleteGraph) -> bool:
    if k.inputs != p.inputs:
        raise ValueError("input-set mismatch")
    mk, mp = k.mu, p.mu
    for (a, b), w in mk.items():
        v = mp[(a, b)]
        if w < v:
            continue
        if w == v and k.orient(a, b) == p.orient(a, b):
            continue
        return False
    return True


def kgraph_restrict(k: CompleteGraph, block) -> CompleteGraph:
    block = set(block)
    return CompleteGraph.make(
        {p: w for p, w in k.mu.items() if p[0] in block and p[1] in block},
        tuple(x for x in k.sigma if x in block),
    )


def kgraph_compose(k: CompleteGraph, pis: Mapping) -> CompleteGraph:
    """κ(π_b : b ∈ inputs(κ)); vertex b of κ is replaced by the graph π_b."""
    if set(pis) != set(k.inputs):
        raise ValueError("one graph per vertex of κ is needed")
    seen: set = set()
    for g in pis.values():
        if seen & set(g.inputs):
            raise ValueError("non-disjoint blocks")
        seen |= set(g.inputs)
    weights: dict = {}
    for g in pis.values():
        weights.update(g.mu)
    km = k.mu
    for b, c in itertools.combinations(sorted(pis), 2):
        for x in pis[b].inputs:
            for y in pis[c].inputs:
                weights[tuple(sorted((x, y)))] = km[(b, c)]
    sigma = tuple(x for b in k.sigma for x in pis[b].sigma)
    return CompleteGraph.make(weights, sigma)


def _pair_orient(w: tuple, a, b) -> bool:
    return w.index(a) < w.index(b)


def variations(x: tuple, a, b) -> int:
    """Number of indices i where w_i and w_{i+1} order {a, b} differently."""
    o = [_pair_orient(w, a, b) for w in x]
    return sum(1 for i in range(len(o) - 1) if o[i] != o[i + 1])


def in_cell(x: tuple, k: CompleteGraph) -> bool:
    if tuple(sorted(x[0])) != k.inputs:
        raise ValueError("input-set mismatch")
    for (a, b), m in k.mu.items():
        v = variations(x, a, b)
        if v < m:
            continue
        if v == m and _pair_orient(x[-1], a, b) == k.orient(a, b):
            continue
        return False
    return True


def filtration_level(x: tuple) -> int:
    e = sorted(x[0])
    return 1 + max((variations(x, a, b) for a, b in itertools.combinations(e, 2)), default=0)


@lru_cache(maxsize=None)
def enumerate_en(n: int, r: int) -> tuple:
    """All nondegenerate simplices of E_n({1..r}), sorted by (degree, simplex)."""
    e = tuple(range(1, r + 1))
    perms = list(itertools.permutations(e))
    pairs = list(itertools.combinations(e, 2))
    pos = {w: {x: i for i, x in enumerate(w)} for w in perms}
    flip = {
        (u, w): tuple(1 if (pos[u][a] < pos[u][b]) != (pos[w][a] < pos[w][b]) else 0 for a, b in pairs)
        for u in perms for w in perms
    }
    out = []
    stack = [((w,), (0,) * len(pairs)) for w in perms]
    while stack:
        x, counts = stack.pop()
        out.append(x)
        for w in perms:
            if w == x[-1]:
                continue
            c2 = tuple(c + f for c, f in zip(counts, flip[(x[-1], w)]))
            if max(c2, default=0) <= n - 1:
                stack.append((x + (w,), c2))
    return tuple(sorted(out, key=lambda s: (len(s), s)))


# ---------------------------------------------------------------------------
# text encodings


def _word(w: tuple) -> str:
    if all(isinstance(v, int) and 0 <= v <= 9 for v in w):
        return "".join(str(v) for v in w)
    return ",".join(str(v) for v in w)


def format_simplex(x: tuple) -> str:
    return "[" + "|".join(_word(w) for w in x) + "]"


def parse_simplex(s: str) -> tuple:
    s = s.strip()
    if not (s.startswith("[") and s.endswith("]")):
        raise ValueError(f"not a simplex encoding: {s!r}")
    out = []
    for part in s[1:-1].split("|"):
        if "," in part:
            out.append(tuple(int(v) for v in part.split(",")))
        else:
            out.append(tuple(int(v) for v in part))
    return tuple(out)


def format_kgraph(k: CompleteGraph) -> str:
    items = []
    for (a, b), w in k.weights:
        items.append(f"{_word((a, b))}:{w}{'>' if k.orient(a, b) else '<'}")
    return "{" + ",".join(items) + "} sigma=(" + _word(k.sigma) + ")"
