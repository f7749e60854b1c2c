"""Σ_*-modules: functors from finite sets and bijections to graded modules.

Every module is connected (nothing in arity 0) and truncated by a maximal
arity and, optionally, a maximal degree. Basis elements carry their input
set; a relabeling acts by a bijection defined on that input set.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Hashable, Iterator

from enbar.exactlin import Ring, ZZ

__all__ = [
    "FiniteSet",
    "Bijection",
    "BasisElement",
    "Element",
    "SigmaModule",
    "UnitModule",
    "CommutativeModule",
    "AssociativeModule",
    "LieModule",
    "FunctionModule",
    "tensor_product",
    "composition_product",
    "suspend",
    "operadic_suspend",
    "relabel",
    "symmetry",
    "graded_dims",
    "set_partitions",
    "ordered_set_partitions",
    "perm_sign",
    "add_term",
]

FiniteSet = tuple  # strictly increasing tuple of labels


def add_term(acc: dict, key, c: int) -> None:
    """acc[key] += c, dropping zeros."""
    v = acc.get(key, 0) + c
    if v:
        acc[key] = v
    else:
        acc.pop(key, None)


def perm_sign(seq) -> int:
    """Sign of the permutation sorting ``seq`` (distinct comparable items)."""
    s = 1
    seq = list(seq)
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                s = -s
    return s


def koszul_sign(degrees, order) -> int:
    """Sign of moving graded symbols of the given degrees into ``order``.

    ``order[t]`` is the index of the symbol placed in position ``t``.
    """
    s = 0
    for a in range(len(order)):
        for b in range(a + 1, len(order)):
            if order[a] > order[b]:
                s += degrees[order[a]] * degrees[order[b]]
    return -1 if s % 2 else 1


@lru_cache(maxsize=None)
def set_partitions(e: tuple) -> tuple[tuple[tuple, ...], ...]:
    """Unordered partitions of ``e`` into nonempty blocks, blocks sorted by minima."""
    if not e:
        return ((),)
    first, rest = e[0], e[1:]
    out = []
    for k in range(len(rest) + 1):
        for others in itertools.combinations(rest, k):
            block = (first,) + others
            remaining = tuple(x for x in rest if x not in others)
            for p in set_partitions(remaining):
                out.append((block,) + p)
    return tuple(out)


@lru_cache(maxsize=None)
def ordered_set_partitions(e: tuple) -> tuple[tuple[tuple, ...], ...]:
    """Ordered partitions of ``e`` into nonempty blocks."""
    out = []
    for p in set_partitions(e):
        for perm in itertools.permutations(p):
            out.append(perm)
    return tuple(sorted(out))


@dataclass(frozen=True)
class Bijection:
    """A bijection ``source[i] -> target[i]`` between finite sets of labels."""

    source: tuple
    target: tuple

    def __post_init__(self) -> None:
        if len(self.source) != len(self.target) or len(set(self.target)) != len(self.target):
            raise ValueError("not a bijection")

    @classmethod
    def from_values(cls, values) -> "Bijection":
        """The bijection ``{1..r} -> e`` given by its sequence of values."""
        values = tuple(values)
        return cls(tuple(range(1, len(values) + 1)), values)

    @property
    def mapping(self) -> dict:
        return dict(zip(self.source, self.target))

    def __call__(self, x):
        return self.mapping[x]

    def then(self, other: "Bijection") -> "Bijection":
        """``other ∘ self``."""
        m = other.mapping
        return Bijection(self.source, tuple(m[t] for t in self.target))

    def inverse(self) -> "Bijection":
        return Bijection(self.target, self.source)

    def sign(self) -> int:
        """Sign relative to the increasing orderings of source and target."""
        m = self.mapping
        return perm_sign([m[s] for s in sorted(self.source)])


@dataclass(frozen=True)
class BasisElement:
    label: Hashable
    degree: int
    inputs: tuple

    @property
    def arity(self) -> int:
        return len(self.inputs)


Element = dict  # BasisElement -> coefficient


def _as_map(u) -> dict:
    if isinstance(u, Bijection):
        return u.mapping
    return dict(u)


class SigmaModule:
    """Base class. Subclasses implement ``_basis``, ``_relabel`` and ``_differential``."""

    name = "M"

    def __init__(self, ring: Ring = ZZ, arity_max: int = 4, degree_max: int | None = None):
        self.ring = ring
        self.arity_max = arity_max
        self.degree_max = degree_max

    def basis(self, inputs) -> list[BasisElement]:
        e = tuple(sorted(inputs))
        if not e or len(e) > self.arity_max:
            return []
        out = self._basis(e)
        if self.degree_max is not None:
            out = [b for b in out if b.degree <= self.degree_max]
        return out

    def basis_arity(self, r: int) -> list[BasisElement]:
        return self.basis(tuple(range(1, r + 1)))

    def relabel(self, u, x: BasisElement) -> Element:
        m = _as_map(u)
        if set(m) != set(x.inputs):
            raise ValueError(f"bijection defined on {sorted(m)} but inputs are {x.inputs}")
        return self._relabel(m, x)

    def differential(self, x: BasisElement) -> Element:
        return self._differential(x)

    def _basis(self, e: tuple) -> list[BasisElement]:
        raise NotImplementedError

    def _relabel(self, m: dict, x: BasisElement) -> Element:
        raise NotImplementedError

    def _differential(self, x: BasisElement) -> Element:
        return {}

    def apply_linear(self, f: Callable[[BasisElement], Element], v: Element) -> Element:
        out: dict = {}
        for b, c in v.items():
            for b2, c2 in f(b).items():
                add_term(out, b2, c * c2)
        return out


def relabel(M: SigmaModule, u, x: Element) -> Element:
    """Relabel a linear combination."""
    return M.apply_linear(lambda b: M.relabel(u, b), x)


def graded_dims(M: SigmaModule, r: int) -> dict[int, int]:
    out: dict[int, int] = {}
    for b in M.basis_arity(r):
        out[b.degree] = out.get(b.degree, 0) + 1
    return dict(sorted(out.items()))


class UnitModule(SigmaModule):
    """The unit I: one element of degree 0 in arity 1."""

    name = "I"

    def _basis(self, e):
        return [BasisElement("1", 0, e)] if len(e) == 1 else []

    def _relabel(self, m, x):
        return {BasisElement("1", 0, (m[x.inputs[0]],)): 1}


class CommutativeModule(SigmaModule):
    """One element of degree 0 in every positive arity, trivial action."""

    name = "C"

    def _basis(self, e):
        return [BasisElement("c", 0, e)]

    def _relabel(self, m, x):
        return {BasisElement("c", 0, tuple(sorted(m[i] for i in x.inputs))): 1}


class AssociativeModule(SigmaModule):
    """Orderings of the input set, degree 0."""

    name = "A"

    def _basis(self, e):
        return [BasisElement(w, 0, e) for w in itertools.permutations(e)]

    def _relabel(self, m, x):
        return {BasisElement(tuple(m[i] for i in x.label), 0, tuple(sorted(m[i] for i in x.inputs))): 1}


def _bracket_words(word: tuple) -> dict[tuple, int]:
    """Expansion of the left-normed bracket [[w1,w2],...,wk] into words."""
    acc: dict[tuple, int] = {(word[0],): 1}
    for a in word[1:]:
        nxt: dict[tuple, int] = {}
        for w, c in acc.items():
            add_term(nxt, w + (a,), c)
            add_term(nxt, (a,) + w, -c)
        acc = nxt
    return acc


class LieModule(SigmaModule):
    """Multilinear Lie words; basis = left-normed brackets starting with the minimum.

    A Lie polynomial is recovered from the coefficients of its words starting
    with the minimal label, which makes relabeling a coefficient read-off.
    """

    name = "L"

    def _basis(self, e):
        first, rest = e[0], e[1:]
        return [BasisElement((first,) + p, 0, e) for p in itertools.permutations(rest)]

    def _relabel(self, m, x):
        target = tuple(sorted(m[i] for i in x.inputs))
        lo = target[0]
        out: dict = {}
        for w, c in _bracket_words(tuple(m[i] for i in x.label)).items():
            if w[0] == lo:
                add_term(out, BasisElement(w, 0, target), c)
        return out


class FunctionModule(SigmaModule):
    """A module given by callables; used to wrap operads."""

    def __init__(self, basis_fn, relabel_fn, differential_fn=None, name="M", **kw):
        super().__init__(**kw)
        self._b = basis_fn
        self._r = relabel_fn
        self._d = differential_fn
        self.name = name

    def _basis(self, e):
        return self._b(e)

    def _relabel(self, m, x):
        return self._r(m, x)

    def _differential(self, x):
        return self._d(x) if self._d else {}


# ---------------------------------------------------------------------------
# products


def _check_ring(M: SigmaModule, N: SigmaModule) -> None:
    if M.ring != N.ring:
        raise ValueError(f"ring mismatch: {M.ring} vs {N.ring}")


class _Tensor(SigmaModule):
    def __init__(self, M, N):
        _check_ring(M, N)
        super().__init__(M.ring, min(M.arity_max, N.arity_max))
        self.M, self.N = M, N
        self.name = f"({M.name}⊗{N.name})"

    def _basis(self, e):
        out = []
        for k in range(1, len(e)):
            for u in itertools.combinations(e, k):
                v = tuple(x for x in e if x not in u)
                for x in self.M.basis(u):
                    for y in self.N.basis(v):
                        out.append(BasisElement(("⊗", x, y), x.degree + y.degree, e))
        return out

    def _relabel(self, m, z):
        _, x, y = z.label
        out: dict = {}
        e = tuple(sorted(m[i] for i in z.inputs))
        for x2, a in self.M.relabel({i: m[i] for i in x.inputs}, x).items():
            for y2, b in self.N.relabel({i: m[i] for i in y.inputs}, y).items():
                add_term(out, BasisElement(("⊗", x2, y2), z.degree, e), a * b)
        return out

    def _differential(self, z):
        _, x, y = z.label
        out: dict = {}
        for x2, a in self.M.differential(x).items():
            add_term(out, BasisElement(("⊗", x2, y), z.degree - 1, z.inputs), a)
        s = -1 if x.degree % 2 else 1
        for y2, b in self.N.differential(y).items():
            add_term(out, BasisElement(("⊗", x, y2), z.degree - 1, z.inputs), s * b)
        return out


def tensor_product(M: SigmaModule, N: SigmaModule) -> SigmaModule:
    """(M⊗N)(e) = ⊕ over u ⊔ v = e of M(u)⊗N(v)."""
    return _Tensor(M, N)


def symmetry(z: BasisElement) -> Element:
    """τ: M⊗N → N⊗M with the Koszul sign."""
    _, x, y = z.label
    s = -1 if (x.degree * y.degree) % 2 else 1
    return {BasisElement(("⊗", y, x), z.degree, z.inputs): s}


class _Composite(SigmaModule):
    def __init__(self, M, N):
        _check_ring(M, N)
        super().__init__(M.ring, min(M.arity_max, N.arity_max))
        self.M, self.N = M, N
        self.name = f"({M.name}∘{N.name})"

    def _basis(self, e):
        out = []
        for blocks in set_partitions(e):
            r = len(blocks)
            xs = self.M.basis(tuple(range(1, r + 1)))
            if not xs:
                continue
            ys = [self.N.basis(b) for b in blocks]
            for x in xs:
                for combo in itertools.product(*ys):
                    deg = x.degree + sum(y.degree for y in combo)
                    out.append(BasisElement(("∘", x, combo), deg, e))
        return out

    def _relabel(self, m, z):
        _, x, ys = z.label
        e = tuple(sorted(m[i] for i in z.inputs))
        new_blocks = [tuple(sorted(m[i] for i in y.inputs)) for y in ys]
        order = sorted(range(len(ys)), key=lambda i: new_blocks[i][0])
        pos = {old: t + 1 for t, old in enumerate(order)}
        sign = koszul_sign([y.degree for y in ys], order)
        out: dict = {}
        xs = self.M.relabel({i: pos[i - 1] for i in range(1, len(ys) + 1)}, x)
        ylists = [list(self.N.relabel({i: m[i] for i in ys[old].inputs}, ys[old]).items()) for old in order]
        for x2, a in xs.items():
            for combo in itertools.product(*ylists):
                c = sign * a
                for _, b in combo:
                    c *= b
                add_term(out, BasisElement(("∘", x2, tuple(y for y, _ in combo)), z.degree, e), c)
        return out

    def _differential(self, z):
        _, x, ys = z.label
        out: dict = {}
        for x2, a in self.M.differential(x).items():
            add_term(out, BasisElement(("∘", x2, ys), z.degree - 1, z.inputs), a)
        acc = x.degree
        for i, y in enumerate(ys):
            s = -1 if acc % 2 else 1
            for y2, b in self.N.differential(y).items():
                new = ys[:i] + (y2,) + ys[i + 1:]
                add_term(out, BasisElement(("∘", x, new), z.degree - 1, z.inputs), s * b)
            acc += y.degree
        return out


def composition_product(M: SigmaModule, N: SigmaModule) -> SigmaModule:
    """Reduced expansion of M∘N: composites x(y_1,...,y_r), blocks sorted by minima."""
    if N.basis(()):
        raise ValueError("composition_product needs a connected right factor")
    return _Composite(M, N)


class _Suspension(SigmaModule):
    def __init__(self, M, k, operadic=False):
        super().__init__(M.ring, M.arity_max)
        self.M, self.k, self.operadic = M, k, operadic
        self.name = f"{'Λ' if operadic else 'Σ'}^{k}{M.name}"

    def _shift(self, r):
        return self.k * (1 - r) if self.operadic else self.k

    def _wrap(self, x):
        return BasisElement((self.name, x), x.degree + self._shift(x.arity), x.inputs)

    def _basis(self, e):
        return [self._wrap(x) for x in self.M.basis(e)]

    def _relabel(self, m, z):
        x = z.label[1]
        s = Bijection(tuple(m), tuple(m.values())).sign() ** self.k if self.operadic else 1
        return {self._wrap(y): s * c for y, c in self.M.relabel(m, x).items()}

    def _differential(self, z):
        x = z.label[1]
        s = -1 if self._shift(x.arity) % 2 else 1
        return {self._wrap(y): s * c for y, c in self.M.differential(x).items()}


def suspend(M: SigmaModule, k: int) -> SigmaModule:
    """Σ^k M; suspending back by -k returns an isomorphic copy with the same labels."""
    if isinstance(M, _Suspension) and not M.operadic and M.k == -k:
        return M.M
    return _Suspension(M, k)


def operadic_suspend(M: SigmaModule, k: int) -> SigmaModule:
    """(Λ^k M)(r) = Σ^{k(1-r)} M(r) ⊗ sgn_r^{⊗k}."""
    if k == 0:
        return M
    return _Suspension(M, k, operadic=True)


def iter_basis(M: SigmaModule, r_max: int) -> Iterator[BasisElement]:
    for r in range(1, r_max + 1):
        yield from M.basis_arity(r)
