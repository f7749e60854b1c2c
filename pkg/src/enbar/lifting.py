"""Quasi-free right modules T^n∘R and the lifting of ∂_γ to the Barratt-Eccles operad.

A composite is a pair ``(g, ps)`` with ``g`` a canonical level word of arity k
and ``ps`` a tuple of k operad elements (see :mod:`enbar.barcx`). In the
tensor ``g ⊗ p_1 ⊗ ... ⊗ p_k`` the generator comes first, so a map applied to
the generator alone never produces a Koszul sign.

The lift uses α_0 = ι̃γ and α_m = -ν̃(Σ_{p+q=m-1} ∂_{α_p} α_q) with the
tensor homotopy ν̃ = Σ_i (ιε)^{⊗i-1} ⊗ ν ⊗ id^{⊗k-i}; the minus sign and the
absence of an alternating sign in ν̃ are what δ(ν̃) = id − ι̃ε̃ and the
twisting equation require with the Koszul rule.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

from enbar.barcx import (
    TwistingHom,
    build_gamma,
    composite_in_cell,
    format_word,
    generators,
    minimal_cell,
    word_degree,
)
from enbar.exactlin import ZZ
from enbar.operads import (
    BarrattEccles,
    Operad,
    filtration_level,
    format_simplex,
    homotopy_nu,
)
from enbar.symseq import add_term, koszul_sign, ordered_set_partitions

__all__ = [
    "QuasiFreeModule",
    "RestrictionViolation",
    "substitute",
    "apply",
    "bar_twisting",
    "internal_differential",
    "extend_to_module",
    "total_differential",
    "iota_tilde",
    "eps_tilde",
    "nu_tilde",
    "tensor_extensions",
    "lift_twisting",
    "cup_product",
    "cup_cycle",
    "restrict_to_en",
    "deconcatenate_composite",
    "composites",
    "split_generator",
]


class RestrictionViolation(AssertionError):
    """A simplex of ∂_ε(ξ) lies outside E_n."""


def _lin_add(out: dict, v: dict, c: int = 1) -> None:
    for k, a in v.items():
        add_term(out, k, c * a)


def composite_degree(x, n: int, R: Operad) -> int:
    g, ps = x
    return word_degree(g, n) + sum(R.degree(p) for p in ps)


def substitute(terms: dict, ps: tuple, R: Operad, act=None, slot_degree=None) -> dict:
    """Right action: each term ``(h, qs)`` with ``qs`` on blocks of {1..k} receives ``ps``.

    ``act(q, args)`` replaces operadic composition when the slots hold elements
    of an algebra rather than of R; it returns a dict, or None when undefined.
    """
    out: dict = {}
    if act is None:
        act = lambda q, args: R.compose(q, dict(zip(R.inputs(q), args)))  # noqa: E731
    pdeg = [(slot_degree or R.degree)(p) for p in ps]
    for (h, qs), c in terms.items():
        blocks = [R.inputs(q) for q in qs]
        j = len(qs)
        degrees = [R.degree(q) for q in qs] + pdeg
        order = []
        for l, b in enumerate(blocks):
            order.append(l)
            order.extend(j + i - 1 for i in b)
        sign = koszul_sign(degrees, order)
        parts = []
        for q, b in zip(qs, blocks):
            v = act(q, tuple(ps[i - 1] for i in b))
            if v is None:
                raise KeyError(f"no action for operation {q!r}")
            parts.append(list(v.items()))
        for combo in itertools.product(*parts):
            coef = c * sign
            for _, a in combo:
                coef *= a
            add_term(out, (h, tuple(z for z, _ in combo)), coef)
    return out


def internal_differential(x, n: int, R: Operad) -> dict:
    g, ps = x
    out: dict = {}
    acc = word_degree(g, n)
    for i, p in enumerate(ps):
        s = -1 if acc % 2 else 1
        for q, c in R.differential(p).items():
            add_term(out, (g, ps[:i] + (q,) + ps[i + 1:]), s * c)
        acc += R.degree(p)
    return out


def extend_to_module(alpha: TwistingHom, x) -> dict:
    """∂_α(g(p_1..p_k)) = α(g)(p_1..p_k)."""
    g, ps = x
    if g not in alpha.table:
        raise KeyError(f"generator {format_word(g, alpha.n)} outside the twisting table")
    return substitute(alpha.table[g], ps, alpha.operad)


def total_differential(alpha: TwistingHom, x) -> dict:
    out = internal_differential(x, alpha.n, alpha.operad)
    _lin_add(out, extend_to_module(alpha, x))
    return out


def apply(f, v: dict) -> dict:
    out: dict = {}
    for x, c in v.items():
        _lin_add(out, f(x), c)
    return out


# ---------------------------------------------------------------------------
# ι̃, ε̃ = K∘ε and ν̃


def iota_tilde(x) -> dict:
    g, cs = x
    return {(g, tuple((tuple(sorted(c)),) for c in cs)): 1}


def eps_tilde(x) -> dict:
    g, ps = x
    if any(len(p) != 1 for p in ps):
        return {}
    return {(g, tuple(frozenset(p[0]) for p in ps)): 1}


def nu_tilde(x, n: int) -> dict:
    g, ps = x
    out: dict = {}
    gsign = -1 if word_degree(g, n) % 2 else 1
    prefix = ()
    for i, p in enumerate(ps):
        for q, c in homotopy_nu(p).items():
            add_term(out, (g, prefix + (q,) + ps[i + 1:]), gsign * c)
        if len(p) != 1:
            break
        prefix = prefix + ((tuple(sorted(p[0])),),)
    return out


def tensor_extensions(n: int = 1):
    """Return the pair (ι̃, ν̃) as callables on composites."""
    return iota_tilde, (lambda x: nu_tilde(x, n))


# ---------------------------------------------------------------------------
# the lift


class _Lifter:
    def __init__(self, gamma: TwistingHom, E: BarrattEccles):
        self.n = gamma.n
        self.gamma = gamma
        self.E = E
        self.memo: dict = {}

    def alpha(self, m: int, g) -> dict:
        key = (m, g)
        if key in self.memo:
            return self.memo[key]
        n = self.n
        if m == 0:
            out = apply(iota_tilde, self.gamma.table[g])
        elif word_degree(g, n) - 1 - m < n:
            out = {}
        else:
            phi: dict = {}
            for p in range(m):
                q = m - 1 - p
                for x, c in self.alpha(q, g).items():
                    h, ps = x
                    _lin_add(phi, substitute(self.alpha(p, h), ps, self.E), c)
            out = {}
            for x, c in phi.items():
                _lin_add(out, nu_tilde(x, n), -c)
        self.memo[key] = out
        return out


def lift_twisting(gamma: TwistingHom, E: BarrattEccles | None = None, arity_max: int | None = None):
    """Lift ∂_γ over ε: E → C. Returns ``(α_*, {m: α_m})`` as TwistingHom tables."""
    E = E or BarrattEccles(gamma.operad.ring, gamma.operad.arity_max)
    lifter = _Lifter(gamma, E)
    gens = sorted(gamma.table, key=lambda g: (word_degree(g, gamma.n), format_word(g, gamma.n)))
    if arity_max is not None:
        gens = [g for g in gens if len(_leaves(g, gamma.n)) <= arity_max]
    total: dict = {}
    parts: dict = {}
    for g in gens:
        acc: dict = {}
        m = 0
        while word_degree(g, gamma.n) - 1 - m >= gamma.n:
            am = lifter.alpha(m, g)
            if am:
                parts.setdefault(m, {})[g] = am
            _lin_add(acc, am)
            m += 1
        total[g] = acc
    return (
        TwistingHom(gamma.n, E, total),
        {m: TwistingHom(gamma.n, E, t) for m, t in parts.items()},
    )


def _leaves(g, n):
    from enbar.barcx import word_leaves

    return word_leaves(g, n)


@lru_cache(maxsize=None)
def bar_twisting(n: int, arity_max: int):
    """Cached (γ, α_ε) pair for level n."""
    gamma = build_gamma(n, arity_max)
    alpha, _ = lift_twisting(gamma, BarrattEccles(ZZ, arity_max))
    return gamma, alpha


# ---------------------------------------------------------------------------
# quasi-free module wrapper and enumeration of composites


def composites(n: int, r: int, R: Operad, basis_for_block) -> list:
    """All composites ``(g, ps)`` of arity r; ``basis_for_block(e)`` lists R(e)."""
    out = []
    e = tuple(range(1, r + 1))
    for blocks in ordered_set_partitions(e):
        k = len(blocks)
        gens = generators(n, k)
        if not gens:
            continue
        choices = [basis_for_block(b) for b in blocks]
        for combo in itertools.product(*choices):
            for g in gens:
                out.append((g, tuple(combo)))
    return out


class QuasiFreeModule:
    """(T^n∘R, δ + ∂_α) truncated by arity and by a per-element degree bound."""

    def __init__(self, alpha: TwistingHom, arity_max: int, degree_max: int = 2, level_max: int | None = None):
        self.alpha = alpha
        self.n = alpha.n
        self.R = alpha.operad
        self.arity_max = arity_max
        self.degree_max = degree_max
        self.level_max = level_max

    def block_basis(self, e: tuple) -> list:
        R = self.R
        if isinstance(R, BarrattEccles):
            return R.basis(e, self.degree_max, self.level_max)
        return R.basis(e)

    def basis(self, r: int) -> list:
        if r > self.arity_max:
            raise ValueError("arity outside truncation")
        return composites(self.n, r, self.R, self.block_basis)

    def differential(self, x) -> dict:
        return total_differential(self.alpha, x)

    def degree(self, x) -> int:
        return composite_degree(x, self.n, self.R)


# ---------------------------------------------------------------------------
# coalgebra structure on composites


def split_generator(g, s: int, n: int):
    """Split the top-level factors of a canonical word after position s."""
    from enbar.barcx import map_leaves, word_leaves

    left, right = g[:s], g[s:]
    kl = len(word_leaves(left, n))
    return left, map_leaves(right, n, lambda l: l - kl), kl


def deconcatenate_composite(x, n: int, R: Operad) -> dict:
    """Δ(g(ps)) = Σ ± g_L(p_L) ⊗ g_R(p_R); keys are pairs of composites."""
    g, ps = x
    out: dict = {}
    for s in range(1, len(g)):
        left, right, kl = split_generator(g, s, n)
        pl, pr = ps[:kl], ps[kl:]
        sign = word_degree(right, n) * sum(R.degree(p) for p in pl)
        add_term(out, ((left, pl), (right, pr)), -1 if sign % 2 else 1)
    return out


# ---------------------------------------------------------------------------
# cup products


def _tau(v: dict) -> dict:
    out: dict = {}
    for x, c in v.items():
        add_term(out, tuple(tuple({1: 2, 2: 1}[i] for i in w) for w in x), c)
    return out


def _nu_lin(v: dict) -> dict:
    out: dict = {}
    for x, c in v.items():
        _lin_add(out, homotopy_nu(x), c)
    return out


@lru_cache(maxsize=None)
def _cups(m: int):
    if m == 0:
        return {((1, 2),): 1}
    prev = dict(_cups(m - 1))
    lam = dict(prev)
    _lin_add(lam, _tau(prev), (-1) ** m)
    return _nu_lin(lam)


def cup_product(m: int) -> dict:
    """υ_m ∈ E(2): υ_0 = (12), υ_m = ν(υ_{m-1} + (-1)^m τυ_{m-1})."""
    if m < 0:
        raise ValueError("m must be non-negative")
    return dict(_cups(m))


def cup_cycle(m: int) -> dict:
    """λ_m = υ_m + (-1)^{m+1} τυ_m, a cycle of degree m."""
    u = cup_product(m)
    out = dict(u)
    _lin_add(out, _tau(u), (-1) ** (m + 1))
    return out


# ---------------------------------------------------------------------------
# restriction to E_n


def restrict_to_en(alpha: TwistingHom, n: int | None = None, cells: bool = True) -> TwistingHom:
    """Check every simplex of ∂_ε(ξ) has filtration level ≤ n and, optionally,
    the cell condition on the minimal cell (μ, id) of ξ. Returns the same table."""
    n = alpha.n if n is None else n
    for g, v in alpha.table.items():
        for (h, ps), c in v.items():
            for p in ps:
                if filtration_level(p) > n:
                    raise RestrictionViolation(
                        f"{format_word(g, alpha.n)}: simplex {format_simplex(p)} has level {filtration_level(p)} > {n}"
                    )
        if cells:
            k = minimal_cell(g, alpha.n)
            for x in v:
                if not composite_in_cell(x, alpha.n, k, alpha.operad):
                    raise RestrictionViolation(
                        f"{format_word(g, alpha.n)}: term {format_word(x[0], alpha.n)}"
                        f"{[format_simplex(p) for p in x[1]]} leaves its minimal cell"
                    )
    E = alpha.operad
    En = BarrattEccles(E.ring, E.arity_max)
    En.name = f"E_{n}"
    En.level_max = n
    return TwistingHom(alpha.n, En, alpha.table)
