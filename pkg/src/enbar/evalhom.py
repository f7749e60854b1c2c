"""Evaluation of quasi-free modules on algebras, finite complexes and homology reports.

Every complex here is assembled from a basis per degree and a differential on
basis elements with integer coefficients. Matrices are built over a chosen
ring by reducing those coefficients, and homology goes through
:func:`enbar.exactlin.chain_homology`.

Report rows carry an ``arity`` (Σ_*-level grading) and a ``weight`` (number of
algebra factors). For Σ_*-level objects the weight equals the arity; for the
weight-graded one-generator algebras the arity is reported as 0.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable

from enbar.barcx import (
    TwistingHom,
    build_gamma,
    generators,
    harrison_complex,
    word_degree,
)
from enbar.exactlin import QQ, ZZ, HomologySummary, Ring, SparseMatrix, chain_homology
from enbar.lifting import bar_twisting, composites, substitute, total_differential
from enbar.operads import (
    BarrattEccles,
    CommutativeOperad,
    Operad,
    enumerate_en,
    simplex_differential,
)
from enbar.symseq import add_term, ordered_set_partitions, set_partitions

__all__ = [
    "ActionIncomplete",
    "BoundsTooLarge",
    "FiniteComplex",
    "AlgebraDatum",
    "trivial_algebra",
    "trivial_sigma_algebra",
    "commutative_sigma_algebra",
    "free_commutative_algebra",
    "operad_algebra",
    "parse_algebra",
    "evaluate_module",
    "bar_module_complex",
    "bar_module_size",
    "en_complex",
    "en_homology",
    "gerstenhaber_dims",
    "augmentation_to_unit",
    "suspension_map",
    "stabilization_scan",
    "free_commutative_check",
    "harrison_quotient",
    "harrison_acyclicity_check",
    "trivial_algebra_oracle",
    "trivial_algebra_check",
    "lie_coinvariant_dim",
    "Report",
    "ReportRow",
    "homology_report",
    "uct_consistent",
    "encode",
]

SIZE_LIMIT = 250_000


class ActionIncomplete(KeyError):
    """The algebra has no action for an operation met in the twisting table."""


class BoundsTooLarge(ValueError):
    def __init__(self, estimate: int, limit: int = SIZE_LIMIT):
        super().__init__(f"estimated basis size {estimate} exceeds the limit {limit}")
        self.estimate = estimate
        self.limit = limit


def encode(obj) -> str:
    """Deterministic textual encoding used to order basis elements."""
    if isinstance(obj, bool):
        return str(int(obj))
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, str):
        return obj
    if isinstance(obj, frozenset):
        return "{" + ",".join(sorted(encode(v) for v in obj)) + "}"
    if isinstance(obj, tuple):
        return "(" + ",".join(encode(v) for v in obj) + ")"
    return repr(obj)


def _threads(threads: int | None) -> int:
    if threads is not None:
        return max(1, threads)
    return max(1, int(os.environ.get("ENBAR_THREADS", "1") or 1))


def _pmap(fn: Callable, items: list, threads: int | None = None) -> list:
    """Ordered map; the result does not depend on the worker count."""
    width = _threads(threads)
    if width == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=width) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# finite complexes


@dataclass
class FiniteComplex:
    """Graded basis plus a differential of degree -1 with integer coefficients."""

    basis: dict[int, list]
    differential: Callable[[object], dict]
    name: str = ""
    _index: dict = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        self.basis = {d: sorted(b, key=encode) for d, b in self.basis.items() if b}

    def degrees(self) -> list[int]:
        return sorted(self.basis)

    def dims(self) -> dict[int, int]:
        return {d: len(b) for d, b in sorted(self.basis.items())}

    def index(self, d: int) -> dict:
        if d not in self._index:
            self._index[d] = {x: i for i, x in enumerate(self.basis.get(d, []))}
        return self._index[d]

    def matrix(self, d: int, ring: Ring = ZZ) -> SparseMatrix:
        """The differential C_d → C_{d-1}."""
        src = self.basis.get(d, [])
        tgt = self.index(d - 1)
        ent = {}
        for j, x in enumerate(src):
            for y, c in self.differential(x).items():
                if y not in tgt:
                    raise ValueError(f"{self.name}: differential of {encode(x)} leaves the complex")
                ent[(tgt[y], j)] = c
        return SparseMatrix(len(tgt), len(src), ring, ent)

    def check_square_zero(self, ring: Ring = ZZ) -> bool:
        for d, b in self.basis.items():
            for x in b:
                acc: dict = {}
                for y, c in self.differential(x).items():
                    for z, a in self.differential(y).items():
                        add_term(acc, z, c * a)
                if any(ring(v) for v in acc.values()):
                    return False
        return True

    def homology(self, ring: Ring = ZZ) -> HomologySummary:
        records = []
        mats = {d: self.matrix(d, ring) for d in self.degrees()}
        for d in self.degrees():
            d_out = mats[d]
            d_in = mats[d + 1] if d + 1 in mats else SparseMatrix(len(self.basis[d]), 0, ring)
            records.append(chain_homology(d_in, d_out, ring, degree=d))
        return HomologySummary(ring, records)


# ---------------------------------------------------------------------------
# algebra data


@dataclass
class AlgebraDatum:
    """A finite algebra over an operad, given by a basis and an action table.

    ``graded_by`` is "arity" for Σ_*-level algebras, whose basis is indexed by
    finite input sets, or "weight" for algebras whose basis is indexed by the
    number of generator factors. ``act(R, q, args)`` returns the product of the
    operation q of R on the ordered arguments, or None when undefined.
    """

    name: str
    kind: str
    graded_by: str
    basis: Callable[[object], list]
    degree: Callable[[object], int]
    act: Callable[[Operad, object, tuple], dict | None]
    differential: Callable[[object], dict] = lambda a: {}
    weight: Callable[[object], int] = lambda a: 1

    def __post_init__(self) -> None:
        if self.kind not in ("trivial", "commutative", "operad-as-algebra"):
            raise ValueError(f"unknown algebra kind {self.kind!r}")
        if self.graded_by not in ("arity", "weight"):
            raise ValueError(f"unknown grading {self.graded_by!r}")


def _trivial_act(R: Operad, q, args: tuple):
    if len(args) == 1 and R.is_unit(q):
        return {args[0]: 1}
    return {}


def trivial_algebra(generators: int = 1) -> AlgebraDatum:
    """Trivial algebra on degree-0 generators ``("x", i)``; all products vanish."""
    gens = [("x", i) for i in range(1, generators + 1)]
    return AlgebraDatum(
        f"trivial:{generators}", "trivial", "weight",
        basis=lambda w: list(gens) if w == 1 else [],
        degree=lambda a: 0,
        act=_trivial_act,
    )


def trivial_sigma_algebra() -> AlgebraDatum:
    """The unit Σ_*-module I as a trivial algebra: one element ``("x", b)`` per singleton."""
    return AlgebraDatum(
        "sigma-trivial", "trivial", "arity",
        basis=lambda e: [("x", e[0])] if len(e) == 1 else [],
        degree=lambda a: 0,
        act=_trivial_act,
        weight=lambda a: 1,
    )


def _through_eps(product: Callable[[tuple], dict]):
    def act(R: Operad, q, args: tuple):
        if R.degree(q) != 0:
            return {}
        return product(args)

    return act


def commutative_sigma_algebra() -> AlgebraDatum:
    """C(I) = C as a Σ_*-algebra; any operad acts through its augmentation to C."""

    def product(args):
        out = frozenset()
        for a in args:
            out |= a
        return {out: 1}

    return AlgebraDatum(
        "sigma-comm", "commutative", "arity",
        basis=lambda e: [frozenset(e)] if e else [],
        degree=lambda a: 0,
        act=_through_eps(product),
        weight=len,
    )


def free_commutative_algebra() -> AlgebraDatum:
    """Polynomials on one degree-0 generator, graded by weight: basis ``("x^", w)``."""
    return AlgebraDatum(
        "free-comm:1", "commutative", "weight",
        basis=lambda w: [("x^", w)] if w >= 1 else [],
        degree=lambda a: 0,
        act=_through_eps(lambda args: {("x^", sum(a[1] for a in args)): 1}),
        weight=lambda a: a[1],
    )


def operad_algebra(R: Operad, degree_max: int = 2, level_max: int | None = None) -> AlgebraDatum:
    """R as an algebra over itself (Σ_*-level)."""

    def basis(e):
        if isinstance(R, BarrattEccles):
            return R.basis(e, degree_max, level_max)
        return R.basis(e)

    def act(S: Operad, q, args):
        if type(S) is not type(R):
            return None
        return R.compose(q, dict(zip(R.inputs(q), args)))

    return AlgebraDatum(
        f"operad:{R.name}", "operad-as-algebra", "arity",
        basis=basis, degree=R.degree, act=act, differential=R.differential,
        weight=lambda a: len(R.inputs(a)),
    )


def parse_algebra(spec: str) -> AlgebraDatum:
    """``trivial:<g>``, ``free-comm``, ``sigma-trivial`` or ``sigma-comm``."""
    head, _, arg = spec.partition(":")
    if head == "trivial":
        g = int(arg or 1)
        if g < 1:
            raise ValueError("a trivial algebra needs at least one generator")
        return trivial_algebra(g)
    if head == "free-comm":
        return free_commutative_algebra()
    if head == "sigma-trivial":
        return trivial_sigma_algebra()
    if head == "sigma-comm":
        return commutative_sigma_algebra()
    raise ValueError(f"unknown algebra {spec!r}")


# ---------------------------------------------------------------------------
# evaluation Sym_R(T^n∘R, A)


def _slot_choices(A: AlgebraDatum, grade: int) -> list[tuple]:
    """Ordered tuples of algebra basis elements of total arity or weight ``grade``."""
    out = []
    if A.graded_by == "arity":
        for blocks in ordered_set_partitions(tuple(range(1, grade + 1))):
            for combo in itertools.product(*(A.basis(b) for b in blocks)):
                out.append(combo)
        return out
    for k in range(1, grade + 1):
        for parts in itertools.product(range(1, grade + 1), repeat=k):
            if sum(parts) != grade:
                continue
            for combo in itertools.product(*(A.basis(w) for w in parts)):
                out.append(combo)
    return out


def evaluate_module(alpha: TwistingHom, A: AlgebraDatum, grade: int) -> FiniteComplex:
    """The component of Sym_R((T^n∘R, ∂_α), A) of arity or weight ``grade``.

    Basis elements are ``(g, (a_1..a_k))``; the differential is the internal one
    of A plus α(g) evaluated through the action of A.
    """
    n, R = alpha.n, alpha.operad
    basis: dict[int, list] = {}
    for slots in _slot_choices(A, grade):
        for g in generators(n, len(slots)):
            d = word_degree(g, n) + sum(A.degree(a) for a in slots)
            basis.setdefault(d, []).append((g, slots))

    def act(q, args):
        return A.act(R, q, args)

    def differential(x):
        g, slots = x
        out: dict = {}
        acc = word_degree(g, n)
        for i, a in enumerate(slots):
            s = -1 if acc % 2 else 1
            for b, c in A.differential(a).items():
                add_term(out, (g, slots[:i] + (b,) + slots[i + 1:]), s * c)
            acc += A.degree(a)
        try:
            terms = substitute(alpha(g), slots, R, act=act, slot_degree=A.degree)
        except KeyError as exc:
            raise ActionIncomplete(str(exc)) from None
        for y, c in terms.items():
            add_term(out, y, c)
        return out

    return FiniteComplex(basis, differential, name=f"B^{n}_{R.name}({A.name})[{grade}]")


# ---------------------------------------------------------------------------
# bar modules and E_n


@lru_cache(maxsize=None)
def _en_relabeled(n: int, e: tuple) -> tuple:
    m = dict(zip(range(1, len(e) + 1), e))
    return tuple(tuple(tuple(m[i] for i in w) for w in x) for x in enumerate_en(n, len(e)))


def _en_count(n: int, s: int) -> int:
    if n == 1:
        return math.factorial(s)
    if s <= 3 or (n == 2 and s == 4):
        return len(enumerate_en(n, s))
    # crude lower bound: every sequence with one variation per step fits
    return math.factorial(s) ** 2


def bar_module_size(n: int, r: int, operad: str) -> int:
    """Number of basis composites of B^n_R(r); E_n counts use exact or crude estimates."""
    total = 0
    for blocks in ordered_set_partitions(tuple(range(1, r + 1))):
        k = len(blocks)
        gens = len(generators(n, k))
        if operad == "C":
            total += gens
        else:
            total += gens * math.prod(_en_count(n, len(b)) for b in blocks)
    return total


def bar_module_complex(n: int, r: int, operad: str = "E_n", ring: Ring = ZZ,
                       degree_max: int = 2, limit: int = SIZE_LIMIT) -> FiniteComplex:
    """The arity-r component of B^n_C, of B^n_{E_n}, or of B^n_E truncated at
    per-element simplex degree ``degree_max``.

    The truncated B^n_E is not closed under the differential; use it for
    ``check_square_zero`` only.
    """
    if operad not in ("C", "E", "E_n"):
        raise ValueError(f"unknown operad choice {operad!r}")
    if operad != "E":
        est = bar_module_size(n, r, operad)
        if est > limit:
            raise BoundsTooLarge(est, limit)
    if operad == "C":
        gamma = build_gamma(n, r, ring)
        C = gamma.operad
        xs = composites(n, r, C, C.basis)
        alpha = gamma
    else:
        _, alpha = bar_twisting(n, r)
        E = alpha.operad
        if operad == "E_n":
            xs = composites(n, r, E, lambda e: _en_relabeled(n, tuple(sorted(e))))
        else:
            xs = composites(n, r, E, lambda e: E.basis(e, degree_max))
    R = alpha.operad
    basis: dict[int, list] = {}
    for x in xs:
        g, ps = x
        basis.setdefault(word_degree(g, n) + sum(R.degree(p) for p in ps), []).append(x)
    label = {"C": "C", "E": "E", "E_n": f"E_{n}"}[operad]
    return FiniteComplex(basis, lambda x: total_differential(alpha, x), name=f"B^{n}_{label}({r})")


def en_complex(n: int, r: int) -> FiniteComplex:
    basis: dict[int, list] = {}
    for x in enumerate_en(n, r):
        basis.setdefault(len(x) - 1, []).append(x)
    return FiniteComplex(basis, simplex_differential, name=f"E_{n}({r})")


def en_homology(n: int, r: int, ring: Ring = ZZ) -> HomologySummary:
    return en_complex(n, r).homology(ring)


def gerstenhaber_dims(n: int, r: int) -> dict[int, int]:
    """dim (C∘Λ^{1-n}L)(r) per degree, with dim L(s) = (s-1)! in degree (n-1)(s-1)."""
    out: dict[int, int] = {}
    for p in set_partitions(tuple(range(1, r + 1))):
        d = sum((n - 1) * (len(b) - 1) for b in p)
        out[d] = out.get(d, 0) + math.prod(math.factorial(len(b) - 1) for b in p)
    return dict(sorted(out.items()))


def _unit_composite(n: int, operad: Operad):
    g = generators(n, 1)[0]
    return g, (operad.unit(1),)


def augmentation_to_unit(n: int, operad: Operad) -> Callable[[object], int]:
    """B^n_R → Σ^n I: the arity-1 word with a unit slot maps to the class, all else to 0."""
    target = _unit_composite(n, operad)
    return lambda x: 1 if x == target else 0


def suspension_map(x, n: int, operad: Operad) -> dict:
    """σ: B^n_R → B^{n+1}_R, ``(g, ps) ↦ (-1)^{|x|} ((g,), ps)``; a chain map."""
    g, ps = x
    d = word_degree(g, n) + sum(operad.degree(p) for p in ps)
    return {((g,), ps): -1 if d % 2 else 1}


# ---------------------------------------------------------------------------
# field linear algebra for induced maps


class _Reducer:
    """Column echelon form over a field; tests span membership."""

    def __init__(self, ring: Ring):
        self.ring = ring
        self.pivots: dict = {}

    def reduce(self, v: dict) -> dict:
        ring = self.ring
        v = {k: ring(c) for k, c in v.items() if ring(c)}
        while True:
            hit = [k for k in v if k in self.pivots]
            if not hit:
                return v
            k = min(hit)
            c = v[k]
            for kk, a in self.pivots[k].items():
                nv = ring(v.get(kk, 0) - c * a)
                if nv:
                    v[kk] = nv
                else:
                    v.pop(kk, None)

    def add(self, v: dict) -> bool:
        v = self.reduce(v)
        if not v:
            return False
        k = min(v)
        inv = self.ring.inv(v[k])
        self.pivots[k] = {kk: self.ring(a * inv) for kk, a in v.items()}
        return True


def _kernel(cx: FiniteComplex, d: int, ring: Ring) -> list[dict]:
    """Basis of the d-cycles as dicts basis element → coefficient."""
    tgt = cx.index(d - 1)
    red = _Reducer(ring)
    combos: dict = {}
    out = []
    for x in cx.basis.get(d, []):
        v = {tgt[y]: ring(c) for y, c in cx.differential(x).items() if ring(c)}
        comb = {x: ring(1)}
        while True:
            hit = [k for k in v if k in red.pivots]
            if not hit:
                break
            k = min(hit)
            c = v[k]
            for kk, a in red.pivots[k].items():
                nv = ring(v.get(kk, 0) - c * a)
                if nv:
                    v[kk] = nv
                else:
                    v.pop(kk, None)
            for y, a in combos[k].items():
                nv = ring(comb.get(y, 0) - c * a)
                if nv:
                    comb[y] = nv
                else:
                    comb.pop(y, None)
        if not v:
            out.append(comb)
            continue
        k = min(v)
        inv = ring.inv(v[k])
        red.pivots[k] = {kk: ring(a * inv) for kk, a in v.items()}
        combos[k] = {y: ring(a * inv) for y, a in comb.items()}
    return out


def _induced_rank(src: FiniteComplex, tgt: FiniteComplex, d_src: int, d_tgt: int,
                  f: Callable[[object], dict], ring: Ring) -> int:
    """Rank of the map H_{d_src}(src) → H_{d_tgt}(tgt) induced by the chain map f."""
    idx = {x: i for i, x in enumerate(tgt.basis.get(d_tgt, []))}
    red = _Reducer(ring)
    for y in tgt.basis.get(d_tgt + 1, []):
        red.add({idx[z]: c for z, c in tgt.differential(y).items()})
    rk = 0
    for z in _kernel(src, d_src, ring):
        img: dict = {}
        for x, c in z.items():
            for y, a in f(x).items():
                add_term(img, idx[y], c * a)
        if red.add(img):
            rk += 1
    return rk


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class ReportRow:
    arity: int
    weight: int
    degree: int
    free_rank: int
    torsion: tuple[int, ...] = ()

    def as_dict(self) -> dict:
        return {
            "arity": self.arity, "weight": self.weight, "degree": self.degree,
            "free_rank": self.free_rank, "torsion": list(self.torsion),
        }


@dataclass
class Report:
    object: str
    ring: str
    bounds: dict
    table: list[ReportRow]
    ok: bool | None = None
    notes: dict = field(default_factory=dict)

    def rows(self) -> list[ReportRow]:
        return sorted(self.table, key=lambda r: (r.arity, r.weight, r.degree))

    def to_dict(self) -> dict:
        doc = {
            "object": self.object, "ring": self.ring, "bounds": self.bounds,
            "table": [r.as_dict() for r in self.rows()],
        }
        if self.ok is not None:
            doc["ok"] = self.ok
        if self.notes:
            doc["notes"] = self.notes
        return doc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["object", "ring", "arity", "weight", "degree", "free_rank", "torsion"])
        for r in self.rows():
            w.writerow([self.object, self.ring, r.arity, r.weight, r.degree, r.free_rank,
                        " ".join(str(t) for t in r.torsion)])
        return buf.getvalue()

    def to_text(self) -> str:
        lines = [f"{self.object} over {self.ring} {json.dumps(self.bounds, sort_keys=True)}"]
        for r in self.rows():
            tors = "".join(f" + Z/{t}" for t in r.torsion)
            lines.append(f"  arity {r.arity} weight {r.weight} degree {r.degree}: rank {r.free_rank}{tors}")
        if self.ok is not None:
            lines.append(f"  ok: {self.ok}")
        for k in sorted(self.notes):
            lines.append(f"  {k}: {json.dumps(self.notes[k], sort_keys=True)}")
        return "\n".join(lines) + "\n"

    def render(self, fmt: str) -> str:
        return {"json": self.to_json, "csv": self.to_csv, "text": self.to_text}[fmt]()

    def ranks(self, arity: int | None = None, weight: int | None = None) -> dict[int, int]:
        return {
            r.degree: r.free_rank for r in self.rows()
            if r.free_rank and (arity is None or r.arity == arity) and (weight is None or r.weight == weight)
        }


def _rows(summary: HomologySummary, arity: int, weight: int) -> list[ReportRow]:
    return [ReportRow(arity, weight, h.degree, h.free_rank, h.torsion) for h in summary.records]


def homology_report(obj: str, ring: Ring = ZZ, n: int = 2, arities: Iterable[int] = (1, 2, 3),
                    algebra: str = "trivial:1", threads: int | None = None,
                    limit: int = SIZE_LIMIT) -> Report:
    """Homology tables for ``bar-module``, ``bar-module-c``, ``en-operad``,
    ``bar-eval`` or ``harrison``; grades are arities (weights for weight-graded algebras)."""
    grades = sorted(set(arities))
    if obj in ("bar-module", "bar-module-c"):
        choice = "E_n" if obj == "bar-module" else "C"
        for r in grades:
            est = bar_module_size(n, r, choice)
            if est > limit:
                raise BoundsTooLarge(est, limit)

        def task(r):
            return _rows(bar_module_complex(n, r, choice, ring, limit=limit).homology(ring), r, r)

        bounds = {"n": n, "arities": grades}
    elif obj == "en-operad":
        def task(r):
            return _rows(en_homology(n, r, ring), r, r)

        bounds = {"n": n, "arities": grades}
    elif obj == "bar-eval":
        A = parse_algebra(algebra)
        gamma = build_gamma(n, max(grades), ring)

        def task(w):
            h = evaluate_module(gamma, A, w).homology(ring)
            return _rows(h, w if A.graded_by == "arity" else 0, w)

        bounds = {"n": n, "algebra": A.name, "grades": grades}
    elif obj == "harrison":
        def task(r):
            return _rows(harrison_quotient(r, ring).homology(ring), r, r)

        bounds = {"arities": grades}
    else:
        raise ValueError(f"unknown object {obj!r}")
    rows = [row for part in _pmap(task, grades, threads) for row in part]
    return Report(obj, str(ring), bounds, rows)


def uct_consistent(z_report: Report, p_report: Report, p: int) -> bool:
    """F_p ranks agree with Z ranks and torsion: rank H_d(C⊗F_p) = free_d +
    #{p | t, t ∈ tors_d} + #{p | t, t ∈ tors_{d-1}}."""
    zrows = {(r.arity, r.weight, r.degree): r for r in z_report.table}
    prows = {(r.arity, r.weight, r.degree): r for r in p_report.table}
    if set(zrows) != set(prows):
        return False
    for key, pr in prows.items():
        a, w, d = key
        zr = zrows[key]
        prev = zrows.get((a, w, d - 1))
        expected = zr.free_rank + sum(1 for t in zr.torsion if t % p == 0)
        if prev is not None:
            expected += sum(1 for t in prev.torsion if t % p == 0)
        if pr.free_rank != expected or pr.torsion:
            return False
    return True


# ---------------------------------------------------------------------------
# checks on the commutative side


def free_commutative_check(r_max: int = 4, ring: Ring = ZZ, n: int = 1,
                           threads: int | None = None) -> Report:
    """H_*(B^n_C)(r) is free of rank 1 in degree nr and zero elsewhere."""
    grades = list(range(1, r_max + 1))
    hs = _pmap(lambda r: bar_module_complex(n, r, "C", ring).homology(ring), grades, threads)
    rows, ok = [], True
    for r, h in zip(grades, hs):
        rows.extend(_rows(h, r, r))
        ok = ok and h.ranks() == {n * r: 1} and not h.torsion()
    return Report("free-commutative", str(ring), {"n": n, "r_max": r_max}, rows, ok)


def harrison_quotient(r: int, ring: Ring = ZZ) -> FiniteComplex:
    """Harrison complex of C(I) at arity r: B(C)(r) modulo shuffle products.

    The relations are put in echelon form with unit pivots; the non-pivot bar
    words form a basis of the quotient. Over Z a relation without a unit
    coefficient would make the quotient non-free, and raises.
    """
    basis, diff, relations = harrison_complex(r)
    pivots: dict = {}
    for d in sorted(relations):
        for rel in sorted(relations[d], key=lambda v: encode(sorted(v.items(), key=lambda t: encode(t[0])))):
            v = _reduce_by(pivots, rel, ring)
            if not v:
                continue
            units = sorted((k for k, c in v.items() if ring.is_unit(c)), key=encode)
            if not units:
                raise ValueError("shuffle relations are not saturated over this ring")
            k = units[0]
            inv = ring.inv(v[k])
            new = {kk: ring(c * inv) for kk, c in v.items()}
            for other in pivots.values():
                c = other.get(k)
                if c:
                    for kk, a in new.items():
                        nv = ring(other.get(kk, 0) - c * a)
                        if nv:
                            other[kk] = nv
                        else:
                            other.pop(kk, None)
            pivots[k] = new
    qbasis = {d: [w for w in b if w not in pivots] for d, b in basis.items()}

    def qdiff(w):
        return _reduce_by(pivots, diff(w), ring)

    cx = FiniteComplex(qbasis, qdiff, name=f"Harr(C)({r})")
    return cx


def _reduce_by(pivots: dict, v: dict, ring: Ring) -> dict:
    out = {k: ring(c) for k, c in v.items() if ring(c)}
    for k in [k for k in out if k in pivots]:
        c = out.pop(k)
        for kk, a in pivots[k].items():
            if kk == k:
                continue
            nv = ring(out.get(kk, 0) - c * a)
            if nv:
                out[kk] = nv
            else:
                out.pop(kk, None)
    return out


def harrison_acyclicity_check(r_max: int = 4, ring: Ring = ZZ, threads: int | None = None) -> Report:
    """Harrison homology of C(I) is ΣI: rank 1 in degree 1 at arity 1, zero above."""
    grades = list(range(1, r_max + 1))
    hs = _pmap(lambda r: harrison_quotient(r, ring).homology(ring), grades, threads)
    rows, ok = [], True
    for r, h in zip(grades, hs):
        rows.extend(_rows(h, r, r))
        expected = {1: 1} if r == 1 else {}
        ok = ok and h.ranks() == expected and not h.torsion()
    return Report("harrison", str(ring), {"r_max": r_max}, rows, ok)


# ---------------------------------------------------------------------------
# trivial algebras


def _mobius(d: int) -> int:
    out, m, p = 1, d, 2
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            out = -out
        p += 1
    return -out if m > 1 else out


def lie_coinvariant_dim(s: int) -> int:
    """dim of the weight-s part of L^c(Σk) over Q, i.e. the multiplicity of the
    sign representation in Lie(s), from the character of Lie(s) on cycle types d^{s/d}."""
    total = sum(_mobius(d) * (-1) ** ((d - 1) * (s // d)) for d in range(1, s + 1) if s % d == 0)
    if total % s:
        raise ArithmeticError("non-integral multiplicity")
    return total // s


def trivial_algebra_oracle(n: int, grade_max: int, mode: str = "weight") -> dict[int, dict[int, int]]:
    """Expected dims of C(Σ^{n-1}L^c(ΣM)) by grade and degree.

    ``mode="arity"``: M = I at Σ_*-level, L^c(ΣI)(s) has dim (s-1)! in degree s.
    ``mode="weight"``: M = k, one even generator; weight-s generators number
    :func:`lie_coinvariant_dim` (s), in degree s, and the free graded commutative
    algebra on them is counted directly.
    """
    out: dict[int, dict[int, int]] = {}
    if mode == "arity":
        for r in range(1, grade_max + 1):
            row: dict[int, int] = {}
            for p in set_partitions(tuple(range(1, r + 1))):
                d = sum(len(b) + n - 1 for b in p)
                row[d] = row.get(d, 0) + math.prod(math.factorial(len(b) - 1) for b in p)
            out[r] = dict(sorted(row.items()))
        return out
    if mode != "weight":
        raise ValueError(f"unknown mode {mode!r}")
    series: dict[tuple[int, int], int] = {(0, 0): 1}
    for s in range(1, grade_max + 1):
        deg = s + n - 1
        for _ in range(lie_coinvariant_dim(s)):
            new: dict[tuple[int, int], int] = {}
            for (w, d), c in series.items():
                top = 1 if deg % 2 else (grade_max - w) // s
                for j in range(min(top, (grade_max - w) // s) + 1):
                    key = (w + j * s, d + j * deg)
                    new[key] = new.get(key, 0) + c
            series = new
    for (w, d), c in sorted(series.items()):
        if w:
            out.setdefault(w, {})[d] = c
    return out


def trivial_algebra_check(n: int, grade_max: int = 4, ring: Ring = QQ, mode: str = "weight",
                          threads: int | None = None) -> Report:
    """Homology of B^n(A) for a trivial algebra A against the counting oracle.

    ``mode="weight"`` uses one degree-0 generator (weights 1..grade_max; the
    comparison is a characteristic-zero statement). ``mode="arity"`` uses the
    Σ_*-level algebra I.
    """
    A = trivial_algebra(1) if mode == "weight" else trivial_sigma_algebra()
    gamma = build_gamma(n, grade_max, ring)
    grades = list(range(1, grade_max + 1))
    hs = _pmap(lambda w: evaluate_module(gamma, A, w).homology(ring), grades, threads)
    expected = trivial_algebra_oracle(n, grade_max, mode)
    rows, ok = [], True
    for w, h in zip(grades, hs):
        rows.extend(_rows(h, w if mode == "arity" else 0, w))
        ok = ok and h.ranks() == expected.get(w, {}) and not h.torsion()
    notes = {"expected": {str(w): {str(d): c for d, c in v.items()} for w, v in expected.items()}}
    return Report(f"trivial-algebra-{mode}", str(ring), {"n": n, "grade_max": grade_max}, rows, ok, notes)


# ---------------------------------------------------------------------------
# stabilization


def stabilization_scan(r: int, window: tuple[int, int] = (0, 4), ring: Ring = ZZ,
                       n_max: int = 4) -> Report:
    """Homology of Σ^{-n}B^n_C(r) for n = 1..n_max with the suspension-induced maps.

    Rows use the desuspended degree. Induced maps are computed over the field
    (Q when the ring is Z). ``notes["maps"]`` lists the rank of each map
    H_d(Σ^{-n}B^n) → H_d(Σ^{-n-1}B^{n+1}) in the window, and
    ``notes["colimit"]`` the rank of the last map per degree, which is the
    colimit rank once the sequence has stabilized.
    """
    lo, hi = window
    field_ring = QQ if ring.kind == "Z" else ring
    cxs = {n: bar_module_complex(n, r, "C", ring) for n in range(1, n_max + 1)}
    C = CommutativeOperad(ring, r)
    rows = []
    for n, cx in cxs.items():
        for h in cx.homology(ring).records:
            if lo <= h.degree - n <= hi:
                rows.append(ReportRow(r, n, h.degree - n, h.free_rank, h.torsion))
    maps = {}
    for n in range(1, n_max):
        ranks = {}
        for d in range(lo, hi + 1):
            ranks[str(d)] = _induced_rank(
                cxs[n], cxs[n + 1], d + n, d + n + 1,
                lambda x, n=n: suspension_map(x, n, C), field_ring,
            )
        maps[f"{n}->{n + 1}"] = ranks
    colimit = maps[f"{n_max - 1}->{n_max}"] if n_max > 1 else {}
    expected = {str(d): (1 if (r == 1 and d == 0) else 0) for d in range(lo, hi + 1)}
    vanish = all(v == 0 for m in maps.values() for v in m.values()) if r >= 2 else None
    ok = colimit == expected and (vanish is not False)
    notes = {"maps": maps, "colimit": colimit, "weight_column": "bar level n"}
    return Report("stabilization", str(ring), {"r": r, "window": [lo, hi], "n_max": n_max}, rows, ok, notes)
