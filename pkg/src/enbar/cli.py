"""Command-line entry point: verification suites, homology reports and info tables.

Exit status: 0 when every check passes, 1 on a mathematical counterexample,
2 on a usage or configuration error. Flags take precedence over the
environment variables ENBAR_RING and ENBAR_THREADS, which take precedence
over the defaults (n=2, arity_max=3, ring=z).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

from enbar.barcx import format_word, generators, word_degree, word_leaves, words
from enbar.evalhom import (
    BoundsTooLarge,
    bar_module_size,
    encode,
    en_complex,
    homology_report,
    stabilization_scan,
)
from enbar.exactlin import Ring, RingError
from enbar.lifting import (
    QuasiFreeModule,
    RestrictionViolation,
    apply,
    bar_twisting,
    composite_degree,
    cup_product,
    deconcatenate_composite,
    eps_tilde,
    extend_to_module,
    restrict_to_en,
)
from enbar.operads import enumerate_en, filtration_level, format_simplex
from enbar.symseq import add_term

SUITES = ("twisting", "projection", "coderivation", "cell", "restriction", "suspension")
OBJECTS = ("bar-module", "bar-module-c", "en-operad", "bar-eval", "harrison", "stabilization")
INFO = ("tn", "gn", "en", "levels", "cup", "twisting")
TWISTING_LIMIT = {1: 6, 2: 5, 3: 4}


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    ring: Ring
    n: int = 2
    arity_max: int = 3
    degree_max: int = 2
    weight_max: int = 4
    threads: int = 1
    fmt: str = "json"
    output: str | None = None

    def __post_init__(self) -> None:
        for name in ("n", "arity_max", "degree_max", "weight_max", "threads"):
            if getattr(self, name) < 1:
                raise UsageError(f"{name.replace('_', '-')} must be positive")


# ---------------------------------------------------------------------------
# verification suites


def _nonzero(v: dict, ring: Ring) -> bool:
    return any(ring(c) for c in v.values())


def _diff(a: dict, b: dict) -> dict:
    out = dict(a)
    for k, c in b.items():
        add_term(out, k, -c)
    return out


def _units(g, n: int) -> tuple:
    return g, tuple(((i,),) for i in range(1, len(word_leaves(g, n)) + 1))


def _show(x, n: int) -> str:
    g, ps = x
    return format_word(g, n) + "".join(format_simplex(p) for p in ps)


def _generators(alpha, arity_max: int):
    n = alpha.n
    gens = [g for g in alpha.table if len(word_leaves(g, n)) <= arity_max]
    return sorted(gens, key=lambda g: format_word(g, n))


def suite_twisting(n: int, arity_max: int, ring: Ring, degree_max: int = 2) -> dict:
    """(δ+∂_ε)² = 0 on every composite of B^n_E within the bounds."""
    _, alpha = bar_twisting(n, arity_max)
    M = QuasiFreeModule(alpha, arity_max, degree_max)
    checked = 0
    for r in range(1, arity_max + 1):
        for x in sorted(M.basis(r), key=encode):
            checked += 1
            if _nonzero(apply(M.differential, M.differential(x)), ring):
                return {"ok": False, "checked": checked, "counterexample": _show(x, n)}
    return {"ok": True, "checked": checked}


def suite_projection(n: int, arity_max: int, ring: Ring) -> dict:
    """(K∘ε)∂_ε = ∂_γ(K∘ε) on generators."""
    gamma, alpha = bar_twisting(n, arity_max)
    gens = _generators(alpha, arity_max)
    for g in gens:
        x = _units(g, n)
        lhs = apply(eps_tilde, extend_to_module(alpha, x))
        rhs = apply(lambda y: extend_to_module(gamma, y), eps_tilde(x))
        if _nonzero(_diff(lhs, rhs), ring):
            return {"ok": False, "checked": len(gens), "counterexample": format_word(g, n)}
    return {"ok": True, "checked": len(gens)}


def suite_coderivation(n: int, arity_max: int, ring: Ring) -> dict:
    """Δ∂_ε = (∂_ε⊗id + id⊗∂_ε)Δ on generators."""
    _, alpha = bar_twisting(n, arity_max)
    E = alpha.operad
    gens = _generators(alpha, arity_max)
    for g in gens:
        x = _units(g, n)
        lhs: dict = {}
        for y, c in extend_to_module(alpha, x).items():
            for z, c2 in deconcatenate_composite(y, n, E).items():
                add_term(lhs, z, c * c2)
        rhs: dict = {}
        for (a, b), c in deconcatenate_composite(x, n, E).items():
            for a2, c2 in extend_to_module(alpha, a).items():
                add_term(rhs, (a2, b), c * c2)
            s = -1 if composite_degree(a, n, E) % 2 else 1
            for b2, c2 in extend_to_module(alpha, b).items():
                add_term(rhs, (a, b2), s * c * c2)
        if _nonzero(_diff(lhs, rhs), ring):
            return {"ok": False, "checked": len(gens), "counterexample": format_word(g, n)}
    return {"ok": True, "checked": len(gens)}


def _suite_restrict(n: int, arity_max: int, cells: bool) -> dict:
    _, alpha = bar_twisting(n, arity_max)
    try:
        restrict_to_en(alpha, n, cells=cells)
    except RestrictionViolation as exc:
        return {"ok": False, "checked": len(alpha.table), "counterexample": str(exc)}
    return {"ok": True, "checked": len(alpha.table)}


def suite_restriction(n: int, arity_max: int, ring: Ring) -> dict:
    """Every simplex of every ∂_ε(ξ) has filtration level ≤ n."""
    return _suite_restrict(n, arity_max, cells=False)


def suite_cell(n: int, arity_max: int, ring: Ring) -> dict:
    """Every term of ∂_ε(ξ) lies in the minimal complete-graph cell of ξ."""
    return _suite_restrict(n, arity_max, cells=True)


def suite_suspension(n: int, arity_max: int, ring: Ring) -> dict:
    """∂_ε on a suspended word (g) is minus the suspension of ∂_ε(g)."""
    lo, hi = (n - 1, n) if n > 1 else (1, 2)
    _, a_lo = bar_twisting(lo, arity_max)
    _, a_hi = bar_twisting(hi, arity_max)
    gens = _generators(a_lo, arity_max)
    for g in gens:
        expected = {((h,), ps): -c for (h, ps), c in a_lo(g).items()}
        if _nonzero(_diff(a_hi((g,)), expected), ring):
            return {"ok": False, "checked": len(gens), "counterexample": format_word(g, lo)}
    return {"ok": True, "checked": len(gens), "levels": [lo, hi]}


def run_suite(name: str, n: int, arity_max: int, ring: Ring, degree_max: int = 2) -> dict:
    if name == "twisting":
        return suite_twisting(n, arity_max, ring, degree_max)
    fn = {
        "projection": suite_projection,
        "coderivation": suite_coderivation,
        "cell": suite_cell,
        "restriction": suite_restriction,
        "suspension": suite_suspension,
    }[name]
    return fn(n, arity_max, ring)


def _guard_twisting(n: int, arity_max: int) -> None:
    if arity_max > TWISTING_LIMIT.get(n, 3):
        est = sum(len(generators(n, k)) for k in range(1, arity_max + 1))
        raise BoundsTooLarge(est, sum(len(generators(n, k)) for k in range(1, TWISTING_LIMIT.get(n, 3) + 1)))


# ---------------------------------------------------------------------------
# commands


def cmd_verify(cfg: RunConfig, suites: list[str]) -> tuple[int, str]:
    _guard_twisting(cfg.n, cfg.arity_max)
    results = {s: run_suite(s, cfg.n, cfg.arity_max, cfg.ring, cfg.degree_max) for s in suites}
    ok = all(r["ok"] for r in results.values())
    doc = {
        "command": "verify", "n": cfg.n, "arity_max": cfg.arity_max, "degree_max": cfg.degree_max,
        "ring": str(cfg.ring), "ok": ok, "suites": results,
    }
    if cfg.fmt == "json":
        text = json.dumps(doc, sort_keys=True, indent=1) + "\n"
    else:
        lines = [f"verify n={cfg.n} arity_max={cfg.arity_max} ring={cfg.ring}"]
        for s, r in results.items():
            line = f"  {s}: {'pass' if r['ok'] else 'FAIL'} ({r['checked']} checked)"
            if not r["ok"]:
                line += f" counterexample {r['counterexample']}"
            lines.append(line)
        text = "\n".join(lines) + "\n"
    return (0 if ok else 1), text


def cmd_homology(cfg: RunConfig, obj: str, arities: list[int], algebra: str,
                 window: tuple[int, int]) -> tuple[int, str]:
    if obj == "stabilization":
        reports = [stabilization_scan(r, window, cfg.ring, max(cfg.n, 2)) for r in arities]
        ok = all(rep.ok for rep in reports)
        return (0 if ok else 1), "".join(rep.render(cfg.fmt) for rep in reports)
    if obj == "bar-eval":
        arities = list(range(1, cfg.weight_max + 1))
    rep = homology_report(obj, cfg.ring, cfg.n, arities, algebra, cfg.threads)
    return 0, rep.render(cfg.fmt)


def _dims_line(dims: dict) -> str:
    return " ".join(f"{d}:{c}" for d, c in sorted(dims.items()))


def _format_lin(v: dict) -> str:
    parts = []
    for x, c in sorted(v.items(), key=lambda t: format_simplex(t[0])):
        sign = "+" if c > 0 else "-"
        mag = "" if abs(c) == 1 else str(abs(c))
        parts.append(f"{sign}{mag}{format_simplex(x)}")
    return " ".join(parts) if parts else "0"


def cmd_info(cfg: RunConfig, obj: str, arity: int, m: int) -> tuple[int, str]:
    n = cfg.n
    e = tuple(range(1, arity + 1))
    if obj == "tn":
        ws = words(n, e)
        dims: dict = {}
        for w in ws:
            d = _word_deg(w, n)
            dims[d] = dims.get(d, 0) + 1
        text = f"T^{n}({arity}) total {len(ws)} by degree {_dims_line(dims)}\n"
    elif obj == "gn":
        lines = []
        for k in range(1, arity + 1):
            gs = generators(n, k)
            dims = {}
            for g in gs:
                d = _word_deg(g, n)
                dims[d] = dims.get(d, 0) + 1
            lines.append(f"G^{n}({k}) total {len(gs)} by degree {_dims_line(dims)}")
        text = "\n".join(lines) + "\n"
    elif obj == "en":
        _guard_en(n, arity)
        dims = en_complex(n, arity).dims()
        text = f"E_{n}({arity}) total {sum(dims.values())} by degree {_dims_line(dims)}\n"
    elif obj == "levels":
        _guard_en(n, arity)
        counts: dict = {}
        for x in enumerate_en(n, arity):
            lv = filtration_level(x)
            counts[lv] = counts.get(lv, 0) + 1
        text = f"E_{n}({arity}) simplices by filtration level {_dims_line(counts)}\n"
    elif obj == "cup":
        text = f"u_{m} = {_format_lin(cup_product(m))}\n"
    elif obj == "twisting":
        _guard_twisting(n, arity)
        _, alpha = bar_twisting(n, arity)
        text = alpha.to_json() + "\n"
    else:
        raise UsageError(f"unknown info object {obj!r}")
    return 0, text


def _word_deg(w, n: int) -> int:
    return word_degree(w, n)


def _guard_en(n: int, arity: int) -> None:
    if n > 1 and arity > (4 if n == 2 else 3):
        raise BoundsTooLarge(bar_module_size(n, arity, "E_n"))


# ---------------------------------------------------------------------------
# argument handling


def _positive(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="enbar", description="Iterated bar modules over E_n-operads.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--ring", help="z, q or fp:<prime> (env ENBAR_RING, default z)")
        sp.add_argument("--n", type=_positive, default=2, help="bar level (default 2)")
        sp.add_argument("--format", choices=("json", "csv", "text"), default="json")
        sp.add_argument("--threads", type=_positive, help="worker count (env ENBAR_THREADS)")
        sp.add_argument("--output", help="write the report to this path")

    v = sub.add_parser("verify", help="run the verification suites")
    common(v)
    v.add_argument("--arity-max", type=_positive, default=3)
    v.add_argument("--degree-max", type=_positive, default=2, help="per-element simplex degree bound")
    v.add_argument("--suite", action="append", choices=SUITES, help="repeatable; default all")

    h = sub.add_parser("homology", help="homology reports")
    common(h)
    h.add_argument("--object", choices=OBJECTS, required=True)
    h.add_argument("--arity", type=_positive, action="append", help="repeatable")
    h.add_argument("--arity-max", type=_positive)
    h.add_argument("--degree-max", type=_positive, help="weight bound for bar-eval")
    h.add_argument("--weight-max", type=_positive)
    h.add_argument("--algebra", default="trivial:1")
    h.add_argument("--window", type=int, nargs=2, default=(0, 4), metavar=("LO", "HI"))

    i = sub.add_parser("info", help="dimension tables and serialized data")
    common(i)
    i.add_argument("--object", choices=INFO, required=True)
    i.add_argument("--arity", type=_positive, default=3)
    i.add_argument("--m", type=int, default=1)
    return p


def _config(args) -> RunConfig:
    ring_spec = args.ring or os.environ.get("ENBAR_RING") or "z"
    try:
        ring = Ring.parse(ring_spec)
    except RingError as exc:
        raise UsageError(str(exc)) from None
    threads = args.threads
    if threads is None:
        env = os.environ.get("ENBAR_THREADS")
        try:
            threads = int(env) if env else 1
        except ValueError:
            raise UsageError(f"ENBAR_THREADS={env!r} is not an integer") from None
    degree_max = getattr(args, "degree_max", None) or 2
    weight_max = getattr(args, "weight_max", None) or getattr(args, "degree_max", None) or 4
    return RunConfig(
        ring=ring, n=args.n, arity_max=getattr(args, "arity_max", None) or 3,
        degree_max=degree_max, weight_max=weight_max, threads=threads,
        fmt=args.format, output=args.output,
    )


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config(args)
        if args.command == "verify":
            status, text = cmd_verify(cfg, args.suite or list(SUITES))
        elif args.command == "homology":
            arities = sorted(set(args.arity or range(1, cfg.arity_max + 1)))
            status, text = cmd_homology(cfg, args.object, arities, args.algebra, tuple(args.window))
        else:
            status, text = cmd_info(cfg, args.object, args.arity, args.m)
    except (UsageError, BoundsTooLarge, ValueError) as exc:
        print(f"enbar: error: {exc}", file=sys.stderr)
        return 2
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
