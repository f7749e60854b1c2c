"""Exact scalars over Z, Q, F_p and sparse elimination for homology."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

__all__ = [
    "Ring",
    "ZZ",
    "QQ",
    "SparseMatrix",
    "HomologyDegree",
    "HomologySummary",
    "RingError",
    "CompositionNonzero",
    "smith_normal_form",
    "rank",
    "chain_homology",
]


class RingError(ValueError):
    """Raised when an operation is called over the wrong ring."""


class CompositionNonzero(ArithmeticError):
    """Raised when a pair of differentials does not compose to zero."""


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class Ring:
    """Ground ring: ``"Z"``, ``"Q"`` or ``"Fp"`` with a prime ``p``."""

    kind: str
    p: int = 0

    def __post_init__(self) -> None:
        if self.kind not in ("Z", "Q", "Fp"):
            raise RingError(f"unknown ring kind {self.kind!r}")
        if self.kind == "Fp" and not _is_prime(self.p):
            raise RingError(f"{self.p} is not prime")
        if self.kind != "Fp" and self.p:
            raise RingError("only prime fields carry a characteristic")

    @classmethod
    def parse(cls, spec: str) -> "Ring":
        """Parse ``z``, ``q`` or ``fp:<prime>``."""
        s = spec.strip().lower()
        if s in ("z", "zz", "integers"):
            return ZZ
        if s in ("q", "qq", "rationals"):
            return QQ
        if s.startswith("fp:") or s.startswith("f"):
            digits = s[3:] if s.startswith("fp:") else s[1:]
            try:
                p = int(digits)
            except ValueError:
                raise RingError(f"malformed ring spec {spec!r}") from None
            return cls("Fp", p)
        raise RingError(f"malformed ring spec {spec!r}")

    @property
    def is_field(self) -> bool:
        return self.kind != "Z"

    @property
    def characteristic(self) -> int:
        return self.p

    def __str__(self) -> str:
        return {"Z": "z", "Q": "q"}.get(self.kind) or f"fp:{self.p}"

    def __call__(self, v) -> int | Fraction:
        """Canonical representative of ``v``."""
        if self.kind == "Z":
            if isinstance(v, Fraction):
                if v.denominator != 1:
                    raise RingError(f"{v} is not an integer")
                return v.numerator
            return int(v)
        if self.kind == "Q":
            f = Fraction(v)
            return f.numerator if f.denominator == 1 else f
        if isinstance(v, Fraction):
            return v.numerator * pow(v.denominator, -1, self.p) % self.p
        return int(v) % self.p

    def inv(self, v):
        if self.kind == "Z":
            if v in (1, -1):
                return v
            raise ZeroDivisionError(f"{v} is not a unit in Z")
        if self.kind == "Q":
            return self(1 / Fraction(v))
        if self(v) == 0:
            raise ZeroDivisionError(f"{v} is not a unit in {self}")
        return pow(int(v), -1, self.p)

    def is_unit(self, v) -> bool:
        if self.kind == "Z":
            return v in (1, -1)
        return v != 0


ZZ = Ring("Z")
QQ = Ring("Q")


@dataclass
class SparseMatrix:
    """A ``rows`` x ``cols`` matrix with only nonzero entries stored."""

    rows: int
    cols: int
    ring: Ring = ZZ
    entries: dict[tuple[int, int], int | Fraction] = field(default_factory=dict)

    def __post_init__(self) -> None:
        clean = {}
        for (i, j), v in self.entries.items():
            if not (0 <= i < self.rows and 0 <= j < self.cols):
                raise IndexError(f"entry ({i},{j}) outside {self.rows}x{self.cols}")
            v = self.ring(v)
            if v:
                clean[(i, j)] = v
        self.entries = clean

    @classmethod
    def from_dense(cls, rows: Iterable[Iterable], ring: Ring = ZZ) -> "SparseMatrix":
        data = [list(r) for r in rows]
        ncols = len(data[0]) if data else 0
        ent = {(i, j): v for i, r in enumerate(data) for j, v in enumerate(r) if v}
        return cls(len(data), ncols, ring, ent)

    @classmethod
    def from_columns(
        cls, rows: int, columns: Iterable[Mapping[int, int]], ring: Ring = ZZ
    ) -> "SparseMatrix":
        ent = {}
        ncols = 0
        for j, col in enumerate(columns):
            ncols = j + 1
            for i, v in col.items():
                ent[(i, j)] = v
        return cls(rows, ncols, ring, ent)

    def to_dense(self) -> list[list]:
        out = [[0] * self.cols for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            out[i][j] = v
        return out

    def over(self, ring: Ring) -> "SparseMatrix":
        return SparseMatrix(self.rows, self.cols, ring, dict(self.entries))

    @property
    def nnz(self) -> int:
        return len(self.entries)

    def is_zero(self) -> bool:
        return not self.entries

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        by_row: dict[int, list[tuple[int, object]]] = {}
        for (k, j), v in other.entries.items():
            by_row.setdefault(k, []).append((j, v))
        acc: dict[tuple[int, int], object] = {}
        for (i, k), a in self.entries.items():
            for j, b in by_row.get(k, ()):
                acc[(i, j)] = acc.get((i, j), 0) + a * b
        return SparseMatrix(self.rows, other.cols, self.ring, acc)

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix(self.cols, self.rows, self.ring, {(j, i): v for (i, j), v in self.entries.items()})


@dataclass(frozen=True)
class HomologyDegree:
    degree: int
    free_rank: int
    torsion: tuple[int, ...] = ()


@dataclass
class HomologySummary:
    """Per-degree homology records, sorted by degree."""

    ring: Ring
    records: list[HomologyDegree] = field(default_factory=list)

    def ranks(self) -> dict[int, int]:
        return {r.degree: r.free_rank for r in self.records if r.free_rank}

    def torsion(self) -> dict[int, tuple[int, ...]]:
        return {r.degree: r.torsion for r in self.records if r.torsion}

    def is_zero(self) -> bool:
        return not self.ranks() and not self.torsion()


# ---------------------------------------------------------------------------
# elimination core


class _Eliminator:
    """Row-dict storage with a column index; used by both SNF and rank."""

    def __init__(self, m: SparseMatrix, ring: Ring):
        self.ring = ring
        self.rows: dict[int, dict[int, object]] = {}
        self.cols: dict[int, set[int]] = {}
        for (i, j), v in m.entries.items():
            v = ring(v)
            if v:
                self.rows.setdefault(i, {})[j] = v
                self.cols.setdefault(j, set()).add(i)

    def _set(self, i: int, j: int, v) -> None:
        row = self.rows.setdefault(i, {})
        if v:
            if j not in row:
                self.cols.setdefault(j, set()).add(i)
            row[j] = v
        elif j in row:
            del row[j]
            s = self.cols[j]
            s.discard(i)
            if not s:
                del self.cols[j]

    def add_row_multiple(self, target: int, source: int, c) -> None:
        """row[target] += c * row[source]."""
        ring = self.ring
        trow = self.rows.setdefault(target, {})
        for j, v in self.rows[source].items():
            self._set(target, j, ring(trow.get(j, 0) + c * v))
        if not self.rows[target]:
            del self.rows[target]

    def drop(self, i: int, j: int) -> None:
        """Remove row ``i`` and column ``j`` (pivot row and column)."""
        for l in list(self.rows.get(i, {})):
            self._set(i, l, 0)
        self.rows.pop(i, None)
        for k in list(self.cols.get(j, ())):
            self._set(k, j, 0)
        for k in [k for k, r in self.rows.items() if not r]:
            del self.rows[k]

    def unit_pivot(self):
        """Leftmost column holding a unit entry, topmost such row."""
        ring = self.ring
        for j in sorted(self.cols):
            best = None
            for i in self.cols[j]:
                if ring.is_unit(self.rows[i][j]) and (best is None or i < best):
                    best = i
            if best is not None:
                return best, j
        return None

    def smallest_pivot(self):
        best = None
        for j in sorted(self.cols):
            for i in sorted(self.cols[j]):
                key = (abs(self.rows[i][j]), j, i)
                if best is None or key < best:
                    best = key
        return None if best is None else (best[2], best[1])


def _field_eliminate(m: SparseMatrix, ring: Ring) -> int:
    e = _Eliminator(m, ring)
    r = 0
    while e.cols:
        j = min(e.cols)
        i = min(e.cols[j])
        v = e.rows[i][j]
        vinv = ring.inv(v)
        for k in sorted(e.cols[j] - {i}):
            e.add_row_multiple(k, i, ring(-e.rows[k][j] * vinv))
        e.drop(i, j)
        r += 1
    return r


def _int_diagonal(m: SparseMatrix) -> list[int]:
    """Nonzero diagonal of an integer matrix reduced by unimodular operations."""
    e = _Eliminator(m, ZZ)
    diag: list[int] = []
    while e.cols:
        piv = e.unit_pivot()
        if piv is not None:
            i, j = piv
            v = e.rows[i][j]
            for k in sorted(e.cols[j] - {i}):
                e.add_row_multiple(k, i, -e.rows[k][j] * v)
            e.drop(i, j)
            diag.append(1)
            continue
        i, j = e.smallest_pivot()
        while True:
            v = e.rows[i][j]
            for k in sorted(e.cols[j] - {i}):
                q = e.rows[k][j] // v
                if q:
                    e.add_row_multiple(k, i, -q)
            rest = sorted(e.cols[j] - {i}, key=lambda k: (abs(e.rows[k][j]), k))
            if rest:
                i = rest[0]
                continue
            # column j is clean; reduce row i by column operations
            row = e.rows[i]
            for l in sorted(row):
                if l != j:
                    e._set(i, l, row[l] - (row[l] // v) * v)
            rest_cols = sorted((l for l in e.rows[i] if l != j), key=lambda l: (abs(e.rows[i][l]), l))
            if rest_cols:
                # a remainder smaller than v sits in row i: move the pivot there.
                # Column ops that cleared row i only touched row i, since column j is clean.
                j = rest_cols[0]
                continue
            diag.append(abs(v))
            e.drop(i, j)
            break
    return diag


def _invariant_factors(diag: list[int]) -> list[int]:
    """Turn any nonzero diagonal into the divisibility chain d_1 | d_2 | ..."""
    d = sorted(x for x in diag if x != 1)
    ones = len(diag) - len(d)
    changed = True
    while changed:
        changed = False
        for a in range(len(d)):
            for b in range(a + 1, len(d)):
                g = math.gcd(d[a], d[b])
                if g != d[a]:
                    d[a], d[b] = g, d[a] * d[b] // g
                    changed = True
        d.sort()
    ones += sum(1 for x in d if x == 1)
    return [1] * ones + [x for x in d if x != 1]


def _certify(m: SparseMatrix, factors: list[int]) -> None:
    """Cross-check against determinantal divisors on small inputs."""
    dense = m.to_dense()
    if m.rows * m.cols > 64 or not dense:
        return
    import itertools

    k = len(factors)
    prev = 1
    for size in range(1, min(m.rows, m.cols) + 1):
        g = 0
        for rs in itertools.combinations(range(m.rows), size):
            for cs in itertools.combinations(range(m.cols), size):
                g = math.gcd(g, _det([[dense[r][c] for c in cs] for r in rs]))
        expected = math.prod(factors[:size]) if size <= k else 0
        if g != expected:
            raise AssertionError(f"SNF certification failed at minor size {size}")
        prev = g
    del prev


def _det(a: list[list[int]]) -> int:
    n = len(a)
    m = [[Fraction(x) for x in row] for row in a]
    det = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if m[r][c]), None)
        if p is None:
            return 0
        if p != c:
            m[c], m[p] = m[p], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            if f:
                for cc in range(c, n):
                    m[r][cc] -= f * m[c][cc]
    return int(det)


def smith_normal_form(m: SparseMatrix, certify: bool = True) -> list[int]:
    """Invariant factors ``d_1 | d_2 | ... | d_k`` of an integer matrix, k = rank."""
    if m.ring.kind != "Z":
        raise RingError("smith_normal_form needs an integer matrix")
    factors = _invariant_factors(_int_diagonal(m))
    if certify:
        _certify(m, factors)
    return factors


def rank(m: SparseMatrix) -> int:
    """Rank over a field by exact elimination."""
    if not m.ring.is_field:
        raise RingError("rank needs a field; use smith_normal_form over Z")
    return _field_eliminate(m, m.ring)


def _rank_any(m: SparseMatrix, ring: Ring) -> tuple[int, tuple[int, ...]]:
    if ring.kind == "Z":
        f = smith_normal_form(m.over(ZZ), certify=False)
        return len(f), tuple(x for x in f if x > 1)
    return _field_eliminate(m.over(ring), ring), ()


def chain_homology(d_in: SparseMatrix, d_out: SparseMatrix, ring: Ring, degree: int = 0) -> HomologyDegree:
    """Homology at the middle term of ``C_{k+1} --d_in--> C_k --d_out--> C_{k-1}``."""
    if d_in.rows != d_out.cols:
        raise ValueError("differentials do not share the middle space")
    if not (d_out.over(ring) @ d_in.over(ring)).is_zero():
        raise CompositionNonzero(f"d∘d != 0 in degree {degree}")
    r_out, _ = _rank_any(d_out, ring)
    r_in, tors = _rank_any(d_in, ring)
    return HomologyDegree(degree, d_out.cols - r_out - r_in, tors)
