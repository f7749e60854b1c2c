"""Level words, shuffle products, iterated bar complexes, γ and T^n cells."""

import itertools
import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from enbar.barcx import (
    SIGMA_C,
    CommutativeAlgebra,
    IteratedBar,
    build_gamma,
    build_Tn,
    canonicalize,
    deconcatenate,
    format_word,
    generators,
    in_tn_cell,
    is_canonical,
    map_leaves,
    minimal_cell,
    parse_word,
    relabel_word,
    shuffle_product,
    suspend_word,
    word_degree,
    word_leaves,
    words,
)
from enbar.operads import CompleteGraph
from enbar.symseq import add_term, graded_dims


class OddEven(CommutativeAlgebra):
    """Graded commutative Λ(a) ⊗ k[b], |a| = 1, |b| = 2, with d b = a.

    Basis element (i, j) is a^i b^j.
    """

    def degree(self, m):
        return m[0] + 2 * m[1]

    def product(self, x, y):
        if x[0] + y[0] > 1:
            return {}
        return {(x[0] + y[0], x[1] + y[1]): 1}

    def differential(self, m):
        i, j = m
        if i == 0 and j > 0:
            return {(1, j - 1): j}
        return {}


@pytest.mark.parametrize("n", [1, 2, 3, 4])
@pytest.mark.parametrize("r", [1, 2, 3, 4])
def test_generator_count(n, r):
    # a canonical word is a choice of separation level for each adjacent pair of leaves
    assert len(generators(n, r)) == n ** (r - 1)


@pytest.mark.parametrize("n, r", [(1, 3), (2, 3), (3, 2), (2, 4)])
def test_word_count(n, r):
    assert len(words(n, tuple(range(1, r + 1)))) == math.factorial(r) * n ** (r - 1)


def test_tn_total_dimension_and_degrees():
    assert sum(graded_dims(build_Tn(2, 3), 3).values()) == 24
    assert graded_dims(build_Tn(2, 3), 3) == {4: 6, 5: 12, 6: 6}


@pytest.mark.parametrize(
    "text, n, degree",
    [("(1)", 1, 1), ("(1)(2)", 1, 2), ("((1)(2))((3))", 2, 5), ("(((1)))", 3, 3)],
)
def test_word_text_and_degree(text, n, degree):
    w, level = parse_word(text)
    assert level == n and format_word(w, n) == text
    assert word_degree(w, n) == degree


@pytest.mark.parametrize("bad", ["", "(1", "(1)x", "((1))(2)", "()"])
def test_parse_word_rejects(bad):
    with pytest.raises((ValueError, IndexError)):
        parse_word(bad)


word_cases = st.sampled_from([(n, w) for n in (1, 2, 3) for w in words(n, (1, 2, 3))])


@given(word_cases)
def test_canonicalize_round_trip(case):
    n, w = case
    g, u, sign = canonicalize(w, n)
    assert sign == 1 and is_canonical(g, n)
    assert relabel_word(g, n, u) == w
    assert g in generators(n, 3)


def test_suspension_embedding():
    w, _ = parse_word("(1)(2)")
    assert format_word(suspend_word(w), 2) == "((1)(2))"
    assert word_degree(suspend_word(w), 2) == word_degree(w, 1) + 1


seqs = st.lists(st.sampled_from([(0, 0), (1, 0), (0, 1), (1, 1)]), min_size=1, max_size=3).map(tuple)
A = OddEven()


def sdeg(f):
    return A.degree(f)


@given(seqs, seqs)
def test_shuffle_graded_commutative(x, y):
    dx = sum(sdeg(f) + 1 for f in x)
    dy = sum(sdeg(f) + 1 for f in y)
    yx = shuffle_product(y, x, sdeg)
    s = -1 if (dx * dy) % 2 else 1
    assert shuffle_product(x, y, sdeg) == {k: s * c for k, c in yx.items()}


@given(seqs, seqs, seqs)
def test_shuffle_associative(x, y, z):
    def mul(u, v):
        out: dict = {}
        for a, c in u.items():
            for b, c2 in v.items():
                for w, c3 in shuffle_product(a, b, sdeg).items():
                    add_term(out, w, c * c2 * c3)
        return out

    assert mul(mul({x: 1}, {y: 1}), {z: 1}) == mul({x: 1}, mul({y: 1}, {z: 1}))


def test_shuffle_count():
    out = shuffle_product(((0, 0),) * 2, ((0, 0),) * 3, sdeg)
    assert sum(abs(c) for c in out.values()) <= math.comb(5, 2)


def test_deconcatenate():
    assert deconcatenate(("a", "b", "c")) == [(("a",), ("b", "c")), (("a", "b"), ("c",))]


def leaf_words(n, leaves):
    """Level-n words over an arbitrary leaf alphabet with up to three leaves."""
    out = []
    for k in (1, 2, 3):
        for w in words(n, tuple(range(1, k + 1))):
            for combo in itertools.product(leaves, repeat=k):
                out.append(map_leaves(w, n, lambda l, c=combo: c[l - 1]))
    return out


@pytest.mark.parametrize("n", [1, 2])
def test_bar_differential_squares_to_zero_with_odd_elements(n):
    bar = IteratedBar(A)
    for w in leaf_words(n, [(1, 0), (0, 1), (1, 1), (0, 2)]):
        assert not bar.linear_differential(bar.differential(w, n), n)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_bar_differential_on_commutative_operad(n):
    bar = IteratedBar(SIGMA_C)
    for w in words(n, (1, 2, 3, 4)):
        v = map_leaves(w, n, lambda l: frozenset((l,)))
        assert not bar.linear_differential(bar.differential(v, n), n)


def test_bar_product_is_derivation_compatible():
    # d(x * y) = dx * y + (-1)^{|x|} x * dy in B^1(A)
    bar = IteratedBar(A)
    for x, y in itertools.product(leaf_words(1, [(1, 0), (0, 1)])[:6], repeat=2):
        lhs = bar.linear_differential(bar.product(x, y, 1), 1)
        rhs: dict = {}
        for a, c in bar.differential(x, 1).items():
            for b, c2 in bar.product(a, y, 1).items():
                add_term(rhs, b, c * c2)
        s = -1 if bar.degree(x, 1) % 2 else 1
        for a, c in bar.differential(y, 1).items():
            for b, c2 in bar.product(x, a, 1).items():
                add_term(rhs, b, s * c * c2)
        assert lhs == rhs


def test_gamma_level_one():
    gamma = build_gamma(1, 3)
    g, _ = parse_word("(1)(2)")
    # merging the two suspended factors: the sign is (-1)^{|s x_1|} = -1
    assert gamma(g) == {((1,), (frozenset({1, 2}),)): -1}
    assert gamma((1,)) == {}


def test_gamma_level_two_has_shuffle_and_merge_terms():
    gamma = build_gamma(2, 2)
    g, _ = parse_word("((1))((2))")
    terms = {format_word(h, 2) + str([sorted(p) for p in ps]): c for (h, ps), c in gamma(g).items()}
    # [[x1]|[x2]] ↦ (-1)^{ε_1}[[x1]*[x2]] with ε_1 = 2, and [x1]*[x2] = [x1|x2] - [x2|x1]
    assert terms == {"((1)(2))[[1], [2]]": 1, "((1)(2))[[2], [1]]": -1}


def test_gamma_json_is_deterministic():
    a = build_gamma(2, 3).to_json()
    assert a == build_gamma(2, 3).to_json()
    doc = json.loads(a)
    assert doc["n"] == 2 and doc["operad"] == "C"
    assert len(doc["table"]) == sum(len(generators(2, r)) for r in (1, 2, 3))


@given(st.sampled_from([(n, w) for n in (1, 2, 3) for w in words(n, (1, 2, 3))]))
def test_minimal_cell(case):
    n, w = case
    k = minimal_cell(w, n)
    assert in_tn_cell(w, n, k)
    # lowering any weight leaves the cell
    for pair, m in k.mu.items():
        if m == 0:
            continue
        lower = dict(k.mu)
        lower[pair] = m - 1
        assert not in_tn_cell(w, n, CompleteGraph.make(lower, k.sigma))


def test_minimal_cell_weights():
    w, _ = parse_word("((2)(1))((3))")
    k = minimal_cell(w, 2)
    assert k.mu == {(1, 2): 1, (1, 3): 1, (2, 3): 1}
    assert word_leaves(w, 2) == [2, 1, 3]
