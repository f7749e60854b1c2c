"""Evaluation on algebras, finite complexes, homology checks and reports."""

import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from enbar.barcx import build_gamma
from enbar.evalhom import (
    ActionIncomplete,
    BoundsTooLarge,
    FiniteComplex,
    augmentation_to_unit,
    bar_module_complex,
    commutative_sigma_algebra,
    en_homology,
    evaluate_module,
    free_commutative_algebra,
    free_commutative_check,
    gerstenhaber_dims,
    harrison_acyclicity_check,
    harrison_quotient,
    homology_report,
    lie_coinvariant_dim,
    operad_algebra,
    parse_algebra,
    stabilization_scan,
    trivial_algebra,
    trivial_algebra_check,
    trivial_algebra_oracle,
    uct_consistent,
)
from enbar.exactlin import QQ, ZZ, Ring, SparseMatrix, rank
from enbar.lifting import bar_twisting, total_differential
from enbar.operads import BarrattEccles, CommutativeOperad
from enbar.symseq import LieModule, set_partitions

F2 = Ring.parse("fp:2")
F3 = Ring.parse("fp:3")


def sign_coinvariants(s):
    """dim (Lie(s) ⊗ sgn)_{Σ_s} from the relations σx + x for adjacent transpositions σ."""
    L = LieModule(QQ, arity_max=s)
    basis = L.basis(tuple(range(1, s + 1)))
    index = {b: i for i, b in enumerate(basis)}
    cols = []
    for x in basis:
        for i in range(1, s):
            m = {j: j for j in range(1, s + 1)}
            m[i], m[i + 1] = i + 1, i
            v = {index[y]: c for y, c in L.relabel(m, x).items()}
            v[index[x]] = v.get(index[x], 0) + 1
            cols.append(v)
    if not cols:
        return len(basis)
    return len(basis) - rank(SparseMatrix.from_columns(len(basis), cols, QQ))


@pytest.mark.parametrize("s", [1, 2, 3, 4, 5])
def test_lie_coinvariants_match_direct_computation(s):
    assert lie_coinvariant_dim(s) == sign_coinvariants(s)


def test_lie_coinvariants_values():
    assert [lie_coinvariant_dim(s) for s in range(1, 9)] == [1, 1, 0, 0, 0, 0, 0, 0]


@given(st.integers(1, 3), st.integers(1, 6))
def test_gerstenhaber_total_is_factorial(n, r):
    assert sum(gerstenhaber_dims(n, r).values()) == math.factorial(r)


@pytest.mark.parametrize(
    "n, r, dims",
    [(2, 2, {0: 1, 1: 1}), (2, 3, {0: 1, 1: 3, 2: 2}), (1, 3, {0: 6}), (3, 3, {0: 1, 2: 3, 4: 2})],
)
def test_gerstenhaber_dims(n, r, dims):
    assert gerstenhaber_dims(n, r) == dims


@pytest.mark.parametrize("n, r", [(2, 2), (2, 3), (3, 2), (3, 3), (1, 3)])
def test_en_homology_matches_gerstenhaber(n, r):
    h = en_homology(n, r, ZZ)
    assert h.ranks() == {d: c for d, c in gerstenhaber_dims(n, r).items() if c}
    assert not h.torsion()


@pytest.mark.parametrize("r", [1, 2, 3, 4])
def test_e1_is_associative(r):
    assert en_homology(1, r, F2).ranks() == {0: math.factorial(r)}


def test_trivial_algebra_on_b1c():
    gamma = build_gamma(1, 5)
    A = trivial_algebra(1)
    for w in range(1, 6):
        cx = evaluate_module(gamma, A, w)
        assert all(not cx.differential(x) for b in cx.basis.values() for x in b)
        assert cx.homology(ZZ).ranks() == {w: 1}


@pytest.mark.parametrize("n", [1, 2, 3])
def test_commutative_operad_as_algebra_reproduces_module(n):
    gamma = build_gamma(n, 4)
    cx = evaluate_module(gamma, operad_algebra(CommutativeOperad(ZZ, 4)), 4 if n < 3 else 3)
    for b in cx.basis.values():
        for x in b:
            assert cx.differential(x) == total_differential(gamma, x)


def test_barratt_eccles_as_algebra_reproduces_module():
    _, alpha = bar_twisting(2, 3)
    cx = evaluate_module(alpha, operad_algebra(alpha.operad, 1), 3)
    for b in cx.basis.values():
        for x in b:
            assert cx.differential(x) == total_differential(alpha, x)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_weight_one_is_suspension(n):
    cx = evaluate_module(build_gamma(n, 1), trivial_algebra(2), 1)
    assert cx.dims() == {n: 2}


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("r", [1, 2, 3])
def test_restriction_identity(n, r):
    gamma, alpha = bar_twisting(n, 3)
    A = commutative_sigma_algebra()
    c1, c2 = evaluate_module(gamma, A, r), evaluate_module(alpha, A, r)
    assert c1.basis == c2.basis
    for b in c1.basis.values():
        for x in b:
            assert c1.differential(x) == c2.differential(x)


def test_free_commutative_weight_is_preserved():
    A = free_commutative_algebra()
    _, alpha = bar_twisting(2, 4)
    for w in range(1, 5):
        cx = evaluate_module(alpha, A, w)
        assert cx.check_square_zero()
        for b in cx.basis.values():
            for x in b:
                for (g, slots) in cx.differential(x):
                    assert sum(a[1] for a in slots) == w


def test_action_incomplete():
    _, alpha = bar_twisting(1, 2)
    A = operad_algebra(CommutativeOperad(ZZ, 2))
    cx = evaluate_module(alpha, A, 2)
    x = next(x for x in cx.basis[2])
    with pytest.raises(ActionIncomplete):
        cx.differential(x)


@pytest.mark.parametrize("spec", ["trivial:0", "bogus", "trivial:x"])
def test_parse_algebra_rejects(spec):
    with pytest.raises(ValueError):
        parse_algebra(spec)


@pytest.mark.parametrize(
    "n, r, expected",
    [(1, 1, {1: 1}), (2, 1, {2: 1}), (1, 2, {}), (1, 3, {}), (2, 2, {}), (3, 1, {3: 1}), (3, 2, {})],
)
def test_bar_module_homology(n, r, expected):
    h = bar_module_complex(n, r, "E_n").homology(ZZ)
    assert h.ranks() == expected and not h.torsion()


@pytest.mark.parametrize("n, r", [(1, 3), (2, 2), (2, 3)])
def test_bar_module_square_zero(n, r):
    assert bar_module_complex(n, r, "E_n").check_square_zero()
    assert bar_module_complex(n, r, "E", degree_max=2).check_square_zero()


def test_bar_module_size_guard():
    with pytest.raises(BoundsTooLarge) as info:
        bar_module_complex(2, 5, "E_n")
    assert info.value.estimate > info.value.limit


@pytest.mark.parametrize("n", [1, 2])
def test_augmentation_is_chain_map(n):
    aug = augmentation_to_unit(n, BarrattEccles())
    for r in (1, 2, 3):
        cx = bar_module_complex(n, r, "E_n")
        total = 0
        for b in cx.basis.values():
            for x in b:
                total += aug(x)
                assert sum(aug(y) * c for y, c in cx.differential(x).items()) == 0
        assert total == (1 if r == 1 else 0)


@pytest.mark.parametrize("n, r, degree", [(1, 2, 2), (1, 3, 3), (2, 2, 4)])
def test_free_commutative_examples(n, r, degree):
    h = bar_module_complex(n, r, "C").homology(ZZ)
    assert h.ranks() == {degree: 1}


@pytest.mark.parametrize("n", [1, 2])
def test_free_commutative_check(n):
    assert free_commutative_check(4, ZZ, n).ok


def test_harrison_examples():
    assert harrison_quotient(1).homology(ZZ).ranks() == {1: 1}
    assert harrison_quotient(2).homology(ZZ).is_zero()
    assert harrison_quotient(3).homology(F3).is_zero()
    assert harrison_acyclicity_check(4, ZZ).ok


def test_harrison_quotient_dimensions():
    # B(C)(2) has [12] and [1|2], [2|1]; the shuffle [1]*[2] identifies the last two up to sign
    cx = harrison_quotient(2)
    assert cx.dims() == {1: 1, 2: 1}


@pytest.mark.parametrize("n", [1, 2, 3])
def test_trivial_algebra_weight_oracle(n):
    rep = trivial_algebra_check(n, 4 if n < 3 else 3, QQ, "weight")
    assert rep.ok, rep.to_text()


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("ring", [ZZ, F2])
def test_trivial_algebra_sigma_oracle(n, ring):
    assert trivial_algebra_check(n, 4 if n < 3 else 3, ring, "arity").ok


def test_trivial_algebra_examples():
    o = trivial_algebra_oracle(2, 4)
    assert o[2] == {3: 1, 4: 1}
    assert all(trivial_algebra_oracle(n, 1)[1] == {n: 1} for n in (1, 2, 3))
    assert trivial_algebra_oracle(1, 5) == {w: {w: 1} for w in range(1, 6)}


def test_sigma_oracle_matches_partitions():
    o = trivial_algebra_oracle(1, 4, "arity")
    assert o == {r: {r: math.factorial(r)} for r in range(1, 5)}
    # total dimension is the number of permutations, one cycle decomposition per term
    assert sum(trivial_algebra_oracle(2, 4, "arity")[4].values()) == 24
    assert len(set_partitions((1, 2, 3, 4))) == 15


def test_weight_version_is_characteristic_zero_only():
    z = trivial_algebra_check(2, 4, ZZ, "weight")
    f = trivial_algebra_check(2, 4, F2, "weight")
    assert not z.ok and not f.ok
    assert uct_consistent(z, f, 2)
    assert any(r.torsion == (2,) for r in z.table)


@pytest.mark.parametrize("r, ok_rank", [(1, 1), (2, 0), (3, 0)])
def test_stabilization(r, ok_rank):
    rep = stabilization_scan(r, (0, 3), ZZ, 3)
    assert rep.ok
    assert rep.notes["colimit"]["0"] == ok_rank
    if r >= 2:
        assert all(v == 0 for m in rep.notes["maps"].values() for v in m.values())


def test_finite_complex_rejects_open_differential():
    cx = FiniteComplex({1: ["a"]}, lambda x: {"b": 1})
    with pytest.raises(ValueError):
        cx.matrix(1)


def test_finite_complex_homology_circle():
    cx = FiniteComplex({0: ["v"], 1: ["e"]}, lambda x: {})
    assert cx.homology(ZZ).ranks() == {0: 1, 1: 1}


def test_report_formats_and_determinism():
    a = homology_report("en-operad", ZZ, 2, [2, 3], threads=1)
    b = homology_report("en-operad", ZZ, 2, [3, 2], threads=3)
    assert a.to_json() == b.to_json()
    doc = json.loads(a.to_json())
    assert set(doc) == {"object", "ring", "bounds", "table"}
    assert set(doc["table"][0]) == {"arity", "weight", "degree", "free_rank", "torsion"}
    assert a.to_csv().splitlines()[0] == "object,ring,arity,weight,degree,free_rank,torsion"
    assert "rank 3" in a.to_text()


@pytest.mark.parametrize("obj", ["bar-module", "en-operad", "harrison", "bar-module-c"])
def test_universal_coefficients(obj):
    z = homology_report(obj, ZZ, 2, [1, 2, 3])
    for p in (2, 3):
        assert uct_consistent(z, homology_report(obj, Ring("Fp", p), 2, [1, 2, 3]), p)


def test_uct_detects_mismatch():
    z = homology_report("en-operad", ZZ, 2, [2])
    q = homology_report("en-operad", ZZ, 1, [2])
    assert not uct_consistent(z, q, 2)


def test_bar_eval_report():
    rep = homology_report("bar-eval", QQ, 2, [1, 2], algebra="trivial:1")
    assert rep.ranks(weight=2) == {3: 1, 4: 1}
    assert all(r.arity == 0 for r in rep.table)
