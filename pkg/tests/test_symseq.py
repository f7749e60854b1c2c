"""Σ_*-modules: signs, partitions, bijections, tensor and composition products."""

import itertools
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from enbar.symseq import (
    AssociativeModule,
    Bijection,
    CommutativeModule,
    LieModule,
    UnitModule,
    composition_product,
    graded_dims,
    koszul_sign,
    operadic_suspend,
    ordered_set_partitions,
    perm_sign,
    relabel,
    set_partitions,
    suspend,
    symmetry,
    tensor_product,
)

BELL = [1, 1, 2, 5, 15, 52]
FUBINI = [1, 1, 3, 13, 75, 541]


def inversion_sign(seq):
    inv = sum(1 for a, b in itertools.combinations(range(len(seq)), 2) if seq[a] > seq[b])
    return -1 if inv % 2 else 1


permutations = st.integers(1, 6).flatmap(lambda r: st.permutations(list(range(1, r + 1))))


@given(permutations)
def test_perm_sign_matches_inversions(p):
    assert perm_sign(p) == inversion_sign(p)


@given(permutations)
def test_koszul_sign_parity_cases(p):
    order = [i - 1 for i in p]
    assert koszul_sign([0] * len(p), order) == 1
    assert koszul_sign([1] * len(p), order) == inversion_sign(p)


def test_koszul_sign_mixed():
    # moving an odd symbol past an even one costs nothing, past an odd one a sign
    assert koszul_sign([1, 2], [1, 0]) == 1
    assert koszul_sign([1, 3], [1, 0]) == -1


@pytest.mark.parametrize("r", range(0, 6))
def test_partition_counts(r):
    e = tuple(range(1, r + 1))
    assert len(set_partitions(e)) == BELL[r]
    if r:
        assert len(ordered_set_partitions(e)) == FUBINI[r]


def test_set_partitions_blocks_sorted_by_minima():
    for p in set_partitions((1, 2, 3, 4)):
        mins = [b[0] for b in p]
        assert mins == sorted(mins)
        assert sorted(x for b in p for x in b) == [1, 2, 3, 4]


@given(permutations, st.randoms())
def test_bijection_group_laws(p, rnd):
    u = Bijection.from_values(p)
    q = list(p)
    rnd.shuffle(q)
    v = Bijection(tuple(p), tuple(q))
    assert u.then(v).sign() == u.sign() * v.sign()
    assert u.then(u.inverse()).mapping == {i: i for i in u.source}


def test_bijection_rejects_non_bijection():
    with pytest.raises(ValueError):
        Bijection((1, 2), (3, 3))


@pytest.mark.parametrize(
    "module, dims",
    [
        (UnitModule(), [1, 0, 0, 0]),
        (CommutativeModule(), [1, 1, 1, 1]),
        (AssociativeModule(), [1, 2, 6, 24]),
        (LieModule(), [1, 1, 2, 6]),
    ],
)
def test_basic_module_dimensions(module, dims):
    assert [len(module.basis_arity(r)) for r in range(1, 5)] == dims


@pytest.mark.parametrize("module", [CommutativeModule(), AssociativeModule(), LieModule()])
@given(data=st.data())
def test_relabel_is_functorial(module, data):
    r = data.draw(st.integers(1, 4))
    e = tuple(range(1, r + 1))
    x = data.draw(st.sampled_from(module.basis(e)))
    p = data.draw(st.permutations(list(e)))
    q = data.draw(st.permutations(list(e)))
    u, v = Bijection(e, tuple(p)), Bijection(tuple(p), tuple(q))
    step = relabel(module, v, module.relabel(u, x))
    assert step == module.relabel(u.then(v), x)


def test_relabel_checks_inputs():
    x = AssociativeModule().basis((1, 2))[0]
    with pytest.raises(ValueError):
        AssociativeModule().relabel({1: 1, 3: 2}, x)


def test_lie_relabel_antisymmetry():
    L = LieModule()
    (x,) = L.basis((1, 2))
    assert L.relabel({1: 2, 2: 1}, x) == {x: -1}


@pytest.mark.parametrize("r", [1, 2, 3, 4])
def test_tensor_dimensions(r):
    A = AssociativeModule()
    T = tensor_product(A, A)
    assert len(T.basis_arity(r)) == (r - 1) * math.factorial(r)


def test_symmetry_is_involution():
    A = AssociativeModule()
    T = tensor_product(suspend(A, 1), suspend(A, 1))
    for z in T.basis_arity(2):
        (w, c), = symmetry(z).items()
        (back, c2), = symmetry(w).items()
        assert back == z and c * c2 == 1 and c == -1


@pytest.mark.parametrize(
    "left, right, dims",
    [
        (CommutativeModule(), AssociativeModule(), [1, 3, 13, 73]),
        (CommutativeModule(), LieModule(), [1, 2, 6, 24]),
        (AssociativeModule(), CommutativeModule(), [1, 3, 13, 75]),
    ],
)
def test_composition_dimensions(left, right, dims):
    M = composition_product(left, right)
    assert [len(M.basis_arity(r)) for r in range(1, 5)] == dims


@given(data=st.data())
def test_composition_relabel_functorial(data):
    M = composition_product(AssociativeModule(), suspend(LieModule(), 1))
    r = data.draw(st.integers(1, 4))
    e = tuple(range(1, r + 1))
    x = data.draw(st.sampled_from(M.basis(e)))
    p = tuple(data.draw(st.permutations(list(e))))
    q = tuple(data.draw(st.permutations(list(e))))
    u, v = Bijection(e, p), Bijection(p, q)
    assert relabel(M, v, M.relabel(u, x)) == M.relabel(u.then(v), x)


def test_suspension_round_trip_and_degrees():
    A = AssociativeModule()
    S = suspend(A, 3)
    assert graded_dims(S, 2) == {3: 2}
    assert suspend(S, -3) is A


def test_operadic_suspension_twists_by_sign():
    C = CommutativeModule()
    L = operadic_suspend(C, 1)
    assert graded_dims(L, 3) == {-2: 1}
    (x,) = L.basis((1, 2, 3))
    assert L.relabel({1: 2, 2: 1, 3: 3}, x) == {x: -1}
    assert L.relabel({1: 2, 2: 3, 3: 1}, x) == {x: 1}
