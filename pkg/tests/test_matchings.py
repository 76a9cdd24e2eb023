from itertools import combinations, product
from math import factorial

import numpy as np
import pytest
from hypothesis import given, strategies as st

from shatterkit.errors import InvalidInput
from shatterkit.family import Family, shatters
from shatterkit.matchings import (
    Matching,
    Snake,
    claim1_bound,
    complementary_snake_pairs,
    dichotomy_check,
    enumerate_matchings,
    first_shattered,
    is_carved,
    is_shattered,
    matching_count,
    matching_table,
    max_shattered_size,
    random_perfect_matching,
    scan_all_matchings,
    snakes,
)
from shatterkit.randommif import RandomFamilySpec, random_mif

from strategies import families

STAR = Family.from_sets(4, [[0, 1], [0, 2], [0, 3]])


# -- oracles -----------------------------------------------------------------


def oracle_matchings(n, k):
    """All size-k matchings as frozensets of frozenset pairs (no ordering tricks)."""
    out = set()
    for support in combinations(range(n), 2 * k):
        for perm_pairs in _pairings(list(support)):
            out.add(frozenset(frozenset(p) for p in perm_pairs))
    return out


def _pairings(elems):
    if not elems:
        yield []
        return
    a = elems[0]
    for i in range(1, len(elems)):
        rest = elems[1:i] + elems[i + 1 :]
        for tail in _pairings(rest):
            yield [(a, elems[i])] + tail


def oracle_shattered(f: Family, m: Matching) -> bool:
    traces = {F & m.support for F in f.masks}
    return all(sum(1 << p[c] for p, c in zip(m.pairs, choice)) in traces for choice in product((0, 1), repeat=m.k))


# -- counting and enumeration -----------------------------------------------------------


@pytest.mark.parametrize("n, k, count", [(4, 2, 3), (6, 2, 45), (14, 6, 945_945), (5, 0, 1)])
def test_matching_counts(n, k, count):
    assert matching_count(n, k) == count


def test_n4_perfect_matchings_listed():
    got = [m.pairs for m in enumerate_matchings(4, 2)]
    assert got == [((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2))]


def test_claim1_example():
    # 6! / (2! * 2^2) = 90
    assert matching_count(6, 2) == 45 < claim1_bound(6, 2) == 90


def test_table_shape_n14():
    table = matching_table(14, 6)
    assert table.shape == (945_945, 6, 2)


@pytest.mark.parametrize("n", range(0, 11))
def test_enumeration_unique_and_exact(n):
    for k in range(0, n // 2 + 1):
        ms = list(enumerate_matchings(n, k))
        canon = [m.pairs for m in ms]
        assert len(set(canon)) == len(canon)
        assert len(ms) == factorial(n) // (factorial(n - 2 * k) * factorial(k) * 2**k)
        if k >= 1:
            # equality exactly when (n-2k)! = 1
            assert len(ms) < claim1_bound(n, k) or (n - 2 * k <= 1 and len(ms) == claim1_bound(n, k))
        if n <= 8:
            assert {frozenset(frozenset(p) for p in m.pairs) for m in ms} == oracle_matchings(n, k)
        assert canon == sorted(canon)


def test_enumeration_rejects_oversize():
    with pytest.raises(InvalidInput):
        list(enumerate_matchings(4, 3))


def test_table_agrees_with_stream():
    table = matching_table(8, 3)
    assert [tuple(map(tuple, row)) for row in table.tolist()] == [m.pairs for m in enumerate_matchings(8, 3)]


def test_matching_canonical_form_and_validation():
    assert Matching(6, ((5, 2), (1, 0))) == Matching(6, ((0, 1), (2, 5)))
    with pytest.raises(InvalidInput):
        Matching(4, ((0, 1), (1, 2)))
    with pytest.raises(InvalidInput):
        Matching(4, ((0, 4),))
    with pytest.raises(InvalidInput):
        Matching(4, ((2, 2),))


# -- snakes ------------------------------------------------------------------


def test_snake_examples():
    assert [s.elements.elements() for s in snakes(Matching(2, ((0, 1),)))] == [(0,), (1,)]
    got = sorted(s.elements.elements() for s in snakes(Matching(4, ((0, 1), (2, 3)))))
    assert got == [(0, 2), (0, 3), (1, 2), (1, 3)]
    m6 = Matching(12, tuple((2 * i, 2 * i + 1) for i in range(6)))
    assert len(list(snakes(m6))) == 64


@given(st.integers(1, 6), st.data())
def test_snake_invariants(k, data):
    m = Matching(2 * k, tuple((2 * i, 2 * i + 1) for i in range(k)))
    c = data.draw(st.integers(0, (1 << k) - 1))
    s = Snake(m, c)
    for a, b in m.pairs:
        assert (a in s.elements) != (b in s.elements)
    comp = s.complementary()
    assert comp.bits | s.bits == m.support and comp.bits & s.bits == 0
    assert comp.complementary() == s


@pytest.mark.parametrize("k", range(1, 8))
def test_complementary_pairs_partition(k):
    pairs = complementary_snake_pairs(k)
    assert len(pairs) == 2 ** (k - 1)
    flat = [c for p in pairs for c in p]
    assert sorted(flat) == list(range(2**k))


# -- carving and shattering ---------------------------------------------------


def test_carved_examples():
    m = Matching(4, ((0, 1),))
    assert is_carved(Family.from_sets(4, [[0, 2]]), m, Snake(m, 0))
    assert not is_carved(Family.from_sets(4, [[0, 1]]), m, Snake(m, 0))
    empty = Family.from_sets(4, [[]])
    for s in snakes(m):
        assert not is_carved(empty, m, s)


def test_shattered_examples():
    f = Family.from_sets(4, [[0, 2], [0, 3]])
    assert is_shattered(f, Matching(4, ((2, 3),)))
    assert not is_shattered(f.with_member(0b0011), Matching(4, ((0, 1),)))
    assert is_shattered(Family.powerset(4), Matching(4, ((0, 1), (2, 3))))


def test_k0_convention():
    assert is_shattered(Family.from_sets(3, [[]]), Matching(3, ()))
    assert not is_shattered(Family(3, []), Matching(3, ()))


def test_max_shattered_examples():
    k, m = max_shattered_size(STAR, 1, 2)
    # canonical order puts {1,2} before the other shattered pair {2,3}
    assert k == 1 and m.pairs == ((1, 2),)
    assert is_shattered(STAR, Matching(4, ((2, 3),)))
    k, m = max_shattered_size(Family.powerset(4), 1, 2)
    assert k == 2 and m.k == 2
    assert max_shattered_size(Family.from_sets(4, [[]]), 1, 2) == (0, None)
    with pytest.raises(InvalidInput):
        max_shattered_size(STAR, 2, 3)


@given(families(min_n=2, max_n=8, max_size=40), st.data())
def test_vector_scan_matches_scalar(f, data):
    k = data.draw(st.integers(1, f.n // 2))
    shattered, missing = scan_all_matchings(f, k)
    table = matching_table(f.n, k)
    for i, row in enumerate(table.tolist()):
        m = Matching(f.n, tuple(map(tuple, row)))
        assert bool(shattered[i]) == is_shattered(f, m) == oracle_shattered(f, m)
        if not shattered[i]:
            assert not is_carved(f, m, Snake(m, int(missing[i])))


def test_vector_scan_on_random_mif():
    fam = random_mif(RandomFamilySpec(10, 3))
    shattered, _ = scan_all_matchings(fam, 4)
    for i in np.random.default_rng(0).choice(shattered.size, 200, replace=False):
        row = matching_table(10, 4)[i]
        m = Matching(10, tuple((int(a), int(b)) for a, b in row))
        assert bool(shattered[i]) == oracle_shattered(fam, m)


def test_scan_worker_independence():
    fam = random_mif(RandomFamilySpec(12, 5))
    a = scan_all_matchings(fam, 5, workers=1)
    b = scan_all_matchings(fam, 5, workers=3)
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])
    assert first_shattered(fam, 5, 1) == first_shattered(fam, 5, 3)


@given(families(min_n=2, max_n=8), st.data())
def test_set_shattering_implies_matching_shattering(f, data):
    k = data.draw(st.integers(1, f.n // 2))
    rows = matching_table(f.n, k)
    row = rows[data.draw(st.integers(0, rows.shape[0] - 1))]
    m = Matching(f.n, tuple((int(a), int(b)) for a, b in row))
    if shatters(f, m.support):
        assert is_shattered(f, m)


# -- dichotomy -----------------------------------------------------------------------


def test_dichotomy_examples():
    rep = dichotomy_check(STAR, [(0, 1), (2, 3)], 1)
    assert (rep.first_shattered, rep.rest_shattered) == (False, True)
    rep = dichotomy_check(STAR, [(2, 3), (0, 1)], 1)
    assert rep.first_shattered and rep.holds


def test_dichotomy_rejects_bad_input():
    with pytest.raises(InvalidInput):
        dichotomy_check(STAR, [(0, 1), (2, 3)], 2)
    with pytest.raises(InvalidInput):
        dichotomy_check(STAR, [(0, 1)], 1)
    with pytest.raises(InvalidInput):
        dichotomy_check(Family.from_sets(4, [[0, 1]]), [(0, 1), (2, 3)], 1)


@pytest.mark.parametrize("n", [6, 8, 10])
def test_dichotomy_random(n):
    rng = np.random.default_rng(n)
    for trial in range(150):
        fam = random_mif(RandomFamilySpec(n, 1000 + trial))
        k = int(rng.integers(1, n // 2))
        assert dichotomy_check(fam, random_perfect_matching(rng, n), k).holds
