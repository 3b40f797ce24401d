"""Cayley-table structures: axioms, constructions, order invariants, breadth."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from amnm import (
    FreeSemilattice,
    NotAssociative,
    NotClosed,
    NotCommutative,
    NotIdempotent,
    OrthogonalSum,
    b_loc,
    breadth,
    free_semilattice,
    generated,
    height,
    max_antichain,
    min_chain_cover,
    nmin,
    orthogonal_direct_sum,
    poset_height,
    poset_width,
    random_poset,
    random_semilattice,
    semilattice_from_json,
    semilattice_to_json,
    validate,
    width,
)

# ---------------------------------------------------------------------------
# validate: each axiom failure is reported with a concrete witness.
# ---------------------------------------------------------------------------


def test_validate_accepts_min_chain():
    S = validate([[0, 0, 0], [0, 1, 1], [0, 1, 2]])
    assert S.n == 3


def test_validate_rejects_out_of_range_entries():
    with pytest.raises(NotClosed):
        validate([[0, 3], [3, 1]])


def test_validate_rejects_non_commutative_table():
    # x*y = x is associative and idempotent but not commutative.
    with pytest.raises(NotCommutative) as exc:
        validate([[0, 0], [1, 1]])
    x, y = exc.value.witness
    assert x != y


def test_validate_rejects_non_idempotent_table():
    with pytest.raises(NotIdempotent) as exc:
        validate([[1, 0], [0, 1]])
    assert exc.value.witness in (0, 1)


def test_validate_rejects_non_associative_table():
    # Commutative and idempotent, but (0*1)*2 = 2*2 = 2 while 0*(1*2) = 0*2 = 1.
    table = [
        [0, 2, 1],
        [2, 1, 0],
        [1, 0, 2],
    ]
    with pytest.raises(NotAssociative) as exc:
        validate(table)
    x, y, z = exc.value.witness
    t = np.asarray(table)
    assert t[t[x, y], z] != t[x, t[y, z]]


# ---------------------------------------------------------------------------
# Constructions.
# ---------------------------------------------------------------------------


def test_free_semilattice_is_union_of_supports():
    S = free_semilattice(3)
    assert isinstance(S, FreeSemilattice)
    assert S.n == 7
    for x in range(7):
        for y in range(7):
            assert S.table[x, y] == ((x + 1) | (y + 1)) - 1


def test_free_semilattice_gamma_counts_generators():
    S = free_semilattice(3)
    assert [int(g) for g in S.gamma] == [bin(m + 1).count("1") for m in range(7)]
    assert S.zero == 6  # the full support absorbs everything
    assert all(S.table[S.zero, x] == S.zero for x in range(S.n))


def test_nmin_is_the_min_chain():
    S = nmin(5)
    assert S.labels == ("1", "2", "3", "4", "5")
    for x in range(5):
        for y in range(5):
            assert S.table[x, y] == min(x, y)


def test_orthogonal_direct_sum_collapses_cross_products():
    T = orthogonal_direct_sum([free_semilattice(2), free_semilattice(2)])
    assert isinstance(T, OrthogonalSum)
    assert T.n == 1 + 3 + 3
    assert T.zero == 0
    validate(T.table)
    (a0, a1), (b0, b1) = T.blocks
    for x in range(a0, a1):
        for y in range(b0, b1):
            assert T.table[x, y] == T.zero
    # within a block the product stays in the block
    for x in range(a0, a1):
        for y in range(a0, a1):
            assert a0 <= T.table[x, y] < a1


# ---------------------------------------------------------------------------
# Order invariants: height, width, Dilworth agreement.
# ---------------------------------------------------------------------------


def test_chain_has_width_one_and_full_height():
    S = nmin(6)
    assert height(S) == 6
    assert width(S) == 1


def test_free_semilattice_width_and_height():
    S = free_semilattice(3)
    assert height(S) == 3  # singleton > pair > triple
    assert width(S) == 3  # the three pairs form a maximal antichain


def test_min_chain_cover_partitions_into_chains(rng):
    leq = random_poset(rng, 8)
    cover = min_chain_cover(leq)
    seen = sorted(x for chain in cover for x in chain)
    assert seen == list(range(8))
    for chain in cover:
        for a, b in zip(chain, chain[1:]):
            assert leq[a, b] or leq[b, a]


def test_max_antichain_is_an_antichain(rng):
    leq = random_poset(rng, 8)
    anti = max_antichain(leq)
    for i, a in enumerate(anti):
        for b in anti[i + 1 :]:
            assert not leq[a, b] and not leq[b, a]


def test_dilworth_numbers_agree_on_random_posets(rng):
    for _ in range(30):
        n = int(rng.integers(1, 11))
        leq = random_poset(rng, n)
        assert poset_width(leq) == len(min_chain_cover(leq)) == len(max_antichain(leq))
        assert poset_height(leq) >= 1


# ---------------------------------------------------------------------------
# Generation and breadth.
# ---------------------------------------------------------------------------


def test_generated_closes_under_products():
    S = free_semilattice(3)
    E = generated(S, [0, 1])  # two singleton generators
    assert E == frozenset({0, 1, S.table[0, 1]})


def test_b_loc_of_generator_set_counts_needed_factors():
    S = free_semilattice(3)
    # producing the zero (full support) needs all three singleton generators
    assert b_loc(S, [0, 1, 3]) == 3


def test_breadth_of_free_semilattice_counts_generators():
    for k in (2, 3):
        assert breadth(free_semilattice(k)) == k


def test_breadth_of_chain_is_one():
    assert breadth(nmin(7)) == 1


def test_breadth_sampling_is_a_lower_bound(rng):
    S = free_semilattice(3)
    est = breadth(S, method="sample", samples=200, rng=rng)
    assert 1 <= est <= 3


def test_breadth_sample_never_exceeds_exhaustive(semilattice_pool):
    rng = np.random.default_rng(5)
    for S in semilattice_pool[:10]:
        exact = breadth(S)
        assert breadth(S, method="sample", samples=300, rng=rng) <= exact


def test_breadth_rejects_unknown_method():
    with pytest.raises(ValueError):
        breadth(nmin(3), method="guess")


# ---------------------------------------------------------------------------
# Serialization round-trip.
# ---------------------------------------------------------------------------


def test_json_round_trip_preserves_table_and_labels():
    S = nmin(4)
    doc = semilattice_to_json(S)
    T = semilattice_from_json(doc)
    assert np.array_equal(S.table, T.table)
    assert T.labels == S.labels


# ---------------------------------------------------------------------------
# Property tests: the random generator only emits valid tables, and the
# induced order makes the product a greatest lower bound.
# ---------------------------------------------------------------------------


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**32 - 1))
def test_random_semilattice_always_validates(seed):
    S = random_semilattice(np.random.default_rng(seed))
    validate(S.table)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**32 - 1))
def test_product_is_the_meet(seed):
    S = random_semilattice(np.random.default_rng(seed))
    t = S.table

    def leq(a, b):
        return t[a, b] == a

    for x in range(S.n):
        for y in range(S.n):
            m = t[x, y]
            assert leq(m, x) and leq(m, y)
            for z in range(S.n):
                if leq(z, x) and leq(z, y):
                    assert leq(z, m)
