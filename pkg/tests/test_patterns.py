import pytest
from hypothesis import given, strategies as st

from vincstat.errors import (
    DuplicateEntry,
    EmptyBlock,
    MalformedToken,
    NonPositivePart,
    NotAPermutation,
    OutOfRange,
)
from vincstat.patterns import (
    Permutation,
    VincularPattern,
    adjacencies_to_composition,
    composition_to_adjacencies,
    format_pattern,
    iter_patterns,
    parse_pattern,
    reduce_sequence,
)


def test_parse_examples():
    p = parse_pattern("3|1,2")
    assert p.order.values == (3, 1, 2)
    assert p.adjacencies == frozenset({2})
    assert p.blocks == (1, 2)

    p = parse_pattern("2,1")
    assert p.order.values == (2, 1)
    assert p.adjacencies == frozenset({1})
    assert p.blocks == (2,)

    p = parse_pattern("3|1|2")
    assert p.order.values == (3, 1, 2)
    assert p.adjacencies == frozenset()
    assert p.blocks == (1, 1, 1)


def test_parse_errors():
    with pytest.raises(NotAPermutation):
        parse_pattern("1,3")
    with pytest.raises(NotAPermutation):
        parse_pattern("1,1,2")
    with pytest.raises(EmptyBlock):
        parse_pattern("1|")
    with pytest.raises(EmptyBlock):
        parse_pattern("||")
    with pytest.raises(MalformedToken):
        parse_pattern("1,x")
    with pytest.raises(MalformedToken):
        parse_pattern("0,1")
    with pytest.raises(MalformedToken):
        parse_pattern("-1,2")


def test_block_sizes_and_accessors():
    p = parse_pattern("5|4|2,3,1")
    assert p.size == 5
    assert p.block_count == 3
    assert p.blocks == (1, 1, 3)
    assert p.last_block_size == 3
    assert str(p) == "5|4|2,3,1"


def test_adjacency_composition_examples():
    assert adjacencies_to_composition({1, 2, 3, 5, 7}, 9) == (4, 2, 2, 1)
    assert adjacencies_to_composition(set(), 3) == (1, 1, 1)
    assert adjacencies_to_composition({1, 2}, 3) == (3,)
    assert composition_to_adjacencies((4, 2, 2, 1)) == frozenset({1, 2, 3, 5, 7})
    assert composition_to_adjacencies((1, 1, 1)) == frozenset()
    assert composition_to_adjacencies((5,)) == frozenset({1, 2, 3, 4})


def test_adjacency_composition_errors():
    with pytest.raises(OutOfRange):
        adjacencies_to_composition({3}, 3)
    with pytest.raises(OutOfRange):
        adjacencies_to_composition({0}, 3)
    with pytest.raises(NonPositivePart):
        composition_to_adjacencies((2, 0, 1))


def test_encoding_round_trip_exhaustive():
    # Every adjacency subset, every size up to 12.
    for k in range(1, 13):
        for mask in range(1 << (k - 1)):
            adj = frozenset(a for a in range(1, k) if mask >> (a - 1) & 1)
            blocks = adjacencies_to_composition(adj, k)
            assert sum(blocks) == k
            assert all(b >= 1 for b in blocks)
            assert len(blocks) == k - len(adj)
            assert composition_to_adjacencies(blocks) == adj


def test_parse_format_round_trip_exhaustive():
    for k in range(1, 7):
        for p in iter_patterns(k):
            assert parse_pattern(format_pattern(p)) == p


def test_reduce_examples():
    assert reduce_sequence((5, 2, 4)).values == (3, 1, 2)
    assert reduce_sequence(range(1, 8)).values == tuple(range(1, 8))
    assert reduce_sequence((0.3, -2.0, 0.31)).values == (2, 1, 3)


def test_reduce_rank_oracle():
    # Compare against assigning ranks by an explicit sort.
    import random

    rng = random.Random(20240817)
    xs = [rng.uniform(-5, 5) for _ in range(1000)]
    by_sort = {x: r for r, x in enumerate(sorted(xs), start=1)}
    assert reduce_sequence(xs).values == tuple(by_sort[x] for x in xs)


def test_reduce_idempotent_and_errors():
    sigma = reduce_sequence((9.5, -1.0, 3.25, 3.5))
    assert reduce_sequence(sigma.values) == sigma
    with pytest.raises(DuplicateEntry):
        reduce_sequence((1.0, 2.0, 1.0))


@given(st.permutations(list(range(1, 9))))
def test_reduce_idempotent_property(values):
    assert reduce_sequence(values).values == tuple(values)


@given(st.integers(1, 8), st.data())
def test_pattern_round_trip_property(k, data):
    adj = frozenset(data.draw(st.sets(st.integers(1, k - 1)))) if k > 1 else frozenset()
    values = tuple(data.draw(st.permutations(list(range(1, k + 1)))))
    p = VincularPattern(Permutation(values), adj)
    assert parse_pattern(format_pattern(p)) == p
    assert composition_to_adjacencies(p.blocks) == adj


def test_permutation_validation():
    with pytest.raises(NotAPermutation):
        Permutation((1, 2, 4))
    assert Permutation.identity(4).values == (1, 2, 3, 4)
    assert len(Permutation((2, 1))) == 2
    assert list(Permutation((2, 1))) == [2, 1]
