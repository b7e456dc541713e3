from math import factorial

import pytest

from ordsym import patterns as pt
from ordsym.errors import BadPatternLiteral, DuplicatePattern, NotAPartition
from ordsym.partitions import (
    BUILDERS,
    Partition,
    custom_partition,
    from_patterns,
    gaussian_partition,
    parse_partition_text,
    reflection_partition,
    reversal_partition,
    singleton_partition,
)


def as_sets(partition):
    return {frozenset(g) for g in partition.as_patterns()}


def sets(*groups):
    return {frozenset(g) for g in groups}


class TestBuilders:
    def test_reversal_d3(self):
        assert as_sets(reversal_partition(3)) == sets(
            [(1, 2, 3), (3, 2, 1)], [(1, 3, 2), (2, 3, 1)], [(2, 1, 3), (3, 1, 2)]
        )

    def test_reflection_d3(self):
        assert as_sets(reflection_partition(3)) == sets(
            [(1, 2, 3), (3, 2, 1)], [(1, 3, 2), (3, 1, 2)], [(2, 1, 3), (2, 3, 1)]
        )

    def test_gaussian_d3(self):
        assert as_sets(gaussian_partition(3)) == sets(
            [(2, 3, 1), (1, 3, 2), (3, 1, 2), (2, 1, 3)], [(1, 2, 3), (3, 2, 1)]
        )

    @pytest.mark.parametrize("builder", [reversal_partition, reflection_partition, gaussian_partition])
    def test_d2_single_group(self, builder):
        assert as_sets(builder(2)) == sets([(1, 2), (2, 1)])

    def test_reversal_d4(self):
        p = reversal_partition(4)
        assert p.m == 12
        assert set(p.sizes.tolist()) == {2}

    @pytest.mark.parametrize("d", [2, 3, 4, 5])
    def test_gaussian_refines(self, d):
        # every reversal and reflection group lies inside one gaussian group
        g = gaussian_partition(d)
        for finer in (reversal_partition(d), reflection_partition(d)):
            for members in finer.groups:
                assert len({int(g.group_index[i]) for i in members}) == 1

    @pytest.mark.parametrize("d", [2, 3, 4, 5])
    @pytest.mark.parametrize("name", sorted(BUILDERS))
    def test_covers_and_canonical(self, name, d):
        p = BUILDERS[name](d)
        flat = sorted(i for g in p.groups for i in g)
        assert flat == list(range(factorial(d)))
        assert [g[0] for g in p.groups] == sorted(g[0] for g in p.groups)
        assert all(list(g) == sorted(g) for g in p.groups)
        assert p == BUILDERS[name](d)

    def test_singleton(self):
        p = singleton_partition(3)
        assert p.m == 6 and p.sizes.tolist() == [1] * 6

    def test_group_index_read_only(self):
        p = gaussian_partition(3)
        assert p.group_index.tolist() == [0, 1, 1, 1, 1, 0]
        with pytest.raises(ValueError):
            p.group_index[0] = 1


class TestCustom:
    SETTING_B = "(1,2,3) (1,3,2) (3,1,2) (2,1,3)\n(2,3,1) (3,2,1)\n"

    def test_setting_b(self):
        p = custom_partition(3, self.SETTING_B)
        assert as_sets(p) == sets(
            [(1, 2, 3), (1, 3, 2), (3, 1, 2), (2, 1, 3)], [(2, 3, 1), (3, 2, 1)]
        )

    def test_order_independent(self):
        a = custom_partition(3, self.SETTING_B)
        b = custom_partition(3, "(3,2,1),(2,3,1)\n{(2,1,3), (3,1,2), (1,3,2), (1,2,3)}  # comment\n")
        assert a.groups == b.groups

    def test_duplicate(self):
        with pytest.raises(DuplicatePattern):
            custom_partition(3, "(1,2,3) (1,2,3)\n(1,3,2) (2,1,3) (2,3,1) (3,1,2) (3,2,1)")

    def test_duplicate_across_groups(self):
        with pytest.raises(DuplicatePattern):
            custom_partition(3, "(1,2,3) (3,2,1)\n(1,2,3) (1,3,2) (2,1,3) (2,3,1) (3,1,2)")

    def test_gap(self):
        with pytest.raises(NotAPartition):
            custom_partition(3, "(1,2,3) (3,2,1)\n(1,3,2) (2,3,1)")

    def test_gap_completed(self):
        p = custom_partition(3, "(1,2,3) (3,2,1)\n(1,3,2) (2,3,1)", complete_with_singletons=True)
        assert p.m == 4
        assert sorted(p.sizes.tolist()) == [1, 1, 2, 2]

    @pytest.mark.parametrize("text", ["(1,2,4) (2,1,3)", "(1,2)", "hello (1,2,3)", "(1;2;3)"])
    def test_bad_literal(self, text):
        with pytest.raises(BadPatternLiteral):
            custom_partition(3, text, complete_with_singletons=True)

    def test_text_round_trip(self):
        for d in (2, 3, 4):
            p = gaussian_partition(d)
            assert custom_partition(d, p.to_text()).groups == p.groups

    def test_parse_skips_blank_and_comments(self):
        assert parse_partition_text("# header\n\n(1,2) (2,1)\n") == [[(1, 2), (2, 1)]]

    def test_direct_constructor_validates(self):
        with pytest.raises(NotAPartition):
            Partition(3, ((0, 1), (2,)))
        with pytest.raises(DuplicatePattern):
            Partition(2, ((0, 1), (1,)))
        with pytest.raises(NotAPartition):
            Partition(2, ((0, 1), ()))

    def test_from_patterns_wrong_length(self):
        with pytest.raises(BadPatternLiteral):
            from_patterns(3, [[(1, 2)]])

    def test_describe(self):
        assert gaussian_partition(3).describe()[0] == [pt.format_pattern((1, 2, 3)), pt.format_pattern((3, 2, 1))]
