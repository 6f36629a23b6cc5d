import random
from fractions import Fraction

import pytest

from subquad.mbf import (
    DEDEKIND,
    AvParams,
    MbfTable,
    Partition,
    backward_partition,
    enumerate_mbfs,
    forward_partition,
    induced_mbf,
    is_monotone,
    is_uniform_matroid,
    min_contribution,
    partition_coefficient,
    partition_from_params,
    prune_mbf_set,
)
from subquad.pbf import MultilinearPoly, QuadraticPoly

from _gen import random_av_params, random_multi_av_quadratic


class TestIsMonotone:
    def test_constant_zero(self):
        assert is_monotone(MbfTable(3, 0))

    def test_majority_of_three(self):
        assert is_monotone(MbfTable.threshold(3, 2))

    def test_parity_is_not(self):
        t = MbfTable.from_function(2, lambda m: m.bit_count() % 2 == 1)
        assert not is_monotone(t)


class TestEnumeration:
    @pytest.mark.parametrize("k,count", [(1, 3), (2, 6), (3, 20), (4, 168)])
    def test_dedekind_counts(self, k, count):
        tables = enumerate_mbfs(k)
        assert len(tables) == count == DEDEKIND[k]
        assert len({t.bits for t in tables}) == count
        assert all(is_monotone(t) for t in tables)

    def test_k1_is_constants_and_identity(self):
        got = {t.bits for t in enumerate_mbfs(1)}
        zero = MbfTable.from_function(1, lambda m: 0).bits
        one = MbfTable.from_function(1, lambda m: 1).bits
        x1 = MbfTable.from_function(1, lambda m: m & 1).bits
        assert got == {zero, one, x1}

    def test_k2_contains_and_or(self):
        bits = {t.bits for t in enumerate_mbfs(2)}
        assert MbfTable.from_function(2, lambda m: m == 0b11).bits in bits
        assert MbfTable.from_function(2, lambda m: m != 0).bits in bits

    def test_cap(self):
        with pytest.raises(ValueError):
            enumerate_mbfs(6)

    @pytest.mark.parametrize("k,kept", [(2, 2), (3, 15), (4, 162)])
    def test_prune_counts(self, k, kept):
        assert len(prune_mbf_set(enumerate_mbfs(k))) == kept


class TestPartitions:
    def test_upward_closure_enforced(self):
        with pytest.raises(ValueError):
            Partition(2, frozenset({0b01}))
        Partition(2, frozenset({0b01, 0b11}))

    def test_from_params_fig3_shape(self):
        # weights (4,1,1,1) with constant 3: strictly negative exactly on
        # {1} and its supersets; the {2,3,4} labeling ties at zero and
        # stays off.
        p = partition_from_params(AvParams.of(3, (4, 1, 1, 1)))
        expected = {m for m in range(16) if m & 1} | set()
        assert p.b_family == frozenset(expected)
        assert partition_coefficient(AvParams.of(3, (4, 1, 1, 1)), 0b1110) == 0

    def test_from_params_all_positive(self):
        p = partition_from_params(AvParams.of(1, (0, 0, 0, 0)))
        assert p.b_family == frozenset()

    def test_from_params_kappa_positive_everywhere(self):
        p = partition_from_params(AvParams.of(6, (1, 1, 1, 1)))
        assert p.b_family == frozenset()

    def test_upward_closed_for_random_params(self):
        rng = random.Random(9)
        for _ in range(100):
            p = partition_from_params(random_av_params(rng))
            for s in p.b_family:
                for i in range(4):
                    assert s | (1 << i) in p.b_family

    def test_forward_backward(self):
        fwd, bwd = forward_partition(), backward_partition()
        assert len(fwd.b_family) == 5
        assert len(bwd.b_family) == 11
        assert fwd.b_family < bwd.b_family

    def test_complementary_pair_sum_identity(self):
        rng = random.Random(77)
        for _ in range(100):
            p = random_av_params(rng)
            sums = set()
            for pair in (0b0011, 0b0101, 0b1001):
                sums.add(
                    partition_coefficient(p, pair) + partition_coefficient(p, 0b1111 ^ pair)
                )
            assert len(sums) == 1
            # an on complementary pair plus a strictly positive off pair
            # cannot coexist: both would pin the same sum
            total = sums.pop()
            on = [pm for pm in (0b0011, 0b0101, 0b1001, 0b1100, 0b1010, 0b0110)
                  if partition_coefficient(p, pm) <= 0 and partition_coefficient(p, 0b1111 ^ pm) <= 0]
            if on:
                assert total <= 0


class TestUniformMatroid:
    def test_forward_rank_two(self):
        assert is_uniform_matroid(forward_partition()) == 2

    def test_backward_rank_one(self):
        assert is_uniform_matroid(backward_partition()) == 1

    def test_counterexample_family(self):
        a = {0, 0b0001, 0b0010, 0b0100, 0b1000, 0b1100}
        b = frozenset(m for m in range(16) if m not in a)
        assert is_uniform_matroid(Partition(4, b)) is None


class TestInducedMbf:
    def test_two_of_three_threshold(self):
        # z * (2 - x1 - x2 - x3): on only when at least two variables are 1
        # strictly; the tie at exactly two resolves off.
        h = QuadraticPoly(
            MultilinearPoly.from_terms(
                4, [((4,), 2), ((1, 4), -1), ((2, 4), -1), ((3, 4), -1)]
            ),
            3,
            1,
        )
        t = induced_mbf(h, 4)
        assert t.value(0b111) == 1
        assert t.value(0b011) == 0
        assert t.value(0b001) == 0

    def test_no_aux_terms(self):
        h = QuadraticPoly(MultilinearPoly.from_terms(3, [((1,), 1)]), 2, 1)
        assert induced_mbf(h, 3).bits == 0

    def test_g4_row_states(self):
        # z * (1 - x1 - x2 - x3 - x4): on for |S| >= 2, tied off at singletons
        terms = [((5,), 1)] + [((i, 5), -1) for i in range(1, 5)]
        h = QuadraticPoly(MultilinearPoly.from_terms(5, terms), 4, 1)
        t = induced_mbf(h, 5)
        for m in range(16):
            assert t.value(m) == (1 if m.bit_count() >= 2 else 0)

    def test_monotone_on_random_submodular(self):
        rng = random.Random(21)
        for _ in range(40):
            h = random_multi_av_quadratic(rng, rng.randint(1, 3))
            for av in range(5, 5 + h.n_z):
                assert is_monotone(induced_mbf(h, av))

    def test_rejects_non_submodular(self):
        h = QuadraticPoly(MultilinearPoly.from_terms(3, [((1, 3), 1)]), 2, 1)
        with pytest.raises(ValueError):
            induced_mbf(h, 3)


def test_min_contribution_matches_direct():
    rng = random.Random(2)
    for _ in range(50):
        p = random_av_params(rng)
        for m in range(16):
            k = partition_coefficient(p, m)
            assert min_contribution(p, m) == min(Fraction(0), k)
