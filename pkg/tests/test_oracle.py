import itertools
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import subset_variance
from stratvar import (
    Allocation,
    AllocationClass,
    EmptyClass,
    RedDistribution,
    SearchSpaceExceeded,
    StratifiedPopulation,
    best_allocation,
    bound_b,
    build_scenario,
    exhaustive_variance_Y,
    minimax_upper_bound,
    minimax_value,
    nature_relaxed_max,
    var_simple_without,
    var_strat_without,
    worst_nature,
)
from stratvar.oracle import check_witness, nature_maximisers


def brute_worst(sizes, counts, R):
    """Max over a plain itertools.product filter, first maximiser kept."""
    best = None
    for reds in itertools.product(*(range(s + 1) for s in sizes)):
        if sum(reds) != R:
            continue
        v = var_strat_without(build_scenario(sizes, reds, counts))
        if best is None or v > best[0]:
            best = (v, reds)
    return best


class TestWorstNature:
    def test_examples(self):
        pop = StratifiedPopulation((5, 5))
        res = worst_nature(pop, Allocation(pop, (2, 2)), 4)
        assert res.distribution.reds == (2, 2)
        assert res.value == F(9, 200) == bound_b(10, 2, 4, F(2, 5))
        assert res.examined == 5
        res = worst_nature(pop, Allocation(pop, (2, 2)), 0)
        assert (res.distribution.reds, res.value) == ((0, 0), 0)
        pop = StratifiedPopulation((4, 6))
        res = worst_nature(pop, Allocation(pop, (2, 3)), 5)
        assert res.value <= minimax_upper_bound(pop, 5, F(1, 2)) == F(47, 1500)

    @pytest.mark.parametrize("sizes, counts, R", [
        ((3, 5), (1, 4), 3), ((4, 4, 2), (2, 1, 2), 5), ((6, 2), (5, 1), 4), ((2, 3, 3), (1, 2, 1), 4),
    ])
    def test_matches_brute_force(self, sizes, counts, R):
        pop = StratifiedPopulation(sizes)
        res = worst_nature(pop, Allocation(pop, counts), R)
        assert (res.value, res.distribution.reds) == brute_worst(sizes, counts, R)
        assert check_witness(res)

    def test_relaxation_dominates(self):
        for sizes in [(3, 5), (4, 4, 2), (2, 6), (5, 3, 4)]:
            pop = StratifiedPopulation(sizes)
            for counts in itertools.product(*(range(1, s) for s in sizes)):
                alloc = Allocation(pop, counts)
                for R in range(pop.N + 1):
                    relaxed, _ = nature_relaxed_max(pop, alloc, F(R, pop.N))
                    assert worst_nature(pop, alloc, R).value <= relaxed

    def test_cap(self):
        pop = StratifiedPopulation((9, 9, 9))
        with pytest.raises(SearchSpaceExceeded):
            worst_nature(pop, Allocation(pop, (2, 2, 2)), 13, cap=50)


class TestBestAllocation:
    def test_examples(self):
        pop = StratifiedPopulation((5, 5))
        res = best_allocation(pop, RedDistribution(pop, (2, 2)), 4)
        assert res.allocation.counts == (2, 2)
        assert res.value == F(9, 200)
        res = best_allocation(pop, RedDistribution(pop, (0, 4)), 4)
        assert res.allocation.counts == (1, 3)
        pop = StratifiedPopulation((2, 2))
        res = best_allocation(pop, RedDistribution(pop, (1, 1)), 2)
        assert res.allocation.counts == (1, 1) and res.examined == 1

    def test_empty_class(self):
        pop = StratifiedPopulation((2, 5))
        with pytest.raises(EmptyClass):
            best_allocation(pop, RedDistribution(pop, (1, 2)), 6, AllocationClass.THREE_QUARTERS)

    def test_matches_brute_force(self):
        pop = StratifiedPopulation((3, 4, 5))
        dist = RedDistribution(pop, (1, 3, 2))
        for n in range(3, 13):
            vals = [(var_strat_without(build_scenario(pop.sizes, dist.reds, c)), c)
                    for c in itertools.product(range(1, 4), range(1, 5), range(1, 6)) if sum(c) == n]
            best = min(vals, key=lambda t: t[0])
            res = best_allocation(pop, dist, n)
            assert (res.value, res.allocation.counts) == best


class TestMinimax:
    def test_equal_strata(self):
        mm = minimax_value(StratifiedPopulation((5, 5)), 4, 4)
        assert mm.value == F(9, 200) == mm.lower == mm.upper
        assert mm.sandwich_holds

    def test_sandwich_4_6(self):
        mm = minimax_value(StratifiedPopulation((4, 6)), 5, 5)
        assert mm.lower == F(1, 32) and mm.upper == F(47, 1500)
        assert F(1, 32) <= mm.value <= F(47, 1500)
        assert mm.sandwich_holds

    def test_tiny_all_class(self):
        mm = minimax_value(StratifiedPopulation((2, 2)), 2, 2, AllocationClass.ALL)
        # one allocation, three distributions: (0,2) and (2,0) give 0, (1,1) gives 2 * (1/4)(1/4)
        assert mm.allocation.counts == (1, 1)
        assert mm.distribution.reds == (1, 1)
        assert mm.value == F(1, 8)
        assert mm.examined == 3

    def test_monotone_in_class(self):
        for sizes, n, R in [((4, 6), 5, 5), ((4, 4, 4), 6, 6), ((3, 6), 6, 3), ((2, 4, 6), 6, 6)]:
            pop = StratifiedPopulation(sizes)
            v_all = minimax_value(pop, n, R, AllocationClass.ALL).value
            v_adm = minimax_value(pop, n, R, AllocationClass.ADMISSIBLE).value
            v_prop = minimax_value(pop, n, R, AllocationClass.PROPORTIONAL).value
            assert v_all <= v_adm <= v_prop

    def test_parallel_matches_serial(self):
        pop = StratifiedPopulation((4, 6, 6))
        serial = minimax_value(pop, 8, 8, AllocationClass.ALL)
        parallel = minimax_value(pop, 8, 8, AllocationClass.ALL, workers=2)
        assert serial == parallel

    def test_deterministic(self):
        pop = StratifiedPopulation((3, 3, 6))
        runs = {minimax_value(pop, 6, 6, "all") for _ in range(3)}
        assert len(runs) == 1

    def test_maximisers_equal_split(self):
        pop = StratifiedPopulation((5, 5, 5))
        value, found = nature_maximisers(pop, Allocation(pop, (2, 2, 2)), 6)
        assert found == [(2, 2, 2)]
        assert value == bound_b(15, 3, 6, F(6, 15))


class TestExhaustiveY:
    def test_examples(self):
        assert exhaustive_variance_Y(7, 3, 6) == F(1, 147)
        assert exhaustive_variance_Y(10, 5, 10) == 0
        assert exhaustive_variance_Y(4, 2, 2) == F(1, 12) == var_simple_without(4, 2, 2)

    def test_against_subset_oracle(self):
        for N in range(1, 9):
            for red in range(N + 1):
                for n in range(1, N + 1):
                    assert exhaustive_variance_Y(N, red, n) == subset_variance(N, red, n)

    def test_cap(self):
        with pytest.raises(SearchSpaceExceeded):
            exhaustive_variance_Y(20, 10, 10, cap=1000)


@given(st.lists(st.integers(2, 5), min_size=2, max_size=3), st.data())
def test_worst_nature_witness_is_consistent(sizes, data):
    pop = StratifiedPopulation(tuple(sizes))
    counts = tuple(data.draw(st.integers(1, s)) for s in sizes)
    R = data.draw(st.integers(0, pop.N))
    res = worst_nature(pop, Allocation(pop, counts), R)
    assert sum(res.distribution.reds) == R
    assert check_witness(res)
    assert (res.value, res.distribution.reds) == brute_worst(sizes, counts, R)
