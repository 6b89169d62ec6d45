"""Brute-force ground truth: exhaustive searches over Nature and Statistician.

Searches walk the lexicographic enumerations from :mod:`stratvar.model` and
keep the first optimum met, so ties resolve to the lexicographically smallest
witness.  Scores inside the loops are exact integers over a common
denominator; the final value is a Fraction.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .errors import HypothesisViolated, SearchSpaceExceeded, ValidationError
from .exact import fmt_ratio
from .model import (
    Allocation,
    AllocationClass,
    RedDistribution,
    StratifiedPopulation,
    allocation_tuples,
    build_scenario,
    distribution_tuples,
    enumeration_cap,
)
from .variance import bound_b, minimax_upper_bound, strat_without_terms, var_strat_without


@dataclass(frozen=True)
class SearchResult:
    allocation: Allocation | None
    distribution: RedDistribution | None
    value: Fraction
    examined: int
    klass: AllocationClass | None = None

    def to_dict(self) -> dict:
        return {
            "allocation": list(self.allocation.counts) if self.allocation else None,
            "distribution": list(self.distribution.reds) if self.distribution else None,
            "value": {"exact": fmt_ratio(self.value), "decimal": float(self.value)},
            "examined": self.examined,
            "class": self.klass.value if self.klass else None,
        }


def _worst_reds(sizes, counts, total_red, cap=None):
    """(value, lexicographically first maximiser, candidates examined)."""
    weights, denom = strat_without_terms(sizes, counts)
    tables = [[w * r * (size - r) for r in range(size + 1)] for w, size in zip(weights, sizes)]
    best, best_reds, examined = -1, None, 0
    population = StratifiedPopulation(tuple(sizes))
    for reds in distribution_tuples(population, total_red, cap):
        examined += 1
        score = 0
        for table, r in zip(tables, reds):
            score += table[r]
        if score > best:
            best, best_reds = score, reds
    return Fraction(best, denom), best_reds, examined


def nature_maximisers(population: StratifiedPopulation, allocation: Allocation, total_red: int, cap=None):
    """Every distribution attaining the exact maximum, in lexicographic order."""
    weights, denom = strat_without_terms(population.sizes, allocation.counts)
    best, found = -1, []
    for reds in distribution_tuples(population, total_red, cap):
        score = sum(w * r * (size - r) for w, r, size in zip(weights, reds, population.sizes))
        if score > best:
            best, found = score, [reds]
        elif score == best:
            found.append(reds)
    return Fraction(best, denom), found


def worst_nature(population: StratifiedPopulation, allocation: Allocation, total_red: int, cap=None) -> SearchResult:
    value, reds, examined = _worst_reds(population.sizes, allocation.counts, total_red, cap)
    return SearchResult(allocation, RedDistribution(population, reds), value, examined)


def best_allocation(population: StratifiedPopulation, distribution: RedDistribution, n: int,
                    klass=AllocationClass.ALL, cap=None) -> SearchResult:
    klass = AllocationClass(klass)
    sizes, N = population.sizes, population.N
    # per-stratum exact contribution as a function of n_j
    tables = []
    for size, p_j in zip(sizes, distribution.fractions):
        spread = Fraction(size, N) ** 2 * p_j * (1 - p_j)
        tables.append([None] + [spread * Fraction(size - k, (size - 1) * k) for k in range(1, size + 1)])
    best, best_counts, examined = None, None, 0
    for counts in allocation_tuples(population, n, klass, cap):
        examined += 1
        value = sum((t[k] for t, k in zip(tables, counts)), Fraction(0))
        if best is None or value < best:
            best, best_counts = value, counts
    return SearchResult(Allocation(population, best_counts), distribution, best, examined, klass)


@dataclass(frozen=True)
class MinimaxResult:
    allocation: Allocation
    distribution: RedDistribution
    value: Fraction
    examined: int
    klass: AllocationClass
    lower: Fraction | None = None
    upper: Fraction | None = None
    bound_note: str = ""

    @property
    def sandwich_holds(self) -> bool | None:
        if self.lower is None or self.upper is None:
            return None
        return self.lower <= self.value <= self.upper

    def to_dict(self) -> dict:
        def r(x):
            return None if x is None else {"exact": fmt_ratio(x), "decimal": float(x)}

        return {
            "allocation": list(self.allocation.counts),
            "distribution": list(self.distribution.reds),
            "value": r(self.value),
            "examined": self.examined,
            "class": self.klass.value,
            "lower_bound": r(self.lower),
            "upper_bound": r(self.upper),
            "sandwich_holds": self.sandwich_holds,
            "bound_note": self.bound_note,
        }


def _worst_job(args):
    return _worst_reds(*args)


def minimax_value(population: StratifiedPopulation, n: int, total_red: int,
                  klass=AllocationClass.ADMISSIBLE, cap=None, workers: int = 1) -> MinimaxResult:
    """min over ``klass`` of max over Nature of the stratified without-replacement variance.

    With ``workers > 1`` the per-allocation inner searches fan out to
    processes; results are merged in allocation order, so the witnesses are
    identical to the serial run.
    """
    klass = AllocationClass(klass)
    cap = enumeration_cap(cap)
    allocations = list(allocation_tuples(population, n, klass, cap))
    jobs = [(population.sizes, counts, total_red, cap) for counts in allocations]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_worst_job, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        results = [_worst_reds(*job) for job in jobs]

    best = None
    examined = 0
    for counts, (value, reds, seen) in zip(allocations, results):
        examined += seen
        if best is None or value < best[0]:
            best = (value, counts, reds)
    value, counts, reds = best

    p = Fraction(total_red, population.N)
    lower = upper = None
    note = ""
    if n < population.N:
        lower = bound_b(population.N, population.m, n, p)
        try:
            upper = minimax_upper_bound(population, n, p)
        except HypothesisViolated as exc:
            note = f"upper bound not applicable: {exc}"
        for j, size in enumerate(population.sizes):
            if (total_red * size) % population.N or not 0 < total_red * size // population.N < size:
                note = note or f"stratum {j}: pN_j not an integer strictly inside (0, N_j)"
    else:
        note = "exhaustive sample: bounds not applicable"
    return MinimaxResult(
        Allocation(population, counts), RedDistribution(population, reds), value,
        examined, klass, lower, upper, note,
    )


def exhaustive_variance_Y(N: int, red: int, n: int, cap=None) -> Fraction:
    """Variance of Y/n by enumerating all C(N, n) equally likely subsets."""
    if N < 1 or not 0 <= red <= N or not 1 <= n <= N:
        raise ValidationError(f"need 0 <= red <= N and 1 <= n <= N; got N={N}, red={red}, n={n}")
    total = comb(N, n)
    cap = enumeration_cap(cap)
    if total > cap:
        raise SearchSpaceExceeded(total, cap)
    s1 = s2 = 0
    # balls 0..red-1 are red
    for subset in itertools.combinations(range(N), n):
        y = sum(1 for b in subset if b < red)
        s1 += y
        s2 += y * y
    mean = Fraction(s1, total)
    return (Fraction(s2, total) - mean * mean) / (n * n)


def check_witness(result: SearchResult) -> bool:
    """Re-evaluate a search witness through the variance module."""
    scenario = build_scenario(result.allocation.population.sizes, result.distribution.reds,
                              result.allocation.counts, result.distribution.mode)
    return var_strat_without(scenario) == result.value
