"""Exhaustive verification of the variance inequalities on small instances.

Each checker sweeps only instances that satisfy its hypotheses.  With
``adversarial=True`` the Theorem 3 checker also probes instances outside
all three of its conditions and records where the bound is broken; those
probes never count as failures.

Theorem ids:

=====  ==============================================================
E1     with/without replacement link for the simple estimator
E2     proportional decomposition of the stratified with-replacement variance
1      stratified-with worse than simple-with, equal p_j, non-proportional
2      stratified-without worse than simple-without, equal p_j, n < N
3      stratified-without >= B under (c1)/(c2)/(c3), equality characterised
4      equal strata and equal allocation: Nature's maximum is B, only at equal p_j
INC    one more ball per stratum keeps the variance below the old simple one
5      B <= minimax <= upper bound; upper bound <= p(1-p)/n when n <= 3N/4
=====  ==============================================================
"""

from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass, field, replace
from fractions import Fraction

from .errors import UnknownTheoremId
from .exact import fmt_ratio
from .model import (
    Allocation,
    AllocationClass,
    Mode,
    RedDistribution,
    Scenario,
    StratifiedPopulation,
    build_scenario,
    is_proportional,
    iter_populations,
    proportional_allocation,
)
from .oracle import minimax_value, nature_maximisers, worst_nature
from .variance import (
    bound_b,
    proportional_decomposition,
    var_simple_with,
    var_simple_without,
    var_strat_with,
    var_strat_without,
)

THEOREM_IDS = ("E1", "E2", "1", "2", "3", "4", "INC", "5")

_QUARTERS = (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4))


@dataclass(frozen=True)
class ParameterRanges:
    max_N: int = 14
    min_N: int = 4
    min_m: int = 2
    max_m: int | None = 3
    max_stratum: int = 7
    p_values: tuple = _QUARTERS
    adversarial: bool = False

    def to_dict(self):
        d = asdict(self)
        d["p_values"] = [fmt_ratio(p) for p in self.p_values]
        return d


DEFAULT_RANGES = {
    "E1": ParameterRanges(max_N=30, min_N=2, max_m=None),
    "E2": ParameterRanges(max_N=20, max_m=3),
    "1": ParameterRanges(max_N=16, max_m=3),
    "2": ParameterRanges(max_N=14, max_m=3),
    "3": ParameterRanges(max_N=14, max_m=3),
    "4": ParameterRanges(max_stratum=7, max_m=4),
    "INC": ParameterRanges(max_stratum=7, max_m=4),
    "5": ParameterRanges(max_N=14, max_m=None),
}


@dataclass
class TheoremReport:
    theorem: str
    ranges: ParameterRanges
    instances: int = 0
    failures: int = 0
    counterexample: dict | None = None
    equality_cases: list = field(default_factory=list)
    probes: list = field(default_factory=list)

    @property
    def verdict(self) -> str:
        return "holds" if self.failures == 0 else "fails"

    def ok(self):
        self.instances += 1

    def fail(self, record):
        self.instances += 1
        self.failures += 1
        if self.counterexample is None:
            self.counterexample = record

    def to_dict(self) -> dict:
        return {
            "theorem": self.theorem,
            "ranges": self.ranges.to_dict(),
            "verdict": self.verdict,
            "instances": self.instances,
            "failures": self.failures,
            "counterexample": self.counterexample,
            "equality_cases": self.equality_cases,
            "probes": self.probes,
        }


def _r(x):
    return fmt_ratio(x)


def _record(sizes, counts, p, **values):
    rec = {"sizes": list(sizes), "alloc": list(counts), "p": _r(p)}
    rec.update({k: _r(v) for k, v in values.items()})
    return rec


def _equal_p_scenario(sizes, counts, p):
    return build_scenario(sizes, (p,) * len(sizes), counts, Mode.RATIONAL)


def _all_allocations(population):
    return itertools.product(*(range(1, s + 1) for s in population.sizes))


def _check_e1(rep, rg):
    for N in range(max(rg.min_N, 2), rg.max_N + 1):
        for red in range(N + 1):
            for n in range(1, N):
                lhs = var_simple_with(Fraction(red, N), n) * Fraction(N - n, N - 1)
                rhs = var_simple_without(N, red, n)
                if lhs == rhs:
                    rep.ok()
                else:
                    rep.fail({"N": N, "red": red, "n": n, "with_fpc": _r(lhs), "without": _r(rhs)})


def _check_e2(rep, rg):
    for pop in iter_populations(rg.min_N, rg.max_N, rg.min_m, rg.max_m):
        for n in range(pop.m, pop.N + 1):
            if any((n * s) % pop.N for s in pop.sizes):
                continue
            alloc = proportional_allocation(pop, n)
            counts = alloc.counts
            for reds in itertools.product(*(range(s + 1) for s in pop.sizes)):
                sc = Scenario(pop, RedDistribution(pop, reds), alloc)
                simple, spread = proportional_decomposition(sc)
                lhs = var_strat_with(sc)
                homogeneous = len(set(sc.fractions)) == 1
                if lhs == simple - spread and spread >= 0 and (spread == 0) == homogeneous:
                    rep.ok()
                else:
                    rep.fail({"sizes": list(pop.sizes), "reds": list(reds), "alloc": list(counts),
                              "strat_with": _r(lhs), "simple_with": _r(simple), "heterogeneity": _r(spread)})


def _check_1(rep, rg):
    for pop in iter_populations(rg.min_N, rg.max_N, rg.min_m, rg.max_m):
        for counts in _all_allocations(pop):
            prop = is_proportional(pop.sizes, counts)
            n = sum(counts)
            for p in rg.p_values:
                strat = var_strat_with(_equal_p_scenario(pop.sizes, counts, p))
                simple = var_simple_with(p, n)
                rec = _record(pop.sizes, counts, p, strat_with=strat, simple_with=simple)
                if prop:
                    # proportional: the two coincide exactly
                    if strat == simple:
                        rep.ok()
                        rep.equality_cases.append(rec)
                    else:
                        rep.fail(rec)
                elif strat > simple:
                    rep.ok()
                else:
                    rep.fail(rec)


def _without_sweep(rg):
    for pop in iter_populations(rg.min_N, rg.max_N, rg.min_m, rg.max_m):
        for counts in _all_allocations(pop):
            if sum(counts) < pop.N:
                yield pop, counts


def _check_2(rep, rg):
    for pop, counts in _without_sweep(rg):
        n = sum(counts)
        for p in rg.p_values:
            strat = var_strat_without(_equal_p_scenario(pop.sizes, counts, p))
            simple = var_simple_without(pop.N, p * pop.N, n)
            if strat > simple:
                rep.ok()
            else:
                rep.fail(_record(pop.sizes, counts, p, strat_without=strat, simple_without=simple))


def theorem3_conditions(sizes, counts):
    c1 = all(4 * c <= 3 * s for c, s in zip(counts, sizes))
    c2 = is_proportional(sizes, counts)
    c3 = len(set(sizes)) == 1
    return c1, c2, c3


def _check_3(rep, rg):
    for pop, counts in _without_sweep(rg):
        n, m, N = sum(counts), pop.m, pop.N
        covered = any(theorem3_conditions(pop.sizes, counts))
        if not covered and not rg.adversarial:
            continue
        predicted_equal = len(set(pop.sizes)) == 1 and len(set(counts)) == 1
        for p in rg.p_values:
            strat = var_strat_without(_equal_p_scenario(pop.sizes, counts, p))
            bound = bound_b(N, m, n, p)
            rec = _record(pop.sizes, counts, p, strat_without=strat, bound=bound)
            if not covered:
                if strat < bound:
                    rep.probes.append(rec)
                continue
            if strat < bound or (strat == bound) != predicted_equal:
                rep.fail(rec)
                continue
            rep.ok()
            if strat == bound:
                rep.equality_cases.append(rec)


def _equal_settings(rg):
    top = rg.max_m if rg.max_m is not None else 4
    for m in range(max(rg.min_m, 2), top + 1):
        for size in range(2, rg.max_stratum + 1):
            for k in range(1, size):
                yield m, size, k


def _check_4(rep, rg):
    for m, size, k in _equal_settings(rg):
        pop = StratifiedPopulation((size,) * m)
        alloc = Allocation(pop, (k,) * m)
        N, n = pop.N, k * m
        for R in range(N + 1):
            p = Fraction(R, N)
            bound = bound_b(N, m, n, p)
            value, maximisers = nature_maximisers(pop, alloc, R)
            rec = _record(pop.sizes, alloc.counts, p, max_value=value, bound=bound)
            rec["maximisers"] = [list(x) for x in maximisers]
            if R % m == 0:
                if value == bound and maximisers == [(R // m,) * m]:
                    rep.ok()
                    rep.equality_cases.append(rec)
                else:
                    rep.fail(rec)
            elif value < bound:
                # equal split is not attainable with integer counts
                rep.ok()
            else:
                rep.fail(rec)


def _check_inc(rep, rg):
    for m, size, k in _equal_settings(rg):
        N, n = m * size, m * k
        for R in range(N + 1):
            p = Fraction(R, N)
            new = bound_b(N, m, n + m, p)
            old = var_simple_without(N, R, n)
            if new <= old:
                rep.ok()
            else:
                rep.fail({"sizes": [size] * m, "alloc": [k] * m, "p": _r(p),
                          "bound_new": _r(new), "simple_without_old": _r(old)})


def theorem5_instances(max_N, min_N=4, min_m=2, max_m=None):
    """(population, n, R) triples meeting the divisibility hypotheses, n < N."""
    for pop in iter_populations(min_N, max_N, min_m, max_m):
        N = pop.N
        for n in range(pop.m, N):
            if any((n * s) % N for s in pop.sizes):
                continue
            for R in range(1, N):
                if all((R * s) % N == 0 and 0 < R * s // N < s for s in pop.sizes):
                    yield pop, n, R


def _check_5(rep, rg):
    for pop, n, R in theorem5_instances(rg.max_N, rg.min_N, rg.min_m, rg.max_m):
        N = pop.N
        p = Fraction(R, N)
        mm = minimax_value(pop, n, R, AllocationClass.ADMISSIBLE)
        lower, upper = mm.lower, mm.upper
        prop = proportional_allocation(pop, n)
        prop_worst = worst_nature(pop, prop, R).value
        rec = _record(pop.sizes, mm.allocation.counts, p, minimax=mm.value, lower=lower,
                      upper=upper, proportional_worst=prop_worst)
        rec["n"] = n
        good = lower <= mm.value <= upper and prop_worst <= upper
        if not pop.is_equal_sized():
            good = good and lower < mm.value
        if 4 * n <= 3 * N:
            good = good and upper <= var_simple_with(p, n)
        if good:
            rep.ok()
            if mm.value == lower:
                rep.equality_cases.append(rec)
        else:
            rep.fail(rec)


_CHECKERS = {
    "E1": _check_e1,
    "E2": _check_e2,
    "1": _check_1,
    "2": _check_2,
    "3": _check_3,
    "4": _check_4,
    "INC": _check_inc,
    "5": _check_5,
}


def check_theorem(theorem_id, ranges: ParameterRanges | dict | None = None) -> TheoremReport:
    """Sweep one claim over ``ranges`` (missing fields take the per-claim defaults)."""
    key = str(theorem_id).upper()
    if key not in _CHECKERS:
        raise UnknownTheoremId(theorem_id)
    rg = DEFAULT_RANGES[key]
    if isinstance(ranges, ParameterRanges):
        rg = ranges
    elif ranges:
        rg = replace(rg, **{k: v for k, v in ranges.items() if v is not None})
    rep = TheoremReport(key, rg)
    _CHECKERS[key](rep, rg)
    return rep


def counterexample_instance():
    """Two strata of sizes 2 and 5, the first sampled exhaustively, p_j = 1/2.

    Breaks the lower bound B while still losing to the simple estimator.
    """
    sc = _equal_p_scenario((2, 5), (2, 4), Fraction(1, 2))
    return {
        "scenario": sc,
        "strat_without": var_strat_without(sc),
        "bound": bound_b(sc.N, sc.m, sc.n, sc.p),
        "simple_without": var_simple_without(sc.N, sc.distribution.total_red, sc.n),
    }
