"""Exact variances of the four fraction estimators and the bounds built on them.

Every function returns a :class:`fractions.Fraction`.  Strata are sampled
independently; within a stratum the draws are with or without replacement.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import ExhaustedStratum, HypothesisViolated, NotProportional, ValidationError
from .exact import as_ratio, fmt_ratio
from .model import Allocation, Scenario, StratifiedPopulation


class Kind(str, enum.Enum):
    SIMPLE_WITH = "simple-with"
    SIMPLE_WITHOUT = "simple-without"
    STRAT_WITH = "strat-with"
    STRAT_WITHOUT = "strat-without"

    @property
    def stratified(self) -> bool:
        return self in (Kind.STRAT_WITH, Kind.STRAT_WITHOUT)

    @property
    def replacement(self) -> bool:
        return self in (Kind.SIMPLE_WITH, Kind.STRAT_WITH)


def _check_p(p):
    p = as_ratio(p)
    if not 0 <= p <= 1:
        raise ValidationError(f"fraction {p} outside [0, 1]")
    return p


def var_simple_with(p, n: int) -> Fraction:
    """p(1-p)/n: binomial fraction variance."""
    p = _check_p(p)
    if n < 1:
        raise ValidationError(f"sample size {n} must be >= 1")
    return p * (1 - p) / n


def var_simple_without(N: int, red, n: int) -> Fraction:
    """Hypergeometric fraction variance, p(1-p)/n * (N-n)/(N-1)."""
    red = as_ratio(red)
    if N < 2:
        raise ValidationError(f"population size {N} must be >= 2")
    if not 0 <= red <= N:
        raise ValidationError(f"red count {red} outside [0, {N}]")
    if not 1 <= n <= N:
        raise ValidationError(f"sample size {n} outside [1, {N}]")
    p = red / N
    return p * (1 - p) / n * Fraction(N - n, N - 1)


def var_strat_with(scenario: Scenario) -> Fraction:
    N = scenario.N
    total = Fraction(0)
    for size, n_j, p_j in zip(scenario.sizes, scenario.counts, scenario.fractions):
        total += Fraction(size, N) ** 2 * p_j * (1 - p_j) / n_j
    return total


def var_strat_without(scenario: Scenario) -> Fraction:
    N = scenario.N
    total = Fraction(0)
    for size, n_j, p_j in zip(scenario.sizes, scenario.counts, scenario.fractions):
        total += Fraction(size, N) ** 2 * p_j * (1 - p_j) / n_j * Fraction(size - n_j, size - 1)
    return total


def variance(scenario: Scenario, kind: Kind | str) -> Fraction:
    """Variance of estimator ``kind`` on ``scenario``.

    The simple estimators see the pooled urn: N balls, pN red, sample size n.
    """
    kind = Kind(kind)
    if kind is Kind.SIMPLE_WITH:
        return var_simple_with(scenario.p, scenario.n)
    if kind is Kind.SIMPLE_WITHOUT:
        return var_simple_without(scenario.N, scenario.distribution.total_red, scenario.n)
    if kind is Kind.STRAT_WITH:
        return var_strat_with(scenario)
    return var_strat_without(scenario)


def bound_b(N: int, m: int, n: int, p) -> Fraction:
    """(N-n)/(N-m) * p(1-p)/n; zero at n = N."""
    p = _check_p(p)
    if m < 2 or n < m or N <= m or n > N:
        raise ValidationError(f"need m >= 2, m <= n <= N, N > m; got N={N}, m={m}, n={n}")
    return Fraction(N - n, N - m) * p * (1 - p) / n


def proportional_decomposition(scenario: Scenario) -> tuple[Fraction, Fraction]:
    """Split the stratified with-replacement variance as simple-with minus heterogeneity.

    Only valid for an exactly proportional allocation.
    """
    if not scenario.allocation.is_proportional():
        raise NotProportional(
            f"allocation {scenario.counts} is not proportional to {scenario.sizes}"
        )
    p, n, N = scenario.p, scenario.n, scenario.N
    spread = sum(
        (Fraction(size, N) * (p_j - p) ** 2 for size, p_j in zip(scenario.sizes, scenario.fractions)),
        Fraction(0),
    )
    return var_simple_with(p, n), spread / n


def minimax_upper_bound(population: StratifiedPopulation, n: int, p) -> Fraction:
    """Upper bound on the min-max stratified variance (proportional Statistician)."""
    p = _check_p(p)
    sizes, N, m = population.sizes, population.N, population.m
    if not m <= n < N:
        raise HypothesisViolated(f"need {m} <= n < {N}, got n={n}")
    for j, size in enumerate(sizes):
        if (size * n) % N:
            raise HypothesisViolated(f"stratum {j}: {size}*{n}/{N} is not an integer", j)
    spread = sum((Fraction(N - m * size, size - 1) for size in sizes), Fraction(0))
    return bound_b(N, m, n, p) + Fraction(N - n, 4 * (N - m) * n * N * N) * spread


def lagrange_weights(population: StratifiedPopulation, allocation: Allocation):
    """Per-stratum (alpha_j, beta_j) so that var_strat_without = sum alpha_j p_j (1 - p_j)."""
    N = population.N
    alphas, betas = [], []
    for size, n_j in zip(population.sizes, allocation.counts):
        alphas.append(Fraction(size * size * (size - n_j), N * N * (size - 1) * n_j))
        betas.append(Fraction(size, N))
    return alphas, betas


def nature_relaxed_max(population: StratifiedPopulation, allocation: Allocation, p):
    """Stationary point of sum alpha_j p_j(1-p_j) on the plane sum beta_j p_j = p.

    The maximiser is not clamped to [0, 1], so the value is an upper bound on
    the exact integer-mode maximum, not the maximum itself.
    """
    p = _check_p(p)
    for j, (size, n_j) in enumerate(zip(population.sizes, allocation.counts)):
        if n_j == size:
            raise ExhaustedStratum(f"stratum {j} is sampled exhaustively; alpha_j = 0", j)
    alphas, betas = lagrange_weights(population, allocation)
    spread = sum((b * b / a for a, b in zip(alphas, betas)), Fraction(0))
    half = Fraction(1, 2)
    argmax = [half + b * (p - half) / (a * spread) for a, b in zip(alphas, betas)]
    value = (sum(alphas, Fraction(0)) - (2 * p - 1) ** 2 / spread) / 4
    return value, argmax


@dataclass(frozen=True)
class VarianceReport:
    kind: Kind
    exact: Fraction
    inputs: dict = field(default_factory=dict)

    @property
    def decimal(self) -> float:
        return float(self.exact)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "exact": fmt_ratio(self.exact),
            "decimal": self.decimal,
            "inputs": self.inputs,
        }


def scenario_inputs(scenario: Scenario) -> dict:
    reds = scenario.distribution.reds
    if scenario.distribution.mode.value == "rational":
        reds = [fmt_ratio(r) for r in reds]
    return {
        "sizes": list(scenario.sizes),
        "reds": list(reds),
        "alloc": list(scenario.counts),
    }


def report(scenario: Scenario, kind: Kind | str) -> VarianceReport:
    kind = Kind(kind)
    return VarianceReport(kind, variance(scenario, kind), scenario_inputs(scenario))


def strat_without_terms(sizes: Sequence[int], counts: Sequence[int]):
    """Integer weights w_j and common denominator D with

    var_strat_without = sum_j w_j * r_j * (N_j - r_j) / D

    for integer red counts r_j; used by the exhaustive searches.
    """
    N = sum(sizes)
    dens = [n_j * (size - 1) for size, n_j in zip(sizes, counts)]
    lcm = math.lcm(*dens)
    weights = [(size - n_j) * (lcm // d) for size, n_j, d in zip(sizes, counts, dens)]
    return weights, N * N * lcm

