"""Populations, red-ball distributions, allocations and their search spaces.

Everything here is an immutable value.  Enumerations are lexicographic and
deterministic, and refuse to start when the space is larger than the
configured cap (``STRATVAR_MAX_ENUM``, default 10**7).
"""

from __future__ import annotations

import enum
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .errors import (
    EmptyClass,
    NotProportionable,
    SearchSpaceExceeded,
    ValidationError,
    ZeroStratum,
)
from .exact import as_ratio

DEFAULT_CAP = 10**7
CAP_ENV = "STRATVAR_MAX_ENUM"


def enumeration_cap(override: int | None = None) -> int:
    """Cap on enumerated items: explicit override, then environment, then default."""
    if override is not None:
        cap = int(override)
    else:
        raw = os.environ.get(CAP_ENV)
        cap = int(raw) if raw else DEFAULT_CAP
    if cap < 1:
        raise ValidationError(f"enumeration cap must be positive, got {cap}")
    return cap


def _int_tuple(values, what):
    out = []
    for i, v in enumerate(values):
        if isinstance(v, bool) or not isinstance(v, int):
            try:
                f = as_ratio(v)
            except (TypeError, ValueError):
                raise ValidationError(f"{what} {i} is not an integer: {v!r}", i) from None
            if f.denominator != 1:
                raise ValidationError(f"{what} {i} is not an integer: {v!r}", i)
            v = f.numerator
        out.append(int(v))
    return tuple(out)


@dataclass(frozen=True)
class StratifiedPopulation:
    sizes: tuple[int, ...]

    def __post_init__(self):
        sizes = _int_tuple(self.sizes, "stratum")
        if len(sizes) < 2:
            raise ValidationError(f"need at least 2 strata, got {len(sizes)}")
        for j, size in enumerate(sizes):
            if size < 2:
                raise ValidationError(f"stratum {j} has size < 2", j)
        object.__setattr__(self, "sizes", sizes)

    @property
    def m(self) -> int:
        return len(self.sizes)

    @property
    def N(self) -> int:
        return sum(self.sizes)

    def is_equal_sized(self) -> bool:
        return len(set(self.sizes)) == 1


class Mode(str, enum.Enum):
    INTEGER = "integer"
    RATIONAL = "rational"


@dataclass(frozen=True)
class RedDistribution:
    """Red balls per stratum: counts r_j (integer mode) or fractions p_j (rational mode)."""

    population: StratifiedPopulation
    reds: tuple
    mode: Mode = Mode.INTEGER

    def __post_init__(self):
        mode = Mode(self.mode)
        sizes = self.population.sizes
        if len(self.reds) != len(sizes):
            raise ValidationError(
                f"reds has {len(self.reds)} entries, population has {len(sizes)} strata"
            )
        if mode is Mode.INTEGER:
            reds = _int_tuple(self.reds, "red count")
            for j, (r, size) in enumerate(zip(reds, sizes)):
                if not 0 <= r <= size:
                    raise ValidationError(f"stratum {j} red count {r} outside [0, {size}]", j)
        else:
            reds = []
            for j, v in enumerate(self.reds):
                try:
                    p = as_ratio(v)
                except (TypeError, ValueError) as exc:
                    raise ValidationError(f"stratum {j} fraction: {exc}", j) from None
                if not 0 <= p <= 1:
                    raise ValidationError(f"stratum {j} fraction {p} outside [0, 1]", j)
                reds.append(p)
            reds = tuple(reds)
        object.__setattr__(self, "reds", reds)
        object.__setattr__(self, "mode", mode)

    @property
    def fractions(self) -> tuple[Fraction, ...]:
        if self.mode is Mode.INTEGER:
            return tuple(Fraction(r, size) for r, size in zip(self.reds, self.population.sizes))
        return self.reds

    @property
    def total_red(self) -> Fraction:
        """pN; an integer whenever the mode is integer."""
        if self.mode is Mode.INTEGER:
            return Fraction(sum(self.reds))
        return sum((p * size for p, size in zip(self.reds, self.population.sizes)), Fraction(0))

    @property
    def p(self) -> Fraction:
        return self.total_red / self.population.N

    def complement(self) -> "RedDistribution":
        """Swap red and black in every stratum."""
        if self.mode is Mode.INTEGER:
            reds = tuple(size - r for r, size in zip(self.reds, self.population.sizes))
        else:
            reds = tuple(1 - p for p in self.reds)
        return RedDistribution(self.population, reds, self.mode)


@dataclass(frozen=True)
class Allocation:
    population: StratifiedPopulation
    counts: tuple[int, ...]

    def __post_init__(self):
        counts = _int_tuple(self.counts, "sample size")
        sizes = self.population.sizes
        if len(counts) != len(sizes):
            raise ValidationError(
                f"allocation has {len(counts)} entries, population has {len(sizes)} strata"
            )
        for j, (n_j, size) in enumerate(zip(counts, sizes)):
            if not 1 <= n_j <= size:
                raise ValidationError(f"stratum {j} sample size {n_j} outside [1, {size}]", j)
        object.__setattr__(self, "counts", counts)

    @property
    def n(self) -> int:
        return sum(self.counts)

    def is_proportional(self) -> bool:
        return is_proportional(self.population.sizes, self.counts)


@dataclass(frozen=True)
class Scenario:
    population: StratifiedPopulation
    distribution: RedDistribution
    allocation: Allocation

    def __post_init__(self):
        if self.distribution.population != self.population:
            raise ValidationError("distribution belongs to a different population")
        if self.allocation.population != self.population:
            raise ValidationError("allocation belongs to a different population")

    @property
    def sizes(self):
        return self.population.sizes

    @property
    def counts(self):
        return self.allocation.counts

    @property
    def fractions(self):
        return self.distribution.fractions

    @property
    def N(self) -> int:
        return self.population.N

    @property
    def n(self) -> int:
        return self.allocation.n

    @property
    def m(self) -> int:
        return self.population.m

    @property
    def p(self) -> Fraction:
        return self.distribution.p


def _infer_mode(reds) -> Mode:
    for v in reds:
        if isinstance(v, str) and "/" in v:
            return Mode.RATIONAL
        if isinstance(v, Fraction) and v.denominator != 1:
            return Mode.RATIONAL
    return Mode.INTEGER


def build_scenario(sizes, reds, counts, mode: Mode | str | None = None) -> Scenario:
    """Validate raw lists into a Scenario.

    ``mode`` defaults to rational when any red entry is a non-integral
    Fraction or a ``"num/den"`` string, integer otherwise.
    """
    population = StratifiedPopulation(tuple(sizes))
    reds = tuple(reds)
    distribution = RedDistribution(population, reds, Mode(mode) if mode else _infer_mode(reds))
    return Scenario(population, distribution, Allocation(population, tuple(counts)))


def is_proportional(sizes: Sequence[int], counts: Sequence[int]) -> bool:
    N, n = sum(sizes), sum(counts)
    return all(n_j * N == n * size for n_j, size in zip(counts, sizes))


def proportional_allocation(population: StratifiedPopulation, n: int) -> Allocation:
    N = population.N
    if not 1 <= n <= N:
        raise ValidationError(f"sample size {n} outside [1, {N}]")
    counts = []
    for j, size in enumerate(population.sizes):
        q, rem = divmod(n * size, N)
        if rem:
            raise NotProportionable(f"stratum {j}: {n}*{size}/{N} is not an integer", j)
        if q == 0:
            raise ZeroStratum(f"stratum {j} would receive no sample", j)
        counts.append(q)
    return Allocation(population, tuple(counts))


class AllocationClass(str, enum.Enum):
    ALL = "all"
    THREE_QUARTERS = "three-quarters"
    PROPORTIONAL = "proportional"
    ADMISSIBLE = "admissible"

    def contains(self, sizes: Sequence[int], counts: Sequence[int]) -> bool:
        if any(not 1 <= c <= s for c, s in zip(counts, sizes)):
            return False
        if self is AllocationClass.ALL:
            return True
        quarter = all(4 * c <= 3 * s for c, s in zip(counts, sizes))
        if self is AllocationClass.THREE_QUARTERS:
            return quarter
        prop = is_proportional(sizes, counts)
        if self is AllocationClass.PROPORTIONAL:
            return prop
        return quarter or prop


def count_compositions(total: int, lows: Sequence[int], highs: Sequence[int]) -> int:
    """Number of integer vectors with lows <= x <= highs summing to total."""
    ways = [0] * (total + 1)
    ways[0] = 1
    for lo, hi in zip(lows, highs):
        nxt = [0] * (total + 1)
        for s, w in enumerate(ways):
            if w:
                for v in range(lo, min(hi, total - s) + 1):
                    nxt[s + v] += w
        ways = nxt
    return ways[total]


def iter_compositions(total: int, lows: Sequence[int], highs: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """Lexicographic stream of bounded compositions as plain tuples."""
    k = len(lows)
    # suffix sums bound what the remaining coordinates can absorb
    min_rest = [0] * (k + 1)
    max_rest = [0] * (k + 1)
    for j in range(k - 1, -1, -1):
        min_rest[j] = min_rest[j + 1] + lows[j]
        max_rest[j] = max_rest[j + 1] + highs[j]
    if not min_rest[0] <= total <= max_rest[0]:
        return
    prefix = [0] * k

    def rec(j, left):
        if j == k - 1:
            prefix[j] = left
            yield tuple(prefix)
            return
        lo = max(lows[j], left - max_rest[j + 1])
        hi = min(highs[j], left - min_rest[j + 1])
        for v in range(lo, hi + 1):
            prefix[j] = v
            yield from rec(j + 1, left - v)

    yield from rec(0, total)


def _check_cap(count, cap):
    cap = enumeration_cap(cap)
    if count > cap:
        raise SearchSpaceExceeded(count, cap)


def distribution_tuples(population, total_red, cap=None):
    sizes = population.sizes
    if not 0 <= total_red <= population.N:
        raise ValidationError(f"total red {total_red} outside [0, {population.N}]")
    lows = [0] * len(sizes)
    _check_cap(count_compositions(total_red, lows, sizes), cap)
    return iter_compositions(total_red, lows, sizes)


def enumerate_distributions(population: StratifiedPopulation, total_red: int, cap=None) -> Iterator[RedDistribution]:
    it = distribution_tuples(population, total_red, cap)
    return (RedDistribution(population, reds) for reds in it)


def _class_highs(sizes, klass):
    if klass in (AllocationClass.THREE_QUARTERS, AllocationClass.ADMISSIBLE):
        return [3 * s // 4 for s in sizes]
    return list(sizes)


def allocation_tuples(population, n, klass=AllocationClass.ALL, cap=None):
    """Checked lexicographic stream of allocation tuples in ``klass``.

    Raises EmptyClass up front rather than yielding nothing.
    """
    klass = AllocationClass(klass)
    sizes = population.sizes
    if not population.m <= n <= population.N:
        raise ValidationError(f"sample size {n} outside [{population.m}, {population.N}]")
    lows = [1] * len(sizes)

    if klass is AllocationClass.PROPORTIONAL:
        try:
            counts = proportional_allocation(population, n).counts
        except (NotProportionable, ZeroStratum) as exc:
            raise EmptyClass(f"no proportional allocation of {n}: {exc}") from None
        return iter([counts])

    highs = _class_highs(sizes, klass)
    count = count_compositions(n, lows, highs)
    extra = None
    if klass is AllocationClass.ADMISSIBLE:
        try:
            extra = proportional_allocation(population, n).counts
        except (NotProportionable, ZeroStratum):
            extra = None
        if extra is not None and AllocationClass.THREE_QUARTERS.contains(sizes, extra):
            extra = None
        count += extra is not None
    if count == 0:
        raise EmptyClass(f"no {klass.value} allocation of {n} for sizes {sizes}")
    _check_cap(count, cap)
    stream = iter_compositions(n, lows, highs)
    if extra is None:
        return stream
    return _merge_sorted(stream, extra)


def _merge_sorted(stream, extra):
    for item in stream:
        if extra is not None and extra < item:
            yield extra
            extra = None
        yield item
    if extra is not None:
        yield extra


def enumerate_allocations(population: StratifiedPopulation, n: int, klass=AllocationClass.ALL, cap=None) -> Iterator[Allocation]:
    it = allocation_tuples(population, n, klass, cap)
    return (Allocation(population, counts) for counts in it)


def iter_populations(min_N: int, max_N: int, min_m: int = 2, max_m: int | None = None):
    """All ordered stratum-size vectors (parts >= 2) with total in [min_N, max_N]."""
    for N in range(max(min_N, 4), max_N + 1):
        top = N // 2 if max_m is None else min(max_m, N // 2)
        for m in range(max(min_m, 2), top + 1):
            for sizes in iter_compositions(N, [2] * m, [N] * m):
                yield StratifiedPopulation(sizes)
