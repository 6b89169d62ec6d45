"""Seeded Monte Carlo for the four estimators.

Each stratum draws from its own substream keyed by (seed, stratum index);
the simple estimators draw from the pooled urn on a separate substream.
Trials are split into contiguous blocks across worker threads; because the
generator is counter based the merged trial values do not depend on the
split, so results are bit-identical for any worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ValidationError
from .exact import fmt_ratio
from .kernels import stream_key, urn_counts
from .model import Mode, Scenario
from .variance import Kind, variance

POOLED_TAG = 1 << 32


def draw_without_replacement(N, red, n, rng):
    """Red balls among ``n`` drawn one at a time from the urn, removing each draw."""
    if not 0 <= red <= N or not 1 <= n <= N:
        raise ValidationError(f"bad urn: N={N}, red={red}, n={n}")
    y, left, reds = 0, N, red
    for _ in range(n):
        if rng.random() * left < reds:
            y += 1
            reds -= 1
        left -= 1
    return y


def draw_with_replacement(N, red, n, rng):
    """Red balls among ``n`` independent uniform picks from the urn."""
    if not 0 <= red <= N or n < 1 or N < 1:
        raise ValidationError(f"bad urn: N={N}, red={red}, n={n}")
    return sum(1 for _ in range(n) if rng.random() * N < red)


@dataclass(frozen=True)
class SimConfig:
    scenario: Scenario
    kind: Kind
    trials: int
    seed: int
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        if self.trials < 1:
            raise ValidationError(f"trials must be >= 1, got {self.trials}")
        if self.workers < 1:
            raise ValidationError(f"workers must be >= 1, got {self.workers}")
        if not 0 <= self.seed < 1 << 64:
            raise ValidationError("seed must fit in 64 unsigned bits")
        if self.scenario.distribution.mode is not Mode.INTEGER:
            raise ValidationError("simulation needs integer red counts")


@dataclass(frozen=True)
class SimResult:
    kind: Kind
    trials: int
    seed: int
    mean: float
    variance: float
    mean_stderr: float
    variance_stderr: float
    p: Fraction
    exact_variance: Fraction

    @property
    def z(self) -> float:
        return _z(self.variance, float(self.exact_variance), self.variance_stderr)

    @property
    def mean_z(self) -> float:
        return _z(self.mean, float(self.p), self.mean_stderr)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "trials": self.trials,
            "seed": self.seed,
            "mean": self.mean,
            "variance": self.variance,
            "mean_stderr": self.mean_stderr,
            "variance_stderr": self.variance_stderr,
            "p": {"exact": fmt_ratio(self.p), "decimal": float(self.p)},
            "exact_variance": {"exact": fmt_ratio(self.exact_variance),
                               "decimal": float(self.exact_variance)},
            "z": self.z,
            "mean_z": self.mean_z,
        }

    CSV_HEADER = ("kind", "trials", "seed", "mean", "variance", "variance_stderr",
                  "exact_variance", "exact_decimal", "z")

    def csv_row(self) -> list:
        return [self.kind.value, self.trials, self.seed, repr(self.mean), repr(self.variance),
                repr(self.variance_stderr), fmt_ratio(self.exact_variance),
                repr(float(self.exact_variance)), repr(self.z)]


def _z(observed, expected, stderr):
    if stderr > 0:
        return (observed - expected) / stderr
    return 0.0 if observed == expected else math.inf


def _blocks(trials, workers):
    bounds = [trials * k // workers for k in range(workers + 1)]
    return [(a, b) for a, b in zip(bounds, bounds[1:]) if b > a]


def _counts(key, red, total, n, replace, trials, workers, backend=None):
    out = np.empty(trials, dtype=np.int64)
    blocks = _blocks(trials, workers)
    if len(blocks) == 1:
        urn_counts(key, red, total, n, replace, 0, trials, out, backend)
        return out

    def run(block):
        a, b = block
        urn_counts(key, red, total, n, replace, a, b, out[a:b], backend)

    with ThreadPoolExecutor(max_workers=len(blocks)) as pool:
        list(pool.map(run, blocks))
    return out


def stratum_counts(config: SimConfig, backend=None) -> list[np.ndarray]:
    """Per-stratum red-count arrays (stratified kinds) or the pooled array (simple kinds)."""
    sc = config.scenario
    replace = config.kind.replacement
    if config.kind.stratified:
        return [
            _counts(stream_key(config.seed, j), r, size, n_j, replace, config.trials,
                    config.workers, backend)
            for j, (size, r, n_j) in enumerate(zip(sc.sizes, sc.distribution.reds, sc.counts))
        ]
    red = int(sc.distribution.total_red)
    return [_counts(stream_key(config.seed, POOLED_TAG), red, sc.N, sc.n, replace,
                    config.trials, config.workers, backend)]


def trial_values(config: SimConfig, backend=None) -> np.ndarray:
    """Estimator value for each trial."""
    sc = config.scenario
    counts = stratum_counts(config, backend)
    if not config.kind.stratified:
        return counts[0] / float(sc.n)
    values = np.zeros(config.trials)
    for arr, size, n_j in zip(counts, sc.sizes, sc.counts):
        values += arr * (size / (sc.N * n_j))
    return values


def estimate(config: SimConfig, backend=None) -> SimResult:
    """Empirical mean and variance of the estimator against its exact variance.

    The variance standard error uses the fourth central moment:
    Var(s^2) ~ (m4 - s^4 (T-3)/(T-1)) / T.
    """
    x = trial_values(config, backend)
    T = config.trials
    mean = float(np.mean(x))
    dev = x - mean
    if T > 1:
        var = float(np.sum(dev * dev)) / (T - 1)
        m4 = float(np.mean(dev**4))
        vv = (m4 - var * var * (T - 3) / (T - 1)) / T
        var_se = math.sqrt(max(vv, 0.0))
        mean_se = math.sqrt(var / T)
    else:
        var, var_se, mean_se = 0.0, math.nan, math.nan
    sc = config.scenario
    return SimResult(config.kind, T, config.seed, mean, var, mean_se, var_se,
                     sc.p, variance(sc, config.kind))
