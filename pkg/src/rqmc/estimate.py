"""Net-average estimator, replicate management, and interval constructions."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.special import betainc

from .nets import RandomizedNet, ScrambleScheme, points_real, randomize
from .streams import substream


@dataclass(frozen=True)
class ReplicateSet:
    """Independent estimates from one configuration, sorted ascending."""

    values: tuple[float, ...]
    m: int
    precision: int
    scheme_kind: str
    seed_record: dict

    def __post_init__(self):
        if not self.values:
            raise ValueError("need at least one replicate")
        if list(self.values) != sorted(self.values):
            raise ValueError("replicates must be sorted")

    @property
    def r(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    method: str  # "quantile" | "t" | "bootstrap_t"
    nominal: float

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError("lo > hi")

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def covers(self, mu: float) -> bool:
        return self.lo <= mu <= self.hi


def estimate(net: RandomizedNet, f) -> float:
    """Average of the integrand over the net's points (compensated summation)."""
    if f.s != net.s:
        raise ValueError(f"integrand dimension {f.s} != net dimension {net.s}")
    vals = f.eval(points_real(net))
    return math.fsum(vals.tolist()) / net.n


def replicate(scheme: ScrambleScheme, f, m: int, e: int, r: int,
              master_seed: int, stream_base: int = 0) -> ReplicateSet:
    """r estimates from independent randomizations on disjoint substreams.

    Replicate t draws from stream ``stream_base + t`` of ``master_seed``, so
    the same (seed, base) always reproduces the same set and distinct bases
    never share randomness.
    """
    if r < 1:
        raise ValueError("need r >= 1")
    vals = []
    for t in range(r):
        rng = substream(master_seed, stream_base + t)
        net = randomize(scheme, f.s, m, e, rng)
        vals.append(estimate(net, f))
    vals.sort()
    return ReplicateSet(values=tuple(vals), m=m, precision=e,
                        scheme_kind=scheme.kind,
                        seed_record={"master_seed": master_seed,
                                     "stream_base": stream_base})


def nominal_coverage(r: int, ell: int, u: int) -> float:
    """Coverage level of the (ell, u) order-statistic interval.

    Exact fair-coin binomial computation: F(u-1) - F(ell-1) with F the
    CDF of the number of replicates falling below the target.
    """
    _check_indices(r, ell, u)
    frac = _binom_cdf(r, u - 1) - _binom_cdf(r, ell - 1)
    return float(frac)


def nominal_coverage_exact(r: int, ell: int, u: int) -> Fraction:
    _check_indices(r, ell, u)
    return _binom_cdf(r, u - 1) - _binom_cdf(r, ell - 1)


def _check_indices(r: int, ell: int, u: int) -> None:
    if not (1 <= ell < u <= r):
        raise ValueError(f"need 1 <= ell < u <= r, got ell={ell} u={u} r={r}")


def _binom_cdf(r: int, x: int) -> Fraction:
    return sum(Fraction(math.comb(r, j), 2 ** r) for j in range(0, x + 1))


def quantile_interval(reps: ReplicateSet, ell: int, u: int) -> Interval:
    """[ell-th, u-th] order statistics of the replicates."""
    _check_indices(reps.r, ell, u)
    return Interval(lo=reps.values[ell - 1], hi=reps.values[u - 1],
                    method="quantile", nominal=nominal_coverage(reps.r, ell, u))


def student_quantile(p: float, df: int) -> float:
    """Student-t quantile by bisection on the incomplete-beta CDF (to 1e-12)."""
    if not 0.0 < p < 1.0:
        raise ValueError("p must be in (0,1)")
    if df < 1:
        raise ValueError("df must be >= 1")
    if p == 0.5:
        return 0.0
    if p < 0.5:
        return -student_quantile(1.0 - p, df)

    def cdf(t: float) -> float:
        if t == 0.0:
            return 0.5
        x = df / (df + t * t)
        return 1.0 - 0.5 * float(betainc(df / 2.0, 0.5, x))

    lo, hi = 0.0, 1.0
    while cdf(hi) < p:
        hi *= 2.0
        if hi > 1e18:
            raise ArithmeticError("quantile bisection diverged")
    while hi - lo > 1e-12 * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if cdf(mid) < p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def t_interval(reps: ReplicateSet, level: float) -> Interval:
    """Classic mean +- t * sd / sqrt(r) interval at the given two-sided level."""
    if reps.r < 2:
        raise ValueError("t interval needs r >= 2")
    vals = np.asarray(reps.values)
    mean = float(vals.mean())
    sd = float(vals.std(ddof=1))
    t = student_quantile(1.0 - (1.0 - level) / 2.0, reps.r - 1)
    half = t * sd / math.sqrt(reps.r)
    return Interval(lo=mean - half, hi=mean + half, method="t", nominal=level)


def bootstrap_t_interval(reps: ReplicateSet, level: float, b: int, rng) -> Interval:
    """Bootstrap-t interval: resample, studentize, invert empirical quantiles."""
    if reps.r < 2:
        raise ValueError("bootstrap-t needs r >= 2")
    if b < 100:
        raise ValueError("need at least 100 resamples")
    vals = np.asarray(reps.values)
    r = reps.r
    mean = float(vals.mean())
    se = float(vals.std(ddof=1)) / math.sqrt(r)
    if se == 0.0:
        return Interval(lo=mean, hi=mean, method="bootstrap_t", nominal=level)
    idx = rng.integers(0, r, size=(b, r))
    samples = vals[idx]
    means = samples.mean(axis=1)
    sds = samples.std(axis=1, ddof=1)
    ses = sds / math.sqrt(r)
    with np.errstate(divide="ignore", invalid="ignore"):
        tstats = np.where(ses > 0, (means - mean) / ses, 0.0)
    alpha = 1.0 - level
    q_lo = float(np.quantile(tstats, alpha / 2.0))
    q_hi = float(np.quantile(tstats, 1.0 - alpha / 2.0))
    return Interval(lo=mean - q_hi * se, hi=mean - q_lo * se,
                    method="bootstrap_t", nominal=level)


def median_estimate(reps: ReplicateSet) -> float:
    """Middle order statistic (average of the two middles for even r)."""
    vals = reps.values
    r = len(vals)
    if r % 2:
        return vals[r // 2]
    return 0.5 * (vals[r // 2 - 1] + vals[r // 2])
