"""Figure-style experiment drivers shared by the CLI and the acceptance suite.

Stream discipline: an experiment derives every replicate from
``substream(master_seed, index)`` with a documented index layout, so each
run is reproducible and trivially parallelizable. Trial t of an interval
experiment with r replicates per interval uses stream indices
``offset + t*r .. offset + t*r + r - 1``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .diagnose import SignCurvePoint, sign_quantile_curve
from .estimate import (ReplicateSet, bootstrap_t_interval, nominal_coverage,
                       quantile_interval, replicate, t_interval)
from .nets import ScrambleScheme
from .streams import substream

METHODS = ("quantile", "t", "bootstrap_t")


def _interval(method: str, reps: ReplicateSet, ell: int, u: int, level: float,
              boot_b: int, boot_rng):
    if method == "quantile":
        return quantile_interval(reps, ell, u)
    if method == "t":
        return t_interval(reps, level)
    if method == "bootstrap_t":
        return bootstrap_t_interval(reps, level, boot_b, boot_rng)
    raise ValueError(f"unknown method {method!r}")


def sign_curve(schemes: list[ScrambleScheme], f, m_list, e: int, trials: int,
               master_seed: int) -> list[SignCurvePoint]:
    rows: list[SignCurvePoint] = []
    for scheme in schemes:
        rows.extend(sign_quantile_curve(scheme, f, m_list, e, trials, master_seed))
    return rows


@dataclass(frozen=True)
class CoverageRow:
    m: int
    scheme_kind: str
    method: str
    hits: int
    trials: int
    nominal: float


def coverage(f, scheme: ScrambleScheme, m: int, e: int, r: int, ell: int,
             u: int, trials: int, master_seed: int,
             methods=("quantile",), boot_b: int = 1000) -> list[CoverageRow]:
    """Repeatedly build intervals and count how many capture the reference value."""
    level = nominal_coverage(r, ell, u)
    mu = f.reference_mu
    hits = {meth: 0 for meth in methods}
    for t in range(trials):
        reps = replicate(scheme, f, m, e, r, master_seed, stream_base=t * r)
        boot_rng = substream(master_seed, 10_000_000 + t)
        for meth in methods:
            iv = _interval(meth, reps, ell, u, level, boot_b, boot_rng)
            if iv.covers(mu):
                hits[meth] += 1
    return [CoverageRow(m=m, scheme_kind=scheme.kind, method=meth,
                        hits=hits[meth], trials=trials, nominal=level)
            for meth in methods]


@dataclass(frozen=True)
class LengthRow:
    m: int
    scheme_kind: str
    method: str
    p90_length: float


def percentile_lengths(f, scheme: ScrambleScheme, m_list, e: int, r: int,
                       ell: int, u: int, trials: int, master_seed: int,
                       methods=("quantile", "t"), boot_b: int = 1000,
                       percentile: float = 90.0) -> list[LengthRow]:
    """Upper-percentile interval lengths per net size and method."""
    level = nominal_coverage(r, ell, u)
    out: list[LengthRow] = []
    for mi, m in enumerate(m_list):
        lengths = {meth: [] for meth in methods}
        for t in range(trials):
            base = (mi * trials + t) * r
            reps = replicate(scheme, f, m, e, r, master_seed, stream_base=base)
            boot_rng = substream(master_seed, 20_000_000 + mi * trials + t)
            for meth in methods:
                iv = _interval(meth, reps, ell, u, level, boot_b, boot_rng)
                lengths[meth].append(iv.length)
        for meth in methods:
            out.append(LengthRow(m=m, scheme_kind=scheme.kind, method=meth,
                                 p90_length=float(np.percentile(lengths[meth],
                                                                percentile))))
    return out


@dataclass(frozen=True)
class RobotLengthRow:
    method: str
    trial: int
    length: float
    hit: int


@dataclass(frozen=True)
class RobotErrorRow:
    m: int
    scheme_kind: str
    trial: int
    rep: int
    error: float


def robot_trials(f, scheme: ScrambleScheme, m: int, e: int, r: int, ell: int,
                 u: int, trials: int, master_seed: int, boot_b: int = 1000
                 ) -> tuple[list[RobotLengthRow], list[RobotErrorRow]]:
    """Per-trial interval lengths/hits for all three methods, plus raw errors."""
    level = nominal_coverage(r, ell, u)
    mu = f.reference_mu
    length_rows: list[RobotLengthRow] = []
    error_rows: list[RobotErrorRow] = []
    for t in range(trials):
        reps = replicate(scheme, f, m, e, r, master_seed, stream_base=t * r)
        boot_rng = substream(master_seed, 30_000_000 + t)
        for meth in METHODS:
            iv = _interval(meth, reps, ell, u, level, boot_b, boot_rng)
            length_rows.append(RobotLengthRow(method=meth, trial=t,
                                              length=iv.length,
                                              hit=int(iv.covers(mu))))
        for i, v in enumerate(reps.values):
            error_rows.append(RobotErrorRow(m=m, scheme_kind=scheme.kind,
                                            trial=t, rep=i, error=v - mu))
    return length_rows, error_rows


def median_decay_ratios(f, scheme: ScrambleScheme, m_list, e: int, seeds: int,
                        master_seed: int) -> list[tuple[int, float]]:
    """|median error| per net size over `seeds` independent estimates."""
    mu = f.reference_mu
    out = []
    for mi, m in enumerate(m_list):
        reps = replicate(scheme, f, m, e, seeds, master_seed,
                         stream_base=mi * seeds)
        med = float(np.median(reps.values))
        out.append((m, abs(med - mu)))
    return out
