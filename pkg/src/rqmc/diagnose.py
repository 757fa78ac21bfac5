"""Randomization-quality instruments and distributional checks.

Everything here is an observable: empirical aliasing rates, exact worst-case
aliasing probabilities for scrambled nets, matrix-row uniformity scans, and
statistics of the weighted index set that drive the estimator's error
concentration.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import f2
from .estimate import estimate
from .kindex import KIndex, LAMBDA, norm1, sample_uniform_QN, xor_sum
from .nets import GeneratingMatrices, ScrambleScheme, randomize
from .streams import substream


def _involved_rows(k: KIndex) -> list[tuple[int, int]]:
    """(coordinate j, row level) pairs named by the index, 1-based."""
    out = []
    for j in range(1, k.s + 1):
        kk = k.ks[j - 1]
        while kk:
            low = kk & -kk
            out.append((j, low.bit_length()))
            kk ^= low
    return out


def _gen_row_ints(gen: GeneratingMatrices, j: int) -> list[int]:
    return list(gen.mats[j - 1].rows)


def empirical_Z_prob(scheme: ScrambleScheme, k: KIndex, m: int, e: int,
                     trials: int, rng) -> tuple[float, float]:
    """Fraction of randomizations under which the index aliases to zero.

    Only the matrix rows named by the index are realized per trial; the
    remaining randomness never enters the aliasing indicator, so the
    estimate is distributionally identical to full randomization.
    """
    if trials < 1:
        raise ValueError("need trials >= 1")
    from .kindex import ceil_bit
    if ceil_bit(k) > e:
        raise ValueError("index uses digit positions beyond the precision")
    if k.is_zero():
        return 1.0, 0.0
    if scheme.kind == "crd":
        total = np.zeros(trials, dtype=np.uint64)
        for _j, _level in _involved_rows(k):
            total ^= rng.integers(0, 1 << m, size=trials, dtype=np.uint64)
        hits = int(np.count_nonzero(total == 0))
    elif scheme.kind == "rls":
        total = np.zeros(trials, dtype=np.uint64)
        for j in range(1, k.s + 1):
            kk = k.ks[j - 1]
            if kk == 0:
                continue
            vj = np.zeros(trials, dtype=np.uint64)
            const = 0
            while kk:
                low = kk & -kk
                level = low.bit_length()
                kk ^= low
                if level <= m:
                    const ^= 1 << (level - 1)
                    if level > 1:
                        vj ^= rng.integers(0, 1 << (level - 1), size=trials,
                                           dtype=np.uint64)
                else:
                    vj ^= rng.integers(0, 1 << m, size=trials, dtype=np.uint64)
            vj ^= np.uint64(const)
            rows = _gen_row_ints(scheme.gen, j)
            for c in range(m):
                sel = ((vj >> np.uint64(c)) & np.uint64(1)) == 1
                total[sel] ^= np.uint64(rows[c])
        hits = int(np.count_nonzero(total == 0))
    else:  # shift-only: matrices are deterministic
        total = 0
        for j, level in _involved_rows(k):
            if level <= m:
                total ^= _gen_row_ints(scheme.gen, j)[level - 1]
        hits = trials if total == 0 else 0
    p_hat = hits / trials
    stderr = math.sqrt(max(p_hat * (1.0 - p_hat), 1e-300) / trials)
    return p_hat, stderr


def profile_alias_prob(gen: GeneratingMatrices, profile: tuple[int, ...]) -> Fraction:
    """Exact aliasing probability under scrambling for one top-row profile.

    ``profile[j-1]`` is the largest digit position of coordinate j (0 if the
    coordinate is inactive). The triangular scramble collapses each
    coordinate's row sum to the distribution of its top row, whose free
    bits form a linear system counted exactly. Any position beyond m makes
    the row fully uniform, giving exactly 2**-m.
    """
    m = gen.m
    if len(profile) != gen.s:
        raise ValueError("profile length != s")
    if all(a == 0 for a in profile):
        return Fraction(1)
    if any(a > m for a in profile):
        return Fraction(1, 1 << m)
    unknown_cols: list[int] = []
    b = 0
    for j, a in enumerate(profile, start=1):
        if a == 0:
            continue
        rows = _gen_row_ints(gen, j)
        b ^= rows[a - 1]
        unknown_cols.extend(rows[c] for c in range(a - 1))
    n_free = len(unknown_cols)
    if n_free == 0:
        return Fraction(1) if b == 0 else Fraction(0)
    # equation i: sum over unknowns of bit i of the unknown's column = bit i of b
    a_rows = []
    for i in range(m):
        r = 0
        for idx, col in enumerate(unknown_cols):
            r |= ((col >> i) & 1) << idx
        a_rows.append(r)
    a_mat = f2.BitMatrix(m, n_free, tuple(a_rows))
    b_vec = f2.BitVector(m, b)
    count = f2.count_solutions(a_mat, b_vec)
    return Fraction(count, 1 << n_free)


def exact_Z_prob(gen: GeneratingMatrices, k: KIndex) -> Fraction:
    """Exact aliasing probability of one index under scrambling of `gen`."""
    profile = tuple(kk.bit_length() for kk in k.ks)
    return profile_alias_prob(gen, profile)


def rank_deficiency_r1(gen: GeneratingMatrices, max_profiles: int = 1_000_000) -> float:
    """Exact 1-way rank deficiency of scrambling with these generating matrices.

    m plus the log2 of the worst aliasing probability over all nonzero
    top-row profiles; profiles reaching past row m contribute exactly 2**-m
    and are covered by the floor term.
    """
    m, s = gen.m, gen.s
    n_profiles = (m + 1) ** s - 1
    if n_profiles > max_profiles:
        raise ValueError(f"{n_profiles} profiles exceed the cap {max_profiles}")
    worst = Fraction(1, 1 << m)  # any profile using a row beyond m
    for profile in itertools.product(range(m + 1), repeat=s):
        if all(a == 0 for a in profile):
            continue
        p = profile_alias_prob(gen, profile)
        if p > worst:
            worst = p
    return m + math.log2(worst)


@dataclass
class MarginalOrderReport:
    scheme_kind: str
    rows_checked: tuple[int, ...]
    trials: int
    zmax_by_row: dict[int, float]
    flagged: list[tuple[int, int, int, float]]  # (coordinate, row, col, z)

    @property
    def passed(self) -> bool:
        return not self.flagged


def marginal_order_check(scheme: ScrambleScheme, s: int, m: int, e: int,
                         trials: int, rng, z_threshold: float = 4.5) -> MarginalOrderReport:
    """Per-entry uniformity z-scores for the matrix rows that should be random.

    Checks every row for unstructured schemes and the rows below the square
    block for triangular scrambles; any |z| above the threshold is flagged.
    """
    if e <= m and scheme.kind != "crd":
        raise ValueError("need E > m to have rows to check")
    counts = np.zeros((s, e, m), dtype=np.int64)
    for _ in range(trials):
        net = randomize(scheme, s, m, e, rng)
        for j in range(1, s + 1):
            counts[j - 1] += net.bits(j)
    first_row = 1 if scheme.kind == "crd" else m + 1
    rows_checked = tuple(range(first_row, e + 1))
    z = (counts - trials / 2.0) / math.sqrt(trials / 4.0)
    zmax_by_row = {}
    flagged = []
    for row in rows_checked:
        zmax_by_row[row] = float(np.abs(z[:, row - 1, :]).max())
        for j in range(s):
            for c in range(m):
                zval = float(z[j, row - 1, c])
                if abs(zval) > z_threshold:
                    flagged.append((j + 1, row, c + 1, zval))
    return MarginalOrderReport(scheme_kind=scheme.kind, rows_checked=rows_checked,
                               trials=trials, zmax_by_row=zmax_by_row, flagged=flagged)


def xor_closure_prob(s: int, n: int, trials: int, rng) -> float:
    """Monte-Carlo estimate that the XOR of two uniform members stays in the set."""
    if trials < 1:
        raise ValueError("need trials >= 1")
    hits = 0
    for _ in range(trials):
        k1 = sample_uniform_QN(s, n, rng)
        k2 = sample_uniform_QN(s, n, rng)
        x = xor_sum(k1, k2)
        if not x.is_zero() and norm1(x) <= n:
            hits += 1
    return hits / trials


@dataclass
class KappaHistogram:
    s: int
    threshold: int
    trials: int
    scale: float  # sqrt(LAMBDA * N / s)
    counts: dict[int, int]  # digit count of coordinate 1 -> occurrences

    def mass_within(self, eps: float) -> float:
        total = 0
        for size, cnt in self.counts.items():
            if abs(size / self.scale - 2.0) <= eps:
                total += cnt
        return total / self.trials


def kappa_concentration(s: int, n: int, trials: int, rng) -> KappaHistogram:
    """Empirical distribution of coordinate 1's digit count over uniform draws."""
    counts: dict[int, int] = {}
    for _ in range(trials):
        k = sample_uniform_QN(s, n, rng)
        size = k.ks[0].bit_count()
        counts[size] = counts.get(size, 0) + 1
    return KappaHistogram(s=s, threshold=n, trials=trials,
                          scale=math.sqrt(LAMBDA * n / s), counts=counts)


@dataclass(frozen=True)
class SignCurvePoint:
    m: int
    scheme_kind: str
    p_gt: float
    p_eq: float
    stderr: float
    trials: int


def sign_quantile_curve(scheme: ScrambleScheme, f, m_list, e: int, trials: int,
                        master_seed: int) -> list[SignCurvePoint]:
    """Per net size, the chance the estimate lands strictly above the target.

    Ties are counted separately rather than split. Each m value runs on its
    own substream so rows are reproducible independently.
    """
    mu = f.reference_mu
    out = []
    for m in m_list:
        rng = substream(master_seed, m)
        gt = eq = 0
        for _ in range(trials):
            net = randomize(scheme, f.s, m, e, rng)
            mu_hat = estimate(net, f)
            if mu_hat > mu:
                gt += 1
            elif mu_hat == mu:
                eq += 1
        p_gt = gt / trials
        stderr = math.sqrt(max(p_gt * (1.0 - p_gt), 1e-300) / trials)
        out.append(SignCurvePoint(m=m, scheme_kind=scheme.kind, p_gt=p_gt,
                                  p_eq=eq / trials, stderr=stderr, trials=trials))
    return out
