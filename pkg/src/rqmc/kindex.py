"""Multi-index algebra for digital-net error analysis.

A frequency index is a vector of s nonnegative integers; each component is
viewed interchangeably as the set of its nonzero binary digit positions
(1-based). The weighted set Q_N collects all nonzero indices whose total
digit-position weight is at most N.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from . import f2

# Scale constant tying the weight threshold to the sample-size exponent:
# 3 (log 2)^2 / pi^2.
LAMBDA = 3.0 * math.log(2.0) ** 2 / math.pi ** 2

# Guard on digit positions (components are arbitrary-precision ints, but
# enumeration and sampling cost grows with the largest admitted position).
MAX_BIT = 128


class EnumerationLimit(RuntimeError):
    """Requested enumeration would exceed the configured cap."""


@dataclass(frozen=True)
class KIndex:
    """Multi-index: component j is an int whose set bits are the positions in kappa_j."""

    ks: tuple[int, ...]

    def __post_init__(self):
        if not self.ks:
            raise ValueError("dimension must be >= 1")
        for k in self.ks:
            if k < 0:
                raise ValueError("components must be nonnegative")
            if k >> MAX_BIT:
                raise ValueError(f"digit positions above {MAX_BIT} unsupported")

    @property
    def s(self) -> int:
        return len(self.ks)

    def kappa(self, j: int) -> frozenset[int]:
        """Set of 1-based digit positions of component j (j in 1..s)."""
        k = self.ks[j - 1]
        return frozenset(p + 1 for p in range(k.bit_length()) if (k >> p) & 1)

    def is_zero(self) -> bool:
        return all(k == 0 for k in self.ks)

    @staticmethod
    def from_sets(kappas) -> "KIndex":
        ks = []
        for kap in kappas:
            acc = 0
            for pos in kap:
                if not 1 <= pos <= MAX_BIT:
                    raise ValueError(f"digit position {pos} out of 1..{MAX_BIT}")
                acc |= 1 << (pos - 1)
            ks.append(acc)
        return KIndex(tuple(ks))


def zero_index(s: int) -> KIndex:
    return KIndex((0,) * s)


def norm0(k: KIndex) -> int:
    """Total number of nonzero digits across components."""
    return sum(kk.bit_count() for kk in k.ks)


def norm1(k: KIndex) -> int:
    """Total digit-position weight: sum over components of the positions of set bits."""
    total = 0
    for kk in k.ks:
        while kk:
            low = kk & -kk
            total += low.bit_length()
            kk ^= low
    return total


def ceil_bit(k: KIndex) -> int:
    """Largest digit position used by any component (0 for the zero index)."""
    return max(kk.bit_length() for kk in k.ks)


def xor_sum(a: KIndex, b: KIndex) -> KIndex:
    """Componentwise symmetric difference of digit sets."""
    if a.s != b.s:
        raise ValueError(f"dimension mismatch: {a.s} != {b.s}")
    return KIndex(tuple(x ^ y for x, y in zip(a.ks, b.ks)))


@dataclass(frozen=True)
class QSet:
    s: int
    threshold: int
    members: tuple[KIndex, ...] | None
    cardinality: int


@lru_cache(maxsize=None)
def _distinct_partition_counts(n: int) -> tuple[int, ...]:
    """q[t] = number of subsets of {1,2,...} with element sum exactly t, t <= n."""
    q = [0] * (n + 1)
    q[0] = 1
    for part in range(1, n + 1):
        for t in range(n, part - 1, -1):
            q[t] += q[t - part]
    return tuple(q)


@lru_cache(maxsize=None)
def _weight_counts(s: int, n: int) -> tuple[int, ...]:
    """Number of s-component digit-set vectors with total weight exactly t, t <= n."""
    q = _distinct_partition_counts(n)
    acc = list(q)
    for _ in range(s - 1):
        nxt = [0] * (n + 1)
        for t1, c1 in enumerate(acc):
            if c1 == 0:
                continue
            for t2 in range(0, n + 1 - t1):
                nxt[t1 + t2] += c1 * q[t2]
        acc = nxt
    return tuple(acc)


def count_QN(s: int, n: int) -> int:
    """Exact size of Q_N for dimension s, by partition-count convolution."""
    if s < 1 or n < 0:
        raise ValueError("need s >= 1 and N >= 0")
    return sum(_weight_counts(s, n)) - 1  # drop the zero index


def _subsets_with_weight_at_most(n: int) -> list[int]:
    """All digit-set ints with weight <= n, as ints (includes 0)."""
    out = []

    def rec(max_part: int, remaining: int, acc: int):
        out.append(acc)
        for part in range(min(max_part, remaining), 0, -1):
            rec(part - 1, remaining - part, acc | (1 << (part - 1)))

    rec(n, n, 0)
    return out


def enumerate_QN(s: int, n: int, cap: int = 5_000_000) -> QSet:
    """All nonzero indices with weight <= N, sorted by component tuple.

    Raises EnumerationLimit if the exact count exceeds `cap`.
    """
    if s < 1 or n < 0:
        raise ValueError("need s >= 1 and N >= 0")
    if n > MAX_BIT:
        raise EnumerationLimit(f"N={n} forces digit positions above {MAX_BIT}")
    total = count_QN(s, n)
    if total > cap:
        raise EnumerationLimit(f"|Q_{n}| = {total} exceeds cap {cap}")
    singles = _subsets_with_weight_at_most(n)
    weights = {k: _int_weight(k) for k in singles}
    members: list[KIndex] = []

    def rec(j: int, budget: int, prefix: tuple[int, ...]):
        if j == s:
            if any(prefix):
                members.append(KIndex(prefix))
            return
        for k in singles:
            w = weights[k]
            if w <= budget:
                rec(j + 1, budget - w, prefix + (k,))

    rec(0, n, ())
    members.sort(key=lambda ki: ki.ks)
    assert len(members) == total
    return QSet(s=s, threshold=n, members=tuple(members), cardinality=total)


def _int_weight(k: int) -> int:
    total = 0
    while k:
        low = k & -k
        total += low.bit_length()
        k ^= low
    return total


def compute_Nm(s: int, m: int, budget: int | None = None) -> int:
    """Largest N with |Q_N| <= budget (default budget: m * 2**m).

    Satisfies count_QN(s, N) <= budget < count_QN(s, N + 1).
    """
    if budget is None:
        if m < 1:
            raise ValueError("need m >= 1 when budget is defaulted")
        budget = m * (1 << m)
    if budget < 0:
        raise ValueError("budget must be >= 0")
    n = 0
    while count_QN(s, n + 1) <= budget:
        n += 1
    return n


def flatten_bits(k: KIndex, up_to_bit: int) -> int:
    """Concatenate the component digit vectors (positions 1..up_to_bit each)."""
    if up_to_bit < ceil_bit(k):
        raise ValueError(f"up_to_bit={up_to_bit} below the largest used position")
    acc = 0
    for j, kk in enumerate(k.ks):
        acc |= kk << (j * up_to_bit)
    return acc


def rank_of_set(indices: list[KIndex], up_to_bit: int) -> int:
    """GF(2) rank of the flattened digit vectors of the given indices."""
    if not indices:
        return 0
    s = indices[0].s
    for k in indices:
        if k.s != s:
            raise ValueError("indices differ in dimension")
    return f2.rank_ints([flatten_bits(k, up_to_bit) for k in indices])


# ---------------------------------------------------------------------------
# Uniform sampling from Q_N without materializing it.

@lru_cache(maxsize=None)
def _bounded_distinct_counts(n: int) -> tuple[tuple[int, ...], ...]:
    """d[b][t] = number of subsets of {1..b} with sum exactly t (t <= n)."""
    d = [[0] * (n + 1) for _ in range(n + 1)]
    for b in range(n + 1):
        d[b][0] = 1
    for b in range(1, n + 1):
        for t in range(1, n + 1):
            d[b][t] = d[b - 1][t] + (d[b - 1][t - b] if t >= b else 0)
    return tuple(tuple(row) for row in d)


def _unrank_subset(t: int, rank_: int, n: int) -> int:
    """The rank_-th subset of {1..n} with sum exactly t (greedy on the largest part)."""
    d = _bounded_distinct_counts(n)
    acc = 0
    b = min(t, n)
    while t > 0:
        # count of target subsets whose largest part is exactly p: d[p-1][t-p]
        for p in range(b, 0, -1):
            c = d[p - 1][t - p] if t >= p else 0
            if rank_ < c:
                acc |= 1 << (p - 1)
                t -= p
                b = p - 1
                break
            rank_ -= c
        else:
            raise AssertionError("unrank ran out of parts")
    return acc


@lru_cache(maxsize=None)
def _suffix_tables(s: int, n: int) -> tuple[tuple[int, ...], ...]:
    """suffix[j][t]: ways for components j..s-1 to carry total weight exactly t."""
    q = _distinct_partition_counts(n)
    suffix = [None] * (s + 1)
    suffix[s] = [1] + [0] * n
    for j in range(s - 1, -1, -1):
        nxt = [0] * (n + 1)
        for t1 in range(n + 1):
            if q[t1] == 0:
                continue
            for t2 in range(n + 1 - t1):
                nxt[t1 + t2] += q[t1] * suffix[j + 1][t2]
        suffix[j] = nxt
    return tuple(tuple(row) for row in suffix)


def sample_uniform_QN(s: int, n: int, rng) -> KIndex:
    """Uniform draw from Q_N via exact counting (no enumeration)."""
    if n < 1:
        raise ValueError("Q_0 is empty")
    if n > MAX_BIT:
        raise EnumerationLimit(f"N={n} forces digit positions above {MAX_BIT}")
    q = _distinct_partition_counts(n)
    suffix = _suffix_tables(s, n)
    total = sum(suffix[0][1:])  # exclude total weight 0 (the zero index)
    r = int(rng.integers(0, total))
    # total weight
    t_total = 1
    while r >= suffix[0][t_total]:
        r -= suffix[0][t_total]
        t_total += 1
    # split across components, then unrank each subset
    ks = []
    remaining = t_total
    for j in range(s):
        tj = 0
        while True:
            block = q[tj] * suffix[j + 1][remaining - tj]
            if r < block:
                break
            r -= block
            tj += 1
        sub_rank, r = divmod(r, suffix[j + 1][remaining - tj])
        # r currently mixes this component's subset rank with the suffix rank:
        # block index = sub_rank * suffix + r with sub_rank < q[tj]
        ks.append(_unrank_subset(tj, sub_rank, n))
        remaining -= tj
    return KIndex(tuple(ks))
