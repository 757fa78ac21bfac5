"""Walsh functions, numerical Walsh coefficients, and the exact error split.

The Walsh basis function indexed by a multi-index takes the value
(-1)**(number of positions where the index's digit sets hit set point
bits). Averaging an integrand's Walsh expansion over a randomized net
leaves, term by term, an aliasing indicator times a shift sign, which this
module computes exactly for cross-checking estimators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .kindex import KIndex, ceil_bit, norm0, norm1
from .nets import FixedPoint, RandomizedNet


class PrecisionError(ValueError):
    """Point precision is too small for the requested index."""


def _value_mask(k_component: int, e: int) -> int:
    """Digit set of one index component, moved into fraction-MSB packing."""
    mask = 0
    kk = k_component
    while kk:
        low = kk & -kk
        mask |= 1 << (e - low.bit_length())
        kk ^= low
    return mask


def wal(k: KIndex, xs: list[FixedPoint]) -> int:
    """Walsh function value (+1 or -1) at a point given as fixed-point coordinates."""
    if len(xs) != k.s:
        raise ValueError(f"point dimension {len(xs)} != index dimension {k.s}")
    parity = 0
    for j, x in enumerate(xs):
        if k.ks[j].bit_length() > x.precision:
            raise PrecisionError(f"component {j + 1} needs bit "
                                 f"{k.ks[j].bit_length()} > precision {x.precision}")
        parity ^= (x.value & _value_mask(k.ks[j], x.precision)).bit_count() & 1
    return 1 - 2 * parity


@dataclass(frozen=True)
class WalshPolynomial:
    """A finite Walsh expansion; the zero-index coefficient is the mean."""

    s: int
    terms: tuple[tuple[KIndex, float], ...]

    def __post_init__(self):
        seen = set()
        for k, _ in self.terms:
            if k.s != self.s:
                raise ValueError("term dimension mismatch")
            if k.ks in seen:
                raise ValueError("duplicate index in terms")
            seen.add(k.ks)

    @property
    def mean(self) -> float:
        for k, c in self.terms:
            if k.is_zero():
                return c
        return 0.0


@dataclass(frozen=True)
class ZSRecord:
    k: KIndex
    z: int  # 1 if the index aliases to zero under the realized matrices
    s_sign: int  # +1 or -1 from the digital shift


def zs_record(net: RandomizedNet, k: KIndex) -> ZSRecord:
    """Aliasing indicator and shift sign of one index under a realized net."""
    if k.s != net.s:
        raise ValueError(f"index dimension {k.s} != net dimension {net.s}")
    e = net.precision
    if ceil_bit(k) > e:
        raise PrecisionError(f"index uses bit {ceil_bit(k)} > precision {e}")
    row_sum = 0
    parity = 0
    for j in range(1, net.s + 1):
        kk = k.ks[j - 1]
        while kk:
            low = kk & -kk
            row_sum ^= net.row_int(j, low.bit_length())
            kk ^= low
        parity ^= (int(net.shifts[j - 1]) & _value_mask(k.ks[j - 1], e)).bit_count() & 1
    return ZSRecord(k=k, z=1 if row_sum == 0 else 0, s_sign=1 - 2 * parity)


def wal_signs_at_values(k: KIndex, values: np.ndarray, e: int) -> np.ndarray:
    """Vectorized Walsh values over packed point words of shape (n, s)."""
    if ceil_bit(k) > e:
        raise PrecisionError(f"index uses bit {ceil_bit(k)} > precision {e}")
    parity = np.zeros(values.shape[0], dtype=np.uint64)
    for j in range(k.s):
        mask = np.uint64(_value_mask(k.ks[j], e))
        parity ^= np.bitwise_count(values[:, j] & mask)
    return 1.0 - 2.0 * (parity & np.uint64(1)).astype(np.float64)


def decomposition_check(net: RandomizedNet, p: WalshPolynomial) -> tuple[float, float]:
    """Both sides of the exact error identity for a Walsh polynomial.

    Left: the net average of p minus p's mean (compensated summation).
    Right: the sum over nonzero terms of aliasing indicator times shift sign
    times coefficient. The two agree to accumulation roundoff.
    """
    if p.s != net.s:
        raise ValueError("polynomial dimension != net dimension")
    from .nets import points_values
    values = points_values(net)
    n = values.shape[0]
    point_vals = np.zeros(n, dtype=np.float64)
    for k, c in p.terms:
        if k.is_zero():
            point_vals += c
        else:
            point_vals += c * wal_signs_at_values(k, values, net.precision)
    lhs = math.fsum(point_vals.tolist()) / n - p.mean
    rhs = 0.0
    for k, c in p.terms:
        if k.is_zero():
            continue
        rec = zs_record(net, k)
        if rec.z:
            rhs += rec.s_sign * c
    return lhs, rhs


# ---------------------------------------------------------------------------
# Numerical Walsh coefficients by dyadic-cell Gauss-Legendre quadrature.

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


def _axis_grid(level: int):
    """Gauss-Legendre nodes/weights over the 2**level dyadic cells of [0,1]."""
    ncells = 1 << level
    h = 1.0 / ncells
    starts = np.arange(ncells) * h
    nodes = (starts[:, None] + (_GL_NODES[None, :] + 1.0) * (h / 2.0)).ravel()
    weights = np.tile(_GL_WEIGHTS * (h / 2.0), ncells)
    return nodes, weights, ncells


def _axis_signs(k_component: int, level: int, ncells: int) -> np.ndarray:
    """Per-cell Walsh sign along one axis (the function is cell-constant)."""
    cells = np.arange(ncells, dtype=np.uint64)
    mask = 0
    kk = k_component
    while kk:
        low = kk & -kk
        mask |= 1 << (level - low.bit_length())
        kk ^= low
    parity = np.bitwise_count(cells & np.uint64(mask)) & np.uint64(1)
    return 1.0 - 2.0 * parity.astype(np.float64)


def walsh_coeff_numeric(f, k: KIndex, level: int | None = None) -> float:
    """Approximate Walsh coefficient of a smooth integrand.

    Composite 8-point Gauss-Legendre on the dyadic cells at `level`
    (default: largest used digit position + 2). The Walsh factor is constant
    per cell, so accuracy is limited only by the smooth factor.
    """
    s = k.s
    if s > 3:
        raise ValueError("coefficient quadrature is guarded to s <= 3")
    min_level = ceil_bit(k)
    if level is None:
        level = min_level + 2
    if level < min_level:
        raise ValueError(f"level {level} < largest digit position {min_level}")
    if (1 << level) * 8 > 2 ** 22:
        raise ValueError("quadrature grid too large")
    nodes, weights, ncells = _axis_grid(level)
    per_axis_sign = [np.repeat(_axis_signs(k.ks[j], level, ncells), 8) for j in range(s)]
    if s == 1:
        vals = f(nodes[:, None]).ravel()
        return float(np.dot(weights * per_axis_sign[0], vals))
    grids = np.meshgrid(*([nodes] * s), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    vals = f(pts).reshape([len(nodes)] * s)
    acc = vals
    for j in reversed(range(s)):
        acc = np.tensordot(acc, weights * per_axis_sign[j], axes=([j], [0]))
    return float(acc)


def coeff_upper_bound(k: KIndex, deriv_l1: float) -> float:
    """Smoothness bound on |coefficient|: 2**(-weight) times the derivative L1 norm."""
    if deriv_l1 < 0:
        raise ValueError("derivative norm must be >= 0")
    return 2.0 ** (-norm1(k)) * deriv_l1


def coeff_sign_constant_lower_bound(k: KIndex, deriv_inf: float) -> float:
    """Lower bound for integrands whose relevant derivative never changes sign."""
    return deriv_inf * 2.0 ** (-norm1(k) - norm0(k))


# ---------------------------------------------------------------------------
# The per-digit-set weight functions: piecewise-polynomial construction.

class WKappa:
    """Iterated antiderivative of per-digit sign functions.

    For digit set {l1 < l2 < ... < lp}, start from the constant 1 and, for
    each digit from the largest down, multiply by that digit's sign function
    and integrate from 0. The result is continuous, nonnegative, periodic
    with period 2**(1 - l1), with known integral and maximum used as the
    construction's acceptance checks.
    """

    def __init__(self, kappa):
        kappa = sorted(set(kappa))
        if any(level < 1 for level in kappa):
            raise ValueError("digit positions are 1-based")
        if len(kappa) > 4:
            raise ValueError("piecewise construction is guarded to |kappa| <= 4")
        if kappa and kappa[-1] > 20:
            raise ValueError("digit positions above 20 unsupported")
        self.kappa = tuple(kappa)
        if not kappa:
            self.ncells = 1
            self.h = 1.0
            self.coeffs = np.ones((1, 1))
            return
        top = kappa[-1]
        self.ncells = 1 << top
        self.h = 2.0 ** -top
        coeffs = np.ones((self.ncells, 1))
        cells = np.arange(self.ncells)
        for level in sorted(kappa, reverse=True):
            sign = 1.0 - 2.0 * ((cells >> (top - level)) & 1)
            coeffs = coeffs * sign[:, None]
            coeffs = self._integrate(coeffs)
        self.coeffs = coeffs

    def _integrate(self, coeffs: np.ndarray) -> np.ndarray:
        ncells, deg = coeffs.shape
        out = np.zeros((ncells, deg + 1))
        out[:, 1:] = coeffs / np.arange(1, deg + 1)
        powers = self.h ** np.arange(1, deg + 1)
        increments = out[:, 1:] @ powers
        out[:, 0] = np.concatenate(([0.0], np.cumsum(increments)[:-1]))
        return out

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        cell = np.clip((x * self.ncells).astype(np.int64), 0, self.ncells - 1)
        t = x - cell * self.h
        res = np.zeros_like(x)
        for d in range(self.coeffs.shape[1] - 1, -1, -1):
            res = res * t + self.coeffs[cell, d]
        return res if res.shape else float(res)

    def integral(self) -> float:
        powers = self.h ** np.arange(1, self.coeffs.shape[1] + 1)
        return float(np.sum(self.coeffs @ (powers / np.arange(1, self.coeffs.shape[1] + 1))))

    def max_value(self) -> float:
        best = 0.0
        deg = self.coeffs.shape[1] - 1
        for c in range(self.ncells):
            poly = self.coeffs[c]
            candidates = [0.0, self.h]
            if deg >= 2:
                deriv = poly[1:] * np.arange(1, deg + 1)
                roots = np.roots(deriv[::-1])
                for r in roots:
                    if abs(r.imag) < 1e-12 and 0.0 < r.real < self.h:
                        candidates.append(float(r.real))
            for t in candidates:
                v = 0.0
                for d in range(deg, -1, -1):
                    v = v * t + poly[d]
                best = max(best, v)
        return best

    def expected_integral(self) -> float:
        return math.prod(2.0 ** (-level - 1) for level in self.kappa)

    def expected_max(self) -> float:
        if not self.kappa:
            return 1.0
        return 2.0 * self.expected_integral()

    def period(self) -> float:
        if not self.kappa:
            return 1.0
        return 2.0 ** (-self.kappa[0] + 1)


@lru_cache(maxsize=128)
def _wkappa_cached(kappa: tuple[int, ...]) -> WKappa:
    return WKappa(kappa)


def eval_W_kappa(kappa, x: float) -> float:
    """Value of the weight function of a digit set at x (1.0 for the empty set)."""
    key = tuple(sorted(set(kappa)))
    if not key:
        return 1.0
    return float(_wkappa_cached(key)(x))
