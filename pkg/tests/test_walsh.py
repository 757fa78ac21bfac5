import math

import numpy as np
import pytest

from rqmc import walsh
from rqmc.kindex import KIndex, enumerate_QN, zero_index
from rqmc.nets import FixedPoint, crd, load_joe_kuo, randomize, rls, shift_only
from rqmc.streams import substream
from rqmc.walsh import (WalshPolynomial, WKappa, coeff_upper_bound,
                        decomposition_check, eval_W_kappa, wal,
                        walsh_coeff_numeric, zs_record)


def fp(x, e=16):
    return FixedPoint(int(x * (1 << e)) % (1 << e), e)


def test_wal_zero_index_constant_one():
    z = zero_index(2)
    for x in (0.0, 0.3, 0.77):
        assert wal(z, [fp(x), fp(x / 2)]) == 1


def test_wal_first_bit_sign():
    k = KIndex.from_sets([{1}])
    assert wal(k, [fp(0.25)]) == 1
    assert wal(k, [fp(0.75)]) == -1
    assert wal(k, [fp(0.0)]) == 1
    assert wal(k, [fp(0.5)]) == -1


def test_wal_precision_guard():
    k = KIndex.from_sets([{9}])
    with pytest.raises(walsh.PrecisionError):
        wal(k, [FixedPoint(0, 8)])


def test_wal_net_mean_equals_indicator_times_sign():
    # averaging the basis function over the net gives exactly Z * S
    gen = load_joe_kuo(None, 2, 6)
    rng = substream(31, 0)
    q = enumerate_QN(2, 6).members
    pick = np.random.default_rng(5)
    for scheme in (rls(gen), crd(), shift_only(gen)):
        for _ in range(10):
            net = randomize(scheme, 2, 6, 16, rng)
            k = q[int(pick.integers(0, len(q)))]
            from rqmc.nets import points_values
            signs = walsh.wal_signs_at_values(k, points_values(net), 16)
            total = int(signs.sum())  # each sign is +-1, so the sum is exact
            rec = zs_record(net, k)
            assert total == rec.z * rec.s_sign * net.n


def test_orthonormality_on_dyadic_grid():
    # full grid at resolution 2^6: mean of wal_a * wal_b = [a == b]
    ks = [KIndex((a,)) for a in range(8)]
    grid = np.arange(64, dtype=np.uint64)[:, None] << np.uint64(10)  # E=16
    for a in ks:
        for b in ks:
            sa = walsh.wal_signs_at_values(a, grid, 16)
            sb = walsh.wal_signs_at_values(b, grid, 16)
            mean = float((sa * sb).mean())
            assert mean == (1.0 if a.ks == b.ks else 0.0)


def test_coeff_linear_first_bits():
    f = lambda pts: pts[:, 0]
    assert abs(walsh_coeff_numeric(f, KIndex.from_sets([{1}])) + 0.25) < 1e-10
    assert abs(walsh_coeff_numeric(f, KIndex.from_sets([{2}])) + 0.125) < 1e-10


def test_coeff_constant_orthogonal():
    f = lambda pts: np.full(pts.shape[0], 2.5)
    assert abs(walsh_coeff_numeric(f, KIndex.from_sets([{3}]))) < 1e-12


def test_coeff_2d_product():
    f = lambda pts: pts[:, 0] * pts[:, 1]
    got = walsh_coeff_numeric(f, KIndex.from_sets([{1}, {1}]))
    assert abs(got - 0.0625) < 1e-10


def test_coeff_level_guard():
    f = lambda pts: pts[:, 0]
    with pytest.raises(ValueError):
        walsh_coeff_numeric(f, KIndex.from_sets([{3}]), level=2)


def test_coeff_dimension_guard():
    f = lambda pts: pts.sum(axis=1)
    with pytest.raises(ValueError):
        walsh_coeff_numeric(f, KIndex((1, 1, 1, 1)))


def test_coeff_bounds_for_exponential():
    # digit sets up to total weight 8
    f = lambda pts: np.exp(pts[:, 0])
    deriv_l1 = math.e - 1  # every derivative of e^x has L1 norm e - 1
    deriv_inf = 1.0  # and infimum 1
    for kappa in [{1}, {2}, {1, 2}, {1, 3}, {2, 3}, {1, 2, 3}, {3, 5}, {8},
                  {1, 2, 5}]:
        k = KIndex.from_sets([kappa])
        got = abs(walsh_coeff_numeric(f, k))
        assert got <= coeff_upper_bound(k, deriv_l1) + 1e-12
        assert got >= walsh.coeff_sign_constant_lower_bound(k, deriv_inf) - 1e-12


def test_coeff_upper_bound_examples():
    k = KIndex.from_sets([{1}])
    assert coeff_upper_bound(k, 1.0) == 0.5
    assert coeff_upper_bound(k, 0.0) == 0.0
    assert 0.5 >= 0.25  # bound dominates the linear integrand's coefficient


def test_w_kappa_triangle():
    w = WKappa((1,))
    assert w(0.5) == 0.5
    assert w(0.0) == 0.0
    assert abs(w(0.25) - 0.25) < 1e-15
    assert abs(w(1.0 - 1e-12)) < 1e-9


def test_w_kappa_identities_through_size_three():
    kappas = [(1,), (2,), (3,), (1, 2), (1, 3), (2, 3), (1, 2, 3)]
    for kap in kappas:
        w = WKappa(kap)
        assert abs(w.integral() - w.expected_integral()) < 1e-8
        assert abs(w.max_value() - w.expected_max()) < 1e-8


def test_w_kappa_size_four():
    w = WKappa((1, 2, 3, 4))
    assert abs(w.integral() - w.expected_integral()) < 1e-10
    assert abs(w.max_value() - w.expected_max()) < 1e-10


def test_w_kappa_periodicity():
    w = WKappa((2,))
    xs = np.linspace(0.0, 0.5 - 1e-9, 500)
    assert np.abs(w(xs) - w(xs + 0.5)).max() < 1e-8
    w23 = WKappa((2, 3))
    xs = np.linspace(0.0, 0.5 - 1e-9, 500)
    assert np.abs(w23(xs) - w23(xs + 0.5)).max() < 1e-8


def test_w_kappa_nonnegative_and_continuous():
    for kap in [(1,), (2,), (1, 2), (1, 2, 3)]:
        w = WKappa(kap)
        xs = np.linspace(0, 1, 4097)[:-1]
        vals = w(xs)
        assert vals.min() >= -1e-14
        assert np.abs(np.diff(vals)).max() < 2.5 / 4096  # slope is at most 1


def test_w_kappa_empty_convention():
    assert eval_W_kappa([], 0.37) == 1.0


def test_w_kappa_guards():
    with pytest.raises(ValueError):
        WKappa((1, 2, 3, 4, 5))
    with pytest.raises(ValueError):
        WKappa((0,))


def test_zs_zero_index():
    net = randomize(crd(), 2, 4, 8, substream(32, 0))
    rec = zs_record(net, zero_index(2))
    assert rec.z == 1 and rec.s_sign == 1


def test_shift_sign_multiplicative():
    from rqmc.kindex import xor_sum
    gen = load_joe_kuo(None, 2, 6)
    rng = substream(33, 0)
    q = enumerate_QN(2, 8).members
    pick = np.random.default_rng(6)
    for _ in range(25):
        net = randomize(rls(gen), 2, 6, 16, rng)
        a, b = (q[int(i)] for i in pick.integers(0, len(q), size=2))
        ra, rb = zs_record(net, a), zs_record(net, b)
        rab = zs_record(net, xor_sum(a, b))
        assert rab.s_sign == ra.s_sign * rb.s_sign


def test_zs_precision_guard():
    net = randomize(crd(), 1, 4, 8, substream(34, 0))
    with pytest.raises(walsh.PrecisionError):
        zs_record(net, KIndex.from_sets([{9}]))


def test_decomposition_constant_polynomial():
    net = randomize(crd(), 1, 5, 16, substream(35, 0))
    p = WalshPolynomial(1, ((zero_index(1), 4.2),))
    lhs, rhs = decomposition_check(net, p)
    assert lhs == 0.0 and rhs == 0.0


def test_decomposition_single_term():
    gen = load_joe_kuo(None, 1, 6)
    rng = substream(36, 0)
    k = KIndex.from_sets([{2, 4}])
    for _ in range(10):
        net = randomize(rls(gen), 1, 6, 16, rng)
        p = WalshPolynomial(1, ((k, 0.8),))
        lhs, rhs = decomposition_check(net, p)
        rec = zs_record(net, k)
        assert rhs == rec.z * rec.s_sign * 0.8
        assert abs(lhs - rhs) < 1e-15


def test_decomposition_random_polynomials():
    # module-scale version of the exactness check (the acceptance suite
    # runs the full 200-net sweep)
    gen = load_joe_kuo(None, 2, 6)
    rng = substream(37, 0)
    coeffs = np.random.default_rng(7)
    q = enumerate_QN(2, 10).members
    worst = 0.0
    for t in range(30):
        net = randomize(rls(gen) if t % 2 else crd(), 2, 6, 32, rng)
        sel = coeffs.choice(len(q), size=20, replace=False)
        terms = tuple((q[i], float(coeffs.normal())) for i in sel)
        lhs, rhs = decomposition_check(net, WalshPolynomial(2, terms))
        worst = max(worst, abs(lhs - rhs))
    assert worst <= 1e-12
