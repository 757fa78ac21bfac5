import json

import numpy as np
import pytest

from rqmc import f2, nets
from rqmc.nets import (FixedPoint, IngestionError, crd, load_joe_kuo, point,
                       points_iter, points_real, randomize, rls, shift_only,
                       to_unit_cube)
from rqmc.streams import substream


def test_dimension_one_is_identity():
    gen = load_joe_kuo(None, 1, 6)
    assert gen.mats[0].rows == f2.BitMatrix.identity(6).rows


def test_loaded_matrices_upper_triangular_unit_diagonal():
    gen = load_joe_kuo(None, 10, 12)
    for mat in gen.mats:
        for i in range(1, 13):
            assert mat.row(i).get(i) == 1
            for c in range(1, i):
                assert mat.row(i).get(c) == 0
    assert gen.nonsingular()


def test_first_two_dimensions_form_a_net():
    # one point in each dyadic 4x4 sub-square of the unit square
    gen = load_joe_kuo(None, 2, 4)
    net = randomize(shift_only(gen), 2, 4, 16, substream(0, 0), zero_shift=True)
    pts = points_real(net)
    boxes = {(int(x * 4), int(y * 4)) for x, y in pts}
    assert len(boxes) == 16
    # and in each 2x8 / 8x2 rectangle too (all shapes with 4 index bits)
    boxes = {(int(x * 2), int(y * 8)) for x, y in pts}
    assert len(boxes) == 16
    boxes = {(int(x * 8), int(y * 2)) for x, y in pts}
    assert len(boxes) == 16


def test_malformed_direction_file(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("d s a m_i\n2 1 0 nope\n")
    with pytest.raises(IngestionError) as err:
        load_joe_kuo(str(p), 2, 4)
    assert ":2" in str(err.value)


def test_even_direction_integer_rejected(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("d s a m_i\n2 1 0 2\n")
    with pytest.raises(IngestionError):
        load_joe_kuo(str(p), 2, 4)


def test_s_too_large_rejected():
    with pytest.raises(IngestionError):
        load_joe_kuo(None, 200, 4)


def test_rls_top_block_nonsingular_every_draw():
    gen = load_joe_kuo(None, 2, 6)
    rng = substream(1, 0)
    for _ in range(40):
        net = randomize(rls(gen), 2, 6, 12, rng)
        for j in (1, 2):
            top = [net.row_int(j, level) for level in range(1, 7)]
            assert f2.rank_ints(top) == 6


def test_crd_row_pattern_frequency():
    # a fixed row equals a fixed pattern with chance 2^-8
    rng = substream(2, 0)
    m, e, n = 8, 8, 100_000
    pattern = 0b10110100
    hits = 0
    for _ in range(n):
        net = randomize(crd(), 1, m, e, rng, zero_shift=True)
        if net.row_int(1, 3) == pattern:
            hits += 1
    p = hits / n
    se = np.sqrt(2 ** -8 * (1 - 2 ** -8) / n)
    assert abs(p - 2 ** -8) <= 4 * se


def test_shift_only_zero_shift_reproduces_plain_net():
    gen = load_joe_kuo(None, 2, 5)
    net = randomize(shift_only(gen), 2, 5, 10, substream(3, 0), zero_shift=True)
    for i in (0, 1, 7, 19, 31):
        xs = point(net, i)
        for j in (1, 2):
            ivec = f2.BitVector(5, i)
            padded_rows = list(gen.mats[j - 1].rows) + [0] * 5
            mat = f2.BitMatrix(10, 5, tuple(padded_rows))
            w = f2.mat_vec_mul(mat, ivec)
            expect = 0
            for level in range(1, 11):
                expect |= w.get(level) << (10 - level)
            assert xs[j - 1].value == expect


def test_point_examples():
    gen = load_joe_kuo(None, 1, 2)
    net = randomize(shift_only(gen), 1, 2, 8, substream(4, 0), zero_shift=True)
    vals = [to_unit_cube(point(net, i)[0]) for i in range(4)]
    assert vals == [0.0, 0.5, 0.25, 0.75]


def test_point_zero_index_is_shift():
    gen = load_joe_kuo(None, 2, 4)
    rng = substream(5, 0)
    net = randomize(rls(gen), 2, 4, 12, rng)
    xs = point(net, 0)
    assert [x.value for x in xs] == [int(v) for v in net.shifts]


def test_point_index_out_of_range():
    gen = load_joe_kuo(None, 1, 3)
    net = randomize(shift_only(gen), 1, 3, 8, substream(6, 0))
    with pytest.raises(ValueError):
        point(net, 8)


def test_top_bits_form_permutation():
    # invertible top block => first-m-bits hit every pattern exactly once
    gen = load_joe_kuo(None, 2, 8)
    rng = substream(7, 0)
    for scheme in (rls(gen), crd()):
        for _ in range(5):
            net = randomize(scheme, 2, 8, 16, rng)
            vals = nets.points_values(net)
            for j in range(2):
                top = (vals[:, j] >> np.uint64(16 - 8)).astype(np.int64)
                top_rank = f2.rank_ints([net.row_int(j + 1, lv) for lv in range(1, 9)])
                if top_rank == 8:
                    assert len(set(top.tolist())) == 256


def test_points_iter_matches_indexing_and_gray():
    gen = load_joe_kuo(None, 2, 8)
    net = randomize(rls(gen), 2, 8, 16, substream(8, 0))
    natural = [tuple(x.value for x in xs) for xs in points_iter(net)]
    assert len(natural) == 256
    gray = [tuple(x.value for x in xs) for xs in points_iter(net, gray=True)]
    assert sorted(natural) == sorted(gray)
    assert natural[3] == tuple(x.value for x in point(net, 3))


def test_shift_only_distinct_in_first_coordinate():
    gen = load_joe_kuo(None, 1, 4)
    net = randomize(shift_only(gen), 1, 4, 8, substream(9, 0))
    vals = [xs[0].value for xs in points_iter(net)]
    assert len(set(vals)) == 16


def test_to_unit_cube_examples():
    assert to_unit_cube(FixedPoint(0, 8)) == 0.0
    assert to_unit_cube(FixedPoint(1 << 7, 8)) == 0.5
    assert to_unit_cube(FixedPoint(0b0110 << 4, 8)) == 0.375
    # truncation toward zero past 53 bits
    v = (1 << 63) | 1
    assert to_unit_cube(FixedPoint(v, 64)) == 0.5


def test_vectorized_matches_scalar():
    gen = load_joe_kuo(None, 2, 6)
    rng = substream(10, 0)
    for scheme in (rls(gen), crd(), shift_only(gen)):
        net = randomize(scheme, 2, 6, 64, rng)
        pts = points_real(net)
        for i in (0, 1, 17, 63):
            xs = point(net, i)
            for j in range(2):
                assert pts[i, j] == to_unit_cube(xs[j])


def test_per_bit_marginal_uniformity():
    gen = load_joe_kuo(None, 1, 4)
    rng = substream(11, 0)
    n = 4000
    e = 8
    ones = np.zeros(e)
    for _ in range(n):
        net = randomize(rls(gen), 1, 4, e, rng)
        x = point(net, 5)[0]
        for level in range(1, e + 1):
            ones[level - 1] += x.bit(level)
    z = (ones - n / 2) / np.sqrt(n / 4)
    assert np.abs(z).max() <= 4.5


def test_determinism_same_seed():
    gen = load_joe_kuo(None, 2, 6)
    a = randomize(rls(gen), 2, 6, 32, substream(12, 3))
    b = randomize(rls(gen), 2, 6, 32, substream(12, 3))
    assert np.array_equal(a.cols, b.cols) and np.array_equal(a.shifts, b.shifts)
    assert np.array_equal(points_real(a), points_real(b))


def test_e_below_m_rejected():
    gen = load_joe_kuo(None, 1, 4)
    with pytest.raises(ValueError):
        randomize(rls(gen), 1, 4, 3, substream(13, 0))


def test_mismatched_generator_shape_rejected():
    gen = load_joe_kuo(None, 1, 4)
    with pytest.raises(ValueError):
        randomize(rls(gen), 1, 5, 10, substream(14, 0))


def test_m_zero_net_is_pure_shift():
    net = randomize(crd(), 2, 0, 16, substream(15, 0))
    assert net.n == 1
    xs = point(net, 0)
    assert [x.value for x in xs] == [int(v) for v in net.shifts]
    assert points_real(net).shape == (1, 2)


def test_net_json_roundtrip_fields():
    gen = load_joe_kuo(None, 1, 3)
    net = randomize(rls(gen), 1, 3, 8, substream(16, 0),
                    seed_record={"master_seed": 16, "stream": 0})
    payload = json.loads(nets.net_to_json(net))
    assert payload["s"] == 1 and payload["m"] == 3 and payload["E"] == 8
    assert len(payload["C"][0]) == 8
    assert payload["seed_record"]["master_seed"] == 16
    rows = [int(h, 16) for h in payload["C"][0]]
    assert rows == [net.row_int(1, lv) for lv in range(1, 9)]


def test_env_var_overrides_direction_path(tmp_path, monkeypatch):
    p = tmp_path / "dirs.txt"
    p.write_text("d s a m_i\n2 1 0 1\n")
    monkeypatch.setenv(nets.ENV_DIRECTION_FILE, str(p))
    assert nets.default_direction_path() == str(p)
    gen = load_joe_kuo(None, 2, 3)
    assert gen.provenance == "dirs.txt"
