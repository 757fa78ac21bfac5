"""Base-2 digital nets: construction, randomization, and point generation.

A net of size 2**m in dimension s with precision E bits is described per
coordinate by an E x m binary matrix and an E-bit shift. Point i's
coordinate j is the matrix-vector image of i's index bits, XOR the shift,
read as the binary fraction 0.b1 b2 ... bE.

Randomization schemes:
  * ``shift``: fixed generating matrix, random shift only;
  * ``rls``: left-multiply each generating matrix by a random unit
    lower-triangular matrix, plus a random shift;
  * ``crd``: every matrix entry an independent fair bit, plus a shift.

Internally each coordinate's matrix is stored column-packed into uint64
with fraction bit L at integer bit E - L, which makes point generation a
handful of vectorized XORs.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .f2 import BitMatrix, BitVector, rank_ints

ENV_DIRECTION_FILE = "RQMC_DIRECTION_FILE"
MAX_PRECISION = 64
MAX_M = 32


class IngestionError(ValueError):
    """A direction-number file could not be parsed."""


@dataclass(frozen=True)
class GeneratingMatrices:
    """Fixed per-coordinate m x m generating matrices with provenance."""

    s: int
    m: int
    mats: tuple[BitMatrix, ...]
    provenance: str = "unspecified"

    def __post_init__(self):
        if len(self.mats) != self.s:
            raise ValueError("matrix count != s")
        for mat in self.mats:
            if mat.nrows != self.m or mat.ncols != self.m:
                raise ValueError("generating matrices must be m x m")

    def nonsingular(self) -> bool:
        return all(rank_ints(list(mat.rows)) == self.m for mat in self.mats)

    def rows_array(self, j: int) -> np.ndarray:
        """Component j's matrix as an (m, m) uint8 array."""
        mat = self.mats[j - 1]
        return np.array(mat.to_lists(), dtype=np.uint8)


@dataclass(frozen=True)
class ScrambleScheme:
    kind: str  # "shift" | "rls" | "crd"
    gen: GeneratingMatrices | None = None

    def __post_init__(self):
        if self.kind not in ("shift", "rls", "crd"):
            raise ValueError(f"unknown scheme kind {self.kind!r}")
        if self.kind in ("shift", "rls") and self.gen is None:
            raise ValueError(f"scheme {self.kind!r} needs generating matrices")


def shift_only(gen: GeneratingMatrices) -> ScrambleScheme:
    return ScrambleScheme("shift", gen)


def rls(gen: GeneratingMatrices) -> ScrambleScheme:
    return ScrambleScheme("rls", gen)


def crd() -> ScrambleScheme:
    return ScrambleScheme("crd")


@dataclass(frozen=True)
class FixedPoint:
    """An E-bit binary fraction in [0,1); fraction bit L sits at integer bit E - L."""

    value: int
    precision: int

    def bit(self, level: int) -> int:
        if not 1 <= level <= self.precision:
            raise ValueError(f"bit level {level} out of 1..{self.precision}")
        return (self.value >> (self.precision - level)) & 1


def to_unit_cube(x: FixedPoint) -> float:
    """Truncating conversion to float (rounds toward zero past 53 bits)."""
    if x.precision > 53:
        return float(x.value >> (x.precision - 53)) * 2.0 ** -53
    return float(x.value) * 2.0 ** -x.precision


@dataclass(frozen=True)
class RandomizedNet:
    """A realized randomization: column-packed matrices, shifts, and provenance."""

    s: int
    m: int
    precision: int
    cols: np.ndarray  # (s, m) uint64, fraction-MSB packing
    shifts: np.ndarray  # (s,) uint64
    scheme_kind: str
    seed_record: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return 1 << self.m

    def matrix(self, j: int) -> BitMatrix:
        """Coordinate j's realized E x m matrix (1-based j)."""
        if self.m == 0:
            raise ValueError("m=0 nets have no matrix")
        e = self.precision
        rows = []
        for level in range(1, e + 1):
            r = 0
            for c in range(self.m):
                r |= int((int(self.cols[j - 1, c]) >> (e - level)) & 1) << c
            rows.append(r)
        return BitMatrix(e, self.m, tuple(rows))

    def shift_vector(self, j: int) -> BitVector:
        """Coordinate j's shift as a length-E vector (bit L = fraction bit L)."""
        e = self.precision
        v = int(self.shifts[j - 1])
        acc = 0
        for level in range(1, e + 1):
            acc |= ((v >> (e - level)) & 1) << (level - 1)
        return BitVector(e, acc)

    def bits(self, j: int) -> np.ndarray:
        """Coordinate j's matrix as an (E, m) uint8 array."""
        e = self.precision
        down = (e - 1 - np.arange(e, dtype=np.uint64)).astype(np.uint64)
        return ((self.cols[j - 1][None, :] >> down[:, None]) & np.uint64(1)).astype(np.uint8)

    def row_int(self, j: int, level: int) -> int:
        """Row `level` of coordinate j's matrix packed as an m-bit int."""
        e = self.precision
        if not 1 <= level <= e:
            raise ValueError(f"row {level} out of 1..{e}")
        r = 0
        for c in range(self.m):
            r |= int((int(self.cols[j - 1, c]) >> (e - level)) & 1) << c
        return r


def _pack_columns(bits: np.ndarray, e: int) -> np.ndarray:
    """Pack an (E, m) 0/1 array into m uint64 column words, fraction-MSB."""
    shifts = (e - 1 - np.arange(e, dtype=np.uint64)).astype(np.uint64)
    return (bits.astype(np.uint64).T << shifts).sum(axis=1, dtype=np.uint64)


def _draw_shift(rng, e: int) -> np.uint64:
    bits = rng.integers(0, 2, size=e, dtype=np.uint64)
    shifts = (e - 1 - np.arange(e, dtype=np.uint64)).astype(np.uint64)
    return np.uint64((bits << shifts).sum(dtype=np.uint64))


def randomize(scheme: ScrambleScheme, s: int, m: int, e: int, rng,
              zero_shift: bool = False, seed_record: dict | None = None) -> RandomizedNet:
    """Realize one randomization of the net.

    Draw order is fixed (matrix randomness then shift, coordinate by
    coordinate) so identical generator states reproduce identical nets.
    ``zero_shift`` suppresses the digital shift (debug/diagnostic use).
    """
    if m < 0 or s < 1:
        raise ValueError("need s >= 1 and m >= 0")
    if m > MAX_M:
        raise ValueError(f"m > {MAX_M} unsupported")
    if not m <= e <= MAX_PRECISION:
        raise ValueError(f"need m <= E <= {MAX_PRECISION}, got m={m} E={e}")
    if scheme.gen is not None and m > 0:
        if scheme.gen.s < s or scheme.gen.m != m:
            raise ValueError("generating matrices do not match requested (s, m)")
    cols = np.zeros((s, m), dtype=np.uint64)
    shifts_out = np.zeros(s, dtype=np.uint64)
    for j in range(1, s + 1):
        if m > 0:
            if scheme.kind == "crd":
                bits = rng.integers(0, 2, size=(e, m), dtype=np.uint8)
            elif scheme.kind == "rls":
                lower = rng.integers(0, 2, size=(e, m), dtype=np.uint8)
                rr = np.arange(e)[:, None]
                cc = np.arange(m)[None, :]
                lower = np.where(cc < np.minimum(rr, m), lower, 0).astype(np.uint8)
                np.fill_diagonal(lower[:m, :], 1)
                bits = (lower @ scheme.gen.rows_array(j)) % 2
            else:  # shift-only: generating matrix padded with zero rows
                bits = np.zeros((e, m), dtype=np.uint8)
                bits[:m, :] = scheme.gen.rows_array(j)
            cols[j - 1] = _pack_columns(bits, e)
        if not zero_shift:
            shifts_out[j - 1] = _draw_shift(rng, e)
    return RandomizedNet(s=s, m=m, precision=e, cols=cols, shifts=shifts_out,
                         scheme_kind=scheme.kind, seed_record=seed_record or {})


def point(net: RandomizedNet, i: int) -> list[FixedPoint]:
    """Point number i of the net, one fixed-point value per coordinate."""
    if not 0 <= i < net.n:
        raise ValueError(f"index {i} out of 0..{net.n - 1}")
    out = []
    for j in range(net.s):
        acc = int(net.shifts[j])
        ii = i
        c = 0
        while ii:
            if ii & 1:
                acc ^= int(net.cols[j, c])
            ii >>= 1
            c += 1
        out.append(FixedPoint(acc, net.precision))
    return out


def points_values(net: RandomizedNet) -> np.ndarray:
    """All 2**m points as packed uint64 fraction words, shape (n, s)."""
    n = net.n
    idx = np.arange(n, dtype=np.uint64)
    out = np.empty((n, net.s), dtype=np.uint64)
    for j in range(net.s):
        acc = np.full(n, net.shifts[j], dtype=np.uint64)
        for c in range(net.m):
            mask = (idx >> np.uint64(c)) & np.uint64(1)
            acc ^= np.where(mask == 1, net.cols[j, c], np.uint64(0))
        out[:, j] = acc
    return out


def values_to_unit_cube(values: np.ndarray, e: int) -> np.ndarray:
    """Vectorized truncating conversion of packed fraction words to float64."""
    if e > 53:
        return (values >> np.uint64(e - 53)).astype(np.float64) * 2.0 ** -53
    return values.astype(np.float64) * 2.0 ** -e


def points_real(net: RandomizedNet) -> np.ndarray:
    """All 2**m points as float64 in [0,1)^s, shape (n, s)."""
    return values_to_unit_cube(points_values(net), net.precision)


def points_iter(net: RandomizedNet, gray: bool = False):
    """Yield the points in natural index order, or via the Gray-code walk.

    The Gray path visits indices in a different order; the multiset of
    emitted points is identical.
    """
    if not gray:
        for i in range(net.n):
            yield point(net, i)
        return
    acc = [int(v) for v in net.shifts]
    e = net.precision
    yield [FixedPoint(a, e) for a in acc]
    g_prev = 0
    for i in range(1, net.n):
        g = i ^ (i >> 1)
        changed = (g ^ g_prev).bit_length() - 1
        g_prev = g
        for j in range(net.s):
            acc[j] ^= int(net.cols[j, changed])
        yield [FixedPoint(a, e) for a in acc]


# ---------------------------------------------------------------------------
# Direction-number ingestion.

def default_direction_path() -> str:
    env = os.environ.get(ENV_DIRECTION_FILE)
    if env:
        return env
    return str(resources.files("rqmc").joinpath("data/directions.txt"))


def load_joe_kuo(path: str | None, s: int, m: int) -> GeneratingMatrices:
    """Generating matrices from a direction-number file.

    Expected layout: a header line, then one line per dimension d >= 2 with
    fields ``d s a m_1 ... m_s`` (polynomial degree, coefficient word, and
    initial direction integers). Dimension 1 is the plain radical-inverse
    construction (identity matrix). Column c of dimension j's matrix is the
    c-bit integer v_c, extended past the listed ones by
    ``v_c = a_1 v_{c-1} ^ ... ^ a_{q-1} v_{c-q+1} ^ v_{c-q} ^ (v_{c-q} >> q)``.
    """
    if not 1 <= m <= MAX_M:
        raise IngestionError(f"need 1 <= m <= {MAX_M}, got {m}")
    if s < 1:
        raise IngestionError("need s >= 1")
    if path is None:
        path = default_direction_path()
    rows: list[tuple[int, int, int, list[int]]] = []
    with open(path, "r", encoding="ascii") as fh:
        lines = fh.read().splitlines()
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split()
        try:
            d, deg, a = int(parts[0]), int(parts[1]), int(parts[2])
            m_init = [int(x) for x in parts[3:]]
        except (ValueError, IndexError):
            raise IngestionError(f"{path}:{lineno}: malformed line") from None
        if len(m_init) != deg:
            raise IngestionError(f"{path}:{lineno}: expected {deg} direction integers")
        for c, mc in enumerate(m_init, start=1):
            if mc % 2 == 0 or mc >= (1 << c):
                raise IngestionError(f"{path}:{lineno}: m_{c}={mc} not odd and < 2^{c}")
        rows.append((d, deg, a, m_init))
    if s > len(rows) + 1:
        raise IngestionError(f"file provides {len(rows) + 1} dimensions, requested s={s}")
    mats = [BitMatrix.identity(m)]
    for j in range(2, s + 1):
        _, deg, a, m_init = rows[j - 2]
        mvals = list(m_init)
        for c in range(deg + 1, m + 1):
            acc = mvals[c - deg - 1] ^ (mvals[c - deg - 1] << deg)
            for i in range(1, deg):
                if (a >> (deg - 1 - i)) & 1:
                    acc ^= mvals[c - i - 1] << i
            mvals.append(acc)
        mat_rows = []
        for r in range(1, m + 1):
            rowbits = 0
            for c in range(r, m + 1):
                rowbits |= ((mvals[c - 1] >> (c - r)) & 1) << (c - 1)
            mat_rows.append(rowbits)
        mat = BitMatrix(m, m, tuple(mat_rows))
        if rank_ints(list(mat.rows)) != m:
            raise IngestionError(f"dimension {j}: degenerate generating matrix")
        mats.append(mat)
    return GeneratingMatrices(s=s, m=m, mats=tuple(mats),
                              provenance=os.path.basename(path))


def net_to_json(net: RandomizedNet) -> str:
    """Debug dump: hex-encoded rows of each matrix and shift, plus sizes."""
    payload = {
        "s": net.s,
        "m": net.m,
        "E": net.precision,
        "scheme": net.scheme_kind,
        "C": [[format(net.row_int(j, lv), "x") for lv in range(1, net.precision + 1)]
              for j in range(1, net.s + 1)] if net.m > 0 else [],
        "D": [format(net.shift_vector(j).bits, "x") for j in range(1, net.s + 1)],
        "seed_record": net.seed_record,
    }
    return json.dumps(payload, sort_keys=True)
