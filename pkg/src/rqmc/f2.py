"""Bit-packed linear algebra over GF(2).

Vectors and matrix rows are packed into Python integers, little-endian:
bit position ``j`` (1-based) of a vector lives at integer bit ``j - 1``.
This packing is part of the file-format contract, so round-trips through
hex dumps are bit-exact.
"""

from __future__ import annotations

from dataclasses import dataclass


class DimensionError(ValueError):
    """Operand shapes are incompatible."""


def _popcount(x: int) -> int:
    return bin(x).count("1")


@dataclass(frozen=True)
class BitVector:
    """A length-`n` vector over GF(2), packed into one int (bit j at 1 << (j-1))."""

    n: int
    bits: int

    def __post_init__(self):
        if self.n < 0:
            raise DimensionError("negative length")
        if self.bits >> self.n:
            raise DimensionError("bits set beyond declared length")

    def get(self, j: int) -> int:
        if not 1 <= j <= self.n:
            raise DimensionError(f"index {j} out of 1..{self.n}")
        return (self.bits >> (j - 1)) & 1

    @staticmethod
    def from_bits(values) -> "BitVector":
        acc = 0
        values = list(values)
        for j, v in enumerate(values):
            if v:
                acc |= 1 << j
        return BitVector(len(values), acc)

    def to_list(self) -> list[int]:
        return [(self.bits >> j) & 1 for j in range(self.n)]


@dataclass(frozen=True)
class BitMatrix:
    """An `nrows` x `ncols` matrix over GF(2); each row packed as an int."""

    nrows: int
    ncols: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if self.nrows < 1 or self.ncols < 1:
            raise DimensionError("matrix dimensions must be positive")
        if len(self.rows) != self.nrows:
            raise DimensionError("row count mismatch")
        for r in self.rows:
            if r >> self.ncols:
                raise DimensionError("row has bits beyond ncols")

    def row(self, i: int) -> BitVector:
        if not 1 <= i <= self.nrows:
            raise DimensionError(f"row {i} out of 1..{self.nrows}")
        return BitVector(self.ncols, self.rows[i - 1])

    def col(self, j: int) -> BitVector:
        if not 1 <= j <= self.ncols:
            raise DimensionError(f"col {j} out of 1..{self.ncols}")
        acc = 0
        for i, r in enumerate(self.rows):
            acc |= ((r >> (j - 1)) & 1) << i
        return BitVector(self.nrows, acc)

    @staticmethod
    def identity(n: int) -> "BitMatrix":
        return BitMatrix(n, n, tuple(1 << i for i in range(n)))

    @staticmethod
    def from_rows(rows: list[list[int]]) -> "BitMatrix":
        ncols = len(rows[0])
        return BitMatrix(len(rows), ncols, tuple(BitVector.from_bits(r).bits for r in rows))

    def to_lists(self) -> list[list[int]]:
        return [[(r >> j) & 1 for j in range(self.ncols)] for r in self.rows]


def mat_vec_mul(mat: BitMatrix, vec: BitVector) -> BitVector:
    """Matrix-vector product over GF(2): entry i is <row i, vec> mod 2."""
    if vec.n != mat.ncols:
        raise DimensionError(f"vector length {vec.n} != ncols {mat.ncols}")
    acc = 0
    for i, r in enumerate(mat.rows):
        acc |= (_popcount(r & vec.bits) & 1) << i
    return BitVector(mat.nrows, acc)


def mat_mul(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    """Matrix product over GF(2).

    Row i of the product is the XOR of the rows of `b` selected by the set
    bits of row i of `a`.
    """
    if a.ncols != b.nrows:
        raise DimensionError(f"inner dimensions {a.ncols} != {b.nrows}")
    out = []
    for r in a.rows:
        acc = 0
        rr = r
        while rr:
            low = rr & -rr
            acc ^= b.rows[low.bit_length() - 1]
            rr ^= low
        out.append(acc)
    return BitMatrix(a.nrows, b.ncols, tuple(out))


def rank(rows: list[BitVector]) -> int:
    """GF(2) rank of a list of equal-length vectors (0 for the empty list)."""
    if not rows:
        return 0
    n = rows[0].n
    for v in rows:
        if v.n != n:
            raise DimensionError("vectors differ in length")
    return rank_ints([v.bits for v in rows])


def rank_ints(rows: list[int]) -> int:
    """Rank of int-packed rows via elimination on a pivot table."""
    pivots: dict[int, int] = {}
    rk = 0
    for r in rows:
        while r:
            top = r.bit_length() - 1
            if top in pivots:
                r ^= pivots[top]
            else:
                pivots[top] = r
                rk += 1
                break
    return rk


def solve_space(a: BitMatrix, b: BitVector) -> tuple[bool, int, int]:
    """Solve A x = b over GF(2).

    Returns (consistent, rank_of_A, n_unknowns). The solution count is
    2**(n_unknowns - rank) when consistent, else 0.
    """
    if b.n != a.nrows:
        raise DimensionError(f"rhs length {b.n} != nrows {a.nrows}")
    # Augment below the unknowns: bit 0 carries the rhs so pivoting on the
    # top bit only ever selects unknown columns.
    aug = [(a.rows[i] << 1) | ((b.bits >> i) & 1) for i in range(a.nrows)]
    pivots: dict[int, int] = {}
    rk = 0
    consistent = True
    for r in aug:
        while r:
            top = r.bit_length() - 1
            if top == 0:
                consistent = False  # reduced to 0 = 1
                break
            if top in pivots:
                r ^= pivots[top]
            else:
                pivots[top] = r
                rk += 1
                break
        if not consistent:
            break
    return consistent, rk, a.ncols


def count_solutions(a: BitMatrix, b: BitVector) -> int:
    """Number of x with A x = b over GF(2): 0 if inconsistent, else 2**(ncols - rank)."""
    consistent, rk, ncols = solve_space(a, b)
    return (1 << (ncols - rk)) if consistent else 0


def sample_lower_triangular(e: int, m: int, rng) -> BitMatrix:
    """Random E x m lower-triangular matrix with unit diagonal.

    Row i (1-based): entries left of the diagonal are fair bits, the
    diagonal entry is 1 (for i <= m), entries right of it are 0. Rows
    below the square part (i > m) are fully random m-bit rows.
    """
    if not 1 <= m <= e:
        raise DimensionError(f"need E >= m >= 1, got E={e} m={m}")
    rows = []
    for i in range(1, e + 1):
        if i <= m:
            free = i - 1
            r = int(rng.integers(0, 1 << free)) if free else 0
            r |= 1 << (i - 1)
        else:
            r = int(rng.integers(0, 1 << m))
        rows.append(r)
    return BitMatrix(e, m, tuple(rows))


def sample_nonsingular(m: int, rng) -> BitMatrix:
    """Uniform draw from the invertible m x m matrices over GF(2).

    Row-wise construction: row i is drawn uniformly from the complement of
    the span of rows 1..i-1. Every invertible matrix arises from exactly
    one draw sequence with equal probability, so the output is exactly
    uniform, and the number of RNG draws per matrix is fixed.
    """
    if m < 1:
        raise DimensionError("m must be >= 1")
    rows: list[int] = []
    basis: list[int] = []  # copies with distinct top bits, for span indexing
    for _ in range(m):
        size_span = 1 << len(basis)
        k = int(rng.integers(0, (1 << m) - size_span))
        v = _kth_vector_outside_span(k, basis, m)
        rows.append(v)
        _insert_echelon(basis, v)
    return BitMatrix(m, m, tuple(rows))


def _insert_echelon(basis: list[int], v: int) -> None:
    for b in basis:
        v = min(v, v ^ b)
    basis.append(v)
    basis.sort(reverse=True)


def _kth_vector_outside_span(k: int, basis: list[int], m: int) -> int:
    """The k-th vector (in an arbitrary fixed order) of F_2^m minus span(basis).

    Vectors are indexed by their coordinates in the complement of the span's
    pivot positions: enumerate x in [0, 2^m), skipping those in the span,
    implicitly: write the span's pivot set P (|P| = r). A vector is in the
    span iff its non-pivot bits are all zero after reduction; equivalently
    each choice of non-pivot bits != 0 plus arbitrary pivot bits gives
    2^r vectors per nonzero non-pivot pattern. Index k in
    [0, 2^m - 2^r) maps to (nonzero non-pivot pattern, pivot pattern).
    """
    pivot_pos = sorted((b.bit_length() - 1) for b in basis if b)
    r = len(pivot_pos)
    free_pos = [i for i in range(m) if i not in pivot_pos]
    # k = (q - 1) * 2^r + p with q in [1, 2^(m-r)), p in [0, 2^r)
    q, p = divmod(k, 1 << r)
    q += 1  # nonzero pattern on the free positions
    v = 0
    for idx, pos in enumerate(free_pos):
        if (q >> idx) & 1:
            v |= 1 << pos
    # reduce nothing: add span element indexed by p
    span_elt = 0
    for idx, b in enumerate(sorted((b for b in basis if b), reverse=True)):
        if (p >> idx) & 1:
            span_elt ^= b
    return v ^ span_elt
