# -----------------------------------------------------------------------
#
# sparsegen - sparse generator matrix codes from polar kernels
# Copyright (C) 2020 Lars Gustäbel <lars@gustaebel.de>
#
# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this program.  If not, see <https://www.gnu.org/licenses/>.
#
# -----------------------------------------------------------------------

import math
import fractions

import numpy as np
import scipy.sparse as sp

from . import MAX_N
from .convert import read_fields
from .exceptions import UsageError, DimensionError, CapabilityError, InvariantError


class SparseColumn:
    """A binary column of the given length stored as its sorted support.
    """

    __slots__ = ("length", "support")

    def __init__(self, length, support):
        support = tuple(int(r) for r in support)
        if any(b <= a for a, b in zip(support, support[1:])):
            raise UsageError(f"column support must be strictly increasing: {support}")
        if support and (support[0] < 0 or support[-1] >= length):
            raise DimensionError(f"column support {support} out of range for length {length}")
        self.length = length
        self.support = support

    @classmethod
    def from_bits(cls, bits):
        bits = np.asarray(bits)
        return cls(len(bits), np.nonzero(bits)[0])

    @property
    def weight(self):
        return len(self.support)

    def to_bits(self):
        bits = np.zeros(self.length, dtype=np.uint8)
        bits[list(self.support)] = 1
        return bits

    def __eq__(self, other):
        return isinstance(other, SparseColumn) and self.length == other.length and \
                self.support == other.support

    def __hash__(self):
        return hash((self.length, self.support))

    def __repr__(self):
        return f"SparseColumn({self.length}, {list(self.support)})"


class SparseGenerator:
    """A column-sparse generator matrix. provenance[i] is the index of the column of the unsplit
       matrix that column i was split from.
    """

    def __init__(self, n_rows, columns, provenance=None):
        self.n_rows = n_rows
        self.columns = list(columns)
        if provenance is None:
            provenance = list(range(len(self.columns)))
        self.provenance = list(provenance)

    @property
    def n_cols(self):
        return len(self.columns)

    @property
    def max_weight(self):
        return max((column.weight for column in self.columns), default=0)

    def to_dense(self):
        matrix = np.zeros((self.n_rows, self.n_cols), dtype=np.uint8)
        for index, column in enumerate(self.columns):
            matrix[list(column.support), index] = 1
        return matrix

    def to_sparse(self):
        """The matrix in CSC form, one stored entry per support index.
        """
        rows = np.fromiter((row for column in self.columns for row in column.support),
                dtype=np.int64)
        indptr = np.zeros(self.n_cols + 1, dtype=np.int64)
        indptr[1:] = np.cumsum([column.weight for column in self.columns], dtype=np.int64)
        return sp.csc_matrix((np.ones(len(rows), dtype=np.int64), rows, indptr),
                shape=(self.n_rows, self.n_cols))

    def check_reconstruction(self, originals, w_ub):
        """Raise InvariantError unless the pieces of every original column have disjoint supports
           that add up to it and no piece is heavier than w_ub.
        """
        pieces = {}
        for column, origin in zip(self.columns, self.provenance):
            if column.weight > w_ub:
                raise InvariantError(f"piece of column {origin} has weight {column.weight} > "
                        f"{w_ub}")
            pieces.setdefault(origin, []).append(column)

        for index, original in enumerate(originals):
            counts = np.zeros(original.length, dtype=np.int64)
            for piece in pieces.get(index, ()):
                counts[list(piece.support)] += 1
            if not np.array_equal(counts, original.to_bits()):
                raise InvariantError(f"pieces of column {index} do not reconstruct it")


def read_generator(path):
    """Read a sparse generator file: a header "n_rows n_cols", then for every column its weight
       followed by its row indices.
    """
    lines = read_fields(path, comments=False)
    try:
        n_rows, n_cols = int(lines[0][0]), int(lines[0][1])
        columns = []
        for line in lines[1:]:
            weight, rows = int(line[0]), [int(r) for r in line[1:]]
            if weight != len(rows):
                raise ValueError(f"weight {weight} does not match {len(rows)} row indices")
            columns.append(SparseColumn(n_rows, rows))
    except (IndexError, ValueError) as exc:
        raise UsageError(f"{path}: invalid generator file: {exc}") from exc
    if len(columns) != n_cols:
        raise DimensionError(f"{path}: header announces {n_cols} columns, found {len(columns)}")
    return SparseGenerator(n_rows, columns)


def write_generator(generator, path):
    """Write a SparseGenerator in the format read_generator() understands.
    """
    with open(path, "w", encoding="utf-8") as fobj:
        print(generator.n_rows, generator.n_cols, file=fobj)
        for column in generator.columns:
            print(column.weight, *column.support, file=fobj)


def polar_column(n, index):
    """Column `index` of G2^(x)n: rows r with r AND index == index, ascending.
    """
    support = np.array([index], dtype=np.int64)
    for bit in range(n):
        if not index >> bit & 1:
            support = np.concatenate([support, support | (1 << bit)])
    return SparseColumn(1 << n, support)


def polar_columns(n):
    _check_n(n)
    return [polar_column(n, index) for index in range(1 << n)]


def _check_n(n):
    if n < 0:
        raise UsageError(f"n must be >= 0, got {n}")
    if n > MAX_N:
        raise CapabilityError(f"n={n} would materialize 2^{n} columns, the limit is n={MAX_N}")


def _check_w_ub(w_ub):
    if w_ub < 1:
        raise UsageError(f"w_ub must be >= 1, got {w_ub}")


def n_lub_of(w_ub):
    """floor(log2 w_ub).
    """
    _check_w_ub(w_ub)
    return int(w_ub).bit_length() - 1


def is_power_of_two(value):
    return value >= 1 and value & (value - 1) == 0


#
# Naive split.
#

def simple_split_column(column, w_ub):
    """Split a column into consecutive runs of w_ub support indices (the last run holds the
       rest). Columns of weight <= w_ub, including the zero column, are returned unchanged.
    """
    _check_w_ub(w_ub)
    if column.weight <= w_ub:
        return [column]
    support = column.support
    return [SparseColumn(column.length, support[start:start + w_ub])
            for start in range(0, len(support), w_ub)]


def simple_split_matrix(n, w_ub):
    """Apply the naive split to every column of G2^(x)n.
    """
    columns = []
    provenance = []
    for index, column in enumerate(polar_columns(n)):
        for piece in simple_split_column(column, w_ub):
            columns.append(piece)
            provenance.append(index)
    return SparseGenerator(1 << n, columns, provenance)


class RateLossLedger:
    """Exact rate-loss accounting of a split of G2^(x)n. band_counts lists (k, count) for the
       columns whose weight lies in (k*w_ub, (k+1)*w_ub], each of which costs k extra columns.
    """

    def __init__(self, n, w_ub, gamma, band_counts, a_terms):
        self.n = n
        self.w_ub = w_ub
        self.n_lub = n_lub_of(w_ub)
        self.gamma = gamma
        self.band_counts = band_counts
        self.a_terms = a_terms
        self.k_max = (1 << n) // w_ub

    @property
    def extra_columns(self):
        return sum(k * count for k, count in self.band_counts)

    @property
    def a_sum(self):
        return sum(self.a_terms, fractions.Fraction(0))

    def __repr__(self):
        return f"<RateLossLedger n={self.n} w_ub={self.w_ub} gamma={self.gamma}>"


def simple_split_gamma_census(n, w_ub):
    """Rate loss of the naive split from the binomial weight census of G2^(x)n.
    """
    _check_w_ub(w_ub)
    bands = {}
    for j in range(n + 1):
        k = -(-(1 << j) // w_ub) - 1
        if k > 0:
            bands[k] = bands.get(k, 0) + math.comb(n, j)
    band_counts = sorted(bands.items())
    gamma = fractions.Fraction(sum(k * count for k, count in band_counts), 1 << n)
    return RateLossLedger(n, w_ub, gamma, band_counts, a_term_decomposition(n, n_lub_of(w_ub)))


def binomial_tail(n, threshold):
    """Pr(X >= threshold) for X ~ Binomial(n, 1/2), exact.
    """
    threshold = max(threshold, 0)
    return fractions.Fraction(sum(math.comb(n, j) for j in range(threshold, n + 1)), 1 << n)


def simple_split_gamma_tail(n, w_ub):
    """Rate loss of the naive split as sum_{k=1}^{k_max} Pr(2^X > k*w_ub), X ~ Binomial(n, 1/2).

       Pr(2^X > k*w_ub) = Pr(X >= t) with t = floor(log2(k*w_ub)) + 1, which is constant on the
       runs 2^(t-1) <= k*w_ub < 2^t, so the sum is taken run by run.
    """
    _check_w_ub(w_ub)
    k_max = (1 << n) // w_ub
    gamma = fractions.Fraction(0)
    for t in range(1, n + 2):
        first = max(1, -(-(1 << (t - 1)) // w_ub))
        last = min(k_max, -(-(1 << t) // w_ub) - 1)
        if last >= first:
            gamma += (last - first + 1) * binomial_tail(n, t)
    return gamma


def a_term_decomposition(n, n_lub):
    """a_i = 2^i * Pr(X >= 1 + i + n_lub) for i = 0..n-n_lub-1. For w_ub = 2^n_lub the terms add
       up to the naive-split rate loss.
    """
    if n_lub < 0:
        raise UsageError(f"n_lub must be >= 0, got {n_lub}")
    return [(1 << i) * binomial_tail(n, 1 + i + n_lub) for i in range(n - n_lub)]


#
# Decoder-respecting split.
#

def _drs_pieces(support, offset, length, w_ub):
    if len(support) > w_ub:
        half = length // 2
        head = [r for r in support if r < offset + half]
        tail = support[len(head):]
        pieces = []
        if head:
            pieces.extend(_drs_pieces(head, offset, half, w_ub))
        if tail:
            pieces.extend(_drs_pieces(tail, offset + half, half, w_ub))
        return pieces
    elif not support:
        return []
    else:
        return [support]


def drs_split(column, w_ub):
    """Split a column by recursive halving: while a part is heavier than w_ub it is cut into its
       upper and lower half, all-zero halves are dropped. The pieces are zero-padded to the full
       length and emitted head first.
    """
    _check_w_ub(w_ub)
    if not is_power_of_two(column.length):
        raise UsageError(f"column length must be a power of two, got {column.length}")
    return [SparseColumn(column.length, piece)
            for piece in _drs_pieces(list(column.support), 0, column.length, w_ub)]


def drs_matrix(n, w_ub, logger=None):
    """Apply drs_split() to every column of G2^(x)n, keeping the pieces of a column together.
    """
    _check_w_ub(w_ub)
    if not is_power_of_two(w_ub) and logger is not None:
        logger.warning(f"w_ub={w_ub} is not a power of two, the closed-form rate loss does not "
                "apply", tag="w_ub-power")
    columns = []
    provenance = []
    for index, column in enumerate(polar_columns(n)):
        for piece in drs_split(column, w_ub):
            columns.append(piece)
            provenance.append(index)
    return SparseGenerator(1 << n, columns, provenance)


def signs_of(index, n):
    """The sign sequence s_1..s_n of an index, most significant bit first: "-" for 0, "+" for 1.
    """
    return "".join("+" if index >> (n - 1 - j) & 1 else "-" for j in range(n))


def drs_piece_count(n_minus, n_plus, n_lub):
    """Number of pieces drs_split() cuts a column of G2^(x)n into, given how many of its Kronecker
       factors are [1,1] (n_minus) and [0,1] (n_plus), with w_ub = 2^n_lub.
    """
    if min(n_minus, n_plus, n_lub) < 0:
        raise UsageError("counts must be >= 0")
    return 1 << max(0, n_minus - n_lub)


def drs_piece_count_from_signs(signs, w_ub):
    """Replay drs_split() on the sign sequence of a column without building it. A "-" factor
       halves into two equally heavy parts, a "+" factor leaves only the lower half.
    """
    _check_w_ub(w_ub)
    count = 1
    weight = 1 << signs.count("-")
    for sign in signs:
        if weight <= w_ub:
            break
        if sign == "-":
            weight >>= 1
            count *= 2
    return count


def drs_gamma_closed(n, n_lub):
    """Exact DRS rate loss for w_ub = 2^n_lub: sum_{i>n_lub} C(n,i) (2^(i-n_lub) - 1) / 2^n.
    """
    if not 0 <= n_lub:
        raise UsageError(f"n_lub must be >= 0, got {n_lub}")
    extra = sum(math.comb(n, i) * ((1 << (i - n_lub)) - 1) for i in range(n_lub + 1, n + 1))
    return fractions.Fraction(extra, 1 << n)


class SplitMarkerSet:
    """The XOR gates that DRS splits. Gate (s, j) at recursion level j (level 1 is next to the
       channel) is split iff s_j = "-" and more than n_lub of s_j..s_n are "-".
    """

    def __init__(self, n, n_lub):
        if n < 0 or n_lub < 0:
            raise UsageError("n and n_lub must be >= 0")
        self.n = n
        self.n_lub = n_lub

    def is_marked(self, signs, level):
        if signs[level - 1] != "-":
            return False
        return signs[level - 1:].count("-") > self.n_lub

    def is_marked_position(self, m, position):
        """Whether position `position` of the upper half of a block with 2^m inputs is a split
           gate. Only the m-1 low bits of the position (the suffix s_(j+1)..s_n) matter.
        """
        return 1 + (m - 1 - bin(position).count("1")) > self.n_lub

    def count_at_level(self, level):
        """Number of split gates at a level, counted over all 2^(level-1) prefixes.
        """
        rest = self.n - level
        suffixes = sum(math.comb(rest, t) for t in range(self.n_lub, rest + 1))
        return (1 << (level - 1)) * suffixes

    def count(self):
        return sum(self.count_at_level(level) for level in range(1, self.n + 1))

    def markers(self):
        """Iterate over all split gates as (index of the head operand, level), level ascending.
        """
        for level in range(1, self.n + 1):
            for index in range(1 << self.n):
                signs = signs_of(index, self.n)
                if self.is_marked(signs, level):
                    yield index, level

    def __repr__(self):
        return f"<SplitMarkerSet n={self.n} n_lub={self.n_lub}>"


def split_markers(n, n_lub):
    return SplitMarkerSet(n, n_lub)


def adrs_extra_uses(n, n_lub):
    """Extra channel uses of the augmented scheme: every split gate at level j costs 2^j.
    """
    markers = SplitMarkerSet(n, n_lub)
    return sum((1 << level) * markers.count_at_level(level) for level in range(1, n + 1))


def adrs_gamma(n, n_lub):
    return fractions.Fraction(adrs_extra_uses(n, n_lub), 1 << n)


def adrs_rate_bound(n, n_lub):
    """Upper bound n * 2^(n (1 - lambda log2 3)) on the augmented rate loss, lambda = n_lub/n.
    """
    if n == 0:
        return 0.0
    return n * 2.0 ** (n - n_lub * math.log2(3))


def lambda_to_n_lub(n, lam):
    """n_lub = ceil(n * lambda), robust against floating point noise in n * lambda.
    """
    return max(0, math.ceil(n * lam - 1e-9))
