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
import collections

import numpy as np

from . import MAX_KERNEL_SIZE
from .convert import read_fields
from .exceptions import UsageError, DimensionError, CapabilityError

# Number of set bits for every byte value.
POPCOUNT_TABLE = np.array([bin(i).count("1") for i in range(256)], dtype=np.uint8)


def popcount(values):
    """Count the set bits of every element of an unsigned integer array.
    """
    values = np.asarray(values, dtype=np.uint64)
    count = np.zeros(values.shape, dtype=np.uint32)
    for shift in range(0, 64, 8):
        count += POPCOUNT_TABLE[(values >> np.uint64(shift)) & np.uint64(0xff)]
    return count


def as_binary_matrix(rows):
    """Convert a nested list or array of 0/1 values into a 2-d uint8 array.
    """
    try:
        matrix = np.array(rows, dtype=np.int64)
    except ValueError as exc:
        raise DimensionError(f"ragged matrix: {exc}") from exc
    if matrix.ndim != 2 or 0 in matrix.shape:
        raise DimensionError(f"expected a non-empty 2-d matrix, got shape {matrix.shape}")
    if np.any((matrix != 0) & (matrix != 1)):
        raise UsageError("matrix entries must be 0 or 1")
    return matrix.astype(np.uint8)


def _check_square(matrix):
    if matrix.shape[0] != matrix.shape[1]:
        raise DimensionError(f"kernel must be square, got {matrix.shape[0]}x{matrix.shape[1]}")


def gf2_rank(matrix):
    """Rank of a binary matrix over GF(2) by Gaussian elimination.
    """
    work = np.array(matrix, dtype=np.uint8) & 1
    rows, cols = work.shape
    rank = 0
    for col in range(cols):
        pivots = np.nonzero(work[rank:, col])[0]
        if len(pivots) == 0:
            continue
        pivot = rank + pivots[0]
        if pivot != rank:
            work[[rank, pivot]] = work[[pivot, rank]]
        others = np.nonzero(work[:, col])[0]
        others = others[others != rank]
        work[others] ^= work[rank]
        rank += 1
        if rank == rows:
            break
    return rank


def is_polarizing(matrix):
    """A square binary matrix is a polarization kernel iff it is invertible over GF(2) and not
       upper triangular.
    """
    matrix = as_binary_matrix(matrix)
    _check_square(matrix)
    size = matrix.shape[0]
    if gf2_rank(matrix) != size:
        return False
    return bool(np.any(np.tril(matrix, -1)))


def _row_values(matrix):
    """Pack every row into an integer, column 0 being the most significant bit.
    """
    size = matrix.shape[1]
    weights = np.array([1 << (size - 1 - c) for c in range(size)], dtype=np.uint64)
    return (matrix.astype(np.uint64) * weights).sum(axis=1).astype(np.uint64)


def partial_distances(matrix, samples=None, seed=None):
    """Return the partial distances D_1..D_l: D_i is the Hamming distance of row i to the span of
       rows i+1..l.

       The span is enumerated exhaustively, which is exact but limited to l <= 24. For larger
       kernels pass samples=<count> to estimate each D_i from that many random span elements;
       the result is then an upper bound.
    """
    matrix = as_binary_matrix(matrix)
    _check_square(matrix)
    size = matrix.shape[0]
    rows = _row_values(matrix)

    if samples is not None:
        if size > 64:
            raise CapabilityError(f"sampled partial distances support l <= 64, got l={size}")
        return _sampled_partial_distances(rows, samples, seed)

    if size > MAX_KERNEL_SIZE:
        raise CapabilityError(f"exhaustive partial distances need 2^(l-1) span elements, "
                f"l={size} exceeds {MAX_KERNEL_SIZE}; use sampling mode instead")

    distances = [0] * size
    span = np.zeros(1, dtype=np.uint64)
    for index in range(size - 1, -1, -1):
        distances[index] = int(popcount(span ^ rows[index]).min())
        span = np.concatenate([span, span ^ rows[index]])
    return tuple(distances)


def _sampled_partial_distances(rows, samples, seed):
    rng = np.random.default_rng(seed)
    size = len(rows)
    distances = [0] * size
    for index in range(size):
        lower = rows[index + 1:]
        best = int(popcount(rows[index:index + 1])[0])
        if len(lower):
            choice = rng.integers(0, 2, size=(samples, len(lower)), dtype=np.uint8).astype(bool)
            # XOR-reduce the chosen lower rows for every sample.
            combos = np.bitwise_xor.reduce(np.where(choice, lower, np.uint64(0)), axis=1)
            best = min(best, int(popcount(combos ^ rows[index]).min()))
        distances[index] = best
    return tuple(distances)


class Kernel:
    """A binary polarization kernel together with its partial distances and rate of
       polarization.
    """

    def __init__(self, matrix, name=None, distances=None):
        self.matrix = as_binary_matrix(matrix)
        _check_square(self.matrix)
        if not is_polarizing(self.matrix):
            raise UsageError("matrix is not a polarization kernel: it must be invertible over "
                    "GF(2) and not upper triangular")
        self.name = name
        if distances is None:
            distances = partial_distances(self.matrix)
        elif len(distances) != self.size:
            raise DimensionError(f"expected {self.size} partial distances, got {len(distances)}")
        self.partial_distances = tuple(int(d) for d in distances)
        self.rate_of_polarization = rate_of_polarization(self)

    @property
    def size(self):
        return self.matrix.shape[0]

    @property
    def column_weights(self):
        return tuple(int(w) for w in self.matrix.sum(axis=0))

    def __repr__(self):
        return f"<Kernel {self.name or ''} l={self.size} D={self.partial_distances}>"


def rate_of_polarization(kernel):
    """E(G) = (1/l) * sum_i log_l D_i.
    """
    size = kernel.matrix.shape[0]
    return sum(math.log(d, size) for d in kernel.partial_distances) / size


class WeightCensus:
    """The multiset of column weights of the n-th Kronecker power of a kernel, as a mapping from
       weight to exact multiplicity.
    """

    def __init__(self, entries, n, size):
        self.entries = dict(sorted(entries.items()))
        self.n = n
        self.size = size

    @property
    def total(self):
        return sum(self.entries.values())

    @property
    def max_weight(self):
        return max(self.entries)

    def log_geometric_mean(self, base=2):
        """The log of the geometric mean column weight, (1/N) * sum_i log w_i.
        """
        total = sum(mult * math.log(weight, base) for weight, mult in self.entries.items())
        return total / self.total

    def __iter__(self):
        return iter(self.entries.items())

    def __eq__(self, other):
        return isinstance(other, WeightCensus) and self.entries == other.entries

    def __repr__(self):
        return f"<WeightCensus n={self.n} {self.entries}>"


def kron_power_census(kernel, n):
    """Return the column-weight census of kernel^(x)n by n-fold multiplicative convolution of the
       base column weights. The power itself is never built.
    """
    if n < 1:
        raise UsageError(f"Kronecker power must be >= 1, got {n}")
    base = collections.Counter(_column_weights(kernel))
    census = collections.Counter({1: 1})
    for _ in range(n):
        step = collections.Counter()
        for weight, mult in census.items():
            for base_weight, base_mult in base.items():
                step[weight * base_weight] += mult * base_mult
        census = step
    return WeightCensus(census, n, _kernel_size(kernel))


def _column_weights(kernel):
    if isinstance(kernel, Kernel):
        return kernel.column_weights
    return tuple(int(w) for w in as_binary_matrix(kernel).sum(axis=0))


def _kernel_size(kernel):
    if isinstance(kernel, Kernel):
        return kernel.size
    return as_binary_matrix(kernel).shape[0]


SparsityReport = collections.namedtuple("SparsityReport",
        "e_of_g w_gm w_max lambda_gm_limit lambda_max_limit lambda_gm_lower lambda_max_lower "
        "delta delta_prime")


def sparsity_orders(kernel, delta=0.0):
    """Return the limiting sparsity orders of the geometric-mean and the maximum column weight of
       kernel^(x)n as n grows, when the outer repetition is sized with this delta. The *_limit
       fields carry the upper bound (1/(1-delta)) * ratio, the *_lower fields the ratio itself.
    """
    if not 0 <= delta < 1:
        raise UsageError(f"delta must be in [0, 1), got {delta}")
    size = kernel.size
    weights = kernel.column_weights
    log_distances = sum(math.log(d, size) for d in kernel.partial_distances)
    gm_lower = sum(math.log(w, size) for w in weights) / log_distances
    max_lower = size * math.log(max(weights), size) / log_distances
    return SparsityReport(
            e_of_g=kernel.rate_of_polarization,
            w_gm=math.prod(weights) ** (1 / size),
            w_max=max(weights),
            lambda_gm_limit=gm_lower / (1 - delta),
            lambda_max_limit=max_lower / (1 - delta),
            lambda_gm_lower=gm_lower,
            lambda_max_lower=max_lower,
            delta=delta,
            delta_prime=delta / (1 - delta))


def make_weight2_kernel(size):
    """Return the kernel [[I, 0], [I, I]] of even size l: every column has weight at most 2 and
       E(G) = (1/2) * log_l 2.
    """
    if size < 2 or size % 2:
        raise UsageError(f"kernel size must be even and >= 2, got {size}")
    half = size // 2
    identity = np.eye(half, dtype=np.uint8)
    zero = np.zeros((half, half), dtype=np.uint8)
    return Kernel(np.block([[identity, zero], [identity, identity]]), name=f"W2-{size}")


def make_arrow_kernel(size):
    """Return the kernel with an all-ones first column, first row (1, 0, ..., 0) and an identity
       block in the lower right. Its partial distances are (1, 2, ..., 2) and its limiting
       geometric-mean sparsity order 1/((l-1) log_l 2) goes to zero as l grows.
    """
    if size < 2:
        raise UsageError(f"kernel size must be >= 2, got {size}")
    matrix = np.eye(size, dtype=np.uint8)
    matrix[:, 0] = 1
    return Kernel(matrix, name=f"A-{size}")


def heavy_column_fraction(n, weight_threshold):
    """The exact fraction of columns of G2^(x)n whose weight exceeds weight_threshold.
    """
    if weight_threshold < 0:
        raise UsageError(f"weight threshold must be >= 0, got {weight_threshold}")
    count = sum(math.comb(n, k) for k in range(n + 1) if 2 ** k > weight_threshold)
    return fractions.Fraction(count, 2 ** n)


def kernel_split_gamma(kernel, n, w_ub):
    """Exact rate loss of the naive split of kernel^(x)n: (1/N) sum_i (ceil(w_i / w_ub) - 1).
    """
    if w_ub < 1:
        raise UsageError(f"w_ub must be >= 1, got {w_ub}")
    census = kron_power_census(kernel, n)
    extra = sum(mult * (-(-weight // w_ub) - 1) for weight, mult in census)
    return fractions.Fraction(extra, census.total)


def split_column_weights(kernel, n, w_ub):
    """Return (geometric mean, maximum) of the column weights after the naive split of
       kernel^(x)n with threshold w_ub.
    """
    if w_ub < 1:
        raise UsageError(f"w_ub must be >= 1, got {w_ub}")
    census = kron_power_census(kernel, n)
    log_sum = 0.0
    pieces = 0
    maximum = 0
    for weight, mult in census:
        full, rest = divmod(weight, w_ub)
        log_sum += mult * full * math.log2(w_ub)
        pieces += mult * full
        if rest:
            log_sum += mult * math.log2(rest)
            pieces += mult
        maximum = max(maximum, min(weight, w_ub))
    return 2 ** (log_sum / pieces), maximum


BUILTIN_KERNELS = {
    "G2": [[1, 0], [1, 1]],
    "G3*": [[0, 1, 0], [1, 1, 0], [1, 0, 1]],
    "G4*": [[1, 0, 0, 0], [0, 1, 0, 1], [0, 0, 1, 1], [1, 1, 1, 1]],
    "G3'": [[1, 0, 0], [1, 1, 0], [1, 0, 1]],
    "G4'": [[1, 0, 0, 0], [1, 1, 0, 0], [1, 0, 1, 0], [1, 0, 0, 1]],
}

# Shell friendly spellings of the kernel names.
KERNEL_ALIASES = {
    "G3star": "G3*",
    "G4star": "G4*",
    "G3prime": "G3'",
    "G4prime": "G4'",
}


def builtin_kernels():
    """Return the named kernels as a dict of Kernel objects.
    """
    return {name: Kernel(rows, name=name) for name, rows in BUILTIN_KERNELS.items()}


def get_builtin_kernel(name):
    """Look up a built-in kernel by name or alias.
    """
    name = KERNEL_ALIASES.get(name, name)
    try:
        return Kernel(BUILTIN_KERNELS[name], name=name)
    except KeyError:
        raise UsageError(f"unknown kernel {name!r}, choose from "
                f"{', '.join(list(BUILTIN_KERNELS) + list(KERNEL_ALIASES))}") from None


def read_kernel(path):
    """Read a kernel file: a line with l, then l lines of l space-separated 0/1 digits.
    """
    lines = read_fields(path)
    try:
        size = int(lines[0][0])
        rows = [[int(bit) for bit in line] for line in lines[1:]]
    except (IndexError, ValueError) as exc:
        raise UsageError(f"{path}: invalid kernel file: {exc}") from exc
    if len(rows) != size or any(len(row) != size for row in rows):
        raise DimensionError(f"{path}: expected {size} rows of {size} digits")
    return Kernel(rows, name=path)


def write_kernel(kernel, path):
    """Write a kernel in the format read_kernel() understands.
    """
    with open(path, "w", encoding="utf-8") as fobj:
        print(kernel.size, file=fobj)
        for row in kernel.matrix:
            print(" ".join(str(int(bit)) for bit in row), file=fobj)
