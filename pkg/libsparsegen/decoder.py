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

import functools
import collections

import numpy as np
import scipy.stats

from . import LLR_CLAMP, Batch, Tally
from .builder import SplitGraph, build_graph
from .channel import ERASED, Bec
from .exceptions import UsageError, DimensionError


class ErasureOps:
    """Message arithmetic over erasure symbols 0, 1 and ERASED.
    """

    def __init__(self):
        self.operations = 0

    def _count(self, values):
        self.operations += values.size // max(values.shape[0], 1)

    def check(self, x, y):
        """The XOR of two symbols, erased if either is.
        """
        self._count(x)
        return np.where((x == ERASED) | (y == ERASED), ERASED, x ^ y).astype(np.int8)

    def combine(self, x, y):
        """Two looks at the same bit: a known look wins, conflicting looks are erased.
        """
        self._count(x)
        known_x = x != ERASED
        known_y = y != ERASED
        result = np.where(known_x, x, y)
        return np.where(known_x & known_y & (x != y), ERASED, result).astype(np.int8)

    def flip(self, x, bits):
        return np.where(x == ERASED, ERASED, x ^ bits.astype(np.int8)).astype(np.int8)

    def hard(self, x):
        return np.where(x == ERASED, 0, x).astype(np.uint8)

    def leaf(self, values, frozen):
        self.operations += 1
        if frozen:
            bits = np.zeros(values.shape[0], dtype=np.uint8)
            failed = np.zeros(values.shape[0], dtype=bool)
        else:
            bits = self.hard(values)
            failed = values == ERASED
        return bits[:, None], bits[:, None], failed


class LlrOps:
    """Message arithmetic over log-likelihood ratios log P(0)/P(1), clamped to LLR_CLAMP.
    """

    def __init__(self):
        self.operations = 0

    def _count(self, values):
        self.operations += values.size // max(values.shape[0], 1)

    def check(self, x, y):
        """LLR of the XOR of two independent bits, in a form that does not overflow.
        """
        self._count(x)
        value = np.sign(x) * np.sign(y) * np.minimum(np.abs(x), np.abs(y)) + \
                np.log1p(np.exp(-np.abs(x + y))) - np.log1p(np.exp(-np.abs(x - y)))
        return np.clip(value, -LLR_CLAMP, LLR_CLAMP)

    def combine(self, x, y):
        self._count(x)
        return np.clip(x + y, -LLR_CLAMP, LLR_CLAMP)

    def flip(self, x, bits):
        return np.where(bits == 1, -x, x)

    def hard(self, x):
        return (x < 0).astype(np.uint8)

    def leaf(self, values, frozen):
        self.operations += 1
        if frozen:
            bits = np.zeros(values.shape[0], dtype=np.uint8)
            failed = np.zeros(values.shape[0], dtype=bool)
        else:
            bits = self.hard(values)
            failed = values == 0
        return bits[:, None], bits[:, None], failed


DecodeResult = collections.namedtuple("DecodeResult", "estimates failed operations")


@functools.lru_cache(maxsize=32)
def _plain_graph(n):
    return build_graph(n)


def _frozen_mask(frozen):
    frozen = np.asarray(frozen, dtype=bool)
    length = len(frozen)
    if length == 0 or length & (length - 1):
        raise DimensionError(f"frozen mask length must be a power of two, got {length}")
    return frozen, length.bit_length() - 1


def _result(estimates, failed, ops, single):
    if single:
        return DecodeResult(estimates[0], bool(failed[0]), ops.operations)
    return DecodeResult(estimates, failed, ops.operations)


def _decode(graph, values, frozen, ops):
    values = np.asarray(values)
    single = values.ndim == 1
    if values.ndim not in (1, 2) or values.shape[-1] != graph.n_slots:
        raise DimensionError(f"received vector must have length {graph.n_slots}, got shape "
                f"{values.shape}")
    estimates, failed = graph.decode(values, frozen, ops)
    return _result(estimates, failed, ops, single)


def sc_polar_bec(received, frozen):
    """Successive cancellation decoding of a plain polar code from erasure symbols.
    """
    frozen, n = _frozen_mask(frozen)
    return _decode(_plain_graph(n), np.asarray(received, dtype=np.int8), frozen, ErasureOps())


def sc_drs_bec(received, frozen, graph):
    """Successive cancellation decoding of a DRS code from erasure symbols. A split gate hands
       its head operand through and gives the tail operand two looks.
    """
    if not isinstance(graph, SplitGraph):
        raise UsageError(f"the DRS erasure decoder needs a plain or DRS graph, got {graph.mode}")
    frozen, _ = _frozen_mask(frozen)
    return _decode(graph, np.asarray(received, dtype=np.int8), frozen, ErasureOps())


def sc_llr(received, frozen, graph, channel):
    """Successive cancellation with LLR messages over any graph. `received` holds channel
       outputs: erasure symbols for a BEC, output symbol indices for a BMS channel.
    """
    frozen, _ = _frozen_mask(frozen)
    return _decode(graph, channel.llr(received), frozen, LlrOps())


def sc_adrs(received, frozen, graph, channel):
    """Successive cancellation decoding of an augmented DRS code.
    """
    if graph.mode != "adrs":
        raise UsageError(f"the augmented decoder needs an augmented graph, got {graph.mode}")
    return sc_llr(received, frozen, graph, channel)


class ChunkedResult(list):
    """The per-chunk results of chunked_decode(). The whole block failed if any chunk did.
    """

    @property
    def failed(self):
        return any(bool(np.any(result.failed)) for result in self)


def chunked_decode(decoder, chunks, parallel=None):
    """Decode the n' chunks of a repeated code independently. `parallel` may be an object with
       an order-preserving map(), e.g. processing.Parallel.
    """
    chunks = [np.asarray(chunk) for chunk in chunks]
    if len(set(chunk.shape for chunk in chunks)) > 1:
        raise DimensionError("all chunks must have the same length")
    if parallel is None:
        return ChunkedResult(decoder(chunk) for chunk in chunks)
    return ChunkedResult(parallel.map(decoder, chunks))


def make_batches(trials, batch_size):
    """Split a number of trials into numbered batches.
    """
    if batch_size < 1:
        raise UsageError(f"batch size must be >= 1, got {batch_size}")
    return [Batch(index, min(batch_size, trials - start))
            for index, start in enumerate(range(0, trials, batch_size))]


def batch_rng(seed, index):
    """The random stream of batch `index`, independent of which worker runs it.
    """
    return np.random.default_rng(np.random.SeedSequence([seed, index]))


def run_batch(spec, graph, channel, batch, seed):
    """Simulate one batch of trials. A trial transmits n' chunks and fails if any chunk has a
       wrong or undecidable information bit.
    """
    rng = batch_rng(seed, batch.index)
    chunks = batch.trials * spec.n_prime
    information = ~spec.frozen
    source = np.zeros((chunks, spec.length), dtype=np.uint8)
    source[:, information] = rng.integers(0, 2, size=(chunks, spec.k), dtype=np.uint8)
    codewords = graph.encode(source, rng=rng)
    received = channel.transmit(codewords, rng)

    if isinstance(channel, Bec) and graph.mode != "adrs":
        ops = ErasureOps()
        estimates, failed = graph.decode(received, spec.frozen, ops)
    else:
        ops = LlrOps()
        estimates, failed = graph.decode(channel.llr(received), spec.frozen, ops)

    wrong = failed | np.any(estimates[:, information] != source[:, information], axis=1)
    failures = int(wrong.reshape(batch.trials, spec.n_prime).any(axis=1).sum())
    return Tally(batch.trials, failures, ops.operations)


def merge_tallies(tallies):
    """Fold batch results; the operation count is per decode and the same for every batch.
    """
    trials = failures = operations = 0
    for tally in tallies:
        trials += tally.trials
        failures += tally.failures
        operations = max(operations, tally.operations)
    return Tally(trials, failures, operations)


def monte_carlo(spec, channel, trials, seed, batch_size=1000, graph=None):
    """Serial Monte-Carlo estimate of the block failure rate of a code.
    """
    if graph is None:
        graph = spec.graph()
    return merge_tallies(run_batch(spec, graph, channel, batch, seed)
            for batch in make_batches(trials, batch_size))


def wilson_interval(failures, trials, confidence=0.95):
    """Wilson score interval for a binomial proportion.
    """
    if trials == 0:
        return 0.0, 1.0
    z = scipy.stats.norm.ppf(0.5 + confidence / 2)
    estimate = failures / trials
    denominator = 1 + z * z / trials
    center = (estimate + z * z / (2 * trials)) / denominator
    spread = z * np.sqrt(estimate * (1 - estimate) / trials + z * z / (4 * trials * trials)) / \
            denominator
    # The bound at an extreme count is exact, center - spread only rounds to it.
    low = 0.0 if failures == 0 else float(np.clip(center - spread, 0.0, 1.0))
    high = 1.0 if failures == trials else float(np.clip(center + spread, 0.0, 1.0))
    return low, high
