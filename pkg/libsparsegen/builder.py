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

import json
import math
import decimal
import fractions

import numpy as np

from . import MAX_N, ALPHABET_CAP, __version__
from .split import SplitMarkerSet, n_lub_of, simple_split_gamma_census, simple_split_matrix
from .channel import Bec, bec_as_bms, bhattacharyya, bms_transform, bms_looks, bms_merge, \
        parse_channel
from .convert import format_mask, parse_mask
from .exceptions import UsageError, DimensionError, CapabilityError, InvariantError

MODES = ("plain", "simple-split", "drs", "adrs")


def polar_transform(bits):
    """Multiply every row of a bit array by G2^(x)d along the last axis (length 2^d).
    """
    bits = np.array(bits, dtype=np.uint8)
    length = bits.shape[-1]
    step = 1
    while step < length:
        view = bits.reshape(bits.shape[:-1] + (length // (2 * step), 2, step))
        view[..., 0, :] ^= view[..., 1, :]
        step *= 2
    return bits


def _pad_take(values, index):
    """values[..., index] where index -1 selects a zero.
    """
    padded = np.concatenate([values, np.zeros(values.shape[:-1] + (1,), values.dtype)], axis=-1)
    return padded[..., index]


class Layout:
    """Wiring of one encoder block with 2^m source bits. Every block of the same size is wired
       alike, because whether a gate is split depends only on its position inside the block.

       The block's slots are listed position by position. Position c of the upper half carries
       either the XOR of the single slots of the two child blocks at c, or, for a split gate, the
       child pieces themselves (head child first). Position c of the lower half repeats the
       pieces of the tail child.
    """

    def __init__(self, m, child=None, markers=None):
        self.m = m
        if m == 0:
            self.n_slots = 1
            self.counts = np.ones(1, dtype=np.int64)
            self.offsets = np.zeros(1, dtype=np.int64)
            return

        half = 1 << (m - 1)
        self.marked = np.array([markers is not None and markers.is_marked_position(m, c)
                for c in range(half)], dtype=bool)

        size = child.n_slots
        # Head child inputs: a_first alone, or checked against a_second.
        self.a_first = np.full(size, -1, dtype=np.int64)
        self.a_second = np.full(size, -1, dtype=np.int64)
        # Tail child inputs: b_direct combined with b_extra, an XOR slot where b_xor is set.
        self.b_direct = np.full(size, -1, dtype=np.int64)
        self.b_extra = np.full(size, -1, dtype=np.int64)
        self.b_xor = np.zeros(size, dtype=bool)

        enc_a, enc_b, counts = [], [], []
        for c in range(half):
            offset, count = child.offsets[c], child.counts[c]
            if self.marked[c]:
                for k in range(offset, offset + count):
                    self.a_first[k] = len(enc_a)
                    enc_a.append(k)
                    enc_b.append(-1)
                for k in range(offset, offset + count):
                    self.b_extra[k] = len(enc_a)
                    enc_a.append(-1)
                    enc_b.append(k)
                counts.append(2 * count)
            else:
                if count != 1:
                    raise InvariantError(f"unsplit gate at m={m}, c={c} has {count} pieces")
                self.a_first[offset] = self.b_extra[offset] = len(enc_a)
                self.b_xor[offset] = True
                enc_a.append(offset)
                enc_b.append(offset)
                counts.append(1)

        for c in range(half):
            offset, count = child.offsets[c], child.counts[c]
            for k in range(offset, offset + count):
                self.b_direct[k] = len(enc_a)
                enc_a.append(-1)
                enc_b.append(k)
            if not self.marked[c]:
                self.a_second[offset] = self.b_direct[offset]
            counts.append(count)

        self.enc_a = np.array(enc_a, dtype=np.int64)
        self.enc_b = np.array(enc_b, dtype=np.int64)
        self.counts = np.array(counts, dtype=np.int64)
        self.offsets = np.concatenate([[0], np.cumsum(self.counts)[:-1]]).astype(np.int64)
        self.n_slots = len(enc_a)
        self.checked = self.a_second >= 0


class EncoderGraph:
    """Base class of the layered XOR encoders of G2^(x)n. Source index i has the sign sequence of
       its binary expansion (most significant bit first, "-" for 0) and the channel slots are
       ordered like the columns of the (split) generator matrix.
    """

    mode = None

    def __init__(self, n, markers=None):
        if n < 0:
            raise UsageError(f"n must be >= 0, got {n}")
        if n > MAX_N:
            raise CapabilityError(f"n={n} exceeds the limit of {MAX_N}")
        if markers is not None and markers.n != n:
            raise UsageError(f"markers were made for n={markers.n}, not n={n}")
        self.n = n
        self.markers = markers
        self.n_lub = None if markers is None else markers.n_lub

    @property
    def length(self):
        return 1 << self.n

    n_slots = None
    n_noise = 0

    def _as_batch(self, values, width, name):
        values = np.asarray(values)
        single = values.ndim == 1
        if single:
            values = values[None, :]
        if values.ndim != 2 or values.shape[1] != width:
            raise DimensionError(f"{name} must have length {width}, got shape {values.shape}")
        return values, single

    def encode(self, source, noise=None, rng=None):
        """Encode source vectors of length 2^n (one per row) into codewords over the channel
           slots.
        """
        raise NotImplementedError

    def density_evolution(self, erasure):
        """Erasure probability of every source bit-channel for a BEC with this erasure
           probability on all channel slots.
        """
        raise NotImplementedError

    def bit_channels(self, channel, cap=ALPHABET_CAP):
        """Exact source bit-channels over a BMS channel. Outputs are merged after every step;
           the alphabet still grows quickly, so this is meant for small n.
        """
        raise NotImplementedError

    def decode(self, values, frozen, ops):
        """Successive cancellation over the graph. `values` holds one row of channel values per
           trial in the domain of `ops`. Returns (estimates, failed).
        """
        raise NotImplementedError

    def generator_matrix(self):
        """The 2^n x n_slots generator matrix with all noise inputs set to zero.
        """
        return self.encode(np.eye(self.length, dtype=np.uint8))

    def __repr__(self):
        return f"<{self.__class__.__name__} mode={self.mode} n={self.n} slots={self.n_slots}>"


class SplitGraph(EncoderGraph):
    """Plain polar encoder, or the DRS encoder where every split gate sends its two operands
       directly instead of their XOR.
    """

    def __init__(self, n, markers=None):
        super().__init__(n, markers)
        self.mode = "plain" if markers is None else "drs"
        self.layouts = [Layout(0)]
        for m in range(1, n + 1):
            self.layouts.append(Layout(m, self.layouts[-1], markers))
        self.n_slots = self.layouts[-1].n_slots

    def encode(self, source, noise=None, rng=None):
        source, single = self._as_batch(source, self.length, "source")
        data = np.asarray(source, dtype=np.uint8)[:, :, None] & 1
        for layout in self.layouts[1:]:
            batch, blocks, width = data.shape
            data = data.reshape(batch, blocks // 2, 2, width)
            data = _pad_take(data[:, :, 0], layout.enc_a) ^ _pad_take(data[:, :, 1], layout.enc_b)
        codeword = data[:, 0, :]
        return codeword[0] if single else codeword

    def density_evolution(self, erasure):
        values = np.full((1, self.n_slots), float(erasure))
        for layout in reversed(self.layouts[1:]):
            first = values[:, layout.a_first]
            second = values[:, np.where(layout.checked, layout.a_second, 0)]
            head = np.where(layout.checked, first + second - first * second, first)
            tail = values[:, layout.b_direct] * values[:, layout.b_extra]
            values = np.stack([head, tail], axis=1).reshape(-1, head.shape[1])
        return values[:, 0]

    def bit_channels(self, channel, cap=ALPHABET_CAP):
        if isinstance(channel, Bec):
            channel = bec_as_bms(channel.erasure)
        return self._bit_channels(self.n, [channel] * self.n_slots, cap)

    def _bit_channels(self, m, channels, cap):
        if m == 0:
            return channels
        layout = self.layouts[m]
        head, tail = [], []
        for k in range(len(layout.a_first)):
            first = channels[layout.a_first[k]]
            if layout.checked[k]:
                head.append(bms_merge(bms_transform(first, channels[layout.a_second[k]],
                        cap).minus))
            else:
                head.append(first)
            direct = channels[layout.b_direct[k]]
            extra = channels[layout.b_extra[k]]
            if layout.b_xor[k]:
                tail.append(bms_merge(bms_transform(extra, direct, cap).plus))
            else:
                tail.append(bms_merge(bms_looks(direct, extra, cap)))
        return self._bit_channels(m - 1, head, cap) + self._bit_channels(m - 1, tail, cap)

    def decode(self, values, frozen, ops):
        values, _ = self._as_batch(values, self.n_slots, "received vector")
        frozen = np.asarray(frozen, dtype=bool)
        estimates, _, failed = self._decode(self.n, values, frozen, ops)
        return estimates, failed

    def _decode(self, m, values, frozen, ops):
        if m == 0:
            return ops.leaf(values[:, 0], frozen[0])

        layout = self.layouts[m]
        half = 1 << (m - 1)
        head = values[:, layout.a_first]
        if layout.checked.any():
            head[:, layout.checked] = ops.check(head[:, layout.checked],
                    values[:, layout.a_second[layout.checked]])
        head_est, head_bits, head_failed = self._decode(m - 1, head, frozen[:half], ops)

        extra = values[:, layout.b_extra]
        if layout.b_xor.any():
            extra[:, layout.b_xor] = ops.flip(extra[:, layout.b_xor], head_bits[:, layout.b_xor])
        tail = ops.combine(values[:, layout.b_direct], extra)
        tail_est, tail_bits, tail_failed = self._decode(m - 1, tail, frozen[half:], ops)

        bits = _pad_take(head_bits, layout.enc_a) ^ _pad_take(tail_bits, layout.enc_b)
        return np.concatenate([head_est, tail_est], axis=1), bits, head_failed | tail_failed


class AugmentedGraph(EncoderGraph):
    """The augmented DRS encoder. Every split gate at level j sends a XOR fresh noise and b
       instead of a XOR b, and two replica blocks of 2^(j-1) channel uses are added: one carries
       the noise bit, one a second copy of b, each at the position p the gate's outputs occupy in
       their own channel-side block. Inputs of a replica before p are zero, inputs after p are
       fresh noise, so every replica observation sees the same bit-channel as the main graph
       and the source bit-channels are those of the plain polar code.

       Slots: the 2^n main slots, then the replicas level by level (level 1 first), gate by gate
       in sign order, the noise replica before the copy replica.
    """

    mode = "adrs"

    def __init__(self, n, markers):
        super().__init__(n, markers)
        self.marked = [None]
        for m in range(1, n + 1):
            half = 1 << (m - 1)
            self.marked.append(np.array([c for c in range(half)
                    if markers.is_marked_position(m, c)], dtype=np.int64))
        slots = 1 << n
        noise = 0
        self.replica_base = [None] * (n + 1)
        self.noise_base = [None] * (n + 1)
        self.noise_masks = [None] * (n + 1)
        for m in range(n, 0, -1):
            replicas = 1 << (n - m)
            count = len(self.marked[m])
            self.replica_base[m] = slots
            slots += replicas * count * 2 * replicas
            # The noise bits of the gates, then the trailing replica inputs q > p.
            position = np.arange(replicas)
            mask = np.broadcast_to((position[None, :] > position[:, None])[:, None, None, :],
                    (replicas, count, 2, replicas))
            self.noise_masks[m] = mask
            self.noise_base[m] = noise
            noise += replicas * count + int(mask.sum())
        self.n_slots = slots
        self.n_noise = noise

    def _replica_noise(self, noise, m):
        replicas = 1 << (self.n - m)
        count = len(self.marked[m])
        base = self.noise_base[m]
        gate_noise = noise[:, base:base + replicas * count].reshape(-1, replicas, count)
        fresh = np.zeros((noise.shape[0],) + self.noise_masks[m].shape, dtype=np.uint8)
        fresh[:, self.noise_masks[m]] = noise[:, base + replicas * count:
                base + replicas * count + int(self.noise_masks[m].sum())]
        return gate_noise, fresh

    def encode(self, source, noise=None, rng=None):
        source, single = self._as_batch(source, self.length, "source")
        batch = source.shape[0]
        if noise is None:
            if rng is not None:
                noise = rng.integers(0, 2, size=(batch, self.n_noise), dtype=np.uint8)
            else:
                noise = np.zeros((batch, self.n_noise), dtype=np.uint8)
        noise, _ = self._as_batch(noise, self.n_noise, "noise")
        if noise.shape[0] != batch:
            raise DimensionError("source and noise must have the same number of rows")
        noise = np.asarray(noise, dtype=np.uint8)

        data = np.asarray(source, dtype=np.uint8)[:, :, None] & 1
        replicas = {}
        for m in range(1, self.n + 1):
            blocks, width = data.shape[1] // 2, data.shape[2]
            data = data.reshape(batch, blocks, 2, width)
            head, tail = data[:, :, 0], data[:, :, 1]
            marked = self.marked[m]
            partner = tail.copy()
            if len(marked):
                gate_noise, fresh = self._replica_noise(noise, m)
                partner[:, :, marked] = gate_noise
                diagonal = np.eye(blocks, dtype=np.uint8)[None, :, None, :]
                inputs = np.stack([gate_noise[..., None] * diagonal,
                        tail[:, :, marked][..., None] * diagonal], axis=3)
                replicas[m] = polar_transform(inputs ^ fresh).reshape(batch, -1)
            data = np.concatenate([head ^ partner, tail], axis=2)

        parts = [data[:, 0, :]] + [replicas[m] for m in range(self.n, 0, -1) if m in replicas]
        codeword = np.concatenate(parts, axis=1)
        return codeword[0] if single else codeword

    def generator_matrix(self):
        return self.encode(np.eye(self.length, dtype=np.uint8),
                np.zeros((self.length, self.n_noise), dtype=np.uint8))

    def density_evolution(self, erasure):
        values = np.full((1, 1 << self.n), float(erasure))
        for m in range(self.n, 0, -1):
            half = 1 << (m - 1)
            marked = self.marked[m]
            head_in, tail_in = values[:, :half], values[:, half:]
            partner = tail_in.copy()
            looks = head_in.copy()
            if len(marked):
                # Row p is block p; its replicas observe position p of a plain block.
                replica = _plain_profile(erasure, self.n - m)
                partner[:, marked] = replica[:, None]
                looks[:, marked] = replica[:, None]
            head = head_in + partner - head_in * partner
            tail = tail_in * looks
            values = np.stack([head, tail], axis=1).reshape(-1, half)
        return values[:, 0]

    def bit_channels(self, channel, cap=ALPHABET_CAP):
        if isinstance(channel, Bec):
            channel = bec_as_bms(channel.erasure)
        replica_cache = {}
        return self._bit_channels(self.n, 0, [channel] * self.length, channel, replica_cache,
                cap)

    def _bit_channels(self, m, block, channels, channel, cache, cap):
        if m == 0:
            return channels
        half = 1 << (m - 1)
        marked = set(int(c) for c in self.marked[m])
        if marked:
            key = (self.n - m, block)
            if key not in cache:
                cache[key] = plain_bit_channel(channel, self.n - m, block, cap)
            replica = cache[key]
        head, tail = [], []
        for c in range(half):
            if c in marked:
                head.append(bms_merge(bms_transform(channels[c], replica, cap).minus))
                tail.append(bms_merge(bms_looks(channels[half + c], replica, cap)))
            else:
                pair = bms_transform(channels[c], channels[half + c], cap)
                head.append(bms_merge(pair.minus))
                tail.append(bms_merge(pair.plus))
        return self._bit_channels(m - 1, 2 * block, head, channel, cache, cap) + \
                self._bit_channels(m - 1, 2 * block + 1, tail, channel, cache, cap)

    def _replica_values(self, values, ops):
        """Reduce every replica block to the value of its position p, with the inputs before p
           known to be zero and the ones after p unknown.
        """
        batch = values.shape[0]
        result = [None] * (self.n + 1)
        for m in range(1, self.n + 1):
            marked = self.marked[m]
            if not len(marked):
                continue
            replicas = 1 << (self.n - m)
            base = self.replica_base[m]
            block = values[:, base:base + replicas * len(marked) * 2 * replicas]
            block = block.reshape(batch, replicas, len(marked), 2, replicas)
            depth = self.n - m
            position = np.arange(replicas)
            for step in range(depth):
                width = block.shape[-1] // 2
                upper, lower = block[..., :width], block[..., width:]
                bit = (position >> (depth - 1 - step) & 1).astype(bool)[None, :, None, None, None]
                block = np.where(bit, ops.combine(lower, upper), ops.check(upper, lower))
            result[m] = (block[..., 0, 0], block[..., 1, 0])
        return result

    def decode(self, values, frozen, ops):
        values, _ = self._as_batch(values, self.n_slots, "received vector")
        frozen = np.asarray(frozen, dtype=bool)
        replicas = self._replica_values(values, ops)
        estimates, _, failed = self._decode(self.n, 0, values[:, :self.length], frozen, ops,
                replicas)
        return estimates, failed

    def _decode(self, m, block, values, frozen, ops, replicas):
        if m == 0:
            return ops.leaf(values[:, 0], frozen[0])

        half = 1 << (m - 1)
        marked = self.marked[m]
        upper, lower = values[:, :half], values[:, half:]

        partner = lower.copy()
        if len(marked):
            noise_view, copy_view = replicas[m][0][:, block], replicas[m][1][:, block]
            partner[:, marked] = noise_view
        head = ops.check(upper, partner)
        head_est, head_bits, head_failed = self._decode(m - 1, 2 * block, head, frozen[:half],
                ops, replicas)

        extra = ops.flip(upper, head_bits)
        if len(marked):
            extra[:, marked] = copy_view
        tail = ops.combine(lower, extra)
        tail_est, tail_bits, tail_failed = self._decode(m - 1, 2 * block + 1, tail,
                frozen[half:], ops, replicas)

        top = head_bits ^ tail_bits
        if len(marked):
            # The noise bit is seen through its replica and through the head slot minus a.
            noise = ops.combine(noise_view, ops.flip(upper[:, marked], head_bits[:, marked]))
            top[:, marked] = head_bits[:, marked] ^ ops.hard(noise)
        bits = np.concatenate([top, tail_bits], axis=1)
        return np.concatenate([head_est, tail_est], axis=1), bits, head_failed | tail_failed


def _plain_profile(erasure, depth):
    values = np.array([float(erasure)])
    for _ in range(depth):
        values = np.stack([2 * values - values ** 2, values ** 2], axis=1).ravel()
    return values


def plain_bit_channel(channel, depth, index, cap=ALPHABET_CAP):
    """The plain polar bit-channel of source index `index` in a block of 2^depth, with the
       transform of the most significant bit applied first.
    """
    for step in range(depth):
        pair = bms_transform(channel, channel, cap)
        channel = bms_merge(pair.plus if index >> (depth - 1 - step) & 1 else pair.minus)
    return channel


class MatrixEncoder:
    """Encoder of a code that exists only as a split generator matrix, such as the naive split,
       whose pieces follow no gate of the recursion. It encodes but cannot be decoded.
    """

    n_noise = 0

    def __init__(self, n, generator):
        if generator.n_rows != 1 << n:
            raise DimensionError(f"generator has {generator.n_rows} rows, expected {1 << n}")
        self.n = n
        self.generator = generator
        self.matrix = generator.to_sparse().tocsr()
        self.n_slots = generator.n_cols

    @property
    def length(self):
        return 1 << self.n

    def encode(self, source, noise=None, rng=None):
        # pylint:disable=unused-argument
        source = np.asarray(source)
        single = source.ndim == 1
        if single:
            source = source[None, :]
        if source.ndim != 2 or source.shape[1] != self.length:
            raise DimensionError(f"source must have length {self.length}, got shape "
                    f"{source.shape}")
        if noise is not None and np.size(noise):
            raise DimensionError("a split generator matrix takes no noise inputs")
        codeword = np.asarray(self.matrix.T @ (source.T.astype(np.int64) & 1)).T % 2
        codeword = codeword.astype(np.uint8)
        return codeword[0] if single else codeword

    def generator_matrix(self):
        return self.generator.to_dense()

    def __repr__(self):
        return f"<MatrixEncoder n={self.n} slots={self.n_slots}>"


def build_graph(n, markers=None, adrs=False):
    """Build the plain (markers None), DRS or augmented DRS encoder graph of G2^(x)n.
    """
    if adrs:
        if markers is None:
            raise UsageError("the augmented scheme needs split markers")
        return AugmentedGraph(n, markers)
    return SplitGraph(n, markers)


def bec_density_evolution(graph, erasure):
    return graph.density_evolution(erasure)


def select_frozen(profile, k):
    """Freeze all but the k source bits with the smallest profile values, ties going to the
       smaller index. Returns a boolean mask, True meaning frozen.
    """
    profile = np.asarray(profile, dtype=np.float64)
    if not 0 <= k <= len(profile):
        raise UsageError(f"cannot select {k} information bits out of {len(profile)}")
    frozen = np.ones(len(profile), dtype=bool)
    frozen[np.argsort(profile, kind="stable")[:k]] = False
    return frozen


def union_bound_pe(profile, frozen, n_prime_log2=0):
    """log2 of n' * sum of the profile over the unfrozen bits. All frozen gives -inf.
    """
    profile = np.asarray(profile, dtype=np.float64)
    total = math.fsum(profile[~np.asarray(frozen, dtype=bool)])
    if total <= 0:
        return float("-inf")
    if isinstance(n_prime_log2, decimal.Decimal):
        return n_prime_log2 + decimal.Decimal(repr(math.log2(total)))
    return float(n_prime_log2) + math.log2(total)


class CodeSpec:
    """Everything needed to rebuild a code: the kernel, n, the outer repetition n' (concrete, and
       symbolically as log2 n'), the split threshold, the mode and the frozen set.
    """

    def __init__(self, n, w_ub, mode, frozen, kernel="G2", n_prime=1, n_prime_log2=None,
            design=None, union_bound_log2=None):
        if mode not in MODES:
            raise UsageError(f"invalid mode {mode!r}, choose from {', '.join(MODES)}")
        frozen = np.asarray(frozen, dtype=bool)
        if frozen.shape != (1 << n,):
            raise DimensionError(f"frozen mask must have length {1 << n}")
        if n_prime < 1:
            raise UsageError(f"n' must be >= 1, got {n_prime}")
        self.n = n
        self.w_ub = w_ub
        self.mode = mode
        self.frozen = frozen
        self.kernel = kernel
        self.n_prime = n_prime
        self.n_prime_log2 = decimal.Decimal(repr(math.log2(n_prime))) if n_prime_log2 is None \
                else decimal.Decimal(n_prime_log2)
        self.design = design
        self.union_bound_log2 = union_bound_log2

    @property
    def length(self):
        return 1 << self.n

    @property
    def k(self):
        return int((~self.frozen).sum())

    @property
    def rate(self):
        return fractions.Fraction(self.k, self.length)

    @property
    def markers(self):
        if self.mode in ("drs", "adrs"):
            return SplitMarkerSet(self.n, n_lub_of(self.w_ub))
        return None

    def graph(self):
        """Build the encoder graph this code is decoded on.
        """
        if self.mode == "simple-split":
            raise CapabilityError("the naive split keeps no encoder graph, it can be analyzed but "
                    "not decoded")
        return build_graph(self.n, self.markers, self.mode == "adrs")

    def encoder(self):
        """The encoder graph, or for the naive split an encoder over its generator matrix.
        """
        if self.mode == "simple-split":
            return MatrixEncoder(self.n, simple_split_matrix(self.n, self.w_ub))
        return self.graph()

    def n_slots(self):
        if self.mode == "simple-split":
            ledger = simple_split_gamma_census(self.n, self.w_ub)
            return self.length + ledger.extra_columns
        return self.graph().n_slots

    def to_dict(self):
        return {
            "sparsegen": __version__,
            "kernel": self.kernel,
            "n": self.n,
            "w_ub": self.w_ub,
            "mode": self.mode,
            "k": self.k,
            "rate": str(self.rate),
            "frozen": format_mask(self.frozen),
            "n_prime": self.n_prime,
            "n_prime_log2": str(self.n_prime_log2),
            "slots": self.n_slots(),
            "design": self.design,
            "union_bound_log2": None if self.union_bound_log2 is None
                    else str(self.union_bound_log2),
        }

    @classmethod
    def from_dict(cls, data):
        try:
            n = int(data["n"])
            spec = cls(n, int(data["w_ub"]), data["mode"], parse_mask(data["frozen"], 1 << n),
                    kernel=data.get("kernel", "G2"), n_prime=int(data.get("n_prime", 1)),
                    n_prime_log2=data.get("n_prime_log2"), design=data.get("design"),
                    union_bound_log2=data.get("union_bound_log2"))
        except (KeyError, TypeError, ValueError, decimal.InvalidOperation) as exc:
            raise UsageError(f"invalid code description: {exc}") from exc
        if "k" in data and int(data["k"]) != spec.k:
            raise UsageError(f"code description announces k={data['k']}, the mask has {spec.k}")
        return spec

    def __repr__(self):
        return f"<CodeSpec {self.mode} n={self.n} w_ub={self.w_ub} k={self.k}>"


def read_code(path):
    try:
        with open(path, encoding="utf-8") as fobj:
            return CodeSpec.from_dict(json.load(fobj))
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"{path}: cannot read code: {exc}") from exc


def write_code(spec, path):
    with open(path, "w", encoding="utf-8") as fobj:
        json.dump(spec.to_dict(), fobj, indent=2)
        fobj.write("\n")


def design_profile(graph, channel):
    """The profile a code is designed with: exact density evolution on a BEC, and on other
       channels the erasure profile of a BEC with erasure probability Z(W), which bounds the
       Bhattacharyya parameters of plain and augmented bit-channels from above.
    """
    if isinstance(channel, str):
        channel = parse_channel(channel)
    if isinstance(channel, Bec):
        return graph.density_evolution(channel.erasure)
    return graph.density_evolution(bhattacharyya(channel))


def build_code(n, mode, w_ub, channel, rate, n_prime=1, n_prime_log2=None):
    """Construct a code: build the graph, evaluate the design profile and freeze the least
       reliable bits. Returns (spec, graph, profile); graph is None for the naive split.
    """
    if mode not in MODES:
        raise UsageError(f"invalid mode {mode!r}, choose from {', '.join(MODES)}")
    if isinstance(channel, str):
        channel = parse_channel(channel)
    rate = fractions.Fraction(rate).limit_denominator(1 << 40)
    if not 0 <= rate <= 1:
        raise UsageError(f"rate must be in [0, 1], got {float(rate)}")
    k = math.floor(rate * (1 << n))
    markers = SplitMarkerSet(n, n_lub_of(w_ub)) if mode in ("drs", "adrs") else None

    if mode == "simple-split":
        graph = None
        profile = design_profile(build_graph(n), channel)
    else:
        graph = build_graph(n, markers, mode == "adrs")
        profile = design_profile(graph, channel)

    frozen = select_frozen(profile, k)
    spec = CodeSpec(n, w_ub, mode, frozen, n_prime=n_prime, n_prime_log2=n_prime_log2,
            design=repr(channel))
    spec.union_bound_log2 = union_bound_pe(profile, frozen, spec.n_prime_log2)
    return spec, graph, profile


def encode(spec, graph, message, noise=None, rng=None):
    """Place the K message bits on the unfrozen positions and encode them over the graph. With
       graph None the encoder of spec is built, which is the only way to encode a naive split.
    """
    if graph is None:
        graph = spec.encoder()
    message = np.asarray(message, dtype=np.uint8)
    single = message.ndim == 1
    if single:
        message = message[None, :]
    if message.ndim != 2 or message.shape[1] != spec.k:
        raise DimensionError(f"message must have length {spec.k}, got shape {message.shape}")
    source = np.zeros((message.shape[0], spec.length), dtype=np.uint8)
    source[:, ~spec.frozen] = message
    codeword = graph.encode(source, noise, rng)
    return codeword[0] if single else codeword


class ConstructionSizes:
    """Symbolic sizes of the outer repetition when n' is chosen as 2^(N^((1-delta)E)).
    """

    def __init__(self, kernel, n, delta):
        if not 0 <= delta < 1:
            raise UsageError(f"delta must be in [0, 1), got {delta}")
        with decimal.localcontext() as context:
            context.prec = 50
            length = decimal.Decimal(kernel.size) ** n
            exponent = (1 - decimal.Decimal(repr(delta))) * \
                    decimal.Decimal(repr(kernel.rate_of_polarization))
            self.n_prime_log2 = +(length ** exponent)
            self.block_length_log2 = self.n_prime_log2 + decimal.Decimal(n) * \
                    decimal.Decimal(kernel.size).ln() / decimal.Decimal(2).ln()
        self.length = kernel.size ** n
        self.exponent = (1 - delta) * kernel.rate_of_polarization

    def info_length_log2(self, k):
        """log2 K' for K information bits per chunk.
        """
        return self.n_prime_log2 + decimal.Decimal(repr(math.log2(k)))

    def error_bound_log2(self, pe_log2):
        """log2 of the bound n' * Pe(C) on the error probability of the repeated code.
        """
        return self.n_prime_log2 + decimal.Decimal(repr(pe_log2))


def construction_sizes(kernel, n, delta):
    return ConstructionSizes(kernel, n, delta)
