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

import os
import math
import collections

import numpy as np
import scipy.special

from . import LLR_CLAMP, ALPHABET_CAP
from .convert import read_fields
from .exceptions import UsageError, DimensionError, CapabilityError

# Value of an erased symbol in an erasure vector; the other values are the bits 0 and 1.
ERASED = 2

PROBABILITY_TOLERANCE = 1e-12


ChannelPair = collections.namedtuple("ChannelPair", "minus plus")


class Bec:
    """Binary erasure channel with erasure probability epsilon.
    """

    def __init__(self, erasure):
        erasure = float(erasure)
        if not 0 <= erasure <= 1:
            raise UsageError(f"erasure probability must be in [0, 1], got {erasure}")
        self.erasure = erasure

    @property
    def parameter(self):
        return self.erasure

    def transmit(self, bits, rng):
        """Pass a bit array through the channel and return int8 symbols with ERASED marks.
        """
        received = np.asarray(bits, dtype=np.int8).copy()
        received[rng.random(received.shape) < self.erasure] = ERASED
        return received

    def llr(self, received):
        """Log-likelihood ratios of erasure symbols: +/-LLR_CLAMP for known bits, 0 for erasures.
        """
        received = np.asarray(received)
        return np.where(received == ERASED, 0.0, np.where(received == 0, LLR_CLAMP, -LLR_CLAMP))

    def __eq__(self, other):
        return isinstance(other, Bec) and self.erasure == other.erasure

    def __repr__(self):
        return f"bec:{self.erasure:g}"


class Bms:
    """Binary-input memoryless symmetric channel over a finite output alphabet. Only W(y|0) is
       stored; W(y|1) is W(pairing[y]|0), so the channel is symmetric by construction.
    """

    def __init__(self, prob_given_zero, pairing, name=None):
        prob = np.asarray(prob_given_zero, dtype=np.float64)
        pairing = np.asarray(pairing, dtype=np.int64)
        if prob.ndim != 1 or pairing.shape != prob.shape:
            raise DimensionError("probabilities and pairing must be vectors of the same length")
        if np.any(prob < 0) or abs(prob.sum() - 1) > PROBABILITY_TOLERANCE * max(1, len(prob)):
            raise UsageError(f"W(y|0) must be a probability vector, sum is {prob.sum()!r}")
        if np.any(pairing < 0) or np.any(pairing >= len(prob)) or \
                np.any(pairing[pairing] != np.arange(len(prob))):
            raise UsageError("the output pairing must be an involution on the alphabet")
        self.prob_given_zero = prob
        self.pairing = pairing
        self.name = name

    @property
    def alphabet_size(self):
        return len(self.prob_given_zero)

    @property
    def prob_given_one(self):
        return self.prob_given_zero[self.pairing]

    @property
    def parameter(self):
        return bhattacharyya(self)

    def transmit(self, bits, rng):
        """Draw an output symbol index for every input bit.
        """
        bits = np.asarray(bits)
        cumulative = np.cumsum(self.prob_given_zero)
        symbols = np.searchsorted(cumulative, rng.random(bits.shape) * cumulative[-1],
                side="right")
        symbols = np.minimum(symbols, self.alphabet_size - 1)
        return np.where(bits == 1, self.pairing[symbols], symbols)

    def llr(self, received):
        """Log-likelihood ratios log W(y|0)/W(y|1) of output symbols, clamped to LLR_CLAMP.
        """
        return self.llr_table()[np.asarray(received)]

    def llr_table(self):
        with np.errstate(divide="ignore", invalid="ignore"):
            table = np.log(self.prob_given_zero) - np.log(self.prob_given_one)
        table = np.nan_to_num(table, nan=0.0, posinf=LLR_CLAMP, neginf=-LLR_CLAMP)
        return np.clip(table, -LLR_CLAMP, LLR_CLAMP)

    def __repr__(self):
        if self.name is not None:
            return self.name
        return f"<Bms |Y|={self.alphabet_size}>"


def bsc(crossover):
    """The binary symmetric channel as a two-symbol Bms.
    """
    if not 0 <= crossover <= 1:
        raise UsageError(f"crossover probability must be in [0, 1], got {crossover}")
    return Bms([1 - crossover, crossover], [1, 0], name=f"bsc:{crossover:g}")


def bec_as_bms(erasure):
    """Embed a BEC as a three-symbol Bms with outputs (0, erased, 1).
    """
    erasure = Bec(erasure).erasure
    return Bms([1 - erasure, erasure, 0.0], [2, 1, 0], name=f"bec:{erasure:g}")


def bhattacharyya(channel):
    """Z(W) = sum_y sqrt(W(y|0) W(y|1)); for a BEC this is the erasure probability.
    """
    if isinstance(channel, Bec):
        return channel.erasure
    return float(np.sqrt(channel.prob_given_zero * channel.prob_given_one).sum())


def capacity(channel):
    """Mutual information in bits between a uniform input and the output.
    """
    if isinstance(channel, Bec):
        return 1 - channel.erasure
    prob0 = channel.prob_given_zero
    prob1 = channel.prob_given_one
    mixture = (prob0 + prob1) / 2
    nats = (scipy.special.rel_entr(prob0, mixture) + scipy.special.rel_entr(prob1, mixture)).sum()
    return float(nats / 2 / math.log(2))


def bec_transform(a, b):
    """One polarization step on two erasure channels.
    """
    return ChannelPair(Bec(a.erasure + b.erasure - a.erasure * b.erasure),
            Bec(a.erasure * b.erasure))


def _check_alphabet(size, cap):
    if size > cap:
        raise CapabilityError(f"exact transform needs {size} output symbols, the cap is {cap}; "
                "use BEC mode or merge outputs with bms_merge() first")


def bms_transform(a, b, cap=ALPHABET_CAP):
    """One polarization step on two BMS channels, a carrying x1 = u1 + u2 and b carrying x2 = u2.
       The minus channel outputs (y1, y2), the plus channel (y1, y2, u1).
    """
    size_a, size_b = a.alphabet_size, b.alphabet_size
    _check_alphabet(2 * size_a * size_b, cap)

    minus = 0.5 * (np.outer(a.prob_given_zero, b.prob_given_zero) +
            np.outer(a.prob_given_one, b.prob_given_one))
    minus_pairing = a.pairing[:, None] * size_b + np.arange(size_b)[None, :]

    plus = 0.5 * np.stack([np.outer(a.prob_given_zero, b.prob_given_zero),
            np.outer(a.prob_given_one, b.prob_given_zero)], axis=-1)
    plus_pairing = (a.pairing[:, None, None] * size_b + b.pairing[None, :, None]) * 2 + \
            np.arange(2)[None, None, :]

    return ChannelPair(Bms(minus.ravel(), minus_pairing.ravel()),
            Bms(plus.ravel(), plus_pairing.ravel()))


def bms_looks(a, b, cap=ALPHABET_CAP):
    """The channel that observes one bit through a and, independently, through b.
    """
    _check_alphabet(a.alphabet_size * b.alphabet_size, cap)
    prob = np.outer(a.prob_given_zero, b.prob_given_zero)
    pairing = a.pairing[:, None] * b.alphabet_size + b.pairing[None, :]
    return Bms(prob.ravel(), pairing.ravel())


def bms_merge(channel, decimals=12):
    """Merge output symbols with equal likelihood ratio. The result is an equivalent channel (the
       likelihood ratio is a sufficient statistic), so Z and the capacity are unchanged.
    """
    prob0 = channel.prob_given_zero
    prob1 = channel.prob_given_one
    keep = (prob0 + prob1) > 0
    prob0, prob1 = prob0[keep], prob1[keep]
    with np.errstate(divide="ignore", invalid="ignore"):
        llr = np.log(prob0) - np.log(prob1)
    keys, inverse = np.unique(np.round(llr, decimals), return_inverse=True)
    merged = np.bincount(inverse.ravel(), weights=prob0, minlength=len(keys))
    pairing = np.searchsorted(keys, -keys)
    if np.any(pairing >= len(keys)) or np.any(keys[np.minimum(pairing, len(keys) - 1)] != -keys):
        raise UsageError("channel is not symmetric, cannot merge its outputs")
    return Bms(merged / merged.sum(), pairing, name=channel.name)


def read_channel(path):
    """Read a BMS channel file: the alphabet size J, J probabilities W(y|0) and J pairing indices,
       one item per line.
    """
    lines = read_fields(path)
    try:
        size = int(lines[0][0])
        prob = [float(value) for value in lines[1]]
        pairing = [int(value) for value in lines[2]]
    except (IndexError, ValueError) as exc:
        raise UsageError(f"{path}: invalid channel file: {exc}") from exc
    if len(prob) != size or len(pairing) != size:
        raise DimensionError(f"{path}: expected {size} probabilities and {size} pairing indices")
    return Bms(prob, pairing, name=f"file:{path}")


def write_channel(channel, path):
    """Write a BMS channel in the format read_channel() understands.
    """
    with open(path, "w", encoding="utf-8") as fobj:
        print(channel.alphabet_size, file=fobj)
        print(" ".join(repr(float(p)) for p in channel.prob_given_zero), file=fobj)
        print(" ".join(str(int(i)) for i in channel.pairing), file=fobj)


def parse_channel(spec):
    """Parse a channel specification: "bec:<eps>", "bsc:<p>" or "file:<path>". A bare path to an
       existing file is read as a channel file as well.
    """
    kind, _, value = spec.partition(":")
    try:
        if kind == "bec":
            return Bec(float(value))
        elif kind == "bsc":
            return bsc(float(value))
        elif kind == "file":
            return read_channel(value)
    except ValueError:
        raise UsageError(f"invalid channel parameter in {spec!r}") from None

    if os.path.isfile(spec):
        return read_channel(spec)
    raise UsageError(f"invalid channel {spec!r}, use bec:<eps>, bsc:<p> or file:<path>")
