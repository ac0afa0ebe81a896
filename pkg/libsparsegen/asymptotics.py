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
import collections

import numpy as np
import scipy.optimize
import scipy.special
import scipy.stats.qmc

from .channel import Bec, bec_as_bms, capacity
from .exceptions import UsageError

LOG2_3 = math.log2(3)

# Scaling exponent range of polar codes.
MU_RANGE = (3.579, 4.714)

ThresholdConstants = collections.namedtuple("ThresholdConstants",
        "eps_star lambda_star lambda_dagger")

ExponentProfile = collections.namedtuple("ExponentProfile",
        "family params exp_gap exp_comp exp_wcol")

ExponentPair = collections.namedtuple("ExponentPair",
        "lam alpha exp_gap rle_comp rle_wcol polar_comp polar_wcol")

ExponentResult = collections.namedtuple("ExponentResult", "value rho at_capacity")

InequalityReport = collections.namedtuple("InequalityReport",
        "samples points max_violation violations worst_point")


def binary_entropy(x):
    """h2(x) in bits, with 0 log 0 = 0. Works on scalars and arrays.
    """
    x = np.asarray(x, dtype=np.float64)
    if np.any((x < 0) | (x > 1)):
        raise UsageError("binary entropy is defined on [0, 1]")
    value = (scipy.special.entr(x) + scipy.special.entr(1 - x)) / math.log(2)
    return float(value) if value.ndim == 0 else value


def inverse_binary_entropy(y):
    """The x in [0, 1/2] with h2(x) = y, by bisection to 1e-12.
    """
    if not 0 <= y <= 1:
        raise UsageError(f"binary entropy values lie in [0, 1], got {y}")
    if y == 0:
        return 0.0
    if y == 1:
        return 0.5
    return scipy.optimize.bisect(lambda x: binary_entropy(x) - y, 0.0, 0.5, xtol=1e-12)


def kl_divergence_bits(p, q):
    """D(p || q) between two Bernoulli distributions, in bits.
    """
    return float(scipy.special.rel_entr(p, q) + scipy.special.rel_entr(1 - p, 1 - q)) / \
            math.log(2)


def lambda_xy(eps_prime, alpha):
    """-D(1/2 + eps_prime + alpha || 1/2) + alpha, in bits.
    """
    if eps_prime < 0 or alpha < 0 or eps_prime + alpha > 0.5:
        raise UsageError(f"need eps_prime, alpha >= 0 and eps_prime + alpha <= 1/2, got "
                f"({eps_prime}, {alpha})")
    return -kl_divergence_bits(0.5 + eps_prime + alpha, 0.5) + alpha


def _lambda_xy_slope(eps_prime, alpha):
    p = 0.5 + eps_prime + alpha
    return 1 - math.log2(p / (1 - p))


def maximize_lambda_xy(eps_prime):
    """Return (argmax, max) of lambda_xy(eps_prime, .) from the root of its derivative. The
       function is concave in alpha.
    """
    upper = 0.5 - eps_prime
    if eps_prime < 0 or upper <= 0:
        raise UsageError(f"eps_prime must be in [0, 1/2), got {eps_prime}")
    if _lambda_xy_slope(eps_prime, 0.0) <= 0:
        return 0.0, lambda_xy(eps_prime, 0.0)
    alpha = scipy.optimize.brentq(lambda a: _lambda_xy_slope(eps_prime, a), 0.0,
            upper * (1 - 1e-15), xtol=1e-15)
    return alpha, lambda_xy(eps_prime, alpha)


def f_alpha_lambda(alpha, lam):
    """h2(alpha) + alpha - lambda - 1.
    """
    if not 0 <= alpha <= 1:
        raise UsageError(f"alpha must be in [0, 1], got {alpha}")
    return binary_entropy(alpha) + alpha - lam - 1


def maximize_f_alpha(lam):
    """Return (argmax, max) of f_alpha_lambda(., lam) over [0, 1].
    """
    alpha = scipy.optimize.brentq(lambda a: math.log2((1 - a) / a) + 1, 1e-12, 1 - 1e-12,
            xtol=1e-15)
    return alpha, f_alpha_lambda(alpha, lam)


def threshold_constants():
    """The thresholds on the split exponent: eps* for the naive split, lambda* for DRS and
       lambda-dagger for the augmented scheme.
    """
    _, eps_star = maximize_lambda_xy(0.0)
    return ThresholdConstants(
            eps_star=eps_star,
            lambda_star=binary_entropy(2 / 3) - 1 / 3,
            lambda_dagger=1 / LOG2_3)


LAMBDA_STAR = LOG2_3 - 1


def rle_exponents(alpha):
    """Moderate-deviation exponents of the repeated random linear code family.
    """
    if not 0 < alpha < 0.5:
        raise UsageError(f"alpha must be in (0, 1/2), got {alpha}")
    scale = 1 / (1 - 2 * alpha)
    return ExponentProfile("rle", (alpha,), alpha * scale, scale, scale)


def _polar_denominator(lam, mu):
    if not MU_RANGE[0] <= mu <= MU_RANGE[1]:
        raise UsageError(f"mu must be in [{MU_RANGE[0]}, {MU_RANGE[1]}], got {mu}")
    if not 0 < lam < 1 / (1 + mu):
        raise UsageError(f"lambda must be in (0, {1 / (1 + mu):.6g}), got {lam}")
    shrink = 1 - lam * mu
    return shrink * inverse_binary_entropy(1 - lam / shrink)


def polar_exponents(lam, mu):
    """Moderate-deviation exponents of the repeated polar code family.
    """
    denominator = _polar_denominator(lam, mu)
    return ExponentProfile("polar", (lam, mu), lam / denominator, 1.0,
            LAMBDA_STAR / denominator)


def exponent_pairs(lam_grid, mu):
    """For every lambda pair the polar point with the RLE alpha of the same gap exponent,
       alpha = g / (1 + 2g).
    """
    pairs = []
    for lam in lam_grid:
        polar = polar_exponents(float(lam), mu)
        alpha = polar.exp_gap / (1 + 2 * polar.exp_gap)
        rle = rle_exponents(alpha)
        pairs.append(ExponentPair(float(lam), alpha, polar.exp_gap, rle.exp_comp, rle.exp_wcol,
                polar.exp_comp, polar.exp_wcol))
    return pairs


def rle_n_prime_log2(alpha, delta, sigma2, length):
    """log2 n' = (1 - delta) N^(1 - 2 alpha) / (2 sigma^2) for the random linear family.
    """
    if sigma2 <= 0:
        raise UsageError(f"dispersion must be positive, got {sigma2}")
    return (1 - delta) * length ** (1 - 2 * alpha) / (2 * sigma2)


def polar_n_prime_log2(lam, mu, delta, length):
    """log2 n' = (1 - delta) N^((1 - lambda mu) h2^-1(1 - lambda / (1 - lambda mu))).
    """
    return (1 - delta) * length ** _polar_denominator(lam, mu)


def gallager_e0(channel, rho):
    """E0(rho) for uniform inputs, in nats. rho may be an array.
    """
    if isinstance(channel, Bec):
        channel = bec_as_bms(channel.erasure)
    rho = np.asarray(rho, dtype=np.float64)
    power = 1 / (1 + rho[..., None])
    terms = 0.5 * channel.prob_given_zero ** power + 0.5 * channel.prob_given_one ** power
    return -np.log((terms ** (1 + rho[..., None])).sum(axis=-1))


def random_coding_exponent(channel, rate_nats, grid=101):
    """max over rho in [0, 1] of E0(rho) - rho R: a grid search refined by bounded Brent
       minimization around the best grid point.
    """
    if rate_nats < 0:
        raise UsageError(f"rate must be >= 0, got {rate_nats}")
    if rate_nats >= capacity(channel) * math.log(2):
        return ExponentResult(0.0, 0.0, True)

    rhos = np.linspace(0, 1, grid)
    values = gallager_e0(channel, rhos) - rhos * rate_nats
    best = int(np.argmax(values))
    low, high = rhos[max(best - 1, 0)], rhos[min(best + 1, grid - 1)]
    result = scipy.optimize.minimize_scalar(
            lambda r: -(float(gallager_e0(channel, r)) - r * rate_nats),
            bounds=(low, high), method="bounded", options={"xatol": 1e-10})
    if -result.fun >= values[best]:
        return ExponentResult(max(0.0, float(-result.fun)), float(result.x), False)
    return ExponentResult(max(0.0, float(values[best])), float(rhos[best]), False)


def min_split_sides(pa, pb, b00, b01, b10, b11):
    """Both sides of the inequality bounding the error of a split XOR: the sum of four minima
       with the split, and of two minima without it.
    """
    qa, qb = 1 - pa, 1 - pb
    lhs = np.minimum(pa * (pb * b00 + qb * b01), qa * (pb * b10 + qb * b11)) + \
            np.minimum(pa * (pb * b01 + qb * b00), qa * (pb * b11 + qb * b10)) + \
            np.minimum(qa * (pb * b00 + qb * b01), pa * (pb * b10 + qb * b11)) + \
            np.minimum(qa * (pb * b01 + qb * b00), pa * (pb * b11 + qb * b10))
    rhs = np.minimum(pa * b00 + qa * b01, qa * b10 + pa * b11) + \
            np.minimum(qa * b00 + pa * b01, pa * b10 + qa * b11)
    return lhs, rhs


def min_split_inequality_check(samples, seed, tolerance=1e-12, chunk=1 << 16):
    """Evaluate the split inequality on all corners of the parameter box and on `samples`
       scrambled Sobol points, P_a, P_b in [1/2, 1] and B_ij in [0, 1].
    """
    if samples < 0:
        raise UsageError(f"samples must be >= 0, got {samples}")
    low = np.array([0.5, 0.5, 0, 0, 0, 0])
    high = np.ones(6)
    corners = np.array(np.meshgrid(*[[0, 1]] * 6, indexing="ij")).reshape(6, -1).T
    batches = [low + corners * (high - low)]
    if samples:
        sampler = scipy.stats.qmc.Sobol(d=6, scramble=True, seed=seed)
        points = sampler.random_base2(max(0, math.ceil(math.log2(samples))))[:samples]
        batches.append(scipy.stats.qmc.scale(points, low, high))

    worst = -math.inf
    worst_point = None
    violations = 0
    total = 0
    for batch in batches:
        for start in range(0, len(batch), chunk):
            part = batch[start:start + chunk]
            lhs, rhs = min_split_sides(*part.T)
            excess = lhs - rhs
            index = int(np.argmax(excess))
            if excess[index] > worst:
                worst = float(excess[index])
                worst_point = tuple(float(v) for v in part[index])
            violations += int((excess > tolerance).sum())
            total += len(part)
    return InequalityReport(samples, total, worst, violations, worst_point)
