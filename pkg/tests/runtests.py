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

import io
import os
import sys
import glob
import math
import random
import fractions
import itertools
import unittest
import subprocess

import numpy as np

tests_directory = os.path.dirname(os.path.abspath(__file__))
sys.path.insert(0, os.path.dirname(tests_directory))

# pylint:disable=wrong-import-position
from sparsegen import Kernel, Bec, Bms, CodeSpec, Simulation, UsageError, DimensionError, \
    CapabilityError, SparseColumn, SplitMarkerSet, is_polarizing, partial_distances, \
    kron_power_census, sparsity_orders, heavy_column_fraction, make_weight2_kernel, \
    make_arrow_kernel, get_builtin_kernel, read_kernel, bsc, bec_as_bms, bhattacharyya, \
    capacity, bec_transform, bms_transform, bms_merge, read_channel, parse_channel, \
    polar_columns, simple_split_column, simple_split_matrix, simple_split_gamma_census, \
    simple_split_gamma_tail, a_term_decomposition, drs_split, drs_matrix, drs_gamma_closed, \
    drs_piece_count, split_markers, adrs_extra_uses, adrs_gamma, adrs_rate_bound, \
    build_graph, build_code, select_frozen, union_bound_pe, encode, construction_sizes, \
    sc_polar_bec, sc_drs_bec, sc_llr, sc_adrs, chunked_decode, monte_carlo, wilson_interval, \
    threshold_constants, maximize_lambda_xy, maximize_f_alpha, lambda_xy, rle_exponents, \
    polar_exponents, exponent_pairs, random_coding_exponent, min_split_inequality_check, \
    binary_entropy, inverse_binary_entropy, read_csv
from libsparsegen.channel import ERASED
from libsparsegen.split import drs_piece_count_from_signs, signs_of, lambda_to_n_lub
from libsparsegen.builder import MatrixEncoder
from libsparsegen.logger import Logger
from libsparsegen.asymptotics import LOG2_3, gallager_e0
from libsparsegen.argparse import Namespace, type_range
from libsparsegen.arguments import create_parser, parse_arguments
from libsparsegen.console import CsvConsole
from libsparsegen.convert import format_real
from libsparsegen.context import Context
from libsparsegen.processing import Parallel

fixtures = os.path.join(tests_directory, "test-01", "workdir")


def g2_power(n):
    matrix = np.ones((1, 1), dtype=np.uint8)
    for _ in range(n):
        matrix = np.kron(matrix, np.array([[1, 0], [1, 1]], dtype=np.uint8))
    return matrix


def sigma(rate, trials):
    return math.sqrt(max(rate * (1 - rate), 1 / trials) / trials)


class ShellTest(unittest.TestCase):

    maxDiff = None

    @classmethod
    def add_test(cls, test, test_number, workdir, command, output, keep_order):
        def shell(self):
            env = os.environ.copy()
            env["PATH"] = tests_directory + os.pathsep + env["PATH"]
            env.pop("SPARSEGEN_OPTIONS", None)
            env.pop("SPARSEGEN_THREADS", None)

            try:
                stdout = subprocess.check_output(command, shell=True, env=env,
                        cwd=workdir, universal_newlines=True, stderr=subprocess.STDOUT)
            except subprocess.CalledProcessError as exc:
                stdout = exc.output

            if keep_order:
                self.assertEqual(stdout, output)
            else:
                self.assertEqual(set(output.splitlines()), set(stdout.splitlines()))

        setattr(cls, f"test_[{test}-{test_number:02d}/{command}]", shell)


class KernelTest(unittest.TestCase):

    def test_is_polarizing(self):
        self.assertTrue(is_polarizing([[1, 0], [1, 1]]))
        self.assertFalse(is_polarizing([[1, 0], [0, 1]]))
        self.assertFalse(is_polarizing([[1, 1], [1, 1]]))
        self.assertRaises(DimensionError, is_polarizing, [[1, 0, 0], [1, 1, 0]])

    def test_partial_distances(self):
        self.assertEqual(partial_distances([[1, 0], [1, 1]]), (1, 2))
        self.assertEqual(get_builtin_kernel("G3*").partial_distances, (1, 2, 2))
        self.assertEqual(get_builtin_kernel("G4*").partial_distances, (1, 2, 2, 4))
        self.assertEqual(get_builtin_kernel("G4prime").partial_distances, (1, 2, 2, 2))

    def test_rate_of_polarization(self):
        self.assertAlmostEqual(get_builtin_kernel("G2").rate_of_polarization, 0.5)
        self.assertAlmostEqual(get_builtin_kernel("G3*").rate_of_polarization,
                2 / 3 * math.log(2, 3))
        self.assertAlmostEqual(get_builtin_kernel("G4*").rate_of_polarization, 0.5)
        self.assertAlmostEqual(get_builtin_kernel("G4'").rate_of_polarization, 0.375)

    def test_sampled_partial_distances(self):
        matrix = get_builtin_kernel("G4*").matrix
        self.assertEqual(partial_distances(matrix, samples=2000, seed=1), (1, 2, 2, 4))

    def test_read_kernel(self):
        kernel = read_kernel(os.path.join(fixtures, "g3.txt"))
        self.assertEqual(kernel.partial_distances, (1, 2, 2))
        self.assertRaises(UsageError, read_kernel, os.path.join(fixtures, "missing.txt"))

    def test_not_a_kernel(self):
        self.assertRaises(UsageError, Kernel, [[1, 1], [0, 1]])

    def test_census_g2(self):
        kernel = get_builtin_kernel("G2")
        for n in range(1, 12):
            census = kron_power_census(kernel, n)
            self.assertEqual(census.entries, {2 ** j: math.comb(n, j) for j in range(n + 1)})
            self.assertAlmostEqual(census.log_geometric_mean(), n / 2)

    def test_census_brute_force(self):
        for name in ("G2", "G3*", "G4*", "G4'"):
            kernel = get_builtin_kernel(name)
            power = np.ones((1, 1), dtype=np.int64)
            for n in range(1, 5):
                power = np.kron(power, kernel.matrix.astype(np.int64))
                weights, counts = np.unique(power.sum(axis=0), return_counts=True)
                expected = {int(w): int(c) for w, c in zip(weights, counts)}
                self.assertEqual(kron_power_census(kernel, n).entries, expected)

    def test_census_total(self):
        kernel = get_builtin_kernel("G4*")
        self.assertEqual(kron_power_census(kernel, 40).total, 4 ** 40)
        self.assertEqual(kron_power_census(make_arrow_kernel(3), 2).entries, {1: 4, 3: 4, 9: 1})

    def test_census_column_permutation(self):
        kernel = get_builtin_kernel("G4*")
        permuted = Kernel(kernel.matrix[:, [3, 1, 0, 2]])
        self.assertEqual(kron_power_census(kernel, 5), kron_power_census(permuted, 5))

    def test_rate_of_polarization_column_permutation(self):
        for name in ("G2", "G3*", "G4*", "G4'"):
            kernel = get_builtin_kernel(name)
            for permutation in itertools.permutations(range(kernel.size)):
                permuted = Kernel(kernel.matrix[:, list(permutation)])
                self.assertEqual(permuted.partial_distances, kernel.partial_distances)
                self.assertAlmostEqual(permuted.rate_of_polarization,
                        kernel.rate_of_polarization, places=14)

        rng = np.random.default_rng(13)
        for kernel in (make_arrow_kernel(7), make_weight2_kernel(8)):
            for _ in range(50):
                permuted = Kernel(kernel.matrix[:, rng.permutation(kernel.size)])
                self.assertAlmostEqual(permuted.rate_of_polarization,
                        kernel.rate_of_polarization, places=14)

    def test_sparsity_orders(self):
        report = sparsity_orders(get_builtin_kernel("G2"))
        self.assertAlmostEqual(report.lambda_gm_limit, 1)
        self.assertAlmostEqual(report.lambda_max_limit, 2)

        report = sparsity_orders(get_builtin_kernel("G3'"))
        self.assertAlmostEqual(report.lambda_gm_limit, 0.7925, places=4)
        self.assertAlmostEqual(report.lambda_max_limit, 2.3774, places=4)

        report = sparsity_orders(get_builtin_kernel("G4*"))
        self.assertAlmostEqual(report.lambda_gm_limit, 1.1462, places=4)
        self.assertAlmostEqual(report.lambda_max_limit, LOG2_3)

        report = sparsity_orders(get_builtin_kernel("G4'"))
        self.assertAlmostEqual(report.lambda_gm_limit, 2 / 3)
        self.assertAlmostEqual(report.lambda_max_limit, 8 / 3)

        report = sparsity_orders(get_builtin_kernel("G4*"), delta=0.5)
        self.assertAlmostEqual(report.delta_prime, 1)
        self.assertAlmostEqual(report.lambda_gm_limit, 2 * report.lambda_gm_lower)
        self.assertRaises(UsageError, sparsity_orders, get_builtin_kernel("G2"), 1.0)

    def test_weight2_kernel(self):
        self.assertTrue(np.array_equal(make_weight2_kernel(2).matrix, [[1, 0], [1, 1]]))
        kernel = make_weight2_kernel(4)
        self.assertEqual(kernel.partial_distances, (1, 1, 2, 2))
        self.assertAlmostEqual(kernel.rate_of_polarization, 0.25)
        self.assertLessEqual(max(kernel.column_weights), 2)
        self.assertEqual(kron_power_census(make_weight2_kernel(16), 3).max_weight, 2 ** 3)
        self.assertRaises(UsageError, make_weight2_kernel, 3)

    def test_arrow_kernel(self):
        kernel = make_arrow_kernel(3)
        self.assertEqual(kernel.column_weights, (3, 1, 1))
        self.assertEqual(kernel.partial_distances, (1, 2, 2))
        self.assertAlmostEqual(sparsity_orders(make_arrow_kernel(16)).lambda_gm_limit, 1 / 3.75)

        limits = [sparsity_orders(make_arrow_kernel(size)).lambda_gm_limit
                for size in range(4, 21)]
        self.assertEqual(limits, sorted(limits, reverse=True))

    def test_heavy_column_fraction(self):
        self.assertEqual(heavy_column_fraction(10, 32), fractions.Fraction(386, 1024))
        self.assertEqual(heavy_column_fraction(7, 2 ** 7), 0)
        self.assertEqual(heavy_column_fraction(7, 0), 1)


class ChannelTest(unittest.TestCase):

    def setUp(self):
        self.w1 = read_channel(os.path.join(fixtures, "w1.txt"))
        self.w2 = read_channel(os.path.join(fixtures, "w2.txt"))

    def test_bhattacharyya(self):
        self.assertAlmostEqual(bhattacharyya(self.w1), 0.7666, delta=1e-4)
        self.assertAlmostEqual(bhattacharyya(self.w2), 0.7702, delta=1e-4)
        self.assertAlmostEqual(bhattacharyya(bsc(0.1)), 2 * math.sqrt(0.09))
        self.assertAlmostEqual(bhattacharyya(bec_as_bms(0.3)), 0.3)
        self.assertAlmostEqual(capacity(bec_as_bms(0.3)), 0.7)

    def test_transform(self):
        pair = bms_transform(self.w1, self.w2)
        self.assertAlmostEqual(bhattacharyya(pair.minus), 0.9147, delta=1e-4)
        self.assertAlmostEqual(bhattacharyya(pair.plus), 0.5904, delta=1e-4)

        pair = bms_transform(self.w2, self.w2)
        self.assertAlmostEqual(bhattacharyya(pair.minus), 0.9137, delta=1e-4)
        self.assertAlmostEqual(bhattacharyya(pair.plus), 0.5932, delta=1e-4)

    def test_transform_conserves_capacity(self):
        for channel in (self.w1, self.w2, bsc(0.11)):
            pair = bms_transform(channel, channel)
            self.assertAlmostEqual(capacity(pair.minus) + capacity(pair.plus),
                    2 * capacity(channel), places=12)

    def _random_bms(self, rng):
        pairs = int(rng.integers(1, 4))
        fixed = int(rng.integers(0, 2))
        prob = rng.dirichlet(np.ones(2 * pairs + fixed))
        pairing = np.arange(2 * pairs + fixed)
        pairing[0:2 * pairs:2] += 1
        pairing[1:2 * pairs:2] -= 1
        return Bms(prob / prob.sum(), pairing)

    def test_random_transforms(self):
        rng = np.random.default_rng(14)
        for _ in range(100):
            a, b = self._random_bms(rng), self._random_bms(rng)
            z_a, z_b = bhattacharyya(a), bhattacharyya(b)
            pair = bms_transform(a, b)
            self.assertGreaterEqual(bhattacharyya(pair.minus), max(z_a, z_b) - 1e-12)
            self.assertGreaterEqual(min(z_a, z_b), bhattacharyya(pair.plus) - 1e-12)
            self.assertAlmostEqual(bhattacharyya(pair.plus), z_a * z_b, places=12)

            a0, a1 = a.prob_given_zero, a.prob_given_one
            b0, b1 = b.prob_given_zero, b.prob_given_one
            minus_one = 0.5 * (np.outer(a1, b0) + np.outer(a0, b1)).ravel()
            plus_one = 0.5 * np.stack([np.outer(a1, b1), np.outer(a0, b1)], axis=-1).ravel()
            self.assertTrue(np.allclose(pair.minus.prob_given_one, minus_one, rtol=0,
                    atol=1e-12))
            self.assertTrue(np.allclose(pair.plus.prob_given_one, plus_one, rtol=0, atol=1e-12))
            for channel in pair:
                self.assertAlmostEqual(channel.prob_given_zero.sum(), 1.0, places=12)

    def test_merge(self):
        pair = bms_transform(self.w1, self.w2)
        for channel in pair:
            merged = bms_merge(channel)
            self.assertLessEqual(merged.alphabet_size, channel.alphabet_size)
            self.assertAlmostEqual(bhattacharyya(merged), bhattacharyya(channel), places=12)
            self.assertAlmostEqual(capacity(merged), capacity(channel), places=12)

    def test_bec_transform(self):
        pair = bec_transform(Bec(0.5), Bec(0.5))
        self.assertEqual(pair.minus, Bec(0.75))
        self.assertEqual(pair.plus, Bec(0.25))

        pair = bms_transform(bec_as_bms(0.4), bec_as_bms(0.4))
        self.assertAlmostEqual(bhattacharyya(pair.minus), 0.64)
        self.assertAlmostEqual(bhattacharyya(pair.plus), 0.16)

    def test_invalid(self):
        self.assertRaises(UsageError, Bms, [0.5, 0.5], [0, 0])
        self.assertRaises(UsageError, Bms, [0.5, 0.6], [1, 0])
        self.assertRaises(UsageError, Bec, 1.5)
        self.assertRaises(UsageError, parse_channel, "awgn:1")
        self.assertRaises(UsageError, parse_channel, "bec:x")

    def test_transmit(self):
        rng = np.random.default_rng(0)
        received = Bec(0.3).transmit(np.zeros(100000, dtype=np.uint8), rng)
        self.assertAlmostEqual((received == ERASED).mean(), 0.3, delta=0.01)

        bits = rng.integers(0, 2, size=100000)
        received = bsc(0.2).transmit(bits, rng)
        self.assertAlmostEqual((received != bits).mean(), 0.2, delta=0.01)


class SplitTest(unittest.TestCase):

    def test_simple_split_column(self):
        column = SparseColumn(8, [0, 1])
        self.assertEqual(simple_split_column(column, 1),
                [SparseColumn(8, [0]), SparseColumn(8, [1])])
        self.assertEqual(len(simple_split_column(SparseColumn(8, [0, 1, 2, 3]), 2)), 2)
        column = SparseColumn.from_bits([1, 0, 1, 1, 1, 0, 1, 1])
        self.assertEqual(simple_split_column(column, 2), [SparseColumn(8, [0, 2]),
                SparseColumn(8, [3, 4]), SparseColumn(8, [6, 7])])
        self.assertEqual(simple_split_column(SparseColumn(8, []), 2), [SparseColumn(8, [])])

    def test_drs_split(self):
        column = SparseColumn.from_bits([0, 0, 0, 0, 1, 1, 1, 1])
        self.assertEqual(set(drs_split(column, 2)),
                {SparseColumn(8, [6, 7]), SparseColumn(8, [4, 5])})
        column = SparseColumn.from_bits([1, 0, 1, 1, 1, 0, 1, 1])
        self.assertEqual(len(drs_split(column, 2)), 4)
        column = SparseColumn(8, [1, 5])
        self.assertEqual(drs_split(column, 2), [column])
        self.assertRaises(UsageError, drs_split, SparseColumn(6, [0, 1, 2]), 1)

    def test_reconstruction(self):
        for n in range(1, 8):
            originals = polar_columns(n)
            for n_lub in range(n + 1):
                simple_split_matrix(n, 1 << n_lub).check_reconstruction(originals, 1 << n_lub)
                drs_matrix(n, 1 << n_lub).check_reconstruction(originals, 1 << n_lub)
            simple_split_matrix(n, 3).check_reconstruction(originals, 3)
            drs_matrix(n, 3).check_reconstruction(originals, 3)

    def test_drs_matrix(self):
        self.assertTrue(np.array_equal(drs_matrix(1, 1).to_dense(), [[1, 0, 0], [0, 1, 1]]))
        self.assertEqual(drs_matrix(3, 4).n_cols, 9)
        self.assertEqual(drs_matrix(3, 2).n_cols, 14)
        self.assertTrue(np.array_equal(drs_matrix(4, 16).to_dense(), g2_power(4)))

    def test_drs_piece_weights(self):
        for column in drs_matrix(6, 4).columns:
            self.assertLessEqual(column.weight, 4)
        for column in polar_columns(6):
            if column.weight > 4:
                self.assertEqual({piece.weight for piece in drs_split(column, 4)}, {4})

    def test_gamma_census(self):
        self.assertEqual(simple_split_gamma_census(2, 2).gamma, fractions.Fraction(1, 4))
        self.assertEqual(simple_split_gamma_census(4, 4).gamma, fractions.Fraction(7, 16))
        self.assertEqual(simple_split_gamma_census(6, 64).gamma, 0)
        ledger = simple_split_gamma_census(10, 8)
        self.assertEqual(ledger.k_max, 128)
        self.assertEqual(ledger.extra_columns, simple_split_matrix(10, 8).n_cols - 1024)

    def test_gamma_tail(self):
        self.assertEqual(simple_split_gamma_tail(2, 2), fractions.Fraction(1, 4))
        self.assertEqual(simple_split_gamma_tail(4, 4), fractions.Fraction(7, 16))
        self.assertEqual(simple_split_gamma_tail(20, 2 ** 10),
                simple_split_gamma_census(20, 2 ** 10).gamma)
        for n in range(25):
            for w_ub in [1 << k for k in range(n + 1)] + [3, 5, 6, 7]:
                self.assertEqual(simple_split_gamma_tail(n, w_ub),
                        simple_split_gamma_census(n, w_ub).gamma)

    def test_a_terms(self):
        self.assertEqual(a_term_decomposition(4, 2),
                [fractions.Fraction(5, 16), fractions.Fraction(2, 16)])
        self.assertEqual(a_term_decomposition(5, 5), [])
        for n, n_lub in ((4, 2), (12, 3), (30, 15)):
            self.assertEqual(sum(a_term_decomposition(n, n_lub)),
                    simple_split_gamma_tail(n, 1 << n_lub))

    def test_a_term_decay(self):
        eps_star = threshold_constants().eps_star
        ns = np.arange(20, 61)

        def largest(eps_prime):
            return np.array([math.log2(max(a_term_decomposition(n,
                    lambda_to_n_lub(n, 0.5 + eps_prime)))) for n in ns])

        for margin in (0.02, 0.05, 0.1):
            values = largest(eps_star + margin)
            slope = np.polyfit(ns, values, 1)[0]
            self.assertLess(slope, -margin / 2)
            # Rounding n_lub up only lowers a term, so compare the best of each window.
            self.assertLess(values[-10:].max(), values[:10].max())

        values = largest(eps_star - 0.05)
        self.assertGreater(np.polyfit(ns, values, 1)[0], 0)

    def test_drs_gamma_closed(self):
        self.assertEqual(drs_gamma_closed(4, 2), fractions.Fraction(7, 16))
        self.assertEqual(drs_gamma_closed(3, 2), fractions.Fraction(1, 8))
        self.assertEqual(drs_gamma_closed(9, 9), 0)
        for n in range(11):
            columns = polar_columns(n)
            for n_lub in range(n + 1):
                extra = sum(len(drs_split(column, 1 << n_lub)) - 1 for column in columns)
                self.assertEqual(drs_gamma_closed(n, n_lub), fractions.Fraction(extra, 1 << n))
        for n in range(11, 15):
            signs = [signs_of(index, n) for index in range(1 << n)]
            for n_lub in range(n + 1):
                extra = sum(drs_piece_count_from_signs(s, 1 << n_lub) - 1 for s in signs)
                self.assertEqual(drs_gamma_closed(n, n_lub), fractions.Fraction(extra, 1 << n))

    def test_drs_gamma_threshold(self):
        def gamma(n, lam):
            return drs_gamma_closed(n, math.ceil(n * lam))
        self.assertLess(gamma(48, 0.7), gamma(16, 0.7))
        self.assertGreater(gamma(48, 0.5), gamma(16, 0.5))

    def test_piece_count(self):
        self.assertEqual(drs_piece_count(3, 0, 2), 2)
        self.assertEqual(drs_piece_count(2, 5, 2), 1)

        rng = random.Random(4)
        for _ in range(200):
            n = rng.randint(1, 10)
            n_lub = rng.randint(0, n)
            signs = [rng.choice("-+") for _ in range(n)]
            counts = set()
            for _ in range(5):
                rng.shuffle(signs)
                index = int("".join("1" if s == "+" else "0" for s in signs), 2)
                pieces = drs_split(polar_columns(n)[index], 1 << n_lub)
                counts.add(len(pieces))
                self.assertEqual(drs_piece_count_from_signs("".join(signs), 1 << n_lub),
                        len(pieces))
            self.assertEqual(counts, {drs_piece_count(signs.count("-"), signs.count("+"),
                    n_lub)})

    def test_markers(self):
        markers = split_markers(3, 2)
        self.assertTrue(markers.is_marked("---", 1))
        self.assertFalse(markers.is_marked("---", 2))
        self.assertFalse(markers.is_marked("---", 3))
        self.assertEqual(split_markers(5, 5).count(), 0)
        self.assertEqual(signs_of(6, 3), "++-")

        for n in range(1, 9):
            for n_lub in range(n + 1):
                markers = split_markers(n, n_lub)
                expected = sum(math.comb(n, i) * (i - n_lub) for i in range(n_lub + 1, n + 1))
                self.assertEqual(markers.count(), expected)
                self.assertEqual(len(list(markers.markers())), expected)

    def test_adrs_extra_uses(self):
        self.assertEqual(adrs_extra_uses(3, 1), 14)
        self.assertEqual(adrs_extra_uses(3, 2), 2)
        self.assertEqual(adrs_extra_uses(7, 7), 0)
        self.assertLess(adrs_gamma(20, 13), adrs_gamma(20, 12))
        for n in range(10, 41, 5):
            for lam in (0.65, 0.7, 0.8):
                n_lub = math.ceil(n * lam)
                self.assertLessEqual(float(adrs_gamma(n, n_lub)), adrs_rate_bound(n, n_lub))


class BuilderTest(unittest.TestCase):

    def test_plain_encoder(self):
        for n in range(1, 7):
            graph = build_graph(n)
            self.assertEqual(graph.n_slots, 1 << n)
            self.assertTrue(np.array_equal(graph.generator_matrix(), g2_power(n)))

        rng = np.random.default_rng(1)
        graph = build_graph(8)
        source = rng.integers(0, 2, size=(50, 256), dtype=np.uint8)
        expected = source.astype(np.int64) @ g2_power(8) % 2
        self.assertTrue(np.array_equal(graph.encode(source), expected))

    def test_drs_encoder(self):
        for n in range(1, 7):
            for n_lub in range(n + 1):
                graph = build_graph(n, SplitMarkerSet(n, n_lub))
                matrix = drs_matrix(n, 1 << n_lub).to_dense()
                self.assertEqual(graph.n_slots, matrix.shape[1])
                self.assertTrue(np.array_equal(graph.generator_matrix(), matrix))

    def test_single_split(self):
        graph = build_graph(1, SplitMarkerSet(1, 0))
        self.assertEqual(graph.n_slots, 3)
        self.assertTrue(np.array_equal(graph.generator_matrix(), [[1, 0, 0], [0, 1, 1]]))
        self.assertTrue(np.allclose(graph.density_evolution(0.3), [0.3, 0.09]))

    def test_adrs_slots(self):
        for n in range(1, 8):
            for n_lub in range(n + 1):
                graph = build_graph(n, SplitMarkerSet(n, n_lub), adrs=True)
                self.assertEqual(graph.n_slots, (1 << n) + adrs_extra_uses(n, n_lub))
        self.assertEqual(build_graph(3, SplitMarkerSet(3, 1), adrs=True).n_slots, 22)
        self.assertRaises(UsageError, build_graph, 3, None, True)

    def test_density_evolution(self):
        profile = build_graph(2).density_evolution(0.5)
        self.assertTrue(np.allclose(profile, [0.9375, 0.5625, 0.4375, 0.0625]))

    def test_drs_dominance(self):
        for n in range(1, 13):
            for eps in np.arange(0.1, 1.0, 0.1):
                plain = build_graph(n).density_evolution(eps)
                for n_lub in range(n):
                    drs = build_graph(n, SplitMarkerSet(n, n_lub)).density_evolution(eps)
                    self.assertTrue(np.all(drs <= plain + 1e-15))

    def test_adrs_preserves_bit_channels(self):
        for n in range(1, 9):
            for eps in (0.1, 0.37, 0.5, 0.9):
                plain = build_graph(n).density_evolution(eps)
                for n_lub in range(n):
                    graph = build_graph(n, SplitMarkerSet(n, n_lub), adrs=True)
                    self.assertTrue(np.allclose(graph.density_evolution(eps), plain,
                            rtol=0, atol=1e-12))

    def test_adrs_preserves_bms_bit_channels(self):
        channel = bsc(0.1)
        for n in (1, 2, 3):
            plain = [bhattacharyya(c) for c in build_graph(n).bit_channels(channel)]
            for n_lub in range(n):
                graph = build_graph(n, SplitMarkerSet(n, n_lub), adrs=True)
                values = [bhattacharyya(c) for c in graph.bit_channels(channel)]
                self.assertTrue(np.allclose(values, plain, rtol=0, atol=1e-9))

    def test_bit_channels_match_density_evolution(self):
        graph = build_graph(3, SplitMarkerSet(3, 1))
        values = [bhattacharyya(c) for c in graph.bit_channels(Bec(0.3))]
        self.assertTrue(np.allclose(values, graph.density_evolution(0.3)))

    def test_select_frozen(self):
        profile = build_graph(2).density_evolution(0.5)
        self.assertEqual(list(select_frozen(profile, 1)), [True, True, True, False])
        self.assertFalse(select_frozen(profile, 4).any())
        self.assertEqual(list(select_frozen([0.5, 0.5, 0.5, 0.5], 2)), [False, False, True, True])
        self.assertRaises(UsageError, select_frozen, profile, 5)

    def test_union_bound(self):
        self.assertAlmostEqual(union_bound_pe([2.0 ** -100], [False], 50), -50)
        self.assertEqual(union_bound_pe([0.5, 0.25], [True, True]), float("-inf"))

        profile = build_graph(10).density_evolution(0.5)
        frozen = select_frozen(profile, 307)
        self.assertAlmostEqual(union_bound_pe(profile, frozen),
                math.log2(profile[~frozen].sum()))

    def test_drs_union_bound(self):
        for n in range(2, 11):
            plain = build_graph(n).density_evolution(0.4)
            frozen = select_frozen(plain, (1 << n) // 3)
            for n_lub in range(n):
                drs = build_graph(n, SplitMarkerSet(n, n_lub)).density_evolution(0.4)
                self.assertLessEqual(union_bound_pe(drs, frozen),
                        union_bound_pe(plain, frozen) + 1e-12)

    def test_encode(self):
        spec, graph, _ = build_code(3, "drs", 2, Bec(0.3), 0.5)
        self.assertTrue(np.array_equal(encode(spec, graph, np.zeros(spec.k)),
                np.zeros(graph.n_slots)))

        matrix = drs_matrix(3, 2).to_dense()
        for position, index in enumerate(np.nonzero(~spec.frozen)[0]):
            message = np.zeros(spec.k, dtype=np.uint8)
            message[position] = 1
            self.assertTrue(np.array_equal(encode(spec, graph, message), matrix[index]))

        rng = np.random.default_rng(2)
        a, b = rng.integers(0, 2, size=(2, spec.k), dtype=np.uint8)
        self.assertTrue(np.array_equal(encode(spec, graph, a) ^ encode(spec, graph, b),
                encode(spec, graph, a ^ b)))
        self.assertRaises(DimensionError, encode, spec, graph, np.zeros(spec.k + 1))

    def test_encode_all_modes(self):
        rng = np.random.default_rng(12)
        trials = 1000
        for n in (4, 7, 10):
            w_ub = 1 << (n // 2)
            plain_matrix = g2_power(n).astype(np.float32)
            for mode in ("plain", "simple-split", "drs", "adrs"):
                spec, graph, _ = build_code(n, mode, (1 << n) if mode == "plain" else w_ub,
                        Bec(0.4), 0.5)
                message = rng.integers(0, 2, size=(trials, spec.k), dtype=np.uint8)
                source = np.zeros((trials, spec.length), dtype=np.uint8)
                source[:, ~spec.frozen] = message
                plain = source.astype(np.float32) @ plain_matrix % 2

                if mode == "adrs":
                    noise = rng.integers(0, 2, size=(2, trials, graph.n_noise), dtype=np.uint8)
                    other = rng.integers(0, 2, size=(trials, spec.k), dtype=np.uint8)
                    self.assertTrue(np.array_equal(
                            encode(spec, graph, message, noise[0]) ^
                            encode(spec, graph, other, noise[1]),
                            encode(spec, graph, message ^ other, noise[0] ^ noise[1])))
                    zero = np.zeros((trials, graph.n_noise), dtype=np.uint8)
                    expected = source.astype(np.float32) @ \
                            graph.generator_matrix().astype(np.float32) % 2
                    self.assertTrue(np.array_equal(encode(spec, graph, message, zero),
                            expected))
                    continue

                codeword = encode(spec, graph, message)
                if mode == "plain":
                    self.assertTrue(np.array_equal(codeword, plain))
                    continue

                matrix = simple_split_matrix(n, w_ub) if mode == "simple-split" else \
                        drs_matrix(n, w_ub)
                self.assertEqual(codeword.shape, (trials, matrix.n_cols))
                expected = source.astype(np.float32) @ matrix.to_dense().astype(np.float32) % 2
                self.assertTrue(np.array_equal(codeword, expected))

                # The pieces of a column add up to the unsplit column.
                folded = np.zeros((spec.length, trials), dtype=np.uint8)
                np.bitwise_xor.at(folded, np.array(matrix.provenance), codeword.T)
                self.assertTrue(np.array_equal(folded.T, plain))

    def test_matrix_encoder(self):
        spec, graph, _ = build_code(5, "simple-split", 4, Bec(0.3), 0.5)
        self.assertIsNone(graph)
        self.assertRaises(CapabilityError, spec.graph)
        encoder = spec.encoder()
        self.assertIsInstance(encoder, MatrixEncoder)
        self.assertEqual(encoder.n_slots, spec.n_slots())
        self.assertTrue(np.array_equal(encoder.generator_matrix(),
                simple_split_matrix(5, 4).to_dense()))

        message = np.ones(spec.k, dtype=np.uint8)
        self.assertTrue(np.array_equal(encode(spec, None, message),
                encode(spec, encoder, message)))
        self.assertRaises(DimensionError, encode, spec, encoder, message,
                np.ones(3, dtype=np.uint8))
        self.assertRaises(DimensionError, MatrixEncoder, 4, simple_split_matrix(5, 4))
        self.assertIsInstance(CodeSpec(5, 4, "drs", spec.frozen).encoder(), type(build_graph(1)))

    def test_build_code(self):
        spec, _, profile = build_code(6, "plain", 64, "bec:0.3", 0.5)
        self.assertEqual(spec.k, 32)
        self.assertEqual(spec.rate, fractions.Fraction(1, 2))
        self.assertTrue(np.all(profile[~spec.frozen] <= profile[spec.frozen].min()))

        copy = CodeSpec.from_dict(spec.to_dict())
        self.assertTrue(np.array_equal(copy.frozen, spec.frozen))
        self.assertEqual((copy.n, copy.w_ub, copy.mode), (6, 64, "plain"))

        spec, graph, _ = build_code(3, "simple-split", 2, Bec(0.3), 0.5)
        self.assertIsNone(graph)
        self.assertEqual(spec.n_slots(), 14)
        self.assertRaises(CapabilityError, spec.graph)

        spec, graph, _ = build_code(3, "adrs", 2, Bec(0.3), 0.5)
        self.assertEqual(spec.n_slots(), 22)
        self.assertRaises(UsageError, build_code, 3, "frob", 2, Bec(0.3), 0.5)

    def test_construction_sizes(self):
        sizes = construction_sizes(get_builtin_kernel("G2"), 10, 0.0)
        self.assertAlmostEqual(float(sizes.n_prime_log2), 32)
        self.assertAlmostEqual(float(sizes.block_length_log2), 42)
        self.assertAlmostEqual(float(sizes.error_bound_log2(-100)), -68)


class DecoderTest(unittest.TestCase):

    def _exhaustive(self, graph, eps, decoder):
        profile = graph.density_evolution(eps)
        for index in range(graph.length):
            frozen = np.ones(graph.length, dtype=bool)
            frozen[index] = False
            probability = 0.0
            for pattern in itertools.product([0, 1], repeat=graph.n_slots):
                received = np.where(np.array(pattern) == 1, ERASED, 0).astype(np.int8)
                if decoder(received, frozen).failed:
                    erased = sum(pattern)
                    probability += eps ** erased * (1 - eps) ** (graph.n_slots - erased)
            self.assertAlmostEqual(probability, profile[index], places=12)

    def test_polar_exhaustive(self):
        self._exhaustive(build_graph(2), 0.3, sc_polar_bec)

    def test_drs_exhaustive(self):
        for n, n_lub in ((1, 0), (2, 0), (2, 1), (3, 2)):
            graph = build_graph(n, SplitMarkerSet(n, n_lub))
            self._exhaustive(graph, 0.4,
                    lambda received, frozen, graph=graph: sc_drs_bec(received, frozen, graph))

    def test_polar_noiseless(self):
        rng = np.random.default_rng(5)
        graph = build_graph(6)
        frozen = select_frozen(graph.density_evolution(0.5), 20)
        source = rng.integers(0, 2, size=(100, 64), dtype=np.uint8)
        source[:, frozen] = 0
        result = sc_polar_bec(graph.encode(source).astype(np.int8), frozen)
        self.assertFalse(result.failed.any())
        self.assertTrue(np.array_equal(result.estimates, source))

        erased = np.full(64, ERASED, dtype=np.int8)
        self.assertTrue(sc_polar_bec(erased, frozen).failed)

    def test_drs_noiseless(self):
        rng = np.random.default_rng(6)
        for n in range(1, 11):
            for n_lub in range(n):
                graph = build_graph(n, SplitMarkerSet(n, n_lub))
                frozen = select_frozen(graph.density_evolution(0.5), (1 << n) // 2)
                source = rng.integers(0, 2, size=(20, 1 << n), dtype=np.uint8)
                source[:, frozen] = 0
                result = sc_drs_bec(graph.encode(source).astype(np.int8), frozen, graph)
                self.assertFalse(result.failed.any())
                self.assertTrue(np.array_equal(result.estimates, source))

    def test_noiseless_round_trips(self):
        rng = np.random.default_rng(15)
        for n, n_lub in ((4, 2), (7, 3), (7, 6), (10, 5), (10, 8)):
            for graph in (build_graph(n), build_graph(n, SplitMarkerSet(n, n_lub))):
                frozen = select_frozen(graph.density_evolution(0.5), (1 << n) // 2)
                for _ in range(4):
                    source = rng.integers(0, 2, size=(2500, 1 << n), dtype=np.uint8)
                    source[:, frozen] = 0
                    result = sc_drs_bec(graph.encode(source).astype(np.int8), frozen, graph)
                    self.assertFalse(result.failed.any())
                    self.assertTrue(np.array_equal(result.estimates, source))

    def _erasure_lattice(self, graph, decoder, patterns, rng):
        frozen = select_frozen(graph.density_evolution(0.5), graph.length // 2)
        source = rng.integers(0, 2, size=graph.length, dtype=np.uint8)
        source[frozen] = 0
        codeword = graph.encode(source).astype(np.int8)

        def decode(erased):
            received = np.where(erased, ERASED, codeword[None, :]).astype(np.int8)
            return decoder(received, frozen)

        base = decode(patterns)
        known = ~base.failed
        self.assertTrue(np.all(base.estimates[known] == source))
        for slot in range(graph.n_slots):
            more = patterns.copy()
            more[:, slot] = True
            result = decode(more)
            # An extra erasure may cost a decision but never flips one.
            self.assertFalse(np.any(base.failed & ~result.failed))
            self.assertTrue(np.all(result.estimates[~result.failed] == source))

    def test_erasure_monotonicity(self):
        rng = np.random.default_rng(16)
        graphs = [build_graph(2), build_graph(3), build_graph(2, SplitMarkerSet(2, 0)),
                build_graph(3, SplitMarkerSet(3, 2)), build_graph(3, SplitMarkerSet(3, 1))]
        for graph in graphs:
            patterns = np.array(list(itertools.product([False, True], repeat=graph.n_slots)))
            self._erasure_lattice(graph, lambda received, frozen, graph=graph:
                    sc_drs_bec(received, frozen, graph), patterns, rng)
        graph = build_graph(3)
        patterns = np.array(list(itertools.product([False, True], repeat=8)))
        self._erasure_lattice(graph, sc_polar_bec, patterns, rng)

        for n, n_lub in ((6, 3), (8, 5)):
            graph = build_graph(n, SplitMarkerSet(n, n_lub))
            patterns = rng.random((2000, graph.n_slots)) < 0.4
            self._erasure_lattice(graph, lambda received, frozen, graph=graph:
                    sc_drs_bec(received, frozen, graph), patterns, rng)

    def test_single_split_column(self):
        graph = build_graph(3, SplitMarkerSet(3, 2))
        self.assertEqual(graph.n_slots, 9)
        self.assertEqual(drs_matrix(3, 4).n_cols, 9)
        plain = build_graph(3)
        for eps in (0.3, 0.5):
            profile = graph.density_evolution(eps)
            self._exhaustive(graph, eps,
                    lambda received, frozen: sc_drs_bec(received, frozen, graph))
            values = [bhattacharyya(channel) for channel in graph.bit_channels(Bec(eps))]
            self.assertTrue(np.allclose(values, profile, rtol=0, atol=1e-12))
            self.assertTrue(np.all(profile <= plain.density_evolution(eps) + 1e-15))

    def test_single_split_decoder(self):
        graph = build_graph(1, SplitMarkerSet(1, 0))
        frozen = np.array([True, False])
        result = sc_drs_bec(np.array([ERASED, ERASED, 1], dtype=np.int8), frozen, graph)
        self.assertFalse(result.failed)
        self.assertEqual(list(result.estimates), [0, 1])
        result = sc_drs_bec(np.full(3, ERASED, dtype=np.int8), frozen, graph)
        self.assertTrue(result.failed)
        self.assertRaises(DimensionError, sc_drs_bec, np.zeros(2, dtype=np.int8), frozen, graph)

    def test_adrs_noiseless(self):
        rng = np.random.default_rng(7)
        for channel in (Bec(0.0), bsc(0.0)):
            graph = build_graph(5, SplitMarkerSet(5, 2), adrs=True)
            frozen = select_frozen(graph.density_evolution(0.5), 12)
            source = rng.integers(0, 2, size=(10000, 32), dtype=np.uint8)
            source[:, frozen] = 0
            received = channel.transmit(graph.encode(source, rng=rng), rng)
            result = sc_adrs(received, frozen, graph, channel)
            self.assertFalse(result.failed.any())
            self.assertTrue(np.array_equal(result.estimates, source))
        self.assertRaises(UsageError, sc_adrs, np.zeros(32), frozen, build_graph(5), bsc(0.0))

    def test_drs_monte_carlo(self):
        trials = 20000
        spec, graph, profile = build_code(6, "drs", 4, Bec(0.3), 0.3)
        tally = monte_carlo(spec, Bec(0.3), trials, seed=1, batch_size=2000, graph=graph)
        rate = tally.failures / trials
        bound = 2 ** union_bound_pe(profile, spec.frozen)
        self.assertLessEqual(rate, bound + 3 * sigma(bound, trials))

    def test_drs_against_plain(self):
        trials = 20000
        rates = {}
        for mode, w_ub in (("plain", 1024), ("drs", 64)):
            spec, graph, profile = build_code(10, mode, w_ub, Bec(0.5), 0.3)
            tally = monte_carlo(spec, Bec(0.5), trials, seed=11, graph=graph)
            rates[mode] = tally.failures / trials
            bound = min(1.0, 2 ** union_bound_pe(profile, spec.frozen))
            self.assertLessEqual(rates[mode], bound + 3 * sigma(bound, trials))
        spread = math.hypot(sigma(rates["drs"], trials), sigma(rates["plain"], trials))
        self.assertLessEqual(rates["drs"], rates["plain"] + 3 * spread)

    def test_adrs_single_bit(self):
        trials = 20000
        plain = build_graph(3).density_evolution(0.4)
        for index in (3, 5, 6):
            frozen = np.ones(8, dtype=bool)
            frozen[index] = False
            spec = CodeSpec(3, 2, "adrs", frozen)
            tally = monte_carlo(spec, Bec(0.4), trials, seed=index, batch_size=5000)
            rate = tally.failures / trials
            self.assertLessEqual(abs(rate - plain[index]), 4 * sigma(plain[index], trials))

    def test_adrs_block_error(self):
        trials = 20000
        for channel, n_lub in ((Bec(0.4), 3), (bsc(0.05), 5)):
            plain, _, profile = build_code(6, "plain", 64, channel, 0.3)
            adrs = CodeSpec(6, 1 << n_lub, "adrs", plain.frozen)
            bound = min(1.0, profile[~plain.frozen].sum())
            for spec in (plain, adrs):
                rate = monte_carlo(spec, channel, trials, seed=3).failures / trials
                self.assertLessEqual(rate, bound + 4 * sigma(bound, trials))
                if isinstance(channel, Bec):
                    worst = profile[~plain.frozen].max()
                    self.assertGreaterEqual(rate, worst - 4 * sigma(worst, trials))

    def test_llr_matches_erasure_decoder(self):
        rng = np.random.default_rng(8)
        graph = build_graph(7, SplitMarkerSet(7, 3))
        frozen = select_frozen(graph.density_evolution(0.4), 40)
        received = Bec(0.4).transmit(np.zeros((200, graph.n_slots), dtype=np.uint8), rng)
        erasure = sc_drs_bec(received, frozen, graph)
        llr = sc_llr(received, frozen, graph, Bec(0.4))
        self.assertTrue(np.array_equal(erasure.failed, llr.failed))

    def test_operation_count(self):
        lengths, operations = [], []
        for n in range(6, 15):
            length = 1 << n
            result = sc_polar_bec(np.zeros(length, dtype=np.int8), np.zeros(length, dtype=bool))
            lengths.append(length * n)
            operations.append(result.operations)
        slope = np.polyfit(np.log(lengths), np.log(operations), 1)[0]
        self.assertGreaterEqual(slope, 0.95)
        self.assertLessEqual(slope, 1.10)

    def test_adrs_operation_count(self):
        for n in range(4, 12):
            n_lub = lambda_to_n_lub(n, 0.7)
            length = 1 << n
            frozen = np.zeros(length, dtype=bool)
            plain = sc_polar_bec(np.zeros(length, dtype=np.int8), frozen).operations
            graph = build_graph(n, SplitMarkerSet(n, n_lub), adrs=True)
            result = sc_adrs(np.zeros(graph.n_slots, dtype=np.int8), frozen, graph, Bec(0.0))
            self.assertFalse(result.failed)
            # Replica blocks cost less than two operations per extra channel use.
            extra = adrs_extra_uses(n, n_lub)
            self.assertGreaterEqual(result.operations, plain)
            self.assertLessEqual(result.operations,
                    plain + 2 * extra + SplitMarkerSet(n, n_lub).count())
            if extra:
                self.assertGreater(result.operations, plain)

    def test_chunked_decode(self):
        graph = build_graph(4)
        frozen = select_frozen(graph.density_evolution(0.3), 6)
        chunks = [np.zeros(16, dtype=np.int8) for _ in range(4)]

        def decoder(chunk):
            return sc_polar_bec(chunk, frozen)

        single = chunked_decode(decoder, chunks[:1])
        self.assertEqual(len(single), 1)
        self.assertFalse(single.failed)

        chunks[2] = np.full(16, ERASED, dtype=np.int8)
        self.assertTrue(chunked_decode(decoder, chunks).failed)
        self.assertRaises(DimensionError, chunked_decode, decoder,
                [np.zeros(16), np.zeros(8)])

    def test_parallel_chunked_decode(self):
        rng = np.random.default_rng(9)
        graph = build_graph(6)
        frozen = select_frozen(graph.density_evolution(0.3), 30)
        chunks = list(Bec(0.3).transmit(np.zeros((16, 64), dtype=np.uint8), rng))

        def decoder(chunk):
            return sc_polar_bec(chunk, frozen)

        context = Context()
        context.args = Namespace(threads=4)
        with Parallel(context) as parallel:
            parallel_results = chunked_decode(decoder, chunks, parallel)
        serial_results = chunked_decode(decoder, chunks)
        for a, b in zip(parallel_results, serial_results):
            self.assertTrue(np.array_equal(a.estimates, b.estimates))
            self.assertEqual(a.failed, b.failed)

    def test_wilson_interval(self):
        self.assertEqual(wilson_interval(0, 0), (0.0, 1.0))
        low, high = wilson_interval(5, 100)
        self.assertAlmostEqual(low, 0.0215, places=3)
        self.assertAlmostEqual(high, 0.1118, places=3)
        for trials in (1, 7, 1000, 100000):
            low, high = wilson_interval(0, trials)
            self.assertEqual(low, 0.0)
            self.assertGreater(high, 0.0)
            low, high = wilson_interval(trials, trials)
            self.assertEqual(high, 1.0)
            self.assertLess(low, 1.0)
        self.assertLess(wilson_interval(0, 1000)[1], 0.005)
        self.assertEqual(format_real(wilson_interval(0, 1000)[0]), "0")


class SimulationTest(unittest.TestCase):

    def test_threads(self):
        spec, _, _ = build_code(5, "drs", 4, Bec(0.4), 0.4)
        results = []
        for threads in (1, 2):
            simulation = Simulation(spec, "bec:0.4", seed=7, threads=threads, batch_size=500)
            try:
                results.append(simulation.run(3000))
            finally:
                simulation.close()
        self.assertEqual(results[0].failures, results[1].failures)
        self.assertEqual(results[0].trials, 3000)
        self.assertLessEqual(results[0].wilson_lo, results[0].rate_estimate)
        self.assertLessEqual(results[0].rate_estimate, results[0].wilson_hi)

    def test_same_seed_same_csv(self):
        env = os.environ.copy()
        env.pop("SPARSEGEN_OPTIONS", None)
        env.pop("SPARSEGEN_THREADS", None)
        workdir = os.path.join(tests_directory, "test-02", "workdir")
        outputs = []
        for threads in (1, 2, 2):
            outputs.append(subprocess.check_output([os.path.join(tests_directory, "sparsegen"),
                    "simulate", "--code", "plain.json", "--channel", "bec:0.5",
                    "--trials", "4000", "--batch-size", "300", "--seed", "21",
                    "--threads", str(threads)], cwd=workdir, env=env,
                    stderr=subprocess.DEVNULL))
        self.assertIn(b"seed=21", outputs[0])
        self.assertEqual(outputs[0], outputs[1])
        self.assertEqual(outputs[1], outputs[2])

    def test_chunks(self):
        spec, _, _ = build_code(4, "plain", 16, Bec(0.2), 0.25)
        repeated = CodeSpec(4, 16, "plain", spec.frozen, n_prime=4)
        single = monte_carlo(spec, Bec(0.2), 5000, seed=1)
        chunks = monte_carlo(repeated, Bec(0.2), 5000, seed=1)
        self.assertGreaterEqual(chunks.failures, single.failures)
        self.assertAlmostEqual(float(repeated.n_prime_log2), 2)


class AsymptoticsTest(unittest.TestCase):

    def test_thresholds(self):
        constants = threshold_constants()
        self.assertAlmostEqual(constants.eps_star, LOG2_3 - 1.5, places=12)
        self.assertAlmostEqual(constants.lambda_star, LOG2_3 - 1, places=12)
        self.assertAlmostEqual(constants.lambda_dagger, 1 / LOG2_3, places=12)
        self.assertLess(constants.lambda_star, constants.lambda_dagger)

    def test_maximizers(self):
        alpha, value = maximize_lambda_xy(0.0)
        self.assertAlmostEqual(alpha, 1 / 6, delta=1e-9)
        self.assertAlmostEqual(value, binary_entropy(2 / 3) - 5 / 6, places=12)

        alpha, _ = maximize_lambda_xy(0.05)
        self.assertAlmostEqual(alpha, 1 / 6 - 0.05, delta=1e-9)

        alpha, value = maximize_f_alpha(0.5)
        self.assertAlmostEqual(alpha, 2 / 3, delta=1e-9)
        self.assertAlmostEqual(value, binary_entropy(2 / 3) + 2 / 3 - 1.5, places=12)

        alpha, value = maximize_lambda_xy(0.2)
        self.assertEqual(alpha, 0.0)
        self.assertLess(value, 0)
        self.assertRaises(UsageError, lambda_xy, 0.3, 0.3)

    def test_concavity(self):
        alphas = np.linspace(0, 0.4, 401)
        values = np.array([lambda_xy(0.05, a) for a in alphas])
        self.assertTrue(np.all(np.diff(values, 2) < 1e-12))

    def test_binary_entropy(self):
        self.assertEqual(binary_entropy(0.0), 0.0)
        self.assertAlmostEqual(binary_entropy(0.5), 1.0)
        self.assertAlmostEqual(inverse_binary_entropy(binary_entropy(0.11)), 0.11, delta=1e-9)
        self.assertRaises(UsageError, binary_entropy, 1.5)

    def test_rle_exponents(self):
        profile = rle_exponents(0.25)
        self.assertAlmostEqual(profile.exp_gap, 0.5)
        self.assertAlmostEqual(profile.exp_comp, 2)
        self.assertAlmostEqual(profile.exp_wcol, 2)
        self.assertRaises(UsageError, rle_exponents, 0.5)

    def test_polar_exponents(self):
        profile = polar_exponents(1e-8, 3.579)
        self.assertAlmostEqual(profile.exp_wcol, 1.17, delta=1e-3)
        self.assertEqual(profile.exp_comp, 1.0)
        self.assertRaises(UsageError, polar_exponents, 0.25, 3.579)
        self.assertRaises(UsageError, polar_exponents, 0.1, 5.0)

        gaps = [polar_exponents(lam, 4.0).exp_gap for lam in (0.01, 0.05, 0.1, 0.15)]
        self.assertEqual(gaps, sorted(gaps))

    def test_exponent_pairs(self):
        for pair in exponent_pairs([0.02, 0.08, 0.15], 3.579):
            self.assertAlmostEqual(rle_exponents(pair.alpha).exp_gap, pair.exp_gap)
            self.assertAlmostEqual(pair.rle_comp, 1 + 2 * pair.exp_gap)

    def test_gallager_e0(self):
        rho = 0.5
        self.assertAlmostEqual(float(gallager_e0(Bec(0.3), rho)),
                -math.log(0.3 + 0.7 * 2 ** -rho))
        p = 0.1
        expected = rho * math.log(2) - (1 + rho) * math.log(p ** (1 / (1 + rho)) +
                (1 - p) ** (1 / (1 + rho)))
        self.assertAlmostEqual(float(gallager_e0(bsc(p), rho)), expected)

    def test_random_coding_exponent(self):
        result = random_coding_exponent(bsc(0.0), 0.0)
        self.assertAlmostEqual(result.value, math.log(2), places=9)

        channel = bsc(0.1)
        rhos = np.linspace(0, 1, 200001)
        expected = np.max(gallager_e0(channel, rhos) - rhos * 0.2)
        self.assertAlmostEqual(random_coding_exponent(channel, 0.2).value, expected, places=6)

        result = random_coding_exponent(channel, 0.4)
        self.assertTrue(result.at_capacity)
        self.assertEqual(result.value, 0.0)

    def test_split_inequality(self):
        report = min_split_inequality_check(4096, seed=1)
        self.assertEqual(report.points, 64 + 4096)
        self.assertEqual(report.violations, 0)
        self.assertLessEqual(report.max_violation, 1e-12)


class LoggerTest(unittest.TestCase):

    def setUp(self):
        self.stream = io.StringIO()
        self.logger = Logger(stream=self.stream)

    def test_tagged_warning(self):
        self.logger.warning("w_ub=6 is not a power of two", tag="w_ub")
        self.logger.warning("w_ub=6 is not a power of two", tag="w_ub")
        self.logger.warning("untagged")
        self.logger.warning("untagged")
        self.assertEqual(self.stream.getvalue(), "WARNING: w_ub=6 is not a power of two\n"
                "WARNING: untagged\nWARNING: untagged\n")

    def test_debug_categories(self):
        self.logger.debug("split", "hidden")
        self.logger.set_debug(["split"])
        self.logger.debug("decode", "hidden")
        self.logger.debug("split", "shown")
        self.logger.set_debug(["all"])
        self.logger.debug_worker(3, "started")
        self.logger.set_debug(["none"])
        self.logger.debug("mp", "hidden")

        lines = self.stream.getvalue().splitlines()
        self.assertEqual(len(lines), 2)
        self.assertTrue(lines[0].startswith("DEBUG:split:"))
        self.assertTrue(lines[0].endswith("s: shown"))
        self.assertTrue(lines[1].endswith("s: worker #03 started"))

    def test_error(self):
        self.logger.error("no exit", None)
        with self.assertRaises(SystemExit) as cm:
            self.logger.error("bad input", 2)
        self.assertEqual(cm.exception.code, 2)
        with self.assertRaises(SystemExit):
            self.logger.exception("worker failed", "Traceback ...\n", 4)
        self.assertEqual(self.stream.getvalue(), "ERROR: no exit\nERROR: bad input\n"
                "INTERNAL: worker failed:\nTraceback ...\n")


class InterfaceTest(unittest.TestCase):

    def test_type_range(self):
        self.assertEqual(type_range("10"), [10])
        self.assertEqual(type_range("4:12:2,16"), [4, 6, 8, 10, 12, 16])
        self.assertEqual(type_range("0.1:0.3:0.1"), [0.1, 0.2, 0.3])
        self.assertRaises(ValueError, type_range, "5:3")
        self.assertRaises(ValueError, type_range, "1:5:0")

    def test_parse_arguments(self):
        args, error, warnings = parse_arguments(["gamma", "--algo", "adrs", "--n", "4:6",
                "--lambda", "0.7"])
        self.assertIsNone(error)
        self.assertEqual(warnings, [])
        self.assertEqual(args.n, [4, 5, 6])
        self.assertEqual(args.lambdas, [0.7])

        _, error, _ = parse_arguments(["gamma", "--n", "4"])
        self.assertEqual(error, "'gamma' requires exactly one of --lambda and --wub")

        args, error, _ = parse_arguments(["build", "--n", "3", "--eps", "0.3", "--rate", "0.5",
                "--out", "code.json"])
        self.assertIsNone(error)
        self.assertEqual(args.wub, 8)
        self.assertEqual(args.channel, Bec(0.3))

        _, _, warnings = parse_arguments(["build", "--n", "3", "--wub", "6", "--eps", "0.3",
                "--rate", "0.5", "--out", "code.json"])
        self.assertTrue(any("not a power of two" in warning for warning in warnings))

        args, _, _ = parse_arguments(["channel", "z", "--channel", "bsc:0.1", "--path=-+-"])
        self.assertEqual(args.path, "-+-")

        self.assertRaises(UsageError, parse_arguments, ["frobnicate"])

    def _usage_message(self, argv):
        with self.assertRaises(UsageError) as cm:
            parse_arguments(argv)
        return cm.exception.message

    def test_parser_errors(self):
        self.assertEqual(self._usage_message(["thresholds", "--foo"]),
                "unknown option '--foo', see 'sparsegen thresholds --help'")
        self.assertEqual(self._usage_message(["gamma", "--n"]), "--n requires a value")
        self.assertEqual(self._usage_message(["gamma", "--json=yes"]),
                "option --json does not take a value")
        self.assertTrue(self._usage_message(["build", "--n", "-3"]).startswith("--n: "))
        self.assertTrue(self._usage_message(["tables", "--which", "table9"]).startswith(
                "--which: invalid choice 'table9'"))

        self.assertTrue(self._usage_message(["thresholds", "--seed", "-5"]).startswith("--seed: "))

        text = create_parser("gamma").format_help()
        self.assertTrue(text.startswith("usage: sparsegen gamma [<options>]"))
        self.assertIn("Global options:", text)
        self.assertIn("--algo <algo>", text)

    def test_csv_round_trip(self):
        context = Context()
        context.args = Namespace(command="gamma", algo="drs", n=[4], seed=0, threads=2,
                csv=None, json=False)
        stream = io.StringIO()
        console = CsvConsole(context, ["n", "gamma", "rate_bound"], stream)
        console.process({"n": 4, "gamma": fractions.Fraction(7, 16), "rate_bound": None})
        console.close()

        stream.seek(0)
        metadata, rows = read_csv(stream)
        self.assertEqual(metadata, {"version": "103", "command": "gamma", "algo": "drs",
                "n": "4", "seed": "0"})
        self.assertEqual(rows, [{"n": 4, "gamma": 0.4375, "rate_bound": None}])

        console = CsvConsole(context, ["n", "gamma"], io.StringIO())
        self.assertRaises(KeyError, console.process, {"n": 4})


def register_shell_tests():
    for path in sorted(glob.glob(os.path.join(tests_directory, "test-??/tests"))):
        test = os.path.basename(os.path.dirname(path))

        test_number = 1
        with open(path) as lines:
            workdir = os.path.join(os.path.dirname(path), "workdir")

            lines = list(lines)

            # Parse a test file. The command is on the first line, the required output follows.
            # Tests are separated by one or more empty lines. Directive lines start with a # and
            # stay valid for all tests that follow.
            keep_order = False
            while lines:
                while lines:
                    line = lines[0].strip()
                    if not line or line.startswith("#"):
                        line = line.strip("# ")
                        if line == "keep_order":
                            keep_order = True
                        elif line == "no_order":
                            keep_order = False
                        lines.pop(0)
                    else:
                        break
                else:
                    break

                command = lines.pop(0).strip()
                output = []
                while lines:
                    line = lines.pop(0)
                    if not line.strip():
                        break
                    output.append(line)

                ShellTest.add_test(test, test_number, workdir, command, "".join(output), keep_order)
                test_number += 1


register_shell_tests()


if __name__ == "__main__":
    unittest.main()
