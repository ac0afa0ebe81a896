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

from libsparsegen.__version__ import __version__
from libsparsegen.exceptions import BaseError, UsageError, DimensionError, CapabilityError, \
    InvariantError
from libsparsegen.kernel import Kernel, WeightCensus, SparsityReport, partial_distances, \
    rate_of_polarization, is_polarizing, kron_power_census, sparsity_orders, \
    kernel_split_gamma, split_column_weights, heavy_column_fraction, make_weight2_kernel, \
    make_arrow_kernel, builtin_kernels, get_builtin_kernel, read_kernel, write_kernel
from libsparsegen.channel import Bec, Bms, bsc, bec_as_bms, bhattacharyya, capacity, \
    bec_transform, bms_transform, bms_looks, bms_merge, read_channel, write_channel, \
    parse_channel
from libsparsegen.split import SparseColumn, SparseGenerator, RateLossLedger, SplitMarkerSet, \
    polar_columns, simple_split_column, simple_split_matrix, simple_split_gamma_census, \
    simple_split_gamma_tail, a_term_decomposition, drs_split, drs_matrix, drs_gamma_closed, \
    drs_piece_count, split_markers, adrs_extra_uses, adrs_gamma, adrs_rate_bound, \
    read_generator, write_generator
from libsparsegen.builder import CodeSpec, MatrixEncoder, build_graph, build_code, \
    bec_density_evolution, select_frozen, union_bound_pe, encode, construction_sizes, read_code, \
    write_code
from libsparsegen.decoder import sc_polar_bec, sc_drs_bec, sc_llr, sc_adrs, chunked_decode, \
    monte_carlo, wilson_interval
from libsparsegen.asymptotics import ThresholdConstants, ExponentProfile, lambda_xy, \
    f_alpha_lambda, maximize_lambda_xy, maximize_f_alpha, threshold_constants, \
    rle_exponents, polar_exponents, exponent_pairs, random_coding_exponent, \
    min_split_inequality_check, binary_entropy, inverse_binary_entropy, rle_n_prime_log2, \
    polar_n_prime_log2
from libsparsegen.console import read_csv
from libsparsegen.simulation import Simulation, SimulationResult
