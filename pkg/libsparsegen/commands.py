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

import fractions

from . import BaseClass
from .split import polar_columns, simple_split_matrix, drs_matrix, write_generator, \
    simple_split_gamma_tail, drs_gamma_closed, adrs_gamma, adrs_rate_bound, n_lub_of, \
    lambda_to_n_lub
from .kernel import Kernel, read_kernel, get_builtin_kernel, partial_distances, \
    kron_power_census, kernel_split_gamma, split_column_weights, sparsity_orders
from .channel import Bec, read_channel, bec_transform, bms_transform, bms_merge, \
    bhattacharyya, capacity
from .builder import build_code, write_code, read_code, design_profile, union_bound_pe
from .console import create_console
from .convert import read_fields
from .decoder import wilson_interval
from .processing import TrialPool
from .asymptotics import LOG2_3, threshold_constants, rle_exponents, polar_exponents, \
    exponent_pairs, random_coding_exponent, rle_n_prime_log2, polar_n_prime_log2, \
    min_split_inequality_check
from .exceptions import UsageError, CapabilityError, InvariantError

# Exact binomial sums stay fast up to here.
MAX_GAMMA_N = 60

TABLES = {
    "table2": ["G2", "G3*", "G4*"],
    "table3": ["G3'", "G4'"],
}


def join_values(values):
    return ";".join(str(value) for value in values)


class Command(BaseClass):
    """Base class of the subcommands. A command produces rows for a fixed set of columns, the
       console decides how they are written.
    """

    columns = ()

    def prepare(self):
        """Load and check the inputs. Runs before the console writes the run header, so a
           command that fails here prints nothing but the error.
        """

    def rows(self):
        raise NotImplementedError

    def run(self):
        self.prepare()
        console = create_console(self.context, self.columns)
        self.context.console = console
        try:
            for row in self.rows():
                console.process(row)
        finally:
            console.close()


class KernelCommand(Command):
    # pylint:disable=abstract-method

    def load_kernel(self):
        if self.args.name is not None:
            return get_builtin_kernel(self.args.name)
        return read_kernel(self.args.file)


class KernelAnalyzeCommand(KernelCommand):
    """Rate of polarization, partial distances and limiting sparsity orders of one kernel.
    """

    columns = ("kernel", "size", "partial_distances", "e_of_g", "w_gm", "w_max",
            "lambda_gm_limit", "lambda_max_limit", "delta", "delta_prime")

    def load_kernel(self):
        if self.args.samples is None:
            return super().load_kernel()

        # Read the matrix without the exhaustive span enumeration of Kernel().
        if self.args.name is not None:
            kernel = get_builtin_kernel(self.args.name)
            matrix, name = kernel.matrix, kernel.name
        else:
            matrix, name = self.read_matrix(self.args.file), self.args.file
        distances = partial_distances(matrix, self.args.samples, self.args.seed)
        if __debug__:
            self.logger.debug("info", f"sampled partial distances of {name}: {distances}")
        return Kernel(matrix, name=name, distances=distances)

    @staticmethod
    def read_matrix(path):
        lines = read_fields(path)
        try:
            return [[int(bit) for bit in line] for line in lines[1:]]
        except ValueError as exc:
            raise UsageError(f"{path}: invalid kernel file: {exc}") from exc

    def prepare(self):
        self.kernel = self.load_kernel()

    def rows(self):
        kernel = self.kernel
        report = sparsity_orders(kernel, self.args.delta)
        yield {
            "kernel": kernel.name,
            "size": kernel.size,
            "partial_distances": join_values(kernel.partial_distances),
            "e_of_g": report.e_of_g,
            "w_gm": report.w_gm,
            "w_max": report.w_max,
            "lambda_gm_limit": report.lambda_gm_limit,
            "lambda_max_limit": report.lambda_max_limit,
            "delta": report.delta,
            "delta_prime": report.delta_prime,
        }


class KernelCensusCommand(KernelCommand):
    """The column-weight census of a Kronecker power, one row per weight.
    """

    @property
    def columns(self):
        if self.args.wub is None:
            return ("weight", "count")
        return ("weight", "count", "pieces")

    def prepare(self):
        self.kernel = self.load_kernel()
        self.census = kron_power_census(self.kernel, self.args.n)

    def rows(self):
        kernel, census = self.kernel, self.census

        if self.args.wub is not None:
            gamma = kernel_split_gamma(kernel, self.args.n, self.args.wub)
            w_gm, w_max = split_column_weights(kernel, self.args.n, self.args.wub)
            self.logger.info(f"naive split at w_ub={self.args.wub}: gamma={float(gamma):.12g}, "
                    f"geometric mean weight {w_gm:.6g}, maximum weight {w_max}")

        for weight, count in census:
            row = {"weight": weight, "count": count}
            if self.args.wub is not None:
                row["pieces"] = -(-weight // self.args.wub)
            yield row


class ChannelZCommand(Command):
    """Bhattacharyya parameter and capacity of a channel or of a polarized bit-channel.
    """

    columns = ("channel", "path", "alphabet", "z", "capacity")

    def prepare(self):
        self.channel = self.args.channel if self.args.channel is not None \
                else read_channel(self.args.file)

    def rows(self):
        channel = self.channel
        name = repr(channel)

        for sign in self.args.path:
            if isinstance(channel, Bec):
                pair = bec_transform(channel, channel)
                channel = pair.plus if sign == "+" else pair.minus
            else:
                pair = bms_transform(channel, channel)
                channel = bms_merge(pair.plus if sign == "+" else pair.minus)
            if __debug__:
                self.logger.debug("info", f"after {sign}: Z={bhattacharyya(channel):.12g}")

        yield {
            "channel": name,
            "path": self.args.path,
            "alphabet": 3 if isinstance(channel, Bec) else channel.alphabet_size,
            "z": bhattacharyya(channel),
            "capacity": capacity(channel),
        }


class SplitCommand(Command):
    """Split G2^(x)n, check the pieces and write the sparse generator file.
    """

    columns = ("algo", "n", "w_ub", "columns", "extra", "gamma", "max_weight")

    def prepare(self):
        n, w_ub = self.args.n, self.args.wub
        if self.args.algo == "simple":
            generator = simple_split_matrix(n, w_ub)
        else:
            generator = drs_matrix(n, w_ub, self.logger)
        generator.check_reconstruction(polar_columns(n), w_ub)
        if __debug__:
            self.logger.debug("split", f"{generator.n_cols} columns, maximum weight "
                    f"{generator.max_weight}")
        write_generator(generator, self.args.out)
        self.generator = generator

    def rows(self):
        n, w_ub, generator = self.args.n, self.args.wub, self.generator
        length = 1 << n
        yield {
            "algo": self.args.algo,
            "n": n,
            "w_ub": w_ub,
            "columns": generator.n_cols,
            "extra": generator.n_cols - length,
            "gamma": fractions.Fraction(generator.n_cols - length, length),
            "max_weight": generator.max_weight,
        }


class GammaCommand(Command):
    """Exact rate loss over a grid of n and thresholds.
    """

    columns = ("algo", "n", "lambda", "w_ub", "gamma", "rate_bound")

    def gamma(self, n, w_ub):
        if self.args.algo == "simple":
            return simple_split_gamma_tail(n, w_ub)
        elif self.args.algo == "drs":
            return drs_gamma_closed(n, n_lub_of(w_ub))
        else:
            return adrs_gamma(n, n_lub_of(w_ub))

    def thresholds(self, n):
        """Yield (lambda, w_ub) pairs for one n.
        """
        if self.args.lambdas is not None:
            for lam in self.args.lambdas:
                yield lam, 1 << lambda_to_n_lub(n, lam)
        else:
            for w_ub in self.args.wub:
                yield None, w_ub

    def prepare(self):
        largest = max(self.args.n)
        if largest > MAX_GAMMA_N:
            raise CapabilityError(f"exact rate loss is supported for n <= {MAX_GAMMA_N}, "
                    f"got n={largest}")

    def rows(self):
        for n in self.args.n:
            for lam, w_ub in self.thresholds(n):
                yield {
                    "algo": self.args.algo,
                    "n": n,
                    "lambda": lam,
                    "w_ub": w_ub,
                    "gamma": self.gamma(n, w_ub),
                    "rate_bound": adrs_rate_bound(n, n_lub_of(w_ub))
                            if self.args.algo == "adrs" else None,
                }


class BuildCommand(Command):
    """Construct a code, write the code file and print a summary row.
    """

    columns = ("mode", "n", "w_ub", "k", "rate", "slots", "gamma", "design", "union_bound_log2")

    def prepare(self):
        args = self.args
        self.spec, _, _ = build_code(args.n, args.mode, args.wub, args.channel, args.rate,
                n_prime=args.n_prime)
        write_code(self.spec, args.out)
        if __debug__:
            self.logger.debug("info", f"built {self.spec!r}")

    def rows(self):
        spec = self.spec
        slots = spec.n_slots()
        yield {
            "mode": spec.mode,
            "n": spec.n,
            "w_ub": spec.w_ub,
            "k": spec.k,
            "rate": spec.rate,
            "slots": slots,
            "gamma": fractions.Fraction(slots - spec.length, spec.length),
            "design": spec.design,
            "union_bound_log2": spec.union_bound_log2,
        }


class SimulateCommand(Command):
    """Monte-Carlo block failure rate of a code with a Wilson interval and the union bound.
    """

    columns = ("mode", "n", "w_ub", "rate", "channel", "trials", "failures", "rate_estimate",
            "wilson_lo", "wilson_hi", "union_bound_log2", "operations")

    def prepare(self):
        self.spec = read_code(self.args.code)
        self.graph = self.spec.graph()

    def rows(self):
        args, spec, graph = self.args, self.spec, self.graph
        if args.trials == 0:
            return

        pool = TrialPool(self.context, spec, graph, args.channel, args.seed, args.batch_size)
        self.context.processing = pool
        tally = pool.run(args.trials)

        low, high = wilson_interval(tally.failures, tally.trials, args.confidence)
        bound = union_bound_pe(design_profile(graph, args.channel), spec.frozen,
                spec.n_prime_log2)
        yield {
            "mode": spec.mode,
            "n": spec.n,
            "w_ub": spec.w_ub,
            "rate": spec.rate,
            "channel": repr(args.channel),
            "trials": tally.trials,
            "failures": tally.failures,
            "rate_estimate": fractions.Fraction(tally.failures, tally.trials),
            "wilson_lo": low,
            "wilson_hi": high,
            "union_bound_log2": bound,
            "operations": tally.operations,
        }


class ExponentsCommand(Command):
    """Exponent curves of the polar and random linear families and the random-coding exponent.
    """

    @property
    def columns(self):
        family = self.args.family
        if family == "pairs":
            return ("lambda", "alpha", "exp_gap", "rle_comp", "rle_wcol", "polar_comp",
                    "polar_wcol")
        elif family == "random-coding":
            return ("channel", "rate_nats", "exponent", "rho", "at_capacity")
        columns = ("alpha",) if family == "rle" else ("lambda", "mu")
        columns += ("exp_gap", "exp_comp", "exp_wcol")
        if self.args.length is not None:
            columns += ("n_prime_log2",)
        return columns

    def prepare(self):
        # Grid values out of range raise here, before the header.
        self.results = list(self.evaluate())

    def rows(self):
        return iter(self.results)

    def evaluate(self):
        args = self.args

        if args.family == "rle":
            for alpha in args.alpha_grid:
                profile = rle_exponents(alpha)
                row = {"alpha": alpha, "exp_gap": profile.exp_gap,
                        "exp_comp": profile.exp_comp, "exp_wcol": profile.exp_wcol}
                if args.length is not None:
                    row["n_prime_log2"] = rle_n_prime_log2(alpha, args.delta, args.sigma2,
                            args.length)
                yield row

        elif args.family == "polar":
            for lam in args.lambda_grid:
                profile = polar_exponents(lam, args.mu)
                row = {"lambda": lam, "mu": args.mu, "exp_gap": profile.exp_gap,
                        "exp_comp": profile.exp_comp, "exp_wcol": profile.exp_wcol}
                if args.length is not None:
                    row["n_prime_log2"] = polar_n_prime_log2(lam, args.mu, args.delta,
                            args.length)
                yield row

        elif args.family == "pairs":
            for pair in exponent_pairs(args.lambda_grid, args.mu):
                yield {"lambda": pair.lam, "alpha": pair.alpha, "exp_gap": pair.exp_gap,
                        "rle_comp": pair.rle_comp, "rle_wcol": pair.rle_wcol,
                        "polar_comp": pair.polar_comp, "polar_wcol": pair.polar_wcol}

        else:
            for rate in args.rate_grid:
                result = random_coding_exponent(args.channel, rate)
                yield {"channel": repr(args.channel), "rate_nats": rate,
                        "exponent": result.value, "rho": result.rho,
                        "at_capacity": result.at_capacity}


class ThresholdsCommand(Command):
    """The thresholds as computed by maximization next to their closed forms.
    """

    columns = ("name", "value", "closed_form")

    def rows(self):
        constants = threshold_constants()
        yield {"name": "eps_star", "value": constants.eps_star, "closed_form": LOG2_3 - 1.5}
        yield {"name": "lambda_star", "value": constants.lambda_star,
                "closed_form": LOG2_3 - 1}
        yield {"name": "lambda_dagger", "value": constants.lambda_dagger,
                "closed_form": 1 / LOG2_3}


class VerifyIneqCommand(Command):
    """Evaluate the split error inequality; violations make the run fail after the report.
    """

    columns = ("samples", "points", "violations", "max_violation", "worst_point")

    def rows(self):
        report = min_split_inequality_check(self.args.samples, self.args.seed)
        yield {
            "samples": report.samples,
            "points": report.points,
            "violations": report.violations,
            "max_violation": report.max_violation,
            "worst_point": join_values(f"{value:.6g}" for value in report.worst_point),
        }
        if report.violations:
            raise InvariantError(f"{report.violations} point(s) violate the inequality")


class TablesCommand(Command):
    """Rate of polarization and limiting sparsity orders of the built-in kernels.
    """

    columns = ("kernel", "e_of_g", "lambda_gm_limit", "lambda_max_limit")

    def rows(self):
        for name in TABLES[self.args.which]:
            report = sparsity_orders(get_builtin_kernel(name), self.args.delta)
            yield {
                "kernel": name,
                "e_of_g": report.e_of_g,
                "lambda_gm_limit": report.lambda_gm_limit,
                "lambda_max_limit": report.lambda_max_limit,
            }


COMMAND_CLASSES = {
    "kernel analyze": KernelAnalyzeCommand,
    "kernel census": KernelCensusCommand,
    "channel z": ChannelZCommand,
    "split": SplitCommand,
    "gamma": GammaCommand,
    "build": BuildCommand,
    "simulate": SimulateCommand,
    "exponents": ExponentsCommand,
    "thresholds": ThresholdsCommand,
    "verify-ineq": VerifyIneqCommand,
    "tables": TablesCommand,
}


def get_command(context):
    """Instantiate the Command class of context.args.command.
    """
    return COMMAND_CLASSES[context.args.command](context)
