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
import sys
import shlex

from . import MAX_CPU, OUTPUT_WIDTH
from .channel import Bec
from .split import is_power_of_two
from .argparse import ArgumentParser, type_list, type_mode, type_range, type_real, \
    type_channel, type_threads, type_probability, type_positive_number
from .exceptions import EX_OK, UsageError

# The subcommands and a one-line description of each.
COMMANDS = {
    "kernel analyze": "Print E(G), the partial distances and the sparsity orders of a kernel.",
    "kernel census": "Print the column-weight census of the n-th Kronecker power of a kernel.",
    "channel z": "Print the Bhattacharyya parameter and capacity of a channel or of one of its "\
                 "polarized bit-channels.",
    "split": "Split the heavy columns of G2^(x)n and write the sparse generator matrix.",
    "gamma": "Print the exact rate loss of a split over a range of n and thresholds.",
    "build": "Construct a code and write its description.",
    "simulate": "Estimate the block failure rate of a code by Monte-Carlo simulation.",
    "exponents": "Print moderate-deviation or random-coding exponent curves.",
    "thresholds": "Print the three splitting thresholds.",
    "verify-ineq": "Check the split error inequality on quasi-random points of its domain.",
    "tables": "Print the rate of polarization and the sparsity orders of the built-in kernels.",
}

# Commands whose --out names an artifact file instead of the result table.
ARTIFACT_COMMANDS = ("split", "build")

# Fewer trials than this cannot resolve a 3-sigma difference of typical failure rates.
MIN_TRIALS = 1000


class Defaults:
    """Provide the defaults for both the ArgumentParser as well as the API.
    """

    threads = MAX_CPU
    seed = 0
    kernel = "G2"
    delta = 0.0
    trials = 10000
    batch_size = 1000
    confidence = 0.95
    samples = 1000000
    mu = 3.579
    algo_choices = ["simple", "drs", "adrs"]
    family_choices = ["rle", "polar", "pairs", "random-coding"]
    table_choices = ["table2", "table3"]


def add_global_options(parser):
    """Add the options every subcommand understands.
    """
    parser.add_group("Global options")
    parser.add_option("-h", "--help", action="store_true", default=False,
            help="Show this help message and exit.")
    parser.add_option("--version", action="store_const", const="version", dest="action",
            help="Show program's version number and exit.")
    parser.add_option("--threads", type=type_threads, default=Defaults.threads, metavar="<num>",
            help="Number of worker processes (default: the number of CPU cores, 0 means the "\
                 "same). Results do not depend on it.")
    parser.add_option("--seed", type=type_positive_number, default=Defaults.seed, metavar="<num>",
            help=f"Seed of the random streams (default: {Defaults.seed}).")
    parser.add_option("--csv", metavar="<path>",
            help="Write the result table to <path> instead of standard output.")
    parser.add_option("--out", metavar="<path>",
            help="Write the artifact of split/build to <path>. Other commands treat it like "\
                 "--csv.")
    parser.add_option("--json", action="store_true", default=False,
            help="Write the result table as one JSON document instead of CSV.")
    if __debug__:
        parser.add_option("--profile", action="store_true", default=False,
                help="Do a profiling run in the main process and suppress the output.")
        parser.add_option("--debug", type=type_list, default=["none"], metavar="<categories>",
                help="Show debug messages. Specify either 'all', 'none' or a comma-separated "\
                     "list of <categories> (split, decode, mp, info).")


def add_kernel_options(parser):
    parser.add_option("--name", metavar="<kernel>",
            help="A built-in kernel: G2, G3*, G4*, G3', G4' (or G3star, G4star, G3prime, "\
                 "G4prime).")
    parser.add_option("--file", metavar="<path>",
            help="Read the kernel from a kernel file.")


def add_command_options(parser, command):
    """Add the options of a subcommand.
    """
    # pylint:disable=too-many-branches,too-many-statements
    parser.add_group("Command options")

    if command == "kernel analyze":
        add_kernel_options(parser)
        parser.add_option("--delta", type=type_real, default=Defaults.delta, metavar="<delta>",
                help="Exponent slack of the outer repetition, in [0, 1) (default: 0).")
        parser.add_option("--samples", type=type_positive_number, metavar="<num>",
                help="Estimate the partial distances from <num> random codewords instead of "\
                     "enumerating the row span.")

    elif command == "kernel census":
        add_kernel_options(parser)
        parser.add_option("--n", type=type_positive_number, metavar="<n>",
                help="The Kronecker power.")
        parser.add_option("--wub", type=type_positive_number, metavar="<w_ub>",
                help="Also report the naive-split rate loss and column weights for this "\
                     "threshold.")

    elif command == "channel z":
        parser.add_option("--file", metavar="<path>",
                help="Read the channel from a channel file.")
        parser.add_option("--channel", type=type_channel, metavar="<channel>",
                help="A channel: bec:<e>, bsc:<p> or file:<path>.")
        parser.add_option("--path", default="", metavar="<signs>",
                help="Evaluate the bit-channel reached by this sequence of '-' and '+' "\
                     "transforms instead of the channel itself.")

    elif command == "split":
        parser.add_option("--algo", choices=["simple", "drs"], default="drs", metavar="<algo>",
                help="The split: simple or drs (default).")
        parser.add_option("--n", type=type_positive_number, metavar="<n>",
                help="Split the columns of G2^(x)n.")
        parser.add_option("--wub", type=type_positive_number, metavar="<w_ub>",
                help="The column weight threshold.")

    elif command == "gamma":
        parser.add_option("--algo", choices=Defaults.algo_choices, default="drs",
                metavar="<algo>", help="The split: simple, drs (default) or adrs.")
        parser.add_option("--n", type=type_range, metavar="<range>",
                help="Values of n, e.g. '10', '4:20' or '8:40:4'.")
        parser.add_option("--lambda", type=type_range, dest="lambdas", metavar="<range>",
                help="Split exponents; w_ub = 2^ceil(n lambda).")
        parser.add_option("--wub", type=type_range, metavar="<range>",
                help="Column weight thresholds, used instead of --lambda.")

    elif command == "build":
        parser.add_option("--mode", type=type_mode, default="drs", metavar="<mode>",
                help="plain, simple-split, drs (default) or adrs.")
        parser.add_option("--n", type=type_positive_number, metavar="<n>",
                help="The code length is 2^n.")
        parser.add_option("--wub", type=type_positive_number, metavar="<w_ub>",
                help="The column weight threshold (default: 2^n, i.e. no split).")
        parser.add_option("--eps", type=type_probability, metavar="<e>",
                help="Design for a BEC with this erasure probability.")
        parser.add_option("--channel", type=type_channel, metavar="<channel>",
                help="Design for this channel instead.")
        parser.add_option("--rate", type=type_probability, metavar="<rate>",
                help="The design rate; the code has floor(rate * 2^n) information bits.")
        parser.add_option("--n-prime", type=type_positive_number, default=1, metavar="<num>",
                help="Number of independent chunks of the outer repetition (default: 1).")

    elif command == "simulate":
        parser.add_option("--code", metavar="<path>",
                help="A code file written by 'sparsegen build'.")
        parser.add_option("--channel", type=type_channel, metavar="<channel>",
                help="The channel: bec:<e>, bsc:<p> or file:<path>.")
        parser.add_option("--trials", type=type_positive_number, default=Defaults.trials,
                metavar="<num>", help=f"Number of trials (default: {Defaults.trials}).")
        parser.add_option("--batch-size", type=type_positive_number,
                default=Defaults.batch_size, metavar="<num>",
                help=f"Trials per batch and random stream (default: {Defaults.batch_size}).")
        parser.add_option("--confidence", type=type_probability, default=Defaults.confidence,
                metavar="<level>", help="Confidence level of the Wilson interval.")

    elif command == "exponents":
        parser.add_option("--family", choices=Defaults.family_choices, default="polar",
                metavar="<family>", help="rle, polar (default), pairs or random-coding.")
        parser.add_option("--mu", type=type_real, default=Defaults.mu, metavar="<mu>",
                help=f"Scaling exponent of the polar family (default: {Defaults.mu}).")
        parser.add_option("--lambda-grid", type=type_range, metavar="<range>",
                help="Values of lambda for the polar and pairs families.")
        parser.add_option("--alpha-grid", type=type_range, metavar="<range>",
                help="Values of alpha for the rle family.")
        parser.add_option("--channel", type=type_channel, metavar="<channel>",
                help="The channel of the random-coding exponent.")
        parser.add_option("--rate-grid", type=type_range, metavar="<range>",
                help="Rates in nats for the random-coding exponent.")
        parser.add_option("--length", type=type_positive_number, metavar="<N>",
                help="Add the column log2 n' of the outer repetition for block length N.")
        parser.add_option("--delta", type=type_real, default=Defaults.delta, metavar="<delta>",
                help="Exponent slack used with --length (default: 0).")
        parser.add_option("--sigma2", type=type_real, metavar="<dispersion>",
                help="Channel dispersion used with --length for the rle family.")

    elif command == "verify-ineq":
        parser.add_option("--samples", type=type_positive_number, default=Defaults.samples,
                metavar="<num>", help=f"Number of Sobol points (default: {Defaults.samples}).")

    elif command == "tables":
        parser.add_option("--which", choices=Defaults.table_choices, default="table2",
                metavar="<table>",
                help="table2 (G2, G3*, G4*) or table3 (G3', G4'), default: table2.")
        parser.add_option("--delta", type=type_real, default=Defaults.delta, metavar="<delta>",
                help="Exponent slack of the outer repetition (default: 0).")


def create_parser(command=None):
    """Create the ArgumentParser object for a subcommand, or for the bare program if command is
       None.
    """
    if command is None:
        parser = ArgumentParser(usage="sparsegen <command> [<options>]")
    else:
        parser = ArgumentParser(usage=f"sparsegen {command} [<options>]",
                description=COMMANDS[command])
    add_global_options(parser)
    if command is not None:
        add_command_options(parser, command)
    return parser


def print_commands(file=sys.stdout):
    print(file=file)
    print("Commands:", file=file)
    for command, text in COMMANDS.items():
        print(f"  {command:25s}{text}"[:OUTPUT_WIDTH], file=file)


def split_command(argv):
    """Separate the command words at the start of argv from the options.
    """
    words = []
    for arg in argv:
        if arg.startswith("-"):
            break
        words.append(arg)

    for count in (2, 1):
        command = " ".join(words[:count])
        if len(words) >= count and command in COMMANDS:
            return command, argv[count:]

    if words:
        raise UsageError(f"unknown command {' '.join(words)!r}, see 'sparsegen --help'")
    return None, argv


def collect_arguments(argv=None):
    """Split argv into the command and its options and insert the options from the
       SPARSEGEN_OPTIONS environment variable in front of the ones from the command line.
    """
    if argv is None:
        argv = sys.argv[1:]
    command, argv = split_command(argv)

    options = os.environ.get("SPARSEGEN_OPTIONS")
    if options:
        argv = shlex.split(options) + argv
    return command, argv


class ArgumentsPostProcessor:
    """Check and postprocess the arguments in a Namespace.
    """

    def __init__(self, args):
        self.args = args

    def process(self):
        """Check and postprocess the arguments.
        """
        self.process_environment()
        self.process_arguments()
        self.check_for_errors()
        return self.collect_warnings()

    def process_environment(self):
        threads = os.environ.get("SPARSEGEN_THREADS")
        if threads:
            try:
                self.args.threads = type_threads(threads)
            except ValueError as exc:
                raise UsageError(f"SPARSEGEN_THREADS: {exc}") from exc

    def process_arguments(self):
        """Fill in derived values.
        """
        args = self.args

        if args.command not in ARTIFACT_COMMANDS and args.csv is None:
            args.csv = args.out

        if args.command == "build":
            if args.eps is not None and args.channel is None:
                args.channel = Bec(args.eps)
            if args.wub is None and args.n is not None:
                args.wub = 1 << args.n

    def require(self, *names):
        for name in names:
            if self.args.get(name.replace("-", "_")) is None:
                raise UsageError(f"'{self.args.command}' requires --{name}")

    def check_for_errors(self):
        """Check the arguments for missing values and conflicts.
        """
        # pylint:disable=too-many-branches
        args = self.args
        command = args.command

        if command in ("kernel analyze", "kernel census"):
            if (args.name is None) == (args.file is None):
                raise UsageError(f"'{command}' requires exactly one of --name and --file")
            if command == "kernel census":
                self.require("n")
            if args.get("delta") is not None and not 0 <= args.delta < 1:
                raise UsageError("--delta must be in [0, 1)")

        elif command == "channel z":
            if (args.file is None) == (args.channel is None):
                raise UsageError("'channel z' requires exactly one of --file and --channel")
            if set(args.path) - set("-+"):
                raise UsageError("--path may contain only '-' and '+'")

        elif command == "split":
            self.require("n", "wub")

        elif command == "gamma":
            self.require("n")
            if (args.lambdas is None) == (args.wub is None):
                raise UsageError("'gamma' requires exactly one of --lambda and --wub")
            if any(not isinstance(n, int) or n < 0 for n in args.n):
                raise UsageError("--n takes non-negative integers")
            if args.wub is not None and any(not isinstance(w, int) or w < 1 for w in args.wub):
                raise UsageError("--wub takes positive integers")
            if args.lambdas is not None and any(not 0 <= lam <= 1 for lam in args.lambdas):
                raise UsageError("--lambda takes values in [0, 1]")

        elif command == "build":
            self.require("n", "rate")
            if args.channel is None:
                raise UsageError("'build' requires --eps or --channel")
            if args.eps is not None and args.channel != Bec(args.eps):
                raise UsageError("--eps and --channel are mutually exclusive")
            if args.wub < 1:
                raise UsageError("--wub must be >= 1")
            if args.n_prime < 1:
                raise UsageError("--n-prime must be >= 1")

        elif command == "simulate":
            self.require("code", "channel")
            if args.batch_size < 1:
                raise UsageError("--batch-size must be >= 1")

        elif command == "exponents":
            if args.family in ("polar", "pairs"):
                self.require("lambda-grid")
            elif args.family == "rle":
                self.require("alpha-grid")
            else:
                self.require("channel", "rate-grid")
            if args.length is not None:
                if args.family == "rle":
                    self.require("sigma2")
                elif args.family != "polar":
                    raise UsageError("--length is supported for the rle and polar families")

        if command in ARTIFACT_COMMANDS and args.out is None:
            raise UsageError(f"'{command}' requires --out")

        if __debug__ and args.profile and args.json:
            raise UsageError("You cannot use --json together with --profile!")

    def collect_warnings(self):
        """Adjust questionable settings and return the warnings to print.
        """
        args = self.args
        warnings = []

        if args.threads > MAX_CPU:
            warnings.append(f"Reducing --threads from {args.threads} to the number of CPU "\
                    f"cores ({MAX_CPU}).")
            args.threads = MAX_CPU

        if args.command in ("split", "build") and args.get("algo", args.get("mode")) in \
                ("drs", "adrs") and not is_power_of_two(args.wub):
            warnings.append(f"w_ub={args.wub} is not a power of two, the split acts like "\
                    f"w_ub={1 << (args.wub.bit_length() - 1)}.")

        if args.command == "gamma" and args.algo != "simple" and args.wub is not None:
            odd = [w for w in args.wub if not is_power_of_two(w)]
            if odd:
                warnings.append(f"w_ub={','.join(map(str, odd))} is not a power of two, the "\
                        "closed form uses floor(log2 w_ub).")

        if args.command == "simulate" and 0 < args.trials < MIN_TRIALS:
            warnings.append(f"{args.trials} trials are too few for a 3-sigma comparison of "\
                    f"failure rates, use at least {MIN_TRIALS}.")

        return warnings


def parse_arguments(argv=None):
    """Parse the arguments from the command line, check for conflicts and postprocess them for
       later use.
    """
    command, argv = collect_arguments(argv)

    parser = create_parser(command)
    args = parser.parse_args(argv)
    args.command = command

    if args.help:
        parser.print_help()
        if command is None:
            print_commands()
        raise SystemExit(EX_OK)

    error = None
    warnings = []
    if command is None:
        if args.action is None:
            error = "no command given, see 'sparsegen --help'"
    else:
        processor = ArgumentsPostProcessor(args)
        try:
            warnings = processor.process()
        except UsageError as exc:
            error = exc.message

    return args, error, warnings
