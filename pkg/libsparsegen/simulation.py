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

import collections

from .main import _Base
from .builder import CodeSpec, read_code, design_profile, union_bound_pe
from .channel import parse_channel
from .decoder import wilson_interval
from .argparse import Namespace
from .arguments import Defaults, ArgumentsPostProcessor
from .processing import TrialPool

SimulationResult = collections.namedtuple("SimulationResult",
        "trials failures rate_estimate wilson_lo wilson_hi union_bound_log2 operations")


class Simulation(_Base):
    """Estimate the block failure rate of a code on a channel with a pool of worker processes.
       `code` is a CodeSpec or the path of a code file, `channel` a channel object or a
       description such as "bec:0.4".
    """
    # pylint:disable=too-many-arguments

    def __init__(self, code, channel, seed=Defaults.seed, threads=Defaults.threads,
            batch_size=Defaults.batch_size, confidence=Defaults.confidence):
        super().__init__()

        self.spec = code if isinstance(code, CodeSpec) else read_code(code)
        self.channel = parse_channel(channel) if isinstance(channel, str) else channel

        args = Namespace(command="simulate", code=None, channel=self.channel, seed=seed,
                threads=threads, batch_size=batch_size, confidence=confidence, trials=0,
                csv=None, out=None, json=False, action=None, help=False, profile=False,
                debug=["none"])
        warnings = ArgumentsPostProcessor(args).collect_warnings()

        self.setup_context(args, warnings=warnings)
        self.graph = self.spec.graph()

    def run(self, trials):
        """Run `trials` trials and return a SimulationResult.
        """
        pool = TrialPool(self.context, self.spec, self.graph, self.channel, self.args.seed,
                self.args.batch_size)
        try:
            tally = pool.run(trials)
        except KeyboardInterrupt:
            self.context.stop()
            raise

        low, high = wilson_interval(tally.failures, tally.trials, self.args.confidence)
        bound = union_bound_pe(design_profile(self.graph, self.channel), self.spec.frozen,
                self.spec.n_prime_log2)
        return SimulationResult(tally.trials, tally.failures,
                tally.failures / tally.trials if tally.trials else 0.0, low, high, bound,
                tally.operations)

    def close(self):
        self.context.close()
