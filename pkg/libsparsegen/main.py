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

import sys
import pstats
import cProfile

from . import BaseClass, __copyright__
from .logger import Logger
from .context import Context
from .commands import get_command
from .arguments import parse_arguments
from .exceptions import EX_OK, EX_USAGE, EX_INVARIANT, BaseError, ProcessError


class _Base(BaseClass):

    def __init__(self):
        super().__init__(Context())

        # Errors from splitting the command line must be reportable before setup_context().
        self.context.logger = Logger()

    def setup_context(self, args, error=None, warnings=None):
        """Initialize the central Context object which will be passed to all components.
        """
        self.context.args = args
        self.context.setup()

        if __debug__:
            self.context.logger.set_debug(args.debug)

        if error is not None:
            self.logger.error(error, EX_USAGE)

        if warnings is not None:
            for warning in warnings:
                self.logger.warning(warning)

    def show_debug_info(self):
        """Show general debug information about the run.
        """
        self.logger.debug("info", f"Executable: {sys.argv[0]}.")
        self.logger.debug("info", f"Command: {self.args.command}, {self.args.threads} "\
                "worker(s).")
        for key, value in sorted(self.args.items()):
            self.logger.debug("info", f"  {key}={value!r}")


class Main(_Base):
    """The main entry point for the sparsegen(1) script.
    """

    def __init__(self, argv=None):
        super().__init__()

        self.command = None
        try:
            self.setup(*parse_arguments(argv))
        except BaseError as exc:
            self.handle_exception(exc)

    def setup(self, args, error=None, warnings=None):
        """Set up the context and the command object.
        """
        self.setup_context(args, error, warnings)

        if args.action == "version":
            print(__copyright__)
            raise SystemExit(EX_OK)

        if __debug__:
            self.show_debug_info()

        self.command = get_command(self.context)

    def loop(self):
        """Run the command and exit.
        """
        try:
            self.run()
        except BaseError as exc:
            self.handle_exception(exc)

    def handle_exception(self, exc):
        """Print a BaseError exception using the correct formatting and exit.
        """
        if exc.traceback is not None:
            self.logger.exception(exc.message, exc.traceback, exc.exitcode)
        else:
            self.logger.error(exc.message, exc.exitcode)

    def run(self):
        """Run the command, with profiling if requested.
        """
        try:
            if __debug__ and self.args.profile:
                # Workers are not started when profiling, everything runs in this process.
                profiler = cProfile.Profile()
                profiler.enable()
                self.command.run()
                profiler.disable()
                stats = pstats.Stats(profiler, stream=sys.stderr)
                stats.sort_stats("cumulative")
                stats.print_stats(.1)
            else:
                self.command.run()

        except KeyboardInterrupt as exc:
            # Stop all processes immediately.
            self.context.stop()
            if __debug__:
                raise
            else:
                raise SystemExit("keyboard interrupt") from exc

        except BrokenPipeError:
            self.context.stop()

        finally:
            self.context.close()

        if __debug__:
            self.logger.debug("mp", f"{self.context.batches_done.value} batch(es) done by "\
                    "workers")

        if self.context.exitcode == EX_INVARIANT:
            raise ProcessError("One or more worker processes had unrecoverable errors! "\
                    "The result is incomplete!")
