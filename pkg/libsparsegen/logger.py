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
import time
import textwrap

from . import OUTPUT_WIDTH


class Logger:
    """Diagnostics for a run. Everything goes to `stream` (standard error by default), so that
       standard output carries nothing but result rows.

       Debug lines carry the seconds elapsed since the logger was created, which is how long
       splitting, building and decoding stages took can be read off a --debug=all run.
    """

    def __init__(self, debug_categories=None, stream=None):
        self.debug_categories = set(debug_categories or ())
        self.stream = stream
        self.started = time.monotonic()
        self.seen_tags = set()

    @property
    def output(self):
        return sys.stderr if self.stream is None else self.stream

    def set_debug(self, debug_categories):
        """Select debug categories, e.g. ["split", "decode", "mp"], "all" or "none".
        """
        self.debug_categories = set(debug_categories) - {"none"}

    def wants(self, category):
        return bool(self.debug_categories & {"all", category})

    def _emit(self, label, message, tag=None):
        # A tagged message is shown once per run.
        if tag is not None:
            if tag in self.seen_tags:
                return
            self.seen_tags.add(tag)
        prefix = f"{label}: "
        print(textwrap.fill(prefix + str(message), width=OUTPUT_WIDTH,
                subsequent_indent=" " * len(prefix)), file=self.output)

    def warning(self, message, tag=None):
        self._emit("WARNING", message, tag)

    def info(self, message):
        self._emit("INFO", message)

    def error(self, message, exitcode):
        """Print an error message and exit with `exitcode` unless it is None.
        """
        self._emit("ERROR", message)
        if exitcode is not None:
            raise SystemExit(exitcode)

    def exception(self, message, traceback, exitcode=None):
        """Report an unexpected failure in a worker together with its traceback.
        """
        self._emit("INTERNAL", f"{message}:")
        self.output.write(traceback)
        if exitcode is not None:
            raise SystemExit(exitcode)

    if __debug__:
        def debug(self, category, message):
            if self.wants(category):
                elapsed = time.monotonic() - self.started
                print(f"DEBUG:{category}:{elapsed:8.3f}s: {message}", file=self.output)

        def debug_worker(self, index, message):
            self.debug("mp", f"worker #{index:02d} {message}")
