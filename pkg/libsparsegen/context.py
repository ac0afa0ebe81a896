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

import multiprocessing
import multiprocessing.sharedctypes


class Context:
    """The Context holds the global state of a run so that every component can reach every other
       component through it.
    """

    def __init__(self):
        # These are added later.
        self.args = None
        self.logger = None
        self.processing = None
        self.console = None

        self.stop_queue = None
        self.exitcode_object = None
        self.batches_done = None

    def setup(self):
        """Set up the primitives shared with the worker processes.
        """
        # A non-empty queue is the stop signal, it works across processes without polling a lock.
        self.stop_queue = multiprocessing.Queue(max(1, self.args.threads))

        # Worker processes report crashes through this value.
        self.exitcode_object = multiprocessing.sharedctypes.RawValue("i", 0)

        self.batches_done = multiprocessing.Value("L")

    def __getstate__(self):
        # Worker processes get neither the output stream nor the processing object.
        state = self.__dict__.copy()
        state["console"] = state["processing"] = None
        return state

    def close(self):
        """Close the Context and clean up.
        """
        if self.stop_queue is not None:
            self.stop_queue.close()

    def set_exitcode(self, exitcode):
        """Set the exit code the main process will exit with.
        """
        self.exitcode_object.value = exitcode

    @property
    def exitcode(self):
        return self.exitcode_object.value

    def batch_done(self):
        """Count a finished batch of trials.
        """
        with self.batches_done.get_lock():
            self.batches_done.value += 1

    def is_stopping(self):
        """Return True if all processes are supposed to stop.
        """
        return self.stop_queue.qsize() > 0

    def stop(self):
        """Stop all processes immediately.
        """
        if not self.is_stopping():
            self.stop_queue.put(None)
