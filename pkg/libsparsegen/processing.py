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

import time
import queue
import signal
import threading
import traceback
import multiprocessing

from . import TIMEOUT, BaseClass
from .decoder import make_batches, merge_tallies, run_batch
from .exceptions import EX_INVARIANT, ProcessError


class Parallel(BaseClass):
    """A pool of threads with an order-preserving map(). numpy releases the GIL in the heavy
       array operations, so independent decodes overlap reasonably well.
    """

    def __init__(self, context, threads=None):
        super().__init__(context)

        self.queue = queue.Queue()
        self.error = None

        self.threads = []
        for _ in range(threads or self.args.threads):
            thread = threading.Thread(target=self.thread)
            thread.daemon = True
            thread.start()
            self.threads.append(thread)

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def close(self):
        for _ in self.threads:
            self.queue.put(None)
        for thread in self.threads:
            thread.join()
        self.threads = []

    def thread(self):
        """Take jobs from the queue and store their results.
        """
        while True:
            try:
                job = self.queue.get(timeout=TIMEOUT)
            except queue.Empty:
                continue

            if job is None:
                self.queue.task_done()
                break

            func, item, results, index = job
            try:
                if self.error is None:
                    results[index] = func(item)
            except Exception as exc: # pylint:disable=broad-except
                self.error = exc
            finally:
                self.queue.task_done()

    def map(self, func, items):
        """Call func on every item and return the results in the order of the items.
        """
        items = list(items)
        results = [None] * len(items)
        for index, item in enumerate(items):
            self.queue.put((func, item, results, index))
        self.queue.join()

        if self.error is not None:
            error, self.error = self.error, None
            raise error
        return results


class TrialPool(BaseClass):
    """Run the batches of a Monte-Carlo simulation on a pool of worker processes. Batches go out
       through one queue, Tally objects come back through another. Every batch draws from its
       own seeded stream and tallies are summed, so the result does not depend on the number of
       workers or the order in which batches finish.
    """

    def __init__(self, context, spec, graph, channel, seed, batch_size):
        super().__init__(context)

        self.spec = spec
        self.graph = graph
        self.channel = channel
        self.seed = seed
        self.batch_size = batch_size

        self.processes = []
        self.in_queue = multiprocessing.Queue()
        self.out_queue = multiprocessing.Queue()
        self.next_processes_check = time.time() + 10

    def run(self, trials):
        """Simulate `trials` trials and return the merged Tally.
        """
        batches = make_batches(trials, self.batch_size)
        if not batches:
            return merge_tallies([])

        if self.args.threads == 1 or (__debug__ and self.args.profile):
            return merge_tallies(self.run_batch(batch) for batch in batches)

        workers = min(self.args.threads, len(batches))
        for batch in batches:
            self.in_queue.put(batch)
        for _ in range(workers):
            self.in_queue.put(None)

        self.start_processes(workers)
        try:
            tallies = self.collect(len(batches))
        finally:
            self.close()

        if self.context.exitcode == EX_INVARIANT:
            raise ProcessError("one or more worker processes had unrecoverable errors")
        return merge_tallies(tallies)

    def run_batch(self, batch):
        tally = run_batch(self.spec, self.graph, self.channel, batch, self.seed)
        if __debug__:
            self.logger.debug("decode", f"batch {batch.index}: {tally.failures} of "
                    f"{tally.trials} failed")
        return tally

    def start_processes(self, workers):
        """Start the worker processes. They are daemons so that they do not outlive an
           interrupted main process.
        """
        processes = []
        for index in range(workers):
            process = multiprocessing.Process(target=self.loop, args=(index,))
            process.daemon = True
            process.start()
            processes.append(process)
        self.processes = processes

    def collect(self, expected):
        """Wait for `expected` tallies from the workers.
        """
        tallies = []
        while len(tallies) < expected:
            try:
                tallies.append(self.out_queue.get(timeout=TIMEOUT))
            except queue.Empty:
                if self.context.is_stopping() or self.check_for_failed_processes():
                    break
        return tallies

    def check_for_failed_processes(self):
        """Detect workers that died without being able to report it, e.g. from a signal.
        """
        if time.time() >= self.next_processes_check:
            for index, process in enumerate(self.processes):
                if process.exitcode not in (None, 0):
                    self.logger.warning(f"worker #{index} terminated abnormally")
                    self.context.set_exitcode(EX_INVARIANT)
                    self.context.stop()
                    return True

            self.next_processes_check = time.time() + 10

        return False

    def loop(self, index):
        """Worker process main loop: run batches until the sentinel arrives.
        """
        # pylint:disable=broad-except
        if __debug__:
            self.logger.debug_worker(index, "started")

        signal.signal(signal.SIGINT, signal.SIG_IGN)

        try:
            while not self.context.is_stopping():
                try:
                    batch = self.in_queue.get(timeout=TIMEOUT)
                except queue.Empty:
                    continue

                if batch is None:
                    break

                self.out_queue.put(self.run_batch(batch))
                self.context.batch_done()

        except Exception:
            self.context.set_exitcode(EX_INVARIANT)
            self.context.stop()
            traceback.print_exc()

        if __debug__:
            self.logger.debug_worker(index, "stopped")

    def close(self):
        """Join the worker processes and release the queues.
        """
        timeout = 10
        for process in self.processes:
            process.join(timeout)
            if process.exitcode is None:
                timeout = 0
        self.processes = []
        self.in_queue.close()
        self.out_queue.close()
