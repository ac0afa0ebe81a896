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
import sys
import csv
import json

from . import BaseClass
from .__version__ import __version__
from .convert import format_cell, parse_cell
from .exceptions import UsageError

# Options that change how a run is executed or where its output goes, but never its results.
UNSTAMPED_OPTIONS = frozenset(["threads", "debug", "profile", "out", "csv", "json", "help",
        "action"])


def format_setting(value):
    """Render an option value for the metadata header.
    """
    if isinstance(value, (list, tuple)):
        return ",".join(format_cell(item) for item in value)
    return format_cell(value)


def experiment_config(args):
    """The settings of a run that determine its results: the library version, the command and
       every option except the ones in UNSTAMPED_OPTIONS, in sorted order.
    """
    config = {"version": str(__version__), "command": args.command}
    for key, value in sorted(args.items()):
        if key in UNSTAMPED_OPTIONS or key == "command":
            continue
        config[key] = format_setting(value)
    return config


class BaseConsole(BaseClass):
    """The base class for all Console classes. A console receives the rows of one result table
       and writes them to standard output or to the file named by --out.
    """

    def __init__(self, context, columns, stream=None):
        super().__init__(context)

        self.columns = list(columns)
        self.metadata = experiment_config(self.args)

        if stream is not None:
            self.stream = stream
            self.owns_stream = False
        elif self.args.get("csv"):
            try:
                # pylint:disable=consider-using-with
                self.stream = open(self.args.csv, "w", encoding="utf-8", newline="")
            except OSError as exc:
                raise UsageError(f"cannot write {self.args.csv}: {exc.strerror}") from exc
            self.owns_stream = True
        else:
            self.stream = sys.stdout
            self.owns_stream = False

    def process(self, row):
        """Take one result row, a dict keyed by column name.
        """
        raise NotImplementedError

    def close(self):
        """Finish the output.
        """
        if self.owns_stream:
            self.stream.close()
        else:
            self.stream.flush()

    def cells(self, row):
        missing = [column for column in self.columns if column not in row]
        if missing:
            raise KeyError(f"row lacks column(s) {', '.join(missing)}")
        return [format_cell(row[column]) for column in self.columns]


class NullConsole(BaseConsole):
    """Do not format and print anything.
    """

    def __init__(self, context, columns, stream=None):
        # pylint:disable=super-init-not-called
        BaseClass.__init__(self, context)
        self.columns = list(columns)

    def process(self, row):
        pass

    def close(self):
        pass


class CsvConsole(BaseConsole):
    """Write "#"-prefixed key=value metadata lines, a header row and one line per row.
    """

    def __init__(self, context, columns, stream=None):
        super().__init__(context, columns, stream)

        self.writer = csv.writer(self.stream, lineterminator="\n")
        for key, value in self.metadata.items():
            self.stream.write(f"# {key}={value}\n")
        self.writer.writerow(self.columns)

    def process(self, row):
        self.writer.writerow(self.cells(row))


class JsonConsole(BaseConsole):
    """Write one JSON document with the same metadata, columns and cells as the CSV output.
    """

    def __init__(self, context, columns, stream=None):
        super().__init__(context, columns, stream)

        self.rows = []

    def process(self, row):
        self.rows.append([parse_cell(cell) for cell in self.cells(row)])

    def close(self):
        json.dump({"metadata": self.metadata, "columns": self.columns, "rows": self.rows},
                self.stream, indent=1)
        self.stream.write("\n")
        super().close()


def create_console(context, columns, stream=None):
    """Return the console class selected by --json, or a NullConsole when profiling.
    """
    if __debug__ and context.args.get("profile"):
        console_cls = NullConsole
    elif context.args.get("json"):
        console_cls = JsonConsole
    else:
        console_cls = CsvConsole
    return console_cls(context, columns, stream)


def read_csv(source):
    """Read a file written by CsvConsole. `source` is a path or a text file object. Returns
       (metadata, rows) where metadata is a dict of strings and rows is a list of dicts.
    """
    if isinstance(source, str):
        try:
            with open(source, encoding="utf-8", newline="") as fobj:
                text = fobj.read()
        except OSError as exc:
            raise UsageError(f"cannot read {source}: {exc.strerror}") from exc
    else:
        text = source.read()

    metadata = {}
    lines = text.splitlines(keepends=True)
    while lines and lines[0].startswith("#"):
        key, _, value = lines.pop(0)[1:].strip().partition("=")
        metadata[key.strip()] = value

    reader = csv.reader(io.StringIO("".join(lines)))
    try:
        columns = next(reader)
    except StopIteration:
        raise UsageError("no header row") from None

    rows = []
    for cells in reader:
        if len(cells) != len(columns):
            raise UsageError(f"row has {len(cells)} cells, expected {len(columns)}")
        rows.append(dict(zip(columns, map(parse_cell, cells))))
    return metadata, rows
