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

# pylint:disable=redefined-builtin

import re
import sys
import textwrap

import numpy as np

from . import MAX_CPU, OUTPUT_WIDTH
from .channel import parse_channel
from .exceptions import BaseError, UsageError


def type_positive_number(string):
    """Parse an integer >= 0.
    """
    value = int(string)
    if value < 0:
        raise ValueError(f"expected a number >= 0, got {value}")
    return value


def type_threads(string):
    """Parse the number of worker processes, 0 meaning one per CPU. Larger numbers are left
       alone here, ArgumentsPostProcessor clamps them with a warning.
    """
    return type_positive_number(string) or MAX_CPU


def type_real(string):
    return float(string)


def type_probability(string):
    """Parse a real number in [0, 1].
    """
    value = float(string)
    if not 0 <= value <= 1:
        raise ValueError("probability must be in [0, 1]")
    return value


def type_list(string):
    return [item.strip() for item in string.split(",") if item.strip()]


regex_range = re.compile(r"^(?P<start>[^:]+)(?::(?P<stop>[^:]+)(?::(?P<step>[^:]+))?)?$")

def _parse_range_number(string):
    if re.match(r"^[-+]?\d+$", string):
        return int(string)
    return float(string)

def type_range(string):
    """Parse a comma separated list of values and inclusive ranges start:stop[:step], e.g.
       "10", "4:12", "4:12:2,16" or "0.001:0.22:0.001". Integer ranges yield ints.
    """
    values = []
    for part in type_list(string):
        match = regex_range.match(part)
        if match is None:
            raise ValueError(f"invalid range {part!r}")

        start = _parse_range_number(match.group("start"))
        if match.group("stop") is None:
            values.append(start)
            continue

        stop = _parse_range_number(match.group("stop"))
        step = _parse_range_number(match.group("step")) if match.group("step") else 1
        if step <= 0:
            raise ValueError("range step must be positive")
        if stop < start:
            raise ValueError(f"range {part!r} is empty")

        if all(isinstance(value, int) for value in (start, stop, step)):
            values.extend(range(start, stop + 1, step))
        else:
            count = int(np.floor((stop - start) / step + 1e-9)) + 1
            values.extend(float(value) for value in
                    np.round(start + step * np.arange(count), 12))
    if not values:
        raise ValueError("empty range")
    return values


def type_channel(string):
    """Parse a channel description: bec:<e>, bsc:<p> or file:<path>.
    """
    try:
        return parse_channel(string)
    except BaseError as exc:
        raise ValueError(exc.message) from exc


def type_mode(string):
    """Parse a code construction mode, "simple" being short for "simple-split".
    """
    string = string.strip().lower()
    if string == "simple":
        string = "simple-split"
    if string not in ("plain", "simple-split", "drs", "adrs"):
        raise ValueError(f"invalid mode {string!r}")
    return string


class OptionError(Exception):
    """An option was declared twice or with an unsupported action.
    """


class Option:
    """A single command line option. Actions are "store" (takes a value), "store_true" and
       "store_const".
    """
    # pylint:disable=too-many-instance-attributes,too-many-arguments

    actions = ("store", "store_true", "store_const")

    def __init__(self, strings, action, help, const, choices, type, dest, default, metavar):
        if action not in self.actions:
            raise OptionError(f"unsupported action {action!r} for {strings}")
        if not any(string.startswith("--") for string in strings):
            raise OptionError(f"{strings} has no long form")

        self.strings = strings
        self.action = action
        self.help = help
        self.const = const
        self.choices = choices
        self.type = type
        self.default = default
        self.dest = dest or self.long_name.replace("-", "_")
        self.metavar = (metavar or f"<{self.dest}>") if self.takes_value else None

    @property
    def long_name(self):
        return next(string for string in self.strings if string.startswith("--"))[2:]

    @property
    def takes_value(self):
        return self.action == "store"

    @property
    def label(self):
        return "/".join(self.strings)

    def signature(self):
        strings = ", ".join(self.strings)
        return f"{strings} {self.metavar}" if self.takes_value else strings

    def convert(self, string):
        """Convert a value from the command line and check it against the choices.
        """
        try:
            value = self.type(string)
        except ValueError as exc:
            raise UsageError(f"{self.label}: {exc}") from exc

        if self.choices is not None and value not in self.choices:
            raise UsageError(f"{self.label}: invalid choice {string!r}, choose from "\
                    f"{', '.join(map(str, self.choices))}")
        return value


class Namespace(dict):
    """The parsed options of a run. Keys are readable and writable as attributes, so that
       console.experiment_config() sees every value that ArgumentsPostProcessor fills in.
    """

    def __getattr__(self, key):
        try:
            return self[key]
        except KeyError:
            raise AttributeError(key) from None

    def __setattr__(self, key, value):
        self[key] = value

    def __repr__(self):
        items = ", ".join(f"{key}={value!r}" for key, value in sorted(self.items()))
        return f"Namespace({items})"


class ArgumentParser:
    """The option parser of one subcommand. Subcommands take options only, and every
       problem with them is raised as UsageError.
    """

    def __init__(self, usage="sparsegen <command> [<options>]", description=None):
        self.usage = usage
        self.description = description
        self.sections = []
        self.lookup = {}

    def add_group(self, title):
        self.sections.append((title, []))

    def add_option(self, *strings, action="store", help, const=None, choices=None, type=str,
            dest=None, default=None, metavar=None):
        # pylint:disable=too-many-arguments
        option = Option(strings, action, help, const, choices, type, dest, default, metavar)
        for string in strings:
            if string in self.lookup:
                raise OptionError(f"option {string!r} declared twice")
            self.lookup[string] = option

        if not self.sections:
            self.add_group("Options")
        self.sections[-1][1].append(option)

    @property
    def options(self):
        return [option for _, options in self.sections for option in options]

    def defaults(self):
        namespace = Namespace()
        for option in self.options:
            namespace.setdefault(option.dest, option.default)
        return namespace

    def hint(self):
        return f"see '{self.usage.split(' [', 1)[0]} --help'"

    def parse_args(self, argv):
        """Parse a list of options, "--name value" and "--name=value" alike. Values may be
           negative numbers or, in the attached form, anything starting with a dash.
        """
        namespace = self.defaults()
        argv = list(argv)

        while argv:
            arg = argv.pop(0)
            if not arg.startswith("-") or arg == "-":
                raise UsageError(f"unexpected argument {arg!r}, {self.hint()}")

            string, attached, value = arg.partition("=") if arg.startswith("--") else \
                    (arg, "", "")
            option = self.lookup.get(string)
            if option is None:
                raise UsageError(f"unknown option {string!r}, {self.hint()}")

            if not option.takes_value:
                if attached:
                    raise UsageError(f"option {string} does not take a value")
                namespace[option.dest] = True if option.action == "store_true" else option.const
                continue

            if not attached:
                if not argv or (argv[0].startswith("-") and not re.match(r"^-\.?\d", argv[0])):
                    raise UsageError(f"{option.label} requires a value")
                value = argv.pop(0)
            namespace[option.dest] = option.convert(value)

        return namespace

    def format_help(self):
        """Return the help text: usage, description and the options group by group.
        """
        lines = [f"usage: {self.usage}"]
        if self.description:
            lines += ["", textwrap.fill(self.description, width=OUTPUT_WIDTH)]

        indent = " " * 27
        for title, options in self.sections:
            lines += ["", f"{title}:"]
            for option in options:
                signature = f"  {option.signature()}"
                text = textwrap.wrap(option.help, width=OUTPUT_WIDTH - len(indent))
                if len(signature) > 25:
                    lines.append(signature)
                else:
                    lines.append(f"{signature:27s}{text.pop(0) if text else ''}".rstrip())
                lines += [indent + line for line in text]
        return "\n".join(lines)

    def print_help(self, file=sys.stdout):
        print(self.format_help(), file=file)
