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

import re
import decimal
import fractions

import numpy as np

from .exceptions import UsageError

SIGNIFICANT_DIGITS = 12


def format_rational(value):
    """Render an exact rational (or integer) with 12 significant digits. The division is carried
       out in decimal so that huge numerators and denominators do not overflow a float.
    """
    value = fractions.Fraction(value)
    if value == 0:
        return "0"
    with decimal.localcontext() as context:
        context.prec = 40
        number = decimal.Decimal(value.numerator) / decimal.Decimal(value.denominator)
        return format(number, f".{SIGNIFICANT_DIGITS}g")


def format_real(value):
    """Render a float with 12 significant digits.
    """
    if isinstance(value, (fractions.Fraction, int)) and not isinstance(value, bool):
        return format_rational(value)
    if isinstance(value, decimal.Decimal):
        return format(value, f".{SIGNIFICANT_DIGITS}g")
    return format(float(value), f".{SIGNIFICANT_DIGITS}g")


def format_cell(value):
    """Convert a result value to the string that goes into a CSV cell.
    """
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    if isinstance(value, (float, fractions.Fraction, decimal.Decimal, np.floating)):
        return format_real(value)
    if isinstance(value, np.integer):
        return str(int(value))
    return str(value)


def format_mask(mask):
    """Encode a boolean vector as a hex string, element i being bit i.
    """
    packed = np.packbits(np.asarray(mask, dtype=bool), bitorder="little")
    return format(int.from_bytes(packed.tobytes(), "little"), "x")


def parse_mask(string, length):
    """Decode a hex string produced by format_mask() into a boolean vector of the given length.
    """
    try:
        value = int(string, 16)
    except ValueError:
        raise ValueError(f"invalid bit mask {string!r}") from None
    if value >> length:
        raise ValueError(f"bit mask {string!r} is longer than {length} bits")
    raw = value.to_bytes((length + 7) // 8, "little")
    bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")
    return bits[:length].astype(bool)


regex_int = re.compile(r"[-+]?\d+$")
regex_fraction = re.compile(r"([-+]?\d+)/(\d+)$")

def parse_cell(string):
    """Convert a CSV cell back to a Python value: int, float, or the string itself. An empty cell
       is None.
    """
    if string == "":
        return None
    if regex_int.match(string):
        return int(string)
    try:
        return float(string)
    except ValueError:
        return string


def parse_fraction(string):
    """Parse "3/8", "0.375" or "3" into an exact Fraction.
    """
    match = regex_fraction.match(string.strip())
    try:
        if match is not None:
            return fractions.Fraction(int(match.group(1)), int(match.group(2)))
        return fractions.Fraction(string.strip())
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"invalid number {string!r}") from None


def read_fields(path, comments=True):
    """Read a whitespace separated text file into a list of lists of fields, skipping blank lines
       and, if comments is True, lines starting with "#".
    """
    try:
        with open(path, encoding="utf-8") as fobj:
            return [line.split() for line in fobj
                    if line.strip() and not (comments and line.startswith("#"))]
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
