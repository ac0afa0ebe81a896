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

import traceback

EX_OK = 0
EX_USAGE = 2
EX_CAPABILITY = 3
EX_INVARIANT = 4


class BaseError(Exception):
    """Base exception for all other exceptions.
    """
    # pylint:disable=redefined-outer-name

    exitcode = None

    def __init__(self, message, traceback=None):
        super().__init__(message)
        self.message = message
        self.traceback = traceback

    @classmethod
    def from_exception(cls, message):
        """Create a BaseError exception with the traceback of the current exception.
        """
        return cls(message, traceback.format_exc())

class UsageError(BaseError):
    """There was an error in the arguments provided by the user or the caller.
    """
    exitcode = EX_USAGE

class DimensionError(UsageError):
    """A matrix or vector argument has the wrong shape.
    """

class CapabilityError(BaseError):
    """A computation exceeds one of the size guards or is not supported in this mode.
    """
    exitcode = EX_CAPABILITY

class InvariantError(BaseError):
    """An internal consistency check failed.
    """
    exitcode = EX_INVARIANT

class ProcessError(BaseError):
    """One or more worker processes had unrecoverable errors.
    """
    exitcode = EX_INVARIANT
