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

import shutil
import collections
import multiprocessing

from .__version__ import __version__

__copyright__= f"""sparsegen {__version__}
Copyright (C) 2020 Lars Gustäbel <lars@gustaebel.de>
License GPLv3+: GNU GPL version 3 or later <https://gnu.org/licenses/gpl.html>.

This is free software: you are free to change and redistribute it.
There is NO WARRANTY, to the extent permitted by law."""


TIMEOUT = 0.01
MAX_CPU = multiprocessing.cpu_count()

# Magnitude at which log-likelihood ratios are clamped. A BEC output that is
# not erased is represented by +/-LLR_CLAMP.
LLR_CLAMP = 40.0

# Largest output alphabet an exact channel transform may produce.
ALPHABET_CAP = 2 ** 20

# Guards against materializing 2**n columns or 2**l span elements.
MAX_N = 20
MAX_KERNEL_SIZE = 24

OUTPUT_WIDTH = shutil.get_terminal_size((100, 100))[0] - 2


Batch = collections.namedtuple("Batch", "index trials")
Tally = collections.namedtuple("Tally", "trials failures operations")


class BaseClass:
    """This class can be used as the base for each class that depends on Context and access to
       args, logger, etc. It offers shortcuts to each of these components as self.component
       instead of self.context.component without using properties.
    """

    component_names = set(["args", "logger"])

    def __init__(self, context):
        self.context = context

    def __getattr__(self, name):
        if name == "context" or name.startswith("__"):
            raise AttributeError(name)

        try:
            attr = getattr(self.context, name)
        except AttributeError as exc:
            raise AttributeError(f"{self.__class__.__name__} object has no attribute {name!r}") \
                    from exc

        if name in self.component_names:
            setattr(self, name, attr)
        return attr
