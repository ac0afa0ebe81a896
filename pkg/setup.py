#!/usr/bin/python3
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

import setuptools

from libsparsegen.__version__ import __version__

with open("README.md", encoding="utf-8") as fobj:
    long_description = fobj.read()

kwargs = {
    "name":         "sparsegen",
    "version":      str(__version__),
    "author":       "Lars Gustäbel",
    "author_email": "lars@gustaebel.de",
    "description":  "Sparse generator matrix codes from polar kernels: splitting, rate loss, "\
                    "successive-cancellation decoding and exponents",
    "long_description": long_description,
    "long_description_content_type": "text/markdown",
    "license":      "GPLv3+",
    "classifiers":  ["Development Status :: 3 - Alpha",
                     "Environment :: Console",
                     "Intended Audience :: Science/Research",
                     "License :: OSI Approved :: GNU General Public License v3 or later (GPLv3+)",
                     "Operating System :: POSIX",
                     "Operating System :: POSIX :: Linux",
                     "Topic :: Scientific/Engineering :: Information Analysis",
                     "Programming Language :: Python :: 3"],
    "python_requires": ">=3.8",
    "install_requires": ["numpy>=1.22", "scipy>=1.9"],

    "packages":     ["sparsegen", "libsparsegen"],
    "scripts":      ["bin/sparsegen"],
}

setuptools.setup(**kwargs)
