"""Hot-loop kernels for the subset-lattice computations.

Two interchangeable backends exist: ``_numba`` (compiled) and ``_numpy``.
The numba path is used when numba imports and ``BKRLAB_NO_NUMBA`` is unset
or "0". Both take flat bool point arrays and return fresh arrays.
"""

import os

import numpy as np

from . import _numpy

numpy_backend = _numpy

try:
    from . import _numba as numba_backend
except ImportError:  # numba not installed
    numba_backend = None


def _pick():
    if os.environ.get("BKRLAB_NO_NUMBA", "0") not in ("", "0"):
        return _numpy
    return numba_backend or _numpy


backend = _pick()
BACKEND_NAME = "numba" if backend is numba_backend else "numpy"


def available_backends():
    out = {"numpy": _numpy}
    if numba_backend is not None:
        out["numba"] = numba_backend
    return out


def all_over_axis(bits, stride, size):
    return backend.all_over_axis(bits, stride, size)


def cylinder_table(bits, sizes):
    return backend.cylinder_table(bits, np.asarray(sizes, dtype=np.int64))


def bkr2_tables(ta, tb):
    return backend.bkr2_tables(ta, tb)


def bkr_r_tables(tables):
    return backend.bkr_r_tables(tables)
