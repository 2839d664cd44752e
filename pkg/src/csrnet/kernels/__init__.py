"""Convolution kernels with selectable backend.

The convolutions are the only compute-heavy loops in the package. Two
implementations are provided:

* ``numba`` -- explicit loops compiled with ``@njit`` (default when numba
  imports cleanly),
* ``numpy`` -- vectorized im2col/col2im fallback.

The backend is chosen once at import time from the ``CSRNET_BACKEND``
environment variable (``numba`` or ``numpy``) and can be switched at runtime
with :func:`set_backend` (used by the benchmark and the test suite). Both
backends are deterministic: reduction order is fixed, so repeated calls give
bitwise-identical results within a backend.
"""

import os

from . import numpy_kernels

try:
    from . import numba_kernels

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    numba_kernels = None
    _HAVE_NUMBA = False

_IMPLS = {"numpy": numpy_kernels}
if _HAVE_NUMBA:
    _IMPLS["numba"] = numba_kernels


def _backend_from_env():
    name = os.environ.get("CSRNET_BACKEND", "").strip().lower()
    if not name:
        return "numba" if _HAVE_NUMBA else "numpy"
    if name not in ("numba", "numpy"):
        raise ValueError(f"CSRNET_BACKEND must be 'numba' or 'numpy', got {name!r}")
    if name == "numba" and not _HAVE_NUMBA:
        raise ImportError("CSRNET_BACKEND=numba but numba is not importable")
    return name


_active = _backend_from_env()


def available_backends():
    return tuple(sorted(_IMPLS))


def get_backend():
    return _active


def set_backend(name):
    """Switch the kernel backend (``numba`` or ``numpy``)."""
    global _active
    if name not in _IMPLS:
        raise ValueError(f"unknown backend {name!r}; available: {available_backends()}")
    _active = name


def conv2d_forward(x, w, b, stride, padding):
    """Cross-correlate ``x`` (C_in,H,W) with ``w`` (C_out,C_in,k,k) plus bias."""
    return _IMPLS[_active].conv2d_forward(x, w, b, stride, padding)


def conv2d_backward(x, w, stride, padding, upstream):
    """Gradients (d_weight, d_bias, d_input) of :func:`conv2d_forward`."""
    return _IMPLS[_active].conv2d_backward(x, w, stride, padding, upstream)
