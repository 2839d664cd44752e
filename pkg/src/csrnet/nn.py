"""Forward and manual backward passes for the layers the retouching model uses.

Feature maps are channels-major ``(C, H, W)`` float32 arrays (float64 for the
gradient-checking mirror path). All functions are pure: inputs are never
mutated and identical inputs give bitwise-identical outputs.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels


@dataclass
class LayerGrads:
    """Parameter gradients of a conv/fully-connected layer plus the input gradient."""

    weight: np.ndarray
    bias: np.ndarray
    input: np.ndarray


@dataclass
class GfmGrads:
    gamma: np.ndarray
    beta: np.ndarray
    input: np.ndarray


def _require(ok, message):
    if not ok:
        raise ValueError(message)


def _check_conv_args(x, w, b, stride, padding):
    _require(x.ndim == 3, f"input must be (C,H,W), got shape {x.shape}")
    _require(w.ndim == 4, f"weight must be (C_out,C_in,k,k), got shape {w.shape}")
    _require(w.shape[2] == w.shape[3], f"kernel must be square, got {w.shape[2]}x{w.shape[3]}")
    _require(w.shape[1] == x.shape[0],
             f"weight expects {w.shape[1]} input channels, input has {x.shape[0]}")
    _require(b.shape == (w.shape[0],),
             f"bias shape {b.shape} does not match {w.shape[0]} output channels")
    _require(stride >= 1, f"stride must be >= 1, got {stride}")
    _require(padding >= 0, f"padding must be >= 0, got {padding}")
    k = w.shape[2]
    ho = (x.shape[1] + 2 * padding - k) // stride + 1
    wo = (x.shape[2] + 2 * padding - k) // stride + 1
    _require(ho >= 1 and wo >= 1,
             f"zero-size output: input {x.shape[1]}x{x.shape[2]}, kernel {k}, "
             f"stride {stride}, padding {padding}")
    return ho, wo


def conv2d_forward(x, w, b, stride=1, padding=0):
    """2-D cross-correlation. With k=1/stride=1/padding=0 it is per-pixel linear."""
    _check_conv_args(x, w, b, stride, padding)
    return kernels.conv2d_forward(x, w, b, stride, padding)


def conv2d_backward(x, w, stride, padding, upstream):
    ho, wo = _check_conv_args(x, w, np.zeros(w.shape[0], dtype=w.dtype), stride, padding)
    _require(upstream.shape == (w.shape[0], ho, wo),
             f"upstream shape {upstream.shape} does not match forward output "
             f"({w.shape[0]}, {ho}, {wo})")
    dw, db, dx = kernels.conv2d_backward(x, w, stride, padding, upstream)
    return LayerGrads(weight=dw, bias=db, input=dx)


def relu(x):
    return np.maximum(x, 0)


def relu_backward(x, upstream):
    # subgradient at exactly 0 is defined as 0
    return np.where(x > 0, upstream, 0).astype(upstream.dtype, copy=False)


def global_average_pool(x):
    _require(x.ndim == 3, f"input must be (C,H,W), got shape {x.shape}")
    return x.mean(axis=(1, 2))


def global_average_pool_backward(x, upstream):
    c, h, w = x.shape
    _require(upstream.shape == (c,), f"upstream shape {upstream.shape} != ({c},)")
    scale = upstream / x.dtype.type(h * w)
    return np.broadcast_to(scale[:, None, None], x.shape).astype(x.dtype, copy=True)


def fully_connected(x, w, b):
    _require(x.ndim == 1, f"input must be a vector, got shape {x.shape}")
    _require(w.ndim == 2 and w.shape[1] == x.shape[0],
             f"weight shape {w.shape} does not accept input of length {x.shape[0]}")
    _require(b.shape == (w.shape[0],), f"bias shape {b.shape} != ({w.shape[0]},)")
    return w @ x + b


def fully_connected_backward(x, w, upstream):
    _require(upstream.shape == (w.shape[0],),
             f"upstream shape {upstream.shape} != ({w.shape[0]},)")
    return LayerGrads(weight=np.outer(upstream, x), bias=upstream.copy(), input=w.T @ upstream)


def gfm(x, gamma, beta):
    """Per-channel affine modulation: out[c] = gamma[c] * x[c] + beta[c]."""
    _require(x.ndim == 3, f"feature must be (C,H,W), got shape {x.shape}")
    c = x.shape[0]
    _require(gamma.shape == (c,), f"gamma length {gamma.shape} != channel count {c}")
    _require(beta.shape == (c,), f"beta length {beta.shape} != channel count {c}")
    return gamma[:, None, None] * x + beta[:, None, None]


def gfm_backward(x, gamma, upstream):
    _require(upstream.shape == x.shape,
             f"upstream shape {upstream.shape} != feature shape {x.shape}")
    dgamma = (upstream * x).sum(axis=(1, 2))
    dbeta = upstream.sum(axis=(1, 2))
    dx = gamma[:, None, None] * upstream
    return GfmGrads(gamma=dgamma, beta=dbeta, input=dx)
