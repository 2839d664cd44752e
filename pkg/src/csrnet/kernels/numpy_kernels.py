"""Pure-numpy convolution kernels (im2col + BLAS matmul)."""

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


def _pad(x, padding):
    if padding == 0:
        return x
    c, h, w = x.shape
    out = np.zeros((c, h + 2 * padding, w + 2 * padding), dtype=x.dtype)
    out[:, padding:padding + h, padding:padding + w] = x
    return out


def _im2col(x, k, stride, padding):
    """Patch matrix of shape (C_in*k*k, H_out*W_out)."""
    xp = _pad(x, padding)
    windows = sliding_window_view(xp, (k, k), axis=(1, 2))[:, ::stride, ::stride]
    c, ho, wo = windows.shape[:3]
    cols = windows.transpose(0, 3, 4, 1, 2).reshape(c * k * k, ho * wo)
    return np.ascontiguousarray(cols), ho, wo


def conv2d_forward(x, w, b, stride, padding):
    cout, cin, k, _ = w.shape
    if k == 1 and stride == 1 and padding == 0:
        _, h, wd = x.shape
        out = w.reshape(cout, cin) @ x.reshape(cin, h * wd)
        out += b[:, None]
        return out.reshape(cout, h, wd)
    cols, ho, wo = _im2col(x, k, stride, padding)
    out = w.reshape(cout, cin * k * k) @ cols
    out += b[:, None]
    return out.reshape(cout, ho, wo)


def conv2d_backward(x, w, stride, padding, upstream):
    cout, cin, k, _ = w.shape
    _, h, wd = x.shape
    ho, wo = upstream.shape[1:]
    up = upstream.reshape(cout, ho * wo)
    db = up.sum(axis=1)

    if k == 1 and stride == 1 and padding == 0:
        xm = x.reshape(cin, h * wd)
        dw = (up @ xm.T).reshape(w.shape)
        dx = (w.reshape(cout, cin).T @ up).reshape(x.shape)
        return dw, db, dx

    cols, _, _ = _im2col(x, k, stride, padding)
    dw = (up @ cols.T).reshape(w.shape)

    dcols = w.reshape(cout, cin * k * k).T @ up
    dcols = dcols.reshape(cin, k, k, ho, wo)
    dxp = np.zeros((cin, h + 2 * padding, wd + 2 * padding), dtype=x.dtype)
    for ky in range(k):
        for kx in range(k):
            dxp[:, ky:ky + stride * ho:stride, kx:kx + stride * wo:stride] += dcols[:, ky, kx]
    if padding:
        dx = dxp[:, padding:padding + h, padding:padding + wd].copy()
    else:
        dx = dxp
    return dw, db, dx
