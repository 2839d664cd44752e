"""Numba-compiled convolution kernels.

Serial loop nests with a fixed accumulation order, so results are bitwise
reproducible run to run; ``fastmath`` lets LLVM vectorize the innermost
loops and the chosen rounding order is baked into the cached binary.

The 1x1/stride-1 case (the base network's hot path) becomes a per-pixel
matrix-vector product over pixel-major layouts, with the small weight matrix
cache-resident. Strided convolutions pre-split input columns by phase
(ix mod stride) so the inner output loop reads contiguously.
"""

import numpy as np
from numba import njit


@njit(cache=True, fastmath=True)
def _gemm_nt(a, bt, bias):
    """rows of ``a`` (n,k) times rows of ``bt`` (m,k) -> (n,m), plus bias."""
    n, k = a.shape
    m = bt.shape[0]
    out = np.empty((n, m), dtype=a.dtype)
    for i in range(n):
        av = a[i]
        ov = out[i]
        for j in range(m):
            bv = bt[j]
            acc = a.dtype.type(0.0)
            for t in range(k):
                acc += av[t] * bv[t]
            ov[j] = acc + bias[j]
    return out


@njit(cache=True, fastmath=True)
def _outer_accumulate(xt, ut):
    """dw[j, i] = sum_p ut[p, j] * xt[p, i]; db[j] = sum_p ut[p, j]."""
    n, cin = xt.shape
    cout = ut.shape[1]
    dw = np.zeros((cout, cin), dtype=xt.dtype)
    db = np.zeros(cout, dtype=xt.dtype)
    for p in range(n):
        xv = xt[p]
        uv = ut[p]
        for j in range(cout):
            g = uv[j]
            db[j] += g
            dr = dw[j]
            for i in range(cin):
                dr[i] += g * xv[i]
    return dw, db


@njit(cache=True, fastmath=True)
def _phase_split(x, stride):
    """Rearrange columns so x[c, y, ix] lands at xp[c, y, ix % s, ix // s]."""
    cin, h, wd = x.shape
    wp = (wd + stride - 1) // stride
    xp = np.zeros((cin, h, stride, wp), dtype=x.dtype)
    for ci in range(cin):
        for iy in range(h):
            row = x[ci, iy]
            for ix in range(wd):
                xp[ci, iy, ix % stride, ix // stride] = row[ix]
    return xp


@njit(cache=True, fastmath=True)
def _conv2d_forward(x, w, b, stride, padding):
    cin, h, wd = x.shape
    cout = w.shape[0]
    k = w.shape[2]
    ho = (h + 2 * padding - k) // stride + 1
    wo = (wd + 2 * padding - k) // stride + 1
    xp = _phase_split(x, stride)
    out = np.empty((cout, ho, wo), dtype=x.dtype)
    row = np.empty(wo, dtype=x.dtype)
    for co in range(cout):
        for oy in range(ho):
            iy0 = oy * stride - padding
            ky_lo = max(0, -iy0)
            ky_hi = min(k, h - iy0)
            for ox in range(wo):
                row[ox] = b[co]
            for ci in range(cin):
                for ky in range(ky_lo, ky_hi):
                    iy = iy0 + ky
                    for kx in range(k):
                        base = kx - padding
                        # first output column whose input index is in range;
                        # then ix = stride * mm + c with c >= 0
                        ox_lo = max(0, (-base + stride - 1) // stride)
                        c = base + stride * ox_lo
                        m_hi = min(wo - ox_lo, (wd - c + stride - 1) // stride)
                        if m_hi <= 0:
                            continue
                        wv = w[co, ci, ky, kx]
                        src = xp[ci, iy, c % stride]
                        off = c // stride
                        for mm in range(m_hi):
                            row[ox_lo + mm] += wv * src[mm + off]
            for ox in range(wo):
                out[co, oy, ox] = row[ox]
    return out


@njit(cache=True, fastmath=True)
def _conv2d_backward(x, w, stride, padding, up):
    cin, h, wd = x.shape
    cout = w.shape[0]
    k = w.shape[2]
    ho = up.shape[1]
    wo = up.shape[2]
    dw = np.zeros_like(w)
    db = np.zeros(cout, dtype=x.dtype)
    dx = np.zeros_like(x)
    for co in range(cout):
        s = x.dtype.type(0.0)
        for oy in range(ho):
            urow = up[co, oy]
            for ox in range(wo):
                s += urow[ox]
        db[co] = s
        for oy in range(ho):
            iy0 = oy * stride - padding
            ky_lo = max(0, -iy0)
            ky_hi = min(k, h - iy0)
            for ox in range(wo):
                ix0 = ox * stride - padding
                kx_lo = max(0, -ix0)
                kx_hi = min(k, wd - ix0)
                g = up[co, oy, ox]
                for ci in range(cin):
                    for ky in range(ky_lo, ky_hi):
                        iy = iy0 + ky
                        for kx in range(kx_lo, kx_hi):
                            ix = ix0 + kx
                            dw[co, ci, ky, kx] += g * x[ci, iy, ix]
                            dx[ci, iy, ix] += g * w[co, ci, ky, kx]
    return dw, db, dx


def _pixel_major(x, channels):
    return np.ascontiguousarray(x.reshape(channels, -1).T)


def conv2d_forward(x, w, b, stride, padding):
    cout, cin, k, _ = w.shape
    if k == 1 and stride == 1 and padding == 0:
        _, h, wd = x.shape
        xt = _pixel_major(x, cin)
        w2 = np.ascontiguousarray(w.reshape(cout, cin))
        out = _gemm_nt(xt, w2, b)
        return np.ascontiguousarray(out.T).reshape(cout, h, wd)
    return _conv2d_forward(np.ascontiguousarray(x), np.ascontiguousarray(w),
                           b, stride, padding)


def conv2d_backward(x, w, stride, padding, upstream):
    cout, cin, k, _ = w.shape
    if k == 1 and stride == 1 and padding == 0:
        _, h, wd = x.shape
        xt = _pixel_major(x, cin)
        ut = _pixel_major(upstream, cout)
        w2 = np.ascontiguousarray(w.reshape(cout, cin))
        dw, db = _outer_accumulate(xt, ut)
        dxt = _gemm_nt(ut, np.ascontiguousarray(w2.T),
                       np.zeros(cin, dtype=x.dtype))
        dx = np.ascontiguousarray(dxt.T).reshape(x.shape)
        return dw.reshape(w.shape), db, dx
    return _conv2d_backward(np.ascontiguousarray(x), np.ascontiguousarray(w),
                            stride, padding, np.ascontiguousarray(upstream))
