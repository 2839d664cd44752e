"""Central finite differences, the oracle every manual backward pass is checked against."""

import numpy as np


def finite_difference_gradient(loss_fn, params, epsilon=1e-5):
    """Central-difference gradient of ``loss_fn`` w.r.t. every entry of ``params``.

    ``params`` is a dict of float64 arrays; ``loss_fn(params)`` returns a
    scalar. O(2 * total parameter count) loss evaluations, so only for small
    problems; use :func:`finite_difference_at` for subsampled checks.
    """
    grads = {}
    for name, p in params.items():
        if p.dtype != np.float64:
            raise ValueError(f"finite differences need float64 parameters, {name!r} is {p.dtype}")
        g = np.zeros_like(p)
        flat = p.reshape(-1)
        gflat = g.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + epsilon
            hi = loss_fn(params)
            flat[i] = orig - epsilon
            lo = loss_fn(params)
            flat[i] = orig
            gflat[i] = (hi - lo) / (2.0 * epsilon)
        grads[name] = g
    return grads


def finite_difference_at(loss_fn, params, entries, epsilon=1e-5):
    """Central differences at selected entries only.

    ``entries`` is a sequence of ``(name, flat_index)`` pairs; returns one
    derivative per entry, in order.
    """
    out = np.zeros(len(entries))
    for j, (name, idx) in enumerate(entries):
        flat = params[name].reshape(-1)
        orig = flat[idx]
        flat[idx] = orig + epsilon
        hi = loss_fn(params)
        flat[idx] = orig - epsilon
        lo = loss_fn(params)
        flat[idx] = orig
        out[j] = (hi - lo) / (2.0 * epsilon)
    return out


def max_relative_error(analytic, numeric, floor=1e-6):
    """max |a - n| / max(|a|, |n|, floor), elementwise over matching arrays."""
    a = np.asarray(analytic, dtype=np.float64)
    n = np.asarray(numeric, dtype=np.float64)
    if a.shape != n.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {n.shape}")
    denom = np.maximum(np.maximum(np.abs(a), np.abs(n)), floor)
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a - n) / denom))
