"""Output blending for continuous retouching control.

Because the model is trained with identity-initialized modulation, convex
blends between its output and the input (or between two styles) stay natural
across the whole slider range.
"""

import numpy as np


def blend(a, b, alpha):
    """Pixelwise convex combination ``alpha * a + (1 - alpha) * b``.

    ``alpha`` of exactly 0 or 1 returns a copy of the corresponding endpoint,
    so no rounding is introduced at the extremes.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"image shapes differ: {a.shape} vs {b.shape}")
    try:
        alpha = float(alpha)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"alpha must be a number, got {alpha!r}") from exc
    if not np.isfinite(alpha) or not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    if alpha == 0.0:
        return b.copy()
    if alpha == 1.0:
        return a.copy()
    dtype = np.result_type(a.dtype, b.dtype, np.float32)
    alpha = dtype.type(alpha)
    return alpha * a.astype(dtype) + (dtype.type(1) - alpha) * b.astype(dtype)


def strength_control(original, retouched, alpha):
    """Dial the effect strength: ``alpha=1`` returns the untouched input,
    ``alpha=0`` the full retouch."""
    return blend(original, retouched, alpha)
