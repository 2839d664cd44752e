"""Pixel-independent retouching operations and their explicit MLP forms.

Each operation maps an image to an image where an output pixel depends only
on the same input pixel plus global statistics (channel means, luminance
mean). Every operation has a direct vectorized implementation; brightness,
contrast, white balance and saturation additionally have exact constructions
as small dense MLPs over the flattened image, and the gamma tone curve has a
piecewise-linear 1->16->1 ReLU approximation. ``verify_mlp_equivalence``
checks direct-vs-MLP agreement on random images.

Images are (H, W) or (H, W, 3) float arrays in [0, 1]. Flattening for the
MLPs is channel-blocked: [all R, all G, all B], row-major within a channel.
"""

from dataclasses import dataclass, field

import numpy as np

LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])

# dense weight matrices get materialized; keep them to a few MB
MAX_MLP_INPUT_DIM = 4096


def luminance(image):
    """Per-pixel luminance 0.299 R + 0.587 G + 0.114 B."""
    if image.ndim != 3 or image.shape[-1] != 3:
        raise ValueError(f"luminance needs an (H,W,3) image, got shape {image.shape}")
    return image @ LUMA_WEIGHTS.astype(image.dtype)


def _finish(out, clamp):
    return np.clip(out, 0.0, 1.0) if clamp else out


def adjust_brightness(image, alpha, clamp=True):
    """Scale every pixel by ``alpha`` (>= 0)."""
    if not np.isfinite(alpha) or alpha < 0:
        raise ValueError(f"brightness coefficient must be finite and >= 0, got {alpha}")
    return _finish(alpha * image, clamp)


def adjust_contrast(image, alpha, clamp=True):
    """Blend each channel between itself (alpha=1) and its mean (alpha=0)."""
    if not np.isfinite(alpha):
        raise ValueError(f"contrast coefficient must be finite, got {alpha}")
    if image.ndim == 3:
        mean = image.mean(axis=(0, 1))
    else:
        mean = image.mean()
    return _finish(alpha * image + (1.0 - alpha) * mean, clamp)


def gray_world_gains(image, guard=1e-6):
    """Von Kries gains meanY/mean_c; channels with mean < guard get gain 1."""
    if image.ndim != 3 or image.shape[-1] != 3:
        raise ValueError(f"white balance needs an (H,W,3) image, got shape {image.shape}")
    channel_means = image.mean(axis=(0, 1))
    mean_y = float(channel_means @ LUMA_WEIGHTS)
    gains = np.ones(3, dtype=np.float64)
    live = channel_means >= guard
    gains[live] = mean_y / channel_means[live]
    return gains


def white_balance_grayworld(image, clamp=True):
    """Gray-world white balance: equalize channel means to the luminance mean."""
    gains = gray_world_gains(image)
    return _finish(image * gains.astype(image.dtype), clamp)


def adjust_saturation(image, strength, clamp=True):
    """Blend between grayscale (strength=0) and the original colors (strength=1)."""
    if not np.isfinite(strength) or strength < 0:
        raise ValueError(f"saturation strength must be finite and >= 0, got {strength}")
    gray = luminance(image)[..., None]
    return _finish(strength * image + (1.0 - strength) * gray, clamp)


def tone_map_gamma(image, exponent):
    """Per-pixel power-law tone curve; order-preserving for exponent > 0."""
    if not np.isfinite(exponent) or exponent <= 0:
        raise ValueError(f"tone-map exponent must be finite and > 0, got {exponent}")
    return np.power(image, exponent)


# ---------------------------------------------------------------------------
# MLP constructions


@dataclass
class MlpLayer:
    weight: np.ndarray  # (out, in), applied as weight @ x + bias
    bias: np.ndarray
    activation: str = "identity"  # "identity" | "relu"


@dataclass
class MlpSpec:
    """Ordered dense layers realizing a retouching op on a flattened image."""

    layers: list = field(default_factory=list)

    def __post_init__(self):
        if not self.layers:
            raise ValueError("MlpSpec needs at least one layer")
        for i, layer in enumerate(self.layers):
            if layer.activation not in ("identity", "relu"):
                raise ValueError(f"layer {i}: unknown activation {layer.activation!r}")
            if layer.weight.shape[0] != layer.bias.shape[0]:
                raise ValueError(f"layer {i}: weight/bias output dims disagree")
            if not (np.all(np.isfinite(layer.weight)) and np.all(np.isfinite(layer.bias))):
                raise ValueError(f"layer {i}: non-finite parameters")
            if i > 0 and layer.weight.shape[1] != self.layers[i - 1].weight.shape[0]:
                raise ValueError(f"layer {i}: input dim {layer.weight.shape[1]} does not chain "
                                 f"with previous output {self.layers[i - 1].weight.shape[0]}")

    @property
    def input_dim(self):
        return self.layers[0].weight.shape[1]

    @property
    def output_dim(self):
        return self.layers[-1].weight.shape[0]

    def evaluate(self, x, return_activations=False):
        if x.shape != (self.input_dim,):
            raise ValueError(f"expected input of shape ({self.input_dim},), got {x.shape}")
        activations = []
        for layer in self.layers:
            x = layer.weight @ x + layer.bias
            if layer.activation == "relu":
                x = np.maximum(x, 0)
            activations.append(x)
        return (x, activations) if return_activations else x


def flatten_for_mlp(image):
    """Channel-blocked flattening; the inverse is :func:`unflatten_from_mlp`."""
    if image.ndim == 2:
        return image.reshape(-1)
    return image.transpose(2, 0, 1).reshape(-1)


def unflatten_from_mlp(vec, shape):
    if len(shape) == 2:
        return vec.reshape(shape)
    h, w, c = shape
    return vec.reshape(c, h, w).transpose(1, 2, 0)


def _check_mlp_size(input_dim):
    if input_dim > MAX_MLP_INPUT_DIM:
        raise ValueError(
            f"refusing to materialize a dense {input_dim}x{input_dim} weight matrix; "
            f"verify equivalence on images with at most {MAX_MLP_INPUT_DIM} flattened "
            f"pixels instead (the construction is resolution-independent)")


def build_brightness_mlp(alpha, m, n):
    """One identity-activation layer with weight diag(alpha) on the M*N pixels."""
    if not np.isfinite(alpha) or alpha < 0:
        raise ValueError(f"brightness coefficient must be finite and >= 0, got {alpha}")
    d = m * n
    _check_mlp_size(d)
    return MlpSpec([MlpLayer(weight=alpha * np.eye(d), bias=np.zeros(d))])


def build_contrast_mlp(alpha, m, n):
    """Two identity layers; the hidden layer has one extra unit carrying the image mean.

    Hidden layer: [diag(alpha); (1/MN) * ones] so hidden = [alpha*x, mean(x)].
    Output layer: [I, (1-alpha) * ones-column] so out = alpha*x + (1-alpha)*mean(x).
    """
    if not np.isfinite(alpha):
        raise ValueError(f"contrast coefficient must be finite, got {alpha}")
    d = m * n
    _check_mlp_size(d)
    w1 = np.vstack([alpha * np.eye(d), np.full((1, d), 1.0 / d)])
    w2 = np.hstack([np.eye(d), np.full((d, 1), 1.0 - alpha)])
    return MlpSpec([
        MlpLayer(weight=w1, bias=np.zeros(d + 1)),
        MlpLayer(weight=w2, bias=np.zeros(d)),
    ])


def build_white_balance_mlp(gains, m, n):
    """One layer applying a fixed per-channel gain (block-diagonal over channels)."""
    gains = np.asarray(gains, dtype=np.float64)
    if gains.shape != (3,) or not np.all(np.isfinite(gains)):
        raise ValueError(f"gains must be 3 finite reals, got {gains!r}")
    d = m * n
    _check_mlp_size(3 * d)
    w = np.diag(np.repeat(gains, d))
    return MlpSpec([MlpLayer(weight=w, bias=np.zeros(3 * d))])


def build_saturation_mlp(strength, m, n):
    """One layer of per-pixel 3x3 blocks: strength*I + (1-strength)*ones(3) luma^T."""
    if not np.isfinite(strength) or strength < 0:
        raise ValueError(f"saturation strength must be finite and >= 0, got {strength}")
    d = m * n
    _check_mlp_size(3 * d)
    mix = strength * np.eye(3) + (1.0 - strength) * np.outer(np.ones(3), LUMA_WEIGHTS)
    w = np.zeros((3 * d, 3 * d))
    for co in range(3):
        for ci in range(3):
            idx = np.arange(d)
            w[co * d + idx, ci * d + idx] = mix[co, ci]
    return MlpSpec([MlpLayer(weight=w, bias=np.zeros(3 * d))])


def fit_tone_map_mlp(exponent, hidden=16, grid=1024):
    """Fit a 1->hidden->1 ReLU MLP to x**exponent on [0, 1].

    The fit is a piecewise-linear interpolant: hidden unit i computes
    relu(x - t_i) and the output layer holds the slope increments. Knots
    t_i = (i/hidden)^(2/exponent) equidistribute the curvature of the power
    law, which keeps the max error well under 1e-2 for practical exponents.

    Returns ``(MlpSpec, max_abs_error)`` with the error measured on a
    uniform ``grid``-point sweep of [0, 1].
    """
    if not np.isfinite(exponent) or exponent <= 0:
        raise ValueError(f"tone-map exponent must be finite and > 0, got {exponent}")
    knots = (np.arange(hidden) / hidden) ** (2.0 / exponent)
    edges = np.append(knots, 1.0)
    values = edges ** exponent
    slopes = np.diff(values) / np.diff(edges)
    increments = np.diff(slopes, prepend=0.0)
    spec = MlpSpec([
        MlpLayer(weight=np.ones((hidden, 1)), bias=-knots, activation="relu"),
        MlpLayer(weight=increments[None, :], bias=np.zeros(1)),
    ])
    xs = np.linspace(0.0, 1.0, grid)
    approx = np.array([spec.evaluate(np.array([x]))[0] for x in xs])
    max_err = float(np.max(np.abs(approx - xs ** exponent)))
    return spec, max_err


# ---------------------------------------------------------------------------
# Equivalence verification


@dataclass
class EquivalenceReport:
    trials: int
    max_abs_deviation: float
    tolerance: float

    @property
    def passed(self):
        return self.max_abs_deviation <= self.tolerance


def verify_mlp_equivalence(direct_op, mlp, trials, tolerance, image_shape=(8, 8), seed=0):
    """Compare a direct op against its MLP construction on random images.

    ``direct_op`` maps an image to an image and must be unclamped (the
    constructions are linear). ``mlp`` is an :class:`MlpSpec`, or a callable
    building one per image for ops whose weights derive from image statistics
    (white balance). Deviations are measured pre-clamp in float64.
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        image = rng.uniform(0.0, 1.0, size=image_shape)
        spec = mlp(image) if callable(mlp) else mlp
        direct = direct_op(image)
        via_mlp = unflatten_from_mlp(spec.evaluate(flatten_for_mlp(image)), image_shape)
        worst = max(worst, float(np.max(np.abs(direct - via_mlp))))
    return EquivalenceReport(trials=trials, max_abs_deviation=worst, tolerance=tolerance)
