"""The conditional retouching network.

Base network: ``base_layers`` 1x1 convolutions (so each pixel is transformed
independently), each followed by a per-channel scale/shift modulation and,
except for the last layer, a ReLU. Condition network: three stride-2
convolutions with ReLUs ending in global average pooling, which summarize the
whole image as a fixed-size vector regardless of resolution. Six small
fully-connected heads map that vector to the per-layer modulation
coefficients. Hand-crafted global priors (mean luminance, per-channel means,
per-channel histograms) can replace or extend the learned vector.
"""

from dataclasses import dataclass, replace

import numpy as np

from . import nn
from .retouch_ops import LUMA_WEIGHTS

PRIOR_DIMS = {"brightness": 1, "avg_intensity": 3, "histogram": 768}

CONDITION_SOURCES = ("learned", "brightness", "avg_intensity", "histogram",
                     "learned+brightness", "learned+avg_intensity", "learned+histogram")

# three stride-2 stages in the condition network
MIN_CONDITION_INPUT = 8


@dataclass(frozen=True)
class ModelConfig:
    base_layers: int = 3
    base_channels: int = 64
    base_kernel: int = 1
    cond_channels: int = 32
    cond_vector_dim: int = 32
    cond_first_kernel: int = 7
    condition_source: str = "learned"

    def __post_init__(self):
        for field_name in ("base_layers", "base_channels", "base_kernel",
                           "cond_channels", "cond_vector_dim", "cond_first_kernel"):
            value = getattr(self, field_name)
            if not isinstance(value, int) or value < 1:
                raise ValueError(f"{field_name} must be a positive int, got {value!r}")
        if self.base_kernel % 2 == 0 or self.cond_first_kernel % 2 == 0:
            raise ValueError("kernel sizes must be odd so padding can preserve geometry")
        if self.condition_source not in CONDITION_SOURCES:
            raise ValueError(f"condition_source must be one of {CONDITION_SOURCES}, "
                             f"got {self.condition_source!r}")

    @property
    def uses_condition_net(self):
        return self.condition_source.startswith("learned")

    @property
    def prior_kind(self):
        if self.condition_source in PRIOR_DIMS:
            return self.condition_source
        if "+" in self.condition_source:
            return self.condition_source.split("+", 1)[1]
        return None

    @property
    def condition_dim(self):
        dim = self.cond_vector_dim if self.uses_condition_net else 0
        if self.prior_kind is not None:
            dim += PRIOR_DIMS[self.prior_kind]
        return dim

    def base_layer_shapes(self):
        """(in_channels, out_channels) per base conv layer."""
        chans = [3] + [self.base_channels] * (self.base_layers - 1) + [3]
        return list(zip(chans[:-1], chans[1:]))

    def cond_layer_shapes(self):
        """(in_channels, out_channels, kernel, stride, padding) per condition conv."""
        k0 = self.cond_first_kernel
        return [
            (3, self.cond_channels, k0, 2, k0 // 2),
            (self.cond_channels, self.cond_channels, 3, 2, 1),
            (self.cond_channels, self.cond_vector_dim, 3, 2, 1),
        ]

    def to_dict(self):
        return {
            "base_layers": self.base_layers,
            "base_channels": self.base_channels,
            "base_kernel": self.base_kernel,
            "cond_channels": self.cond_channels,
            "cond_vector_dim": self.cond_vector_dim,
            "cond_first_kernel": self.cond_first_kernel,
            "condition_source": self.condition_source,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


class ModelParams:
    """Named parameter tensors plus the config that shaped them.

    Treated as immutable by inference code; only the trainer mutates tensors,
    and it owns its instance exclusively.
    """

    def __init__(self, config, tensors, metadata=None):
        self.config = config
        self.tensors = dict(tensors)
        self.metadata = dict(metadata) if metadata else {}

    def __getitem__(self, name):
        return self.tensors[name]

    def names(self):
        return list(self.tensors)

    def group_names(self, group):
        prefix = {"base": "base.", "condition": "cond.", "heads": "head."}[group]
        return [n for n in self.tensors if n.startswith(prefix)]

    def astype(self, dtype):
        return ModelParams(self.config,
                           {n: t.astype(dtype) for n, t in self.tensors.items()},
                           self.metadata)

    def copy(self):
        return ModelParams(self.config,
                           {n: t.copy() for n, t in self.tensors.items()},
                           self.metadata)


def group_of(name):
    return {"base": "base", "cond": "condition", "head": "heads"}[name.split(".", 1)[0]]


def build_model(config, seed=0):
    """He-initialized conv weights; modulation heads start as the exact identity
    (zero weights, scale bias 1, shift bias 0), so a fresh model modulates nothing."""
    rng = np.random.default_rng(seed)
    tensors = {}

    def he_conv(cin, cout, k):
        std = np.sqrt(2.0 / (cin * k * k))
        return rng.normal(0.0, std, size=(cout, cin, k, k)).astype(np.float32)

    k = config.base_kernel
    for i, (cin, cout) in enumerate(config.base_layer_shapes()):
        tensors[f"base.{i}.weight"] = he_conv(cin, cout, k)
        tensors[f"base.{i}.bias"] = np.zeros(cout, dtype=np.float32)

    if config.uses_condition_net:
        for i, (cin, cout, kk, _, _) in enumerate(config.cond_layer_shapes()):
            tensors[f"cond.{i}.weight"] = he_conv(cin, cout, kk)
            tensors[f"cond.{i}.bias"] = np.zeros(cout, dtype=np.float32)

    d = config.condition_dim
    for i, (_, cout) in enumerate(config.base_layer_shapes()):
        tensors[f"head.{i}.gamma.weight"] = np.zeros((cout, d), dtype=np.float32)
        tensors[f"head.{i}.gamma.bias"] = np.ones(cout, dtype=np.float32)
        tensors[f"head.{i}.beta.weight"] = np.zeros((cout, d), dtype=np.float32)
        tensors[f"head.{i}.beta.bias"] = np.zeros(cout, dtype=np.float32)

    return ModelParams(config, tensors, metadata={"seed": seed, "iterations": 0})


def count_parameters(params):
    return int(sum(t.size for t in params.tensors.values()))


def parameter_group_counts(params):
    counts = {"base": 0, "condition": 0, "heads": 0}
    for name, t in params.tensors.items():
        counts[group_of(name)] += t.size
    return counts


def _to_chw(image):
    if image.ndim != 3 or image.shape[-1] != 3:
        raise ValueError(f"expected an (H,W,3) image, got shape {image.shape}")
    return np.ascontiguousarray(image.transpose(2, 0, 1))


def _to_hwc(chw):
    return np.ascontiguousarray(chw.transpose(1, 2, 0))


def hand_crafted_prior(image, kind):
    """Global prior vector: mean luminance (1), channel means (3), or
    256-bin normalized per-channel histograms concatenated (768)."""
    if image.ndim != 3 or image.shape[-1] != 3:
        raise ValueError(f"expected an (H,W,3) image, got shape {image.shape}")
    if kind == "brightness":
        gray = image @ LUMA_WEIGHTS.astype(image.dtype)
        return np.array([gray.mean()], dtype=image.dtype)
    if kind == "avg_intensity":
        return image.mean(axis=(0, 1)).astype(image.dtype)
    if kind == "histogram":
        pixels = image.shape[0] * image.shape[1]
        hists = [np.histogram(image[..., c], bins=256, range=(0.0, 1.0))[0] / pixels
                 for c in range(3)]
        return np.concatenate(hists).astype(image.dtype)
    raise ValueError(f"unknown prior kind {kind!r}; expected one of {sorted(PRIOR_DIMS)}")


def _condition_net_forward(params, x, want_cache=False):
    cache = {"inputs": [], "conv_out": []} if want_cache else None
    for i, (_, _, _, stride, padding) in enumerate(params.config.cond_layer_shapes()):
        z = nn.conv2d_forward(x, params[f"cond.{i}.weight"], params[f"cond.{i}.bias"],
                              stride=stride, padding=padding)
        if want_cache:
            cache["inputs"].append(x)
            cache["conv_out"].append(z)
        x = nn.relu(z)
    vector = nn.global_average_pool(x)
    if want_cache:
        cache["pool_in"] = x
        return vector, cache
    return vector


def condition_vector(params, image):
    """Learned condition vector, computed at native resolution (no resize)."""
    if not params.config.uses_condition_net:
        raise ValueError(f"model with condition_source={params.config.condition_source!r} "
                         "has no learned condition network")
    x = _to_chw(image)
    if min(image.shape[0], image.shape[1]) < MIN_CONDITION_INPUT:
        raise ValueError(f"image {image.shape[0]}x{image.shape[1]} too small; condition "
                         f"network needs at least {MIN_CONDITION_INPUT} pixels per side")
    return _condition_net_forward(params, x)


def condition_input(params, image):
    """Head input: learned vector, prior, or their concatenation (prior first)."""
    config = params.config
    parts = []
    if config.prior_kind is not None:
        parts.append(hand_crafted_prior(image, config.prior_kind))
    if config.uses_condition_net:
        parts.append(condition_vector(params, image))
    return parts[0] if len(parts) == 1 else np.concatenate(parts)


def _heads_forward(params, condition):
    pairs = []
    for i in range(params.config.base_layers):
        gamma = nn.fully_connected(condition, params[f"head.{i}.gamma.weight"],
                                   params[f"head.{i}.gamma.bias"])
        beta = nn.fully_connected(condition, params[f"head.{i}.beta.weight"],
                                  params[f"head.{i}.beta.bias"])
        pairs.append((gamma, beta))
    return pairs


def _base_forward(params, x, modulation, want_cache=False):
    config = params.config
    padding = config.base_kernel // 2
    cache = {"inputs": [], "conv_out": [], "gfm_out": []} if want_cache else None
    last = config.base_layers - 1
    for i in range(config.base_layers):
        z = nn.conv2d_forward(x, params[f"base.{i}.weight"], params[f"base.{i}.bias"],
                              stride=1, padding=padding)
        if modulation is None:
            g = z
        else:
            gamma, beta = modulation[i]
            g = nn.gfm(z, gamma, beta)
        if want_cache:
            cache["inputs"].append(x)
            cache["conv_out"].append(z)
            cache["gfm_out"].append(g)
        x = g if i == last else nn.relu(g)
    if want_cache:
        return x, cache
    return x


def forward_with_condition(params, condition, image, clamp=True):
    """Retouch with an explicitly supplied condition vector (no extraction)."""
    condition = np.asarray(condition)
    d = params.config.condition_dim
    if condition.shape != (d,):
        raise ValueError(f"condition vector shape {condition.shape} != ({d},)")
    out = _base_forward(params, _to_chw(image), _heads_forward(params, condition))
    out = _to_hwc(out)
    return np.clip(out, 0.0, 1.0) if clamp else out


def forward(params, image, clamp=True):
    """Full retouching pass: extract condition, modulate, map pixels."""
    return forward_with_condition(params, condition_input(params, image), image, clamp=clamp)


def forward_base_only(params, image, clamp=True):
    """Base network alone, no modulation (diagnostic path)."""
    out = _to_hwc(_base_forward(params, _to_chw(image), None))
    return np.clip(out, 0.0, 1.0) if clamp else out


def forward_training(params, image):
    """Unclamped forward that keeps every intermediate needed by the backward pass.

    Returns ``(prediction_hwc, cache)``.
    """
    config = params.config
    x = _to_chw(image)
    cache = {"prior_dim": 0, "cond": None}
    parts = []
    if config.prior_kind is not None:
        prior = hand_crafted_prior(image, config.prior_kind)
        parts.append(prior)
        cache["prior_dim"] = prior.shape[0]
    if config.uses_condition_net:
        if min(image.shape[0], image.shape[1]) < MIN_CONDITION_INPUT:
            raise ValueError(f"image {image.shape[0]}x{image.shape[1]} too small; condition "
                             f"network needs at least {MIN_CONDITION_INPUT} pixels per side")
        vector, cond_cache = _condition_net_forward(params, x, want_cache=True)
        parts.append(vector)
        cache["cond"] = cond_cache
    condition = parts[0] if len(parts) == 1 else np.concatenate(parts)
    cache["condition"] = condition
    modulation = _heads_forward(params, condition)
    cache["modulation"] = modulation
    pred, base_cache = _base_forward(params, x, modulation, want_cache=True)
    cache["base"] = base_cache
    return _to_hwc(pred), cache


def backward_training(params, cache, upstream):
    """Gradients of a scalar loss w.r.t. every parameter.

    ``upstream`` is the loss gradient w.r.t. the (H,W,3) prediction. Returns a
    dict mirroring the parameter names and shapes.
    """
    config = params.config
    grads = {}
    padding = config.base_kernel // 2
    base = cache["base"]
    condition = cache["condition"]
    d_condition = np.zeros_like(condition)

    u = _to_chw(upstream)
    last = config.base_layers - 1
    for i in range(last, -1, -1):
        if i != last:
            u = nn.relu_backward(base["gfm_out"][i], u)
        gamma, _ = cache["modulation"][i]
        gg = nn.gfm_backward(base["conv_out"][i], gamma, u)
        grads[f"head.{i}.gamma.weight"] = np.outer(gg.gamma, condition)
        grads[f"head.{i}.gamma.bias"] = gg.gamma
        grads[f"head.{i}.beta.weight"] = np.outer(gg.beta, condition)
        grads[f"head.{i}.beta.bias"] = gg.beta
        d_condition += params[f"head.{i}.gamma.weight"].T @ gg.gamma
        d_condition += params[f"head.{i}.beta.weight"].T @ gg.beta
        cg = nn.conv2d_backward(base["inputs"][i], params[f"base.{i}.weight"],
                                1, padding, gg.input)
        grads[f"base.{i}.weight"] = cg.weight
        grads[f"base.{i}.bias"] = cg.bias
        u = cg.input

    cond = cache["cond"]
    if cond is not None:
        dv = d_condition[cache["prior_dim"]:]
        uc = nn.global_average_pool_backward(cond["pool_in"], dv)
        shapes = config.cond_layer_shapes()
        for i in range(2, -1, -1):
            uc = nn.relu_backward(cond["conv_out"][i], uc)
            _, _, _, stride, pad = shapes[i]
            cg = nn.conv2d_backward(cond["inputs"][i], params[f"cond.{i}.weight"],
                                    stride, pad, uc)
            grads[f"cond.{i}.weight"] = cg.weight
            grads[f"cond.{i}.bias"] = cg.bias
            uc = cg.input
    return grads
