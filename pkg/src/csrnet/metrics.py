"""Image quality metrics: PSNR, SSIM, and mean Lab distance.

All metrics take (H,W,3) or (H,W) arrays in [0,1] and compute in float64.
SSIM follows the standard formulation: an 11x11 Gaussian window (sigma 1.5)
slides over the luma plane, only fully covered windows count, and population
(window-weighted) statistics are used rather than sample-corrected ones.
"""

from dataclasses import dataclass

import numpy as np

from .retouch_ops import LUMA_WEIGHTS

PSNR_CAP_DB = 100.0

# sRGB (D65) to XYZ; the white point is this matrix applied to (1,1,1), which
# makes pure white map to exactly L*=100, a*=b*=0.
_RGB_TO_XYZ = np.array([
    [0.4124564, 0.3575761, 0.1804375],
    [0.2126729, 0.7151522, 0.0721750],
    [0.0193339, 0.1191920, 0.9503041],
])
_XYZ_TO_RGB = np.linalg.inv(_RGB_TO_XYZ)
_WHITE = _RGB_TO_XYZ.sum(axis=1)
_LAB_EPS = 216.0 / 24389.0
_LAB_KAPPA = 24389.0 / 27.0


def _check_same_shape(a, b):
    if a.shape != b.shape:
        raise ValueError(f"image shapes differ: {a.shape} vs {b.shape}")


def _as_luma(image):
    image = np.asarray(image, dtype=np.float64)
    if image.ndim == 3 and image.shape[-1] == 3:
        return image @ LUMA_WEIGHTS
    if image.ndim == 2:
        return image
    raise ValueError(f"expected an (H,W,3) or (H,W) image, got shape {image.shape}")


def psnr(a, b):
    """Peak signal-to-noise ratio in dB against a unit peak, capped at 100."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    _check_same_shape(a, b)
    mse = np.mean((a - b) ** 2)
    if mse == 0.0:
        return PSNR_CAP_DB
    return float(min(10.0 * np.log10(1.0 / mse), PSNR_CAP_DB))


def _gaussian_window(size, sigma):
    offsets = np.arange(size, dtype=np.float64) - (size - 1) / 2.0
    w = np.exp(-(offsets ** 2) / (2.0 * sigma ** 2))
    return w / w.sum()


def _filter_valid(plane, window):
    """Separable windowed filtering keeping only fully covered positions."""
    size = window.shape[0]
    rows = np.lib.stride_tricks.sliding_window_view(plane, size, axis=0) @ window
    return np.lib.stride_tricks.sliding_window_view(rows, size, axis=1) @ window


def ssim(a, b, *, window_size=11, sigma=1.5, k1=0.01, k2=0.03):
    """Mean structural similarity over the luma plane."""
    la = _as_luma(a)
    lb = _as_luma(b)
    _check_same_shape(la, lb)
    if min(la.shape) < window_size:
        raise ValueError(f"image {la.shape} smaller than the {window_size}x"
                         f"{window_size} comparison window")
    w = _gaussian_window(window_size, sigma)
    mu_a = _filter_valid(la, w)
    mu_b = _filter_valid(lb, w)
    var_a = _filter_valid(la * la, w) - mu_a ** 2
    var_b = _filter_valid(lb * lb, w) - mu_b ** 2
    cov = _filter_valid(la * lb, w) - mu_a * mu_b
    c1 = k1 ** 2
    c2 = k2 ** 2
    numerator = (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)
    denominator = (mu_a ** 2 + mu_b ** 2 + c1) * (var_a + var_b + c2)
    return float(np.mean(numerator / denominator))


def _srgb_to_linear(v):
    return np.where(v <= 0.04045, v / 12.92, ((v + 0.055) / 1.055) ** 2.4)


def _linear_to_srgb(v):
    v = np.maximum(v, 0.0)
    return np.where(v <= 0.0031308, v * 12.92, 1.055 * v ** (1.0 / 2.4) - 0.055)


def rgb_to_lab(image):
    """sRGB in [0,1] to CIELAB under D65."""
    rgb = np.asarray(image, dtype=np.float64)
    if rgb.ndim != 3 or rgb.shape[-1] != 3:
        raise ValueError(f"expected an (H,W,3) image, got shape {rgb.shape}")
    xyz = _srgb_to_linear(rgb) @ _RGB_TO_XYZ.T
    t = xyz / _WHITE
    f = np.where(t > _LAB_EPS, np.cbrt(t), (_LAB_KAPPA * t + 16.0) / 116.0)
    lab = np.empty_like(f)
    lab[..., 0] = 116.0 * f[..., 1] - 16.0
    lab[..., 1] = 500.0 * (f[..., 0] - f[..., 1])
    lab[..., 2] = 200.0 * (f[..., 1] - f[..., 2])
    return lab


def lab_to_rgb(lab):
    """Inverse of :func:`rgb_to_lab`; out-of-gamut values clip to [0,1]."""
    lab = np.asarray(lab, dtype=np.float64)
    if lab.ndim != 3 or lab.shape[-1] != 3:
        raise ValueError(f"expected an (H,W,3) array, got shape {lab.shape}")
    fy = (lab[..., 0] + 16.0) / 116.0
    fx = fy + lab[..., 1] / 500.0
    fz = fy - lab[..., 2] / 200.0
    f = np.stack([fx, fy, fz], axis=-1)
    f3 = f ** 3
    t = np.where(f3 > _LAB_EPS, f3, (116.0 * f - 16.0) / _LAB_KAPPA)
    rgb = _linear_to_srgb((t * _WHITE) @ _XYZ_TO_RGB.T)
    return np.clip(rgb, 0.0, 1.0)


def lab_l2(a, b):
    """Mean per-pixel Euclidean distance between the images in Lab space."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    _check_same_shape(a, b)
    diff = rgb_to_lab(a) - rgb_to_lab(b)
    return float(np.sqrt((diff ** 2).sum(axis=-1)).mean())


@dataclass(frozen=True)
class MetricReport:
    psnr: float
    ssim: float
    lab_l2: float

    def to_dict(self):
        return {"psnr": self.psnr, "ssim": self.ssim, "lab_l2": self.lab_l2}


def metric_report(a, b):
    return MetricReport(psnr=psnr(a, b), ssim=ssim(a, b), lab_l2=lab_l2(a, b))
