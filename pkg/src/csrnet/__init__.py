"""Conditional global image retouching.

A tiny pixelwise network (1x1 convolutions) retouches images while a
condition network summarizes global context into per-layer scale/shift
modulation, so one model adapts its color transform to each photo. Outputs
blend linearly with the input for continuous strength control, and with each
other for style mixing.
"""

from .checkpoint import CheckpointError, load_checkpoint, save_checkpoint
from .interpolate import blend, strength_control
from .metrics import MetricReport, lab_l2, metric_report, psnr, rgb_to_lab, ssim
from .model import (ModelConfig, ModelParams, build_model, condition_vector,
                    count_parameters, forward, forward_with_condition,
                    parameter_group_counts)
from .training import TrainConfig, finetune_condition, gradient_check, l1_loss, train

__version__ = "0.1.0"

__all__ = [
    "CheckpointError", "MetricReport", "ModelConfig", "ModelParams",
    "TrainConfig", "blend", "build_model", "condition_vector",
    "count_parameters", "finetune_condition", "forward",
    "forward_with_condition", "gradient_check", "l1_loss", "lab_l2",
    "load_checkpoint", "metric_report", "parameter_group_counts", "psnr",
    "rgb_to_lab", "save_checkpoint", "ssim", "strength_control", "train",
]
