"""Single-image-batch training with Adam and a halving step schedule.

The loop is deterministic for a fixed (seed, config, dataset): sampling comes
from a seeded generator that reshuffles the pair list each full pass, kernels
use fixed reduction orders, and checkpoints serialize deterministically, so
two runs with the same inputs produce byte-identical checkpoints.
"""

import json
import logging
import time
from collections import OrderedDict
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .adam import AdamState, adam_step
from .gradcheck import finite_difference_at
from .imageio import DecodeError, load_image
from .model import ModelConfig, ModelParams, build_model, backward_training, \
    forward_training, group_of

log = logging.getLogger(__name__)

TRAIN_MODES = ("full", "condition_only")

# decoded-image cache entries kept while cycling through file-backed pairs
_CACHE_LIMIT = 32


def l1_loss(pred, target):
    """Mean absolute error and its gradient w.r.t. ``pred`` (0 on exact ties)."""
    if pred.shape != target.shape:
        raise ValueError(f"prediction shape {pred.shape} != target shape {target.shape}")
    diff = pred - target
    return float(np.abs(diff).mean()), np.sign(diff) / diff.size


@dataclass(frozen=True)
class TrainConfig:
    iterations: int = 600_000
    learning_rate: float = 1e-4
    lr_halve_every: int = 100_000
    seed: int = 0
    mode: str = "full"
    log_every: int = 100

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")
        if self.learning_rate <= 0:
            raise ValueError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.lr_halve_every < 1:
            raise ValueError(f"lr_halve_every must be >= 1, got {self.lr_halve_every}")
        if self.mode not in TRAIN_MODES:
            raise ValueError(f"mode must be one of {TRAIN_MODES}, got {self.mode!r}")
        if self.log_every < 1:
            raise ValueError(f"log_every must be >= 1, got {self.log_every}")


def learning_rate_at(config, iteration):
    """Step-decay schedule: the base rate halves every ``lr_halve_every`` iterations."""
    return config.learning_rate * 0.5 ** (iteration // config.lr_halve_every)


@dataclass(frozen=True)
class TrainRecord:
    iteration: int
    loss: float
    learning_rate: float
    elapsed_seconds: float


@dataclass
class TrainLog:
    records: list = field(default_factory=list)

    @property
    def final_loss(self):
        return self.records[-1].loss if self.records else None

    def to_jsonl(self):
        lines = [json.dumps({"iteration": r.iteration, "loss": r.loss,
                             "learning_rate": r.learning_rate,
                             "elapsed_seconds": round(r.elapsed_seconds, 3)})
                 for r in self.records]
        return "\n".join(lines) + ("\n" if lines else "")


def discover_pairs(data_path):
    """Build the (input, target) path list for a dataset.

    ``data_path`` is either a directory holding ``input/`` and ``target/``
    subdirectories with matching file stems, or an index file with one
    ``input<TAB>target`` line per pair (paths relative to the index file).
    """
    path = Path(data_path)
    if path.is_file():
        return _pairs_from_index(path)
    if path.is_dir():
        return _pairs_from_dirs(path)
    raise FileNotFoundError(f"dataset path {path} does not exist")


def _pairs_from_dirs(root):
    input_dir = root / "input"
    target_dir = root / "target"
    for d in (input_dir, target_dir):
        if not d.is_dir():
            raise FileNotFoundError(f"dataset directory {root} is missing {d.name}/")
    targets_by_stem = {}
    for f in sorted(target_dir.iterdir()):
        if f.is_file():
            if f.stem in targets_by_stem:
                raise ValueError(f"duplicate target stem {f.stem!r} in {target_dir}")
            targets_by_stem[f.stem] = f
    pairs = []
    for f in sorted(input_dir.iterdir()):
        if not f.is_file():
            continue
        target = targets_by_stem.get(f.stem)
        if target is None:
            log.warning("no target matches input %s; skipping", f.name)
            continue
        pairs.append((f, target))
    if not pairs:
        raise ValueError(f"no matched input/target pairs under {root}")
    return pairs


def _pairs_from_index(index_path):
    base = index_path.parent
    pairs = []
    for lineno, line in enumerate(index_path.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        if "\t" not in line:
            raise ValueError(f"{index_path}:{lineno}: expected input<TAB>target")
        left, right = line.split("\t", 1)
        pairs.append((base / left.strip(), base / right.strip()))
    if not pairs:
        raise ValueError(f"index file {index_path} lists no pairs")
    return pairs


def _materialize(pair):
    """Return a decoded, validated (input, target) array pair."""
    a, b = pair
    if isinstance(a, np.ndarray):
        x, y = a, b
    else:
        x, y = load_image(a), load_image(b)
    for img in (x, y):
        if img.ndim != 3 or img.shape[-1] != 3:
            raise ValueError(f"expected (H,W,3) images, got shape {img.shape}")
    if x.shape != y.shape:
        raise ValueError(f"input shape {x.shape} != target shape {y.shape}")
    return x, y


class _PairSampler:
    """Seeded without-replacement sampling over the pair list, reshuffled each
    pass. Pairs that fail to load are dropped permanently with a warning."""

    def __init__(self, pairs, rng):
        self.pairs = list(pairs)
        self.rng = rng
        self.alive = [True] * len(self.pairs)
        self.queue = []
        self.cache = OrderedDict()

    def _next_index(self):
        while True:
            if not any(self.alive):
                raise ValueError("no usable training pairs remain")
            if not self.queue:
                self.queue = list(self.rng.permutation(len(self.pairs)))
            idx = self.queue.pop(0)
            if self.alive[idx]:
                return idx

    def draw(self):
        while True:
            idx = self._next_index()
            if idx in self.cache:
                self.cache.move_to_end(idx)
                return self.cache[idx]
            try:
                sample = _materialize(self.pairs[idx])
            except (DecodeError, ValueError, OSError) as exc:
                log.warning("dropping training pair %d: %s", idx, exc)
                self.alive[idx] = False
                continue
            self.cache[idx] = sample
            if len(self.cache) > _CACHE_LIMIT:
                self.cache.popitem(last=False)
            return sample


def train(dataset, config, *, model_config=None, init_params=None):
    """Run the optimization loop; returns ``(params, log)``.

    ``dataset`` is a sequence of pairs, each either two file paths or two
    (H,W,3) float arrays. With ``mode="condition_only"`` the base network
    tensors are excluded from the optimizer and stay bitwise identical.
    """
    if init_params is not None:
        params = init_params.copy()
    else:
        params = build_model(model_config or ModelConfig(), seed=config.seed)
    frozen = set(params.group_names("base")) if config.mode == "condition_only" else set()

    sampler = _PairSampler(dataset, np.random.default_rng(config.seed))
    state = AdamState(step_size=config.learning_rate)
    train_log = TrainLog()
    start = time.perf_counter()

    for it in range(config.iterations):
        x, y = sampler.draw()
        pred, cache = forward_training(params, x)
        loss, dpred = l1_loss(pred, y)
        grads = backward_training(params, cache, dpred)
        if frozen:
            grads = {name: g for name, g in grads.items() if name not in frozen}
        adam_step(params.tensors, grads, state,
                  step_size=learning_rate_at(config, it))
        done = it + 1
        if done % config.log_every == 0 or done == config.iterations:
            train_log.records.append(TrainRecord(done, loss, learning_rate_at(config, it),
                                                 time.perf_counter() - start))

    params.metadata = {"seed": config.seed, "iterations": config.iterations,
                       "mode": config.mode}
    return params, train_log


def finetune_condition(base_params, dataset, config):
    """Adapt only the condition network and heads on a new style; the base
    pixel transform is untouched."""
    if not base_params.config.uses_condition_net:
        raise ValueError("condition-only finetuning needs a model with a "
                         "learned condition network")
    cfg = replace(config, mode="condition_only")
    return train(dataset, cfg, init_params=base_params)


@dataclass(frozen=True)
class GradientCheckReport:
    samples: int
    epsilon: float
    tolerance: float
    max_relative_error: float
    per_group: dict

    @property
    def passed(self):
        return self.max_relative_error <= self.tolerance


def gradient_check(params, image, target, *, epsilon=1e-5, tolerance=1e-4,
                   samples=500, seed=0, groups=None):
    """Compare analytic gradients against central differences in float64.

    Sampling covers every parameter group present (optionally restricted via
    ``groups``); relative error uses a 1e-6 floor so zero-gradient entries do
    not divide by zero.
    """
    p64 = params.astype(np.float64)
    x = np.asarray(image, dtype=np.float64)
    y = np.asarray(target, dtype=np.float64)

    pred, cache = forward_training(p64, x)
    _, dpred = l1_loss(pred, y)
    grads = backward_training(p64, cache, dpred)

    names = [n for n in p64.names()
             if n in grads and (groups is None or group_of(n) in groups)]
    if not names:
        raise ValueError("no parameters selected for gradient checking")
    sizes = np.array([p64[n].size for n in names])
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    total = int(offsets[-1])
    rng = np.random.default_rng(seed)
    chosen = rng.choice(total, size=min(samples, total), replace=False)
    entries = []
    for flat in sorted(int(c) for c in chosen):
        which = int(np.searchsorted(offsets, flat, side="right")) - 1
        entries.append((names[which], flat - int(offsets[which])))

    def loss_fn(tensors):
        pred, _ = forward_training(ModelParams(p64.config, tensors), x)
        return l1_loss(pred, y)[0]

    numeric = finite_difference_at(loss_fn, p64.tensors, entries, epsilon=epsilon)
    analytic = np.array([grads[name].flat[idx] for name, idx in entries])
    errors = np.abs(analytic - numeric) / np.maximum.reduce(
        [np.abs(analytic), np.abs(numeric), np.full_like(numeric, 1e-6)])

    per_group = {}
    for (name, _), err in zip(entries, errors):
        g = group_of(name)
        per_group[g] = max(per_group.get(g, 0.0), float(err))
    return GradientCheckReport(samples=len(entries), epsilon=epsilon,
                               tolerance=tolerance,
                               max_relative_error=float(errors.max()),
                               per_group=per_group)
