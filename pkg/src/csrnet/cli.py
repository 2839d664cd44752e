"""Command-line tools: training, inference, op verification, metrics,
interpolation, and the HTTP service.

Exit codes are a stable contract: 0 success, 1 usage error, 2 I/O or data
error, 3 verification failure.
"""

import argparse
import json
import sys
from pathlib import Path

from .checkpoint import CheckpointError, load_checkpoint, save_checkpoint
from .imageio import DecodeError, load_image, save_image
from .interpolate import blend, strength_control
from .metrics import metric_report
from .model import CONDITION_SOURCES, ModelConfig, count_parameters, forward
from .retouch_ops import (adjust_brightness, adjust_contrast, adjust_saturation,
                          build_brightness_mlp, build_contrast_mlp,
                          build_saturation_mlp, build_white_balance_mlp,
                          fit_tone_map_mlp, gray_world_gains,
                          verify_mlp_equivalence, white_balance_grayworld)
from .training import TrainConfig, discover_pairs, finetune_condition, train

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_VERIFY = 3

VERIFY_ALPHAS = (0.0, 0.25, 0.5, 1.0, 1.5)
VERIFY_EXPONENTS = (0.5, 1.0, 2.2)


class UsageError(Exception):
    """Bad flag combination or value; maps to exit code 1."""


def build_parser():
    parser = argparse.ArgumentParser(
        prog="csrnet",
        description="Global image retouching with a conditional pixelwise network.",
        epilog="Exit codes: 0 success, 1 usage, 2 I/O or data error, "
               "3 verification failure.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    t = sub.add_parser("train", help="train a model on paired images")
    t.add_argument("--data-dir", required=True,
                   help="directory with input/ and target/ subdirs, or a "
                        "TAB-separated index file")
    t.add_argument("--out", required=True, help="checkpoint output path")
    t.add_argument("--iters", type=int, default=600_000)
    t.add_argument("--lr", type=float, default=1e-4)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--mode", choices=("full", "condition-only"), default="full")
    t.add_argument("--base", help="checkpoint to start from "
                                  "(required for --mode condition-only)")
    t.add_argument("--condition-source", choices=CONDITION_SOURCES, default="learned")
    t.add_argument("--log-every", type=int, default=100)

    i = sub.add_parser("infer", help="retouch one image")
    i.add_argument("--model", required=True)
    i.add_argument("--input", required=True)
    i.add_argument("--output", required=True)
    i.add_argument("--alpha", type=float, default=0.0,
                   help="strength dial: 0 = full retouch, 1 = original (default 0)")

    v = sub.add_parser("verify-ops",
                       help="check retouching ops against their MLP constructions")
    v.add_argument("--trials", type=int, default=100)
    v.add_argument("--tolerance", type=float, default=1e-6,
                   help="bound for the exact linear constructions")
    v.add_argument("--tone-tolerance", type=float, default=1e-2,
                   help="bound for the tone-map curve fit")
    v.add_argument("--seed", type=int, default=0)

    m = sub.add_parser("metrics", help="compare two images, JSON to stdout")
    m.add_argument("image_a")
    m.add_argument("image_b")

    p = sub.add_parser("interpolate", help="blend two images")
    p.add_argument("--a", required=True, dest="image_a")
    p.add_argument("--b", required=True, dest="image_b")
    p.add_argument("--alpha", type=float, required=True,
                   help="weight of the first image, in [0,1]")
    p.add_argument("--output", required=True)

    s = sub.add_parser("serve", help="run the HTTP retouching service")
    s.add_argument("--model-dir",
                   help="directory of *.ckpt models (default: $CSRNET_MODEL_DIR)")
    s.add_argument("--host", default="127.0.0.1")
    s.add_argument("--port", type=int, default=8000)
    s.add_argument("--max-upload-bytes", type=int, default=16 * 2 ** 20)
    s.add_argument("--timeout", type=float, default=30.0,
                   help="request timeout in seconds")
    s.add_argument("--static-dir", help="directory of UI assets to serve at /")
    return parser


def _check_alpha(alpha):
    if not 0.0 <= alpha <= 1.0:
        raise UsageError(f"--alpha must lie in [0, 1], got {alpha}")


def cmd_train(args):
    mode = args.mode.replace("-", "_")
    if mode == "condition_only" and not args.base:
        raise UsageError("--mode condition-only requires --base <checkpoint>")
    try:
        config = TrainConfig(iterations=args.iters, learning_rate=args.lr,
                             seed=args.seed, mode=mode, log_every=args.log_every)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc

    pairs = discover_pairs(args.data_dir)
    if args.base:
        base = load_checkpoint(args.base)
        if mode == "condition_only":
            params, log = finetune_condition(base, pairs, config)
        else:
            params, log = train(pairs, config, init_params=base)
    else:
        params, log = train(pairs, config,
                            model_config=ModelConfig(condition_source=args.condition_source))

    out = Path(args.out)
    if out.parent and not out.parent.exists():
        out.parent.mkdir(parents=True, exist_ok=True)
    save_checkpoint(params, out)
    log_path = Path(str(out) + ".log.jsonl")
    log_path.write_text(log.to_jsonl(), encoding="utf-8")
    print(f"trained {config.iterations} iterations "
          f"({count_parameters(params)} parameters); "
          f"checkpoint {out}, log {log_path}")
    return EXIT_OK


def cmd_infer(args):
    _check_alpha(args.alpha)
    params = load_checkpoint(args.model)
    image = load_image(args.input)
    retouched = forward(params, image)
    save_image(args.output, strength_control(image, retouched, args.alpha))
    print(f"wrote {args.output}")
    return EXIT_OK


def _verify_rows(trials, tolerance, tone_tolerance, seed):
    h, w = 8, 8
    rows = []

    def across_alphas(name, direct_of, mlp_of, shape):
        worst = 0.0
        for k, alpha in enumerate(VERIFY_ALPHAS):
            rep = verify_mlp_equivalence(direct_of(alpha), mlp_of(alpha),
                                         trials=trials, tolerance=tolerance,
                                         image_shape=shape, seed=seed + k)
            worst = max(worst, rep.max_abs_deviation)
        rows.append((name, "exact", worst, tolerance))

    # scalar-field constructions verify on single-channel images; the
    # color ops need all three channels
    across_alphas("brightness",
                  lambda a: lambda img: adjust_brightness(img, a, clamp=False),
                  lambda a: build_brightness_mlp(a, h, w), (h, w))
    across_alphas("contrast",
                  lambda a: lambda img: adjust_contrast(img, a, clamp=False),
                  lambda a: build_contrast_mlp(a, h, w), (h, w))
    rep = verify_mlp_equivalence(
        lambda img: white_balance_grayworld(img, clamp=False),
        lambda img: build_white_balance_mlp(gray_world_gains(img), h, w),
        trials=trials, tolerance=tolerance, image_shape=(h, w, 3), seed=seed)
    rows.append(("white_balance", "exact", rep.max_abs_deviation, tolerance))
    across_alphas("saturation",
                  lambda a: lambda img: adjust_saturation(img, a, clamp=False),
                  lambda a: build_saturation_mlp(a, h, w), (h, w, 3))

    worst_fit = max(fit_tone_map_mlp(g)[1] for g in VERIFY_EXPONENTS)
    rows.append(("tone_map", "approx", worst_fit, tone_tolerance))
    return rows


def cmd_verify_ops(args):
    if args.trials < 1:
        raise UsageError(f"--trials must be >= 1, got {args.trials}")
    rows = _verify_rows(args.trials, args.tolerance, args.tone_tolerance, args.seed)
    print(f"{'operation':<14} {'kind':<7} {'max deviation':>14} "
          f"{'tolerance':>10} result")
    failures = 0
    for name, kind, deviation, tol in rows:
        ok = deviation <= tol
        failures += 0 if ok else 1
        print(f"{name:<14} {kind:<7} {deviation:>14.3e} {tol:>10.0e} "
              f"{'pass' if ok else 'FAIL'}")
    print(f"{len(rows) - failures}/{len(rows)} constructions verified")
    return EXIT_OK if failures == 0 else EXIT_VERIFY


def cmd_metrics(args):
    a = load_image(args.image_a)
    b = load_image(args.image_b)
    print(json.dumps(metric_report(a, b).to_dict()))
    return EXIT_OK


def cmd_interpolate(args):
    _check_alpha(args.alpha)
    a = load_image(args.image_a)
    b = load_image(args.image_b)
    save_image(args.output, blend(a, b, args.alpha))
    print(f"wrote {args.output}")
    return EXIT_OK


def cmd_serve(args):
    from .service import ServiceConfig, serve
    try:
        config = ServiceConfig.from_cli(model_dir=args.model_dir, host=args.host,
                                        port=args.port,
                                        max_upload_bytes=args.max_upload_bytes,
                                        request_timeout_seconds=args.timeout,
                                        static_dir=args.static_dir)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    serve(config)
    return EXIT_OK


_COMMANDS = {
    "train": cmd_train,
    "infer": cmd_infer,
    "verify-ops": cmd_verify_ops,
    "metrics": cmd_metrics,
    "interpolate": cmd_interpolate,
    "serve": cmd_serve,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage problems and 0 for --help
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CheckpointError, DecodeError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


def run():
    raise SystemExit(main())


if __name__ == "__main__":
    run()
