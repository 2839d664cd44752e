"""Compare the compiled and pure-numpy convolution backends.

Times the hot kernels (1x1 base convs, strided condition convs) and a full
model forward at a few resolutions, on both backends. The first compiled call
pays JIT cost, so each case is warmed before timing.

Usage:
    python benchmarks/bench_kernels.py [--repeats N] [--sizes 128,256,512]
"""

import argparse
import time

import numpy as np

from csrnet import kernels
from csrnet.model import ModelConfig, build_model, forward


def time_call(fn, repeats):
    fn()  # warm-up: JIT compile + caches
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_cases(size, rng):
    x = rng.random((64, size, size), dtype=np.float32)
    w1 = rng.standard_normal((64, 64, 1, 1)).astype(np.float32)
    b1 = np.zeros(64, dtype=np.float32)
    x7 = rng.random((3, size, size), dtype=np.float32)
    w7 = rng.standard_normal((32, 3, 7, 7)).astype(np.float32)
    b7 = np.zeros(32, dtype=np.float32)
    up = rng.standard_normal((64, size, size)).astype(np.float32)
    return [
        (f"conv 1x1 64ch fwd {size}px",
         lambda: kernels.conv2d_forward(x, w1, b1, 1, 0)),
        (f"conv 1x1 64ch bwd {size}px",
         lambda: kernels.conv2d_backward(x, w1, 1, 0, up)),
        (f"conv 7x7/s2 fwd   {size}px",
         lambda: kernels.conv2d_forward(x7, w7, b7, 2, 3)),
    ]


def bench_forward(size, rng):
    params = build_model(ModelConfig(), seed=0)
    img = rng.random((size, size, 3), dtype=np.float32)
    return (f"model forward     {size}px", lambda: forward(params, img))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--sizes", default="128,256,512",
                    help="comma-separated square image sizes")
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    backends = kernels.available_backends()
    print(f"backends: {', '.join(backends)}   repeats: {args.repeats} (best shown)")
    header = f"{'case':<26}" + "".join(f"{b:>12}" for b in backends)
    if len(backends) > 1:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))

    rng = np.random.default_rng(0)
    for size in sizes:
        rows = bench_cases(size, rng) + [bench_forward(size, rng)]
        for name, fn in rows:
            times = {}
            for backend in backends:
                kernels.set_backend(backend)
                times[backend] = time_call(fn, args.repeats)
            line = f"{name:<26}" + "".join(f"{times[b] * 1e3:>10.2f}ms" for b in backends)
            if len(backends) > 1:
                line += f"{times['numpy'] / times['numba']:>9.1f}x"
            print(line)
    kernels.set_backend(backends[0])


if __name__ == "__main__":
    main()
