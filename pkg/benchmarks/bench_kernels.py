#!/usr/bin/env python3
"""Benchmark the compiled matching kernels against the pure-Python fallback.

Usage: python3 benchmarks/bench_kernels.py [--repeats 5]

Covers the two hot paths (pairwise IoU + greedy matching) at several box
counts, then times a full simulated annotation run under each backend in a
subprocess (backend selection happens at import).
"""
from __future__ import annotations

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from iadet._kernels import pure

try:
    from iadet._kernels import _core as compiled
except ImportError:
    compiled = None


def random_boxes(rng, n):
    xy = rng.uniform(0, 1000, size=(n, 2))
    wh = rng.uniform(5, 120, size=(n, 2))
    return np.hstack([xy, xy + wh])


def time_backend(impl, preds, gts, scores, repeats):
    order = np.asarray(sorted(range(len(preds)), key=lambda i: (-scores[i], i)), dtype=np.int64)
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        ious = impl.iou_matrix(preds, gts)
        impl.greedy_match(order, ious, 0.5)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_kernels(repeats):
    rng = np.random.default_rng(0)
    print(f"{'P x G':>12} {'pure':>12} {'compiled':>12} {'speedup':>9}")
    for n_pred, n_gt in [(10, 5), (50, 30), (200, 100), (1000, 400)]:
        preds = random_boxes(rng, n_pred)
        gts = random_boxes(rng, n_gt)
        scores = rng.uniform(0, 1, n_pred)
        t_pure = time_backend(pure, preds, gts, scores, repeats)
        if compiled is None:
            print(f"{n_pred:>6}x{n_gt:<5} {t_pure * 1e3:>10.3f}ms {'n/a':>12} {'n/a':>9}")
            continue
        t_comp = time_backend(compiled, preds, gts, scores, repeats)
        print(
            f"{n_pred:>6}x{n_gt:<5} {t_pure * 1e3:>10.3f}ms {t_comp * 1e3:>10.3f}ms "
            f"{t_pure / t_comp:>8.1f}x"
        )


SIM_SNIPPET = """
import time
from iadet import KERNEL_BACKEND
from iadet.simulator import SimulationConfig, simulate
from iadet.synth import make_synthetic_records

records = make_synthetic_records(420, seed=13)
config = SimulationConfig(seed=7)
t0 = time.perf_counter()
report = simulate(records, config)
print(f"  {KERNEL_BACKEND:>8}: {time.perf_counter() - t0:.3f}s "
      f"(improvement {report.improvement_percent:.1f}%)")
"""


def bench_simulation():
    print("\nfull 420-image simulated run per backend (tiny per-image box counts,")
    print("so kernel choice barely matters here; it matters for bulk evaluation):")
    sys.stdout.flush()
    for force_pure in ("0", "1"):
        env = {**os.environ, "IADET_PURE_KERNELS": force_pure}
        subprocess.run([sys.executable, "-c", SIM_SNIPPET], env=env, check=True)


if __name__ == "__main__":
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()
    if compiled is None:
        print("note: compiled kernels unavailable, showing pure timings only")
    bench_kernels(args.repeats)
    bench_simulation()
