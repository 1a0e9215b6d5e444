"""Single-core throughput measurements for the hot pixel paths."""

from __future__ import annotations

import time

import numpy as np

from .frames import EquirectFrame, Frame
from .projection import ProjectionParams, to_equirect
from .yaw import recenter

RECENTER_TARGET_FPS = 120.0
PROJECT_TARGET_FPS = 15.0
TOLERANCE = 2.0  # soft targets: pass at half speed


def _random_equirect(rng, width: int) -> EquirectFrame:
    return EquirectFrame(rng.integers(0, 256, (width // 2, width, 3), dtype=np.uint8))


def bench_recenter(width: int = 2048, frames: int = 60, seed: int = 0) -> dict:
    rng = np.random.default_rng(seed)
    frame = _random_equirect(rng, width)
    times = _time_iterations(lambda i: recenter(frame, 23.0 + i), frames, warmup=2)
    return _report("recenter", width, times, RECENTER_TARGET_FPS)


def bench_to_equirect(width: int = 2048, frames: int = 8, seed: int = 0) -> dict:
    rng = np.random.default_rng(seed)
    params = ProjectionParams(out_width=width)
    src = Frame(rng.integers(0, 256, (width * 3 // 8, width * 5 // 8, 3), dtype=np.uint8))
    times = _time_iterations(lambda i: to_equirect(src, params), frames, warmup=2)
    return _report("to_equirect", width, times, PROJECT_TARGET_FPS)


def _time_iterations(fn, frames: int, warmup: int) -> list:
    for i in range(warmup):  # first call also pays JIT compilation
        fn(i)
    times = []
    for i in range(frames):
        t0 = time.perf_counter()
        fn(i)
        times.append(time.perf_counter() - t0)
    return times


def _report(name: str, width: int, times: list, target_fps: float) -> dict:
    # fastest observed frame, timeit-style: scheduler interference only ever
    # adds time, so the minimum is the machine's actual capability
    best = min(times)
    fps = 1.0 / best if best > 0 else float("inf")
    return {
        "name": name,
        "width": width,
        "frames": len(times),
        "seconds": round(sum(times), 4),
        "best_frame_s": round(best, 5),
        "fps": round(fps, 2),
        "target_fps": target_fps,
        "floor_fps": target_fps / TOLERANCE,
        "pass": fps >= target_fps / TOLERANCE,
    }


def run_benchmarks(width: int = 2048, seed: int = 0) -> list:
    return [bench_recenter(width, seed=seed), bench_to_equirect(width, seed=seed)]
