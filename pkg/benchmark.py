#!/usr/bin/env python3
"""Benchmark gsnrprobe performance."""

import subprocess
import sys
import tempfile
import time
from typing import Callable


def _report(times: list[float]) -> dict:
    avg = sum(times) / len(times)
    min_time = min(times)
    max_time = max(times)

    print("─" * 60)
    print(f"  Average: {avg:.3f}s")
    print(f"  Min:     {min_time:.3f}s")
    print(f"  Max:     {max_time:.3f}s")
    print()

    return {"times": times, "avg": avg, "min": min_time, "max": max_time}


def benchmark_call(label: str, func: Callable[[], object], runs: int = 3) -> dict:
    """Run a library call multiple times and measure performance."""
    times = []

    print(f"Running: {label}")
    print(f"Iterations: {runs}")
    print("─" * 60)

    for i in range(runs):
        start = time.perf_counter()
        func()
        elapsed = time.perf_counter() - start
        times.append(elapsed)
        print(f"  Run {i+1}: {elapsed:.3f}s")

    return _report(times)


def benchmark_command(cmd: list[str], runs: int = 3) -> dict:
    """Run a command multiple times and measure performance."""
    times = []

    print(f"Running: {' '.join(cmd)}")
    print(f"Iterations: {runs}")
    print("─" * 60)

    for i in range(runs):
        start = time.perf_counter()
        result = subprocess.run(cmd, capture_output=True, text=True)
        elapsed = time.perf_counter() - start
        times.append(elapsed)
        status = "" if result.returncode == 0 else f" (exit {result.returncode})"
        print(f"  Run {i+1}: {elapsed:.3f}s{status}")

    return _report(times)


if __name__ == "__main__":
    from gsnrprobe.config import ProbeSettings
    from gsnrprobe.experiment import build_default_scenario, run_experiment

    print("=" * 60)
    print("gsnrprobe Performance Benchmark")
    print("=" * 60)
    print()

    benchmarks = {}

    print("Test 1: Noiseless closure (one seed, six paths)")
    noiseless = build_default_scenario(
        seeds=(0,), settings=ProbeSettings(q_noise_sigma_db=0.0, module_offset_db=0.0)
    )
    benchmarks["noiseless"] = benchmark_call(
        "run_experiment(noiseless)", lambda: run_experiment(noiseless)
    )

    print("Test 2: Default campaign (200 seeds)")
    default = build_default_scenario()
    benchmarks["default"] = benchmark_call(
        "run_experiment(default)", lambda: run_experiment(default)
    )

    print("Test 3: experiment command")
    with tempfile.TemporaryDirectory() as out_dir:
        benchmarks["cli"] = benchmark_command(
            [sys.executable, "-m", "gsnrprobe.cli", "experiment", "--out-dir", out_dir]
        )

    print("=" * 60)
    print("SUMMARY")
    print("=" * 60)
    print()
    print(f"{'Test':<30} {'Avg Time':<15} {'Min':<15}")
    print("─" * 60)
    rows = [
        ("Noiseless closure", "noiseless"),
        ("Default campaign", "default"),
        ("experiment command", "cli"),
    ]
    for title, key in rows:
        print(f"{title:<30} {benchmarks[key]['avg']:.3f}s{'':<10} {benchmarks[key]['min']:.3f}s")
    print()
