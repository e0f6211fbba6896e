"""Compiled vs pure-Python kernel throughput.

Times ``track_circle`` on both backends directly, then the full flagship
scenario once per backend (each in a fresh interpreter, since the backend
is chosen at import).

    python benchmarks/bench_kernels.py [--steps N] [--repeat R]
"""

from __future__ import annotations

import argparse
import importlib
import os
import subprocess
import sys
import timeit
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parents[1]
FLAGSHIP = ROOT / "scenarios" / "flagship.toml"

_RUN = """
import time
from gvf_formation import kernels
from gvf_formation.runner import run
from gvf_formation.scenario import load_scenario
sc = load_scenario({path!r})
best = float("inf")
for _ in range({repeat}):
    t0 = time.perf_counter()
    run(sc, keep_trace=False)
    best = min(best, time.perf_counter() - t0)
print(kernels.BACKEND, best)
"""


def bench_track_circle(mod, steps: int, repeat: int) -> float:
    out = np.empty((steps, 5))

    def go():
        mod.track_circle(80.0, -20.0, 1.0, 11.0, 0.0, 0.0, 30.0, 0.002, 4.0, False,
                         9.81 / 11.0, 0.02, steps, False, out)

    return min(timeit.repeat(go, number=1, repeat=repeat))


def bench_flagship(pure: bool, repeat: int) -> tuple[str, float]:
    env = dict(os.environ)
    env.pop("GVF_FORMATION_PURE_PYTHON", None)
    if pure:
        env["GVF_FORMATION_PURE_PYTHON"] = "1"
    out = subprocess.run([sys.executable, "-c", _RUN.format(path=str(FLAGSHIP), repeat=repeat)],
                         env=env, capture_output=True, text=True, check=True)
    backend, secs = out.stdout.split()
    return backend, float(secs)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=100_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    py = importlib.import_module("gvf_formation._pykernels")
    try:
        cy = importlib.import_module("gvf_formation._ckernels")
    except ImportError:
        cy = None
        print("compiled extension not built; only the Python backend is timed")

    t_py = bench_track_circle(py, args.steps, args.repeat)
    print(f"track_circle  python  {args.steps / t_py:12.0f} steps/s")
    if cy is not None:
        t_cy = bench_track_circle(cy, args.steps, args.repeat)
        print(f"track_circle  cython  {args.steps / t_cy:12.0f} steps/s  ({t_py / t_cy:.1f}x)")

    runs = [bench_flagship(True, args.repeat)]
    if cy is not None:
        runs.append(bench_flagship(False, args.repeat))
    for backend, secs in runs:
        print(f"flagship run  {backend:6s}  {secs * 1000:10.1f} ms")
    return 0


if __name__ == "__main__":
    sys.exit(main())
