"""Compare the compiled and NumPy kernel backends.

Times each kernel on the same inputs, then times an end-to-end
``hypermhs report`` in a subprocess per backend.  Run with
``python3 benchmarks/bench_kernels.py``.
"""
import argparse
import os
import subprocess
import sys
import timeit
from pathlib import Path

import numpy as np

from hypermhs._kernels import available, gauss_rule

ROOT = Path(__file__).resolve().parent.parent


def kernel_cases(nodes: int, letters: int, rng):
    x, w, Q = gauss_rule(nodes)
    vals = rng.normal(size=(nodes, letters)) + 1j * rng.normal(size=(nodes, letters))
    s = np.sqrt(np.exp(1j * np.linspace(0, 1.0, nodes)))
    A = [rng.normal(size=(letters,) * k) + 0j for k in (1, 2, 3)]
    B = [rng.normal(size=(letters,) * k) + 0j for k in (1, 2, 3)]
    return {
        "track_sqrt": lambda m: m.track_sqrt(s, s[0]),
        "segment_signature": lambda m: m.segment_signature(vals, 0.1, Q, w, 3),
        "chen_product": lambda m: m.chen_product(A, B, 3),
    }


def bench_kernels(nodes: int, letters: int, repeat: int) -> None:
    backends = available()
    cases = kernel_cases(nodes, letters, np.random.default_rng(0))
    print(f"kernels ({nodes} nodes, {letters} letters, best of {repeat})")
    for name, fn in cases.items():
        times = {b: min(timeit.repeat(lambda: fn(m), number=200, repeat=repeat)) / 200 for b, m in backends.items()}
        line = "  ".join(f"{b} {t * 1e6:8.1f} us" for b, t in times.items())
        ratio = f"  speedup {times['python'] / times['cython']:.1f}x" if "cython" in times else ""
        print(f"  {name:18s} {line}{ratio}")


def bench_report(curve: str) -> None:
    print(f"end-to-end report on {curve}")
    for backend in [b for b in ("python", "cython") if b in available()]:
        env = dict(os.environ, HYPERMHS_KERNELS="python" if backend == "python" else "auto")
        cmd = [sys.executable, "-m", "hypermhs", "report", "--curve", str(ROOT / "curves" / curve), "--seed", "1"]
        t = timeit.default_timer()
        subprocess.run(cmd, env=env, check=True, capture_output=True)
        print(f"  {backend:8s} {timeit.default_timer() - t:6.2f} s")


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nodes", type=int, default=32)
    ap.add_argument("--letters", type=int, default=3)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--curve", default="genus3.json")
    args = ap.parse_args(argv)
    bench_kernels(args.nodes, args.letters, args.repeat)
    bench_report(args.curve)


if __name__ == "__main__":
    main()
