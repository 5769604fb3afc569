"""Numba vs NumPy path-tracking kernels.

The backend is fixed at import time by KCENSUS_NUMBA, so each backend runs in
its own subprocess. Reported times exclude numba compilation (one warm-up
solve runs first).

    python benchmarks/bench_kernels.py [--repeat 3] [--networks cycle4 cycle6 path7]
"""
import argparse
import json
import os
import subprocess
import sys
import time
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent

WORKER = """
import json, sys, time
import numpy as np
from kcensus import _kernels
from kcensus.algsys import kuramoto_system
from kcensus.homotopy import solve
from kcensus.network import load_network, resolve_generic

names, repeat = sys.argv[1].split(","), int(sys.argv[2])
out = {"backend": _kernels.BACKEND, "solve": {}, "eval_us": None}
solve(load_network("networks/cycle4.json"), seed=0, threads=1)  # warm-up / compile
for name in names:
    net = load_network(f"networks/{name}.json")
    times = []
    for r in range(repeat):
        t0 = time.perf_counter()
        sols = solve(net, seed=r, threads=1)
        times.append(time.perf_counter() - t0)
    out["solve"][name] = {"best_s": min(times), "paths": sols.raw_path_count}

net, _ = resolve_generic(load_network("networks/cycle6.json"), 0)
sys_ = kuramoto_system(net)
x = np.exp(1j * np.linspace(0.1, 1.0, net.n))
f = np.empty(net.n, complex)
J = np.empty((net.n, net.n), complex)
expo, C = np.ascontiguousarray(sys_.exponents), np.ascontiguousarray(sys_.coeffs)
_kernels.residual_jacobian(expo, C, x, f, J)
k = 20000
t0 = time.perf_counter()
for _ in range(k):
    _kernels.residual_jacobian(expo, C, x, f, J)
out["eval_us"] = (time.perf_counter() - t0) / k * 1e6
print(json.dumps(out))
"""


def run(backend: str, names, repeat: int) -> dict:
    env = dict(os.environ, KCENSUS_NUMBA="1" if backend == "numba" else "0")
    proc = subprocess.run(
        [sys.executable, "-c", WORKER, ",".join(names), str(repeat)],
        cwd=ROOT,
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--networks", nargs="+", default=["cycle4", "cycle6", "k4", "path7"])
    args = parser.parse_args()

    t0 = time.perf_counter()
    results = {b: run(b, args.networks, args.repeat) for b in ("numpy", "numba")}
    print(f"{'network':<10} {'paths':>6} {'numpy [s]':>10} {'numba [s]':>10} {'speedup':>8}")
    for name in args.networks:
        a, b = results["numpy"]["solve"][name], results["numba"]["solve"][name]
        print(f"{name:<10} {a['paths']:>6} {a['best_s']:>10.3f} {b['best_s']:>10.3f} {a['best_s'] / b['best_s']:>7.1f}x")
    a, b = results["numpy"]["eval_us"], results["numba"]["eval_us"]
    print(f"residual+Jacobian (C6): numpy {a:.1f} us, numba {b:.1f} us, {a / b:.1f}x")
    print(f"total {time.perf_counter() - t0:.1f} s")


if __name__ == "__main__":
    main()
