"""Compare the compiled and pure-Python kernel backends.

Each backend runs in its own subprocess because the choice is pinned at
import time via ARPSWEEP_BACKEND.  The workloads are one long dissipative
sweep and a small amplitude/rate grid; the first evolve call inside each
subprocess is a discarded warm-up so compilation cost is reported
separately from steady-state throughput.

Usage: python3 benchmarks/benchmark_backends.py [--repeats N]
"""
import argparse
import json
import os
import subprocess
import sys

_WORKER = r"""
import json, sys, time
t0 = time.perf_counter()
from arpsweep.core import DensityState, PulseProfile, make_sweep_params
from arpsweep.propagator import IntegratorSettings, evolve
from arpsweep.sweeps import GridSpec, grid_sweep
from arpsweep._backend import BACKEND
import_s = time.perf_counter() - t0

repeats = int(sys.argv[1])
ground = DensityState.ground()
long_params = make_sweep_params(10.0, PulseProfile.rectangular(1.0),
                                duration=200.0, tau_c=1e-2)

t0 = time.perf_counter()
evolve(ground, long_params, IntegratorSettings(sample_count=64))
warmup_s = time.perf_counter() - t0

def best_of(fn):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)

single_s = best_of(lambda: evolve(ground, long_params))

spec = GridSpec(omega1_values=[0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0],
                rate_values=[0.5, 1.0, 2.0, 3.0, 4.0, 5.0],
                delta_omega=10.0, tau_c=1e-2)
grid_s = best_of(lambda: grid_sweep(spec))

print(json.dumps({"backend": BACKEND, "import_s": import_s,
                  "warmup_s": warmup_s, "single_s": single_s,
                  "grid_s": grid_s}))
"""


def run_backend(name: str, repeats: int) -> dict:
    env = dict(os.environ, ARPSWEEP_BACKEND=name)
    proc = subprocess.run([sys.executable, "-c", _WORKER, str(repeats)],
                          env=env, capture_output=True, text=True, check=True)
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=3,
                        help="timed repetitions per workload; best is kept "
                             "(default 3)")
    args = parser.parse_args()

    results = {name: run_backend(name, args.repeats)
               for name in ("numpy", "numba")}
    for name, r in results.items():
        if r["backend"] != name:
            print(f"warning: requested {name} backend but got "
                  f"{r['backend']}; is numba installed?", file=sys.stderr)

    rows = [("single 200 ms sweep", "single_s"),
            ("48-cell grid sweep", "grid_s")]
    width = max(len(label) for label, _ in rows)
    print(f"{'workload':<{width}}  {'numpy':>10}  {'numba':>10}  {'speedup':>8}")
    for label, key in rows:
        np_s = results["numpy"][key]
        nb_s = results["numba"][key]
        print(f"{label:<{width}}  {np_s:>9.3f}s  {nb_s:>9.3f}s  "
              f"{np_s / nb_s:>7.1f}x")
    print(f"\nnumba import+first-call overhead: "
          f"{results['numba']['import_s'] + results['numba']['warmup_s']:.2f}s "
          f"(numpy: "
          f"{results['numpy']['import_s'] + results['numpy']['warmup_s']:.2f}s)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
