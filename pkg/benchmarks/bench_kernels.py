"""Time the compiled kernels against the pure-Python reference.

Both backends are driven through the same raw entry points with identical
arguments, results are checked for bitwise equality first, then each
workload is timed (best of --repeats).  Run from a checkout with the
package installed:

    python benchmarks/bench_kernels.py
    python benchmarks/bench_kernels.py --iters 5000 --steps 161
"""

import argparse
import time

from xorlab.kernels import available_backends, get_backend

# boolean xor, flattened sample-major
XOR_XS = [0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 1.0, 1.0]
XOR_TS = [0.0, 1.0, 1.0, 0.0]

SIZES = [2, 2, 1]
ACTS = [1, 1]           # tanh, tanh
N_WEIGHTS = 9           # 2*(2+1) + 1*(2+1)


def _best_of(fn, repeats):
    fn()                # warmup
    best = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        dt = time.perf_counter() - t0
        best = dt if best is None else min(best, dt)
    return best


def _workloads(args):
    def train(mod):
        return mod.train_run(SIZES, ACTS, XOR_XS, XOR_TS, 0.5,
                             args.iters, 0.0, 1, args.seed, 1.0, 0)

    base = get_backend("python").rng_uniform(args.seed, N_WEIGHTS)
    axis = [-5.0 + 10.0 * k / (args.steps - 1) for k in range(args.steps)]

    def grid(mod):
        return mod.project_grid(SIZES, ACTS, base, XOR_XS, XOR_TS,
                                0, 4, axis, axis)

    return [
        (f"train_run {args.iters} iters per-sample", train),
        (f"project_grid {args.steps}x{args.steps}", grid),
    ]


def main(argv=None):
    ap = argparse.ArgumentParser(
        description="compare kernel backends on training and projection")
    ap.add_argument("--iters", type=int, default=2000,
                    help="training iterations per run (default 2000)")
    ap.add_argument("--steps", type=int, default=101,
                    help="projection grid steps per axis (default 101)")
    ap.add_argument("--repeats", type=int, default=5,
                    help="timing repeats, best is reported (default 5)")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    names = available_backends()
    if "c" not in names:
        print("compiled backend not available; nothing to compare")
        return 1
    backends = [(n, get_backend(n)) for n in ("python", "c")]

    print(f"backends: {', '.join(n for n, _ in backends)}")
    for label, work in _workloads(args):
        results = [work(mod) for _, mod in backends]
        if results[0] != results[1]:
            print(f"{label}: BACKEND MISMATCH")
            return 1
        times = [_best_of(lambda m=mod: work(m), args.repeats)
                 for _, mod in backends]
        speedup = times[0] / times[1] if times[1] > 0 else float("inf")
        print(f"{label:38s} python {times[0] * 1e3:9.2f} ms   "
              f"c {times[1] * 1e3:9.2f} ms   speedup {speedup:6.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
