"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--m 200] [--steps 10000] [--repeat 3]

Both implementations are run on identical inputs; the script also reports the
largest difference between their outputs.
"""
import argparse
import time

import numpy as np

from prflow import kernels


def _best(fn, repeat):
    best, out = np.inf, None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_cn(impl, m, steps, repeat):
    x = np.linspace(0.0, 1.0, m + 1)
    u0 = np.ascontiguousarray(np.sin(np.pi * x[1:-1]))
    r = 1e-3 * m * m
    zeros = np.zeros(steps)
    return _best(lambda: impl.cn_march(u0, r, 0.0, zeros, zeros, steps, 100, 1e300), repeat)


def bench_rk4(impl, steps, repeat):
    return _best(lambda: impl.rk4_logistic(0.5, 1.0, 1e-4, steps, 1e15), repeat)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--m", type=int, default=200)
    ap.add_argument("--steps", type=int, default=10000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    impls = kernels.implementations()
    if "cython" not in impls:
        print("compiled extension not built; only the fallback is available")
    results = {}
    for name, impl in impls.items():
        t_cn, cn = bench_cn(impl, args.m, args.steps, args.repeat)
        t_rk, rk = bench_rk4(impl, args.steps, args.repeat)
        results[name] = (t_cn, cn, t_rk, rk)
        print(f"{name:8s} cn_march {t_cn * 1e3:9.2f} ms   rk4_logistic {t_rk * 1e3:9.2f} ms")
    if len(results) == 2:
        py, cy = results["python"], results["cython"]
        print(f"speedup  cn_march {py[0] / cy[0]:9.1f} x    rk4_logistic {py[2] / cy[2]:9.1f} x")
        d_cn = np.max(np.abs(np.asarray(py[1][0]) - np.asarray(cy[1][0])))
        d_rk = np.max(np.abs(np.asarray(py[3][0]) - np.asarray(cy[3][0])))
        print(f"max |python - cython|: cn_march {d_cn:.2e}, rk4_logistic {d_rk:.2e}")


if __name__ == "__main__":
    main()
