"""Compare the compiled and pure-Python scalar kernels.

Usage::

    python benchmarks/bench_kernels.py [--n 100000] [--repeat 5]

Prints the best-of-``repeat`` wall time per kernel and backend, the
speedup, and the largest absolute disagreement between backends.
"""
import argparse
import timeit

import numpy as np

from curvadapt import kernels


def cases(n, rng):
    u = rng.uniform(-0.4, 0.4, n)
    rho = rng.uniform(-1.0, 1.0, n)
    mus = rng.choice([1.0, -1.0, 0.0, 1e-13], size=n)
    lams = rng.uniform(-3.0, 3.0, n)
    return {
        "table_sweep": lambda k: k.table_sweep(1.8304877217124520, 1.0, u, rho)[0],
        "fcos_fsinc_array": lambda k: k.fcos_fsinc_array(mus, 0.7)[1],
        "focal_radius": lambda k: np.array([k.focal_radius(a, b) for a, b in zip(lams, mus)]),
        "offset_shape": lambda k: np.array([k.offset_shape(a, b, c)[0] for a, b, c in zip(lams, mus, u)]),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--n", type=int, default=100_000)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    backends = kernels.backends()
    if "cython" not in backends:
        print("compiled backend unavailable; timing the Python fallback only")
    rng = np.random.default_rng(args.seed)
    print(f"n = {args.n}, best of {args.repeat}")
    print(f"{'kernel':<18}" + "".join(f"{b:>12}" for b in backends) + f"{'speedup':>10}{'max diff':>12}")
    for name, fn in cases(args.n, rng).items():
        times, outs = {}, {}
        for b, mod in backends.items():
            outs[b] = fn(mod)
            times[b] = min(timeit.repeat(lambda: fn(mod), number=1, repeat=args.repeat))
        line = f"{name:<18}" + "".join(f"{times[b] * 1e3:>10.2f}ms" for b in backends)
        if "cython" in backends:
            a, b = outs["python"], outs["cython"]
            same = (a == b) | (np.isnan(a) & np.isnan(b))  # also equal infinities
            with np.errstate(invalid="ignore"):
                diff = float(np.max(np.where(same, 0.0, np.abs(a - b))))
            line += f"{times['python'] / times['cython']:>9.1f}x{diff:>12.2e}"
        else:
            line += f"{'-':>10}{'-':>12}"
        print(line)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
