"""Wall time of a full fit as the sample count grows (fixed d and p)."""
import argparse
import time

import numpy as np

from mrslmr import SolverConfig, fit, make_synthetic_crossview


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--per-class", type=int, nargs="+", default=[10, 20, 40, 80])
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    prev = None
    print("     m   iters   seconds   ratio")
    for per in args.per_class:
        data = make_synthetic_crossview(3, per, 20, 0.05, 0)
        runs, iters = [], 0
        for _ in range(args.repeats):
            start = time.perf_counter()
            iters = fit(data, SolverConfig(), timing=False).state.t
            runs.append(time.perf_counter() - start)
        t = float(np.mean(runs))
        ratio = f"{t / prev:7.2f}" if prev else "      -"
        print(f"{data.m:6d}  {iters:6d}  {t:8.3f}  {ratio}")
        prev = t


if __name__ == "__main__":
    main()
