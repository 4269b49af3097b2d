"""mACC of both variants as the fraction of outlier training samples grows.

Outliers are uniform over the range of the clean training data. Each cell is
averaged over ``--seeds`` corruption draws.
"""
import argparse

import numpy as np

from mrslmr import SolverConfig, fit, make_synthetic_crossview, pairwise_eval
from mrslmr.noise import replace_outliers


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ratios", type=float, nargs="+", default=[0.0, 0.1, 0.2, 0.3])
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--lambda1", type=float, default=1e-3)
    ap.add_argument("--full-range", action="store_true",
                    help="draw outliers from [0, 255] instead of the data range")
    args = ap.parse_args()

    geo = dict(classes=3, per_class_per_view=20, d=20, noise_std=0.05, seed=0)
    train = make_synthetic_crossview(**geo)
    test = make_synthetic_crossview(**geo, sample_seed=1)
    span = (0.0, 255.0) if args.full_range else (float(train.X.min()), float(train.X.max()))

    print("ratio  " + "  ".join(f"{v:>7}" for v in ("modal", "l1")))
    for ratio in args.ratios:
        row = []
        for variant in ("modal", "l1"):
            cfg = SolverConfig(variant=variant, lambda1=args.lambda1)
            accs = [pairwise_eval(fit(replace_outliers(train, ratio, s, span), cfg,
                                      timing=False).model, test).macc
                    for s in range(args.seeds)]
            row.append(np.mean(accs))
        print(f"{ratio:5.2f}  " + "  ".join(f"{100 * a:7.2f}" for a in row))


if __name__ == "__main__":
    main()
