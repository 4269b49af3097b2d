"""Command-line entry point: ``mrslmr {fit,eval,inject,synth,report,run}``."""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import io
from .errors import DataIOError, SlmrError
from .evaluation import make_synthetic_crossview, pairwise_eval
from .noise import KINDS, PIXEL_RANGE, NoiseSpec, apply_noise
from .solver import SolverConfig, fit


def _add_solver_args(p):
    d = SolverConfig()
    p.add_argument("--lambda1", type=float, default=d.lambda1)
    p.add_argument("--lambda2", type=float, default=d.lambda2)
    p.add_argument("--dim", type=int, default=d.p, help="subspace dimension p")
    p.add_argument("--variant", choices=("modal", "l1"), default=d.variant)
    p.add_argument("--pca-dim", type=int, default=d.pca_dim, help="0 disables PCA")
    p.add_argument("--mu0", type=float, default=d.mu0)
    p.add_argument("--rho", type=float, default=d.rho)
    p.add_argument("--mu-max", type=float, default=d.mu_max)
    p.add_argument("--eps", type=float, default=d.epsilon)
    p.add_argument("--max-iter", type=int, default=d.t_max)
    p.add_argument("--inner-max", type=int, default=d.inner_max)
    p.add_argument("--seed", type=int, default=d.seed)


def _config(args):
    return SolverConfig(
        lambda1=args.lambda1, lambda2=args.lambda2, p=args.dim, variant=args.variant,
        mu0=args.mu0, rho=args.rho, mu_max=args.mu_max, epsilon=args.eps,
        t_max=args.max_iter, inner_max=args.inner_max, seed=args.seed,
        pca_dim=args.pca_dim,
    )


def _noise_spec(args, manifest):
    side = args.image_side if args.image_side is not None else manifest.pixel_image_side
    return NoiseSpec(args.kind, args.magnitude, args.seed,
                     (args.pixel_low, args.pixel_high), side)


def cmd_fit(args):
    cfg = _config(args)
    train, _ = io.load_dataset(args.train)
    result = fit(train, cfg)
    io.save_model(result.model, args.out)
    if args.history:
        io.save_history(result.state.history, args.history)
    if args.report:
        meta = result.model.meta
        run = {"iterations": meta["iterations"], "final_residuals": meta["final_residuals"],
               "converged": meta["converged"]}
        io.save_report(io.ExperimentReport(cfg.to_dict(), [run]), args.report)
    meta = result.model.meta
    print(f"iterations={meta['iterations']} residuals="
          + " ".join(f"{r:.3e}" for r in meta["final_residuals"]))


def cmd_eval(args):
    model = io.load_model(args.model)
    test, _ = io.load_dataset(args.test)
    ev = pairwise_eval(model, test)
    run = ev.to_dict()
    run["view_ids"] = list(test.view_ids)
    report = io.ExperimentReport({"model": str(args.model), "test": str(args.test)}, [run])
    io.save_report(report, args.out)
    print(f"mACC={ev.macc:.4f}")


def cmd_inject(args):
    data, manifest = io.load_dataset(args.__dict__["in"])
    spec = _noise_spec(args, manifest)
    noisy = apply_noise(data, spec)
    io.save_dataset(noisy, args.out, name=f"{manifest.name}+{spec.kind}",
                    pixel_image_side=manifest.pixel_image_side)


def cmd_synth(args):
    data = make_synthetic_crossview(args.classes, args.per_class, args.dim,
                                    args.noise_std, args.seed)
    io.save_dataset(data, args.out, name=f"synthetic-seed{args.seed}")
    if args.test_out:
        test = make_synthetic_crossview(args.classes, args.test_per_class or args.per_class,
                                        args.dim, args.noise_std, args.seed,
                                        sample_seed=args.test_seed)
        io.save_dataset(test, args.test_out, name=f"synthetic-seed{args.seed}-test")


def _format_matrix(acc, ids):
    width = max(8, *(len(str(i)) for i in ids)) + 2
    lines = ["gallery\\probe".ljust(width + 4) + "".join(str(i).rjust(width) for i in ids)]
    for vid, row in zip(ids, acc):
        lines.append(str(vid).ljust(width + 4) + "".join(f"{100 * a:{width}.1f}" for a in row))
    return "\n".join(lines)


def cmd_report(args):
    report = io.load_report(args.__dict__["in"])
    for i, run in enumerate(report.runs):
        if "acc_matrix" not in run:
            print(f"run {i}: no accuracy matrix")
            continue
        acc = np.asarray(run["acc_matrix"])
        ids = run.get("view_ids") or [f"v{j + 1}" for j in range(acc.shape[0])]
        print(_format_matrix(acc, ids))
        print(f"mACC = {100 * np.mean(acc):.2f}%")
    if report.noise:
        print("noise: " + json.dumps(report.noise, sort_keys=True))


def cmd_run(args):
    cfg = _config(args)
    specs = []
    if args.kind:
        _, manifest = io.load_dataset(args.train)
        side = args.image_side if args.image_side is not None else manifest.pixel_image_side
        specs.append(NoiseSpec(args.kind, args.magnitude, args.noise_seed,
                               (args.pixel_low, args.pixel_high), side))
    report = io.run_experiment(args.train, args.test, cfg, specs, args.out, args.history,
                               corrupt_test=args.corrupt_test, timing=not args.no_timing)
    print(f"mACC={report.runs[0]['macc']:.4f}")


def _add_noise_args(p, required):
    p.add_argument("--kind", choices=KINDS, required=required)
    p.add_argument("--magnitude", type=float, required=required,
                   help="dBW power, pixel ratio, patch side or sample ratio")
    p.add_argument("--image-side", type=int, default=None)
    p.add_argument("--pixel-low", type=float, default=PIXEL_RANGE[0])
    p.add_argument("--pixel-high", type=float, default=PIXEL_RANGE[1])


def build_parser():
    parser = argparse.ArgumentParser(prog="mrslmr", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="learn a projection from a training manifest")
    p.add_argument("--train", required=True)
    _add_solver_args(p)
    p.add_argument("--out", required=True, help="model path")
    p.add_argument("--history", help="residual history CSV")
    p.add_argument("--report", help="optional JSON report with the config used")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("eval", help="pairwise cross-view evaluation")
    p.add_argument("--model", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("inject", help="corrupt a dataset")
    p.add_argument("--in", required=True)
    _add_noise_args(p, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_inject)

    p = sub.add_parser("synth", help="write a synthetic two-view dataset")
    p.add_argument("--classes", type=int, required=True)
    p.add_argument("--per-class", type=int, required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--noise-std", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--test-out", help="also write a test split sharing the geometry")
    p.add_argument("--test-per-class", type=int, default=None)
    p.add_argument("--test-seed", type=int, default=1)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("report", help="pretty-print a report")
    p.add_argument("--in", required=True)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("run", help="corrupt, fit and evaluate in one go")
    p.add_argument("--train", required=True)
    p.add_argument("--test", required=True)
    _add_solver_args(p)
    _add_noise_args(p, required=False)
    p.add_argument("--noise-seed", type=int, default=0)
    p.add_argument("--corrupt-test", action="store_true")
    p.add_argument("--no-timing", action="store_true",
                   help="write zero wall times so outputs are byte-reproducible")
    p.add_argument("--out", required=True)
    p.add_argument("--history")
    p.set_defaults(func=cmd_run)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except SlmrError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DataIOError.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
