"""Command-line entry point.

Exit codes: 0 success, 1 invalid input, 2 resource cap exceeded.
"""
import argparse
import datetime
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from catsampler import __version__, _backend
from catsampler import experiments as ex
from catsampler.errors import ResourceError, ValidationError
from catsampler.optics_core import haar_random_unitary, permanent, read_matrix, write_matrix
from catsampler.sampler import draw_samples, build_distribution, samples_to_csv


def _fmt(x):
    return f"{x:.9g}"


def _manifest(args, argv, extra=None):
    man = {
        "tool": "catsampler",
        "version": __version__,
        "command": args.command,
        "argv": list(argv),
        "backend": _backend.BACKEND,
        "threads": _backend.worker_count(),
        "numpy": np.__version__,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }
    man.update(extra or {})
    return man


def _write_manifest(path, man):
    with open(path, "w") as fh:
        json.dump(man, fh, indent=1, sort_keys=True, default=str)
        fh.write("\n")


def _manifest_path(args, *outputs):
    if args.manifest:
        return args.manifest
    for out in outputs:
        if out:
            return str(out) + ".manifest.json"
    return None


def _emit(args, payload, text_lines, argv, manifest_extra=None):
    man = _manifest(args, argv, manifest_extra)
    path = _manifest_path(args, *getattr(args, "_outputs", ()))
    if path:
        _write_manifest(path, man)
    if args.json:
        payload = dict(payload, manifest=man)
        print(json.dumps(payload, indent=1, sort_keys=True, default=str))
    else:
        for line in text_lines:
            print(line)


def cmd_simulate(args, argv):
    cfg = ex.load_config(args.config)
    samples = cfg.samples if args.samples is None else args.samples
    seed = cfg.seed if args.seed is None else args.seed
    if samples < 0:
        raise ValidationError("--samples must be >= 0")
    dist = build_distribution(cfg.unitary, cfg.register, cfg.cutoff)
    draws = draw_samples(dist, samples, seed) if samples else []
    args._outputs = (args.out_dist, args.out_samples)
    if args.out_dist:
        with open(args.out_dist, "w") as fh:
            dist.to_csv(fh)
        if args.json:
            with open(Path(args.out_dist).with_suffix(".json"), "w") as fh:
                json.dump(dist.to_json(), fh, indent=1)
    if args.out_samples:
        with open(args.out_samples, "w") as fh:
            samples_to_csv(draws, fh)
        if args.json:
            with open(Path(args.out_samples).with_suffix(".json"), "w") as fh:
                json.dump({"seed": seed, "samples": [list(s) for s in draws]}, fh)
    payload = {
        "m": cfg.register.m,
        "cutoffs": list(cfg.cutoff.per_mode_max),
        "n_signatures": len(dist.probabilities),
        "captured_mass": dist.captured_mass,
        "samples": len(draws),
    }
    lines = [
        f"modes: {cfg.register.m}",
        f"branches: {dist.metadata['n_branches']}",
        f"cutoffs: {list(cfg.cutoff.per_mode_max)}",
        f"signatures: {len(dist.probabilities)}",
        f"captured_mass: {_fmt(dist.captured_mass)}",
        f"samples: {len(draws)}",
    ]
    if not args.out_dist:
        top = np.argsort(-dist.probabilities, kind="stable")[:10]
        lines.append("most likely signatures:")
        lines += [f"  {tuple(int(c) for c in dist.signatures[i])}  {_fmt(dist.probabilities[i])}" for i in top]
    extra = {
        "config": os.path.abspath(args.config),
        "inputs": cfg.raw,
        "seed": seed,
        "samples": samples,
        "captured_mass": dist.captured_mass,
        "metadata": dist.metadata,
    }
    _emit(args, payload, lines, argv, extra)


def cmd_hom(args, argv):
    rep = ex.hom_check(args.alpha)
    lines = [
        f"alpha: {_fmt(rep.alpha)}",
        f"P(1,1): {_fmt(rep.p11)}",
        f"P(2,0): {_fmt(rep.p20)}",
        f"P(0,2): {_fmt(rep.p02)}",
        f"gamma(2,0): {_fmt(rep.gamma20.real)}",
        f"gamma(0,2): {_fmt(rep.gamma02.real)}",
        f"|P(2,0)-1/2|: {_fmt(rep.dev20)}",
        f"|P(0,2)-1/2|: {_fmt(rep.dev02)}",
        f"signs ok: {rep.signs_ok}",
        f"captured_mass: {_fmt(rep.captured_mass)}",
    ]
    _emit(args, ex.report_dict(rep), lines, argv, {"captured_mass": rep.captured_mass})


def cmd_reduction(args, argv):
    rep = ex.fock_reduction_check(args.n, args.m, args.alpha, args.seed)
    lines = [
        f"n: {rep.n}  m: {rep.m}  alpha: {_fmt(rep.alpha)}  seed: {rep.seed}",
        f"signatures compared: {rep.n_signatures}",
        f"max |gamma_cat - gamma_fock|: {_fmt(rep.max_deviation)}",
        f"C = deviation / alpha^2: {_fmt(rep.fitted_c)}",
    ]
    _emit(args, ex.report_dict(rep), lines, argv, {"seed": args.seed})


def cmd_bound(args, argv):
    rep = ex.bound_check(args.n, args.alpha, args.c, args.k)
    lines = [_fmt(rep.probability)]
    if args.verbose:
        lines += [
            f"threshold c*n^-k: {_fmt(rep.threshold)}",
            f"satisfied: {rep.satisfied}",
            f"underflow: {rep.underflow}",
        ]
    _emit(args, ex.report_dict(rep), lines, argv)


def cmd_permanent(args, argv):
    a = read_matrix(args.matrix, validate=False)
    p = permanent(a)
    _emit(
        args,
        {"n": a.shape[0], "permanent": [p.real, p.imag]},
        [f"{_fmt(p.real)} {_fmt(p.imag)}"],
        argv,
        {"matrix": os.path.abspath(args.matrix)},
    )


def cmd_haar(args, argv):
    u = haar_random_unitary(args.m, args.seed)
    write_matrix(args.out, u.entries)
    args._outputs = (args.out,)
    _emit(args, {"m": args.m, "seed": args.seed, "out": args.out},
          [f"wrote {args.m}x{args.m} Haar unitary to {args.out}"], argv, {"seed": args.seed})


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--manifest", help="where to write the run manifest")

    p = argparse.ArgumentParser(prog="catsampler", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"catsampler {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", parents=[common], help="build and sample a distribution from a JSON config")
    s.add_argument("--config", required=True)
    s.add_argument("--samples", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--out-dist")
    s.add_argument("--out-samples")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("hom", parents=[common], help="two odd cats on a balanced splitter")
    s.add_argument("--alpha", type=float, required=True)
    s.set_defaults(func=cmd_hom)

    s = sub.add_parser("reduction", parents=[common], help="small-alpha odd cats vs single photons")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--alpha", type=float, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.set_defaults(func=cmd_reduction)

    s = sub.add_parser("bound", parents=[common], help="single-photon fidelity (alpha^2 csch alpha^2)^n")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--alpha", type=float, required=True)
    s.add_argument("--c", type=float, default=1.0)
    s.add_argument("--k", type=float, default=1.0)
    s.add_argument("-v", "--verbose", action="store_true")
    s.set_defaults(func=cmd_bound)

    s = sub.add_parser("permanent", parents=[common], help="permanent of a matrix JSON file")
    s.add_argument("--matrix", required=True)
    s.set_defaults(func=cmd_permanent)

    s = sub.add_parser("haar", parents=[common], help="write a seeded Haar-random unitary")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_haar)
    return p


def run_cli(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    args._outputs = ()
    try:
        args.func(args, argv)
    except ResourceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValidationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
