"""Command-line interface.

    qbound boundariness --in obj.json [--method auto|exact|iterative]
                        [--restarts N] [--max-iters K] [--tol T] [--seed S]
                        [--out report.json]
    qbound distance --in state.json [--out out.json]
    qbound experiment NAME [--samples N] [--seed S] [--csv out.csv]
                           [--resolution R]   (polytope_maps only)
    qbound validate --in obj.json

Exit status: 0 success / pass, 1 invalid input or failed experiment, 2 usage.
"""
import argparse
import json
import sys

import numpy as np

from . import io, linalg
from .boundariness import OptimizerConfig, boundariness
from .errors import QBoundError
from .experiments import EXPERIMENTS, ExperimentSpec, exp_polytope_maps, run_experiment
from .qobjects import QuantumState


class UsageError(Exception):
    pass


def _load(path):
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise QBoundError(f"{path} is not valid JSON: {exc}") from None
    try:
        return io.from_json(raw)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, QBoundError):
            raise
        raise QBoundError(f"malformed object: {exc!r}") from None


def _emit(obj, out=None):
    text = json.dumps(obj, indent=2)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def cmd_boundariness(args):
    obj = _load(args.inp)
    cfg = OptimizerConfig(
        restarts=args.restarts, rel_tol=args.tol, seed=args.seed, max_iters=args.max_iters
    )
    rep = boundariness(obj, method=args.method, cfg=cfg)
    _emit(io.report_to_json(rep), args.out)
    return 0


def cmd_distance(args):
    obj = _load(args.inp)
    if not isinstance(obj, QuantumState):
        raise QBoundError("distance expects a state file")
    rep = boundariness(obj)
    dist = linalg.trace_norm(obj.rho - rep.optimizer)
    _emit({
        "b": rep.b,
        "max_distance": dist,
        "expected": 2 * (1 - rep.b),
        "farthest_state": io.matrix_to_json(rep.optimizer),
        "farthest_vector": io.matrix_to_json(np.asarray(rep.witness).reshape(-1, 1)),
    }, args.out)
    return 0


def cmd_experiment(args):
    if args.name == "polytope_maps":
        res = exp_polytope_maps(args.resolution, csv_path=args.csv)
    else:
        spec = ExperimentSpec(args.name, samples=args.samples if args.samples else _default_samples(args.name),
                              seed=args.seed, output_path=args.csv or "")
        res = run_experiment(spec)
    _emit(res.summary())
    return 0 if res.passed else 1


def _default_samples(name):
    return {"qubit_crosscheck": 100, "submult": 50, "product_depolarizing": 20,
            "max_boundariness": 200, "state_tightness": 200, "lemma_R": 10}[name]


def cmd_validate(args):
    obj = _load(args.inp)
    kind = type(obj[0] if isinstance(obj, tuple) else obj).__name__
    print(f"valid {kind}")
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="qbound", description="Boundariness of quantum objects and polytopes.")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("boundariness", help="compute b(y) and its decomposition")
    b.add_argument("--in", dest="inp", required=True)
    b.add_argument("--method", choices=["auto", "exact", "iterative"], default="auto")
    b.add_argument("--restarts", type=int, default=16)
    b.add_argument("--max-iters", type=int, default=500)
    b.add_argument("--tol", type=float, default=1e-12)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out")
    b.set_defaults(func=cmd_boundariness)

    d = sub.add_parser("distance", help="farthest pure state from a density matrix")
    d.add_argument("--in", dest="inp", required=True)
    d.add_argument("--out")
    d.set_defaults(func=cmd_distance)

    e = sub.add_parser("experiment", help="run a seeded experiment")
    e.add_argument("name", choices=sorted(EXPERIMENTS))
    e.add_argument("--samples", type=int)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--csv")
    e.add_argument("--resolution", type=int, default=100, help="grid resolution for polytope_maps")
    e.set_defaults(func=cmd_experiment)

    v = sub.add_parser("validate", help="check an object file against its invariants")
    v.add_argument("--in", dest="inp", required=True)
    v.set_defaults(func=cmd_validate)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"qbound: error: {exc}", file=sys.stderr)
        return 2
    except QBoundError as exc:
        print(f"qbound: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"qbound: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
