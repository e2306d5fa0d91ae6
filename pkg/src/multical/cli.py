"""Command-line interface.

Exit codes: 0 on success, 2 for usage or input errors, 3 when an input
exceeds a size or budget guard, 1 for solver failures.
"""

import argparse
import sys

from . import audit, lowerbound, measures, recalibration, synth
from .errors import GuardError, MulticalError, NoProgress, SolverFailure
from .io import dump_json, format_dataset, read_dataset, write_text
from .simplex import SUM_TOL, greedy_packing

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_GUARD = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _floats(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _ints(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _points(text):
    """Points separated by ``;``, coordinates by ``,``."""
    return [_floats(p) for p in text.split(";") if p.strip()]


def _emit(text, path):
    if path:
        write_text(path, text)
    else:
        sys.stdout.write(text)


def _record(pairs):
    lines = []
    for key, val in pairs:
        if isinstance(val, float):
            val = repr(float(val))
        elif isinstance(val, (list, tuple)):
            val = ",".join(repr(float(x)) if isinstance(x, float) else str(x) for x in val)
        lines.append(f"{key}={val}")
    return "\n".join(lines) + "\n"


# -- commands -----------------------------------------------------------------

def cmd_measure(args):
    emp = read_dataset(args.dataset, args.tolerance)
    name = args.measure
    if name in ("ssce", "psce") and args.m is None:
        raise UsageError(f"measure {name} needs --m")
    if name == "smooth_subset" and not args.T:
        raise UsageError("measure smooth_subset needs --T")
    if name == "ssce":
        rep = measures.ssce_m(emp, args.m)
    elif name == "psce":
        rep = measures.psce_oracle(emp, args.m, args.directions, args.seed)
    elif name == "smooth_subset":
        rep = measures.subset_smooth_ce(emp, args.T)
    else:
        rep = measures.MEASURES[name](emp)
    meta = {k: v for k, v in rep.metadata.items() if k != "phi"}
    rep = measures.CalibrationReport(rep.measure_name, rep.value, metadata=meta)
    _emit(rep.to_record(), args.out)


def _run_audit(emp, args, holdout, seed):
    if args.family == "psmooth":
        m = args.m if args.m is not None else emp.k
        return audit.audit_projected_smooth(emp, m, args.alpha, args.delta, c0=args.c0,
                                            r=args.r, max_n=args.max_n, holdout=holdout,
                                            seed=seed)
    if args.family == "sigmoid":
        return audit.audit_sigmoid(emp, args.L, args.alpha, args.delta, c3=args.c3, r=args.r,
                                   max_n=args.max_n, holdout=holdout, seed=seed)
    if args.degree is None:
        raise UsageError("family lowdeg needs --degree")
    return audit.audit_low_degree(emp, args.degree, args.alpha, args.delta, max_n=args.max_n,
                                  holdout=holdout, seed=seed)


def cmd_audit(args):
    emp = read_dataset(args.dataset, args.tolerance)
    wit = _run_audit(emp, args, args.holdout, args.seed)
    if args.witness_out:
        write_text(args.witness_out, dump_json(wit.to_dict()))
    meta = wit.metadata
    _emit(_record([
        ("family", args.family), ("alpha", args.alpha), ("beta", meta["beta"]),
        ("r", meta["r"]), ("degree", meta["degree"]), ("implied_n", meta["implied_n"]),
        ("achieved_correlation", wit.achieved_correlation),
        ("detected", str(meta["detected"]).lower()),
        ("range_certificate", wit.range_certificate),
        ("norm_certificate", [float(x) for x in wit.norm_certificate]),
        ("in_sample", str(meta["in_sample"]).lower()), ("seed", args.seed)]), args.out)


def cmd_recalibrate(args):
    emp = read_dataset(args.dataset, args.tolerance)

    def auditor(e, seed):
        return _run_audit(e, args, 0.0, seed)

    out, trace = recalibration.recalibrate(emp, auditor, args.beta, args.max_iters, args.seed)
    write_text(args.out, format_dataset(out))
    if args.trace_out:
        rows = trace.to_csv_rows()
        write_text(args.trace_out, "".join(
            ",".join(repr(float(x)) if isinstance(x, float) else str(x) for x in row) + "\n"
            for row in rows))
    if args.map_out:
        write_text(args.map_out, dump_json({"steps": trace.final_map.to_list()}))
    sys.stdout.write(_record([
        ("iterations", len(trace.iterations)), ("initial_loss", trace.initial_loss),
        ("final_loss", trace.losses[-1]), ("final_correlation", trace.final_correlation),
        ("recheck_correlation", trace.recheck_correlation), ("stopped_by", trace.stopped_by),
        ("beta", args.beta), ("seed", args.seed)]))


def cmd_lab(args):
    if args.lab == "packing":
        p = greedy_packing(args.k, args.eps, seed=args.seed)
        rows = [{"k": args.k, "eps": args.eps, "V": len(p),
                 "min_pairwise": float(p.min_pairwise_distance()),
                 "min_vertex": float(p.min_vertex_distance()), "seed": args.seed}]
        text = lowerbound.rows_to_csv(rows, list(rows[0]))
    elif args.lab == "hardfamily":
        fam = lowerbound.build_hard_family(args.k, args.eps, args.seed)
        row = {"k": args.k, "eps": args.eps, "V": fam.size,
               "certified_witness_value": fam.certified_witness_value(),
               "bound": args.eps / 12}
        if fam.size <= measures.FSCE_GUARD:
            row["fsce"] = measures.fsce_exact(fam.full_support()).value
        row["seed"] = args.seed
        text = lowerbound.rows_to_csv([row], list(row))
    else:
        test = {"consistency": lowerbound.collision_consistency_test,
                "ece": lowerbound.collision_ece_test}[args.test]
        rows = lowerbound.sweep_rows(args.k, args.eps, args.n, args.trials, test,
                                     args.seed, args.threads)
        text = lowerbound.rows_to_csv(rows)
    _emit(text, args.out)


def cmd_synth(args):
    if args.generator == "calibrated":
        if args.prior == "dirichlet":
            prior = synth.Prior.dirichlet(args.alpha_vec or [1.0] * args.k)
        elif args.prior == "uniform_vertices":
            prior = synth.Prior.uniform_vertices(args.k)
        else:
            if not args.points:
                raise UsageError("prior fixed_points needs --points")
            prior = synth.Prior.fixed_points(args.points)
        emp = synth.gen_calibrated(prior, args.n, args.seed, args.stratified, args.exact)
        certified = 0.0
    elif args.generator == "subset":
        emp, certified = synth.gen_subset_violation(args.k, args.T, args.magnitude, args.n,
                                                    args.seed, args.gap, args.exact)
    else:
        a = args.a if args.a else [1.0] * args.k
        if len(a) != args.k:
            raise UsageError("--a needs k entries")
        emp, certified = synth.gen_sigmoid_violation(
            args.k, a, args.b, args.L, args.magnitude, args.n, args.seed,
            support=args.points, j=args.j, j2=args.j2, exact=args.exact)
    write_text(args.out, format_dataset(emp))
    sys.stdout.write(_record([("generator", args.generator), ("n", emp.n), ("k", emp.k),
                              ("certified_alpha", float(certified)), ("seed", args.seed)]))


# -- parser -------------------------------------------------------------------

def _global_flags(p, suppress):
    default = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--seed", type=int, default=default(0), help="random seed (default 0)")
    p.add_argument("--threads", type=int, default=default(1), help="worker threads")
    p.add_argument("--max-n", type=int, default=default(None), dest="max_n",
                   help="refuse audits whose implied sample size exceeds this")
    p.add_argument("--tolerance", type=float, default=default(SUM_TOL),
                   help="simplex sum tolerance when reading datasets")


def _audit_flags(p):
    p.add_argument("--family", choices=["psmooth", "sigmoid", "lowdeg"], required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--m", type=float, help="projection size for psmooth (default k)")
    p.add_argument("--L", type=float, default=2.0, help="sigmoid slope")
    p.add_argument("--degree", type=int, help="kernel degree for lowdeg")
    p.add_argument("--r", type=float, help="norm radius (default from the family)")
    p.add_argument("--c0", type=float, default=4.0)
    p.add_argument("--c3", type=float, default=1.0)
    p.add_argument("--delta", type=float, default=0.1)


def build_parser():
    parser = argparse.ArgumentParser(prog="multical",
                                     description="Multiclass calibration measures and auditors.")
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, **kw):
        p = sub.add_parser(name, **kw)
        _global_flags(p, suppress=True)
        return p

    p = add("measure", help="compute a calibration error")
    p.add_argument("dataset")
    p.add_argument("--measure", required=True, choices=sorted(measures.MEASURES))
    p.add_argument("--m", type=float)
    p.add_argument("--T", type=_ints, help="subset for smooth_subset, e.g. 0,2")
    p.add_argument("--directions", type=int, default=64)
    p.add_argument("--out")
    p.set_defaults(func=cmd_measure)

    p = add("audit", help="run an auditor and export its witness")
    p.add_argument("dataset")
    _audit_flags(p)
    p.add_argument("--holdout", type=float, default=audit.DEFAULT_HOLDOUT)
    p.add_argument("--witness-out", dest="witness_out")
    p.add_argument("--out")
    p.set_defaults(func=cmd_audit)

    p = add("recalibrate", help="post-process predictions until the auditor is silent")
    p.add_argument("dataset")
    _audit_flags(p)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--max-iters", type=int, dest="max_iters")
    p.add_argument("--out", required=True, help="recalibrated dataset path")
    p.add_argument("--trace-out", dest="trace_out")
    p.add_argument("--map-out", dest="map_out")
    p.set_defaults(func=cmd_recalibrate)

    p = add("lab", help="lower-bound experiments, CSV output")
    p.add_argument("lab", choices=["packing", "hardfamily", "birthday"])
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--eps", type=float, default=1 / 3)
    p.add_argument("--n", type=_ints, default=[5])
    p.add_argument("--trials", type=int, default=lowerbound.MIN_TRIALS)
    p.add_argument("--test", choices=["consistency", "ece"], default="consistency")
    p.add_argument("--out")
    p.set_defaults(func=cmd_lab)

    p = add("synth", help="write a synthetic dataset")
    p.add_argument("generator", choices=["calibrated", "subset", "sigmoid"])
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--prior", choices=["dirichlet", "uniform_vertices", "fixed_points"],
                   default="dirichlet")
    p.add_argument("--alpha-vec", type=_floats, dest="alpha_vec")
    p.add_argument("--points", type=_points, help="e.g. '0.5,0.5;0.2,0.8'")
    p.add_argument("--stratified", action="store_true")
    p.add_argument("--exact", action="store_true", help="write the weighted population")
    p.add_argument("--T", type=_ints, default=[0])
    p.add_argument("--magnitude", type=float, default=0.2)
    p.add_argument("--gap", type=float, default=1.0)
    p.add_argument("--a", type=_floats)
    p.add_argument("--b", type=float, default=0.0)
    p.add_argument("--L", type=float, default=2.0)
    p.add_argument("--j", type=int, default=0)
    p.add_argument("--j2", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"multical: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GuardError as exc:
        print(f"multical: guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (NoProgress, SolverFailure) as exc:
        print(f"multical: failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (MulticalError, ValueError, OSError) as exc:
        print(f"multical: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
