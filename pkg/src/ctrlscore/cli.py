"""Command-line interface.

Exit status is 0 on success, 2 for invalid input and 3 for numerical
failures.  ``--output records`` prints one JSON object per line with sorted
keys and full-precision floats, so equal runs give byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from . import experiments as ex
from .centrality import control_energy_centralities, generalized_scores
from .datadriven import (
    check_spanning,
    generate_trajectories,
    gramians_datadriven,
    read_trajectories,
    write_trajectories,
)
from .errors import NumericalError, ValidationError
from .gramian import BACKENDS, DEFAULT_LEGENDRE_ORDER, compute_gramians, load_gramians, save_gramians
from .networks import BUILTIN_IDS, builtin_system
from .optimize import (
    DEFAULT_ALPHA0,
    DEFAULT_EPS,
    DEFAULT_MAX_ITERS,
    DEFAULT_RHO,
    DEFAULT_SIGMA,
    KINDS,
    Objective,
    solve,
    uniqueness_certificate,
)
from .sysmodel import build_system, load_network
from .transition import DEFAULT_DTAU

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 2, 3
ZERO_CLIP = 1e-9


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _positive(kind):
    def conv(text):
        v = kind(text)
        if not v > 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return v
    return conv


def _network_args(p, required=True):
    p.add_argument("--network", required=required,
                   help=f"network file or built-in id ({', '.join(BUILTIN_IDS)})")
    p.add_argument("--dt", type=_positive(float), default=DEFAULT_DTAU,
                   help="integration and sampling step (default 1e-3)")


def _gramian_args(p):
    p.add_argument("--backend", choices=BACKENDS, default="quadrature")
    p.add_argument("--legendre-order", type=int, default=DEFAULT_LEGENDRE_ORDER)
    p.add_argument("--trajectories", help="trajectory file for the datadriven backend")


def _solver_args(p):
    p.add_argument("--kind", choices=KINDS, default="vcs")
    p.add_argument("--eps", type=_positive(float), default=DEFAULT_EPS)
    p.add_argument("--sigma", type=float, default=DEFAULT_SIGMA)
    p.add_argument("--rho", type=float, default=DEFAULT_RHO)
    p.add_argument("--alpha0", type=_positive(float), default=DEFAULT_ALPHA0)
    p.add_argument("--max-iters", type=_positive(int), default=DEFAULT_MAX_ITERS)


def _output_arg(p):
    p.add_argument("--output", choices=("table", "records"), default="table")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ctrlscore",
                     description="Controllability scores of linear time-varying network systems.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("score", help="compute a VCS or AECS score vector")
    _network_args(p, required=False)
    _gramian_args(p)
    _solver_args(p)
    _output_arg(p)
    p.add_argument("--gramian-file", help="precomputed Gramian bundle (skips recomputation)")

    p = sub.add_parser("gramian", help="precompute per-node Gramians into a bundle file")
    _network_args(p, required=False)
    _gramian_args(p)
    _output_arg(p)
    p.add_argument("--gramian-file", required=True, help="bundle to write (.npz)")

    p = sub.add_parser("certify", help="uniqueness certificate R and its verdict")
    _network_args(p)
    _output_arg(p)

    p = sub.add_parser("centrality", help="control energy centralities or per-snapshot scores")
    _network_args(p, required=False)
    _gramian_args(p)
    _solver_args(p)
    _output_arg(p)
    p.add_argument("--gramian-file", help="precomputed Gramian bundle")
    p.add_argument("--generalized", action="store_true",
                   help="per-snapshot scores of --kind instead of energy centralities")

    p = sub.add_parser("generate-trajectories", help="sample free responses from random unit initial states")
    _network_args(p)
    p.add_argument("--count", type=_positive(int), required=True, help="number of trajectories N")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trajectories", required=True, help="file to write")
    _output_arg(p)

    p = sub.add_parser("reproduce", help="rerun a benchmark table or the data-driven error study")
    p.add_argument("table", choices=("II", "III", "IV", "fig5"))
    p.add_argument("--out-dir", default=".", help="directory for the comparison files")
    p.add_argument("--backend", choices=("quadrature", "legendre", "lyapunov"), default="quadrature")
    p.add_argument("--dt", type=_positive(float), default=DEFAULT_DTAU)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=_positive(int), default=100, help="trials per N (fig5)")
    _output_arg(p)
    return parser


def _emit_records(records, out):
    for r in records:
        out.write(json.dumps(r, sort_keys=True, allow_nan=True) + "\n")


def _resolve_network(arg):
    if arg in BUILTIN_IDS:
        return builtin_system(arg)
    path = Path(arg)
    if not path.is_file():
        raise ValidationError(f"{arg}: neither a built-in network nor a readable file")
    return build_system(load_network(path))


def _labels(n, system=None):
    if system is not None and system.node_labels:
        return list(system.node_labels)
    return [str(i + 1) for i in range(n)]


def _load_gramians(args, from_file=True):
    """Exactly one source: a bundle file, trajectory data, or a network."""
    names = ("network", "gramian_file", "trajectories") if from_file else ("network", "trajectories")
    if sum(bool(getattr(args, s, None)) for s in names) != 1:
        flags = ", ".join("--" + s.replace("_", "-") for s in names)
        raise ValidationError(f"give exactly one of {flags}")
    if from_file and args.gramian_file:
        return load_gramians(args.gramian_file), None
    if args.trajectories:
        if args.backend != "datadriven":
            raise ValidationError("--trajectories requires --backend datadriven")
        return gramians_datadriven(read_trajectories(args.trajectories)), None
    if args.backend == "datadriven":
        raise ValidationError("the datadriven backend needs --trajectories")
    system = _resolve_network(args.network)
    return compute_gramians(system, args.backend, dtau=args.dt, order=args.legendre_order), system


def _solver_kwargs(args):
    return {"eps": args.eps, "sigma": args.sigma, "rho": args.rho,
            "alpha0": args.alpha0, "max_iters": args.max_iters}


def _fmt_score(v):
    return f"{0.0 if abs(v) < ZERO_CLIP else v:.3f}"


def cmd_score(args, out):
    gs, system = _load_gramians(args)
    rep = solve(Objective(args.kind, gs), **_solver_kwargs(args))
    labels = _labels(gs.n, system)
    if args.output == "records":
        recs = [{"record": "score", "kind": args.kind, "node": i + 1, "label": labels[i],
                 "p": float(v)} for i, v in enumerate(rep.p)]
        recs.append({"record": "report", "kind": args.kind, "backend": gs.backend,
                     "objective_value": rep.value, "iterations": rep.iterations,
                     "converged": rep.converged, "terminal_gap": rep.terminal_gap})
        _emit_records(recs, out)
    else:
        out.write(f"node  {args.kind.upper()}\n")
        for lab, v in zip(labels, rep.p):
            out.write(f"{lab:>4}  {_fmt_score(v)}\n")
        state = "converged" if rep.converged else "NOT converged"
        out.write(f"# {state} after {rep.iterations} iterations, objective {rep.value:.6g}, "
                  f"gap {rep.terminal_gap:.2e}, backend {gs.backend}\n")
    return EXIT_OK


def cmd_gramian(args, out):
    gs, _ = _load_gramians(args, from_file=False)
    save_gramians(gs, args.gramian_file)
    if args.output == "records":
        _emit_records([{"record": "gramian", "path": str(args.gramian_file), "n": gs.n,
                        "backend": gs.backend, "params": gs.params}], out)
    else:
        out.write(f"wrote {gs.n} Gramians ({gs.backend}) to {args.gramian_file}\n")
    return EXIT_OK


def cmd_certify(args, out):
    cert = uniqueness_certificate(_resolve_network(args.network), args.dt)
    if args.output == "records":
        _emit_records([{"record": "certificate", "det_R": cert.det_R,
                        "min_singular_value": cert.min_singular_value,
                        "singular_ratio": cert.singular_ratio, "verdict": cert.verdict}], out)
    else:
        out.write(f"det R            {cert.det_R:.6e}\n")
        out.write(f"sigma_min        {cert.min_singular_value:.6e}\n")
        out.write(f"sigma_min/max    {cert.singular_ratio:.6e}\n")
        out.write(f"verdict          {cert.verdict}\n")
    return EXIT_OK


def cmd_centrality(args, out):
    if args.generalized:
        if not args.network:
            raise ValidationError("per-snapshot scores need --network")
        if args.backend == "datadriven":
            raise ValidationError("per-snapshot scores need a model-based backend")
        system = _resolve_network(args.network)
        scores = generalized_scores(system, args.kind, args.backend, args.dt,
                                    args.legendre_order, **_solver_kwargs(args))
        labels = _labels(system.n, system)
        name = "G" + args.kind.upper()
        if args.output == "records":
            _emit_records([{"record": "generalized", "kind": name, "snapshot": k + 1,
                            "node": i + 1, "label": labels[i], "p": float(v),
                            "reading": "per-snapshot LTI"}
                           for k, p in enumerate(scores) for i, v in enumerate(p)], out)
        else:
            out.write("node" + "".join(f"  {name}({k + 1})" for k in range(len(scores))) + "\n")
            for i, lab in enumerate(labels):
                out.write(f"{lab:>4}" + "".join(f"  {_fmt_score(p[i]):>{len(name) + 3}}"
                                                for p in scores) + "\n")
        return EXIT_OK
    gs, system = _load_gramians(args)
    tables = control_energy_centralities(gs)
    labels = _labels(gs.n, system)
    if args.output == "records":
        _emit_records([{"record": "centrality", "index": k, "node": i + 1, "label": labels[i],
                        "value": float(v)} for k, t in tables.items()
                       for i, v in enumerate(t.values)], out)
    else:
        out.write(f"node  {'VCE':>9}  {'ACE':>11}  {'AC':>11}\n")
        for i, lab in enumerate(labels):
            out.write(f"{lab:>4}  {tables['VCE'].values[i]:9.3f}  {tables['ACE'].values[i]:11.3f}"
                      f"  {tables['AC'].values[i]:11.3f}\n")
    return EXIT_OK


def cmd_generate(args, out):
    bundle = generate_trajectories(_resolve_network(args.network), args.count, args.dt, args.seed)
    write_trajectories(bundle, args.trajectories)
    span = check_spanning(bundle)
    if args.output == "records":
        _emit_records([{"record": "trajectories", "path": str(args.trajectories), "n": bundle.n,
                        "N": bundle.N, "samples": len(bundle.times), "seed": args.seed,
                        "spanning": span.spanning, "rank": span.rank}], out)
    else:
        out.write(f"wrote {bundle.N} trajectories x {len(bundle.times)} samples to "
                  f"{args.trajectories} (rank of X(0): {span.rank}/{bundle.n})\n")
    return EXIT_OK


def cmd_reproduce(args, out):
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    if args.table == "fig5":
        errors = ex.reproduce_fig5(trials=args.trials, seed=args.seed, dtau=args.dt)
        path = out_dir / "fig5_errors.dat"
        ex.write_fig5(errors, path)
        med = ex.fig5_summary(errors)
        if args.output == "records":
            _emit_records([{"record": "fig5", "N": N, "median": m, "max": float(errors[N].max()),
                            "min": float(errors[N].min()), "trials": len(errors[N])}
                           for N, m in med.items()], out)
        else:
            out.write("   N  median max-rel-error\n")
            for N, m in med.items():
                out.write(f"{N:>4}  {m:.3e}\n")
            out.write(f"# samples in {path} ({time.perf_counter() - t0:.1f} s)\n")
        return EXIT_OK
    fn = {"II": ex.reproduce_table2, "III": ex.reproduce_table3, "IV": ex.reproduce_table4}
    cells = fn[args.table](args.backend, args.dt)
    path = out_dir / f"table{args.table}_comparison.csv"
    ex.write_cells(cells, path)
    facts = ex.ordering_facts(cells) if args.table == "IV" else {}
    if args.output == "records":
        _emit_records([{"record": "cell", "table": c.table, "column": c.column, "node": c.node,
                        "computed": c.computed, "reference": c.reference, "diff": c.diff,
                        "tol": c.tol, "ok": c.ok} for c in cells]
                      + [{"record": "fact", "claim": k, "holds": v} for k, v in facts.items()], out)
    else:
        columns = list(dict.fromkeys(c.column for c in cells))
        for col in columns:
            cs = [c for c in cells if c.column == col]
            bad = [c.node for c in cs if not c.ok]
            worst = max(c.diff for c in cs)
            status = "ok" if not bad else f"MISMATCH at node(s) {', '.join(map(str, bad))}"
            out.write(f"{col:<16} max |diff| {worst:.4f}  {status}\n")
        for k, v in facts.items():
            out.write(f"{'holds' if v else 'FAILS'}: {k}\n")
        n_bad = sum(not c.ok for c in cells)
        out.write(f"# {len(cells) - n_bad}/{len(cells)} cells within tolerance; details in {path} "
                  f"({time.perf_counter() - t0:.1f} s)\n")
    return EXIT_OK


COMMANDS = {
    "score": cmd_score,
    "gramian": cmd_gramian,
    "certify": cmd_certify,
    "centrality": cmd_centrality,
    "generate-trajectories": cmd_generate,
    "reproduce": cmd_reproduce,
}


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args, out)
    except ValidationError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INVALID
    except NumericalError as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        return EXIT_NUMERICAL
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INVALID
    except np.linalg.LinAlgError as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        return EXIT_NUMERICAL


def main_entry():
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
