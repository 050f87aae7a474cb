"""Command-line front end: ``greedyseq {generate,analyze,compare,scan,figures}``.

Exit codes: 0 success, 2 configuration error, 3 numeric gate failure,
4 I/O or parse error. Errors are reported as one JSON object on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

from .diagnostics import METRICS, KernelRequired, metric_reports
from .experiments import ScanSpec, compare, figure_data, parse_seed, run_scan
from .io import atomic_write_text, read_points, write_metric_csv, write_points
from .kernel import bernoulli2, green, kernel_from_json, logsin
from .sequence import GateError, SolverConfig, default_config, greedy

EXIT_OK, EXIT_CONFIG, EXIT_GATE, EXIT_IO = 0, 2, 3, 4


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _kernel(args, required: bool = True):
    if getattr(args, "kernel_file", None):
        try:
            return kernel_from_json(Path(args.kernel_file).read_text(encoding="utf-8"))
        except OSError as exc:
            raise CliError(f"cannot read kernel file: {exc}", EXIT_IO) from None
    name = getattr(args, "kernel", None)
    if name is None:
        if required:
            raise CliError("a kernel is required (--kernel or --kernel-file)", EXIT_CONFIG)
        return None
    if name == "bernoulli2":
        return bernoulli2()
    if name == "logsin":
        return logsin()
    if name == "green":
        if args.dim is None or args.dim < 2:
            raise CliError("--kernel green needs --dim >= 2", EXIT_CONFIG)
        return green(args.dim, args.cutoff or {2: 32, 3: 16}.get(args.dim, 8))
    raise CliError(f"unknown kernel {name!r}", EXIT_CONFIG)


def _ints(text: str | None):
    if not text:
        return None
    return [int(t) for t in text.split(",") if t.strip()]


def _names(text: str | None):
    if not text:
        return None
    return [t.strip() for t in text.split(",") if t.strip()]


def _seed(text: str):
    """Inline ``1/3,4/5`` list, or the path of a point CSV whose rows seed the run."""
    path = Path(text)
    if path.suffix == ".csv" or path.is_file():
        try:
            ps = read_points(path)
        except OSError as exc:
            raise CliError(f"cannot read seed file: {exc}", EXIT_IO) from None
        except ValueError as exc:
            raise CliError(f"seed file: {exc}", EXIT_IO) from None
        return ps.points, None
    try:
        return parse_seed(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise CliError(f"bad seed {text!r}: {exc}", EXIT_CONFIG) from None


def cmd_generate(args) -> int:
    kernel = _kernel(args)
    seed, literals = _seed(args.seed)
    cfg = default_config(kernel)
    overrides = {}
    if args.mode:
        overrides["mode"] = args.mode
    if args.grid:
        overrides["grid_size"] = args.grid
    if args.tie_break:
        overrides["tie_break"] = args.tie_break
    if args.eps_pot is not None:
        overrides["eps_pot"] = args.eps_pot
    cfg = SolverConfig(**{**cfg.to_dict(), "eps_pot": None, **overrides})
    ps = greedy(kernel, seed, args.n, cfg, seed_literals=literals)
    out = Path(args.out)
    try:
        write_points(out, ps)
    except OSError as exc:
        raise CliError(f"cannot write output: {exc}", EXIT_IO) from None
    print(json.dumps({"points": str(out), "n": len(ps), "max_gate_residual": ps.provenance.get("max_gate_residual")}))
    return EXIT_OK


def cmd_analyze(args) -> int:
    try:
        ps = read_points(args.points)
    except OSError as exc:
        raise CliError(f"cannot read points: {exc}", EXIT_IO) from None
    except ValueError as exc:
        raise CliError(str(exc), EXIT_IO) from None
    if args.dim is None:
        args.dim = ps.dim
    kernel = _kernel(args, required=False)
    metrics = _names(args.metrics)
    reports = metric_reports(ps, kernel, _ints(args.checkpoints), metrics, args.window)
    rows = [row for r in reports for row in r.rows(metrics)]
    out = Path(args.out)
    write_metric_csv(out, rows)
    atomic_write_text(out.with_suffix(".json"), json.dumps([r.to_dict() for r in reports], indent=2))
    print(json.dumps({"metrics": str(out), "rows": len(rows)}))
    return EXIT_OK


def cmd_compare(args) -> int:
    gens = args.gen or []
    if len(gens) < 2:
        raise CliError("need two generators", EXIT_CONFIG)
    metrics = _names(args.metrics) or ["energy", "w2_exact", "star_discrepancy"]
    res = compare(gens, args.n, metrics, _ints(args.checkpoints), window=args.window)
    out = Path(args.out)
    lines = ["generator,n,metric,value,tail_bound"]
    lines += [f"{g},{n},{m},{v:.17g},{t:.17g}" for g, n, m, v, t in res.rows()]
    atomic_write_text(out / "compare.csv", "\n".join(lines) + "\n")
    fits = {g: {m: asdict(f) for m, f in fs.items()} for g, fs in res.fits.items()}
    atomic_write_text(out / "fits.json", json.dumps(fits, indent=2))
    print(json.dumps({"table": str(out / "compare.csv"), "generators": res.labels}))
    return EXIT_OK


def cmd_scan(args) -> int:
    try:
        spec = ScanSpec.from_json(Path(args.spec).read_text(encoding="utf-8"))
    except OSError as exc:
        raise CliError(f"cannot read spec: {exc}", EXIT_IO) from None
    except (TypeError, json.JSONDecodeError) as exc:
        raise CliError(f"bad experiment file: {exc}", EXIT_CONFIG) from None
    root = run_scan(spec).write(args.out)
    print(json.dumps({"results": str(root)}))
    return EXIT_OK


def cmd_figures(args) -> int:
    kernel = _kernel(args)
    if args.points:
        ps = read_points(args.points)
    else:
        seed, literals = _seed(args.seed)
        ps = greedy(kernel, seed, args.n, seed_literals=literals)
    n_list = _ints(args.n_list) or [len(ps)]
    paths = figure_data(ps, kernel, n_list, args.out, args.grid)
    print(json.dumps({k: str(v) for k, v in paths.items()}))
    return EXIT_OK


def _add_kernel_args(p):
    p.add_argument("--kernel", choices=["bernoulli2", "logsin", "green"])
    p.add_argument("--kernel-file", help="kernel JSON document")
    p.add_argument("--dim", type=int)
    p.add_argument("--cutoff", type=int, help="frequency cutoff of the Green kernel")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="greedyseq", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a greedy sequence")
    _add_kernel_args(p)
    p.add_argument("--seed", required=True,
                   help="comma-separated seed coordinates (e.g. 1/3,4/5) or a point CSV")
    p.add_argument("--n", type=int, required=True, help="total number of points")
    p.add_argument("--grid", type=int)
    p.add_argument("--mode", choices=["exact_piecewise", "grid_refine", "grid"])
    p.add_argument("--tie-break", choices=["smallest", "largest"])
    p.add_argument("--eps-pot", type=float, help="gate tolerance on the potential at each new point")
    p.add_argument("--out", default="points.csv")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("analyze", help="diagnostics of a point file")
    p.add_argument("--points", required=True)
    _add_kernel_args(p)
    p.add_argument("--metrics", help=f"comma-separated subset of {','.join(METRICS)}")
    p.add_argument("--checkpoints", help="comma-separated prefix sizes (default powers of 2)")
    p.add_argument("--window", type=int, help="frequency window K")
    p.add_argument("--out", default="metrics.csv")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("compare", help="compare generators at shared checkpoints")
    p.add_argument("--gen", action="append", help="e.g. greedy:bernoulli2:1/3,4/5, kronecker:sqrt2, vdc:2, random:7")
    p.add_argument("--n", type=int, default=4096)
    p.add_argument("--metrics")
    p.add_argument("--checkpoints")
    p.add_argument("--window", type=int)
    p.add_argument("--out", default="compare")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("scan", help="run an experiment file")
    p.add_argument("--spec", required=True)
    p.add_argument("--out", default="results")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("figures", help="potential curves and scatter tables")
    _add_kernel_args(p)
    p.add_argument("--seed", default="0.3,0.8")
    p.add_argument("--n", type=int, default=250)
    p.add_argument("--points")
    p.add_argument("--n-list")
    p.add_argument("--grid", type=int, default=2048)
    p.add_argument("--out", default="figures")
    p.set_defaults(func=cmd_figures)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        return args.func(args)
    except CliError as exc:
        code, msg = exc.code, str(exc)
    except GateError as exc:
        code, msg = EXIT_GATE, str(exc)
    except KernelRequired as exc:
        code, msg = EXIT_CONFIG, str(exc)
    except OSError as exc:
        code, msg = EXIT_IO, str(exc)
    except ValueError as exc:
        code, msg = EXIT_CONFIG, str(exc)
    sys.stderr.write(json.dumps({"error": msg, "exit_code": code}) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
