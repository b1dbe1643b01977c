"""Command-line front end: curve, sweep, analytic, validate, generator.

Exit codes: 0 success, 1 usage error, 2 numerical failure or failed gate.
"""
from __future__ import annotations

import argparse
import csv
import datetime
import io
import json
import math
import platform
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__, analytic
from .chain import ChainSpec, build_dissipation_matrix, build_hop_matrix, effective_generator
from .errors import DomainError, NumericalFailure, SpecificationError, UsageError
from .fidelity import DEFAULT_GRID, OutputTrace, default_t_max, sweep
from .validation import run_validation

CURVE_HEADER = ("t", "F_opt", "rho", "sigma_re", "sigma_im")
SWEEP_HEADER = ("n", "boundary", "topology", "xi", "gamma", "t_star", "f_max")
ANALYTIC_HEADER = ("t", "rho", "sigma_re", "sigma_im", "f_closed_form", "f_pipeline")
CONFIG_KEYS = ("n", "n_list", "boundary", "topology", "xi", "gamma", "t_max", "grid", "format", "output")


def fmt(x) -> str:
    """Shortest representation with at most 12 significant digits."""
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    x = float(x)
    if x == 0.0:
        return "0"
    return format(x, ".12g")


def _num(x):
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return int(x)
    return float(fmt(x))


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def parse_n_list(text: str) -> list[int]:
    """'3,5,7' or '3..10' or '3-10' (ranges inclusive), mixed freely."""
    out = []
    for part in str(text).replace(" ", "").split(","):
        if not part:
            continue
        for sep in ("..", "-"):
            if sep in part:
                lo, hi = part.split(sep, 1)
                out.extend(range(int(lo), int(hi) + 1))
                break
        else:
            out.append(int(part))
    if not out:
        raise UsageError("empty --n-list")
    return out


@dataclass
class RunConfig:
    n: int = 3
    n_list: list | None = None
    boundary: str = "open"
    topology: str | None = None
    xi: float = 1.0
    gamma: float = 4.0
    t_max: float | None = None
    grid: int | None = None
    format: str = "csv"
    output: str | None = None

    def spec(self, n=None, topology=None) -> ChainSpec:
        return ChainSpec(n or self.n, self.boundary, topology or self.topology or "chained", self.xi, self.gamma)


def _load_config(args) -> RunConfig:
    values = {}
    if getattr(args, "config", None):
        with open(args.config) as fh:
            data = json.load(fh)
        unknown = set(data) - set(CONFIG_KEYS)
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        values.update(data)
    for key in CONFIG_KEYS:
        val = getattr(args, key, None)
        if val is not None:
            values[key] = val
    if "n_list" in values and not isinstance(values["n_list"], list):
        values["n_list"] = parse_n_list(values["n_list"])
    cfg = RunConfig(**values)
    if cfg.grid is not None and cfg.grid < 2:
        raise UsageError("--grid must be at least 2")
    if cfg.format not in ("csv", "json"):
        raise UsageError("--format must be csv or json")
    return cfg


def _meta(argv):
    return {
        "version": __version__,
        "argv": list(argv),
        "python": platform.python_version(),
        "numpy": np.__version__,
        "created": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }


def _emit(cfg: RunConfig, header, rows, meta=None):
    if cfg.format == "json":
        doc = {"columns": list(header), "rows": [{k: _num(v) for k, v in zip(header, r)} for r in rows]}
        if meta is not None:
            doc["meta"] = meta
        text = json.dumps(doc, indent=2, sort_keys=False) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for r in rows:
            writer.writerow([fmt(v) for v in r])
        text = buf.getvalue()
        if meta is not None:
            side = json.dumps(meta, indent=2) + "\n"
            if cfg.output:
                with open(cfg.output + ".meta.json", "w") as fh:
                    fh.write(side)
            else:
                sys.stderr.write(side)
    _write(cfg.output, text)


def _write(path, text):
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def read_csv_rows(text: str) -> list[dict]:
    """Parse emitted CSV back into typed rows."""
    rows = []
    for rec in csv.DictReader(io.StringIO(text)):
        row = {}
        for k, v in rec.items():
            if k in ("boundary", "topology"):
                row[k] = v
            elif k == "n":
                row[k] = int(v)
            else:
                row[k] = float(v)
        rows.append(row)
    return rows


# --- commands ------------------------------------------------------------------------

def cmd_curve(cfg: RunConfig, meta=None):
    spec = cfg.spec()
    t_max = cfg.t_max if cfg.t_max is not None else default_t_max(spec)
    grid = cfg.grid or DEFAULT_GRID
    times = np.linspace(0.0, t_max, grid)
    sig = OutputTrace(spec).signature(times)
    F = 0.5 + (sig.rho + 4 * np.abs(sig.sigma)) / 6
    rows = zip(times, F, sig.rho, sig.sigma.real, sig.sigma.imag)
    _emit(cfg, CURVE_HEADER, list(rows), meta)


def cmd_sweep(cfg: RunConfig, workers=1, meta=None):
    ns = cfg.n_list or [cfg.n]
    topologies = [cfg.topology] if cfg.topology else ["chained", "local"]
    specs = [cfg.spec(n, top) for n in ns for top in topologies]
    results = sweep(specs, cfg.t_max, cfg.grid or DEFAULT_GRID, workers=workers)
    failed = [r for r in results if r.error]
    for r in failed:
        print(f"row n={r.n} topology={r.topology}: {r.error}", file=sys.stderr)
    rows = [(r.n, r.boundary, r.topology, r.xi, r.gamma, r.t_star, r.f_max) for r in results]
    _emit(cfg, SWEEP_HEADER, rows, meta)
    return 2 if failed else 0


def cmd_analytic(cfg: RunConfig, meta=None):
    if cfg.n != 3:
        raise UsageError("closed forms exist for n = 3 only")
    topology = cfg.topology or "chained"
    variant = f"{cfg.boundary}-{topology}"
    ChainSpec(3, cfg.boundary, topology, cfg.xi, cfg.gamma)
    t_max = cfg.t_max if cfg.t_max is not None else default_t_max(cfg.spec())
    times = np.linspace(0.0, t_max, cfg.grid or DEFAULT_GRID)
    rho, sigma = analytic.signature(variant, times, cfg.xi, cfg.gamma)
    rho = np.broadcast_to(rho, times.shape)
    sigma = np.broadcast_to(sigma, times.shape)
    f_closed = np.broadcast_to(analytic.printed_fidelity(variant, times, cfg.xi, cfg.gamma), times.shape)
    f_pipe = 0.5 + (rho + 4 * np.abs(sigma)) / 6
    rows = zip(times, rho, sigma.real, sigma.imag, f_closed, f_pipe)
    _emit(cfg, ANALYTIC_HEADER, list(rows), meta)


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return float(fmt(x)) if math.isfinite(x) else None
    return x


def cmd_validate(max_n=5, oracle_tol=1e-8, output=None, meta=None):
    if max_n > 6:
        raise UsageError("--max-n is capped at 6")
    if max_n < 3:
        raise UsageError("--max-n must be at least 3")
    report = run_validation(max_n=max_n, oracle_tol=oracle_tol)
    if meta is not None:
        report["meta"] = meta
    _write(output, json.dumps(_jsonable(report), indent=2) + "\n")
    for c in report["checks"]:
        if c["status"] == "fail":
            print(f"FAIL {c['name']}: deviation {c['max_deviation']} > {c['tolerance']}", file=sys.stderr)
    return 0 if report["passed"] else 2


def _matrix_json(a):
    a = np.asarray(a)
    if np.iscomplexobj(a):
        return {"re": _jsonable(a.real.tolist()), "im": _jsonable(a.imag.tolist())}
    return _jsonable(a.tolist())


def cmd_generator(cfg: RunConfig, meta=None):
    spec = cfg.spec()
    doc = {
        "spec": {"n": spec.n_qubits, "boundary": spec.boundary.value, "topology": spec.topology.value,
                 "xi": spec.coupling, "gamma": spec.rate, "n_bonds": spec.n_bonds},
        "h": _matrix_json(build_hop_matrix(spec)),
        "M": _matrix_json(build_dissipation_matrix(spec)),
        "G": _matrix_json(effective_generator(spec)),
    }
    if meta is not None:
        doc["meta"] = meta
    _write(cfg.output, json.dumps(_jsonable(doc), indent=2) + "\n")


# --- argument parsing ----------------------------------------------------------------

def _add_common(p, *, n_list=False):
    p.add_argument("--config", help="JSON file with the same keys as the flags; flags win")
    p.add_argument("--n", type=int)
    if n_list:
        p.add_argument("--n-list", dest="n_list", help="e.g. 3..10 or 3,5,7,9")
    p.add_argument("--boundary", choices=["open", "closed"])
    p.add_argument("--topology", choices=["chained", "local"])
    p.add_argument("--xi", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--t-max", dest="t_max", type=float)
    p.add_argument("--grid", type=int)
    p.add_argument("--format", choices=["csv", "json"])
    p.add_argument("--output", help="output path (default: standard output)")
    p.add_argument("--meta", action="store_true", help="attach run metadata (not byte-stable)")


def build_parser():
    parser = _Parser(prog="qchain", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    _add_common(sub.add_parser("curve", help="optimal average fidelity vs time"))
    p = sub.add_parser("sweep", help="maximum fidelity for a list of chain lengths")
    _add_common(p, n_list=True)
    p.add_argument("--workers", type=int, default=1)
    _add_common(sub.add_parser("analytic", help="three-qubit closed forms"))
    p = sub.add_parser("validate", help="oracle, appendix, analytic and invariant checks")
    p.add_argument("--max-n", dest="max_n", type=int, default=5)
    p.add_argument("--oracle-tol", dest="oracle_tol", type=float, default=1e-8)
    p.add_argument("--output")
    p.add_argument("--meta", action="store_true")
    _add_common(sub.add_parser("generator", help="dump h, M and G as JSON"))
    return parser


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    meta = _meta(argv) if getattr(args, "meta", False) else None
    try:
        if args.command == "validate":
            return cmd_validate(args.max_n, args.oracle_tol, args.output, meta)
        cfg = _load_config(args)
        if args.command == "curve":
            cmd_curve(cfg, meta)
        elif args.command == "sweep":
            return cmd_sweep(cfg, args.workers, meta)
        elif args.command == "analytic":
            cmd_analytic(cfg, meta)
        elif args.command == "generator":
            cmd_generator(cfg, meta)
        return 0
    except (UsageError, SpecificationError, DomainError, OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"qchain {args.command}: {exc}", file=sys.stderr)
        return 1
    except (NumericalFailure, ArithmeticError) as exc:
        print(f"qchain {args.command}: numerical failure: {exc}", file=sys.stderr)
        diag = getattr(exc, "diagnostics", None)
        if diag:
            print(json.dumps(_jsonable(diag)), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
