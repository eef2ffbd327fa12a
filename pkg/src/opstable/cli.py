"""Command-line front end.

Exit codes: 0 success, 1 invalid input, 2 numerical failure, 3 inconclusive.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from . import __version__
from .closedform import INFINITE, dim_double_points
from .errors import DomainError, EmptyGrid, OpstableError, ValidationError
from .numlab.integrals import doubling_radii, dyadic_series_case_d, existence_integral_estimate
from .numlab.qmc import dimension_search
from .numlab.search import estimate_critical_beta_series
from .numlab.trace import CONVERGENT, DIVERGENT
from .psi import psi_model_for
from .report import Report
from .spectral import analyze_matrix, profile_from_alphas

DEFAULT_TOL = 0.1
DEFAULT_SEED = 0
DEFAULT_RADII = (4.0, 12)
MODES = ("analyze", "dim", "exists", "critical-beta", "verify", "sweep")


@dataclass
class AnalysisRequest:
    mode: str
    matrix: list | None = None
    alphas: tuple[float, ...] | None = None
    case: str = "a"
    tol: float = DEFAULT_TOL
    m_max: int | None = None
    radii: tuple[float, int] | None = None
    threads: int = 1
    seed: int = DEFAULT_SEED
    verify: bool = False
    grid: list[str] = field(default_factory=list)
    sweep_dim: int | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise DomainError(f"unknown mode {self.mode!r}")
        if self.mode != "sweep" and (self.matrix is None) == (self.alphas is None):
            raise DomainError("give exactly one input: a matrix or an alpha tuple")
        if not 0.05 <= self.tol <= 1.0:
            raise DomainError(f"--tol must lie in [0.05, 1], got {self.tol}")
        if self.m_max is not None and not 6 <= self.m_max <= 16:
            raise DomainError(f"--mmax must lie in [6, 16], got {self.m_max}")
        if self.threads < 1:
            raise DomainError(f"--threads must be >= 1, got {self.threads}")

    def options(self) -> dict:
        # thread count is left out on purpose: output must not depend on it
        return {
            "tol": self.tol,
            "m_max": self.m_max,
            "radii": None if self.radii is None else list(self.radii),
            "seed": self.seed,
        }


# request parsing --------------------------------------------------------


def _parse_radii(text: str) -> tuple[float, int]:
    try:
        r0, n = text.split(":")
        return float(r0), int(n)
    except ValueError:
        raise DomainError(f"--radii expects R0:doublings, got {text!r}") from None


def _load_input(args) -> tuple[list | None, tuple | None, str]:
    matrix = alphas = None
    case = args.case or "a"
    if args.input:
        try:
            data = json.loads(Path(args.input).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError(f"cannot read input {args.input}: {exc}") from None
        if not isinstance(data, dict) or ("matrix" in data) == ("alphas" in data):
            raise ValidationError('input JSON needs exactly one of "matrix" or "alphas"')
        matrix = data.get("matrix")
        if "alphas" in data:
            alphas = tuple(float(a) for a in data["alphas"])
            case = str(data.get("case", case))
    if args.matrix is not None:
        if matrix is not None or alphas is not None:
            raise DomainError("give exactly one input: a matrix or an alpha tuple")
        matrix = json.loads(args.matrix)
    if args.alphas is not None:
        if matrix is not None or alphas is not None:
            raise DomainError("give exactly one input: a matrix or an alpha tuple")
        alphas = tuple(float(a) for a in args.alphas.split(","))
    return matrix, alphas, case


def _threads(args) -> int:
    if args.threads is not None:
        return args.threads
    env = os.environ.get("OPSTABLE_THREADS")
    if env:
        try:
            return int(env)
        except ValueError:
            raise DomainError(f"OPSTABLE_THREADS must be an integer, got {env!r}") from None
    return 1


def request_from_args(args) -> AnalysisRequest:
    common = dict(
        mode=args.mode,
        tol=args.tol,
        m_max=args.mmax,
        radii=_parse_radii(args.radii) if args.radii else None,
        threads=_threads(args),
        seed=args.seed,
        verify=getattr(args, "verify", False) or args.mode == "verify",
    )
    if args.mode == "sweep":
        return AnalysisRequest(case=args.case or "a", grid=args.grid or [], sweep_dim=args.dim, **common)
    matrix, alphas, case = _load_input(args)
    return AnalysisRequest(matrix=matrix, alphas=alphas, case=case, **common)


# commands ---------------------------------------------------------------


def _profile(req: AnalysisRequest):
    if req.matrix is not None:
        return analyze_matrix(req.matrix)
    return profile_from_alphas(req.alphas, req.case)


def _verify(req: AnalysisRequest, report: Report) -> None:
    prof, dm = report.profile, report.dimension
    if prof.dim not in (2, 3):
        report.deltas["numeric"] = "skipped: no double points for d >= 4"
        return
    model = psi_model_for(prof)
    r0, n = req.radii or DEFAULT_RADII
    trace = existence_integral_estimate(model, doubling_radii(r0, n))
    report.traces["existence_integral"] = trace
    if prof.dim == 3 and prof.case_label == "d" and prof.alphas[0] > 1.0:
        case_d = dyadic_series_case_d(prof.alphas[0], 40)
        report.traces["case_d_series"] = case_d
        trace = case_d
    if trace.verdict in (CONVERGENT, DIVERGENT):
        report.deltas["exists_agrees"] = (trace.verdict == CONVERGENT) == dm.exists
    else:
        report.deltas["exists_agrees"] = None
    if dm.critical_beta == INFINITE:
        return
    beta_star = float(dm.critical_beta)
    if prof.case_label == "a" and min(prof.alphas) >= 1.0:
        est = estimate_critical_beta_series(prof.alphas, prof.dim, req.tol, req.m_max,
                                            threads=req.threads)
        report.estimates["critical_beta_series"] = est
        report.deltas["critical_beta_series"] = est.midpoint - beta_star
    kw = {} if req.radii is None else {"r0": max(2.0, r0), "doublings": n}
    est = dimension_search(model, 2, req.tol, seed=req.seed, threads=req.threads, **kw)
    report.estimates["dimension_search"] = est
    report.deltas["dimension_search"] = est.midpoint - beta_star


def cmd_analyze(req: AnalysisRequest) -> Report:
    prof = _profile(req)
    report = Report(
        profile=prof,
        dimension=dim_double_points(prof),
        provenance={"tool": "opstable", "version": __version__, "mode": req.mode,
                    "options": req.options(), "seed": req.seed},
    )
    if req.verify:
        _verify(req, report)
    return report


def _grid_values(axis: str) -> list[float]:
    try:
        lo, hi, step = (float(x) for x in axis.split(":"))
    except ValueError:
        raise DomainError(f"grid axis must be lo:hi:step, got {axis!r}") from None
    if step <= 0 or hi < lo:
        raise DomainError(f"bad grid axis {axis!r}")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [round(lo + i * step, 10) for i in range(count)]


def sweep_rows(req: AnalysisRequest) -> list[dict]:
    axes = [_grid_values(g) for g in req.grid]
    if req.sweep_dim is not None:
        if len(axes) == 1:
            axes = axes * req.sweep_dim
        elif len(axes) != req.sweep_dim:
            raise DomainError(f"--dim {req.sweep_dim} needs 1 or {req.sweep_dim} grid axes")
    if len(axes) < 2:
        raise DomainError("a sweep needs at least two exponent axes")
    rows = []
    for tup in sorted(set(itertools.product(*axes))):
        if any(tup[i] < tup[i + 1] for i in range(len(tup) - 1)):
            continue
        try:
            prof = profile_from_alphas(tup, req.case)
        except ValidationError:
            continue
        dm = dim_double_points(prof)
        row = {f"alpha{j + 1}": a for j, a in enumerate(tup)}
        row.update(gamma=prof.gamma, dim=dm.dim_value, exists=dm.exists,
                   critical_beta=dm.critical_beta)
        rows.append(row)
    if not rows:
        raise EmptyGrid("the grid contains no valid sorted exponent tuple")
    return rows


def _csv_text(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in r.items()})
    return buf.getvalue()


def cmd_sweep(req: AnalysisRequest) -> str:
    return _csv_text(sweep_rows(req))


# argument parsing -------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="opstable",
        description="Double points of operator stable Levy processes: closed forms and numeric checks.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="mode", required=True)

    def common(p):
        p.add_argument("--json", action="store_true", help="machine-readable report on stdout")
        p.add_argument("--csv", metavar="PATH", help="write CSV output to PATH")
        p.add_argument("--tol", type=float, default=DEFAULT_TOL, help="bisection tolerance (>= 0.05)")
        p.add_argument("--mmax", type=int, help="largest dyadic shell for lattice sums")
        p.add_argument("--radii", metavar="R0:N", help="radius schedule R0, 2 R0, ..., 2^N R0")
        p.add_argument("--threads", type=int, help="worker threads (env OPSTABLE_THREADS)")
        p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="quasi-Monte Carlo seed")
        p.add_argument("--timing", action="store_true", help="add wall time to the report")

    for mode, text in [
        ("analyze", "spectral case, dimension and existence"),
        ("dim", "Hausdorff dimension of the double-point set"),
        ("exists", "whether double points exist"),
        ("critical-beta", "critical exponent of the double integral"),
        ("verify", "analyze plus every matching numerical estimator"),
    ]:
        p = sub.add_parser(mode, help=text)
        p.add_argument("input", nargs="?", help='JSON file with {"matrix": ...} or {"alphas": ..., "case": ...}')
        p.add_argument("--matrix", help="matrix as a JSON array of rows")
        p.add_argument("--alphas", help="comma-separated exponents, largest first")
        p.add_argument("--case", help="structure case a-d for --alphas input")
        if mode in ("analyze", "critical-beta"):
            p.add_argument("--verify", action="store_true", help="run numerical estimators too")
        common(p)

    p = sub.add_parser("sweep", help="closed forms over a grid of exponent tuples (CSV)")
    p.add_argument("--grid", action="append", metavar="LO:HI:STEP",
                   help="one axis per exponent, or one axis with --dim")
    p.add_argument("--dim", type=int, help="number of exponents when one axis is given")
    p.add_argument("--case", help="structure case (default a)")
    common(p)
    return parser


def _emit(report: Report, args, mode: str, out) -> None:
    if args.json:
        out.write(report.to_json() + "\n")
        return
    dm = report.dimension
    if mode == "dim":
        out.write(f"{dm.dim_value}\n")
    elif mode == "exists":
        out.write(f"{'true' if dm.exists else 'false'}\n")
    elif mode == "critical-beta" and not report.estimates:
        out.write(f"{dm.critical_beta}\n")
    else:
        out.write("\n".join(report.summary_lines()) + "\n")


def _write_trace_csv(report: Report, path: str) -> None:
    items = list(report.traces.items()) + [
        (f"{name}_hi", est.trace_at_hi) for name, est in report.estimates.items()
    ]
    if not items:
        return
    target = Path(path)
    if len(items) == 1:
        target.write_text(items[0][1].to_csv())
        return
    for name, tr in items:
        target.with_name(f"{target.stem}_{name}{target.suffix or '.csv'}").write_text(tr.to_csv())


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    try:
        req = request_from_args(args)
        if req.mode == "sweep":
            text = cmd_sweep(req)
            if args.csv:
                Path(args.csv).write_text(text)
            else:
                sys.stdout.write(text)
            return 0
        report = cmd_analyze(req)
        if args.timing:
            report.provenance["wall_time_s"] = round(time.perf_counter() - start, 3)
        _emit(report, args, req.mode, sys.stdout)
        if args.csv:
            _write_trace_csv(report, args.csv)
    except OpstableError as exc:
        print(f"opstable: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except (json.JSONDecodeError, OSError) as exc:
        print(f"opstable: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
