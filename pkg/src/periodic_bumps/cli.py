"""Command-line front end.

Subcommands ``solve``, ``spectrum``, ``sweep`` and ``critical`` read a kernel
from a JSON file and write deterministic CSV or JSON (12 significant digits).

Exit codes: 0 ok, 2 config error, 3 no solution, 4 non-regular candidate
selected, 5 no event in the requested bracket.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .bifurcation import EVENTS, T_TOL, critical_periods, locate_critical, sweep
from .errors import AdmissibilityError, InvalidBracketError, InvalidInputError
from .existence import BumpSolution, find_candidates, verify
from .kernel import Kernel, PeriodizedKernel, load_kernel
from .numerics import F_TOL, GRID_N, X_TOL
from .spectrum import MERGE_TOL, N_THETA, STAB_TOL, circulant, spectrum_intervals

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NO_SOLUTION = 3
EXIT_NOT_REGULAR = 4
EXIT_BRACKET = 5

SOLVE_COLUMNS = ("index", "a", "regular", "c1", "c2", "c3", "margin", "du")
SPECTRUM_COLUMNS = ("theta", "lambda1", "lambda2")
SWEEP_COLUMNS = ("T", "branch", "a", "min_l1", "max_l1", "min_l2", "max_l2", "verdict")


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    kernel: Kernel
    h: float
    T: float | None = None
    T_range: tuple[float, float, int] | None = None
    fmt: str = "csv"
    out: str = "-"
    n_theta: int = N_THETA
    grid_n: int = GRID_N
    x_tol: float = X_TOL
    f_tol: float = F_TOL
    merge_tol: float = MERGE_TOL
    stab_tol: float = STAB_TOL
    q: list[int] = field(default_factory=list)
    candidate: int = 0


# ---------------------------------------------------------------------------
# formatting
# ---------------------------------------------------------------------------


def fmt_num(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if x is None:
        return ""
    x = float(x)
    if math.isnan(x):
        return "nan"
    return f"{x:.12g}"


def _round(obj):
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return None if math.isnan(x) else float(f"{x:.12g}")
    return obj


def dumps_json(obj) -> str:
    return json.dumps(_round(obj), indent=2) + "\n"


def csv_text(columns: Sequence[str], rows: Sequence[Sequence]) -> str:
    lines = [",".join(columns)]
    lines += [",".join(fmt_num(v) if not isinstance(v, str) else v for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def _write(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, newline="\n")


def load_summary(path: str | Path) -> dict:
    """Read a spectrum summary written by ``spectrum``."""
    doc = json.loads(Path(path).read_text())
    return doc.get("summary", doc)


def verdict_from_summary(summary: dict, stab_tol: float = STAB_TOL) -> str:
    top = max(hi for _, hi in summary["intervals"])
    return "unstable" if top > 1.0 + stab_tol else "marginally_stable"


# ---------------------------------------------------------------------------
# argument handling
# ---------------------------------------------------------------------------


def _parse_range(text: str) -> tuple[float, float, int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"--T-range must be lo:hi:n, got {text!r}")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise ConfigError(f"--T-range must be lo:hi:n, got {text!r}") from exc
    if not (0 < lo <= hi and math.isfinite(hi)) or n < 1 or (lo < hi and n < 2):
        raise ConfigError(f"--T-range needs 0 < lo <= hi and n >= 2 (n >= 1 if lo == hi), got {text!r}")
    return lo, hi, n


def _parse_q(text: str | None) -> list[int]:
    if not text:
        return []
    try:
        qs = [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise ConfigError(f"--q must be a comma-separated list of integers, got {text!r}") from exc
    if any(not 0 <= q <= 255 for q in qs):
        raise ConfigError("--q entries must lie in [0, 255]")
    return qs


def _config(args, need_T: bool, need_range: bool) -> RunConfig:
    try:
        kernel = load_kernel(args.kernel)
    except FileNotFoundError as exc:
        raise ConfigError(f"kernel file not found: {args.kernel}") from exc
    except (InvalidInputError, AdmissibilityError) as exc:
        raise ConfigError(str(exc)) from exc
    if not math.isfinite(args.h):
        raise ConfigError("--h must be finite")
    cfg = RunConfig(kernel=kernel, h=args.h, fmt=args.format, out=args.out)
    for name in ("n_theta", "grid_n", "x_tol", "f_tol", "merge_tol", "stab_tol"):
        val = getattr(args, name, None)
        if val is not None:
            if not val > 0:
                raise ConfigError(f"--{name.replace('_', '-')} must be positive")
            setattr(cfg, name, val)
    if cfg.n_theta < 64:
        raise ConfigError("--n-theta must be >= 64")
    if cfg.grid_n < 8:
        raise ConfigError("--grid-n must be >= 8")
    if need_T:
        if args.T is None or not (math.isfinite(args.T) and args.T > 0):
            raise ConfigError("--T must be a positive number")
        cfg.T = args.T
    if need_range:
        if args.T_range is None:
            raise ConfigError("--T-range lo:hi:n is required")
        cfg.T_range = _parse_range(args.T_range)
    cfg.q = _parse_q(getattr(args, "q", None))
    cfg.candidate = getattr(args, "candidate", 0) or 0
    return cfg


def _candidates(cfg: RunConfig):
    pk = PeriodizedKernel(cfg.kernel, cfg.T)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        roots = find_candidates(pk, cfg.h, grid_n=cfg.grid_n, x_tol=cfg.x_tol, f_tol=cfg.f_tol)
    return [BumpSolution(pk, cfg.h, a, m == "tangent") for a, m in roots]


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_solve(cfg: RunConfig) -> int:
    rows, docs = [], []
    n_ok = 0
    for i, sol in enumerate(_candidates(cfg)):
        rep = verify(sol, f_tol=cfg.f_tol, x_tol=cfg.x_tol)
        n_ok += rep.accepted
        rows.append((i, sol.a, rep.is_regular, rep.condition1, rep.condition2, rep.condition3,
                     rep.worst_margin, rep.regularity))
        docs.append(dict(zip(SOLVE_COLUMNS, rows[-1]), tangent=sol.tangent, accepted=rep.accepted))
    if cfg.fmt == "json":
        text = dumps_json({"T": cfg.T, "h": cfg.h, "kernel": cfg.kernel.to_config(), "candidates": docs})
    else:
        text = csv_text(SOLVE_COLUMNS, rows)
    _write(cfg.out, text)
    return EXIT_OK if n_ok else EXIT_NO_SOLUTION


def cmd_spectrum(cfg: RunConfig, summary_path: str | None = None) -> int:
    sols = _candidates(cfg)
    if not sols:
        print(f"no candidates at T={cfg.T:g}, h={cfg.h:g}", file=sys.stderr)
        return EXIT_NO_SOLUTION
    if not 0 <= cfg.candidate < len(sols):
        raise ConfigError(f"--candidate {cfg.candidate} out of range (found {len(sols)} candidates)")
    sol = sols[cfg.candidate]
    if not sol.is_regular:
        print(f"candidate {cfg.candidate} (a={sol.a:.12g}) is not regular", file=sys.stderr)
        return EXIT_NOT_REGULAR
    rep = spectrum_intervals(sol, cfg.n_theta, cfg.merge_tol, cfg.stab_tol)
    summary = {"T": cfg.T, "h": cfg.h, "candidate": cfg.candidate, "a": sol.a, **rep.summary()}
    if cfg.q:
        summary["circulant"] = {}
        for q in cfg.q:
            c = circulant(sol, q)
            summary["circulant"][str(q)] = {
                "eigenvalues": sorted(c.eigenvalues.real.tolist()),
                "mismatch": c.mismatch,
            }
    rows = list(zip(rep.thetas, rep.lambda1, rep.lambda2))
    if cfg.fmt == "json":
        table = {"theta": rep.thetas.tolist(), "lambda1": rep.lambda1.tolist(), "lambda2": rep.lambda2.tolist()}
        _write(cfg.out, dumps_json({"summary": summary, "table": table}))
        if summary_path:
            Path(summary_path).write_text(dumps_json(summary))
        return EXIT_OK
    _write(cfg.out, csv_text(SPECTRUM_COLUMNS, rows))
    if summary_path is None and cfg.out != "-":
        summary_path = str(cfg.out) + ".summary.json"
    if summary_path:
        Path(summary_path).write_text(dumps_json(summary))
    else:
        sys.stderr.write(dumps_json(summary))
    return EXIT_OK


def cmd_sweep(cfg: RunConfig) -> int:
    lo, hi, n = cfg.T_range
    records = sweep(cfg.kernel, cfg.h, lo, hi, n, cfg.n_theta)
    rows = []
    for rec in records:
        if rec.error:
            rows.append((rec.T, -1, math.nan, math.nan, math.nan, math.nan, math.nan, "error"))
            continue
        for c in sorted(rec.candidates, key=lambda c: c.a):
            verdict = c.verdict or ("rejected" if not c.accepted else "n/a")
            rows.append((rec.T, c.branch, c.a, c.min_l1, c.max_l1, c.min_l2, c.max_l2, verdict))
    if cfg.fmt == "json":
        doc = [{"T": r.T, "error": r.error,
                "candidates": [dict(vars(c)) for c in sorted(r.candidates, key=lambda c: c.a)]}
               for r in records]
        _write(cfg.out, dumps_json(doc))
    else:
        _write(cfg.out, csv_text(SWEEP_COLUMNS, rows))
    return EXIT_OK


def cmd_critical(cfg: RunConfig, event: str | None, branch: int, tol: float) -> int:
    lo, hi, n = cfg.T_range
    try:
        if event is not None:
            T = locate_critical(cfg.kernel, cfg.h, (lo, hi), event, tol, branch, cfg.n_theta, cfg.stab_tol)
            doc = {"event": event, "T": T}
            if event == "fold":
                doc["T1"] = T
            elif event == "stability":
                doc["T2"] = T
        else:
            if lo == hi:
                raise InvalidBracketError("critical needs a non-degenerate --T-range")
            found = critical_periods(cfg.kernel, cfg.h, lo, hi, n, branch, tol, cfg.n_theta)
            if found.T1 is None and found.T2 is None and not found.extra_events:
                raise InvalidBracketError(f"no event found on [{lo:g}, {hi:g}]")
            doc = found.as_dict()
    except InvalidBracketError as exc:
        print(f"invalid bracket: {exc}", file=sys.stderr)
        return EXIT_BRACKET
    if cfg.fmt == "csv":
        rows = [(k, doc[k], "") for k in ("T1", "T2") if doc.get(k) is not None]
        rows += [("extra", e["T"], e["description"]) for e in doc.get("extra_events", [])]
        if "event" in doc and not rows:
            rows = [(doc["event"], doc["T"], "")]
        _write(cfg.out, csv_text(("event", "T", "description"), rows))
    else:
        _write(cfg.out, dumps_json(doc))
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="periodic-bumps",
                description="1-bump periodic solutions of the Amari neural field with a Heaviside firing rate.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--kernel", required=True, help="kernel JSON file")
        sp.add_argument("--h", type=float, required=True, help="firing threshold")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--out", default="-", help="output path ('-' for stdout)")
        sp.add_argument("--n-theta", dest="n_theta", type=int)
        sp.add_argument("--grid-n", dest="grid_n", type=int)
        sp.add_argument("--x-tol", dest="x_tol", type=float)
        sp.add_argument("--f-tol", dest="f_tol", type=float)
        sp.add_argument("--merge-tol", dest="merge_tol", type=float)
        sp.add_argument("--stab-tol", dest="stab_tol", type=float)

    sp = sub.add_parser("solve", help="find and verify candidate half-widths")
    common(sp)
    sp.add_argument("--T", type=float, required=True)

    sp = sub.add_parser("spectrum", help="spectral branches of one candidate")
    common(sp)
    sp.add_argument("--T", type=float, required=True)
    sp.add_argument("--candidate", type=int, default=0, help="candidate index, ascending in a")
    sp.add_argument("--q", help="comma-separated circulant sizes q (matrix dimension 2(1+q))")
    sp.add_argument("--summary", help="path of the JSON summary (csv mode)")

    sp = sub.add_parser("sweep", help="spectral bounds over a period range")
    common(sp)
    sp.add_argument("--T-range", dest="T_range", required=True, help="lo:hi:n")

    sp = sub.add_parser("critical", help="locate fold and stability periods")
    common(sp)
    sp.add_argument("--T-range", dest="T_range", required=True, help="lo:hi:n (scan) or bracket with --event")
    sp.add_argument("--event", choices=EVENTS, help="locate a single event inside lo:hi")
    sp.add_argument("--branch", type=int, default=1, help="candidate index tracked for spectral events")
    sp.add_argument("--tol", type=float, default=T_TOL)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "solve":
            return cmd_solve(_config(args, need_T=True, need_range=False))
        if args.command == "spectrum":
            return cmd_spectrum(_config(args, need_T=True, need_range=False), args.summary)
        if args.command == "sweep":
            return cmd_sweep(_config(args, need_T=False, need_range=True))
        if args.tol <= 0 or args.branch < 0:
            raise ConfigError("--tol must be positive and --branch non-negative")
        return cmd_critical(_config(args, need_T=False, need_range=True), args.event, args.branch, args.tol)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
