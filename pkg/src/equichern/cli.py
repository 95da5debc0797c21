"""Command line: list, run, decay and report."""
from __future__ import annotations

import argparse
import configparser
import dataclasses
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import checks as ck
from . import report as rp
from .decay import fit_decay_exponent
from .examples import gaussian_profile, get_case, mean_decay_profile

_FIELD_TYPES = {"example": str, "check": str, "T": float, "S": float, "grid": int, "tol": float,
                "seed": int, "out": str, "jobs": int, "order_cap": int, "timings": None}
_DUMMY_SECTION = "run"


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def read_config_file(path) -> dict:
    """Flat ``key = value`` file; ``#`` starts a comment."""
    parser = configparser.ConfigParser(interpolation=None, comment_prefixes=("#", ";"))
    parser.optionxform = str  # keep the case of T and S
    text = Path(path).read_text(encoding="utf-8")
    parser.read_string(f"[{_DUMMY_SECTION}]\n" + text)
    out = {}
    for key, value in parser[_DUMMY_SECTION].items():
        if key not in _FIELD_TYPES:
            raise ValueError(f"unknown configuration key {key!r}")
        conv = _FIELD_TYPES[key]
        out[key] = _parse_bool(value) if conv is None else conv(value)
    return out


def build_config(cli: dict, file_values: dict | None = None) -> ck.RunConfig:
    """Precedence: command line, then file, then defaults."""
    values = dict(file_values or {})
    values.update({k: v for k, v in cli.items() if v is not None and k in _FIELD_TYPES})
    return ck.RunConfig(**values).validate()


def run_checks(config: ck.RunConfig) -> list[ck.CheckResult]:
    selected = ck.select(config.example, config.check)
    if not selected:
        return []
    with ThreadPoolExecutor(max_workers=config.jobs) as pool:
        results = list(pool.map(lambda c: ck.execute(c, config), selected))
    return sorted(results, key=lambda r: r.name)


# ---------------------------------------------------------------------------
# subcommands


def cmd_list(args) -> int:
    for c in sorted(ck.CHECKS.values(), key=lambda c: c.name):
        op = "<=" if c.criterion == "le" else "<= -"
        print(f"{c.name}\t{op}{c.tolerance:g}\t{c.anchor}")
    return 0


def cmd_run(args) -> int:
    file_values = read_config_file(args.config) if args.config else {}
    cli = {k: getattr(args, k) for k in _FIELD_TYPES if hasattr(args, k)}
    config = build_config(cli, file_values)
    results = run_checks(config)
    text = rp.render(config, results)
    if config.out:
        rp.write_outputs(config.out, config, results)
    sys.stdout.write(text)
    return 1 if any(not r.passed for r in results) else 0


def cmd_decay(args) -> int:
    case = get_case("atiyah")
    if args.profile == "mean":
        table = mean_decay_profile(case, order=args.order)
        keep = ~table.flagged
        fit = fit_decay_exponent((table.radius[keep], table.norm[keep]))
        rows = ck.decay_table_rows(table, fit.window)
        summary = (f"exponent = {rp.fmt(fit.exponent)}\nwindow = {rp.fmt(fit.window[0])} {rp.fmt(fit.window[1])}\n"
                   f"confidence = {rp.fmt(fit.confidence[0])} {rp.fmt(fit.confidence[1])}\n")
    else:
        s2, norm = gaussian_profile(case, order=args.order)
        slope = float(np.polyfit(s2, np.log(norm), 1)[0])
        rows = [(float(a), float(b), 1) for a, b in zip(s2, norm)]
        summary = f"log_slope_in_abs_z1_squared = {rp.fmt(slope)}\n"
    text = rp.table_csv(("t_or_radius", "norm", "fitted_window_flag"), rows)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    sys.stderr.write(summary)
    return 0


def cmd_report(args) -> int:
    path = Path(args.path)
    if path.is_dir():
        path = path / rp.REPORT_FILE
    stored = rp.parse(path.read_text(encoding="utf-8"))
    sys.stdout.write(rp.render_table(stored))
    return 1 if stored.header.get("status") == "FAIL" else 0


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="equichern", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("list", help="list registered checks").set_defaults(func=cmd_list)

    r = sub.add_parser("run", help="run checks and print a report")
    r.add_argument("--config", help="flat key=value configuration file")
    r.add_argument("--example", help="comma-separated examples, or 'all'")
    r.add_argument("--check", help="comma-separated checks, or 'all'; empty selects none")
    r.add_argument("--T", type=float, help="time cutoff for pairings")
    r.add_argument("--S", type=float, help="cutoff for the sum-of-one-forms identity")
    r.add_argument("--grid", type=int, help="grid points per axis")
    r.add_argument("--tol", type=float, help="override every selected tolerance")
    r.add_argument("--seed", type=int, help="seed for randomized checks")
    r.add_argument("--out", help="directory for report.txt and CSV side files")
    r.add_argument("--jobs", type=int, help="worker threads")
    r.add_argument("--order-cap", dest="order_cap", type=int, help="largest quadrature order for densities")
    r.add_argument("--timings", action="store_const", const=True, help="include wall times in the report")
    r.set_defaults(func=cmd_run)

    d = sub.add_parser("decay", help="export a decay profile of the Atiyah example as CSV")
    d.add_argument("--profile", choices=("mean", "gaussian"), default="mean")
    d.add_argument("--order", type=int, default=256)
    d.add_argument("--out", help="CSV path; stdout when omitted")
    d.set_defaults(func=cmd_decay)

    s = sub.add_parser("report", help="re-render a stored report")
    s.add_argument("path", help="report.txt or the directory holding it")
    s.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"equichern: error: {msg}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
