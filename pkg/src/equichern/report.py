"""Key-value run reports and CSV side files.

Floats are written with 17 significant digits so that a report round-trips
exactly; wall times stay out of the report unless asked for, which keeps two
runs with the same configuration byte-identical.
"""
from __future__ import annotations

import csv
import dataclasses
import io
import platform
from pathlib import Path

import numpy as np
import scipy

from .checks import CheckResult, RunConfig

REPORT_VERSION = 1
REPORT_FILE = "report.txt"
SUMMARY_FILE = "summary.csv"
TIMINGS_FILE = "timings.csv"


def fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.16e}"
    if isinstance(value, (complex, np.complexfloating)):
        return f"{value.real:.16e}{value.imag:+.16e}j"
    if value is None:
        return "default"
    return str(value).replace("\n", " ")


def environment() -> list[tuple[str, str]]:
    from . import __version__

    return [("package_version", __version__), ("python_version", platform.python_version()),
            ("numpy_version", np.__version__), ("scipy_version", scipy.__version__)]


def render(config: RunConfig, results: list[CheckResult]) -> str:
    failed = [r for r in results if not r.passed]
    lines = [f"report_version = {REPORT_VERSION}"]
    lines += [f"{k} = {v}" for k, v in environment()]
    for f in dataclasses.fields(config):
        if f.name in ("out", "jobs"):  # do not affect results
            continue
        lines.append(f"config.{f.name} = {fmt(getattr(config, f.name))}")
    lines += [f"n_checks = {len(results)}", f"n_failed = {len(failed)}",
              f"status = {'FAIL' if failed else 'PASS'}"]
    for r in sorted(results, key=lambda r: r.name):
        lines += ["", f"[check {r.name}]", f"name = {r.name}", f"anchor = {r.anchor}",
                  f"residual = {fmt(r.residual)}", f"tolerance = {fmt(r.tolerance)}",
                  f"criterion = {r.criterion}", f"pass = {fmt(r.passed)}"]
        if config.timings:
            lines.append(f"wall_time = {fmt(r.wall_time)}")
        lines += [f"detail.{k} = {fmt(v)}" for k, v in r.details]
    return "\n".join(lines) + "\n"


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def write_outputs(out_dir, config: RunConfig, results: list[CheckResult]) -> Path:
    """report.txt, summary.csv, timings.csv and one CSV per table a check produced."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    text = render(config, results)
    (out / REPORT_FILE).write_text(text, encoding="utf-8")
    ordered = sorted(results, key=lambda r: r.name)
    (out / SUMMARY_FILE).write_text(_csv_text(
        ("name", "residual", "tolerance", "pass"),
        [(r.name, r.residual, r.tolerance, r.passed) for r in ordered]), encoding="utf-8")
    (out / TIMINGS_FILE).write_text(_csv_text(("name", "wall_time"), [(r.name, r.wall_time) for r in ordered]),
                                    encoding="utf-8")
    for r in ordered:
        for stem, (header, rows) in r.tables.items():
            (out / f"{stem}.csv").write_text(_csv_text(header, rows), encoding="utf-8")
    return out / REPORT_FILE


def table_csv(header, rows) -> str:
    return _csv_text(header, rows)


@dataclasses.dataclass
class StoredReport:
    header: dict
    checks: list  # list of dicts in file order


def parse(text: str) -> StoredReport:
    header: dict = {}
    checks: list = []
    current = header
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("[check ") and line.endswith("]"):
            current = {}
            checks.append(current)
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"malformed report line: {raw!r}")
        current[key.strip()] = value.strip()
    if "report_version" not in header:
        raise ValueError("not a report: missing report_version")
    return StoredReport(header, checks)


def render_table(stored: StoredReport) -> str:
    """Human-readable one-line-per-check view of a stored report."""
    rows = [(c["name"], "PASS" if c["pass"] == "true" else "FAIL", c["residual"], c["tolerance"])
            for c in stored.checks]
    width = max([len(r[0]) for r in rows] + [5])
    lines = [f"{'check':<{width}}  status  {'residual':>24}  {'tolerance':>24}"]
    lines += [f"{n:<{width}}  {s:<6}  {res:>24}  {tol:>24}" for n, s, res, tol in rows]
    lines.append(f"status = {stored.header.get('status', '?')} "
                 f"({stored.header.get('n_failed', '?')} of {stored.header.get('n_checks', '?')} failed)")
    return "\n".join(lines) + "\n"
