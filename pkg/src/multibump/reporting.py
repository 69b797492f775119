"""Run artifacts: the summary table, column data files, and the manifest.

Every check becomes one row (name, measured, expected, tolerance, status,
provenance, anchor).  Provenance is one of closed_form / quadrature / fit;
the anchor names the mathematical fact being checked.  A check whose
prerequisite computation failed is recorded as 'skipped', never 'passed'.
All numbers are written with a fixed shortest-roundtrip format so a rerun
with the same config and seed produces byte-identical files.
"""

from __future__ import annotations

import os
import platform
import threading
from dataclasses import dataclass, field

import numpy as np

__all__ = ["CheckRow", "Reporter"]

_PROVENANCE = ("closed_form", "quadrature", "fit")


def _fmt(x) -> str:
    """Deterministic scalar formatting for tables."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def _csv_cell(s: str) -> str:
    if any(c in s for c in ",\"\n"):
        return '"' + s.replace('"', '""') + '"'
    return s


@dataclass(frozen=True)
class CheckRow:
    """One verified quantity with its target, outcome, and provenance."""

    name: str
    measured: object
    expected: object
    tolerance: object
    status: str  # passed | failed | skipped
    provenance: str
    anchor: str
    detail: str = ""

    def __post_init__(self):
        if self.status not in ("passed", "failed", "skipped"):
            raise ValueError(f"bad status {self.status!r}")
        if self.provenance not in _PROVENANCE:
            raise ValueError(f"bad provenance {self.provenance!r}")


class Reporter:
    """Collects check rows and data tables; writes them once at the end.

    Suites may run on worker threads; every mutation goes through one
    lock so the reporter is the single serialization point for writes.
    """

    def __init__(self):
        self.rows: list[CheckRow] = []
        self.tables: dict[str, dict] = {}
        self._lock = threading.Lock()

    # -- recording --------------------------------------------------------

    def add(self, row: CheckRow) -> CheckRow:
        with self._lock:
            self.rows.append(row)
        return row

    def check_close(self, name, measured, expected, rel_tol, provenance,
                    anchor, detail="") -> CheckRow:
        """Relative-deviation check |measured - expected| <= rel_tol*|expected|."""
        dev = abs(measured - expected) / max(abs(expected), 1e-300)
        status = "passed" if dev <= rel_tol else "failed"
        return self.add(CheckRow(name, measured, expected, rel_tol, status,
                                 provenance, anchor, detail))

    def check_bound(self, name, measured, bound, provenance, anchor,
                    upper=True, detail="") -> CheckRow:
        """One-sided check measured <= bound (or >= with upper=False)."""
        ok = measured <= bound if upper else measured >= bound
        return self.add(CheckRow(name, measured, bound, "bound",
                                 "passed" if ok else "failed",
                                 provenance, anchor, detail))

    def check_flag(self, name, ok, provenance, anchor, detail="") -> CheckRow:
        return self.add(CheckRow(name, bool(ok), True, "exact",
                                 "passed" if ok else "failed",
                                 provenance, anchor, detail))

    def skip(self, name, provenance, anchor, detail="") -> CheckRow:
        return self.add(CheckRow(name, "n/a", "n/a", "n/a", "skipped",
                                 provenance, anchor, detail))

    def table(self, name: str, columns: dict) -> None:
        """Register a column-oriented data file (written as CSV)."""
        cols = {k: np.asarray(v).ravel() for k, v in columns.items()}
        lengths = {len(v) for v in cols.values()}
        if len(lengths) != 1:
            raise ValueError("all columns must have equal length")
        with self._lock:
            self.tables[name] = cols

    # -- outcome ----------------------------------------------------------

    @property
    def n_failed(self) -> int:
        return sum(r.status == "failed" for r in self.rows)

    @property
    def n_skipped(self) -> int:
        return sum(r.status == "skipped" for r in self.rows)

    def summary_lines(self) -> list:
        out = []
        for r in self.rows:
            out.append(f"[{r.status.upper():7s}] {r.name}: "
                       f"measured={_fmt(r.measured)} "
                       f"expected={_fmt(r.expected)} "
                       f"tol={_fmt(r.tolerance)} ({r.provenance}; {r.anchor})")
        return out

    # -- artifacts --------------------------------------------------------

    def write(self, out_dir: str, config, extra_manifest=None) -> None:
        """Write summary.csv, all data tables, and manifest.txt."""
        os.makedirs(out_dir, exist_ok=True)
        header = ("name,measured,expected,tolerance,status,provenance,"
                  "anchor,detail\n")
        with open(os.path.join(out_dir, "summary.csv"), "w",
                  encoding="utf-8") as fh:
            fh.write(header)
            for r in self.rows:
                cells = [r.name, _fmt(r.measured), _fmt(r.expected),
                         _fmt(r.tolerance), r.status, r.provenance,
                         r.anchor, r.detail]
                fh.write(",".join(_csv_cell(c) for c in cells) + "\n")

        for name, cols in self.tables.items():
            path = os.path.join(out_dir, f"{name}.csv")
            keys = list(cols.keys())
            arrs = [cols[k] for k in keys]
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(",".join(keys) + "\n")
                for i in range(len(arrs[0])):
                    fh.write(",".join(_fmt(a[i]) for a in arrs) + "\n")

        import numpy
        import scipy
        from . import __version__
        lines = [
            f"config_sha256: {config.digest()}",
            f"suite: {config.suite}",
            f"seed: {config.seed}",
            f"threads: {config.threads}",
            f"checks_total: {len(self.rows)}",
            f"checks_failed: {self.n_failed}",
            f"checks_skipped: {self.n_skipped}",
            f"version_multibump: {__version__}",
            f"version_numpy: {numpy.__version__}",
            f"version_scipy: {scipy.__version__}",
            f"version_python: {platform.python_version()}",
        ]
        if extra_manifest:
            lines.extend(f"{k}: {v}" for k, v in sorted(extra_manifest.items()))
        with open(os.path.join(out_dir, "manifest.txt"), "w",
                  encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
        with open(os.path.join(out_dir, "config.json"), "w",
                  encoding="utf-8") as fh:
            fh.write(config.to_json())
