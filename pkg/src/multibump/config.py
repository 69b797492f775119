"""Experiment configuration: a single self-describing JSON document.

One file fixes the problem parameters, the quadrature budget, the suite to
run, the sweep ranges, the output directory, and the seed; no
environment-variable configuration, so a run is reproducible from the file
alone.  Validation collects every error instead of stopping at the first.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from .params import ProblemParams
from .quadrature import QuadratureSpec

__all__ = ["ExperimentConfig", "validate_config", "load_config",
           "SUITE_NAMES"]

SUITE_NAMES = ("bubble", "interactions", "expansion", "landscape",
               "correction", "all")


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a run needs: parameters, budget, suite, sweeps, output."""

    problem: ProblemParams = field(default_factory=ProblemParams)
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)
    suite: str = "all"
    k_values: tuple = (4, 8, 16)
    nu_values: tuple = (50.0, 100.0, 200.0, 400.0)
    d_values: tuple = (20.0, 40.0, 80.0, 160.0)
    eps_values: tuple = (0.08, 0.1, 0.129, 0.16)
    out_dir: str = "out"
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        if self.suite not in SUITE_NAMES:
            raise ValueError(f"unknown suite {self.suite!r}")
        for name in ("k_values", "nu_values", "d_values", "eps_values"):
            if len(getattr(self, name)) == 0:
                raise ValueError(f"sweep range {name} must be nonempty")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")

    def to_dict(self) -> dict:
        q = self.quadrature
        return {
            "problem": self.problem.to_dict(),
            "quadrature": {"rel_tol": q.rel_tol, "abs_tol": q.abs_tol,
                           "max_evals": q.max_evals,
                           "reduction": q.reduction, "mc_seed": q.mc_seed},
            "suite": self.suite,
            "sweeps": {"k": list(self.k_values),
                       "nu": list(self.nu_values),
                       "d": list(self.d_values),
                       "eps": list(self.eps_values)},
            "out_dir": self.out_dir,
            "seed": self.seed,
            "threads": self.threads,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def digest(self) -> str:
        """Hash of the result-determining fields, for the run manifest.

        The output directory and thread count do not influence any
        computed number, so two runs that differ only there hash equal.
        """
        d = self.to_dict()
        d.pop("out_dir")
        d.pop("threads")
        return hashlib.sha256(
            json.dumps(d, sort_keys=True).encode()).hexdigest()

    def replace(self, **kw) -> "ExperimentConfig":
        d = {"problem": self.problem, "quadrature": self.quadrature,
             "suite": self.suite, "k_values": self.k_values,
             "nu_values": self.nu_values, "d_values": self.d_values,
             "eps_values": self.eps_values, "out_dir": self.out_dir,
             "seed": self.seed, "threads": self.threads}
        d.update(kw)
        return ExperimentConfig(**d)


def _err(errors, fieldname, message):
    errors.append({"field": fieldname, "message": message})


def _validate_problem(d: dict, errors) -> ProblemParams | None:
    """Field-by-field mirror of the ProblemParams gates, collecting errors."""
    defaults = ProblemParams.__dataclass_fields__
    vals = {}
    casts = {"N": int, "s": float, "m": float, "c0": float, "theta": float,
             "delta": float, "r0": float, "mode": str}
    for name, cast in casts.items():
        raw = d.get(name, defaults[name].default)
        try:
            vals[name] = cast(raw)
        except (TypeError, ValueError):
            _err(errors, f"problem.{name}", f"cannot parse {raw!r}")
            vals[name] = defaults[name].default
    N, s, m = vals["N"], vals["s"], vals["m"]
    ok = True
    if not (0.0 < s < 1.0):
        _err(errors, "problem.s", f"s must lie strictly in (0, 1), got {s}")
        ok = False
    elif N <= 2 + 2 * s:
        _err(errors, "problem.N", f"need N > 2 + 2s, got N={N}, s={s}")
        ok = False
    else:
        lo = max(2.0, (N - 2 * s) - 2 * (N - 2 * s) ** 2 / (N + 2 * s))
        hi = N - 2 * s
        if m >= hi:
            _err(errors, "problem.m",
                 f"flatness exponent m={m} violates the open upper bound "
                 f"m < N - 2s = {hi:.6g}")
            ok = False
        elif m <= lo:
            _err(errors, "problem.m",
                 f"flatness exponent m={m} at or below the lower bound "
                 f"{lo:.6g}")
            ok = False
    for name in ("c0", "theta", "delta", "r0"):
        if vals[name] <= 0:
            _err(errors, f"problem.{name}", "must be positive")
            ok = False
    if vals["mode"] not in ("positive", "sign_changing"):
        _err(errors, "problem.mode",
             f"mode must be 'positive' or 'sign_changing', got {vals['mode']!r}")
        ok = False
    return ProblemParams(**vals) if ok else None


def _validate_quadrature(d: dict, errors) -> QuadratureSpec | None:
    try:
        return QuadratureSpec(
            rel_tol=float(d.get("rel_tol", 1e-5)),
            abs_tol=float(d.get("abs_tol", 1e-12)),
            max_evals=int(d.get("max_evals", 2_000_000)),
            reduction=str(d.get("reduction", "axial3d")),
            mc_seed=int(d.get("mc_seed", 0)))
    except (TypeError, ValueError) as exc:
        _err(errors, "quadrature", str(exc))
        return None


def validate_config(text: str):
    """Parse and fully validate a config document.

    Returns (config, errors); config is None whenever errors is nonempty.
    All problems found are reported together, not just the first.
    """
    errors = []
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        _err(errors, "<document>",
             f"invalid JSON at line {exc.lineno}, column {exc.colno}: "
             f"{exc.msg}")
        return None, errors
    if not isinstance(doc, dict):
        _err(errors, "<document>", "top level must be an object")
        return None, errors

    problem = _validate_problem(doc.get("problem", {}), errors)
    quad = _validate_quadrature(doc.get("quadrature", {}), errors)

    suite = str(doc.get("suite", "all"))
    if suite not in SUITE_NAMES:
        _err(errors, "suite",
             f"unknown suite {suite!r}; choose one of {', '.join(SUITE_NAMES)}")

    sweeps = doc.get("sweeps", {})
    ranges = {}
    casts = {"k": int, "nu": float, "d": float, "eps": float}
    defaults = {"k": (4, 8, 16), "nu": (50.0, 100.0, 200.0, 400.0),
                "d": (20.0, 40.0, 80.0, 160.0),
                "eps": (0.08, 0.1, 0.129, 0.16)}
    for name, cast in casts.items():
        raw = sweeps.get(name, list(defaults[name]))
        try:
            vals = tuple(cast(v) for v in raw)
        except (TypeError, ValueError):
            _err(errors, f"sweeps.{name}", f"cannot parse {raw!r}")
            continue
        if len(vals) == 0:
            _err(errors, f"sweeps.{name}", "sweep range must be nonempty")
            continue
        if any(v <= 0 for v in vals):
            _err(errors, f"sweeps.{name}", "sweep values must be positive")
            continue
        ranges[name] = vals

    seed = doc.get("seed", 0)
    if not isinstance(seed, int):
        _err(errors, "seed", f"seed must be an integer, got {seed!r}")
        seed = 0
    threads = doc.get("threads", 1)
    if not isinstance(threads, int) or threads < 1:
        _err(errors, "threads", f"threads must be a positive integer, "
             f"got {threads!r}")
        threads = 1
    out_dir = str(doc.get("out_dir", "out"))

    if errors or problem is None or quad is None or len(ranges) < 4:
        return None, errors
    return ExperimentConfig(problem=problem, quadrature=quad, suite=suite,
                            k_values=ranges["k"], nu_values=ranges["nu"],
                            d_values=ranges["d"], eps_values=ranges["eps"],
                            out_dir=out_dir, seed=seed,
                            threads=threads), errors


def load_config(path: str) -> ExperimentConfig:
    """Load and validate a config file; raise with all diagnostics on error."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    cfg, errors = validate_config(text)
    if cfg is None:
        lines = [f"  {e['field']}: {e['message']}" for e in errors]
        raise ValueError("invalid configuration:\n" + "\n".join(lines))
    return cfg
