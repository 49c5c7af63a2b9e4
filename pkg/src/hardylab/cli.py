"""Command-line front end.

    hardylab check --ineq theorem2 --p 1 --q 1 --lambda 1,1 --a 1,1
    hardylab check --ineq theorem1 --p 1 --q 1 --weight const:1 --interval 0,1
    hardylab p0 --q 2 --M 2
    hardylab sweep --kind theorem3 --p 1.8 --q 2
    hardylab batch --checker theorem2 --kind lognormal_sequence --count 10000
    hardylab muck-const --weight extphi:0.5 --q 2

Exit status: 0 satisfied or converged, 1 inequality violated, 2 domain or
usage error, 3 convergence failure.  Options may also come from a JSON file
passed with ``--config``; flags given on the command line take precedence.
"""

from __future__ import annotations

import functools
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import click
import numpy as np

from . import continuous as cont
from . import discrete as disc
from .core import (
    ConvergenceError,
    Constant,
    DomainError,
    Exponents,
    ExtremalG,
    ExtremalPhi,
    InequalityReport,
    Interval,
    Power,
    SequenceData,
    Step,
    Tabulated,
    ToleranceConfig,
    WeightFamily,
    weight_from_dict,
)
from .harness import CHECKERS, GeneratorSpec, KINDS, run_batch
from .muckenhoupt import (
    MuckenhouptParams,
    check_corollary,
    check_theorem_3,
    muckenhoupt_profile,
    sharpness_t1_sweep,
    solve_p0_detailed,
)
from .output import to_csv, to_json, to_table
from .sharpness import SharpnessSweep, ratio_sweep_theorem_D, sharpness_sweep_theorem1

__all__ = ["main", "RunConfig", "parse_weight", "parse_floats"]

EXIT_OK, EXIT_VIOLATED, EXIT_DOMAIN, EXIT_CONVERGENCE = 0, 1, 2, 3
FORMATS = ("table", "csv", "json")


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


def parse_floats(text: str | list | tuple, what: str = "list") -> list[float]:
    if isinstance(text, (list, tuple)):
        vals = list(text)
    else:
        vals = [t for t in str(text).replace(" ", "").split(",") if t]
    try:
        return [float(v) for v in vals]
    except ValueError:
        raise DomainError(f"cannot read {what} {text!r} as comma-separated numbers") from None


def _read_table(path: str) -> Tabulated:
    try:
        data = np.loadtxt(path, delimiter=",", ndmin=2)
    except ValueError:
        data = np.loadtxt(path, delimiter=",", ndmin=2, skiprows=1)
    except OSError as exc:
        raise DomainError(f"cannot read table {path}: {exc}") from None
    if data.shape[1] != 2:
        raise DomainError(f"table {path} needs two columns t,value")
    return Tabulated(data[:, 0], data[:, 1])


def parse_weight(spec: str | dict) -> WeightFamily:
    """``const:l``, ``pow:k,e``, ``extg:a[,l]``, ``extphi:a[,eps]``, ``step:b1,..;l1,..``, ``table:path``.

    A mapping is read as the ``to_dict`` form of a weight.
    """
    if isinstance(spec, dict):
        return weight_from_dict(spec)
    kind, sep, body = str(spec).partition(":")
    if not sep:
        raise DomainError(f"weight {spec!r} must look like kind:args")
    kind = kind.strip().lower()
    if kind == "table":
        return _read_table(body.strip())
    if kind == "step":
        b, sep, lv = body.partition(";")
        if not sep:
            raise DomainError("step weight needs breakpoints;levels")
        return Step(parse_floats(b, "breakpoints"), parse_floats(lv, "levels"))
    args = parse_floats(body, f"{kind} arguments")
    builders: dict[str, tuple[Callable[..., WeightFamily], int, int]] = {
        "const": (Constant, 1, 1),
        "pow": (Power, 2, 2),
        "extg": (ExtremalG, 1, 2),
        "extphi": (ExtremalPhi, 1, 2),
    }
    if kind not in builders:
        raise DomainError(f"unknown weight kind {kind!r}")
    ctor, lo, hi = builders[kind]
    if not lo <= len(args) <= hi:
        raise DomainError(f"{kind} weight takes {lo} to {hi} numbers, got {len(args)}")
    return ctor(*args)


def _canon(name: str) -> str:
    return name.lower().replace("_", "").replace("-", "")


# ---------------------------------------------------------------------------
# Run configuration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RunConfig:
    """Everything a subcommand needs, merged from the config file and flags."""

    command: str
    fmt: str = "table"
    output: str | None = None
    ineq: str | None = None
    p: float | None = None
    q: float | None = None
    weight: WeightFamily | None = None
    sequence: SequenceData | None = None
    interval: Interval | None = None
    schedule: tuple[float, ...] | None = None
    rel_tol: float | None = None
    options: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.fmt not in FORMATS:
            raise DomainError(f"format must be one of {FORMATS}")
        if self.weight is not None and self.sequence is not None:
            raise DomainError("give either a weight or a sequence, not both")
        if self.schedule is not None and len(self.schedule) == 0:
            raise DomainError("sweep schedule must be nonempty")

    def need(self, name: str) -> Any:
        v = getattr(self, name, None) if name in self.__dataclass_fields__ else self.options.get(name)
        if v is None:
            raise DomainError(f"--{name.replace('_', '-')} is required for this command")
        return v

    def opt(self, name: str, default: Any = None) -> Any:
        v = self.options.get(name)
        return default if v is None else v

    @property
    def exponents(self) -> Exponents:
        return Exponents(self.need("p"), self.need("q"))

    @property
    def tolerance(self) -> ToleranceConfig:
        return ToleranceConfig(rel_tol=self.rel_tol)


_CORE_KEYS = ("ineq", "p", "q", "rel_tol")


def _load_config(path: str | None) -> dict[str, Any]:
    if not path:
        return {}
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise DomainError(f"cannot read config {path}: {exc}") from None
    if not isinstance(data, dict):
        raise DomainError("config file must hold a JSON object")
    return {k.replace("-", "_"): v for k, v in data.items()}


def build_config(command: str, flags: dict[str, Any]) -> RunConfig:
    merged = _load_config(flags.pop("config", None))
    merged.update({k: v for k, v in flags.items() if v is not None})
    fmt = merged.pop("format", "table")
    output = merged.pop("output", None)
    core = {k: merged.pop(k) for k in _CORE_KEYS if k in merged}
    for k in ("p", "q", "rel_tol"):
        if k in core:
            core[k] = float(core[k])

    weight = merged.pop("weight", None)
    weight = parse_weight(weight) if weight is not None else None

    lam, a = merged.pop("lambda", None), merged.pop("a", None)
    seq_file = merged.pop("sequence_file", None)
    sequence = None
    if seq_file is not None:
        if lam is not None or a is not None:
            raise DomainError("give the sequence inline or by file, not both")
        data = np.loadtxt(seq_file, delimiter=",", ndmin=2, comments="#")
        if data.shape[1] == 1:
            sequence = SequenceData.unweighted(data[:, 0])
        else:
            sequence = SequenceData(data[:, 0], data[:, 1])
    elif a is not None:
        av = parse_floats(a, "a")
        sequence = SequenceData(parse_floats(lam, "lambda"), av) if lam is not None else SequenceData.unweighted(av)
    elif lam is not None:
        raise DomainError("--lambda needs --a")

    iv = merged.pop("interval", None)
    interval = Interval(*parse_floats(iv, "interval")) if iv is not None else None
    sched = merged.pop("a_values", None)
    schedule = tuple(parse_floats(sched, "a values")) if sched is not None else None
    return RunConfig(
        command=command,
        fmt=fmt,
        output=output,
        weight=weight,
        sequence=sequence,
        interval=interval,
        schedule=schedule,
        options=merged,
        **core,
    )


# ---------------------------------------------------------------------------
# Output and exit codes
# ---------------------------------------------------------------------------


def _write(cfg: RunConfig, text: str) -> None:
    if cfg.output:
        Path(cfg.output).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)


def _guard(fn: Callable[..., int]) -> Callable[..., None]:
    @functools.wraps(fn)
    def wrapper(**kwargs: Any) -> None:
        try:
            code = fn(**kwargs)
        except DomainError as exc:
            click.echo(f"domain error: {exc}", err=True)
            code = EXIT_DOMAIN
        except ConvergenceError as exc:
            click.echo(f"convergence error: {exc}", err=True)
            code = EXIT_CONVERGENCE
        sys.exit(code)

    return wrapper


def _common(fn: Callable) -> Callable:
    fn = click.option("--output", "-o", type=click.Path(dir_okay=False), help="Write here instead of stdout.")(fn)
    fn = click.option("--format", "format", type=click.Choice(FORMATS), help="Output format (default table).")(fn)
    fn = click.option("--config", type=click.Path(exists=True, dir_okay=False), help="JSON file of option values.")(
        fn
    )
    return fn


def _report_out(cfg: RunConfig, rep: InequalityReport) -> int:
    d = rep.to_dict()
    if cfg.fmt == "json":
        _write(cfg, to_json(d))
    elif cfg.fmt == "csv":
        _write(cfg, to_csv("report/1", [d]))
    else:
        rows = [{"field": k, "value": d[k]} for k in ("name", "lhs", "rhs", "margin", "relative_margin", "satisfied")]
        rows += [{"field": f"params.{k}", "value": v} for k, v in d["params"].items()]
        rows += [{"field": f"extras.{k}", "value": v} for k, v in d["extras"].items()]
        _write(cfg, to_table(rows, ("field", "value")))
    return EXIT_OK if rep.satisfied else EXIT_VIOLATED


# ---------------------------------------------------------------------------
# check
# ---------------------------------------------------------------------------


def _seq(cfg: RunConfig) -> SequenceData:
    if cfg.sequence is None:
        raise DomainError("this inequality needs a sequence (--a, optionally --lambda, or --sequence-file)")
    return cfg.sequence


def _w(cfg: RunConfig) -> WeightFamily:
    if cfg.weight is None:
        raise DomainError("this inequality needs --weight")
    return cfg.weight


def _iv(cfg: RunConfig) -> Interval:
    return cfg.interval or Interval(0.0, 1.0)


def _N(cfg: RunConfig) -> int | None:
    n = cfg.opt("N")
    return None if n is None else int(n)


def _rt(cfg: RunConfig) -> float:
    return cfg.tolerance.for_path(True)


def _muck(cfg: RunConfig) -> MuckenhouptParams:
    return MuckenhouptParams(cfg.need("q"), float(cfg.need("M")))


_CHECKS: dict[str, Callable[[RunConfig], InequalityReport]] = {
    "hardy": lambda c: disc.check_hardy_discrete(_seq(c).a, c.need("p"), _N(c), _rt(c)),
    "copson": lambda c: disc.check_copson(_seq(c), c.need("p"), _N(c), _rt(c)),
    "theoremf": lambda c: disc.check_theorem_F(_seq(c), c.exponents, _N(c), _rt(c)),
    "theorem2": lambda c: disc.check_theorem_2(_seq(c), c.exponents, _N(c), _rt(c)),
    "lemma1": lambda c: disc.check_lemma1_term(
        float(c.need("a_n")), float(c.need("mean_n")), c.exponents, _rt(c)
    ),
    "young": lambda c: disc.check_young_pointwise(float(c.need("y")), c.need("p"), _rt(c)),
    "lemma2": lambda c: disc.check_lemma2(_seq(c), c.need("p"), _N(c), _rt(c)),
    "hardycontinuous": lambda c: cont.check_hardy_continuous(_w(c), c.need("p"), _iv(c), c.tolerance),
    "theoremd": lambda c: cont.check_theorem_D(_w(c), _iv(c), c.need("p"), c.tolerance),
    "theoreme": lambda c: cont.check_theorem_E(_w(c), _iv(c), c.exponents, c.tolerance),
    "theorem1": lambda c: cont.check_theorem_1(_w(c), _iv(c), c.exponents, c.tolerance),
    "lemmaa": lambda c: cont.check_lemmaA_identity(
        _w(c), float(c.need("alpha")), float(c.opt("u", 1.0)), c.tolerance
    ),
    "theorem3": lambda c: check_theorem_3(_w(c), c.need("p"), _muck(c), float(c.opt("t", 1.0)), c.tolerance),
    "corollary": lambda c: check_corollary(_w(c), c.need("p"), _muck(c), float(c.opt("t", 1.0)), c.tolerance),
}


@click.group()
@click.version_option(package_name="artifact")
def main() -> None:
    """Check Hardy-type inequalities for negative exponents and their Muckenhoupt-weight applications."""


@main.command()
@click.option("--ineq", help=f"Inequality: {', '.join(sorted(_CHECKS))}.")
@click.option("--p", type=float)
@click.option("--q", type=float)
@click.option("--weight", help="const:l | pow:k,e | extg:a,l | extphi:a | step:b1,..;l1,.. | table:path")
@click.option("--interval", help="lo,hi (default 0,1).")
@click.option("--lambda", "lambda_", help="Comma-separated weights lambda_n.")
@click.option("--a", help="Comma-separated terms a_n.")
@click.option("--sequence-file", type=click.Path(exists=True, dir_okay=False), help="CSV with a or lambda,a.")
@click.option("--N", "N", type=int, help="Truncation index for sequence inequalities.")
@click.option("--y", type=float, help="Point for the Young inequality.")
@click.option("--a-n", "a_n", type=float, help="Term a_n for the single-term inequality.")
@click.option("--mean-n", "mean_n", type=float, help="Mean A_n/Lam_n for the single-term inequality.")
@click.option("--alpha", type=float, help="Exponent a > 1 of the integral identity.")
@click.option("--u", type=float, help="Upper limit u in (0,1] of the integral identity.")
@click.option("--M", "M", type=float, help="Muckenhoupt bound M >= 1.")
@click.option("--t", type=float, help="Right end t in (0,1] for the Muckenhoupt bounds.")
@click.option("--rel-tol", type=float, help="Override the relative tolerance.")
@_common
@_guard
def check(**flags: Any) -> int:
    """Evaluate one inequality and report both sides and the margin."""
    flags["lambda"] = flags.pop("lambda_")
    cfg = build_config("check", flags)
    name = _canon(cfg.need("ineq"))
    if name not in _CHECKS:
        raise DomainError(f"unknown inequality {cfg.ineq!r}; expected one of {sorted(_CHECKS)}")
    return _report_out(cfg, _CHECKS[name](cfg))


# ---------------------------------------------------------------------------
# p0
# ---------------------------------------------------------------------------


@main.command()
@click.option("--q", type=float)
@click.option("--M", "M", type=float)
@_common
@_guard
def p0(**flags: Any) -> int:
    """Solve for the critical exponent p0(q, M)."""
    cfg = build_config("p0", flags)
    sol = solve_p0_detailed(cfg.need("q"), float(cfg.need("M")))
    row = {"q": sol.q, "M": sol.M, "p0": sol.p0, "residual": sol.residual, "iterations": sol.iterations}
    if cfg.fmt == "json":
        _write(cfg, to_json(row))
    elif cfg.fmt == "csv":
        _write(cfg, to_csv("p0/1", [row]))
    else:
        _write(cfg, to_table([row], tuple(row)))
    return EXIT_OK


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

SWEEPS = ("theorem1", "theorem3", "theoremD")


def _theorem3_schedule(cfg: RunConfig, p: float, q: float) -> tuple[float, ...]:
    if cfg.schedule is not None:
        return cfg.schedule
    top = min(p, q) - 1.0
    steps = int(cfg.opt("steps", 12))
    delta0 = float(cfg.opt("delta0", 0.5 * top))
    return tuple(top - delta0 * 2.0 ** -np.arange(steps, dtype=float))


@main.command()
@click.option("--kind", type=click.Choice(SWEEPS, case_sensitive=False))
@click.option("--p", type=float)
@click.option("--q", type=float)
@click.option("--ell", type=float, help="Mean of the extremal weight (default 1).")
@click.option("--steps", type=int, help="Number of geometric steps (default 12).")
@click.option("--delta0", type=float, help="Initial distance from the critical endpoint.")
@click.option("--a-values", help="Explicit increasing schedule for the theorem3 sweep.")
@click.option("--tol", type=float, help="Declared convergence tolerance (default 1e-3).")
@_common
@_guard
def sweep(**flags: Any) -> int:
    """Approach a critical endpoint along an extremal family.

    Columns: parameter, lhs, rhs, value (L_a or the ratio), limit, deviation.
    """
    cfg = build_config("sweep", flags)
    kind = _canon(cfg.opt("kind", ""))
    tol = float(cfg.opt("tol", 1e-3))
    steps = int(cfg.opt("steps", 12))
    delta0 = cfg.opt("delta0")
    ell = float(cfg.opt("ell", 1.0))
    if kind == "theorem1":
        res = sharpness_sweep_theorem1(cfg.exponents, ell, steps, delta0, tol, strict=False)
        ok = res.converged and res.extras.get("cross_check_ok", True)
    elif kind == "theoremd":
        res = ratio_sweep_theorem_D(cfg.need("p"), ell, steps, delta0, tol, strict=False)
        ok = res.converged
    elif kind == "theorem3":
        p, q = cfg.need("p"), cfg.need("q")
        res = sharpness_t1_sweep(p, q, _theorem3_schedule(cfg, p, q), tol, strict=False)
        ok = res.converged
    else:
        raise DomainError(f"--kind must be one of {SWEEPS}")
    _sweep_out(cfg, res)
    if not ok:
        click.echo(f"convergence error: final deviation {res.final_deviation:.3e} > {tol}", err=True)
        return EXIT_CONVERGENCE
    return EXIT_OK


def _sweep_out(cfg: RunConfig, res: SharpnessSweep) -> None:
    rows = [{"label": res.label, **r} for r in res.rows()]
    if cfg.fmt == "json":
        _write(cfg, to_json(rows))
    elif cfg.fmt == "csv":
        _write(cfg, to_csv("sweep/1", rows))
    else:
        _write(cfg, to_table(rows, ("parameter", "lhs", "rhs", "value", "limit", "deviation")))


# ---------------------------------------------------------------------------
# batch
# ---------------------------------------------------------------------------


def _checker_name(name: str) -> str:
    by_canon = {_canon(k): k for k in CHECKERS}
    key = _canon(name)
    if key not in by_canon:
        raise DomainError(f"unknown checker {name!r}; expected one of {sorted(CHECKERS)}")
    return by_canon[key]


def _range(cfg: RunConfig, name: str, default: tuple[float, float]) -> tuple[float, float]:
    v = cfg.opt(name)
    if v is None:
        return default
    vals = parse_floats(v, name)
    if len(vals) != 2:
        raise DomainError(f"--{name.replace('_', '-')} takes lo,hi")
    return vals[0], vals[1]


@main.command()
@click.option("--checker", help=f"One of {', '.join(sorted(CHECKERS))}.")
@click.option("--kind", type=click.Choice(KINDS), help="Instance generator.")
@click.option("--seed", type=int, help="Base seed (default 0).")
@click.option("--count", type=int, help="Number of instances (default 1000).")
@click.option("--size", type=int, help="Maximum sequence length or number of step levels.")
@click.option("--p", type=float, help="Fix p instead of drawing it.")
@click.option("--q", type=float, help="Fix q instead of drawing it.")
@click.option("--p-range", help="lo,hi for drawn p.")
@click.option("--q-range", help="lo,hi for drawn q.")
@click.option("--a-range", help="lo,hi for power-weight exponents.")
@click.option("--extremal", type=click.Choice(("g", "phi")), help="Family for near_extremal.")
@_common
@_guard
def batch(**flags: Any) -> int:
    """Run a checker over seeded random instances; HARDYLAB_THREADS sets the worker count."""
    cfg = build_config("batch", flags)
    name = _checker_name(cfg.opt("checker", ""))
    kind = cfg.opt("kind") or ("lognormal_sequence" if CHECKERS[name].takes_sequence else "monotone_step_weight")
    defaults = GeneratorSpec(0, kind)
    spec = GeneratorSpec(
        seed=int(cfg.opt("seed", 0)),
        kind=kind,
        size=int(cfg.opt("size", defaults.size)),
        p_range=_range(cfg, "p_range", defaults.p_range),
        q_range=_range(cfg, "q_range", defaults.q_range),
        a_range=_range(cfg, "a_range", defaults.a_range),
        extremal=cfg.opt("extremal", "g"),
    )
    params = {k: getattr(cfg, k) for k in ("p", "q") if getattr(cfg, k) is not None}
    res = run_batch(name, spec, int(cfg.opt("count", 1000)), params)
    d = res.to_dict()
    if cfg.fmt == "json":
        _write(cfg, to_json(d))
    elif cfg.fmt == "csv":
        _write(cfg, to_csv("batch/1", [d]))
    else:
        _write(cfg, to_table([d], ("checker", "total", "satisfied", "worst_relative_margin", "worst_index")))
        if res.worst_case is not None:
            click.echo("worst case: " + to_json(res.worst_case), nl=False)
    return EXIT_OK if res.satisfied == res.total else EXIT_VIOLATED


# ---------------------------------------------------------------------------
# muck-const
# ---------------------------------------------------------------------------


@main.command("muck-const")
@click.option("--weight", help="Nondecreasing weight on (0, 1].")
@click.option("--q", type=float)
@click.option("--M", "M", type=float, help="If given, exit 1 when the computed constant exceeds M.")
@click.option("--grid-size", type=int, help="Number of geometric grid points (default 256).")
@click.option("--t-min", type=float, help="Smallest grid point (default 1e-6).")
@_common
@_guard
def muck_const(**flags: Any) -> int:
    """Muckenhoupt condition profile of a weight on a geometric t grid and its maximum."""
    cfg = build_config("muck-const", flags)
    n = int(cfg.opt("grid_size", 256))
    t_min = float(cfg.opt("t_min", 1e-6))
    if n < 1 or not 0.0 < t_min <= 1.0:
        raise DomainError("need grid size >= 1 and t-min in (0, 1]")
    q = cfg.need("q")
    prof = muckenhoupt_profile(_w(cfg), q, np.geomspace(t_min, 1.0, n), cfg.tolerance.quadrature)
    rows = [{"q": q, "t": float(t), "value": float(v)} for t, v in zip(prof.t, prof.values)]
    if cfg.fmt == "json":
        _write(cfg, to_json({"q": q, "constant": prof.constant, "profile": rows}))
    elif cfg.fmt == "csv":
        _write(cfg, to_csv("muck/1", rows))
    else:
        _write(cfg, f"constant = {prof.constant:.10g}\n" + to_table(rows, ("t", "value")))
    M = cfg.opt("M")
    if M is not None and prof.constant > float(M) * (1.0 + cfg.tolerance.for_path(False)):
        return EXIT_VIOLATED
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    main()
