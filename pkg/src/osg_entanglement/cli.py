"""Scenario runner: time sweeps of the closed forms, optional oracle cross-check.

Configuration files are flat ``key = value`` text with ``#`` comments, keys
named after the :class:`ScenarioConfig` fields. Number values may use ``pi``
(``pi/4``, ``2*pi/3``). Command-line flags override file keys.

Exit codes: 0 success, 1 configuration error, 2 I/O error,
3 tolerance or invariant failure.
"""

from __future__ import annotations

import argparse
import ast
import dataclasses
import json
import math
import operator
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

import numpy as np

from .dynamics import XState, coeffs_one_atom, coeffs_phi, coeffs_psi, rho_one_atom, rho_phi, rho_psi
from .entanglement import (
    concurrence_closed_phi,
    concurrence_closed_psi,
    concurrence_wootters,
    envelope_death_time,
    ppt_report,
    sudden_death_time,
)
from .errors import ConfigError, NumericalError, OSGError, ScanTooShort, ToleranceError, ValidationError
from .oracle import DEFAULT_MAX_DT, DEFAULT_POINTS, Grid, iter_channels, reduced_from_channels
from .packets import GaussianPacket, kinematics
from .params import DerivedConstants, PhysicalParams, derive_constants

EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_TOLERANCE = 0, 1, 2, 3

SCENARIOS = ("psi", "phi", "one_atom")
FORMATS = ("csv", "json")
PRESETS = ("fig1", "fig2", "fig3", "fig4")

CONCURRENCE_TOL = 1e-9
ORACLE_TOL = 1e-6
STATE_TOL = 1e-12

_PAPER_WAVELENGTH = 1e-2


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str
    mass: float = 1e-26
    coupling_eps: float = 1e4
    wavelength: float = _PAPER_WAVELENGTH
    x0: float = _PAPER_WAVELENGTH / 10
    dx0: float = _PAPER_WAVELENGTH / 50
    t_max: float = 3e-3
    n_samples: int = 3000
    gammas: tuple[float, ...] = (math.pi / 4, math.pi / 6, math.pi / 12)
    run_oracle: bool = False
    zero_optical_phase: bool = False
    output_format: str = "csv"
    output_path: str = "-"
    oracle_points: int = DEFAULT_POINTS
    oracle_max_dt: float = DEFAULT_MAX_DT

    def __post_init__(self) -> None:
        object.__setattr__(self, "gammas", tuple(float(g) for g in self.gammas))
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"must be one of {', '.join(SCENARIOS)}", key="scenario")
        if self.output_format not in FORMATS:
            raise ConfigError(f"must be one of {', '.join(FORMATS)}", key="output_format")
        if not (math.isfinite(self.t_max) and self.t_max > 0):
            raise ConfigError("must be > 0", key="t_max")
        if self.n_samples < 2:
            raise ConfigError("must be >= 2", key="n_samples")
        if not self.gammas:
            raise ConfigError("needs at least one value", key="gammas")
        if not (math.isfinite(self.oracle_max_dt) and self.oracle_max_dt > 0):
            raise ConfigError("must be > 0", key="oracle_max_dt")
        for g in self.gammas:
            if not 0.0 <= g <= math.pi / 2:
                raise ConfigError(f"{g!r} lies outside [0, pi/2]", key="gammas")
        try:
            self.physical(self.gammas[0])
        except ValidationError as exc:
            raise ConfigError(exc.message, key=exc.field) from None

    def physical(self, gamma: float) -> PhysicalParams:
        return PhysicalParams(
            mass=self.mass,
            coupling_eps=self.coupling_eps,
            wavelength=self.wavelength,
            x0=self.x0,
            dx0=self.dx0,
            gamma=gamma,
        )


_FIELDS = {f.name: f for f in dataclasses.fields(ScenarioConfig)}
_FLOAT_KEYS = {"mass", "coupling_eps", "wavelength", "x0", "dx0", "t_max", "oracle_max_dt"}
_INT_KEYS = {"n_samples", "oracle_points"}
_BOOL_KEYS = {"run_oracle", "zero_optical_phase"}
_TRUE = {"true", "yes", "on", "1"}
_FALSE = {"false", "no", "off", "0"}

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}
_UNARY = {ast.UAdd: operator.pos, ast.USub: operator.neg}


def parse_number(text: str) -> float:
    """Parse a float literal or a small arithmetic expression in ``pi``."""
    try:
        return float(text)
    except ValueError:
        pass

    def walk(node):
        if isinstance(node, ast.Expression):
            return walk(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](walk(node.left), walk(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
            return _UNARY[type(node.op)](walk(node.operand))
        raise ValueError(f"not a number: {text!r}")

    try:
        value = walk(ast.parse(text.strip(), mode="eval"))
    except (SyntaxError, ZeroDivisionError):
        raise ValueError(f"not a number: {text!r}") from None
    return value


def _convert(key: str, raw: str) -> Any:
    if key in _FLOAT_KEYS:
        return parse_number(raw)
    if key in _INT_KEYS:
        return int(raw)
    if key in _BOOL_KEYS:
        low = raw.lower()
        if low in _TRUE:
            return True
        if low in _FALSE:
            return False
        raise ValueError(f"not a boolean: {raw!r}")
    if key == "gammas":
        parts = [s for s in (part.strip() for part in raw.split(",")) if s]
        return tuple(parse_number(s) for s in parts)
    return raw


def parse_config(source: str) -> ScenarioConfig:
    values: dict[str, Any] = {}
    lines: dict[str, int] = {}
    for lineno, line in enumerate(source.splitlines(), start=1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        if "=" not in text:
            raise ConfigError("expected 'key = value'", line=lineno)
        key, raw = (part.strip() for part in text.split("=", 1))
        if key not in _FIELDS:
            raise ConfigError("unknown key", key=key, line=lineno)
        if key in values:
            raise ConfigError("duplicate key", key=key, line=lineno)
        try:
            values[key] = _convert(key, raw)
        except ValueError as exc:
            raise ConfigError(str(exc), key=key, line=lineno) from None
        lines[key] = lineno
    return build_config(values, lines)


def build_config(values: dict[str, Any], lines: dict[str, int] | None = None) -> ScenarioConfig:
    """Apply defaults (x0 and dx0 follow the wavelength) and validate."""
    lines = lines or {}
    if "scenario" not in values:
        raise ConfigError("missing required key", key="scenario")
    values = dict(values)
    wavelength = values.get("wavelength", _PAPER_WAVELENGTH)
    values.setdefault("x0", wavelength / 10)
    values.setdefault("dx0", wavelength / 50)
    try:
        return ScenarioConfig(**values)
    except ConfigError as exc:
        if exc.line is None and exc.key in lines:
            raise ConfigError(exc.message, key=exc.key, line=lines[exc.key]) from None
        raise


def _format_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ", ".join(_format_value(v) for v in value)
    return str(value)


def format_config(cfg: ScenarioConfig) -> str:
    return "".join(f"{name} = {_format_value(getattr(cfg, name))}\n" for name in _FIELDS)


def load_preset(name: str) -> ScenarioConfig:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}")
    text = resources.files(__package__).joinpath("presets", f"{name}.cfg").read_text()
    return parse_config(text)


# ---------------------------------------------------------------- running


@dataclass
class ScenarioResult:
    columns: list[str]
    rows: list[dict[str, Any]]
    summary: dict[str, Any] = field(default_factory=dict)


def columns_for(scenario: str) -> list[str]:
    head = ["gamma", "t", "gamma_exp"]
    if scenario == "psi":
        return head + ["a1", "a2", "a3", "a4", "concurrence_closed", "concurrence_general", "min_ppt_eig", "separable"]
    if scenario == "phi":
        return head + [
            "b1_re", "b1_im", "b2", "b3", "b5",
            "concurrence_closed", "concurrence_general", "d_value", "min_ppt_eig", "separable",
        ]  # fmt: skip
    return head + ["q1", "q2_re", "q2_im", "q3"]


def _constants(cfg: ScenarioConfig, p: PhysicalParams) -> DerivedConstants:
    c = derive_constants(p)
    return dataclasses.replace(c, omega=0.0) if cfg.zero_optical_phase else c


def _two_qubit_row(t: float, gamma: float, g: float, cfg: ScenarioConfig, p, c) -> dict[str, Any]:
    row: dict[str, Any] = {"gamma": gamma, "t": t, "gamma_exp": g}
    if cfg.scenario == "psi":
        a = coeffs_psi(t, p, c)
        rho = rho_psi(t, p, c)
        row.update(a1=a.a1, a2=a.a2, a3=a.a3.real, a4=a.a4)
        closed = float(concurrence_closed_psi(a))
    else:
        b = coeffs_phi(t, p, c)
        # local phase rotation to a real X state; concurrence and PPT spectrum are unchanged
        rho = XState(rho_phi(t, p, c).diag, outer_coherence=b.b1_abs)
        row.update(b1_re=b.b1.real, b1_im=b.b1.imag, b2=b.b2, b3=b.b3, b5=b.b5)
        d, closed = concurrence_closed_phi(b)
        closed = float(closed)
    general = concurrence_wootters(rho)
    if abs(closed - general) > CONCURRENCE_TOL:
        raise ToleranceError(
            f"closed and general concurrence differ by {abs(closed - general):.3g} at t={t!r}, gamma={gamma!r}"
        )
    report = ppt_report(rho)
    row.update(concurrence_closed=closed, concurrence_general=general)
    if cfg.scenario == "phi":
        row["d_value"] = float(d)
    row.update(min_ppt_eig=report.min_eig, separable=report.separable)
    return row


def _one_atom_row(t: float, gamma: float, g: float, p, c) -> dict[str, Any]:
    q = coeffs_one_atom(t, p, c)
    rho = rho_one_atom(t, p, c)
    if abs(np.trace(rho).real - 1.0) > STATE_TOL or np.linalg.eigvalsh(rho)[0] < -STATE_TOL:
        raise NumericalError(f"one-atom state invalid at t={t!r}")
    return {"gamma": gamma, "t": t, "gamma_exp": g, "q1": q.q1, "q2_re": q.q2.real, "q2_im": q.q2.imag, "q3": q.q3}


def _closed_matrix(scenario: str, t: float, p, c) -> np.ndarray:
    if scenario == "psi":
        return rho_psi(t, p, c).matrix()
    if scenario == "phi":
        return rho_phi(t, p, c).matrix()
    return rho_one_atom(t, p, c)


def _death_summary(p: PhysicalParams, c: DerivedConstants, t_max: float) -> dict[str, Any]:
    period = 2.0 * math.pi / c.omega0 if c.omega0 > 0 else t_max
    n = max(2, math.ceil(t_max / (period / 100)) + 1)
    scan = np.linspace(0.0, t_max, n)
    entry: dict[str, Any] = {"gamma": p.gamma, "t_envelope": envelope_death_time(p, c)}
    try:
        entry["t_death"] = sudden_death_time(p, c, scan)
        entry["scan_too_short"] = False
    except ScanTooShort:
        entry["t_death"] = None
        entry["scan_too_short"] = True
    return entry


def run_scenario(cfg: ScenarioConfig) -> ScenarioResult:
    """Evaluate every (gamma, t) row; raise on any failed cross-check."""
    times = np.linspace(0.0, cfg.t_max, cfg.n_samples)
    params = [cfg.physical(g) for g in cfg.gammas]
    consts = _constants(cfg, params[0])
    pkt = GaussianPacket.from_params(params[0])
    decay = kinematics(times, pkt, consts).gamma_exp
    rows: list[dict[str, Any]] = []
    for p in params:
        for t, g in zip(times, decay):
            t, g = float(t), float(g)
            if cfg.scenario == "one_atom":
                rows.append(_one_atom_row(t, p.gamma, g, p, consts))
            else:
                rows.append(_two_qubit_row(t, p.gamma, g, cfg, p, consts))
    summary: dict[str, Any] = {
        "scenario": cfg.scenario,
        "derived_constants": dataclasses.asdict(consts),
    }
    if cfg.scenario == "phi":
        summary["death_times"] = [_death_summary(p, consts, cfg.t_max) for p in params]
    if cfg.run_oracle:
        grid = Grid.around(params[0], cfg.oracle_points)
        worst = 0.0
        for channels in iter_channels(times, params[0], consts, grid, cfg.oracle_max_dt):
            for p in params:
                numeric = reduced_from_channels(cfg.scenario, p.gamma, channels)
                closed = _closed_matrix(cfg.scenario, channels.t, p, consts)
                worst = max(worst, float(np.max(np.abs(numeric - closed))))
        summary["oracle_max_discrepancy"] = worst
        if worst > ORACLE_TOL:
            raise ToleranceError(f"closed forms and oracle differ by {worst:.3g} (tolerance {ORACLE_TOL:g})")
    return ScenarioResult(columns=columns_for(cfg.scenario), rows=rows, summary=summary)


# ---------------------------------------------------------------- output


def _format_cell(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    return format(float(value), ".16e")


def render_csv(result: ScenarioResult) -> str:
    lines = [",".join(result.columns)]
    for row in result.rows:
        lines.append(",".join(_format_cell(row[col]) for col in result.columns))
    return "\n".join(lines) + "\n"


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    return value


def render_json(result: ScenarioResult, cfg: ScenarioConfig) -> str:
    doc = {
        "metadata": {
            "config": _jsonable(dataclasses.asdict(cfg)),
            "columns": result.columns,
            "summary": _jsonable(result.summary),
        },
        "rows": [_jsonable({col: row[col] for col in result.columns}) for row in result.rows],
    }
    return json.dumps(doc, indent=1) + "\n"


def write_output(text: str, path: str) -> None:
    if path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _print_summary(summary: dict[str, Any]) -> None:
    err = sys.stderr
    for entry in summary.get("death_times", []):
        t_death = entry["t_death"]
        shown = "none" if t_death is None else f"{t_death:.6e} s"
        if entry["scan_too_short"]:
            shown = "not reached (scan too short)"
        print(f"gamma={entry['gamma']:.6f}: sudden death at {shown}", file=err)
    if "oracle_max_discrepancy" in summary:
        print(f"oracle max |closed - numeric| = {summary['oracle_max_discrepancy']:.3e}", file=err)


# ---------------------------------------------------------------- entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="osg-entanglement",
        description="Entanglement decay of two atoms in the optical Stern-Gerlach model.",
    )
    source = parser.add_mutually_exclusive_group()
    source.add_argument("--config", type=Path, help="key = value configuration file")
    source.add_argument("--preset", choices=PRESETS, help="shipped reference configuration")
    parser.add_argument("--scenario", choices=SCENARIOS)
    parser.add_argument("--gamma", action="append", help="superposition angle in rad (repeatable, accepts pi/4)")
    parser.add_argument("--t-max", help="end of the time sweep (s)")
    parser.add_argument("--samples", help="number of time samples")
    parser.add_argument("--oracle", action="store_true", default=None, help="cross-check against the grid oracle")
    parser.add_argument("--zero-optical-phase", action="store_true", default=None)
    parser.add_argument("--format", choices=FORMATS)
    parser.add_argument("--out", help="output file, '-' for stdout")
    return parser


def _overrides(args: argparse.Namespace) -> dict[str, str]:
    raw = {
        "scenario": args.scenario,
        "t_max": args.t_max,
        "n_samples": args.samples,
        "run_oracle": None if args.oracle is None else "true",
        "zero_optical_phase": None if args.zero_optical_phase is None else "true",
        "output_format": args.format,
        "output_path": args.out,
    }
    if args.gamma:
        raw["gammas"] = ",".join(args.gamma)
    return {k: v for k, v in raw.items() if v is not None}


def resolve_config(args: argparse.Namespace) -> ScenarioConfig:
    values: dict[str, Any] = {}
    if args.preset:
        values = dataclasses.asdict(load_preset(args.preset))
    elif args.config:
        values = dataclasses.asdict(parse_config(args.config.read_text(encoding="utf-8")))
    explicit_geometry = {"x0", "dx0"} & set(values)
    for key, raw in _overrides(args).items():
        try:
            values[key] = _convert(key, raw)
        except ValueError as exc:
            raise ConfigError(str(exc), key=key) from None
    if not explicit_geometry:
        values.pop("x0", None)
        values.pop("dx0", None)
    return build_config(values)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        result = run_scenario(cfg)
    except (ToleranceError, NumericalError, OSGError) as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return EXIT_TOLERANCE
    text = render_csv(result) if cfg.output_format == "csv" else render_json(result, cfg)
    try:
        write_output(text, cfg.output_path)
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    _print_summary(result.summary)
    return EXIT_OK


def entrypoint() -> None:
    sys.exit(main())
