"""Command-line front end: flat key=value configs, subcommands, exit codes.

Config files are plain text, one `key = value` per line, `#` comments and
blank lines allowed.  Unknown keys, bad types, and out-of-range values are
hard errors that name the key and the offending line.  Exit codes: 0 on
success, 1 on validation failure (including config errors), 2 on
non-convergence, 3 on I/O errors.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from dataclasses import dataclass
from pathlib import Path

from .energy import StatePair
from .experiments import (
    PerturbationSignViolation,
    compare_periodic_limit,
    lambda_sweep,
    decoupling_limit,
    write_sweep_csv,
)
from .grid import make_grid, write_field
from .model import (
    NonlinearitySpec,
    ProblemSpec,
    ScalarFunctionSpec,
    ValidationFailed,
    validate_assumptions,
)
from .solver import (
    BracketFailure,
    NotInEPlus,
    SolverOptions,
    mountain_pass_diagnostics,
    solve_ground_state,
    solve_scalar_ground_state,
    solve_with_restarts,
)

__all__ = [
    "ConfigError",
    "ParsedConfig",
    "parse_config",
    "render_config",
    "run",
    "main",
]

SUBCOMMANDS = (
    "check",
    "solve",
    "solve-scalar",
    "sweep",
    "compare-periodic",
    "limit",
    "diagnose",
)


class ConfigError(ValueError):
    """Config text violates the schema; message names key and line."""


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("true", "1", "yes", "on"):
        return True
    if t in ("false", "0", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _parse_int_list(text: str) -> tuple:
    return tuple(int(part.strip()) for part in text.split(","))


def _parse_float_list(text: str) -> tuple:
    return tuple(float(part.strip()) for part in text.split(","))


def _power_of_two(n: int) -> bool:
    return n >= 8 and (n & (n - 1)) == 0


def _check_n(n):
    if not _power_of_two(n):
        raise ValueError(f"n must be a power of two >= 8, got {n}")


def _check_dim(d):
    if d not in (1, 2, 3):
        raise ValueError(f"dim must be 1, 2, or 3, got {d}")


def _check_positive(x):
    if not x > 0.0:
        raise ValueError(f"expected a positive value, got {x}")


def _check_s(s):
    if not (0.0 < s <= 1.0):
        raise ValueError(f"fractional order must lie in (0, 1], got {s}")


def _check_kind(k):
    if k not in ("constant", "periodic_trig", "periodic_plus_perturbation"):
        raise ValueError(f"unknown function kind {k!r}")


def _check_nl_kind(k):
    if k not in ("log_power", "pure_power"):
        raise ValueError(f"unknown nonlinearity kind {k!r}")


def _check_which(w):
    if w not in (1, 2):
        raise ValueError(f"scalar.which must be 1 or 2, got {w}")


def _check_unit(x):
    if not (0.0 < x <= 1.0):
        raise ValueError(f"expected a value in (0, 1], got {x}")


_REQUIRED = object()


def _function_keys(prefix: str) -> dict:
    return {
        f"{prefix}.kind": (str, _REQUIRED, _check_kind),
        f"{prefix}.base": (float, 0.0, None),
        f"{prefix}.trig_amplitude": (float, 0.0, None),
        f"{prefix}.trig_periods": (_parse_int_list, (1,), None),
        f"{prefix}.perturbation_amplitude": (float, 0.0, None),
        f"{prefix}.perturbation_width": (float, 1.0, _check_positive),
    }


def _schema() -> dict:
    schema = {
        "dim": (int, _REQUIRED, _check_dim),
        "n": (int, _REQUIRED, _check_n),
        "L": (float, _REQUIRED, _check_positive),
        "s1": (float, _REQUIRED, _check_s),
        "s2": (float, _REQUIRED, _check_s),
        "periodic_reference": (_parse_bool, False, None),
        "nl1.kind": (str, _REQUIRED, _check_nl_kind),
        "nl1.gamma": (float, 1.0, None),
        "nl1.p": (float, 4.0, None),
        "nl2.kind": (str, _REQUIRED, _check_nl_kind),
        "nl2.gamma": (float, 1.0, None),
        "nl2.p": (float, 4.0, None),
        "solver.max_iters": (int, 5000, _check_positive),
        "solver.step_init": (float, 1.0, _check_positive),
        "solver.backtrack_factor": (float, 0.5, _check_unit),
        "solver.tol_energy": (float, 1.0e-10, _check_positive),
        "solver.tol_residual": (float, 1.0e-8, _check_positive),
        "solver.seed": (int, 0, None),
        "solver.positivity_clip": (_parse_bool, True, None),
        "sweep.scales": (_parse_float_list, (0.2, 0.4, 0.6, 0.8), None),
        "limit.scales": (_parse_float_list, (0.5, 0.25, 0.1, 0.05, 0.01), None),
        "scalar.which": (int, 1, _check_which),
    }
    for prefix in ("V1", "V2", "coupling"):
        schema.update(_function_keys(prefix))
    return schema


@dataclass(frozen=True)
class ParsedConfig:
    problem: ProblemSpec
    options: SolverOptions
    sweep_scales: tuple
    limit_scales: tuple
    scalar_which: int


def _parse_pairs(text: str) -> dict:
    """key -> (raw value, line number); duplicate and malformed lines error."""
    pairs = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key in pairs:
            raise ConfigError(
                f"line {lineno}: duplicate key {key!r} "
                f"(first set on line {pairs[key][1]})"
            )
        pairs[key] = (value, lineno)
    return pairs


def _typed_values(pairs: dict) -> dict:
    schema = _schema()
    for key, (_, lineno) in pairs.items():
        if key not in schema:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
    values = {}
    for key, (conv, default, check) in schema.items():
        if key in pairs:
            raw, lineno = pairs[key]
            where = f"line {lineno}" if lineno > 0 else "override"
            try:
                val = conv(raw)
            except ValueError as exc:
                raise ConfigError(f"{where}: key {key!r}: {exc}") from exc
            if check is not None:
                try:
                    check(val)
                except ValueError as exc:
                    raise ConfigError(f"{where}: key {key!r}: {exc}") from exc
            values[key] = val
        elif default is _REQUIRED:
            raise ConfigError(f"missing required key {key!r}")
        else:
            values[key] = default
    return values


def _function_spec(values: dict, prefix: str) -> ScalarFunctionSpec:
    return ScalarFunctionSpec(
        kind=values[f"{prefix}.kind"],
        base_constant=values[f"{prefix}.base"],
        trig_amplitude=values[f"{prefix}.trig_amplitude"],
        trig_periods=values[f"{prefix}.trig_periods"],
        perturbation_amplitude=values[f"{prefix}.perturbation_amplitude"],
        perturbation_width=values[f"{prefix}.perturbation_width"],
    )


def _build(values: dict) -> ParsedConfig:
    grid = make_grid(values["dim"], values["n"], values["L"])
    try:
        problem = ProblemSpec(
            grid=grid,
            s1=values["s1"],
            s2=values["s2"],
            V1=_function_spec(values, "V1"),
            V2=_function_spec(values, "V2"),
            coupling=_function_spec(values, "coupling"),
            nl1=NonlinearitySpec(
                kind=values["nl1.kind"], gamma=values["nl1.gamma"], p=values["nl1.p"]
            ),
            nl2=NonlinearitySpec(
                kind=values["nl2.kind"], gamma=values["nl2.gamma"], p=values["nl2.p"]
            ),
            periodic_reference=values["periodic_reference"],
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    options = SolverOptions(
        max_iters=values["solver.max_iters"],
        step_init=values["solver.step_init"],
        backtrack_factor=values["solver.backtrack_factor"],
        tol_energy=values["solver.tol_energy"],
        tol_residual=values["solver.tol_residual"],
        seed=values["solver.seed"],
        positivity_clip=values["solver.positivity_clip"],
    )
    return ParsedConfig(
        problem=problem,
        options=options,
        sweep_scales=values["sweep.scales"],
        limit_scales=values["limit.scales"],
        scalar_which=values["scalar.which"],
    )


def parse_config(text: str, overrides=()) -> ParsedConfig:
    """Parse config text, then apply `key=value` override strings, then build."""
    pairs = _parse_pairs(text)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r}: expected key=value")
        key, _, value = item.partition("=")
        pairs[key.strip()] = (value.strip(), 0)
    return _build(_typed_values(pairs))


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ",".join(_fmt(v) for v in value)
    return str(value)


def render_config(cfg: ParsedConfig) -> str:
    """Emit the full explicit config; parse_config(render_config(c)) == c."""
    p = cfg.problem
    o = cfg.options
    entries = [
        ("dim", p.grid.dim),
        ("n", p.grid.n_per_axis),
        ("L", p.grid.box_length),
        ("s1", p.s1),
        ("s2", p.s2),
        ("periodic_reference", p.periodic_reference),
    ]
    for prefix, spec in (("V1", p.V1), ("V2", p.V2), ("coupling", p.coupling)):
        entries += [
            (f"{prefix}.kind", spec.kind),
            (f"{prefix}.base", spec.base_constant),
            (f"{prefix}.trig_amplitude", spec.trig_amplitude),
            (f"{prefix}.trig_periods", spec.trig_periods),
            (f"{prefix}.perturbation_amplitude", spec.perturbation_amplitude),
            (f"{prefix}.perturbation_width", spec.perturbation_width),
        ]
    for prefix, nl in (("nl1", p.nl1), ("nl2", p.nl2)):
        entries += [
            (f"{prefix}.kind", nl.kind),
            (f"{prefix}.gamma", nl.gamma),
            (f"{prefix}.p", nl.p),
        ]
    entries += [
        ("solver.max_iters", o.max_iters),
        ("solver.step_init", o.step_init),
        ("solver.backtrack_factor", o.backtrack_factor),
        ("solver.tol_energy", o.tol_energy),
        ("solver.tol_residual", o.tol_residual),
        ("solver.seed", o.seed),
        ("solver.positivity_clip", o.positivity_clip),
        ("sweep.scales", cfg.sweep_scales),
        ("limit.scales", cfg.limit_scales),
        ("scalar.which", cfg.scalar_which),
    ]
    return "\n".join(f"{k} = {_fmt(v)}" for k, v in entries) + "\n"


def _write_report(out_dir: Path, text: str) -> None:
    (out_dir / "report.txt").write_text(text, encoding="ascii")


def _write_state(out_dir: Path, state: StatePair) -> None:
    write_field(state.u, out_dir / "u.field")
    write_field(state.v, out_dir / "v.field")


def _sweep_rows_text(rows) -> str:
    lines = ["scale       level           converged"]
    for r in rows:
        lines.append(f"{r.lambda_scale:<11.6g} {r.level:< 15.10g} {r.converged}")
    return "\n".join(lines)


def _dispatch(args, cfg: ParsedConfig, out_dir: Path) -> int:
    problem, opts = cfg.problem, cfg.options
    command = args.command

    if command == "check":
        report = validate_assumptions(problem)
        text = report.render()
        _write_report(out_dir, text + "\n")
        print(text)
        return 0 if report.all_passed else 1

    if command == "solve":
        rep = solve_with_restarts(problem, opts=opts, restarts=args.restarts)
        _write_report(out_dir, rep.summary() + "\n")
        _write_state(out_dir, rep.state)
        print(rep.summary())
        return 0 if rep.converged else 2

    if command == "solve-scalar":
        best = None
        for k in range(args.restarts):
            o = dataclasses.replace(opts, seed=opts.seed + k)
            rep = solve_scalar_ground_state(cfg.scalar_which, problem, opts=o)
            if best is None or (rep.converged, -rep.level) > (best.converged, -best.level):
                best = rep
        best = dataclasses.replace(best, restarts=args.restarts)
        text = f"component = {cfg.scalar_which}\n" + best.summary()
        _write_report(out_dir, text + "\n")
        _write_state(out_dir, best.state)
        print(text)
        return 0 if best.converged else 2

    if command == "sweep":
        report = lambda_sweep(problem, cfg.sweep_scales, opts=opts)
        write_sweep_csv(report.rows, out_dir / "sweep.csv")
        text = (
            _sweep_rows_text(report.rows)
            + f"\nmonotone_decreasing = {report.monotone_decreasing}"
            + f"\nscalar_levels = {report.scalar_levels[0]!r}, {report.scalar_levels[1]!r}"
            + f"\nlimit_level = {report.limit_level!r}"
        )
        _write_report(out_dir, text + "\n")
        print(text)
        return 0 if all(r.converged for r in report.rows) else 2

    if command == "compare-periodic":
        rep = compare_periodic_limit(problem, opts=opts, restarts=args.restarts)
        text = (
            f"level_periodic  = {rep.level_periodic!r}\n"
            f"level_perturbed = {rep.level_perturbed!r}\n"
            f"gap = {rep.gap!r} (margin {rep.margin!r})\n"
            f"ordering_holds = {rep.ordering_holds}\n"
            f"converged = {rep.converged_periodic and rep.converged_perturbed}"
        )
        _write_report(out_dir, text + "\n")
        print(text)
        return 0 if (rep.converged_periodic and rep.converged_perturbed) else 2

    if command == "limit":
        report = decoupling_limit(problem, cfg.limit_scales, opts=opts)
        write_sweep_csv(report.rows, out_dir / "sweep.csv")
        text = (
            _sweep_rows_text(report.rows)
            + f"\nscalar_levels = {report.scalar_levels[0]!r}, {report.scalar_levels[1]!r}"
            + f"\ntie = {report.tie}\nsurvivor = {report.survivor}"
            + f"\nvanishing_mass_ratio = {report.vanishing_mass_ratio}"
            + f"\nsurvivor_distance = {report.survivor_distance}"
            + f"\nbranch_switch_flagged = {report.branch_switch_flagged}"
            + f"\nmass_bounded = {report.mass_bounded}"
        )
        _write_report(out_dir, text + "\n")
        print(text)
        return 0 if all(r.converged for r in report.rows) else 2

    if command == "diagnose":
        rep = solve_ground_state(problem, opts=opts)
        diag = mountain_pass_diagnostics(
            problem, rep.state, opts=opts, reference_level=rep.level
        )
        text = rep.summary() + "\n" + diag.summary()
        _write_report(out_dir, text + "\n")
        _write_state(out_dir, rep.state)
        print(text)
        return 0 if rep.converged else 2

    raise AssertionError(f"unhandled command {command!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracground",
        description="Ground states of linearly coupled fractional systems "
        "on periodic boxes.",
        epilog="exit codes: 0 success, 1 validation failure, "
        "2 non-convergence, 3 I/O error",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, help="path to a key=value config")
        sp.add_argument("--out", default="out", help="output directory")
        sp.add_argument(
            "--set",
            dest="overrides",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="override a config key (repeatable)",
        )
        sp.add_argument("--seed", type=int, default=None, help="override solver.seed")
        sp.add_argument("--restarts", type=int, default=1, help="independent restarts")
    return parser


def run(argv) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = Path(args.config).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 3

    try:
        cfg = parse_config(text, overrides=args.overrides)
        if args.seed is not None:
            cfg = dataclasses.replace(
                cfg, options=dataclasses.replace(cfg.options, seed=args.seed)
            )
        if args.restarts < 1:
            raise ConfigError("--restarts must be >= 1")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    try:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"error: cannot create output directory: {exc}", file=sys.stderr)
        return 3

    try:
        return _dispatch(args, cfg, out_dir)
    except (ValidationFailed, NotInEPlus, PerturbationSignViolation, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except BracketFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


def main(argv=None) -> int:
    return run(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
