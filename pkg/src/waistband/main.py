"""Command line front end: band properties, planning, limits and simulation.

Exit codes: 0 ok, 2 input error, 3 infeasible plan, 4 infeasible limit,
5 validation findings or rejected cycle.
"""

import argparse
import json
import sys
from typing import Any, Callable, Dict, List, Optional, Sequence

from pydantic import ValidationError
from rich.console import Console
from rich.markup import escape
from rich.panel import Panel
from rich.table import Table

from waistband.config.settings import settings
from waistband.core.elastic_model import (
    curve_force,
    elongation_percent,
    young_stiffness,
)
from waistband.core.force_control import (
    ControlSetting,
    exact_control_ratio,
    full_torque_force,
    max_control_percent,
    safety_chain,
)
from waistband.core.stretch_sim import (
    Severity,
    extension_at,
    simulate_cycle,
    validate_cycle,
    write_trace_csv,
)
from waistband.core.wheel_geometry import (
    boundary_discrepancies,
    envelope_for_config,
    envelope_overlap,
    factor_reduction,
    machine_envelope,
    select_config,
)
from waistband.tools.specs import (
    BandSpecFile,
    load_band,
    load_machine,
    parse_spec,
)
from waistband.utils.exceptions import (
    ConfigurationError,
    CycleRejectedError,
    DomainError,
    EnvelopeInvariantError,
    InfeasibleLimitError,
    OutOfRangeError,
    PlanningError,
    SpecFileError,
)
from waistband.utils.logging import logger

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INFEASIBLE_PLAN = 3
EXIT_INFEASIBLE_LIMIT = 4
EXIT_FINDINGS = 5

console = Console()
err_console = Console(stderr=True)


def fmt(value: Optional[float], args: argparse.Namespace, unit: str = "") -> str:
    """Round to the configured display decimals unless --full-precision was given."""
    if value is None:
        return "-"
    if args.full_precision:
        text = repr(float(value))
    else:
        text = f"{value:.{settings.display_decimals}f}"
    return f"{text} {unit}".rstrip()


def emit_json(payload: Dict[str, Any]) -> None:
    sys.stdout.write(json.dumps(payload, indent=2) + "\n")


def report_table(title: str, rows: List[List[str]]) -> Table:
    table = Table(title=title)
    table.add_column("Quantity", style="cyan")
    table.add_column("Value", style="green", justify="right")
    for row in rows:
        table.add_row(*row)
    return table


def _band_from_flags(args: argparse.Namespace) -> BandSpecFile:
    data: Dict[str, Any] = {
        key: value
        for key, value in (
            ("rest_length", args.rest_length),
            ("break_force", args.break_force),
            ("stiffness", args.stiffness),
        )
        if value is not None
    }
    if args.final_length is not None or args.force is not None:
        data["measurement"] = {
            key: value
            for key, value in (
                ("stretched_length", args.final_length),
                ("measured_force", args.force),
            )
            if value is not None
        }
    spec = parse_spec(BandSpecFile, data, "<flags>")
    try:
        spec.to_band()
    except ValidationError as e:
        first = e.errors()[0]
        raise SpecFileError("<flags>", ".".join(map(str, first["loc"])), first["msg"])
    return spec


def cmd_band_props(args: argparse.Namespace) -> int:
    spec = load_band(args.band) if args.band else _band_from_flags(args)
    band = spec.to_band()
    stretched = spec.measurement.stretched_length if spec.measurement else None
    payload: Dict[str, Any] = {
        "length_basis": spec.length_basis.value,
        "band": band.model_dump(),
        "stretched_length": stretched,
        "extension": spec.measured_extension,
        "elongation_percent": (
            elongation_percent(stretched, band.rest_length)
            if stretched is not None
            else None
        ),
        "stiffness": band.stiffness,
        "linear_limit_force": band.linear_limit_force,
        "fracture_extension": band.fracture_extension,
        "fracture_elongation_percent": elongation_percent(
            band.rest_length + band.fracture_extension, band.rest_length
        ),
        "young_stiffness": (
            young_stiffness(band) if band.young_modulus is not None else None
        ),
    }
    if args.json:
        emit_json(payload)
        return EXIT_OK

    rows = [
        ["Rest length", fmt(band.rest_length, args, "mm")],
        ["Stretched length", fmt(stretched, args, "mm")],
        ["Elongation ε", fmt(payload["elongation_percent"], args, "%")],
        ["Stiffness k", fmt(band.stiffness, args, "N/m")],
        ["Proportional limit", fmt(band.proportional_limit_extension, args, "mm")],
        ["Fracture extension", fmt(band.fracture_extension, args, "mm")],
        ["Elongation at fracture", fmt(payload["fracture_elongation_percent"], args, "%")],
        ["Break force", fmt(band.break_force, args, "N")],
    ]
    if payload["young_stiffness"] is not None:
        rows.append(["Y·A/L0", fmt(payload["young_stiffness"], args, "N/m")])
    console.print(report_table(f"Band ({spec.length_basis.value})", rows))
    return EXIT_OK


def cmd_plan(args: argparse.Namespace) -> int:
    machine = load_machine(args.machine)
    configs = machine.wheel_configs
    envelope = machine_envelope(configs)
    try:
        plan = select_config(configs, args.target)
    except PlanningError as e:
        if args.json:
            emit_json(
                {"feasible": False, "target": args.target, "envelope": e.envelope.model_dump()}
            )
        else:
            console.print(
                Panel(
                    f"Target {fmt(args.target, args, 'mm')} is outside the machine "
                    f"envelope {fmt(e.envelope.min_boundary, args)} to "
                    f"{fmt(e.envelope.max_boundary, args, 'mm')}",
                    title="Infeasible plan",
                    border_style="red",
                )
            )
        return EXIT_INFEASIBLE_PLAN

    if args.json:
        emit_json(
            {
                "feasible": True,
                "target": args.target,
                "envelope": envelope.model_dump(),
                "plan": plan.model_dump(),
            }
        )
        return EXIT_OK
    rows = [
        [
            "Machine envelope",
            f"{fmt(envelope.min_boundary, args)} to {fmt(envelope.max_boundary, args, 'mm')}",
        ],
        ["Configuration", plan.chosen_config.label],
        ["Wheel spacing L", fmt(plan.spacing, args, "mm")],
        ["Elongation factor E", fmt(plan.effective_elongation, args)],
        ["Boundary W", fmt(plan.loop_demand, args, "mm")],
    ]
    console.print(report_table(f"Plan for {fmt(args.target, args, 'mm')}", rows))
    return EXIT_OK


def cmd_envelope(args: argparse.Namespace) -> int:
    machine = load_machine(args.machine)
    records = []
    table = Table(title="Wheel configurations")
    columns = ("Config", "Spacing (mm)", "Factors", "Min W", "Max W", "Published", "Factor drop")
    for column in columns:
        table.add_column(column)
    for entry in machine.configs:
        config = entry.to_config()
        envelope = envelope_for_config(config)
        records.extend(
            boundary_discrepancies(
                config, entry.published_min_boundary, entry.published_max_boundary
            )
        )
        table.add_row(
            config.label,
            f"{fmt(config.min_spacing, args)} to {fmt(config.max_spacing, args)}",
            f"{config.elongation_factor_at_min:g} / {config.elongation_factor_at_max:g}",
            fmt(envelope.min_boundary, args),
            fmt(envelope.max_boundary, args),
            f"{fmt(entry.published_min_boundary, args)} / "
            f"{fmt(entry.published_max_boundary, args)}",
            fmt(factor_reduction(config), args, "%"),
        )

    cfg3, cfg2 = machine.config_for(3), machine.config_for(2)
    overlap = envelope_overlap(cfg3, cfg2) if cfg3 and cfg2 else None
    envelope = machine_envelope(machine.wheel_configs)
    if args.json:
        emit_json(
            {
                "envelopes": {
                    entry.to_config().label: envelope_for_config(
                        entry.to_config()
                    ).model_dump()
                    for entry in machine.configs
                },
                "machine_envelope": envelope.model_dump(),
                "overlap": list(overlap) if overlap else None,
                "discrepancies": [record.model_dump() for record in records],
            }
        )
        return EXIT_OK

    console.print(table)
    console.print(
        f"Machine envelope: {fmt(envelope.min_boundary, args)} "
        f"({envelope.min_source}) to {fmt(envelope.max_boundary, args, 'mm')} "
        f"({envelope.max_source})"
    )
    if overlap:
        console.print(
            f"Both configurations serve {fmt(overlap[0], args)} to "
            f"{fmt(overlap[1], args, 'mm')}"
        )
    mismatched = [record for record in records if abs(record.delta) > 1e-9]
    if mismatched:
        lines = [
            f"{record.config} {record.bound}: formula {fmt(record.formula, args)} mm, "
            f"published {fmt(record.published, args)} mm "
            f"(delta {fmt(record.delta, args)} mm)"
            for record in mismatched
        ]
        lines.append("Planning uses the formula values.")
        console.print(
            Panel(
                "\n".join(lines),
                title="Published boundary discrepancies",
                border_style="yellow",
            )
        )
    return EXIT_OK


def _granularity(args: argparse.Namespace) -> Optional[float]:
    return args.granularity / 100.0 if args.granularity is not None else None


def cmd_limits(args: argparse.Namespace) -> int:
    machine = load_machine(args.machine)
    spec = load_band(args.band)
    servo = machine.servo
    break_force = spec.break_force
    setting = max_control_percent(servo, break_force, _granularity(args))

    applied = None
    if spec.measured_extension is not None and spec.measured_extension > 0:
        applied, _ = curve_force(spec.curve(loop=False), spec.measured_extension)
    chain = safety_chain(applied, setting, break_force) if applied is not None else None

    payload = {
        "full_torque_force": full_torque_force(servo),
        "exact_control_ratio": exact_control_ratio(servo, break_force),
        "control_percent": setting.control_percent,
        "limited_torque": setting.limited_torque,
        "limited_force": setting.safety_force,
        "break_force": break_force,
        "safety_chain": chain.model_dump() if chain else None,
    }
    if args.json:
        emit_json(payload)
        return EXIT_OK

    rows = [
        ["Full-torque force", fmt(payload["full_torque_force"], args, "N")],
        ["Exact ratio", fmt(payload["exact_control_ratio"] * 100, args, "%")],
        ["Control C%", fmt(setting.control_percent * 100, args, "%")],
        ["Limited torque", fmt(setting.limited_torque, args, "N·m")],
        ["Limited force F_s", fmt(setting.safety_force, args, "N")],
        ["Break force", fmt(break_force, args, "N")],
    ]
    console.print(report_table("Force limits", rows))
    if chain:
        verdict = "holds" if chain.ok else "VIOLATED"
        console.print(
            f"Safety chain {verdict}: applied {fmt(chain.applied_force, args, 'N')} "
            f"<= limited {fmt(chain.limited_force, args, 'N')} "
            f"<= break {fmt(chain.break_force, args, 'N')}"
        )
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    machine = load_machine(args.machine)
    spec = load_band(args.band)
    curve = spec.curve(loop=True)
    plan = select_config(machine.wheel_configs, args.target)
    if args.limit_force is not None:
        limit = ControlSetting.from_force(machine.servo, args.limit_force)
    else:
        limit = max_control_percent(machine.servo, spec.break_force, _granularity(args))

    findings = validate_cycle(curve, plan, limit)
    errors = [finding for finding in findings if finding.severity is Severity.ERROR]
    for finding in findings:
        logger.warning(f"{finding.severity.value}: {finding.message}")
    if errors and not args.force:
        if args.json:
            emit_json({"findings": [finding.model_dump(mode="json") for finding in findings]})
        else:
            console.print(
                Panel(
                    "\n".join(finding.message for finding in errors),
                    title="Validation findings (use --force to run anyway)",
                    border_style="red",
                )
            )
        return EXIT_FINDINGS

    params = machine.sim_params(
        time_step=args.time_step,
        wheel_speed=args.wheel_speed,
        sensor_noise_amplitude=args.noise,
        max_sim_time=args.max_time,
        rng_seed=args.seed,
    )
    trace = simulate_cycle(curve, plan, limit, params, start_spacing=args.start_spacing)
    if args.out:
        write_trace_csv(trace, args.out)

    final = trace.samples[-1]
    payload = {
        "outcome": trace.outcome.value,
        "peak_force": trace.peak_force,
        "duration_ms": trace.duration_ms,
        "final_spacing": trace.final_spacing,
        "final_extension": final.extension,
        "target_extension": extension_at(curve, plan, plan.spacing),
        "limit_force": limit.safety_force,
        "control_percent": limit.control_percent,
        "plan": plan.model_dump(),
        "findings": [finding.model_dump(mode="json") for finding in findings],
        "samples": len(trace.samples),
        "out": args.out,
    }
    if args.json:
        emit_json(payload)
        return EXIT_OK

    rows = [
        ["Outcome", trace.outcome.value],
        ["Configuration", plan.chosen_config.label],
        ["Target spacing", fmt(plan.spacing, args, "mm")],
        ["Final spacing", fmt(trace.final_spacing, args, "mm")],
        ["Final extension", fmt(final.extension, args, "mm")],
        ["Peak force", fmt(trace.peak_force, args, "N")],
        ["Force limit", fmt(limit.safety_force, args, "N")],
        ["Duration", f"{trace.duration_ms} ms"],
    ]
    console.print(report_table("Stretch cycle", rows))
    if args.out:
        console.print(f"Trace written to {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="Machine-readable output")
    common.add_argument(
        "--full-precision", action="store_true", help="Do not round reported numbers"
    )

    parser = argparse.ArgumentParser(
        prog="waistband",
        description="Plan and simulate the stretch cycle of an elastic waistband machine.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    band = commands.add_parser("band-props", parents=[common], help="Band properties")
    band.add_argument("--band", help="Band JSON file")
    band.add_argument("--rest-length", type=float, help="Unstretched length (mm)")
    band.add_argument("--final-length", type=float, help="Stretched length (mm)")
    band.add_argument("--force", type=float, help="Force at the stretched length (N)")
    band.add_argument("--break-force", type=float, help="Break force (N)")
    band.add_argument("--stiffness", type=float, help="Stiffness k (N/m)")
    band.set_defaults(handler=cmd_band_props)

    plan = commands.add_parser("plan", parents=[common], help="Choose wheels and spacing")
    plan.add_argument("--machine", required=True, help="Machine JSON file")
    plan.add_argument("--target", type=float, required=True, help="Boundary W (mm)")
    plan.set_defaults(handler=cmd_plan)

    envelope = commands.add_parser(
        "envelope", parents=[common], help="Envelopes and published boundaries"
    )
    envelope.add_argument("--machine", required=True, help="Machine JSON file")
    envelope.set_defaults(handler=cmd_envelope)

    limits = commands.add_parser("limits", parents=[common], help="Torque and force limits")
    limits.add_argument("--machine", required=True, help="Machine JSON file")
    limits.add_argument("--band", required=True, help="Band JSON file")
    limits.add_argument("--granularity", type=float, help="C%% step in percent")
    limits.set_defaults(handler=cmd_limits)

    simulate = commands.add_parser("simulate", parents=[common], help="Simulate a cycle")
    simulate.add_argument("--machine", required=True, help="Machine JSON file")
    simulate.add_argument("--band", required=True, help="Band JSON file")
    simulate.add_argument("--target", type=float, required=True, help="Boundary W (mm)")
    simulate.add_argument("--out", help="Trace CSV path")
    simulate.add_argument("--seed", type=int, help="Sensor noise seed")
    simulate.add_argument("--noise", type=float, help="Sensor noise amplitude (N)")
    simulate.add_argument("--limit-force", type=float, help="Override the force limit (N)")
    simulate.add_argument("--granularity", type=float, help="C%% step in percent")
    simulate.add_argument("--start-spacing", type=float, help="Initial spacing (mm)")
    simulate.add_argument("--wheel-speed", type=float, help="mm/s")
    simulate.add_argument("--time-step", type=int, help="ms")
    simulate.add_argument("--max-time", type=float, help="Watchdog (s)")
    simulate.add_argument(
        "--force", action="store_true", help="Run despite validation findings"
    )
    simulate.set_defaults(handler=cmd_simulate)
    return parser


def _fail(message: str, code: int) -> int:
    err_console.print(
        f"[red]error:[/red] {escape(message)}", highlight=False, soft_wrap=True
    )
    return code


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run one waistband command and return its exit code"""
    args = build_parser().parse_args(argv)
    handler: Callable[[argparse.Namespace], int] = args.handler
    try:
        return handler(args)
    except OutOfRangeError as e:
        return _fail(str(e), EXIT_INFEASIBLE_PLAN)
    except PlanningError as e:
        return _fail(str(e), EXIT_INFEASIBLE_PLAN)
    except InfeasibleLimitError as e:
        return _fail(str(e), EXIT_INFEASIBLE_LIMIT)
    except CycleRejectedError as e:
        return _fail(str(e), EXIT_FINDINGS)
    except (
        SpecFileError,
        DomainError,
        ConfigurationError,
        EnvelopeInvariantError,
        ValidationError,
    ) as e:
        return _fail(str(e), EXIT_INPUT)


if __name__ == "__main__":
    sys.exit(main())
