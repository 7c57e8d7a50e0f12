"""Discrete-time simulation of one force-limited stretch cycle.

Each control period the wheels sit at some spacing L, the band loop is
stretched to L * E and its extension is that boundary minus the rest length.
The force sensor reads the curve force plus bounded uniform noise. The
controller checks, in order: fracture, overload (sensed force at or above the
limit), target spacing reached, watchdog. Only if all pass does it advance the
wheels by one step, so an overload is acted on one sample after it occurs.
"""

from __future__ import annotations

import csv
import io
from enum import Enum
from pathlib import Path
from typing import List, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from waistband.config.settings import settings
from waistband.core.elastic_model import ForceDeformationCurve, Region, curve_force
from waistband.core.force_control import ControlSetting
from waistband.core.wheel_geometry import WheelPlan
from waistband.utils.exceptions import CycleRejectedError
from waistband.utils.logging import logger

CSV_HEADER = [
    "time_ms",
    "spacing_mm",
    "extension_mm",
    "sensed_force_n",
    "commanded",
    "outcome_marker",
]


class Commanded(str, Enum):
    ADVANCING = "advancing"
    HOLDING = "holding"
    STOPPED = "stopped"


class Outcome(str, Enum):
    REACHED_TARGET = "reached_target"
    OVERLOAD_STOP = "overload_stop"
    FRACTURED = "fractured"
    TIMEOUT = "timeout"


class Severity(str, Enum):
    ERROR = "error"
    NOTICE = "notice"


class SimParams(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    time_step: int = Field(default_factory=lambda: settings.time_step_ms, gt=0)
    wheel_speed: float = Field(default_factory=lambda: settings.wheel_speed, gt=0)
    sensor_noise_amplitude: float = Field(
        default_factory=lambda: settings.sensor_noise, ge=0
    )
    max_sim_time: float = Field(default_factory=lambda: settings.max_sim_time, gt=0)
    rng_seed: int = Field(default_factory=lambda: settings.rng_seed)

    @property
    def step_advance(self) -> float:
        """Spacing gained per control period (mm)."""
        return self.wheel_speed * self.time_step / 1000.0


class TraceSample(BaseModel):
    model_config = ConfigDict(frozen=True)

    time: int
    spacing: float
    extension: float
    sensed_force: float
    commanded: Commanded


class StretchTrace(BaseModel):
    model_config = ConfigDict(frozen=True)

    samples: List[TraceSample] = Field(min_length=1)
    outcome: Outcome
    final_spacing: float
    peak_force: float

    @model_validator(mode="after")
    def _check_samples(self) -> StretchTrace:
        times = [sample.time for sample in self.samples]
        if any(later <= earlier for earlier, later in zip(times, times[1:])):
            raise ValueError("samples must be strictly increasing in time")
        if self.peak_force != max(sample.sensed_force for sample in self.samples):
            raise ValueError("peak_force must be the largest sensed force")
        return self

    @property
    def duration_ms(self) -> int:
        return self.samples[-1].time


class Finding(BaseModel):
    model_config = ConfigDict(frozen=True)

    code: str
    severity: Severity
    message: str
    margin: float


def extension_at(curve: ForceDeformationCurve, plan: WheelPlan, spacing: float) -> float:
    """Band extension (mm) when the wheels sit ``spacing`` apart."""
    return max(0.0, spacing * plan.effective_elongation - curve.band.rest_length)


def validate_cycle(
    curve: ForceDeformationCurve, plan: WheelPlan, limit: ControlSetting
) -> List[Finding]:
    """Check a planned cycle against the noise-free model before running it.

    No findings means the stretch completes below the limit, which is itself
    below the break force. Error findings mean the design can break the band;
    a notice means the cycle will end in an overload stop.
    """
    band = curve.band
    findings = []
    target_extension = extension_at(curve, plan, plan.spacing)
    target_force, _ = curve_force(curve, target_extension)

    if limit.safety_force > band.break_force:
        findings.append(
            Finding(
                code="limit_exceeds_break",
                severity=Severity.ERROR,
                message=(
                    f"limit exceeds break force: {limit.safety_force:.4g} N > "
                    f"{band.break_force:.4g} N"
                ),
                margin=band.break_force - limit.safety_force,
            )
        )
    if target_extension > band.fracture_extension:
        findings.append(
            Finding(
                code="target_beyond_fracture",
                severity=Severity.ERROR,
                message=(
                    f"target extension {target_extension:.4g} mm is beyond the "
                    f"fracture extension {band.fracture_extension:.4g} mm"
                ),
                margin=band.fracture_extension - target_extension,
            )
        )
    if target_force >= limit.safety_force:
        findings.append(
            Finding(
                code="target_force_at_limit",
                severity=Severity.NOTICE,
                message=(
                    f"target force {target_force:.4g} N reaches the "
                    f"{limit.safety_force:.4g} N limit; the cycle will stop early"
                ),
                margin=limit.safety_force - target_force,
            )
        )
    return findings


def simulate_cycle(
    curve: ForceDeformationCurve,
    plan: WheelPlan,
    limit: ControlSetting,
    params: Optional[SimParams] = None,
    start_spacing: Optional[float] = None,
) -> StretchTrace:
    """Run one stretch cycle from ``start_spacing`` towards ``plan.spacing``."""
    params = params or SimParams()
    band = curve.band
    spacing = plan.chosen_config.min_spacing if start_spacing is None else start_spacing
    if spacing <= 0 or spacing > plan.spacing:
        raise CycleRejectedError(
            f"start spacing {spacing} mm must lie in (0, {plan.spacing}] mm"
        )
    if (
        extension_at(curve, plan, plan.spacing) > band.fracture_extension
        and limit.safety_force > band.break_force
    ):
        raise CycleRejectedError(
            "target stretches past fracture and the force limit cannot stop it"
        )

    rng = np.random.default_rng(params.rng_seed)
    noise = params.sensor_noise_amplitude
    max_time = round(params.max_sim_time * 1000)
    samples = []
    time = 0
    while True:
        extension = extension_at(curve, plan, spacing)
        force, region = curve_force(curve, extension)
        sensed = force + (rng.uniform(-noise, noise) if noise > 0 else 0.0)

        if region is Region.FRACTURED:
            outcome, commanded = Outcome.FRACTURED, Commanded.STOPPED
        elif sensed >= limit.safety_force:
            outcome, commanded = Outcome.OVERLOAD_STOP, Commanded.STOPPED
        elif spacing >= plan.spacing:
            outcome, commanded = Outcome.REACHED_TARGET, Commanded.HOLDING
        elif time >= max_time:
            outcome, commanded = Outcome.TIMEOUT, Commanded.STOPPED
        else:
            outcome, commanded = None, Commanded.ADVANCING

        samples.append(
            TraceSample(
                time=time,
                spacing=spacing,
                extension=extension,
                sensed_force=float(sensed),
                commanded=commanded,
            )
        )
        if outcome is not None:
            break
        spacing = min(spacing + params.step_advance, plan.spacing)
        time += params.time_step

    trace = StretchTrace(
        samples=samples,
        outcome=outcome,
        final_spacing=spacing,
        peak_force=max(sample.sensed_force for sample in samples),
    )
    if outcome is Outcome.REACHED_TARGET:
        logger.info(
            f"Stretch reached {spacing:.3f} mm in {time} ms, "
            f"peak {trace.peak_force:.3f} N"
        )
    else:
        logger.warning(
            f"Stretch ended with {outcome.value} at {spacing:.3f} mm after {time} ms, "
            f"peak {trace.peak_force:.3f} N"
        )
    return trace


def _number(value: float) -> str:
    return f"{value:.6g}"


def trace_to_csv(trace: StretchTrace) -> str:
    """Render a trace as CSV; the last row carries the outcome."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    last = len(trace.samples) - 1
    for index, sample in enumerate(trace.samples):
        writer.writerow(
            [
                sample.time,
                _number(sample.spacing),
                _number(sample.extension),
                _number(sample.sensed_force),
                sample.commanded.value,
                trace.outcome.value if index == last else "",
            ]
        )
    return buffer.getvalue()


def write_trace_csv(trace: StretchTrace, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(exist_ok=True, parents=True)
    with path.open("w", encoding="utf-8", newline="") as handle:
        handle.write(trace_to_csv(trace))
    logger.debug(f"Wrote {len(trace.samples)} trace rows to {path}")
    return path
