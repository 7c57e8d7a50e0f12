"""Rolling-wheel envelopes and configuration planning.

A configuration turns the spacing L between the right and left rolling wheels
into the rounded boundary W of the stretched band loop, W = L * E. The
elongation factor E is published only at the two ends of the spacing range and
is interpolated linearly in between.

Published boundaries do not all equal the products of their own spacings and
factors (3-wheel: 1691 vs 1687.5 and 861 vs 816, 2-wheel: 1619 vs 1612.5). The
products are used everywhere; the published values are only compared against
them by :func:`boundary_discrepancies`.
"""

from __future__ import annotations

from typing import List, Literal, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, computed_field, model_validator

from waistband.config.settings import settings
from waistband.core.solver import invert_increasing
from waistband.utils.exceptions import (
    ConfigurationError,
    EnvelopeInvariantError,
    OutOfRangeError,
    PlanningError,
)
from waistband.utils.logging import logger


class WheelConfig(BaseModel):
    """Spacing range and elongation factors of a 2- or 3-wheel arrangement."""

    model_config = ConfigDict(frozen=True)

    wheel_count: Literal[2, 3]
    min_spacing: float = Field(gt=0, description="mm")
    max_spacing: float = Field(gt=0, description="mm")
    elongation_factor_at_max: float = Field(gt=1)
    elongation_factor_at_min: float = Field(gt=1)

    @model_validator(mode="after")
    def _check_invariants(self) -> WheelConfig:
        if self.min_spacing > self.max_spacing:
            raise ValueError("min_spacing must not exceed max_spacing")
        if self.elongation_factor_at_min < self.elongation_factor_at_max:
            raise ValueError(
                "elongation_factor_at_min must be at least elongation_factor_at_max"
            )
        if self.min_spacing == self.max_spacing:
            if self.elongation_factor_at_min != self.elongation_factor_at_max:
                raise ValueError("a single-spacing config needs equal factors")
            return self
        # dW/dL at max spacing is the smallest slope of the boundary product
        if self.elongation_factor_at_max + self.max_spacing * self.factor_slope <= 0:
            raise ValueError(
                "boundary must grow with spacing; the factor drops too steeply"
            )
        return self

    @property
    def factor_slope(self) -> float:
        """Change of the elongation factor per mm of spacing."""
        if self.max_spacing == self.min_spacing:
            return 0.0
        return (self.elongation_factor_at_max - self.elongation_factor_at_min) / (
            self.max_spacing - self.min_spacing
        )

    @property
    def label(self) -> str:
        return f"{self.wheel_count}-wheel"


class MachineEnvelope(BaseModel):
    """Acceptable rounded-boundary range and the configs that bound it."""

    model_config = ConfigDict(frozen=True)

    min_boundary: float = Field(gt=0, description="mm")
    max_boundary: float = Field(gt=0, description="mm")
    min_source: str
    max_source: str

    @model_validator(mode="after")
    def _check_order(self) -> MachineEnvelope:
        if self.min_boundary > self.max_boundary:
            raise ValueError("min_boundary must not exceed max_boundary")
        return self

    def contains(self, boundary: float) -> bool:
        return self.min_boundary <= boundary <= self.max_boundary


class WheelPlan(BaseModel):
    """Chosen configuration and spacing for one target boundary."""

    model_config = ConfigDict(frozen=True)

    chosen_config: WheelConfig
    spacing: float = Field(gt=0, description="mm")
    effective_elongation: float = Field(gt=1)
    target_boundary: Optional[float] = Field(default=None, gt=0, description="mm")

    @model_validator(mode="after")
    def _check_spacing(self) -> WheelPlan:
        config = self.chosen_config
        if not config.min_spacing <= self.spacing <= config.max_spacing:
            raise ValueError(
                f"spacing {self.spacing} mm outside "
                f"[{config.min_spacing}, {config.max_spacing}] mm"
            )
        return self

    @property
    def loop_demand(self) -> float:
        """Boundary (mm) the band loop is stretched to at the planned spacing."""
        return self.spacing * self.effective_elongation


class BoundaryDiscrepancy(BaseModel):
    """Formula boundary against a published reference value."""

    model_config = ConfigDict(frozen=True)

    config: str
    bound: Literal["min", "max"]
    formula: float
    published: float

    @computed_field
    @property
    def delta(self) -> float:
        return self.published - self.formula


def envelope_for_config(config: WheelConfig) -> MachineEnvelope:
    return MachineEnvelope(
        min_boundary=config.min_spacing * config.elongation_factor_at_min,
        max_boundary=config.max_spacing * config.elongation_factor_at_max,
        min_source=config.label,
        max_source=config.label,
    )


def combined_envelope(cfg3: WheelConfig, cfg2: WheelConfig) -> MachineEnvelope:
    """Envelope of a machine carrying both arrangements.

    The 3-wheel arrangement sets the maximum and the 2-wheel arrangement the
    minimum.
    """
    if cfg3.wheel_count != 3 or cfg2.wheel_count != 2:
        raise ConfigurationError(
            f"expected a 3-wheel and a 2-wheel config, got "
            f"{cfg3.wheel_count} and {cfg2.wheel_count}"
        )
    max_boundary = envelope_for_config(cfg3).max_boundary
    min_boundary = envelope_for_config(cfg2).min_boundary
    if min_boundary > max_boundary:
        raise EnvelopeInvariantError(
            f"2-wheel minimum {min_boundary} mm exceeds 3-wheel maximum "
            f"{max_boundary} mm"
        )
    return MachineEnvelope(
        min_boundary=min_boundary,
        max_boundary=max_boundary,
        min_source=cfg2.label,
        max_source=cfg3.label,
    )


def envelope_overlap(
    cfg3: WheelConfig, cfg2: WheelConfig
) -> Optional[Tuple[float, float]]:
    """Boundary range both arrangements can serve, or None when disjoint."""
    env3, env2 = envelope_for_config(cfg3), envelope_for_config(cfg2)
    lower = max(env3.min_boundary, env2.min_boundary)
    upper = min(env3.max_boundary, env2.max_boundary)
    if lower > upper:
        return None
    return lower, upper


def factor_reduction(config: WheelConfig) -> float:
    """Drop of the elongation factor from min to max spacing, in percent."""
    return (
        (config.elongation_factor_at_min - config.elongation_factor_at_max)
        / config.elongation_factor_at_min
        * 100.0
    )


def boundary_discrepancies(
    config: WheelConfig,
    published_min: Optional[float] = None,
    published_max: Optional[float] = None,
) -> List[BoundaryDiscrepancy]:
    envelope = envelope_for_config(config)
    records = []
    if published_min is not None:
        records.append(
            BoundaryDiscrepancy(
                config=config.label,
                bound="min",
                formula=envelope.min_boundary,
                published=published_min,
            )
        )
    if published_max is not None:
        records.append(
            BoundaryDiscrepancy(
                config=config.label,
                bound="max",
                formula=envelope.max_boundary,
                published=published_max,
            )
        )
    return records


def interpolated_elongation(config: WheelConfig, spacing: float) -> float:
    if spacing < config.min_spacing:
        raise OutOfRangeError("min_spacing", spacing, config.min_spacing)
    if spacing > config.max_spacing:
        raise OutOfRangeError("max_spacing", spacing, config.max_spacing)
    if spacing == config.max_spacing:
        return config.elongation_factor_at_max
    return config.elongation_factor_at_min + config.factor_slope * (
        spacing - config.min_spacing
    )


def boundary_at(config: WheelConfig, spacing: float) -> float:
    """Rounded boundary (mm) produced at a spacing."""
    return spacing * interpolated_elongation(config, spacing)


def required_spacing(
    config: WheelConfig, target_boundary: float, tolerance: Optional[float] = None
) -> float:
    """Spacing (mm) whose boundary equals ``target_boundary``."""
    envelope = envelope_for_config(config)
    if target_boundary < envelope.min_boundary:
        raise OutOfRangeError("min_boundary", target_boundary, envelope.min_boundary)
    if target_boundary > envelope.max_boundary:
        raise OutOfRangeError("max_boundary", target_boundary, envelope.max_boundary)
    if config.min_spacing == config.max_spacing:
        return config.min_spacing
    return invert_increasing(
        lambda spacing: boundary_at(config, spacing),
        target_boundary,
        config.min_spacing,
        config.max_spacing,
        ftol=settings.spacing_tolerance if tolerance is None else tolerance,
    )


def machine_envelope(machine: Sequence[WheelConfig]) -> MachineEnvelope:
    by_count = {config.wheel_count: config for config in machine}
    if set(by_count) == {2, 3}:
        return combined_envelope(by_count[3], by_count[2])
    envelopes = [envelope_for_config(config) for config in machine]
    low = min(envelopes, key=lambda e: e.min_boundary)
    high = max(envelopes, key=lambda e: e.max_boundary)
    return MachineEnvelope(
        min_boundary=low.min_boundary,
        max_boundary=high.max_boundary,
        min_source=low.min_source,
        max_source=high.max_source,
    )


def select_config(
    machine: Sequence[WheelConfig],
    target_boundary: float,
    preferred_wheel_count: Optional[int] = None,
) -> WheelPlan:
    """Plan the configuration and spacing for a target boundary.

    When several configurations can serve the target the preferred wheel count
    wins (2 by default: fewer contact points and the tighter range).
    """
    if not machine:
        raise ConfigurationError("machine has no wheel configuration")
    preferred = (
        settings.preferred_wheel_count
        if preferred_wheel_count is None
        else preferred_wheel_count
    )
    feasible = [
        config
        for config in machine
        if envelope_for_config(config).contains(target_boundary)
    ]
    if not feasible:
        raise PlanningError(target_boundary, machine_envelope(machine))

    chosen = next(
        (config for config in feasible if config.wheel_count == preferred),
        feasible[0],
    )
    spacing = required_spacing(chosen, target_boundary)
    plan = WheelPlan(
        chosen_config=chosen,
        spacing=spacing,
        effective_elongation=interpolated_elongation(chosen, spacing),
        target_boundary=target_boundary,
    )
    logger.info(
        f"Planned {chosen.label} at {spacing:.3f} mm for a {target_boundary} mm "
        f"boundary ({len(feasible)} feasible)"
    )
    return plan
