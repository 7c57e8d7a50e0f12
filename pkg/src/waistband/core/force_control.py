"""Torque and force limits of the stretching servo.

The servo drives the wheels through a rod of radius r, so a torque T pulls with
F = T / r. The controller caps torque at a fraction C of the rated torque,
which caps the pulling force at T * C / r; C is chosen as the largest step of
the controller granularity whose force stays at or below the band's break force.
"""

from __future__ import annotations

import math
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from waistband.config.settings import settings
from waistband.core.elastic_model import MM_PER_M
from waistband.utils.exceptions import DomainError, InfeasibleLimitError
from waistband.utils.logging import logger

EQUATION_TOLERANCE = 1e-9


class ServoSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    rated_torque: float = Field(gt=0, description="N·m")
    rod_radius: float = Field(gt=0, description="mm")


class ControlSetting(BaseModel):
    """Control percentage and the force it allows on a given servo."""

    model_config = ConfigDict(frozen=True)

    servo: ServoSpec
    control_percent: float = Field(gt=0, le=1, description="fraction of rated torque")
    safety_force: float = Field(gt=0, description="N")

    @model_validator(mode="after")
    def _check_force(self) -> ControlSetting:
        expected = _force(self.servo, self.control_percent)
        if abs(self.safety_force - expected) > EQUATION_TOLERANCE:
            raise ValueError(
                f"safety_force {self.safety_force} N does not match "
                f"{expected} N for control_percent {self.control_percent}"
            )
        return self

    @classmethod
    def from_percent(cls, servo: ServoSpec, control_percent: float) -> ControlSetting:
        return cls(
            servo=servo,
            control_percent=control_percent,
            safety_force=limited_force(servo, control_percent),
        )

    @classmethod
    def from_force(cls, servo: ServoSpec, force: float) -> ControlSetting:
        """Setting whose limited force is exactly ``force`` (manual override)."""
        return cls.from_percent(servo, force / full_torque_force(servo))

    @property
    def limited_torque(self) -> float:
        return limited_torque(self.servo, self.control_percent)


class SafetyChain(BaseModel):
    """applied <= limited <= break, with the margins between them."""

    model_config = ConfigDict(frozen=True)

    applied_force: float
    limited_force: float
    break_force: float
    applied_margin: float
    break_margin: float
    ok: bool


def _force(servo: ServoSpec, control_percent: float) -> float:
    return servo.rated_torque * control_percent / (servo.rod_radius / MM_PER_M)


def _check_percent(control_percent: float) -> None:
    if not 0 < control_percent <= 1:
        raise DomainError(f"control_percent must lie in (0, 1], got {control_percent}")


def full_torque_force(servo: ServoSpec) -> float:
    """Force (N) the servo pulls with at rated torque."""
    return servo.rated_torque / (servo.rod_radius / MM_PER_M)


def limited_torque(servo: ServoSpec, control_percent: float) -> float:
    _check_percent(control_percent)
    return servo.rated_torque * control_percent


def limited_force(servo: ServoSpec, control_percent: float) -> float:
    _check_percent(control_percent)
    return _force(servo, control_percent)


def exact_control_ratio(servo: ServoSpec, break_force: float) -> float:
    """Unrounded fraction of rated torque that pulls with exactly ``break_force``."""
    if break_force <= 0:
        raise DomainError(f"break_force must be positive, got {break_force}")
    return break_force / full_torque_force(servo)


def max_control_percent(
    servo: ServoSpec, break_force: float, granularity: Optional[float] = None
) -> ControlSetting:
    """Largest granule of C whose limited force does not exceed ``break_force``."""
    if granularity is None:
        granularity = settings.control_granularity
    if not 0 < granularity <= 0.01:
        raise DomainError(f"granularity must lie in (0, 0.01], got {granularity}")
    ratio = exact_control_ratio(servo, break_force)

    # count whole granules, then repair float rounding on either side
    top = round(1 / granularity)
    granules = min(math.floor(ratio / granularity + 1e-9), top)
    while granules > 0 and _force(servo, granules * granularity) > break_force:
        granules -= 1
    while granules < top and _force(servo, (granules + 1) * granularity) <= break_force:
        granules += 1
    if granules == 0:
        raise InfeasibleLimitError(
            f"Even {granularity * 100:g}% of {servo.rated_torque} N·m pulls with "
            f"{_force(servo, granularity):.4g} N, above the {break_force} N break force"
        )

    control_percent = min(granules * granularity, 1.0)
    setting = ControlSetting.from_percent(servo, control_percent)
    logger.info(
        f"Control set to {control_percent * 100:g}% "
        f"(exact {ratio * 100:.3f}%): limited force {setting.safety_force:.3f} N "
        f"under a {break_force} N break force"
    )
    return setting


def safety_chain(
    applied_force: float, setting: ControlSetting, break_force: float
) -> SafetyChain:
    return SafetyChain(
        applied_force=applied_force,
        limited_force=setting.safety_force,
        break_force=break_force,
        applied_margin=setting.safety_force - applied_force,
        break_margin=break_force - setting.safety_force,
        ok=applied_force <= setting.safety_force <= break_force,
    )
