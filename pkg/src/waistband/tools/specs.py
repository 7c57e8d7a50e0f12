"""Machine and band specification files.

Both are JSON. A machine file holds the servo, one 2-wheel and/or one 3-wheel
config (optionally with the boundaries published for it) and simulation
overrides; a band file holds the band either with its stiffness or with one
measurement to derive it from.
"""

import json
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from waistband.core.elastic_model import (
    ElasticBand,
    ForceDeformationCurve,
    HermiteShape,
    loop_band,
    stiffness_from_measurement,
)
from waistband.core.force_control import ServoSpec
from waistband.core.stretch_sim import SimParams
from waistband.core.wheel_geometry import WheelConfig
from waistband.utils.exceptions import SpecFileError
from waistband.utils.logging import logger


class LengthBasis(str, Enum):
    LOOP = "loop"
    HALF_ROUND = "half_round"


class ConfigEntry(WheelConfig):
    published_min_boundary: Optional[float] = Field(default=None, gt=0)
    published_max_boundary: Optional[float] = Field(default=None, gt=0)

    def to_config(self) -> WheelConfig:
        return WheelConfig(**self.model_dump(include=set(WheelConfig.model_fields)))


class MachineSpecFile(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    servo: ServoSpec
    configs: List[ConfigEntry] = Field(min_length=1, max_length=2)
    defaults: SimParams = Field(default_factory=SimParams)

    @model_validator(mode="after")
    def _one_per_count(self) -> "MachineSpecFile":
        counts = [entry.wheel_count for entry in self.configs]
        if len(set(counts)) != len(counts):
            raise ValueError("at most one config per wheel count")
        return self

    @property
    def wheel_configs(self) -> List[WheelConfig]:
        return [entry.to_config() for entry in self.configs]

    def config_for(self, wheel_count: int) -> Optional[WheelConfig]:
        return next(
            (c for c in self.wheel_configs if c.wheel_count == wheel_count), None
        )

    def sim_params(self, **overrides: Any) -> SimParams:
        """File defaults with every non-None override applied on top."""
        values = self.defaults.model_dump()
        values.update({k: v for k, v in overrides.items() if v is not None})
        return SimParams(**values)


class BandMeasurement(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    stretched_length: float = Field(ge=0, description="mm")
    measured_force: Optional[float] = Field(default=None, ge=0, description="N")


class BandSpecFile(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    rest_length: float = Field(gt=0)
    break_force: float = Field(gt=0)
    stiffness: Optional[float] = Field(default=None, gt=0)
    measurement: Optional[BandMeasurement] = None
    proportional_limit_extension: Optional[float] = None
    fracture_extension: Optional[float] = None
    cross_section_area: Optional[float] = None
    young_modulus: Optional[float] = None
    end_slope_factor: Optional[float] = Field(default=None, gt=0)
    length_basis: LengthBasis = LengthBasis.LOOP

    @model_validator(mode="after")
    def _stiffness_source(self) -> "BandSpecFile":
        if self.stiffness is not None:
            return self
        if self.measurement is None or self.measurement.measured_force is None:
            raise ValueError(
                "missing required field: stiffness (or measurement.measured_force)"
            )
        if self.measured_extension <= 0:
            raise ValueError(
                "measurement.stretched_length must exceed rest_length to derive "
                "the stiffness"
            )
        return self

    @property
    def measured_extension(self) -> Optional[float]:
        if self.measurement is None:
            return None
        return self.measurement.stretched_length - self.rest_length

    def to_band(self) -> ElasticBand:
        """Band in the file's own length basis."""
        stiffness = self.stiffness
        if stiffness is None:
            stiffness = stiffness_from_measurement(
                self.measurement.measured_force, self.measured_extension
            )
        return ElasticBand(
            rest_length=self.rest_length,
            stiffness=stiffness,
            break_force=self.break_force,
            proportional_limit_extension=self.proportional_limit_extension,
            fracture_extension=self.fracture_extension,
            cross_section_area=self.cross_section_area,
            young_modulus=self.young_modulus,
        )

    def to_loop_band(self) -> ElasticBand:
        """Band as a full loop, the basis wheel boundaries are measured in."""
        band = self.to_band()
        if self.length_basis is LengthBasis.HALF_ROUND:
            return loop_band(band)
        return band

    def curve(self, loop: bool = True) -> ForceDeformationCurve:
        band = self.to_loop_band() if loop else self.to_band()
        if self.end_slope_factor is None:
            return ForceDeformationCurve(band=band)
        return ForceDeformationCurve(
            band=band, nonlinear_shape=HermiteShape(end_slope_factor=self.end_slope_factor)
        )


def field_path(error: Dict[str, Any]) -> str:
    """Dotted location of a pydantic error, e.g. ``configs.1.min_spacing``."""
    return ".".join(str(part) for part in error["loc"]) or "<root>"


def load_json_file(path: Union[str, Path]) -> Any:
    """Load a JSON document, reporting failures as SpecFileError."""
    path = Path(path)
    try:
        with path.open("r", encoding="utf-8") as handle:
            return json.load(handle)
    except FileNotFoundError:
        raise SpecFileError(str(path), "<file>", "file not found")
    except json.JSONDecodeError as e:
        raise SpecFileError(str(path), f"line {e.lineno}", e.msg)


def parse_spec(model: Any, data: Any, source: str) -> Any:
    try:
        return model.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        message = first["msg"]
        if first["type"] == "missing":
            message = "missing required field"
        raise SpecFileError(source, field_path(first), message) from e


def load_machine(path: Union[str, Path]) -> MachineSpecFile:
    machine = parse_spec(MachineSpecFile, load_json_file(path), str(path))
    logger.debug(
        f"Loaded machine {path}: {[c.label for c in machine.wheel_configs]}"
    )
    return machine


def load_band(path: Union[str, Path]) -> BandSpecFile:
    band = parse_spec(BandSpecFile, load_json_file(path), str(path))
    try:
        band.to_band()
    except ValidationError as e:
        first = e.errors()[0]
        raise SpecFileError(str(path), field_path(first), first["msg"]) from e
    logger.debug(f"Loaded band {path} ({band.length_basis.value} basis)")
    return band
