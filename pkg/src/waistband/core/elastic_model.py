"""Material model of the elastic band.

Lengths are in mm, forces in N and stiffness in N/m throughout; every function
converts mm to m itself. The force-deformation curve is linear (Hooke) up to
the proportional limit, then a monotone cubic Hermite segment up to the
fracture point, and flat at the break force beyond it.
"""

from __future__ import annotations

import math
from enum import Enum
from typing import Any, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, model_validator
from scipy.interpolate import CubicHermiteSpline

from waistband.config.settings import settings
from waistband.core.solver import invert_increasing
from waistband.utils.exceptions import ConfigurationError, DomainError, RegionError
from waistband.utils.logging import logger

MM_PER_M = 1000.0


class Region(str, Enum):
    LINEAR = "linear"
    NONLINEAR = "nonlinear"
    FRACTURED = "fractured"


class ElasticBand(BaseModel):
    """Material and geometric properties of one elastic band.

    ``fracture_extension`` defaults to ``break_force / stiffness`` and
    ``proportional_limit_extension`` to ``fracture_extension``, which gives a
    band that stays linear up to its break force.
    """

    model_config = ConfigDict(frozen=True)

    rest_length: float = Field(gt=0, description="Unstretched length (mm)")
    stiffness: float = Field(gt=0, description="Linear-region stiffness k (N/m)")
    break_force: float = Field(gt=0, description="Force at fracture (N)")
    proportional_limit_extension: float = Field(
        gt=0, description="End of the Hooke region (mm)"
    )
    fracture_extension: float = Field(gt=0, description="Extension at fracture (mm)")
    cross_section_area: Optional[float] = Field(default=None, gt=0, description="mm²")
    young_modulus: Optional[float] = Field(default=None, gt=0, description="N/mm²")

    @model_validator(mode="before")
    @classmethod
    def _default_extensions(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        data = dict(data)
        try:
            stiffness = float(data["stiffness"])
            break_force = float(data["break_force"])
        except (KeyError, TypeError, ValueError):
            return data
        if stiffness > 0 and break_force > 0 and data.get("fracture_extension") is None:
            data["fracture_extension"] = break_force / stiffness * MM_PER_M
        if data.get("proportional_limit_extension") is None:
            data["proportional_limit_extension"] = data.get("fracture_extension")
        return data

    @model_validator(mode="after")
    def _check_invariants(self) -> ElasticBand:
        if self.proportional_limit_extension > self.fracture_extension:
            raise ValueError(
                "proportional_limit_extension must not exceed fracture_extension"
            )
        knot_force = self.linear_limit_force
        if self.is_pure_linear:
            if not math.isclose(knot_force, self.break_force, rel_tol=1e-9):
                raise ValueError(
                    f"a linear band reaches {knot_force} N at fracture, "
                    f"not its break force {self.break_force} N"
                )
        elif knot_force >= self.break_force:
            raise ValueError(
                f"linear force at the proportional limit ({knot_force} N) must stay "
                f"below the break force ({self.break_force} N)"
            )
        if self.young_modulus is not None and self.cross_section_area is None:
            raise ValueError("young_modulus requires cross_section_area")
        return self

    @property
    def linear_limit_force(self) -> float:
        """Hooke force at the proportional limit (N)."""
        return self.stiffness * self.proportional_limit_extension / MM_PER_M

    @property
    def is_pure_linear(self) -> bool:
        return self.proportional_limit_extension == self.fracture_extension


class HermiteShape(BaseModel):
    """Shape of the segment between the proportional limit and fracture."""

    model_config = ConfigDict(frozen=True)

    end_slope_factor: float = Field(
        default_factory=lambda: settings.end_slope_factor,
        gt=0,
        description="Slope at fracture as a multiple of k",
    )


def _is_monotone(alpha: float, beta: float) -> bool:
    # Fritsch-Carlson region for a cubic with endpoint slopes alpha, beta
    # relative to the secant.
    if alpha < 0 or beta < 0:
        return False
    curvature = alpha + beta - 2.0
    if curvature <= 0 or 2 * alpha + beta - 3.0 <= 0 or alpha + 2 * beta - 3.0 <= 0:
        return True
    return alpha - (2 * alpha + beta - 3.0) ** 2 / (3.0 * curvature) >= 0


def _monotone_end_slope(start_slope: float, secant: float, requested: float) -> float:
    alpha = start_slope / secant
    beta = requested / secant
    if alpha >= 3.0:
        raise ConfigurationError(
            f"No monotone segment leaves the proportional limit with slope "
            f"{start_slope} N/mm towards a secant of {secant} N/mm; "
            "lower fracture_extension or raise break_force"
        )
    adjusted = beta
    while not _is_monotone(alpha, adjusted):
        adjusted *= 0.9
    if adjusted != beta:
        logger.warning(
            f"Fracture-end slope lowered from {requested:.6g} to "
            f"{adjusted * secant:.6g} N/mm to keep the curve monotone"
        )
    return adjusted * secant


class ForceDeformationCurve(BaseModel):
    """Piecewise extension to force law of one band, up to and past fracture."""

    model_config = ConfigDict(frozen=True)

    band: ElasticBand
    nonlinear_shape: HermiteShape = Field(default_factory=HermiteShape)

    _coefficients: Tuple[float, float, float, float] = PrivateAttr(
        default=(0.0, 0.0, 0.0, 0.0)
    )
    _end_slope: float = PrivateAttr(default=0.0)

    def model_post_init(self, __context: Any) -> None:
        band = self.band
        if band.is_pure_linear:
            self._end_slope = band.stiffness / MM_PER_M
            return
        x0, x1 = band.proportional_limit_extension, band.fracture_extension
        y0, y1 = band.linear_limit_force, band.break_force
        start_slope = band.stiffness / MM_PER_M
        end_slope = _monotone_end_slope(
            start_slope,
            (y1 - y0) / (x1 - x0),
            self.nonlinear_shape.end_slope_factor * start_slope,
        )
        spline = CubicHermiteSpline([x0, x1], [y0, y1], [start_slope, end_slope])
        self._coefficients = tuple(float(c) for c in spline.c[:, 0])
        self._end_slope = end_slope

    @property
    def end_slope(self) -> float:
        """Slope of the curve at fracture (N/mm) after any monotone adjustment."""
        return self._end_slope

    def segment_force(self, extension: float) -> float:
        """Force on the nonlinear segment, local cubic in Horner form."""
        c3, c2, c1, c0 = self._coefficients
        t = extension - self.band.proportional_limit_extension
        return ((c3 * t + c2) * t + c1) * t + c0


def elongation_percent(final_length: float, original_length: float) -> float:
    """Elongation of a stretched length relative to its original, in percent."""
    if original_length <= 0:
        raise DomainError(f"original_length must be positive, got {original_length}")
    if final_length < 0:
        raise DomainError(f"final_length must not be negative, got {final_length}")
    return (final_length - original_length) / original_length * 100.0


def stiffness_from_measurement(force: float, extension: float) -> float:
    """Stiffness k (N/m) from one force / extension (mm) measurement."""
    if extension <= 0:
        raise DomainError(f"extension must be positive, got {extension}")
    if force < 0:
        raise DomainError(f"force must not be negative, got {force}")
    return force / (extension / MM_PER_M)


def hooke_force(band: ElasticBand, extension: float) -> float:
    """Hooke force (N) for an extension (mm) inside the linear region."""
    if extension < 0 or extension > band.proportional_limit_extension:
        raise RegionError(extension, band.proportional_limit_extension)
    return band.stiffness * extension / MM_PER_M


def _young_product(band: ElasticBand) -> float:
    if band.young_modulus is None or band.cross_section_area is None:
        raise ConfigurationError(
            "young_modulus and cross_section_area are both required for this law"
        )
    return band.young_modulus * band.cross_section_area


def extension_from_force_young(band: ElasticBand, force: float) -> float:
    """Extension (mm) from the modulus law dL = F / (Y A) * L0."""
    product = _young_product(band)
    if force < 0:
        raise DomainError(f"force must not be negative, got {force}")
    return force / product * band.rest_length


def force_from_extension_young(band: ElasticBand, extension: float) -> float:
    """Force (N) from the modulus law, the inverse of extension_from_force_young."""
    product = _young_product(band)
    if extension < 0:
        raise DomainError(f"extension must not be negative, got {extension}")
    return extension / band.rest_length * product


def young_stiffness(band: ElasticBand) -> float:
    """Stiffness Y A / L0 (N/m) under which the modulus law equals Hooke's law."""
    return _young_product(band) / band.rest_length * MM_PER_M


def loop_band(band: ElasticBand) -> ElasticBand:
    """Full-loop model of a band measured on its sewn half-round.

    Both halves stretch in series, so lengths and extensions double and the
    stiffness halves while the force at any strain is unchanged.
    """
    return ElasticBand(
        rest_length=band.rest_length * 2,
        stiffness=band.stiffness / 2,
        break_force=band.break_force,
        proportional_limit_extension=band.proportional_limit_extension * 2,
        fracture_extension=band.fracture_extension * 2,
        cross_section_area=band.cross_section_area,
        young_modulus=band.young_modulus,
    )


def curve_force(curve: ForceDeformationCurve, extension: float) -> Tuple[float, Region]:
    """Force (N) and region of the curve at an extension (mm).

    Past fracture the break force is reported with ``Region.FRACTURED``; the
    band is destroyed and the caller decides what that means.
    """
    if extension < 0:
        raise DomainError(f"extension must not be negative, got {extension}")
    band = curve.band
    if extension <= band.proportional_limit_extension:
        return band.stiffness * extension / MM_PER_M, Region.LINEAR
    if extension <= band.fracture_extension:
        return curve.segment_force(extension), Region.NONLINEAR
    return band.break_force, Region.FRACTURED


def max_safe_extension(
    curve: ForceDeformationCurve,
    force_limit: float,
    tolerance: Optional[float] = None,
) -> float:
    """Largest extension (mm) at which the curve force stays at ``force_limit``."""
    band = curve.band
    if force_limit < 0 or force_limit > band.break_force:
        raise DomainError(
            f"force_limit must lie in [0, {band.break_force}] N, got {force_limit}"
        )
    if force_limit == 0:
        return 0.0
    if force_limit == band.break_force:
        return band.fracture_extension
    return invert_increasing(
        lambda x: curve_force(curve, x)[0],
        force_limit,
        0.0,
        band.fracture_extension,
        ftol=settings.force_tolerance if tolerance is None else tolerance,
    )
