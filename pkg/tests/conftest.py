from pathlib import Path

import pytest

from waistband.core.elastic_model import ElasticBand, ForceDeformationCurve
from waistband.core.force_control import ServoSpec, max_control_percent
from waistband.core.wheel_geometry import WheelConfig, WheelPlan

SPECS_DIR = Path(__file__).resolve().parents[1] / "specs"

# 22.82 N at 190 mm on the half-round
SAMPLE_K = 22.82 / 0.19


@pytest.fixture
def sample_band() -> ElasticBand:
    return ElasticBand(rest_length=420.0, stiffness=SAMPLE_K, break_force=31.0)


@pytest.fixture
def sample_curve(sample_band) -> ForceDeformationCurve:
    return ForceDeformationCurve(band=sample_band)


@pytest.fixture
def cfg3() -> WheelConfig:
    return WheelConfig(
        wheel_count=3,
        min_spacing=300.0,
        max_spacing=750.0,
        elongation_factor_at_max=2.25,
        elongation_factor_at_min=2.72,
    )


@pytest.fixture
def cfg2() -> WheelConfig:
    return WheelConfig(
        wheel_count=2,
        min_spacing=300.0,
        max_spacing=750.0,
        elongation_factor_at_max=2.15,
        elongation_factor_at_min=2.50,
    )


@pytest.fixture
def sample_servo() -> ServoSpec:
    return ServoSpec(rated_torque=2.4, rod_radius=9.5)


@pytest.fixture
def sample_limit(sample_servo):
    return max_control_percent(sample_servo, 31.0, 0.01)


@pytest.fixture
def bench_plan() -> WheelPlan:
    """Constant-factor rig that stretches the 420 mm band to 610 mm at 305 mm."""
    rig = WheelConfig(
        wheel_count=2,
        min_spacing=100.0,
        max_spacing=400.0,
        elongation_factor_at_max=2.0,
        elongation_factor_at_min=2.0,
    )
    return WheelPlan(chosen_config=rig, spacing=305.0, effective_elongation=2.0)


@pytest.fixture
def machine_file() -> Path:
    return SPECS_DIR / "sample_machine.json"


@pytest.fixture
def band_file() -> Path:
    return SPECS_DIR / "sample_band.json"
