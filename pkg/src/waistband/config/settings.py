from pathlib import Path
from typing import Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class WaistbandSettings(BaseSettings):
    """Configuration settings for the waistband planner"""

    # Application Configuration
    log_level: str = Field(default="INFO", description="Logging level")
    log_file: Optional[Path] = Field(
        default=None, description="Detailed log file, console only when unset"
    )

    # Solver Configuration
    force_tolerance: float = Field(
        default=1e-6, gt=0, description="Force residual accepted by inversions (N)"
    )
    max_bisection_iterations: int = Field(
        default=200, gt=0, description="Iteration cap for bisection solves"
    )
    spacing_tolerance: float = Field(
        default=0.01,
        gt=0,
        description="Boundary round-trip accepted by required_spacing (mm)",
    )

    # Material Configuration
    end_slope_factor: float = Field(
        default=3.0,
        gt=0,
        description="Fracture-end slope of the nonlinear segment, as a multiple of k",
    )

    # Planning Configuration
    preferred_wheel_count: int = Field(
        default=2,
        ge=2,
        le=3,
        description="Wheel count chosen when several configurations are feasible",
    )
    control_granularity: float = Field(
        default=0.01, gt=0, le=0.01, description="C% step as a fraction"
    )
    display_decimals: int = Field(
        default=1, ge=0, description="Decimals shown in human-readable reports"
    )

    # Simulation Configuration
    time_step_ms: int = Field(default=1, gt=0, description="Control period (ms)")
    wheel_speed: float = Field(
        default=100.0, gt=0, description="Wheel separation speed (mm/s)"
    )
    sensor_noise: float = Field(
        default=0.0, ge=0, description="Uniform force sensor noise amplitude (N)"
    )
    max_sim_time: float = Field(
        default=60.0, gt=0, description="Watchdog bound on one cycle (s)"
    )
    rng_seed: int = Field(default=0, description="Seed for sensor noise")

    model_config = SettingsConfigDict(
        env_prefix="WAISTBAND_",
        env_file=".env",
        case_sensitive=False,
        env_file_encoding="utf-8",
        extra="ignore",
    )


# Global settings instance
settings = WaistbandSettings()
