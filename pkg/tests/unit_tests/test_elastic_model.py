import pytest
from hypothesis import given
from hypothesis import strategies as st
from pydantic import ValidationError

from waistband.core.elastic_model import (
    ElasticBand,
    ForceDeformationCurve,
    HermiteShape,
    Region,
    curve_force,
    elongation_percent,
    extension_from_force_young,
    force_from_extension_young,
    hooke_force,
    loop_band,
    max_safe_extension,
    stiffness_from_measurement,
    young_stiffness,
)
from waistband.utils.exceptions import ConfigurationError, DomainError, RegionError


def _hermite(x, x0, x1, y0, y1, m0, m1):
    """Cubic Hermite basis evaluation, independent of the curve's own spline."""
    h = x1 - x0
    s = (x - x0) / h
    h00 = 2 * s**3 - 3 * s**2 + 1
    h10 = s**3 - 2 * s**2 + s
    h01 = -2 * s**3 + 3 * s**2
    h11 = s**3 - s**2
    return h00 * y0 + h10 * h * m0 + h01 * y1 + h11 * h * m1


@pytest.fixture
def knee_band(sample_band) -> ElasticBand:
    return sample_band.model_copy(
        update={"proportional_limit_extension": 150.0, "fracture_extension": 300.0}
    )


def knee_curve(band: ElasticBand, factor: float = 3.0) -> ForceDeformationCurve:
    return ForceDeformationCurve(
        band=ElasticBand(**band.model_dump()),
        nonlinear_shape=HermiteShape(end_slope_factor=factor),
    )


class TestMeasurements:
    def test_elongation_of_measured_band(self) -> None:
        assert elongation_percent(610, 420) == pytest.approx(45.238, abs=0.05)

    def test_elongation_zero_and_shrink(self) -> None:
        assert elongation_percent(420, 420) == 0.0
        assert elongation_percent(400, 420) < 0

    def test_elongation_rejects_bad_lengths(self) -> None:
        with pytest.raises(DomainError):
            elongation_percent(610, 0)
        with pytest.raises(DomainError):
            elongation_percent(-1, 420)

    def test_stiffness_from_measurement(self) -> None:
        assert stiffness_from_measurement(22.82, 190) == pytest.approx(120.105, abs=0.5)

    def test_stiffness_needs_positive_extension(self) -> None:
        with pytest.raises(DomainError):
            stiffness_from_measurement(22.82, 0)


class TestElasticBand:
    def test_extensions_default_to_linear_band(self, sample_band) -> None:
        assert sample_band.is_pure_linear
        assert sample_band.fracture_extension == pytest.approx(258.107, abs=1e-3)
        assert sample_band.linear_limit_force == pytest.approx(31.0)

    def test_proportional_limit_past_fracture_rejected(self) -> None:
        with pytest.raises(ValidationError):
            ElasticBand(
                rest_length=420,
                stiffness=120,
                break_force=31,
                proportional_limit_extension=200,
                fracture_extension=150,
            )

    def test_knot_force_must_stay_below_break(self) -> None:
        with pytest.raises(ValidationError):
            ElasticBand(
                rest_length=420,
                stiffness=120,
                break_force=31,
                proportional_limit_extension=260,
                fracture_extension=300,
            )

    def test_linear_band_must_break_at_its_break_force(self) -> None:
        with pytest.raises(ValidationError):
            ElasticBand(
                rest_length=420,
                stiffness=120,
                break_force=31,
                proportional_limit_extension=200,
                fracture_extension=200,
            )

    def test_modulus_needs_area(self) -> None:
        with pytest.raises(ValidationError):
            ElasticBand(rest_length=420, stiffness=120, break_force=31, young_modulus=5)


class TestLinearLaws:
    def test_hooke_reproduces_measurement(self, sample_band) -> None:
        assert hooke_force(sample_band, 190) == pytest.approx(22.82)

    def test_hooke_outside_linear_region(self, sample_band) -> None:
        with pytest.raises(RegionError) as excinfo:
            hooke_force(sample_band, 300)
        assert excinfo.value.extension == 300

    def test_modulus_law_agrees_with_hooke(self, sample_band) -> None:
        # Y chosen so that Y A / L0 equals the measured stiffness
        area = 10.0
        band = sample_band.model_copy(
            update={
                "cross_section_area": area,
                "young_modulus": sample_band.stiffness * 420 / (area * 1000),
            }
        )
        assert young_stiffness(band) == pytest.approx(band.stiffness)
        assert force_from_extension_young(band, 190) == pytest.approx(22.82)
        assert extension_from_force_young(band, 22.82) == pytest.approx(190)

    @given(fraction=st.floats(0, 1))
    def test_modulus_law_matches_hooke_across_linear_region(self, fraction) -> None:
        band = ElasticBand(
            rest_length=420,
            stiffness=120,
            break_force=31,
            cross_section_area=10,
            young_modulus=120 * 420 / (10 * 1000),
        )
        extension = fraction * band.proportional_limit_extension
        assert force_from_extension_young(band, extension) == pytest.approx(
            hooke_force(band, extension), abs=1e-9
        )

    def test_modulus_law_without_modulus(self, sample_band) -> None:
        with pytest.raises(ConfigurationError):
            extension_from_force_young(sample_band, 10)

    def test_loop_band_keeps_force_at_equal_strain(self, sample_band) -> None:
        loop = loop_band(sample_band)
        assert loop.rest_length == 840
        assert loop.stiffness == pytest.approx(60.0526, abs=1e-3)
        assert hooke_force(loop, 380) == pytest.approx(22.82)

    @given(
        stiffness=st.floats(10, 1000),
        extension=st.floats(0.1, 100),
        scale=st.floats(0.1, 10),
    )
    def test_hooke_is_proportional(self, stiffness, extension, scale) -> None:
        band = ElasticBand(rest_length=500, stiffness=stiffness, break_force=1e4)
        assert hooke_force(band, extension * scale) == pytest.approx(
            hooke_force(band, extension) * scale, rel=1e-9
        )

    @given(force=st.floats(0.01, 100), extension=st.floats(0.01, 500))
    def test_stiffness_round_trip(self, force, extension) -> None:
        stiffness = stiffness_from_measurement(force, extension)
        band = ElasticBand(
            rest_length=500, stiffness=stiffness, break_force=force * 2
        )
        assert hooke_force(band, extension) == pytest.approx(force, rel=1e-9)


class TestCurve:
    def test_regions_of_linear_band(self, sample_curve) -> None:
        assert curve_force(sample_curve, 190) == (pytest.approx(22.82), Region.LINEAR)
        force, region = curve_force(sample_curve, 300)
        assert (force, region) == (31.0, Region.FRACTURED)

    def test_fracture_point_is_not_fractured(self, knee_band) -> None:
        curve = knee_curve(knee_band)
        force, region = curve_force(curve, 300)
        assert region is Region.NONLINEAR
        assert force == pytest.approx(31.0, abs=1e-9)

    def test_negative_extension(self, sample_curve) -> None:
        with pytest.raises(DomainError):
            curve_force(sample_curve, -0.1)

    def test_continuous_at_proportional_limit(self, knee_band) -> None:
        curve = knee_curve(knee_band)
        left, _ = curve_force(curve, 150)
        right = curve.segment_force(150)
        assert left == pytest.approx(right, abs=1e-9)

    def test_segment_matches_hermite_oracle(self, knee_band) -> None:
        curve = knee_curve(knee_band, factor=1.0)
        k = knee_band.stiffness / 1000
        for x in (160.0, 224.0, 290.0):
            expected = _hermite(x, 150, 300, k * 150, 31.0, k, curve.end_slope)
            assert curve_force(curve, x)[0] == pytest.approx(expected, abs=1e-9)

    def test_force_past_knee(self) -> None:
        band = ElasticBand(
            rest_length=420,
            stiffness=120,
            break_force=31,
            proportional_limit_extension=190,
            fracture_extension=258,
        )
        curve = ForceDeformationCurve(band=band)
        force, region = curve_force(curve, 224)
        assert region is Region.NONLINEAR
        assert 22.82 < force < 31
        assert curve.end_slope == pytest.approx(0.36)
        expected = _hermite(224, 190, 258, 22.8, 31.0, 0.12, curve.end_slope)
        assert force == pytest.approx(expected, abs=1e-9)

    def test_gentle_end_slope_kept(self, knee_band) -> None:
        curve = knee_curve(knee_band, factor=1.0)
        assert curve.end_slope == pytest.approx(knee_band.stiffness / 1000)

    def test_steep_end_slope_lowered_to_stay_monotone(self, knee_band) -> None:
        curve = knee_curve(knee_band, factor=3.0)
        assert curve.end_slope < 3.0 * knee_band.stiffness / 1000
        forces = [curve_force(curve, 150 + 0.5 * i)[0] for i in range(301)]
        assert all(b > a for a, b in zip(forces, forces[1:]))

    def test_no_monotone_segment(self, sample_band) -> None:
        band = sample_band.model_copy(
            update={"proportional_limit_extension": 200.0, "fracture_extension": 400.0}
        )
        with pytest.raises(ConfigurationError):
            ForceDeformationCurve(band=ElasticBand(**band.model_dump()))


class TestMaxSafeExtension:
    def test_inverts_measurement(self, sample_curve) -> None:
        assert max_safe_extension(sample_curve, 22.82) == pytest.approx(190, abs=1e-4)

    def test_ends(self, sample_curve) -> None:
        assert max_safe_extension(sample_curve, 0) == 0.0
        assert max_safe_extension(sample_curve, 31.0) == sample_curve.band.fracture_extension

    def test_limit_above_break(self, sample_curve) -> None:
        with pytest.raises(DomainError):
            max_safe_extension(sample_curve, 31.5)

    def test_on_nonlinear_segment(self, knee_band) -> None:
        curve = knee_curve(knee_band)
        extension = max_safe_extension(curve, 25.0)
        assert 150 < extension < 300
        assert curve_force(curve, extension)[0] == pytest.approx(25.0, abs=1e-6)
