import math

import pytest

from waistband.core.solver import invert_increasing
from waistband.utils.exceptions import ConvergenceError


def test_inverts_cube() -> None:
    root = invert_increasing(lambda x: x**3, 27.0, 0.0, 10.0, ftol=1e-9)
    assert root == pytest.approx(3.0, abs=1e-9)


def test_endpoint_hits_return_bracket_ends() -> None:
    assert invert_increasing(math.exp, 1.0, 0.0, 5.0, ftol=1e-12) == 0.0
    assert invert_increasing(lambda x: 2 * x, 10.0, 0.0, 5.0, ftol=1e-12) == 5.0


def test_target_outside_bracket() -> None:
    with pytest.raises(ConvergenceError):
        invert_increasing(lambda x: x, 20.0, 0.0, 10.0, ftol=1e-9)
