import math

import numpy as np
import pytest

from wolffkit.radial import RadialFunction, RadialGrid


@pytest.fixture
def unit_indicator():
    """Indicator of the unit ball: exact via head model + hard tail cutoff."""
    grid = RadialGrid.per_decade(1e-2, 1.0, 24)
    return RadialFunction(
        grid, np.ones(grid.count), head_exponent=0.0, tail_exponent=math.inf
    )


def indicator_of_ball(radius: float) -> RadialFunction:
    grid = RadialGrid.per_decade(radius / 100.0, radius, 24)
    return RadialFunction(
        grid, np.ones(grid.count), head_exponent=0.0, tail_exponent=math.inf
    )


def power_tail_profile(grid: RadialGrid, scale: float, m: float) -> RadialFunction:
    """Smooth bump (1 + (r/scale)^2)^(-m/2) with the matching declared tail."""
    vals = (1.0 + (grid.points / scale) ** 2) ** (-m / 2.0)
    return RadialFunction(grid, vals, head_exponent=0.0, tail_exponent=m)
