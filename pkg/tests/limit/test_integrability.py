import math

import numpy as np
import pytest

from filtered_lrd.errors import ContractError, InconclusiveScanError
from filtered_lrd.limit.integrability import (
    ScanClass,
    ScanSpec,
    direction_energy,
    integrability_scan,
)
from filtered_lrd.windows import Window


@pytest.mark.parametrize("exponent", [0.5, 1.3, 1.9])
def test_interval_convergent(exponent: float):
    result = integrability_scan(Window.interval(), exponent)
    assert result.classification == ScanClass.CONVERGENT
    assert result.fitted_power == pytest.approx(exponent - 3.0, abs=0.05)
    assert result.inner_integral > 0


def test_interval_divergent_past_two():
    assert integrability_scan(Window.interval(), 2.4).classification == ScanClass.DIVERGENT_AT_INFINITY


@pytest.mark.parametrize(
    ("exponent", "expected"),
    [
        (2.4, ScanClass.CONVERGENT),
        (2.5, ScanClass.CONVERGENT),
        (3.0, ScanClass.BOUNDARY),
        (3.2, ScanClass.DIVERGENT_AT_INFINITY),
    ],
)
def test_disk(exponent: float, expected: ScanClass):
    assert integrability_scan(Window.ball(2), exponent).classification == expected


@pytest.mark.parametrize(
    ("exponent", "expected"),
    [(2.0, ScanClass.CONVERGENT), (3.5, ScanClass.DIVERGENT_AT_INFINITY)],
)
def test_square(exponent: float, expected: ScanClass):
    assert integrability_scan(Window.box(2), exponent).classification == expected


@pytest.mark.parametrize("window", [Window.interval(), Window.ball(2), Window.box(2)])
def test_non_positive_exponent_diverges_at_origin(window: Window):
    result = integrability_scan(window, -0.1)
    assert result.classification == ScanClass.DIVERGENT_AT_ORIGIN
    assert result.fitted_power is None


def test_direction_energy_of_disk_and_interval():
    rho = np.array([0.5, 3.0])
    np.testing.assert_allclose(
        direction_energy(Window.interval(), rho), 2.0 * (2.0 * np.sin(rho) / rho) ** 2
    )
    assert direction_energy(Window.ball(2), 1e-6)[0] == pytest.approx(2.0 * math.pi * math.pi**2)


def test_direction_energy_of_square_near_origin():
    assert direction_energy(Window.box(2), 1e-6)[0] == pytest.approx(2.0 * math.pi * 16.0)


def test_no_scan_for_three_dimensional_ball():
    with pytest.raises(ContractError):
        direction_energy(Window.ball(3), 1.0)


def test_unplaceable_fit_is_inconclusive():
    strict = ScanSpec(min_r_squared=1.01, boundary_width=0.0)
    with pytest.raises(InconclusiveScanError) as excinfo:
        integrability_scan(Window.interval(), 1.0, strict)
    assert "slope" in excinfo.value.diagnostics
    assert len(excinfo.value.diagnostics["band_integrals"]) == strict.bands


def test_scan_spec_validation():
    with pytest.raises(ContractError):
        ScanSpec(bands=2)
