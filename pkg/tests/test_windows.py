import logging
import math

import numpy as np
import pytest
from numpy.polynomial import legendre
from scipy import integrate, special

from filtered_lrd.errors import ContractError, InadmissibleParametersError, WindowCoverageError
from filtered_lrd.field.synthesis import LatticeField
from filtered_lrd.windows import (
    Window,
    WindowKind,
    admissible_exponent_upper,
    ball_transform,
    gamma_lower_bound,
    indicator_mask,
    k_delta,
)


def _grid(shape: tuple[int, ...], spacing: float = 1.0) -> LatticeField:
    return LatticeField(
        n=len(shape),
        shape=shape,
        spacing=spacing,
        values=np.zeros(shape),
        origin=tuple(m // 2 for m in shape),
    )


def test_measures():
    assert Window.interval(1.0, 0.5).measure == 1.5
    assert Window.ball(2).measure == pytest.approx(math.pi)
    assert Window.ball(3).measure == pytest.approx(4.0 * math.pi / 3.0)
    assert Window.box(2).measure == 4.0


@pytest.mark.parametrize(
    ("kind", "n"), [(WindowKind.INTERVAL, 2), (WindowKind.BOX, 3), (WindowKind.BALL, 4)]
)
def test_unsupported_dimensions(kind: WindowKind, n: int):
    with pytest.raises(InadmissibleParametersError):
        Window(kind, n)


def test_degenerate_interval():
    with pytest.raises(InadmissibleParametersError):
        Window.interval(0.0, 0.0)


def test_origin_on_boundary_warns(caplog: pytest.LogCaptureFixture):
    with caplog.at_level(logging.WARNING):
        Window.interval(1.0, 0.0)
    assert any("origin on its boundary" in r.getMessage() for r in caplog.records)


def test_transform_at_zero_is_measure():
    for w in (Window.interval(1.0, 0.5), Window.ball(1), Window.ball(2), Window.ball(3), Window.box(2)):
        zero = np.zeros(w.n)
        assert k_delta(w, zero) == pytest.approx(w.measure)


@pytest.mark.parametrize("lam", [0.3, 3.0, -7.5])
def test_interval_transform_closed_form(lam: float):
    w = Window.interval(1.0, 0.5)
    expected = (np.exp(1j * lam) - np.exp(-0.5j * lam)) / (1j * lam)
    assert k_delta(w, lam) == pytest.approx(expected, rel=1e-12)


def test_conjugate_symmetry():
    w = Window.interval(2.0, 0.5)
    lam = np.linspace(-20.0, 20.0, 41)
    np.testing.assert_allclose(k_delta(w, -lam), np.conj(k_delta(w, lam)), atol=1e-12)


def test_interval_decay():
    lam = np.linspace(1.0, 200.0, 500)
    assert np.all(np.abs(k_delta(Window.interval(), lam)) <= 2.0 / lam + 1e-12)


def test_ball_one_is_symmetric_interval():
    lam = np.linspace(0.01, 30.0, 50)
    np.testing.assert_allclose(
        k_delta(Window.ball(1), lam), k_delta(Window.interval(), lam), rtol=1e-8, atol=1e-12
    )


@pytest.mark.parametrize("rho", [0.5, 4.0, 10.0])
def test_ball_transform_against_radial_quadrature(rho: float):
    disk, _ = integrate.quad(lambda s: special.j0(rho * s) * s, 0.0, 1.0)
    assert ball_transform(2, rho) == pytest.approx(2.0 * math.pi * disk, rel=1e-7)
    solid, _ = integrate.quad(lambda s: math.sin(rho * s) / (rho * s) * s * s, 0.0, 1.0)
    assert ball_transform(3, rho) == pytest.approx(4.0 * math.pi * solid, rel=1e-7)


def test_ball_series_is_continuous():
    below, above = ball_transform(2, np.array([0.999e-3, 1.001e-3]))
    assert below == pytest.approx(above, rel=1e-6)


def test_ball_depends_on_norm_only():
    w = Window.ball(2)
    lam = np.array([[3.0, 4.0], [5.0, 0.0], [0.0, -5.0]])
    values = k_delta(w, lam)
    np.testing.assert_allclose(values, values[0], rtol=1e-12)


def test_box_transform_against_tensor_quadrature():
    nodes, weights = legendre.leggauss(64)
    lam = np.array([2.5, -6.0])
    phase = np.exp(1j * (nodes[:, None] * lam[0] + nodes[None, :] * lam[1]))
    expected = np.sum(weights[:, None] * weights[None, :] * phase)
    assert k_delta(Window.box(2), lam) == pytest.approx(expected, rel=1e-10)


def test_trailing_axis_is_required_in_higher_dimensions():
    with pytest.raises(ContractError):
        k_delta(Window.ball(2), 1.0)


def test_gamma_and_exponent_bounds():
    assert gamma_lower_bound(Window.interval()) == 0.0
    assert gamma_lower_bound(Window.ball(2)) == 0.25
    assert admissible_exponent_upper(Window.interval()) == 2.0
    assert admissible_exponent_upper(Window.ball(2)) == 3.0
    assert admissible_exponent_upper(Window.ball(3)) == pytest.approx(4.0)
    assert admissible_exponent_upper(Window.box(2)) == 4.0


def test_interval_mask_counts():
    grid = _grid((33,))
    w = Window.interval()
    assert indicator_mask(w, 10.0, 1.0, grid).sum() == 21
    assert abs(int(indicator_mask(w, 10.0, 0.5, grid).sum()) - 10.5) <= 1
    asymmetric = indicator_mask(Window.interval(1.0, 0.0), 10.0, 1.0, grid)
    assert asymmetric.sum() == 11
    assert asymmetric[grid.origin[0]]


def test_ball_mask_area():
    grid = _grid((121, 121))
    count = int(indicator_mask(Window.ball(2), 50.0, 1.0, grid).sum())
    assert count == pytest.approx(math.pi * 50.0**2, rel=0.01)


def test_box_mask_with_fraction():
    grid = _grid((41, 41))
    # side 2 r t^(1/2) = 20 for t = 1/4
    assert indicator_mask(Window.box(2), 20.0, 0.25, grid).sum() == 21 * 21


def test_window_outside_grid():
    with pytest.raises(WindowCoverageError):
        indicator_mask(Window.interval(), 20.0, 1.0, _grid((33,)))


@pytest.mark.parametrize(("r", "t"), [(0.0, 1.0), (5.0, 0.0), (5.0, 1.5)])
def test_mask_arguments(r: float, t: float):
    with pytest.raises(ContractError):
        indicator_mask(Window.interval(), r, t, _grid((33,)))
