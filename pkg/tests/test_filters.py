import math

import numpy as np
import pytest

from filtered_lrd.errors import ContractError, InadmissibleParametersError, SingularMultiplierError
from filtered_lrd.field.synthesis import LatticeField
from filtered_lrd.filters import (
    FilterSpec,
    apply_filter,
    frequency_norms,
    kernel_G,
    multiplier,
    multiplier_energy,
)


def _field(values: np.ndarray, spacing: float = 1.0) -> LatticeField:
    return LatticeField(
        n=values.ndim,
        shape=values.shape,
        spacing=spacing,
        values=values,
        origin=tuple(m // 2 for m in values.shape),
    )


@pytest.mark.parametrize(("n", "beta"), [(1, 0.5), (1, -0.5), (2, 1.0), (3, -1.6)])
def test_beta_outside_square_integrable_range(n: int, beta: float):
    with pytest.raises(InadmissibleParametersError):
        FilterSpec(n=n, beta=beta)


def test_multiplier_values():
    spec = FilterSpec(n=1, beta=0.3, h_scale=2.0, sigma=1.0)
    assert multiplier(spec, 1.0) == pytest.approx(2.0 * math.exp(-0.5))
    assert multiplier(spec, 0.0) == 0.0
    assert multiplier(spec, 2.0) == pytest.approx(2.0 * 2.0**0.3 * math.exp(-2.0))


def test_negative_beta_is_singular_at_zero():
    with pytest.raises(SingularMultiplierError):
        multiplier(FilterSpec(n=1, beta=-0.2), np.array([0.0, 1.0]))


def test_frequency_norms_real_layout():
    norms = frequency_norms((8, 6), spacing=0.5)
    assert norms.shape == (8, 4)
    assert norms[0, 0] == 0.0
    assert norms[0, 1] == pytest.approx(2.0 * math.pi / 3.0)


def test_constant_field_passes_through_the_dc_multiplier():
    spec = FilterSpec(n=1, beta=0.0, h_scale=1.5)
    out = apply_filter(_field(np.full(64, 2.0)), spec)
    np.testing.assert_allclose(out.values, 3.0)
    assert out.metadata["dc_policy"] == "multiplier"


def test_negative_beta_annihilates_the_mean():
    spec = FilterSpec(n=2, beta=-0.5)
    out = apply_filter(_field(np.full((16, 16), 4.0)), spec)
    np.testing.assert_allclose(out.values, 0.0, atol=1e-12)
    assert out.metadata["dc_policy"] == "annihilated"
    assert out.metadata["filter_beta"] == -0.5


def test_filter_is_linear(rng: np.random.Generator):
    spec = FilterSpec(n=1, beta=0.25, sigma=0.7)
    a, b = rng.standard_normal(128), rng.standard_normal(128)
    combined = apply_filter(_field(2.0 * a + b), spec).values
    separate = 2.0 * apply_filter(_field(a), spec).values + apply_filter(_field(b), spec).values
    np.testing.assert_allclose(combined, separate, atol=1e-12)


def test_gaussian_bump_convolution():
    # G * exp(-x^2/2) = exp(-x^2/4) / sqrt(2) for beta = 0, sigma = 1
    spacing = 0.1
    x = (np.arange(512) - 256) * spacing
    out = apply_filter(_field(np.exp(-(x**2) / 2.0), spacing), FilterSpec(n=1, beta=0.0))
    np.testing.assert_allclose(out.values, np.exp(-(x**2) / 4.0) / math.sqrt(2.0), atol=1e-6)


def test_dimension_mismatch():
    with pytest.raises(ContractError):
        apply_filter(_field(np.zeros(8)), FilterSpec(n=2, beta=0.0))


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("x", [0.0, 0.5, 2.0])
def test_kernel_of_pure_taper(n: int, x: float):
    sigma = 1.3
    expected = sigma**n / (2.0 * math.pi) ** (n / 2.0) * math.exp(-(sigma**2) * x * x / 2.0)
    assert kernel_G(FilterSpec(n=n, beta=0.0, sigma=sigma), x) == pytest.approx(expected, rel=1e-6)


def test_multiplier_energy_of_pure_taper():
    assert multiplier_energy(FilterSpec(n=1, beta=0.0)) == pytest.approx(
        math.sqrt(math.pi) / (2.0 * math.pi)
    )


def test_white_noise_variance_matches_energy(rng: np.random.Generator):
    spacing = 0.5
    spec = FilterSpec(n=1, beta=0.3)
    variances = [
        np.var(apply_filter(_field(rng.standard_normal(4096), spacing), spec).values)
        for _ in range(10)
    ]
    assert np.mean(variances) == pytest.approx(spacing * multiplier_energy(spec), rel=0.05)


def test_multiplier_is_homogeneous_apart_from_the_taper():
    spec = FilterSpec(n=2, beta=0.3)
    ratio = (multiplier(spec, 2.0) / spec.taper(2.0)) / (multiplier(spec, 1.0) / spec.taper(1.0))
    assert ratio == pytest.approx(2.0**0.3)
    assert ratio == pytest.approx(1.2311, abs=1e-4)


def test_wide_taper_is_nearly_the_identity(rng: np.random.Generator):
    values = rng.standard_normal(256)
    out = apply_filter(_field(values), FilterSpec(n=1, beta=0.0, sigma=1e6))
    np.testing.assert_allclose(out.values[64:192], values[64:192], rtol=1e-6, atol=1e-9)


def test_positive_beta_removes_a_constant():
    out = apply_filter(_field(np.full((16, 16), 5.0)), FilterSpec(n=2, beta=0.5))
    np.testing.assert_allclose(out.values, 0.0, atol=1e-9)


@pytest.mark.parametrize("beta", [0.3, -0.3])
def test_spectral_filter_matches_direct_convolution(beta: float):
    # sigma = 1/4 puts the taper far below machine precision at the Nyquist frequency
    spec = FilterSpec(n=1, beta=beta, sigma=0.25)
    size, centre, reach = 512, 256, 20
    x = np.arange(size) - centre
    # zero mean and first moment, so periodic images of the slowly decaying kernel cancel
    bump = (1.0 - x**2 / 4.0) * np.exp(-(x**2) / 8.0)
    bump[np.abs(x) > reach] = 0.0
    out = apply_filter(_field(bump), spec)

    central = np.arange(size // 4, 3 * size // 4)
    support = np.flatnonzero(bump)
    distances = np.abs(central[:, None] - support[None, :])
    table = np.array([kernel_G(spec, float(d), atol=1e-7) for d in range(distances.max() + 1)])
    direct = table[distances] @ bump[support]

    error = np.linalg.norm(out.values[central] - direct) / np.linalg.norm(direct)
    assert error < 1e-3
