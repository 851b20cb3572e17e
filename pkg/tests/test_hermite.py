import math

import numpy as np
import pytest
from numpy.polynomial import legendre

from filtered_lrd.errors import (
    ContractError,
    HermiteEvaluationError,
    RankUndeterminedError,
    UnsupportedDegreeError,
)
from filtered_lrd.hermite import (
    MAX_DEGREE,
    expand,
    hermite_eval,
    hermite_rank,
    hermite_values,
    normal_quadrature,
)


def test_low_degrees():
    assert hermite_eval(0, 1.7) == 1.0
    assert hermite_eval(1, 1.7) == 1.7
    assert hermite_eval(2, 3.0) == pytest.approx(8.0)
    assert hermite_eval(3, 2.0) == pytest.approx(2.0)


def test_array_input_matches_stacked_values():
    x = np.linspace(-3.0, 3.0, 11)
    stacked = hermite_values(5, x)
    for m in range(6):
        np.testing.assert_allclose(hermite_eval(m, x), stacked[m])


def test_orthogonality_under_gaussian_quadrature():
    nodes, weights = normal_quadrature(64)
    assert weights.sum() == pytest.approx(1.0)
    values = hermite_values(10, nodes)
    for i in range(11):
        for j in range(11):
            inner = float(np.sum(weights * values[i] * values[j]))
            expected = 1.0 if i == j else 0.0
            assert inner / math.sqrt(math.factorial(i) * math.factorial(j)) == pytest.approx(
                expected, abs=1e-8
            )


@pytest.mark.parametrize("m", [-1, MAX_DEGREE + 1])
def test_unsupported_degree(m: int):
    with pytest.raises(UnsupportedDegreeError):
        hermite_eval(m, 0.5)


def test_expand_cube():
    exp = expand(lambda x: x**3, 3)
    np.testing.assert_allclose(exp.coeffs, [0.0, 3.0, 0.0, 6.0], atol=1e-10)
    assert exp.rank == 1
    assert exp.reconstruct(1.5) == pytest.approx(1.5**3)


def test_expand_square_has_rank_two():
    exp = expand(lambda x: x * x, 4)
    assert exp.coefficient(0) == pytest.approx(1.0)
    assert exp.coefficient(2) == pytest.approx(2.0)
    assert hermite_rank(exp) == 2


def test_expand_sign_has_rank_one():
    exp = expand(lambda x: math.copysign(1.0, x), 5)
    assert hermite_rank(exp) == 1
    assert exp.coefficient(1) == pytest.approx(math.sqrt(2.0 / math.pi), abs=5e-3)
    assert exp.coefficient(2) == pytest.approx(0.0, abs=1e-10)


def test_constant_has_no_rank():
    exp = expand(lambda x: 2.5, 6)
    assert exp.rank is None
    with pytest.raises(RankUndeterminedError):
        hermite_rank(exp)


def test_parseval_residual_decreases():
    residuals = [expand(lambda x: math.exp(x / 2.0), J).parseval_residual() for J in (2, 4, 8, 12)]
    assert all(b <= a for a, b in zip(residuals, residuals[1:], strict=False))
    assert residuals[-1] < 1e-6


def test_non_finite_evaluation_names_the_node():
    with pytest.raises(HermiteEvaluationError) as excinfo:
        expand(lambda x: math.log(x) if x > 0 else math.nan, 4)
    assert excinfo.value.node <= 0


def test_too_few_quadrature_nodes():
    with pytest.raises(ContractError):
        expand(lambda x: x, 10, quad_nodes=10)


@pytest.mark.parametrize(
    ("degree", "f"),
    [
        (2, lambda x: x**2),
        (3, lambda x: x**3 - 2.0 * x),
        (4, lambda x: x**4 + 0.5 * x),
        (5, lambda x: 3.0 * x**5 - x**2 + 1.0),
    ],
)
def test_polynomial_is_reconstructed_at_legendre_points(degree: int, f):
    nodes, _ = legendre.leggauss(12)
    x = 3.0 * nodes
    exp = expand(f, degree + 2)
    np.testing.assert_allclose(exp.reconstruct(x), f(x), rtol=1e-10, atol=1e-10)


@pytest.mark.parametrize(("power", "moment"), [(2, 3.0), (4, 105.0)])
def test_parseval_matches_closed_form_second_moment(power: int, moment: float):
    # E[(X^p)^2] = (2p - 1)!! for standard normal X
    exp = expand(lambda x: x**power, 2 * power)
    weighted = sum(exp.coefficient(j) ** 2 / math.factorial(j) for j in range(2 * power + 1))
    assert weighted == pytest.approx(moment, rel=1e-9)
    assert exp.l2_norm_sq == pytest.approx(moment, rel=1e-9)
    assert exp.parseval_residual() < 1e-8
