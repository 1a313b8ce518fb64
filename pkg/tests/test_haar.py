""" Tests for schattencheck.haar. """

import numpy as np
import pytest

from hypothesis import given
from hypothesis.strategies import data

from schattencheck import dyadic
from schattencheck import haar
from tests.strategies import band_limited_functions, grid_functions, grids, systems


def test_sign_matrix_is_orthogonal():
    """Test that the sign matrix has orthogonal rows."""
    for n in (1, 2, 3):
        signs = haar.sign_matrix(n)
        assert np.allclose(signs @ signs.T, 2**n * np.eye(2**n))
        assert np.all(signs[-1] == 1)


def test_signature_positions():
    """Test that signatures follow the binary order."""
    signatures = haar.cancellative_signatures(2)

    assert [s.bits for s in signatures] == [(0, 0), (0, 1), (1, 0)]
    assert [s.position for s in signatures] == [0, 1, 2]
    assert not haar.Signature((1, 1)).cancellative


def test_haar_function_normalization():
    """Test that Haar functions have unit norm and zero integral."""
    grid = dyadic.TorusGrid(2, 3)
    system = dyadic.DyadicSystem(grid, (1, 2))

    for cube in system.cubes(2):
        for signature in haar.cancellative_signatures(2):
            function = haar.haar_function(cube, signature)
            assert np.sum(function**2) * grid.cell_volume == pytest.approx(1.0)
            assert np.sum(function) == pytest.approx(0.0, abs=1e-9)
            l1 = np.sum(np.abs(function)) * grid.cell_volume
            assert l1 * np.max(np.abs(function)) == pytest.approx(1.0)


def test_haar_function_on_finest_cube():
    """Test that cancellative functions on odd-sided cubes are rejected."""
    grid = dyadic.TorusGrid(1, 1)
    cube = dyadic.DyadicSystem(grid, (0,)).cube(1, 0)

    with pytest.raises(dyadic.MaximalDepthError):
        haar.haar_function(cube, haar.Signature((0,)))


@given(grids(n=2, max_level=3))
def test_constant_has_no_details(grid):
    """Test that constants have vanishing Haar coefficients."""
    system = dyadic.DyadicSystem(grid, (0, 1))

    coeffs = haar.analyze(np.full(grid.shape, 2.5), system)

    assert coeffs.coarse == pytest.approx(2.5)
    assert coeffs.detail_norm_squared == pytest.approx(0.0, abs=1e-20)
    assert coeffs.is_band_limited()


def test_haar_atom_has_one_coefficient():
    """Test that the expansion of a Haar function is a single coefficient."""
    grid = dyadic.TorusGrid(2, 3)
    system = dyadic.DyadicSystem(grid, (2, 0))
    cube = system.cube(1, 2)
    signature = haar.Signature((0, 1))

    coeffs = haar.analyze(haar.haar_function(cube, signature), system)

    assert coeffs[cube, signature] == pytest.approx(1.0)
    assert coeffs.detail_norm_squared == pytest.approx(1.0)
    assert coeffs.coarse == pytest.approx(0.0, abs=1e-12)
    assert coeffs.is_band_limited()


def test_coefficients_reject_foreign_cubes():
    """Test that cubes of another system can't index coefficients."""
    grid = dyadic.TorusGrid(2, 2)
    coeffs = haar.analyze(np.ones(grid.shape), dyadic.DyadicSystem(grid, (0, 0)))
    cube = dyadic.DyadicSystem(grid, (1, 0)).cube(0, 0)

    with pytest.raises(haar.SystemMismatchError):
        coeffs[cube, haar.Signature((0, 0))]  # pylint: disable=pointless-statement


@given(grids(n=2, max_level=3), data())
def test_parseval_in_every_system(grid, draws):
    """Test that the expansion preserves the L2 norm in all 9 systems."""
    values = draws.draw(grid_functions(grid))
    norm = np.sum(values**2) * grid.cell_volume

    for system in dyadic.all_systems(grid):
        coeffs = haar.analyze(values, system)
        total = coeffs.coarse**2 + coeffs.detail_norm_squared
        total += coeffs.remainder_norm_squared
        assert total == pytest.approx(norm)


@given(grids(n=2, max_level=3), data())
def test_synthesis_inverts_analysis(grid, draws):
    """Test that synthesis rebuilds the analyzed function."""
    values = draws.draw(grid_functions(grid))
    system = dyadic.DyadicSystem(grid, (1, 1))

    assert np.allclose(haar.synthesize(haar.analyze(values, system)), values)


@given(systems(n=2, max_level=3), data())
def test_band_limited_functions_have_no_remainder(system, draws):
    """Test that synthesized details leave no cell-scale remainder."""
    values = draws.draw(band_limited_functions(system))

    assert haar.analyze(values, system).is_band_limited(rtol=1e-9)
    assert np.allclose(haar.expectation(values, system, system.grid.L), values)


def test_analyze_rejects_nonfinite_values():
    """Test that NaN values are rejected."""
    grid = dyadic.TorusGrid(1, 2)
    values = np.ones(grid.shape)
    values[3] = np.nan

    with pytest.raises(haar.NonFiniteError):
        haar.analyze(values, dyadic.DyadicSystem(grid, (0,)))


@given(grids(n=2, max_level=3), data())
def test_expectations_are_nested(grid, draws):
    """Test that E_k E_j = E_min(k, j)."""
    values = draws.draw(grid_functions(grid))
    system = dyadic.DyadicSystem(grid, (2, 1))

    for k in range(grid.L + 1):
        for j in range(grid.L + 1):
            nested = haar.expectation(haar.expectation(values, system, j), system, k)
            expected = haar.expectation(values, system, min(k, j))
            assert np.allclose(nested, expected)


def test_expectation_rejects_bad_levels():
    """Test that levels outside [0, L] are rejected."""
    grid = dyadic.TorusGrid(1, 2)

    with pytest.raises(haar.LevelRangeError):
        haar.expectation(np.ones(grid.shape), dyadic.DyadicSystem(grid, (0,)), 3)


@given(grids(n=2, max_level=3), data())
def test_martingale_differences_add_up(grid, draws):
    """Test that the differences of one level sum to E_{k+1} - E_k."""
    values = draws.draw(grid_functions(grid))
    system = dyadic.DyadicSystem(grid, (0, 2))

    for k in range(grid.L):
        total = sum(
            haar.martingale_difference(values, cube) for cube in system.cubes(k)
        )
        expected = haar.expectation(values, system, k + 1)
        expected = expected - haar.expectation(values, system, k)
        assert np.allclose(total, expected)


def test_martingale_difference_on_finest_cube():
    """Test that finest cubes have no martingale difference."""
    grid = dyadic.TorusGrid(1, 1)
    cube = dyadic.DyadicSystem(grid, (0,)).cube(1, 1)

    with pytest.raises(dyadic.MaximalDepthError):
        haar.martingale_difference(np.ones(grid.shape), cube)
