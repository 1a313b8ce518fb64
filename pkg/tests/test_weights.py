""" Tests for schattencheck.weights. """

import itertools

import numpy as np
import pytest

from hypothesis import given, settings
from hypothesis.strategies import data
from hypothesis.strategies import floats
from hypothesis.strategies import sampled_from

from schattencheck import dyadic
from schattencheck import weights
from tests.strategies import grids, positive_weights, shifts


@given(grids(n=2, max_level=3))
def test_constant_weight_mass(grid):
    """Test that the unit weight has unit mass."""
    weight = weights.make_weight(grid, weights.WeightSpec("constant"))

    assert weight.total == pytest.approx(1.0)
    assert weights.mass(weight, dyadic.Region.whole(grid)) == pytest.approx(1.0)


def test_power_zero_is_constant():
    """Test that a power weight of exponent 0 is identically 1."""
    grid = dyadic.TorusGrid(2, 2)
    spec = weights.WeightSpec("power", alpha=0.0, center=(1 / 3, 1 / 6))

    assert np.allclose(weights.make_weight(grid, spec).values, 1.0)


def test_power_rejects_large_exponents():
    """Test that non-integrable power exponents are rejected."""
    grid = dyadic.TorusGrid(2, 2)
    spec = weights.WeightSpec("power", alpha=2.0, center=(1 / 3, 1 / 6))

    with pytest.raises(weights.InvalidExponentError):
        weights.make_weight(grid, spec)


def test_power_rejects_off_lattice_centers():
    """Test that power weights need a lattice singular point."""
    grid = dyadic.TorusGrid(2, 2)
    spec = weights.WeightSpec("power", alpha=0.5, center=(0.01, 0.5))

    with pytest.raises(weights.InvalidWeightSpecError):
        weights.make_weight(grid, spec)


def test_power_weight_is_radial():
    """Test that a power weight grows away from its singular point."""
    grid = dyadic.TorusGrid(1, 3)
    spec = weights.WeightSpec("power", alpha=0.5, center=(0.5,))

    values = weights.make_weight(grid, spec).values

    assert values[0] > values[grid.N // 2]
    assert values[grid.N // 2 - 1] == pytest.approx(values[grid.N // 2])


def test_constant_rejects_nonpositive_values():
    """Test that nonpositive constants are rejected."""
    grid = dyadic.TorusGrid(1, 2)

    with pytest.raises(weights.NonPositiveWeightError):
        weights.make_weight(grid, weights.WeightSpec("constant", value=0.0))


def test_samples_must_match_the_grid():
    """Test that sampled weights need one value per cell."""
    grid = dyadic.TorusGrid(1, 1)
    spec = weights.WeightSpec("samples", samples=(1.0, 2.0))

    with pytest.raises(weights.InvalidWeightSpecError):
        weights.make_weight(grid, spec)


def test_weight_spec_from_dict():
    """Test that weight specs are parsed from their JSON representation."""
    spec = weights.WeightSpec.from_dict(
        {"kind": "power", "alpha": 0.5, "center": [0.25, 0.5]}
    )

    assert spec == weights.WeightSpec("power", alpha=0.5, center=(0.25, 0.5))
    assert weights.WeightSpec.from_dict(spec.to_dict()) == spec


def test_weight_spec_from_bad_dict():
    """Test that malformed weight specs are rejected."""
    with pytest.raises(weights.InvalidWeightSpecError):
        weights.WeightSpec.from_dict({"kind": "gaussian"})
    with pytest.raises(weights.InvalidWeightSpecError):
        weights.WeightSpec.from_dict({"kind": "constant", "alpha": 1.0})
    with pytest.raises(weights.InvalidWeightSpecError):
        weights.WeightSpec.from_dict({"kind": "power", "alpha": 0.5})


def test_weight_rejects_nonpositive_values():
    """Test that weights must be strictly positive."""
    grid = dyadic.TorusGrid(1, 1)

    with pytest.raises(weights.NonPositiveWeightError):
        weights.Weight(grid, np.array([1.0, 1.0, 0.0, 1.0, 1.0, 1.0]))


@given(grids(n=2, max_level=2).flatmap(positive_weights))
def test_box_mass_matches_sums(weight):
    """Test that prefix-sum masses agree with direct sums."""
    grid = weight.grid
    region = dyadic.Region.from_arcs(grid, [(grid.N - 2, 5), (1, 3)])

    expected = weight.values[region.mask()].sum() * grid.cell_volume

    assert weights.mass(weight, region) == pytest.approx(expected)


def test_nu_of_constants():
    """Test that μ = 4 and λ = 1 yield ν = 2."""
    grid = dyadic.TorusGrid(2, 1)
    pair = weights.WeightPair(
        weights.make_weight(grid, weights.WeightSpec("constant", value=4.0), "mu"),
        weights.make_weight(grid, weights.WeightSpec("constant", value=1.0), "lam"),
    )

    assert np.allclose(pair.nu.values, 2.0)
    assert pair.nu.tag == "nu"
    assert pair.mu_inv.tag == "mu^-1"


@given(grids(n=2, max_level=2), data())
def test_nu_balances_the_pair(grid, draws):
    """Test that ν² λ = μ."""
    mu = draws.draw(positive_weights(grid))
    lam = draws.draw(positive_weights(grid))

    nu = weights.nu_from(mu, lam)

    assert np.allclose(nu.values**2 * lam.values, mu.values)


def test_pair_rejects_mixed_grids():
    """Test that pairs need both weights on one grid."""
    spec = weights.WeightSpec("constant")

    with pytest.raises(weights.GridMismatchError):
        weights.WeightPair(
            weights.make_weight(dyadic.TorusGrid(2, 1), spec),
            weights.make_weight(dyadic.TorusGrid(2, 2), spec),
        )


def test_a2_of_constant():
    """Test that constants have A2 characteristic 1."""
    grid = dyadic.TorusGrid(2, 2)
    weight = weights.make_weight(grid, weights.WeightSpec("constant", value=7.0))

    assert weights.a2_constant(weight) == pytest.approx(1.0)
    assert weights.a2_constant(weight, weights.ALL_BOXES) == pytest.approx(1.0)


@settings(max_examples=20, deadline=None)
@given(grids(n=2, max_level=2).flatmap(positive_weights))
def test_a2_is_at_least_one(weight):
    """Test that A2 characteristics never drop below 1."""
    dyadic_a2 = weights.a2_constant(weight)
    boxes_a2 = weights.a2_constant(weight, weights.ALL_BOXES)

    assert dyadic_a2 >= 1.0
    # Every shifted dyadic cube is a cell-aligned box.
    assert boxes_a2 >= dyadic_a2 - 1e-9


def test_a2_rejects_unknown_scopes():
    """Test that unknown A2 scopes are rejected."""
    grid = dyadic.TorusGrid(1, 1)

    with pytest.raises(weights.WeightError):
        weights.a2_constant(weights.WeightPair.unweighted(grid).mu, "balls")


def test_power_weight_a2_is_finite():
    """Test that power weights in range are A2 weights of moderate size."""
    grid = dyadic.TorusGrid(2, 3)
    spec = weights.WeightSpec("power", alpha=1.0, center=(1 / 3, 1 / 6))

    a2 = weights.a2_constant(weights.make_weight(grid, spec))

    assert 1.0 < a2 < 100.0


def test_reverse_holder_of_constant():
    """Test that the unit weight has reverse-Hölder constant 1."""
    grid = dyadic.TorusGrid(2, 2)
    weight = weights.WeightPair.unweighted(grid).mu

    assert weights.reverse_holder_constant(weight, 0.5) == pytest.approx(1.0)
    assert weights.reverse_holder_exponent(weight, [0.1, 0.5, 1.0]) == (1.0, 1.0)


def test_reverse_holder_rejects_bad_candidates():
    """Test that reverse-Hölder candidates must be positive and sorted."""
    grid = dyadic.TorusGrid(1, 1)
    weight = weights.WeightPair.unweighted(grid).mu

    with pytest.raises(weights.WeightError):
        weights.reverse_holder_exponent(weight, [])
    with pytest.raises(weights.WeightError):
        weights.reverse_holder_exponent(weight, [0.5, 0.1])


def test_doubling_of_constant():
    """Test that doubling a small cube quadruples its unit mass."""
    grid = dyadic.TorusGrid(2, 3)
    weight = weights.WeightPair.unweighted(grid).mu
    cube = dyadic.DyadicSystem(grid, (0, 0)).cube(2, 5)

    assert weights.doubling_ratio(weight, cube, 2) == pytest.approx(4.0)
    assert weights.doubling_ratio(weight, cube, 1) == pytest.approx(1.0)


def test_mass_rejects_foreign_regions():
    """Test that masses of regions on other grids are rejected."""
    weight = weights.WeightPair.unweighted(dyadic.TorusGrid(1, 1)).mu

    with pytest.raises(weights.GridMismatchError):
        weights.mass(weight, dyadic.Region.whole(dyadic.TorusGrid(1, 2)))


def _power(grid, alpha):
    spec = weights.WeightSpec("power", alpha=alpha, center=(1 / 3, 1 / 6))
    return weights.make_weight(grid, spec)


def _cube_constant(weight, sigma):
    best = 1.0
    for system in dyadic.all_systems(weight.grid):
        for cube in system.cubes():
            cells = weight.values[cube.mask()]
            lifted = np.mean(cells ** (1 + sigma)) ** (1 / (1 + sigma))
            best = max(best, lifted / np.mean(cells))
    return best


@settings(max_examples=10, deadline=None)
@given(sampled_from([-1.5, -0.5, 0.5, 1.5]), sampled_from([0.1, 0.5, 1.0]))
def test_reverse_holder_of_power_weights(alpha, sigma):
    """Test that reverse-Hölder constants match a cube-by-cube computation."""
    weight = _power(dyadic.TorusGrid(2, 2), alpha)

    constant = weights.reverse_holder_constant(weight, sigma)

    assert constant == pytest.approx(_cube_constant(weight, sigma))


def test_reverse_holder_exponent_of_a_power_weight():
    """Test that the chosen exponent is the largest one within the bound."""
    weight = _power(dyadic.TorusGrid(2, 2), 1.5)
    sigmas = [0.05, 0.1, 0.25, 0.5, 1.0]
    passing = [s for s in sigmas if _cube_constant(weight, s) <= 2.0 * (1 - 1e-9)]

    sigma, constant = weights.reverse_holder_exponent(weight, sigmas)

    assert passing
    assert sigma == passing[-1]
    assert constant == pytest.approx(_cube_constant(weight, sigma))


@settings(max_examples=20, deadline=None)
@given(grids(n=2, min_level=2, max_level=3).flatmap(positive_weights), data())
def test_doubling_is_bounded_by_a2(weight, draws):
    """Test that w(cQ) <= [w]_A2 (|cQ| / |Q|)^2 w(Q)."""
    grid = weight.grid
    system = dyadic.DyadicSystem(grid, draws.draw(shifts(2)))
    factor = draws.draw(sampled_from([2, 3]))
    a2 = weights.a2_constant(weight, weights.ALL_BOXES)

    for cube in system.cubes():
        growth = dyadic.enlarge(cube, factor).measure / cube.volume
        ratio = weights.doubling_ratio(weight, cube, factor)
        assert 1.0 - 1e-12 <= ratio <= a2 * growth**2 * (1 + 1e-9)
        if factor == 3:
            assert growth <= factor**grid.n * (1 + 1e-12)


def test_a2_of_a_checkerboard():
    """Test that the all-boxes A2 characteristic matches box enumeration."""
    grid = dyadic.TorusGrid(2, 1)
    parity = np.add.outer(np.arange(grid.N), np.arange(grid.N)) % 2
    weight = weights.Weight(grid, np.where(parity, 5.0, 1.0))

    best = 1.0
    for side in range(1, grid.N + 1):
        for start in itertools.product(range(grid.N), repeat=2):
            region = dyadic.Region.from_arcs(grid, [(s, side) for s in start])
            cells = weight.values[region.mask()]
            best = max(best, np.mean(cells) * np.mean(1 / cells))

    assert weights.a2_constant(weight, weights.ALL_BOXES) == pytest.approx(best)
    # Boxes holding as many cells of either value reach 3 · 3/5.
    assert best == pytest.approx(9 / 5)


@settings(max_examples=20, deadline=None)
@given(
    sampled_from([-1.5, -0.5, 0.5, 1.0, 1.5]),
    floats(0.1, 1.0),
    sampled_from([weights.DYADIC_ALL_SHIFTS, weights.ALL_BOXES]),
)
def test_powers_of_a2_weights(alpha, delta, scope):
    """Test that [w^δ]_A2 <= [w]_A2^δ for power weights."""
    weight = _power(dyadic.TorusGrid(2, 2), alpha)

    lowered = weights.a2_constant(weight.power(delta), scope)

    assert lowered <= weights.a2_constant(weight, scope) ** delta * (1 + 1e-9)
