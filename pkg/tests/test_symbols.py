""" Tests for schattencheck.symbols. """

import numpy as np
import pytest

from hypothesis import given
from hypothesis.strategies import integers

from schattencheck import dyadic
from schattencheck import haar
from schattencheck import symbols
from tests.strategies import grids


@given(integers(1, 3))
def test_default_symbols_sample(n):
    """Test that the default families sample on coarse grids."""
    grid = dyadic.TorusGrid(n, 2)
    families = (
        symbols.default_symbols(n),
        symbols.default_critical_symbols(n),
        symbols.default_weak_symbols(n),
    )

    for family in families:
        assert len({symbol.id for symbol in family}) == len(family)
        for symbol in family:
            values = symbol.sample(grid)
            assert values.shape == grid.shape
            assert np.all(np.isfinite(values))


def test_default_center_is_a_lattice_point():
    """Test that the default center sits on the cell lattice of every grid."""
    for level in range(1, 6):
        grid = dyadic.TorusGrid(2, level)
        for coordinate in symbols.default_center(2):
            scaled = coordinate * grid.N
            assert scaled == pytest.approx(round(scaled))


def test_haar_atom_samples_a_haar_function():
    """Test that a Haar atom is the Haar function of its cube."""
    grid = dyadic.TorusGrid(2, 3)
    atom = symbols.HaarAtom("atom", 1, (1, 0), 2, (1 / 3, 0.0))
    cube = dyadic.DyadicSystem(grid, (1, 0)).cube(1, (1, 0))

    expected = haar.haar_function(cube, haar.Signature.from_position(2, 2))

    assert np.array_equal(atom.sample(grid), expected)


def test_haar_atom_needs_a_fine_grid():
    """Test that atoms at the finest level can't be sampled."""
    atom = symbols.HaarAtom("atom", 2, (0, 0), 0, (0.0, 0.0))

    with pytest.raises(symbols.UnsampleableSymbolError):
        atom.sample(dyadic.TorusGrid(2, 2))
    with pytest.raises(symbols.UnsampleableSymbolError):
        atom.sample(dyadic.TorusGrid(1, 4))


def test_haar_atom_rejects_flat_signatures():
    """Test that the flat signature isn't a valid atom."""
    atom = symbols.HaarAtom("atom", 0, (0, 0), 3, (0.0, 0.0))

    with pytest.raises(symbols.InvalidSymbolError):
        atom.sample(dyadic.TorusGrid(2, 2))


@given(grids(n=2, max_level=4))
def test_haar_polynomial_is_band_limited(grid):
    """Test that Haar polynomials have mean zero and no remainder."""
    values = symbols.HaarPolynomial("poly", 3, 0.5, 4).sample(grid)
    coeffs = haar.analyze(values, dyadic.DyadicSystem(grid, (0, 0)))

    assert coeffs.coarse == pytest.approx(0.0, abs=1e-12)
    assert coeffs.is_band_limited(rtol=1e-9)


def test_haar_polynomial_is_reproducible():
    """Test that a seed fixes the Haar polynomial."""
    grid = dyadic.TorusGrid(2, 3)
    first = symbols.HaarPolynomial("poly", 2, 0.5, 9).sample(grid)
    second = symbols.HaarPolynomial("poly", 2, 0.5, 9).sample(grid)

    assert np.array_equal(first, second)


def test_bump_profile():
    """Test that the bump peaks at its center and vanishes far away."""
    grid = dyadic.TorusGrid(1, 4)
    values = symbols.Bump("bump", (0.5,), 0.35).sample(grid)

    assert values.argmax() in (grid.N // 2 - 1, grid.N // 2)
    assert values[0] == 0.0
    assert values.max() <= np.exp(-1)


def test_cone_is_lipschitz():
    """Test that the cone decreases linearly away from its center."""
    grid = dyadic.TorusGrid(1, 4)
    values = symbols.Cone("cone", (0.5,), 0.35).sample(grid)

    steps = np.abs(np.diff(values))

    assert steps.max() <= grid.h / 0.35 + 1e-12
    assert values[0] == 0.0


def test_bump_rejects_bad_radii():
    """Test that radii outside (0, 1/2] are rejected."""
    with pytest.raises(symbols.InvalidSymbolError):
        symbols.Bump("bump", (0.5,), 0.75).sample(dyadic.TorusGrid(1, 2))


def test_mollified_indicator_keeps_the_volume():
    """Test that mollification keeps the volume of the box."""
    grid = dyadic.TorusGrid(2, 4)
    symbol = symbols.MollifiedIndicator("box", (0.25, 0.25), (0.625, 0.5), 0.05)

    values = symbol.sample(grid)

    assert values.mean() == pytest.approx(0.375 * 0.25)
    assert values.min() >= -1e-12
    assert values.max() <= 1 + 1e-12


def test_mollified_indicator_rejects_large_scales():
    """Test that smoothing scales outside (0, 1/4) are rejected."""
    symbol = symbols.MollifiedIndicator("box", (0.25,), (0.5,), 0.3)

    with pytest.raises(symbols.InvalidSymbolError):
        symbol.sample(dyadic.TorusGrid(1, 2))


def test_sampled_symbol_must_fit():
    """Test that explicit samples need one value per cell."""
    grid = dyadic.TorusGrid(1, 1)

    assert symbols.SampledSymbol("s", tuple(range(6))).sample(grid)[5] == 5.0
    with pytest.raises(symbols.UnsampleableSymbolError):
        symbols.SampledSymbol("s", (1.0,)).sample(grid)


def test_parse_symbol_round_trips_defaults():
    """Test that every default symbol survives its JSON representation."""
    for symbol in symbols.default_symbols(2):
        assert symbols.parse_symbol(symbol.to_dict()) == symbol


def test_parse_symbol_rejects_malformed_specs():
    """Test that malformed symbol specs are rejected."""
    with pytest.raises(symbols.InvalidSymbolError):
        symbols.parse_symbol({"id": "x", "kind": "wavelet"})
    with pytest.raises(symbols.InvalidSymbolError):
        symbols.parse_symbol({"id": "x", "kind": "constant", "alpha": 1})
    with pytest.raises(symbols.InvalidSymbolError):
        symbols.parse_symbol({"id": "x", "kind": "bump"})
    with pytest.raises(symbols.InvalidSymbolError):
        symbols.parse_symbol({"kind": "constant"})
