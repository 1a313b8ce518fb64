""" Tests for schattencheck.sequences. """

import math

import numpy as np
import pytest

from hypothesis import given, settings
from hypothesis.strategies import data
from hypothesis.strategies import floats
from hypothesis.strategies import integers

from schattencheck import dyadic
from schattencheck import sequences
from schattencheck.weights import WeightPair
from tests.strategies import cube_sequences, systems
from tests.strategies import sequences as nonnegative_sequences


def _ones(system):
    levels = [np.ones(system.count(k)) for k in range(system.grid.L + 1)]
    return sequences.IndexedSequence.from_levels(system, levels)


def test_rearrange_sorts_descending():
    """Test that rearrangement sorts values in non-increasing order."""
    assert list(sequences.rearrange([1.0, 3.0, 2.0])) == [3.0, 2.0, 1.0]


@given(nonnegative_sequences())
def test_rearrange_preserves_values(values):
    """Test that rearrangement is a non-increasing permutation."""
    ordered = sequences.rearrange(values)

    assert sorted(ordered.tolist()) == sorted(values)
    assert np.all(np.diff(ordered) <= 0)


def test_rearrange_rejects_negative_values():
    """Test that negative values are rejected."""
    with pytest.raises(sequences.NegativeValueError):
        sequences.rearrange([1.0, -1.0])


def test_indexed_sequence_validation():
    """Test that indexed sequences need unique keys and nonnegative values."""
    with pytest.raises(sequences.DuplicateKeyError):
        sequences.IndexedSequence(("a", "a"), np.array([1.0, 2.0]))
    with pytest.raises(sequences.NegativeValueError):
        sequences.IndexedSequence(("a", "b"), np.array([1.0, -2.0]))
    with pytest.raises(sequences.SequenceError):
        sequences.IndexedSequence(("a",), np.array([1.0, 2.0]))


def test_indexed_sequence_from_mapping():
    """Test that mappings keep their insertion order."""
    sequence = sequences.IndexedSequence.from_mapping({"b": 2.0, "a": 1.0})

    assert sequence.keys == ("b", "a")
    assert sequence.as_dict() == {"b": 2.0, "a": 1.0}
    assert list(sequence.scaled(2).values) == [4.0, 2.0]


def test_lorentz_norm_of_the_critical_sequence():
    """Test that k^{-1/n} has weak ℓ^n norm 1."""
    for n in (1, 2, 3):
        values = np.arange(1, 1001, dtype=float) ** (-1 / n)
        assert sequences.lorentz_norm(values, n, math.inf) == pytest.approx(1.0)


def test_lorentz_norm_of_a_short_sequence():
    """Test that the ℓ^{1,1} norm is the plain sum."""
    assert sequences.lorentz_norm([3.0, 1.0, 2.0], 1, 1) == pytest.approx(6.0)


def test_lorentz_norm_matches_lebesgue():
    """Test that ℓ^{p,p} is the ℓ^p norm."""
    values = [3.0, 4.0]

    assert sequences.lorentz_norm(values, 2, 2) == pytest.approx(5.0)


@given(nonnegative_sequences(min_size=1), floats(0.5, 8.0))
def test_lorentz_norms_are_nested(values, p):
    """Test that ℓ^{p,p} dominates ℓ^{p,∞}."""
    strong = sequences.lorentz_norm(values, p, p)
    weak = sequences.lorentz_norm(values, p, math.inf)

    assert weak <= strong * (1 + 1e-9) + 1e-300


def test_lorentz_norm_of_nothing():
    """Test that the empty sequence has norm 0."""
    assert sequences.lorentz_norm([], 2, 2) == 0.0


def test_lorentz_norm_rejects_bad_exponents():
    """Test that nonpositive exponents are rejected."""
    with pytest.raises(sequences.InvalidExponentError):
        sequences.lorentz_norm([1.0], 0, 1)
    with pytest.raises(sequences.InvalidExponentError):
        sequences.lorentz_norm([1.0], 1, -1)


def test_to_levels_needs_every_cube():
    """Test that sequences missing a cube can't be arranged per level."""
    system = dyadic.DyadicSystem(dyadic.TorusGrid(2, 1), (0, 0))
    sequence = sequences.IndexedSequence(((0, 0, 0),), np.array([1.0]))

    with pytest.raises(sequences.MissingKeyError):
        sequence.to_levels(system)


def test_carleson_of_ones():
    """Test that the unit sequence has Carleson averages L - k + 1."""
    grid = dyadic.TorusGrid(2, 3)
    system = dyadic.DyadicSystem(grid, (1, 0))

    for literal in (False, True):
        averaged, norm = sequences.maximal_carleson(
            _ones(system), system, literal=literal
        )
        levels = averaged.to_levels(system)
        for k, table in enumerate(levels):
            assert np.allclose(table, grid.L - k + 1)
        assert norm == pytest.approx(grid.L + 1)


def test_carleson_needs_a_weight():
    """Test that descendant-ν mode needs its weight."""
    system = dyadic.DyadicSystem(dyadic.TorusGrid(2, 1), (0, 0))

    with pytest.raises(sequences.SequenceError):
        sequences.maximal_carleson(_ones(system), system, mode=sequences.DESCENDANT_NU)
    with pytest.raises(sequences.SequenceError):
        sequences.maximal_carleson(_ones(system), system, mode="ancestors")


def test_descendant_carleson_of_ones():
    """Test that descendant averages of ones count levels at the top."""
    grid = dyadic.TorusGrid(2, 2)
    system = dyadic.DyadicSystem(grid, (0, 0))
    nu = WeightPair.unweighted(grid).nu

    averaged, _ = sequences.maximal_carleson(
        _ones(system), system, nu, mode=sequences.DESCENDANT_NU
    )

    assert averaged.to_levels(system)[0].item() == pytest.approx(grid.L + 1)


def test_neighbor_maximal_of_ones():
    """Test that M counts the same-level cubes meeting the enlargement."""
    grid = dyadic.TorusGrid(2, 3)
    system = dyadic.DyadicSystem(grid, (2, 1))

    levels = sequences.maximal_neighbor(_ones(system), system).to_levels(system)

    assert np.allclose(levels[0], 1)
    assert np.allclose(levels[1], 4)
    assert np.allclose(levels[2], 9)
    assert np.allclose(levels[3], 9)


def test_neighbor_maximal_without_enlargement():
    """Test that M without enlargement is the identity."""
    grid = dyadic.TorusGrid(2, 2)
    system = dyadic.DyadicSystem(grid, (0, 0))
    rng = np.random.default_rng(7)
    levels = [rng.random(system.count(k)) for k in range(grid.L + 1)]
    sequence = sequences.IndexedSequence.from_levels(system, levels)

    result = sequences.maximal_neighbor(sequence, system, factor=1.0)

    assert np.allclose(result.values, sequence.values)


def test_logweighted_maximal_of_a_single_term():
    """Test the log-weighted square function of a single finest cube."""
    grid = dyadic.TorusGrid(2, 2)
    system = dyadic.DyadicSystem(grid, (0, 0))
    mu = WeightPair.unweighted(grid).mu
    levels = [np.zeros(system.count(k)) for k in range(grid.L + 1)]
    levels[grid.L][5] = 2.0
    sequence = sequences.IndexedSequence.from_levels(system, levels)

    result = sequences.maximal_logweighted(sequence, system, mu).to_levels(system)

    finest = system.cube(grid.L, 5)
    assert result[grid.L].ravel()[5] == pytest.approx(2.0)
    expected = (grid.L + 1) * 2.0 * math.sqrt(finest.volume)
    assert result[0].item() == pytest.approx(expected)


@given(systems(n=2, max_level=3), data())
def test_literal_carleson_of_a_single_term(system, draws):
    """Test that the literal average of s(P) alone is (L - k + 1) s(P) at P."""
    grid = system.grid
    level = draws.draw(integers(0, grid.L))
    index = draws.draw(integers(0, system.count(level) - 1))
    levels = [np.zeros(system.count(k)) for k in range(grid.L + 1)]
    levels[level][index] = 3.0
    sequence = sequences.IndexedSequence.from_levels(system, levels)

    averaged, sup = sequences.maximal_carleson(sequence, system, literal=True)

    tables = averaged.to_levels(system)
    assert tables[level].ravel()[index] == pytest.approx((grid.L - level + 1) * 3.0)
    assert sup == pytest.approx((grid.L - level + 1) * 3.0)
    assert np.count_nonzero(averaged.values) == 1


def _maximal_functions(system):
    nu = WeightPair.unweighted(system.grid).nu
    return [
        lambda s: sequences.maximal_neighbor(s, system),
        lambda s: sequences.maximal_logweighted(s, system, nu),
        lambda s: sequences.maximal_carleson(s, system)[0],
        lambda s: sequences.maximal_carleson(s, system, literal=True)[0],
        lambda s: sequences.maximal_carleson(
            s, system, nu, mode=sequences.DESCENDANT_NU
        )[0],
    ]


@settings(max_examples=20, deadline=None)
@given(systems(n=2, max_level=3), data())
def test_maximal_functions_are_monotone(system, draws):
    """Test that s <= t implies M(s) <= M(t)."""
    small = draws.draw(cube_sequences(system))
    extra = draws.draw(cube_sequences(system))
    large = sequences.IndexedSequence(small.keys, small.values + extra.values)

    for maximal in _maximal_functions(system):
        assert np.all(maximal(small).values <= maximal(large).values * (1 + 1e-12))


@settings(max_examples=20, deadline=None)
@given(systems(n=2, max_level=3), floats(0, 100), data())
def test_maximal_functions_are_homogeneous(system, scale, draws):
    """Test that M(cs) = c M(s)."""
    sequence = draws.draw(cube_sequences(system))
    scaled = sequences.IndexedSequence(sequence.keys, scale * sequence.values)

    for maximal in _maximal_functions(system):
        expected = scale * maximal(sequence).values
        assert np.allclose(maximal(scaled).values, expected, rtol=1e-9, atol=1e-12)
