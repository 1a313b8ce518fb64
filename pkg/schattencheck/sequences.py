""" Cube-indexed sequences, Lorentz norms and maximal sequence operators. """

from __future__ import annotations

import dataclasses
import math
from typing import Hashable, Mapping, Sequence

import numpy as np

from schattencheck.dyadic import DyadicSystem, enlarge
from schattencheck.weights import Weight


DESCENDANT_NU = "descendant-nu"
LEBESGUE = "lebesgue"


class SequenceError(Exception):
    """Common base class for exceptions related to sequences."""


class NegativeValueError(SequenceError):
    """A sequence value is negative."""


class DuplicateKeyError(SequenceError):
    """A key appears more than once."""


class MissingKeyError(SequenceError):
    """The sequence doesn't cover every cube of the system."""


class InvalidExponentError(SequenceError):
    """The Lorentz exponents are out of range."""


@dataclasses.dataclass(frozen=True, eq=False)
class IndexedSequence:
    """
    A nonnegative sequence indexed by unique keys.

    Args:
        keys: The keys, usually cube keys (omega-index, level, flat index).
        values: The values, one per key.
    """

    keys: tuple[Hashable, ...]
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float).ravel()
        keys = tuple(self.keys)
        if len(keys) != values.size:
            raise SequenceError("keys and values differ in length")
        if np.any(values < 0):
            raise NegativeValueError("sequence values must be nonnegative")
        if len(set(keys)) != len(keys):
            raise DuplicateKeyError("sequence keys must be unique")
        values.setflags(write=False)
        object.__setattr__(self, "keys", keys)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_mapping(cls, mapping: Mapping[Hashable, float]) -> IndexedSequence:
        """Build a sequence from a key-value mapping, in insertion order."""
        return cls(tuple(mapping), np.fromiter(mapping.values(), dtype=float))

    @classmethod
    def from_levels(
        cls, system: DyadicSystem, levels: Sequence[np.ndarray]
    ) -> IndexedSequence:
        """Build a sequence from per-level arrays ordered by flat index."""
        keys = tuple(
            (system.omega_index, level, flat)
            for level, table in enumerate(levels)
            for flat in range(np.asarray(table).size)
        )
        values = np.concatenate(
            [np.asarray(table, dtype=float).ravel() for table in levels]
        )
        return cls(keys, values)

    def __len__(self) -> int:
        return len(self.keys)

    def as_dict(self) -> dict[Hashable, float]:
        """Key-value mapping of self."""
        return dict(zip(self.keys, self.values.tolist()))

    def scaled(self, factor: float) -> IndexedSequence:
        """A copy of self with every value multiplied by factor."""
        return IndexedSequence(self.keys, self.values * factor)

    def to_levels(self, system: DyadicSystem) -> list[np.ndarray]:
        """
        Arrange the values of a system-indexed sequence per level.

        Args:
            system: The system whose cubes index the sequence.

        Returns:
            One array of shape (2^k,)*n per level.

        Raises:
            MissingKeyError: If a cube of the system has no value.
        """
        lookup = self.as_dict()
        levels = []
        for level in range(system.grid.L + 1):
            table = np.empty(system.count(level))
            for flat in range(table.size):
                try:
                    table[flat] = lookup[(system.omega_index, level, flat)]
                except KeyError as exc:
                    raise MissingKeyError(
                        f"{(system.omega_index, level, flat)!r}: missing cube"
                    ) from exc
            levels.append(table.reshape((2**level,) * system.grid.n))
        return levels


def rearrange(sequence: IndexedSequence | Sequence[float] | np.ndarray) -> np.ndarray:
    """
    Non-increasing rearrangement of a sequence.

    Ties keep their key order.

    Raises:
        NegativeValueError: If a value is negative.
    """
    values = _values(sequence)
    return values[np.argsort(-values, kind="stable")]


def _values(sequence: IndexedSequence | Sequence[float] | np.ndarray) -> np.ndarray:
    if isinstance(sequence, IndexedSequence):
        return sequence.values
    values = np.asarray(sequence, dtype=float).ravel()
    if np.any(values < 0):
        raise NegativeValueError("sequence values must be nonnegative")
    return values


def lorentz_norm(
    sequence: IndexedSequence | Sequence[float] | np.ndarray, p: float, q: float
) -> float:
    """
    The Lorentz ℓ^{p,q} norm of a sequence.

    Args:
        sequence: The sequence.
        p: The primary exponent, p > 0.
        q: The secondary exponent, q > 0 or math.inf.

    Returns:
        (Σ_k (a_k*)^q k^{q/p-1})^{1/q}, or sup_k k^{1/p} a_k* for q = ∞,
        with a* the non-increasing rearrangement.

    Raises:
        InvalidExponentError: If an exponent is out of range.
    """
    if not p > 0:
        raise InvalidExponentError(f"{p!r}: p must be positive")
    if not q > 0:
        raise InvalidExponentError(f"{q!r}: q must be positive or infinite")

    ordered = rearrange(sequence)
    if not ordered.size:
        return 0.0
    ranks = np.arange(1, ordered.size + 1, dtype=float)
    if math.isinf(q):
        return float(np.max(ranks ** (1 / p) * ordered))
    if q == p:
        return float(np.sum(ordered**p) ** (1 / p))
    return float(np.sum(ordered**q * ranks ** (q / p - 1)) ** (1 / q))


def _axis_contact(
    system: DyadicSystem,
    outer: int,
    inner: int,
    axis: int,
    factor: float,
    contain: bool,
) -> np.ndarray:
    """
    Per-axis incidence of level-`inner` cubes with enlarged level-`outer` cubes.

    Returns:
        A (2^outer, 2^inner) 0/1 array: hit when the arcs meet, or when
        the inner arc sits inside the enlarged one if contain is set.
    """
    grid = system.grid
    windows = []
    for m in range(2**outer):
        index = [0] * grid.n
        index[axis] = m
        windows.append(enlarge(system.cube(outer, index), factor).arcs[axis])

    starts = np.array([start for start, _ in windows])[:, None]
    lengths = np.array([length for _, length in windows])[:, None]
    anchors = system.axis_anchors(inner, axis)[None, :]
    size = grid.side_cells(inner)
    if contain:
        inside = (anchors - starts) % grid.N + size <= lengths
        return np.where(lengths >= grid.N, True, inside).astype(float)
    meets = (anchors - starts) % grid.N < lengths
    meets |= (starts - anchors) % grid.N < size
    return meets.astype(float)


def _contract(factors: Sequence[np.ndarray], table: np.ndarray) -> np.ndarray:
    """Apply a per-axis matrix along every axis of a level table."""
    result = table
    for axis, factor in enumerate(factors):
        result = np.moveaxis(np.tensordot(factor, result, axes=([1], [axis])), 0, axis)
    return result


def maximal_neighbor(
    sequence: IndexedSequence, system: DyadicSystem, factor: float = 3.0
) -> IndexedSequence:
    """
    M(s)(Q) = Σ s(P) over same-level P meeting the enlargement cQ.

    Raises:
        MissingKeyError: If the sequence doesn't cover the system.
    """
    levels = sequence.to_levels(system)
    output = []
    for level, table in enumerate(levels):
        factors = [
            _axis_contact(system, level, level, axis, factor, contain=False)
            for axis in range(system.grid.n)
        ]
        output.append(_contract(factors, table))
    return IndexedSequence.from_levels(system, output)


def maximal_logweighted(
    sequence: IndexedSequence, system: DyadicSystem, mu: Weight, factor: float = 3.0
) -> IndexedSequence:
    """
    The log-weighted square function M̃.

    M̃(s)(Q) = [μ(Q)^{-1} Σ μ(P)(log2(ℓ(Q)/ℓ(P)) + 1)² s(P)²]^{1/2}, the
    sum running over P no larger than Q and meeting cQ.

    Raises:
        MissingKeyError: If the sequence doesn't cover the system.
    """
    levels = sequence.to_levels(system)
    grid = system.grid
    masses = [
        mu.cube_masses(system, k).reshape(table.shape) for k, table in enumerate(levels)
    ]

    output = []
    for level in range(grid.L + 1):
        total = np.zeros(levels[level].shape)
        for finer in range(level, grid.L + 1):
            factors = [
                _axis_contact(system, level, finer, axis, factor, contain=False)
                for axis in range(grid.n)
            ]
            weight = (finer - level + 1) ** 2
            total += weight * _contract(factors, masses[finer] * levels[finer] ** 2)
        output.append(np.sqrt(total / masses[level]))
    return IndexedSequence.from_levels(system, output)


def maximal_carleson(
    sequence: IndexedSequence,
    system: DyadicSystem,
    weight: Weight | None = None,
    mode: str = LEBESGUE,
    factor: float = 3.0,
    literal: bool = False,
) -> tuple[IndexedSequence, float]:
    """
    Carleson-type averages of a cube sequence.

    In descendant-ν mode, ν(Q)^{-1} Σ ν(P)s(P) over P ⊂ cQ no larger than
    Q. In Lebesgue mode, |P|^{-1} Σ_{R⊂P} s(R)|R| over the descendants R
    of P, P included; with literal set, the summand is s(P)|R| instead.

    Args:
        sequence: The sequence over the cubes of one system.
        system: The system.
        weight: The weight ν of descendant-ν mode.
        mode: Either "descendant-nu" or "lebesgue".
        factor: The enlargement factor of descendant-ν mode.
        literal: Use the P-indexed summand in Lebesgue mode.

    Returns:
        The averaged sequence and its supremum, the CMd norm in Lebesgue
        mode.

    Raises:
        MissingKeyError: If the sequence doesn't cover the system.
        SequenceError: If the mode is unknown or lacks its weight.
    """
    levels = [table.ravel() for table in sequence.to_levels(system)]
    grid = system.grid

    if mode == LEBESGUE:
        if literal:
            output = [(grid.L - k + 1) * table for k, table in enumerate(levels)]
        else:
            volumes = [2.0 ** (-k * grid.n) for k in range(grid.L + 1)]
            accumulated = levels[grid.L] * volumes[grid.L]
            output = [accumulated / volumes[grid.L]]
            for k in range(grid.L - 1, -1, -1):
                below = accumulated[system.child_table(k)].sum(axis=1)
                accumulated = levels[k] * volumes[k] + below
                output.insert(0, accumulated / volumes[k])
    elif mode == DESCENDANT_NU:
        if weight is None:
            raise SequenceError("descendant-nu mode needs a weight")
        shapes = [(2**k,) * grid.n for k in range(grid.L + 1)]
        masses = [weight.cube_masses(system, k) for k in range(grid.L + 1)]
        output = []
        for level in range(grid.L + 1):
            total = np.zeros(shapes[level])
            for finer in range(level, grid.L + 1):
                factors = [
                    _axis_contact(system, level, finer, axis, factor, contain=True)
                    for axis in range(grid.n)
                ]
                weighted = (masses[finer] * levels[finer]).reshape(shapes[finer])
                total += _contract(factors, weighted)
            output.append(total.ravel() / masses[level])
    else:
        raise SequenceError(f"{mode!r}: unknown Carleson mode")

    result = IndexedSequence.from_levels(system, output)
    return result, float(np.max(result.values))
