""" Periodic grids, regions and shifted dyadic systems. """

from __future__ import annotations

import dataclasses
import functools
import itertools
import math
from typing import Iterator, Sequence

import numpy as np


SHIFT_THIRDS = (0, 1, 2)


class DyadicError(Exception):
    """Common base class for exceptions related to dyadic systems."""


class InvalidGridError(DyadicError):
    """The grid parameters or the shape of a grid function are invalid."""


class InvalidShiftError(DyadicError):
    """A shift component is not one of 0, 1/3 or 2/3."""


class MaximalDepthError(DyadicError):
    """The cube sits at the finest level and has no children."""


class InvalidFactorError(DyadicError):
    """The enlargement factor is smaller than one."""


class InvalidRegionError(DyadicError):
    """The region's boxes are malformed, overlapping or too large."""


class EmptyRegionError(DyadicError):
    """The region contains no cells."""


class SeparationError(DyadicError):
    """The level is too coarse to host the Whitney separation window."""


Box = tuple[tuple[int, int], ...]


@dataclasses.dataclass(frozen=True)
class TorusGrid:
    """
    A periodic grid on the unit torus.

    Every axis holds N = 3·2^L cells, so the 1/3-shifted dyadic cubes of
    every level up to L have anchors on the cell lattice.

    Args:
        n: The dimension.
        L: The dyadic depth.
    """

    n: int
    L: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise InvalidGridError(f"{self.n!r}: dimension must be at least 1")
        if self.L < 1:
            raise InvalidGridError(f"{self.L!r}: depth must be at least 1")

    @property
    def N(self) -> int:  # pylint: disable=invalid-name
        """Cells per axis."""
        return 3 * 2**self.L

    @property
    def h(self) -> float:
        """Cell width."""
        return 1 / self.N

    @property
    def shape(self) -> tuple[int, ...]:
        """Shape of a grid function."""
        return (self.N,) * self.n

    @property
    def size(self) -> int:
        """Total amount of cells."""
        return self.N**self.n

    @property
    def cell_volume(self) -> float:
        """Volume of a single cell."""
        return self.h**self.n

    def side_cells(self, level: int) -> int:
        """
        Side length, in cells, of a cube of a given level.

        Args:
            level: The dyadic level, between 0 and L.

        Returns:
            The side length in cells.
        """
        return 3 * 2 ** (self.L - level)

    def axis_centers(self) -> np.ndarray:
        """Cell-center coordinates along one axis."""
        return (np.arange(self.N) + 0.5) / self.N

    def conform(self, values: Sequence | np.ndarray) -> np.ndarray:
        """
        Coerce data into a grid function.

        Args:
            values: Either an array of the grid's shape or a flat array
                of size N^n in row-major order.

        Returns:
            A float array of the grid's shape.

        Raises:
            InvalidGridError: If the data can't be shaped as a grid
                function.
        """
        array = np.asarray(values, dtype=float)
        if array.shape == self.shape:
            return array
        if array.ndim == 1 and array.size == self.size:
            return array.reshape(self.shape)
        raise InvalidGridError(
            f"{array.shape!r}: expected a grid function of shape {self.shape!r}"
        )

    def wrap(self, delta: np.ndarray) -> np.ndarray:
        """
        Map integer cell displacements to their torus-minimal
        representative in [-N/2, N/2).
        """
        return (np.asarray(delta) + self.N // 2) % self.N - self.N // 2


def _axis_intervals(start: int, length: int, size: int) -> list[tuple[int, int]]:
    start %= size
    if start + length <= size:
        return [(start, start + length)]
    return [(start, size), (0, start + length - size)]


@dataclasses.dataclass(frozen=True)
class Region:
    """
    A cell-aligned subset of the torus made of disjoint half-open boxes.

    Args:
        grid: The grid the region lives on.
        boxes: Boxes as per-axis (start, stop) cell ranges.
        arcs: Per-axis (start, length) arcs, set when the region is a
            single wrapped box.
    """

    grid: TorusGrid
    boxes: tuple[Box, ...]
    arcs: tuple[tuple[int, int], ...] | None = None

    def __post_init__(self) -> None:
        for box in self.boxes:
            if len(box) != self.grid.n:
                raise InvalidRegionError(f"{box!r}: wrong amount of axes")
            for start, stop in box:
                if not 0 <= start < stop <= self.grid.N:
                    raise InvalidRegionError(f"{box!r}: box is not cell-aligned")
        if self.arcs is None and len(self.boxes) > 1:
            if int(self.mask().sum()) != sum(_box_cells(box) for box in self.boxes):
                raise InvalidRegionError("boxes overlap")

    @classmethod
    def from_arcs(cls, grid: TorusGrid, arcs: Sequence[tuple[int, int]]) -> Region:
        """
        Build a wrapped box from per-axis arcs.

        Args:
            grid: The grid the region lives on.
            arcs: Per-axis (start, length) pairs, with 0 <= length <= N.

        Returns:
            The region covered by the product of the arcs.
        """
        arcs = tuple((int(start) % grid.N, int(length)) for start, length in arcs)
        if len(arcs) != grid.n:
            raise InvalidRegionError(f"{arcs!r}: wrong amount of axes")
        if any(not 0 <= length <= grid.N for _, length in arcs):
            raise InvalidRegionError(f"{arcs!r}: arc longer than the torus")
        if any(length == 0 for _, length in arcs):
            return cls(grid, ())

        per_axis = [_axis_intervals(start, length, grid.N) for start, length in arcs]
        boxes = tuple(itertools.product(*per_axis))
        return cls(grid, boxes, arcs)

    @classmethod
    def from_cells(
        cls, grid: TorusGrid, lower: Sequence[int], upper: Sequence[int]
    ) -> Region:
        """Build the wrapped box spanning cells [lower, upper) per axis."""
        return cls.from_arcs(grid, [(lo, hi - lo) for lo, hi in zip(lower, upper)])

    @classmethod
    def whole(cls, grid: TorusGrid) -> Region:
        """The whole torus."""
        return cls.from_arcs(grid, [(0, grid.N)] * grid.n)

    @property
    def cell_count(self) -> int:
        """Amount of cells in the region."""
        return sum(_box_cells(box) for box in self.boxes)

    @property
    def measure(self) -> float:
        """Lebesgue measure of the region."""
        return self.cell_count * self.grid.cell_volume

    @property
    def is_empty(self) -> bool:
        """Whether the region contains no cells."""
        return not self.boxes

    def mask(self) -> np.ndarray:
        """Boolean grid function of the region."""
        mask = np.zeros(self.grid.shape, dtype=bool)
        for box in self.boxes:
            mask[tuple(slice(start, stop) for start, stop in box)] = True
        return mask

    def axis_indices(self) -> list[np.ndarray]:
        """
        Per-axis cell indices of a wrapped box.

        Raises:
            InvalidRegionError: If the region isn't a single wrapped box.
        """
        if self.arcs is None:
            raise InvalidRegionError("region is not a single wrapped box")
        return [
            (start + np.arange(length)) % self.grid.N for start, length in self.arcs
        ]

    def select(self, values: np.ndarray) -> np.ndarray:
        """
        Extract the values of a grid function on the region.

        Args:
            values: A grid function.

        Returns:
            A flat array of the values inside the region.
        """
        if self.arcs is not None:
            return values[np.ix_(*self.axis_indices())].ravel()
        return values[self.mask()]


def _box_cells(box: Box) -> int:
    return math.prod(stop - start for start, stop in box)


def omega_index(omega: Sequence[int]) -> int:
    """
    Serialize a shift, given in thirds, as an integer in [0, 3^n).
    """
    return functools.reduce(lambda acc, third: 3 * acc + third, omega, 0)


@functools.lru_cache(maxsize=None)
def _offsets(grid: TorusGrid, omega: tuple[int, ...], level: int) -> tuple[int, ...]:
    scale = (-1) ** level * 2 ** (grid.L - level)
    return tuple((scale * third) % grid.N for third in omega)


@dataclasses.dataclass(frozen=True)
class DyadicCube:
    """
    A cube of a shifted dyadic system on the torus.

    Args:
        grid: The grid the cube lives on.
        omega: The system's shift, in thirds.
        level: The cube's level k.
        index: The per-axis index m, each in [0, 2^k).
    """

    grid: TorusGrid
    omega: tuple[int, ...]
    level: int
    index: tuple[int, ...]

    @property
    def side_cells(self) -> int:
        """Side length in cells."""
        return self.grid.side_cells(self.level)

    @property
    def side(self) -> float:
        """Side length ℓ(Q)."""
        return 2.0**-self.level

    @property
    def volume(self) -> float:
        """Volume |Q|."""
        return 2.0 ** (-self.level * self.grid.n)

    @property
    def anchor(self) -> tuple[int, ...]:
        """Per-axis lower corner, in cells."""
        size = self.side_cells
        offsets = _offsets(self.grid, self.omega, self.level)
        return tuple(
            (size * m + offset) % self.grid.N for m, offset in zip(self.index, offsets)
        )

    @property
    def center(self) -> tuple[float, ...]:
        """Per-axis center, in cells."""
        return tuple(a + self.side_cells / 2 for a in self.anchor)

    @property
    def flat_index(self) -> int:
        """Row-major index of the cube within its level."""
        return int(np.ravel_multi_index(self.index, (2**self.level,) * self.grid.n))

    @property
    def key(self) -> tuple[int, int, int]:
        """Stable (omega-index, level, flat index) identifier."""
        return (omega_index(self.omega), self.level, self.flat_index)

    @property
    def arcs(self) -> tuple[tuple[int, int], ...]:
        """Per-axis (start, length) arcs covered by the cube."""
        return tuple((a, self.side_cells) for a in self.anchor)

    @property
    def region(self) -> Region:
        """The cube as a Region."""
        return Region.from_arcs(self.grid, self.arcs)

    def mask(self) -> np.ndarray:
        """Boolean grid function of the cube."""
        return self.region.mask()

    def contains(self, other: DyadicCube) -> bool:
        """Whether other is a subset of self."""
        return all(
            _arc_contains(outer, inner, self.grid.N)
            for outer, inner in zip(self.arcs, other.arcs)
        )

    def intersects(self, other: DyadicCube) -> bool:
        """Whether self and other share at least one cell."""
        return all(
            _arcs_meet(first, second, self.grid.N)
            for first, second in zip(self.arcs, other.arcs)
        )


def _arc_contains(outer: tuple[int, int], inner: tuple[int, int], size: int) -> bool:
    if outer[1] >= size:
        return True
    return (inner[0] - outer[0]) % size + inner[1] <= outer[1]


def _arcs_meet(first: tuple[int, int], second: tuple[int, int], size: int) -> bool:
    return (second[0] - first[0]) % size < first[1] or (
        first[0] - second[0]
    ) % size < second[1]


@functools.lru_cache(maxsize=None)
def _axis_labels(grid: TorusGrid, third: int, level: int) -> np.ndarray:
    offset = _offsets(grid, (third,), level)[0]
    labels = ((np.arange(grid.N) - offset) % grid.N) // grid.side_cells(level)
    labels.setflags(write=False)
    return labels


@functools.lru_cache(maxsize=None)
def _axis_children(grid: TorusGrid, third: int, level: int) -> np.ndarray:
    size = grid.side_cells(level)
    anchors = (size * np.arange(2**level) + _offsets(grid, (third,), level)[0]) % grid.N
    child_anchors = (anchors[:, None] + np.array([0, size // 2])[None, :]) % grid.N
    child_offset = _offsets(grid, (third,), level + 1)[0]
    table = ((child_anchors - child_offset) % grid.N) // (size // 2)
    table.setflags(write=False)
    return table


@dataclasses.dataclass(frozen=True)
class DyadicSystem:
    """
    All cubes of one shifted dyadic system, levels 0 to L.

    Cubes of a level are ordered row-major by index; levels are ordered
    coarse to fine.

    Args:
        grid: The grid the system lives on.
        omega: The shift, in thirds (each component 0, 1 or 2).
    """

    grid: TorusGrid
    omega: tuple[int, ...]

    def __post_init__(self) -> None:
        omega = tuple(int(third) for third in self.omega)
        if len(omega) != self.grid.n or any(t not in SHIFT_THIRDS for t in omega):
            raise InvalidShiftError(f"{self.omega!r}: invalid shift")
        object.__setattr__(self, "omega", omega)

    @property
    def omega_index(self) -> int:
        """Serialized shift."""
        return omega_index(self.omega)

    @property
    def label(self) -> str:
        """Human-readable shift, e.g. omega=0,1."""
        return "omega=" + ",".join(str(third) for third in self.omega)

    def count(self, level: int) -> int:
        """Amount of cubes at a level."""
        return 2 ** (level * self.grid.n)

    def cube(self, level: int, index: int | Sequence[int]) -> DyadicCube:
        """
        Fetch a cube by level and index.

        Args:
            level: The cube's level.
            index: Either the row-major flat index or the per-axis index.

        Returns:
            The requested cube.
        """
        if isinstance(index, (int, np.integer)):
            index = np.unravel_index(int(index), (2**level,) * self.grid.n)
        index = tuple(int(m) % 2**level for m in index)
        return DyadicCube(self.grid, self.omega, level, index)

    def cubes(self, level: int | None = None) -> Iterator[DyadicCube]:
        """
        Iterate over the cubes of one level, or of all levels.

        Args:
            level: The level to iterate over. Defaults to all levels.

        Yields:
            Cubes, level-major and index-minor.
        """
        levels = range(self.grid.L + 1) if level is None else (level,)
        for k in levels:
            for index in itertools.product(range(2**k), repeat=self.grid.n):
                yield DyadicCube(self.grid, self.omega, k, index)

    def axis_labels(self, level: int, axis: int) -> np.ndarray:
        """Per-cell index, along one axis, of the containing level-k cube."""
        return _axis_labels(self.grid, self.omega[axis], level)

    def axis_anchors(self, level: int, axis: int) -> np.ndarray:
        """Anchors, in cells, of the level-k cubes along one axis."""
        offset = _offsets(self.grid, self.omega, level)[axis]
        anchors = self.grid.side_cells(level) * np.arange(2**level) + offset
        return anchors % self.grid.N

    def labels(self, level: int) -> np.ndarray:
        """
        Flat index of the containing level-k cube, for every cell.

        Args:
            level: The level.

        Returns:
            An integer grid function.
        """
        return _labels(self, level)

    def level_sums(self, values: np.ndarray, level: int) -> np.ndarray:
        """Cell sums of a grid function over every level-k cube."""
        return np.bincount(
            self.labels(level).ravel(),
            weights=np.asarray(values, dtype=float).ravel(),
            minlength=self.count(level),
        )

    def level_means(self, values: np.ndarray, level: int) -> np.ndarray:
        """Averages of a grid function over every level-k cube."""
        volume = self.grid.side_cells(level) ** self.grid.n
        return self.level_sums(values, level) / volume

    def spread(self, per_cube: np.ndarray, level: int) -> np.ndarray:
        """Turn per-cube values of one level into a grid function."""
        return np.asarray(per_cube)[self.labels(level)]

    def child_table(self, level: int) -> np.ndarray:
        """
        Flat indices of the children of every level-k cube.

        Children are ordered by position η in binary order, the first
        axis being the most significant bit; η_i = 0 selects the lower
        half along axis i.

        Raises:
            MaximalDepthError: If level is L.
        """
        if level >= self.grid.L:
            raise MaximalDepthError(f"{level!r}: no children at the finest level")
        return _child_table(self, level)

    def parent_table(self, level: int) -> np.ndarray:
        """Flat index of the parent of every level-k cube, k >= 1."""
        if level < 1:
            raise DyadicError("the level-0 cube has no parent")
        parents = np.empty(self.count(level), dtype=int)
        children = self.child_table(level - 1)
        parents[children] = np.arange(self.count(level - 1))[:, None]
        return parents


@functools.lru_cache(maxsize=None)
def _labels(system: DyadicSystem, level: int) -> np.ndarray:
    per_axis = [system.axis_labels(level, axis) for axis in range(system.grid.n)]
    mesh = np.meshgrid(*per_axis, indexing="ij")
    labels = np.ravel_multi_index(mesh, (2**level,) * system.grid.n)
    labels.setflags(write=False)
    return labels


@functools.lru_cache(maxsize=None)
def _child_table(system: DyadicSystem, level: int) -> np.ndarray:
    per_axis = [_axis_children(system.grid, third, level) for third in system.omega]
    shape = (2 ** (level + 1),) * system.grid.n
    columns = []
    for eta in itertools.product((0, 1), repeat=system.grid.n):
        mesh = np.meshgrid(
            *(table[:, bit] for table, bit in zip(per_axis, eta)), indexing="ij"
        )
        columns.append(np.ravel_multi_index(mesh, shape).ravel())
    table = np.stack(columns, axis=1)
    table.setflags(write=False)
    return table


def parse_shift(omega: Sequence[float]) -> tuple[int, ...]:
    """
    Convert a shift in {0, 1/3, 2/3}^n into thirds.

    Args:
        omega: Shift components, as floats or fractions.

    Returns:
        The shift expressed in thirds.

    Raises:
        InvalidShiftError: If a component isn't 0, 1/3 or 2/3.
    """
    thirds = []
    for component in omega:
        scaled = 3 * float(component)
        third = round(scaled)
        if abs(scaled - third) > 1e-9 or third not in SHIFT_THIRDS:
            raise InvalidShiftError(f"{component!r}: invalid shift component")
        thirds.append(third)
    return tuple(thirds)


def build_system(grid: TorusGrid, omega: Sequence[float]) -> DyadicSystem:
    """
    Build the dyadic system of a given shift.

    Args:
        grid: The grid to build the system on.
        omega: The shift, with components in {0, 1/3, 2/3}.

    Returns:
        The shifted dyadic system.

    Raises:
        InvalidShiftError: If the shift is invalid.
    """
    thirds = parse_shift(omega)
    if len(thirds) != grid.n:
        raise InvalidShiftError(f"{tuple(omega)!r}: expected {grid.n} components")
    return DyadicSystem(grid, thirds)


def all_systems(grid: TorusGrid) -> list[DyadicSystem]:
    """All 3^n shifted systems, in lexicographic order of the shift."""
    return [
        DyadicSystem(grid, omega)
        for omega in itertools.product(SHIFT_THIRDS, repeat=grid.n)
    ]


def children(cube: DyadicCube) -> list[DyadicCube]:
    """
    Split a cube into its 2^n children.

    Args:
        cube: The parent cube.

    Returns:
        The children, ordered by position η in binary order.

    Raises:
        MaximalDepthError: If the cube is at the finest level.
    """
    if cube.level >= cube.grid.L:
        raise MaximalDepthError(f"{cube.key!r}: cube is at maximal depth")

    per_axis = [
        _axis_children(cube.grid, third, cube.level)[m]
        for third, m in zip(cube.omega, cube.index)
    ]
    return [
        DyadicCube(
            cube.grid,
            cube.omega,
            cube.level + 1,
            tuple(int(table[bit]) for table, bit in zip(per_axis, eta)),
        )
        for eta in itertools.product((0, 1), repeat=cube.grid.n)
    ]


def enlarge(cube: DyadicCube, factor: float) -> Region:
    """
    Concentric enlargement of a cube, snapped outward to the cells.

    Args:
        cube: The cube to enlarge.
        factor: The enlargement factor c.

    Returns:
        The wrapped box of side min(1, c·ℓ(Q)), or the whole torus.

    Raises:
        InvalidFactorError: If the factor is smaller than one.
    """
    if factor < 1:
        raise InvalidFactorError(f"{factor!r}: enlargement factor must be >= 1")
    grid = cube.grid
    if factor * cube.side >= 1:
        return Region.whole(grid)

    half = factor * cube.side_cells / 2
    arcs = []
    for center in cube.center:
        start = math.floor(center - half + 1e-9)
        length = math.ceil(center + half - 1e-9) - start
        arcs.append((0, grid.N) if length >= grid.N else (start, length))
    return Region.from_arcs(grid, arcs)


@dataclasses.dataclass(frozen=True)
class Containment:
    """
    A shifted dyadic cube containing a region.

    Args:
        omega: The shift of the containing cube's system, in thirds.
        cube: The containing cube.
        ratio: |Q|/|B|.
        flagged: True when only the level-0 cube contains the region.
    """

    omega: tuple[int, ...]
    cube: DyadicCube
    ratio: float
    flagged: bool = False


def _covering_arc(occupied: np.ndarray) -> tuple[int, int]:
    size = occupied.size
    cells = np.flatnonzero(occupied)
    if cells.size == size:
        return (0, size)
    gaps = np.diff(np.append(cells, cells[0] + size))
    widest = int(np.argmax(gaps))
    start = int(cells[(widest + 1) % cells.size])
    return (start, size - int(gaps[widest]) + 1)


def containing_cube(region: Region) -> Containment:
    """
    Find the smallest shifted dyadic cube containing a region.

    Ties are broken by lexicographic shift.

    Args:
        region: A nonempty region of diameter smaller than 1/4.

    Returns:
        The containing cube and the realized volume ratio.

    Raises:
        EmptyRegionError: If the region is empty.
        InvalidRegionError: If the region is too large.
    """
    if region.is_empty:
        raise EmptyRegionError("cannot contain an empty region")

    grid = region.grid
    mask = region.mask()
    arcs = []
    for axis in range(grid.n):
        others = tuple(ax for ax in range(grid.n) if ax != axis)
        arcs.append(_covering_arc(mask.any(axis=others) if others else mask))
    diameter = math.hypot(*(length * grid.h for _, length in arcs))
    if diameter >= 0.25:
        raise InvalidRegionError(f"{diameter!r}: region diameter must be below 1/4")

    best = None
    for system in all_systems(grid):
        for level in range(grid.L, 0, -1):
            if best is not None and level <= best.level:
                break
            size = grid.side_cells(level)
            index = []
            for axis, (start, length) in enumerate(arcs):
                m = int(system.axis_labels(level, axis)[start])
                anchor = int(system.axis_anchors(level, axis)[m])
                if (start - anchor) % grid.N + length > size:
                    break
                index.append(m)
            else:
                best = system.cube(level, index)
                break

    if best is None:
        top = DyadicSystem(grid, (0,) * grid.n).cube(0, 0)
        return Containment(top.omega, top, top.volume / region.measure, True)
    return Containment(best.omega, best, best.volume / region.measure)


@dataclasses.dataclass(frozen=True)
class WhitneyPair:
    """
    Two same-level cubes separated proportionally to their side.

    Args:
        first: The first cube.
        second: The second cube.
        distance: Torus distance between the centers.
    """

    first: DyadicCube
    second: DyadicCube
    distance: float

    @classmethod
    def from_cubes(cls, first: DyadicCube, second: DyadicCube) -> WhitneyPair:
        """Pair two cubes, measuring the torus distance of their centers."""
        if first.level != second.level:
            raise DyadicError("Whitney pairs need cubes of the same level")
        return cls(first, second, center_distance(first, second))

    @property
    def displacement(self) -> tuple[float, ...]:
        """Torus-minimal displacement from the first center to the second."""
        grid = self.first.grid
        return tuple(
            ((c2 - c1 + grid.N / 2) % grid.N - grid.N / 2) * grid.h
            for c1, c2 in zip(self.first.center, self.second.center)
        )


def center_distance(first: DyadicCube, second: DyadicCube) -> float:
    """Torus distance between the centers of two cubes."""
    grid = first.grid
    total = 0.0
    for c1, c2 in zip(first.center, second.center):
        delta = (c2 - c1) % grid.N
        total += min(delta, grid.N - delta) ** 2
    return math.sqrt(total) * grid.h


@functools.lru_cache(maxsize=None)
def whitney_offsets(n: int) -> tuple[tuple[int, ...], ...]:
    """
    Index offsets of the Whitney partners of a cube.

    The center distance of two same-level cubes is the index offset
    times ℓ, so the window 3√n·ℓ <= d <= 9√n·ℓ is level-independent.
    """
    reach = math.isqrt(81 * n)
    return tuple(
        delta
        for delta in itertools.product(range(-reach, reach + 1), repeat=n)
        if 9 * n <= sum(d * d for d in delta) <= 81 * n
    )


def whitney_pairs(system: DyadicSystem, levels: Sequence[int]) -> list[WhitneyPair]:
    """
    Enumerate the Whitney pairs of a system.

    Args:
        system: The dyadic system.
        levels: The levels to enumerate.

    Returns:
        For every cube of every level, its partners at center distance
        between 3√n·ℓ and 9√n·ℓ.

    Raises:
        SeparationError: If a level can't host the separation window.
    """
    n = system.grid.n
    pairs = []
    for level in levels:
        if 2.0**-level * 9 * math.sqrt(n) >= 0.5:
            raise SeparationError(f"{level!r}: level too coarse for Whitney pairs")
        for cube in system.cubes(level):
            for delta in whitney_offsets(n):
                partner = system.cube(
                    level, tuple(m + d for m, d in zip(cube.index, delta))
                )
                distance = math.sqrt(sum(d * d for d in delta)) * cube.side
                pairs.append(WhitneyPair(cube, partner, distance))
    return pairs
