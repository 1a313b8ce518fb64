""" Muckenhoupt weights, box masses and A2 characteristics. """

from __future__ import annotations

import dataclasses
import functools
import itertools
import logging
import math
from typing import Sequence

import numpy as np

from schattencheck.dyadic import (
    DyadicCube,
    DyadicSystem,
    InvalidGridError,
    Region,
    TorusGrid,
    all_systems,
    enlarge,
)


logger = logging.getLogger(__name__)

DYADIC_ALL_SHIFTS = "dyadic-all-shifts"
ALL_BOXES = "all-boxes"


class WeightError(Exception):
    """Common base class for exceptions related to weights."""


class NonPositiveWeightError(WeightError):
    """The weight has non-positive or non-finite values."""


class InvalidExponentError(WeightError):
    """The power exponent lies outside (-n, n)."""


class InvalidWeightSpecError(WeightError):
    """The weight specification is malformed."""


class GridMismatchError(WeightError):
    """Two grid objects that should match don't."""


@dataclasses.dataclass(frozen=True)
class WeightSpec:
    """
    A recipe for a weight, independent of the grid resolution.

    Args:
        kind: One of "constant", "power" or "samples".
        value: The constant value.
        alpha: The power exponent.
        center: The power weight's singular point, a lattice point.
        samples: Flat row-major cell values.
    """

    kind: str
    value: float = 1.0
    alpha: float = 0.0
    center: tuple[float, ...] | None = None
    samples: tuple[float, ...] | None = None

    @classmethod
    def from_dict(cls, data: dict) -> WeightSpec:
        """
        Build a weight spec from its JSON representation.

        Args:
            data: A mapping with a "kind" key and kind-specific fields.

        Returns:
            The weight spec.

        Raises:
            InvalidWeightSpecError: If the mapping is malformed.
        """
        fields = {
            "constant": {"kind", "value"},
            "power": {"kind", "alpha", "center"},
            "samples": {"kind", "values"},
        }
        try:
            kind = data["kind"]
            if kind not in fields:
                raise InvalidWeightSpecError(f"{kind!r}: unknown weight kind")
            if unknown := set(data) - fields[kind]:
                raise InvalidWeightSpecError(f"{sorted(unknown)!r}: unknown fields")
            if kind == "constant":
                return cls(kind, value=float(data.get("value", 1.0)))
            if kind == "power":
                return cls(
                    kind,
                    alpha=float(data["alpha"]),
                    center=tuple(float(x) for x in data["center"]),
                )
            return cls(kind, samples=tuple(float(x) for x in data["values"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidWeightSpecError(f"{data!r}: malformed weight spec") from exc

    def to_dict(self) -> dict:
        """JSON representation of self."""
        if self.kind == "constant":
            return {"kind": self.kind, "value": self.value}
        if self.kind == "power":
            return {"kind": self.kind, "alpha": self.alpha, "center": list(self.center)}
        return {"kind": self.kind, "values": list(self.samples)}


@dataclasses.dataclass(frozen=True, eq=False)
class Weight:
    """
    A strictly positive grid function with O(1) box-mass queries.

    Args:
        grid: The grid the weight lives on.
        values: Cell values.
        tag: A short label used in operator metadata.
    """

    grid: TorusGrid
    values: np.ndarray
    tag: str = "w"

    def __post_init__(self) -> None:
        try:
            values = np.array(self.grid.conform(self.values), dtype=float)
        except InvalidGridError as exc:
            raise GridMismatchError(f"{self.tag}: {exc}") from exc
        if not np.all(np.isfinite(values)) or np.any(values <= 0):
            raise NonPositiveWeightError(f"{self.tag}: values must be positive")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @functools.cached_property
    def prefix(self) -> np.ndarray:
        """Zero-padded inclusive prefix sums of value·h^n."""
        table = self.values * self.grid.cell_volume
        for axis in range(self.grid.n):
            table = np.cumsum(table, axis=axis)
        return np.pad(table, [(1, 0)] * self.grid.n)

    @property
    def total(self) -> float:
        """Mass of the whole torus."""
        return float(self.prefix[(-1,) * self.grid.n])

    def box_mass(self, box: Sequence[tuple[int, int]]) -> float:
        """
        Mass of a single unwrapped box, by inclusion-exclusion.

        Args:
            box: Per-axis (start, stop) cell ranges.

        Returns:
            The box mass.
        """
        total = 0.0
        for corner in itertools.product((0, 1), repeat=self.grid.n):
            index = tuple(
                stop if bit else start for bit, (start, stop) in zip(corner, box)
            )
            sign = -1 if (self.grid.n - sum(corner)) % 2 else 1
            total += sign * self.prefix[index]
        return total

    def cube_masses(self, system: DyadicSystem, level: int) -> np.ndarray:
        """Masses of every level-k cube of a system, by flat index."""
        return system.level_sums(self.values, level) * self.grid.cell_volume

    def inverse(self) -> Weight:
        """The weight w^{-1}."""
        return Weight(self.grid, 1 / self.values, f"{self.tag}^-1")

    def power(self, exponent: float) -> Weight:
        """The weight w^δ."""
        return Weight(self.grid, self.values**exponent, f"{self.tag}^{exponent!r}")


def make_weight(grid: TorusGrid, spec: WeightSpec, tag: str = "w") -> Weight:
    """
    Sample a weight spec on a grid.

    Power weights use the torus distance from cell centers to the
    singular point, which never coincides with a center.

    Args:
        grid: The grid to sample on.
        spec: The weight recipe.
        tag: A short label for the weight.

    Returns:
        The sampled weight.

    Raises:
        NonPositiveWeightError: If the samples aren't positive.
        InvalidExponentError: If a power exponent is outside (-n, n).
        InvalidWeightSpecError: If the spec is otherwise invalid.
    """
    if spec.kind == "constant":
        if spec.value <= 0:
            raise NonPositiveWeightError(f"{spec.value!r}: constant must be positive")
        return Weight(grid, np.full(grid.shape, float(spec.value)), tag)

    if spec.kind == "power":
        if not -grid.n < spec.alpha < grid.n:
            raise InvalidExponentError(
                f"{spec.alpha!r}: exponent must lie in (-{grid.n}, {grid.n})"
            )
        if spec.center is None or len(spec.center) != grid.n:
            raise InvalidWeightSpecError(f"{spec.center!r}: invalid singular point")
        for coordinate in spec.center:
            if abs(coordinate * grid.N - round(coordinate * grid.N)) > 1e-9:
                raise InvalidWeightSpecError(
                    f"{coordinate!r}: singular point must be a lattice point"
                )
        return Weight(grid, torus_distance(grid, spec.center) ** spec.alpha, tag)

    if spec.kind == "samples":
        try:
            return Weight(grid, np.asarray(spec.samples, dtype=float), tag)
        except GridMismatchError as exc:
            raise InvalidWeightSpecError(str(exc)) from exc

    raise InvalidWeightSpecError(f"{spec.kind!r}: unknown weight kind")


def torus_distance(grid: TorusGrid, point: Sequence[float]) -> np.ndarray:
    """Torus distance from every cell center to a point."""
    squares = []
    for coordinate in point:
        delta = np.abs(grid.axis_centers() - coordinate % 1.0)
        squares.append(np.minimum(delta, 1 - delta) ** 2)
    total = functools.reduce(np.add.outer, squares)
    return np.sqrt(total)


def mass(weight: Weight, region: Region) -> float:
    """
    Mass of a region.

    Args:
        weight: The weight.
        region: A cell-aligned region on the same grid.

    Returns:
        h^n times the sum of the weight over the region's cells.

    Raises:
        GridMismatchError: If the region lives on another grid.
    """
    if region.grid != weight.grid:
        raise GridMismatchError("region and weight live on different grids")
    return sum(weight.box_mass(box) for box in region.boxes)


def nu_from(mu: Weight, lam: Weight) -> Weight:
    """
    The Bloom weight ν = μ^{1/2}λ^{-1/2}.

    Raises:
        GridMismatchError: If the weights live on different grids.
    """
    if mu.grid != lam.grid:
        raise GridMismatchError("μ and λ live on different grids")
    return Weight(mu.grid, np.sqrt(mu.values) / np.sqrt(lam.values), "nu")


@dataclasses.dataclass(frozen=True, eq=False)
class WeightPair:
    """
    The weights μ, λ of a two-weight setting, with derived weights.

    Args:
        mu: The source weight.
        lam: The target weight.
    """

    mu: Weight
    lam: Weight

    def __post_init__(self) -> None:
        if self.mu.grid != self.lam.grid:
            raise GridMismatchError("μ and λ live on different grids")

    @classmethod
    def unweighted(cls, grid: TorusGrid) -> WeightPair:
        """The pair μ = λ = 1."""
        spec = WeightSpec("constant")
        return cls(make_weight(grid, spec, "mu"), make_weight(grid, spec, "lam"))

    @property
    def grid(self) -> TorusGrid:
        """The common grid."""
        return self.mu.grid

    @functools.cached_property
    def nu(self) -> Weight:
        """ν = μ^{1/2}λ^{-1/2}."""
        return nu_from(self.mu, self.lam)

    @functools.cached_property
    def mu_inv(self) -> Weight:
        """μ^{-1}."""
        return self.mu.inverse()

    @functools.cached_property
    def lam_inv(self) -> Weight:
        """λ^{-1}."""
        return self.lam.inverse()


def _dyadic_ratios(weight: Weight, ratio) -> float:
    best = -math.inf
    for system in all_systems(weight.grid):
        for level in range(weight.grid.L + 1):
            best = max(best, float(np.max(ratio(system, level))))
    return best


def a2_constant(weight: Weight, scope: str = DYADIC_ALL_SHIFTS) -> float:
    """
    The A2 characteristic of a weight.

    Args:
        weight: The weight.
        scope: Either "dyadic-all-shifts" (every cube of the 3^n shifted
            systems) or "all-boxes" (every cell-aligned cube).

    Returns:
        The supremum of ⟨w⟩_Q⟨w^{-1}⟩_Q over the scoped cubes.

    Raises:
        WeightError: If the scope is unknown.
    """
    inverse = weight.inverse()
    if scope == DYADIC_ALL_SHIFTS:

        def ratio(system, level):
            volume = 2.0 ** (-level * weight.grid.n)
            return (
                weight.cube_masses(system, level)
                * inverse.cube_masses(system, level)
                / volume**2
            )

        # Cauchy-Schwarz floor.
        return max(1.0, _dyadic_ratios(weight, ratio))

    if scope == ALL_BOXES:
        return max(1.0, _all_boxes_a2(weight, inverse))

    raise WeightError(f"{scope!r}: unknown A2 scope")


def _tiled_prefix(weight: Weight) -> np.ndarray:
    table = np.tile(weight.values, (2,) * weight.grid.n) * weight.grid.cell_volume
    for axis in range(weight.grid.n):
        table = np.cumsum(table, axis=axis)
    return np.pad(table, [(1, 0)] * weight.grid.n)


def _all_box_sums(prefix: np.ndarray, side: int, size: int, n: int) -> np.ndarray:
    sums = np.zeros((size,) * n)
    for corner in itertools.product((0, 1), repeat=n):
        window = tuple(slice(bit * side, bit * side + size) for bit in corner)
        sign = -1 if (n - sum(corner)) % 2 else 1
        sums += sign * prefix[window]
    return sums


def _all_boxes_a2(weight: Weight, inverse: Weight) -> float:
    grid = weight.grid
    direct, dual = _tiled_prefix(weight), _tiled_prefix(inverse)
    best = -math.inf
    for side in range(1, grid.N + 1):
        volume = (side * grid.h) ** grid.n
        products = _all_box_sums(direct, side, grid.N, grid.n) * _all_box_sums(
            dual, side, grid.N, grid.n
        )
        best = max(best, float(np.max(products)) / volume**2)
    return best


def reverse_holder_constant(weight: Weight, sigma: float) -> float:
    """
    Realized reverse-Hölder constant of a weight over all dyadic cubes.

    Args:
        weight: The weight.
        sigma: The exponent gain σ > 0.

    Returns:
        The supremum of ⟨w^{1+σ}⟩_Q^{1/(1+σ)} / ⟨w⟩_Q.
    """
    lifted = weight.values ** (1 + sigma)

    def ratio(system, level):
        return system.level_means(lifted, level) ** (1 / (1 + sigma)) / (
            system.level_means(weight.values, level)
        )

    # Jensen floor.
    return max(1.0, _dyadic_ratios(weight, ratio))


def reverse_holder_exponent(
    weight: Weight, sigmas: Sequence[float], bound: float = 2.0
) -> tuple[float, float]:
    """
    Pick a reverse-Hölder exponent for a weight.

    Args:
        weight: The weight.
        sigmas: Candidate exponents, sorted ascending.
        bound: Largest accepted realized constant.

    Returns:
        The largest candidate σ whose realized constant stays within the
        bound, together with that constant. If no candidate passes, the
        smallest one and its constant.

    Raises:
        WeightError: If the candidates are empty or unsorted.
    """
    sigmas = list(sigmas)
    if not sigmas:
        raise WeightError("no candidate exponents")
    if any(s <= 0 for s in sigmas) or sigmas != sorted(sigmas):
        raise WeightError(f"{sigmas!r}: candidates must be positive and ascending")

    constants = [reverse_holder_constant(weight, sigma) for sigma in sigmas]
    for sigma, constant in zip(reversed(sigmas), reversed(constants)):
        if constant <= bound:
            return sigma, constant

    logger.info(
        "%s: no reverse-Hölder candidate within %s, using σ=%s (C=%s)",
        weight.tag,
        bound,
        sigmas[0],
        constants[0],
    )
    return sigmas[0], constants[0]


def doubling_ratio(weight: Weight, cube: DyadicCube, factor: float) -> float:
    """
    Ratio of the mass of an enlarged cube to the mass of the cube.

    Raises:
        DyadicError: If the factor is smaller than one.
    """
    return mass(weight, enlarge(cube, factor)) / mass(weight, cube.region)
