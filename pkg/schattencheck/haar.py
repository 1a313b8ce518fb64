""" Haar systems, conditional expectations and martingale differences. """

from __future__ import annotations

import dataclasses
import functools
import itertools
from typing import Iterator, Sequence

import numpy as np

from schattencheck.dyadic import DyadicCube, DyadicSystem, MaximalDepthError


class HaarError(Exception):
    """Common base class for exceptions related to Haar transforms."""


class NonFiniteError(HaarError):
    """The grid function holds NaN or infinite values."""


class LevelRangeError(HaarError):
    """The level lies outside [0, L]."""


class SystemMismatchError(HaarError):
    """The coefficients don't belong to the expected system."""


@dataclasses.dataclass(frozen=True)
class Signature:
    """
    A Haar signature ε ∈ {0, 1}^n.

    Along axis i, ε_i = 0 selects the oscillating factor (+1 on the lower
    half, -1 on the upper half) and ε_i = 1 the flat one.

    Args:
        bits: The signature's components.
    """

    bits: tuple[int, ...]

    @classmethod
    def from_position(cls, n: int, position: int) -> Signature:
        """Build the signature at a position of the binary order."""
        return cls(tuple((position >> (n - 1 - i)) & 1 for i in range(n)))

    @property
    def position(self) -> int:
        """Position in the binary order."""
        return int("".join(str(bit) for bit in self.bits), 2)

    @property
    def cancellative(self) -> bool:
        """Whether the Haar function has zero integral."""
        return not all(self.bits)


def cancellative_signatures(n: int) -> list[Signature]:
    """The 2^n - 1 cancellative signatures, in binary order."""
    return [Signature.from_position(n, t) for t in range(2**n - 1)]


@functools.lru_cache(maxsize=None)
def sign_matrix(n: int) -> np.ndarray:
    """
    Signs of h_Q^ε on the children of Q.

    Returns:
        A (2^n, 2^n) array whose entry [ε, η] is the sign of the Haar
        function of signature position ε on the child of position η.
        The last row is the flat signature.
    """
    signs = np.ones((2**n, 2**n))
    for eps, eta in itertools.product(range(2**n), repeat=2):
        for i in range(n):
            eps_bit = (eps >> (n - 1 - i)) & 1
            eta_bit = (eta >> (n - 1 - i)) & 1
            if not eps_bit and eta_bit:
                signs[eps, eta] = -signs[eps, eta]
    signs.setflags(write=False)
    return signs


def haar_function(cube: DyadicCube, signature: Signature) -> np.ndarray:
    """
    The Haar function h_Q^ε as a grid function.

    Args:
        cube: The support cube.
        signature: The signature; the flat one yields 1_Q/√|Q|.

    Returns:
        The Haar function.

    Raises:
        MaximalDepthError: If a cancellative function is requested on a
            finest-level cube, whose halves aren't cell-aligned.
    """
    grid = cube.grid
    size = cube.side_cells
    if signature.cancellative and size % 2:
        raise MaximalDepthError(f"{cube.key!r}: halves are not cell-aligned")

    factors = []
    for anchor, bit in zip(cube.anchor, signature.bits):
        local = (np.arange(grid.N) - anchor) % grid.N
        factor = np.where(local < size, 1.0, 0.0)
        if not bit:
            factor = np.where(local < size // 2, factor, -factor)
        factors.append(factor)
    return functools.reduce(np.multiply.outer, factors) / np.sqrt(cube.volume)


@dataclasses.dataclass(frozen=True, eq=False)
class HaarCoefficients:
    """
    Haar expansion of a grid function in one dyadic system.

    Args:
        system: The dyadic system.
        coarse: The global average.
        levels: Per level k < L, an array of shape (2^{kn}, 2^n - 1)
            holding ⟨b, h_Q^ε⟩ by flat cube index and signature position.
        remainder: The cell-scale detail b - E_L b.
    """

    system: DyadicSystem
    coarse: float
    levels: tuple[np.ndarray, ...]
    remainder: np.ndarray

    def __getitem__(self, key: tuple[DyadicCube, Signature]) -> float:
        cube, signature = key
        if cube.omega != self.system.omega:
            raise SystemMismatchError(f"{cube.key!r}: cube from another system")
        if cube.level >= len(self.levels) or not signature.cancellative:
            raise KeyError(key)
        return float(self.levels[cube.level][cube.flat_index, signature.position])

    def items(self) -> Iterator[tuple[DyadicCube, Signature, float]]:
        """Iterate level-major, index-minor, then by signature."""
        signatures = cancellative_signatures(self.system.grid.n)
        for level, table in enumerate(self.levels):
            for flat, row in enumerate(table):
                cube = self.system.cube(level, flat)
                for signature, value in zip(signatures, row):
                    yield cube, signature, float(value)

    @property
    def detail_norm_squared(self) -> float:
        """Sum of the squared cancellative coefficients."""
        return float(sum(np.sum(table**2) for table in self.levels))

    @property
    def remainder_norm_squared(self) -> float:
        """Squared L² norm of the cell-scale remainder."""
        return float(np.sum(self.remainder**2) * self.system.grid.cell_volume)

    def is_band_limited(self, rtol: float = 1e-12) -> bool:
        """Whether the cell-scale remainder vanishes."""
        scale = self.coarse**2 + self.detail_norm_squared
        return self.remainder_norm_squared <= rtol**2 * max(scale, 1e-300)


def _check_finite(values: np.ndarray) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(values)):
        raise NonFiniteError("grid function holds NaN or infinite values")
    return values


def cube_means(values: np.ndarray, system: DyadicSystem) -> list[np.ndarray]:
    """Averages ⟨b⟩_Q over every cube, one array per level."""
    return [system.level_means(values, k) for k in range(system.grid.L + 1)]


def child_means(
    means: Sequence[np.ndarray], system: DyadicSystem, level: int
) -> np.ndarray:
    """Averages on the children of every level-k cube, shape (2^{kn}, 2^n)."""
    return means[level + 1][system.child_table(level)]


def analyze(values: np.ndarray, system: DyadicSystem) -> HaarCoefficients:
    """
    Expand a grid function in the Haar basis of a system.

    Args:
        values: The grid function.
        system: The dyadic system.

    Returns:
        The Haar coefficients, the global average and the cell-scale
        remainder.

    Raises:
        NonFiniteError: If the function holds NaN or infinite values.
    """
    grid = system.grid
    values = _check_finite(grid.conform(values))
    signs = sign_matrix(grid.n)[:-1]
    means = cube_means(values, system)

    levels = []
    for k in range(grid.L):
        scale = 2.0 ** (-k * grid.n / 2) / 2**grid.n
        levels.append(scale * child_means(means, system, k) @ signs.T)

    remainder = values - system.spread(means[grid.L], grid.L)
    return HaarCoefficients(system, float(means[0][0]), tuple(levels), remainder)


def synthesize(coeffs: HaarCoefficients) -> np.ndarray:
    """
    Rebuild a grid function from its Haar expansion.

    Args:
        coeffs: The Haar coefficients.

    Returns:
        The grid function.

    Raises:
        SystemMismatchError: If the coefficient tables don't match the
            shape of the system.
    """
    system = coeffs.system
    grid = system.grid
    if len(coeffs.levels) != grid.L or coeffs.remainder.shape != grid.shape:
        raise SystemMismatchError("coefficients don't match the system's depth")

    signs = sign_matrix(grid.n)[:-1]
    means = np.array([coeffs.coarse])
    for k, table in enumerate(coeffs.levels):
        if table.shape != (system.count(k), 2**grid.n - 1):
            raise SystemMismatchError(
                f"{table.shape!r}: wrong table shape at level {k}"
            )
        finer = np.empty(system.count(k + 1))
        detail = 2.0 ** (k * grid.n / 2) * (table @ signs)
        finer[system.child_table(k)] = means[:, None] + detail
        means = finer
    return system.spread(means, grid.L) + coeffs.remainder


def expectation(values: np.ndarray, system: DyadicSystem, level: int) -> np.ndarray:
    """
    The conditional expectation E_k b.

    Args:
        values: The grid function.
        system: The dyadic system.
        level: The level k, between 0 and L.

    Returns:
        The function equal to ⟨b⟩_Q on every level-k cube Q.

    Raises:
        LevelRangeError: If the level lies outside [0, L].
    """
    if not 0 <= level <= system.grid.L:
        raise LevelRangeError(f"{level!r}: level must lie in [0, {system.grid.L}]")
    values = system.grid.conform(values)
    return system.spread(system.level_means(values, level), level)


def martingale_difference(values: np.ndarray, cube: DyadicCube) -> np.ndarray:
    """
    The martingale difference Δ_Q b = (E_{k+1}b - E_k b)·1_Q.

    Args:
        values: The grid function.
        cube: The cube Q.

    Returns:
        Δ_Q b, constant on every child of Q.

    Raises:
        MaximalDepthError: If Q is at the finest level.
    """
    grid = cube.grid
    if cube.level >= grid.L:
        raise MaximalDepthError(f"{cube.key!r}: cube is at maximal depth")
    system = DyadicSystem(grid, cube.omega)
    values = grid.conform(values)
    finer = expectation(values, system, cube.level + 1)
    coarser = expectation(values, system, cube.level)
    return np.where(cube.mask(), finer - coarser, 0.0)


def synthesize_details(
    system: DyadicSystem, levels: Sequence[np.ndarray], coarse: float = 0.0
) -> np.ndarray:
    """Grid function of given Haar coefficient tables and no remainder."""
    remainder = np.zeros(system.grid.shape)
    return synthesize(HaarCoefficients(system, coarse, tuple(levels), remainder))
