""" Riesz transforms, commutators, dyadic shifts, paraproducts and frames. """

from __future__ import annotations

import dataclasses
import functools
import itertools
import logging
import math
from typing import Callable, Sequence

import numpy as np
from scipy import special

from schattencheck.dyadic import (
    DyadicCube,
    DyadicSystem,
    InvalidGridError,
    TorusGrid,
    WhitneyPair,
    children,
)
from schattencheck.haar import (
    HaarCoefficients,
    analyze,
    sign_matrix,
    synthesize_details,
)
from schattencheck.weights import Weight


logger = logging.getLogger(__name__)

MULTIPLIER = "multiplier"
KERNEL = "kernel"
UNNORMALIZED = "unnormalized"
CLASSICAL = "classical"

PI = "Pi"
PI_STAR = "PiStar"
GAMMA = "Gamma"
REMAINDER = "Remainder"
PARAPRODUCT_KINDS = (PI, PI_STAR, GAMMA, REMAINDER)


class OperatorError(Exception):
    """Common base class for exceptions related to operators."""


class NonFiniteInputError(OperatorError):
    """The input holds NaN or infinite values."""


class DimensionMismatchError(OperatorError):
    """The operand doesn't match the operator's grid."""


class InvalidSpecError(OperatorError):
    """An operator specification is malformed."""


class UnknownKindError(OperatorError):
    """The paraproduct kind is unknown."""


class NotBandLimitedError(OperatorError):
    """The input has a nonzero cell-scale remainder."""


class FrameLevelError(OperatorError):
    """The cube can't host a sign-cell frame."""


class SignChangeError(OperatorError):
    """The kernel changes sign between the cells of a pair."""


class DiagonalOverlapError(OperatorError):
    """The Whitney windows overlap the diagonal."""


@dataclasses.dataclass(frozen=True)
class RieszSpec:
    """
    A discretization of the Riesz transform R_j.

    Args:
        j: The direction, between 1 and n.
        mode: "multiplier" (Fourier symbol) or "kernel" (direct sum).
        normalization: "unnormalized" for y_j/|y|^{n+1}, or "classical"
            to include the constant Γ((n+1)/2)/π^{(n+1)/2}.
    """

    j: int = 1
    mode: str = MULTIPLIER
    normalization: str = UNNORMALIZED

    def __post_init__(self) -> None:
        if self.j < 1:
            raise InvalidSpecError(f"{self.j!r}: direction must be at least 1")
        if self.mode not in (MULTIPLIER, KERNEL):
            raise InvalidSpecError(f"{self.mode!r}: unknown Riesz mode")
        if self.normalization not in (UNNORMALIZED, CLASSICAL):
            raise InvalidSpecError(f"{self.normalization!r}: unknown normalization")

    def constant(self, n: int) -> float:
        """The kernel's normalizing constant in dimension n."""
        if self.normalization == CLASSICAL:
            return special.gamma((n + 1) / 2) / math.pi ** ((n + 1) / 2)
        return 1.0

    def kernel(self, displacement: Sequence[np.ndarray]) -> np.ndarray:
        """
        K_j at real displacements.

        Args:
            displacement: Per-axis displacement arrays, broadcastable.

        Returns:
            c·y_j/|y|^{n+1}, with 0 at the origin.
        """
        n = len(displacement)
        radius = np.sqrt(functools.reduce(np.add, [d**2 for d in displacement]))
        with np.errstate(divide="ignore", invalid="ignore"):
            values = displacement[self.j - 1] / radius ** (n + 1)
        return self.constant(n) * np.where(radius > 0, values, 0.0)


@dataclasses.dataclass(frozen=True)
class ShiftSpec:
    """
    A dyadic shift Ш: cubes map to one child, signatures map by σ.

    Args:
        child: The child position η (binary order) every cube maps to,
            or None for the child with the smallest flat index.
        signatures: Per cancellative signature position, the target
            position or None to drop the term. None means identity.
    """

    child: int | None = None
    signatures: tuple[int | None, ...] | None = None

    @classmethod
    def from_dict(cls, data: dict) -> ShiftSpec:
        """
        Build a shift spec from its JSON representation.

        Raises:
            InvalidSpecError: If the mapping is malformed.
        """
        if unknown := set(data) - {"child", "signatures"}:
            raise InvalidSpecError(f"{sorted(unknown)!r}: unknown shift fields")
        child = data.get("child")
        signatures = data.get("signatures")
        try:
            return cls(
                None if child is None else int(child),
                None if signatures is None else tuple(
                    None if s is None else int(s) for s in signatures
                ),
            )
        except (TypeError, ValueError) as exc:
            raise InvalidSpecError(f"{data!r}: malformed shift spec") from exc

    def to_dict(self) -> dict:
        """JSON representation of self."""
        return {
            "child": self.child,
            "signatures": None if self.signatures is None else list(self.signatures),
        }

    def signature_map(self, n: int) -> list[int | None]:
        """
        The signature map σ for dimension n.

        Raises:
            InvalidSpecError: If the map doesn't fit the dimension.
        """
        count = 2**n - 1
        if self.signatures is None:
            return list(range(count))
        if len(self.signatures) != count:
            raise InvalidSpecError(f"{self.signatures!r}: expected {count} entries")
        for target in self.signatures:
            if target is not None and not 0 <= target < count:
                raise InvalidSpecError(f"{target!r}: not a cancellative signature")
        return list(self.signatures)

    def child_index(self, system: DyadicSystem, level: int) -> np.ndarray:
        """Flat index of σ(Q) for every level-k cube Q."""
        table = system.child_table(level)
        if self.child is None:
            return table.min(axis=1)
        if not 0 <= self.child < table.shape[1]:
            raise InvalidSpecError(f"{self.child!r}: not a child position")
        return table[:, self.child]


@dataclasses.dataclass(frozen=True, eq=False)
class DenseOperator:
    """
    A linear operator on grid functions, as a matrix over the cell basis.

    Quadrature weights are folded into the matrix, so its singular values
    are the singular values of the operator on L²(grid).

    Args:
        grid: The grid.
        matrix: The (N^n, N^n) matrix acting on row-major cell values.
        source: Tag of the weight on the source space.
        target: Tag of the weight on the target space.
    """

    grid: TorusGrid
    matrix: np.ndarray
    source: str = "1"
    target: str = "1"

    def __post_init__(self) -> None:
        if self.matrix.shape != (self.grid.size, self.grid.size):
            raise DimensionMismatchError(
                f"{self.matrix.shape!r}: expected a square matrix "
                f"of side {self.grid.size}"
            )

    def apply(self, values: np.ndarray) -> np.ndarray:
        """Apply the operator to a grid function."""
        values = _checked(self.grid, values)
        return (self.matrix @ values.ravel()).reshape(self.grid.shape)

    def pairing(self, first: np.ndarray, second: np.ndarray) -> float:
        """⟨T e, f⟩ in L²(grid)."""
        second = _checked(self.grid, second)
        return float(np.sum(self.apply(first) * second) * self.grid.cell_volume)

    def adjoint(self) -> DenseOperator:
        """The adjoint operator, between the swapped weights."""
        return DenseOperator(self.grid, self.matrix.T, self.target, self.source)


def _checked(grid: TorusGrid, values: np.ndarray) -> np.ndarray:
    try:
        values = grid.conform(values)
    except InvalidGridError as exc:
        raise DimensionMismatchError(str(exc)) from exc
    if not np.all(np.isfinite(values)):
        raise NonFiniteInputError("grid function holds NaN or infinite values")
    return values


@functools.lru_cache(maxsize=None)
def _riesz_symbol(grid: TorusGrid, spec: RieszSpec) -> np.ndarray:
    freqs = np.fft.fftfreq(grid.N, 1 / grid.N)
    mesh = np.meshgrid(*([freqs] * grid.n), indexing="ij")
    radius = np.sqrt(functools.reduce(np.add, [xi**2 for xi in mesh]))
    direction = mesh[spec.j - 1]
    with np.errstate(divide="ignore", invalid="ignore"):
        symbol = -1j * direction / radius
    # The symbol stays odd only off the origin and the Nyquist rows.
    symbol[(radius == 0) | (direction == -grid.N // 2)] = 0
    symbol.setflags(write=False)
    return symbol


@functools.lru_cache(maxsize=None)
def _riesz_kernel(grid: TorusGrid, spec: RieszSpec) -> np.ndarray:
    cells = grid.wrap(np.arange(grid.N))
    mesh = np.meshgrid(*([cells] * grid.n), indexing="ij")
    kernel = spec.kernel([axis * grid.h for axis in mesh]) * grid.cell_volume
    kernel[mesh[spec.j - 1] == -grid.N // 2] = 0
    kernel.setflags(write=False)
    return kernel


def _check_direction(grid: TorusGrid, spec: RieszSpec) -> None:
    if spec.j > grid.n:
        raise InvalidSpecError(f"{spec.j!r}: direction exceeds the dimension {grid.n}")


def riesz_apply(spec: RieszSpec, values: np.ndarray, grid: TorusGrid) -> np.ndarray:
    """
    Apply the discrete Riesz transform R_j to a grid function.

    Args:
        spec: The discretization.
        values: The grid function.
        grid: The grid.

    Returns:
        R_j f, real for real input.

    Raises:
        NonFiniteInputError: If the input holds NaN or infinite values.
        InvalidSpecError: If j exceeds the dimension.
    """
    _check_direction(grid, spec)
    values = _checked(grid, values)
    if spec.mode == MULTIPLIER:
        spectrum = np.fft.fftn(values) * _riesz_symbol(grid, spec)
    else:
        spectrum = np.fft.fftn(values) * np.fft.fftn(_riesz_kernel(grid, spec))
    return np.real(np.fft.ifftn(spectrum))


def _circulant(grid: TorusGrid, response: np.ndarray) -> np.ndarray:
    coords = np.indices(grid.shape).reshape(grid.n, -1)
    offsets = (coords[:, :, None] - coords[:, None, :]) % grid.N
    return response[tuple(offsets)]


def riesz_matrix(spec: RieszSpec, grid: TorusGrid) -> DenseOperator:
    """
    Materialize R_j as a dense circulant matrix.

    Raises:
        InvalidSpecError: If j exceeds the dimension.
    """
    delta = np.zeros(grid.shape)
    delta[(0,) * grid.n] = 1.0
    return DenseOperator(grid, _circulant(grid, riesz_apply(spec, delta, grid)))


def commutator_matrix(
    values: np.ndarray,
    spec: RieszSpec,
    grid: TorusGrid,
    riesz: DenseOperator | None = None,
) -> DenseOperator:
    """
    The commutator [b, R_j] = M_b R_j - R_j M_b as a dense operator.

    Args:
        values: The symbol b.
        spec: The discretization of R_j.
        grid: The grid.
        riesz: A materialized R_j to reuse.

    Returns:
        The commutator.

    Raises:
        DimensionMismatchError: If b doesn't match the grid of riesz.
    """
    riesz = riesz or riesz_matrix(spec, grid)
    symbol = _checked(grid, values).ravel()
    matrix = (symbol[:, None] - symbol[None, :]) * riesz.matrix
    return DenseOperator(riesz.grid, matrix)


def weighted_conjugate(
    operator: DenseOperator, lam: Weight, mu: Weight
) -> DenseOperator:
    """
    The conjugated operator λ^{1/2} T μ^{-1/2}.

    Its singular values are those of T as a map L²_μ → L²_λ.

    Raises:
        DimensionMismatchError: If the weights live on another grid.
    """
    if lam.grid != operator.grid or mu.grid != operator.grid:
        raise DimensionMismatchError("weights and operator live on different grids")
    left = np.sqrt(lam.values).ravel()
    right = 1 / np.sqrt(mu.values).ravel()
    matrix = left[:, None] * operator.matrix * right[None, :]
    return DenseOperator(operator.grid, matrix, mu.tag, lam.tag)


def materialize(
    grid: TorusGrid, action: Callable[[np.ndarray], np.ndarray]
) -> DenseOperator:
    """Matrix of a linear map of grid functions, column by column."""
    matrix = np.empty((grid.size, grid.size))
    for column in range(grid.size):
        delta = np.zeros(grid.size)
        delta[column] = 1.0
        matrix[:, column] = np.asarray(action(delta.reshape(grid.shape))).ravel()
    return DenseOperator(grid, matrix)


def shift_coefficients(
    shift: ShiftSpec,
    coeffs: HaarCoefficients,
    scale: Sequence[np.ndarray] | None = None,
) -> list[np.ndarray]:
    """
    Move every Haar coefficient along the shift.

    The coefficient of (Q, ε) lands on (σ(Q), σ(ε)); terms whose
    signature maps to None, or whose target cube sits at the finest
    level, are dropped.

    Args:
        shift: The shift.
        coeffs: The Haar coefficients.
        scale: Optional per-level, per-cube factors applied on the way.

    Returns:
        The shifted coefficient tables.
    """
    system = coeffs.system
    grid = system.grid
    targets = shift.signature_map(grid.n)
    kept = [pos for pos, target in enumerate(targets) if target is not None]
    moved = [target for target in targets if target is not None]

    shifted = [np.zeros_like(table) for table in coeffs.levels]
    for level, table in enumerate(coeffs.levels[:-1]):
        rows = shift.child_index(system, level)
        block = table[:, kept]
        if scale is not None:
            block = block * scale[level][:, None]
        np.add.at(shifted[level + 1], (rows[:, None], np.array(moved)[None, :]), block)
    return shifted


def haar_shift_apply(
    shift: ShiftSpec, values: np.ndarray, system: DyadicSystem
) -> np.ndarray:
    """
    Apply the dyadic shift Шf = Σ ⟨f, h_Q^ε⟩ h_{σ(Q)}^{σ(ε)}.

    The cell-scale remainder of f is discarded.
    """
    coeffs = analyze(values, system)
    return synthesize_details(system, shift_coefficients(shift, coeffs))


def shift_bound(
    shift: ShiftSpec,
    system: DyadicSystem,
    weight: Weight,
    samples: int = 50,
    rng: np.random.Generator | None = None,
) -> float:
    """
    Empirical norm of Ш on L²_w over random inputs.

    Returns:
        The largest observed ‖Шf‖_{L²_w}/‖f‖_{L²_w}.
    """
    rng = rng or np.random.default_rng(0)
    best = 0.0
    for _ in range(samples):
        values = rng.standard_normal(system.grid.shape)
        image = haar_shift_apply(shift, values, system)
        norm = np.sum(values**2 * weight.values)
        ratio = math.sqrt(np.sum(image**2 * weight.values) / norm)
        best = max(best, ratio)
    logger.info(
        "%s: weighted shift bound %.6g over %d samples", weight.tag, best, samples
    )
    return best


def paraproduct_apply(
    kind: str,
    symbol: np.ndarray,
    values: np.ndarray,
    system: DyadicSystem,
    shift: ShiftSpec | None = None,
) -> np.ndarray:
    """
    Apply one paraproduct of the symbol b to a grid function f.

    Args:
        kind: "Pi" for Σ⟨b,h_Q^ε⟩⟨f⟩_Q h_Q^ε, "PiStar" for
            Σ⟨b,h_Q^ε⟩⟨f,h_Q^ε⟩1_Q/|Q|, "Gamma" for the mixed-signature
            products, "Remainder" for
            Σ⟨f,h_Q^ε⟩(⟨b⟩_{σ(Q)}-⟨b⟩_Q)h_{σ(Q)}^{σ(ε)}.
        symbol: The symbol b.
        values: The grid function f.
        system: The dyadic system of the Haar expansions.
        shift: The shift of the remainder. Defaults to ShiftSpec().

    Returns:
        The paraproduct, without cell-scale remainder.

    Raises:
        UnknownKindError: If the kind is unknown.
    """
    grid = system.grid
    if kind not in PARAPRODUCT_KINDS:
        raise UnknownKindError(f"{kind!r}: unknown paraproduct")
    b_coeffs = analyze(symbol, system)
    f_coeffs = analyze(values, system)

    if kind == PI:
        means = [system.level_means(grid.conform(values), k) for k in range(grid.L)]
        tables = [table * means[k][:, None] for k, table in enumerate(b_coeffs.levels)]
        return synthesize_details(system, tables)

    if kind == REMAINDER:
        shift = shift or ShiftSpec()
        b = grid.conform(symbol)
        b_means = [system.level_means(b, k) for k in range(grid.L + 1)]
        jumps = [
            b_means[k + 1][shift.child_index(system, k)] - b_means[k]
            for k in range(grid.L)
        ]
        return synthesize_details(system, shift_coefficients(shift, f_coeffs, jumps))

    signs = sign_matrix(grid.n)[:-1]
    result = np.zeros(grid.shape)
    for level, (cb, cf) in enumerate(zip(b_coeffs.levels, f_coeffs.levels)):
        volume = 2.0 ** (-level * grid.n)
        diagonal = np.sum(cb * cf, axis=1) / volume
        if kind == PI_STAR:
            result += system.spread(diagonal, level)
            continue
        products = (cb @ signs) * (cf @ signs) / volume - diagonal[:, None]
        finer = np.empty(system.count(level + 1))
        finer[system.child_table(level)] = products
        result += system.spread(finer, level + 1)
    return result


def _combined_paraproduct(symbol: np.ndarray, values: np.ndarray, system: DyadicSystem):
    return sum(
        paraproduct_apply(kind, symbol, values, system) for kind in (PI, PI_STAR, GAMMA)
    )


def decomposition_residual(
    symbol: np.ndarray, values: np.ndarray, shift: ShiftSpec, system: DyadicSystem
) -> float:
    """
    L² defect of the paraproduct decomposition of [b, Ш]f.

    Compares b·Шf - Ш(bf) with P(Шf) - Ш(Pf) + R_b f, P = Π + Π* + Γ.

    Raises:
        NotBandLimitedError: If b or f has a cell-scale remainder.
    """
    grid = system.grid
    symbol, values = grid.conform(symbol), grid.conform(values)
    for name, data in (("b", symbol), ("f", values)):
        if not analyze(data, system).is_band_limited(1e-10):
            raise NotBandLimitedError(f"{name}: input is not Haar band-limited")

    shifted = haar_shift_apply(shift, values, system)
    left = symbol * shifted - haar_shift_apply(shift, symbol * values, system)
    right = (
        _combined_paraproduct(symbol, shifted, system)
        - haar_shift_apply(shift, _combined_paraproduct(symbol, values, system), system)
        + paraproduct_apply(REMAINDER, symbol, values, system, shift)
    )
    return float(math.sqrt(np.sum((left - right) ** 2) * grid.cell_volume))


@dataclasses.dataclass(frozen=True, eq=False)
class SignCellFrame:
    """
    Grandchild pairs of a cube on which K_j keeps a fixed sign.

    Args:
        cube: The cube Q.
        direction: The Riesz direction j.
        pairs: Admissible grandchild pairs (P1, P2), P1 being the one
            with the smaller offset along j.
        g: The functions 2^{(k+1)n/2}(1_{P1} - 1_{P2}).
        G: The weighted indicators μ^{1/2}1_{P2}/μ(Q)^{1/2}.
        H: The weighted indicators λ^{-1/2}1_{P1}/λ^{-1}(Q)^{1/2}.
        signs: The sign of K_j(x1 - x2) on every pair.
        size_constant: min |K_j(x1 - x2)|·|Q| over every pair.
    """

    cube: DyadicCube
    direction: int
    pairs: tuple[tuple[DyadicCube, DyadicCube], ...]
    g: tuple[np.ndarray, ...]
    G: tuple[np.ndarray, ...]  # pylint: disable=invalid-name
    H: tuple[np.ndarray, ...]  # pylint: disable=invalid-name
    signs: tuple[int, ...]
    size_constant: float

    def difference_rank(self) -> int:
        """Rank of the g functions as vectors over the grandchildren."""
        grandchildren = [c for child in children(self.cube) for c in children(child)]
        masks = [c.mask() for c in grandchildren]
        rows = [[float(np.sum(g[mask])) for mask in masks] for g in self.g]
        return int(np.linalg.matrix_rank(np.array(rows)))


def _grandchild_offsets(cube: DyadicCube) -> dict[tuple[int, ...], DyadicCube]:
    grid = cube.grid
    size = cube.side_cells // 4
    offsets = {}
    for child in children(cube):
        for grandchild in children(child):
            position = tuple(
                ((a - b) % grid.N) // size
                for a, b in zip(grandchild.anchor, cube.anchor)
            )
            offsets[position] = grandchild
    return offsets


def _pair_kernel_range(
    first: DyadicCube, second: DyadicCube, direction: int
) -> tuple[int, float]:
    grid = first.grid
    axes = []
    for a1, a2 in zip(first.anchor, second.anchor):
        cells1 = a1 + np.arange(first.side_cells)
        cells2 = a2 + np.arange(second.side_cells)
        axes.append(grid.wrap(cells1[:, None] - cells2[None, :]).ravel() * grid.h)
    mesh = np.meshgrid(*axes, indexing="ij")
    kernel = RieszSpec(direction).kernel(mesh)
    signs = np.unique(np.sign(kernel))
    if signs.size != 1 or signs[0] == 0:
        raise SignChangeError(f"{first.key!r}, {second.key!r}: kernel changes sign")
    return int(signs[0]), float(np.min(np.abs(kernel)))


def sign_cell_frame(
    cube: DyadicCube, direction: int, mu: Weight, lam: Weight
) -> SignCellFrame:
    """
    Build the sign-cell frame of a cube.

    Grandchildren P1, P2 are admissible when their offsets along j are
    at least two grandchild sides apart.

    Args:
        cube: The cube Q, between levels 1 and L - 2.
        direction: The Riesz direction j.
        mu: The weight μ.
        lam: The weight λ.

    Returns:
        The frame.

    Raises:
        FrameLevelError: If Q has no grandchildren or wraps the torus.
        SignChangeError: If the kernel changes sign on a pair.
    """
    grid = cube.grid
    if not 1 <= cube.level <= grid.L - 2:
        raise FrameLevelError(f"{cube.key!r}: frames need levels 1 to {grid.L - 2}")
    if not 1 <= direction <= grid.n:
        raise InvalidSpecError(f"{direction!r}: direction must lie in [1, {grid.n}]")

    offsets = _grandchild_offsets(cube)
    axis = direction - 1
    lam_inv = lam.inverse()
    mu_mass = float(np.sum(mu.values[cube.mask()]) * grid.cell_volume)
    lam_inv_mass = float(np.sum(lam_inv.values[cube.mask()]) * grid.cell_volume)
    scale = 2.0 ** ((cube.level + 1) * grid.n / 2)

    pairs, g, G, H, signs, sizes = [], [], [], [], [], []
    for first, second in itertools.combinations(sorted(offsets), 2):
        if abs(first[axis] - second[axis]) < 2:
            continue
        if first[axis] > second[axis]:
            first, second = second, first
        low, high = offsets[first], offsets[second]
        sign, size = _pair_kernel_range(low, high, direction)
        low_mask, high_mask = low.mask(), high.mask()
        pairs.append((low, high))
        g.append(scale * (low_mask.astype(float) - high_mask.astype(float)))
        G.append(np.sqrt(mu.values) * high_mask / math.sqrt(mu_mass))
        H.append(np.sqrt(lam_inv.values) * low_mask / math.sqrt(lam_inv_mass))
        signs.append(sign)
        sizes.append(size)

    size_constant = min(sizes) * cube.volume
    logger.debug(
        "%s: %d sign-cell pairs, size constant %.6g",
        cube.key,
        len(pairs),
        size_constant,
    )
    return SignCellFrame(
        cube,
        direction,
        tuple(pairs),
        tuple(g),
        tuple(G),
        tuple(H),
        tuple(signs),
        size_constant,
    )


def _smooth_step(t: np.ndarray) -> np.ndarray:
    t = np.clip(t, 0.0, 1.0)
    with np.errstate(divide="ignore"):
        rise = np.where(t > 0, np.exp(-1 / np.where(t > 0, t, 1)), 0.0)
        fall = np.where(t < 1, np.exp(-1 / np.where(t < 1, 1 - t, 1)), 0.0)
    return rise / (rise + fall)


def window(u: np.ndarray) -> np.ndarray:
    """
    Smooth cutoff on [-1/2, 1/2): 1 for |u| <= 1/4, 0 near the edges.
    """
    return _smooth_step((0.5 - np.abs(u)) / 0.25)


@dataclasses.dataclass(frozen=True, eq=False)
class WhitneyExpansion:
    """
    Multiple Fourier coefficients of a windowed kernel on a Whitney pair.

    Args:
        pair: The Whitney pair (Q, R).
        direction: The Riesz direction j.
        lmax: The largest retained frequency |l|_∞.
        coefficients: Υ_l = |Q|^{1/2}|R|^{1/2}c_l, of shape (2·lmax+1,)^{2n},
            frequency l stored at index l + lmax.
        error: Relative L² reconstruction error of the kernel on Q×R.
    """

    pair: WhitneyPair
    direction: int
    lmax: int
    coefficients: np.ndarray
    error: float

    def coefficient(self, frequency: Sequence[int]) -> complex:
        """Υ at one frequency."""
        return complex(self.coefficients[tuple(f + self.lmax for f in frequency)])

    def shell(self, radius: int) -> np.ndarray:
        """Magnitudes |Υ_l| over the frequencies with |l|_∞ = radius."""
        span = np.arange(-self.lmax, self.lmax + 1)
        mesh = np.meshgrid(*([span] * self.coefficients.ndim), indexing="ij")
        norm = functools.reduce(np.maximum, [np.abs(axis) for axis in mesh])
        return np.abs(self.coefficients[norm == radius])


def whitney_kernel_coefficients(
    pair: WhitneyPair,
    direction: int = 1,
    lmax: int = 8,
    points: int = 32,
    spec: RieszSpec | None = None,
) -> WhitneyExpansion:
    """
    Expand the windowed kernel of a Whitney pair in a Fourier series.

    Each cube is doubled about its center and the kernel K_j(x - y) is
    multiplied by smooth cutoffs equal to one on the cubes themselves.
    The coefficients come from a midpoint rule on the doubled boxes.

    Args:
        pair: The Whitney pair (Q, R).
        direction: The Riesz direction j.
        lmax: The largest retained frequency |l|_∞, below points/2.
        points: Quadrature points per axis.
        spec: The kernel normalization. Defaults to the unnormalized one.

    Returns:
        The coefficient table and the reconstruction error.

    Raises:
        DiagonalOverlapError: If the doubled boxes meet the diagonal.
    """
    first = pair.first
    n = first.grid.n
    if not 2 * lmax < points:
        raise InvalidSpecError(f"{lmax!r}: lmax must stay below {points // 2}")
    spec = spec or RieszSpec(direction, KERNEL)
    side = first.side
    offset = [-d for d in pair.displacement]
    if all(abs(d) < 2 * side for d in offset):
        raise DiagonalOverlapError(f"{first.key!r}: doubled boxes meet the diagonal")

    nodes = -0.5 + (np.arange(points) + 0.5) / points
    mesh = np.meshgrid(*([nodes] * (2 * n)), indexing="ij")
    displacement = [offset[i] + 2 * side * (mesh[i] - mesh[n + i]) for i in range(n)]
    cutoff = functools.reduce(np.multiply, [window(axis) for axis in mesh])
    windowed = cutoff * spec.kernel(displacement)

    raw = np.fft.fftn(windowed) / points ** (2 * n)
    freqs = np.fft.fftfreq(points, 1 / points).astype(int)
    freq_mesh = np.meshgrid(*([freqs] * (2 * n)), indexing="ij")
    largest = functools.reduce(np.maximum, [np.abs(axis) for axis in freq_mesh])
    inside_box = largest <= lmax

    truncated = np.where(inside_box, raw, 0)
    rebuilt = np.real(np.fft.ifftn(truncated) * points ** (2 * n))
    core = functools.reduce(np.logical_and, [np.abs(axis) <= 0.25 for axis in mesh])
    exact = windowed[core]
    error = float(np.linalg.norm(rebuilt[core] - exact) / np.linalg.norm(exact))

    phase = functools.reduce(
        np.multiply,
        [np.exp(1j * math.pi * axis * (1 - 1 / points)) for axis in freq_mesh],
    )
    centered = np.fft.fftshift(raw * phase)
    middle = points // 2
    box = tuple(slice(middle - lmax, middle + lmax + 1) for _ in range(2 * n))
    coefficients = first.volume * centered[box]
    logger.debug("%s: Whitney expansion error %.3g", first.key, error)
    return WhitneyExpansion(pair, direction, lmax, coefficients, error)
