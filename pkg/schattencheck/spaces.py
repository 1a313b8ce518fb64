""" Weighted symbol-space norms: oscillations, Besov, W_ν, BMO and medians. """

from __future__ import annotations

import dataclasses
import functools
import itertools
import logging
import math
import warnings
from typing import Iterator, Sequence

import numpy as np

from schattencheck.dyadic import (
    DyadicCube,
    DyadicSystem,
    EmptyRegionError,
    InvalidGridError,
    Region,
    TorusGrid,
    all_systems,
    enlarge,
)
from schattencheck.haar import analyze
from schattencheck.sequences import IndexedSequence, lorentz_norm
from schattencheck.weights import Weight, WeightPair, mass


logger = logging.getLogger(__name__)

L1_NU = "L1-nu"
L2_LAM_MU = "L2-lam-mu"
L2_MUINV_LAMINV = "L2-muinv-laminv"
MEDIAN_L1_NU = "median-L1-nu"
VARIANTS = (L1_NU, L2_LAM_MU, L2_MUINV_LAMINV, MEDIAN_L1_NU)

AVERAGE = "average"
HAAR = "haar"
MARTINGALE_L1_NU = "martingale-L1nu"
MARTINGALE_L2_LAM_MU = "martingale-L2lammu"
MARTINGALE_L2_MUINV_LAMINV = "martingale-L2muinvlaminv"
FORMS = (
    AVERAGE,
    HAAR,
    MARTINGALE_L1_NU,
    MARTINGALE_L2_LAM_MU,
    MARTINGALE_L2_MUINV_LAMINV,
)

R_NU = "nu"
R_LAMINV_MU = "laminv-mu"
R_NUINV = "nuinv"
R_LAM_MUINV = "lam-muinv"
R_CHOICES = (R_NU, R_LAMINV_MU, R_NUINV, R_LAM_MUINV)

ONE_SYSTEM = "one-system"
INTERSECTION = "intersection"


class SpaceError(Exception):
    """Common base class for exceptions related to symbol-space norms."""


class ShapeMismatchError(SpaceError):
    """The symbol doesn't match the grid of the weights."""


class UnknownVariantError(SpaceError):
    """The oscillation variant, Besov form or R(Q) choice is unknown."""


class InvalidExponentError(SpaceError):
    """The norm exponent is not positive."""


class InvalidScaleError(SpaceError):
    """The smoothing scale lies outside (0, 1/4)."""


def _conform(grid: TorusGrid, values: np.ndarray) -> np.ndarray:
    try:
        return grid.conform(values)
    except InvalidGridError as exc:
        raise ShapeMismatchError(str(exc)) from exc


def _check_exponent(p: float) -> None:
    if not p > 0:
        raise InvalidExponentError(f"{p!r}: exponent must be positive")


@dataclasses.dataclass(frozen=True)
class OscillationReport:
    """
    Per-cube oscillations of a symbol over one dyadic system.

    Args:
        variant: The oscillation variant.
        factor: The enlargement factor c.
        system: The system indexing the cubes.
        values: The oscillation of every cube, keyed by cube key.
    """

    variant: str
    factor: float
    system: DyadicSystem
    values: IndexedSequence

    def norm(self, p: float, q: float | None = None) -> float:
        """The ℓ^{p,q} norm of the values; q defaults to p."""
        return lorentz_norm(self.values, p, p if q is None else q)

    def per_level_max(self) -> list[float]:
        """Largest value at every level, coarse to fine."""
        tables = self.values.to_levels(self.system)
        return [float(np.max(table)) for table in tables]

    def rows(self) -> Iterator[tuple[int, int, int, str, float]]:
        """Yield (omega-index, level, flat index, variant, value) tuples."""
        for (omega, level, flat), value in zip(self.values.keys, self.values.values):
            yield omega, level, flat, self.variant, float(value)


def median_value(values: np.ndarray, region: Region) -> float:
    """
    A median of a grid function over a region.

    Ties are broken by taking the lower median of the sorted cell values.

    Args:
        values: The grid function.
        region: A nonempty region.

    Returns:
        A value m such that both {b < m} and {b > m} cover at most half
        the region.

    Raises:
        EmptyRegionError: If the region is empty.
    """
    if region.is_empty:
        raise EmptyRegionError("a median needs a nonempty region")
    cells = np.sort(region.select(_conform(region.grid, values)))
    return float(cells[(cells.size - 1) // 2])


def _pair_weights(weights: WeightPair | Weight, variant: str) -> tuple[Weight, ...]:
    if variant not in VARIANTS:
        raise UnknownVariantError(f"{variant!r}: unknown oscillation variant")
    if isinstance(weights, Weight):
        if variant not in (L1_NU, MEDIAN_L1_NU):
            raise SpaceError(f"{variant!r}: variant needs both μ and λ")
        return (weights,)
    if variant in (L1_NU, MEDIAN_L1_NU):
        return (weights.nu,)
    if variant == L2_LAM_MU:
        return (weights.mu, weights.lam)
    return (weights.lam_inv, weights.mu_inv)


def cube_oscillation(
    values: np.ndarray,
    cube: DyadicCube,
    weights: tuple[Weight, ...],
    variant: str,
    factor: float,
) -> float:
    """
    Oscillation of a grid function over the enlargement of one cube.

    Args:
        values: The grid function.
        cube: The cube Q.
        weights: (ν,) for the L1 variants; (normalizer, integrand weight)
            for the L2 variants.
        variant: The oscillation variant.
        factor: The enlargement factor c.

    Returns:
        The oscillation of the function over cQ.
    """
    region = enlarge(cube, factor)
    grid = cube.grid
    cells = region.select(values)
    if variant == MEDIAN_L1_NU:
        spread = np.abs(cells - median_value(values, region))
    else:
        spread = np.abs(cells - cells.mean())

    if variant in (L1_NU, MEDIAN_L1_NU):
        return float(spread.sum() * grid.cell_volume / mass(weights[0], region))
    normalizer, density = weights
    integral = np.sum(spread**2 * region.select(density.values)) * grid.cell_volume
    return math.sqrt(integral / mass(normalizer, region))


def oscillation_sequence(
    values: np.ndarray,
    weights: WeightPair | Weight,
    system: DyadicSystem,
    factor: float = 3.0,
    variant: str = L1_NU,
) -> OscillationReport:
    """
    The cube-indexed oscillation sequence of a symbol.

    Args:
        values: The symbol b.
        weights: Either a weight pair, or ν alone for the L1 variants.
        system: The dyadic system indexing the cubes.
        factor: The enlargement factor c.
        variant: One of "L1-nu", "L2-lam-mu", "L2-muinv-laminv" or
            "median-L1-nu".

    Returns:
        The oscillation report.

    Raises:
        ShapeMismatchError: If the symbol doesn't match the grid.
        UnknownVariantError: If the variant is unknown.
    """
    chosen = _pair_weights(weights, variant)
    values = _conform(chosen[0].grid, values)
    if chosen[0].grid != system.grid:
        raise ShapeMismatchError("weights and system live on different grids")

    cubes = list(system.cubes())
    logger.debug("%s: %s oscillations of %d cubes", system.label, variant, len(cubes))
    oscillations = np.array(
        [cube_oscillation(values, cube, chosen, variant, factor) for cube in cubes]
    )
    sequence = IndexedSequence(tuple(cube.key for cube in cubes), oscillations)
    return OscillationReport(variant, factor, system, sequence)


def r_factors(
    pair: WeightPair, system: DyadicSystem, level: int
) -> dict[str, np.ndarray]:
    """
    The four interchangeable Besov normalizations R(Q) of one level.

    Returns:
        A mapping from R(Q) choice to per-cube values, by flat index.
    """
    volume = 2.0 ** (-level * pair.grid.n)

    def masses(weight: Weight) -> np.ndarray:
        return weight.cube_masses(system, level)

    return {
        R_NU: volume / masses(pair.nu),
        R_LAMINV_MU: volume / np.sqrt(masses(pair.lam_inv) * masses(pair.mu)),
        R_NUINV: masses(pair.nu.inverse()) / volume,
        R_LAM_MUINV: np.sqrt(masses(pair.lam) * masses(pair.mu_inv)) / volume,
    }


def besov_level_sums(
    values: np.ndarray,
    pair: WeightPair,
    p: float,
    system: DyadicSystem,
    form: str = AVERAGE,
    rq: str = R_NU,
) -> np.ndarray:
    """
    Per-level sums of the p-th powers of one Besov form.

    Args:
        values: The symbol b.
        pair: The weights μ, λ.
        p: The exponent, p > 0.
        system: The dyadic system.
        form: The Besov form.
        rq: The R(Q) normalization of the Haar form.

    Returns:
        One sum per level, coarse to fine. The Haar and martingale forms
        have no terms at the finest level, which sums to zero.

    Raises:
        InvalidExponentError: If p isn't positive.
        UnknownVariantError: If the form or R(Q) choice is unknown.
    """
    _check_exponent(p)
    grid = system.grid
    values = _conform(grid, values)
    sums = np.zeros(grid.L + 1)

    if form == AVERAGE:
        for level in range(grid.L + 1):
            means = system.spread(system.level_means(values, level), level)
            deviation = np.abs(values - means)
            spreads = system.level_sums(deviation, level) * grid.cell_volume
            sums[level] = np.sum((spreads / pair.nu.cube_masses(system, level)) ** p)
        return sums

    if form == HAAR:
        if rq not in R_CHOICES:
            raise UnknownVariantError(f"{rq!r}: unknown R(Q) choice")
        coeffs = analyze(values, system)
        for level, table in enumerate(coeffs.levels):
            scale = r_factors(pair, system, level)[rq] * 2.0 ** (level * grid.n / 2)
            sums[level] = np.sum((np.abs(table) * scale[:, None]) ** p)
        return sums

    means = [system.level_means(values, k) for k in range(grid.L + 1)]
    for level in range(grid.L):
        children = system.child_table(level)
        jumps = means[level + 1][children] - means[level][:, None]
        child_volume = 2.0 ** (-(level + 1) * grid.n)
        if form == MARTINGALE_L1_NU:
            nu = pair.nu.cube_masses(system, level)
            terms = np.abs(jumps).sum(axis=1) * child_volume / nu
        elif form == MARTINGALE_L2_LAM_MU:
            density = pair.lam.cube_masses(system, level + 1)[children]
            terms = np.sqrt(
                np.sum(jumps**2 * density, axis=1) / pair.mu.cube_masses(system, level)
            )
        elif form == MARTINGALE_L2_MUINV_LAMINV:
            density = pair.mu_inv.cube_masses(system, level + 1)[children]
            lam_inv = pair.lam_inv.cube_masses(system, level)
            terms = np.sqrt(np.sum(jumps**2 * density, axis=1) / lam_inv)
        else:
            raise UnknownVariantError(f"{form!r}: unknown Besov form")
        sums[level] = np.sum(terms**p)
    return sums


def besov_norm(
    values: np.ndarray,
    pair: WeightPair,
    p: float,
    form: str = AVERAGE,
    system: DyadicSystem | None = None,
    scope: str = ONE_SYSTEM,
    rq: str = R_NU,
) -> float:
    """
    The weighted dyadic Besov norm of a symbol.

    Args:
        values: The symbol b.
        pair: The weights μ, λ; ν is derived from them.
        p: The exponent, p > 0.
        form: One of the equivalent forms: "average", "haar",
            "martingale-L1nu", "martingale-L2lammu" or
            "martingale-L2muinvlaminv".
        system: The system of the one-system scope. Defaults to the
            unshifted one.
        scope: "one-system" or "intersection", the latter summing the
            per-system norms over all 3^n shifted systems.
        rq: The R(Q) normalization of the Haar form.

    Returns:
        The norm.

    Raises:
        InvalidExponentError: If p isn't positive.
        UnknownVariantError: If the form, scope or R(Q) choice is unknown.
        ShapeMismatchError: If the symbol doesn't match the grid.
    """
    _check_exponent(p)
    if form not in FORMS:
        raise UnknownVariantError(f"{form!r}: unknown Besov form")
    grid = pair.grid
    values = _conform(grid, values)

    if scope == ONE_SYSTEM:
        systems = [system or DyadicSystem(grid, (0,) * grid.n)]
    elif scope == INTERSECTION:
        systems = all_systems(grid)
    else:
        raise UnknownVariantError(f"{scope!r}: unknown Besov scope")

    return sum(
        float(np.sum(besov_level_sums(values, pair, p, each, form, rq))) ** (1 / p)
        for each in systems
    )


def wnu_norm(
    values: np.ndarray,
    nu: Weight,
    system: DyadicSystem | None = None,
    factor: float = 3.0,
) -> float:
    """
    The oscillation-space norm: weak ℓ^{n,∞} of the L1-ν oscillations.

    Raises:
        ShapeMismatchError: If the symbol doesn't match the grid.
    """
    grid = nu.grid
    system = system or DyadicSystem(grid, (0,) * grid.n)
    report = oscillation_sequence(values, nu, system, factor, L1_NU)
    return report.norm(grid.n, math.inf)


def holder_violations(
    values: np.ndarray,
    pair: WeightPair,
    system: DyadicSystem,
    factor: float = 3.0,
    rtol: float = 1e-12,
) -> list[tuple[int, int, int]]:
    """
    Cubes where the L1-ν oscillation exceeds its Hölder bound.

    Hölder's inequality with exponents (4, 4, 2) bounds the L1-ν value A₁
    by (A₂A₃)^{1/2}(μ(cQ)λ^{-1}(cQ))^{1/4}/ν(cQ)^{1/2}, A₂ and A₃ the two
    L2 values. With μ = λ this reduces to A₁ <= (A₂A₃)^{1/2}.

    Returns:
        The keys of the violating cubes; empty up to rounding.
    """
    reports = [
        oscillation_sequence(values, pair, system, factor, variant).values.values
        for variant in (L1_NU, L2_LAM_MU, L2_MUINV_LAMINV)
    ]
    violations = []
    for index, cube in enumerate(system.cubes()):
        region = enlarge(cube, factor)
        first, second, third = (report[index] for report in reports)
        bound = (
            math.sqrt(second * third)
            * (mass(pair.mu, region) * mass(pair.lam_inv, region)) ** 0.25
            / math.sqrt(mass(pair.nu, region))
        )
        if first > bound * (1 + rtol):
            violations.append(cube.key)
    return violations


@dataclasses.dataclass(frozen=True)
class BMOProfile:
    """
    Weighted mean oscillation, overall and per dyadic scale.

    Args:
        bmo: The supremum over all cubes.
        per_level: The supremum over the cubes of every level.
    """

    bmo: float
    per_level: tuple[float, ...]


def bmo_vmo_profile(
    values: np.ndarray,
    weight: Weight,
    systems: DyadicSystem | Sequence[DyadicSystem] | None = None,
    factor: float = 1.0,
) -> BMOProfile:
    """
    The BMO_w norm of a symbol and its per-scale profile.

    Vanishing of the fine-scale entries is the torus analogue of VMO.

    Args:
        values: The symbol b.
        weight: The weight w.
        systems: The systems to scan. Defaults to all shifted systems.
        factor: The enlargement factor of the scanned cubes.

    Returns:
        The profile.
    """
    if systems is None:
        systems = all_systems(weight.grid)
    elif isinstance(systems, DyadicSystem):
        systems = [systems]

    per_level = np.zeros(weight.grid.L + 1)
    for system in systems:
        report = oscillation_sequence(values, weight, system, factor, L1_NU)
        per_level = np.maximum(per_level, report.per_level_max())
    return BMOProfile(float(per_level.max()), tuple(per_level.tolist()))


def slobodeckii_norm(values: np.ndarray, mu: Weight, lam: Weight, p: float) -> float:
    """
    The two-weight Sobolev-Slobodeckii norm on the torus.

    The double sum runs over distinct cells x, y with torus distance
    d(x, y), with summand |b(x) - b(y)|^p d^{-2n} λ(x) μ^{-1}(y) h^{2n}.

    Args:
        values: The symbol b.
        mu: The weight μ.
        lam: The weight λ.
        p: The exponent; values below 2 are computed with a warning.

    Returns:
        The p-th root of the double sum.

    Raises:
        InvalidExponentError: If p isn't positive.
        ShapeMismatchError: If the symbol doesn't match the grid.
    """
    _check_exponent(p)
    if p < 2:
        warnings.warn(f"p={p!r} is below 2, outside the defining range", UserWarning)
    grid = mu.grid
    values = _conform(grid, values)
    mu_inv = 1 / mu.values

    total = 0.0
    for delta in itertools.product(range(grid.N), repeat=grid.n):
        if not any(delta):
            continue
        wrapped = grid.wrap(np.array(delta)) * grid.h
        distance = math.sqrt(float(np.sum(wrapped**2)))
        axes = tuple(range(grid.n))
        partner = np.roll(values, tuple(-d for d in delta), axis=axes)
        partner_weight = np.roll(mu_inv, tuple(-d for d in delta), axis=axes)
        total += float(
            np.sum(np.abs(values - partner) ** p * lam.values * partner_weight)
        ) / distance ** (2 * grid.n)
    return (total * grid.cell_volume**2) ** (1 / p)


def mollify(
    values: np.ndarray, epsilon: float, grid: TorusGrid | None = None
) -> np.ndarray:
    """
    Periodic convolution with a smooth compactly supported bump.

    The bump exp(-1/(1-|x|²)) is sampled at the cell displacements,
    scaled to radius ε and normalized to unit discrete mass, so scales
    below the cell width reproduce the input.

    Args:
        values: The grid function.
        epsilon: The smoothing scale, in (0, 1/4).
        grid: The grid. Inferred from the shape of values if omitted.

    Returns:
        The smoothed grid function.

    Raises:
        InvalidScaleError: If ε lies outside (0, 1/4).
    """
    if not 0 < epsilon < 0.25:
        raise InvalidScaleError(f"{epsilon!r}: smoothing scale must lie in (0, 1/4)")
    values = np.asarray(values, dtype=float)
    if grid is not None:
        values = _conform(grid, values)
    size = values.shape[0]

    offsets = ((np.arange(size) + size // 2) % size - size // 2) / size
    radius = functools.reduce(np.add.outer, [offsets**2] * values.ndim) / epsilon**2
    kernel = np.zeros(values.shape)
    inside = radius < 1
    kernel[inside] = np.exp(-1 / (1 - radius[inside]))
    kernel /= kernel.sum()
    return np.real(np.fft.ifftn(np.fft.fftn(values) * np.fft.fftn(kernel)))

