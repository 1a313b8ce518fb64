""" Singular spectra, Schatten-Lorentz norms and NWO checks. """

from __future__ import annotations

import dataclasses
import logging
import math
from typing import Sequence

import numpy as np
from scipy import linalg

from schattencheck.dyadic import DyadicCube, DyadicSystem
from schattencheck.haar import Signature, haar_function
from schattencheck.operators import DenseOperator
from schattencheck.sequences import lorentz_norm
from schattencheck.weights import WeightPair, reverse_holder_exponent


logger = logging.getLogger(__name__)

ZERO_THRESHOLD = 1e-12

G_FAMILY = "G"
H_FAMILY = "H"
G_NECESSITY = "G-necessity"
H_NECESSITY = "H-necessity"
NWO_KINDS = (G_FAMILY, H_FAMILY, G_NECESSITY, H_NECESSITY)

Family = list[tuple[DyadicCube, np.ndarray]]


class SchattenError(Exception):
    """Common base class for exceptions related to Schatten norms."""


class NonFiniteMatrixError(SchattenError):
    """The matrix holds NaN or infinite entries."""


class NWOSupportError(SchattenError):
    """A family function is nonzero outside its cube."""


class FrameMismatchError(SchattenError):
    """Two frames aren't indexed by the same cubes."""


class UnknownFamilyError(SchattenError):
    """The NWO family kind is unknown."""


@dataclasses.dataclass(frozen=True, eq=False)
class SingularSpectrum:
    """
    The singular values of an operator.

    Args:
        values: s_1 >= s_2 >= ... >= 0.
        shape: The shape of the decomposed matrix.
    """

    values: np.ndarray
    shape: tuple[int, int]

    @property
    def threshold(self) -> float:
        """Values below this are numerically zero."""
        return ZERO_THRESHOLD * (float(self.values[0]) if self.values.size else 0.0)

    @property
    def significant(self) -> np.ndarray:
        """The values above the numerical-zero threshold."""
        return self.values[self.values > self.threshold]

    @property
    def rank(self) -> int:
        """Numerical rank."""
        return int(self.significant.size)

    @property
    def largest(self) -> float:
        """The operator norm."""
        return float(self.values[0]) if self.values.size else 0.0


def singular_values(operator: DenseOperator | np.ndarray) -> SingularSpectrum:
    """
    The full singular spectrum of an operator, by dense decomposition.

    Raises:
        NonFiniteMatrixError: If the matrix holds NaN or infinite entries.
    """
    if isinstance(operator, DenseOperator):
        matrix = operator.matrix
    else:
        matrix = np.asarray(operator)
    if not np.all(np.isfinite(matrix)):
        raise NonFiniteMatrixError("matrix holds NaN or infinite entries")
    values = linalg.svd(matrix, compute_uv=False, check_finite=False)
    values = np.clip(values, 0.0, None)
    return SingularSpectrum(values, matrix.shape)


def schatten_lorentz_norm(spectrum: SingularSpectrum, p: float, q: float) -> float:
    """
    The S^{p,q} norm of a spectrum.

    The weak norm (q = ∞) only ranges over the significant values.

    Raises:
        SequenceError: If an exponent is out of range.
    """
    if math.isinf(q):
        return lorentz_norm(spectrum.significant, p, q)
    return lorentz_norm(spectrum.values, p, q)


def trace_pairing(first: np.ndarray, second: np.ndarray) -> float:
    """
    tr(AB) for two explicit matrices.

    Bounded in absolute value by Σ_k s_k(A)s_k(B).
    """
    return float(np.einsum("ij,ji->", first, second))


def nwo_family(
    kind: str,
    system: DyadicSystem,
    pair: WeightPair,
    levels: Sequence[int] | None = None,
    signature: Signature | None = None,
) -> Family:
    """
    A weighted cube-indexed family from the Schatten bounds of commutators.

    Args:
        kind: "G" for λ^{1/2}|Q|^{1/2}h_Q^ε/λ(Q)^{1/2}, "H" for
            μ^{-1/2}1_Q/μ^{-1}(Q)^{1/2}, "G-necessity" for
            μ^{1/2}1_Q/μ(Q)^{1/2} and "H-necessity" for
            λ^{-1/2}|Q|^{1/2}h_Q^ε/λ^{-1}(Q)^{1/2}.
        system: The dyadic system.
        pair: The weights μ, λ.
        levels: The levels to include. Defaults to every level below L.
        signature: The Haar signature ε. Defaults to the first
            cancellative one.

    Returns:
        (cube, function) pairs, level-major.

    Raises:
        UnknownFamilyError: If the kind is unknown.
    """
    if kind not in NWO_KINDS:
        raise UnknownFamilyError(f"{kind!r}: unknown NWO family")
    grid = system.grid
    levels = range(grid.L) if levels is None else levels
    signature = signature or Signature.from_position(grid.n, 0)
    flat = Signature.from_position(grid.n, 2**grid.n - 1)

    density = {
        G_FAMILY: pair.lam,
        H_FAMILY: pair.mu_inv,
        G_NECESSITY: pair.mu,
        H_NECESSITY: pair.lam_inv,
    }[kind]
    oscillating = kind in (G_FAMILY, H_NECESSITY)

    family = []
    for level in levels:
        masses = density.cube_masses(system, level)
        for cube in system.cubes(level):
            if oscillating:
                base = haar_function(cube, signature) * math.sqrt(cube.volume)
            else:
                base = haar_function(cube, flat) * math.sqrt(cube.volume)
            scale = math.sqrt(masses[cube.flat_index])
            function = np.sqrt(density.values) * base / scale
            family.append((cube, function))
    return family


def nwo_ratio(family: Family, r: float) -> tuple[float, DyadicCube | None]:
    """
    Largest normalized L^r size over a cube-indexed family.

    Args:
        family: (cube, function) pairs.
        r: The exponent, r > 2.

    Returns:
        The supremum of ‖e_Q‖_r / |Q|^{1/r - 1/2} and the cube reaching it.

    Raises:
        NWOSupportError: If a function leaks outside its cube.
    """
    best, worst = 0.0, None
    for cube, function in family:
        outside = np.abs(function[~cube.mask()])
        if outside.size and float(outside.max()) > 1e-14:
            raise NWOSupportError(f"{cube.key!r}: function leaks outside its cube")
        norm = float(np.sum(np.abs(function) ** r) * cube.grid.cell_volume) ** (1 / r)
        ratio = norm / cube.volume ** (1 / r - 1 / 2)
        if ratio > best:
            best, worst = ratio, cube
    return best, worst


def nwo_exponent(
    pair: WeightPair,
    sigmas: Sequence[float] = (0.05, 0.1, 0.25, 0.5, 1.0),
    bound: float = 2.0,
) -> float:
    """
    An NWO exponent r = 2(1 + σ) for the weighted families of a pair.

    σ is the smallest reverse-Hölder exponent among μ, λ, μ^{-1}, λ^{-1}.
    """
    chosen = [
        reverse_holder_exponent(weight, sigmas, bound)[0]
        for weight in (pair.mu, pair.lam, pair.mu_inv, pair.lam_inv)
    ]
    r = 2 * (1 + min(chosen))
    logger.debug("NWO exponent r=%s from σ candidates %s", r, chosen)
    return r


def rs_pairing_sum(
    operator: DenseOperator,
    first: Family,
    second: Family,
    p: float,
    q: float | None = None,
) -> float:
    """
    The ℓ^{p,q} norm of the pairings ⟨T e_Q, f_Q⟩ over matched frames.

    Raises:
        FrameMismatchError: If the frames are indexed by different cubes.
    """
    if [cube for cube, _ in first] != [cube for cube, _ in second]:
        raise FrameMismatchError("frames are indexed by different cubes")
    pairings = [
        abs(operator.pairing(e_q, f_q)) for (_, e_q), (_, f_q) in zip(first, second)
    ]
    return lorentz_norm(pairings, p, p if q is None else q)
