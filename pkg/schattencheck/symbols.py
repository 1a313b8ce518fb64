""" Resolution-independent symbol families sampled on torus grids. """

from __future__ import annotations

import dataclasses
import functools
from typing import ClassVar

import numpy as np

from schattencheck.dyadic import (
    DyadicError,
    DyadicSystem,
    InvalidGridError,
    TorusGrid,
    parse_shift,
)
from schattencheck.haar import Signature, haar_function, synthesize_details
from schattencheck.spaces import SpaceError, mollify


class SymbolError(Exception):
    """Common base class for exceptions related to symbols."""


class InvalidSymbolError(SymbolError):
    """The symbol specification is malformed."""


class UnsampleableSymbolError(SymbolError):
    """The symbol can't be sampled on the requested grid."""


def _torus_radius(grid: TorusGrid, center: tuple[float, ...]) -> np.ndarray:
    squares = []
    for coordinate in center:
        delta = np.abs(grid.axis_centers() - coordinate % 1.0)
        squares.append(np.minimum(delta, 1 - delta) ** 2)
    return np.sqrt(functools.reduce(np.add.outer, squares))


def _floats(values, name: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in values)
    except (TypeError, ValueError) as exc:
        raise InvalidSymbolError(f"{values!r}: invalid {name}") from exc


@dataclasses.dataclass(frozen=True)
class Symbol:
    """
    Common base class for symbol recipes.

    Args:
        id: The symbol's identifier in reports.
    """

    kind: ClassVar[str] = ""
    fields: ClassVar[frozenset[str]] = frozenset()

    id: str  # pylint: disable=invalid-name

    def sample(self, grid: TorusGrid) -> np.ndarray:
        """Sample the symbol as a grid function."""
        raise NotImplementedError

    def to_dict(self) -> dict:
        """JSON representation of self."""
        data = {"kind": self.kind}
        for field in dataclasses.fields(self):
            value = getattr(self, field.name)
            data[field.name] = list(value) if isinstance(value, tuple) else value
        return data


@dataclasses.dataclass(frozen=True)
class HaarAtom(Symbol):
    """A single Haar function h_Q^ε."""

    kind: ClassVar[str] = "haar"
    fields: ClassVar[frozenset[str]] = frozenset(
        {"level", "index", "signature", "shift"}
    )

    level: int = 0
    index: tuple[int, ...] = ()
    signature: int = 0
    shift: tuple[float, ...] = ()

    @classmethod
    def from_dict(cls, data: dict) -> HaarAtom:
        """Build a Haar atom from its JSON representation."""
        return cls(
            str(data["id"]),
            int(data.get("level", 0)),
            tuple(int(m) for m in data["index"]),
            int(data.get("signature", 0)),
            _floats(data.get("shift", [0.0] * len(data["index"])), "shift"),
        )

    def sample(self, grid: TorusGrid) -> np.ndarray:
        if len(self.index) != grid.n:
            raise UnsampleableSymbolError(f"{self.id}: index doesn't match n={grid.n}")
        if self.level >= grid.L:
            raise UnsampleableSymbolError(
                f"{self.id}: level {self.level} needs L > {self.level}"
            )
        try:
            system = DyadicSystem(grid, parse_shift(self.shift))
        except DyadicError as exc:
            raise InvalidSymbolError(f"{self.id}: {exc}") from exc
        if not 0 <= self.signature < 2**grid.n - 1:
            raise InvalidSymbolError(
                f"{self.id}: {self.signature!r} isn't cancellative"
            )
        signature = Signature.from_position(grid.n, self.signature)
        return haar_function(system.cube(self.level, self.index), signature)


@dataclasses.dataclass(frozen=True)
class HaarPolynomial(Symbol):
    """
    Random cancellative Haar coefficients on the coarse levels of the
    unshifted system, with magnitude decay**k at level k.
    """

    kind: ClassVar[str] = "haar-polynomial"
    fields: ClassVar[frozenset[str]] = frozenset({"depth", "decay", "seed"})

    depth: int = 3
    decay: float = 0.5
    seed: int = 0

    @classmethod
    def from_dict(cls, data: dict) -> HaarPolynomial:
        """Build a Haar polynomial from its JSON representation."""
        return cls(
            str(data["id"]),
            int(data.get("depth", 3)),
            float(data.get("decay", 0.5)),
            int(data.get("seed", 0)),
        )

    def sample(self, grid: TorusGrid) -> np.ndarray:
        system = DyadicSystem(grid, (0,) * grid.n)
        rng = np.random.default_rng(self.seed)
        levels = []
        for level in range(grid.L):
            shape = (system.count(level), 2**grid.n - 1)
            if level < self.depth:
                levels.append(self.decay**level * rng.standard_normal(shape))
            else:
                levels.append(np.zeros(shape))
        return synthesize_details(system, levels)


@dataclasses.dataclass(frozen=True)
class Bump(Symbol):
    """The smooth bump exp(-1/(1-r²)), r the scaled torus distance."""

    kind: ClassVar[str] = "bump"
    fields: ClassVar[frozenset[str]] = frozenset({"center", "radius"})

    center: tuple[float, ...] = ()
    radius: float = 0.35

    @classmethod
    def from_dict(cls, data: dict) -> Bump:
        """Build a bump from its JSON representation."""
        return cls(
            str(data["id"]),
            _floats(data["center"], "center"),
            float(data.get("radius", 0.35)),
        )

    def profile(self, r: np.ndarray) -> np.ndarray:
        """The radial profile."""
        values = np.zeros(r.shape)
        inside = r < 1
        values[inside] = np.exp(-1 / (1 - r[inside] ** 2))
        return values

    def sample(self, grid: TorusGrid) -> np.ndarray:
        if len(self.center) != grid.n:
            raise UnsampleableSymbolError(f"{self.id}: center doesn't match n={grid.n}")
        if not 0 < self.radius <= 0.5:
            raise InvalidSymbolError(f"{self.id}: radius must lie in (0, 1/2]")
        return self.profile(_torus_radius(grid, self.center) / self.radius)


@dataclasses.dataclass(frozen=True)
class Cone(Bump):
    """The Lipschitz bump max(0, 1 - r)."""

    kind: ClassVar[str] = "cone"

    def profile(self, r: np.ndarray) -> np.ndarray:
        return np.maximum(0.0, 1 - r)


@dataclasses.dataclass(frozen=True)
class MollifiedIndicator(Symbol):
    """The indicator of a torus box [lower, upper), mollified at scale ε."""

    kind: ClassVar[str] = "mollified-indicator"
    fields: ClassVar[frozenset[str]] = frozenset({"lower", "upper", "epsilon"})

    lower: tuple[float, ...] = ()
    upper: tuple[float, ...] = ()
    epsilon: float = 0.05

    @classmethod
    def from_dict(cls, data: dict) -> MollifiedIndicator:
        """Build a mollified indicator from its JSON representation."""
        return cls(
            str(data["id"]),
            _floats(data["lower"], "lower corner"),
            _floats(data["upper"], "upper corner"),
            float(data.get("epsilon", 0.05)),
        )

    def sample(self, grid: TorusGrid) -> np.ndarray:
        if len(self.lower) != grid.n or len(self.upper) != grid.n:
            raise UnsampleableSymbolError(f"{self.id}: corners don't match n={grid.n}")
        factors = []
        for low, high in zip(self.lower, self.upper):
            local = (grid.axis_centers() - low) % 1.0
            factors.append((local < (high - low) % 1.0).astype(float))
        indicator = functools.reduce(np.multiply.outer, factors)
        try:
            return mollify(indicator, self.epsilon, grid)
        except SpaceError as exc:
            raise InvalidSymbolError(f"{self.id}: {exc}") from exc


@dataclasses.dataclass(frozen=True)
class ConstantSymbol(Symbol):
    """A constant symbol."""

    kind: ClassVar[str] = "constant"
    fields: ClassVar[frozenset[str]] = frozenset({"value"})

    value: float = 1.0

    @classmethod
    def from_dict(cls, data: dict) -> ConstantSymbol:
        """Build a constant symbol from its JSON representation."""
        return cls(str(data["id"]), float(data.get("value", 1.0)))

    def sample(self, grid: TorusGrid) -> np.ndarray:
        return np.full(grid.shape, self.value)


@dataclasses.dataclass(frozen=True)
class SampledSymbol(Symbol):
    """Explicit cell values, flat in row-major order."""

    kind: ClassVar[str] = "samples"
    fields: ClassVar[frozenset[str]] = frozenset({"values"})

    values: tuple[float, ...] = ()

    @classmethod
    def from_dict(cls, data: dict) -> SampledSymbol:
        """Build a sampled symbol from its JSON representation."""
        return cls(str(data["id"]), _floats(data["values"], "samples"))

    def sample(self, grid: TorusGrid) -> np.ndarray:
        try:
            return grid.conform(np.array(self.values))
        except InvalidGridError as exc:
            raise UnsampleableSymbolError(f"{self.id}: {exc}") from exc


SYMBOL_KINDS = {
    cls.kind: cls
    for cls in (
        HaarAtom,
        HaarPolynomial,
        Bump,
        Cone,
        MollifiedIndicator,
        ConstantSymbol,
        SampledSymbol,
    )
}


def parse_symbol(data: dict) -> Symbol:
    """
    Build a symbol from its JSON representation.

    Args:
        data: A mapping with "id" and "kind" keys plus kind-specific
            fields.

    Returns:
        The symbol.

    Raises:
        InvalidSymbolError: If the mapping is malformed.
    """
    try:
        kind = data["kind"]
        if kind not in SYMBOL_KINDS:
            raise InvalidSymbolError(f"{kind!r}: unknown symbol kind")
        cls = SYMBOL_KINDS[kind]
        if unknown := set(data) - cls.fields - {"id", "kind"}:
            raise InvalidSymbolError(f"{sorted(unknown)!r}: unknown symbol fields")
        return cls.from_dict(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidSymbolError(f"{data!r}: malformed symbol spec") from exc


def default_center(n: int) -> tuple[float, ...]:
    """An off-center lattice point for every L >= 1."""
    return (1 / 3,) + (1 / 6,) * (n - 1)


def default_symbols(n: int) -> list[Symbol]:
    """
    The default family: four Haar atoms at levels 0 and 1, two Haar
    polynomials, a smooth bump and a mollified indicator.
    """
    last = 2**n - 2
    corner = (1,) + (0,) * (n - 1)
    return [
        HaarAtom("haar-0-first", 0, (0,) * n, 0, (0.0,) * n),
        HaarAtom("haar-0-last", 0, (0,) * n, last, (1 / 3,) * n),
        HaarAtom("haar-1-first", 1, corner, 0, (0.0,) * n),
        HaarAtom(
            "haar-1-last",
            1,
            tuple(reversed(corner)),
            last,
            (2 / 3,) + (0.0,) * (n - 1),
        ),
        HaarPolynomial("haar-poly-1", 3, 0.5, 1),
        HaarPolynomial("haar-poly-2", 3, 0.5, 2),
        Bump("bump", (0.5,) * n, 0.35),
        MollifiedIndicator(
            "mollified-box", (0.25,) * n, (0.625,) + (0.5,) * (n - 1), 0.05
        ),
    ]


def default_critical_symbols(n: int) -> list[Symbol]:
    """A smooth bump with nonvanishing gradient away from its center."""
    return [Bump("bump", (0.5,) * n, 0.35)]


def default_weak_symbols(n: int) -> list[Symbol]:
    """A Lipschitz bump."""
    return [Cone("cone", (0.5,) * n, 0.35)]
