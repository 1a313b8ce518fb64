""" Experiment configuration: defaults, JSON loading and validation. """

from __future__ import annotations

import dataclasses
import json
import math
import pathlib
from typing import Any

from schattencheck.operators import InvalidSpecError, ShiftSpec
from schattencheck.symbols import (
    Symbol,
    SymbolError,
    default_center,
    default_critical_symbols,
    default_symbols,
    default_weak_symbols,
    parse_symbol,
)
from schattencheck.weights import WeightError, WeightSpec


# Largest dense matrix side an SVD experiment may build.
MAX_MATRIX_SIDE = 2304

EQUIVALENCE = "equivalence"
CRITICAL = "critical"
WEAK = "weak"
WNU = "wnu"
EXPERIMENTS = (EQUIVALENCE, CRITICAL, WEAK, WNU)


class ConfigError(Exception):
    """Common base class for exceptions related to configuration."""


class UnknownFieldError(ConfigError):
    """The configuration holds an unknown key."""


class InvalidValueError(ConfigError):
    """A configuration value has the wrong type or is out of range."""


class ConfigFileError(ConfigError):
    """The configuration file can't be read or parsed."""


@dataclasses.dataclass(frozen=True)
class WeightPairSpec:
    """
    A named pair of weight recipes.

    Args:
        id: The pair's identifier in reports.
        mu: The source weight.
        lam: The target weight.
    """

    id: str  # pylint: disable=invalid-name
    mu: WeightSpec
    lam: WeightSpec

    @classmethod
    def from_dict(cls, data: dict) -> WeightPairSpec:
        """
        Build a weight pair from its JSON representation.

        Raises:
            ConfigError: If the mapping is malformed.
        """
        _check_keys(data, {"id", "mu", "lam"}, "weight pair")
        try:
            return cls(
                str(data["id"]),
                WeightSpec.from_dict(data["mu"]),
                WeightSpec.from_dict(data["lam"]),
            )
        except KeyError as exc:
            raise InvalidValueError(f"{data!r}: weight pair lacks {exc}") from exc
        except WeightError as exc:
            raise InvalidValueError(str(exc)) from exc

    def to_dict(self) -> dict:
        """JSON representation of self."""
        return {"id": self.id, "mu": self.mu.to_dict(), "lam": self.lam.to_dict()}


def default_weight_pairs(n: int) -> tuple[WeightPairSpec, ...]:
    """
    The unweighted pair plus two genuinely two-weight pairs, with power
    weights singular at an off-center lattice point.
    """
    center = default_center(n)
    one = WeightSpec("constant", value=1.0)
    pairs = (
        WeightPairSpec("unweighted", one, one),
        WeightPairSpec(
            "power-half",
            WeightSpec("power", alpha=0.5, center=center),
            WeightSpec("power", alpha=-0.5, center=center),
        ),
        WeightPairSpec("power-one", WeightSpec("power", alpha=1.0, center=center), one),
    )
    # Exponents must stay inside (-n, n).
    return pairs if n > 1 else pairs[:2]


@dataclasses.dataclass(frozen=True)
class CriticalConfig:
    """
    Settings of the critical-index experiment.

    Args:
        levels: The resolutions whose increments are compared, at least
            three of them.
        resolution: The resolution the level sums are computed at.
        contrast_p: The supercritical exponent of the contrast run.
        mollify: Optional mollification scale applied to every symbol.
        symbols: The symbols.
    """

    levels: tuple[int, ...] = (3, 4, 5)
    resolution: int = 6
    contrast_p: float = 3.0
    mollify: float | None = None
    symbols: tuple[Symbol, ...] | None = None


@dataclasses.dataclass(frozen=True)
class ExperimentConfig:
    """
    Everything an experiment run depends on.

    Args:
        n: The dimension.
        levels: The resolutions L.
        weight_pairs: The weight pairs.
        symbols: The symbol family of the equivalence experiments.
        weak_symbols: The symbols of the weak-Schatten experiment.
        p_values: The Schatten and Besov exponents.
        q_values: The secondary Lorentz exponents of the ℓ^{p,q} analogues.
        enlargement: The enlargement factor c.
        direction: The Riesz direction j.
        shift: The dyadic shift of the shift-bound diagnostics.
        seed: The random seed.
        workers: The number of concurrently running cells.
        band: The accepted max/min spread of ratios.
        critical: Settings of the critical-index experiment.
        plots: Whether to emit SVG plots.
        out: The output directory.
    """

    n: int = 2
    levels: tuple[int, ...] = (2, 3, 4)
    weight_pairs: tuple[WeightPairSpec, ...] | None = None
    symbols: tuple[Symbol, ...] | None = None
    weak_symbols: tuple[Symbol, ...] | None = None
    p_values: tuple[float, ...] = (4.0,)
    q_values: tuple[float, ...] = (4.0, math.inf)
    enlargement: float = 3.0
    direction: int = 1
    shift: ShiftSpec = ShiftSpec()
    seed: int = 0
    workers: int = 4
    band: float = 100.0
    critical: CriticalConfig = CriticalConfig()
    plots: bool = False
    out: str = "results"

    def __post_init__(self) -> None:
        if self.weight_pairs is None:
            object.__setattr__(self, "weight_pairs", default_weight_pairs(self.n))
        if self.symbols is None:
            object.__setattr__(self, "symbols", tuple(default_symbols(self.n)))
        if self.weak_symbols is None:
            weak = tuple(default_weak_symbols(self.n))
            object.__setattr__(self, "weak_symbols", weak)
        if self.critical.symbols is None:
            critical = dataclasses.replace(
                self.critical, symbols=tuple(default_critical_symbols(self.n))
            )
            object.__setattr__(self, "critical", critical)
        self.validate()

    def validate(self) -> None:
        """
        Check every field.

        Raises:
            InvalidValueError: If a value is out of range.
        """
        if self.n < 1:
            raise InvalidValueError(f"{self.n!r}: n must be positive")
        if not self.levels or any(level < 1 for level in self.levels):
            raise InvalidValueError(f"{self.levels!r}: levels must be positive")
        if not self.weight_pairs:
            raise InvalidValueError("at least one weight pair is needed")
        if len({pair.id for pair in self.weight_pairs}) != len(self.weight_pairs):
            raise InvalidValueError("weight pair ids must be unique")
        if len({symbol.id for symbol in self.symbols}) != len(self.symbols):
            raise InvalidValueError("symbol ids must be unique")
        if not self.p_values or any(not p > 0 for p in self.p_values):
            raise InvalidValueError(f"{self.p_values!r}: p values must be positive")
        if not self.q_values or any(not q > 0 for q in self.q_values):
            raise InvalidValueError(f"{self.q_values!r}: q values must be positive")
        if self.enlargement < 1:
            raise InvalidValueError(
                f"{self.enlargement!r}: enlargement must be at least 1"
            )
        if not 1 <= self.direction <= self.n:
            raise InvalidValueError(
                f"{self.direction!r}: direction must lie in 1..{self.n}"
            )
        if self.workers < 1:
            raise InvalidValueError(f"{self.workers!r}: workers must be positive")
        if not self.band >= 1:
            raise InvalidValueError(f"{self.band!r}: band must be at least 1")
        try:
            self.shift.signature_map(self.n)
        except InvalidSpecError as exc:
            raise InvalidValueError(str(exc)) from exc

        critical = self.critical
        ascending = list(critical.levels) == sorted(set(critical.levels))
        if len(critical.levels) < 3 or not ascending:
            raise InvalidValueError(
                f"{critical.levels!r}: critical levels must be three or more "
                "ascending levels"
            )
        if critical.levels[-1] > critical.resolution:
            raise InvalidValueError(
                f"{critical.levels!r}: critical levels exceed "
                f"resolution {critical.resolution}"
            )
        if not critical.contrast_p > self.n:
            raise InvalidValueError(
                f"{critical.contrast_p!r}: contrast exponent must exceed n"
            )
        if critical.mollify is not None and not 0 < critical.mollify < 0.25:
            raise InvalidValueError(
                f"{critical.mollify!r}: mollification must lie in (0, 1/4)"
            )

    def check_equivalence(self) -> None:
        """
        Check the preconditions of the Schatten experiments.

        Raises:
            InvalidValueError: If p doesn't exceed n or a matrix would
                exceed the SVD cap.
        """
        # n = 1 is the Hilbert transform.
        for p in self.p_values:
            if not p > self.n:
                raise InvalidValueError(
                    f"{p!r}: the equivalence experiment needs p > n, "
                    "run the critical experiment for p = n"
                )
        self.check_matrix_size()

    def check_riesz(self) -> None:
        """
        Check the preconditions of the weak-Schatten experiment.

        Raises:
            InvalidValueError: If n < 2 or a matrix exceeds the SVD cap.
        """
        self.check_dimension(WEAK)
        self.check_matrix_size()

    def check_dimension(self, experiment: str) -> None:
        """
        Check that an experiment other than the equivalence one runs in
        two dimensions or more.

        Raises:
            InvalidValueError: If n < 2.
        """
        if self.n < 2:
            raise InvalidValueError(
                f"{self.n!r}: the {experiment} experiment needs n >= 2"
            )

    def check_matrix_size(self) -> None:
        """
        Check every resolution against the dense SVD cap.

        Raises:
            InvalidValueError: If a resolution would exceed the SVD cap.
        """
        for level in self.levels:
            side = (3 * 2**level) ** self.n
            if side > MAX_MATRIX_SIDE:
                raise InvalidValueError(
                    f"{level!r}: matrix side {side} exceeds {MAX_MATRIX_SIDE}"
                )

    @classmethod
    def from_dict(cls, data: dict[str, Any], **overrides: Any) -> ExperimentConfig:
        """
        Build a configuration from its JSON representation.

        Args:
            data: The JSON document. Missing fields take their defaults.
            overrides: Field values taking precedence over data, with
                None meaning "not given".

        Returns:
            The configuration.

        Raises:
            ConfigError: If the document is malformed.
        """
        if not isinstance(data, dict):
            raise InvalidValueError(
                f"{type(data).__name__}: configuration must be an object"
            )
        known = {field.name for field in dataclasses.fields(cls)}
        _check_keys(data, known, "configuration")

        kwargs: dict[str, Any] = {}
        try:
            if "n" in data:
                kwargs["n"] = _integer(data["n"], "n")
            if "levels" in data:
                kwargs["levels"] = tuple(
                    _integer(level, "levels") for level in data["levels"]
                )
            if "weight_pairs" in data:
                kwargs["weight_pairs"] = tuple(
                    WeightPairSpec.from_dict(pair) for pair in data["weight_pairs"]
                )
            for key in ("symbols", "weak_symbols"):
                if key in data:
                    kwargs[key] = tuple(parse_symbol(symbol) for symbol in data[key])
            if "p_values" in data:
                kwargs["p_values"] = tuple(
                    _number(p, "p_values") for p in data["p_values"]
                )
            if "q_values" in data:
                kwargs["q_values"] = tuple(
                    _number(q, "q_values") for q in data["q_values"]
                )
            for key in ("enlargement", "band"):
                if key in data:
                    kwargs[key] = _number(data[key], key)
            for key in ("direction", "seed", "workers"):
                if key in data:
                    kwargs[key] = _integer(data[key], key)
            if "shift" in data:
                kwargs["shift"] = ShiftSpec.from_dict(data["shift"])
            if "critical" in data:
                kwargs["critical"] = _critical(data["critical"])
            if "plots" in data:
                if not isinstance(data["plots"], bool):
                    raise InvalidValueError(
                        f"{data['plots']!r}: plots must be a boolean"
                    )
                kwargs["plots"] = data["plots"]
            if "out" in data:
                kwargs["out"] = str(data["out"])
        except (SymbolError, InvalidSpecError) as exc:
            raise InvalidValueError(str(exc)) from exc
        except TypeError as exc:
            raise InvalidValueError(f"malformed configuration: {exc}") from exc

        kwargs.update(
            {key: value for key, value in overrides.items() if value is not None}
        )
        return cls(**kwargs)

    def to_dict(self) -> dict[str, Any]:
        """JSON representation of self."""
        return {
            "n": self.n,
            "levels": list(self.levels),
            "weight_pairs": [pair.to_dict() for pair in self.weight_pairs],
            "symbols": [symbol.to_dict() for symbol in self.symbols],
            "weak_symbols": [symbol.to_dict() for symbol in self.weak_symbols],
            "p_values": [_json_number(p) for p in self.p_values],
            "q_values": [_json_number(q) for q in self.q_values],
            "enlargement": self.enlargement,
            "direction": self.direction,
            "shift": self.shift.to_dict(),
            "seed": self.seed,
            "workers": self.workers,
            "band": self.band,
            "critical": {
                "levels": list(self.critical.levels),
                "resolution": self.critical.resolution,
                "contrast_p": self.critical.contrast_p,
                "mollify": self.critical.mollify,
                "symbols": [symbol.to_dict() for symbol in self.critical.symbols],
            },
            "plots": self.plots,
            "out": self.out,
        }


def _check_keys(data: dict, allowed: set[str], what: str) -> None:
    if not isinstance(data, dict):
        raise InvalidValueError(f"{data!r}: {what} must be an object")
    if unknown := set(data) - allowed:
        raise UnknownFieldError(f"{sorted(unknown)!r}: unknown {what} fields")


def _integer(value: Any, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise InvalidValueError(f"{value!r}: {name} must be an integer")
    return value


def _number(value: Any, name: str) -> float:
    if value == "inf":
        return math.inf
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InvalidValueError(f"{value!r}: {name} must be a number or \"inf\"")
    return float(value)


def _json_number(value: float) -> float | str:
    return "inf" if math.isinf(value) else value


def _critical(data: dict) -> CriticalConfig:
    allowed = {"levels", "resolution", "contrast_p", "mollify", "symbols"}
    _check_keys(data, allowed, "critical")
    kwargs: dict[str, Any] = {}
    if "levels" in data:
        kwargs["levels"] = tuple(
            _integer(level, "critical levels") for level in data["levels"]
        )
    if "resolution" in data:
        kwargs["resolution"] = _integer(data["resolution"], "critical resolution")
    if "contrast_p" in data:
        kwargs["contrast_p"] = _number(data["contrast_p"], "contrast_p")
    if data.get("mollify") is not None:
        kwargs["mollify"] = _number(data["mollify"], "mollify")
    if "symbols" in data:
        kwargs["symbols"] = tuple(parse_symbol(symbol) for symbol in data["symbols"])
    return CriticalConfig(**kwargs)


def load_config(path: str | pathlib.Path, **overrides: Any) -> ExperimentConfig:
    """
    Load a configuration from a JSON file.

    Args:
        path: The file.
        overrides: Field values taking precedence over the file.

    Returns:
        The configuration.

    Raises:
        ConfigFileError: If the file can't be read or isn't JSON.
        ConfigError: If the document is malformed.
    """
    try:
        with open(path, encoding="utf-8") as infile:
            data = json.load(infile)
    except OSError as exc:
        raise ConfigFileError(f"{path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigFileError(f"{path}: invalid JSON ({exc.msg})") from exc
    return ExperimentConfig.from_dict(data, **overrides)
