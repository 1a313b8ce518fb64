""" Experiment drivers: cells, concurrent execution and report rows. """

from __future__ import annotations

import asyncio
import functools
import itertools
import logging
import math
from typing import Callable, Sequence

import numpy as np
from tqdm.asyncio import tqdm

from schattencheck.config import (
    CRITICAL,
    EQUIVALENCE,
    WEAK,
    WNU,
    ExperimentConfig,
    WeightPairSpec,
)
from schattencheck.dyadic import DyadicSystem, TorusGrid
from schattencheck.operators import (
    RieszSpec,
    commutator_matrix,
    riesz_matrix,
    shift_bound,
    weighted_conjugate,
)
from schattencheck.report import DEGENERATE, Report, Row
from schattencheck.schatten import (
    NWO_KINDS,
    SingularSpectrum,
    nwo_exponent,
    nwo_family,
    nwo_ratio,
    schatten_lorentz_norm,
    singular_values,
)
from schattencheck.spaces import (
    AVERAGE,
    FORMS,
    INTERSECTION,
    L1_NU,
    L2_LAM_MU,
    L2_MUINV_LAMINV,
    MEDIAN_L1_NU,
    ONE_SYSTEM,
    VARIANTS,
    besov_level_sums,
    besov_norm,
    holder_violations,
    mollify,
    oscillation_sequence,
    wnu_norm,
)
from schattencheck.symbols import Symbol, SymbolError
from schattencheck.weights import (
    WeightError,
    WeightPair,
    a2_constant,
    make_weight,
    reverse_holder_exponent,
)


logger = logging.getLogger(__name__)

# Values at or below this, relative to the symbol's size, count as zero.
DEGENERACY = 1e-12

SIGMAS = (0.05, 0.1, 0.25, 0.5, 1.0)

Job = Callable[[], Report]


class ExperimentError(Exception):
    """Common base class for exceptions related to experiments."""


class CellError(ExperimentError):
    """A cell couldn't be computed."""


@functools.lru_cache(maxsize=8)
def _riesz(grid: TorusGrid, direction: int):
    return riesz_matrix(RieszSpec(direction), grid)


def _weights(spec: WeightPairSpec, grid: TorusGrid) -> WeightPair:
    try:
        return WeightPair(
            make_weight(grid, spec.mu, "mu"), make_weight(grid, spec.lam, "lam")
        )
    except WeightError as exc:
        raise CellError(f"{spec.id}: {exc}") from exc


def _sample(symbol: Symbol, grid: TorusGrid) -> np.ndarray:
    try:
        return symbol.sample(grid)
    except SymbolError as exc:
        raise CellError(str(exc)) from exc


def _ratio(value: float, partner: float, scale: float) -> float | None:
    """value/partner, or None when the partner is numerically zero."""
    if partner <= DEGENERACY * scale:
        return None
    return value / partner


def _size(values: np.ndarray) -> float:
    return max(1.0, float(np.max(np.abs(values))))


def _conjugated_spectrum(
    values: np.ndarray, pair: WeightPair, direction: int
) -> SingularSpectrum:
    grid = pair.grid
    spec = RieszSpec(direction)
    commutator = commutator_matrix(values, spec, grid, _riesz(grid, direction))
    return singular_values(weighted_conjugate(commutator, pair.lam, pair.mu))


def cell_id(experiment: str, symbol: str, weights: str, level: int) -> str:
    """The identifier of a cell's spectrum file."""
    return f"{experiment}-{symbol}-{weights}-L{level}"


async def gather(jobs: Sequence[Job], workers: int, desc: str) -> list[Report]:
    """
    Run independent jobs concurrently, each in a worker thread.

    Args:
        jobs: Zero-argument callables.
        workers: The largest number of jobs running at once.
        desc: The progress bar's description.

    Returns:
        The job results, in job order regardless of completion order.
    """
    semaphore = asyncio.Semaphore(workers)

    async def run(index: int, job: Job) -> tuple[int, Report]:
        async with semaphore:
            return index, await asyncio.to_thread(job)

    tasks = {asyncio.create_task(run(index, job)) for index, job in enumerate(jobs)}
    pbar = tqdm.as_completed(tasks, desc=desc, unit="cell", leave=False)

    results: list[Report | None] = [None] * len(jobs)
    try:
        for coro in pbar:
            index, result = await coro
            results[index] = result
    except BaseException:
        # Cleanup.
        for task in tasks:
            task.cancel()
        raise

    return results


def _merge(experiment: str, parts: Sequence[Report]) -> Report:
    report = Report(experiment)
    for part in parts:
        report.extend(part)
    return report


def weight_diagnostics(
    experiment: str, spec: WeightPairSpec, level: int, config: ExperimentConfig
) -> Report:
    """
    A₂ constants, reverse-Hölder exponents, shift bounds and NWO sizes of
    a weight pair at one resolution.
    """
    grid = TorusGrid(config.n, level)
    pair = _weights(spec, grid)
    report = Report(experiment)

    def row(form: str, scope: str, value: float, p: float | None = None) -> None:
        report.rows.append(
            Row(experiment, None, spec.id, config.n, level, p, None, form, scope, value)
        )

    for weight in (pair.mu, pair.lam, pair.nu):
        row("a2", weight.tag, a2_constant(weight))
    for weight in (pair.mu, pair.lam, pair.mu_inv, pair.lam_inv):
        sigma, constant = reverse_holder_exponent(weight, SIGMAS)
        row("reverse-holder", weight.tag, sigma)
        row("reverse-holder-constant", weight.tag, constant)

    system = DyadicSystem(grid, (0,) * grid.n)
    for weight in (pair.mu, pair.lam):
        rng = np.random.default_rng(config.seed)
        bound = shift_bound(config.shift, system, weight, 20, rng)
        row("shift-bound", weight.tag, bound)

    r = nwo_exponent(pair, SIGMAS)
    for kind in NWO_KINDS:
        sup, _ = nwo_ratio(nwo_family(kind, system, pair), r)
        row("nwo", kind, sup, r)

    logger.debug("%s: diagnostics of %s at L=%d", experiment, spec.id, level)
    return report


def _diagnostic_jobs(experiment: str, config: ExperimentConfig) -> list[Job]:
    return [
        functools.partial(weight_diagnostics, experiment, spec, level, config)
        for spec, level in itertools.product(config.weight_pairs, config.levels)
    ]


def spread_rows(experiment: str, report: Report, config: ExperimentConfig) -> list[Row]:
    """
    Max/min spread of the positive ratios over symbols and resolutions,
    per weight pair, exponents, form and scope.
    """
    groups: dict[tuple, list[float]] = {}
    for row in report.rows:
        if row.symbol_id is None or row.ratio is None or not row.ratio > 0:
            continue
        key = (row.weight_id, row.p, row.q, row.form, row.scope, row.ratio_partner)
        groups.setdefault(key, []).append(row.ratio)

    rows = []
    for (weight_id, p, q, form, scope, partner), ratios in groups.items():
        spread = max(ratios) / min(ratios)
        if spread > config.band:
            logger.info(
                "%s: %s %s/%s spread %.4g exceeds %.4g",
                experiment,
                weight_id,
                form,
                scope,
                spread,
                config.band,
            )
        rows.append(
            Row(
                experiment,
                None,
                weight_id,
                config.n,
                None,
                p,
                q,
                "spread",
                f"{form}/{scope}/{partner}",
                spread,
                "band",
                spread / config.band,
            )
        )
    return rows


def equivalence_cell(
    symbol: Symbol, spec: WeightPairSpec, level: int, config: ExperimentConfig
) -> Report:
    """
    Schatten norms of the conjugated commutator against every Besov form
    and scope, for one symbol, weight pair and resolution.
    """
    grid = TorusGrid(config.n, level)
    pair = _weights(spec, grid)
    values = _sample(symbol, grid)
    scale = _size(values)
    spectrum = _conjugated_spectrum(values, pair, config.direction)

    cell = cell_id(EQUIVALENCE, symbol.id, spec.id, level)
    report = Report(EQUIVALENCE, spectra={cell: spectrum.values})
    base = {"experiment": EQUIVALENCE, "symbol_id": symbol.id, "weight_id": spec.id}
    base.update(n=config.n, L=level)

    for p in config.p_values:
        schatten = schatten_lorentz_norm(spectrum, p, p)
        besov = {
            (form, scope): besov_norm(values, pair, p, form, scope=scope)
            for form in FORMS
            for scope in (ONE_SYSTEM, INTERSECTION)
        }
        reference = besov[(AVERAGE, INTERSECTION)]
        ratio = _ratio(schatten, reference, scale)
        partner = f"{AVERAGE}/{INTERSECTION}" if ratio is not None else DEGENERATE
        report.rows.append(
            Row(
                **base,
                p=p,
                q=p,
                form="schatten",
                scope="operator",
                value=schatten,
                ratio_partner=partner,
                ratio=ratio,
            )
        )
        for (form, scope), value in besov.items():
            ratio = _ratio(schatten, value, scale)
            report.rows.append(
                Row(
                    **base,
                    p=p,
                    q=p,
                    form=form,
                    scope=scope,
                    value=value,
                    ratio_partner="schatten" if ratio is not None else DEGENERATE,
                    ratio=ratio,
                )
            )
        for q in config.q_values:
            if q != p:
                value = schatten_lorentz_norm(spectrum, p, q)
                report.rows.append(
                    Row(
                        **base,
                        p=p,
                        q=q,
                        form="schatten-lorentz",
                        scope="operator",
                        value=value,
                    )
                )

    logger.debug("%s: done", cell)
    return report


async def run_equivalence(config: ExperimentConfig) -> Report:
    """
    Compare ‖λ^{1/2}[b, R_j]μ^{-1/2}‖_{S^p} with the Besov norms of b.

    Raises:
        ConfigError: If p doesn't exceed n or a matrix is too large.
        ExperimentError: If a cell can't be computed.
    """
    config.check_equivalence()
    jobs = _diagnostic_jobs(EQUIVALENCE, config)
    jobs += [
        functools.partial(equivalence_cell, symbol, spec, level, config)
        for spec, level, symbol in itertools.product(
            config.weight_pairs, config.levels, config.symbols
        )
    ]
    parts = await gather(jobs, config.workers, "Equivalence cells")
    report = _merge(EQUIVALENCE, parts)
    report.rows.extend(spread_rows(EQUIVALENCE, report, config))
    return report


def increments_verdict(
    increments: Sequence[float], levels: Sequence[int], linear: bool
) -> bool:
    """
    Judge the growth of level increments.

    Args:
        increments: The increment of every level.
        levels: The levels to judge, ascending.
        linear: Judge linear growth (every increment positive and within
            a factor 2 of the previous one) instead of convergence (the
            last increment at most half the first).

    Returns:
        The verdict.
    """
    chosen = [increments[level] for level in levels]
    if linear:
        if not all(value > 0 for value in chosen):
            return False
        return all(0.5 <= b / a <= 2 for a, b in itertools.pairwise(chosen))
    return chosen[-1] <= 0.5 * chosen[0]


def critical_cell(symbol: Symbol, config: ExperimentConfig) -> Report:
    """
    Partial dyadic Besov sums at p = n and at the contrast exponent, for
    one symbol with ν ≡ 1.
    """
    critical = config.critical
    grid = TorusGrid(config.n, critical.resolution)
    pair = WeightPair.unweighted(grid)
    values = _sample(symbol, grid)
    if critical.mollify is not None:
        values = mollify(values, critical.mollify, grid)
    scale = _size(values)
    system = DyadicSystem(grid, (0,) * grid.n)

    report = Report(CRITICAL)
    base = {"experiment": CRITICAL, "symbol_id": symbol.id, "weight_id": "unweighted"}
    base.update(n=config.n, L=critical.resolution)

    for p, linear in ((float(config.n), True), (critical.contrast_p, False)):
        increments = besov_level_sums(values, pair, p, system, AVERAGE)
        partial = np.cumsum(increments)
        degenerate = partial[-1] <= DEGENERACY * scale
        for level, (increment, total) in enumerate(zip(increments, partial)):
            scope = f"level-{level}"
            report.rows.append(
                Row(
                    **base,
                    p=p,
                    q=p,
                    form="partial-sum",
                    scope=scope,
                    value=float(total),
                )
            )
            ratio = None
            if level:
                ratio = _ratio(increment, increments[level - 1], scale)
            partner = None
            if level:
                partner = f"level-{level - 1}" if ratio is not None else DEGENERATE
            report.rows.append(
                Row(
                    **base,
                    p=p,
                    form="increment",
                    q=p,
                    scope=scope,
                    value=float(increment),
                    ratio_partner=partner,
                    ratio=ratio,
                )
            )

        verdict = increments_verdict(increments, critical.levels, linear)
        report.rows.append(
            Row(
                **base,
                p=p,
                form="verdict",
                q=p,
                scope="linear-growth" if linear else "convergent",
                value=float(verdict and not degenerate),
                ratio_partner=DEGENERATE if degenerate else None,
            )
        )
        outcome = "degenerate" if degenerate else verdict
        logger.info("%s: p=%s %s", symbol.id, p, outcome)

    return report


async def run_critical(config: ExperimentConfig) -> Report:
    """
    Track the dyadic Besov sums at the critical index p = n level by
    level, against a supercritical contrast exponent.

    Raises:
        ConfigError: If n < 2.
        ExperimentError: If a cell can't be computed.
    """
    config.check_dimension(CRITICAL)
    jobs = [
        functools.partial(critical_cell, symbol, config)
        for symbol in config.critical.symbols
    ]
    return _merge(CRITICAL, await gather(jobs, config.workers, "Critical cells"))


def weak_cell(
    symbol: Symbol, spec: WeightPairSpec, level: int, config: ExperimentConfig
) -> Report:
    """
    The weak Schatten norm S^{n,∞} of the conjugated commutator against
    the oscillation-space norm, for one symbol, weight pair and resolution.
    """
    grid = TorusGrid(config.n, level)
    pair = _weights(spec, grid)
    values = _sample(symbol, grid)
    scale = _size(values)
    spectrum = _conjugated_spectrum(values, pair, config.direction)
    n = float(config.n)

    weak = schatten_lorentz_norm(spectrum, n, math.inf)
    strong = schatten_lorentz_norm(spectrum, n, n)
    oscillation = wnu_norm(values, pair.nu, factor=config.enlargement)
    ratio = _ratio(weak, oscillation, scale)

    cell = cell_id(WEAK, symbol.id, spec.id, level)
    report = Report(WEAK, spectra={cell: spectrum.values})
    base = {"experiment": WEAK, "symbol_id": symbol.id, "weight_id": spec.id}
    base.update(n=config.n, L=level, p=n)
    report.rows += [
        Row(
            **base,
            q=math.inf,
            form="schatten-weak",
            scope="operator",
            value=weak,
            ratio_partner="wnu" if ratio is not None else DEGENERATE,
            ratio=ratio,
        ),
        Row(**base, q=math.inf, form="wnu", scope=L1_NU, value=oscillation),
        Row(**base, q=n, form="schatten", scope="operator", value=strong),
        Row(
            **base,
            q=math.inf,
            form="ordering",
            scope="weak<=strong",
            value=float(weak <= strong * (1 + 1e-12)),
        ),
    ]
    return report


def stability_rows(report: Report, config: ExperimentConfig) -> list[Row]:
    """Ratio of weak-Schatten ratios at consecutive resolutions."""
    ratios: dict[tuple[str, str], dict[int, float]] = {}
    for row in report.matching(form="schatten-weak"):
        if row.ratio is not None:
            ratios.setdefault((row.symbol_id, row.weight_id), {})[row.L] = row.ratio

    rows = []
    for (symbol_id, weight_id), by_level in ratios.items():
        levels = sorted(by_level)
        for coarse, fine in itertools.pairwise(levels):
            rows.append(
                Row(
                    WEAK,
                    symbol_id,
                    weight_id,
                    config.n,
                    fine,
                    float(config.n),
                    math.inf,
                    "stability",
                    f"L{coarse}",
                    by_level[fine] / by_level[coarse],
                )
            )
    return rows


async def run_weak_schatten(config: ExperimentConfig) -> Report:
    """
    Compare ‖λ^{1/2}[b, R_j]μ^{-1/2}‖_{S^{n,∞}} with the W_ν norm of b.

    Raises:
        ConfigError: If n < 2 or a matrix is too large.
        ExperimentError: If a cell can't be computed.
    """
    config.check_riesz()
    jobs = _diagnostic_jobs(WEAK, config)
    jobs += [
        functools.partial(weak_cell, symbol, spec, level, config)
        for spec, level, symbol in itertools.product(
            config.weight_pairs, config.levels, config.weak_symbols
        )
    ]
    report = _merge(WEAK, await gather(jobs, config.workers, "Weak-Schatten cells"))
    report.rows.extend(stability_rows(report, config))
    return report


# Variant pairs whose ℓ^{n,∞} norms are compared.
VARIANT_PAIRS = (
    (L1_NU, L2_LAM_MU),
    (L1_NU, L2_MUINV_LAMINV),
    (L2_LAM_MU, L2_MUINV_LAMINV),
    (MEDIAN_L1_NU, L1_NU),
)


def wnu_cell(
    symbol: Symbol, spec: WeightPairSpec, level: int, config: ExperimentConfig
) -> Report:
    """
    The oscillation-variant norms of one symbol, weight pair and
    resolution, with their pairwise ratios and the per-cube Hölder check.
    """
    grid = TorusGrid(config.n, level)
    pair = _weights(spec, grid)
    values = _sample(symbol, grid)
    scale = _size(values)
    system = DyadicSystem(grid, (0,) * grid.n)
    n = float(config.n)

    sequences = {
        variant: oscillation_sequence(values, pair, system, config.enlargement, variant)
        for variant in VARIANTS
    }
    norms = {
        variant: sequence.norm(n, math.inf) for variant, sequence in sequences.items()
    }

    report = Report(WNU)
    base = {"experiment": WNU, "symbol_id": symbol.id, "weight_id": spec.id}
    base.update(n=config.n, L=level)
    for variant in VARIANTS:
        report.rows.append(
            Row(
                **base,
                p=n,
                q=math.inf,
                form="wnu",
                scope=variant,
                value=norms[variant],
            )
        )
    for first, second in VARIANT_PAIRS:
        ratio = _ratio(norms[first], norms[second], scale)
        report.rows.append(
            Row(
                **base,
                p=n,
                q=math.inf,
                form="wnu-ratio",
                scope=first,
                value=norms[first],
                ratio_partner=second if ratio is not None else DEGENERATE,
                ratio=ratio,
            )
        )

    violations = holder_violations(values, pair, system, config.enlargement)
    report.rows.append(
        Row(
            **base,
            form="holder-check",
            scope="violations",
            value=float(len(violations)),
        )
    )

    for p, q in itertools.product(config.p_values, config.q_values):
        for variant in VARIANTS:
            report.rows.append(
                Row(
                    **base,
                    p=p,
                    q=q,
                    form="oscillation-lorentz",
                    scope=variant,
                    value=sequences[variant].norm(p, q),
                )
            )
    return report


async def run_wnu_equivalence(config: ExperimentConfig) -> Report:
    """
    Compare the oscillation-variant definitions of W_ν.

    Raises:
        ConfigError: If n < 2.
        ExperimentError: If a cell can't be computed.
    """
    config.check_dimension(WNU)
    jobs = _diagnostic_jobs(WNU, config)
    jobs += [
        functools.partial(wnu_cell, symbol, spec, level, config)
        for spec, level, symbol in itertools.product(
            config.weight_pairs, config.levels, config.symbols
        )
    ]
    report = _merge(WNU, await gather(jobs, config.workers, "Oscillation cells"))
    report.rows.extend(spread_rows(WNU, report, config))
    return report


RUNNERS = {
    EQUIVALENCE: run_equivalence,
    CRITICAL: run_critical,
    WEAK: run_weak_schatten,
    WNU: run_wnu_equivalence,
}
