""" Dataclasses and functions that write experiment reports. """

from __future__ import annotations

import csv
import dataclasses
import json
import logging
import math
import pathlib
from typing import TextIO

import matplotlib

matplotlib.use("Agg")
# pylint: disable=wrong-import-position
import matplotlib.pyplot as plt
import numpy as np

from schattencheck.haar import HaarCoefficients
from schattencheck.operators import DenseOperator
from schattencheck.spaces import OscillationReport
# pylint: enable=wrong-import-position


logger = logging.getLogger(__name__)

HEADER = (
    "experiment",
    "symbol_id",
    "weight_id",
    "n",
    "L",
    "p",
    "q",
    "form",
    "scope",
    "value",
    "ratio_partner",
    "ratio",
)

DEGENERATE = "degenerate"

plt.rcParams.update({"svg.hashsalt": "schattencheck", "svg.fonttype": "none"})


class ReportError(Exception):
    """Common base class for exceptions related to reports."""


class EmptyReportError(ReportError):
    """The report holds no rows."""


class UnwritablePathError(ReportError):
    """An output file can't be written."""


@dataclasses.dataclass
class Row:
    """
    A single row in an experiment report.

    Args:
        experiment: The experiment's name.
        symbol_id: The symbol's identifier.
        weight_id: The weight pair's identifier.
        n: The dimension.
        L: The resolution.
        p: The primary exponent.
        q: The secondary exponent.
        form: What the value measures.
        scope: The dyadic scope or sub-quantity of the value.
        value: The measured value.
        ratio_partner: The form the ratio is taken against.
        ratio: value divided by the partner's value.
    """

    experiment: str = None
    symbol_id: str = None
    weight_id: str = None
    n: int = None
    L: int = None  # pylint: disable=invalid-name
    p: float = None
    q: float = None
    form: str = None
    scope: str = None
    value: float = None
    ratio_partner: str = None
    ratio: float = None

    def formatted(self) -> dict[str, str]:
        """Self as CSV fields, floats by repr and None as empty."""
        return {key: _format(value) for key, value in dataclasses.asdict(self).items()}


def _format(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


@dataclasses.dataclass
class Report:
    """
    The rows and spectra produced by one experiment.

    Args:
        experiment: The experiment's name.
        rows: The report rows, in cell order.
        spectra: Singular values by cell id, in cell order.
    """

    experiment: str
    rows: list[Row] = dataclasses.field(default_factory=list)
    spectra: dict[str, np.ndarray] = dataclasses.field(default_factory=dict)

    def extend(self, other: Report) -> None:
        """Append the rows and spectra of another report."""
        self.rows.extend(other.rows)
        self.spectra.update(other.spectra)

    def dump(self, outfile: TextIO) -> int:
        """
        Dump self to a text stream.

        Args:
            outfile: A text stream that supports .write().

        Returns:
            The number of written rows.

        Raises:
            EmptyReportError: If self holds no rows.
        """
        if not self.rows:
            raise EmptyReportError(f"{self.experiment}: report is empty")
        writer = csv.DictWriter(outfile, HEADER, lineterminator="\n")

        writer.writeheader()
        for row in self.rows:
            writer.writerow(row.formatted())

        return len(self.rows) + 1

    def matching(self, **fields) -> list[Row]:
        """The rows whose fields equal the given values."""
        return [
            row
            for row in self.rows
            if all(getattr(row, key) == value for key, value in fields.items())
        ]


def dump_spectrum(values: np.ndarray, outfile: TextIO) -> int:
    """
    Dump singular values as (k, s_k) rows, k counted from 1.

    Returns:
        The number of written rows.
    """
    writer = csv.writer(outfile, lineterminator="\n")
    writer.writerow(("k", "s_k"))
    for k, value in enumerate(values, start=1):
        writer.writerow((k, repr(float(value))))
    return len(values) + 1


def read_spectrum(infile: TextIO) -> np.ndarray:
    """Read singular values written by dump_spectrum."""
    reader = csv.DictReader(infile)
    return np.array([float(row["s_k"]) for row in reader])


def dump_coefficients(coeffs: HaarCoefficients, outfile: TextIO) -> int:
    """
    Dump Haar coefficients as (omega, level, m, epsilon, value) rows.

    Returns:
        The number of written rows.
    """
    writer = csv.writer(outfile, lineterminator="\n")
    writer.writerow(("omega", "level", "m", "epsilon", "value"))
    count = 1
    for cube, signature, value in coeffs.items():
        bits = "".join(str(bit) for bit in signature.bits)
        writer.writerow((cube.key[0], cube.level, cube.flat_index, bits, repr(value)))
        count += 1
    return count


def dump_oscillation(report: OscillationReport, outfile: TextIO) -> int:
    """
    Dump an oscillation report as (omega, level, m, variant, value) rows.

    Returns:
        The number of written rows.
    """
    writer = csv.writer(outfile, lineterminator="\n")
    writer.writerow(("omega", "level", "m", "variant", "value"))
    count = 1
    for omega, level, flat, variant, value in report.rows():
        writer.writerow((omega, level, flat, variant, repr(value)))
        count += 1
    return count


def export_operator(
    operator: DenseOperator, directory: pathlib.Path, name: str
) -> pathlib.Path:
    """
    Write an operator as raw row-major doubles plus a JSON sidecar.

    Args:
        operator: The operator.
        directory: The output directory.
        name: The base file name.

    Returns:
        The path of the binary file.

    Raises:
        UnwritablePathError: If the files can't be written.
    """
    binary = directory / f"{name}.bin"
    sidecar = directory / f"{name}.json"
    metadata = {
        "shape": list(operator.matrix.shape),
        "dtype": "float64",
        "source": operator.source,
        "target": operator.target,
    }
    try:
        directory.mkdir(parents=True, exist_ok=True)
        np.ascontiguousarray(operator.matrix, dtype="<f8").tofile(binary)
        with open(sidecar, "w", encoding="utf-8") as outfile:
            json.dump(metadata, outfile, indent=2)
    except OSError as exc:
        raise UnwritablePathError(f"{directory}: {exc.strerror}") from exc
    return binary


def plot(report: Report, outfile: pathlib.Path) -> None:
    """
    Draw the spectra and the ratio-vs-L curves of a report as SVG.

    Raises:
        OSError: If the file can't be written.
    """
    fig, (spectra_ax, ratio_ax) = plt.subplots(1, 2, figsize=(11, 4.5))

    for cell, values in report.spectra.items():
        significant = values[values > 0]
        if significant.size:
            ranks = np.arange(1, significant.size + 1)
            spectra_ax.loglog(ranks, significant, linewidth=0.8, label=cell)
    spectra_ax.set_xlabel("k")
    spectra_ax.set_ylabel("s_k")
    spectra_ax.set_title("singular values")

    curves: dict[tuple[str, str, str], list[tuple[int, float]]] = {}
    for row in report.rows:
        if row.ratio is not None and row.ratio > 0 and math.isfinite(row.ratio):
            key = (row.symbol_id, row.weight_id, row.form)
            curves.setdefault(key, []).append((row.L, row.ratio))
    for (symbol, weight, form), points in curves.items():
        levels, ratios = zip(*sorted(points))
        ratio_ax.semilogy(
            levels, ratios, marker="o", linewidth=0.8, label=f"{symbol}/{weight}/{form}"
        )
    ratio_ax.set_xlabel("L")
    ratio_ax.set_ylabel("ratio")
    ratio_ax.set_title(f"{report.experiment} ratios")

    if len(report.spectra) <= 12 and report.spectra:
        spectra_ax.legend(fontsize=6)
    fig.tight_layout()
    try:
        fig.savefig(outfile, format="svg", metadata={"Date": None})
    finally:
        plt.close(fig)


def emit(
    report: Report, directory: pathlib.Path, plots: bool = False
) -> list[pathlib.Path]:
    """
    Write a report, its spectra and optionally its plot.

    Args:
        report: The report.
        directory: The output directory.
        plots: Whether to draw the SVG plot.

    Returns:
        The paths of the written files.

    Raises:
        EmptyReportError: If the report holds no rows.
        UnwritablePathError: If a file can't be written.
    """
    if not report.rows:
        raise EmptyReportError(f"{report.experiment}: report is empty")

    written = []
    try:
        directory.mkdir(parents=True, exist_ok=True)
        path = directory / f"{report.experiment}.csv"
        with open(path, "w", encoding="utf-8", newline="") as outfile:
            count = report.dump(outfile)
        logger.info("%s: wrote %d rows", path, count)
        written.append(path)

        if report.spectra:
            spectra_dir = directory / "spectra"
            spectra_dir.mkdir(exist_ok=True)
            for cell, values in report.spectra.items():
                path = spectra_dir / f"{cell}.csv"
                with open(path, "w", encoding="utf-8", newline="") as outfile:
                    dump_spectrum(values, outfile)
                written.append(path)

        if plots:
            path = directory / f"{report.experiment}.svg"
            plot(report, path)
            written.append(path)
    except OSError as exc:
        raise UnwritablePathError(f"{directory}: {exc.strerror or exc}") from exc

    return written

