"""Figure rendering for sweep result CSVs.

The input contract is the simulator's result CSV: one row per
(scheme, model, collusion, pool size, SNR) curve point, with mean and
standard-error columns for the secrecy sum-rate and the served-user
count.  A figure shows one metric for one collusion mode: one curve per
(scheme, model, pool size), colour and marker keyed to (scheme, model),
line style keyed to pool size (solid for the smallest, dashed for the
next).  Rows are plotted in CSV order — never resorted, never
interpolated — so the plotted values are exactly the file's values.

SVG output is byte-deterministic for a fixed input (fixed hash salt, no
embedded creation date), which makes golden-file regression tests
meaningful.
"""

from __future__ import annotations

import csv
import dataclasses
import enum
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)

#: Exact column set of the simulator's result CSV.
COLUMNS = (
    "scheme", "model", "collusion", "K_B", "k_e", "snr_db",
    "mean_secrecy_rate", "stderr_rate", "mean_served_users",
    "stderr_served", "num_realizations", "failures", "master_seed",
)

_FLOAT_COLUMNS = ("snr_db", "mean_secrecy_rate", "stderr_rate",
                  "mean_served_users", "stderr_served")
_INT_COLUMNS = ("K_B", "k_e", "num_realizations", "failures", "master_seed")
_CATEGORY_VALUES = {
    "scheme": ("LSP", "ZF"),
    "model": ("SW", "PW"),
    "collusion": ("TC", "PC"),
}

_STYLE = {  # colour/marker per (scheme, model); line style carries K_B
    ("LSP", "SW"): ("#1f77b4", "o"),
    ("LSP", "PW"): ("#d62728", "s"),
    ("ZF", "SW"): ("#2ca02c", "^"),
    ("ZF", "PW"): ("#9467bd", "v"),
}
_LINESTYLES = ("solid", "dashed", "dashdot", "dotted")

_HASH_SALT = "lspfigures"


class SchemaError(ValueError):
    """The CSV does not conform to the result schema; names the column."""


class Metric(enum.Enum):
    SECRECY_RATE = "secrecy_rate"
    SERVED_USERS = "served_users"

    @property
    def value_column(self) -> str:
        return ("mean_secrecy_rate" if self is Metric.SECRECY_RATE
                else "mean_served_users")

    @property
    def error_column(self) -> str:
        return ("stderr_rate" if self is Metric.SECRECY_RATE
                else "stderr_served")

    @property
    def axis_label(self) -> str:
        return ("Mean secrecy sum-rate (bits/s/Hz)"
                if self is Metric.SECRECY_RATE else "Mean served users")


@dataclasses.dataclass(frozen=True)
class FigureSpec:
    """One figure: a metric and a collusion mode drawn from one CSV."""

    metric: Metric
    collusion: str
    input_csv: str
    output_image: str
    error_bars: bool = False

    def __post_init__(self):
        if self.collusion not in _CATEGORY_VALUES["collusion"]:
            raise ValueError(f"collusion must be TC or PC, got "
                             f"{self.collusion!r}")


@dataclasses.dataclass(frozen=True)
class CurveData:
    """One plotted curve, in CSV row order."""

    label: str
    linestyle: str
    snr_db: tuple[float, ...]
    values: tuple[float, ...]
    errors: tuple[float, ...] | None


@dataclasses.dataclass(frozen=True)
class RenderResult:
    output_image: str
    curves: tuple[CurveData, ...]


def read_rows(path: str) -> list[dict]:
    """Parse and validate the result CSV; rows keep file order."""
    with open(path, newline="", encoding="ascii") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or ()
        for column in COLUMNS:
            if column not in header:
                raise SchemaError(f"missing column: {column}")
        for column in header:
            if column not in COLUMNS:
                raise SchemaError(f"unexpected column: {column}")
        rows = []
        for lineno, raw in enumerate(reader, start=2):
            if None in raw or any(v is None for v in raw.values()):
                raise SchemaError(f"line {lineno}: wrong field count")
            row: dict = {}
            for column in _FLOAT_COLUMNS:
                try:
                    row[column] = float(raw[column])
                except ValueError:
                    raise SchemaError(
                        f"line {lineno}: column {column} is not a number: "
                        f"{raw[column]!r}") from None
            for column in _INT_COLUMNS:
                try:
                    row[column] = int(raw[column])
                except ValueError:
                    raise SchemaError(
                        f"line {lineno}: column {column} is not an integer: "
                        f"{raw[column]!r}") from None
            for column, allowed in _CATEGORY_VALUES.items():
                if raw[column] not in allowed:
                    raise SchemaError(
                        f"line {lineno}: column {column} has unknown value "
                        f"{raw[column]!r} (expected one of {allowed})")
                row[column] = raw[column]
            rows.append(row)
    return rows


def _collect_curves(rows: list[dict], spec: FigureSpec) -> list[CurveData]:
    """Group the matching rows into curves, preserving CSV order."""
    matching = [r for r in rows if r["collusion"] == spec.collusion]
    if not matching:
        raise ValueError(f"no rows with collusion={spec.collusion}")
    pools = sorted({r["K_B"] for r in matching})
    dash = {kb: _LINESTYLES[i % len(_LINESTYLES)]
            for i, kb in enumerate(pools)}
    groups: dict[tuple, list[dict]] = {}
    for row in matching:
        groups.setdefault((row["scheme"], row["model"], row["K_B"]),
                          []).append(row)
    curves = []
    for (scheme, model, kb), points in groups.items():
        errors = tuple(p[spec.metric.error_column] for p in points) \
            if spec.error_bars else None
        curves.append(CurveData(
            label=f"{scheme} {model} K_B={kb}",
            linestyle=dash[kb],
            snr_db=tuple(p["snr_db"] for p in points),
            values=tuple(p[spec.metric.value_column] for p in points),
            errors=errors,
        ))
    return curves


def render(spec: FigureSpec) -> RenderResult:
    """Draw the figure and write it; nothing is written on bad input."""
    rows = read_rows(spec.input_csv)
    if not rows:
        raise ValueError(f"no data rows in {spec.input_csv}")
    curves = _collect_curves(rows, spec)

    mode = ("Total collusion" if spec.collusion == "TC"
            else "Partial collusion")
    with plt.rc_context({"svg.hashsalt": _HASH_SALT}):
        fig, ax = plt.subplots(figsize=(6.4, 4.4))
        try:
            for curve in curves:
                scheme, model, _ = curve.label.split(" ")
                color, marker = _STYLE[(scheme, model)]
                if curve.errors is not None:
                    ax.errorbar(curve.snr_db, curve.values, yerr=curve.errors,
                                color=color, marker=marker,
                                linestyle=curve.linestyle, capsize=3,
                                label=curve.label)
                else:
                    ax.plot(curve.snr_db, curve.values, color=color,
                            marker=marker, linestyle=curve.linestyle,
                            label=curve.label)
            ax.set_xlabel("SNR (dB)")
            ax.set_ylabel(spec.metric.axis_label)
            ax.set_title(f"{mode} — {spec.metric.axis_label.lower()}")
            ax.grid(True, alpha=0.3)
            ax.legend(fontsize=8)
            fig.tight_layout()
            directory = os.path.dirname(os.path.abspath(spec.output_image))
            os.makedirs(directory, exist_ok=True)
            metadata = {"Date": None} \
                if spec.output_image.endswith(".svg") else None
            fig.savefig(spec.output_image, metadata=metadata)
        finally:
            plt.close(fig)
    return RenderResult(output_image=spec.output_image,
                        curves=tuple(curves))
