"""Render experiment CSVs into multi-panel figures.

Consumes the harness CSV schema only (no simulator import): one panel per
bit depth, one curve per equalizer, dB y-axis for MSE, log y-axis for BER.
Rendering never mutates its inputs.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

__all__ = ["SchemaError", "PlotSpec", "load_records", "render"]

CSV_COLUMNS = (
    "experiment",
    "equalizer",
    "bits",
    "n_tx",
    "n_rx",
    "ebn0_db",
    "value",
    "ci95",
    "trials",
    "seed",
)

FIGURE_KINDS = ("mse", "ber", "se")

Y_LABEL = {"mse": "MSE (dB)", "ber": "BER", "se": "sum SE (bit/s/Hz)"}


class SchemaError(ValueError):
    """Input CSV does not carry the experiment schema."""


@dataclass(frozen=True)
class PlotSpec:
    input_csv: tuple
    kind: str
    out_path: str
    panel_key: str = "bits"

    def __post_init__(self) -> None:
        if self.kind not in FIGURE_KINDS:
            raise SchemaError(f"unknown figure kind {self.kind!r}; expected one of {FIGURE_KINDS}")
        object.__setattr__(self, "input_csv", tuple(str(p) for p in self.input_csv))


def load_records(paths) -> list[dict]:
    """Parse harness CSVs; every column must be present in every file."""
    records = []
    for path in paths:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            got = tuple(reader.fieldnames or ())
            missing = [c for c in CSV_COLUMNS if c not in got]
            if missing:
                raise SchemaError(f"{path}: missing columns {missing}; found {list(got)}")
            for row in reader:
                records.append(
                    {
                        "experiment": row["experiment"],
                        "equalizer": row["equalizer"],
                        "bits": int(row["bits"]),
                        "n_tx": int(row["n_tx"]),
                        "n_rx": int(row["n_rx"]),
                        "ebn0_db": float(row["ebn0_db"]),
                        "value": float(row["value"]),
                        "ci95": float(row["ci95"]),
                    }
                )
    if not records:
        raise SchemaError(f"no data rows in {list(paths)}")
    return records


def render(spec: PlotSpec):
    """Write the figure and return the matplotlib Figure (for inspection)."""
    records = load_records(spec.input_csv)
    panels = sorted({r[spec.panel_key] for r in records})
    sizes = sorted({(r["n_tx"], r["n_rx"]) for r in records})

    fig, axes = plt.subplots(
        1, len(panels), figsize=(4.2 * len(panels), 3.6), squeeze=False, sharex=True
    )
    for ax, panel in zip(axes[0], panels):
        rows = [r for r in records if r[spec.panel_key] == panel]
        curve_keys = sorted({(r["equalizer"], r["n_tx"], r["n_rx"]) for r in rows})
        for eq, n_tx, n_rx in curve_keys:
            pts = sorted(
                (r["ebn0_db"], r["value"], r["ci95"])
                for r in rows
                if (r["equalizer"], r["n_tx"], r["n_rx"]) == (eq, n_tx, n_rx)
            )
            label = eq if len(sizes) == 1 else f"{eq} ({n_tx}/{n_rx})"
            ax.errorbar(
                [p[0] for p in pts],
                [p[1] for p in pts],
                yerr=[p[2] for p in pts],
                marker="o",
                markersize=3,
                capsize=2,
                label=label,
            )
        ax.set_title(f"{spec.panel_key} = {panel}")
        ax.set_xlabel("Eb/N0 (dB)")
        ax.grid(True, alpha=0.3)
        if spec.kind == "ber":
            ax.set_yscale("log")
            lo, _ = ax.get_ylim()
            ax.set_ylim(min(lo, 1e-5), 1.0)
        ax.legend(fontsize=8)
    axes[0][0].set_ylabel(Y_LABEL[spec.kind])
    fig.tight_layout()
    out = Path(spec.out_path)
    fig.savefig(out)
    return fig
