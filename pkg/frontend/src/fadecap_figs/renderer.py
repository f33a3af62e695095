"""Turn sweep CSVs into figures: one line per bound, shaded gap band.

The renderer only knows the CSV contract of the producing CLI, nothing about
how the numbers were computed. Output is deterministic: the same CSV renders
to a byte-identical SVG.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Optional

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

SWEEP_COLUMNS = (
    "snr_db", "rate_units", "r_m", "r_star2", "r_star_inf",
    "i_upper", "c_coh", "eb_n0_db_rstar", "seed",
)
FIG1_COLUMNS = ("p1_frac", "rate_units", "r_two_layer", "r_m", "seed")

# drawn top to bottom at high SNR; (column, legend label, style)
SWEEP_SERIES = (
    ("c_coh", "coherent capacity", dict(color="#555555", ls="--")),
    ("i_upper", "upper bound", dict(color="#b2182b", ls="-")),
    ("r_star_inf", "layering supremum", dict(color="#2166ac", ls="-")),
    ("r_star2", "two-layer lower bound", dict(color="#4393c3", ls="-.")),
    ("r_m", "single-layer lower bound", dict(color="#92c5de", ls=":")),
)
FIG1_SERIES = (
    ("r_two_layer", "two-layer lower bound", dict(color="#2166ac", ls="-")),
    ("r_m", "single-layer lower bound", dict(color="#92c5de", ls=":")),
)

_UNIT_LABEL = {"nats": "rate [nats/channel use]", "bits": "rate [bits/channel use]",
               "ratio": "rate / single-layer rate"}


class SchemaError(ValueError):
    """CSV header does not match the expected column set."""

    def __init__(self, expected, found):
        self.missing = sorted(set(expected) - set(found))
        self.unexpected = sorted(set(found) - set(expected))
        super().__init__(
            f"CSV schema mismatch: missing columns {self.missing}, "
            f"unexpected columns {self.unexpected}"
        )


@dataclass(frozen=True)
class FigureJob:
    csv_path: str
    preset: str
    out_path: str
    fmt: str = "svg"

    def __post_init__(self):
        if self.fmt not in ("svg", "png"):
            raise ValueError("format must be 'svg' or 'png'")


def expected_columns(preset: str):
    return FIG1_COLUMNS if preset == "fig1" else SWEEP_COLUMNS


def load_csv(path: str, preset: str) -> dict[str, list]:
    """Read a sweep CSV into per-column lists, validating the header.

    Trailing '#' metadata lines are skipped; empty fields and 'nan' become
    NaN in numeric columns.
    """
    expected = expected_columns(preset)
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].lstrip().startswith("#")]
    if not rows:
        raise ValueError(f"{path}: empty CSV (no header)")
    header = tuple(h.strip() for h in rows[0])
    if header != expected:
        raise SchemaError(expected, header)
    if len(rows) == 1:
        raise ValueError(f"{path}: no data rows")
    cols: dict[str, list] = {name: [] for name in expected}
    for r in rows[1:]:
        if len(r) != len(expected):
            raise ValueError(f"{path}: row has {len(r)} fields, expected {len(expected)}")
        for name, field in zip(expected, r):
            if name in ("rate_units", "seed"):
                cols[name].append(field)
            else:
                cols[name].append(float(field) if field.strip() else math.nan)
    return cols


def _finite_pairs(x, y):
    return zip(*[(a, b) for a, b in zip(x, y) if math.isfinite(a) and math.isfinite(b)]) \
        if any(math.isfinite(b) for b in y) else ((), ())


def render(job: FigureJob) -> str:
    """Render the job and return the output path."""
    cols = load_csv(job.csv_path, job.preset)
    units = cols["rate_units"][0]

    # determinism: fixed hash salt, no embedded timestamps
    plt.rcParams["svg.hashsalt"] = "fadecap-figs"

    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    if job.preset == "fig1":
        x = cols["p1_frac"]
        series = FIG1_SERIES
        ax.set_xlabel("first-layer power fraction $P_1/P$")
    else:
        x = cols["snr_db"]
        series = SWEEP_SERIES
        ax.set_xlabel("SNR [dB]")

        lo, hi, xs = [], [], []
        for a, l, h in zip(x, cols["r_star_inf"], cols["i_upper"]):
            if math.isfinite(l) and math.isfinite(h):
                xs.append(a)
                lo.append(l)
                hi.append(h)
        if xs:
            ax.fill_between(xs, lo, hi, color="#cccccc", alpha=0.6, lw=0,
                            label="bound gap", zorder=1)

    for name, label, style in series:
        px, py = _finite_pairs(x, cols[name])
        if px:
            ax.plot(px, py, label=label, zorder=2, **style)

    ax.set_ylabel(_UNIT_LABEL.get(units, f"rate [{units}]"))
    ax.legend(loc="upper left", frameon=False)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    meta = {"Date": None} if job.fmt == "svg" else None
    fig.savefig(job.out_path, format=job.fmt, metadata=meta)
    plt.close(fig)
    return job.out_path
