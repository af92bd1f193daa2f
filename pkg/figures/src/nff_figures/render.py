"""Render line plots and heat maps from the simulation CSV schemas.

One figure kind per job.  Input headers are validated against the
schema for the requested kind before anything is drawn; a mismatch or
an empty table is a hard error and no output file is created.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")  # headless; no interactive backend

import matplotlib.pyplot as plt
import pandas as pd


class FigureError(ValueError):
    """Base class for figure-job failures."""


class SchemaMismatchError(FigureError):
    """CSV header does not match the schema of the figure kind."""


class EmptyInputError(FigureError):
    """CSV contains a header but no data rows."""


# expected header, exactly and in order, per figure kind
SCHEMAS: dict[str, list[str]] = {
    "gain-scan": ["x_f_m", "x_f_lambda", "peak_field_vpm", "gain_db", "peak_loc_m"],
    "width-scan": ["x_f_lambda", "width_x_lambda", "width_y_lambda", "resolvable"],
    "sll-scan": ["x_f_lambda", "sll_db", "sidelobe_loc_m"],
    "line-compare": ["delta_lambda", "eq1_norm", "eq3_norm", "eq4_norm", "quadrature_norm"],
    "field-map": ["x_m", "y_m", "re", "im", "magnitude", "valid"],
    "nf-ff": ["r_c_lambda", "nf_width_lambda", "ff_bw_deg"],
}

FIGURE_KINDS = tuple(SCHEMAS)

_SINGLE_INPUT_KINDS = ("field-map", "nf-ff")


@dataclass(frozen=True)
class FigureJob:
    kind: str
    inputs: tuple[Path, ...]
    output: Path
    title: str | None = None

    def __post_init__(self):
        if self.kind not in SCHEMAS:
            raise FigureError(f"unknown figure kind {self.kind!r}; choose from {FIGURE_KINDS}")
        if len(self.inputs) == 0:
            raise FigureError("at least one input CSV required")
        if self.kind in _SINGLE_INPUT_KINDS and len(self.inputs) != 1:
            raise FigureError(f"{self.kind} takes exactly one input CSV")
        object.__setattr__(self, "inputs", tuple(Path(p) for p in self.inputs))
        object.__setattr__(self, "output", Path(self.output))


@dataclass(frozen=True)
class RenderResult:
    """Output path plus the arrays that were actually drawn, keyed by
    series label (or ``grid`` for heat maps); identical inputs yield
    identical plotted data."""

    path: Path
    plotted: dict = field(default_factory=dict)


def _load(path: Path, kind: str) -> pd.DataFrame:
    if not path.exists():
        raise FigureError(f"input CSV not found: {path}")
    df = pd.read_csv(path)
    if list(df.columns) != SCHEMAS[kind]:
        raise SchemaMismatchError(
            f"{path}: header {list(df.columns)} does not match the "
            f"{kind} schema {SCHEMAS[kind]}"
        )
    if len(df) == 0:
        raise EmptyInputError(f"{path}: no data rows")
    return df


def _series_labels(paths: tuple[Path, ...]) -> list[str]:
    """One label per input: empty for a lone input, the file stem when
    stems are unique, otherwise parent/stem to disambiguate."""
    if len(paths) == 1:
        return [""]
    stems = [p.stem for p in paths]
    if len(set(stems)) == len(stems):
        return stems
    return [f"{p.parent.name}/{p.stem}" for p in paths]


def render(job: FigureJob) -> RenderResult:
    """Render one figure job to a static image file.

    All inputs are read and validated before the first draw call, so
    failures leave no partial output behind.
    """
    frames = [_load(p, job.kind) for p in job.inputs]

    fig, ax = plt.subplots(figsize=(6.4, 4.8), constrained_layout=True)
    plotted: dict = {}
    try:
        labels = _series_labels(job.inputs)
        if job.kind == "gain-scan":
            for label, df in zip(labels, frames):
                ax.plot(df["x_f_lambda"], df["gain_db"], label=label or None)
                plotted[label or "gain_db"] = df["gain_db"].to_numpy()
            ax.set_xlabel(r"focal position $x_f$ [$\lambda$]")
            ax.set_ylabel("peak gain [dB]")

        elif job.kind == "width-scan":
            for label, df in zip(labels, frames):
                ok = df["resolvable"].astype(bool)
                for col, mark in (("width_x_lambda", "-"), ("width_y_lambda", "--")):
                    name = f"{label} {col}".strip()
                    ax.plot(df["x_f_lambda"][ok], df[col][ok], mark, label=name)
                    plotted[name] = df[col][ok].to_numpy()
            ax.set_xlabel(r"focal position $x_f$ [$\lambda$]")
            ax.set_ylabel(r"3 dB focal width [$\lambda$]")

        elif job.kind == "sll-scan":
            for label, df in zip(labels, frames):
                ax.plot(df["x_f_lambda"], df["sll_db"], label=label or None)
                plotted[label or "sll_db"] = df["sll_db"].to_numpy()
            ax.set_xlabel(r"focal position $x_f$ [$\lambda$]")
            ax.set_ylabel("sidelobe level [dB]")

        elif job.kind == "line-compare":
            styles = {
                "eq1_norm": ("direct sum", "-"),
                "eq3_norm": ("Taylor form", "--"),
                "eq4_norm": ("Bessel form", ":"),
                "quadrature_norm": ("quadrature", "-."),
            }
            for prefix, df in zip(labels, frames):
                for col, (name, mark) in styles.items():
                    label = f"{prefix} {name}".strip()
                    ax.plot(df["delta_lambda"], df[col], mark, label=label)
                    plotted[label] = df[col].to_numpy()
            ax.set_xlabel(r"offset $\Delta$ [$\lambda$]")
            ax.set_ylabel("normalized |E|")

        elif job.kind == "field-map":
            (df,) = frames
            grid = df.pivot(index="y_m", columns="x_m", values="magnitude")
            values = grid.to_numpy(dtype=float)
            peak = values.max()
            if peak > 0:
                values = values / peak
            # masked cells arrive as exact zeros and stay at the bottom
            # of the color scale
            mesh = ax.pcolormesh(
                grid.columns.to_numpy(),
                grid.index.to_numpy(),
                values,
                vmin=0.0,
                vmax=1.0,
                shading="nearest",
            )
            fig.colorbar(mesh, ax=ax, label="normalized |E|")
            ax.set_aspect("equal")
            ax.set_xlabel("x [m]")
            ax.set_ylabel("y [m]")
            plotted["grid"] = values

        elif job.kind == "nf-ff":
            (df,) = frames
            ax.plot(df["r_c_lambda"], df["nf_width_lambda"], "o-", label="near-field width")
            ax.set_xlabel(r"array radius [$\lambda$]")
            ax.set_ylabel(r"3 dB focal width [$\lambda$]")
            ax2 = ax.twinx()
            ax2.plot(df["r_c_lambda"], df["ff_bw_deg"], "s--", color="C1",
                     label="far-field beamwidth")
            ax2.set_ylabel("half-power beamwidth [deg]")
            plotted["nf_width_lambda"] = df["nf_width_lambda"].to_numpy()
            plotted["ff_bw_deg"] = df["ff_bw_deg"].to_numpy()

        if job.title:
            ax.set_title(job.title)
        handles, labels = ax.get_legend_handles_labels()
        if labels:
            ax.legend(loc="best", fontsize=8)

        job.output.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(job.output)
    finally:
        plt.close(fig)
    return RenderResult(path=job.output, plotted=plotted)
