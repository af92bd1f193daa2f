"""Deterministic experiment runner.

Usage:
    nff <experiment> [--config FILE] [--out DIR]
        [--db-convention {field10,field20}] [--threads N]

Experiments: map, scan-gain, scan-width, scan-sll, nf-ff, closed-form,
validate.  Each writes CSV artifacts plus a manifest.json with content
digests; identical specs reproduce byte-identical CSV bodies at any
thread count.  The YAML config schema (all keys optional, defaults are
the flagship N=120 / r_c=1.5 m / lambda=0.2 m setup) is documented in
DEFAULT_CONFIG below.
"""

from __future__ import annotations

import argparse
import copy
import json
import math
import os
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .analysis import (
    DB_CONVENTIONS,
    nf_ff_comparison,
    peak_gain_scan,
    sidelobe_scan,
    width_scan,
)
from .closedform import (
    amplitude_sum_at,
    arc_integral,
    bessel_integral_oracle,
    center_edge_ratio,
    j0,
    phase_integral_magnitude,
    taylor_field_sum,
)
from .field import FocalSpec, field_at, field_line, field_map
from .geometry import (
    ArrayConfig,
    ArrayKind,
    ValidityRegion,
    build_elements,
    build_full_circle,
    build_half_circle,
    reactive_margin_m,
)
from .io import fmt, sha256_of, write_csv

EXPERIMENTS = ("map", "scan-gain", "scan-width", "scan-sll", "nf-ff", "closed-form", "validate")

DEFAULT_CONFIG: dict = {
    # one array, or a list of arrays under the key "arrays"
    "array": {
        "kind": "full",  # full | half
        "n_elements": 120,
        "radius_m": 1.5,
        "wavelength_m": 0.2,
        "source_amplitude": 1.0,
    },
    "margin_lambda": 0.2,  # reactive-NF exclusion half-width
    "focal": {"x_lambda": 0.0, "y_lambda": 0.0},
    "scan": {
        "start_lambda": -7.0,
        "stop_lambda": 7.0,
        "step_lambda": 0.1,
        "search_step_lambda": 0.02,
    },
    "map": {
        "half_extent_lambda": None,  # default: aperture radius + 0.4 lambda
        "step_lambda": 0.1,
    },
    "closed_form": {"delta_max_lambda": 3.0, "delta_step_lambda": 0.02},
    "nf_ff": {
        "radii_lambda": [2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0],
        "angular_step_deg": 0.05,
    },
    "db_convention": "field10",
}


class SpecError(ValueError):
    """Invalid experiment specification; message names the field."""


@dataclass(frozen=True)
class ExperimentSpec:
    experiment: str
    config: dict  # fully-resolved config dictionary (the manifest echo)

    @property
    def arrays(self) -> list[ArrayConfig]:
        raw = self.config.get("arrays") or [self.config["array"]]
        out = []
        for i, a in enumerate(raw):
            try:
                out.append(
                    ArrayConfig(
                        kind=ArrayKind(a["kind"]),
                        n_elements=int(a["n_elements"]),
                        radius_m=float(a["radius_m"]),
                        wavelength_m=float(a["wavelength_m"]),
                        source_amplitude=float(a.get("source_amplitude", 1.0)),
                    )
                )
            except (KeyError, ValueError) as e:
                raise SpecError(f"array[{i}]: {e}") from e
        return out

    @property
    def db_convention(self) -> str:
        return self.config["db_convention"]


def _merge(base: dict, extra: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in extra.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def load_spec(
    experiment: str,
    config_path: str | Path | None = None,
    db_convention: str | None = None,
    threads: int | None = None,
) -> ExperimentSpec:
    if experiment not in EXPERIMENTS:
        raise SpecError(f"experiment: unknown experiment {experiment!r}")
    cfg = copy.deepcopy(DEFAULT_CONFIG)
    if config_path is not None:
        raw = yaml.safe_load(Path(config_path).read_text()) or {}
        if not isinstance(raw, dict):
            raise SpecError("config: top level must be a mapping")
        unknown = set(raw) - (set(DEFAULT_CONFIG) | {"arrays"})
        if unknown:
            raise SpecError(f"config: unknown key(s) {sorted(unknown)}")
        cfg = _merge(cfg, raw)
    if db_convention is not None:
        cfg["db_convention"] = db_convention
    if cfg["db_convention"] not in DB_CONVENTIONS:
        raise SpecError(f"db_convention: must be one of {DB_CONVENTIONS}")
    cfg["threads"] = int(threads) if threads else cfg.get("threads") or os.cpu_count() or 1
    for key in ("step_lambda", "search_step_lambda"):
        if cfg["scan"][key] <= 0:
            raise SpecError(f"scan.{key}: must be > 0")
    if cfg["scan"]["stop_lambda"] <= cfg["scan"]["start_lambda"]:
        raise SpecError("scan.stop_lambda: must exceed scan.start_lambda")
    if cfg["map"]["step_lambda"] <= 0:
        raise SpecError("map.step_lambda: must be > 0")
    if cfg["margin_lambda"] <= 0:
        raise SpecError("margin_lambda: must be > 0")
    return ExperimentSpec(experiment=experiment, config=cfg)


@dataclass(frozen=True)
class RunManifest:
    experiment: str
    config: dict
    version: str
    outputs: list[dict]
    flags: list[str]
    duration_s: float

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "config": self.config,
            "version": self.version,
            "outputs": self.outputs,
            "flags": self.flags,
            "duration_s": self.duration_s,
        }


def _suffix(i: int, n: int) -> str:
    return "" if n == 1 else f"_{i + 1:02d}"


def _scan_positions(spec: ExperimentSpec, array: ArrayConfig) -> np.ndarray:
    s = spec.config["scan"]
    lam = array.wavelength_m
    n = int(math.floor((s["stop_lambda"] - s["start_lambda"]) / s["step_lambda"] + 1e-9)) + 1
    return (s["start_lambda"] + s["step_lambda"] * np.arange(n)) * lam


def _region(spec: ExperimentSpec, array: ArrayConfig) -> ValidityRegion:
    return ValidityRegion.for_config(array, margin_m=spec.config["margin_lambda"] * array.wavelength_m)


def _focal(spec: ExperimentSpec, array: ArrayConfig) -> FocalSpec:
    f = spec.config["focal"]
    lam = array.wavelength_m
    return FocalSpec(f["x_lambda"] * lam, f["y_lambda"] * lam)


def run(spec: ExperimentSpec, out_dir: str | Path) -> RunManifest:
    """Execute one experiment; returns the manifest (also written to
    ``manifest.json`` in the output directory)."""
    t0 = time.monotonic()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    flags: list[str] = []
    threads = spec.config["threads"]
    arrays = spec.arrays
    if spec.experiment == "validate":
        report, ok = validation_report()
        path = out / "validation_report.txt"
        path.write_text(report)
        written.append(path)
        if not ok:
            flags.append("validation-failed")
    else:
        for i, array in enumerate(arrays):
            suffix = _suffix(i, len(arrays))
            elements = build_elements(array)
            region = _region(spec, array)
            focal = _focal(spec, array)
            lam = array.wavelength_m

            if spec.experiment == "scan-gain":
                records = peak_gain_scan(
                    elements,
                    _scan_positions(spec, array),
                    search_step_m=spec.config["scan"]["search_step_lambda"] * lam,
                    region=region,
                    db_convention=spec.db_convention,
                    threads=threads,
                )
                path = out / f"gain_scan{suffix}.csv"
                write_csv(
                    path,
                    ["x_f_m", "x_f_lambda", "peak_field_vpm", "gain_db", "peak_loc_m"],
                    [(r.x_f_m, r.x_f_lambda, r.peak_field_vpm, r.gain_db, r.peak_loc_m) for r in records],
                )
                written.append(path)
                if all(r.error for r in records):
                    flags.append(f"gain_scan{suffix}: every focal position masked")

            elif spec.experiment == "scan-width":
                records = width_scan(
                    elements,
                    _scan_positions(spec, array),
                    search_step_m=spec.config["scan"]["search_step_lambda"] * lam,
                    region=region,
                    threads=threads,
                )
                path = out / f"width_scan{suffix}.csv"
                write_csv(
                    path,
                    ["x_f_lambda", "width_x_lambda", "width_y_lambda", "resolvable"],
                    [(r.x_f_lambda, r.width_x_lambda, r.width_y_lambda, r.resolvable) for r in records],
                )
                written.append(path)
                if not any(r.resolvable for r in records):
                    flags.append(f"width_scan{suffix}: no resolvable width anywhere")

            elif spec.experiment == "scan-sll":
                records = sidelobe_scan(
                    elements,
                    _scan_positions(spec, array),
                    search_step_m=spec.config["scan"]["search_step_lambda"] * lam,
                    region=region,
                    threads=threads,
                )
                path = out / f"sll_scan{suffix}.csv"
                write_csv(
                    path,
                    ["x_f_lambda", "sll_db", "sidelobe_loc_m"],
                    [(r.x_f_lambda, r.sll_db, r.sidelobe_loc_m) for r in records],
                )
                written.append(path)
                if all(r.error for r in records):
                    flags.append(f"sll_scan{suffix}: every focal position masked")

            elif spec.experiment == "map":
                half = spec.config["map"]["half_extent_lambda"]
                half_m = (array.radius_m + 0.4 * lam) if half is None else half * lam
                step_m = spec.config["map"]["step_lambda"] * lam
                n = 2 * int(math.floor(half_m / step_m + 1e-9)) + 1
                fmap = field_map(
                    -((n - 1) // 2) * step_m,
                    -((n - 1) // 2) * step_m,
                    step_m,
                    n,
                    n,
                    elements,
                    focal,
                    region,
                )
                path = out / f"field_map{suffix}.csv"
                rows = []
                for iy in range(fmap.ny):
                    for ix in range(fmap.nx):
                        v = fmap.values[iy, ix]
                        rows.append(
                            (
                                fmap.x_coords[ix],
                                fmap.y_coords[iy],
                                v.real,
                                v.imag,
                                abs(v),
                                bool(fmap.valid[iy, ix]),
                            )
                        )
                write_csv(path, ["x_m", "y_m", "re", "im", "magnitude", "valid"], rows)
                written.append(path)
                if fmap.peak() is None:
                    flags.append(f"field_map{suffix}: no valid sample (no peak)")
                for axis in ("x", "y"):
                    samples = field_line(
                        axis, -array.radius_m, array.radius_m, step_m, elements, focal, region
                    )
                    peak = max((abs(s.value) for s in samples if s.valid), default=0.0)
                    lpath = out / f"line_{axis}{suffix}.csv"
                    write_csv(
                        lpath,
                        ["coord_m", "coord_lambda", "magnitude", "magnitude_norm", "valid"],
                        [
                            (
                                s.point[0] if axis == "x" else s.point[1],
                                (s.point[0] if axis == "x" else s.point[1]) / lam,
                                abs(s.value),
                                abs(s.value) / peak if peak > 0 else 0.0,
                                s.valid,
                            )
                            for s in samples
                        ],
                    )
                    written.append(lpath)

            elif spec.experiment == "closed-form":
                cf = spec.config["closed_form"]
                n = int(math.floor(cf["delta_max_lambda"] / cf["delta_step_lambda"] + 1e-9)) + 1
                deltas = cf["delta_step_lambda"] * np.arange(n) * lam
                center = FocalSpec(0.0, 0.0)
                e_ref = abs(field_at((0.0, 0.0), elements, center))
                rows = []
                for d in deltas:
                    eq1 = abs(field_at((float(d), 0.0), elements, center)) / e_ref
                    eq3 = taylor_field_sum(float(d), elements)
                    eq4 = abs(j0(2.0 * math.pi * float(d) / lam))
                    quad = phase_integral_magnitude(float(d), lam)
                    rows.append((d / lam, eq1, eq3, eq4, quad))
                path = out / f"closed_form{suffix}.csv"
                write_csv(
                    path,
                    ["delta_lambda", "eq1_norm", "eq3_norm", "eq4_norm", "quadrature_norm"],
                    rows,
                )
                written.append(path)

            elif spec.experiment == "nf-ff":
                nf = spec.config["nf_ff"]
                rows = nf_ff_comparison(
                    nf["radii_lambda"],
                    array.n_elements,
                    lam,
                    angular_step_rad=math.radians(nf["angular_step_deg"]),
                    search_step_m=spec.config["scan"]["search_step_lambda"] * lam,
                )
                path = out / f"nf_ff{suffix}.csv"
                write_csv(
                    path,
                    ["r_c_lambda", "nf_width_lambda", "ff_bw_deg"],
                    [(r.r_c_lambda, r.nf_width_lambda, r.ff_bw_deg) for r in rows],
                )
                written.append(path)
                if not all(r.resolvable for r in rows):
                    flags.append(f"nf_ff{suffix}: unresolvable width in sweep")

    outputs = [
        {"file": p.name, "sha256": sha256_of(p), "bytes": p.stat().st_size} for p in written
    ]
    manifest = RunManifest(
        experiment=spec.experiment,
        config=spec.config,
        version=__version__,
        outputs=outputs,
        flags=flags,
        duration_s=time.monotonic() - t0,
    )
    (out / "manifest.json").write_text(json.dumps(manifest.to_dict(), indent=2, sort_keys=True) + "\n")
    return manifest


def validation_report() -> tuple[str, bool]:
    """Desk-scale anchor checks; returns (report text, all passed)."""
    checks: list[tuple[str, float, float, float]] = []  # name, measured, expected, tol

    lam = 0.2
    cfg = ArrayConfig(ArrayKind.FULL_CIRCLE, 120, 1.5, lam)
    elems = build_full_circle(cfg)
    checks.append(
        ("center field N/r_c [V/m]", abs(field_at((0.0, 0.0), elems, FocalSpec(0.0, 0.0))), 80.0, 1e-7)
    )
    for rc, spacing in ((1.0, 0.26), (1.5, 0.39), (2.0, 0.52)):
        c = ArrayConfig(ArrayKind.FULL_CIRCLE, 120, rc, lam)
        checks.append((f"chord spacing r_c={rc} m [lambda]", c.chord_spacing_lambda, spacing, 0.005))
    checks.append(("reactive margin [lambda]", reactive_margin_m(lam) / lam, 0.198, 0.0005))
    checks.append(("j0(0)", j0(0.0), 1.0, 1e-12))
    checks.append(("j0 first zero", j0(2.404825557695773), 0.0, 1e-10))
    checks.append(("j0 vs integral at x=5", j0(5.0), bessel_integral_oracle(5.0), 1e-9))
    # half-power width of the J0 lobe, via the numeric line scan
    from .analysis import focal_width

    w = focal_width(elems, FocalSpec(0.0, 0.0), "x")
    checks.append(("3 dB focal width [lambda]", w.width_lambda, 0.36, 0.02))
    checks.append(("arc integral full circle at center", arc_integral((0.0, 0.0), 1.0), 2.0 * math.pi, 1e-8))
    ln_limit = math.log((math.sqrt(2) + 1) / (math.sqrt(2) - 1))
    checks.append(
        ("arc integral half circle at edge", arc_integral((-1.0, 0.0), 1.0, (-math.pi / 2, math.pi / 2)), ln_limit, 1e-8)
    )
    limits = center_edge_ratio(1.0)
    checks.append(("center/edge ratio", limits.ratio, math.pi / ln_limit, 1e-12))
    checks.append(("center/edge ratio [dB]", limits.ratio_db, 2.51, 0.01))
    half = build_half_circle(ArrayConfig(ArrayKind.HALF_CIRCLE, 10_000, 1.0, lam))
    ratio_n = amplitude_sum_at((0.0, 0.0), half) / amplitude_sum_at((-1.0, 0.0), half)
    checks.append(("half-circle N-sum center/edge ratio", ratio_n, math.pi / ln_limit, 0.005 * math.pi / ln_limit))

    lines = []
    ok = True
    for name, measured, expected, tol in checks:
        good = abs(measured - expected) <= tol
        ok &= good
        lines.append(
            f"{'PASS' if good else 'FAIL'}  {name}: measured {fmt(float(measured))} "
            f"expected {fmt(float(expected))} (tol {tol:g})"
        )
    lines.append(f"{sum(1 for l in lines if l.startswith('PASS'))}/{len(checks)} checks passed")
    return "\n".join(lines) + "\n", ok


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="nff", description="Near-field focusing experiments for circular arrays"
    )
    parser.add_argument("experiment", choices=EXPERIMENTS)
    parser.add_argument("--config", type=Path, default=None, help="YAML config file")
    parser.add_argument("--out", type=Path, default=Path("out"), help="output directory")
    parser.add_argument("--db-convention", choices=list(DB_CONVENTIONS), default=None)
    parser.add_argument("--threads", type=int, default=None)
    args = parser.parse_args(argv)

    try:
        spec = load_spec(args.experiment, args.config, args.db_convention, args.threads)
        manifest = run(spec, args.out)
    except SpecError as e:
        print(f"error: invalid spec: {e}", file=sys.stderr)
        return 2
    if args.experiment == "validate":
        print((args.out / "validation_report.txt").read_text(), end="")
    for f in manifest.flags:
        print(f"warning: {f}", file=sys.stderr)
    return 1 if manifest.flags else 0


if __name__ == "__main__":
    sys.exit(main())
