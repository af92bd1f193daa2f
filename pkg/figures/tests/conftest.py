import subprocess
from pathlib import Path

import pytest
import yaml


def run_sim(experiment: str, out_dir: Path, overrides: dict) -> None:
    """Produce golden CSVs through the simulation CLI, the only
    interface this package consumes."""
    cfg = out_dir / "config.yaml"
    out_dir.mkdir(parents=True, exist_ok=True)
    cfg.write_text(yaml.safe_dump(overrides))
    subprocess.run(
        ["nff", experiment, "--config", str(cfg), "--out", str(out_dir)],
        check=True,
        capture_output=True,
        text=True,
    )


@pytest.fixture(scope="session")
def golden(tmp_path_factory) -> dict[str, list[Path]]:
    """Golden CSVs for every figure kind, keyed by kind."""
    root = tmp_path_factory.mktemp("golden")
    small_scan = {"scan": {"start_lambda": -1.0, "stop_lambda": 1.0, "step_lambda": 0.25}}

    gains = []
    for rc in (1.0, 1.5, 2.0):
        d = root / f"gain_rc{rc}"
        run_sim("scan-gain", d, {**small_scan, "array": {"radius_m": rc}})
        gains.append(d / "gain_scan.csv")

    run_sim("scan-width", root / "width", small_scan)
    run_sim("scan-sll", root / "sll", small_scan)
    run_sim(
        "closed-form",
        root / "cf",
        {"closed_form": {"delta_max_lambda": 1.0, "delta_step_lambda": 0.05}},
    )
    run_sim(
        "map",
        root / "map",
        {
            "array": {"n_elements": 16, "radius_m": 0.4},
            "map": {"half_extent_lambda": 2.2, "step_lambda": 0.1},
        },
    )
    run_sim("nf-ff", root / "nfff", {"nf_ff": {"radii_lambda": [2.0, 3.0]}})

    return {
        "gain-scan": gains,
        "width-scan": [root / "width" / "width_scan.csv"],
        "sll-scan": [root / "sll" / "sll_scan.csv"],
        "line-compare": [root / "cf" / "closed_form.csv"],
        "field-map": [root / "map" / "field_map.csv"],
        "nf-ff": [root / "nfff" / "nf_ff.csv"],
    }
