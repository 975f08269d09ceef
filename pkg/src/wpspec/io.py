"""CSV/JSON serialization for estimates, metrics reports and comparison tables.

Floats are written with ``repr`` so files round-trip exactly and identical
runs produce byte-identical output.
"""
from __future__ import annotations

import csv
import hashlib
import json
import math
from pathlib import Path

import numpy as np

from .fourier import GRID_TRAPEZOID, PsdEstimate
from .metrics import ComparisonTable, MetricsReport


def _clean(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def dumps(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def write_json(obj, path: str | Path) -> None:
    Path(path).write_text(dumps(obj), encoding="utf-8")


def read_json(path: str | Path):
    return json.loads(Path(path).read_text(encoding="utf-8"))


def estimate_to_dict(est: PsdEstimate) -> dict:
    return {
        "estimator_desc": est.estimator_desc,
        "grid_kind": est.grid_kind,
        "freqs": est.freqs.tolist(),
        "values": est.values.tolist(),
    }


def estimate_from_dict(d: dict) -> PsdEstimate:
    return PsdEstimate(
        np.array(d["freqs"]),
        np.array(d["values"]),
        d["estimator_desc"],
        d.get("grid_kind", GRID_TRAPEZOID),
    )


def write_estimate_csv(est: PsdEstimate, path: str | Path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        fh.write(f"# estimator: {est.estimator_desc}\n")
        fh.write(f"# grid: {est.grid_kind}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["freq", "density"])
        for f, v in zip(est.freqs.tolist(), est.values.tolist()):
            writer.writerow([repr(f), repr(v)])


def read_estimate_csv(path: str | Path) -> PsdEstimate:
    desc, grid = Path(path).stem, GRID_TRAPEZOID
    freqs, values = [], []
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("#"):
                key, _, val = line[1:].partition(":")
                if key.strip() == "estimator":
                    desc = val.strip()
                elif key.strip() == "grid":
                    grid = val.strip()
                continue
            if not line.strip() or line.startswith("freq"):
                continue
            f, v = line.split(",")
            freqs.append(float(f))
            values.append(float(v))
    return PsdEstimate(np.array(freqs), np.array(values), desc, grid)


def write_estimate_json(est: PsdEstimate, path: str | Path) -> None:
    write_json(estimate_to_dict(est), path)


def read_estimate_json(path: str | Path) -> PsdEstimate:
    return estimate_from_dict(read_json(path))


def read_estimate(path: str | Path) -> PsdEstimate:
    if str(path).endswith(".json"):
        return read_estimate_json(path)
    return read_estimate_csv(path)


REPORT_FIELDS = tuple(MetricsReport.__dataclass_fields__)


def write_reports_csv(reports, path: str | Path, extra: dict | None = None) -> None:
    extra = extra or {}
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([*extra, *REPORT_FIELDS])
        for r in reports:
            d = r.to_dict()
            writer.writerow([*extra.values(), *("" if d[k] is None else d[k] for k in REPORT_FIELDS)])


def read_report(path: str | Path) -> MetricsReport:
    return MetricsReport.from_dict(read_json(path))


def write_comparison(table: ComparisonTable, txt_path: str | Path, json_path: str | Path) -> None:
    Path(txt_path).write_text(table.to_text(), encoding="utf-8")
    write_json(table.to_dict(), json_path)


def sha256(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
