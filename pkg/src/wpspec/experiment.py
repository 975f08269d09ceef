"""End-to-end experiments: source -> estimators -> metrics -> artifact bundle."""
from __future__ import annotations

import logging
import os
import re
import shutil
import tempfile
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__, io, kernels
from .filters import load_filter
from .fourier import PsdEstimate, blackman_tukey, periodogram, welch
from .metrics import BandLabel, BandSpec, Scenario, ScenarioKind, compare, evaluate
from .multitaper import dpss, mtse
from .signals import Signal, load_signal_csv, make_partial_band, make_tone
from .wpt import wp_decompose, wp_psd

log = logging.getLogger(__name__)


class ExperimentError(RuntimeError):
    pass


_ALIASES = {
    "periodogram": "periodogram",
    "welch": "welch",
    "bt": "bt",
    "blackman_tukey": "bt",
    "blackman-tukey": "bt",
    "mtse": "mtse",
    "multitaper": "mtse",
    "wp": "wp",
    "wavelet_packet": "wp",
}

_DEFAULTS = {
    "periodogram": {"window": "rectangular", "nfft": None},
    "welch": {"segment": 64, "overlap": 0.5, "window": "hamming", "nfft": None},
    "bt": {"max_lag": None, "window": "hamming", "nfft": None},
    "mtse": {"nw": 4.0, "k": 7, "nfft": None},
    "wp": {"filter": "db8", "depth": 5, "boundary": "periodic"},
}

_INT_KEYS = {"nfft", "segment", "max_lag", "k", "depth"}
_FLOAT_KEYS = {"overlap", "nw"}


def _coerce(key: str, value):
    if value is None:
        return None
    if key in _INT_KEYS:
        if isinstance(value, float) and not value.is_integer():
            raise ValueError(f"{key} must be an integer, got {value}")
        return int(value)
    if key in _FLOAT_KEYS:
        return float(value)
    return str(value).lower() if key in ("window", "boundary") else str(value)


@dataclass(frozen=True)
class EstimatorSpec:
    method: str
    params: tuple = ()

    @classmethod
    def build(cls, method: str, params: dict | None = None) -> "EstimatorSpec":
        m = _ALIASES.get(method.strip().lower())
        if m is None:
            raise ValueError(f"unknown estimator method {method!r}; choose from {sorted(_DEFAULTS)}")
        merged = dict(_DEFAULTS[m])
        for k, v in (params or {}).items():
            key = k.strip().lower()
            if key not in merged:
                raise ValueError(f"{m}: unknown parameter {k!r}; valid: {sorted(merged)}")
            merged[key] = _coerce(key, v)
        return cls(m, tuple(sorted(merged.items())))

    @classmethod
    def parse(cls, text: str) -> "EstimatorSpec":
        """``method:key=val,key=val`` (parameters optional)."""
        method, _, rest = text.partition(":")
        params = {}
        for item in filter(None, (p.strip() for p in rest.split(","))):
            key, eq, val = item.partition("=")
            if not eq:
                raise ValueError(f"malformed estimator parameter {item!r} in {text!r}")
            params[key] = val
        return cls.build(method, params)

    @property
    def p(self) -> dict:
        return dict(self.params)

    def with_param(self, key: str, value) -> "EstimatorSpec":
        return EstimatorSpec.build(self.method, {**self.p, key: value})

    @property
    def label(self) -> str:
        p = self.p
        nfft = f"-n{p['nfft']}" if p.get("nfft") else ""
        if self.method == "periodogram":
            return f"periodogram-{p['window']}{nfft}"
        if self.method == "welch":
            return f"welch-{p['segment']}-{p['overlap']:g}-{p['window']}{nfft}"
        if self.method == "bt":
            lag = p["max_lag"] if p["max_lag"] is not None else "auto"
            return f"bt-{lag}-{p['window']}{nfft}"
        if self.method == "mtse":
            return f"mtse-nw{p['nw']:g}-k{p['k']}{nfft}"
        return f"wp-{Path(p['filter']).stem}-j{p['depth']}-{p['boundary']}"

    def to_text(self) -> str:
        items = ",".join(f"{k}={v}" for k, v in self.params if v is not None)
        return f"{self.method}:{items}" if items else self.method

    def run(self, signal: Signal) -> PsdEstimate:
        p = self.p
        if self.method == "periodogram":
            return periodogram(signal, p["window"], p["nfft"])
        if self.method == "welch":
            return welch(signal, p["segment"], p["overlap"], p["window"], p["nfft"])
        if self.method == "bt":
            lag = p["max_lag"] if p["max_lag"] is not None else max(1, signal.length // 16)
            return blackman_tukey(signal, lag, p["window"], p["nfft"])
        if self.method == "mtse":
            tapers = dpss(signal.length, p["nw"], p["k"])
            return mtse(signal, tapers, p["nfft"])
        filters = load_filter(p["filter"])
        tree = wp_decompose(signal, filters, p["depth"], p["boundary"])
        return wp_psd(tree).as_estimate


DEFAULT_ESTIMATORS = (
    "periodogram",
    "welch:segment=64,overlap=0.5,window=hamming",
    "mtse:nw=4,k=7",
    "wp:filter=db8,depth=5,boundary=zeropad",
    "wp:filter=db8,depth=8,boundary=zeropad",
)


def parse_scenario(value) -> str:
    """Accept ``SingleTone``, ``single-tone`` and ``single_tone`` spellings."""
    key = re.sub(r"[^a-z]", "", str(getattr(value, "value", value)).lower())
    for kind in ScenarioKind:
        if kind.value.replace("_", "") == key:
            return kind.value
    raise ValueError(f"unknown scenario {value!r}; choose SingleTone, PartialBand or Custom")


def _parse_band(text: str) -> tuple[str, BandSpec]:
    label, _, rest = text.rpartition(":")
    lo, hi = (float(v) for v in rest.split(","))
    label = label.strip().lower() or "source"
    kinds = {"pass": BandLabel.PASSBAND, "stop": BandLabel.STOPBAND, "source": BandLabel.CUSTOM}
    if label not in kinds:
        raise ValueError(f"band label must be one of {sorted(kinds)}, got {label!r}")
    return label, BandSpec(lo, hi, kinds[label])


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: str = ScenarioKind.PARTIAL_BAND.value
    length: int = 12800
    seed: int = 0
    estimators: tuple = field(default_factory=lambda: tuple(EstimatorSpec.parse(e) for e in DEFAULT_ESTIMATORS))
    bands: tuple = ()
    tone: float = 0.5
    amplitude: float = 1.0
    noise_power: float = 0.0
    baseline: str | None = None
    input: str | None = None
    output_dir: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "scenario", parse_scenario(self.scenario))
        object.__setattr__(
            self,
            "estimators",
            tuple(e if isinstance(e, EstimatorSpec) else EstimatorSpec.parse(e) for e in self.estimators),
        )
        object.__setattr__(self, "bands", tuple(self.bands))

    def validate(self) -> None:
        if not self.estimators:
            raise ExperimentError("config needs at least one estimator")
        if self.length < 64 and self.input is None:
            raise ExperimentError(f"length must be >= 64, got {self.length}")
        if self.seed < 0:
            raise ExperimentError("seed must be unsigned")
        if self.noise_power < 0:
            raise ExperimentError("noise_power must be >= 0")
        labels = [e.label for e in self.estimators]
        dupes = sorted({x for x in labels if labels.count(x) > 1})
        if dupes:
            raise ExperimentError(f"duplicate estimators: {', '.join(dupes)}")
        if self.scenario == ScenarioKind.CUSTOM.value:
            if self.input is None:
                raise ExperimentError("custom scenario needs an input signal file")
            kinds = {_parse_band(b)[0] for b in self.bands}
            if not {"pass", "stop"} <= kinds:
                raise ExperimentError("custom scenario needs --band pass:lo,hi and --band stop:lo,hi")
        if self.baseline is not None and self.baseline not in labels:
            raise ExperimentError(f"baseline {self.baseline!r} is not one of {labels}")

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "length": self.length,
            "seed": self.seed,
            "estimators": [e.to_text() for e in self.estimators],
            "bands": list(self.bands),
            "tone": self.tone,
            "amplitude": self.amplitude,
            "noise_power": self.noise_power,
            "baseline": self.baseline,
            "input": self.input,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        if "config" in d and isinstance(d["config"], dict):
            d = d["config"]  # a manifest
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ExperimentError(f"unknown config keys: {sorted(unknown)}")
        d = dict(d)
        if "estimators" in d:
            d["estimators"] = tuple(
                EstimatorSpec.build(e["method"], e.get("params")) if isinstance(e, dict) else EstimatorSpec.parse(e)
                for e in d["estimators"]
            )
        if "bands" in d:
            d["bands"] = tuple(d["bands"] or ())
        return cls(**d)

    def source_band(self) -> tuple[float, float]:
        for b in self.bands:
            label, spec = _parse_band(b)
            if label == "source":
                return spec.lo, spec.hi
        return 0.25, 0.75

    def build_signal(self) -> Signal:
        if self.scenario == ScenarioKind.CUSTOM.value:
            sig = load_signal_csv(self.input)
        elif self.scenario == ScenarioKind.SINGLE_TONE.value:
            sig = make_tone(self.length, self.tone, self.amplitude, 0.0)
        else:
            lo, hi = self.source_band()
            sig = make_partial_band(self.length, lo, hi, 1.0, self.seed)
        if self.noise_power > 0:
            # separate stream from the source noise so both stay reproducible
            rng = np.random.default_rng([self.seed, 1])
            noisy = sig.samples + np.sqrt(self.noise_power) * rng.standard_normal(sig.length)
            sig = Signal(noisy, f"{sig.source_desc}+awgn({self.noise_power!r})", self.seed)
        elif self.seed and sig.seed == 0:
            sig = Signal(sig.samples, sig.source_desc, self.seed)
        return sig

    def build_scenario(self) -> Scenario:
        if self.scenario == ScenarioKind.SINGLE_TONE.value:
            return Scenario.single_tone(self.tone)
        if self.scenario == ScenarioKind.PARTIAL_BAND.value:
            return Scenario.partial_band(*self.source_band())
        passes, stops = [], []
        for b in self.bands:
            label, spec = _parse_band(b)
            (passes if label == "pass" else stops).append(spec)
        return Scenario(ScenarioKind.CUSTOM, tuple(passes), tuple(stops))

    def default_baseline(self) -> str:
        """Explicit baseline, else the deepest wavelet-packet estimator, else the first."""
        if self.baseline is not None:
            return self.baseline
        wps = [e for e in self.estimators if e.method == "wp"]
        if wps:
            return max(wps, key=lambda e: e.p["depth"]).label
        return self.estimators[0].label


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    signal: Signal
    estimates: dict
    reports: dict
    comparison: object
    files: dict = field(default_factory=dict)


def compute_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Run every estimator and metric in memory; nothing is written."""
    config.validate()
    try:
        signal = config.build_signal()
    except (ValueError, OSError) as exc:
        raise ExperimentError(f"source ({config.scenario}): {exc}") from exc
    scenario = config.build_scenario()
    estimates, reports = {}, {}
    for spec in config.estimators:
        try:
            est = spec.run(signal)
        except ValueError as exc:
            raise ExperimentError(f"estimator {spec.label} ({spec.to_text()}): {exc}") from exc
        estimates[spec.label] = est
        try:
            reports[spec.label] = evaluate(est, scenario, source=signal.source_desc)
        except ValueError as exc:
            raise ExperimentError(f"metrics for {spec.label}: {exc}") from exc
    baseline = config.default_baseline()
    table = compare(reports.values(), reports[baseline].estimator_desc)
    return ExperimentResult(config, signal, estimates, reports, table)


def _write_bundle(result: ExperimentResult, directory: Path) -> dict:
    files = {}
    for label, est in result.estimates.items():
        name = f"psd_{label}.csv"
        io.write_estimate_csv(est, directory / name)
        files[name] = directory / name
        name = f"metrics_{label}.json"
        io.write_json(result.reports[label].to_dict(), directory / name)
        files[name] = directory / name
    io.write_comparison(result.comparison, directory / "comparison.txt", directory / "comparison.json")
    files["comparison.txt"] = directory / "comparison.txt"
    files["comparison.json"] = directory / "comparison.json"
    manifest = {
        "tool": "wpspec",
        "version": __version__,
        "kernel_backend": kernels.BACKEND,
        "config": result.config.to_dict(),
        "seed": result.config.seed,
        "signal": {
            "source_desc": result.signal.source_desc,
            "length": result.signal.length,
            "seed": result.signal.seed,
            "mean_power": result.signal.mean_power,
        },
        "baseline": result.comparison.baseline,
        "files": {name: io.sha256(path) for name, path in sorted(files.items())},
    }
    io.write_json(manifest, directory / "manifest.json")
    files["manifest.json"] = directory / "manifest.json"
    return files


def _prepare_target(out: Path) -> None:
    if out.exists():
        if not out.is_dir() or any(out.iterdir()):
            raise ExperimentError(f"output directory {out} exists and is not empty")
        out.rmdir()
    out.parent.mkdir(parents=True, exist_ok=True)


def _staging(out: Path) -> Path:
    out.parent.mkdir(parents=True, exist_ok=True)
    return Path(tempfile.mkdtemp(prefix=f".{out.name}.", dir=out.parent))


def run_experiment(config: ExperimentConfig, out: str | Path | None = None) -> ExperimentResult:
    """Compute and write a complete bundle, or nothing at all on failure."""
    out = Path(out or config.output_dir or "wpspec-out")
    result = compute_experiment(config)
    _prepare_target(out)
    stage = _staging(out)
    try:
        files = _write_bundle(result, stage)
        os.replace(stage, out)
    except BaseException:
        shutil.rmtree(stage, ignore_errors=True)
        raise
    result.files = {name: out / path.name for name, path in files.items()}
    log.info("wrote %d files to %s", len(files), out)
    return result


SWEEP_PARAMETERS = {
    "depth": ("wp", "depth"),
    "segment_len": ("welch", "segment"),
    "max_lag": ("bt", "max_lag"),
    "K": ("mtse", "k"),
}


def sweep_configs(config: ExperimentConfig, parameter: str, values) -> list:
    if parameter not in SWEEP_PARAMETERS:
        raise ExperimentError(f"cannot sweep {parameter!r}; choose from {sorted(SWEEP_PARAMETERS)}")
    method, key = SWEEP_PARAMETERS[parameter]
    if not any(e.method == method for e in config.estimators):
        raise ExperimentError(f"sweeping {parameter} needs a {method} estimator in the config")
    out = []
    for v in values:
        ests = tuple(e.with_param(key, v) if e.method == method else e for e in config.estimators)
        baseline = config.baseline
        if baseline is not None and baseline not in {e.label for e in ests}:
            baseline = None
        out.append((v, replace(config, estimators=ests, baseline=baseline)))
    return out


def sweep(config: ExperimentConfig, parameter: str, values, out: str | Path | None = None) -> dict:
    """One sub-bundle per value plus ``sweep_summary.csv``; aborts on the first failure."""
    out = Path(out or config.output_dir or "wpspec-sweep")
    method, _ = SWEEP_PARAMETERS.get(parameter, (None, None))
    runs = sweep_configs(config, parameter, values)
    _prepare_target(out)
    stage = _staging(out)
    results = {}
    try:
        rows = []
        for value, cfg in runs:
            sub = f"{parameter}-{value}"
            try:
                result = run_experiment(cfg, stage / sub)
            except ExperimentError as exc:
                raise ExperimentError(f"sweep {parameter}={value}: {exc}") from exc
            results[value] = result
            for spec in cfg.estimators:
                if spec.method == method:
                    rows.append((value, spec.label, result.reports[spec.label]))
        _write_summary(rows, parameter, stage / "sweep_summary.csv")
        os.replace(stage, out)
    except BaseException:
        shutil.rmtree(stage, ignore_errors=True)
        raise
    return results


def _write_summary(rows, parameter: str, path: Path) -> None:
    import csv

    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([parameter, "estimator", *io.REPORT_FIELDS])
        for value, label, report in rows:
            d = report.to_dict()
            writer.writerow([value, label, *("" if d[k] is None else d[k] for k in io.REPORT_FIELDS)])
