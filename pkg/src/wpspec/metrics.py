"""Scalar quality metrics for PSD estimates and the +/-/~ comparison table."""
from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.ndimage import median_filter

from .fourier import PsdEstimate

DB_FLOOR = -200.0
SUPPRESSION_CAP_DB = 200.0
DB_MARGIN = 3.0
RATIO_MARGIN = 2.0


class BandLabel(str, enum.Enum):
    PASSBAND = "passband"
    STOPBAND = "stopband"
    CUSTOM = "custom"


@dataclass(frozen=True)
class BandSpec:
    lo: float
    hi: float
    label: BandLabel = BandLabel.CUSTOM

    def __post_init__(self):
        if not 0.0 <= self.lo < self.hi <= 1.0:
            raise ValueError(f"band needs 0 <= lo < hi <= 1, got [{self.lo}, {self.hi}]")
        object.__setattr__(self, "label", BandLabel(self.label))

    def mask(self, freqs: np.ndarray) -> np.ndarray:
        return (freqs >= self.lo) & (freqs <= self.hi)


@dataclass(frozen=True)
class BandStats:
    mean: float
    variance: float
    mean_db: float
    variance_db: float
    count: int


def to_db(values) -> np.ndarray:
    v = np.asarray(values, dtype=float)
    with np.errstate(divide="ignore"):
        out = 10.0 * np.log10(v)
    return np.maximum(out, DB_FLOOR)


def band_values(est: PsdEstimate, bands) -> np.ndarray:
    if isinstance(bands, BandSpec):
        bands = [bands]
    mask = np.zeros(len(est), dtype=bool)
    for b in bands:
        mask |= b.mask(est.freqs)
    return est.values[mask]


def band_stats(est: PsdEstimate, bands) -> BandStats:
    """Mean and unbiased variance of the densities whose grid frequency is in the band(s)."""
    v = band_values(est, bands)
    if v.size < 2:
        raise ValueError(f"band covers {v.size} grid point(s); need at least 2 for a variance")
    vdb = to_db(v)
    return BandStats(
        mean=float(np.mean(v)),
        variance=float(np.var(v, ddof=1)),
        mean_db=float(np.mean(vdb)),
        variance_db=float(np.var(vdb, ddof=1)),
        count=int(v.size),
    )


def _main_lobe(values: np.ndarray, peak: int) -> tuple[int, int]:
    lo = peak
    while lo > 0 and values[lo - 1] <= values[lo]:
        lo -= 1
    hi = peak
    while hi < values.size - 1 and values[hi + 1] <= values[hi]:
        hi += 1
    return lo, hi


def _peak_near(est: PsdEstimate, peak_hint: float, tol: float = 0.05) -> int:
    peak = int(np.argmax(est.values))
    if abs(est.freqs[peak] - peak_hint) > tol:
        raise ValueError(
            f"global maximum at {est.freqs[peak]:.4f} is not within {tol} of {peak_hint}"
        )
    return peak


def sidelobe_suppression(est: PsdEstimate, peak_hint: float) -> float:
    """Peak-to-largest-sidelobe ratio in dB.

    The main lobe runs from the peak down to the first local minimum on each
    side; everything beyond those minima counts as sidelobe.
    """
    v = est.values
    peak = _peak_near(est, peak_hint)
    lo, hi = _main_lobe(v, peak)
    outside = np.concatenate([v[:lo], v[hi + 1:]])
    side = float(outside.max()) if outside.size else 0.0
    if side <= 0.0:
        return SUPPRESSION_CAP_DB
    return min(SUPPRESSION_CAP_DB, 10.0 * math.log10(v[peak] / side))


def mainlobe_width(est: PsdEstimate, peak_hint: float) -> float:
    """Half-power width: contiguous grid points within 3 dB of the peak, times grid spacing."""
    v = est.values
    peak = _peak_near(est, peak_hint)
    thr = v[peak] * 10 ** (-3 / 10)
    lo = peak
    while lo > 0 and v[lo - 1] >= thr:
        lo -= 1
    hi = peak
    while hi < v.size - 1 and v[hi + 1] >= thr:
        hi += 1
    return (hi - lo + 1) * est.bin_width


def transition_width(
    est: PsdEstimate,
    nominal_edge: float,
    pass_ref: float,
    stop_ref: float,
    pass_side: str | None = None,
    search: float = 0.125,
) -> float | None:
    """Distance between the -3 dB passband point and the +3 dB stopband point.

    Works on a 5-point median-smoothed copy. From the edge outwards, the
    first point on the pass side at or above ``pass_ref - 3 dB`` and the
    first point on the stop side at or below ``stop_ref + 3 dB`` are located.
    Returns ``None`` when either is missing within ``search`` of the edge.
    ``pass_side`` ("above"/"below") is inferred when omitted.
    """
    if not pass_ref > stop_ref > 0:
        raise ValueError("need pass_ref > stop_ref > 0")
    if not 0.0 < nominal_edge < 1.0:
        raise ValueError("nominal_edge must lie in (0, 1)")
    f = est.freqs
    s = median_filter(est.values, size=5, mode="nearest")
    above = (f >= nominal_edge) & (f <= nominal_edge + search)
    below = (f < nominal_edge) & (f >= nominal_edge - search)
    if pass_side is None:
        if not above.any() or not below.any():
            return None
        pass_side = "above" if s[above].mean() >= s[below].mean() else "below"
    if pass_side == "above":
        pass_idx, stop_idx = np.flatnonzero(above), np.flatnonzero(below)[::-1]
    elif pass_side == "below":
        pass_idx, stop_idx = np.flatnonzero(below)[::-1], np.flatnonzero(above)
    else:
        raise ValueError("pass_side must be 'above' or 'below'")
    p_hit = pass_idx[s[pass_idx] >= pass_ref * 10 ** (-3 / 10)]
    s_hit = stop_idx[s[stop_idx] <= stop_ref * 10 ** (3 / 10)]
    if p_hit.size == 0 or s_hit.size == 0:
        return None
    return float(abs(f[p_hit[0]] - f[s_hit[0]]))


class ScenarioKind(str, enum.Enum):
    SINGLE_TONE = "single_tone"
    PARTIAL_BAND = "partial_band"
    CUSTOM = "custom"


@dataclass(frozen=True)
class Scenario:
    """Where to measure: pass/stop bands and, per scenario, edges or tone frequency."""

    kind: ScenarioKind
    passbands: tuple
    stopbands: tuple
    edges: tuple = ()
    tone: float | None = None

    @classmethod
    def partial_band(cls, lo: float = 0.25, hi: float = 0.75, inset: float = 0.05) -> "Scenario":
        stops = []
        if lo - inset > 0.0:
            stops.append(BandSpec(0.0, lo - inset, BandLabel.STOPBAND))
        if hi + inset < 1.0:
            stops.append(BandSpec(hi + inset, 1.0, BandLabel.STOPBAND))
        edges = tuple(e for e in (lo, hi) if 0.0 < e < 1.0)
        return cls(
            ScenarioKind.PARTIAL_BAND,
            (BandSpec(lo + inset, hi - inset, BandLabel.PASSBAND),),
            tuple(stops),
            edges=edges,
        )

    @classmethod
    def single_tone(cls, nu0: float = 0.5, guard: float = 0.1) -> "Scenario":
        stops = []
        if nu0 - guard > 0.0:
            stops.append(BandSpec(0.0, nu0 - guard, BandLabel.STOPBAND))
        if nu0 + guard < 1.0:
            stops.append(BandSpec(nu0 + guard, 1.0, BandLabel.STOPBAND))
        passband = BandSpec(max(0.0, nu0 - guard), min(1.0, nu0 + guard), BandLabel.PASSBAND)
        return cls(ScenarioKind.SINGLE_TONE, (passband,), tuple(stops), tone=nu0)


@dataclass(frozen=True)
class MetricsReport:
    estimator_desc: str
    scenario: str
    source: str
    mean_pass: float
    var_pass: float
    mean_pass_db: float
    var_pass_db: float
    mean_stop: float
    var_stop: float
    mean_stop_db: float
    var_stop_db: float
    sidelobe_suppression_db: float
    transition_width: float | None = None
    mainlobe_width: float | None = None
    notes: str = ""

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "MetricsReport":
        return cls(**d)


def evaluate(est: PsdEstimate, scenario: Scenario, source: str = "") -> MetricsReport:
    p = band_stats(est, scenario.passbands)
    s = band_stats(est, scenario.stopbands)
    notes = []
    trans = None
    lobe = None
    if scenario.kind is ScenarioKind.SINGLE_TONE:
        suppression = sidelobe_suppression(est, scenario.tone)
        lobe = mainlobe_width(est, scenario.tone)
        notes.append("sidelobe: peak vs largest sidelobe")
    else:
        stop_max = float(band_values(est, scenario.stopbands).max())
        if stop_max <= 0.0:
            suppression = SUPPRESSION_CAP_DB
        else:
            suppression = min(SUPPRESSION_CAP_DB, 10.0 * math.log10(p.mean / stop_max))
        notes.append("sidelobe: passband mean vs stopband max")
        widths = []
        if p.mean > s.mean > 0:
            for edge in scenario.edges:
                w = transition_width(est, edge, p.mean, s.mean)
                if w is None:
                    notes.append(f"no transition crossing at {edge}")
                else:
                    widths.append(w)
        else:
            notes.append("transition width needs pass mean > stop mean > 0")
        trans = float(np.mean(widths)) if widths else None
    return MetricsReport(
        estimator_desc=est.estimator_desc,
        scenario=scenario.kind.value,
        source=source,
        mean_pass=p.mean,
        var_pass=p.variance,
        mean_pass_db=p.mean_db,
        var_pass_db=p.variance_db,
        mean_stop=s.mean,
        var_stop=s.variance,
        mean_stop_db=s.mean_db,
        var_stop_db=s.variance_db,
        sidelobe_suppression_db=suppression,
        transition_width=trans,
        mainlobe_width=lobe,
        notes="; ".join(notes),
    )


# (column label, report field, "db" or "ratio", True when larger is better)
COLUMNS = {
    ScenarioKind.PARTIAL_BAND.value: (
        ("Side lobe Suppression", "sidelobe_suppression_db", "db", True),
        ("Variance in pass band", "var_pass", "ratio", False),
        ("Transition Band", "transition_width", "ratio", False),
        ("Variance in stop band", "var_stop", "ratio", False),
    ),
    ScenarioKind.SINGLE_TONE.value: (
        ("Mean Power in Stop band", "mean_stop_db", "db", False),
        ("Variance in stop band", "var_stop", "ratio", False),
        ("Frequency Resolution", "mainlobe_width", "ratio", False),
        ("Side lobe Suppression", "sidelobe_suppression_db", "db", True),
    ),
}
COLUMNS[ScenarioKind.CUSTOM.value] = COLUMNS[ScenarioKind.PARTIAL_BAND.value]


def grade(base: float | None, other: float | None, kind: str, higher_better: bool) -> tuple[str, float | None]:
    """Return ``("+", "-", "≈" or "n/a", margin)`` from the baseline's point of view.

    ``margin`` is the dB difference (baseline minus other) for dB metrics, or
    the ratio other/baseline for linear ones.
    """
    if base is None or other is None:
        return "n/a", None
    if kind == "db":
        margin = base - other
        better = margin if higher_better else -margin
        if better > DB_MARGIN:
            return "+", margin
        if better < -DB_MARGIN:
            return "-", margin
        return "≈", margin
    lo_base, lo_other = (other, base) if higher_better else (base, other)
    margin = other / base if base > 0 else None
    if RATIO_MARGIN * lo_base < lo_other:
        return "+", margin
    if RATIO_MARGIN * lo_other < lo_base:
        return "-", margin
    return "≈", margin


@dataclass
class ComparisonTable:
    baseline: str
    scenario: str
    columns: tuple
    rows: dict = field(default_factory=dict)
    margins: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "baseline": self.baseline,
            "scenario": self.scenario,
            "columns": list(self.columns),
            "rows": self.rows,
            "margins": self.margins,
        }

    def to_text(self) -> str:
        head = ["Estimation Methods", *self.columns]
        body = [[desc, *(self.rows[desc][c] for c in self.columns)] for desc in self.rows]
        widths = [max(len(r[i]) for r in [head, *body]) for i in range(len(head))]
        lines = [f"baseline: {self.baseline}", f"scenario: {self.scenario}"]
        for r in [head, *body]:
            lines.append("  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip())
        return "\n".join(lines) + "\n"


def compare(reports, baseline: str) -> ComparisonTable:
    """Grade every non-baseline report against ``baseline`` on its scenario's columns."""
    reports = list(reports)
    by_desc = {r.estimator_desc: r for r in reports}
    if baseline not in by_desc:
        raise ValueError(f"baseline {baseline!r} is not among the reports")
    scen = {(r.scenario, r.source) for r in reports}
    if len(scen) != 1:
        raise ValueError(f"reports come from different scenarios/sources: {sorted(scen)}")
    base = by_desc[baseline]
    cols = COLUMNS[base.scenario]
    table = ComparisonTable(baseline, base.scenario, tuple(c[0] for c in cols))
    for r in reports:
        if r.estimator_desc == baseline:
            continue
        cells, margins = {}, {}
        for label, attr, kind, higher in cols:
            cells[label], margins[label] = grade(getattr(base, attr), getattr(r, attr), kind, higher)
        table.rows[r.estimator_desc] = cells
        table.margins[r.estimator_desc] = margins
    return table
