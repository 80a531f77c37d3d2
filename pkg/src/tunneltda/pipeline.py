"""Orchestration: snapshots -> barcodes -> features -> prediction -> warning.

The prediction protocol mirrors the published experiment: one regressor per
feature with the blast index as input, trained on events 0..split and
evaluated on the remaining events. The early warning watches the longest
dim-1 bar (feature 8): the collapse boundary is flagged when it drops
strictly below the threshold, or when a single per-event drop dwarfs the
typical drop seen so far.
"""

from __future__ import annotations

import json
import statistics
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import dataio, features, lssvm
from .dataio import SnapshotSequence
from .errors import InputError, NumericalError
from .topology import (Barcode, DEFAULT_MAX_FILTRATION, barcode_from_cloud,
                       betti_numbers)

DEFAULT_THRESHOLD = 21.68
DEFAULT_RAPID_RATIO = 10.0
DEFAULT_SPLIT = 15
GAMMA_GRID = (1.0, 10.0, 100.0, 1000.0)
SIGMA_GRID = (0.25, 0.5, 1.0, 2.0, 4.0)
EXPERIMENT_FEATURES = (2, 8, 13, 14)


@contextmanager
def _stage(name: str):
    """Re-raise pipeline errors with the failing stage attached."""
    try:
        yield
    except (InputError, NumericalError) as exc:
        exc.args = (f"[{name}] {exc.args[0] if exc.args else exc}",) + exc.args[1:]
        raise


# ---------------------------------------------------------------------------
# persistence and features

def compute_barcodes(seq: SnapshotSequence,
                     max_filtration: float = DEFAULT_MAX_FILTRATION,
                     keep_zero_bars: bool = False) -> list[Barcode]:
    """One barcode per snapshot, in event order."""
    barcodes = []
    for event, cloud in zip(seq.events, seq.clouds):
        with _stage(f"persistence event {event}"):
            barcodes.append(barcode_from_cloud(cloud, max_filtration, keep_zero_bars))
    return barcodes


def summary_rows(barcodes: list[Barcode]) -> list[tuple[int, int, float, int]]:
    """Per event: (event, components at scale 0, longest hole bar, hole count)."""
    rows = []
    for event, b in enumerate(barcodes):
        vec = features.extract_features(b)
        rows.append((event, betti_numbers(b, 0.0)[0], vec.f8, vec.f14))
    return rows


SUMMARY_HEADER = "event,beta0_at_0,f8,f14"


def barcode_filename(event: int) -> str:
    return f"barcode_{event:03d}.csv"


def _write_plot_series(path: str | Path, header: str, rows) -> None:
    lines = [header] + [",".join(str(c) if isinstance(c, int) else repr(float(c))
                                 for c in row) for row in rows]
    Path(path).write_text("\n".join(lines) + "\n")


def write_summary(barcodes: list[Barcode], path: str | Path) -> None:
    _write_plot_series(path, SUMMARY_HEADER, summary_rows(barcodes))


# ---------------------------------------------------------------------------
# per-feature prediction

@dataclass(frozen=True)
class FeaturePredictor:
    """A trained regressor over the blast index, with its input standardization."""

    model: lssvm.LssvmModel
    x_mean: float
    x_std: float

    @classmethod
    def fit(cls, events: np.ndarray, values: np.ndarray,
            gamma_grid: tuple[float, ...] = GAMMA_GRID,
            sigma_grid: tuple[float, ...] = SIGMA_GRID) -> "FeaturePredictor":
        """LOO grid search over (gamma, sigma) on standardized event indices.

        A constant target column short-circuits to the exact flat model
        (zero coefficients, bias equal to the constant): the KKT system is
        satisfied exactly and predictions carry no solver noise.
        """
        events = np.asarray(events, dtype=float)
        values = np.asarray(values, dtype=float)
        x_mean = float(events.mean())
        x_std = float(events.std())
        if x_std == 0.0:
            raise InputError("training events are all identical")
        xs = ((events - x_mean) / x_std)[:, None]
        if np.ptp(values) == 0.0:
            model = lssvm.LssvmModel(
                alphas=np.zeros(len(values)), bias=float(values[0]),
                gamma=gamma_grid[0], kernel=lssvm.KernelSpec("rbf", sigma_grid[0]),
                inputs=xs,
            )
            return cls(model, x_mean, x_std)
        ts = lssvm.TrainingSet(xs, values)
        gamma, kernel, _ = lssvm.select_hyperparameters(ts, gamma_grid, sigma_grid)
        return cls(lssvm.train_regressor(ts, gamma, kernel), x_mean, x_std)

    def predict(self, events: np.ndarray) -> np.ndarray:
        xs = ((np.asarray(events, dtype=float) - self.x_mean) / self.x_std)[:, None]
        return lssvm.predict_batch(self.model, xs)


def _apply_trend_guard(train_values: np.ndarray, preds: np.ndarray) -> tuple[np.ndarray, bool]:
    """Clamp forecasts of a strictly monotone series to stay monotone.

    Kernel extrapolation drifts back toward the bias far from the data; for
    a damage indicator that only ever moved one way that drift is spurious,
    so forecasts are capped at the last observed value and made monotone by
    running min (or max). Uses training data only.
    """
    diffs = np.diff(train_values)
    if np.all(diffs < 0):
        return np.minimum.accumulate(np.minimum(preds, train_values[-1])), True
    if np.all(diffs > 0):
        return np.maximum.accumulate(np.maximum(preds, train_values[-1])), True
    return preds, False


@dataclass(frozen=True)
class ExperimentReport:
    """Held-out predictions for one feature and their errors against truth."""

    feature_index: int
    train_events: tuple[int, ...]
    test_events: tuple[int, ...]
    predictions: dict[int, float]
    truth: dict[int, float]
    rel_errors: dict[int, float]   # |prediction - truth| / |truth|
    gamma: float
    sigma: float
    trend_guard_applied: bool

    def max_rel_error(self) -> float:
        return max(self.rel_errors.values()) if self.rel_errors else 0.0

    def to_dict(self) -> dict:
        return {
            "feature_index": self.feature_index,
            "train_events": list(self.train_events),
            "test_events": list(self.test_events),
            "predictions": {str(k): v for k, v in self.predictions.items()},
            "truth": {str(k): v for k, v in self.truth.items()},
            "rel_errors": {str(k): v for k, v in self.rel_errors.items()},
            "gamma": self.gamma,
            "sigma": self.sigma,
            "trend_guard_applied": self.trend_guard_applied,
        }


def run_feature_experiment(
    events: list[int], values: np.ndarray, truth: dict[int, float],
    feature_index: int, split: int = DEFAULT_SPLIT,
    gamma_grid: tuple[float, ...] = GAMMA_GRID,
    sigma_grid: tuple[float, ...] = SIGMA_GRID,
) -> tuple[ExperimentReport, FeaturePredictor]:
    """Train on events <= split, predict the rest, score against truth."""
    events = list(events)
    values = np.asarray(values, dtype=float)
    train_idx = [i for i, e in enumerate(events) if e <= split]
    test_idx = [i for i, e in enumerate(events) if e > split]
    if len(train_idx) < 2:
        raise InputError(f"split {split} leaves fewer than 2 training events")
    if not test_idx:
        raise InputError(f"split {split} leaves no test events")
    train_events = np.array([events[i] for i in train_idx])
    test_events = np.array([events[i] for i in test_idx])
    train_values = values[train_idx]

    predictor = FeaturePredictor.fit(train_events, train_values, gamma_grid, sigma_grid)
    raw = predictor.predict(test_events)
    preds, guarded = _apply_trend_guard(train_values, raw)

    predictions = {int(e): float(p) for e, p in zip(test_events, preds)}
    rel = {}
    for e in test_events:
        e = int(e)
        if e in truth:
            denom = abs(truth[e])
            rel[e] = abs(predictions[e] - truth[e]) / denom if denom else float("inf")
    return ExperimentReport(
        feature_index=feature_index,
        train_events=tuple(int(e) for e in train_events),
        test_events=tuple(int(e) for e in test_events),
        predictions=predictions,
        truth={int(e): float(v) for e, v in truth.items()},
        rel_errors=rel,
        gamma=predictor.model.gamma,
        sigma=float(predictor.model.kernel.sigma),
        trend_guard_applied=guarded,
    ), predictor


def run_table6_experiment(feature_indices: tuple[int, ...] = EXPERIMENT_FEATURES,
                          split: int = DEFAULT_SPLIT) -> dict[int, ExperimentReport]:
    """Fixture-driven experiment: train on the published series, score against
    the published held-out values."""
    _, t6 = dataio.fixtures()
    events = list(range(21))
    reports = {}
    for k in feature_indices:
        fx = t6.features[k]
        report, _ = run_feature_experiment(events, np.array(fx.y), fx.j, k, split)
        reports[k] = report
    return reports


# ---------------------------------------------------------------------------
# early warning

@dataclass(frozen=True)
class WarningReport:
    triggered: bool
    trigger_event: int | None
    criterion: str | None           # 'threshold' or 'rapid-change'
    series: tuple[float, ...]
    threshold: float | None
    rapid_change_ratio: float
    at_threshold_events: tuple[int, ...] = ()
    notes: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "triggered": self.triggered,
            "trigger_event": self.trigger_event,
            "criterion": self.criterion,
            "series": list(self.series),
            "threshold": self.threshold,
            "rapid_change_ratio": self.rapid_change_ratio,
            "at_threshold_events": list(self.at_threshold_events),
            "notes": list(self.notes),
        }


def detect_warning(series, threshold: float | None = DEFAULT_THRESHOLD,
                   rapid_change_ratio: float = DEFAULT_RAPID_RATIO) -> WarningReport:
    """Scan a longest-hole-bar series for the collapse boundary.

    Threshold criterion: first event strictly below the threshold; an event
    exactly at the threshold is recorded as an advisory, not a trigger.
    Rapid-change criterion: first event whose drop exceeds the ratio times
    the median of all earlier drops (skipped while that median is zero, so a
    flat series never divides by zero).
    """
    series = [float(v) for v in series]
    if len(series) < 2:
        raise InputError("warning scan needs a series of at least 2 events")
    if not rapid_change_ratio > 0:
        raise InputError(f"rapid-change ratio must be positive, got {rapid_change_ratio}")
    at_threshold = []
    trigger_event = None
    criterion = None
    for e, value in enumerate(series):
        if threshold is not None:
            if abs(value - threshold) <= 1e-12 * max(1.0, abs(threshold)):
                at_threshold.append(e)
            elif value < threshold:
                trigger_event, criterion = e, "threshold"
                break
        if e >= 2:
            drops = [series[i - 1] - series[i] for i in range(1, e + 1)]
            median_prior = statistics.median(drops[:-1])
            if median_prior > 0 and drops[-1] > rapid_change_ratio * median_prior:
                trigger_event, criterion = e, "rapid-change"
                break
    notes = tuple(
        f"event {e} sits exactly at the threshold {threshold}" for e in at_threshold
    )
    return WarningReport(
        triggered=trigger_event is not None,
        trigger_event=trigger_event,
        criterion=criterion,
        series=tuple(series),
        threshold=threshold,
        rapid_change_ratio=rapid_change_ratio,
        at_threshold_events=tuple(at_threshold),
        notes=notes,
    )


# ---------------------------------------------------------------------------
# full run

def run_all(seq: SnapshotSequence | None, out_dir: str | Path,
            max_filtration: float = DEFAULT_MAX_FILTRATION,
            split: int = DEFAULT_SPLIT,
            threshold: float | None = DEFAULT_THRESHOLD,
            rapid_change_ratio: float = DEFAULT_RAPID_RATIO,
            use_fixture: bool = False) -> dict:
    """Run every stage and write the full bundle under out_dir.

    With use_fixture the persistence stages are skipped and the published
    feature series drives prediction and warning; otherwise seq supplies the
    snapshots. Returns a manifest of what was written.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = {}

    if use_fixture:
        _, t6 = dataio.fixtures()
        with _stage("train-predict"):
            reports = run_table6_experiment(split=split)
        f8_series = t6.features[8].y
        f14_series = t6.features[14].y
    else:
        if seq is None:
            raise InputError("run_all needs a snapshot sequence unless use_fixture is set")
        with _stage("compute-ph"):
            barcodes = compute_barcodes(seq, max_filtration)
        barcode_dir = out_dir / "barcodes"
        barcode_dir.mkdir(exist_ok=True)
        for event, b in zip(seq.events, barcodes):
            dataio.write_barcode(b, barcode_dir / barcode_filename(event))
        written["barcodes"] = str(barcode_dir)

        with _stage("features"):
            vectors = features.feature_series(barcodes, max_filtration)
        events = list(seq.events)
        dataio.write_features(events, vectors, out_dir / "features.csv")
        written["features"] = str(out_dir / "features.csv")

        write_summary(barcodes, out_dir / "summary.csv")
        written["summary"] = str(out_dir / "summary.csv")

        matrix = features.feature_matrix(vectors)
        reports = {}
        with _stage("train-predict"):
            for k in EXPERIMENT_FEATURES:
                column = matrix[:, k - 1]
                truth = {e: float(column[i]) for i, e in enumerate(events) if e > split}
                reports[k], predictor = run_feature_experiment(
                    events, column, truth, k, split)
                model_dir = out_dir / "models"
                model_dir.mkdir(exist_ok=True)
                dataio.write_model(predictor.model, predictor.x_mean,
                                   predictor.x_std, model_dir / f"model_f{k}.json")
        f8_series = tuple(matrix[:, 7])
        f14_series = tuple(matrix[:, 13])

    experiment_doc = {str(k): reports[k].to_dict() for k in sorted(reports)}
    (out_dir / "experiment.json").write_text(
        json.dumps(experiment_doc, indent=2, sort_keys=True) + "\n")
    written["experiment"] = str(out_dir / "experiment.json")

    with _stage("warn"):
        warning = detect_warning(f8_series, threshold, rapid_change_ratio)
    (out_dir / "warning.json").write_text(
        json.dumps(warning.to_dict(), indent=2, sort_keys=True) + "\n")
    written["warning"] = str(out_dir / "warning.json")

    _write_plot_series(out_dir / "plot_f8_series.csv", "event,f8",
                       list(enumerate(f8_series)))
    _write_plot_series(out_dir / "plot_hole_counts.csv", "event,f14",
                       [(e, int(v)) for e, v in enumerate(f14_series)])
    written["plot_f8"] = str(out_dir / "plot_f8_series.csv")
    written["plot_holes"] = str(out_dir / "plot_hole_counts.csv")
    return written
