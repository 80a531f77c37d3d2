"""Command-line interface.

Subcommands: compute-ph, features, train-predict, warn, loadcalc, synth,
run-all. Exit codes: 0 success, 1 input error, 2 numerical error, 3 warning
triggered (warn/run-all with --gate).
"""

from __future__ import annotations

import argparse
import json
import re
import sys
import warnings
from pathlib import Path


from . import blastload, dataio, pipeline, synth
from .errors import InputError, NumericalError
from .features import feature_series
from .topology import DEFAULT_MAX_FILTRATION

BARCODE_FILE_RE = re.compile(r"barcode_(\d+)\.csv$")


def _cmd_compute_ph(args) -> int:
    seq = dataio.load_sequence(args.manifest)
    barcodes = pipeline.compute_barcodes(seq, args.max_filtration, args.keep_zero_bars)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for event, b in zip(seq.events, barcodes):
        dataio.write_barcode(b, out_dir / pipeline.barcode_filename(event))
    pipeline.write_summary(barcodes, out_dir / "summary.csv")
    for e, b0, f8, f14 in pipeline.summary_rows(barcodes):
        print(f"event {e:3d}: beta0@0={b0}  f8={f8:.6g}  f14={f14}")
    print(f"wrote {len(barcodes)} barcode files to {out_dir}")
    return 0


def _load_barcode_dir(barcode_dir: Path) -> tuple[list[int], list]:
    found = {}
    for p in sorted(barcode_dir.glob("barcode_*.csv")):
        m = BARCODE_FILE_RE.search(p.name)
        if m:
            found[int(m.group(1))] = p
    if not found:
        raise InputError(f"no barcode_*.csv files in {barcode_dir}")
    missing = [e for e in range(max(found) + 1) if e not in found]
    if missing:
        raise InputError(f"missing barcode file(s) for event(s) {missing} in {barcode_dir}")
    events = sorted(found)
    return events, [dataio.read_barcode(found[e]) for e in events]


def _cmd_features(args) -> int:
    events, barcodes = _load_barcode_dir(Path(args.barcode_dir))
    caps = {b.max_filtration for b in barcodes}
    cap = args.max_filtration
    if cap is None:
        if len(caps) > 1:
            raise InputError(f"barcode files carry mixed max_filtration values {sorted(caps)}")
        cap = caps.pop()
    elif caps != {cap}:
        warnings.warn(
            f"barcodes were computed with max_filtration {sorted(caps)} but features "
            f"are extracted with {cap}", stacklevel=1)
    vectors = feature_series(barcodes, cap)
    dataio.write_features(events, vectors, args.out)
    print(f"wrote {len(events)} feature rows to {args.out}")
    return 0


def _print_experiment(report: pipeline.ExperimentReport) -> None:
    print(f"feature {report.feature_index}: gamma={report.gamma:g} "
          f"sigma={report.sigma:g} trend_guard={report.trend_guard_applied}")
    for e in report.test_events:
        truth = report.truth.get(e)
        err = report.rel_errors.get(e)
        line = f"  event {e}: predicted {report.predictions[e]:.4f}"
        if truth is not None:
            line += f"  truth {truth:.4f}  error {100 * err:.2f}%"
        print(line)


def _cmd_train_predict(args) -> int:
    if args.preset == "paper":
        reports = pipeline.run_table6_experiment((args.feature,), args.split)
        report = reports[args.feature]
    else:
        if args.features is None:
            raise InputError("train-predict needs --features FILE or --preset paper")
        events, matrix = dataio.read_features(args.features)
        if not 1 <= args.feature <= 14:
            raise InputError(f"--feature must be in 1..14, got {args.feature}")
        column = matrix[:, args.feature - 1]
        truth = {e: float(column[i]) for i, e in enumerate(events) if e > args.split}
        report, _ = pipeline.run_feature_experiment(
            events, column, truth, args.feature, args.split)
    _print_experiment(report)
    if args.out:
        Path(args.out).write_text(json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n")
        print(f"wrote report to {args.out}")
    return 0


def _cmd_warn(args) -> int:
    if args.preset == "paper":
        _, t6 = dataio.fixtures()
        series = t6.features[args.feature].y
    else:
        if args.features is None:
            raise InputError("warn needs --features FILE or --preset paper")
        events, matrix = dataio.read_features(args.features)
        series = matrix[:, args.feature - 1]
    report = pipeline.detect_warning(series, args.threshold, args.rapid_ratio)
    if report.triggered:
        print(f"WARNING triggered at event {report.trigger_event} "
              f"({report.criterion} criterion)")
    else:
        print("no warning triggered")
    for note in report.notes:
        print(f"note: {note}")
    if args.out:
        Path(args.out).write_text(json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n")
        print(f"wrote report to {args.out}")
    if report.triggered and args.gate:
        return 3
    return 0


def _cmd_loadcalc(args) -> int:
    if args.preset == "paper":
        load = blastload.paper_preset()
    else:
        required = ("radius", "spacing", "charge_density", "detonation_velocity",
                    "uncoupling", "enlargement")
        missing = [n for n in required if getattr(args, n) is None]
        if missing:
            raise InputError(
                "loadcalc needs --preset paper or all of: "
                + ", ".join("--" + n.replace("_", "-") for n in missing))
        cfg = blastload.BlastConfig(args.radius, args.spacing, args.charge_density,
                                    args.detonation_velocity, args.uncoupling,
                                    args.enlargement)
        load = blastload.calibrated_from_config(cfg)
    profile = load.profile
    print(f"single-hole peak P_m = {load.single_hole_peak!r} Pa")
    print(f"uniform peak        = {profile.peak_pressure!r} Pa (2R/L = {load.bore_ratio!r})")
    steps = round(profile.total_time * 2000)
    rows = []
    for k in range(steps + 1):
        t = k / 2000.0  # 0.5 ms sampling
        rows.append((t, blastload.load_at(profile, t)))
    if args.out:
        lines = ["t_s,pressure_pa"] + [f"{t!r},{p!r}" for t, p in rows]
        Path(args.out).write_text("\n".join(lines) + "\n")
        print(f"wrote {len(rows)} samples to {args.out}")
    else:
        for t, p in rows:
            print(f"{1000 * t:6.1f} ms  {p:.6e} Pa")
    return 0


def _cmd_synth(args) -> int:
    cfg = synth.ScenarioConfig(
        n_blocks=args.n_blocks, n_events=args.n_events, seed=args.seed,
        ring_radius=args.ring_radius, collapse_rate=args.collapse_rate,
        jitter=args.jitter)
    seq = synth.generate_sequence(cfg)
    manifest = dataio.write_sequence(seq, args.out_dir)
    print(f"wrote {len(seq)} snapshots and manifest to {manifest}")
    return 0


def _cmd_run_all(args) -> int:
    if args.preset == "paper":
        seq = None
        use_fixture = True
    elif args.manifest:
        seq = dataio.load_sequence(args.manifest)
        use_fixture = False
    else:
        cfg = synth.ScenarioConfig(seed=args.seed)
        seq = synth.generate_sequence(cfg)
        use_fixture = False
    written = pipeline.run_all(
        seq, args.out_dir, max_filtration=args.max_filtration, split=args.split,
        threshold=args.threshold, rapid_change_ratio=args.rapid_ratio,
        use_fixture=use_fixture)
    for key, path in written.items():
        print(f"{key}: {path}")
    warning = json.loads((Path(args.out_dir) / "warning.json").read_text())
    if warning["triggered"]:
        print(f"WARNING triggered at event {warning['trigger_event']} "
              f"({warning['criterion']} criterion)")
        if args.gate:
            return 3
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tunneltda",
        description="Persistence barcodes, feature prediction and collapse "
                    "early-warning for block point clouds under repeated blasts.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute-ph", help="barcodes for every snapshot in a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--max-filtration", type=float, default=DEFAULT_MAX_FILTRATION)
    p.add_argument("--keep-zero-bars", action="store_true")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=_cmd_compute_ph)

    p = sub.add_parser("features", help="extract the 14 features per barcode file")
    p.add_argument("--barcode-dir", required=True)
    p.add_argument("--max-filtration", type=float, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_features)

    p = sub.add_parser("train-predict", help="fit one feature series and predict the held-out events")
    p.add_argument("--features")
    p.add_argument("--preset", choices=["paper"])
    p.add_argument("--feature", type=int, default=8)
    p.add_argument("--split", type=int, default=pipeline.DEFAULT_SPLIT)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_train_predict)

    p = sub.add_parser("warn", help="scan a feature series for the collapse warning")
    p.add_argument("--features")
    p.add_argument("--preset", choices=["paper"])
    p.add_argument("--feature", type=int, default=8)
    p.add_argument("--threshold", type=float, default=pipeline.DEFAULT_THRESHOLD)
    p.add_argument("--rapid-ratio", type=float, default=pipeline.DEFAULT_RAPID_RATIO)
    p.add_argument("--gate", action="store_true",
                   help="exit with code 3 when the warning triggers")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_warn)

    p = sub.add_parser("loadcalc", help="equivalent uniform blast load table")
    p.add_argument("--preset", choices=["paper"])
    p.add_argument("--radius", type=float)
    p.add_argument("--spacing", type=float)
    p.add_argument("--charge-density", type=float)
    p.add_argument("--detonation-velocity", type=float)
    p.add_argument("--uncoupling", type=float)
    p.add_argument("--enlargement", type=float)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_loadcalc)

    p = sub.add_parser("synth", help="write a synthetic collapse sequence")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--n-blocks", type=int, default=42)
    p.add_argument("--n-events", type=int, default=20)
    p.add_argument("--ring-radius", type=float, default=12.0)
    p.add_argument("--collapse-rate", type=float, default=0.35)
    p.add_argument("--jitter", type=float, default=0.05)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("run-all", help="full pipeline bundle")
    p.add_argument("--manifest")
    p.add_argument("--preset", choices=["paper"],
                   help="use the published feature series instead of snapshots")
    p.add_argument("--seed", type=int, default=7,
                   help="seed for the synthetic scenario when no manifest is given")
    p.add_argument("--max-filtration", type=float, default=DEFAULT_MAX_FILTRATION)
    p.add_argument("--split", type=int, default=pipeline.DEFAULT_SPLIT)
    p.add_argument("--threshold", type=float, default=pipeline.DEFAULT_THRESHOLD)
    p.add_argument("--rapid-ratio", type=float, default=pipeline.DEFAULT_RAPID_RATIO)
    p.add_argument("--gate", action="store_true")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=_cmd_run_all)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
