"""Acceptance gate: one test per criterion, each printing a pass/fail line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines.
"""

import math
import time
from contextlib import contextmanager

import numpy as np
import pytest

from tunneltda import dataio
from tunneltda.blastload import (BlastConfig, equivalent_uniform_peak, load_at,
                                 paper_preset, peak_pressure, shape_factor,
                                 uniform_peak_direct)
from tunneltda.features import extract_features
from tunneltda.lssvm import (KernelSpec, TrainingSet, kkt_residual, predict,
                             train_classifier, train_regressor)
from tunneltda.pipeline import detect_warning, run_all, run_table6_experiment
from tunneltda.synth import ScenarioConfig, generate_sequence
from tunneltda.topology import (Barcode, FiltSimplex, PersistencePair, barcode_from_cloud,
                                betti_numbers, boundary, boundary_of_chain,
                                build_vr_filtration, compute_distance_matrix,
                                compute_persistence)

from conftest import INF, bars, make_cloud, random_cloud
from oracle import rank_function_barcode


@contextmanager
def criterion(number, description):
    try:
        yield
    except BaseException:
        print(f"criterion {number:2d}: FAIL - {description}")
        raise
    print(f"criterion {number:2d}: PASS - {description}")


def test_criterion_1_oracle_equivalence():
    with criterion(1, "reduction matches brute-force rank oracle on 50 random clouds"):
        start = time.perf_counter()
        rng = np.random.default_rng(2024)
        for _ in range(50):
            n = int(rng.integers(2, 9))
            cloud = random_cloud(rng, n, scale=4.0)
            dm = compute_distance_matrix(cloud)
            cap = float(rng.uniform(0.4, 1.3) * max(dm.d.max(), 1e-6))
            f = build_vr_filtration(dm, cap)
            got = sorted((p.dim, p.birth, p.death) for p in compute_persistence(f).pairs)
            expected = sorted(rank_function_barcode(f))
            assert len(got) == len(expected)
            for g, e in zip(got, expected):
                assert g[0] == e[0]
                assert abs(g[1] - e[1]) <= 1e-9
                assert (math.isinf(g[2]) and math.isinf(e[2])) or abs(g[2] - e[2]) <= 1e-9
        elapsed = time.perf_counter() - start
        assert elapsed < 10.0, f"oracle comparison took {elapsed:.1f}s"


def test_criterion_2_canonical_shapes():
    with criterion(2, "unit square, equilateral triangle and single point barcodes"):
        square = barcode_from_cloud(make_cloud([(0, 0), (1, 0), (1, 1), (0, 1)]), 2.0)
        holes = square.in_dim(1)
        assert len(holes) == 1
        assert abs(holes[0].birth - 1.0) <= 1e-9
        assert abs(holes[0].death - math.sqrt(2)) <= 1e-9

        triangle = barcode_from_cloud(
            make_cloud([(0, 0), (1, 0), (0.5, math.sqrt(3) / 2)]), 2.0)
        assert len(triangle.in_dim(1)) == 0

        point = barcode_from_cloud(make_cloud([(7, -2)]), 1.0)
        assert point.pairs == (PersistencePair(0, 0.0, math.inf),)


def test_criterion_3_boundary_squares_to_zero():
    with criterion(3, "boundary of boundary vanishes for 1000 random simplices"):
        rng = np.random.default_rng(33)
        for _ in range(1000):
            size = int(rng.integers(2, 4))
            verts = tuple(sorted(rng.choice(50, size=size, replace=False).tolist()))
            s = FiltSimplex(verts, float(rng.uniform(0, 10)))
            assert not boundary_of_chain(boundary(s))


def test_criterion_4_components_at_zero_scale():
    with criterion(4, "components at scale 0 equal the point count on 100 clouds"):
        rng = np.random.default_rng(44)
        for _ in range(100):
            n = int(rng.integers(1, 21))
            cloud = random_cloud(rng, n, scale=20.0)
            b = barcode_from_cloud(cloud, 2.0)
            assert betti_numbers(b, 0.0)[0] == n


def test_criterion_5_feature_extraction():
    with criterion(5, "hand-computed features exact; scale equivariance on 100 barcodes"):
        vec = extract_features(bars(
            (0, 0.0, INF), (0, 0.0, 3.0), (0, 0.0, 2.0),
            (1, 2.0, 4.0), (1, 1.0, 1.8), cap=10.0))
        expected = [15.0, 2.8, 3.0, 2.0, 5.0, 2.5, 2.0, 2.0, 2.0, 3.0, 0.0, 0.0, 3, 2]
        for i, want in enumerate(expected, start=1):
            assert vec[i] == pytest.approx(want, abs=1e-12), f"f{i}"

        rng = np.random.default_rng(55)
        scaling = (1, 2, 3, 4, 5, 6, 7, 8, 11, 12)  # f9/f10: absolute threshold
        for _ in range(100):
            cap = float(rng.uniform(5, 30))
            pairs = [PersistencePair(0, 0.0, INF)]
            pairs += [PersistencePair(0, 0.0, float(rng.uniform(0, cap)))
                      for _ in range(int(rng.integers(0, 5)))]
            for _ in range(int(rng.integers(0, 5))):
                birth = float(rng.uniform(0, 0.8 * cap))
                death = INF if rng.random() < 0.25 else float(rng.uniform(birth, cap))
                pairs.append(PersistencePair(1, birth, death))
            b = Barcode(tuple(sorted(pairs)), cap)
            s = float(rng.uniform(0.3, 4.0))
            scaled = Barcode(tuple(PersistencePair(p.dim, s * p.birth, s * p.death)
                                   for p in b.pairs), s * cap)
            base, other = extract_features(b), extract_features(scaled)
            for i in scaling:
                assert other[i] == pytest.approx(s * base[i], rel=1e-9, abs=1e-12)
            assert other.f13 == base.f13 and other.f14 == base.f14


def test_criterion_6_lssvm_correctness():
    with criterion(6, "KKT residuals, multiplier balance, and interpolation limit"):
        rng = np.random.default_rng(66)
        for gamma in (1.0, 10.0, 100.0, 1000.0):
            for kernel in (KernelSpec("linear"), KernelSpec("rbf", 1.0)):
                X = rng.normal(size=(12, 2))
                ts_reg = TrainingSet(X, rng.normal(size=12))
                model = train_regressor(ts_reg, gamma, kernel)
                assert kkt_residual(model, ts_reg) <= 1e-8

                labels = np.where(rng.random(12) < 0.5, -1.0, 1.0)
                ts_cls = TrainingSet(X, labels)
                cls = train_classifier(ts_cls, gamma, kernel)
                assert kkt_residual(cls, ts_cls) <= 1e-8
                # stored coefficients are label-weighted multipliers
                assert abs(cls.alphas.sum()) <= 1e-10

        X = np.array([[0.0], [1.0], [2.0]])
        y = 2.0 * X.ravel() + 1.0
        model = train_regressor(TrainingSet(X, y), 1e6, KernelSpec("linear"))
        for x, target in zip(X, y):
            assert abs(predict(model, x) - target) <= 1e-4


def test_criterion_7_published_series_reproduction():
    with criterion(7, "published feature series: f8<=5%, f2<=12%, f13 exact"):
        start = time.perf_counter()
        reports = run_table6_experiment()
        elapsed = time.perf_counter() - start
        for event, err in reports[8].rel_errors.items():
            assert err <= 0.05, f"feature 8 event {event}: {100 * err:.2f}%"
        for event, err in reports[2].rel_errors.items():
            assert err <= 0.12, f"feature 2 event {event}: {100 * err:.2f}%"
        assert all(v == 42.0 for v in reports[13].predictions.values())
        assert reports[13].max_rel_error() == 0.0
        assert elapsed < 5.0, f"prediction protocol took {elapsed:.1f}s"


def test_criterion_8_warning_criterion():
    with criterion(8, "threshold trigger at event 5 with advisory at 4; rapid-change"):
        _, t6 = dataio.fixtures()
        report = detect_warning(t6.features[8].y, threshold=21.68)
        assert report.triggered and report.criterion == "threshold"
        assert report.trigger_event == 5
        assert report.at_threshold_events == (4,)

        flat = detect_warning([42.0] * 21)
        assert not flat.triggered

        series = [10.0 - 0.01 * k for k in range(11)] + [9.9 - 0.5]
        step = detect_warning(series, threshold=None)
        assert step.triggered and step.criterion == "rapid-change"
        assert step.trigger_event == 11


def test_criterion_9_blast_load():
    with criterion(9, "published load calibration and route equivalence"):
        load = paper_preset()
        assert load.single_hole_peak == pytest.approx(1.5e9, rel=1e-12)
        assert load_at(load.profile, 0.005) == pytest.approx(1.38e8, rel=1e-12)
        assert shape_factor(load.profile, 0.0) == 0.0
        assert shape_factor(load.profile, 0.035) == 0.0
        assert shape_factor(load.profile, 0.005) == 1.0

        rng = np.random.default_rng(99)
        for _ in range(100):
            cfg = BlastConfig(
                radius=float(rng.uniform(0.01, 0.5)),
                spacing=float(rng.uniform(0.5, 5.0)),
                charge_density=float(rng.uniform(800, 1800)),
                detonation_velocity=float(rng.uniform(2000, 8000)),
                uncoupling=float(rng.uniform(1.0, 12.0)),
                enlargement=float(rng.uniform(0.5, 20.0)),
            )
            composed = equivalent_uniform_peak(cfg, peak_pressure(cfg))
            assert uniform_peak_direct(cfg) == pytest.approx(composed, rel=1e-12)


def test_criterion_10_end_to_end_determinism(tmp_path):
    with criterion(10, "seeded default scenario: byte-identical reruns, monotone f8"):
        seq = generate_sequence(ScenarioConfig())
        out1, out2 = tmp_path / "run1", tmp_path / "run2"
        run_all(seq, out1)
        run_all(seq, out2)
        files = sorted(p.relative_to(out1) for p in out1.rglob("*") if p.is_file())
        assert files == sorted(p.relative_to(out2) for p in out2.rglob("*") if p.is_file())
        assert files
        for rel in files:
            assert (out1 / rel).read_bytes() == (out2 / rel).read_bytes(), rel
        _, matrix = dataio.read_features(out1 / "features.csv")
        f8 = matrix[:, 7]
        assert np.all(f8[:-1] >= f8[1:])


def test_criterion_11_fixture_integrity():
    with criterion(11, "bundled tables: monotone displacements, decreasing f8 series"):
        t5, t6 = dataio.fixtures()
        for a, b in zip(t5.rows, t5.rows[1:]):
            assert a[1] <= b[1]
            assert a[2] <= b[2]
        f8 = t6.features[8].y
        assert f8[0] == 21.82
        assert f8[-1] == 16.01
        assert all(a > b for a, b in zip(f8, f8[1:]))
