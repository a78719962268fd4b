import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gpentropy.errors import ValidationError
from gpentropy.experiments import (
    ConvergenceConfig,
    NoiseDetectionConfig,
    RampConfig,
    Rng,
    SignalSpec,
    config_from_mapping,
    derive_seed,
    gen_signal,
    run_convergence,
    run_noise_detection,
    run_ramp,
)
from gpentropy.experiments.config import Config, parse_config, parse_int_list
from gpentropy.experiments.harness import atomic_write, noise_segments, table_csv
from gpentropy.experiments.rng import splitmix64
from gpentropy.experiments.roc import mean_ci, pairwise_auc, roc_auc


class TestRng:
    def test_splitmix_reference_vector(self):
        # first output of the reference SplitMix64 generator seeded with 0
        assert splitmix64(0) == 0xE220A8397B1DCDAF

    def test_uniform_from_raw_bits(self):
        raw = np.random.PCG64(derive_seed(7, 3)).random_raw(4)
        expect = [(int(x) >> 11) / 2**53 for x in raw]
        assert Rng(7, 3).uniform(4).tolist() == expect

    def test_frozen_stream(self):
        assert Rng(42, 0).uniform(2).tolist() == [0.5222541314260429, 0.8465288256918694]
        assert Rng(42, 1).normal(3).tolist() == [
            -0.9724327408831785, 1.6030323453000255, -0.12186019898018262]

    def test_streams_differ(self):
        assert Rng(1, 0).uniform(3).tolist() != Rng(1, 1).uniform(3).tolist()

    def test_normal_moments(self):
        z = Rng(5).normal(200_001, sd=2.0)
        assert z.size == 200_001
        assert abs(z.mean()) < 0.03 and abs(z.std() - 2.0) < 0.02


class TestSignals:
    def test_lengths(self):
        assert SignalSpec("ramp_noise", period=60).n == 600
        assert SignalSpec("noise_burst", period=10).n == 45
        assert SignalSpec("iid").n == 50
        assert SignalSpec("noisy_line").n == 40

    def test_burst_quiet_segment(self):
        x = gen_signal(SignalSpec("noise_burst", period=10, eps=0.0), Rng(0))
        t = np.arange(1, 31)
        assert np.allclose(x[:30], np.sin(2 * np.pi * t / 10))
        assert not np.allclose(x[30:], np.sin(2 * np.pi * np.arange(31, 46) / 10))

    def test_ramp_noise_grows(self):
        spec = SignalSpec("ramp_noise", period=20, sigma2=4.0)
        t = np.arange(1, 201)
        resid = np.stack([gen_signal(spec, Rng(0, i)) - np.sin(2 * np.pi * t / 20)
                          for i in range(400)])
        sd = resid.std(axis=0)
        assert sd[-1] == pytest.approx(2.0, rel=0.15)
        assert sd[:20].mean() < sd[-20:].mean() / 5

    def test_line_noise_is_variance(self):
        spec = SignalSpec("noisy_line", length=20000)
        x = gen_signal(spec, Rng(1))
        resid = x - 0.05 * np.arange(1, 20001)
        assert resid.var() == pytest.approx(0.025, rel=0.05)

    def test_validation(self):
        with pytest.raises(ValidationError):
            SignalSpec("chirp")
        with pytest.raises(ValidationError):
            SignalSpec("ramp_noise", sigma2=0)


class TestRoc:
    def test_perfect_and_inverted(self):
        assert roc_auc([3, 4], [1, 2]).auc == 1.0
        assert roc_auc([1, 2], [3, 4]).auc == 0.0

    def test_all_tied(self):
        assert roc_auc([1, 1], [1, 1, 1]).auc == 0.5

    @given(st.lists(st.integers(0, 5), min_size=1, max_size=30),
           st.lists(st.integers(0, 5), min_size=1, max_size=30))
    def test_equals_mann_whitney(self, pos, neg):
        assert abs(roc_auc(pos, neg).auc - pairwise_auc(pos, neg)) <= 1e-12

    def test_curve_endpoints(self):
        r = roc_auc([0.2, 0.9], [0.1, 0.5])
        assert (r.tpr[0], r.fpr[0], r.tpr[-1], r.fpr[-1]) == (0, 0, 1, 1)

    def test_mean_ci(self):
        m, lo, hi = mean_ci([1.0, 2.0, 3.0])
        assert m == 2.0 and hi - m == pytest.approx(1.96 / math.sqrt(3))

    def test_empty(self):
        with pytest.raises(ValidationError):
            roc_auc([], [1])


class TestConfig:
    def test_parse(self):
        d = parse_config("# comment\na = 1\nb = x = y  # trailing\n\n")
        assert d == {"a": "1", "b": "x = y"}

    def test_duplicate(self):
        with pytest.raises(ValidationError, match="duplicate"):
            parse_config("a=1\na=2")

    def test_ranges(self):
        assert parse_int_list("1..3, 7") == [1, 2, 3, 7]
        with pytest.raises(ValidationError):
            parse_int_list("1..x")

    def test_typed(self):
        c = Config({"n": "4", "f": "0.5", "l": "1,2.5"})
        assert c.int("n") == 4 and c.float("f") == 0.5 and c.floats("l") == [1.0, 2.5]
        assert c.int("missing", 9) == 9
        with pytest.raises(ValidationError):
            c.int("f")

    def test_experiment_mapping(self):
        c = Config(parse_config("experiment = noise_detection\nruns = 3\norders = 2..3\neps = 0.5"))
        name, cfg = config_from_mapping(c, seed=9)
        assert name == "noise_detection"
        assert (cfg.runs, cfg.orders, cfg.eps, cfg.seed) == (3, (2, 3), 0.5, 9)

    def test_unknown_key(self):
        c = Config(parse_config("experiment = ramp\nwibble = 1"))
        with pytest.raises(ValidationError, match="wibble"):
            config_from_mapping(c)


class TestHarness:
    def test_noise_segments(self):
        quiet, noisy = noise_segments(10)
        assert (quiet.start, quiet.stop - 1, noisy.start, noisy.stop - 1) == (16, 30, 31, 45)

    def test_convergence_shape(self):
        rep = run_convergence(ConvergenceConfig(runs=3, length=12, orders=(2, 3)))
        curves = rep.tables["curves"]
        assert {(r["method"], r["order"]) for r in curves} == {
            ("GPE", 2), ("GPE", 3), ("PE", 2), ("PE", 3)}
        assert min(r["n"] for r in curves if r["order"] == 3) == 3

    def test_convergence_monotone_line_is_zero(self):
        rep = run_convergence(ConvergenceConfig(runs=2, length=15, orders=(3,),
                                                family="noisy_line", noise_sd=0.0))
        assert all(r["mean"] == 0.0 for r in rep.tables["curves"])

    def test_noise_detection_small(self):
        rep = run_noise_detection(NoiseDetectionConfig(runs=4, windows=(8, 10), orders=(2, 3)))
        rows = rep.tables["configs"]
        assert all(0.0 <= r["mean_auc"] <= 1.0 for r in rows)
        assert {r["delay"] for r in rows if r["method"] == "PE" and r["window"] == 8 and r["order"] == 3} \
            == {"1", "2", "3", "avg"}
        assert rep.summary["best_gpe"]["method"] == "GPE"

    def test_ramp_small(self):
        cfg = RampConfig(periods=(20,), sigma2s=(1.0,), runs=2, windows=(10, 15),
                         sweep_windows=tuple(range(8, 21)), trend_window=10)
        rep = run_ramp(cfg)
        cond = rep.summary["conditions"][0]
        assert cond["length"] == 200
        assert 8 <= cond["half_period_estimate"]["window"] <= 20
        # delay 20 does not fit into windows of 10 or 15 and is skipped
        assert not any(r["delay"] == "20" for r in rep.tables["curves"])

    def test_reproducible(self, tmp_path):
        cfg = NoiseDetectionConfig(runs=3, windows=(9,), orders=(3,), seed=5)
        a = run_noise_detection(cfg).write(tmp_path / "a")
        b = run_noise_detection(cfg).write(tmp_path / "b")
        assert [p.read_bytes() for p in a] == [p.read_bytes() for p in b]
        summary = json.loads(a[-1].read_text())
        assert summary["seed"] == 5 and summary["config"]["runs"] == 3

    def test_threads_reproducible(self):
        cfg = NoiseDetectionConfig(runs=4, windows=(9,), orders=(3,))
        cfg2 = NoiseDetectionConfig(runs=4, windows=(9,), orders=(3,), threads=3)
        assert run_noise_detection(cfg).files() == run_noise_detection(cfg2).files()


class TestIO:
    def test_atomic_write_leaves_no_temp(self, tmp_path):
        atomic_write(tmp_path / "x" / "f.csv", "a\n")
        assert [p.name for p in (tmp_path / "x").iterdir()] == ["f.csv"]

    def test_table_csv_repr_floats(self):
        text = table_csv([{"a": 0.1, "b": np.float64(1 / 3), "c": np.int64(2)}])
        assert text == "a,b,c\n0.1,0.3333333333333333,2\n"
