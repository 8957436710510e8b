import json
import math
import os

import numpy as np
import pandas as pd
import pytest

from simplectra.errors import ValidationError
from simplectra.lm_model import LMParams, sample_lm
from simplectra.utils import mix64
from simplectra_mc.harness import (
    ExperimentConfig,
    TrialRecord,
    convex_concentration_experiment,
    covariance,
    estimate,
    estimate_all,
    jackknife_covariance_se,
    lipschitz_bound,
    lipschitz_check,
    normality_diagnostics,
    qq_rows,
    run_experiment,
    scale_factor,
    tail_mass_experiment,
    trial_seed,
    write_outputs,
)


def small_config(**overrides):
    params = {"d": 1, "n": 12, "p": 0.5, "trials": 3, "master_seed": 5, "statistics": [2, 3]}
    params.update(overrides)
    return ExperimentConfig(params)


def test_trial_seeds():
    assert trial_seed(5, 0, 64) == mix64(mix64(5, 64), 0)
    assert len(set(trial_seed(5, t, 64) for t in range(1000))) == 1000
    assert trial_seed(5, 3, 10) != trial_seed(5, 3, 12)


def test_samples_differ_across_n():
    records = run_experiment(small_config(n=[10, 12], trials=2))
    by_n = dict(((r.n, r.trial_index), r.seed) for r in records)
    assert by_n[(10, 0)] != by_n[(12, 0)]
    small = sample_lm(LMParams(10, 1, 0.5, by_n[(10, 0)]))
    large = sample_lm(LMParams(12, 1, 0.5, by_n[(12, 0)]))
    restricted = set(tau for tau in large.present if tau[-1] <= 10)
    assert small.present != restricted


def test_same_config_same_records():
    config = small_config()
    assert run_experiment(config) == run_experiment(config)
    assert run_experiment(small_config(master_seed=6)) != run_experiment(config)


def test_records_do_not_depend_on_workers():
    config = small_config(n=[10, 14], trials=4)
    serial = run_experiment(config, workers=1)
    parallel = run_experiment(config, workers=2)
    assert serial == parallel
    assert [(r.n, r.trial_index) for r in serial] == [(n, t) for n in (10, 14) for t in range(4)]


def test_constant_and_linear_statistics():
    records = run_experiment(small_config(statistics=["1", "x"], d=2, n=8))
    for record in records:
        assert record.values[0] == pytest.approx(1.0)
        assert record.values[1] == pytest.approx(0.0, abs=1e-12)


def test_degenerate_p():
    with pytest.raises(ValidationError):
        run_experiment(small_config(p=1.0))
    with pytest.raises(ValidationError):
        run_experiment(small_config(p=0.0))


def test_covariance_of_identical_rows():
    values = np.tile([1.5, -2.0, 0.25], (6, 1))
    means, cov = covariance(values)
    assert np.array_equal(means, [1.5, -2.0, 0.25])
    assert np.array_equal(cov, np.zeros((3, 3)))
    assert np.array_equal(jackknife_covariance_se(values), np.zeros((3, 3)))


def test_covariance_matches_numpy():
    values = np.random.default_rng(4).normal(size=(50, 3))
    _, cov = covariance(values)
    assert np.allclose(cov, np.cov(values, rowvar=False), atol=1e-14)


def test_jackknife_matches_direct_leave_one_out():
    values = np.random.default_rng(5).normal(size=(12, 2))
    T = values.shape[0]
    replicates = np.array([np.cov(np.delete(values, t, axis=0), rowvar=False) for t in range(T)])
    direct = np.sqrt((T - 1) / T * np.sum((replicates - replicates.mean(axis=0)) ** 2, axis=0))
    assert np.allclose(jackknife_covariance_se(values), direct)
    assert np.all(np.isnan(jackknife_covariance_se(values[:2])))


def test_estimate_of_identical_records():
    config = small_config(reference=False)
    records = [TrialRecord(t, 12, t, (0.9, 0.1), 0.05) for t in range(4)]
    report = estimate(records, config)
    assert np.array_equal(report.covariance, np.zeros((2, 2)))
    assert report.normality == {"x^2": None, "x^3": None}
    assert report.mean_kolmogorov == pytest.approx(0.05)
    with pytest.raises(ValidationError):
        estimate(records[:1], config)


def test_estimate_scaling_and_reference():
    config = small_config(trials=4)
    report = estimate(run_experiment(config), config)
    factor = scale_factor(12, 1, 0.5)
    assert factor == 12 * 12 * 0.25
    assert np.allclose(report.scaled_covariance, factor * report.covariance)
    assert report.reference_mean["x^2"] == pytest.approx(11.0 / 12.0)
    assert report.reference_mean["x^3"] == pytest.approx(0.0)
    payload = json.loads(json.dumps(report.to_dict()))
    assert payload["statistics"] == ["x^2", "x^3"]
    assert len(payload["scaled_covariance_se"]) == 2


def test_estimate_all_splits_by_n():
    config = small_config(n=[10, 12])
    reports = estimate_all(run_experiment(config), config)
    assert list(reports) == [10, 12]
    assert reports[10].p == 0.5
    with pytest.raises(ValidationError):
        estimate(run_experiment(config), config)


def test_normality_of_gaussian_samples():
    samples = np.random.default_rng(12).normal(3.0, 2.0, size=2000)
    diagnostics = normality_diagnostics(samples)
    assert diagnostics["ks"] < 0.035
    assert abs(diagnostics["skew"]) < 0.2
    assert abs(diagnostics["kurtosis"]) < 0.4


def test_normality_rejects():
    with pytest.raises(ValidationError):
        normality_diagnostics(np.ones(500))
    with pytest.raises(ValidationError):
        normality_diagnostics(np.arange(10.0))


def test_qq_rows():
    frame = qq_rows(np.random.default_rng(1).normal(size=200))
    assert list(frame.columns) == ["z", "normal_quantile"]
    assert len(frame) == 200
    assert np.all(np.diff(frame["z"]) >= 0)
    assert frame["normal_quantile"].iloc[0] == pytest.approx(-frame["normal_quantile"].iloc[-1])


def test_tail_of_zero_function():
    config = small_config(n=[10, 12], statistics=[{"name": "const", "value": 0}])
    outcome = tail_mass_experiment(config)
    assert [row["scaled_second_moment"] for row in outcome["rows"]] == [0.0, 0.0]


def test_tail_rejects_functions_on_the_support():
    for g in ({"name": "hinge2", "a": 1.0}, "abs"):
        with pytest.raises(ValidationError):
            tail_mass_experiment(small_config(statistics=[g]))
    with pytest.raises(ValidationError):
        tail_mass_experiment(small_config(d=4, statistics=[{"name": "hinge2", "a": 3.0}]))


def test_concentration_of_constant_and_scaled_abs():
    config = small_config(trials=6)
    constant = convex_concentration_experiment(config, g={"name": "const", "value": 2.0})
    assert constant["max_scaled_variance"] == 0.0
    single = convex_concentration_experiment(config, g="abs")
    double = convex_concentration_experiment(config, g={"name": "abs", "scale": 2})
    ratio = double["rows"][0]["scaled_variance"] / single["rows"][0]["scaled_variance"]
    assert ratio == pytest.approx(4.0, rel=1e-9)
    with pytest.raises(ValidationError):
        convex_concentration_experiment(config, g=3)


def test_lipschitz_check():
    config = small_config(n=[8, 10], trials=3, flips=6)
    outcome = lipschitz_check(config, g="abs")
    for row in outcome["rows"]:
        assert row["bound"] == pytest.approx(lipschitz_bound(row["n"], 1, 0.5, 1.0))
        assert 0.0 < row["max_ratio"] <= 1.0
    with pytest.raises(ValidationError):
        lipschitz_check(config, g=2)


def test_write_outputs(tmp_path):
    config = small_config(trials=3)
    records = run_experiment(config)
    report = estimate(records, config).to_dict()
    directory = str(tmp_path / "run")
    paths = write_outputs(directory, records, config.labels, report)
    assert [os.path.basename(p) for p in paths.values()] == ["records.csv", "report.json", "qq.csv"]
    frame = pd.read_csv(paths["records.csv"], dtype={"seed": str})
    assert len(frame) == 3
    assert [int(s) for s in frame["seed"]] == [r.seed for r in records]
    assert np.array_equal(frame["x^2"].to_numpy(), [r.values[0] for r in records])
    with open(paths["report.json"]) as handle:
        assert json.load(handle)["trials"] == 3
    qq = pd.read_csv(paths["qq.csv"])
    assert list(qq.columns) == ["n", "statistic", "z", "normal_quantile"]
    assert len(qq) == 6
    blocker = tmp_path / "blocker"
    blocker.write_text("")
    with pytest.raises(ValidationError):
        write_outputs(str(blocker / "run"), records, config.labels, report)


@pytest.mark.slow
def test_semicircle_moments():
    config = ExperimentConfig({"d": 1, "n": 256, "p": 0.8, "trials": 500, "statistics": [2, 4], "workers": 4})
    report = estimate(run_experiment(config), config)
    assert abs(report.mean[0] - 1.0) <= 0.05
    assert abs(report.mean[1] - 2.0) <= 0.14


@pytest.mark.slow
def test_scaled_covariance_of_second_moment():
    config = ExperimentConfig({"d": 1, "n": 256, "p": 0.8, "trials": 2000, "statistics": [2], "workers": 4,
                               "reference": False})
    report = estimate(run_experiment(config), config)
    assert abs(report.scaled_covariance[0, 0] - 0.72) <= 0.15 * 0.72


@pytest.mark.slow
def test_scaled_covariance_of_third_moment_d2():
    config = ExperimentConfig({"d": 2, "n": 32, "p": 0.5, "trials": 1000, "statistics": [3], "workers": 4,
                               "reference": False})
    report = estimate(run_experiment(config), config)
    assert abs(report.scaled_covariance[0, 0] - 6.0) <= 0.2 * 6.0


@pytest.mark.slow
def test_third_moment_fluctuations_are_normal():
    config = ExperimentConfig({"d": 1, "n": 128, "p": 0.5, "trials": 2000, "statistics": [3], "workers": 4,
                               "reference": False})
    records = run_experiment(config)
    diagnostics = normality_diagnostics(records, 0)
    assert diagnostics["ks"] < 0.05
    assert abs(diagnostics["skew"]) < 0.15
    report = estimate(records, config)
    # d = 1 odd moments have mean exactly zero
    scaled_mean = math.sqrt(128 * 128 * 0.25) * report.mean[0]
    scaled_se = math.sqrt(128 * 128 * 0.25) * report.mean_se[0]
    assert abs(scaled_mean) <= 3 * scaled_se


@pytest.mark.slow
def test_kolmogorov_distance_decreases_with_n():
    distances = []
    for n in (32, 64, 128):
        config = ExperimentConfig({"d": 1, "n": n, "p": 0.5, "trials": 50, "statistics": [2], "reference": False})
        distances.append(estimate(run_experiment(config), config).mean_kolmogorov)
    assert distances[0] > distances[1] > distances[2]
    assert distances[2] < 0.06


@pytest.mark.slow
def test_tail_mass_does_not_grow():
    config = ExperimentConfig({"kind": "tail", "d": 1, "n": [64, 128, 256], "p": 0.5, "trials": 500,
                               "statistics": [{"name": "hinge2", "a": 2.5}], "workers": 4})
    rows = tail_mass_experiment(config)["rows"]
    assert rows[-1]["scaled_second_moment"] <= rows[0]["scaled_second_moment"]


@pytest.mark.slow
def test_concentration_stays_bounded():
    config = ExperimentConfig({"kind": "concentration", "d": 1, "n": [64, 128, 256], "p": 0.5, "trials": 500,
                               "statistics": ["abs"], "workers": 4})
    assert convex_concentration_experiment(config)["max_scaled_variance"] <= 50.0


@pytest.mark.slow
def test_jackknife_error_shrinks_with_trials():
    errors = []
    for trials in (1000, 2000):
        config = ExperimentConfig({"d": 1, "n": 64, "p": 0.8, "trials": trials, "statistics": [2], "workers": 4,
                                   "reference": False})
        errors.append(estimate(run_experiment(config), config).scaled_covariance_se[0, 0])
    assert errors[0] / errors[1] == pytest.approx(math.sqrt(2.0), rel=0.2)
