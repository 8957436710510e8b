from __future__ import division

import json
import logging
import math
import os
from collections import OrderedDict, namedtuple
from concurrent.futures import ProcessPoolExecutor

import numpy as np
import pandas as pd
from scipy import stats
from scipy.special import comb

from simplectra.clt import finite_n_moment
from simplectra.errors import BudgetExceeded, ValidationError
from simplectra.lm_model import LMParams, LMSample, centered_scaled, sample_lm
from simplectra.spectral import eigenvalues_sym, kolmogorov_distance, linear_statistic
from simplectra.utils import mix64

from .functions import make_function
from .schedules import make_schedule
from .utils import read_config, timeit

logger = logging.getLogger(__name__)

SCHEMA = "simplectra/1"
KINDS = ("estimate", "tail", "concentration", "lipschitz")
MIN_NORMALITY_SAMPLES = 100


class ExperimentConfig(object):
    def __init__(self, params=None):
        self._read_params(dict(params or {}))
        self._validate()

    @classmethod
    def from_dict(cls, params):
        return cls(params)

    @classmethod
    def from_file(cls, fname):
        return cls(read_config(fname))

    def _read_params(self, params):
        """ Experiment parameters from a config mapping, missing keys take their defaults """
        known = set([
            "kind", "d", "n", "p", "trials", "master_seed", "statistics", "output", "workers",
            "reference", "reference_max_k", "reference_budget", "flips",
        ])
        unknown = sorted(set(params) - known)
        if unknown:
            raise ValidationError("unknown config keys {}".format(unknown))
        self.kind = params.get("kind", "estimate")
        self.d = int(params.get("d", 1))
        n = params.get("n", 64)
        self.ns = [int(v) for v in (n if isinstance(n, (list, tuple)) else [n])]
        self.p = make_schedule(params.get("p", 0.5))
        self.trials = int(params.get("trials", 100))
        self.master_seed = int(params.get("master_seed", 0))
        self.statistics = [make_function(f) for f in params.get("statistics", [1, 2, 3, 4])]
        self.output = params.get("output", "./mc_output")
        self.workers = int(params.get("workers", 1))
        # exact finite-n means for monomial statistics
        self.reference = bool(params.get("reference", True))
        self.reference_max_k = int(params.get("reference_max_k", 6))
        self.reference_budget = int(float(params.get("reference_budget", 1e6)))
        # single-facet flips per trial in a lipschitz run
        self.flips = int(params.get("flips", 20))

    def _validate(self):
        if self.kind not in KINDS:
            raise ValidationError("unknown experiment kind {!r}, expected one of {}".format(self.kind, KINDS))
        if self.d < 1:
            raise ValidationError("need d >= 1, got {}".format(self.d))
        if not self.ns or min(self.ns) <= self.d:
            raise ValidationError("every n must exceed d={}, got {}".format(self.d, self.ns))
        if self.trials < 2:
            raise ValidationError("need at least 2 trials, got {}".format(self.trials))
        if not self.statistics:
            raise ValidationError("no statistics requested")
        if self.workers < 1:
            raise ValidationError("need at least one worker, got {}".format(self.workers))
        for n in self.ns:
            self.p_at(n)

    def p_at(self, n):
        return self.p(n)

    @property
    def labels(self):
        return [f.label for f in self.statistics]

    def to_dict(self):
        return OrderedDict([
            ("kind", self.kind),
            ("d", self.d),
            ("n", self.ns if len(self.ns) > 1 else self.ns[0]),
            ("p", self.p.to_dict()),
            ("trials", self.trials),
            ("master_seed", self.master_seed),
            ("statistics", [f.to_dict() for f in self.statistics]),
            ("output", self.output),
            ("workers", self.workers),
        ])


TrialRecord = namedtuple("TrialRecord", ["trial_index", "n", "seed", "values", "kolmogorov"])


def trial_seed(master_seed, trial_index, n):
    """ Seed of trial t at vertex count n; distinct n draw independent complexes """
    return mix64(mix64(master_seed, n), trial_index)


def scale_factor(n, d, p):
    """ n^d n p (1 - p) """
    return float(n) ** d * n * p * (1.0 - p)


def _evaluate(sample, functions):
    H = centered_scaled(sample)
    spectrum = eigenvalues_sym(H.H)
    values = tuple(linear_statistic(spectrum, f) for f in functions)
    return values, kolmogorov_distance(spectrum, sample.params.d)


def run_trial(task):
    """ One trial: sample Y, build H_n, eigensolve once and evaluate every statistic """
    n, d, p, trial_index, seed, functions = task
    sample = sample_lm(LMParams(n, d, p, seed))
    values, distance = _evaluate(sample, functions)
    return TrialRecord(trial_index, n, seed, values, distance)


def _check_degenerate(n, p):
    if p <= 0.0 or p >= 1.0:
        raise ValidationError("p(n={}) = {} is degenerate, Monte Carlo needs 0 < p < 1".format(n, p))


@timeit
def run_experiment(config, workers=None):
    """
    Run every trial of an experiment

    Parameters
    ----------
    config : ExperimentConfig
    workers : int
        process count, overrides config.workers; records do not depend on it

    Returns
    -------
    list of TrialRecord
        sorted by (n, trial_index)
    """
    workers = config.workers if workers is None else int(workers)
    tasks = []
    for n in config.ns:
        p = config.p_at(n)
        _check_degenerate(n, p)
        for t in range(config.trials):
            tasks.append((n, config.d, p, t, trial_seed(config.master_seed, t, n), config.statistics))
    logger.info("[simplectra_mc] running %d trials on %d worker(s)", len(tasks), workers)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(run_trial, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    else:
        records = [run_trial(task) for task in tasks]
    records.sort(key=lambda r: (r.n, r.trial_index))
    logger.info("[simplectra_mc] experiment finished")
    return records


def _values(records):
    return np.array([r.values for r in records], dtype=np.float64)


def covariance(values):
    """ Unbiased covariance, two passes with compensated sums """
    values = np.asarray(values, dtype=np.float64)
    T, m = values.shape
    means = np.array([math.fsum(values[:, i]) / T for i in range(m)])
    centered = values - means
    cov = np.empty((m, m))
    for i in range(m):
        for j in range(i, m):
            cov[i, j] = cov[j, i] = math.fsum(centered[:, i] * centered[:, j]) / (T - 1)
    return means, cov


def jackknife_covariance_se(values):
    """ Jackknife standard errors of the unbiased covariance, NaN below 3 samples """
    values = np.asarray(values, dtype=np.float64)
    T, m = values.shape
    if T < 3:
        return np.full((m, m), np.nan)
    centered = values - values.mean(axis=0)
    total = centered.T.dot(centered)
    outer = centered[:, :, None] * centered[:, None, :]
    leave_one_out = (total[None, :, :] - T / (T - 1.0) * outer) / (T - 2.0)
    spread = leave_one_out - leave_one_out.mean(axis=0)
    return np.sqrt((T - 1.0) / T * np.sum(spread ** 2, axis=0))


def normality_diagnostics(records, statistic=0):
    """
    Standardized fluctuations against N(0, 1)

    Keyword arguments:
    records -- TrialRecords or a plain array of values
    statistic -- column of the record values
    """
    values = _column(records, statistic)
    if values.size < MIN_NORMALITY_SAMPLES:
        raise ValidationError("normality diagnostics need >= {} values, got {}".format(
            MIN_NORMALITY_SAMPLES, values.size))
    z = _standardize(values)
    return OrderedDict([
        ("ks", float(stats.kstest(z, "norm").statistic)),
        ("skew", float(stats.skew(z))),
        ("kurtosis", float(stats.kurtosis(z))),
    ])


def _column(records, statistic):
    if len(records) and isinstance(records[0], TrialRecord):
        return _values(records)[:, statistic]
    return np.asarray(records, dtype=np.float64).ravel()


def _standardize(values):
    std = np.std(values, ddof=1)
    if not std > 0.0:
        raise ValidationError("fluctuations have zero variance")
    return (values - np.mean(values)) / std


def qq_rows(records, statistic=0):
    """ Sorted standardized fluctuations next to the normal quantiles (i - 1/2)/T """
    z = np.sort(_standardize(_column(records, statistic)))
    levels = (np.arange(1, z.size + 1) - 0.5) / z.size
    return pd.DataFrame({"z": z, "normal_quantile": stats.norm.ppf(levels)})


def reference_mean(f, n, d, p, budget=None):
    """ Exact E<L_{H_n}, f> for a monomial f, None when not available within the budget """
    k = f.monomial_order
    if k is None:
        return None
    try:
        return f.scale * float(finite_n_moment(k, n, d, p, budget))
    except BudgetExceeded as error:
        logger.info("[simplectra_mc] no reference mean for %s: %s", f.label, error)
        return None


class EstimateReport(object):
    def __init__(self, n, d, p, labels, values, references=None):
        self.n, self.d, self.p = n, d, p
        self.labels = list(labels)
        self.trials = values.shape[0]
        self.mean, self.covariance = covariance(values)
        self.factor = scale_factor(n, d, p)
        self.scaled_covariance = self.factor * self.covariance
        self.scaled_covariance_se = self.factor * jackknife_covariance_se(values)
        self.std = np.sqrt(np.diag(self.covariance))
        self.mean_se = self.std / math.sqrt(self.trials)
        self.normality = OrderedDict()
        for i, label in enumerate(self.labels):
            if self.trials >= MIN_NORMALITY_SAMPLES and self.std[i] > 0:
                self.normality[label] = normality_diagnostics(values[:, i])
            else:
                self.normality[label] = None
        self.reference_mean = OrderedDict((label, None) for label in self.labels)
        self.mean_z = OrderedDict((label, None) for label in self.labels)
        for i, label in enumerate(self.labels):
            reference = (references or {}).get(label)
            if reference is None:
                continue
            self.reference_mean[label] = reference
            if self.mean_se[i] > 0:
                self.mean_z[label] = float((self.mean[i] - reference) / self.mean_se[i])
        self.mean_kolmogorov = None

    def index(self, label):
        return self.labels.index(label)

    def to_dict(self):
        return jsonable(OrderedDict([
            ("n", self.n),
            ("d", self.d),
            ("p", self.p),
            ("trials", self.trials),
            ("statistics", self.labels),
            ("mean", self.mean),
            ("mean_se", self.mean_se),
            ("covariance", self.covariance),
            ("scale_factor", self.factor),
            ("scaled_covariance", self.scaled_covariance),
            ("scaled_covariance_se", self.scaled_covariance_se),
            ("normality", self.normality),
            ("reference_mean", self.reference_mean),
            ("mean_z", self.mean_z),
            ("mean_kolmogorov", self.mean_kolmogorov),
        ]))


def jsonable(value):
    """ JSON-ready copy: arrays become lists and NaN becomes None """
    if isinstance(value, np.ndarray):
        return jsonable(value.tolist())
    if isinstance(value, dict):
        return OrderedDict((k, jsonable(v)) for k, v in value.items())
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, (float, np.floating)):
        return None if not np.isfinite(value) else float(value)
    if isinstance(value, np.integer):
        return int(value)
    return value


def _split(records):
    groups = OrderedDict()
    for record in records:
        groups.setdefault(record.n, []).append(record)
    return groups


def estimate(records, config, n=None):
    """ EstimateReport for the records of one n (the only n present when omitted) """
    groups = _split(records)
    if n is None:
        if len(groups) != 1:
            raise ValidationError("records cover several n {}, pick one".format(list(groups)))
        n = next(iter(groups))
    chosen = groups.get(n, [])
    if len(chosen) < 2:
        raise ValidationError("estimate needs at least 2 records for n={}, got {}".format(n, len(chosen)))
    p = config.p_at(n)
    references = {}
    if config.reference:
        for f in config.statistics:
            if f.monomial_order is not None and f.monomial_order <= config.reference_max_k:
                references[f.label] = reference_mean(f, n, config.d, p, config.reference_budget)
    report = EstimateReport(n, config.d, p, config.labels, _values(chosen), references)
    report.mean_kolmogorov = float(np.mean([r.kolmogorov for r in chosen]))
    return report


def estimate_all(records, config):
    return OrderedDict((n, estimate(records, config, n)) for n in _split(records))


def _single_function(config, g):
    if g is None:
        if len(config.statistics) != 1:
            raise ValidationError("experiment needs exactly one test function g")
        g = config.statistics[0]
    return make_function(g)


def _with_statistics(config, functions):
    params = config.to_dict()
    params.update({"statistics": [f.to_dict() for f in functions]})
    params["reference"] = False
    return ExperimentConfig(params)


@timeit
def tail_mass_experiment(config, g=None, workers=None):
    """n^d np(1-p) E[<L, g>^2] along the n grid, g vanishing on the semicircle support.

    The zero set of g must contain [-2 sqrt d, 2 sqrt d].
    """
    g = _single_function(config, g)
    radius = 2.0 * math.sqrt(config.d)
    if g.zero_half_width is None or g.zero_half_width < radius:
        raise ValidationError("{} does not vanish on [-{r:.4g}, {r:.4g}]".format(g.label, r=radius))
    run = _with_statistics(config, [g])
    records = run_experiment(run, workers)
    rows = []
    for n, chosen in _split(records).items():
        p = run.p_at(n)
        squares = _values(chosen)[:, 0] ** 2
        factor = scale_factor(n, run.d, p)
        rows.append(OrderedDict([
            ("n", n),
            ("p", p),
            ("scaled_second_moment", factor * math.fsum(squares) / squares.size),
            ("se", factor * float(np.std(squares, ddof=1)) / math.sqrt(squares.size)),
        ]))
    logger.info("[simplectra_mc] tail mass for %s: %s", g.label, [r["scaled_second_moment"] for r in rows])
    return OrderedDict([("statistic", g.label), ("rows", rows), ("records", records)])


@timeit
def convex_concentration_experiment(config, g=None, workers=None):
    """ n^d np(1-p) Var(<L, g>) along the n grid for a convex Lipschitz g, with the largest value """
    g = _single_function(config, g)
    if not g.convex or g.lipschitz is None:
        raise ValidationError("{} is not a convex Lipschitz function".format(g.label))
    run = _with_statistics(config, [g])
    records = run_experiment(run, workers)
    rows = []
    for n, chosen in _split(records).items():
        p = run.p_at(n)
        values = _values(chosen)
        factor = scale_factor(n, run.d, p)
        _, cov = covariance(values)
        rows.append(OrderedDict([
            ("n", n),
            ("p", p),
            ("scaled_variance", factor * float(cov[0, 0])),
            ("se", factor * float(jackknife_covariance_se(values)[0, 0])),
        ]))
    largest = max(row["scaled_variance"] for row in rows)
    return OrderedDict([
        ("statistic", g.label),
        ("lipschitz", g.lipschitz),
        ("rows", rows),
        ("max_scaled_variance", largest),
        ("records", records),
    ])


def lipschitz_bound(n, d, p, lip_g):
    """ Lipschitz constant of the facet indicators -> <L_{H_n}, g>, from Hoffman-Wielandt """
    return math.sqrt((d + 1) * d / (comb(n, d, exact=True) * n * p * (1.0 - p))) * lip_g


@timeit
def lipschitz_check(config, g=None, flips=None):
    """ Largest |change of <L, g>| over single facet flips, relative to lipschitz_bound """
    g = _single_function(config, g)
    if g.lipschitz is None:
        raise ValidationError("{} has no Lipschitz constant".format(g.label))
    flips = config.flips if flips is None else int(flips)
    rows = []
    for n in config.ns:
        p = config.p_at(n)
        _check_degenerate(n, p)
        bound = lipschitz_bound(n, config.d, p, g.lipschitz)
        worst = 0.0
        for t in range(config.trials):
            seed = trial_seed(config.master_seed, t, n)
            sample = sample_lm(LMParams(n, config.d, p, seed))
            (base,), _ = _evaluate(sample, [g])
            for f in range(flips):
                mask = sample.mask.copy()
                flip = mix64(seed, f) % mask.size
                mask[flip] = not mask[flip]
                (value,), _ = _evaluate(LMSample(sample.params, mask), [g])
                if bound > 0:
                    worst = max(worst, abs(value - base) / bound)
                elif abs(value - base) > 1e-12:
                    worst = math.inf
        rows.append(OrderedDict([("n", n), ("p", p), ("bound", bound), ("max_ratio", worst)]))
    return OrderedDict([("statistic", g.label), ("rows", rows)])


def records_frame(records, labels):
    frame = pd.DataFrame({
        "trial_index": [r.trial_index for r in records],
        "n": [r.n for r in records],
        "seed": [str(r.seed) for r in records],
    })
    values = _values(records)
    for i, label in enumerate(labels):
        frame[label] = values[:, i]
    frame["kolmogorov_distance"] = [r.kolmogorov for r in records]
    return frame


def qq_frame(records, labels):
    frames = []
    for n, chosen in _split(records).items():
        for i, label in enumerate(labels):
            try:
                frame = qq_rows(chosen, i)
            except ValidationError:
                continue
            frame.insert(0, "statistic", label)
            frame.insert(0, "n", n)
            frames.append(frame)
    if not frames:
        return pd.DataFrame(columns=["n", "statistic", "z", "normal_quantile"])
    return pd.concat(frames, ignore_index=True)


def write_outputs(directory, records, labels, report):
    """ records.csv, report.json and qq.csv under directory; returns their paths """
    paths = OrderedDict((name, os.path.join(directory, name)) for name in ("records.csv", "report.json", "qq.csv"))
    try:
        if not os.path.isdir(directory):
            os.makedirs(directory)
        records_frame(records, labels).to_csv(paths["records.csv"], index=False, float_format="%.17g")
        with open(paths["report.json"], "wt") as handle:
            json.dump(jsonable(report), handle, indent=2)
            handle.write("\n")
        qq_frame(records, labels).to_csv(paths["qq.csv"], index=False, float_format="%.17g")
    except (IOError, OSError) as error:
        raise ValidationError("cannot write outputs to {}: {}".format(directory, error))
    logger.info("[simplectra_mc] outputs written to %s", directory)
    return paths
