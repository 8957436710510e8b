"""Command line: sample, spectrum, enumerate, sigma and mc.

Every command prints one JSON object tagged with SCHEMA to stdout. Exit code 0
on success, 1 on a validation error, 2 when the enumeration budget refuses.
"""
from __future__ import division, print_function

import argparse
import json
import logging
import os
import sys
from collections import OrderedDict

import numpy as np

from simplectra import textio
from simplectra.clt import SigmaParams, oracle_counts, sigma_exact, sigma_oracle, sigma_positive_table, \
    sigma_table
from simplectra.errors import BudgetExceeded, ValidationError
from simplectra.lm_model import LMParams, adjacency_dense, centered_scaled, sample_lm
from simplectra.polynomial import as_rational
from simplectra.spectral import eigenvalues_sym, kolmogorov_distance, moment
from simplectra.words import MINUS, PLUS, SUBLEADING, classify_pair, enumerate_h_sentences, enumerate_words, \
    summary_record

from .harness import SCHEMA, ExperimentConfig, jsonable, convex_concentration_experiment, estimate_all, \
    lipschitz_check, run_experiment, tail_mass_experiment, write_outputs

logger = logging.getLogger(__name__)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(message)


def _emit(stream, payload):
    body = OrderedDict([("schema", SCHEMA)])
    body.update(payload)
    stream.write(json.dumps(jsonable(body), indent=2) + "\n")


def _write_json(path, payload):
    try:
        with open(path, "wt") as handle:
            json.dump(jsonable(payload), handle, indent=2)
            handle.write("\n")
    except (IOError, OSError) as error:
        raise ValidationError("cannot write {}: {}".format(path, error))


def cmd_sample(args):
    sample = sample_lm(LMParams(args.n, args.d, args.p, args.seed))
    result = OrderedDict([
        ("command", "sample"),
        ("n", args.n), ("d", args.d), ("p", args.p), ("seed", args.seed),
        ("facets", len(sample)),
    ])
    if args.out:
        textio.write_sample(args.out, sample)
        result["out"] = args.out
    else:
        result["complex"] = [list(tau) for tau in sample.complex]
    return result


def _load_sample(args):
    if args.input:
        return textio.read_sample(args.input)
    missing = [flag for flag in ("n", "d", "p") if getattr(args, flag) is None]
    if missing:
        raise ValidationError("spectrum needs --in or the sampling flags, missing {}".format(missing))
    return sample_lm(LMParams(args.n, args.d, args.p, args.seed))


def cmd_spectrum(args):
    if args.k_moments < 0:
        raise ValidationError("--k-moments must be >= 0, got {}".format(args.k_moments))
    sample = _load_sample(args)
    params = sample.params
    if 0.0 < float(params.p) < 1.0:
        matrix, kind = centered_scaled(sample).H, "centered"
    else:
        matrix, kind = adjacency_dense(params.n, params.d, sample.mask), "adjacency"
    spectrum = eigenvalues_sym(matrix)
    result = OrderedDict([
        ("command", "spectrum"),
        ("n", params.n), ("d", params.d), ("p", params.p), ("seed", params.seed),
        ("matrix", kind),
        ("moments", [moment(spectrum, k) for k in range(args.k_moments + 1)]),
        ("kolmogorov_distance", kolmogorov_distance(spectrum, params.d)),
    ])
    if args.out:
        textio.write_spectrum(args.out, spectrum)
        result["out"] = args.out
    else:
        result["eigenvalues"] = spectrum.eigs
    return result


def _s_range(args, ks):
    if not args.all_s:
        if args.s is None:
            raise ValidationError("enumerate needs --s or --all-s")
        return [args.s]
    h = len(ks)
    top = sum(ks) // 2 + args.d * (h // 2) if h > 1 else ks[0] // 2 + args.d
    return list(range(args.d + 1, top + 1))


def _word_lengths(args):
    if args.mode == "words":
        return [args.k]
    if args.mode == "pairs":
        if args.l is None:
            raise ValidationError("--mode pairs needs --l")
        return [args.k, args.l]
    if not args.ks:
        raise ValidationError("--mode h needs --ks")
    try:
        return [int(v) for v in args.ks.split(",")]
    except ValueError:
        raise ValidationError("--ks takes comma separated integers, got {!r}".format(args.ks))


def cmd_enumerate(args):
    ks = _word_lengths(args)
    counts, tags, dump = OrderedDict(), OrderedDict(), []
    for s in _s_range(args, ks):
        if args.mode == "words":
            classes = enumerate_words(args.d, ks[0], s, args.budget)
        else:
            classes = enumerate_h_sentences(args.d, ks, s, args.budget)
        counts[str(s)] = len(classes)
        tally = OrderedDict((tag, 0) for tag in (MINUS, PLUS, SUBLEADING))
        for a in classes:
            tag = classify_pair(a, ks[0], ks[1]) if args.mode == "pairs" else None
            if tag is not None:
                tally[tag] += 1
            record = OrderedDict([("s", s)])
            record.update(summary_record(a, tag))
            dump.append(record)
        if args.mode == "pairs":
            tags[str(s)] = tally
    result = OrderedDict([("command", "enumerate"), ("mode", args.mode), ("d", args.d), ("ks", ks),
                          ("counts", counts)])
    if args.mode == "pairs":
        result["tags"] = tags
    if args.out:
        _write_json(args.out, OrderedDict([("schema", SCHEMA), ("classes", dump)]))
        result["out"] = args.out
    else:
        result["classes"] = dump
    return result


def cmd_sigma(args):
    params = SigmaParams(args.d, args.p_inf).validate()
    if args.K is not None:
        table = sigma_table(args.K, params)
        result = OrderedDict([
            ("command", "sigma"), ("d", args.d), ("p_inf", args.p_inf), ("K", args.K),
            ("matrix", table.matrix), ("min_eigenvalue", table.min_eigenvalue),
            ("positive", sigma_positive_table(args.K, args.p_inf)),
        ])
        if args.oracle:
            oracle = np.zeros_like(table.matrix)
            equal = True
            for k in range(args.K + 1):
                for l in range(k, args.K + 1):
                    if (k + l) % 2:
                        continue
                    value = sigma_oracle(k, l, args.d, args.p_inf, args.budget)
                    oracle[k, l] = oracle[l, k] = float(value)
                    equal = equal and value == sigma_exact(k, l, params)
            result["oracle"] = oracle
            result["equal"] = equal
    else:
        if args.k is None or args.l is None:
            raise ValidationError("sigma needs --K or both --k and --l")
        closed = sigma_exact(args.k, args.l, params)
        result = OrderedDict([
            ("command", "sigma"), ("d", args.d), ("p_inf", args.p_inf), ("k", args.k), ("l", args.l),
            ("sigma", float(closed)),
        ])
        if args.oracle:
            if (args.k + args.l) % 2:
                oracle, counts = closed, (0, 0)
            else:
                counts = oracle_counts(args.k, args.l, args.d, args.budget)
                p = as_rational(args.p_inf)
                oracle = counts[0] * (2 * p - 1) ** 2 + counts[1] * p * (1 - p)
            result["oracle"] = float(oracle)
            result["minus_count"], result["plus_count"] = counts
            result["equal"] = bool(oracle == closed)
    if args.out:
        _write_json(args.out, result)
        return OrderedDict([("command", "sigma"), ("out", args.out)])
    return result


def _summaries(reports):
    return [
        OrderedDict([
            ("n", n), ("statistics", report.labels), ("mean", report.mean),
            ("scaled_covariance_diagonal", np.diag(report.scaled_covariance)),
        ])
        for n, report in reports.items()
    ]


def cmd_mc(args):
    config = ExperimentConfig.from_file(args.config)
    directory = args.out or config.output
    workers = args.workers
    if config.kind == "estimate":
        records = run_experiment(config, workers)
        reports = estimate_all(records, config)
        report = OrderedDict([("schema", SCHEMA), ("config", config.to_dict()),
                              ("estimates", [r.to_dict() for r in reports.values()])])
        summary = _summaries(reports)
        labels = config.labels
    elif config.kind == "lipschitz":
        outcome = lipschitz_check(config)
        _write_json(os.path.join(_ensure(directory), "report.json"), OrderedDict([
            ("schema", SCHEMA), ("config", config.to_dict()), ("lipschitz", outcome)]))
        return OrderedDict([("command", "mc"), ("kind", config.kind), ("rows", outcome["rows"]),
                            ("out", directory)])
    else:
        experiment = tail_mass_experiment if config.kind == "tail" else convex_concentration_experiment
        outcome = experiment(config, workers=workers)
        records = outcome.pop("records")
        report = OrderedDict([("schema", SCHEMA), ("config", config.to_dict()), (config.kind, outcome)])
        summary = outcome["rows"]
        labels = [outcome["statistic"]]
    paths = write_outputs(directory, records, labels, report)
    return OrderedDict([("command", "mc"), ("kind", config.kind), ("trials", len(records)),
                        ("summary", summary), ("files", paths)])


def _ensure(directory):
    try:
        if not os.path.isdir(directory):
            os.makedirs(directory)
    except (IOError, OSError) as error:
        raise ValidationError("cannot create {}: {}".format(directory, error))
    return directory


def build_parser():
    parser = _Parser(prog="simplectra", description="Spectra of random Linial-Meshulam complexes")
    common = _Parser(add_help=False)
    common.add_argument("--log-level", default="WARNING",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"], help="logging level on stderr")
    sub = parser.add_subparsers(dest="command")
    sub.required = True

    sample = sub.add_parser("sample", parents=[common], help="draw a Linial-Meshulam complex")
    sample.add_argument("--n", type=int, required=True)
    sample.add_argument("--d", type=int, required=True)
    sample.add_argument("--p", type=float, required=True)
    sample.add_argument("--seed", type=int, default=0)
    sample.add_argument("--out")
    sample.set_defaults(handler=cmd_sample)

    spectrum = sub.add_parser("spectrum", parents=[common], help="eigenvalues, moments and semicircle distance")
    spectrum.add_argument("--in", dest="input")
    spectrum.add_argument("--n", type=int)
    spectrum.add_argument("--d", type=int)
    spectrum.add_argument("--p", type=float)
    spectrum.add_argument("--seed", type=int, default=0)
    spectrum.add_argument("--k-moments", type=int, default=4)
    spectrum.add_argument("--out")
    spectrum.set_defaults(handler=cmd_spectrum)

    enum = sub.add_parser("enumerate", parents=[common], help="count word and sentence classes")
    enum.add_argument("--d", type=int, required=True)
    enum.add_argument("--k", type=int)
    enum.add_argument("--l", type=int)
    enum.add_argument("--ks", help="comma separated word lengths for --mode h")
    group = enum.add_mutually_exclusive_group()
    group.add_argument("--s", type=int)
    group.add_argument("--all-s", action="store_true")
    enum.add_argument("--mode", choices=["words", "pairs", "h"], default="words")
    enum.add_argument("--budget", type=float)
    enum.add_argument("--out")
    enum.set_defaults(handler=cmd_enumerate)

    sigma = sub.add_parser("sigma", parents=[common], help="limit covariances sigma(k, l)")
    sigma.add_argument("--d", type=int, required=True)
    sigma.add_argument("--p-inf", type=float, required=True)
    sigma.add_argument("--K", type=int)
    sigma.add_argument("--k", type=int)
    sigma.add_argument("--l", type=int)
    sigma.add_argument("--oracle", action="store_true")
    sigma.add_argument("--budget", type=float)
    sigma.add_argument("--out")
    sigma.set_defaults(handler=cmd_sigma)

    mc = sub.add_parser("mc", parents=[common], help="run a Monte Carlo experiment")
    mc.add_argument("--config", required=True)
    mc.add_argument("--workers", type=int)
    mc.add_argument("--out", help="output directory, overrides the config")
    mc.set_defaults(handler=cmd_mc)
    return parser


def main(argv=None, stdout=None):
    stdout = stdout or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(stream=sys.stderr, level=getattr(logging, args.log_level),
                            format="%(asctime)s %(levelname)s %(name)s: %(message)s")
        if args.command == "enumerate" and args.mode in ("words", "pairs") and args.k is None:
            raise ValidationError("enumerate --mode {} needs --k".format(args.mode))
        if getattr(args, "budget", None) is not None:
            args.budget = int(args.budget)
        result = args.handler(args)
    except BudgetExceeded as error:
        logger.error("[simplectra_mc] %s", error)
        _emit(stdout, OrderedDict([("error", "BudgetExceeded"), ("message", str(error))]))
        return 2
    except ValidationError as error:
        logger.error("[simplectra_mc] %s", error)
        _emit(stdout, OrderedDict([("error", "ValidationError"), ("message", str(error))]))
        return 1
    except (IOError, OSError) as error:
        logger.error("[simplectra_mc] %s", error)
        _emit(stdout, OrderedDict([("error", "ValidationError"), ("message", str(error))]))
        return 1
    _emit(stdout, result)
    return 0
