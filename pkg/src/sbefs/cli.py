"""Command line entry point: ``sbefs <subcommand> ...``.

Exit codes: 0 success, 1 usage error, 2 data or validation error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import fields, replace

from . import _rng
from .appearance import build_model, load_model, region_scores, save_model
from .classifier import TrainConfig, kfold_confusion, uar
from .data import DataError, project
from .io import load_dataset, read_ids, read_json, write_csv, write_ids, write_json
from .mutual_info import rank_features
from .oracle import sbe_oracle
from .pipeline import select_with_report
from .selector import BASELINES, SUBSET_SCHEMES, VALIDATIONS, SelectionConfig
from .synth import SynthSpec, generate

log = logging.getLogger("sbefs")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


# flag dest -> SelectionConfig field
_SELECTION_FLAGS = {
    "target": "target_count",
    "k": "k_folds",
    "local_threshold": "local_threshold",
    "min_iterations": "min_iterations_per_step",
    "max_iterations": "max_iterations_per_step",
    "removal_fraction": "removal_fraction",
    "bins": "n_bins",
    "counter_score": "counter_score_enabled",
    "subset_size": "subset_size_override",
    "subset_scheme": "subset_scheme",
    "baseline": "baseline",
    "validation": "validation",
    "holdout_fraction": "holdout_fraction",
    "seed": "seed",
    "jobs": "jobs",
}
_TRAIN_FLAGS = {"C": "C", "epochs": "epochs", "t0": "t0"}


def _add_data_args(p, required=True):
    p.add_argument("--data", required=required, help="dataset file (CSV with trailing label column, or LIBSVM)")
    p.add_argument("--format", choices=("csv", "libsvm"), default=None, help="default: guessed from the extension")
    p.add_argument("--header", action="store_true", help="CSV has a header row")


def _add_selection_args(p, with_target=True):
    p.add_argument("--config", help="JSON file with SelectionConfig keys; flags override it")
    if with_target:
        p.add_argument("--target", type=int, default=None, help="number of features to keep")
    p.add_argument("--k", type=int, default=None, help="folds per subset evaluation (default 3)")
    p.add_argument("--local-threshold", type=float, default=None)
    p.add_argument("--min-iterations", type=int, default=None)
    p.add_argument("--max-iterations", type=int, default=None)
    p.add_argument("--removal-fraction", type=float, default=None)
    p.add_argument("--bins", type=int, default=None)
    p.add_argument("--counter-score", dest="counter_score", action="store_true", default=None)
    p.add_argument("--no-counter-score", dest="counter_score", action="store_false")
    p.add_argument("--subset-size", type=int, default=None)
    p.add_argument("--subset-scheme", choices=SUBSET_SCHEMES, default=None)
    p.add_argument("--baseline", choices=BASELINES, default=None)
    p.add_argument("--validation", choices=VALIDATIONS, default=None)
    p.add_argument("--holdout-fraction", type=float, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--jobs", type=int, default=None, help="worker threads for subset evaluations")
    p.add_argument("--C", type=float, default=None, help="SVM regularization constant")
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--t0", type=float, default=None)


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    parser = _Parser(prog="sbefs", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def command(name, help):
        return sub.add_parser(name, help=help, parents=[common])

    p = command("select", help="run feature selection and write a JSON report")
    _add_data_args(p)
    _add_selection_args(p)
    p.add_argument("--report-holdout", type=float, default=0.25,
                   help="fraction held out for the final full-vs-selected comparison (0 disables)")
    p.add_argument("--out", required=True, help="report JSON path")
    p.add_argument("--selected-out", help="selected IDs file (default: <out stem>.ids.txt)")

    p = command("rank-mi", help="rank features by mutual information with the class")
    _add_data_args(p)
    p.add_argument("--bins", type=int, default=10)
    p.add_argument("--out", help="write the table here instead of stdout")

    p = command("eval", help="k-fold UAR of a linear SVM on a feature subset")
    _add_data_args(p)
    p.add_argument("--features", help="IDs file, one per line (default: all features)")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--C", type=float, default=1.0)
    p.add_argument("--epochs", type=int, default=10)

    p = command("gen-synth", help="write a synthetic dataset with planted features")
    defaults = SynthSpec()
    p.add_argument("--n-per-class", type=int, default=defaults.n_per_class)
    p.add_argument("--relevant", type=int, default=defaults.n_relevant)
    p.add_argument("--redundant", type=int, default=defaults.n_redundant)
    p.add_argument("--irrelevant", type=int, default=defaults.n_irrelevant)
    p.add_argument("--separation", type=float, default=defaults.separation)
    p.add_argument("--redundancy-noise", type=float, default=defaults.redundancy_noise)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="CSV path")
    p.add_argument("--truth", help="ground-truth JSON path (default: <out stem>.truth.json)")

    p = command("model-train", help="build an appearance model from labelled data")
    _add_data_args(p)
    p.add_argument("--features", required=True, help="IDs file or a select report JSON")
    p.add_argument("--positive-label", help="label text of the positive class (default: second label seen)")
    p.add_argument("--out", required=True, help="model JSON path")

    p = command("model-score", help="score feature vectors with an appearance model")
    p.add_argument("--model", required=True)
    _add_data_args(p)
    p.add_argument("--unlabeled", action="store_true", help="CSV rows carry no label column")
    p.add_argument("--out", help="write scores here instead of stdout")

    p = command("sbe-oracle", help="exhaustive classical SBE on one fixed split")
    _add_data_args(p)
    p.add_argument("--target", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--holdout-fraction", type=float, default=None)
    p.add_argument("--C", type=float, default=None)
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--t0", type=float, default=None)
    p.add_argument("--out", help="write the JSON result here instead of stdout")
    return parser


def resolve_config(args, file_values=None):
    """Defaults, then config file values, then explicit flags."""
    values = dict(file_values or {})
    unknown = set(values) - {f.name for f in fields(SelectionConfig)}
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
    train = dict(values.pop("train", {}) or {})
    for flag, key in _SELECTION_FLAGS.items():
        v = getattr(args, flag, None)
        if v is not None:
            values[key] = v
    for flag, key in _TRAIN_FLAGS.items():
        v = getattr(args, flag, None)
        if v is not None:
            train[key] = v
    if "target_count" not in values:
        raise UsageError("--target is required (or target_count in --config)")
    try:
        return SelectionConfig(**values, train=TrainConfig(**train))
    except TypeError as exc:
        raise UsageError(str(exc)) from None


def _emit(text, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _stem(path):
    return path[:-5] if path.endswith(".json") else path


def cmd_select(args):
    config = resolve_config(args, read_json(args.config) if args.config else None)
    dataset = load_dataset(args.data, args.format, args.header)

    def progress(rec):
        log.info("step %d: %d iterations, L_c=%.4f, E=%.4f, alpha=%.4f, removed %d, %d left",
                 rec.step, rec.iterations, rec.local_criterion, rec.step_uar, rec.alpha,
                 len(rec.removed), rec.remaining_after)

    _, report = select_with_report(dataset, config, args.report_holdout, source=args.data, on_step=progress)
    write_json(report, args.out)
    write_ids(report["selected_ids"], args.selected_out or _stem(args.out) + ".ids.txt")
    if "holdout" in report:
        h = report["holdout"]
        print(f"selected {len(report['selected_ids'])} features; "
              f"held-out UAR full={h['full_uar']:.4f} selected={h['selected_uar']:.4f}")
    else:
        print(f"selected {len(report['selected_ids'])} features")
    return 0


def cmd_rank_mi(args):
    dataset = load_dataset(args.data, args.format, args.header)
    lines = ["id\tig_bits\n"] + [f"{f}\t{ig!r}\n" for f, ig in rank_features(dataset, args.bins)]
    _emit("".join(lines), args.out)
    return 0


def cmd_eval(args):
    dataset = load_dataset(args.data, args.format, args.header)
    ids = read_ids(args.features) if args.features else list(dataset.feature_ids)
    train_cfg = TrainConfig(C=args.C, epochs=args.epochs, seed=_rng.derive_seed(args.seed, "train"))
    counts = kfold_confusion(project(dataset, ids), args.k, train_cfg, _rng.derive_seed(args.seed, "folds"))
    print(f"UAR {uar(counts)!r}")
    return 0


def cmd_gen_synth(args):
    spec = SynthSpec(
        n_per_class=args.n_per_class,
        n_relevant=args.relevant,
        n_redundant=args.redundant,
        n_irrelevant=args.irrelevant,
        separation=args.separation,
        redundancy_noise=args.redundancy_noise,
        seed=args.seed,
    )
    dataset, relevant, redundant = generate(spec)
    write_csv(dataset, args.out)
    truth = args.truth or (args.out[:-4] if args.out.endswith(".csv") else args.out) + ".truth.json"
    write_json({"spec": spec.to_dict(), "relevant_ids": relevant, "redundant_ids": redundant}, truth)
    return 0


def _feature_list(path):
    return [int(i) for i in read_json(path)["selected_ids"]] if path.endswith(".json") else read_ids(path)


def cmd_model_train(args):
    dataset = load_dataset(args.data, args.format, args.header)
    names = list(dataset.label_names) or [str(i) for i in range(dataset.n_classes)]
    if args.positive_label is None:
        positive = 1
    elif args.positive_label in names:
        positive = names.index(args.positive_label)
    else:
        raise DataError(f"label {args.positive_label!r} not found; labels are {names}")
    ids = _feature_list(args.features)
    for f in ids:
        dataset.column_of(f)
    is_pos = dataset.labels == positive
    model = build_model(dataset.samples[is_pos], dataset.samples[~is_pos], ids)
    save_model(model, args.out)
    return 0


def cmd_model_score(args):
    import numpy as np

    model = load_model(args.model)
    if args.unlabeled:
        vectors = np.loadtxt(args.data, delimiter=",", ndmin=2, skiprows=1 if args.header else 0)
    else:
        vectors = load_dataset(args.data, args.format, args.header).samples
    scores = region_scores(model, vectors)
    _emit("".join(f"{float(s)!r}\n" for s in scores), args.out)
    return 0


def cmd_sbe_oracle(args):
    dataset = load_dataset(args.data, args.format, args.header)
    train = {k: getattr(args, k) for k in _TRAIN_FLAGS if getattr(args, k) is not None}
    extra = {} if args.holdout_fraction is None else {"holdout_fraction": args.holdout_fraction}
    config = SelectionConfig(target_count=args.target, seed=args.seed, validation="holdout",
                             train=TrainConfig(**train), **extra)
    removed = sbe_oracle(dataset, config)
    selected = [int(f) for f in dataset.feature_ids if int(f) not in set(removed)]
    _emit(json.dumps({"removed_order": removed, "selected_ids": selected}) + "\n", args.out)
    return 0


COMMANDS = {
    "select": cmd_select,
    "rank-mi": cmd_rank_mi,
    "eval": cmd_eval,
    "gen-synth": cmd_gen_synth,
    "model-train": cmd_model_train,
    "model-score": cmd_model_score,
    "sbe-oracle": cmd_sbe_oracle,
}


def cli_dispatch(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError(parser.format_help())
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(name)s: %(message)s")
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return exc.code if isinstance(exc.code, int) else 0
    except (DataError, ValueError, OSError, KeyError) as exc:
        print(f"sbefs: error: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(cli_dispatch())


if __name__ == "__main__":
    main()
