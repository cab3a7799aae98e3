"""Command line entry point: ``cbos {resample,induce,eval,bench}``.

Exit codes: 0 success, 1 usage/config error, 2 data error, 3 internal error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .dataset import induce_imbalance, load_csv, profile, write_csv
from .errors import ConfigError, DataError
from .evaluation import MetricsReport, evaluate, train_linear
from .harness import (
    METHOD_PARAMS,
    RESAMPLERS,
    BlobSource,
    ClassifierSettings,
    CsvSource,
    ExperimentConfig,
    MethodSpec,
    emit_report,
    run_experiment,
)

log = logging.getLogger("cbos")

EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _clusters(value: str):
    return value if value == "auto" else int(value)


def _add_method_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("resampler settings (only those the method uses are applied)")
    g.add_argument("--eta", type=float, help="share of the class gap to fill, in (0, 1] (default 1)")
    g.add_argument("--clusters", type=_clusters, help="cbos: k-means cluster count or 'auto'")
    g.add_argument("--random-lo", type=float, help="cbos: lower end of the perturbation range (default 0)")
    g.add_argument("--random-hi", type=float, help="cbos: upper end of the perturbation range (default 1)")
    g.add_argument("--weight-mode", choices=["direct", "inverse"],
                   help="cbos: direct = farther rows get more samples, inverse = nearer rows do")
    g.add_argument("--noise-mode", choices=["per_feature", "per_sample"],
                   help="cbos: independent draw per feature, or one draw per generated row")
    g.add_argument("--kmeans-iters", type=int, help="cbos: maximum Lloyd iterations (default 100)")
    g.add_argument("--kmeans-tol", type=float, help="cbos: centroid movement tolerance (default 1e-6)")
    g.add_argument("--k-neighbors", type=int, help="smote/adasyn/smote-enn: neighbours (default 5)")
    g.add_argument("--enn-k", type=int, help="smote-enn: odd ENN neighbourhood size (default 3)")


def _add_classifier_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--epochs", type=int, default=ClassifierSettings.epochs)
    p.add_argument("--lr", type=float, default=ClassifierSettings.lr)
    p.add_argument("--beta", type=float, default=ClassifierSettings.beta, help="F-score beta")


def _method_params(args, method: str) -> dict:
    params = {}
    for name in METHOD_PARAMS[method]:
        value = getattr(args, name, None)
        if value is not None:
            params[name] = value
    return params


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cbos", description="Clustering based oversampling for imbalanced binary data.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("resample", help="oversample the minority class of a CSV file")
    p.add_argument("--input", required=True, type=Path)
    p.add_argument("--label-col", required=True)
    p.add_argument("--minority-label", default="auto")
    p.add_argument("--method", required=True, choices=sorted(RESAMPLERS))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True, type=Path)
    _add_method_flags(p)

    p = sub.add_parser(
        "induce",
        help="subsample the minority class down to a target rate",
        description="The rate is minority / (minority + majority).",
    )
    p.add_argument("--input", required=True, type=Path)
    p.add_argument("--label-col", required=True)
    p.add_argument("--minority-label", default="auto")
    p.add_argument("--rate", required=True, type=float, help="target minority / total share, in (0, 0.5)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True, type=Path)

    p = sub.add_parser("eval", help="train the logistic classifier on one CSV and score it on another")
    p.add_argument("--train", required=True, type=Path)
    p.add_argument("--test", required=True, type=Path)
    p.add_argument("--label-col", required=True)
    p.add_argument("--minority-label", default="auto")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=["table", "json"], default="table")
    _add_classifier_flags(p)

    p = sub.add_parser(
        "bench",
        help="repeated train/test experiments comparing resamplers",
        description="Either --config FILE (JSON mirroring the experiment config) or inline flags. "
        "The no-resampling baseline 'none' is always included. Induced rates are "
        "minority / (minority + majority).",
    )
    p.add_argument("--config", type=Path)
    p.add_argument("--input", type=Path, help="CSV data; synthetic blobs when omitted")
    p.add_argument("--label-col")
    p.add_argument("--minority-label", default="auto")
    p.add_argument("--n-majority", type=int, default=BlobSource.n_majority)
    p.add_argument("--n-minority", type=int, default=BlobSource.n_minority)
    p.add_argument("--dims", type=int, default=BlobSource.dims)
    p.add_argument("--minority-clusters", type=int, default=BlobSource.minority_clusters)
    p.add_argument("--spread", type=float, default=BlobSource.spread)
    p.add_argument("--methods", default="cbos", help="comma separated, from: " + ",".join(sorted(RESAMPLERS)))
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--seed", dest="base_seed", type=int, default=0, help="seed of run 0; run r uses seed + r")
    p.add_argument("--test-fraction", type=float, default=0.3)
    p.add_argument("--induce-rate", type=float)
    p.add_argument("--out", type=Path, help="write the JSON report here")
    p.add_argument("--format", choices=["table", "json", "csv"], default="table", help="stdout format")
    _add_method_flags(p)
    _add_classifier_flags(p)
    return parser


def _cmd_resample(args) -> int:
    data = load_csv(args.input, args.label_col, args.minority_label)
    before = profile(data)
    out = RESAMPLERS[args.method](data, args.seed, **_method_params(args, args.method))
    write_csv(out, args.output)
    after = profile(out)
    print(f"{args.method}: minority {before.k_minority} -> {after.k_minority}, "
          f"majority {before.k_majority} -> {after.k_majority}; wrote {args.output}")
    return 0


def _cmd_induce(args) -> int:
    data = load_csv(args.input, args.label_col, args.minority_label)
    out = induce_imbalance(data, args.rate, args.seed)
    write_csv(out, args.output)
    prof = profile(out)
    print(f"kept {prof.k_minority} minority / {prof.k_majority} majority rows "
          f"(rate {prof.imbalance_rate:.4f}); wrote {args.output}")
    return 0


def _cmd_eval(args) -> int:
    train = load_csv(args.train, args.label_col, args.minority_label)
    test = load_csv(args.test, args.label_col, args.minority_label)
    model = train_linear(train, args.epochs, args.lr, args.seed)
    cm, rep = evaluate(model, test, args.beta)
    if args.format == "json":
        print(json.dumps({"confusion": vars(cm), "metrics": rep.to_dict()}, indent=2))
    else:
        print(f"tp={cm.tp} fp={cm.fp} tn={cm.tn} fn={cm.fn}")
        for name in MetricsReport.NAMES:
            print(f"{name:<10} {getattr(rep, name):.4f}")
    return 0


def _bench_config(args) -> ExperimentConfig:
    if args.config:
        try:
            raw = json.loads(args.config.read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ConfigError(f"no such config file: {args.config}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{args.config}: invalid JSON: {exc}") from None
        return ExperimentConfig.from_dict(raw)
    if args.input:
        if not args.label_col:
            raise ConfigError("--input needs --label-col")
        data = CsvSource(str(args.input), args.label_col, args.minority_label)
    else:
        data = BlobSource(args.n_majority, args.n_minority, args.dims, args.minority_clusters, args.spread)
    names = [m.strip() for m in args.methods.split(",") if m.strip()]
    for name in names:
        if name not in RESAMPLERS:
            raise ConfigError(f"unknown method {name!r}")
    return ExperimentConfig(
        data=data,
        methods=tuple(MethodSpec(n, _method_params(args, n)) for n in names),
        runs=args.runs,
        base_seed=args.base_seed,
        test_fraction=args.test_fraction,
        induced_rate=args.induce_rate,
        classifier=ClassifierSettings(args.epochs, args.lr, args.beta),
    )


def _cmd_bench(args) -> int:
    report = run_experiment(_bench_config(args))
    if args.out:
        args.out.write_text(emit_report(report, "json"), encoding="utf-8")
        log.info("wrote %s", args.out)
    sys.stdout.write(emit_report(report, args.format))
    return 0


COMMANDS = {"resample": _cmd_resample, "induce": _cmd_induce, "eval": _cmd_eval, "bench": _cmd_bench}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"cbos: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"cbos: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # noqa: BLE001
        log.debug("internal error", exc_info=True)
        print(f"cbos: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
