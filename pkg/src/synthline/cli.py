"""Command-line entry point for the whole pipeline.

Exit codes: 0 success, 1 configuration validation failure, 2 runtime error
(argparse also exits 2 on usage errors).
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path

from . import __version__
from .backends import make_backend
from .dataset import deduplicate, open_dataset_writer, read_dataset, stratified_split, write_dataset
from .embedding import make_embedder
from .feature_model import (
    Configuration,
    SynthlineError,
    count_atomic_configurations,
    expand_atomic_configurations,
    load_model,
    validate_configuration,
)
from .generation import params_from_configuration, run_generation_sync
from .metrics import DEFAULT_BIN_COUNT, diversity_report, histogram_to_csv
from .prompts import load_label_specs

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_RUNTIME = 2


def label_slug(label: str) -> str:
    slug = re.sub(r"[^0-9a-z]+", "-", label.casefold()).strip("-")
    return slug or "label"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="synthline",
        description="Configure, generate, and evaluate synthetic labeled text datasets.",
    )
    parser.add_argument("--version", action="version", version=f"synthline {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a configuration against a feature model")
    p.add_argument("-m", "--model", required=True, help="feature model (.fm) file")
    p.add_argument("-c", "--config", required=True, help="configuration JSON file")

    p = sub.add_parser("expand", help="expand a configuration into atomic configurations")
    p.add_argument("-m", "--model", required=True)
    p.add_argument("-c", "--config", required=True)
    p.add_argument("--count-only", action="store_true", help="print only the count")

    p = sub.add_parser("generate", help="run generation for every label in a labels file")
    p.add_argument("-m", "--model", required=True)
    p.add_argument("-c", "--config", required=True)
    p.add_argument("--labels", required=True, help="JSON array of {label, description}")
    p.add_argument("--backend", default="mock", help="'mock' or a chat-completions base URL")
    p.add_argument("--out", required=True, help="output directory (one file per label)")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--run-seed", type=int, default=None, help="seed for reproducible runs")
    p.add_argument("--model-name", default=None, help="override the configured LLM name")
    p.add_argument("--system", default=None, help="optional system message for HTTP backends")
    p.add_argument("--max-concurrency", type=int, default=8)
    p.add_argument("--retry-limit", type=int, default=3)

    p = sub.add_parser("dedup", help="remove duplicated texts")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--strict", action="store_true", help="byte-exact comparison only")
    p.add_argument("--format", choices=["csv", "json"], default=None)

    p = sub.add_parser("metrics", help="compute the diversity report for a dataset")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--embedder", default="hash", help="'hash' or an embedding endpoint URL")
    p.add_argument("--ngrams", default="2,3,4", help="comma-separated n-gram sizes")
    p.add_argument("--bins", type=int, default=DEFAULT_BIN_COUNT)
    p.add_argument("--report", required=True, help="write the report JSON here")
    p.add_argument("--histogram", default=None, help="also write the histogram CSV here")
    p.add_argument("--text-col", default=None, help="text column of an external corpus")
    p.add_argument("--label-col", default=None, help="label column of an external corpus")

    p = sub.add_parser("split", help="stratified train/test split")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--test-fraction", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out-train", required=True)
    p.add_argument("--out-test", required=True)
    p.add_argument("--format", choices=["csv", "json"], default=None)

    p = sub.add_parser("serve", help="start the configurator HTTP service")
    p.add_argument("-m", "--model", required=True)
    p.add_argument("--port", type=int, default=8787)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--out", default="synthline-runs", help="directory for run output files")

    return parser


def _cmd_validate(args) -> int:
    model = load_model(args.model)
    config = Configuration.load(args.config)
    report = validate_configuration(model, config)
    print(report.format())
    return EXIT_OK if report.valid else EXIT_INVALID


def _cmd_expand(args) -> int:
    model = load_model(args.model)
    config = Configuration.load(args.config)
    report = validate_configuration(model, config)
    if not report.valid:
        print(report.format(), file=sys.stderr)
        return EXIT_INVALID
    if args.count_only:
        print(count_atomic_configurations(model, config))
        return EXIT_OK
    for atomic in expand_atomic_configurations(model, config):
        print(json.dumps(atomic.to_dict()))
    return EXIT_OK


def _cmd_generate(args) -> int:
    model = load_model(args.model)
    config = Configuration.load(args.config)
    report = validate_configuration(model, config)
    if not report.valid:
        print(report.format(), file=sys.stderr)
        return EXIT_INVALID

    labels = load_label_specs(args.labels)
    backend_kwargs = {"system_message": args.system} if args.backend != "mock" else {}
    params = params_from_configuration(
        config,
        model_name=args.model_name,
        max_concurrency=args.max_concurrency,
        retry_limit=args.retry_limit,
    )
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    failed = False
    for spec in labels:
        backend = make_backend(args.backend, **backend_kwargs)
        path = out_dir / f"{label_slug(spec.label)}.{args.format}"
        with open_dataset_writer(path, args.format) as sink:
            run = run_generation_sync(
                model, config, spec, params, backend, sink, seed=args.run_seed
            )
        print(f"{spec.label}: {run.status.value}, {run.produced}/{run.total} samples -> {path}")
        if run.status.value != "completed":
            failed = True
            if run.error:
                print(f"  error: {run.error}", file=sys.stderr)
    return EXIT_RUNTIME if failed else EXIT_OK


def _column_mapping(args) -> dict[str, str] | None:
    if args.text_col or args.label_col:
        if not (args.text_col and args.label_col):
            raise SynthlineError("--text-col and --label-col must be given together")
        return {"text": args.text_col, "label": args.label_col}
    return None


def _cmd_metrics(args) -> int:
    dataset = read_dataset(args.infile, column_mapping=_column_mapping(args))
    embedder = make_embedder(args.embedder)
    n_sizes = [int(x) for x in args.ngrams.split(",") if x.strip()]
    report = diversity_report(dataset, embedder, n_sizes=n_sizes, bin_count=args.bins)
    Path(args.report).write_text(report.to_json() + "\n", encoding="utf-8")
    if args.histogram:
        histogram_to_csv(report.histogram, args.histogram)
    print(report.format())
    return EXIT_OK


def _cmd_dedup(args) -> int:
    dataset = read_dataset(args.infile, format=args.format)
    deduped, removed = deduplicate(dataset, strict=args.strict)
    fmt = args.format or ("json" if args.out.endswith(".json") else "csv")
    write_dataset(deduped, fmt, args.out)
    print(f"kept {len(deduped)}, removed {removed}")
    return EXIT_OK


def _cmd_split(args) -> int:
    dataset = read_dataset(args.infile, format=args.format)
    train, test = stratified_split(dataset, args.test_fraction, args.seed)
    fmt = args.format or ("json" if args.out_train.endswith(".json") else "csv")
    write_dataset(train, fmt, args.out_train)
    write_dataset(test, fmt, args.out_test)
    print(f"train {len(train)}, test {len(test)}")
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(load_model(args.model), runs_dir=Path(args.out))
    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


_COMMANDS = {
    "validate": _cmd_validate,
    "expand": _cmd_expand,
    "generate": _cmd_generate,
    "dedup": _cmd_dedup,
    "metrics": _cmd_metrics,
    "split": _cmd_split,
    "serve": _cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except SynthlineError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
