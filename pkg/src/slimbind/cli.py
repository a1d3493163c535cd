"""Command-line pipeline: analyze, simplify, generate.

Exit codes: 0 success, 1 schema/configuration errors, 2 corpus errors
(strict mode) or an empty corpus, 3 template errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .analyzer import analyze_corpus
from .binding import BindingOptions, build_binding_model, serialize_binding_model
from .emitter import emit_parser_backend, render, write_artifacts
from .errors import SlimbindError, TemplateError
from .loader import Catalog, SchemaSource, load_schema_set
from .model import QName
from .simplify import compute_retained_set, emit_reduced_schemas, reduction_report
from .templates import TemplateSet

EXIT_OK = 0
EXIT_SCHEMA = 1
EXIT_CORPUS = 2
EXIT_TEMPLATE = 3


def _discover_docs(docs_paths):
    found = []
    for docs_path in docs_paths:
        if os.path.isfile(docs_path):
            found.append(docs_path)
            continue
        for dirpath, _dirnames, filenames in os.walk(docs_path):
            for fn in filenames:
                if fn.endswith(".xml"):
                    found.append(os.path.join(dirpath, fn))
    return sorted(found)


def _parse_ignore_path(text: str):
    """``{ns}a/b/{ns2}c``; bare segments inherit the previous namespace."""
    segments = []
    ns = ""
    for raw in text.split("/"):
        if not raw:
            continue
        if raw.startswith("{"):
            ns, _, local = raw[1:].partition("}")
        else:
            local = raw
        segments.append(QName(ns, local))
    return tuple(segments)


def _load_inputs(args):
    resolver = Catalog.from_file(args.catalog) if args.catalog else None
    sources = [SchemaSource.from_file(p) for p in args.schemas]
    schema = load_schema_set(sources, resolver)
    return schema


def _check_out_dir(args):
    out = os.path.abspath(args.out)
    clashes = [os.path.abspath(p) for p in args.schemas]
    clashes.extend(os.path.abspath(p) for p in args.docs)
    for c in clashes:
        base = c if os.path.isdir(c) else os.path.dirname(c)
        if out == base:
            raise SlimbindError(f"--out {args.out} must be distinct from schema "
                                "and corpus directories")


def _run_analysis(args, schema):
    docs = _discover_docs(args.docs)
    from pathlib import Path
    report = analyze_corpus(schema, [Path(p) for p in docs], mode=args.mode)
    return report


def _write_usage(args, report):
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "usage-report.json")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(report.to_json())
    return path


def _report_failures(report):
    for name, exc in report.failures:
        print(f"FAILED {name}: {exc}", file=sys.stderr)


def cmd_analyze(args) -> int:
    try:
        schema = _load_inputs(args)
        _check_out_dir(args)
    except SlimbindError as exc:
        print(exc, file=sys.stderr)
        return EXIT_SCHEMA
    report = _run_analysis(args, schema)
    for w in schema.warnings:
        print(f"warning: {w}", file=sys.stderr)
    _write_usage(args, report)
    print(f"analyzed {report.document_count} documents, "
          f"{len(report.used_components)} components used")
    if report.failures and args.mode == "strict":
        _report_failures(report)
        return EXIT_CORPUS
    return EXIT_OK


def cmd_simplify(args) -> int:
    try:
        schema = _load_inputs(args)
        _check_out_dir(args)
    except SlimbindError as exc:
        print(exc, file=sys.stderr)
        return EXIT_SCHEMA
    report = _run_analysis(args, schema)
    _write_usage(args, report)
    if report.document_count == 0 or not report.used_components:
        print("no usage recorded: corpus is empty or nothing analyzed",
              file=sys.stderr)
        _report_failures(report)
        return EXIT_CORPUS
    retained = compute_retained_set(schema, report)
    files = emit_reduced_schemas(schema, retained, os.path.join(args.out, "reduced"))
    reduction = reduction_report(schema, retained)
    with open(os.path.join(args.out, "reduction-report.json"), "w",
              encoding="utf-8") as fh:
        fh.write(reduction.to_json())
    print(f"retained {reduction.retained_components}/{reduction.total_components} "
          f"global components ({reduction.percent()})")
    total_bytes = 0
    for f in files:
        size = os.path.getsize(f)
        total_bytes += size
        print(f"wrote {f} ({size} bytes)")
    print(f"reduced schema size: {total_bytes} bytes "
          "(component counts above are the primary metric)")
    if report.failures and args.mode == "strict":
        _report_failures(report)
        return EXIT_CORPUS
    return EXIT_OK


def cmd_generate(args) -> int:
    try:
        schema = _load_inputs(args)
        _check_out_dir(args)
    except SlimbindError as exc:
        print(exc, file=sys.stderr)
        return EXIT_SCHEMA
    report = _run_analysis(args, schema)
    _write_usage(args, report)
    if report.document_count == 0 or not report.used_components:
        print("no usage recorded: corpus is empty or nothing analyzed",
              file=sys.stderr)
        _report_failures(report)
        return EXIT_CORPUS
    if report.failures and args.mode == "strict":
        _report_failures(report)
        return EXIT_CORPUS

    options = BindingOptions(
        flatten_inheritance=not args.no_flatten,
        collapse_single_child=not args.no_collapse,
        tighten_occurrences=not args.keep_occurrences,
        bound_substitutions=not args.all_substitutions,
        prune_unused=not args.no_prune,
        ignore_paths=tuple(_parse_ignore_path(p) for p in args.ignore),
        lenient=args.mode == "lenient",
        corpus_is_synthetic=args.synthetic_corpus,
    )
    retained_used = compute_retained_set(schema, report)
    retained = retained_used if options.prune_unused else set(schema.components)
    emit_reduced_schemas(schema, retained_used, os.path.join(args.out, "reduced"))
    reduction = reduction_report(schema, retained_used)
    with open(os.path.join(args.out, "reduction-report.json"), "w",
              encoding="utf-8") as fh:
        fh.write(reduction.to_json())

    try:
        model = build_binding_model(schema, retained, report, options,
                                    model_name=args.model_name)
        if args.templates:
            templates = TemplateSet.from_dir(args.templates)
            artifacts = render(model, templates)
        else:
            artifacts = emit_parser_backend(model)
    except TemplateError as exc:
        print(exc, file=sys.stderr)
        return EXIT_TEMPLATE
    except SlimbindError as exc:
        print(exc, file=sys.stderr)
        return EXIT_CORPUS

    with open(os.path.join(args.out, "binding-model.json"), "w",
              encoding="utf-8") as fh:
        fh.write(serialize_binding_model(model))
    manifest = write_artifacts(model, artifacts, args.out)
    print(f"retained {reduction.retained_components}/{reduction.total_components} "
          f"global components ({reduction.percent()})")
    print(f"generated {len(artifacts)} files, {manifest['totalBytes']} bytes, "
          f"{manifest['classCount']} classes -> "
          f"{os.path.join(args.out, 'gen', model.name)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="slimbind",
        description="Corpus-driven XML Schema subsetting and parser generation.",
        epilog="exit codes: 0 success, 1 schema errors, 2 corpus errors, "
               "3 template errors")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--schemas", nargs="+", required=True,
                       help="schema entry-point files")
        p.add_argument("--catalog", help="catalog file: 'key<TAB>path' per line")
        p.add_argument("--docs", nargs="+", required=True,
                       help="corpus directories (recursive *.xml) and/or files")
        p.add_argument("--out", required=True, help="output directory")
        mode = p.add_mutually_exclusive_group()
        mode.add_argument("--strict", dest="mode", action="store_const",
                          const="strict", default="strict",
                          help="fail documents that do not match (default)")
        mode.add_argument("--lenient", dest="mode", action="store_const",
                          const="lenient", help="skip unmatched content with warnings")

    p = sub.add_parser("analyze", help="write usage-report.json for a corpus")
    common(p)
    p.set_defaults(fn=cmd_analyze)

    p = sub.add_parser("simplify", help="emit the reduced schema subset")
    common(p)
    p.set_defaults(fn=cmd_simplify)

    p = sub.add_parser("generate", help="generate parser code from the corpus")
    common(p)
    p.add_argument("--no-flatten", action="store_true",
                   help="keep inheritance instead of flattening")
    p.add_argument("--no-collapse", action="store_true",
                   help="keep single-child wrapper classes")
    p.add_argument("--keep-occurrences", action="store_true",
                   help="keep declared occurrence constraints")
    p.add_argument("--all-substitutions", action="store_true",
                   help="dispatch on all schema-possible substitutions")
    p.add_argument("--no-prune", action="store_true",
                   help="generate classes for unused components too")
    p.add_argument("--synthetic-corpus", action="store_true",
                   help="corpus is hand-made: disable tightening and bounding")
    p.add_argument("--ignore", action="append", default=[],
                   metavar="PATH", help="element path to skip, e.g. {ns}a/b")
    p.add_argument("--templates", help="custom template set directory")
    p.add_argument("--model-name", default="model")
    p.set_defaults(fn=cmd_generate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except SlimbindError as exc:
        print(exc, file=sys.stderr)
        return EXIT_SCHEMA
    except OSError as exc:
        print(f"IO_ERROR: {exc}", file=sys.stderr)
        return EXIT_SCHEMA


if __name__ == "__main__":
    sys.exit(main())
