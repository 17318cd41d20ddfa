"""Command line entry point.

Subcommands: ingest-textbook, ingest-exams, serve, ask, metrics.
ASKSCI_CONFIG supplies the config path when --config is absent;
ASKSCI_LISTEN overrides the configured listen address, and --listen
overrides both.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from asksci.embedder import EmbedderConfig, apply_env_overrides, make_embedder
from asksci.errors import AskSciError
from asksci.feedback import compute_report
from asksci.index import load_index
from asksci.ingest import (
    ingest_exam_bank,
    ingest_textbook,
    write_exam_artifacts,
    write_textbook_artifacts,
)
from asksci.query import QueryEngine
from asksci.service import ALL_TIME_WINDOW, load_service_config
from asksci.storage import (
    JsonlAppender,
    load_chunk_payloads,
    load_exam_payloads,
    read_jsonl,
)


def _embedder_config(args) -> EmbedderConfig:
    config = EmbedderConfig(
        provider=args.provider,
        dim=args.dim,
        remote_endpoint=args.endpoint,
        timeout_ms=args.timeout_ms,
    )
    return apply_env_overrides(config)


def _config_path(args) -> str:
    path = args.config or os.environ.get("ASKSCI_CONFIG")
    if not path:
        raise SystemExit("no config: pass --config or set ASKSCI_CONFIG")
    return path


def cmd_ingest_textbook(args) -> int:
    result = ingest_textbook(args.input, _embedder_config(args))
    files = write_textbook_artifacts(result, args.out)
    manifest = result.manifest
    print(
        f"ingested {manifest.documents} documents, {manifest.paragraphs} paragraphs, "
        f"{manifest.chunks} chunks ({manifest.figures} figures) with {manifest.model_id}"
    )
    for name, path in sorted(files.items()):
        print(f"  {name}: {path}")
    return 0


def cmd_ingest_exams(args) -> int:
    result = ingest_exam_bank(args.input, _embedder_config(args))
    files = write_exam_artifacts(result, args.out)
    manifest = result.manifest
    sections = ", ".join(f"{k}={v}" for k, v in sorted(manifest.sections.items()))
    print(f"ingested {manifest.records} exam records ({sections}) with {manifest.model_id}")
    for name, path in sorted(files.items()):
        print(f"  {name}: {path}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from asksci.service import create_app

    config = load_service_config(_config_path(args))
    listen = args.listen or os.environ.get("ASKSCI_LISTEN") or config.listen
    host, _, port = listen.rpartition(":")
    if not host or not port.isdigit():
        raise SystemExit(f"bad listen address {listen!r}, expected host:port")
    app = create_app(config)
    uvicorn.run(app, host=host, port=int(port), log_level="info")
    return 0


def _build_engine(config) -> QueryEngine:
    return QueryEngine(
        answer_index=load_index(config.answers_index),
        chunk_payloads=load_chunk_payloads(config.answers_payloads),
        exam_index=load_index(config.exams_index),
        exam_payloads=load_exam_payloads(config.exams_payloads),
        embedder=make_embedder(config.embedder),
        question_log=JsonlAppender(config.questions_log),
        subject=config.subject,
    )


def cmd_ask(args) -> int:
    config = load_service_config(_config_path(args))
    engine = _build_engine(config)
    result = engine.answer_question(
        args.question, config=config.query, client_id="cli"
    )
    if args.json:
        print(json.dumps(result.to_dict(), indent=2, ensure_ascii=False))
        return 0
    if not result.answered:
        print(result.message)
    for rank, answer in enumerate(result.answers, start=1):
        print(f"[{rank}] {100 * answer.score:.1f}%  {answer.text}")
        for fig in answer.figures:
            print(f"      figure: {fig.label} ({fig.uri})")
    if result.related:
        print("related past exam questions:")
        for qa in result.related:
            print(f"  - {100 * qa.score:.1f}%  {qa.question}")
            print(f"    {qa.answer}")
    return 0


def cmd_metrics(args) -> int:
    config = load_service_config(_config_path(args))
    questions = read_jsonl(config.questions_log)
    votes = read_jsonl(config.votes_log)
    window = (args.start or ALL_TIME_WINDOW[0], args.end or ALL_TIME_WINDOW[1])
    report = compute_report(questions, votes, window, position_one_only=args.strict_top1)
    if args.json:
        print(json.dumps(report.to_dict(), indent=2))
    else:
        print(report.to_table())
    return 0


def _add_embedder_args(parser) -> None:
    parser.add_argument("--dim", type=int, default=256, help="embedding dimension")
    parser.add_argument(
        "--provider", choices=["reference", "remote"], default="reference"
    )
    parser.add_argument("--endpoint", default=None, help="remote embedder URL")
    parser.add_argument("--timeout-ms", type=int, default=2000)


def _add_config_arg(parser) -> None:
    parser.add_argument("--config", default=None, help="service config JSON path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="asksci",
        description="Question answering over an ingested science textbook and past exam bank.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest-textbook", help="build the answer index from a textbook JSON file")
    p.add_argument("input")
    p.add_argument("--out", required=True, help="output directory for index artifacts")
    _add_embedder_args(p)
    p.set_defaults(func=cmd_ingest_textbook)

    p = sub.add_parser("ingest-exams", help="build the related-questions index from an exam JSONL file")
    p.add_argument("input")
    p.add_argument("--out", required=True)
    _add_embedder_args(p)
    p.set_defaults(func=cmd_ingest_exams)

    p = sub.add_parser("serve", help="run the HTTP API")
    _add_config_arg(p)
    p.add_argument("--listen", default=None, help="host:port (overrides config and ASKSCI_LISTEN)")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("ask", help="one-shot question from the terminal")
    p.add_argument("question")
    _add_config_arg(p)
    p.add_argument("--json", action="store_true", help="print the raw result record")
    p.set_defaults(func=cmd_ask)

    p = sub.add_parser("metrics", help="offline accuracy/usage report from the logs")
    _add_config_arg(p)
    p.add_argument("--start", default=None, help="window start, ISO-8601 UTC")
    p.add_argument("--end", default=None, help="window end, ISO-8601 UTC")
    p.add_argument("--json", action="store_true")
    p.add_argument(
        "--strict-top1",
        action="store_true",
        help="restrict top-1 accuracy to votes on position 1",
    )
    p.set_defaults(func=cmd_metrics)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except AskSciError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
