"""Append-only JSONL logs and payload stores.

One JSON object per line, UTF-8. Appends go through a lock so concurrent
request handlers never interleave partial lines; readers see a consistent
prefix of the log.
"""

from __future__ import annotations

import json
import threading
from pathlib import Path

from asksci.domain import FigureRef
from asksci.errors import IoFailure


def dumps_record(record: dict) -> str:
    return json.dumps(record, ensure_ascii=False, separators=(",", ":"))


class JsonlAppender:
    """Serialized appender for one log file; creates the file on first append."""

    def __init__(self, path: str):
        self.path = str(path)
        self._lock = threading.Lock()
        Path(self.path).parent.mkdir(parents=True, exist_ok=True)

    def append(self, record: dict) -> None:
        line = dumps_record(record) + "\n"
        with self._lock:
            with open(self.path, "a", encoding="utf-8") as f:
                f.write(line)


def read_jsonl(path: str) -> list[dict]:
    """All records of a JSONL file; a missing file reads as empty."""
    records = []
    try:
        with open(path, encoding="utf-8") as f:
            for lineno, line in enumerate(f, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    records.append(json.loads(line))
                except json.JSONDecodeError as exc:
                    raise IoFailure(f"{path}:{lineno}: malformed log line: {exc}") from exc
    except FileNotFoundError:
        return []
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    return records


def write_jsonl(path: str, records: list[dict]) -> None:
    """Write a whole JSONL file deterministically (used for payload stores)."""
    try:
        with open(path, "w", encoding="utf-8") as f:
            for record in records:
                f.write(dumps_record(record) + "\n")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def figures_from_dicts(raw: list) -> tuple[FigureRef, ...]:
    return tuple(
        FigureRef(
            figure_id=f["figure_id"],
            label=f["label"],
            caption=f.get("caption", ""),
            uri=f["uri"],
        )
        for f in raw
    )


def load_chunk_payloads(path: str) -> dict[str, dict]:
    """chunk_id -> {text, source_para_id, figures} from an answer payload store."""
    out = {}
    for rec in read_jsonl(path):
        out[rec["chunk_id"]] = {
            "text": rec["text"],
            "source_para_id": rec["source_para_id"],
            "figures": figures_from_dicts(rec.get("figures", [])),
        }
    return out


def load_exam_payloads(path: str) -> dict[str, dict]:
    """qa_id -> {question, answer, year, section} from an exam payload store."""
    out = {}
    for rec in read_jsonl(path):
        out[rec["qa_id"]] = {
            "question": rec["question"],
            "answer": rec["answer"],
            "year": rec["year"],
            "section": rec["section"],
        }
    return out
