"""Ingestion: parse textbook and exam-bank files, chunk, embed, and emit
search indexes plus payload stores.

Input schemas are documented with examples under docs/formats/. Schema
errors carry the path of the offending element. Given the reference
embedder, two runs over identical inputs produce byte-identical index and
payload files; only the corpus manifest carries a timestamp, which is why
it lives in a separate file.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from asksci.domain import (
    ExamQA,
    FigureRef,
    Paragraph,
    SourceDocument,
    validate_exam_qa,
)
from asksci.embedder import EmbedderConfig, make_embedder
from asksci.errors import (
    AskSciError,
    DuplicateId,
    EmptyCorpus,
    IoFailure,
    SchemaViolation,
)
from asksci.index import IndexEntry, VectorIndex, build_index, save_index
from asksci.storage import write_jsonl
from asksci.textproc import chunk_paragraph

ANSWER_INDEX_FILE = "answers.idx"
ANSWER_PAYLOADS_FILE = "answers.payload.jsonl"
EXAM_INDEX_FILE = "exams.idx"
EXAM_PAYLOADS_FILE = "exams.payload.jsonl"
CORPUS_MANIFEST_FILE = "corpus_manifest.json"
EXAM_MANIFEST_FILE = "exam_manifest.json"


@dataclass(frozen=True)
class CorpusManifest:
    subject: str
    documents: int
    paragraphs: int
    chunks: int
    figures: int
    model_id: str
    built_at: str

    def to_dict(self) -> dict:
        return {
            "subject": self.subject,
            "documents": self.documents,
            "paragraphs": self.paragraphs,
            "chunks": self.chunks,
            "figures": self.figures,
            "model_id": self.model_id,
            "built_at": self.built_at,
        }


@dataclass(frozen=True)
class ExamBankManifest:
    records: int
    sections: dict
    model_id: str
    built_at: str

    def to_dict(self) -> dict:
        return {
            "records": self.records,
            "sections": self.sections,
            "model_id": self.model_id,
            "built_at": self.built_at,
        }


def _utcnow() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _require(condition: bool, path: str, message: str) -> None:
    if not condition:
        raise SchemaViolation(f"{path}: {message}")


def _parse_figure(raw: dict, path: str) -> FigureRef:
    _require(isinstance(raw, dict), path, "figure must be an object")
    for key in ("figure_id", "label", "uri"):
        _require(isinstance(raw.get(key), str) and raw[key] != "", f"{path}.{key}", "missing or empty")
    try:
        return FigureRef(
            figure_id=raw["figure_id"],
            label=raw["label"],
            caption=raw.get("caption", ""),
            uri=raw["uri"],
        )
    except AskSciError as exc:
        raise SchemaViolation(f"{path}: {exc}") from exc


def parse_textbook(path: str) -> tuple[str, list[SourceDocument]]:
    """Parse and validate a textbook-corpus JSON file."""
    try:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaViolation(f"{path}: not valid JSON: {exc}") from exc

    _require(isinstance(data, dict), "$", "top level must be an object")
    subject = data.get("subject")
    _require(isinstance(subject, str) and subject.strip() != "", "$.subject", "missing or empty")
    documents = data.get("documents")
    _require(isinstance(documents, list), "$.documents", "must be a list")
    if not documents:
        raise EmptyCorpus(f"{path}: corpus contains no documents")

    seen_doc_ids: set[str] = set()
    seen_para_ids: set[str] = set()
    parsed_docs = []
    for d, doc in enumerate(documents):
        dpath = f"$.documents[{d}]"
        _require(isinstance(doc, dict), dpath, "document must be an object")
        doc_id = doc.get("doc_id")
        _require(isinstance(doc_id, str) and doc_id != "", f"{dpath}.doc_id", "missing or empty")
        if doc_id in seen_doc_ids:
            raise SchemaViolation(f"{dpath}.doc_id: duplicate doc_id {doc_id!r}")
        seen_doc_ids.add(doc_id)
        title = doc.get("title", "")
        _require(isinstance(title, str), f"{dpath}.title", "must be a string")
        paragraphs = doc.get("paragraphs")
        _require(isinstance(paragraphs, list) and len(paragraphs) > 0, f"{dpath}.paragraphs",
                 "must be a non-empty list")

        parsed_paras = []
        for p, para in enumerate(paragraphs):
            ppath = f"{dpath}.paragraphs[{p}]"
            _require(isinstance(para, dict), ppath, "paragraph must be an object")
            para_id = para.get("para_id")
            _require(isinstance(para_id, str) and para_id != "", f"{ppath}.para_id", "missing or empty")
            if para_id in seen_para_ids:
                raise SchemaViolation(f"{ppath}.para_id: duplicate para_id {para_id!r}")
            seen_para_ids.add(para_id)
            text = para.get("text")
            _require(isinstance(text, str) and text.strip() != "", f"{ppath}.text", "missing or empty")
            figures_raw = para.get("figures", [])
            _require(isinstance(figures_raw, list), f"{ppath}.figures", "must be a list")
            figures = tuple(
                _parse_figure(fig, f"{ppath}.figures[{i}]") for i, fig in enumerate(figures_raw)
            )
            parsed_paras.append(Paragraph(para_id=para_id, text=text, figures=figures))

        parsed_docs.append(
            SourceDocument(doc_id=doc_id, title=title, subject=subject, paragraphs=tuple(parsed_paras))
        )
    return subject, parsed_docs


@dataclass
class TextbookIngest:
    index: VectorIndex
    payloads: list[dict]
    manifest: CorpusManifest


def ingest_textbook(path: str, config: EmbedderConfig) -> TextbookIngest:
    """Chunk and embed a textbook corpus into a search-ready answer index."""
    subject, documents = parse_textbook(path)
    embedder = make_embedder(config)

    chunks = []
    paragraph_count = 0
    figure_count = 0
    for doc in documents:
        for para in doc.paragraphs:
            paragraph_count += 1
            figure_count += len(para.figures)
            chunks.extend(chunk_paragraph(para))

    embeddings = embedder.embed_batch([c.text for c in chunks])
    entries = [
        IndexEntry(entry_id=c.chunk_id, vector=emb, payload_kind="AnswerChunk")
        for c, emb in zip(chunks, embeddings)
    ]
    index = build_index(entries)
    payloads = [
        {
            "chunk_id": c.chunk_id,
            "text": c.text,
            "source_para_id": c.source_para_id,
            "figures": [f.to_dict() for f in c.figures],
        }
        for c in chunks
    ]
    manifest = CorpusManifest(
        subject=subject,
        documents=len(documents),
        paragraphs=paragraph_count,
        chunks=len(chunks),
        figures=figure_count,
        model_id=embedder.model_id,
        built_at=_utcnow(),
    )
    return TextbookIngest(index=index, payloads=payloads, manifest=manifest)


def parse_exam_bank(path: str) -> list[ExamQA]:
    """Parse and validate an exam-bank JSONL file."""
    records = []
    seen: set[str] = set()
    try:
        with open(path, encoding="utf-8") as f:
            lines = f.readlines()
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc

    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            raw = json.loads(line)
        except json.JSONDecodeError as exc:
            raise SchemaViolation(f"{path}:{lineno}: not valid JSON: {exc}") from exc
        try:
            qa = validate_exam_qa(raw)
        except AskSciError as exc:
            raise SchemaViolation(f"{path}:{lineno}: {exc}") from exc
        if qa.qa_id in seen:
            raise DuplicateId(f"{path}:{lineno}: duplicate qa_id {qa.qa_id!r}")
        seen.add(qa.qa_id)
        records.append(qa)
    if not records:
        raise EmptyCorpus(f"{path}: exam bank contains no records")
    return records


@dataclass
class ExamBankIngest:
    index: VectorIndex
    payloads: list[dict]
    manifest: ExamBankManifest


def ingest_exam_bank(path: str, config: EmbedderConfig) -> ExamBankIngest:
    """Embed exam QUESTIONS (answers stay payload-only) into the exam index."""
    records = parse_exam_bank(path)
    embedder = make_embedder(config)
    embeddings = embedder.embed_batch([qa.question for qa in records])
    entries = [
        IndexEntry(entry_id=qa.qa_id, vector=emb, payload_kind="ExamQuestion")
        for qa, emb in zip(records, embeddings)
    ]
    index = build_index(entries)
    payloads = [
        {
            "qa_id": qa.qa_id,
            "question": qa.question,
            "answer": qa.answer,
            "year": qa.year,
            "section": qa.section.value,
        }
        for qa in records
    ]
    sections: dict[str, int] = {}
    for qa in records:
        sections[qa.section.value] = sections.get(qa.section.value, 0) + 1
    manifest = ExamBankManifest(
        records=len(records),
        sections=sections,
        model_id=embedder.model_id,
        built_at=_utcnow(),
    )
    return ExamBankIngest(index=index, payloads=payloads, manifest=manifest)


def write_textbook_artifacts(result: TextbookIngest, out_dir: str) -> dict:
    """Write index, payload store, and manifest; returns the file map."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_index(result.index, str(out / ANSWER_INDEX_FILE))
    write_jsonl(str(out / ANSWER_PAYLOADS_FILE), result.payloads)
    with open(out / CORPUS_MANIFEST_FILE, "w", encoding="utf-8") as f:
        json.dump(result.manifest.to_dict(), f, indent=2)
        f.write("\n")
    return {
        "index": str(out / ANSWER_INDEX_FILE),
        "payloads": str(out / ANSWER_PAYLOADS_FILE),
        "manifest": str(out / CORPUS_MANIFEST_FILE),
    }


def write_exam_artifacts(result: ExamBankIngest, out_dir: str) -> dict:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_index(result.index, str(out / EXAM_INDEX_FILE))
    write_jsonl(str(out / EXAM_PAYLOADS_FILE), result.payloads)
    with open(out / EXAM_MANIFEST_FILE, "w", encoding="utf-8") as f:
        json.dump(result.manifest.to_dict(), f, indent=2)
        f.write("\n")
    return {
        "index": str(out / EXAM_INDEX_FILE),
        "payloads": str(out / EXAM_PAYLOADS_FILE),
        "manifest": str(out / EXAM_MANIFEST_FILE),
    }
