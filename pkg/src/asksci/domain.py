"""Shared domain types: immutable value objects used by every other module."""

from __future__ import annotations

import secrets
import time
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from asksci.errors import BadSection, EmptyField, YearOutOfRange

NORM_TOLERANCE = 1e-6
# cosine of float32 unit vectors can exceed 1 by a few ulp
SCORE_TOLERANCE = 1e-6

DEFAULT_YEAR_BOUNDS = (2000, 2020)


class Section(Enum):
    OBJECTIVES = "Objectives"
    THEORY = "Theory"
    PRACTICALS = "Practicals"


@dataclass(frozen=True)
class FigureRef:
    figure_id: str
    label: str
    caption: str
    uri: str

    def __post_init__(self):
        if not self.label.strip():
            raise EmptyField("figure label must be non-empty")
        if not self.uri or any(ch.isspace() for ch in self.uri):
            raise EmptyField(f"figure uri invalid: {self.uri!r}")

    def to_dict(self) -> dict:
        return {
            "figure_id": self.figure_id,
            "label": self.label,
            "caption": self.caption,
            "uri": self.uri,
        }


@dataclass(frozen=True)
class Paragraph:
    para_id: str
    text: str
    figures: tuple[FigureRef, ...] = ()

    def __post_init__(self):
        if not self.para_id:
            raise EmptyField("para_id must be non-empty")
        if not self.text.strip():
            raise EmptyField(f"paragraph {self.para_id}: text is empty")


@dataclass(frozen=True)
class SourceDocument:
    doc_id: str
    title: str
    subject: str
    paragraphs: tuple[Paragraph, ...]

    def __post_init__(self):
        if not self.doc_id:
            raise EmptyField("doc_id must be non-empty")


@dataclass(frozen=True)
class Chunk:
    """A retrievable answer unit of 1-3 consecutive sentences from one paragraph."""

    chunk_id: str
    source_para_id: str
    seq: int
    text: str
    sentence_count: int
    figures: tuple[FigureRef, ...] = ()

    def __post_init__(self):
        if self.sentence_count < 1:
            raise ValueError(f"chunk {self.chunk_id}: sentence_count must be >= 1")
        if self.seq < 0:
            raise ValueError(f"chunk {self.chunk_id}: seq must be >= 0")


@dataclass(frozen=True)
class ExamQA:
    qa_id: str
    year: int
    section: Section
    question: str
    answer: str


@dataclass(frozen=True)
class Embedding:
    """Unit-norm vector, or exactly all-zero for empty tokenized text."""

    dim: int
    values: np.ndarray
    model_id: str

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float32)
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)
        if arr.shape != (self.dim,):
            raise ValueError(f"embedding has {arr.shape} values, expected ({self.dim},)")
        norm = float(np.linalg.norm(arr.astype(np.float64)))
        if norm != 0.0 and abs(norm - 1.0) > NORM_TOLERANCE:
            raise ValueError(f"embedding norm {norm} outside unit tolerance")

    @property
    def is_zero(self) -> bool:
        return not self.values.any()


@dataclass(frozen=True)
class ScoredAnswer:
    chunk_id: str
    text: str
    figures: tuple[FigureRef, ...]
    score: float

    def __post_init__(self):
        if abs(self.score) > 1.0 + SCORE_TOLERANCE:
            raise ValueError(f"score {self.score} outside [-1, 1]")

    def to_dict(self) -> dict:
        return {
            "chunk_id": self.chunk_id,
            "text": self.text,
            "figures": [f.to_dict() for f in self.figures],
            "score": self.score,
        }


@dataclass(frozen=True)
class ScoredExamQA:
    qa_id: str
    question: str
    answer: str
    score: float

    def __post_init__(self):
        if abs(self.score) > 1.0 + SCORE_TOLERANCE:
            raise ValueError(f"score {self.score} outside [-1, 1]")

    def to_dict(self) -> dict:
        return {
            "qa_id": self.qa_id,
            "question": self.question,
            "answer": self.answer,
            "score": self.score,
        }


def _non_increasing(scores) -> bool:
    return all(a >= b for a, b in zip(scores, scores[1:]))


@dataclass(frozen=True)
class QueryResult:
    question_id: str
    question_text: str
    answers: tuple[ScoredAnswer, ...]
    related: tuple[ScoredExamQA, ...]
    answered: bool
    message: Optional[str] = None

    def __post_init__(self):
        if not _non_increasing([a.score for a in self.answers]):
            raise ValueError("answers must be sorted by score, non-increasing")
        if not _non_increasing([r.score for r in self.related]):
            raise ValueError("related must be sorted by score, non-increasing")
        if self.answered != bool(self.answers):
            raise ValueError("answered flag must equal (answers non-empty)")
        if (self.message is not None) == self.answered:
            raise ValueError("message must be present iff answered is false")

    def to_dict(self) -> dict:
        out = {
            "question_id": self.question_id,
            "question_text": self.question_text,
            "answers": [a.to_dict() for a in self.answers],
            "related": [r.to_dict() for r in self.related],
            "answered": self.answered,
        }
        if self.message is not None:
            out["message"] = self.message
        return out


@dataclass(frozen=True)
class VoteRecord:
    """One helpful/not-helpful judgment on one returned answer position."""

    question_id: str
    position: int
    helpful: bool
    timestamp: str
    client_id: str

    def __post_init__(self):
        if self.position not in (1, 2, 3):
            raise ValueError(f"vote position {self.position} outside [1, 3]")


def new_question_id(now_ms: Optional[int] = None) -> str:
    """Time-sortable 128-bit identifier: 48-bit millisecond timestamp + 80 random bits."""
    ts = int(time.time() * 1000) if now_ms is None else now_ms
    return f"{ts & (1 << 48) - 1:012x}{secrets.randbits(80):020x}"


def validate_exam_qa(raw: dict, year_bounds: tuple[int, int] = DEFAULT_YEAR_BOUNDS) -> ExamQA:
    """Validate a raw exam-bank record into an ExamQA.

    Raises EmptyField, BadSection, or YearOutOfRange.
    """
    qa_id = str(raw.get("qa_id", ""))
    if not qa_id.strip():
        raise EmptyField("qa_id is blank")
    question = raw.get("question", "")
    if not isinstance(question, str) or not question.strip():
        raise EmptyField(f"{qa_id}: question is blank")
    answer = raw.get("answer", "")
    if not isinstance(answer, str) or not answer.strip():
        raise EmptyField(f"{qa_id}: answer is blank")
    section_raw = raw.get("section")
    try:
        section = Section(section_raw)
    except ValueError:
        valid = ", ".join(s.value for s in Section)
        raise BadSection(f"{qa_id}: section {section_raw!r} not one of {valid}") from None
    year = raw.get("year")
    if not isinstance(year, int) or isinstance(year, bool):
        raise YearOutOfRange(f"{qa_id}: year {year!r} is not an integer")
    lo, hi = year_bounds
    if not lo <= year <= hi:
        raise YearOutOfRange(f"{qa_id}: year {year} outside [{lo}, {hi}]")
    return ExamQA(qa_id=qa_id, year=year, section=section, question=question, answer=answer)
