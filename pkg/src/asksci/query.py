"""The answer path: embed the question, retrieve thresholded top-3 answers
and top-5 related exam Q&As, assemble the result, and log the question.

With the reference embedder and fixed indexes the whole path is a pure
function of (question, config) apart from the generated question id and
timestamp. Questions that fail the threshold are still logged with
answered=false so unanswerable topics can be analyzed later.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Optional

from asksci.domain import (
    QueryResult,
    ScoredAnswer,
    ScoredExamQA,
    new_question_id,
)
from asksci.errors import (
    EmbedFailure,
    EmptyField,
    EmptyQuestion,
    IndexNotLoaded,
    RemoteUnavailable,
)
from asksci.index import VectorIndex
from asksci.storage import JsonlAppender

DEFAULT_ANSWER_K = 3
DEFAULT_RELATED_K = 5
DEFAULT_THRESHOLD = 0.35
DEFAULT_NO_ANSWER_TEMPLATE = (
    "Sorry, this question could not be answered using the {subject} knowledge source."
)


@dataclass(frozen=True)
class QueryConfig:
    answer_k: int = DEFAULT_ANSWER_K
    related_k: int = DEFAULT_RELATED_K
    answer_threshold: float = DEFAULT_THRESHOLD
    related_threshold: float = DEFAULT_THRESHOLD
    no_answer_message: str = DEFAULT_NO_ANSWER_TEMPLATE

    def __post_init__(self):
        if self.answer_k < 1 or self.related_k < 1:
            raise ValueError("k values must be >= 1")
        for t in (self.answer_threshold, self.related_threshold):
            if not -1.0 <= t <= 1.0:
                raise ValueError(f"threshold {t} outside [-1, 1]")


def render_no_answer(subject: str, config: QueryConfig) -> str:
    """Cannot-answer message naming the knowledge source's subject."""
    if not subject or not subject.strip():
        raise EmptyField("subject must be non-empty")
    return config.no_answer_message.format(subject=subject)


def utcnow_iso() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%S.%fZ")


class QueryEngine:
    """Read path over the two immutable indexes plus the question log."""

    def __init__(
        self,
        answer_index: Optional[VectorIndex],
        chunk_payloads: dict,
        exam_index: Optional[VectorIndex],
        exam_payloads: dict,
        embedder,
        question_log: JsonlAppender,
        subject: str,
    ):
        self.answer_index = answer_index
        self.chunk_payloads = chunk_payloads
        self.exam_index = exam_index
        self.exam_payloads = exam_payloads
        self.embedder = embedder
        self.question_log = question_log
        self.subject = subject

    def answer_question(
        self,
        question: str,
        config: QueryConfig = QueryConfig(),
        client_id: str = "anonymous",
        country: Optional[str] = None,
    ) -> QueryResult:
        text = question.strip()
        if not text:
            raise EmptyQuestion("question is empty")
        if self.answer_index is None or self.exam_index is None:
            raise IndexNotLoaded("indexes are not loaded")

        try:
            query_emb = self.embedder.embed(text)
        except RemoteUnavailable as exc:
            raise EmbedFailure(str(exc)) from exc

        answer_hits = self.answer_index.search(
            query_emb, k=config.answer_k, threshold=config.answer_threshold
        )
        answers = tuple(
            ScoredAnswer(
                chunk_id=chunk_id,
                text=self.chunk_payloads[chunk_id]["text"],
                figures=self.chunk_payloads[chunk_id]["figures"],
                score=score,
            )
            for chunk_id, score in answer_hits
        )

        related_hits = self.exam_index.search(
            query_emb, k=config.related_k, threshold=config.related_threshold
        )
        related = tuple(
            ScoredExamQA(
                qa_id=qa_id,
                question=self.exam_payloads[qa_id]["question"],
                answer=self.exam_payloads[qa_id]["answer"],
                score=score,
            )
            for qa_id, score in related_hits
        )

        answered = bool(answers)
        result = QueryResult(
            question_id=new_question_id(),
            question_text=text,
            answers=answers,
            related=related,
            answered=answered,
            message=None if answered else render_no_answer(self.subject, config),
        )
        record = {
            "question_id": result.question_id,
            "ts": utcnow_iso(),
            "client_id": client_id,
            "question": text,
            "answered": answered,
            "answer_ids": [a.chunk_id for a in answers],
            "answer_scores": [a.score for a in answers],
            "related_ids": [r.qa_id for r in related],
            "related_scores": [r.score for r in related],
        }
        if country:
            record["country"] = country
        self.question_log.append(record)
        return result
