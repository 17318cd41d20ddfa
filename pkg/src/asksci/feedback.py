"""Helpful/not-helpful votes and the accuracy metrics computed from them.

Two different denominators, by design:

- top-1 accuracy is vote-level: helpful votes over all votes, as if each
  voted answer had been the only one returned.
- top-3 accuracy is question-level: of the questions that received any
  vote, the fraction where at least one answer was rated helpful.

So top1_n counts voted answers while top3_n counts voted questions, and
top1_n >= top3_n whenever every voted question has at least one vote.
A strict variant that restricts top-1 to position-1 votes is available
behind a labeled report option; it is not the default.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Optional

from asksci.domain import VoteRecord
from asksci.errors import BadWindow, PositionOutOfRange, UnknownQuestion
from asksci.storage import JsonlAppender, read_jsonl

UNKNOWN_COUNTRY = "unknown"


@dataclass(frozen=True)
class MetricsReport:
    top1_accuracy: Optional[float]
    top1_n: int
    top3_accuracy: Optional[float]
    top3_n: int
    total_questions: int
    unique_clients: int
    countries: dict
    window: tuple

    def to_dict(self) -> dict:
        return {
            "top1_accuracy": self.top1_accuracy,
            "top1_n": self.top1_n,
            "top3_accuracy": self.top3_accuracy,
            "top3_n": self.top3_n,
            "total_questions": self.total_questions,
            "unique_clients": self.unique_clients,
            "countries": dict(self.countries),
            "window": {"start": self.window[0], "end": self.window[1]},
        }

    def to_table(self) -> str:
        """Plain-text rendering for terminal use."""

        def pct(value):
            return "n/a" if value is None else f"{100.0 * value:.1f}%"

        rows = [
            ("window", f"{self.window[0]} .. {self.window[1]}"),
            ("top-1 accuracy", f"{pct(self.top1_accuracy)} (n={self.top1_n})"),
            ("top-3 accuracy", f"{pct(self.top3_accuracy)} (n={self.top3_n})"),
            ("questions", str(self.total_questions)),
            ("unique clients", str(self.unique_clients)),
            ("countries", str(len(self.countries))),
        ]
        width = max(len(name) for name, _ in rows)
        return "\n".join(f"{name.ljust(width)}  {value}" for name, value in rows)


def parse_instant(value: str) -> datetime:
    """ISO-8601 instant to an aware UTC datetime; trailing Z accepted."""
    dt = datetime.fromisoformat(value.replace("Z", "+00:00"))
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


class FeedbackStore:
    """Vote intake gated on the question log.

    A vote is accepted only for a question that was actually asked, and only
    for a position within the answers that question got back. Known question
    ids and their answer counts live in memory; construct with
    from_question_log to seed them from a persisted log.
    """

    def __init__(self, vote_log: JsonlAppender):
        self.vote_log = vote_log
        self._answer_counts: dict[str, int] = {}

    @classmethod
    def from_question_log(cls, vote_log: JsonlAppender, questions_path) -> "FeedbackStore":
        store = cls(vote_log)
        for rec in read_jsonl(questions_path):
            store.register_question(rec["question_id"], len(rec["answer_ids"]))
        return store

    def register_question(self, question_id: str, n_answers: int) -> None:
        self._answer_counts[question_id] = n_answers

    def record_vote(self, vote: VoteRecord) -> None:
        n_answers = self._answer_counts.get(vote.question_id)
        if n_answers is None:
            raise UnknownQuestion(f"no question with id {vote.question_id}")
        if vote.position > n_answers:
            raise PositionOutOfRange(
                f"position {vote.position} but question got {n_answers} answers"
            )
        self.vote_log.append(
            {
                "ts": vote.timestamp,
                "question_id": vote.question_id,
                "position": vote.position,
                "helpful": vote.helpful,
                "client_id": vote.client_id,
            }
        )


def effective_votes(vote_records: list[dict]) -> list[dict]:
    """Collapse re-votes: the last record per (question_id, position, client_id)
    wins, in log order."""
    final: dict[tuple, dict] = {}
    for rec in vote_records:
        final[(rec["question_id"], rec["position"], rec["client_id"])] = rec
    return list(final.values())


def compute_top1(
    vote_records: list[dict], position_one_only: bool = False
) -> tuple[Optional[float], int]:
    """Vote-level accuracy over effective votes.

    position_one_only restricts to votes on the first answer; the default
    counts every voted answer.
    """
    votes = effective_votes(vote_records)
    if position_one_only:
        votes = [v for v in votes if v["position"] == 1]
    if not votes:
        return None, 0
    helpful = sum(1 for v in votes if v["helpful"])
    return helpful / len(votes), len(votes)


def compute_top3(vote_records: list[dict]) -> tuple[Optional[float], int]:
    """Question-level accuracy: of questions with >=1 effective vote, the
    fraction with >=1 helpful vote."""
    voted: dict[str, bool] = {}
    for rec in effective_votes(vote_records):
        qid = rec["question_id"]
        voted[qid] = voted.get(qid, False) or bool(rec["helpful"])
    if not voted:
        return None, 0
    with_helpful = sum(1 for got_one in voted.values() if got_one)
    return with_helpful / len(voted), len(voted)


def _in_window(ts: str, start: datetime, end: datetime) -> bool:
    instant = parse_instant(ts)
    return start <= instant <= end


def compute_report(
    question_records: list[dict],
    vote_records: list[dict],
    window: tuple[str, str],
    position_one_only: bool = False,
) -> MetricsReport:
    """Metrics over both logs filtered to the window (inclusive bounds).

    Each log is filtered by its own timestamps. Unique clients and countries
    come from the windowed question records; a client's country is the code
    on its first windowed question, "unknown" when absent.
    """
    start = parse_instant(window[0])
    end = parse_instant(window[1])
    if start > end:
        raise BadWindow(f"window start {window[0]} after end {window[1]}")

    questions = [q for q in question_records if _in_window(q["ts"], start, end)]
    votes = [v for v in vote_records if _in_window(v["ts"], start, end)]

    top1_accuracy, top1_n = compute_top1(votes, position_one_only=position_one_only)
    top3_accuracy, top3_n = compute_top3(votes)

    client_country: dict[str, str] = {}
    for q in questions:
        cid = q["client_id"]
        if cid not in client_country:
            client_country[cid] = q.get("country") or UNKNOWN_COUNTRY

    countries: dict[str, int] = {}
    for code in client_country.values():
        countries[code] = countries.get(code, 0) + 1

    return MetricsReport(
        top1_accuracy=top1_accuracy,
        top1_n=top1_n,
        top3_accuracy=top3_accuracy,
        top3_n=top3_n,
        total_questions=len(questions),
        unique_clients=len(client_country),
        countries=countries,
        window=(window[0], window[1]),
    )
