"""Deterministic sentence segmentation and fixed-size chunking of paragraphs.

The splitter is rule-based so that identical input text yields byte-identical
chunks on every run and platform: split after '.', '?' or '!' when followed
by whitespace and then an uppercase letter or digit, except when the token
ending at the terminator is one of a fixed abbreviation list.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from asksci.domain import Chunk, FigureRef, Paragraph
from asksci.errors import EmptyText

TERMINATORS = ".?!"

# Matched case-sensitively, at a word boundary, against the text ending at
# the terminator. Case matters: "No." is an abbreviation, "no." is not.
ABBREVIATIONS = ("e.g.", "i.e.", "etc.", "Fig.", "Dr.", "Mr.", "Mrs.", "St.", "No.")

DEFAULT_GROUP_SIZE = 3


@dataclass(frozen=True)
class SentenceSpan:
    """Half-open [start, end) character span of one sentence within a text."""

    start: int
    end: int
    text: str


def normalize_whitespace(text: str) -> str:
    """Collapse whitespace runs to single spaces and trim the ends."""
    return " ".join(text.split())


def _is_abbreviation(text: str, term_idx: int) -> bool:
    """True when the token ending at text[term_idx] ('.') is a listed abbreviation."""
    for abbr in ABBREVIATIONS:
        start = term_idx + 1 - len(abbr)
        if start < 0 or text[start:term_idx + 1] != abbr:
            continue
        if start == 0 or not text[start - 1].isalnum():
            return True
    return False


def _boundaries(text: str) -> list[int]:
    """Indices just past each sentence terminator that ends a sentence."""
    out = []
    n = len(text)
    for i, ch in enumerate(text):
        if ch not in TERMINATORS:
            continue
        j = i + 1
        if j >= n or not text[j].isspace():
            continue
        while j < n and text[j].isspace():
            j += 1
        if j >= n or not (text[j].isupper() or text[j].isdigit()):
            continue
        if ch == "." and _is_abbreviation(text, i):
            continue
        out.append(i + 1)
    return out


def split_sentences(text: str) -> list[SentenceSpan]:
    """Split text into ordered, non-overlapping sentence spans.

    Every non-whitespace character of the input lies in exactly one span.
    Raises EmptyText when the input is whitespace-only.
    """
    if not text.strip():
        raise EmptyText("cannot split empty text")
    spans = []
    seg_start = 0
    for cut in _boundaries(text) + [len(text)]:
        segment = text[seg_start:cut]
        stripped = segment.strip()
        if stripped:
            start = seg_start + (len(segment) - len(segment.lstrip()))
            end = start + len(stripped)
            spans.append(SentenceSpan(start=start, end=end, text=text[start:end]))
        seg_start = cut
    return spans


_NUMBER_IN_LABEL = re.compile(r"(\d+(?:\.\d+)*[a-z]?)\s*$")


def _mention_pattern(figure: FigureRef) -> re.Pattern:
    """Regex matching an in-text mention of the figure's label."""
    m = _NUMBER_IN_LABEL.search(figure.label.strip())
    if m:
        num = re.escape(m.group(1))
        # guard against matching "2.1" inside "2.11" or "2.1.5"
        return re.compile(rf"[Ff]ig(?:ure)?\.?\s*{num}(?![0-9a-zA-Z])(?!\.[0-9])")
    return re.compile(re.escape(figure.label.strip()))


def attach_figures(figures: tuple[FigureRef, ...], chunk_texts: list[str]) -> list[tuple[FigureRef, ...]]:
    """Assign each figure to the chunks that mention its label.

    A figure mentioned nowhere attaches to the first chunk, so every figure
    of the paragraph lands on at least one chunk.
    """
    assigned: list[list[FigureRef]] = [[] for _ in chunk_texts]
    for fig in figures:
        pattern = _mention_pattern(fig)
        hits = [i for i, t in enumerate(chunk_texts) if pattern.search(t)]
        if not hits:
            hits = [0]
        for i in hits:
            assigned[i].append(fig)
    return [tuple(figs) for figs in assigned]


def chunk_paragraph(para: Paragraph, group_size: int = DEFAULT_GROUP_SIZE) -> list[Chunk]:
    """Split a paragraph into chunks of up to group_size consecutive sentences.

    Only the final chunk may hold fewer than group_size sentences. Chunk ids
    are "<para_id>:<seq>". Whitespace is normalized before splitting, so the
    chunk texts joined with single spaces reproduce the sentence sequence.
    """
    if group_size < 1:
        raise ValueError("group_size must be >= 1")
    text = normalize_whitespace(para.text)
    spans = split_sentences(text)

    groups = [spans[i:i + group_size] for i in range(0, len(spans), group_size)]
    chunk_texts = [text[g[0].start:g[-1].end] for g in groups]
    figures_per_chunk = attach_figures(para.figures, chunk_texts)

    return [
        Chunk(
            chunk_id=f"{para.para_id}:{seq}",
            source_para_id=para.para_id,
            seq=seq,
            text=chunk_text,
            sentence_count=len(group),
            figures=figures_per_chunk[seq],
        )
        for seq, (group, chunk_text) in enumerate(zip(groups, chunk_texts))
    ]
