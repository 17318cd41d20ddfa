import json

import pytest

from asksci.domain import Embedding
from asksci.embedder import EmbedderConfig
from asksci.errors import DuplicateId, EmptyCorpus, SchemaViolation
from asksci.ingest import (
    ingest_exam_bank,
    ingest_textbook,
    parse_textbook,
    write_exam_artifacts,
    write_textbook_artifacts,
)

CONFIG = EmbedderConfig(dim=64)


@pytest.fixture(scope="module")
def textbook_path(fixtures_dir):
    return str(fixtures_dir / "textbook.json")


@pytest.fixture(scope="module")
def exams_path(fixtures_dir):
    return str(fixtures_dir / "exams.jsonl")


def test_textbook_chunk_counts(textbook_path):
    """Sentence counts 7,3,2,4,1 chunk to 3+1+1+2+1 = 8 under the ceil(n/3) rule."""
    result = ingest_textbook(textbook_path, CONFIG)
    assert result.manifest.documents == 2
    assert result.manifest.paragraphs == 5
    assert result.manifest.chunks == 8
    assert result.manifest.figures == 2
    assert result.manifest.subject == "integrated-science"
    assert result.index.entry_count == 8
    assert len(result.payloads) == 8


def test_figure_lands_on_mentioning_chunk(textbook_path):
    result = ingest_textbook(textbook_path, CONFIG)
    by_id = {p["chunk_id"]: p for p in result.payloads}
    # "Figure 1.2" appears in sentence 5 of tb1-p1, i.e. the second chunk
    carrying = [cid for cid, p in by_id.items() if any(f["label"] == "Figure 1.2" for f in p["figures"])]
    assert carrying == ["tb1-p1:1"]
    assert "Figure 1.2" in by_id["tb1-p1:1"]["text"]


def test_every_chunk_has_payload_and_index_entry(textbook_path):
    result = ingest_textbook(textbook_path, CONFIG)
    assert sorted(p["chunk_id"] for p in result.payloads) == sorted(result.index.ids)


def test_document_with_zero_paragraphs_rejected(tmp_path, textbook_path):
    data = json.load(open(textbook_path))
    data["documents"][1]["paragraphs"] = []
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(data))
    with pytest.raises(SchemaViolation) as err:
        parse_textbook(str(bad))
    assert "$.documents[1].paragraphs" in str(err.value)


def test_empty_corpus_rejected(tmp_path):
    bad = tmp_path / "empty.json"
    bad.write_text(json.dumps({"subject": "integrated-science", "documents": []}))
    with pytest.raises(EmptyCorpus):
        parse_textbook(str(bad))


def test_duplicate_para_id_rejected(tmp_path, textbook_path):
    data = json.load(open(textbook_path))
    data["documents"][0]["paragraphs"][1]["para_id"] = "tb1-p1"
    bad = tmp_path / "dup.json"
    bad.write_text(json.dumps(data))
    with pytest.raises(SchemaViolation) as err:
        parse_textbook(str(bad))
    assert "para_id" in str(err.value)


def test_exam_bank_counts_and_metadata(exams_path):
    result = ingest_exam_bank(exams_path, CONFIG)
    assert result.index.entry_count == 3
    assert result.manifest.records == 3
    assert result.manifest.sections == {"Objectives": 1, "Theory": 1, "Practicals": 1}
    payload = {p["qa_id"]: p for p in result.payloads}
    assert payload["wassce-2003-obj-12"]["year"] == 2003
    assert payload["wassce-2020-prac-02"]["section"] == "Practicals"


def test_exam_self_retrieval_through_pipeline(exams_path):
    from asksci.embedder import make_embedder

    result = ingest_exam_bank(exams_path, CONFIG)
    embedder = make_embedder(CONFIG)
    query = embedder.embed("State the function of the mitochondria in a cell.")
    hits = result.index.search(query, k=1, threshold=0.0)
    assert hits[0][0] == "wassce-2020-prac-02"
    assert hits[0][1] == pytest.approx(1.0, abs=1e-6)


def test_exam_bad_section_rejected(tmp_path):
    bad = tmp_path / "bad.jsonl"
    bad.write_text(
        '{"qa_id": "x1", "year": 2010, "section": "Oral", "question": "Q?", "answer": "A"}\n'
    )
    with pytest.raises(SchemaViolation) as err:
        ingest_exam_bank(str(bad), CONFIG)
    assert "Oral" in str(err.value)


def test_exam_duplicate_qa_id_rejected(tmp_path, exams_path):
    lines = open(exams_path).read().strip().splitlines()
    bad = tmp_path / "dup.jsonl"
    bad.write_text(lines[0] + "\n" + lines[0] + "\n")
    with pytest.raises(DuplicateId):
        ingest_exam_bank(str(bad), CONFIG)


def test_exam_empty_file_rejected(tmp_path):
    empty = tmp_path / "none.jsonl"
    empty.write_text("\n")
    with pytest.raises(EmptyCorpus):
        ingest_exam_bank(str(empty), CONFIG)


def test_ingestion_is_idempotent(tmp_path, textbook_path, exams_path):
    """Two runs over identical inputs produce byte-identical index and payload files."""
    run1 = tmp_path / "run1"
    run2 = tmp_path / "run2"
    files1 = write_textbook_artifacts(ingest_textbook(textbook_path, CONFIG), str(run1))
    files2 = write_textbook_artifacts(ingest_textbook(textbook_path, CONFIG), str(run2))
    assert open(files1["index"], "rb").read() == open(files2["index"], "rb").read()
    assert open(files1["payloads"], "rb").read() == open(files2["payloads"], "rb").read()

    efiles1 = write_exam_artifacts(ingest_exam_bank(exams_path, CONFIG), str(run1))
    efiles2 = write_exam_artifacts(ingest_exam_bank(exams_path, CONFIG), str(run2))
    assert open(efiles1["index"], "rb").read() == open(efiles2["index"], "rb").read()
    assert open(efiles1["payloads"], "rb").read() == open(efiles2["payloads"], "rb").read()


def test_exam_index_embeds_question_text_only(tmp_path, exams_path):
    """Changing only an answer leaves the exam index file byte-identical."""
    original = open(exams_path).read()
    changed = original.replace("Carbon dioxide", "Oxygen is wrong but different text")
    assert changed != original
    a_path = tmp_path / "a.jsonl"
    b_path = tmp_path / "b.jsonl"
    a_path.write_text(original)
    b_path.write_text(changed)
    files_a = write_exam_artifacts(ingest_exam_bank(str(a_path), CONFIG), str(tmp_path / "outa"))
    files_b = write_exam_artifacts(ingest_exam_bank(str(b_path), CONFIG), str(tmp_path / "outb"))
    assert open(files_a["index"], "rb").read() == open(files_b["index"], "rb").read()
    # payloads do differ, because the answer is payload
    assert open(files_a["payloads"], "rb").read() != open(files_b["payloads"], "rb").read()
