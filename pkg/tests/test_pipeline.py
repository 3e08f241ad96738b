import pytest

from p2baudit.common import Binary
from p2baudit.corpus import Paragraph, PlatformType, load_manifest
from p2baudit.errors import KeyMismatch, ProviderUnavailable
from p2baudit.evaluation import load_expert_labels, majority_labels
from p2baudit.mocks import mock_embedder, mock_generator, mock_responder
from p2baudit.pipeline import (
    MOCK_TIMESTAMP,
    AuditSettings,
    assess_direct,
    assess_retrieval,
    dump_record,
    fit_synthesis_prompt,
    load_record,
    record_paths,
    write_record,
)
from p2baudit.providers import GenerationConfig, MockGenerator
from p2baudit.reports import agreement_matrix, assessment_summary, record_answers, score_alignment
from p2baudit.retrieval import CANNOT_ANSWER, RetrievedAnswer

from conftest import CORPORA, LABELS, make_corpus

SETTINGS = AuditSettings(timestamp=MOCK_TIMESTAMP, max_workers=2)
CFG = GenerationConfig("mock")


@pytest.fixture(scope="module")
def demo():
    return load_manifest(CORPORA / "demo.json")


def test_direct_record_covers_the_checklist(demo):
    rec = assess_direct(demo, mock_generator(), CFG, SETTINGS)
    assert [q["question_id"] for q in rec["questions"]] == [f"Q{i}" for i in range(1, 18)]
    assert rec["failures"] == []
    assert rec["chunk_count"] == 1
    for q in rec["questions"]:
        assert q["binary"] == ("Yes" if q["ordinal_score"] >= 3 else "No")
        assert q["ordinal_score"] == max(c["score"] for c in q["chunks"])


def test_search_engine_record_has_nineteen_questions(demo):
    se = make_corpus(demo.documents[0].content, ptype=PlatformType.SEARCH_ENGINE)
    rec = assess_direct(se, mock_generator(), CFG, SETTINGS)
    assert len(rec["questions"]) == 19


def test_retrieval_record_fields(demo):
    rec = assess_retrieval(demo, mock_generator(), mock_embedder(), CFG, SETTINGS)
    assert rec["paragraph_count"] == 2 and rec["k"] == 20
    q3 = next(q for q in rec["questions"] if q["question_id"] == "Q3")
    assert len(q3["top_k"]) == 2
    assert q3["verdict"] == "Yes" and q3["binary"] == "Yes"
    assert 0 <= q3["dox"]["dox"] <= 1
    assert q3["explanatory_relevance"] == pytest.approx(q3["dox"]["dox"] * q3["max_pertinence"])
    for q in rec["questions"]:
        if q["verdict"] == "CannotAnswer":
            assert q["dox"]["dox"] == 0 and q["explanatory_relevance"] == 0


def test_cannot_answer_gives_zero_scores(demo):
    gen = MockGenerator(responder=lambda c, p: CANNOT_ANSWER)
    rec = assess_retrieval(demo, gen, mock_embedder(), CFG, SETTINGS)
    assert {q["binary"] for q in rec["questions"]} == {"No"}
    assert all(q["explanatory_relevance"] == 0 and q["cited_ranks"] == [] for q in rec["questions"])


def test_provider_failure_is_recorded_per_question(demo):
    def responder(config, prompt):
        if "influence ranking against direct or indirect payment" in prompt:
            raise ProviderUnavailable("endpoint down")
        return mock_responder(config, prompt)

    rec = assess_direct(demo, MockGenerator(responder=responder), CFG, SETTINGS)
    assert [f["question_id"] for f in rec["failures"]] == ["Q9"]
    assert rec["failures"][0]["error"] == "ProviderUnavailable"
    assert len(rec["questions"]) == 16


def test_unparseable_verdict_reasks_then_fails(demo):
    gen = MockGenerator(responder=lambda c, p: "Perhaps." if p.startswith("Output") else "x")
    rec = assess_retrieval(demo, gen, mock_embedder(), CFG, SETTINGS)
    assert rec["questions"] == []
    assert {f["error"] for f in rec["failures"]} == {"UnparseableVerdict"}
    assert gen.calls == 2 * 17


def test_synthesis_prompt_is_trimmed_to_fit():
    answers = [RetrievedAnswer(Paragraph(0, i, "word " * 100, 100), 0.9 - i / 100, i) for i in range(20)]
    cfg = GenerationConfig("m", context_limit_tokens=1200, max_response_tokens=100)
    kept, prompt = fit_synthesis_prompt("q?", answers, cfg)
    assert 0 < len(kept) < 20
    assert [a.rank for a in kept] == list(range(len(kept)))
    cfg.check_budget(prompt)


def test_records_round_trip_and_are_deterministic(demo, tmp_path):
    a = assess_retrieval(demo, mock_generator(), mock_embedder(), CFG, SETTINGS)
    b = assess_retrieval(demo, mock_generator(), mock_embedder(), CFG, AuditSettings(timestamp=MOCK_TIMESTAMP))
    assert dump_record(a) == dump_record(b)
    path = write_record(a, tmp_path)
    assert path.name == "demomarket__dox.json"
    assert load_record(path) == a
    assert record_paths([tmp_path]) == [path]


def test_reports_need_only_records(demo):
    direct = assess_direct(demo, mock_generator(), CFG, SETTINGS)
    dox = assess_retrieval(demo, mock_generator(), mock_embedder(), CFG, SETTINGS)
    truth = {"DemoMarket": record_answers(direct)}
    m = agreement_matrix([direct, dox], truth, seed=1)
    assert m.columns[-2:] == ["Random", "Always Yes"]
    assert m.cells[("DemoMarket", direct["label"])].fraction == 1.0
    rows = assessment_summary([direct, dox])
    assert len(rows) == 1 + 17 + 17
    assert score_alignment([direct, dox], truth)[0][0] == "label"


def test_empty_truth_is_a_key_mismatch(demo):
    rec = assess_direct(demo, mock_generator(), CFG, SETTINGS)
    with pytest.raises(KeyMismatch):
        agreement_matrix([rec], {})


def test_partial_truth_reports_question_diff(demo):
    rec = assess_direct(demo, mock_generator(), CFG, SETTINGS)
    truth = record_answers(rec)
    del truth["Q5"]
    with pytest.raises(KeyMismatch) as exc:
        agreement_matrix([rec], {"DemoMarket": truth})
    assert "Q5" in str(exc.value)


def test_reconstructed_records_reproduce_pooled_agreement():
    records = [load_record(p) for p in record_paths([CORPORA.parent / "records" / "table3"])]
    truth = majority_labels(load_expert_labels(LABELS / "expert_labels.csv"))
    m = agreement_matrix(records, truth, seed=42)
    pooled = {c: str(m.pooled(c).rate) for c in m.columns}
    assert pooled["ChatGPT 3.5"] == "63.89"
    assert pooled["ChatGPT 4"] == "53.70"
    assert pooled["DoX-based"] == "63.89"
    assert pooled["Always Yes"] == "39.81"
    assert str(m.cells[("Yahoo", "Always Yes")].rate) == "5.26"
    assert all(v in (Binary.YES, Binary.NO) for p in truth.values() for v in p.values())
