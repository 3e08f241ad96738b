import json

import pytest

from p2baudit.checklist import default_bank, get_question, load_bank, open_form, questions_for
from p2baudit.corpus import PlatformType
from p2baudit.errors import UnknownQuestion

IS, SE = PlatformType.INTERMEDIATION, PlatformType.SEARCH_ENGINE


def test_counts_per_platform_type():
    assert len(questions_for(IS)) == 17
    assert len(questions_for(SE)) == 19
    assert 3 * len(questions_for(IS)) + 3 * len(questions_for(SE)) == 108


def test_order_is_numeric():
    assert [q.id for q in questions_for(IS)] == [f"Q{i}" for i in range(1, 18)]
    se = [q.id for q in questions_for(SE)]
    assert se[3] == "Q4-SE"
    assert se[-2:] == ["Q18", "Q19"]


def test_q4_variant_replaces_q4_for_search_engines():
    se = {q.id for q in questions_for(SE)}
    assert "Q4" not in se and "Q4-SE" in se
    assert "Q4-SE" not in {q.id for q in questions_for(IS)}


def test_search_engine_additions_verbatim():
    assert get_question("Q18").closed_text == (
        "Does the documentation explain how the ranking mechanism considers the design "
        "characteristics of the websites?")
    assert get_question("Q19").closed_text == (
        "Does the documentation explain the extent to which the ranking mechanism considers the "
        "design characteristics of the websites?")


def test_open_forms():
    assert open_form(get_question("Q1")) == "How is 'ranking' defined?"
    assert open_form(get_question("Q3")) == "What are the main parameters used for determining ranking?"
    assert open_form(get_question("Q9")) == (
        "What are the possibilities to influence ranking against direct or indirect payment?")


def test_survey_subset():
    assert [q.id for q in default_bank() if q.in_survey_subset] == ["Q3", "Q4", "Q15", "Q16"]


def test_unknown_question():
    with pytest.raises(UnknownQuestion):
        get_question("Q99")


def test_every_question_has_both_forms():
    for q in default_bank():
        assert q.closed_text.startswith("Does the documentation")
        assert q.open_text.endswith("?")
        assert q.legal_source


def test_load_bank_rejects_duplicates(tmp_path):
    rec = json.loads(json.dumps([q.__dict__ | {"applies_to": sorted(t.value for t in q.applies_to)}
                                 for q in default_bank()[:1]]))
    p = tmp_path / "bank.json"
    p.write_text(json.dumps(rec * 2), encoding="utf-8")
    with pytest.raises(ValueError):
        load_bank(p)
