from datetime import datetime, timezone
from pathlib import Path

import numpy as np
import pytest

from careerkit import synth
from careerkit.embedding import DEFAULT_EMBEDDER, cosine
from careerkit.errors import (
    ForeignQuestion,
    InsufficientQuestions,
    NoQuestionsFound,
)
from careerkit.ingestion import DocumentIndexer, Kind, SourceDocument
from careerkit.mocktest import (
    MCQ_SECONDS,
    DESCRIPTIVE_SECONDS,
    Question,
    QuestionKind,
    TestSubmission,
    Topic,
    assemble_test,
    classify_topic,
    estimate_difficulty,
    grade,
    parse_question_bank,
)
from careerkit.retrieval import AnswerEngine
from careerkit.vector_index import VectorIndex

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="module")
def fixture_bank():
    text = (FIXTURES / "question_bank.txt").read_text(encoding="utf-8")
    return parse_question_bank(text)


# --- parsing ---

def test_fixture_bank_counts(fixture_bank):
    questions, warnings = fixture_bank
    mcqs = [q for q in questions if q.kind is QuestionKind.MCQ]
    desc = [q for q in questions if q.kind is QuestionKind.DESCRIPTIVE]
    assert len(mcqs) == 22  # 23 authored, one malformed item skipped
    assert len(desc) == 2
    assert all(q.answer_key in "ABCD" for q in mcqs)
    assert any("item 23" in w for w in warnings)


def test_malformed_item_skipped_with_warning(fixture_bank):
    questions, warnings = fixture_bank
    assert all(q.q_id != "q23" for q in questions)
    assert len(warnings) == 1


def test_key_block_joined_by_number():
    text = (FIXTURES / "question_bank_keyblock.txt").read_text(encoding="utf-8")
    questions, warnings = parse_question_bank(text)
    assert len(questions) == 4
    keys = {q.q_id: q.answer_key for q in questions}
    assert keys == {"q1": "C", "q2": "B", "q3": "C", "q4": "D"}
    assert warnings == []


def test_no_questions_found():
    with pytest.raises(NoQuestionsFound):
        parse_question_bank("just some prose without any numbering")
    with pytest.raises(NoQuestionsFound):
        parse_question_bank("   ")


def test_descriptive_questions_parsed(fixture_bank):
    questions, _ = fixture_bank
    desc = [q for q in questions if q.kind is QuestionKind.DESCRIPTIVE]
    assert {q.q_id for q in desc} == {"q24", "q25"}
    assert all(q.answer_key is None for q in desc)
    assert all(q.options == [] for q in desc)


# --- classification ---

def test_classify_math():
    assert classify_topic("What is 15% of 200?") is Topic.MATH


def test_classify_english():
    assert classify_topic("Choose the synonym of 'abundant'.") is Topic.ENGLISH


def test_classify_no_hits_default_gk():
    assert classify_topic("zzz qqq yyy") is Topic.GK


def test_classify_reasoning_and_current_affairs():
    assert classify_topic("What comes next in the series 4, 8, 12?") is Topic.REASONING
    assert classify_topic("Who was recently appointed as chairman?") is Topic.CURRENT_AFFAIRS


# --- difficulty ---

def test_difficulty_all_easy():
    stats = {"attempts": 100, "correct": 100}
    assert estimate_difficulty("is it so", stats) == 1


def test_difficulty_all_hard():
    stats = {"attempts": 100, "correct": 0}
    text = " ".join(["complicated"] * 70)
    assert estimate_difficulty(text, stats) == 5


def test_difficulty_midpoint_formula():
    # no stats, mean word length 5, 30 tokens: 0.6*0.5 + 0.4*0.5 = 0.5 -> 3
    text = " ".join(["abcde"] * 30)
    assert estimate_difficulty(text) == 3


def test_difficulty_bounds():
    for text in ("a", " ".join(["x" * 20] * 100)):
        assert 1 <= estimate_difficulty(text) <= 5


# --- assembly ---

def test_assembly_time_budget():
    bank = synth.question_bank(seed=1)
    test = assemble_test(
        bank, {"math": {"mcq": 10}, "english": {"descriptive": 2}}, seed=5
    )
    assert test.total_seconds == 10 * MCQ_SECONDS + 2 * DESCRIPTIVE_SECONDS == 1500
    assert len(test.questions) == 12


def test_assembly_blueprint_counts_exact():
    bank = synth.question_bank(seed=2)
    blueprint = {"math": 4, "gk": 3, "reasoning": 2}
    test = assemble_test(bank, blueprint, seed=9)
    by_topic = {}
    for q in test.questions:
        by_topic[q.topic.value] = by_topic.get(q.topic.value, 0) + 1
    assert by_topic == {"math": 4, "gk": 3, "reasoning": 2}


def test_assembly_difficulty_ascending():
    bank = synth.question_bank(seed=3)
    test = assemble_test(bank, {"math": 8, "english": 5}, seed=11)
    diffs = [q.difficulty for q in test.questions]
    assert diffs == sorted(diffs)


def test_assembly_deterministic():
    bank = synth.question_bank(seed=4)
    a = assemble_test(bank, {"gk": 6}, seed=21)
    b = assemble_test(bank, {"gk": 6}, seed=21)
    assert [q.q_id for q in a.questions] == [q.q_id for q in b.questions]
    c = assemble_test(bank, {"gk": 6}, seed=22)
    assert [q.q_id for q in c.questions] != [q.q_id for q in a.questions]


def test_assembly_rejects_duplicates():
    q1 = Question(
        q_id="a", text="What is the capital of France?", kind=QuestionKind.MCQ,
        options=["w", "x", "y", "z"], answer_key="A", topic=Topic.GK,
        embedding=DEFAULT_EMBEDDER.embed("What is the capital of France?"),
    )
    q2 = Question(
        q_id="b", text="What is the capital of France?", kind=QuestionKind.MCQ,
        options=["p", "q", "r", "s"], answer_key="B", topic=Topic.GK,
        embedding=DEFAULT_EMBEDDER.embed("What is the capital of France?"),
    )
    with pytest.raises(InsufficientQuestions) as exc:
        assemble_test([q1, q2], {"gk": 2}, seed=1)
    assert exc.value.available == 1
    assert exc.value.requested == 2


def test_insufficient_questions_fields():
    bank = synth.question_bank(seed=5, per_topic=3)
    with pytest.raises(InsufficientQuestions) as exc:
        assemble_test(bank, {"math": 10}, seed=1)
    assert exc.value.requested == 10
    assert exc.value.available <= 3


def test_assembly_pairwise_similarity_bound():
    bank = synth.question_bank(seed=6)
    test = assemble_test(bank, {"math": 6, "gk": 6, "english": 4}, seed=33)
    qs = test.questions
    for i in range(len(qs)):
        for j in range(i + 1, len(qs)):
            assert cosine(qs[i].embedding, qs[j].embedding) < 0.85


# --- grading ---

def make_simple_test():
    bank, _ = parse_question_bank(
        (FIXTURES / "question_bank.txt").read_text(encoding="utf-8")
    )
    by_id = {q.q_id: q for q in bank}
    from careerkit.mocktest import MockTest

    questions = [by_id["q1"], by_id["q2"], by_id["q24"]]
    return MockTest(
        test_id="t1",
        questions=questions,
        blueprint={},
        total_seconds=sum(q.seconds for q in questions),
    )


def test_grade_all_correct():
    test = make_simple_test()
    submission = TestSubmission(
        test_id="t1", answers={"q1": "C", "q2": "B", "q24": "some essay text"}
    )
    report = grade(test, submission)
    assert report.score == 2
    assert report.max_score == 2
    manual = [r for r in report.per_question if r.manual]
    assert len(manual) == 1
    assert manual[0].correct is None


def test_grade_empty_submission():
    test = make_simple_test()
    report = grade(test, TestSubmission(test_id="t1", answers={}))
    assert report.score == 0
    mcq_results = [r for r in report.per_question if not r.manual]
    assert all(r.correct is False for r in mcq_results)


def test_grade_foreign_question():
    test = make_simple_test()
    with pytest.raises(ForeignQuestion):
        grade(test, TestSubmission(test_id="t1", answers={"q99": "A"}))


def test_grade_order_independent():
    test = make_simple_test()
    a = grade(test, TestSubmission(test_id="t1", answers={"q1": "C", "q2": "A"}))
    b = grade(test, TestSubmission(test_id="t1", answers={"q2": "A", "q1": "C"}))
    assert a.to_json() == b.to_json()


def test_grade_with_explanations():
    indexer = DocumentIndexer(VectorIndex())
    indexer.add_document(
        SourceDocument(
            doc_id="notes",
            kind=Kind.POLICY_DOC,
            text=(
                "The synonym of abundant is plentiful. "
                "Fifteen percent of 200 is 30 by simple calculation."
            ),
            fetched_at=datetime(2025, 1, 1, tzinfo=timezone.utc),
        )
    )
    engine = AnswerEngine(indexer.index, indexer.catalog.get)
    test = make_simple_test()
    report = grade(
        test, TestSubmission(test_id="t1", answers={"q2": "B"}), engine=engine
    )
    explained = {r.q_id: r.explanation for r in report.per_question}
    assert explained["q2"]["citations"], "indexed source should be cited"


def test_assembled_json_withholds_keys():
    bank = synth.question_bank(seed=7)
    test = assemble_test(bank, {"math": 3}, seed=2)
    payload = test.to_json(include_keys=False)
    assert all("answer_key" not in q for q in payload["questions"])
    with_keys = test.to_json(include_keys=True)
    assert all(q["answer_key"] in "ABCD" for q in with_keys["questions"])


def test_topic_alignment_exact_by_construction():
    bank = synth.question_bank(seed=8)
    blueprint = {"math": 5, "english": 5}
    test = assemble_test(bank, blueprint, seed=3)
    requested = {Topic.MATH, Topic.ENGLISH}
    aligned = sum(1 for q in test.questions if q.topic in requested)
    assert aligned / len(test.questions) >= 0.9
