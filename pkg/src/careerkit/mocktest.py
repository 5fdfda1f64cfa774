"""Question-bank parsing and mock test assembly.

Banks arrive as plain text in the common previous-paper layout: numbered
questions, four lettered options, answer keys either inline ("Answer: B")
or in a trailing key block. Assembly draws a seeded random selection that
satisfies a per-topic blueprint, rejects near-duplicates by embedding
similarity, orders questions by ascending difficulty and attaches the
standard time budget (90 s per MCQ, 300 s per descriptive).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum

import numpy as np

from .embedding import DEFAULT_EMBEDDER, cosine
from .errors import (
    ForeignQuestion,
    InsufficientQuestions,
    NoQuestionsFound,
)

MCQ_SECONDS = 90
DESCRIPTIVE_SECONDS = 300
DUPLICATE_COSINE = 0.85


class Topic(str, Enum):
    GK = "gk"
    REASONING = "reasoning"
    MATH = "math"
    ENGLISH = "english"
    CURRENT_AFFAIRS = "current_affairs"


class QuestionKind(str, Enum):
    MCQ = "mcq"
    DESCRIPTIVE = "descriptive"


@dataclass
class Question:
    q_id: str
    text: str
    kind: QuestionKind
    options: list[str] = field(default_factory=list)
    answer_key: str | None = None
    topic: Topic = Topic.GK
    difficulty: int = 1
    embedding: np.ndarray | None = None
    stats: dict | None = None  # {"attempts": int, "correct": int}

    def __post_init__(self):
        self.kind = QuestionKind(self.kind)
        self.topic = Topic(self.topic)
        if self.kind is QuestionKind.MCQ:
            if len(self.options) != 4 or len(set(self.options)) != 4:
                raise ValueError(f"{self.q_id}: MCQ needs 4 distinct options")
            if self.answer_key not in ("A", "B", "C", "D"):
                raise ValueError(f"{self.q_id}: MCQ answer key must be A-D")
        if not 1 <= self.difficulty <= 5:
            raise ValueError(f"{self.q_id}: difficulty out of range")

    @property
    def seconds(self) -> int:
        return MCQ_SECONDS if self.kind is QuestionKind.MCQ else DESCRIPTIVE_SECONDS

    def to_json(self, include_key: bool = True) -> dict:
        out = {
            "q_id": self.q_id,
            "text": self.text,
            "kind": self.kind.value,
            "options": list(self.options),
            "topic": self.topic.value,
            "difficulty": self.difficulty,
            "seconds": self.seconds,
        }
        if include_key:
            out["answer_key"] = self.answer_key
        return out


# --- topic classification (keyword scorer; a neural classifier is a plugin) ---

TOPIC_KEYWORDS: dict[Topic, tuple[str, ...]] = {
    Topic.MATH: (
        "solve", "calculate", "percent", "%", "sum", "average", "ratio",
        "interest", "profit", "loss", "speed", "distance", "area", "perimeter",
        "fraction", "lcm", "hcf", "equation", "divide", "multiply", "remainder",
        "simple interest", "compound", "number is", "+", "×", "÷",
    ),
    Topic.ENGLISH: (
        "synonym", "antonym", "passage", "grammar", "sentence", "tense",
        "spelling", "idiom", "phrase", "preposition", "article", "voice",
        "narration", "meaning of", "correctly spelt", "blank", "one word",
    ),
    Topic.REASONING: (
        "series", "comes next", "odd one", "analogy", "code", "coded",
        "decode", "direction", "blood relation", "arrangement", "pattern",
        "sequence", "statements", "conclusion", "mirror image", "puzzle",
        "related to", "same way",
    ),
    Topic.CURRENT_AFFAIRS: (
        "recently", "currently", "appointed", "launched", "scheme", "summit",
        "award", "winner", "champion", "olympics", "budget", "election",
        "this year", "latest",
    ),
    Topic.GK: (
        "capital", "country", "river", "state", "constitution", "history",
        "independence", "planet", "currency", "national", "famous", "largest",
        "longest", "highest", "invented", "discovered", "known as",
    ),
}

_YEAR_RE = re.compile(r"\b(?:19|20)\d{2}\b")
_NUMBER_RE = re.compile(r"\d+")


def classify_topic(text: str) -> Topic:
    """Keyword-hit argmax; any tie (including no hits) resolves to gk."""
    lowered = text.lower()
    scores = {
        topic: sum(1 for kw in keywords if kw in lowered)
        for topic, keywords in TOPIC_KEYWORDS.items()
    }
    # bare numbers are a math signal, but years belong to current affairs
    numbers = _NUMBER_RE.findall(lowered)
    years = _YEAR_RE.findall(lowered)
    if len(numbers) - len(years) >= 2:
        scores[Topic.MATH] += 1
    if years:
        scores[Topic.CURRENT_AFFAIRS] += 1
    best = max(scores.values())
    winners = [t for t, s in scores.items() if s == best]
    return winners[0] if len(winners) == 1 else Topic.GK


def estimate_difficulty(text: str, stats: dict | None = None) -> int:
    """Blend of historical miss rate, vocabulary and length signals.

    With stats: 0.5*(1 - correct_rate) + 0.3*vocab + 0.2*length. Without
    stats the remaining weights renormalize to 0.6/0.4. Vocabulary is mean
    word length over 10, length is token count over 60, both clipped to
    [0, 1]; the blend maps to difficulty 1..5.
    """
    tokens = text.split()
    vocab = min(1.0, (sum(len(t) for t in tokens) / len(tokens)) / 10.0) if tokens else 0.0
    length = min(1.0, len(tokens) / 60.0)
    if stats and stats.get("attempts"):
        miss = 1.0 - stats.get("correct", 0) / stats["attempts"]
        raw = 0.5 * miss + 0.3 * vocab + 0.2 * length
    else:
        raw = 0.6 * vocab + 0.4 * length
    return max(1, min(5, 1 + int(4 * raw + 0.5)))


# --- bank parsing ---

_QNUM_RE = re.compile(r"^\s*(?:Q\s*)?(\d{1,3})[.)]\s+(.*)$", re.IGNORECASE)
_OPTION_RE = re.compile(r"^\s*\(?([A-Da-d])[.)]\s+(.*)$")
_INLINE_KEY_RE = re.compile(r"(?im)^\s*answer\s*[:\-]\s*\(?([A-Da-d])\)?\s*$")
_KEYBLOCK_HEADER_RE = re.compile(r"(?im)^\s*answer\s*keys?\s*[:\-]?\s*$")
_KEYBLOCK_ENTRY_RE = re.compile(r"^\s*(\d{1,3})[.)]?\s*[:\-]?\s*([A-Da-d])\s*$")


def parse_question_bank(
    text: str, embedder=None, default_topic: Topic | None = None
) -> tuple[list[Question], list[str]]:
    """Parse a plain-text previous-paper bank.

    Returns (questions, warnings); malformed items are skipped with a
    warning. Raises NoQuestionsFound when nothing parseable exists.
    """
    if not text or not text.strip():
        raise NoQuestionsFound("empty bank text")
    embedder = embedder or DEFAULT_EMBEDDER

    key_block: dict[int, str] = {}
    main_lines = text.splitlines()
    kb_match = _KEYBLOCK_HEADER_RE.search(text)
    if kb_match:
        head, _, tail = text.partition(kb_match.group(0))
        for line in tail.splitlines():
            m = _KEYBLOCK_ENTRY_RE.match(line)
            if m:
                key_block[int(m.group(1))] = m.group(2).upper()
        main_lines = head.splitlines()

    # group lines into numbered items
    items: list[tuple[int, list[str]]] = []
    current: list[str] | None = None
    for line in main_lines:
        m = _QNUM_RE.match(line)
        if m:
            current = [m.group(2)]
            items.append((int(m.group(1)), current))
        elif current is not None:
            current.append(line)

    questions: list[Question] = []
    warnings: list[str] = []
    for number, lines in items:
        stem_parts: list[str] = []
        options: list[str] = []
        answer_key: str | None = None
        for line in lines:
            km = _INLINE_KEY_RE.match(line)
            if km:
                answer_key = km.group(1).upper()
                continue
            om = _OPTION_RE.match(line)
            if om and len(options) < 4:
                options.append(om.group(2).strip())
                continue
            if not options:
                stem_parts.append(line.strip())
        stem = " ".join(p for p in stem_parts if p).strip()
        if not stem:
            warnings.append(f"item {number}: empty question text, skipped")
            continue
        if answer_key is None:
            answer_key = key_block.get(number)
        if options and len(options) != 4:
            warnings.append(
                f"item {number}: expected 4 options, found {len(options)}, skipped"
            )
            continue
        kind = QuestionKind.MCQ if options else QuestionKind.DESCRIPTIVE
        if kind is QuestionKind.MCQ and answer_key is None:
            warnings.append(f"item {number}: no answer key, skipped")
            continue
        if kind is QuestionKind.MCQ and len(set(options)) != 4:
            warnings.append(f"item {number}: duplicate options, skipped")
            continue
        topic = default_topic or classify_topic(stem)
        questions.append(
            Question(
                q_id=f"q{number}",
                text=stem,
                kind=kind,
                options=options,
                answer_key=answer_key if kind is QuestionKind.MCQ else None,
                topic=topic,
                difficulty=estimate_difficulty(stem),
                embedding=embedder.embed(stem),
            )
        )
    if not questions and not items:
        raise NoQuestionsFound("no numbered questions recognized")
    return questions, warnings


# --- assembly ---


@dataclass
class MockTest:
    test_id: str
    questions: list[Question]
    blueprint: dict
    total_seconds: int

    def question(self, q_id: str) -> Question | None:
        for q in self.questions:
            if q.q_id == q_id:
                return q
        return None

    def to_json(self, include_keys: bool = False) -> dict:
        return {
            "test_id": self.test_id,
            "blueprint": self.blueprint,
            "total_seconds": self.total_seconds,
            "questions": [q.to_json(include_key=include_keys) for q in self.questions],
        }


def _normalize_blueprint(blueprint: dict) -> list[tuple[Topic, QuestionKind, int]]:
    """Accept {topic: n} (MCQ) or {topic: {kind: n, ...}}; deterministic order."""
    entries: list[tuple[Topic, QuestionKind, int]] = []
    for topic_name in sorted(blueprint):
        spec_value = blueprint[topic_name]
        topic = Topic(topic_name)
        if isinstance(spec_value, dict):
            for kind_name in sorted(spec_value):
                count = int(spec_value[kind_name])
                if count > 0:
                    entries.append((topic, QuestionKind(kind_name), count))
        else:
            count = int(spec_value)
            if count > 0:
                entries.append((topic, QuestionKind.MCQ, count))
    return entries


def assemble_test(
    bank: list[Question],
    blueprint: dict,
    seed: int,
    test_id: str | None = None,
) -> MockTest:
    """Seeded selection meeting the blueprint exactly.

    Candidates with embedding cosine >= 0.85 to an already-selected question
    are rejected; the final order is ascending difficulty with q_id as the
    tie-break.
    """
    rng = np.random.default_rng(seed)
    selected: list[Question] = []
    for topic, kind, count in _normalize_blueprint(blueprint):
        pool = [q for q in bank if q.topic is topic and q.kind is kind]
        pool.sort(key=lambda q: q.q_id)
        order = rng.permutation(len(pool))
        taken = 0
        for idx in order:
            if taken == count:
                break
            candidate = pool[int(idx)]
            if any(
                cosine(candidate.embedding, s.embedding) >= DUPLICATE_COSINE
                for s in selected
            ):
                continue
            selected.append(candidate)
            taken += 1
        if taken < count:
            raise InsufficientQuestions(
                topic=f"{topic.value}/{kind.value}", available=taken, requested=count
            )
    selected.sort(key=lambda q: (q.difficulty, q.q_id))
    total = sum(q.seconds for q in selected)
    return MockTest(
        test_id=test_id or f"test-{seed}",
        questions=selected,
        blueprint=blueprint,
        total_seconds=total,
    )


# --- grading ---


@dataclass
class TestSubmission:
    test_id: str
    answers: dict[str, str]
    started_at: datetime | None = None
    submitted_at: datetime | None = None


@dataclass
class QuestionResult:
    q_id: str
    correct: bool | None  # None for manually graded descriptive answers
    expected: str | None
    given: str | None
    manual: bool
    explanation: dict | None

    def to_json(self) -> dict:
        return {
            "q_id": self.q_id,
            "correct": self.correct,
            "expected": self.expected,
            "given": self.given,
            "manual": self.manual,
            "explanation": self.explanation,
        }


@dataclass
class GradeReport:
    test_id: str
    score: int
    max_score: int
    per_question: list[QuestionResult]

    def to_json(self) -> dict:
        return {
            "test_id": self.test_id,
            "score": self.score,
            "max_score": self.max_score,
            "per_question": [r.to_json() for r in self.per_question],
        }


NO_EXPLANATION = "no explanation found"


def grade(test: MockTest, submission: TestSubmission, engine=None) -> GradeReport:
    """Score a submission: one mark per exact MCQ key match, no negative
    marking; descriptive answers are flagged for manual review. When an
    answer engine is attached, each question gets a citation-backed
    explanation (or the no-explanation marker)."""
    known_ids = {q.q_id for q in test.questions}
    for q_id in submission.answers:
        if q_id not in known_ids:
            raise ForeignQuestion(f"{q_id} is not part of test {test.test_id}")
    results: list[QuestionResult] = []
    score = 0
    max_score = 0
    for q in test.questions:
        given = submission.answers.get(q.q_id)
        explanation = None
        if engine is not None:
            answer = engine.answer_query(q.text)
            explanation = (
                answer.to_json() if answer.answered else {"text": NO_EXPLANATION,
                                                          "citations": []}
            )
        if q.kind is QuestionKind.MCQ:
            max_score += 1
            correct = given is not None and given.strip().upper() == q.answer_key
            if correct:
                score += 1
            results.append(
                QuestionResult(
                    q_id=q.q_id, correct=correct, expected=q.answer_key,
                    given=given, manual=False, explanation=explanation,
                )
            )
        else:
            results.append(
                QuestionResult(
                    q_id=q.q_id, correct=None, expected=None, given=given,
                    manual=True, explanation=explanation,
                )
            )
    return GradeReport(
        test_id=test.test_id, score=score, max_score=max_score, per_question=results
    )
