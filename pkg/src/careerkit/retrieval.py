"""Query answering: language detection, translation plug point, top-5
retrieval, extractive grounded answers with citations, and TTL caching.

Answers are composed purely from a fixed template plus verbatim snippets of
retrieved chunks, so every sentence of an answer is traceable to a cited
source by substring check. Generation is behind a small composer seam; a
generative model can replace it without touching retrieval.
"""

from __future__ import annotations

import dataclasses
import re
import threading
import time
from collections import OrderedDict
from dataclasses import dataclass, field
from enum import Enum

from .embedding import DEFAULT_EMBEDDER
from .errors import EmptyText, IndexUnavailable, TranslatorUnavailable

TOP_K = 5
GROUNDING_THRESHOLD = 0.25
CACHE_TTL_S = 300.0
SNIPPET_MAX_CHARS = 300

ANSWER_LEAD = "Here is what the indexed documents say:"
REFUSAL_TEXT = "No grounded answer was found in the indexed documents."

_TEMPLATE_SENTENCES = frozenset({ANSWER_LEAD, REFUSAL_TEXT})


class Language(str, Enum):
    EN = "en"
    HI = "hi"
    PA = "pa"


_SCRIPT_THRESHOLD = 0.30
_DEVANAGARI = (0x0900, 0x097F)
_GURMUKHI = (0x0A00, 0x0A7F)


def detect_language(text: str) -> Language:
    """Classify by dominant Indic script (>=30% of letters), default en.

    Hindi outranks Punjabi on exactly equal counts; mixed text with mostly
    Latin letters stays en.
    """
    if not text or not text.strip():
        raise EmptyText("cannot detect language of empty text")
    letters = hi = pa = 0
    for ch in text:
        if not ch.isalpha():
            continue
        letters += 1
        cp = ord(ch)
        if _DEVANAGARI[0] <= cp <= _DEVANAGARI[1]:
            hi += 1
        elif _GURMUKHI[0] <= cp <= _GURMUKHI[1]:
            pa += 1
    if letters == 0:
        return Language.EN
    hi_wins = hi / letters >= _SCRIPT_THRESHOLD
    pa_wins = pa / letters >= _SCRIPT_THRESHOLD
    if hi_wins and (not pa_wins or hi >= pa):
        return Language.HI
    if pa_wins:
        return Language.PA
    return Language.EN


class IdentityTranslator:
    """Default passthrough translator; a neural plugin honors the same
    interface."""

    name = "identity"

    def translate(self, text: str, source: Language, target: Language) -> str:
        return text


def checked_translate(translator, text: str, source: Language, target: Language) -> str:
    """Run a translator and enforce its contract (same-language identity,
    non-empty output for non-empty input)."""
    if source == target:
        return text
    out = translator.translate(text, source, target)
    if text.strip() and (out is None or not out.strip()):
        raise TranslatorUnavailable(
            f"translator {getattr(translator, 'name', '?')!r} returned empty output"
        )
    return out


def normalize_query(text: str) -> str:
    """Cache-key normalization: trim, collapse whitespace, lowercase Latin
    letters only (Indic scripts are case-less and left untouched)."""
    collapsed = " ".join(text.split())
    return "".join(c.lower() if ord(c) < 0x250 else c for c in collapsed)


@dataclass(frozen=True)
class Citation:
    chunk_id: str
    doc_id: str
    score: float
    quoted_span: str

    def to_json(self) -> dict:
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class GroundedAnswer:
    text: str
    citations: tuple[Citation, ...]
    language: Language
    cached: bool = False
    answered: bool = False

    def to_json(self) -> dict:
        return {
            "text": self.text,
            "citations": [c.to_json() for c in self.citations],
            "language": self.language.value,
            "cached": self.cached,
            "answered": self.answered,
        }


class QueryCache:
    """LRU cache with a 300 s TTL, keyed by (normalized query, language).

    Internally synchronized; the clock is injectable so TTL boundaries are
    testable without sleeping.
    """

    def __init__(self, capacity: int = 1024, ttl: float = CACHE_TTL_S, clock=time.monotonic):
        self.capacity = capacity
        self.ttl = ttl
        self.clock = clock
        self.hits = 0
        self.misses = 0
        self._lock = threading.Lock()
        self._entries: OrderedDict[tuple[str, str], tuple[float, GroundedAnswer]] = OrderedDict()

    def get(self, key: tuple[str, str]) -> GroundedAnswer | None:
        with self._lock:
            item = self._entries.get(key)
            if item is None:
                self.misses += 1
                return None
            stored_at, answer = item
            if self.clock() - stored_at >= self.ttl:
                del self._entries[key]
                self.misses += 1
                return None
            self._entries.move_to_end(key)
            self.hits += 1
            return answer

    def put(self, key: tuple[str, str], answer: GroundedAnswer) -> None:
        with self._lock:
            self._entries[key] = (self.clock(), answer)
            self._entries.move_to_end(key)
            while len(self._entries) > self.capacity:
                self._entries.popitem(last=False)

    def __len__(self) -> int:
        with self._lock:
            return len(self._entries)

    @property
    def hit_rate(self) -> float:
        total = self.hits + self.misses
        return self.hits / total if total else 0.0


_SENTENCE_SPLIT = re.compile(r"[.!?।॥\n]+")


def _pick_snippet(chunk_text: str, query: str) -> str:
    """Most query-relevant sentence of the chunk, verbatim, bounded length."""
    query_tokens = set(normalize_query(query).split())
    best, best_overlap = None, -1
    for raw in _SENTENCE_SPLIT.split(chunk_text):
        sent = raw.strip()
        if not sent:
            continue
        overlap = len(query_tokens & set(normalize_query(sent).split()))
        if overlap > best_overlap:
            best, best_overlap = sent, overlap
    snippet = best if best is not None else chunk_text.strip()
    if len(snippet) > SNIPPET_MAX_CHARS:
        cut = snippet.rfind(" ", 0, SNIPPET_MAX_CHARS)
        snippet = snippet[: cut if cut > 0 else SNIPPET_MAX_CHARS]
    # a snippet must stay a verbatim substring of the chunk
    assert snippet in chunk_text or not snippet
    return snippet


class AnswerEngine:
    """Figure-style query pipeline: detect -> translate -> embed -> retrieve
    top-5 -> compose grounded answer -> translate back -> cache."""

    def __init__(
        self,
        index,
        get_chunk,
        embedder=None,
        translator=None,
        cache: QueryCache | None = None,
        threshold: float = GROUNDING_THRESHOLD,
        k: int = TOP_K,
    ):
        self.index = index
        self.get_chunk = get_chunk
        self.embedder = embedder or DEFAULT_EMBEDDER
        self.translator = translator or IdentityTranslator()
        self.cache = cache if cache is not None else QueryCache()
        self.threshold = threshold
        self.k = k

    def answer_query(self, query: str, lang_hint: Language | None = None) -> GroundedAnswer:
        if not query or not query.strip():
            raise EmptyText("cannot answer an empty query")
        if self.index is None:
            raise IndexUnavailable("no vector index attached")
        language = Language(lang_hint) if lang_hint else detect_language(query)
        key = (normalize_query(query), language.value)
        hit = self.cache.get(key)
        if hit is not None:
            return dataclasses.replace(hit, cached=True)

        english = checked_translate(self.translator, query, language, Language.EN)
        qvec = self.embedder.embed(english)
        hits = self.index.search(qvec, self.k)
        used = [h for h in hits if h.score >= self.threshold]
        if not used:
            text = checked_translate(
                self.translator, REFUSAL_TEXT, Language.EN, language
            )
            answer = GroundedAnswer(
                text=text, citations=(), language=language, answered=False
            )
            self.cache.put(key, answer)
            return answer

        citations = []
        lines = [ANSWER_LEAD]
        for h in used:
            chunk = self.get_chunk(self.index.payload_ref(h.id))
            if chunk is None:
                continue
            snippet = _pick_snippet(chunk.text, english)
            lines.append(snippet)
            citations.append(
                Citation(
                    chunk_id=chunk.chunk_id,
                    doc_id=chunk.doc_id,
                    score=h.score,
                    quoted_span=snippet,
                )
            )
        if not citations:
            answer = GroundedAnswer(
                text=checked_translate(self.translator, REFUSAL_TEXT, Language.EN, language),
                citations=(),
                language=language,
                answered=False,
            )
            self.cache.put(key, answer)
            return answer
        body = "\n".join(lines)
        text = checked_translate(self.translator, body, Language.EN, language)
        answer = GroundedAnswer(
            text=text,
            citations=tuple(citations),
            language=language,
            answered=True,
        )
        self.cache.put(key, answer)
        return answer


def is_grounded(answer: GroundedAnswer, get_chunk) -> bool:
    """Check the structural grounding invariant: every line of an answered
    response is the fixed template or a verbatim substring of a cited chunk."""
    if not answer.answered:
        return not answer.citations
    if not answer.citations:
        return False
    chunk_texts = []
    for c in answer.citations:
        chunk = get_chunk(c.chunk_id)
        if chunk is None:
            return False
        chunk_texts.append(chunk.text)
    for line in answer.text.split("\n"):
        if not line.strip():
            continue
        if line in _TEMPLATE_SENTENCES:
            continue
        if not any(line in t for t in chunk_texts):
            return False
    return True
