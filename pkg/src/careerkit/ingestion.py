"""Document ingestion: chunking, dedup, versioned storage, scheduling.

Source documents arrive from pluggable fetchers on a per-kind cadence, are
deduplicated by content hash, stored as versioned records (24-hour version
buckets, 90-day retention), chunked into overlapping token windows, and fed
to the vector index.
"""

from __future__ import annotations

import hashlib
import json
import logging
import time
import unicodedata
import urllib.request
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from enum import Enum
from pathlib import Path

import numpy as np

from .embedding import DEFAULT_EMBEDDER, fnv1a_64
from .errors import (
    EmptyDocument,
    FetchError,
    OutOfRetention,
    StorageError,
    UnknownRecord,
)
from .vector_index import IndexEntry

logger = logging.getLogger(__name__)

CHUNK_TOKENS = 512
CHUNK_OVERLAP = 50
CHUNK_STEP = CHUNK_TOKENS - CHUNK_OVERLAP
RETENTION_DAYS = 90
DELAY_RANGE_S = (2.0, 10.0)


class Kind(str, Enum):
    JOB_LISTING = "job_listing"
    ALERT = "alert"
    RESULT = "result"
    INFOGRAPHIC = "infographic"
    POLICY_DOC = "policy_doc"
    QUESTION_PAPER = "question_paper"


class Cadence(str, Enum):
    DAILY_0900 = "daily_0900"
    HOURLY = "hourly"
    FOUR_PER_DAY = "four_per_day"
    WEEKLY = "weekly"


def _utc(dt: datetime) -> datetime:
    if dt.tzinfo is None:
        return dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


@dataclass
class SourceDocument:
    doc_id: str
    kind: Kind
    text: str
    fetched_at: datetime
    origin: str = ""

    def __post_init__(self):
        if not self.doc_id:
            raise ValueError("doc_id must be non-empty")
        if not self.text:
            raise ValueError("text must be non-empty")
        self.kind = Kind(self.kind)
        self.fetched_at = _utc(self.fetched_at)

    def to_json(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "kind": self.kind.value,
            "text": self.text,
            "fetched_at": self.fetched_at.isoformat(),
            "origin": self.origin,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SourceDocument":
        return cls(
            doc_id=obj["doc_id"],
            kind=Kind(obj["kind"]),
            text=obj["text"],
            fetched_at=datetime.fromisoformat(obj["fetched_at"]),
            origin=obj.get("origin", ""),
        )


@dataclass
class DocumentChunk:
    chunk_id: str
    doc_id: str
    ordinal: int
    token_span: tuple[int, int]
    text: str
    embedding: np.ndarray | None = None

    @property
    def index_id(self) -> int:
        """64-bit index entry id derived from the chunk id."""
        h = fnv1a_64(self.chunk_id.encode("utf-8"))
        return h - (1 << 64) if h >= (1 << 63) else h


def tokenize(text: str) -> list[str]:
    """NFC-normalize and split on unicode whitespace."""
    return unicodedata.normalize("NFC", text).split()


def token_spans(text: str) -> tuple[str, list[tuple[int, int]]]:
    """Return the NFC text plus (start, end) char offsets of each token."""
    norm = unicodedata.normalize("NFC", text)
    spans = []
    i = 0
    n = len(norm)
    while i < n:
        if norm[i].isspace():
            i += 1
            continue
        start = i
        while i < n and not norm[i].isspace():
            i += 1
        spans.append((start, i))
    return norm, spans


def chunk_spans(n_tokens: int) -> list[tuple[int, int]]:
    """Token windows of size 512 stepping 462, final window anchored at
    max(0, N-512) so full-length documents always end with a full window."""
    if n_tokens <= 0:
        return []
    if n_tokens <= CHUNK_TOKENS:
        return [(0, n_tokens)]
    starts = []
    s = 0
    while s + CHUNK_TOKENS < n_tokens:
        starts.append(s)
        s += CHUNK_STEP
    starts.append(n_tokens - CHUNK_TOKENS)
    return [(s, min(s + CHUNK_TOKENS, n_tokens)) for s in starts]


def chunk_document(doc: SourceDocument, embedder=None) -> list[DocumentChunk]:
    """Slice a document into overlapping 512-token chunks and embed them."""
    if not doc.text.strip():
        raise EmptyDocument(f"document {doc.doc_id} has no text")
    embedder = embedder or DEFAULT_EMBEDDER
    norm, spans = token_spans(doc.text)
    if not spans:
        raise EmptyDocument(f"document {doc.doc_id} has no tokens")
    chunks = []
    for ordinal, (ts, te) in enumerate(chunk_spans(len(spans))):
        text = norm[spans[ts][0] : spans[te - 1][1]]
        chunks.append(
            DocumentChunk(
                chunk_id=f"{doc.doc_id}#{ordinal}",
                doc_id=doc.doc_id,
                ordinal=ordinal,
                token_span=(ts, te),
                text=text,
                embedding=embedder.embed(text),
            )
        )
    return chunks


def content_hash(doc: SourceDocument) -> str:
    """SHA-256 over the canonical form (kind + text); timestamps and origin
    never participate, so re-fetches of identical content dedup cleanly."""
    canonical = doc.kind.value + "\n" + unicodedata.normalize("NFC", doc.text)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


class UpsertResult(str, Enum):
    SKIPPED = "skipped"
    CREATED = "created"
    NEW_VERSION = "new_version"


@dataclass
class VersionedRecord:
    record_key: str
    content_hash: str
    version: int
    valid_from: datetime
    payload: SourceDocument

    def to_json(self) -> dict:
        return {
            "record_key": self.record_key,
            "content_hash": self.content_hash,
            "version": self.version,
            "valid_from": self.valid_from.isoformat(),
            "payload": self.payload.to_json(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "VersionedRecord":
        return cls(
            record_key=obj["record_key"],
            content_hash=obj["content_hash"],
            version=obj["version"],
            valid_from=datetime.fromisoformat(obj["valid_from"]),
            payload=SourceDocument.from_json(obj["payload"]),
        )


def _day_bucket(dt: datetime) -> int:
    return int(_utc(dt).timestamp() // 86400)


class RecordStore:
    """Versioned document store backed by an append-only JSONL log plus a
    snapshot file. At most one version per record per 24-hour bucket; later
    same-bucket changes overwrite that bucket's version."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._log_path = self.root / "records.log.jsonl"
        self._snapshot_path = self.root / "records.snapshot.json"
        self._records: dict[str, list[VersionedRecord]] = {}
        self._replay()

    def _replay(self):
        try:
            if self._snapshot_path.exists():
                data = json.loads(self._snapshot_path.read_text(encoding="utf-8"))
                for key, versions in data.items():
                    self._records[key] = [VersionedRecord.from_json(v) for v in versions]
            if self._log_path.exists():
                with open(self._log_path, encoding="utf-8") as fh:
                    for line in fh:
                        line = line.strip()
                        if line:
                            self._apply(VersionedRecord.from_json(json.loads(line)))
        except (OSError, json.JSONDecodeError, KeyError) as exc:
            raise StorageError(f"cannot replay store at {self.root}: {exc}") from exc

    def _apply(self, rec: VersionedRecord):
        versions = self._records.setdefault(rec.record_key, [])
        if versions and versions[-1].version == rec.version:
            versions[-1] = rec
        else:
            versions.append(rec)

    def _append_log(self, rec: VersionedRecord):
        try:
            with open(self._log_path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(rec.to_json(), ensure_ascii=False) + "\n")
        except OSError as exc:
            raise StorageError(f"cannot append to {self._log_path}: {exc}") from exc

    def snapshot(self):
        """Collapse the log into the snapshot file."""
        data = {
            key: [v.to_json() for v in versions]
            for key, versions in self._records.items()
        }
        tmp = self._snapshot_path.with_suffix(".tmp")
        tmp.write_text(json.dumps(data, ensure_ascii=False), encoding="utf-8")
        tmp.replace(self._snapshot_path)
        self._log_path.unlink(missing_ok=True)

    def __contains__(self, record_key: str) -> bool:
        return record_key in self._records

    def keys(self) -> list[str]:
        return list(self._records.keys())

    def versions(self, record_key: str) -> list[VersionedRecord]:
        if record_key not in self._records:
            raise UnknownRecord(record_key)
        return list(self._records[record_key])

    def latest(self, record_key: str) -> VersionedRecord:
        return self.versions(record_key)[-1]

    def upsert(self, doc: SourceDocument, now: datetime | None = None) -> UpsertResult:
        now = _utc(now or doc.fetched_at)
        digest = content_hash(doc)
        versions = self._records.get(doc.doc_id)
        if versions and versions[-1].content_hash == digest:
            return UpsertResult.SKIPPED
        if not versions:
            rec = VersionedRecord(doc.doc_id, digest, 1, now, doc)
            self._records[doc.doc_id] = [rec]
            self._append_log(rec)
            return UpsertResult.CREATED
        last = versions[-1]
        if _day_bucket(now) == _day_bucket(last.valid_from):
            rec = VersionedRecord(doc.doc_id, digest, last.version, now, doc)
            versions[-1] = rec
        else:
            rec = VersionedRecord(doc.doc_id, digest, last.version + 1, now, doc)
            versions.append(rec)
        self._append_log(rec)
        return UpsertResult.NEW_VERSION

    def revert(self, record_key: str, as_of: datetime, now: datetime | None = None) -> SourceDocument:
        """Payload of the newest version with valid_from <= as_of."""
        as_of = _utc(as_of)
        now = _utc(now or datetime.now(timezone.utc))
        if as_of < now - timedelta(days=RETENTION_DAYS):
            raise OutOfRetention(
                f"{as_of.isoformat()} is older than {RETENTION_DAYS} days"
            )
        versions = self.versions(record_key)
        eligible = [v for v in versions if v.valid_from <= as_of]
        if not eligible:
            raise UnknownRecord(
                f"{record_key}: no version at or before {as_of.isoformat()}"
            )
        return eligible[-1].payload

    def prune(self, now: datetime | None = None) -> int:
        """Drop versions older than the retention window (each record's
        latest version is always kept). Returns number pruned."""
        now = _utc(now or datetime.now(timezone.utc))
        cutoff = now - timedelta(days=RETENTION_DAYS)
        pruned = 0
        for key, versions in self._records.items():
            keep = [v for v in versions[:-1] if v.valid_from >= cutoff]
            keep.append(versions[-1])
            pruned += len(versions) - len(keep)
            self._records[key] = keep
        if pruned:
            self.snapshot()
        return pruned


class ChunkCatalog:
    """In-memory chunk lookup (chunk_id -> DocumentChunk), rebuilt from the
    record store; the index stores only vectors and payload refs."""

    def __init__(self):
        self._chunks: dict[str, DocumentChunk] = {}

    def add(self, chunk: DocumentChunk):
        self._chunks[chunk.chunk_id] = chunk

    def remove(self, chunk_id: str):
        self._chunks.pop(chunk_id, None)

    def get(self, chunk_id: str) -> DocumentChunk | None:
        return self._chunks.get(chunk_id)

    def __len__(self) -> int:
        return len(self._chunks)


class DocumentIndexer:
    """Keeps a vector index and chunk catalog in sync with document upserts."""

    def __init__(self, index, catalog: ChunkCatalog | None = None, embedder=None):
        self.index = index
        self.catalog = catalog if catalog is not None else ChunkCatalog()
        self.embedder = embedder or DEFAULT_EMBEDDER

    def add_document(self, doc: SourceDocument):
        for chunk in chunk_document(doc, self.embedder):
            self.catalog.add(chunk)
            self.index.insert(
                IndexEntry(id=chunk.index_id, vector=chunk.embedding,
                           payload_ref=chunk.chunk_id)
            )

    def remove_document(self, doc: SourceDocument):
        for chunk in chunk_document(doc, self.embedder):
            self.catalog.remove(chunk.chunk_id)
            self.index.remove(chunk.index_id)

    def rebuild_from_store(self, store: RecordStore):
        for key in store.keys():
            self.add_document(store.latest(key).payload)


def upsert_record(
    store: RecordStore,
    doc: SourceDocument,
    now: datetime | None = None,
    indexer: DocumentIndexer | None = None,
) -> UpsertResult:
    """Store a document version and keep the index in sync: on change, old
    chunks are removed and new chunks inserted; duplicates are no-ops."""
    old = None
    if indexer is not None and doc.doc_id in store:
        old = store.latest(doc.doc_id).payload
    result = store.upsert(doc, now)
    if result is not UpsertResult.SKIPPED and indexer is not None:
        if old is not None:
            indexer.remove_document(old)
        indexer.add_document(doc)
    return result


# --- scheduling ---


@dataclass
class ScheduledTask:
    name: str
    cadence: Cadence
    last_run: datetime | None = None


def next_run(task: ScheduledTask, now: datetime) -> datetime:
    """Next firing time strictly after now for the task's cadence.

    Times are computed in now's own UTC offset (naive datetimes are treated
    as UTC), so "09:00" means 09:00 local to the caller's clock.
    """
    if now.tzinfo is None:
        now = now.replace(tzinfo=timezone.utc)
    c = Cadence(task.cadence)
    if c is Cadence.HOURLY:
        base = now.replace(minute=0, second=0, microsecond=0)
        return base + timedelta(hours=1) if base <= now else base
    if c is Cadence.DAILY_0900:
        candidate = now.replace(hour=9, minute=0, second=0, microsecond=0)
        if candidate <= now:
            candidate += timedelta(days=1)
        return candidate
    if c is Cadence.FOUR_PER_DAY:
        base = now.replace(minute=0, second=0, microsecond=0)
        for hour in (0, 6, 12, 18):
            candidate = base.replace(hour=hour)
            if candidate > now:
                return candidate
        return base.replace(hour=0) + timedelta(days=1)
    # weekly: Monday 09:00
    candidate = now.replace(hour=9, minute=0, second=0, microsecond=0)
    candidate -= timedelta(days=candidate.weekday())
    while candidate <= now:
        candidate += timedelta(days=7)
    return candidate


class Scheduler:
    """Task registry; config is a JSON file mapping task name -> cadence."""

    def __init__(self, tasks: list[ScheduledTask]):
        self.tasks = tasks

    @classmethod
    def from_config(cls, path: str | Path) -> "Scheduler":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls([ScheduledTask(name, Cadence(c)) for name, c in data.items()])

    @classmethod
    def default(cls) -> "Scheduler":
        return cls(
            [
                ScheduledTask("job_listings", Cadence.DAILY_0900),
                ScheduledTask("alerts", Cadence.HOURLY),
                ScheduledTask("results", Cadence.FOUR_PER_DAY),
                ScheduledTask("infographics", Cadence.WEEKLY),
            ]
        )

    def due(self, now: datetime) -> list[ScheduledTask]:
        now = _utc(now)
        out = []
        for task in self.tasks:
            if task.last_run is None or next_run(task, task.last_run) <= now:
                out.append(task)
        return out


# --- fetchers ---


class FixtureFetcher:
    """Reads SourceDocument JSON files from a directory; the local stand-in
    for the live fetcher. headers_provider exists to honor the fetch
    contract's anti-detection hook; fixtures ignore it."""

    def __init__(self, root: str | Path, headers_provider=None):
        self.root = Path(root)
        self.headers_provider = headers_provider

    def list_items(self, task: ScheduledTask) -> list[str]:
        return sorted(str(p) for p in self.root.glob("*.json"))

    def fetch_item(self, handle: str) -> SourceDocument:
        try:
            data = json.loads(Path(handle).read_text(encoding="utf-8"))
            return SourceDocument.from_json(data)
        except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
            raise FetchError(f"{handle}: {exc}") from exc


class HttpFetcher:
    """Fetches a manifest of item URLs, then each item as SourceDocument
    JSON. headers_provider supplies per-request headers (user-agent
    rotation hook)."""

    def __init__(self, base_url: str, headers_provider=None, timeout: float = 10.0):
        self.base_url = base_url.rstrip("/")
        self.headers_provider = headers_provider or (lambda: {})
        self.timeout = timeout

    def _get(self, url: str) -> bytes:
        req = urllib.request.Request(url, headers=self.headers_provider())
        try:
            with urllib.request.urlopen(req, timeout=self.timeout) as resp:
                return resp.read()
        except OSError as exc:
            raise FetchError(f"{url}: {exc}") from exc

    def list_items(self, task: ScheduledTask) -> list[str]:
        try:
            manifest = json.loads(self._get(self.base_url + "/manifest.json"))
            return [self.base_url + "/" + name for name in manifest["items"]]
        except (json.JSONDecodeError, KeyError) as exc:
            raise FetchError(f"bad manifest: {exc}") from exc

    def fetch_item(self, handle: str) -> SourceDocument:
        try:
            return SourceDocument.from_json(json.loads(self._get(handle)))
        except (json.JSONDecodeError, KeyError, ValueError) as exc:
            raise FetchError(f"{handle}: {exc}") from exc


@dataclass
class IngestReport:
    fetched: int = 0
    created: int = 0
    skipped: int = 0
    new_versions: int = 0
    errors: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "fetched": self.fetched,
            "created": self.created,
            "skipped": self.skipped,
            "new_versions": self.new_versions,
            "errors": list(self.errors),
        }


def run_pipeline(
    scheduler: Scheduler,
    fetcher,
    store: RecordStore,
    now: datetime,
    indexer: DocumentIndexer | None = None,
    rng: np.random.Generator | None = None,
    sleeper=time.sleep,
) -> IngestReport:
    """Fire all due tasks, fetch items with a politeness delay between
    fetches, and upsert each document. Per-item failures are logged and
    counted; they never abort the batch."""
    now = _utc(now)
    rng = rng or np.random.default_rng()
    report = IngestReport()
    for task in scheduler.due(now):
        try:
            handles = fetcher.list_items(task)
        except FetchError as exc:
            logger.warning("task %s: %s", task.name, exc)
            report.errors.append(str(exc))
            task.last_run = now
            continue
        for i, handle in enumerate(handles):
            if i > 0:
                sleeper(float(rng.uniform(*DELAY_RANGE_S)))
            report.fetched += 1
            try:
                doc = fetcher.fetch_item(handle)
            except FetchError as exc:
                logger.warning("task %s item %s: %s", task.name, handle, exc)
                report.errors.append(str(exc))
                continue
            result = upsert_record(store, doc, now=now, indexer=indexer)
            if result is UpsertResult.CREATED:
                report.created += 1
            elif result is UpsertResult.SKIPPED:
                report.skipped += 1
            else:
                report.new_versions += 1
        task.last_run = now
    return report
