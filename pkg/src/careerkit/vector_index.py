"""HNSW approximate nearest-neighbor index over embedding vectors.

Incremental inserts (no global rebuilds), tombstoned deletes with automatic
compaction, an exact brute-force oracle, and a checksummed binary file
format. Vectors are assumed already unit-normalized (or all-zero), so
cosine similarity is computed as a plain dot product.

Graph construction is deterministic: node levels come from a counter-based
hash of the index seed, never from global RNG state, so a given insert
sequence always produces the same graph.
"""

from __future__ import annotations

import math
import struct
import threading
import zlib
from dataclasses import dataclass, field

import numpy as np

from . import _hnsw_kernels as _k
from .embedding import EMBEDDING_DIM
from .errors import CorruptIndex, DimensionMismatch, DuplicateId

_MAGIC = b"JSVI"
_FORMAT_VERSION = 1


@dataclass(frozen=True)
class SearchHit:
    """One search result: external entry id and cosine score."""

    id: int
    score: float


@dataclass
class IndexEntry:
    id: int
    vector: np.ndarray
    payload_ref: str = ""


class _RWLock:
    """Many readers or one writer."""

    def __init__(self):
        self._cond = threading.Condition()
        self._readers = 0
        self._writer = False

    def acquire_read(self):
        with self._cond:
            while self._writer:
                self._cond.wait()
            self._readers += 1

    def release_read(self):
        with self._cond:
            self._readers -= 1
            if self._readers == 0:
                self._cond.notify_all()

    def acquire_write(self):
        with self._cond:
            while self._writer or self._readers:
                self._cond.wait()
            self._writer = True

    def release_write(self):
        with self._cond:
            self._writer = False
            self._cond.notify_all()


class _ReadGuard:
    def __init__(self, lock):
        self._lock = lock

    def __enter__(self):
        self._lock.acquire_read()

    def __exit__(self, *exc):
        self._lock.release_read()


class _WriteGuard:
    def __init__(self, lock):
        self._lock = lock

    def __enter__(self):
        self._lock.acquire_write()

    def __exit__(self, *exc):
        self._lock.release_write()


def _splitmix64(x: int) -> int:
    x &= 0xFFFFFFFFFFFFFFFF
    z = (x + 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
    return z ^ (z >> 31)


@dataclass
class HnswParams:
    m: int = 16
    ef_construction: int = 200
    ef_search: int = 64
    seed: int = 0
    compaction_threshold: float = 0.20

    @property
    def m0(self) -> int:
        return 2 * self.m


class VectorIndex:
    """HNSW index with cosine scoring and deterministic tie-breaking.

    Results are sorted by descending score, ties broken by ascending entry
    id. When the number of live entries is at most the effective ef_search,
    search falls back to the exact scan, so small indexes are always exact.
    """

    def __init__(self, dimension: int = EMBEDDING_DIM, params: HnswParams | None = None):
        self.dimension = dimension
        self.params = params or HnswParams()
        self._lock = _RWLock()
        self._init_storage(capacity=1024)

    def _init_storage(self, capacity: int):
        p = self.params
        self._cap = capacity
        self._vecs = np.zeros((capacity, self.dimension), dtype=np.float32)
        self._adj0 = np.full((capacity, p.m0), -1, dtype=np.int32)
        self._cnt0 = np.zeros(capacity, dtype=np.int32)
        self._dead = np.zeros(capacity, dtype=np.uint8)
        self._no_dead = np.zeros(capacity, dtype=np.uint8)  # all-live mask for construction
        self._upper: dict[int, dict[int, list[int]]] = {}
        self._levels: list[int] = []
        self._ext_ids: list[int] = []
        self._payload_refs: list[str] = []
        self._id_to_slot: dict[int, int] = {}
        self._n_slots = 0
        self._n_dead = 0
        self._entry = -1
        self._max_level = -1
        self._counter = 0
        self._visited_pool: list[tuple[np.ndarray, list[int]]] = []
        self._pool_lock = threading.Lock()

    # --- basic introspection ---

    def __len__(self) -> int:
        return self._n_slots - self._n_dead

    def __contains__(self, entry_id: int) -> bool:
        return entry_id in self._id_to_slot

    @property
    def tombstones(self) -> int:
        return self._n_dead

    def payload_ref(self, entry_id: int) -> str:
        slot = self._id_to_slot[entry_id]
        return self._payload_refs[slot]

    def vector(self, entry_id: int) -> np.ndarray:
        slot = self._id_to_slot[entry_id]
        return self._vecs[slot].copy()

    def ids(self) -> list[int]:
        return list(self._id_to_slot.keys())

    # --- internals ---

    def _level_for(self, counter: int) -> int:
        h = _splitmix64(self.params.seed * 0x9E3779B97F4A7C15 + counter)
        u = ((h >> 11) + 1) / (1 << 53)
        return int(-math.log(u) / math.log(self.params.m))

    def _grow(self):
        newcap = self._cap * 2
        for name, fill in (
            ("_vecs", 0),
            ("_adj0", -1),
            ("_cnt0", 0),
            ("_dead", 0),
            ("_no_dead", 0),
        ):
            old = getattr(self, name)
            arr = np.full((newcap,) + old.shape[1:], fill, dtype=old.dtype)
            arr[: self._cap] = old
            setattr(self, name, arr)
        self._cap = newcap
        with self._pool_lock:
            self._visited_pool.clear()

    def _acquire_visited(self) -> tuple[np.ndarray, list[int]]:
        with self._pool_lock:
            if self._visited_pool:
                return self._visited_pool.pop()
        return np.zeros(self._cap, dtype=np.int64), [0]

    def _release_visited(self, item: tuple[np.ndarray, list[int]]):
        if item[0].shape[0] != self._cap:
            return  # stale after growth; drop
        with self._pool_lock:
            if len(self._visited_pool) < 16:
                self._visited_pool.append(item)

    def _check_vector(self, vector) -> np.ndarray:
        vec = np.asarray(vector, dtype=np.float32)
        if vec.shape != (self.dimension,):
            raise DimensionMismatch(
                f"vector has shape {vec.shape}, index dimension is {self.dimension}"
            )
        return vec

    def _greedy_upper(self, q: np.ndarray, entry: int, layer: int) -> int:
        vecs = self._vecs
        graph = self._upper.get(layer, {})
        cur = entry
        cur_sim = float(vecs[cur] @ q)
        while True:
            nbrs = graph.get(cur)
            if not nbrs:
                return cur
            arr = np.asarray(nbrs, dtype=np.int64)
            sims = vecs[arr] @ q
            best = int(np.argmax(sims))
            if sims[best] > cur_sim:
                cur = int(arr[best])
                cur_sim = float(sims[best])
            else:
                return cur

    def _beam_upper(self, q, entry, layer, ef):
        import heapq

        vecs = self._vecs
        graph = self._upper.get(layer, {})
        esim = float(vecs[entry] @ q)
        seen = {entry}
        cand = [(-esim, entry)]
        res = [(esim, entry)]
        worst = esim
        while cand:
            nsim, cur = heapq.heappop(cand)
            if -nsim < worst and len(res) >= ef:
                break
            for nb in graph.get(cur, ()):
                if nb in seen:
                    continue
                seen.add(nb)
                s = float(vecs[nb] @ q)
                if len(res) < ef or s > worst:
                    heapq.heappush(cand, (-s, nb))
                    heapq.heappush(res, (s, nb))
                    if len(res) > ef:
                        heapq.heappop(res)
                    worst = res[0][0]
        res.sort(reverse=True)
        return (
            np.array([r[1] for r in res], dtype=np.int32),
            np.array([r[0] for r in res], dtype=np.float32),
        )

    def _insert_slot(self, slot: int, level: int):
        """Wire an already-stored slot into the graph."""
        p = self.params
        if self._entry < 0:
            self._entry = slot
            self._max_level = level
            for layer in range(1, level + 1):
                self._upper.setdefault(layer, {})[slot] = []
            return
        q = self._vecs[slot]
        cur = self._entry
        for layer in range(self._max_level, level, -1):
            cur = self._greedy_upper(q, cur, layer)
        for layer in range(min(level, self._max_level), 0, -1):
            graph = self._upper.setdefault(layer, {})
            rids, rsims = self._beam_upper(q, cur, layer, p.ef_construction)
            out = np.empty(p.m, dtype=np.int32)
            nsel = _k.select_neighbors(self._vecs, rids, rsims, p.m, out)
            sel = [int(x) for x in out[:nsel]]
            graph[slot] = sel
            for nb in sel:
                lst = graph.setdefault(nb, [])
                lst.append(slot)
                if len(lst) > p.m:
                    arr = np.asarray(lst, dtype=np.int32)
                    sims = (self._vecs[arr] @ self._vecs[nb]).astype(np.float32)
                    order = np.lexsort((arr, -sims))
                    out2 = np.empty(p.m, dtype=np.int32)
                    n2 = _k.select_neighbors(
                        self._vecs, arr[order], sims[order], p.m, out2
                    )
                    graph[nb] = [int(x) for x in out2[:n2]]
            if len(rids):
                cur = int(rids[0])
        visited, stamp_box = self._acquire_visited()
        stamp_box[0] += 1
        _k.connect_l0(
            self._vecs,
            self._adj0,
            self._cnt0,
            slot,
            cur,
            p.ef_construction,
            p.m,
            p.m0,
            visited,
            stamp_box[0],
            self._no_dead,
        )
        self._release_visited((visited, stamp_box))
        if level > self._max_level:
            self._max_level = level
            self._entry = slot
            for layer in range(1, level + 1):
                self._upper.setdefault(layer, {}).setdefault(slot, [])

    # --- public mutation API ---

    def insert(self, entry: IndexEntry) -> None:
        """Insert an entry; it is searchable immediately."""
        vec = self._check_vector(entry.vector)
        with _WriteGuard(self._lock):
            if entry.id in self._id_to_slot:
                raise DuplicateId(f"id {entry.id} already present")
            if self._n_slots >= self._cap:
                self._grow()
            slot = self._n_slots
            self._vecs[slot] = vec
            level = self._level_for(self._counter)
            self._counter += 1
            self._levels.append(level)
            self._ext_ids.append(int(entry.id))
            self._payload_refs.append(entry.payload_ref)
            self._id_to_slot[int(entry.id)] = slot
            self._n_slots += 1
            self._insert_slot(slot, level)

    def remove(self, entry_id: int) -> bool:
        """Tombstone an entry. Returns True iff it existed."""
        with _WriteGuard(self._lock):
            slot = self._id_to_slot.pop(entry_id, None)
            if slot is None:
                return False
            self._dead[slot] = 1
            self._n_dead += 1
            if (
                self._n_slots > 0
                and self._n_dead / self._n_slots > self.params.compaction_threshold
            ):
                self._compact()
            return True

    def _compact(self):
        """Rebuild the graph from live entries (slot order preserved)."""
        live = [
            (self._ext_ids[s], self._vecs[s].copy(), self._payload_refs[s])
            for s in range(self._n_slots)
            if not self._dead[s]
        ]
        counter = self._counter
        self._init_storage(capacity=max(1024, 2 * len(live)))
        self._counter = counter
        for ext_id, vec, ref in live:
            slot = self._n_slots
            self._vecs[slot] = vec
            level = self._level_for(self._counter)
            self._counter += 1
            self._levels.append(level)
            self._ext_ids.append(ext_id)
            self._payload_refs.append(ref)
            self._id_to_slot[ext_id] = slot
            self._n_slots += 1
            self._insert_slot(slot, level)

    # --- search ---

    def _exact_hits(self, q: np.ndarray, k: int) -> list[SearchHit]:
        n = self._n_slots
        if n == 0:
            return []
        sims = self._vecs[:n] @ q
        ext = np.fromiter(self._ext_ids, dtype=np.int64, count=n)
        alive = self._dead[:n] == 0
        sims = sims[alive]
        ext = ext[alive]
        if ext.size == 0:
            return []
        order = np.lexsort((ext, -sims))[:k]
        return [
            SearchHit(id=int(ext[i]), score=float(np.clip(sims[i], -1.0, 1.0)))
            for i in order
        ]

    def brute_force_search(self, query, k: int) -> list[SearchHit]:
        """Exact top-k by cosine; the testing oracle for search()."""
        q = self._check_vector(query)
        with _ReadGuard(self._lock):
            return self._exact_hits(q, k)

    def search(self, query, k: int, ef_search: int | None = None) -> list[SearchHit]:
        """Approximate top-k by cosine (exact when the index is small)."""
        q = self._check_vector(query)
        p = self.params
        ef = max(ef_search or p.ef_search, k)
        with _ReadGuard(self._lock):
            live = self._n_slots - self._n_dead
            if live == 0:
                return []
            if live <= ef:
                return self._exact_hits(q, k)
            cur = self._entry
            for layer in range(self._max_level, 0, -1):
                cur = self._greedy_upper(q, cur, layer)
            visited, stamp_box = self._acquire_visited()
            stamp_box[0] += 1
            slots, sims = _k.beam_search_l0(
                self._vecs,
                self._adj0,
                self._cnt0,
                self._dead,
                cur,
                q,
                ef,
                visited,
                stamp_box[0],
            )
            self._release_visited((visited, stamp_box))
            ext = np.array([self._ext_ids[s] for s in slots], dtype=np.int64)
            order = np.lexsort((ext, -sims))[:k]
            return [
                SearchHit(id=int(ext[i]), score=float(np.clip(sims[i], -1.0, 1.0)))
                for i in order
            ]

    # --- persistence ---

    def save(self, path) -> None:
        """Serialize to the JSVI binary format (CRC32-checksummed)."""
        with _ReadGuard(self._lock):
            out = bytearray()
            out += _MAGIC
            out += struct.pack("<B", _FORMAT_VERSION)
            p = self.params
            out += struct.pack(
                "<IHHIIqQQQqi",
                self.dimension,
                p.m,
                p.m0,
                p.ef_construction,
                p.ef_search,
                p.seed,
                self._counter,
                self._n_slots,
                self._n_dead,
                self._entry,
                self._max_level,
            )
            for slot in range(self._n_slots):
                ref = self._payload_refs[slot].encode("utf-8")
                out += struct.pack(
                    "<qHBI",
                    self._ext_ids[slot],
                    self._levels[slot],
                    int(self._dead[slot]),
                    len(ref),
                )
                out += ref
                out += self._vecs[slot].tobytes()
            for slot in range(self._n_slots):
                c = int(self._cnt0[slot])
                out += struct.pack("<H", c)
                out += self._adj0[slot, :c].tobytes()
                for layer in range(1, self._levels[slot] + 1):
                    nbrs = self._upper.get(layer, {}).get(slot, [])
                    out += struct.pack("<H", len(nbrs))
                    out += np.asarray(nbrs, dtype=np.int32).tobytes()
            out += struct.pack("<I", zlib.crc32(bytes(out)) & 0xFFFFFFFF)
            with open(path, "wb") as fh:
                fh.write(bytes(out))

    @classmethod
    def load(cls, path) -> "VectorIndex":
        """Load an index saved with save(); search results are identical."""
        with open(path, "rb") as fh:
            blob = fh.read()
        if len(blob) < 9 or blob[:4] != _MAGIC:
            raise CorruptIndex("bad magic bytes")
        body, crc_bytes = blob[:-4], blob[-4:]
        (crc,) = struct.unpack("<I", crc_bytes)
        if zlib.crc32(body) & 0xFFFFFFFF != crc:
            raise CorruptIndex("checksum mismatch")
        pos = 4
        (version,) = struct.unpack_from("<B", body, pos)
        pos += 1
        if version != _FORMAT_VERSION:
            raise CorruptIndex(f"unsupported format version {version}")
        (dim, m, m0, efc, efs, seed, counter, n_slots, n_dead, entry, max_level) = (
            struct.unpack_from("<IHHIIqQQQqi", body, pos)
        )
        pos += struct.calcsize("<IHHIIqQQQqi")
        params = HnswParams(m=m, ef_construction=efc, ef_search=efs, seed=seed)
        if params.m0 != m0:
            raise CorruptIndex("inconsistent m0")
        idx = cls(dimension=dim, params=params)
        idx._init_storage(capacity=max(1024, 2 * n_slots))
        idx._counter = counter
        idx._n_slots = n_slots
        idx._n_dead = n_dead
        idx._entry = entry
        idx._max_level = max_level
        vec_bytes = dim * 4
        try:
            for slot in range(n_slots):
                ext_id, level, dead, ref_len = struct.unpack_from("<qHBI", body, pos)
                pos += struct.calcsize("<qHBI")
                ref = body[pos : pos + ref_len].decode("utf-8")
                pos += ref_len
                vec = np.frombuffer(body[pos : pos + vec_bytes], dtype=np.float32)
                pos += vec_bytes
                idx._vecs[slot] = vec
                idx._levels.append(level)
                idx._ext_ids.append(ext_id)
                idx._payload_refs.append(ref)
                idx._dead[slot] = dead
                if not dead:
                    idx._id_to_slot[ext_id] = slot
            for slot in range(n_slots):
                (c,) = struct.unpack_from("<H", body, pos)
                pos += 2
                nbrs = np.frombuffer(body[pos : pos + 4 * c], dtype=np.int32)
                pos += 4 * c
                idx._adj0[slot, :c] = nbrs
                idx._cnt0[slot] = c
                for layer in range(1, idx._levels[slot] + 1):
                    (cu,) = struct.unpack_from("<H", body, pos)
                    pos += 2
                    unbrs = np.frombuffer(body[pos : pos + 4 * cu], dtype=np.int32)
                    pos += 4 * cu
                    idx._upper.setdefault(layer, {})[slot] = [int(x) for x in unbrs]
        except struct.error as exc:
            raise CorruptIndex(f"truncated index file: {exc}") from exc
        if pos != len(body):
            raise CorruptIndex("trailing bytes after graph section")
        return idx
