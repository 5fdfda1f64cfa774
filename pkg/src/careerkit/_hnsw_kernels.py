"""Numba kernels for the layer-0 HNSW hot path.

Layer 0 holds every entry, so beam search and neighbor wiring there dominate
build and query cost; upper layers are sparse and stay in plain Python.
fastmath dots are deterministic per build of this module on one machine;
across CPU generations scores may differ in the last ulp (ordering-stable
for all practical ties, and all tests pin ordering by id anyway).
"""

import numpy as np
from numba import njit

_JIT = dict(cache=True, fastmath=True)


@njit(**_JIT)
def _dot(vecs, a, q):
    s = np.float32(0.0)
    row = vecs[a]
    for i in range(row.shape[0]):
        s += row[i] * q[i]
    return s


@njit(**_JIT)
def _heap_push(sims, ids, size, sim, node, is_min):
    i = size
    sims[i] = sim
    ids[i] = node
    while i > 0:
        parent = (i - 1) >> 1
        if (sims[i] < sims[parent]) if is_min else (sims[i] > sims[parent]):
            sims[i], sims[parent] = sims[parent], sims[i]
            ids[i], ids[parent] = ids[parent], ids[i]
            i = parent
        else:
            break
    return size + 1


@njit(**_JIT)
def _heap_pop(sims, ids, size, is_min):
    top_sim = sims[0]
    top_id = ids[0]
    size -= 1
    sims[0] = sims[size]
    ids[0] = ids[size]
    i = 0
    while True:
        left = 2 * i + 1
        right = left + 1
        best = i
        if left < size and (
            (sims[left] < sims[best]) if is_min else (sims[left] > sims[best])
        ):
            best = left
        if right < size and (
            (sims[right] < sims[best]) if is_min else (sims[right] > sims[best])
        ):
            best = right
        if best == i:
            break
        sims[i], sims[best] = sims[best], sims[i]
        ids[i], ids[best] = ids[best], ids[i]
        i = best
    return top_sim, top_id, size


@njit(**_JIT)
def beam_search_l0(vecs, adj, cnt, dead, entry, q, ef, visited, stamp):
    """Best-first beam search on layer 0.

    Tombstoned nodes are traversed (they keep the graph navigable) but
    excluded from results. Returns (slot_ids, sims) sorted descending by
    sim; exact tie ordering is finalized by the caller.
    """
    res_sims = np.empty(ef + 1, dtype=np.float32)
    res_ids = np.empty(ef + 1, dtype=np.int32)
    res_size = 0
    cand_cap = 256 + ef * adj.shape[1]
    cand_sims = np.empty(cand_cap, dtype=np.float32)
    cand_ids = np.empty(cand_cap, dtype=np.int32)
    cand_size = 0

    esim = _dot(vecs, entry, q)
    visited[entry] = stamp
    cand_size = _heap_push(cand_sims, cand_ids, cand_size, esim, entry, False)
    if dead[entry] == 0:
        res_size = _heap_push(res_sims, res_ids, res_size, esim, entry, True)

    while cand_size > 0:
        csim, cid, cand_size = _heap_pop(cand_sims, cand_ids, cand_size, False)
        if res_size >= ef and csim < res_sims[0]:
            break
        c = cnt[cid]
        for j in range(c):
            nb = adj[cid, j]
            if visited[nb] == stamp:
                continue
            visited[nb] = stamp
            s = _dot(vecs, nb, q)
            if res_size < ef or s > res_sims[0]:
                if cand_size < cand_cap:
                    cand_size = _heap_push(cand_sims, cand_ids, cand_size, s, nb, False)
                if dead[nb] == 0:
                    res_size = _heap_push(res_sims, res_ids, res_size, s, nb, True)
                    if res_size > ef:
                        _, _, res_size = _heap_pop(res_sims, res_ids, res_size, True)

    out_sims = np.empty(res_size, dtype=np.float32)
    out_ids = np.empty(res_size, dtype=np.int32)
    sz = res_size
    for i in range(res_size - 1, -1, -1):
        s, nid, sz = _heap_pop(res_sims, res_ids, sz, True)
        out_sims[i] = s
        out_ids[i] = nid
    return out_ids, out_sims


@njit(**_JIT)
def select_neighbors(vecs, cand_ids, cand_sims, m, out):
    """Diversity-pruning neighbor selection (candidates sorted desc by sim).

    A candidate is kept only if it is closer to the query than to every
    already-kept neighbor; this spreads edges across directions, which is
    what makes greedy graph routing work. Returns the number selected.
    """
    n = cand_ids.shape[0]
    nsel = 0
    for i in range(n):
        if nsel == m:
            break
        c = cand_ids[i]
        keep = True
        for j in range(nsel):
            if _dot(vecs, c, vecs[out[j]]) > cand_sims[i]:
                keep = False
                break
        if keep:
            out[nsel] = c
            nsel += 1
    return nsel


@njit(**_JIT)
def connect_l0(vecs, adj, cnt, idx, entry, ef, m, m0, visited, stamp, no_dead):
    """Wire node idx into layer 0 (graph must be non-empty).

    Runs the construction beam from entry, picks up to m diverse neighbors,
    and adds reverse edges, re-pruning any neighbor that overflows m0.
    Returns the nearest slot found (next layer's entry point).
    """
    q = vecs[idx]
    rids, rsims = beam_search_l0(vecs, adj, cnt, no_dead, entry, q, ef, visited, stamp)
    sel = np.empty(m, dtype=np.int32)
    nsel = select_neighbors(vecs, rids, rsims, m, sel)
    for i in range(nsel):
        adj[idx, i] = sel[i]
    cnt[idx] = nsel

    buf_ids = np.empty(m0 + 1, dtype=np.int32)
    buf_sims = np.empty(m0 + 1, dtype=np.float32)
    out = np.empty(m0, dtype=np.int32)
    for i in range(nsel):
        nb = sel[i]
        c = cnt[nb]
        if c < m0:
            adj[nb, c] = idx
            cnt[nb] = c + 1
        else:
            for j in range(c):
                buf_ids[j] = adj[nb, j]
                buf_sims[j] = _dot(vecs, adj[nb, j], vecs[nb])
            buf_ids[c] = idx
            buf_sims[c] = _dot(vecs, idx, vecs[nb])
            # insertion sort desc by sim, ties by ascending slot
            for a in range(1, c + 1):
                ks = buf_sims[a]
                ki = buf_ids[a]
                b = a - 1
                while b >= 0 and (
                    buf_sims[b] < ks or (buf_sims[b] == ks and buf_ids[b] > ki)
                ):
                    buf_sims[b + 1] = buf_sims[b]
                    buf_ids[b + 1] = buf_ids[b]
                    b -= 1
                buf_sims[b + 1] = ks
                buf_ids[b + 1] = ki
            n2 = select_neighbors(vecs, buf_ids[: c + 1], buf_sims[: c + 1], m0, out)
            for j in range(n2):
                adj[nb, j] = out[j]
            for j in range(n2, m0):
                adj[nb, j] = -1
            cnt[nb] = n2
    if rids.shape[0] > 0:
        return rids[0]
    return entry
