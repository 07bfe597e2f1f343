"""Ring augmentation: enclose every crossing in an 8-cycle of new edges.

Each crossing c with corner vertices u1..u4 (counterclockwise) gains four
degree-2 vertices w1..w4 and eight crossing-free edges forming the ring
u1, w1, u2, w2, u3, w3, u4, w4.  Ring edges enter each corner's rotation
directly beside the dart of the crossed edge toward c, so the ring's
interior contains the crossing and nothing else.  The augmented instance
is circular: its crossing-free subgraph spans the graph and holds all
four corners of every crossing inside one biconnected block, which the
downstream cycle analysis requires.  ``restrict`` removes the recorded
rings from a (possibly re-embedded) instance.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import metrics
from .errors import err
from .ope import OnePlaneEmbedding, validate
from .planar import induced_subembedding


@dataclass(frozen=True)
class CircularAugmentation:
    rings: dict  # crossing id -> (w1, w2, w3, w4)
    ring_edges: dict  # crossing id -> 8 edge ids in ring-walk order
    orig_vertices: frozenset
    orig_edges: frozenset


def circularize(emb: OnePlaneEmbedding):
    """Ring every crossing not already ringed; returns (augmented, aug).

    Crossings listed in ``emb.aug`` are treated as ringed by an earlier
    pass and left alone, so the returned augmentation undoes exactly this
    call and ``restrict(circularize(x))`` is the identity for any valid
    input, augmented or not.
    """
    validate(emb)
    out = emb.copy()
    rings = {}
    ring_edges = {}
    next_v = max(out.vertices) + 1
    next_e = max(out.edges) + 1
    outer_e, outer_v = out.outer

    for x in sorted(out.crossings):
        if x in emb.aug:
            continue
        e1, e2, corners = out.crossings[x]
        ws = tuple(range(next_v, next_v + 4))
        next_v += 4
        eids = tuple(range(next_e, next_e + 8))
        next_e += 8
        for i in range(4):
            u, w, unext = corners[i], ws[i], corners[(i + 1) % 4]
            out.edges[eids[2 * i]] = (u, w)
            out.edges[eids[2 * i + 1]] = (w, unext)
            out.rotation[w] = [eids[2 * i], eids[2 * i + 1]]
            out.vertices.add(w)
        for j in range(4):
            u = corners[j]
            ej = e1 if j % 2 == 0 else e2
            to_wj = eids[2 * j]  # (u_j, w_j), lands before the crossed dart
            to_wprev = eids[(2 * j - 1) % 8]  # (w_{j-1}, u_j), after it
            rot = out.rotation[u]
            k = rot.index(ej)
            rot[k : k + 1] = [to_wj, ej, to_wprev]
            # the crossed dart's left corner is now a ring pocket; move an
            # outer marker that pointed along it onto the ring edge whose
            # left side is the split-off remainder of the old outer face
            if ej == outer_e and u == outer_v:
                outer_e, outer_v = to_wprev, u
        rings[x] = ws
        ring_edges[x] = eids
        out.aug[x] = ws

    out.outer = (outer_e, outer_v)
    validate(out)
    metrics.bump(len(out.vertices) + len(out.edges), "circular")
    return out, CircularAugmentation(
        rings=rings,
        ring_edges=ring_edges,
        orig_vertices=frozenset(emb.vertices),
        orig_edges=frozenset(emb.edges),
    )


def restrict(emb: OnePlaneEmbedding, aug: CircularAugmentation) -> OnePlaneEmbedding:
    """Remove the rings recorded in ``aug`` from a re-embedded instance."""
    crossed = emb.crossed_edges()
    drop = set()
    for x, ws in aug.rings.items():
        if x not in emb.crossings:
            raise err("AUGMENTATION_MISMATCH", f"crossing {x} disappeared", x)
        cset = set(emb.crossings[x][2])
        deg = {u: 0 for u in cset}
        for e in aug.ring_edges[x]:
            if e not in emb.edges:
                raise err("AUGMENTATION_MISMATCH", f"ring edge {e} missing", e)
            if e in crossed:
                raise err("AUGMENTATION_MISMATCH", f"ring edge {e} is crossed", e)
            a, b = emb.edges[e]
            if a in cset:
                a, b = b, a
            if a not in ws or b not in cset:
                raise err(
                    "AUGMENTATION_MISMATCH",
                    f"ring edge {e} does not join a ring vertex to a corner of {x}",
                    e,
                )
            deg[b] += 1
        if any(d != 2 for d in deg.values()):
            raise err("AUGMENTATION_MISMATCH", f"ring of {x} misses a corner", x)
        for w in ws:
            if w not in emb.vertices:
                raise err("AUGMENTATION_MISMATCH", f"ring vertex {w} missing", w)
            rot = emb.rotation[w]
            if len(rot) != 2 or any(e not in aug.ring_edges[x] for e in rot):
                raise err(
                    "AUGMENTATION_MISMATCH",
                    f"ring vertex {w} is not a bare degree-2 ring vertex",
                    w,
                )
        drop.update(ws)
    if not drop:
        return emb.copy()
    sub = induced_subembedding(emb, emb.vertices - drop)
    validate(sub)
    metrics.bump(len(emb.vertices), "circular")
    return sub


def _blocks_of(adj):
    """Biconnected components (as vertex sets) of an adjacency-list graph."""
    num = {}
    low = {}
    comps = []
    estack = []  # DFS edge stack of (a, b)
    clock = 0
    for root in adj:
        if root in num:
            continue
        clock += 1
        num[root] = low[root] = clock
        work = [(root, None, iter(adj[root]))]
        while work:
            a, parent, it = work[-1]
            child = None
            for b in it:
                if b == parent:
                    continue
                if b in num:
                    if num[b] < num[a]:  # back edge, charged to descendant
                        estack.append((a, b))
                        if num[b] < low[a]:
                            low[a] = num[b]
                else:
                    estack.append((a, b))
                    clock += 1
                    num[b] = low[b] = clock
                    child = b
                    break
            if child is not None:
                work.append((child, a, iter(adj[child])))
                continue
            work.pop()
            if not work:
                continue
            p = work[-1][0]
            if low[a] < low[p]:
                low[p] = low[a]
            if low[a] >= num[p]:  # p separates a's subtree; pop its block
                comp = set()
                while estack:
                    u, v = estack.pop()
                    comp.add(u)
                    comp.add(v)
                    if (u, v) == (p, a):
                        break
                comps.append(comp)
    return comps


def is_circular(emb: OnePlaneEmbedding) -> bool:
    """Whether the crossing-free subgraph spans the vertices in one
    connected piece and each crossing's corners share one of its blocks."""
    crossed = emb.crossed_edges()
    adj = {v: [] for v in emb.vertices}
    for e, (u, v) in emb.edges.items():
        if e not in crossed:
            adj[u].append(v)
            adj[v].append(u)
    if not emb.vertices:
        return True
    seen = set()
    seed = next(iter(emb.vertices))
    stack = [seed]
    seen.add(seed)
    while stack:
        a = stack.pop()
        for b in adj[a]:
            if b not in seen:
                seen.add(b)
                stack.append(b)
    if seen != emb.vertices:
        return False
    comps = _blocks_of(adj)
    metrics.bump(len(emb.vertices) + len(emb.edges), "circular")
    for x, (_e1, _e2, corners) in emb.crossings.items():
        need = set(corners)
        if not any(need <= comp for comp in comps):
            return False
    return True
