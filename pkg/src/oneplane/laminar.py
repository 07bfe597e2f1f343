"""Laminar-family machinery over face intervals.

Enclosed face sets of cycles in a plane graph become unions of intervals
once faces are numbered by a preorder of the dual spanning tree: every
cycle cuts the dual tree in a set of subtree intervals and the enclosed
faces are exactly those covered an odd number of times.  All family
operations (nesting forest, intersection detection) then run on sorted
position runs with a single sweep.

Positions are 0-based here; :func:`interval_forest` exposes the 1-based
cyclic interval interface and converts.
"""

from __future__ import annotations

from array import array
from bisect import bisect_right
from dataclasses import dataclass

from . import metrics
from .errors import err


@dataclass
class ForestResult:
    kind: str  # "forest" or "intersecting"
    parents: list = None  # item index -> parent index or -1
    pair: tuple = None  # (item a, item b)
    witness: tuple = None  # (shared, only_a, only_b) positions


def runs_size(runs) -> int:
    return sum(b - a + 1 for a, b in runs)


def runs_member(runs, pos: int) -> bool:
    i = bisect_right(runs, (pos, float("inf"))) - 1
    return i >= 0 and runs[i][0] <= pos <= runs[i][1]


def set_relation(runs_a, runs_b):
    """Compare two position sets given as sorted inclusive runs.

    Returns (verdict, shared, only_a, only_b) where verdict is one of
    "equal", "a_in_b", "b_in_a", "disjoint", "intersect" and the three
    witness positions are filled when they exist (None otherwise).
    """
    shared = only_a = only_b = None
    i = j = 0
    while i < len(runs_a) and j < len(runs_b):
        a1, a2 = runs_a[i]
        b1, b2 = runs_b[j]
        lo, hi = max(a1, b1), min(a2, b2)
        if lo <= hi and shared is None:
            shared = lo
        if a1 < b1 and only_a is None:
            only_a = a1
        if b1 < a1 and only_b is None:
            only_b = b1
        if a2 < b2:
            if a2 >= b1 and a2 + 1 <= b2 and only_b is None:
                only_b = a2 + 1
            i += 1
        elif b2 < a2:
            if b2 >= a1 and b2 + 1 <= a2 and only_a is None:
                only_a = b2 + 1
            j += 1
        else:
            i += 1
            j += 1
    if i < len(runs_a) and only_a is None:
        only_a = runs_a[i][0]
    if j < len(runs_b) and only_b is None:
        only_b = runs_b[j][0]
    metrics.bump(len(runs_a) + len(runs_b), "laminar")
    if shared is None:
        return "disjoint", None, only_a, only_b
    if only_a is None and only_b is None:
        return "equal", shared, None, None
    if only_a is None:
        return "a_in_b", shared, None, only_b
    if only_b is None:
        return "b_in_a", shared, only_a, None
    return "intersect", shared, only_a, only_b


def runs_laminar(items, npos: int) -> ForestResult:
    """Nesting forest of position sets, or a proven intersecting pair.

    ``items`` is a list of run lists (sorted, inclusive, non-adjacent).
    One sweep over positions maintains the active nesting stack; every
    run push is checked against the stack top, which simultaneously
    verifies that each child run stays inside its parent's active run.
    """
    k = len(items)
    starts = {}
    for i, runs in enumerate(items):
        for ridx, (a, b) in enumerate(runs):
            if not (0 <= a <= b < npos):
                raise err("INDEX_OUT_OF_RANGE", f"run ({a},{b}) outside 0..{npos - 1}")
            starts.setdefault(a, []).append((i, ridx))
    sizes = [runs_size(r) for r in items]
    parent = [-2] * k
    cur_end = [-1] * k
    stack = []

    def prove(i, j):
        verdict, shared, oa, ob = set_relation(items[i], items[j])
        if verdict == "intersect":
            return ForestResult("intersecting", pair=(i, j), witness=(shared, oa, ob))
        return None

    for p in sorted(starts):
        while stack and cur_end[stack[-1]] < p:
            stack.pop()
        entering = starts[p]
        entering.sort(key=lambda ir: (-items[ir[0]][ir[1]][1], -sizes[ir[0]], ir[0]))
        for i, ridx in entering:
            while stack and cur_end[stack[-1]] < p:
                stack.pop()
            b = items[i][ridx][1]
            if stack:
                t = stack[-1]
                bt = cur_end[t]
                if b > bt:
                    # run sticks out of the active enclosing run: the new
                    # item owns bt+1, the top owns p-1, both own p
                    return ForestResult(
                        "intersecting", pair=(i, t), witness=(p, bt + 1, p - 1)
                    )
            if ridx == 0:
                parent[i] = stack[-1] if stack else -1
            else:
                top = stack[-1] if stack else -1
                if top != parent[i]:
                    for a_, b_ in ((i, top), (i, parent[i]), (top, parent[i])):
                        if a_ >= 0 and b_ >= 0:
                            res = prove(a_, b_)
                            if res is not None:
                                return res
                    raise AssertionError("resume mismatch without intersecting pair")
            stack.append(i)
            cur_end[i] = b
        metrics.bump(len(entering) + 1, "laminar")
    for i in range(k):
        if parent[i] == -2:
            parent[i] = -1  # items with no runs are isolated roots
    return ForestResult("forest", parents=parent)


def interval_forest(delta: int, intervals) -> ForestResult:
    """Cyclic 1-based interval family on positions 1..delta.

    An interval (i, j) covers i, i+1, ..., j with wraparound when j < i.
    Returns the nesting forest or a proven intersecting pair; witnesses
    are reported as 1-based positions.
    """
    if delta < 2:
        raise err("INVALID_INPUT", f"need delta >= 2, got {delta}")
    items = []
    for i, j in intervals:
        if not (1 <= i <= delta and 1 <= j <= delta):
            raise err("INDEX_OUT_OF_RANGE", f"interval ({i},{j}) outside 1..{delta}")
        if i <= j:
            runs = [(i - 1, j - 1)]
        elif j == i - 1:
            runs = [(0, delta - 1)]  # full circle
        else:
            runs = [(0, j - 1), (i - 1, delta - 1)]
        items.append(runs)
    res = runs_laminar(items, delta)
    if res.kind == "intersecting":
        s, oa, ob = res.witness
        res.witness = (s + 1, oa + 1, ob + 1)
    return res


class DualTree:
    """Spanning tree of the face adjacency, rooted at the outer face.

    ``tin``/``tout`` give preorder intervals (half open) and ``pos_face``
    maps a preorder position back to its face.
    """

    __slots__ = ("parent_face", "parent_seg", "tin", "tout", "pos_face", "tree_seg_child")

    def __init__(self, g):
        nf = g.nfaces
        self.parent_face = array("i", [-1]) * nf
        self.parent_seg = array("i", [-1]) * nf
        # which child face does each segment hang, -1 if not a tree edge
        self.tree_seg_child = array("i", [-1]) * g.nseg
        root = g.outer_face
        seen = bytearray(nf)
        seen[root] = 1
        children = [[] for _ in range(nf)]
        queue = [root]
        qi = 0
        fo, fn, fd = g.face_of, g.face_next, g.face_dart
        while qi < len(queue):
            f = queue[qi]
            qi += 1
            d0 = fd[f]
            d = d0
            while True:
                f2 = fo[d ^ 1]
                if not seen[f2]:
                    seen[f2] = 1
                    self.parent_face[f2] = f
                    self.parent_seg[f2] = d >> 1
                    self.tree_seg_child[d >> 1] = f2
                    children[f].append(f2)
                    queue.append(f2)
                d = fn[d]
                if d == d0:
                    break
        self.tin = array("i", [-1]) * nf
        self.tout = array("i", [-1]) * nf
        self.pos_face = array("i", [-1]) * nf
        t = 0
        stack = [(root, False)]
        while stack:
            f, done = stack.pop()
            if done:
                self.tout[f] = t
                continue
            self.tin[f] = t
            self.pos_face[t] = f
            t += 1
            stack.append((f, True))
            for c in reversed(children[f]):
                stack.append((c, False))
        metrics.bump(g.ndarts + nf, "laminar")


def cycle_runs(g, dt: DualTree, nodes) -> list:
    """Enclosed faces of a cycle as sorted inclusive position runs.

    A face is enclosed iff the dual tree path from the outer face crosses
    the cycle an odd number of times, i.e. iff its preorder position is
    covered by an odd number of subtree intervals of cycle segments that
    are dual tree edges.
    """
    from .planar import cycle_segments

    segs = cycle_segments(g, nodes)
    flips = []
    for s in segs:
        c = dt.tree_seg_child[s]
        if c != -1:
            flips.append(dt.tin[c])
            flips.append(dt.tout[c])
    flips.sort()
    runs = []
    for i in range(0, len(flips) - 1, 2):
        a, b = flips[i], flips[i + 1]
        if a < b:
            if runs and runs[-1][1] == a - 1:
                runs[-1] = (runs[-1][0], b - 1)
            else:
                runs.append((a, b - 1))
    metrics.bump(len(segs) + len(flips), "laminar")
    return runs


def faces_of_runs(dt: DualTree, runs):
    for a, b in runs:
        for p in range(a, b + 1):
            yield dt.pos_face[p]


def cycle_forest(g, cycles) -> ForestResult:
    """Nesting forest of a family of cycles, or an intersecting pair.

    ``g`` is a PlaneGraph, ``cycles`` a list of node-id sequences.  On an
    intersecting pair the witness is reported as faces (shared face,
    face only inside the first, face only inside the second).
    """
    dt = DualTree(g)
    items = [cycle_runs(g, dt, nodes) for nodes in cycles]
    res = runs_laminar(items, g.nfaces)
    if res.kind == "intersecting":
        s, oa, ob = res.witness
        res.witness = (dt.pos_face[s], dt.pos_face[oa], dt.pos_face[ob])
    return res
