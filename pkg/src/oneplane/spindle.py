"""Spindle flips: mirror one side of a cycle through its two junctions.

A spindle is a cycle C with two junction vertices u, v such that no other
node of C has an edge into the side that stays fixed.  Flipping reflects
the chosen side through the u,v axis: rotations of nodes strictly on that
side reverse, non-junction cycle nodes reverse, and at each junction the
contiguous dart arc spanning the flipped side reverses in place.

Sets of spindles flip in aggregate: every node reverses once per
enclosing flipped side, so only the parity of that count matters, and
junction arcs reverse innermost first.  The result is independent of
flip order because the flipped sides form a laminar family (checked).
"""

from __future__ import annotations

from dataclasses import dataclass

from . import metrics
from .errors import err
from .laminar import DualTree, cycle_runs, runs_laminar, runs_member
from .ope import OnePlaneEmbedding
from .planar import cycle_segments, planarize


@dataclass(frozen=True)
class Spindle:
    cycle: tuple  # node refs: ("v", id) or ("x", id)
    junctions: tuple  # (u, v) vertex ids, both on the cycle
    side: str = "in"  # "in" = enclosed side, "ex" = side with the outer face


@dataclass
class ParityTable:
    p: dict  # vertex id -> +1 (odd depth) or -1 (even)
    depth: dict  # vertex id -> number of flipped sides strictly holding it


def node_ref(g, node: int):
    kind = "v" if g.node_kind[node] == 0 else "x"
    return (kind, g.node_label[node])


def resolve_ref(g, ref) -> int:
    if isinstance(ref, str):
        kind, label = ref[0], int(ref[1:])
    else:
        kind, label = ref[0], int(ref[1])
    table = g.vnode if kind == "v" else g.xnode
    if label not in table:
        raise err("INVALID_INPUT", f"no node {kind}{label}")
    return table[label]


def _complement(runs, npos):
    out = []
    prev = 0
    for a, b in runs:
        if prev <= a - 1:
            out.append((prev, a - 1))
        prev = b + 1
    if prev <= npos - 1:
        out.append((prev, npos - 1))
    return out


class _Prep:
    """Shared geometry for one aggregate flip."""

    def __init__(self, emb: OnePlaneEmbedding, spindles):
        self.emb = emb
        self.g = g = planarize(emb)
        self.dt = dt = DualTree(g)
        self.cycles = []  # g-node lists
        self.segsets = []  # per spindle: set of segment ids
        self.sides = []  # per spindle: sorted face-position runs of flipped side
        self.junct = []  # per spindle: (gu, gv)
        for s in spindles:
            cyc = [resolve_ref(g, r) for r in s.cycle]
            segs = cycle_segments(g, cyc)
            runs = cycle_runs(g, dt, cyc)
            if s.side == "ex":
                runs = _complement(runs, g.nfaces)
            elif s.side != "in":
                raise err("INVALID_INPUT", f"unknown spindle side {s.side!r}")
            u, v = s.junctions
            if u == v:
                raise err("NOT_A_SPINDLE", f"junctions coincide at v{u}")
            if u not in g.vnode or v not in g.vnode:
                raise err("NOT_A_SPINDLE", f"junction v{u} or v{v} is not a vertex")
            gu, gv = g.vnode[u], g.vnode[v]
            if gu not in cyc or gv not in cyc:
                raise err("NOT_A_SPINDLE", f"junction not on cycle ({u}, {v})")
            self.cycles.append(cyc)
            self.segsets.append(set(segs))
            self.sides.append(runs)
            self.junct.append((gu, gv))
        res = runs_laminar(self.sides, g.nfaces)
        if res.kind == "intersecting":
            i, j = res.pair
            raise err(
                "NOT_A_SPINDLE",
                f"flipped sides of spindles {i} and {j} are intersecting",
            )
        self.forest = res.parents
        self._depths()

    def _sample_pos(self, node: int) -> int:
        g, dt = self.g, self.dt
        s, e = g.rot_start[node], g.rot_start[node + 1]
        if s == e:
            return -1
        return dt.tin[g.face_of[g.rot_list[s]]]

    def _cycle_darts_at(self, si: int, node: int):
        """The two darts of spindle si's cycle with tail at node."""
        g = self.g
        out = []
        for d in g.node_darts(node):
            if (d >> 1) in self.segsets[si]:
                out.append(d)
        if len(out) != 2:
            raise err("NOT_A_CYCLE", f"node {g.node_name(node)} on cycle {si}")
        return out

    def _depths(self):
        g, dt = self.g, self.dt
        nf = g.nfaces
        diff = [0] * (nf + 1)
        for runs in self.sides:
            for a, b in runs:
                diff[a] += 1
                diff[b + 1] -= 1
        cover = [0] * nf
        acc = 0
        for i in range(nf):
            acc += diff[i]
            cover[i] = acc
        self.pos = [self._sample_pos(n) for n in range(g.n)]
        self.depth = [cover[p] if p >= 0 else 0 for p in self.pos]
        for si, cyc in enumerate(self.cycles):
            gu, gv = self.junct[si]
            for w in cyc:
                if runs_member(self.sides[si], self.pos[w]):
                    self.depth[w] -= 1
                if w != gu and w != gv:
                    self.depth[w] += 1
        metrics.bump(g.n + nf + sum(len(c) for c in self.cycles), "spindle")

    def corner_in_side(self, si: int, dart: int) -> bool:
        return runs_member(self.sides[si], self.dt.tin[self.g.face_of[dart]])


def _check_bare_kept_side(prep: _Prep, si: int, w: int):
    """Non-junction cycle node: the kept side sector at w must be empty."""
    g = prep.g
    d1, d2 = prep._cycle_darts_at(si, w)
    # the single corner on the kept side must sit directly between the
    # two cycle darts, with no other dart in the gap
    if not prep.corner_in_side(si, d1):
        if g.rot_next[d1] != d2:
            raise err(
                "NOT_A_SPINDLE",
                f"{g.node_name(w)} reaches the kept side of spindle {si}",
            )
    elif not prep.corner_in_side(si, d2):
        if g.rot_next[d2] != d1:
            raise err(
                "NOT_A_SPINDLE",
                f"{g.node_name(w)} reaches the kept side of spindle {si}",
            )
    else:
        raise err(
            "NOT_A_SPINDLE",
            f"{g.node_name(w)} has no kept-side corner on spindle {si}",
        )


def _junction_arc(prep: _Prep, si: int, u: int):
    """Contiguous dart arc at junction u spanning the flipped side."""
    g = prep.g
    d1, d2 = prep._cycle_darts_at(si, u)
    if prep.corner_in_side(si, d1):
        start, stop = d1, d2
    elif prep.corner_in_side(si, d2):
        start, stop = d2, d1
    else:
        raise err("NOT_A_SPINDLE", f"no flipped-side corner at {g.node_name(u)}")
    arc = [start]
    d = start
    while d != stop:
        d = g.rot_next[d]
        arc.append(d)
        if len(arc) > g.degree(u):
            raise err("NOT_A_CYCLE", f"arc walk did not close at {g.node_name(u)}")
    return arc


def _forest_depth(parents):
    n = len(parents)
    out = [-1] * n
    for i in range(n):
        chain = []
        j = i
        while j != -1 and out[j] == -1:
            chain.append(j)
            j = parents[j]
        base = 0 if j == -1 else out[j]
        for k, node in enumerate(reversed(chain)):
            out[node] = base + k + 1
    return out


class _NodePlan:
    __slots__ = ("darts",)

    def __init__(self, darts):
        self.darts = list(darts)

    def reverse_span(self, i: int, j: int):
        self.darts[i : j + 1] = self.darts[i : j + 1][::-1]

    def reverse_all(self):
        self.darts.reverse()


def _build_plans(prep: _Prep):
    """Final dart order per touched node, plus per-node op logs."""
    g = prep.g
    plans = {}

    def plan_for(node):
        if node not in plans:
            plans[node] = [_NodePlan(g.node_darts(node)), []]  # plan, op log
        return plans[node]

    # junction arc reversals, innermost first
    fdepth = _forest_depth(prep.forest)
    by_junction = {}
    for si in range(len(prep.cycles)):
        for u in prep.junct[si]:
            by_junction.setdefault(u, []).append(si)
    for u, sis in by_junction.items():
        entry = plan_for(u)
        plan = entry[0]
        deg = len(plan.darts)
        index = {d: i for i, d in enumerate(plan.darts)}
        spans = []
        for si in sis:
            arc = _junction_arc(prep, si, u)
            spans.append((index[arc[0]], len(arc), fdepth[si], arc))
        # rotate the base list so no arc wraps: start at an arc start
        # that is not strictly inside any other arc (nesting makes one exist)
        shift = 0
        for i, ln, _dp, _arc in spans:
            inside = False
            for i2, ln2, _dp2, _arc2 in spans:
                if i2 == i and ln2 == ln:
                    continue
                off = (i - i2) % deg
                if 0 < off < ln2:
                    inside = True
                    break
            if not inside:
                shift = i
                break
        plan.darts = plan.darts[shift:] + plan.darts[:shift]
        entry[1].append(("rotate", shift))
        # verify contiguity against the pristine rotated list, then apply
        # the nested reversals deepest first on the fixed index ranges
        index = {d: i for i, d in enumerate(plan.darts)}
        ranges = []
        for _i, ln, dp, arc in spans:
            i = index[arc[0]]
            j = i + ln - 1
            if j >= deg or plan.darts[i : j + 1] != arc:
                raise err(
                    "NOT_A_SPINDLE", f"junction arc not contiguous at {g.node_name(u)}"
                )
            ranges.append((dp, i, j))
        # arcs must be pairwise nested or disjoint; partially overlapping
        # arcs would demand two different images for a shared wall path
        for a in range(len(ranges)):
            for b in range(a + 1, len(ranges)):
                _, i1, j1 = ranges[a]
                _, i2, j2 = ranges[b]
                if j1 < i2 or j2 < i1:
                    continue
                if (i1 <= i2 and j2 <= j1) or (i2 <= i1 and j1 <= j2):
                    continue
                raise err(
                    "NOT_A_SPINDLE",
                    f"interfering junction arcs at {g.node_name(u)}",
                )
        for _dp, i, j in sorted(ranges, reverse=True):
            plan.reverse_span(i, j)
            entry[1].append(("span", i, j))
    # whole-rotation reversals by depth parity
    for node in range(g.n):
        if prep.depth[node] % 2 == 1:
            entry = plan_for(node)
            entry[0].reverse_all()
            entry[1].append(("all",))
    # spindle-ness at non-junction cycle nodes
    for si, cyc in enumerate(prep.cycles):
        gu, gv = prep.junct[si]
        for w in cyc:
            if w != gu and w != gv:
                _check_bare_kept_side(prep, si, w)
    metrics.bump(len(plans) + g.n, "spindle")
    return plans


def _track_gap(ops, deg: int, gap: int) -> int:
    """Push a corner gap index through a node's recorded transformations.

    Gap i sits between list positions i and i+1 (mod deg).
    """
    for op in ops:
        if op[0] == "rotate":
            gap = (gap - op[1]) % deg
        elif op[0] == "span":
            i, j = op[1], op[2]
            if i <= gap < j:
                gap = i + j - 1 - gap
        else:  # whole reversal
            gap = deg - 1 if gap == deg - 1 else deg - 2 - gap
    return gap


def flip_spindles(emb: OnePlaneEmbedding, spindles) -> OnePlaneEmbedding:
    """Aggregate spindle flip; returns a new validated embedding."""
    from .ope import validate

    if not spindles:
        return emb.copy()
    prep = _Prep(emb, spindles)
    g = prep.g
    plans = _build_plans(prep)

    out = emb.copy()
    for node, (plan, _ops) in plans.items():
        label = g.node_label[node]
        if g.node_kind[node] == 0:
            out.rotation[label] = [g.dart_edge[d] for d in plan.darts]
        else:
            e1, e2, c = emb.crossings[label]
            if prep.depth[node] % 2 == 1:
                out.crossings[label] = (e1, e2, (c[0], c[3], c[2], c[1]))

    # Retarget the outer face by pushing old outer corners through the
    # rotation changes at their tail nodes.  A corner stays glued to the
    # outer area unless its tail is a non-junction node of a cycle whose
    # flipped side excludes the outer face: that node mirrors away while
    # the area stays, so such corners are skipped.
    detached = set()
    for si, cyc in enumerate(prep.cycles):
        if not runs_member(prep.sides[si], 0):  # position 0 = outer face
            gu, gv = prep.junct[si]
            for w in cyc:
                if w != gu and w != gv:
                    detached.add(w)
    gnew = planarize(out)
    new_face = -1
    for d in g.face_darts(g.outer_face):
        w = g.tail[d]
        if w in detached:
            continue
        if w in plans:
            darts = list(g.node_darts(w))
            gap = darts.index(d)
            deg = len(darts)
            if darts[(gap + 1) % deg] != g.rot_next[d]:
                raise AssertionError("rotation order mismatch")
            gap = _track_gap(plans[w][1], deg, gap)
            a = plans[w][0].darts[gap]
        else:
            a = d
        f = gnew.face_of[a]
        if new_face == -1:
            new_face = f
        elif new_face != f:
            raise AssertionError("outer-face tracking diverged")
    if new_face == -1:
        raise AssertionError("no trackable outer corner")
    out.outer = gnew.marker_of_face(new_face)
    validate(out)
    metrics.bump(g.ndarts, "spindle")
    return out


def parity_table(emb: OnePlaneEmbedding, spindles) -> ParityTable:
    prep = _Prep(emb, spindles)
    g = prep.g
    p, depth = {}, {}
    for vid, node in g.vnode.items():
        depth[vid] = prep.depth[node]
        p[vid] = 1 if prep.depth[node] % 2 == 1 else -1
    return ParityTable(p=p, depth=depth)
