"""Definition-level brute force for drawability questions.

Everything here works from first principles so the fast path has an
independent referee.  The scanner finds B- and W-shaped obstructions by
walking their closed curve and flood-filling the enclosed region; the
enumerator literally tries every rotation system of the planarization
that keeps each crossing alternating, with every face as the outer one.
No code is shared with the cycle catalog beyond the embedding plumbing.

A B-shape is one crossing plus an edge between endpoints of its two
crossed edges, closing a curve that traps the two remaining endpoints.
A W-shape is two crossings pinched between two shared endpoints whose
curve traps all four remaining endpoints.  An embedding admits a
straight-line drawing exactly when it contains neither shape.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass

from . import metrics
from .errors import OpeError, err
from .ope import OnePlaneEmbedding, canonicalize, serialize_ope, validate
from .planar import (
    embedding_components,
    induced_subembedding,
    planarize,
    region_sets,
)


@dataclass(frozen=True)
class BConfiguration:
    crossing: int
    anchors: tuple  # (p, q): p endpoint of one crossed edge, q of the other
    cover_edge: int  # the pq edge closing the curve
    via_crossing: int  # crossing splitting the cover edge, or None
    tails: tuple  # trapped endpoints, sorted
    region: tuple  # node names strictly inside the curve


@dataclass(frozen=True)
class WConfiguration:
    crossings: tuple  # (x, y), x < y
    anchors: tuple
    tails: tuple
    region: tuple


@dataclass
class ConfigurationReport:
    b_configs: list
    w_configs: list

    @property
    def empty(self) -> bool:
        return not self.b_configs and not self.w_configs

    def __len__(self) -> int:
        return len(self.b_configs) + len(self.w_configs)


@dataclass
class EnumerationBudget:
    max_nodes: int = 14  # planarization node ceiling
    max_systems: int = 2_000_000  # rotation assignments, counted up front
    max_seconds: float = None  # optional wall-clock ceiling

    def __post_init__(self):
        bad = self.max_nodes <= 0 or self.max_systems <= 0
        if self.max_seconds is not None and self.max_seconds <= 0:
            bad = True
        if bad:
            raise err("INVALID_INPUT", "budget fields must be positive")


@dataclass
class OracleDecision:
    feasible: bool
    witness: OnePlaneEmbedding  # config-free embedding, None when infeasible
    explored: int  # enumerated candidates before the verdict


def scan_configurations(emb: OnePlaneEmbedding) -> ConfigurationReport:
    """Find every B- and W-shape by direct region tests.

    The input must be valid; pieces of a disconnected drawing are
    scanned separately since enclosure is only meaningful relative to
    the outer face of the piece that hosts the curve.
    """
    comps = embedding_components(emb)
    if len(comps) > 1:
        bs, ws = [], []
        for comp in comps:
            if len(comp) == 1:
                continue
            sub = induced_subembedding(emb, comp)
            if not sub.crossings:
                continue
            rep = scan_configurations(sub)
            bs.extend(rep.b_configs)
            ws.extend(rep.w_configs)
        return ConfigurationReport(bs, ws)
    if not emb.crossings:
        return ConfigurationReport([], [])

    g = planarize(emb)
    edge_of = {frozenset(uv): e for e, uv in emb.edges.items()}
    crossed_by = {}
    for x, (e1, e2, _) in emb.crossings.items():
        crossed_by[e1] = x
        crossed_by[e2] = x

    bs = []
    for x in sorted(emb.crossings):
        e1, e2, _ = emb.crossings[x]
        for p in sorted(emb.edges[e1]):
            for q in sorted(emb.edges[e2]):
                cover = edge_of.get(frozenset((p, q)))
                if cover is None:
                    continue
                nodes = [g.vnode[p], g.xnode[x], g.vnode[q]]
                via = crossed_by.get(cover)
                if via is not None:
                    nodes.append(g.xnode[via])
                rs = region_sets(g, nodes)
                metrics.bump(len(nodes), "oracle")
                t1 = emb.edge_other(e1, p)
                t2 = emb.edge_other(e2, q)
                if g.vnode[t1] in rs.nodes_in and g.vnode[t2] in rs.nodes_in:
                    bs.append(
                        BConfiguration(
                            crossing=x,
                            anchors=(p, q),
                            cover_edge=cover,
                            via_crossing=via,
                            tails=tuple(sorted({t1, t2})),
                            region=tuple(sorted(g.node_name(n) for n in rs.nodes_in)),
                        )
                    )

    by_vertex = {}
    for x in sorted(emb.crossings):
        e1, e2, _ = emb.crossings[x]
        for v in (*emb.edges[e1], *emb.edges[e2]):
            by_vertex.setdefault(v, []).append(x)
    pairs = sorted(
        {(a, b) for xs in by_vertex.values() for a in xs for b in xs if a < b}
    )
    ws = []
    for x, y in pairs:
        ex1, ex2, _ = emb.crossings[x]
        ey1, ey2, _ = emb.crossings[y]
        sx1, sx2 = set(emb.edges[ex1]), set(emb.edges[ex2])
        for fj, fo in ((ey1, ey2), (ey2, ey1)):
            # p shares an edge with x via ex1 and with y via fj; q takes
            # the two remaining edges
            ps = sx1 & set(emb.edges[fj])
            qs = sx2 & set(emb.edges[fo])
            for p in sorted(ps):
                for q in sorted(qs):
                    nodes = [g.vnode[p], g.xnode[x], g.vnode[q], g.xnode[y]]
                    rs = region_sets(g, nodes)
                    metrics.bump(len(nodes), "oracle")
                    tails = {
                        emb.edge_other(ex1, p),
                        emb.edge_other(ex2, q),
                        emb.edge_other(fj, p),
                        emb.edge_other(fo, q),
                    }
                    if all(g.vnode[t] in rs.nodes_in for t in tails):
                        ws.append(
                            WConfiguration(
                                crossings=(x, y),
                                anchors=(p, q),
                                tails=tuple(sorted(tails)),
                                region=tuple(
                                    sorted(g.node_name(n) for n in rs.nodes_in)
                                ),
                            )
                        )
    return ConfigurationReport(bs, ws)


def enumerate_cross_preserving(emb: OnePlaneEmbedding, budget: EnumerationBudget = None):
    """Every embedding of the same graph with the same crossing pairs.

    A candidate is any rotation system over the planarization whose
    crossing nodes stay alternating (two cyclic orders each; flips of a
    sub-drawing mirror single crossings, so the chirality of each
    crossing is free) and whose faces close up into a sphere, taken once
    per choice of outer face.  Yields canonical forms, deduplicated.
    Budget checks happen before the first candidate is produced.
    """
    if budget is None:
        budget = EnumerationBudget()
    validate(emb)
    if len(embedding_components(emb)) != 1:
        raise err("INVALID_INPUT", "enumeration expects a connected drawing")
    g = planarize(emb)
    if g.n > budget.max_nodes:
        raise err(
            "BUDGET_EXCEEDED",
            f"planarization has {g.n} nodes, budget allows {budget.max_nodes}",
        )
    total = 2 ** len(emb.crossings)
    for v in sorted(emb.vertices):
        d = len(emb.rotation[v])
        if d > 1:
            total *= math.factorial(d - 1)
    if total > budget.max_systems:
        raise err(
            "BUDGET_EXCEEDED",
            f"{total} rotation systems exceed the budget of {budget.max_systems}",
        )
    return _enumerate(emb, budget)


def _enumerate(emb, budget):
    start = time.monotonic()
    verts = sorted(emb.vertices)
    vchoices = []
    for v in verts:
        inc = sorted(emb.rotation[v])
        if len(inc) <= 2:
            vchoices.append([tuple(inc)])
        else:
            vchoices.append([(inc[0], *rest) for rest in itertools.permutations(inc[1:])])
    xids = sorted(emb.crossings)
    xchoices = []
    for x in xids:
        e1, e2, c = emb.crossings[x]
        k = c.index(min(c))
        rot = c[k:] + c[:k]
        if k % 2 == 1:
            e1, e2 = e2, e1
        xchoices.append(
            ((e1, e2, tuple(rot)), (e1, e2, (rot[0], rot[3], rot[2], rot[1])))
        )
    seen = set()
    nv = len(verts)
    for picks in itertools.product(*vchoices, *([(0, 1)] * len(xids))):
        if budget.max_seconds is not None and time.monotonic() - start > budget.max_seconds:
            raise err("BUDGET_EXCEEDED", "enumeration time ceiling hit")
        metrics.bump(1, "oracle")
        cand = emb.copy()
        cand.rotation = {v: list(rot) for v, rot in zip(verts, picks)}
        cand.crossings = {
            x: xchoices[i][bit] for i, (x, bit) in enumerate(zip(xids, picks[nv:]))
        }
        try:
            validate(cand)
        except OpeError as exc:
            if exc.code == "NON_SPHERICAL":
                continue
            raise
        g2 = planarize(cand)
        for f in range(g2.nfaces):
            out = cand.copy()
            out.outer = g2.marker_of_face(f)
            canon = canonicalize(out)
            key = serialize_ope(canon)
            if key in seen:
                continue
            seen.add(key)
            yield canon


def oracle_decision(emb: OnePlaneEmbedding, budget: EnumerationBudget = None) -> OracleDecision:
    """Exhaustive verdict: is some cross-preserving embedding shape-free?

    Pieces of the drawing are decided independently; the witness is the
    union of the per-piece witnesses with the first piece's outer face.
    The original embedding is tried before enumerating, so an already
    drawable input returns itself.
    """
    if budget is None:
        budget = EnumerationBudget()
    validate(emb)
    comps = embedding_components(emb)
    pieces = []
    loose = set()
    explored = 0
    for comp in comps:
        if len(comps) > 1:
            if len(comp) == 1:
                loose |= comp
                continue
            sub = induced_subembedding(emb, comp)
        else:
            sub = emb
        if not sub.crossings or scan_configurations(sub).empty:
            pieces.append(sub)
            continue
        found = None
        for cand in enumerate_cross_preserving(sub, budget):
            explored += 1
            if scan_configurations(cand).empty:
                found = cand
                break
        if found is None:
            return OracleDecision(feasible=False, witness=None, explored=explored)
        pieces.append(found)
    if len(comps) == 1:
        return OracleDecision(feasible=True, witness=pieces[0], explored=explored)
    merged = OnePlaneEmbedding()
    for p in pieces:
        merged.vertices |= p.vertices
        merged.edges.update(p.edges)
        merged.crossings.update(p.crossings)
        merged.rotation.update(p.rotation)
        merged.aug.update(p.aug)
    for v in sorted(loose):
        merged.vertices.add(v)
        merged.rotation[v] = []
    merged.outer = pieces[0].outer
    return OracleDecision(feasible=True, witness=merged, explored=explored)


def _audit_posi(g, emb, cyc, rs, label, issues):
    u, v = cyc.anchors
    onset = set(cyc.nodes)
    seg_uv = g.seg_of_pair(g.vnode[u], g.vnode[v])
    if seg_uv >= 0 and seg_uv in rs.segs_in:
        issues.append(f"cycle {label}: anchor edge inside the interior")
    for x2, (_, _, corners) in sorted(emb.crossings.items()):
        if x2 in cyc.crossings:
            continue
        if u in corners and v in corners and g.xnode[x2] in rs.nodes_in:
            issues.append(f"cycle {label}: crossing x{x2} links the anchors inside")
    tails = set()
    for x in cyc.crossings:
        tails.update(emb.crossings[x][2])
    tails -= {u, v}
    outside = [t for t in sorted(tails) if g.vnode[t] not in rs.nodes_in]
    if cyc.length == 3:
        if seg_uv < 0 or seg_uv not in rs.segs_on:
            issues.append(f"cycle {label}: three-cycle lacks its anchor edge")
        if outside:
            issues.append(f"cycle {label}: trapped endpoints escape: {outside}")
        want = "B"
    else:
        if len(outside) > 1:
            issues.append(f"cycle {label}: {len(outside)} endpoints escape")
        want = "B" if len(outside) == 1 else "W"
    if cyc.kind != want:
        issues.append(f"cycle {label}: kind {cyc.kind} but audit says {want}")
    vu, vv = g.vnode[u], g.vnode[v]
    for f in sorted(rs.faces_in):
        fn = g.face_nodes(f)
        if vu in fn and vv in fn:
            issues.append(f"cycle {label}: face {f} defuses it (not hard)")
            break
    if not onset.issuperset({vu, vv}):
        issues.append(f"cycle {label}: anchors not on the cycle")


def _audit_nega(g, emb, cyc, rs, label, issues):
    u, v = cyc.anchors
    if cyc.length != 4:
        issues.append(f"cycle {label}: latent cycles have length 4")
        return
    seg_uv = g.seg_of_pair(g.vnode[u], g.vnode[v])
    if seg_uv >= 0 and seg_uv not in rs.segs_in and seg_uv not in rs.segs_on:
        issues.append(f"cycle {label}: anchor edge outside the exterior-clean zone")
    for x2, (_, _, corners) in sorted(emb.crossings.items()):
        if x2 in cyc.crossings:
            continue
        xn = g.xnode[x2]
        if u in corners and v in corners and xn not in rs.nodes_in and xn not in set(cyc.nodes):
            issues.append(f"cycle {label}: crossing x{x2} links the anchors outside")
    tails = set()
    for x in cyc.crossings:
        tails.update(emb.crossings[x][2])
    tails -= {u, v}
    inside = [t for t in sorted(tails) if g.vnode[t] in rs.nodes_in]
    if len(inside) > 1:
        issues.append(f"cycle {label}: {len(inside)} trapped endpoints inside")
    vu, vv = g.vnode[u], g.vnode[v]
    for f in range(g.nfaces):
        if f in rs.faces_in:
            continue
        fn = g.face_nodes(f)
        if vu in fn and vv in fn:
            issues.append(f"cycle {label}: outside face {f} carries both anchors")
            break


def _audit_path(g, path, ends_a, ends_b, inside_pred, label, issues):
    # the two certificate paths may share vertices, only the endpoint
    # pairing is constrained
    if not path:
        issues.append(f"path {label}: empty")
        return
    if path[0] not in ends_a:
        issues.append(f"path {label}: does not start at an anchor of cycle a")
    if path[-1] not in ends_b:
        issues.append(f"path {label}: does not end at an anchor of cycle b")
    for a, b in zip(path, path[1:]):
        if g.seg_of_pair(a, b) < 0:
            issues.append(f"path {label}: {g.node_name(a)}-{g.node_name(b)} not an edge")
    for n in path[1:-1]:
        if not inside_pred(n):
            issues.append(f"path {label}: interior node {g.node_name(n)} out of zone")


def verify_forbidden_pair(emb: OnePlaneEmbedding, pair) -> list:
    """Definition-level audit of a certificate pair; [] when sound.

    Node ids inside the certificate refer to the planarization of emb,
    so the certificate must be checked against the embedding that
    produced it.
    """
    g = planarize(emb)
    issues = []
    try:
        rs_a = region_sets(g, list(pair.cycle_a.nodes))
    except OpeError as exc:
        return [f"cycle a: {exc}"]
    try:
        rs_b = region_sets(g, list(pair.cycle_b.nodes))
    except OpeError as exc:
        return [f"cycle b: {exc}"]

    _audit_posi(g, emb, pair.cycle_a, rs_a, "a", issues)
    if pair.kind == "separate":
        _audit_posi(g, emb, pair.cycle_b, rs_b, "b", issues)
        if rs_a.faces_in & rs_b.faces_in:
            issues.append("interiors are not disjoint")
        forbidden = rs_a.nodes_in | rs_b.nodes_in | set(pair.cycle_a.nodes) | set(pair.cycle_b.nodes)

        def zone(n):
            return n not in forbidden

    elif pair.kind == "enclosed":
        _audit_nega(g, emb, pair.cycle_b, rs_b, "b", issues)
        if not rs_a.faces_in <= rs_b.faces_in:
            issues.append("inner cycle not enclosed by the outer one")
        onsets = set(pair.cycle_a.nodes) | set(pair.cycle_b.nodes)

        def zone(n):
            return n in rs_b.nodes_in and n not in rs_a.nodes_in and n not in onsets

    else:
        return [f"unknown pair kind {pair.kind!r}"]

    ends_a = {g.vnode[a] for a in pair.cycle_a.anchors}
    ends_b = {g.vnode[a] for a in pair.cycle_b.anchors}
    _audit_path(g, pair.path_u, ends_a, ends_b, zone, "u", issues)
    _audit_path(g, pair.path_v, ends_a, ends_b, zone, "v", issues)
    if pair.path_u and pair.path_v:
        # one path per anchor on each side; the paths themselves may
        # touch or even coincide in the middle
        if {pair.path_u[0], pair.path_v[0]} != ends_a:
            issues.append("paths do not start at the two anchors of cycle a")
        if {pair.path_u[-1], pair.path_v[-1]} != ends_b:
            issues.append("paths do not end at the two anchors of cycle b")
    return issues


def verify_in_factor(emb: OnePlaneEmbedding, wit) -> list:
    """Definition-level audit of a pinned-vertex witness; [] when sound."""
    g = planarize(emb)
    issues = []
    try:
        rs = region_sets(g, list(wit.cycle.nodes))
    except OpeError as exc:
        return [f"cycle: {exc}"]
    if wit.side == "ex":
        _audit_posi(g, emb, wit.cycle, rs, "w", issues)

        def zone(n):
            return n not in rs.nodes_in and n not in set(wit.cycle.nodes)

    elif wit.side == "in":
        _audit_nega(g, emb, wit.cycle, rs, "w", issues)

        def zone(n):
            return n in rs.nodes_in

    else:
        return [f"unknown witness side {wit.side!r}"]
    vz = g.vnode[wit.vertex]
    if not zone(vz):
        issues.append("pinned vertex is not in the claimed zone")
    anchors = [g.vnode[a] for a in wit.cycle.anchors]
    for path, want, label in ((wit.path_u, anchors[0], "u"), (wit.path_v, anchors[1], "v")):
        if not path or path[0] != vz:
            issues.append(f"path {label}: does not start at the pinned vertex")
            continue
        if path[-1] != want:
            issues.append(f"path {label}: does not end at its anchor")
        for a, b in zip(path, path[1:]):
            if g.seg_of_pair(a, b) < 0:
                issues.append(f"path {label}: {g.node_name(a)}-{g.node_name(b)} not an edge")
        for n in path[:-1]:
            if not zone(n):
                issues.append(f"path {label}: node {g.node_name(n)} out of zone")
    return issues
