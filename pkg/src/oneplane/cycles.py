"""Anchored cycle catalog and admissible outer faces.

Two vertices u, v together with every crossing adjacent to both (plus the
uncrossed uv edge, if present) form a bundle of internally disjoint
u,v-links.  A cycle through two links has a link-free side exactly when
the links are consecutive in the rotation at u, so those short cycles are
the only candidates worth cataloguing; there are O(n) of them and their
enclosed face sets form a laminar family together with the facial cycles.

Classification sorts the candidates into obstruction kinds:

* B: a detour around one crossing closes over its two dangling ends
  (the closing wall is an uncrossed edge for length 3, a crossed edge
  via its own crossing for length 4),
* W: two crossings pinched between the same two anchors with all four
  dangling ends caught inside.

An obstruction is soft when some inner face of its interior carries both
anchors on its boundary; making that face outer defuses the cycle, and
the face is recorded as the witness.  Hard cycles have no witness, so
every usable outer face must lie inside them.  A clean-exterior cycle
that would turn into a hard obstruction once the outer face moves into
its interior is recorded as latent.

A face is admissible as outer iff every hard cycle encloses it and no
latent cycle does.  When no face qualifies the catalog produces a
certificate pair of cycles joined by two anchor paths; no
cross-preserving re-embedding can defuse such a pair.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import metrics
from .errors import err
from .laminar import (
    DualTree,
    cycle_runs,
    runs_laminar,
    runs_member,
    runs_size,
    set_relation,
)
from .planar import blocks, planarize


@dataclass
class CandidateCycle:
    nodes: tuple  # planarization node ids, anchors at positions 0 and 2
    anchors: tuple  # (u, v) vertex labels, u < v
    crossings: tuple  # crossing labels on the cycle, in cycle order
    edge: int  # uncrossed anchor edge closing a length-3 cycle, else None
    clean_in: bool  # interior free of parallel anchor links
    clean_ex: bool  # exterior free of parallel anchor links
    runs: list  # enclosed face positions as sorted inclusive runs
    kind: str = None  # "B" or "W" once classified as an obstruction
    hard: bool = False  # no witness face; outer face pinned to the interior
    latent: bool = False  # becomes a hard obstruction if re-rooted inside
    witness_face: int = None  # inner face defusing a soft obstruction
    note: str = None

    @property
    def length(self) -> int:
        return len(self.nodes)

    @property
    def nodeset(self) -> frozenset:
        return frozenset(self.nodes)


@dataclass
class CycleCatalog:
    g: object  # PlaneGraph of the analyzed embedding
    dt: DualTree
    candidates: list  # CandidateCycle, deterministic bundle order
    forest_all: object  # nesting forest over candidates then facial cycles
    face_item_base: int  # forest item index of the face at preorder position 0
    hard: list = None
    soft: list = None  # classified obstructions with a witness face
    latent: list = None
    forest_decisive: object = None  # nesting forest over hard + latent
    classified: bool = False

    @property
    def obstructions(self) -> list:
        return [c for c in self.candidates if c.kind]


@dataclass
class AdmissibleFaceSet:
    faces: list  # face ids usable as outer, sorted


@dataclass
class ForbiddenPair:
    cycle_a: CandidateCycle  # hard obstruction with the smallest interior
    cycle_b: CandidateCycle  # disjoint hard partner, or enclosing latent
    kind: str  # "separate" or "enclosed"
    path_u: list  # planarization node ids, one anchor of a to one of b
    path_v: list  # ditto for the remaining anchor pair


@dataclass
class InFactorWitness:
    vertex: int
    cycle: CandidateCycle
    side: str  # "ex": vertex tied outside a hard cycle; "in": inside a latent
    path_u: list  # node ids from the vertex to the cycle's first anchor
    path_v: list


def _node_pos(g, dt, a: int) -> int:
    # preorder position of one face incident to node a; nodes off a cycle
    # lie strictly on one side, so any incident face decides membership
    return dt.tin[g.face_of[g.rot_list[g.rot_start[a]]]]


def _corner_labels(g, x: int) -> tuple:
    # vertex labels adjacent to crossing x, read off the planarization
    return tuple(g.node_label[g.head[d]] for d in g.node_darts(g.xnode[x]))


def _strictly_inside(g, dt, c: CandidateCycle, a: int) -> bool:
    return a not in c.nodeset and runs_member(c.runs, _node_pos(g, dt, a))


def _strictly_outside(g, dt, c: CandidateCycle, a: int) -> bool:
    return a not in c.nodeset and not runs_member(c.runs, _node_pos(g, dt, a))


def detect_candidates(emb) -> CycleCatalog:
    """Enumerate candidate cycles of every anchored link bundle.

    Returns an unclassified catalog carrying the candidates and the
    nesting forest of candidate interiors plus facial cycles.
    """
    g = planarize(emb)
    blk, _cuts = blocks(g)
    if len(blk) != 1 or len(blk[0]) != g.n:
        raise err(
            "NOT_BICONNECTED",
            f"catalog needs a biconnected planarization, found {len(blk)} blocks",
        )
    dt = DualTree(g)

    rpos = {v: {e: i for i, e in enumerate(rot)} for v, rot in emb.rotation.items()}
    bundles = {}
    for x in sorted(emb.crossings):
        e1, e2, corners = emb.crossings[x]
        ends1 = set(emb.edges[e1])
        for i in range(4):
            for j in range(i + 1, 4):
                a, b = corners[i], corners[j]
                ea = e1 if a in ends1 else e2
                eb = e1 if b in ends1 else e2
                if a > b:
                    a, b, ea, eb = b, a, eb, ea
                # link[2] is the edge whose dart leaves the smaller anchor
                bundles.setdefault((a, b), []).append(("x", x, ea, eb))
    crossed = emb.crossed_edges()
    for e in sorted(emb.edges):
        if e in crossed:
            continue
        a, b = emb.edges[e]
        key = (a, b) if a < b else (b, a)
        if key in bundles:
            bundles[key].append(("e", e, e, e))

    edge_dart = {}
    for d in range(g.ndarts):
        edge_dart.setdefault(g.dart_edge[d], d)

    def probe_pos(link):
        if link[0] == "x":
            return _node_pos(g, dt, g.xnode[link[1]])
        return dt.tin[g.face_of[edge_dart[link[1]]]]

    candidates = []
    for (u, v), links in sorted(bundles.items()):
        if len(links) < 2:
            continue
        links.sort(key=lambda L: rpos[u][L[2]])
        k = len(links)
        vu, vv = g.vnode[u], g.vnode[v]
        for i in range(k if k > 2 else 1):
            A, B = links[i], links[(i + 1) % k]
            if A[0] == "e":  # at most one edge link per bundle
                A, B = B, A
            nodes = [vu, g.xnode[A[1]], vv]
            xs = (A[1],)
            edge = None
            if B[0] == "x":
                nodes.append(g.xnode[B[1]])
                xs = (A[1], B[1])
            else:
                edge = B[1]
            runs = cycle_runs(g, dt, nodes)
            if k == 2:
                clean_in = clean_ex = True
            else:
                # the pocket between consecutive links holds no other link,
                # so one probe settles which side of the cycle it is
                inside = runs_member(runs, probe_pos(links[(i + 2) % k]))
                clean_in, clean_ex = not inside, inside
            candidates.append(
                CandidateCycle(
                    nodes=tuple(nodes),
                    anchors=(u, v),
                    crossings=xs,
                    edge=edge,
                    clean_in=clean_in,
                    clean_ex=clean_ex,
                    runs=runs,
                )
            )

    items = [c.runs for c in candidates]
    face_base = len(items)
    for p in range(g.nfaces):
        f = dt.pos_face[p]
        if f == g.outer_face:
            items.append([(1, g.nfaces - 1)])
        else:
            items.append([(p, p)])
    forest = runs_laminar(items, g.nfaces)
    if forest.kind != "forest":
        raise AssertionError(
            f"candidate family is not laminar: items {forest.pair} cross"
        )
    metrics.bump(len(candidates) + g.nfaces, "cycles")
    return CycleCatalog(
        g=g, dt=dt, candidates=candidates, forest_all=forest, face_item_base=face_base
    )


def classify(catalog: CycleCatalog) -> CycleCatalog:
    """Fill obstruction kinds, hard/soft status, witness faces, latency.

    A length-3 candidate is a B-obstruction when both dangling ends of
    its crossing are caught inside; it always has a witness face.  A
    length-4 clean-interior candidate is B or W by how many vertices
    adjacent to its crossings stay outside (one or zero).  It is hard
    when no inner face of its interior carries both anchors.  A
    length-4 clean-exterior candidate is latent when at most one
    adjacent vertex hides inside and every face carrying both anchors
    is enclosed.
    """
    g, dt = catalog.g, catalog.dt
    common = {}
    for c in catalog.candidates:
        if c.anchors in common:
            continue
        fu = {g.face_of[d] for d in g.node_darts(g.vnode[c.anchors[0]])}
        fv = {g.face_of[d] for d in g.node_darts(g.vnode[c.anchors[1]])}
        common[c.anchors] = sorted(fu & fv)
        metrics.bump(len(fu) + len(fv), "cycles")

    for c in catalog.candidates:
        faces_uv = common[c.anchors]
        inside_faces = [f for f in faces_uv if runs_member(c.runs, dt.tin[f])]
        anchor_set = set(c.anchors)
        tails = set()
        for x in c.crossings:
            tails.update(_corner_labels(g, x))
        tails -= anchor_set
        t_in, t_out = [], []
        for t in sorted(tails):
            if runs_member(c.runs, _node_pos(g, dt, g.vnode[t])):
                t_in.append(t)
            else:
                t_out.append(t)
        metrics.bump(len(faces_uv) + len(tails), "cycles")

        if c.clean_in:
            if c.length == 3:
                if not t_out:
                    c.kind = "B"
                    c.hard = False  # a witness always sits against the edge
                    if not inside_faces:
                        raise AssertionError(
                            f"length-3 obstruction {c.nodes} has no witness face"
                        )
                    c.witness_face = inside_faces[0]
            else:
                if len(t_out) == 1:
                    c.kind = "B"
                    t = t_out[0]
                    if all(t in _corner_labels(g, x) for x in c.crossings):
                        c.note = "lone outside neighbor touches both crossings"
                elif not t_out:
                    c.kind = "W"
                if c.kind:
                    c.hard = not inside_faces
                    c.witness_face = inside_faces[0] if inside_faces else None
        if c.clean_ex and c.length == 4:
            if len(t_in) <= 1 and len(inside_faces) == len(faces_uv):
                c.latent = True

    catalog.hard = [c for c in catalog.candidates if c.hard]
    catalog.soft = [c for c in catalog.candidates if c.kind and not c.hard]
    catalog.latent = [c for c in catalog.candidates if c.latent]
    decisive = catalog.hard + [c for c in catalog.latent if not c.hard]
    res = runs_laminar([c.runs for c in decisive], g.nfaces)
    if res.kind != "forest":
        raise AssertionError("hard/latent interiors cross")
    catalog.forest_decisive = res
    catalog.classified = True
    metrics.bump(len(catalog.candidates), "cycles")
    return catalog


def build_catalog(emb) -> CycleCatalog:
    return classify(detect_candidates(emb))


def admissible_faces(catalog: CycleCatalog):
    """Faces usable as outer, or a certificate pair when none exists.

    Admissible: enclosed by every hard cycle, by no latent cycle.  With
    no hard cycles the outer face itself always qualifies, so an empty
    result implies at least one hard cycle; the pair is then either two
    hard cycles with disjoint interiors or the minimal hard cycle inside
    a latent one, joined by two anchor-to-anchor paths that witness the
    pairing in every cross-preserving re-embedding.
    """
    if not catalog.classified:
        raise err("INVALID_INPUT", "catalog must be classified first")
    g, dt = catalog.g, catalog.dt
    nf = g.nfaces
    hard, latent = catalog.hard, catalog.latent
    cover = [0] * (nf + 1)
    block = [0] * (nf + 1)
    for c in hard:
        for a, b in c.runs:
            cover[a] += 1
            cover[b + 1] -= 1
    for c in latent:
        for a, b in c.runs:
            block[a] += 1
            block[b + 1] -= 1
    faces = []
    hacc = bacc = 0
    for p in range(nf):
        hacc += cover[p]
        bacc += block[p]
        if hacc == len(hard) and bacc == 0:
            faces.append(dt.pos_face[p])
    metrics.bump(nf, "cycles")
    if faces:
        return AdmissibleFaceSet(faces=sorted(faces))

    if not hard:
        # with no hard cycle the outer face itself is admissible
        raise AssertionError("empty admissible set yet no hard cycle")
    order = sorted(range(len(hard)), key=lambda i: (runs_size(hard[i].runs), hard[i].nodes))
    cmin = hard[order[0]]
    partner = pkind = None
    for i in order[1:]:
        rel = set_relation(cmin.runs, hard[i].runs)[0]
        if rel == "disjoint":
            partner, pkind = hard[i], "separate"
            break
        if rel not in ("a_in_b", "equal"):
            raise AssertionError("hard interiors neither nested nor disjoint")
    if partner is None:
        for c in sorted(latent, key=lambda c: (runs_size(c.runs), c.nodes)):
            rel = set_relation(cmin.runs, c.runs)[0]
            if rel in ("a_in_b", "equal"):
                partner, pkind = c, "enclosed"
                break
    if partner is None:
        raise AssertionError("no admissible face and no certificate pair")
    path_u, path_v = _pair_paths(g, dt, cmin, partner, pkind)
    return ForbiddenPair(
        cycle_a=cmin, cycle_b=partner, kind=pkind, path_u=path_u, path_v=path_v
    )


def _flow_pair(g, s1: int, s2: int, t1: int, t2: int, ok):
    """Two node-disjoint paths from (s1, s2) into {t1, t2}.

    Interior nodes must satisfy ok; terminals are exempt.  A node named
    twice as source (or twice as sink) carries both units, so a fork out
    of one node and zero-length paths (source equal to a sink) come out
    naturally.  Unit node capacities via node splitting, two augmenting
    rounds.  Returns (path from s1, path from s2) or None.
    """
    terminals = (s1, s2, t1, t2)
    seen = set()
    for n in range(g.n):
        if n in terminals or ok(n):
            seen.add(n)
    S, T = 2 * g.n, 2 * g.n + 1
    adj = {}
    arcs = []  # [head, residual]; arc i^1 is the reverse of arc i

    def add(a, b, cap):
        adj.setdefault(a, []).append(len(arcs))
        arcs.append([b, cap])
        adj.setdefault(b, []).append(len(arcs))
        arcs.append([a, 0])

    for n in sorted(seen):
        cap = 2 if (n == s1 == s2 or n == t1 == t2) else 1
        add(2 * n, 2 * n + 1, cap)
    for d in range(g.ndarts):
        a, b = g.tail[d], g.head[d]
        if a in seen and b in seen:
            add(2 * a + 1, 2 * b, 1)
    if s1 == s2:
        add(S, 2 * s1, 2)
    else:
        add(S, 2 * s1, 1)
        add(S, 2 * s2, 1)
    if t1 == t2:
        add(2 * t1 + 1, T, 2)
    else:
        add(2 * t1 + 1, T, 1)
        add(2 * t2 + 1, T, 1)

    flow = 0
    for _ in range(2):
        prev = {S: -1}
        queue = [S]
        qi = 0
        while qi < len(queue) and T not in prev:
            x = queue[qi]
            qi += 1
            for ai in adj.get(x, ()):
                to, cap = arcs[ai]
                if cap > 0 and to not in prev:
                    prev[to] = ai
                    if to == T:
                        break
                    queue.append(to)
        metrics.bump(len(queue), "cycles")
        if T not in prev:
            break
        x = T
        while x != S:
            ai = prev[x]
            arcs[ai][1] -= 1
            arcs[ai ^ 1][1] += 1
            x = arcs[ai ^ 1][0]
        flow += 1
    if flow < 2:
        return None

    def walk():
        path = []
        x = S
        while x != T:
            for ai in adj[x]:
                # forward arcs sit at even indices; net flow shows up as
                # residual on their reverse
                if ai % 2 == 0 and arcs[ai ^ 1][1] > 0:
                    arcs[ai ^ 1][1] -= 1
                    x = arcs[ai][0]
                    break
            else:
                raise AssertionError("flow decomposition stuck")
            if x < 2 * g.n and x % 2 == 0:
                path.append(x // 2)
        return path

    return walk(), walk()


def _pair_paths(g, dt, ca: CandidateCycle, cb: CandidateCycle, kind: str):
    exclude = ca.nodeset | cb.nodeset

    if kind == "separate":

        def ok(n):
            return (
                n not in exclude
                and not runs_member(ca.runs, _node_pos(g, dt, n))
                and not runs_member(cb.runs, _node_pos(g, dt, n))
            )

    else:  # ca nested in latent cb: paths live in the annulus between them

        def ok(n):
            return (
                n not in exclude
                and not runs_member(ca.runs, _node_pos(g, dt, n))
                and runs_member(cb.runs, _node_pos(g, dt, n))
            )

    ua, va = (g.vnode[ca.anchors[0]], g.vnode[ca.anchors[1]])
    ub, vb = (g.vnode[cb.anchors[0]], g.vnode[cb.anchors[1]])
    res = _flow_pair(g, ua, va, ub, vb, ok)
    if res is None:
        raise AssertionError("certificate pair exists but anchor paths were not found")
    return res


def in_factor_cycle(catalog: CycleCatalog, z: int, adm=None):
    """Witness that vertex z cannot reach the outer boundary, if it cannot.

    Returns None when some admissible face carries z on its facial
    cycle.  Otherwise z is tied to the far side of a hard or latent
    cycle: two paths from z to the cycle's anchors that avoid the
    cyc's usable side pin z there under every cross-preserving
    re-embedding.
    """
    g, dt = catalog.g, catalog.dt
    if z not in g.vnode:
        raise err("INVALID_INPUT", f"unknown vertex {z}")
    if adm is None:
        adm = admissible_faces(catalog)
    if isinstance(adm, ForbiddenPair):
        raise err("INVALID_INPUT", "catalog admits no face at all")
    vz = g.vnode[z]
    zfaces = {g.face_of[d] for d in g.node_darts(vz)}
    if zfaces & set(adm.faces):
        return None

    def attempt(c, side):
        if side == "ex":
            if not _strictly_outside(g, dt, c, vz):
                return None

            def ok(n):
                return _strictly_outside(g, dt, c, n)

        else:
            if not _strictly_inside(g, dt, c, vz):
                return None

            def ok(n):
                return _strictly_inside(g, dt, c, n)

        anchor_u, anchor_v = (g.vnode[c.anchors[0]], g.vnode[c.anchors[1]])
        res = _flow_pair(g, vz, vz, anchor_u, anchor_v, ok)
        if res is None:
            return None
        pu, pv = res
        if pu[-1] != anchor_u:
            pu, pv = pv, pu
        return InFactorWitness(vertex=z, cycle=c, side=side, path_u=pu, path_v=pv)

    by_size = lambda c: (runs_size(c.runs), c.nodes)
    for c in sorted(catalog.hard, key=by_size):
        w = attempt(c, "ex")
        if w:
            return w
    for c in sorted(catalog.latent, key=by_size):
        w = attempt(c, "in")
        if w:
            return w
    raise AssertionError(f"vertex {z} has no exposing face and no tying cycle")
