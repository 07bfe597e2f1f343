"""Planarization of a crossed embedding and face machinery.

Crossings become degree-4 nodes, crossed edges split into two segments.
Node ids are dense: sorted real vertices first, then sorted crossings.
Segment ``s`` owns darts ``2s`` and ``2s+1`` (twins).  All arrays are
flat; every traversal is iterative so instances with millions of nodes
do not hit the recursion limit.

Face convention: rotations are counterclockwise and the successor of a
dart ``d`` along its face is the dart preceding ``twin(d)`` in the
rotation at ``d``'s head.  The face of a dart then lies on its left,
and the corner between ``d`` and its rotation successor at the tail
belongs to ``face_of[d]``.
"""

from __future__ import annotations

from array import array

from . import metrics
from .errors import err


class PlaneGraph:
    __slots__ = (
        "n",
        "ndarts",
        "nseg",
        "nfaces",
        "node_kind",
        "node_label",
        "vnode",
        "xnode",
        "tail",
        "head",
        "dart_edge",
        "rot_next",
        "rot_prev",
        "rot_start",
        "rot_list",
        "face_next",
        "face_of",
        "face_dart",
        "face_len",
        "outer_face",
    )

    def twin(self, d: int) -> int:
        return d ^ 1

    def node_darts(self, a: int):
        return self.rot_list[self.rot_start[a] : self.rot_start[a + 1]]

    def degree(self, a: int) -> int:
        return self.rot_start[a + 1] - self.rot_start[a]

    def face_darts(self, f: int):
        d0 = self.face_dart[f]
        d = d0
        while True:
            yield d
            d = self.face_next[d]
            if d == d0:
                break

    def face_nodes(self, f: int):
        for d in self.face_darts(f):
            yield self.tail[d]

    def seg_of_pair(self, a: int, b: int) -> int:
        """Segment joining nodes a and b, or -1.  Linear in deg(a)."""
        for d in self.node_darts(a):
            if self.head[d] == b:
                return d >> 1
        return -1

    def dart_from(self, a: int, b: int) -> int:
        for d in self.node_darts(a):
            if self.head[d] == b:
                return d
        raise err("NOT_A_CYCLE", f"nodes {a} and {b} are not adjacent in the planarization")

    def dart_of_outer(self, marker) -> int:
        """Dart denoted by an ``outer <edge> <vertex>`` marker."""
        e, v = marker
        a = self.vnode[v]
        for d in self.node_darts(a):
            if self.dart_edge[d] == e:
                return d
        raise err("INVALID_INPUT", f"outer marker ({e}, {v}) has no dart")

    def marker_of_face(self, f: int):
        """Smallest (edge, vertex) dart on face f, for serialization."""
        best = None
        for d in self.face_darts(f):
            t = self.tail[d]
            if self.node_kind[t] == 0:
                key = (self.dart_edge[d], self.node_label[t])
                if best is None or key < best:
                    best = key
        if best is None:
            raise err("UNKNOWN_FACE", f"face {f} has no vertex-tailed dart")
        return best

    def node_name(self, a: int) -> str:
        return ("v" if self.node_kind[a] == 0 else "x") + str(self.node_label[a])


def planarize(emb) -> PlaneGraph:
    g = PlaneGraph()
    verts = sorted(emb.vertices)
    xs = sorted(emb.crossings)
    g.n = len(verts) + len(xs)
    g.vnode = {v: i for i, v in enumerate(verts)}
    g.xnode = {x: len(verts) + i for i, x in enumerate(xs)}
    g.node_kind = bytearray(g.n)
    g.node_label = array("q", verts + xs)
    for x in xs:
        g.node_kind[g.xnode[x]] = 1

    cross_at = {}  # edge id -> crossing id
    for x, (e1, e2, _) in emb.crossings.items():
        cross_at[e1] = x
        cross_at[e2] = x

    # rotation order of (edge, neighbour node) around each node
    # vertices follow emb.rotation; crossings follow their corner order
    deg = array("q", bytes(8 * (g.n + 1)))
    for v in verts:
        if v not in emb.rotation:
            raise err("BROKEN_ROTATION", f"no rotation for vertex {v}", v)
        deg[g.vnode[v] + 1] = len(emb.rotation[v])
    for x in xs:
        deg[g.xnode[x] + 1] = 4
    g.rot_start = array("q", deg)
    for i in range(1, g.n + 1):
        g.rot_start[i] += g.rot_start[i - 1]

    nseg = len(emb.edges) + 2 * len(emb.crossings)
    g.nseg = nseg
    g.ndarts = 2 * nseg
    g.tail = array("i", bytes(4 * g.ndarts))
    g.head = array("i", bytes(4 * g.ndarts))
    g.dart_edge = array("i", bytes(4 * g.ndarts))
    g.rot_list = array("i", bytes(4 * g.ndarts))

    # for a crossed edge (u, v) at x the u-side segment comes first
    def place(dart, a, b, e, slot):
        g.tail[dart] = a
        g.head[dart] = b
        g.dart_edge[dart] = e
        g.rot_list[slot] = dart

    # slots for vertices are dictated by emb.rotation, so precompute the
    # slot of (vertex, edge); crossings take corners in listed order
    vslot = {}
    for v in verts:
        base = g.rot_start[g.vnode[v]]
        for i, e in enumerate(emb.rotation[v]):
            vslot[(v, e)] = base + i
    xslot = {}
    for x in xs:
        base = g.rot_start[g.xnode[x]]
        e1, e2, corners = emb.crossings[x]
        for i, u in enumerate(corners):
            ed = e1 if i % 2 == 0 else e2
            xslot[(x, u)] = (base + i, ed)

    s = 0
    try:
        for e in sorted(emb.edges):
            u, v = emb.edges[e]
            if e in cross_at:
                x = cross_at[e]
                a, b = g.vnode[u], g.vnode[v]
                xn = g.xnode[x]
                d = 2 * s
                slot_xu, ed_u = xslot[(x, u)]
                if ed_u != e:
                    raise err("NON_ALTERNATING_CROSSING", f"corner pairing broken at {x}", x)
                place(d, a, xn, e, vslot[(u, e)])
                place(d + 1, xn, a, e, slot_xu)
                s += 1
                d = 2 * s
                slot_xv, ed_v = xslot[(x, v)]
                if ed_v != e:
                    raise err("NON_ALTERNATING_CROSSING", f"corner pairing broken at {x}", x)
                place(d, xn, b, e, slot_xv)
                place(d + 1, b, xn, e, vslot[(v, e)])
                s += 1
            else:
                a, b = g.vnode[u], g.vnode[v]
                d = 2 * s
                place(d, a, b, e, vslot[(u, e)])
                place(d + 1, b, a, e, vslot[(v, e)])
                s += 1
    except KeyError as ex:
        raise err("BROKEN_ROTATION", f"edge missing from a rotation or corner list: {ex}")
    assert s == nseg

    g.rot_next = array("i", bytes(4 * g.ndarts))
    g.rot_prev = array("i", bytes(4 * g.ndarts))
    rs, rl = g.rot_start, g.rot_list
    for a in range(g.n):
        lo, hi = rs[a], rs[a + 1]
        for i in range(lo, hi):
            d = rl[i]
            nx = rl[lo if i + 1 == hi else i + 1]
            g.rot_next[d] = nx
            g.rot_prev[nx] = d

    # face trace: successor of d is rot_prev[twin(d)]
    g.face_next = array("i", bytes(4 * g.ndarts))
    rp = g.rot_prev
    fn = g.face_next
    for d in range(g.ndarts):
        fn[d] = rp[d ^ 1]
    fo = array("i", [-1]) * g.ndarts
    g.face_of = fo
    face_dart = array("i")
    face_len = array("i")
    nf = 0
    for d0 in range(g.ndarts):
        if fo[d0] != -1:
            continue
        d = d0
        ln = 0
        while fo[d] == -1:
            fo[d] = nf
            ln += 1
            d = fn[d]
        face_dart.append(d0)
        face_len.append(ln)
        nf += 1
    g.nfaces = nf
    g.face_dart = face_dart
    g.face_len = face_len
    metrics.bump(g.ndarts + g.n, "planar")

    g.outer_face = g.face_of[g.dart_of_outer(emb.outer)] if emb.edges else 0
    return g


class RegionSets:
    """Strict interior of a cycle: faces, nodes and segments not on the
    cycle that lie on the side away from the outer face."""

    __slots__ = ("faces_in", "nodes_in", "segs_in", "nodes_on", "segs_on")

    def __init__(self, faces_in, nodes_in, segs_in, nodes_on, segs_on):
        self.faces_in = faces_in
        self.nodes_in = nodes_in
        self.segs_in = segs_in
        self.nodes_on = nodes_on
        self.segs_on = segs_on


def cycle_segments(g: PlaneGraph, nodes) -> list:
    """Segments of the closed walk through ``nodes``; validates cycleness."""
    k = len(nodes)
    if k < 3:
        raise err("NOT_A_CYCLE", f"cycle needs at least 3 nodes, got {k}")
    if len(set(nodes)) != k:
        raise err("NOT_A_CYCLE", "repeated node in cycle", nodes)
    segs = []
    for i in range(k):
        a, b = nodes[i], nodes[(i + 1) % k]
        d = g.dart_from(a, b)
        segs.append(d >> 1)
    return segs


def region_sets(g: PlaneGraph, nodes) -> RegionSets:
    """Definitional region computation by a face flood from the outer face.

    O(size of the graph) per call; the catalog machinery uses the interval
    engine instead, this one backs the oracle and the certificate checker.
    """
    segs_on = set(cycle_segments(g, nodes))
    nodes_on = set(nodes)
    blocked = segs_on
    out_side = bytearray(g.nfaces)
    stack = [g.outer_face]
    out_side[g.outer_face] = 1
    fo, fn, fd = g.face_of, g.face_next, g.face_dart
    while stack:
        f = stack.pop()
        d0 = fd[f]
        d = d0
        while True:
            if (d >> 1) not in blocked:
                f2 = fo[d ^ 1]
                if not out_side[f2]:
                    out_side[f2] = 1
                    stack.append(f2)
            d = fn[d]
            if d == d0:
                break
    faces_in = {f for f in range(g.nfaces) if not out_side[f]}
    nodes_in = set()
    for a in range(g.n):
        if a in nodes_on:
            continue
        darts = g.node_darts(a)
        if darts and fo[darts[0]] in faces_in:
            nodes_in.add(a)
    segs_in = set()
    for s in range(g.nseg):
        if s not in segs_on and fo[2 * s] in faces_in:
            segs_in.add(s)
    metrics.bump(g.ndarts, "planar")
    return RegionSets(faces_in, nodes_in, segs_in, nodes_on, segs_on)


def blocks(g: PlaneGraph):
    """Biconnected components of the planarization.

    Returns (block_node_sets, cut_nodes).  Nodes without segments are not
    assigned to any block.  Iterative lowpoint computation.
    """
    n = g.n
    num = array("i", [-1]) * n
    low = array("i", bytes(4 * n))
    parent_dart = array("i", bytes(4 * n))
    cuts = set()
    block_sets = []
    counter = 0
    estack = []
    for root in range(n):
        if num[root] != -1 or g.degree(root) == 0:
            continue
        root_children = 0
        num[root] = counter
        low[root] = counter
        counter += 1
        parent_dart[root] = -1
        # work stack holds (node, index into its dart list)
        work = [(root, 0)]
        while work:
            a, i = work.pop()
            darts = g.node_darts(a)
            advanced = False
            while i < len(darts):
                d = darts[i]
                i += 1
                b = g.head[d]
                if num[b] == -1:
                    estack.append(d)
                    num[b] = counter
                    low[b] = counter
                    counter += 1
                    parent_dart[b] = d
                    if a == root:
                        root_children += 1
                    work.append((a, i))
                    work.append((b, 0))
                    advanced = True
                    break
                elif (d ^ 1) != parent_dart[a] and num[b] < num[a]:
                    estack.append(d)
                    if num[b] < low[a]:
                        low[a] = num[b]
            if advanced:
                continue
            # a finished; propagate lowpoint to parent and maybe pop a block
            pd = parent_dart[a]
            if pd == -1:
                continue
            p = g.tail[pd]
            if low[a] < low[p]:
                low[p] = low[a]
            if low[a] >= num[p]:
                # p closes a block
                members = set()
                while True:
                    d = estack.pop()
                    members.add(g.tail[d])
                    members.add(g.head[d])
                    if d == pd:
                        break
                block_sets.append(members)
                if p != root or root_children > 1:
                    cuts.add(p)
        # root cut status handled inside via root_children
    metrics.bump(g.ndarts + n, "planar")
    return block_sets, cuts


def induced_subembedding(emb, keep):
    """Restriction of the embedding to a vertex subset.

    An edge survives iff both endpoints are kept; a crossing survives iff
    both of its edges do, and when exactly one edge survives the crossing
    record is dropped and that edge becomes crossing free.  The outer face
    of the result is the face whose boundary inherits a dart of the old
    outer walk; when the whole walk disappears the old faces are merged
    across every deleted segment and a surviving dart is searched in the
    merged class of the old outer face.
    """
    keep = set(keep)
    sub = emb.copy()
    sub.aug = {}
    sub.vertices = keep
    sub.edges = {e: uv for e, uv in emb.edges.items() if uv[0] in keep and uv[1] in keep}
    sub.crossings = {
        x: rec
        for x, rec in emb.crossings.items()
        if rec[0] in sub.edges and rec[1] in sub.edges
    }
    for x, w in emb.aug.items():
        if x in sub.crossings and all(u in keep for u in w):
            sub.aug[x] = w
    sub.rotation = {
        v: [e for e in emb.rotation[v] if e in sub.edges] for v in keep
    }
    if not sub.edges:
        raise err("INVALID_INPUT", "induced subembedding has no edges")

    gold = planarize(emb)

    def dart_direction(d):
        # source endpoint of the dart's edge in travel direction
        e = gold.dart_edge[d]
        u, v = emb.edges[e]
        t, h = gold.tail[d], gold.head[d]
        if gold.node_kind[t] == 0:
            return e, gold.node_label[t]
        # tail is the crossing, direction given by the head side
        return e, (u if gold.node_label[h] == v else v)

    if sub.outer[0] not in sub.edges:
        # stale marker on a deleted edge; park it anywhere, the face
        # search below rewrites it
        e0 = min(sub.edges)
        sub.outer = (e0, sub.edges[e0][0])
    gnew = planarize(sub)
    still_crossed = sub.crossed_edges()

    def map_dart(d):
        e, src = dart_direction(d)
        if e not in sub.edges:
            return -1
        u, v = sub.edges[e]
        t_old = gold.tail[d]
        if e in still_crossed and gold.node_kind[t_old] == 1:
            # edge still crossed and the old dart left the crossing: map
            # to the same half-segment
            x = gold.node_label[t_old]
            dst = gnew.xnode[x]
            tgt = v if src == u else u
            for dd in gnew.node_darts(dst):
                h = gnew.head[dd]
                if gnew.dart_edge[dd] == e and gnew.node_kind[h] == 0 and gnew.node_label[h] == tgt:
                    return dd
            return -1
        a = gnew.vnode[src]
        for dd in gnew.node_darts(a):
            if gnew.dart_edge[dd] == e:
                return dd
        return -1

    outer_dart_new = -1
    for d in gold.face_darts(gold.outer_face):
        nd = map_dart(d)
        if nd != -1:
            outer_dart_new = nd
            break
    if outer_dart_new == -1:
        # merge old faces across deleted segments, then search the class
        parent = list(range(gold.nfaces))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for s in range(gold.nseg):
            e = gold.dart_edge[2 * s]
            gone = e not in sub.edges
            if not gone:
                # segment vanishes when its crossing was dropped but the
                # edge survives: the two halves fuse, faces stay intact
                continue
            fa, fb = find(gold.face_of[2 * s]), find(gold.face_of[2 * s + 1])
            if fa != fb:
                parent[fa] = fb
        target = find(gold.outer_face)
        for d in range(gold.ndarts):
            if find(gold.face_of[d]) == target:
                nd = map_dart(d)
                if nd != -1:
                    outer_dart_new = nd
                    break
    if outer_dart_new == -1:
        # old outer region lost every dart; fall back deterministically
        outer_dart_new = 0
    f = gnew.face_of[outer_dart_new]
    sub.outer = gnew.marker_of_face(f)
    return sub


def embedding_components(emb):
    """Vertex sets of the drawing's connected pieces, sorted by minimum.

    Two crossing edges belong to one piece even if the abstract graph
    keeps them apart, so components follow the planarization.
    """
    parent = {v: v for v in emb.vertices}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    for u, v in emb.edges.values():
        union(u, v)
    for e1, e2, _ in emb.crossings.values():
        union(emb.edges[e1][0], emb.edges[e2][0])
    groups = {}
    for v in emb.vertices:
        groups.setdefault(find(v), set()).add(v)
    return sorted(groups.values(), key=min)
