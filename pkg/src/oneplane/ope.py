"""Embedding data model and the .ope text format.

An instance is a 4-tuple: the simple graph, the set of crossings (each a
pair of edges with the cyclic corner order around the crossing point), a
rotation system giving the counterclockwise edge order around every real
vertex, and an outer-face marker.  The marker is a dart written as
``outer <edge> <tail-vertex>``; the outer face is the face lying on the
left of that dart when walking tail to head.

File format, one record per line, ``#`` starts a comment::

    ope 1
    v <id>
    e <id> <u> <v>
    x <id> <e1> <e2> <u1> <u2> <u3> <u4>
    rot <v>: <e> <e> ...
    outer <e> <v>

Crossing corners are listed counterclockwise; corners 1 and 3 are the
endpoints of ``e1``, corners 2 and 4 the endpoints of ``e2``.  Ring
augmentation produced by :func:`oneplane.circular.circularize` is recorded
in ``# aug x=<xid> w=<w1> <w2> <w3> <w4>`` comment lines so that the
restriction step can undo it; the parser keeps them in ``emb.aug``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import err


@dataclass
class OnePlaneEmbedding:
    vertices: set = field(default_factory=set)
    # edge id -> (u, v)
    edges: dict = field(default_factory=dict)
    # crossing id -> (e1, e2, (u1, u2, u3, u4))
    crossings: dict = field(default_factory=dict)
    # vertex -> list of edge ids, counterclockwise
    rotation: dict = field(default_factory=dict)
    # (edge id, tail vertex); outer face lies left of this dart
    outer: tuple = None
    # crossing id -> (w1, w2, w3, w4) ring vertices, set by circularize
    aug: dict = field(default_factory=dict)

    def copy(self) -> "OnePlaneEmbedding":
        return OnePlaneEmbedding(
            vertices=set(self.vertices),
            edges=dict(self.edges),
            crossings={x: (e1, e2, tuple(c)) for x, (e1, e2, c) in self.crossings.items()},
            rotation={v: list(r) for v, r in self.rotation.items()},
            outer=self.outer,
            aug={x: tuple(w) for x, w in self.aug.items()},
        )

    def crossed_edges(self) -> set:
        out = set()
        for e1, e2, _ in self.crossings.values():
            out.add(e1)
            out.add(e2)
        return out

    def edge_other(self, e: int, v: int) -> int:
        a, b = self.edges[e]
        return b if v == a else a

    def __eq__(self, other):
        if not isinstance(other, OnePlaneEmbedding):
            return NotImplemented
        return (
            self.vertices == other.vertices
            and self.edges == other.edges
            and self.crossings == other.crossings
            and self.rotation == other.rotation
            and self.outer == other.outer
            and self.aug == other.aug
        )


def parse_ope(text: str) -> OnePlaneEmbedding:
    emb = OnePlaneEmbedding()
    saw_header = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if line.startswith("#"):
            parts = line[1:].split()
            if parts[:1] == ["aug"] and len(parts) == 6 and parts[1].startswith("x="):
                try:
                    xid = int(parts[1][2:])
                    first = parts[2][2:] if parts[2].startswith("w=") else parts[2]
                    ws = (int(first),) + tuple(int(p) for p in parts[3:6])
                except ValueError:
                    raise err("IO_ERROR", f"line {lineno}: malformed aug comment", raw)
                emb.aug[xid] = ws
            continue
        if not line:
            continue
        # inline comments
        if "#" in line:
            line = line[: line.index("#")].strip()
            if not line:
                continue
        parts = line.split()
        tag = parts[0]
        try:
            if tag == "ope":
                if parts[1] != "1":
                    raise err("IO_ERROR", f"unsupported format version {parts[1]}")
                saw_header = True
            elif tag == "v":
                emb.vertices.add(int(parts[1]))
            elif tag == "e":
                eid = int(parts[1])
                if eid in emb.edges:
                    raise err("IO_ERROR", f"line {lineno}: duplicate edge id {eid}")
                emb.edges[eid] = (int(parts[2]), int(parts[3]))
            elif tag == "x":
                xid = int(parts[1])
                if xid in emb.crossings:
                    raise err("IO_ERROR", f"line {lineno}: duplicate crossing id {xid}")
                e1, e2 = int(parts[2]), int(parts[3])
                corners = tuple(int(p) for p in parts[4:8])
                if len(corners) != 4:
                    raise err("IO_ERROR", f"line {lineno}: crossing needs 4 corners", raw)
                emb.crossings[xid] = (e1, e2, corners)
            elif tag == "rot":
                vtxt = parts[1]
                if not vtxt.endswith(":"):
                    raise err("IO_ERROR", f"line {lineno}: rot line missing colon", raw)
                v = int(vtxt[:-1])
                if v in emb.rotation:
                    raise err("IO_ERROR", f"line {lineno}: duplicate rotation for {v}")
                emb.rotation[v] = [int(p) for p in parts[2:]]
            elif tag == "outer":
                if emb.outer is not None:
                    raise err("IO_ERROR", f"line {lineno}: duplicate outer line")
                emb.outer = (int(parts[1]), int(parts[2]))
            else:
                raise err("IO_ERROR", f"line {lineno}: unknown record {tag!r}", raw)
        except (IndexError, ValueError):
            raise err("IO_ERROR", f"line {lineno}: malformed record", raw)
    if not saw_header:
        raise err("IO_ERROR", "missing 'ope 1' header")
    if emb.outer is None:
        raise err("IO_ERROR", "missing outer line")
    return emb


def serialize_ope(emb: OnePlaneEmbedding) -> str:
    """Emit records sorted by id.  Round-trips exactly on canonical form."""
    out = ["ope 1"]
    for v in sorted(emb.vertices):
        out.append(f"v {v}")
    for e in sorted(emb.edges):
        u, v = emb.edges[e]
        out.append(f"e {e} {u} {v}")
    for x in sorted(emb.crossings):
        e1, e2, c = emb.crossings[x]
        out.append(f"x {x} {e1} {e2} {c[0]} {c[1]} {c[2]} {c[3]}")
    for v in sorted(emb.rotation):
        out.append(f"rot {v}: " + " ".join(str(e) for e in emb.rotation[v]))
    out.append(f"outer {emb.outer[0]} {emb.outer[1]}")
    for x in sorted(emb.aug):
        w = emb.aug[x]
        out.append(f"# aug x={x} w={w[0]} {w[1]} {w[2]} {w[3]}")
    return "\n".join(out) + "\n"


def validate(emb: OnePlaneEmbedding) -> None:
    """Raise OpeError on the first structural violation.

    Checks, in order: id sanity, simplicity, crossing structure, rotation
    completeness, and per-component sphericity of the planarization.
    """
    if len(emb.vertices) < 3:
        raise err("INVALID_INPUT", "need at least 3 vertices")
    seen_pairs = {}
    for e, (u, v) in emb.edges.items():
        if u not in emb.vertices or v not in emb.vertices:
            raise err("INVALID_INPUT", f"edge {e} references unknown vertex")
        if u == v:
            raise err("NON_SIMPLE_GRAPH", f"edge {e} is a self loop", e)
        key = (u, v) if u < v else (v, u)
        if key in seen_pairs:
            raise err("NON_SIMPLE_GRAPH", f"edges {seen_pairs[key]} and {e} are parallel", e)
        seen_pairs[key] = e

    crossed = {}
    for x, (e1, e2, corners) in emb.crossings.items():
        if e1 not in emb.edges or e2 not in emb.edges:
            raise err("INVALID_INPUT", f"crossing {x} references unknown edge")
        if e1 == e2:
            raise err("NON_ALTERNATING_CROSSING", f"crossing {x} crosses edge {e1} with itself", x)
        for e in (e1, e2):
            if e in crossed:
                raise err("DOUBLE_CROSSED_EDGE", f"edge {e} crossed at {crossed[e]} and {x}", e)
            crossed[e] = x
        if len(set(corners)) != 4:
            raise err("NON_ALTERNATING_CROSSING", f"crossing {x} corners not distinct", x)
        if {corners[0], corners[2]} != set(emb.edges[e1]) or {corners[1], corners[3]} != set(
            emb.edges[e2]
        ):
            raise err(
                "NON_ALTERNATING_CROSSING",
                f"crossing {x} corners do not alternate between its edges",
                x,
            )

    if set(emb.rotation) != emb.vertices:
        missing = emb.vertices ^ set(emb.rotation)
        raise err("BROKEN_ROTATION", "rotation keys differ from vertex set", sorted(missing))
    incident = {v: [] for v in emb.vertices}
    for e, (u, v) in emb.edges.items():
        incident[u].append(e)
        incident[v].append(e)
    for v, rot in emb.rotation.items():
        if sorted(rot) != sorted(incident[v]):
            raise err("BROKEN_ROTATION", f"rotation at {v} is not a permutation of its edges", v)

    e, v = emb.outer
    if e not in emb.edges or v not in emb.edges[e]:
        raise err("INVALID_INPUT", f"outer dart ({e}, {v}) is not a dart")

    # sphericity: each connected component of the planarization must satisfy
    # nodes - segments + faces = 2 (components without edges are trivially fine)
    from .planar import planarize

    g = planarize(emb)
    comp = [-1] * g.n
    ncomp = 0
    order = []
    for s in range(g.n):
        if comp[s] != -1 or not g.node_darts(s):
            continue
        comp[s] = ncomp
        stack = [s]
        while stack:
            a = stack.pop()
            order.append(a)
            for d in g.node_darts(a):
                b = g.head[d]
                if comp[b] == -1:
                    comp[b] = ncomp
                    stack.append(b)
        ncomp += 1
    nodes = [0] * ncomp
    segs = [0] * ncomp
    faces = [0] * ncomp
    for a in range(g.n):
        if comp[a] >= 0:
            nodes[comp[a]] += 1
    for d in range(0, g.ndarts, 2):
        segs[comp[g.tail[d]]] += 1
    for f in range(g.nfaces):
        faces[comp[g.tail[g.face_dart[f]]]] += 1
    for k in range(ncomp):
        if nodes[k] - segs[k] + faces[k] != 2:
            raise err(
                "NON_SPHERICAL",
                f"component {k}: V-E+F = {nodes[k]}-{segs[k]}+{faces[k]} != 2",
            )


def canonicalize(emb: OnePlaneEmbedding) -> OnePlaneEmbedding:
    """Normal form: rotations start at their smallest edge id, crossing
    corners start at the smallest corner vertex (cyclic order kept, edge
    pairing re-labelled when the shift is odd), outer marker replaced by
    the lexicographically smallest dart on the same face."""
    out = emb.copy()
    for v, rot in out.rotation.items():
        if rot:
            k = rot.index(min(rot))
            out.rotation[v] = rot[k:] + rot[:k]
    for x, (e1, e2, c) in out.crossings.items():
        k = c.index(min(c))
        c2 = c[k:] + c[:k]
        if k % 2 == 1:
            e1, e2 = e2, e1
        out.crossings[x] = (e1, e2, c2)

    from .planar import planarize

    g = planarize(out)
    f = g.face_of[g.dart_of_outer(out.outer)]
    best = None
    d = g.face_dart[f]
    while True:
        t = g.tail[d]
        if g.node_kind[t] == 0:  # dart leaving a real vertex
            key = (g.dart_edge[d], g.node_label[t])
            if best is None or key < best:
                best = key
        d = g.face_next[d]
        if d == g.face_dart[f]:
            break
    assert best is not None, "face with no vertex-tailed dart"
    out.outer = best
    return out
