"""Random 1-plane instance generator.

Builds a plane skeleton (a concentric cylinder grid, or a plain cycle
when no crossed quads are requested), roughens it with random chords
and subdivisions, then installs a crossing pair of diagonals in each of
a set of vertex-disjoint quadrilateral faces.  Two optional decorations
exercise the cut-vertex machinery: pendant paths, and obstruction
blocks copied from the verified fixture shapes (a rescuable one-crossing
block, and a two-crossing block that refuses to expose its glue vertex;
two of the latter make the instance undrawable).  Output is
deterministic for a given spec and always passes validation.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import err
from .ope import OnePlaneEmbedding, validate
from .planar import planarize


@dataclass(frozen=True)
class GeneratorSpec:
    vertices: int
    crossings: int = 0
    seed: int = 0
    biconnected: bool = True  # when False, pendant paths hang off the skeleton
    gadgets: bool = False  # glue obstruction blocks at cut vertices


class _Ids:
    def __init__(self, emb):
        self._v = max(emb.vertices, default=0)
        self._e = max(emb.edges, default=0)
        self._x = max(emb.crossings, default=0)

    def vertex(self):
        self._v += 1
        return self._v

    def edge(self):
        self._e += 1
        return self._e

    def crossing(self):
        self._x += 1
        return self._x


def _reserved_slots(rows, cols):
    # pairwise vertex-disjoint quad faces of the grid
    out = []
    for r in range(0, rows - 1, 2):
        for c in range(0, cols - 1, 2):
            out.append((r, c))
    return out


def _cycle_skeleton(n):
    edges = {i: (i, 1 + i % n) for i in range(1, n + 1)}
    rot = {}
    for v in range(1, n + 1):
        prev = v - 1 if v > 1 else n
        rot[v] = [prev, v]
    return OnePlaneEmbedding(
        vertices=set(range(1, n + 1)),
        edges=edges,
        crossings={},
        rotation=rot,
        outer=(1, 1),
    )


class _Grid:
    """Cylinder grid: ``rows`` concentric rings of ``cols`` vertices.

    Ring c-indices grow counterclockwise, row 0 is innermost.  The ccw
    rotation at a vertex is [outward, next-in-ring, inward, previous].
    """

    def __init__(self, rows, cols):
        self.rows, self.cols = rows, cols
        verts = set(range(1, rows * cols + 1))
        edges = {}
        rot = {}
        for r in range(rows):
            for c in range(cols):
                edges[self.ring(r, c)] = (self.vid(r, c), self.vid(r, c + 1))
                if r + 1 < rows:
                    edges[self.vert(r, c)] = (self.vid(r, c), self.vid(r + 1, c))
                order = []
                if r + 1 < rows:
                    order.append(self.vert(r, c))
                order.append(self.ring(r, c))
                if r > 0:
                    order.append(self.vert(r - 1, c))
                order.append(self.ring(r, c - 1))
                rot[self.vid(r, c)] = order
        self.emb = OnePlaneEmbedding(
            vertices=verts, edges=edges, crossings={}, rotation=rot, outer=(1, 1)
        )

    def vid(self, r, c):
        return r * self.cols + (c % self.cols) + 1

    def ring(self, r, c):
        return r * self.cols + (c % self.cols) + 1

    def vert(self, r, c):
        return self.rows * self.cols + r * self.cols + (c % self.cols) + 1

    def _insert_after(self, v, anchor, eid):
        lst = self.emb.rotation[v]
        lst.insert(lst.index(anchor) + 1, eid)

    def add_main_diagonal(self, r, c, eid):
        # vid(r,c) -- vid(r+1,c+1), drawn inside quad (r,c)
        self.emb.edges[eid] = (self.vid(r, c), self.vid(r + 1, c + 1))
        self._insert_after(self.vid(r, c), self.vert(r, c), eid)
        self._insert_after(self.vid(r + 1, c + 1), self.vert(r, c + 1), eid)

    def add_anti_diagonal(self, r, c, eid):
        # vid(r,c+1) -- vid(r+1,c), drawn inside quad (r,c)
        self.emb.edges[eid] = (self.vid(r, c + 1), self.vid(r + 1, c))
        self._insert_after(self.vid(r, c + 1), self.ring(r, c), eid)
        self._insert_after(self.vid(r + 1, c), self.ring(r + 1, c), eid)

    def add_crossing(self, r, c, ids):
        e1, e2, x = ids.edge(), ids.edge(), ids.crossing()
        self.add_main_diagonal(r, c, e1)
        self.add_anti_diagonal(r, c, e2)
        self.emb.crossings[x] = (
            e1,
            e2,
            (self.vid(r, c), self.vid(r + 1, c), self.vid(r + 1, c + 1), self.vid(r, c + 1)),
        )

    def subdivide_vertical(self, r, c, ids):
        e = self.vert(r, c)
        u, v = self.emb.edges[e]
        w, e2 = ids.vertex(), ids.edge()
        self.emb.vertices.add(w)
        self.emb.edges[e] = (u, w)
        self.emb.edges[e2] = (w, v)
        self.emb.rotation[w] = [e, e2]
        lst = self.emb.rotation[v]
        lst[lst.index(e)] = e2


def _attach_path(emb, at, length, ids, rng):
    prev = at
    for _ in range(length):
        w, e = ids.vertex(), ids.edge()
        emb.vertices.add(w)
        emb.edges[e] = (prev, w)
        if prev == at:
            emb.rotation[at].insert(rng.randrange(len(emb.rotation[at]) + 1), e)
        else:
            emb.rotation[prev].append(e)
        emb.rotation[w] = [e]
        prev = w


def _glue_soft_block(emb, z, ids, rng):
    """One-crossing obstruction hanging off z; always rescuable."""
    a, b, c = ids.vertex(), ids.vertex(), ids.vertex()
    e1, e2, e3 = ids.edge(), ids.edge(), ids.edge()
    emb.vertices |= {a, b, c}
    emb.edges[e1] = (z, a)
    emb.edges[e2] = (a, b)
    emb.edges[e3] = (b, c)
    emb.crossings[ids.crossing()] = (e1, e3, (a, c, z, b))
    emb.rotation[a] = [e1, e2]
    emb.rotation[b] = [e2, e3]
    emb.rotation[c] = [e3]
    emb.rotation[z].insert(rng.randrange(len(emb.rotation[z]) + 1), e1)


def _glue_tied_block(emb, z, ids, rng):
    """Two-crossing block that cannot expose z in any drawable
    re-embedding; one copy forces the block outermost, two copies make
    the whole instance undrawable."""
    b1, b2, b3, b4, b5, b6 = (ids.vertex() for _ in range(6))
    e1, e2, e3, e4, e5, e6, e7, e8 = (ids.edge() for _ in range(8))
    emb.vertices |= {b1, b2, b3, b4, b5, b6}
    emb.edges.update(
        {
            e1: (b1, b3),
            e2: (b2, b4),
            e3: (b1, b5),
            e4: (b2, b6),
            e5: (b3, b5),
            e6: (b4, b6),
            e7: (b1, z),
            e8: (b2, z),
        }
    )
    emb.crossings[ids.crossing()] = (e1, e2, (b1, b4, b3, b2))
    emb.crossings[ids.crossing()] = (e3, e4, (b1, b2, b5, b6))
    emb.rotation[b1] = [e1, e7, e3]
    emb.rotation[b2] = [e2, e4, e8]
    emb.rotation[b3] = [e1, e5]
    emb.rotation[b4] = [e2, e6]
    emb.rotation[b5] = [e5, e3]
    emb.rotation[b6] = [e6, e4]
    pos = rng.randrange(len(emb.rotation[z]) + 1)
    emb.rotation[z][pos:pos] = [e8, e7]


def gen(spec: GeneratorSpec) -> OnePlaneEmbedding:
    """Build a valid random instance, deterministic for the spec."""
    if spec.vertices < 3:
        raise err("INFEASIBLE_SPEC", "need at least 3 vertices")
    if spec.crossings < 0:
        raise err("INFEASIBLE_SPEC", "negative crossing count")
    rng = random.Random(spec.seed)

    tied = soft = 0
    if spec.gadgets:
        mixes = []
        for k in (0, 1, 2):
            for s in (0, 1, 2):
                if not 1 <= k + s <= 2:
                    continue
                if 2 * k + s > spec.crossings:
                    continue
                if 6 * k + 3 * s > spec.vertices - 3:
                    continue
                mixes.append((k, s))
        if not mixes:
            raise err(
                "INFEASIBLE_SPEC",
                "no obstruction block mix fits the vertex and crossing budget",
            )
        tied, soft = rng.choice(mixes)

    pend = 0
    if not spec.biconnected:
        room = spec.vertices - 3 - 6 * tied - 3 * soft
        if room < 1:
            raise err("INFEASIBLE_SPEC", "no room for a pendant path")
        pend = rng.randint(1, min(3, room))

    n_skel = spec.vertices - 6 * tied - 3 * soft - pend
    quad_x = spec.crossings - 2 * tied - soft
    if quad_x < 0:
        raise err("INFEASIBLE_SPEC", "crossing budget smaller than the gadget mix")

    if quad_x == 0 and (n_skel < 6 or rng.random() < 0.4):
        emb = _cycle_skeleton(n_skel)
    else:
        layouts = []
        for cols in (3, 4, 5, 6):
            rows = n_skel // cols
            if rows < 2:
                continue
            if len(_reserved_slots(rows, cols)) < quad_x:
                continue
            if n_skel - rows * cols > (rows - 1) * cols - 2 * quad_x:
                continue  # not enough free verticals to subdivide
            layouts.append((cols, rows))
        if not layouts:
            raise err(
                "INFEASIBLE_SPEC",
                f"no grid with {quad_x} disjoint quad faces fits {n_skel} vertices",
            )
        cols, rows = rng.choice(layouts)
        grid = _Grid(rows, cols)
        ids = _Ids(grid.emb)
        slots = _reserved_slots(rows, cols)
        picked = rng.sample(slots, quad_x)
        for r, c in picked:
            grid.add_crossing(r, c, ids)
        reserved = set(picked)
        for r in range(rows - 1):
            for c in range(cols):
                if (r, c) in reserved:
                    continue
                roll = rng.random()
                if roll < 0.15:
                    grid.add_main_diagonal(r, c, ids.edge())
                elif roll < 0.3:
                    grid.add_anti_diagonal(r, c, ids.edge())
        banned = {(r, cc) for r, c in reserved for cc in (c, c + 1)}
        free = [
            (r, c)
            for r in range(rows - 1)
            for c in range(cols)
            if (r, c) not in banned
        ]
        for r, c in rng.sample(free, n_skel - rows * cols):
            grid.subdivide_vertical(r, c, ids)
        emb = grid.emb

    ids = _Ids(emb)
    if pend:
        _attach_path(emb, rng.choice(sorted(emb.vertices)), pend, ids, rng)
    if tied or soft:
        hosts = sorted(emb.vertices)
        zs = [rng.choice(hosts) for _ in range(tied + soft)]
        if tied == 2 and rng.random() < 0.5:
            zs[1] = zs[0]  # share the glue vertex: certificate paths meet there
        for _ in range(tied):
            _glue_tied_block(emb, zs.pop(0), ids, rng)
        for _ in range(soft):
            _glue_soft_block(emb, zs.pop(0), ids, rng)

    g = planarize(emb)
    emb.outer = g.marker_of_face(rng.randrange(g.nfaces))
    validate(emb)
    return emb
