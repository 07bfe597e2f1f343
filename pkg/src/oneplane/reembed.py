"""Re-embedding pipeline: straight-line drawability in linear time.

Decides whether a drawing with at most one crossing per edge can be
redrawn, keeping exactly the same crossing pairs, so that every edge
becomes a straight segment.  The answer is constructive either way: a
clean embedding, or a pair of obstruction cycles that no choice of outer
face can defuse.

The pipeline works on the ring-augmented instance and maps the result
back.  Each biconnected block is handled through the cycle catalog:

* ``reroot`` moves the outer face marker,
* ``eliminate_soft`` flips defused obstructions away with spindle
  mirrors once a root with no hard obstruction is chosen,
* ``reembed_biconnected`` combines the two and emits a certificate
  when the admissible face set is empty,
* ``z_exposed_reembed`` additionally keeps a chosen vertex on the
  outer boundary, or reports the cycle that ties it down,
* ``reembed`` splits an arbitrary instance into components and blocks,
  solves leaf blocks with their cut vertex exposed, and glues the
  solved blocks back around the cut vertices.

Certificates found inside one block are re-expressed in the
planarization of the whole augmented component (``ReembedOutcome.context``)
so the oracle's checker can audit them without knowing the block split.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, replace

from . import metrics
from .circular import circularize, restrict
from .cycles import (
    ForbiddenPair,
    admissible_faces,
    build_catalog,
    in_factor_cycle,
)
from .errors import OpeError, err
from .laminar import cycle_runs, runs_member
from .ope import OnePlaneEmbedding, validate
from .planar import (
    blocks,
    embedding_components,
    induced_subembedding,
    planarize,
    region_sets,
)
from .spindle import Spindle, flip_spindles

log = logging.getLogger(__name__)


@dataclass
class ReembedOutcome:
    """Result of a drawability decision; exactly one field of the first
    two is populated."""

    embedding: OnePlaneEmbedding = None  # straight-line drawable re-embedding
    pair: ForbiddenPair = None  # obstruction certificate when none exists
    context: OnePlaneEmbedding = None  # augmented instance the pair refers to

    @property
    def feasible(self) -> bool:
        return self.embedding is not None


def reroot(emb: OnePlaneEmbedding, face: int) -> OnePlaneEmbedding:
    """Copy of the embedding with ``face`` of its planarization as outer."""
    g = planarize(emb)
    if not 0 <= face < g.nfaces:
        raise err("UNKNOWN_FACE", f"no face {face}, planarization has {g.nfaces}")
    out = emb.copy()
    if face != g.outer_face:
        out.outer = g.marker_of_face(face)
    return out


def _outer_vertices(g) -> set:
    return {g.node_label[a] for a in g.face_nodes(g.outer_face) if g.node_kind[a] == 0}


def _spindle_for(catalog, c) -> Spindle:
    """Flip recipe for one defused obstruction.

    The spindle runs along the strand of the cycle that passes a crossing
    between both anchors, and closes through the boundary arc of the
    witness face that keeps the witness outside the flipped side.  The
    flip re-hangs everything between strand and witness on the far side
    of the strand, which moves the trapped neighbours out of the cycle.
    """
    g, dt = catalog.g, catalog.dt
    u, v = c.anchors
    vu, vv = g.vnode[u], g.vnode[v]

    # the strand crossing holds the anchors on adjacent corners; a
    # crossing with them on opposite corners shares an edge with both
    picks = []
    for x in c.crossings:
        heads = [g.node_label[g.head[d]] for d in g.node_darts(g.xnode[x])]
        if (heads.index(u) - heads.index(v)) % 4 != 2:
            picks.append(x)
    if not picks:
        raise AssertionError("obstruction cycle without an anchor-pairing crossing")
    xc = g.xnode[min(picks)]

    walk = [g.tail[d] for d in g.face_darts(c.witness_face)]
    iu, iv = walk.index(vu), walk.index(vv)
    k = len(walk)
    forward = []  # vv to vu along the walk
    i = iv
    while i != iu:
        forward.append(walk[i])
        i = (i + 1) % k
    forward.append(vu)
    backward = []  # vv to vu against the walk
    i = iv
    while i != iu:
        backward.append(walk[i])
        i = (i - 1) % k
    backward.append(vu)

    chosen = None
    pos_f = dt.tin[c.witness_face]
    for arc in (forward, backward):
        if xc in arc:
            continue
        nodes = [vu, xc, vv] + arc[1:-1]
        if not runs_member(cycle_runs(g, dt, nodes), pos_f):
            chosen = nodes
            break
    if chosen is None:
        raise AssertionError("witness face enclosed by both candidate spindles")
    refs = tuple(
        ("v" if g.node_kind[a] == 0 else "x", g.node_label[a]) for a in chosen
    )
    return Spindle(cycle=refs, junctions=(u, v), side="in")


def eliminate_soft(emb: OnePlaneEmbedding, _catalog=None) -> OnePlaneEmbedding:
    """Flip every defused obstruction off the catalog.

    Precondition: the block is biconnected, ring-augmented, and rooted so
    that no hard obstruction exists.  One aggregate flip removes all
    current obstructions; rounds repeat only if flips uncover new defused
    ones, and the round count is capped loudly.
    """
    cat = _catalog if _catalog is not None else build_catalog(emb)
    if cat.hard:
        raise err("INVALID_INPUT", "rooted obstructions present, reroot first")
    work = emb
    horizon = _outer_vertices(cat.g)
    rounds, limit = 0, max(4, len(emb.vertices))
    while cat.soft:
        if rounds >= limit:
            raise err("FIXPOINT_EXCEEDED", f"obstructions survive {rounds} flip rounds")
        spindles = [_spindle_for(cat, c) for c in cat.soft]
        try:
            work = flip_spindles(work, spindles)
        except OpeError as exc:
            if exc.code != "NOT_A_SPINDLE" or len(spindles) == 1:
                raise err("FIXPOINT_EXCEEDED", f"flip recipe rejected: {exc}") from exc
            # interfering spindles: retreat to one flip per round
            work = flip_spindles(work, spindles[:1])
        rounds += 1
        cat = build_catalog(work)
        if cat.hard:
            raise err("FIXPOINT_EXCEEDED", "flips uncovered a rooted obstruction")
        now = _outer_vertices(cat.g)
        if not horizon <= now:
            log.warning(
                "outer boundary lost vertices %s in a flip round",
                sorted(horizon - now),
            )
        horizon = now
    return work


def _solve_rooted(emb, cat, adm, expose=None):
    """Reroot into an admissible face and flip the catalog clean.

    With ``expose`` set, only admissible faces carrying that vertex
    qualify, which keeps it on the outer boundary afterwards."""
    g = cat.g
    faces = adm.faces
    if expose is not None:
        vz = g.vnode[expose]
        faces = [f for f in faces if vz in set(g.face_nodes(f))]
        if not faces:
            raise AssertionError("tie scan missed a vertex with no exposing face")
    f = g.outer_face if g.outer_face in faces else faces[0]
    out = reroot(emb, f)
    cat2 = cat if f == g.outer_face else build_catalog(out)
    if cat2.hard:
        raise AssertionError("admissible root face left a rooted obstruction")
    out = eliminate_soft(out, cat2)
    if expose is not None:
        g3 = planarize(out)
        if expose not in _outer_vertices(g3):
            raise AssertionError("flips dropped the exposed vertex off the boundary")
    return out


def reembed_biconnected(emb: OnePlaneEmbedding) -> ReembedOutcome:
    """Decide one biconnected ring-augmented piece."""
    cat = build_catalog(emb)
    adm = admissible_faces(cat)
    if isinstance(adm, ForbiddenPair):
        return ReembedOutcome(pair=adm, context=emb)
    return ReembedOutcome(embedding=_solve_rooted(emb, cat, adm))


def z_exposed_reembed(emb: OnePlaneEmbedding, z: int):
    """Clean re-embedding with ``z`` on the outer boundary, or the
    witness cycle that ties ``z`` away from every admissible face."""
    cat = build_catalog(emb)
    adm = admissible_faces(cat)
    if isinstance(adm, ForbiddenPair):
        raise err("INVALID_INPUT", "instance admits no outer face at all")
    wit = in_factor_cycle(cat, z, adm)
    if wit is not None:
        return wit
    return _solve_rooted(emb, cat, adm, expose=z)


def _lift_nodes(nodes, gl, gg) -> list:
    out = []
    for a in nodes:
        lab = gl.node_label[a]
        out.append(gg.vnode[lab] if gl.node_kind[a] == 0 else gg.xnode[lab])
    return out


def _lift_cycle(c, gl, gg):
    # runs and witness face are planarization-relative, certificates
    # only need the cycle itself
    return replace(
        c,
        nodes=tuple(_lift_nodes(c.nodes, gl, gg)),
        runs=None,
        witness_face=None,
    )


def _lift_pair(pair, gl, gg) -> ForbiddenPair:
    return ForbiddenPair(
        cycle_a=_lift_cycle(pair.cycle_a, gl, gg),
        cycle_b=_lift_cycle(pair.cycle_b, gl, gg),
        kind=pair.kind,
        path_u=_lift_nodes(pair.path_u, gl, gg),
        path_v=_lift_nodes(pair.path_v, gl, gg),
    )


def _bfs_path(g, s, t, ok):
    if not ok(s) or not ok(t):
        return None
    if s == t:
        return [s]
    prev = {s: -1}
    q = deque([s])
    while q:
        a = q.popleft()
        metrics.bump(1, "reembed")
        for d in g.node_darts(a):
            b = g.head[d]
            if b in prev or not ok(b):
                continue
            prev[b] = a
            if b == t:
                path = [t]
                while path[-1] != s:
                    path.append(prev[path[-1]])
                path.reverse()
                return path
            q.append(b)
    return None


def _cross_block_pair(g, state, first, second) -> ForbiddenPair:
    """Certificate from two cut vertices tied inside different blocks.

    Each witness pins its cut vertex to a cycle; the cut vertices reach
    each other through the block tree, so the witness paths concatenate
    into the two anchor-to-anchor paths of a forbidden pair.  Two tied
    outsides give disjoint interiors; a tied inside swallows the whole
    rest of the tree and gives the enclosed kind.  Two tied insides would
    enclose each other and cannot both exist.
    """
    b1, _z1, w1 = first
    b2, _z2, w2 = second
    if w1.side == "in" and w2.side == "in":
        raise AssertionError("two mutually enclosing tied blocks")
    if w1.side == "in":
        first, second = second, first
        b1, _z1, w1 = first
        b2, _z2, w2 = second
    kind = "separate" if w2.side == "ex" else "enclosed"
    ga, gb = state[b1][1].g, state[b2][1].g
    ca = _lift_cycle(w1.cycle, ga, g)
    cb = _lift_cycle(w2.cycle, gb, g)
    rsa = region_sets(g, list(ca.nodes))
    rsb = region_sets(g, list(cb.nodes))
    if kind == "separate":
        bad = rsa.nodes_in | rsb.nodes_in | rsa.nodes_on | rsb.nodes_on

        def ok(n):
            return n not in bad

    else:
        bad = rsa.nodes_in | rsa.nodes_on | rsb.nodes_on

        def ok(n):
            return n in rsb.nodes_in and n not in bad

    p1u = _lift_nodes(w1.path_u, ga, g)
    p1v = _lift_nodes(w1.path_v, ga, g)
    p2u = _lift_nodes(w2.path_u, gb, g)
    p2v = _lift_nodes(w2.path_v, gb, g)
    conn = _bfs_path(g, p1u[0], p2u[0], ok)
    if conn is None:
        raise AssertionError("tied cut vertices cannot reach each other")
    return ForbiddenPair(
        cycle_a=ca,
        cycle_b=cb,
        kind=kind,
        path_u=p1u[::-1] + conn[1:] + p2u[1:],
        path_v=p1v[::-1] + conn[1:] + p2v[1:],
    )


def _attach(host, guest, w):
    """Plant a solved block into the first host face at its cut vertex.

    The guest arrives with ``w`` exposed; its rotation is spliced into
    the host rotation at ``w`` so that the guest's former outer region
    opens into the chosen host face."""
    gh = planarize(host)
    darts = list(gh.node_darts(gh.vnode[w]))
    fhost = min(gh.face_of[d] for d in darts)
    k = next(i for i, d in enumerate(darts) if gh.face_of[d] == fhost)

    gg = planarize(guest)
    gd = list(gg.node_darts(gg.vnode[w]))
    starts = [i for i, d in enumerate(gd) if gg.face_of[d] == gg.outer_face]
    if len(starts) != 1:
        raise AssertionError("cut vertex not exposed exactly once on a solved block")
    i = starts[0]
    arc = [gg.dart_edge[d] for d in gd[i + 1 :] + gd[: i + 1]]

    out = host.copy()
    out.vertices |= guest.vertices
    out.edges.update(guest.edges)
    out.crossings.update(guest.crossings)
    out.aug.update(guest.aug)
    for v, rot in guest.rotation.items():
        if v != w:
            out.rotation[v] = list(rot)
    hr = out.rotation[w]
    out.rotation[w] = hr[: k + 1] + arc + hr[k + 1 :]
    metrics.bump(len(out.rotation[w]), "reembed")
    return out


def _assert_clean(emb) -> None:
    # the promised postcondition, re-checked from scratch per block
    g = planarize(emb)
    blk, _cuts = blocks(g)
    for nodes in blk:
        vs = {g.node_label[a] for a in nodes if g.node_kind[a] == 0}
        if len(vs) < 3:
            continue
        cat = build_catalog(induced_subembedding(emb, vs))
        if cat.obstructions:
            raise err("FIXPOINT_EXCEEDED", "assembled piece still carries an obstruction")


def _solve_component(csub):
    """Decide one connected ring-augmented piece.

    Returns (embedding, None) on success, (None, pair) on a certificate;
    pair node ids refer to the planarization of ``csub``."""
    if not csub.crossings:
        return csub, None
    g = planarize(csub)
    blk, cutnodes = blocks(g)
    cutlabels = set()
    for a in cutnodes:
        if g.node_kind[a] != 0:
            raise AssertionError("a crossing separates the augmented drawing")
        cutlabels.add(g.node_label[a])
    binfo = sorted(
        ({g.node_label[a] for a in nodes if g.node_kind[a] == 0} for nodes in blk),
        key=lambda vs: tuple(sorted(vs)),
    )

    # every sizable block must admit some root face, else certify now
    state = {}
    for bid, vs in enumerate(binfo):
        if len(vs) < 3:
            continue
        sub = induced_subembedding(csub, vs)
        cat = build_catalog(sub)
        adm = admissible_faces(cat)
        if isinstance(adm, ForbiddenPair):
            return None, _lift_pair(adm, cat.g, g)
        state[bid] = (sub, cat, adm)

    # strip leaf blocks that can expose their cut vertex; a block that
    # cannot stays put, and a second such block certifies a pair
    at = {}
    cuts_of = []
    for bid, vs in enumerate(binfo):
        own = vs & cutlabels
        cuts_of.append(own)
        for w in own:
            at.setdefault(w, set()).add(bid)
    active = set(range(len(binfo)))
    livecnt = {bid: len(cuts_of[bid]) for bid in active}
    queue = deque(bid for bid in sorted(active) if livecnt[bid] <= 1)
    order = []
    stuck = None
    while len(active) > 1:
        if not queue:
            raise AssertionError("block tree stripping stalled")
        bid = queue.popleft()
        if bid not in active or livecnt[bid] != 1:
            continue
        (v_b,) = [w for w in cuts_of[bid] if len(at[w]) >= 2]
        vs = binfo[bid]
        if len(vs) < 3:
            solved = induced_subembedding(csub, vs)
        else:
            sub, cat, adm = state[bid]
            wit = in_factor_cycle(cat, v_b, adm)
            if wit is not None:
                if stuck is None:
                    stuck = (bid, v_b, wit)
                    continue
                return None, _cross_block_pair(g, state, stuck, (bid, v_b, wit))
            solved = _solve_rooted(sub, cat, adm, expose=v_b)
        order.append((bid, v_b, solved))
        active.discard(bid)
        for w in cuts_of[bid]:
            at[w].discard(bid)
            if len(at[w]) == 1:
                (other,) = at[w]
                livecnt[other] -= 1
                if other in active and livecnt[other] <= 1:
                    queue.append(other)

    # rebuild inside out, re-exposing each cut vertex in turn
    (root,) = active
    vs = binfo[root]
    if len(vs) < 3:
        base = induced_subembedding(csub, vs)
    else:
        sub, cat, adm = state[root]
        base = _solve_rooted(sub, cat, adm)
    for _bid, v_b, solved in reversed(order):
        base = _attach(base, solved, v_b)
    _assert_clean(base)
    return base, None


def _merge_pieces(pieces) -> OnePlaneEmbedding:
    # later components land in the outer face of the first one
    base = pieces[0].copy()
    for p in pieces[1:]:
        base.vertices |= p.vertices
        base.edges.update(p.edges)
        base.crossings.update(p.crossings)
        base.aug.update(p.aug)
        for v, rot in p.rotation.items():
            base.rotation[v] = list(rot)
    if base.outer is None:
        for p in pieces:
            if p.outer is not None:
                base.outer = p.outer
                break
    return base


def reembed(emb: OnePlaneEmbedding) -> ReembedOutcome:
    """Full drawability decision for any valid instance.

    Rings are added around every crossing for the duration of the
    decision and removed from the answer, so certificates refer to the
    ring-augmented instance stored in ``context``."""
    validate(emb)
    if not emb.crossings:
        return ReembedOutcome(embedding=emb.copy())
    cemb, aug = circularize(emb)
    comps = embedding_components(cemb)
    pieces = []
    for comp in comps:
        csub = induced_subembedding(cemb, comp) if len(comps) > 1 else cemb
        solved, pair = _solve_component(csub)
        if pair is not None:
            return ReembedOutcome(pair=pair, context=csub)
        pieces.append(solved)
    final = restrict(_merge_pieces(pieces), aug)
    validate(final)
    return ReembedOutcome(embedding=final)
