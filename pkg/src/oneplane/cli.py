"""Command-line surface: validation, configuration detection,
re-embedding with certificates, the exhaustive oracle, instance
generation and the linearity benchmark.

Exit codes: 0 done, 1 invalid input or failed check, 2 undrawable with
certificate, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import sys
import time
from dataclasses import dataclass

from . import metrics
from .circular import circularize
from .cycles import CandidateCycle, ForbiddenPair
from .errors import OpeError, err
from .gen import GeneratorSpec, gen
from .ope import parse_ope, serialize_ope, validate
from .oracle import (
    EnumerationBudget,
    oracle_decision,
    scan_configurations,
    verify_forbidden_pair,
)
from .planar import embedding_components, induced_subembedding, planarize
from .reembed import reembed

MODULE_COLUMNS = ("circular", "cycles", "laminar", "planar", "reembed", "spindle")


@dataclass
class RunMetrics:
    n: int
    crossings: int
    faces: int
    elapsed_gen: float
    elapsed_reembed: float
    ops: dict  # per-module instrumented counters

    @property
    def ops_total(self) -> int:
        return sum(self.ops.values())

    def row(self) -> list:
        return (
            [self.n, self.crossings, self.faces, self.ops_total]
            + [self.ops.get(m, 0) for m in MODULE_COLUMNS]
            + [f"{self.elapsed_gen:.3f}", f"{self.elapsed_reembed:.3f}"]
        )

    @staticmethod
    def header() -> list:
        return (
            ["n", "crossings", "faces", "ops_total"]
            + [f"ops_{m}" for m in MODULE_COLUMNS]
            + ["gen_seconds", "reembed_seconds"]
        )


def _read(path: str) -> str:
    try:
        if path == "-":
            return sys.stdin.read()
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as ex:
        raise err("IO_ERROR", str(ex)) from ex


def _write(path, text: str) -> None:
    try:
        if path in (None, "-"):
            sys.stdout.write(text)
        else:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(text)
    except OSError as ex:
        raise err("IO_ERROR", str(ex)) from ex


def _load(path: str):
    emb = parse_ope(_read(path))
    validate(emb)
    return emb


def to_dot(emb) -> str:
    """DOT rendering of the planarization, for human inspection only."""
    g = planarize(emb)
    lines = ["graph planarization {", "  node [fontsize=10];"]
    for a in range(g.n):
        shape = "circle" if g.node_kind[a] == 0 else "box"
        lines.append(f'  n{a} [label="{g.node_name(a)}", shape={shape}];')
    for s in range(g.nseg):
        d = 2 * s
        lines.append(f'  n{g.tail[d]} -- n{g.head[d]} [label="e{g.dart_edge[d]}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _maybe_dot(args, emb) -> None:
    if getattr(args, "emit_dot", None):
        _write(args.emit_dot, to_dot(emb))


# -- certificates ------------------------------------------------------

def format_certificate(pair: ForbiddenPair, context) -> str:
    """Stable text form of a pair certificate, node names as in the
    ring-augmented component that produced it."""
    g = planarize(context)

    def names(nodes):
        return " ".join(g.node_name(n) for n in nodes)

    def cyc(label, c):
        kind = c.kind or "nega"
        anchors = " ".join(f"v{a}" for a in c.anchors)
        return f"cycle-{label} {kind} anchors {anchors} nodes {names(c.nodes)}"

    return (
        f"cert forbidden-pair {pair.kind}\n"
        f"component v{min(context.vertices)}\n"
        f"{cyc('a', pair.cycle_a)}\n"
        f"{cyc('b', pair.cycle_b)}\n"
        f"path-u {names(pair.path_u)}\n"
        f"path-v {names(pair.path_v)}\n"
    )


def _component_context(emb, v: int):
    # mirror of the pipeline: certificates live in the ring-augmented
    # component containing the named vertex
    cemb, _ = circularize(emb)
    comps = embedding_components(cemb)
    for comp in comps:
        if v in comp:
            return induced_subembedding(cemb, comp) if len(comps) > 1 else cemb
    raise err("INVALID_INPUT", f"certificate anchor v{v} is not in the instance")


def check_certificate(emb, text: str) -> list:
    """Re-audit a serialized certificate against its instance."""
    fields = {}
    kind = None
    for ln in text.splitlines():
        ln = ln.strip()
        if not ln or ln.startswith("#"):
            continue
        head, _, rest = ln.partition(" ")
        if head == "cert":
            parts = rest.split()
            if len(parts) != 2 or parts[0] != "forbidden-pair":
                return [f"unsupported certificate header: {ln!r}"]
            kind = parts[1]
        else:
            fields[head] = rest
    needed = {"component", "cycle-a", "cycle-b", "path-u", "path-v"}
    if kind is None or not needed <= set(fields):
        return [f"certificate is missing {sorted(needed - set(fields))}"]

    context = _component_context(emb, int(fields["component"].lstrip("v")))
    g = planarize(context)

    def resolve(name):
        label = int(name[1:])
        table = g.vnode if name[0] == "v" else g.xnode
        if name[0] not in "vx" or label not in table:
            raise err("INVALID_INPUT", f"certificate names unknown node {name!r}")
        return table[label]

    def cycle(spec):
        words = spec.split()
        ck = words[0]
        ai = words.index("anchors")
        ni = words.index("nodes")
        anchors = tuple(int(w.lstrip("v")) for w in words[ai + 1 : ni])
        nodes = tuple(resolve(w) for w in words[ni + 1 :])
        return CandidateCycle(
            nodes=nodes,
            anchors=anchors,
            crossings=tuple(int(w[1:]) for w in words[ni + 1 :] if w[0] == "x"),
            edge=None,
            clean_in=True,
            clean_ex=True,
            runs=None,
            kind=None if ck == "nega" else ck,
        )

    try:
        pair = ForbiddenPair(
            cycle_a=cycle(fields["cycle-a"]),
            cycle_b=cycle(fields["cycle-b"]),
            kind=kind,
            path_u=[resolve(w) for w in fields["path-u"].split()],
            path_v=[resolve(w) for w in fields["path-v"].split()],
        )
    except (OpeError, ValueError, IndexError) as ex:
        return [f"malformed certificate: {ex}"]
    return verify_forbidden_pair(context, pair)


# -- subcommands -------------------------------------------------------

def cmd_validate(args) -> int:
    emb = _load(args.file)
    g = planarize(emb)
    print(
        f"valid: {len(emb.vertices)} vertices, {len(emb.edges)} edges, "
        f"{len(emb.crossings)} crossings, {g.nfaces} faces"
    )
    _maybe_dot(args, emb)
    return 0


def cmd_detect(args) -> int:
    emb = _load(args.file)
    if args.check_cert:
        issues = check_certificate(emb, _read(args.check_cert))
        if issues:
            for line in issues:
                print(f"certificate problem: {line}")
            return 1
        print("certificate ok")
        return 0
    rep = scan_configurations(emb)
    for b in rep.b_configs:
        via = f" via x{b.via_crossing}" if b.via_crossing is not None else ""
        print(
            f"B crossing x{b.crossing} anchors v{b.anchors[0]} v{b.anchors[1]} "
            f"cover e{b.cover_edge}{via} tails {' '.join(f'v{t}' for t in b.tails)}"
        )
    for w in rep.w_configs:
        print(
            f"W crossings x{w.crossings[0]} x{w.crossings[1]} "
            f"anchors v{w.anchors[0]} v{w.anchors[1]} "
            f"tails {' '.join(f'v{t}' for t in w.tails)}"
        )
    print(f"{len(rep.b_configs)} B, {len(rep.w_configs)} W")
    return 0


def cmd_reembed(args) -> int:
    emb = _load(args.file)
    if args.keep_augmented:
        emb, _ = circularize(emb)
    out = reembed(emb)
    if out.feasible:
        _write(args.output, serialize_ope(out.embedding))
        _maybe_dot(args, out.embedding)
        return 0
    _write(args.output, format_certificate(out.pair, out.context))
    _maybe_dot(args, out.context)
    return 2


def cmd_oracle(args) -> int:
    emb = _load(args.file)
    if args.configurations:
        rep = scan_configurations(emb)
        for b in rep.b_configs:
            print(f"input B crossing x{b.crossing} anchors v{b.anchors[0]} v{b.anchors[1]}")
        for w in rep.w_configs:
            print(f"input W crossings x{w.crossings[0]} x{w.crossings[1]}")
    budget = EnumerationBudget(max_nodes=args.max_nodes, max_systems=args.max_systems)
    dec = oracle_decision(emb, budget)
    print(f"verdict: {'reembeddable' if dec.feasible else 'not reembeddable'}")
    print(f"explored: {dec.explored}")
    if dec.feasible and args.output:
        _write(args.output, serialize_ope(dec.witness))
    return 0 if dec.feasible else 2


def cmd_gen(args) -> int:
    spec = GeneratorSpec(
        vertices=args.vertices,
        crossings=args.crossings,
        seed=args.seed,
        biconnected=not args.pendants,
        gadgets=args.gadgets,
    )
    emb = gen(spec)
    _write(args.output, serialize_ope(emb))
    _maybe_dot(args, emb)
    return 0


def _parse_sizes(text: str) -> list:
    if ".." in text:
        lo, hi = (int(float(t)) for t in text.split("..", 1))
        out = []
        n = lo
        while n <= hi:
            out.append(n)
            n *= 2
        return out
    return [int(float(t)) for t in text.split(",") if t]


def cmd_bench(args) -> int:
    sizes = _parse_sizes(args.sizes)
    if not sizes:
        raise err("INVALID_INPUT", f"no sizes in {args.sizes!r}")
    rows = []
    for n in sizes:
        spec = GeneratorSpec(vertices=n, crossings=n // args.crossing_ratio, seed=args.seed)
        t0 = time.time()
        emb = gen(spec)
        t1 = time.time()
        metrics.reset()
        with metrics.scope() as sc:
            out = reembed(emb)
        t2 = time.time()
        g = planarize(out.embedding if out.feasible else emb)
        rows.append(
            RunMetrics(
                n=n,
                crossings=len(emb.crossings),
                faces=g.nfaces,
                elapsed_gen=t1 - t0,
                elapsed_reembed=t2 - t1,
                ops=sc.per_module,
            )
        )
        print(
            f"n={n}: ops/n {rows[-1].ops_total / n:.1f}, "
            f"reembed {t2 - t1:.1f}s",
            file=sys.stderr,
        )
    target = open(args.csv, "w", newline="", encoding="utf-8") if args.csv else sys.stdout
    try:
        w = csv.writer(target)
        w.writerow(RunMetrics.header())
        for r in rows:
            w.writerow(r.row())
    finally:
        if target is not sys.stdout:
            target.close()
    for prev, cur in zip(rows, rows[1:]):
        ratio = cur.ops_total / prev.ops_total
        print(f"ops ratio {prev.n} -> {cur.n}: {ratio:.3f}", file=sys.stderr)
    return 0


def main(argv=None) -> int:
    top = argparse.ArgumentParser(prog="oneplane", description=__doc__)
    sub = top.add_subparsers(dest="cmd", required=True)

    io = argparse.ArgumentParser(add_help=False)
    io.add_argument("-o", "--output", default=None, help="output path (default stdout)")
    io.add_argument("--emit-dot", default=None, metavar="PATH",
                    help="also write a DOT view of the planarization")

    p = sub.add_parser("validate", parents=[io], help="parse and validate an instance")
    p.add_argument("file")
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("detect", parents=[io],
                       help="report B/W configurations, or audit a certificate")
    p.add_argument("file")
    p.add_argument("--check-cert", default=None, metavar="CERT",
                   help="verify a certificate emitted by reembed against this instance")
    p.set_defaults(fn=cmd_detect)

    p = sub.add_parser("reembed", parents=[io],
                       help="drawable re-embedding, or certificate with exit 2")
    p.add_argument("file")
    p.add_argument("--keep-augmented", action="store_true",
                   help="keep the crossing rings in the output")
    p.set_defaults(fn=cmd_reembed)

    p = sub.add_parser("oracle", parents=[io], help="exhaustive brute-force decision")
    p.add_argument("file")
    p.add_argument("--max-nodes", type=int, default=14)
    p.add_argument("--max-systems", type=int, default=2_000_000)
    p.add_argument("--configurations", action="store_true",
                   help="also print the input's configurations")
    p.set_defaults(fn=cmd_oracle)

    p = sub.add_parser("gen", parents=[io], help="generate a random valid instance")
    p.add_argument("--vertices", "-n", type=int, required=True)
    p.add_argument("--crossings", "-x", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--pendants", action="store_true",
                   help="attach pendant paths (instance no longer biconnected)")
    p.add_argument("--gadgets", action="store_true",
                   help="glue obstruction blocks at cut vertices")
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("bench", help="instrumented size ladder, CSV per rung")
    p.add_argument("--sizes", default="1e4..3.2e5",
                   help="doubling ladder 'LO..HI' or comma list (default %(default)s)")
    p.add_argument("--crossing-ratio", type=int, default=20,
                   help="crossings = n / ratio (default %(default)s)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv", default=None, metavar="PATH", help="CSV path (default stdout)")
    p.set_defaults(fn=cmd_bench)

    args = top.parse_args(argv)
    try:
        return args.fn(args)
    except OpeError as ex:
        print(f"error[{ex.code}]: {ex}", file=sys.stderr)
        return 3 if ex.code == "BUDGET_EXCEEDED" else 1


if __name__ == "__main__":
    sys.exit(main())
