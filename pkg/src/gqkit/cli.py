"""The ``gq`` command line.

Exit codes: 0 on success or a true verdict, 2 when a verdict is false, 1 on
errors (bad flags, unreadable files, failed computations).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import constructions as C
from .errors import BadFlags, GQError
from .geometry import Geometry, check_axiom3, detect_order, gq_counts_ok, mask_of, to_dot

EXIT_OK, EXIT_ERROR, EXIT_FALSE = 0, 1, 2


@dataclass
class RunConfig:
    command: str
    inputs: list = field(default_factory=list)
    out: str | None = None
    q: int = 2
    budget: float | None = None
    mode: str = "IDEA1"
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        if self.budget is not None and self.budget <= 0:
            raise BadFlags("budgets must be positive")
        if not 2 <= self.q <= 64:
            raise BadFlags(f"q = {self.q} is outside the supported range 2..64")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise BadFlags(message)


def _budget(text):
    if text is None:
        return None
    t = str(text).strip().lower()
    return float(t[:-1]) if t.endswith("s") else float(t)


def _read(path) -> Geometry:
    return Geometry.from_json(Path(path).read_text())


def _read_sub(G: Geometry, path):
    from .substructure import AnchoredSubgeometry
    d = json.loads(Path(path).read_text())
    return AnchoredSubgeometry(G, mask_of(d.get("points", [])), mask_of(d.get("lines", [])), d.get("tag", ""))


def _emit(obj, out=None):
    text = json.dumps(obj, indent=1, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# subcommands

def cmd_build(a, cfg):
    kw = {}
    for k in ("h", "i", "u", "v", "t", "k"):
        if getattr(a, k, None) is not None:
            kw[k] = getattr(a, k)
    if a.oval:
        kw["oval"] = a.oval
    G = C.build(a.name, cfg.q, **kw)
    text = G.to_json() + "\n"
    if cfg.out:
        Path(cfg.out).write_text(text)
        print(f"{G.n_points} points, {G.n_lines} lines -> {cfg.out}")
    else:
        sys.stdout.write(text)
    if a.dot:
        Path(a.dot).write_text(to_dot(G))
    return EXIT_OK


def cmd_check(a, cfg):
    G = _read(a.file)
    cert = check_axiom3(G)
    o = detect_order(G)
    rep = {"points": G.n_points, "lines": G.n_lines, "axiom3": bool(cert),
           "order": list(o) if o else None, "counts_ok": gq_counts_ok(G)}
    if not cert:
        rep["witness"] = str(cert)
    _emit(rep, cfg.out)
    return EXIT_OK if cert and o and rep["counts_ok"] else EXIT_FALSE


def cmd_analyze(a, cfg):
    from .substructure import (decomposition_verdict, full_grids, geometric_hyperplanes, is_axis_of_symmetry,
                               is_regular_line)
    G = _read(a.file)
    o = detect_order(G)
    if o is None:
        raise GQError("analysis needs a geometry with an order")
    rep = {"order": list(o), "regular_lines": [j for j in range(G.n_lines) if is_regular_line(G, j)]}
    if o.s > 1 and o.t > 1:
        rep["axes"] = [j for j in range(G.n_lines) if is_axis_of_symmetry(G, j)]
    rep["full_grids"] = len(full_grids(G))
    kinds = {}
    for _, kind in geometric_hyperplanes(G, budget=cfg.budget):
        kinds[kind] = kinds.get(kind, 0) + 1
    rep["hyperplanes"] = kinds
    if o.s >= 1 and o.t >= 1 and check_axiom3(G):
        rep["decomposition"] = decomposition_verdict(G).to_dict()
    _emit(rep, a.report or cfg.out)
    return EXIT_OK


def cmd_iso(a, cfg):
    from .iso import are_isomorphic, automorphism_group
    G, H = _read(a.first), _read(a.second)
    mode = cfg.mode.upper()
    if mode == "IDEA1":
        m = are_isomorphic(G, H)
        witness = m.to_dict() if m else None
    elif mode == "IDEA2":
        m = are_isomorphic(G, H)
        witness = None
        if m is not None:
            # an isomorphism conjugates the full automorphism groups onto each other
            b = tuple(m.points) + tuple(G.n_points + j for j in m.lines)
            if not automorphism_group(G).conjugate(b).same_as(automorphism_group(H)):
                raise AssertionError("isomorphism does not conjugate the automorphism groups")
            witness = {"bijection": list(b)}
    elif mode == "PTRACE":
        raise GQError("p-trace isomorphism compares trace bases, not whole geometries")
    else:
        raise BadFlags(f"unknown mode {cfg.mode}")
    print(json.dumps({"mode": mode, "isomorphic": witness is not None}))
    if a.witness and witness is not None:
        _emit(witness, a.witness)
    return EXIT_OK if witness is not None else EXIT_FALSE


def cmd_dim(a, cfg):
    from .zariski import krull_dimension
    G = _read(a.file)
    res = krull_dimension(G, budget=cfg.budget, include_22=a.include_22)
    print(res.dimension)
    if cfg.out:
        _emit(res.to_dict(), cfg.out)
    return EXIT_OK if res.exact else EXIT_FALSE


def cmd_spec(a, cfg):
    from .substructure import AnchoredSubgeometry, ideal_perp
    from .zariski import spec_view
    G = _read(a.file)
    kind = a.kind.upper()
    removed = None
    if a.perp is not None:
        removed = ideal_perp(G, a.perp)
    elif a.removed:
        removed = _read_sub(G, a.removed)
    if kind == "AFF" and isinstance(removed, AnchoredSubgeometry):
        removed = removed.points
    V = spec_view(G, kind, removed)
    members = V.members()
    rep = {"kind": kind, "members": len(members), "krull": V.krull().to_dict(),
           "irreducible": V.subspace_irreducible()}
    if a.list == "primes":
        lim = a.limit if a.limit is not None else len(members)
        rep["primes"] = [m.to_dict() for m in members[:lim]]
    _emit(rep, cfg.out)
    return EXIT_OK


def cmd_product(a, cfg):
    from .geometry import collinearity_graph, graph_to_dot
    from .product import cartesian_product
    P = cartesian_product(_read(a.first), _read(a.second))
    text = P.to_json() + "\n"
    if cfg.out:
        Path(cfg.out).write_text(text)
        print(f"{P.n_points} points, {P.n_lines} lines -> {cfg.out}")
    else:
        sys.stdout.write(text)
    if a.dot:
        Path(a.dot).write_text(graph_to_dot(collinearity_graph(P).strip_loops(), "product"))
    return EXIT_OK


def _form(name: str, q: int):
    if name in ("q3", "q4", "q5"):
        return C.standard_form(int(name[1]), q)
    raise BadFlags(f"unknown form {name}; use q3, q4 or q5")


def cmd_class(a, cfg):
    from .ring import evaluate_count, quadric_class
    F = _form(a.form, cfg.q)
    M = quadric_class(F)
    rep = {"form": F.name, "class": M.to_dict(), "text": str(M)}
    if a.eval:
        ms = [int(x) for x in a.eval.split("=", 1)[-1].split(",")]
        rep["counts"] = {str(m): evaluate_count(M, cfg.q, m) for m in ms}
        if a.verify:
            rep["brute_force"] = {str(m): C.count_form_zeros(F, cfg.q, m) for m in ms}
    _emit(rep, cfg.out)
    if a.verify and a.eval and rep["counts"] != rep["brute_force"]:
        return EXIT_FALSE
    return EXIT_OK


def cmd_ring(a, cfg):
    from .ring import Ring
    if a.action != "cut":
        raise BadFlags(f"unknown ring action {a.action}")
    G = _read(a.file)
    Csub = _read_sub(G, a.closed)
    R = Ring(cfg.mode)
    e = R.cut(G, Csub)
    _emit({"mode": R.mode, "terms": e.to_dict(), "text": repr(e)}, cfg.out)
    return EXIT_OK


def cmd_tower(a, cfg):
    from .galois import build_tower, frobenius_orbits, rational_isomorphism
    levels = [int(x) for x in a.levels.split(",")]
    T = build_tower(a.i, levels, a.oval)
    h, H = levels[0], levels[-1]
    rep = {"i": a.i, "levels": levels, "points": {str(k): T.level(k).geometry.n_points for k in levels},
           "orbits": {}}
    for kind in a.orbits.split(","):
        rep["orbits"][kind] = frobenius_orbits(T, h, H, kind).to_dict()
    rep["rational_isomorphic"] = rational_isomorphism(T, h, H) is not None
    _emit(rep, cfg.out)
    return EXIT_OK


def cmd_corpus(a, cfg):
    from .corpus import corpus_generate
    m = corpus_generate(a.dir, a.q_max, cfg.threads)
    print(f"{m['count']} geometries -> {a.dir}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--q", type=int, default=2)
    common.add_argument("--budget", default=None)
    common.add_argument("--mode", default="idea1")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("-o", "--out", default=None)

    p = _Parser(prog="gq", description="finite generalized quadrangles")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    b = sub.add_parser("build", parents=[common], help="construct a named geometry")
    b.add_argument("name")
    for k in ("h", "i", "u", "v", "t", "k"):
        b.add_argument(f"--{k}", type=int)
    b.add_argument("--oval", choices=["brown", "segre"])
    b.add_argument("--dot")
    b.set_defaults(func=cmd_build)

    c = sub.add_parser("check", parents=[common], help="axioms, order and counts")
    c.add_argument("file")
    c.set_defaults(func=cmd_check)

    an = sub.add_parser("analyze", parents=[common], help="substructure report")
    an.add_argument("file", nargs="?")
    an.add_argument("--in", dest="infile")
    an.add_argument("--report")
    an.set_defaults(func=cmd_analyze)

    i = sub.add_parser("iso", parents=[common], help="isomorphism test")
    i.add_argument("first")
    i.add_argument("second")
    i.add_argument("--witness")
    i.set_defaults(func=cmd_iso)

    d = sub.add_parser("dim", parents=[common], help="Krull dimension")
    d.add_argument("file")
    d.add_argument("--include-22", action="store_true")
    d.set_defaults(func=cmd_dim)

    s = sub.add_parser("spec", parents=[common], help="spectrum view")
    s.add_argument("file")
    s.add_argument("--kind", default="proj", choices=["proj", "aff", "quas"])
    s.add_argument("--perp", type=int)
    s.add_argument("--removed")
    s.add_argument("--list", choices=["primes"])
    s.add_argument("--limit", type=int)
    s.set_defaults(func=cmd_spec)

    pr = sub.add_parser("product", parents=[common], help="cartesian product")
    pr.add_argument("first")
    pr.add_argument("second")
    pr.add_argument("--dot")
    pr.set_defaults(func=cmd_product)

    cl = sub.add_parser("class", parents=[common], help="class of a quadric")
    cl.add_argument("--form", required=True)
    cl.add_argument("--eval")
    cl.add_argument("--verify", action="store_true")
    cl.set_defaults(func=cmd_class)

    r = sub.add_parser("ring", parents=[common], help="ring operations")
    r.add_argument("action")
    r.add_argument("file")
    r.add_argument("closed")
    r.set_defaults(func=cmd_ring)

    t = sub.add_parser("tower", parents=[common], help="Frobenius orbits on an oval tower")
    t.add_argument("--i", type=int, default=2)
    t.add_argument("--levels", default="1,3")
    t.add_argument("--orbits", default="points,lines")
    t.add_argument("--oval", default="segre", choices=["segre", "brown"])
    t.set_defaults(func=cmd_tower)

    co = sub.add_parser("corpus", parents=[common], help="write the test corpus")
    co.add_argument("dir")
    co.add_argument("--q-max", type=int, default=4)
    co.set_defaults(func=cmd_corpus)
    return p


def main(argv=None) -> int:
    try:
        a = build_parser().parse_args(argv)
        if not getattr(a, "command", None):
            raise BadFlags("no subcommand given")
        if a.command == "analyze":
            a.file = a.file or a.infile
            if not a.file:
                raise BadFlags("analyze needs an input file")
        cfg = RunConfig(a.command, out=a.out, q=a.q, budget=_budget(a.budget), mode=a.mode.upper(),
                        seed=a.seed, threads=int(os.environ.get("GQKIT_THREADS", "1")))
        return a.func(a, cfg)
    except BadFlags as e:
        print(f"gq: bad flags: {e}", file=sys.stderr)
        return EXIT_ERROR
    except (GQError, OSError, ValueError, KeyError) as e:
        print(f"gq: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
