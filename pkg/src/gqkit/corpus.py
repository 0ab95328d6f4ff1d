"""The deterministic geometry corpus used by the tests and the CLI."""
from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass
from pathlib import Path

from .constructions import (brown_oval, dual_grid, fano_plane, grid, h3, line_geometry, perp_geometry,
                            quadric_gq, segre_oval, standard_form, t2_of_oval, wq)
from .geometry import Geometry


@dataclass(frozen=True)
class Entry:
    name: str
    q: int
    build: object
    gq: bool = True


def entries(q_max: int = 4) -> list:
    out = []
    for q in (2, 3, 4):
        if q > q_max:
            continue
        out.append(Entry(f"q3_{q}", q, lambda q=q: quadric_gq(3, q)))
        out.append(Entry(f"q4_{q}", q, lambda q=q: quadric_gq(4, q)))
        if q <= 3:
            out.append(Entry(f"q5_{q}", q, lambda q=q: quadric_gq(5, q)))
            out.append(Entry(f"w_{q}", q, lambda q=q: wq(q)))
    if q_max >= 2:
        out.append(Entry("h3_4", 2, lambda: h3(2)))
        out.append(Entry("t2_brown1", 2, lambda: t2_of_oval(brown_oval(1))))
        out.append(Entry("grid_3x4", 2, lambda: grid(3, 4), gq=False))
        out.append(Entry("dual_grid_3x3", 2, lambda: dual_grid(3, 3)))
        out.append(Entry("line_3", 2, lambda: line_geometry(3), gq=False))
        out.append(Entry("perp_2_3", 2, lambda: perp_geometry(2, 3), gq=False))
        out.append(Entry("fano", 2, fano_plane, gq=False))
    if q_max >= 8:
        out.append(Entry("t2_segre_2_3", 8, lambda: t2_of_oval(segre_oval(2, 3))))
    return out


def quadric_forms(q_max: int = 4) -> list:
    """(name, form) for every quadric of the corpus."""
    return [(f"q{m}_{q}", standard_form(m, q)) for m in (3, 4, 5) for q in (2, 3, 4) if q <= q_max]


def load(name: str, q_max: int = 8) -> Geometry:
    for e in entries(q_max):
        if e.name == name:
            return e.build().with_meta(corpus=name)
    raise KeyError(name)


def geometries(q_max: int = 3, gq_only: bool = False) -> list:
    return [(e.name, e.build()) for e in entries(q_max) if e.gq or not gq_only]


def sha256(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def corpus_generate(out_dir, q_max: int = 4, threads: int | None = None) -> dict:
    """Write every corpus geometry as JSON plus manifest.json; byte-stable across runs."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    items = entries(q_max)
    workers = threads or int(os.environ.get("GQKIT_THREADS", "1"))

    def one(e):
        G = e.build().with_meta(corpus=e.name)
        text = G.to_json() + "\n"
        (out / f"{e.name}.json").write_text(text)
        return {"name": e.name, "file": f"{e.name}.json", "points": G.n_points,
                "lines": G.n_lines, "gq": e.gq, "sha256": sha256(text)}

    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(workers) as ex:
            rows = list(ex.map(one, items))
    else:
        rows = [one(e) for e in items]
    manifest = {"q_max": q_max, "count": len(rows), "geometries": rows}
    (out / "manifest.json").write_text(json.dumps(manifest, indent=1, sort_keys=True) + "\n")
    return manifest
