"""Trimmed-grid searches and arcs from complete dual grids on Q(4,q)."""
import argparse
import json
import time

from gqkit.constructions import quadric_gq
from gqkit.substructure import arc_report, dual_grid_classes, fullgr_report, subgr_report


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--q", type=int, nargs="+", default=[2, 3])
    a = ap.parse_args()
    for q in a.q:
        G = quadric_gq(4, q)
        t = time.perf_counter()
        full = fullgr_report(G)
        sub = subgr_report(G)
        arcs = arc_report(G)
        out = {"q": q,
               "fullgr": {k: v for k, v in full.items() if k != "examples"},
               "subgr": {k: v for k, v in sub.items() if k != "examples"},
               "arcs": arcs,
               "dual_grid_classes": dual_grid_classes(G),
               "seconds": round(time.perf_counter() - t, 2)}
        print(json.dumps(out, default=str), flush=True)


if __name__ == "__main__":
    main()
