"""Krull dimensions of the thick corpus quadrangles, with chain shapes and exactness."""
import argparse
import json
import time

from gqkit.corpus import entries
from gqkit.geometry import detect_order
from gqkit.substructure import geometric_hyperplanes
from gqkit.zariski import krull_dimension, spec_view


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--q-max", type=int, default=4)
    ap.add_argument("--budget", type=float, default=60.0, help="seconds per geometry")
    ap.add_argument("--include-22", action="store_true")
    a = ap.parse_args()
    rows = []
    for e in entries(a.q_max):
        G = e.build()
        o = detect_order(G)
        if not e.gq or o is None or o.s < 2 or o.t < 2:
            continue
        t = time.perf_counter()
        r = krull_dimension(G, budget=a.budget, include_22=a.include_22)
        rows.append({"name": e.name, "order": list(o), "dimension": r.dimension, "exact": r.exact,
                     "nodes": r.nodes, "chain": [c.tag for c in r.chain],
                     "seconds": round(time.perf_counter() - t, 2)})
        print(json.dumps(rows[-1]), flush=True)
    X = next(e for e in entries(2) if e.name == "q5_2").build()
    H = next(h for h, kind in geometric_hyperplanes(X) if kind == "SubGQ")
    r = spec_view(X, "AFF", H).krull()
    print(json.dumps({"name": "q5_2 minus a (2,2) hyperplane", "dimension": r.dimension, "exact": r.exact}))


if __name__ == "__main__":
    main()
