"""Frobenius orbits, rational part, grid extensions and descent on an oval tower."""
import argparse
import json

from gqkit.galois import (KINDS, build_tower, descent_closed_set, frobenius_orbits, grid_extension_report,
                          rational_isomorphism, scheme_point_count, transitivity_check, union_check)
from gqkit.substructure import anchored, ideal_perp


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--i", type=int, default=2)
    ap.add_argument("--levels", default="1,3")
    ap.add_argument("--oval", default="segre", choices=["segre", "brown"])
    a = ap.parse_args()
    levels = [int(x) for x in a.levels.split(",")]
    T = build_tower(a.i, levels, a.oval)
    h, H = levels[0], levels[-1]
    G = T.level(h).geometry
    rep = {
        "points": {str(k): T.level(k).geometry.n_points for k in levels},
        "orbit_sizes": {k: frobenius_orbits(T, h, H, k).sizes() for k in KINDS},
        "rational_isomorphic": rational_isomorphism(T, h, H) is not None,
        "transitive": transitivity_check(T, h, H),
        "union": union_check(T),
        "grid_extension": grid_extension_report(T, h, H),
        "descent_line": descent_closed_set(anchored(G, G.lines[0], [0]), T, h, H).to_dict(),
        "descent_perp": descent_closed_set(ideal_perp(G, 0), T, h, H).to_dict(),
    }
    if a.oval == "segre":
        rep["curve"] = scheme_point_count(a.i, H)
    print(json.dumps(rep, indent=1, default=str))


if __name__ == "__main__":
    main()
