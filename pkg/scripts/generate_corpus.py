"""Write the geometry corpus (JSON per geometry plus manifest.json)."""
import argparse
import json

from gqkit.corpus import corpus_generate


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("out_dir")
    ap.add_argument("--q-max", type=int, default=4)
    ap.add_argument("--threads", type=int, default=None)
    a = ap.parse_args()
    m = corpus_generate(a.out_dir, a.q_max, a.threads)
    print(json.dumps({g["name"]: [g["points"], g["lines"]] for g in m["geometries"]}, indent=1))


if __name__ == "__main__":
    main()
