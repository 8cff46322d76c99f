"""Regenerate the frozen golden values from the oracles.

Run from the repository root: ``python3 tests/golden/make_golden.py``.  The
engine is used only to assemble chain matrices; every number written here
comes from the brute-force state sum or from sympy's rank and Smith form.
"""

import json
import os
import sys

HERE = os.path.dirname(os.path.abspath(__file__))
sys.path.insert(0, os.path.dirname(HERE))

from oracles import bigraded_oracle, bracket_oracle  # noqa: E402

from khdot.complex import TheorySpec, build_complex  # noqa: E402
from khdot.corpus import load_corpus  # noqa: E402

HOMOLOGY = [
    ("trefoil-right", ("Q", "Z", "Z2")),
    ("trefoil-left", ("Q", "Z")),
    ("figure-eight", ("Q", "Z")),
    ("hopf", ("Q", "Z")),
]


def main():
    corpus = load_corpus()
    for name, rings in HOMOLOGY:
        for ring in rings:
            c = build_complex(corpus[name], TheorySpec("khovanov", ring))
            groups = bigraded_oracle(c, ring)
            rows = [{"i": i, "j": j, "rank": r, "torsion": list(t)} for (i, j), (r, t) in sorted(groups.items())]
            with open(os.path.join(HERE, f"{name}.{ring}.json"), "w") as fh:
                json.dump({"diagram": name, "ring": ring, "groups": rows}, fh, indent=2, sort_keys=True)
                fh.write("\n")
    brackets = {name: str(bracket_oracle(d)) for name, d in corpus.items()}
    with open(os.path.join(HERE, "brackets.json"), "w") as fh:
        json.dump(brackets, fh, indent=2, sort_keys=True)
        fh.write("\n")


if __name__ == "__main__":
    main()
