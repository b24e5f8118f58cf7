"""Compare the properness criteria on random solutions.

For each generated solution, three tests are tabulated by the equation's
multiplicity profile: every canonical coefficient nonzero, the Wronskian of
y, d/dx y, ..., (d/dx)^{n-1} y nonzero, and every block's top coefficient
nonzero.  The first two disagree only when some eigenvalue is repeated.
"""

import argparse
from collections import Counter, defaultdict

from axel.generators import Generator, GeneratorConfig
from axel.lindeq import decompose, proper_criteria, top_coefficients_nonzero


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--count", type=int, default=300)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-order", type=int, default=4)
    args = p.parse_args()

    g = Generator(GeneratorConfig(seed=args.seed))
    table = defaultdict(Counter)
    for _ in range(args.count):
        E = g.equation(max_order=args.max_order)
        FS, coeffs, sol = g.solution(E)
        by_coeffs, by_wronskian = proper_criteria(FS, sol.z[0])
        top = top_coefficients_nonzero(decompose(FS, sol.z[0]))
        profile = "+".join(str(m) for m in sorted(E.mult, reverse=True))
        row = table[profile]
        row["total"] += 1
        row["coeffs"] += by_coeffs
        row["wronskian"] += by_wronskian
        row["top"] += top
        row["coeffs!=wronskian"] += by_coeffs != by_wronskian
        row["top!=wronskian"] += top != by_wronskian

    cols = ["total", "coeffs", "wronskian", "top", "coeffs!=wronskian", "top!=wronskian"]
    print(f"{'profile':<10}" + "".join(f"{c:>19}" for c in cols))
    for profile in sorted(table, key=lambda s: (len(s), s)):
        print(f"{profile:<10}" + "".join(f"{table[profile][c]:>19}" for c in cols))


if __name__ == "__main__":
    main()
