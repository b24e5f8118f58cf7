"""Bounded rotundity checks on sample varieties, over a range of bounds.

Prints, per variety and bound, the number of canonical matrices checked,
the plain and strong verdicts, the first violating matrix and the time.
"""

import argparse
import time

from axel.algebra import rational_field
from axel.generators import Generator, GeneratorConfig
from axel.rotundity import LinearBinomialVariety, ParamVariety, check_exp_free, check_exp_rotund


def samples(seed: int):
    K = rational_field(("w1", "w2"))
    w1, w2 = K.gens
    yield "y = x surface", ParamVariety(K, ("w1", "w2"), (w1, w2, w1, w2), ("G", 2))
    yield "x1 + x2 = 1", ParamVariety(K, ("w1", "w2"), (w1, 1 - w1, w2, w1 * w2), ("G", 2))
    yield "constant point", ParamVariety(K, ("w1", "w2"), (K(1), K(2), K(3), K(5)), ("G", 2))
    yield "coset x1 = x2, y1 y2 = 1", LinearBinomialVariety(2, ((1, -1),), (0,), ((1, 1),), (1,))
    g = Generator(GeneratorConfig(seed=seed))
    for n in (2, 3):
        V, pairs = g.exp_free_variety(n)
        yield f"locus of {n} exp pairs", V


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--max-bound", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()

    for name, V in samples(args.seed):
        print(f"{name}  (dim {V.dimension()}, free {check_exp_free(V).free})")
        for N in range(1, args.max_bound + 1):
            start = time.perf_counter()
            plain = check_exp_rotund(V, N)
            strong = check_exp_rotund(V, N, strong=True)
            secs = time.perf_counter() - start
            witness = strong.violating or plain.violating
            print(
                f"  N={N}  checked {plain.checked:>4}  rotund {plain.holds!s:<5}  strong {strong.holds!s:<5}"
                f"  witness {list(map(list, witness)) if witness else '-'}  {secs:.2f}s"
            )


if __name__ == "__main__":
    main()
