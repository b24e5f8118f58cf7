"""Rewrite the golden reports of the embedded corpus.

Run after an intentional change to a report payload, then review the diff
of src/axel/corpus/golden before keeping it.
"""

import argparse
from pathlib import Path

from axel.cli import corpus_dir, regenerate_golden


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--root", type=Path, default=None, help="corpus directory (default: the installed one)")
    args = p.parse_args()
    names = regenerate_golden(args.root or corpus_dir())
    print(f"wrote {len(names)} golden reports")


if __name__ == "__main__":
    main()
