"""Write a seeded synthetic corpus and a matching word-frequency table.

    python scripts/make_synthetic_corpus.py --out data/synthetic --n 4520 --seed 0
"""

import argparse
from pathlib import Path

from medread.corpus import atomic_write_text, save_corpus
from medread.synthetic import frequency_table, make_corpus


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out", type=Path, default=Path("data/synthetic"))
    ap.add_argument("--n", type=int, default=4520)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    save_corpus(make_corpus(args.n, args.seed), args.out / "corpus.jsonl")
    freq = "".join(f"{w}\t{c}\n" for w, c in sorted(frequency_table().items()))
    atomic_write_text(args.out / "frequency.tsv", freq)
    print(f"wrote {args.n} sentences to {args.out / 'corpus.jsonl'}")


if __name__ == "__main__":
    main()
