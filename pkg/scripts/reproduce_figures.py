"""Write the CSV series of every figure into one directory."""

import argparse
import time
from pathlib import Path

from muxdesigner.figures import FIGURES, figure_tables


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="figure_data", type=Path)
    parser.add_argument("--only", nargs="*", choices=list(FIGURES), help="subset of figures")
    args = parser.parse_args()
    for name in args.only or FIGURES:
        start = time.perf_counter()
        tables = figure_tables(name)
        for table in tables:
            table.write(args.out)
        print(f"{name}: {len(tables)} curves, {sum(len(t.rows) for t in tables)} rows, "
              f"{time.perf_counter() - start:.2f} s")


if __name__ == "__main__":
    main()
