#!/usr/bin/env python3
"""Write all four frozen figure datasets as CSV files.

Usage:
    python3 scripts/reproduce_figures.py [--out-dir DIR]

Equivalent to running ``relay-aloha reproduce figN --out ...`` once per
figure; kept as a script so the full set regenerates with one command.
"""

import argparse
import pathlib

from relay_aloha import FIGURE_IDS, reproduce_figure


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="figures_data")
    args = ap.parse_args()
    out_dir = pathlib.Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for fig_id in FIGURE_IDS:
        path = out_dir / f"{fig_id}.csv"
        reproduce_figure(fig_id, str(path))
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
