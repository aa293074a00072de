"""Write the alpha(p) scans with two sign changes of alpha - 1/2 and list the crossings."""

import argparse
from pathlib import Path

import numpy as np

from feedbackwalk.validation import TWO_CROSSING_CASES, alpha_scan, alpha_scan_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results", help="directory for the CSV files")
    ap.add_argument("--steps", type=int, default=1000)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for q, R, L in TWO_CROSSING_CASES:
        path = out / f"alpha_scan_q{q}_R{R}_L{L}.csv"
        path.write_text(alpha_scan_csv(q, R, L, 0.001, 0.999, args.steps))
        p, a = alpha_scan(q, R, L, 0.001, 0.999, args.steps)
        cross = p[np.flatnonzero(np.diff(np.sign(a - 0.5)))]
        print(f"q={q} R={R} L={L}: crossings near p = {', '.join(f'{c:.4f}' for c in cross)} -> {path}")


if __name__ == "__main__":
    main()
