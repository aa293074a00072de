"""Monte Carlo speed and visit counts against the closed forms on the curated points."""

import argparse
import sys

from feedbackwalk import montecarlo as mc
from feedbackwalk.validation import speed_points


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-steps", type=int, default=10**6)
    ap.add_argument("--reps", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()
    w = sys.stdout
    w.write("point,closed_form,mc_mean,mc_stderr,z\n")
    for k, (label, spec, pr, s, gamma) in enumerate(speed_points()):
        est = mc.estimate_speed(spec, pr, args.n_steps, args.reps, args.seed + k, args.threads)
        z = (est.mean - s) / est.stderr
        w.write(f"{label},{s!r},{est.mean!r},{est.stderr!r},{z:.2f}\n")
        if gamma is not None:
            g = mc.estimate_E_Nx(spec, pr, 5, 2000, 10**7, args.seed + 100 + k, threads=args.threads)
            w.write(f"{label} gamma,{gamma!r},{g.mean!r},{g.stderr!r},{(g.mean - gamma) / g.stderr:.2f}\n")


if __name__ == "__main__":
    main()
