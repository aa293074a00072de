"""Estimate the split between the two escape directions where both have positive probability.

No closed form for the split is known, so this only measures it.
"""

import argparse

from feedbackwalk import montecarlo as mc
from feedbackwalk.analytic import classify
from feedbackwalk.environment import Constant, EnvironmentSpec, P, Params, Q


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--q", type=float, default=0.25)
    ap.add_argument("--barrier", type=int, default=200)
    ap.add_argument("--reps", type=int, default=1000)
    ap.add_argument("--seeds", type=int, nargs="+", default=[10, 4010])
    ap.add_argument("--engine", choices=("direct", "coupled"), default="direct")
    args = ap.parse_args()
    pr = Params(1 - args.q, args.q, 2, 2)
    spec = EnvironmentSpec(Constant(Q(0)), Constant(P(0)))
    c = classify(spec, pr)
    print(f"verdict {c.verdict.value} ({c.rule})")
    print("seed,f_right,f_left,f_timeout,stderr_right")
    for s in args.seeds:
        d = mc.estimate_direction(spec, pr, args.barrier, 10**7, args.reps, s, engine=args.engine)
        print(f"{s},{d.f_right},{d.f_left},{d.f_timeout},{d.stderr_right:.4f}")


if __name__ == "__main__":
    main()
