"""Empirical X_n / n at increasing n for critical parameters.

The numbers are exploratory: whether the critical walk has zero speed is
not settled by any result implemented here.
"""

import argparse

from feedbackwalk import montecarlo as mc
from feedbackwalk.analytic import critical_p0
from feedbackwalk.environment import EnvironmentSpec, Params, Q


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--q", type=float, default=0.3)
    ap.add_argument("--R", type=int, default=2)
    ap.add_argument("--L", type=int, default=1)
    ap.add_argument("--reps", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--n", type=int, nargs="+", default=[10**3, 10**4, 10**5, 10**6])
    args = ap.parse_args()
    pr = Params(critical_p0(args.q, args.R, args.L), args.q, args.R, args.L)
    spec = EnvironmentSpec.constant(Q(0))
    print(f"# p0={pr.p!r} q={pr.q} R={pr.R} L={pr.L}")
    print("n,mean_abs_speed,stderr_abs,mean_speed,stderr")
    for r in mc.critical_speed_probe(spec, pr, args.n, args.reps, args.seed, args.threads):
        print(f"{r.n},{r.mean_abs_speed:.6f},{r.stderr_abs:.6f},{r.mean_speed:.6f},{r.stderr:.6f}")


if __name__ == "__main__":
    main()
