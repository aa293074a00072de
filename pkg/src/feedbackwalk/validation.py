"""Acceptance checks shared by ``feedbackwalk validate`` and the test suite.

Each ``criterion_*`` function returns a list of :class:`CheckResult`; a
criterion passes when all of its checks pass.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable, Optional

import numpy as np

from . import analytic as an
from . import chains as ch
from . import montecarlo as mc
from .environment import (
    Constant,
    EnvironmentSpec,
    P,
    Params,
    Periodic,
    Q,
    config_compare,
    densities,
)
from .roots import sign_changes
from .walk import OutcomeKind


@dataclass(frozen=True)
class CheckResult:
    check_name: str
    status: str
    expected: object
    actual: object
    tolerance: object

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_dict(self) -> dict:
        return asdict(self)


def _check(name: str, ok: bool, expected, actual, tolerance) -> CheckResult:
    def clean(v):
        if isinstance(v, (np.floating, np.integer)):
            return v.item()
        if isinstance(v, tuple):
            return [clean(x) for x in v]
        return v

    return CheckResult(name, "pass" if ok else "fail", clean(expected), clean(actual), clean(tolerance))


def _max_dev(name: str, devs, tol: float, expected=0.0) -> CheckResult:
    worst = float(max(devs))
    return _check(name, worst <= tol, expected, worst, tol)


# ---------------------------------------------------------------------------
# analytic criteria


def critical_sample(rng: np.random.Generator) -> Params:
    """A critical parameter point drawn from q in [0.2, 0.45], R, L in 1..6."""
    q = float(rng.uniform(0.2, 0.45))
    R, L = (int(v) for v in rng.integers(1, 7, 2))
    return Params(an.critical_p0(q, R, L), q, R, L)


def criterion_1(seed: int = 0) -> list[CheckResult]:
    rng = np.random.default_rng([seed, 1])
    draws = []
    for _ in range(1000):
        p, q = rng.uniform(1e-3, 1 - 1e-3, 2)
        R, L = rng.integers(1, 21, 2)
        draws.append(Params(float(p), float(q), int(R), int(L)))
    sym = [abs(an.alpha(pr) + an.alpha(pr.mirrored()) - 1.0) for pr in draws]
    stat, ident = [], []
    for pr in draws[:100]:
        pr = Params(pr.p, pr.q, min(pr.R, 12), min(pr.L, 12))
        pi = ch.stationary_pi(pr)
        oracle = ch.power_iteration(ch.single_site_matrix(pr).entries)
        stat.append(np.abs(pi.pi - oracle).max())
        ident.append(abs(pr.p * pi.pi_p + pr.q * pi.pi_q - an.alpha(pr)))
    psiE = []
    for _ in range(100):
        pr = critical_sample(rng)
        S = ch.session_matrix(pr)
        psiE.append(abs(S.psi @ ch.session_E_vector(pr) - 1.0))
    return [
        _max_dev("C1.alpha_symmetry", sym, 1e-14),
        _max_dev("C1.pi_stationarity", stat, 1e-12),
        _max_dev("C1.right_jump_fraction_identity", ident, 1e-14),
        _max_dev("C1.psi_E_unit_at_criticality", psiE, 1e-12),
    ]


def criterion_2() -> list[CheckResult]:
    out = [
        _check("C2.q_star_2", abs(an.q_star(2) - 1 / 3) <= 1e-12, 1 / 3, an.q_star(2), 1e-12),
        _check("C2.q_star_3", abs(an.q_star(3) - 1 / math.sqrt(5)) <= 1e-12, 1 / math.sqrt(5), an.q_star(3), 1e-12),
    ]
    q1 = an.q1_star()
    out.append(_check("C2.q1_star_root", abs(1 - 3 * q1 - q1 * q1) <= 1e-12, 0.0, 1 - 3 * q1 - q1 * q1, 1e-12))
    q2 = an.q2_star()
    out.append(_check("C2.q2_star_root", abs(q2**3 + q2 - 1) <= 1e-12, 0.0, q2**3 + q2 - 1, 1e-12))
    out.append(_check("C2.q2_star_value", abs(q2 - 0.682) <= 1e-3, 0.682, q2, 1e-3))
    win = an.negativity_window(5, 4, 0.0, 1.0)
    a, b = win[0] if len(win) == 1 else (float("nan"), float("nan"))
    out.append(
        _check(
            "C2.P54_window",
            len(win) == 1 and abs(a - 0.410) <= 1e-3 and abs(b - 0.473) <= 1e-3,
            (0.410, 0.473),
            (a, b),
            1e-3,
        )
    )
    grid = np.linspace(0.01, 0.99, 99)
    devs = [abs(an.poly_P_RR(q, R) - an.poly_P_RR_factored(q, R)) for R in range(2, 9) for q in grid]
    out.append(_max_dev("C2.P_RR_factorization", devs, 1e-12))
    return out


def _random_supercritical_RL1(rng: np.random.Generator) -> tuple[float, float]:
    while True:
        p, q = (float(v) for v in rng.uniform(0.01, 0.99, 2))
        if p + q > 1.02:
            return p, q


def criterion_3(seed: int = 0) -> list[CheckResult]:
    rng = np.random.default_rng([seed, 3])
    devs = []
    for _ in range(50):
        p, q = _random_supercritical_RL1(rng)
        devs.append(abs(an.speed_L1(Params(p, q, 1, 1)).speed - an.speed_RL1_closed(p, q, 0.0)))
    res = []
    inv = []
    for _ in range(50):
        L = int(rng.integers(1, 7))
        while True:
            p, q = (float(v) for v in rng.uniform(0.05, 0.95, 2))
            pr = Params(p, q, 1, L)
            if an.alpha(pr) > 0.51:
                break
        res.append(ch_residual(pr))
        p, q = _random_supercritical_RL1(rng)
        d = float(rng.uniform(0, 1))
        s1 = an.speed_R1(Params(p, q, 1, 1), [d, 1 - d]).speed
        s2 = an.speed_R1(Params(q, p, 1, 1), [1 - d, d]).speed
        inv.append(abs(s1 - s2))
    return [
        _max_dev("C3.speed_L1_vs_RL1_closed", devs, 1e-12),
        _max_dev("C3.speed_R1_linear_residual", res, 1e-10),
        _max_dev("C3.speed_R1_pq_swap_invariance", inv, 1e-12),
    ]


def ch_residual(pr: Params) -> float:
    return an.speed_R1_residual(pr, an.speed_R1_coefficients(pr))


def _avoid_root(f: Callable[[float], float], q: float) -> bool:
    return abs(f(q)) > 1e-9


def criterion_6() -> list[CheckResult]:
    mismatches = 0
    checked = 0
    for R in range(2, 7):
        for q in np.round(np.arange(0.02, 0.99, 0.01), 2):
            q = float(q)
            try:
                p0 = an.critical_p0(q, R, 1)
            except an.NoCriticalPoint:
                continue
            if not 0.0 < p0 < 1.0:
                continue
            pr = Params(p0, q, R, 1)
            if not an.is_critical(pr):
                continue
            for i in range(1, R + 1):
                if not _avoid_root(lambda x: an.poly_P_Ri(x, R, i), q):
                    continue
                tail = Constant(Q(i)) if i < R else Constant(P(0))
                c = an.classify_critical_L1(pr, tail, Constant(Q(0)))
                right = c.verdict is an.Verdict.TRANSIENT_RIGHT
                if right != (an.theta_L1(q, R, i) > 1.0):
                    mismatches += 1
                checked += 1
    out = [_check("C6.L1_verdict_vs_theta", mismatches == 0 and checked > 0, 0, mismatches, 0)]
    q1, q2 = an.q1_star(), an.q2_star()
    th1 = an.theta_RL2(q1)[0]
    th2 = an.theta_RL2(q2)[2]
    out.append(_check("C6.theta_p0_at_q1_star", abs(th1 - 1) <= 1e-10, 1.0, th1, 1e-10))
    out.append(_check("C6.theta_q0_at_q2_star", abs(th2 - 1) <= 1e-10, 1.0, th2, 1e-10))
    bad = 0
    for q in np.linspace(0.005, 0.995, 199):
        q = float(q)
        if abs(q - q1) < 1e-9 or abs(q - q2) < 1e-9:
            continue
        th = an.theta_RL2(q)
        if q < q1:
            v = an.classify_RL2(q, "IsP0", "NeverQ0").verdict
            bad += (v is an.Verdict.TRANSIENT_RIGHT) != (th[0] > 1)
            v = an.classify_RL2(q, "IsP0", "IsQ0").verdict
            bad += v is not an.Verdict.MIXED_TRANSIENT
        elif q > q2:
            v = an.classify_RL2(q, "IsQ0", "NeverP0").verdict
            bad += (v is an.Verdict.TRANSIENT_RIGHT) != (th[2] > 1)
        else:
            v = an.classify_RL2(q, "IsP0", "IsQ0").verdict
            bad += v is not an.Verdict.RECURRENT
            bad += th[0] > 1 or th[2] > 1
    out.append(_check("C6.RL2_table_vs_theta", bad == 0, 0, bad, 0))
    return out


TWO_CROSSING_CASES = ((0.75, 10, 10), (0.75, 10, 20))


def alpha_scan(q: float, R: int, L: int, p_min: float = 0.001, p_max: float = 0.999, steps: int = 1000):
    ps = np.linspace(p_min, p_max, steps)
    return ps, np.array([an.alpha(Params(float(p), q, R, L)) for p in ps])


def alpha_scan_csv(q: float, R: int, L: int, p_min: float = 0.001, p_max: float = 0.999, steps: int = 1000) -> str:
    ps, al = alpha_scan(q, R, L, p_min, p_max, steps)
    return "p,alpha\n" + "".join(f"{p!r},{a!r}\n" for p, a in zip(ps.tolist(), al.tolist()))


def criterion_7() -> list[CheckResult]:
    out = []
    for q, R, L in TWO_CROSSING_CASES:
        _, al = alpha_scan(q, R, L)
        n = sign_changes(al - 0.5)
        out.append(_check(f"C7.alpha_scan_sign_changes_q{q}_R{R}_L{L}", n == 2, 2, n, 0))
    return out


def criterion_9(seed: int = 0, n_seeds: int = 1000, n_steps: int = 10_000) -> list[CheckResult]:
    cases = [Params(0.7, 0.2, 2, 3), Params(0.6, 0.4, 3, 2), Params(0.9, 0.1, 1, 4)]
    violations = 0
    for k, pr in enumerate(cases):
        cfgs = pr.configs()
        pairs = [(a, b) for a in cfgs for b in cfgs if config_compare(a, b) <= 0]
        for s in range(n_seeds):
            a, b = pairs[s % len(pairs)]
            u = np.random.default_rng([seed, 9, k, s]).random(n_steps)
            ja, jb = ch.coupled_site_jumps(a, b, pr, u)
            violations += int((ja > jb).sum())
    return [_check("C9.monotone_coupling", violations == 0, 0, violations, 0)]


# ---------------------------------------------------------------------------
# Monte Carlo criteria


def speed_points() -> list[tuple[str, EnvironmentSpec, Params, float, Optional[float]]]:
    """(label, environment, params, closed-form speed, gamma or None)."""
    q0 = EnvironmentSpec.constant(Q(0))
    pts = []
    for pr in (Params(0.9, 0.6, 1, 1), Params(0.92, 0.3, 2, 1), Params(0.8, 0.5, 3, 1)):
        r = an.speed_L1(pr)
        pts.append((f"L1 p={pr.p} q={pr.q} R={pr.R}", q0, pr, r.speed, r.gamma))
    per = EnvironmentSpec(Constant(Q(0)), Periodic((P(0), P(1), Q(0))))
    pr = Params(0.8, 0.4, 1, 2)
    pts.append(("R1 p=0.8 q=0.4 L=2 periodic", per, pr, an.speed_R1(pr, densities(per, pr)).speed, None))
    pr = Params(0.75, 0.45, 1, 3)
    pts.append(("R1 p=0.75 q=0.45 L=3", q0, pr, an.speed_R1(pr, densities(q0, pr)).speed, None))
    half = EnvironmentSpec(Constant(Q(0)), Periodic((P(0), Q(0))))
    pts.append(("RL1 p=0.7 q=0.5 d=1/2", half, Params(0.7, 0.5, 1, 1), an.speed_RL1_closed(0.7, 0.5, 0.5), None))
    return pts


def criterion_4(seed: int = 0, n_steps: int = 10**6, n_reps: int = 100, threads: int = 1) -> list[CheckResult]:
    out = []
    for k, (label, spec, pr, s, gamma) in enumerate(speed_points()):
        est = mc.estimate_speed(spec, pr, n_steps, n_reps, seed * 1000 + k, threads)
        ok = est.within(s) and est.stderr <= 0.005
        out.append(_check(f"C4.speed[{label}]", ok, s, (est.mean, est.stderr), "3*stderr, stderr<=0.005"))
        if gamma is not None:
            g = mc.estimate_E_Nx(spec, pr, 5, 2000, 10**7, seed * 1000 + 100 + k, threads=threads)
            out.append(_check(f"C4.E_Nx[{label}]", g.within(gamma), gamma, (g.mean, g.stderr), "3*stderr"))
    return out


TRANSIENCE_POINTS = (
    Params(0.9, 0.6, 1, 1),
    Params(0.8, 0.45, 2, 2),
    Params(0.85, 0.5, 3, 1),
    Params(0.95, 0.3, 2, 3),
    Params(0.65, 0.55, 4, 4),
)


def criterion_5(seed: int = 0, n_reps: int = 1000, threads: int = 1) -> list[CheckResult]:
    out = []
    spec = EnvironmentSpec.constant(Q(0))
    for k, pr in enumerate(TRANSIENCE_POINTS):
        a = an.alpha(pr)
        d = mc.estimate_direction(spec, pr, 1000, 10**8, n_reps, seed * 1000 + k, threads=threads)
        out.append(_check(f"C5.right[p={pr.p},q={pr.q},R={pr.R},L={pr.L},alpha={a:.4f}]",
                          a > 0.55 and d.f_right >= 0.99, ">=0.99", d.f_right, 0.0))
        m = pr.mirrored()
        am = an.alpha(m)
        d = mc.estimate_direction(spec.mirrored(), m, 1000, 10**8, n_reps, seed * 1000 + 50 + k, threads=threads)
        out.append(_check(f"C5.left[p={m.p:.2f},q={m.q:.2f},R={m.R},L={m.L},alpha={am:.4f}]",
                          am < 0.45 and d.f_left >= 0.99, ">=0.99", d.f_left, 0.0))
    return out


def criterion_8(seed: int = 0, n_reps: int = 10_000, n_z_runs: int = 1000, threads: int = 1) -> list[CheckResult]:
    pr = Params(0.6, 0.3, 2, 2)
    spec = EnvironmentSpec.constant(Q(0))
    direct = mc.estimate_direction(spec, pr, 50, 10**7, n_reps, seed * 1000 + 1, threads=threads)
    coupled = mc.estimate_direction(spec, pr, 50, 10**7, n_reps, seed * 1000 + 2, engine="coupled", threads=threads)
    tv = 0.5 * (
        abs(direct.f_right - coupled.f_right)
        + abs(direct.f_left - coupled.f_left)
        + abs(direct.f_timeout - coupled.f_timeout)
    )
    out = [_check("C8.coupled_vs_direct_tv", tv <= 0.02, 0.0, tv, 0.02)]
    mismatches, runs, s = 0, 0, 0
    zspec, zpr = spec, pr
    while runs < n_z_runs:
        rs = mc.rep_seed(seed * 1000 + 3, s)
        s += 1
        o = ch.coupled_walk(zspec, zpr, rs, 1, 10**6, 0, 10**7)
        if o.kind is not OutcomeKind.HIT_LEFT:
            continue
        runs += 1
        c = o.counters
        top = int(c.sites.max())
        z = ch.right_jumps_chain(zspec, zpr, rs, top + 2)
        walk_r = np.array([c.R[c.sites == x][0] if x <= top else 0 for x in range(1, z.size + 1)])
        mismatches += int(not (z[-1] == 0 and np.array_equal(z, walk_r)))
    out.append(_check("C8.Z_equals_right_jumps_before_T0", mismatches == 0, 0, mismatches, 0))
    return out


def criterion_10(seed: int = 0, n_reps: int = 1000, threads: int = 1) -> list[CheckResult]:
    q = 0.25
    pr = Params(1.0 - q, q, 2, 2)
    spec = EnvironmentSpec(left_tail=Constant(Q(0)), right_tail=Constant(P(0)))
    d = mc.estimate_direction(spec, pr, 200, 10**7, n_reps, seed * 1000 + 10, threads=threads)
    fr, fl = d.split_excluding_timeouts()
    ok = 0.05 < fr < 0.95 and 0.05 < fl < 0.95
    return [_check("C10.mixed_transience_split", ok, "(0.05, 0.95) each", (fr, fl, d.f_timeout), 0.0)]


QUICK = {1: criterion_1, 2: criterion_2, 3: criterion_3, 6: criterion_6, 7: criterion_7, 9: criterion_9}
FULL = {4: criterion_4, 5: criterion_5, 8: criterion_8, 10: criterion_10}


def run_validation(level: str = "quick", seed: int = 0, threads: int = 1) -> list[CheckResult]:
    if level not in ("quick", "full"):
        raise ValueError(f"level must be quick or full, got {level!r}")
    results: list[CheckResult] = []
    for k in sorted(QUICK):
        fn = QUICK[k]
        results += fn(seed) if k in (1, 3, 9) else fn()
    if level == "full":
        for k in sorted(FULL):
            results += FULL[k](seed, threads=threads)
    return results
