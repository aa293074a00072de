"""Seeded Monte Carlo estimators with standard errors.

Every estimator derives one integer seed per replicate from ``(base_seed,
rep)`` through :class:`numpy.random.SeedSequence`, runs the replicates
(optionally on a thread pool; the compiled loops release the GIL) and
aggregates in replicate order, so results are bit-identical for any thread
count.
"""

from __future__ import annotations

import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .analytic import CRITICAL_TOL, alpha
from .chains import Z_SURVIVAL_CAP, coupled_walk, survival_run_Z
from .environment import Constant, EnvironmentSpec, Params
from .errors import PreconditionViolated
from .walk import FAR, OutcomeKind, WalkState, advance, make_rng, run_until


def rep_seed(base_seed: int, rep: int) -> int:
    return int(np.random.SeedSequence([base_seed, rep]).generate_state(1, np.uint64)[0])


def config_digest(**settings) -> str:
    doc = json.dumps(settings, sort_keys=True, default=str, separators=(",", ":"))
    return hashlib.sha256(doc.encode()).hexdigest()


def _settings(spec: Optional[EnvironmentSpec], params: Params, **extra) -> dict:
    out = {"params": params.as_dict(), **extra}
    if spec is not None:
        out["spec"] = spec.to_dict()
    return out


def _map(fn: Callable[[int], object], n: int, threads: int) -> list:
    if threads <= 1:
        return [fn(k) for k in range(n)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(n)))


@dataclass(frozen=True)
class Estimate:
    estimator: str
    mean: float
    stderr: float
    n_samples: int
    seed: int
    config_digest: str
    settings: dict = field(default_factory=dict, compare=False)

    @classmethod
    def from_samples(cls, estimator: str, samples: Sequence[float], seed: int, settings: dict) -> "Estimate":
        x = np.asarray(samples, dtype=np.float64)
        if x.size < 1:
            raise ValueError("need at least one sample")
        se = float(x.std(ddof=1) / np.sqrt(x.size)) if x.size > 1 else 0.0
        return cls(estimator, float(x.mean()), se, int(x.size), seed, config_digest(**settings), settings)

    def within(self, target: float, k: float = 3.0) -> bool:
        return abs(self.mean - target) <= k * self.stderr

    def to_dict(self) -> dict:
        return asdict(self)

    def csv_row(self) -> str:
        pr = self.settings.get("params", {})
        vals = [self.estimator, pr.get("p"), pr.get("q"), pr.get("R"), pr.get("L"),
                repr(self.mean), repr(self.stderr), self.n_samples, self.seed]
        return ",".join(str(v) for v in vals)

    CSV_HEADER = "estimator,p,q,R,L,mean,stderr,n,seed"


def estimate_speed(
    spec: EnvironmentSpec,
    params: Params,
    n_steps: int,
    n_reps: int,
    base_seed: int,
    threads: int = 1,
) -> Estimate:
    """Mean of X_n / n over independent runs."""
    if n_steps < 1 or n_reps < 1:
        raise ValueError("n_steps and n_reps must be positive")
    spec.validate(params)

    def one(k: int) -> float:
        state = WalkState.initial(spec, params, 0)
        advance(state, make_rng(rep_seed(base_seed, k)), n_steps)
        return state.position / n_steps

    samples = _map(one, n_reps, threads)
    return Estimate.from_samples(
        "speed", samples, base_seed, _settings(spec, params, n_steps=n_steps, n_reps=n_reps)
    )


@dataclass(frozen=True)
class DirectionEstimate:
    f_right: float
    f_left: float
    f_timeout: float
    n_reps: int
    seed: int
    barrier: int
    max_steps: int
    engine: str
    config_digest: str

    @property
    def stderr_right(self) -> float:
        return float(np.sqrt(self.f_right * (1.0 - self.f_right) / self.n_reps))

    def split_excluding_timeouts(self) -> tuple[float, float]:
        done = self.f_right + self.f_left
        if done == 0:
            return float("nan"), float("nan")
        return self.f_right / done, self.f_left / done

    def to_dict(self) -> dict:
        return asdict(self)


def estimate_direction(
    spec: EnvironmentSpec,
    params: Params,
    barrier: int,
    max_steps: int,
    n_reps: int,
    base_seed: int,
    *,
    engine: str = "direct",
    start: int = 0,
    threads: int = 1,
) -> DirectionEstimate:
    """Frequencies of reaching start + barrier first, start - barrier first, or neither."""
    spec.validate(params)
    rb, lb = start + barrier, start - barrier

    def one(k: int) -> OutcomeKind:
        s = rep_seed(base_seed, k)
        if engine == "coupled":
            return coupled_walk(spec, params, s, start, rb, lb, max_steps).kind
        return run_until(spec, params, start, rb, lb, max_steps, s).kind

    kinds = _map(one, n_reps, threads)
    counts = {k: sum(1 for x in kinds if x is k) for k in OutcomeKind}
    digest = config_digest(**_settings(spec, params, barrier=barrier, max_steps=max_steps, n_reps=n_reps, engine=engine, start=start))
    return DirectionEstimate(
        counts[OutcomeKind.HIT_RIGHT] / n_reps,
        counts[OutcomeKind.HIT_LEFT] / n_reps,
        counts[OutcomeKind.BUDGET] / n_reps,
        n_reps,
        base_seed,
        barrier,
        max_steps,
        engine,
        digest,
    )


def estimate_E_Nx(
    spec: EnvironmentSpec,
    params: Params,
    site: int,
    n_reps: int,
    budget: int,
    base_seed: int,
    *,
    margin: int = 200,
    threads: int = 1,
) -> Estimate:
    """Mean number of visits to ``site``, each run stopped ``margin`` sites to its right."""
    a = alpha(params)
    if a <= 0.5:
        raise PreconditionViolated(f"visit counts are finite only for alpha > 1/2, got {a}")
    if not isinstance(spec.right_tail, Constant) or site < spec.right_tail_start:
        raise PreconditionViolated("site must lie in a constant right tail")
    spec.validate(params)
    timeouts = []

    def one(k: int) -> float:
        out = run_until(spec, params, 0, site + margin, -FAR, budget, rep_seed(base_seed, k))
        timeouts.append(out.kind is OutcomeKind.BUDGET)
        c = out.counters
        hit = np.flatnonzero(c.sites == site)
        return float(c.N[hit[0]]) if hit.size else 0.0

    samples = _map(one, n_reps, threads)
    settings = _settings(spec, params, site=site, n_reps=n_reps, budget=budget, margin=margin)
    settings["timeouts"] = int(sum(timeouts))
    return Estimate.from_samples("E_Nx", samples, base_seed, settings)


def estimate_Z_survival(
    spec: EnvironmentSpec,
    params: Params,
    horizon: int,
    n_reps: int,
    base_seed: int,
    *,
    cap: int = Z_SURVIVAL_CAP,
    threads: int = 1,
) -> Estimate:
    samples = _map(
        lambda k: float(survival_run_Z(spec, params, horizon, rep_seed(base_seed, k), cap)),
        n_reps,
        threads,
    )
    return Estimate.from_samples(
        "Z_survival", samples, base_seed, _settings(spec, params, horizon=horizon, n_reps=n_reps, cap=cap)
    )


def estimate_escape_from_one(
    spec: EnvironmentSpec,
    params: Params,
    horizon: int,
    n_reps: int,
    base_seed: int,
    *,
    max_steps: int = 10**7,
    threads: int = 1,
) -> Estimate:
    """Frequency with which the walk started at 1 reaches ``horizon`` before 0."""

    def one(k: int) -> float:
        out = run_until(spec, params, 1, horizon, 0, max_steps, rep_seed(base_seed, k))
        return float(out.kind is OutcomeKind.HIT_RIGHT)

    samples = _map(one, n_reps, threads)
    return Estimate.from_samples(
        "escape_from_one", samples, base_seed, _settings(spec, params, horizon=horizon, n_reps=n_reps)
    )


@dataclass(frozen=True)
class ProbeRow:
    n: int
    mean_abs_speed: float
    stderr_abs: float
    mean_speed: float
    stderr: float


def critical_speed_probe(
    spec: EnvironmentSpec,
    params: Params,
    n_grid: Sequence[int],
    n_reps: int,
    base_seed: int,
    threads: int = 1,
) -> list[ProbeRow]:
    """Empirical |X_n| / n and X_n / n at increasing n for critical parameters.

    Exploratory only: no verdict is drawn from the numbers.
    """
    a = alpha(params)
    if abs(a - 0.5) > CRITICAL_TOL:
        raise PreconditionViolated(f"probe is for critical parameters, alpha={a}")
    grid = sorted(int(n) for n in n_grid)

    def one(k: int) -> np.ndarray:
        state = WalkState.initial(spec, params, 0)
        rng = make_rng(rep_seed(base_seed, k))
        xs = np.empty(len(grid))
        for j, n in enumerate(grid):
            advance(state, rng, n - state.time)
            xs[j] = state.position / n
        return xs

    X = np.array(_map(one, n_reps, threads))
    rows = []
    for j, n in enumerate(grid):
        col = X[:, j]
        ab = np.abs(col)
        se = lambda v: float(v.std(ddof=1) / np.sqrt(v.size)) if v.size > 1 else 0.0
        rows.append(ProbeRow(n, float(ab.mean()), se(ab), float(col.mean()), se(col)))
    return rows
