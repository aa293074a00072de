"""Step-by-step simulation of the walk with environment feedback."""

from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from . import _kernels as K
from .environment import EnvironmentSpec, Params, SiteConfig, transition_tables
from .errors import BudgetZero, PreconditionViolated

FAR = 1 << 60
_PAD = 64


def coupled_seed(seed: int) -> np.uint64:
    """64-bit key for the per-site uniform streams of a run seeded with ``seed``."""
    return np.random.SeedSequence(seed).generate_state(1, np.uint64)[0]


def make_rng(seed: Union[int, np.random.SeedSequence]) -> np.random.Generator:
    return np.random.default_rng(seed)


class Window:
    """Dense, growable slice of the environment plus per-site counters."""

    def __init__(self, spec: EnvironmentSpec, params: Params, lo: int, hi: int):
        self.spec = spec
        self.params = params
        self.origin = lo
        self.codes = spec.materialize(params, lo, hi)
        size = hi - lo + 1
        self.rights = np.zeros(size, dtype=np.int64)
        self.lefts = np.zeros(size, dtype=np.int64)
        self.first_hit = np.full(size, -1, dtype=np.int64)

    @property
    def lo(self) -> int:
        return self.origin

    @property
    def hi(self) -> int:
        return self.origin + self.codes.size - 1

    def ensure(self, x: int) -> None:
        """Grow so that x - 1 .. x + 1 lie strictly inside the window."""
        size = self.codes.size
        if x - 1 <= self.lo:
            extra = max(size, self.lo - x + _PAD)
            new_lo = self.lo - extra
            self._prepend(new_lo)
        if x + 1 >= self.hi:
            extra = max(self.codes.size, x - self.hi + _PAD)
            self._append(self.hi + extra)

    def _prepend(self, new_lo: int) -> None:
        n = self.lo - new_lo
        self.codes = np.concatenate([self.spec.materialize(self.params, new_lo, self.lo - 1), self.codes])
        self.rights = np.concatenate([np.zeros(n, np.int64), self.rights])
        self.lefts = np.concatenate([np.zeros(n, np.int64), self.lefts])
        self.first_hit = np.concatenate([np.full(n, -1, np.int64), self.first_hit])
        self.origin = new_lo

    def _append(self, new_hi: int) -> None:
        n = new_hi - self.hi
        self.codes = np.concatenate([self.codes, self.spec.materialize(self.params, self.hi + 1, new_hi)])
        self.rights = np.concatenate([self.rights, np.zeros(n, np.int64)])
        self.lefts = np.concatenate([self.lefts, np.zeros(n, np.int64)])
        self.first_hit = np.concatenate([self.first_hit, np.full(n, -1, np.int64)])

    def config(self, x: int) -> SiteConfig:
        if self.lo <= x <= self.hi:
            return self.params.decode(self.codes[x - self.origin])
        return self.spec.lookup(x)

    def environment(self) -> dict[int, SiteConfig]:
        return {self.origin + k: self.params.decode(c) for k, c in enumerate(self.codes)}


@dataclass
class Counters:
    sites: np.ndarray
    N: np.ndarray
    R: np.ndarray
    L: np.ndarray

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "N", "R", "L"])
        for row in zip(self.sites, self.N, self.R, self.L):
            w.writerow([int(v) for v in row])
        return buf.getvalue()


@dataclass
class WalkState:
    spec: EnvironmentSpec
    params: Params
    position: int
    start: int
    time: int = 0
    window: Window = None
    tables: tuple = None

    def __post_init__(self):
        if self.window is None:
            self.window = Window(self.spec, self.params, self.position - _PAD, self.position + _PAD)
            self.window.first_hit[self.position - self.window.origin] = 0
        if self.tables is None:
            self.tables = transition_tables(self.params)

    @classmethod
    def initial(cls, spec: EnvironmentSpec, params: Params, start: int = 0) -> "WalkState":
        spec.validate(params)
        return cls(spec, params, start, start)

    def visited_slice(self) -> slice:
        seen = np.flatnonzero(self.window.first_hit >= 0)
        return slice(int(seen[0]), int(seen[-1]) + 1)

    def counters(self) -> Counters:
        w = self.window
        sl = self.visited_slice()
        sites = np.arange(w.codes.size, dtype=np.int64)[sl] + w.origin
        R = w.rights[sl].copy()
        L = w.lefts[sl].copy()
        N = R + L + (sites == self.position)
        return Counters(sites, N, R, L)

    def hitting_times(self) -> dict[int, int]:
        w = self.window
        idx = np.flatnonzero(w.first_hit >= 0)
        return {int(i + w.origin): int(w.first_hit[i]) for i in idx}

    def config(self, x: int) -> SiteConfig:
        return self.window.config(x)


def step(state: WalkState, rng: np.random.Generator) -> WalkState:
    """One jump, drawing a single uniform; pure-Python twin of the compiled loop."""
    w = state.window
    w.ensure(state.position)
    prob, nxt_r, nxt_l = state.tables
    i = state.position - w.origin
    c = w.codes[i]
    if rng.random() <= prob[c]:
        w.codes[i] = nxt_r[c]
        w.rights[i] += 1
        state.position += 1
    else:
        w.codes[i] = nxt_l[c]
        w.lefts[i] += 1
        state.position -= 1
    state.time += 1
    j = state.position - w.origin
    if w.first_hit[j] < 0:
        w.first_hit[j] = state.time
    return state


def advance(
    state: WalkState,
    rng: Optional[np.random.Generator],
    n_steps: int,
    right_barrier: int = FAR,
    left_barrier: int = -FAR,
    coupled_key: Optional[np.uint64] = None,
    trajectory: Optional[np.ndarray] = None,
) -> int:
    """Run the compiled loop for at most ``n_steps`` more jumps; returns the kernel status."""
    prob, nxt_r, nxt_l = state.tables
    coupled = coupled_key is not None
    key = np.uint64(coupled_key if coupled else 0)
    if rng is None:
        rng = np.random.default_rng(0)
    traj = trajectory if trajectory is not None else np.empty(0, np.int64)
    traj_start = state.time if trajectory is not None else 0
    target = state.time + n_steps
    w = state.window
    while True:
        status, pos, t = K.walk_kernel(
            w.codes, w.rights, w.lefts, w.first_hit, w.origin, state.position, state.time,
            target, right_barrier, left_barrier, prob, nxt_r, nxt_l, rng, coupled, key,
            traj, traj_start,
        )
        state.position, state.time = int(pos), int(t)
        if status != K.STATUS_GROW:
            return int(status)
        w.ensure(state.position)


class OutcomeKind(enum.Enum):
    HIT_RIGHT = "HitRightBarrier"
    HIT_LEFT = "HitLeftBarrier"
    BUDGET = "StepBudgetExhausted"


_STATUS_KIND = {
    K.STATUS_RIGHT: OutcomeKind.HIT_RIGHT,
    K.STATUS_LEFT: OutcomeKind.HIT_LEFT,
    K.STATUS_BUDGET: OutcomeKind.BUDGET,
}


@dataclass
class RunOutcome:
    kind: OutcomeKind
    position: int
    time: int
    seed: int
    state: WalkState = field(repr=False)
    trajectory: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def hitting_times(self) -> dict[int, int]:
        return self.state.hitting_times()

    @property
    def counters(self) -> Counters:
        return self.state.counters()

    def summary(self) -> dict:
        return {
            "kind": self.kind.value,
            "position": self.position,
            "time": self.time,
            "seed": self.seed,
        }

    def trajectory_csv(self) -> str:
        if self.trajectory is None:
            raise ValueError("trajectory was not recorded")
        buf = io.StringIO()
        buf.write("n,position\n")
        for n, x in enumerate(self.trajectory):
            buf.write(f"{n},{int(x)}\n")
        return buf.getvalue()


def run_until(
    spec: EnvironmentSpec,
    params: Params,
    start: int,
    right_barrier: int,
    left_barrier: int,
    max_steps: int,
    seed: int,
    *,
    engine: str = "direct",
    record_trajectory: bool = False,
) -> RunOutcome:
    """Simulate from ``start`` until a barrier is hit or the budget runs out.

    ``engine="coupled"`` drives each site by its own counter-based uniform
    stream instead of a single sequential stream.
    """
    if max_steps == 0:
        raise BudgetZero("max_steps must be at least 1")
    if max_steps < 0:
        raise ValueError("max_steps must be nonnegative")
    if not left_barrier < start < right_barrier:
        raise PreconditionViolated("need left_barrier < start < right_barrier")
    if engine not in ("direct", "coupled"):
        raise ValueError(f"unknown engine {engine!r}")
    state = WalkState.initial(spec, params, start)
    traj = None
    if record_trajectory:
        traj = np.empty(max_steps + 1, dtype=np.int64)
        traj[0] = start
    if engine == "direct":
        status = advance(state, make_rng(seed), max_steps, right_barrier, left_barrier, trajectory=traj)
    else:
        status = advance(state, None, max_steps, right_barrier, left_barrier, coupled_key=coupled_seed(seed), trajectory=traj)
    if traj is not None:
        traj = traj[: state.time + 1]
    return RunOutcome(_STATUS_KIND[status], state.position, state.time, seed, state, traj)


@dataclass
class SpeedRun:
    position: int
    speed: float
    n_steps: int
    seed: int
    state: WalkState = field(repr=False)

    @property
    def counters(self) -> Counters:
        return self.state.counters()


def record_speed_run(spec: EnvironmentSpec, params: Params, n_steps: int, seed: int, start: int = 0) -> SpeedRun:
    """Run exactly ``n_steps`` jumps and report the displacement per step."""
    if n_steps < 1:
        raise BudgetZero("n_steps must be at least 1")
    state = WalkState.initial(spec, params, start)
    advance(state, make_rng(seed), n_steps)
    disp = state.position - start
    return SpeedRun(state.position, disp / n_steps, n_steps, seed, state)
