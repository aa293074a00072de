"""Auxiliary Markov chains: the single-site chain and its jump-augmented
version, per-site jump sequences, the right- and left-jumps chains, and the
session decomposition used at criticality."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from . import _kernels as K
from .analytic import mean_S, stationary_weights
from .environment import (
    Constant,
    EnvironmentSpec,
    Params,
    SiteConfig,
    jump_prob_right,
    transition_tables,
)
from .errors import BudgetZero, MissingConstantTail, PreconditionViolated
from .walk import OutcomeKind, RunOutcome, WalkState, advance, coupled_seed

# Z values above this are treated as certain survival; see survival_run_Z.
Z_SURVIVAL_CAP = 10_000


@dataclass(frozen=True)
class TransitionMatrix:
    states: tuple[str, ...]
    entries: np.ndarray

    def row_sums(self) -> np.ndarray:
        return self.entries.sum(axis=1)

    def is_stochastic(self, tol: float = 1e-12) -> bool:
        return bool((self.entries >= 0).all() and np.abs(self.row_sums() - 1.0).max() <= tol)

    def __getitem__(self, key: tuple[str, str]) -> float:
        a, b = key
        return float(self.entries[self.states.index(a), self.states.index(b)])

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(("",) + self.states) + "\n")
        for label, row in zip(self.states, self.entries):
            buf.write(label + "," + ",".join(repr(float(v)) for v in row) + "\n")
        return buf.getvalue()


def single_site_matrix(params: Params) -> TransitionMatrix:
    """Configuration chain of one site, states (p,0..L-1) then (q,0..R-1)."""
    L, R, p, q = params.L, params.R, params.p, params.q
    M = np.zeros((L + R, L + R))
    for i in range(L):
        M[i, 0] += p
        M[i, i + 1 if i < L - 1 else L] += 1.0 - p
    for i in range(R):
        M[L + i, L] += 1.0 - q
        M[L + i, L + i + 1 if i < R - 1 else 0] += q
    return TransitionMatrix(tuple(params.labels()), M)


def extended_labels(params: Params) -> tuple[str, ...]:
    labels = params.labels()
    return tuple(f"{s},+1" for s in labels) + tuple(f"{s},-1" for s in labels)


def extended_matrix(params: Params) -> TransitionMatrix:
    """Chain of (configuration, jump just made); states (lam,+1) for all lam, then (lam,-1)."""
    prob, nxt_r, nxt_l = transition_tables(params)
    n = params.n_configs
    M = np.zeros((2 * n, 2 * n))
    for c in range(n):
        for row, succ in ((c, nxt_r[c]), (n + c, nxt_l[c])):
            M[row, succ] += prob[succ]
            M[row, n + succ] += 1.0 - prob[succ]
    return TransitionMatrix(extended_labels(params), M)


def extended_initial(config: SiteConfig, params: Params) -> np.ndarray:
    """Law of the first (configuration, jump) pair at a site starting in ``config``."""
    n = params.n_configs
    v = np.zeros(2 * n)
    c = params.code(config)
    pr = jump_prob_right(config, params)
    v[c] = pr
    v[n + c] = 1.0 - pr
    return v


@dataclass(frozen=True)
class StationaryDistribution:
    states: tuple[str, ...]
    pi: np.ndarray
    pi_p: float
    pi_q: float

    def to_csv(self) -> str:
        lines = ["state,probability"]
        lines += [f"{s},{float(v)!r}" for s, v in zip(self.states, self.pi)]
        return "\n".join(lines) + "\n"


def stationary_pi(params: Params) -> StationaryDistribution:
    p, q, R, L = params.p, params.q, params.R, params.L
    A, B = stationary_weights(params)
    D = A + B
    pi_p = [p * (1.0 - q) * q**R * (1.0 - p) ** i / D for i in range(L)]
    pi_q = [p * (1.0 - q) * (1.0 - p) ** L * q**i / D for i in range(R)]
    return StationaryDistribution(tuple(params.labels()), np.array(pi_p + pi_q), A / D, B / D)


def power_iteration(M: np.ndarray, tol: float = 1e-15, max_squarings: int = 64) -> np.ndarray:
    """Left Perron vector of a stochastic matrix by powering.

    Works on the lazy chain (I + M) / 2, which has the same stationary vector
    and no periodicity, and squares it until the rows agree.
    """
    n = M.shape[0]
    P_ = 0.5 * (np.eye(n) + M)
    for _ in range(max_squarings):
        P_ = P_ @ P_
        P_ /= P_.sum(axis=1, keepdims=True)
        if np.ptp(P_, axis=0).max() < tol:
            break
    return P_.mean(axis=0)


# ---------------------------------------------------------------------------
# per-site jump sequences


class JumpSequence:
    """Lazily generated jumps J_1, J_2, ... of one site.

    The k-th jump is a deterministic function of (key, site, k), so any prefix
    can be regenerated from scratch.
    """

    _CHUNK = 1024

    def __init__(self, initial: SiteConfig, params: Params, key: np.uint64, site: int):
        self.initial = initial
        self.params = params
        self.key = np.uint64(key)
        self.site = int(site)
        self._tables = transition_tables(params)
        self._buf = np.empty(0, dtype=np.int8)
        self._state = params.code(initial)
        self._pos = 0

    def _extend(self, n: int) -> None:
        if n <= self._buf.size:
            return
        count = max(n - self._buf.size, self._CHUNK, self._buf.size)
        out = np.empty(count, dtype=np.int8)
        prob, nxt_r, nxt_l = self._tables
        self._state = K.site_jumps(
            0, prob, nxt_r, nxt_l, self.key, self.site, self._buf.size, count, self._state, out
        )
        self._buf = np.concatenate([self._buf, out])

    def prefix(self, n: int) -> np.ndarray:
        self._extend(n)
        return self._buf[:n].copy()

    def __getitem__(self, k: int) -> int:
        """J_{k+1} (zero-based indexing)."""
        self._extend(k + 1)
        return int(self._buf[k])

    def __iter__(self):
        self._pos = 0
        return self

    def __next__(self) -> int:
        j = self[self._pos]
        self._pos += 1
        return j


def jump_sequence(initial: SiteConfig, params: Params, seed: int, site: int) -> JumpSequence:
    return JumpSequence(initial, params, coupled_seed(seed), site)


def coupled_site_jumps(
    a: SiteConfig, b: SiteConfig, params: Params, uniforms: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Jump sequences of two site chains driven by one shared uniform stream."""
    prob, nxt_r, nxt_l = transition_tables(params)
    ja = np.empty(uniforms.size, dtype=np.int8)
    jb = np.empty(uniforms.size, dtype=np.int8)
    K.jumps_from_uniforms(params.code(a), prob, nxt_r, nxt_l, uniforms, ja)
    K.jumps_from_uniforms(params.code(b), prob, nxt_r, nxt_l, uniforms, jb)
    return ja, jb


# ---------------------------------------------------------------------------
# right- and left-jumps chains


def right_jumps_step(z_prev: int, jumps: Iterable[int]) -> int:
    """Right jumps in ``jumps`` before the z_prev-th left jump."""
    if z_prev < 0:
        raise ValueError("z_prev must be nonnegative")
    if z_prev == 0:
        return 0
    rights = lefts = 0
    for j in jumps:
        if j == 1:
            rights += 1
        else:
            lefts += 1
            if lefts == z_prev:
                return rights
    raise ValueError("jump sequence ended before enough left jumps")


def left_jumps_step(w_prev: int, jumps: Iterable[int]) -> int:
    """Left jumps in ``jumps`` before the (w_prev + 1)-th right jump."""
    if w_prev < 0:
        raise ValueError("w_prev must be nonnegative")
    rights = lefts = 0
    for j in jumps:
        if j == 1:
            rights += 1
            if rights == w_prev + 1:
                return lefts
        else:
            lefts += 1
    raise ValueError("jump sequence ended before enough right jumps")


def right_jumps_chain(
    spec: EnvironmentSpec, params: Params, seed: int, horizon: int, cap: Optional[int] = None
) -> np.ndarray:
    """Z_1, Z_2, ... built from the per-site sequences of sites 1, 2, ...

    Stops at the first zero, at ``horizon`` entries, or at the first value
    above ``cap``.
    """
    if horizon <= 0:
        return np.empty(0, dtype=np.int64)
    prob, nxt_r, nxt_l = transition_tables(params)
    codes = spec.materialize(params, 1, horizon)
    out = np.empty(horizon, dtype=np.int64)
    n = K.right_jumps_kernel(codes, prob, nxt_r, nxt_l, coupled_seed(seed), 1, cap or 0, out)
    return out[:n]


def survival_run_Z(
    spec: EnvironmentSpec, params: Params, horizon: int, seed: int, cap: int = Z_SURVIVAL_CAP
) -> bool:
    """Whether Z_x > 0 for 1 <= x <= horizon.

    Once Z exceeds ``cap`` the run is counted as surviving: left jumps must
    then outnumber right jumps by thousands at a single site, which has
    negligible probability when alpha > 1/2.
    """
    if not isinstance(spec.right_tail, Constant):
        raise MissingConstantTail("the right-jumps chain needs a constant right tail")
    if horizon <= 0:
        return True
    z = right_jumps_chain(spec, params, seed, horizon, cap)
    return bool(z[-1] > 0)


def left_jumps_chain(initial: SiteConfig, params: Params, n: int, seed: int) -> np.ndarray:
    """W_1..W_n with W_0 = 0, every site starting in ``initial``."""
    prob, nxt_r, nxt_l = transition_tables(params)
    out = np.empty(n, dtype=np.int64)
    K.left_jumps_kernel(params.code(initial), prob, nxt_r, nxt_l, coupled_seed(seed), n, out)
    return out


def left_session_pmf(params: Params, k: int) -> float:
    """Law of the number of left jumps before the first right jump, from (p,0)."""
    p, q, L = params.p, params.q, params.L
    if k < L:
        return (1.0 - p) ** k * p
    return (1.0 - p) ** L * (1.0 - q) ** (k - L) * q


def left_session_mean(params: Params) -> float:
    p, q, L = params.p, params.q, params.L
    return ((1.0 - p) * q + (1.0 - p) ** L * (p - q)) / (p * q)


def left_session_sampler(params: Params, rng: np.random.Generator, size: int) -> np.ndarray:
    p, q, L = params.p, params.q, params.L
    g1 = rng.geometric(p, size) - 1
    g2 = rng.geometric(q, size) - 1
    return np.where(g1 < L, g1, L + g2)


# ---------------------------------------------------------------------------
# sessions


@dataclass(frozen=True)
class SessionLaw:
    """Right jumps made from a site in one visit-to-left-jump session.

    Index i < R means the session starts in (q, i); i = R means it starts in
    p-mode, where the count is geometric.
    """

    params: Params
    i: int

    def __post_init__(self):
        if not 0 <= self.i <= self.params.R:
            raise ValueError(f"session index must be in 0..{self.params.R}, got {self.i}")

    @property
    def m(self) -> int:
        return self.params.R - self.i

    def mean(self) -> float:
        return mean_S(self.params, self.i)


def session_logpmf(law: SessionLaw, k: int) -> float:
    p, q, m = law.params.p, law.params.q, law.m
    if k < 0:
        return -math.inf
    if k < m:
        return k * math.log(q) + math.log1p(-q)
    return m * math.log(q) + (k - m) * math.log(p) + math.log1p(-p)


def session_pmf(law: SessionLaw, k: int) -> float:
    if k < 0:
        return 0.0
    if k > 1000:
        return math.exp(session_logpmf(law, k))
    p, q, m = law.params.p, law.params.q, law.m
    if k < m:
        return q**k * (1.0 - q)
    return q**m * p ** (k - m) * (1.0 - p)


def session_sampler(law: SessionLaw, rng: np.random.Generator, size: Optional[int] = None):
    """Inverse-transform sampling: geometric q-stretch, then a geometric p-tail once past m."""
    p, q, m = law.params.p, law.params.q, law.m
    n = 1 if size is None else size
    g1 = rng.geometric(1.0 - q, n) - 1
    g2 = rng.geometric(1.0 - p, n) - 1
    out = np.where(g1 < m, g1, m + g2)
    return int(out[0]) if size is None else out


@dataclass(frozen=True)
class SessionMatrices:
    A_hat: TransitionMatrix
    A: TransitionMatrix
    psi: np.ndarray


def session_matrix(params: Params) -> SessionMatrices:
    """Configuration left at a site by one session, and its restriction to the
    recurrent class {(p,1), ..., (p,L-1), (q,0)}."""
    L, R, p, q = params.L, params.R, params.p, params.q
    n = L + R
    Ah = np.zeros((n, n))
    q0 = L
    if L == 1:
        Ah[:, q0] = 1.0
    else:
        for i in range(L):
            Ah[i, 1] += p
            Ah[i, i + 1 if i < L - 1 else q0] += 1.0 - p
        for i in range(R):
            Ah[L + i, q0] += 1.0 - q ** (R - i)
            Ah[L + i, 1] += q ** (R - i)
    A_hat = TransitionMatrix(tuple(params.labels()), Ah)
    keep = list(range(1, L)) + [q0]
    A = Ah[np.ix_(keep, keep)]
    labels = tuple(params.labels()[k] for k in keep)
    if L == 1:
        psi = np.array([1.0])
    elif L == 2:
        psi = np.array([q**R, 1.0 - p])
        psi /= psi.sum()
    else:
        m = len(keep)
        lhs = np.vstack([(A.T - np.eye(m))[:-1], np.ones(m)])
        rhs = np.zeros(m)
        rhs[-1] = 1.0
        psi = np.linalg.solve(lhs, rhs)
    return SessionMatrices(A_hat, TransitionMatrix(labels, A), psi)


def session_E_vector(params: Params) -> np.ndarray:
    """Mean session right-jump counts on the states of the restricted matrix."""
    geometric = mean_S(params, params.R)
    return np.array([geometric] * (params.L - 1) + [mean_S(params, 0)])


# ---------------------------------------------------------------------------
# walk driven by a pre-drawn jump pattern


def _coupled_reference(state: WalkState, key: np.uint64, max_steps: int, rb: int, lb: int) -> int:
    seqs: dict[int, JumpSequence] = {}
    prob, nxt_r, nxt_l = state.tables
    w = state.window
    for _ in range(max_steps):
        x = state.position
        if x >= rb:
            return K.STATUS_RIGHT
        if x <= lb:
            return K.STATUS_LEFT
        w.ensure(x)
        if x not in seqs:
            seqs[x] = JumpSequence(state.spec.lookup(x), state.params, key, x)
        i = x - w.origin
        j = seqs[x][int(w.rights[i] + w.lefts[i])]
        c = w.codes[i]
        if j == 1:
            w.codes[i] = nxt_r[c]
            w.rights[i] += 1
        else:
            w.codes[i] = nxt_l[c]
            w.lefts[i] += 1
        state.position += j
        state.time += 1
        k = state.position - w.origin
        if w.first_hit[k] < 0:
            w.first_hit[k] = state.time
    if state.position >= rb:
        return K.STATUS_RIGHT
    if state.position <= lb:
        return K.STATUS_LEFT
    return K.STATUS_BUDGET


def coupled_walk(
    spec: EnvironmentSpec,
    params: Params,
    seed: int,
    start: int,
    right_barrier: int,
    left_barrier: int,
    max_steps: int,
    engine: str = "compiled",
) -> RunOutcome:
    """Walk X_{n+1} = X_n + J^{X_n}_{K_n}, K_n being the number of earlier departures from X_n.

    ``engine="reference"`` builds explicit per-site :class:`JumpSequence`
    objects and must agree exactly with the compiled loop.
    """
    if max_steps == 0:
        raise BudgetZero("max_steps must be at least 1")
    if not left_barrier < start < right_barrier:
        raise PreconditionViolated("need left_barrier < start < right_barrier")
    state = WalkState.initial(spec, params, start)
    key = coupled_seed(seed)
    if engine == "compiled":
        status = advance(state, None, max_steps, right_barrier, left_barrier, coupled_key=key)
    elif engine == "reference":
        status = _coupled_reference(state, key, max_steps, right_barrier, left_barrier)
    else:
        raise ValueError(f"unknown engine {engine!r}")
    kind = {K.STATUS_RIGHT: OutcomeKind.HIT_RIGHT, K.STATUS_LEFT: OutcomeKind.HIT_LEFT}.get(
        status, OutcomeKind.BUDGET
    )
    return RunOutcome(kind, state.position, state.time, seed, state)
