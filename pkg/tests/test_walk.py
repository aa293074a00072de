import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from feedbackwalk.environment import EnvironmentSpec, P, Params, Periodic, Q, update_config
from feedbackwalk.errors import BudgetZero, PreconditionViolated
from feedbackwalk.walk import (
    OutcomeKind,
    WalkState,
    advance,
    make_rng,
    record_speed_run,
    run_until,
    step,
)

from strategies import params as params_st

Q0 = EnvironmentSpec.constant(Q(0))


class TestStep:
    def test_right_from_q0_charges(self):
        pr = Params(0.5, 0.5, R=2, L=2)
        st_ = WalkState.initial(Q0, pr)
        rng = make_rng(0)
        while True:
            before = st_.position
            step(st_, rng)
            if st_.position == before + 1:
                break
        assert st_.config(before) in (Q(1), P(0))

    def test_flip_to_p_when_R1(self):
        pr = Params(0.5, 0.999, R=1, L=2)
        s = WalkState.initial(Q0, pr)
        step(s, make_rng(1))
        assert s.position == 1 and s.config(0) == P(0) and s.time == 1

    def test_left_from_p_charges(self):
        pr = Params(0.001, 0.5, R=1, L=3)
        spec = EnvironmentSpec.with_overrides(Q0.left_tail, Q0.right_tail, {0: P(0)})
        s = WalkState.initial(spec, pr)
        step(s, make_rng(2))
        assert s.position == -1 and s.config(0) == P(1)

    @given(st.integers(0, 10**6), params_st(max_R=3, max_L=3))
    def test_python_step_matches_kernel(self, seed, pr):
        spec = EnvironmentSpec(Periodic((P(0), Q(0))), Periodic((Q(0), P(0))))
        a = WalkState.initial(spec, pr)
        rng = make_rng(seed)
        path = [a.position]
        for _ in range(200):
            step(a, rng)
            path.append(a.position)
        b = WalkState.initial(spec, pr)
        traj = np.empty(201, dtype=np.int64)
        traj[0] = 0
        advance(b, make_rng(seed), 200, trajectory=traj)
        np.testing.assert_array_equal(traj, path)
        assert all(a.config(x) == b.config(x) for x in range(-201, 202))


class TestRun:
    @given(st.integers(0, 10**6), params_st(max_R=3, max_L=3))
    def test_counter_identity_and_nearest_neighbour(self, seed, pr):
        out = run_until(Q0, pr, 0, 30, -30, 2000, seed, record_trajectory=True)
        traj = out.trajectory
        assert (np.abs(np.diff(traj)) == 1).all()
        assert traj.size == out.time + 1 and traj[-1] == out.position
        c = out.counters
        assert (c.N == c.R + c.L + (c.sites == out.position)).all()
        # every departure is counted exactly once
        assert c.R.sum() + c.L.sum() == out.time
        visits = {int(x): int(n) for x, n in zip(*np.unique(traj, return_counts=True))}
        assert {int(x): int(n) for x, n in zip(c.sites, c.N) if n} == visits

    @given(st.integers(0, 10**6), params_st(max_R=3, max_L=3))
    def test_replay_reproduces_environment(self, seed, pr):
        spec = EnvironmentSpec(Periodic((P(0), Q(0))), Periodic((Q(0), P(0))))
        out = run_until(spec, pr, 0, 25, -25, 1500, seed, record_trajectory=True)
        env = {x: spec.lookup(x) for x in range(-30, 31)}
        for a, b in zip(out.trajectory[:-1], out.trajectory[1:]):
            env[int(a)] = update_config(env[int(a)], int(b - a), pr)
        for x, c in env.items():
            assert out.state.config(x) == c

    def test_deterministic(self):
        pr = Params(0.6, 0.4, 2, 3)
        a = run_until(Q0, pr, 0, 200, -200, 10**5, 7, record_trajectory=True)
        b = run_until(Q0, pr, 0, 200, -200, 10**5, 7, record_trajectory=True)
        assert a.summary() == b.summary()
        np.testing.assert_array_equal(a.trajectory, b.trajectory)

    def test_adjacent_barriers(self):
        out = run_until(Q0, Params(0.5, 0.5), 0, 1, -1, 10, 3)
        assert out.time == 1
        assert out.kind in (OutcomeKind.HIT_RIGHT, OutcomeKind.HIT_LEFT)
        assert out.position == (1 if out.kind is OutcomeKind.HIT_RIGHT else -1)

    def test_budget(self):
        out = run_until(Q0, Params(0.5, 0.5), 0, 10**6, -10**6, 1, 0)
        assert out.kind is OutcomeKind.BUDGET and out.time == 1 and abs(out.position) == 1
        with pytest.raises(BudgetZero):
            run_until(Q0, Params(0.5, 0.5), 0, 5, -5, 0, 0)
        with pytest.raises(PreconditionViolated):
            run_until(Q0, Params(0.5, 0.5), 5, 5, -5, 10, 0)
        with pytest.raises(ValueError):
            run_until(Q0, Params(0.5, 0.5), 0, 5, -5, 10, 0, engine="bogus")

    def test_window_grows_both_ways(self):
        out = run_until(Q0, Params(0.5, 0.5), 0, 500, -500, 10**6, 4)
        assert out.kind is not OutcomeKind.BUDGET
        assert out.counters.sites.size > 128

    def test_coupled_engine_deterministic(self):
        pr = Params(0.7, 0.3, 2, 2)
        a = run_until(Q0, pr, 0, 300, -300, 10**5, 5, engine="coupled")
        b = run_until(Q0, pr, 0, 300, -300, 10**5, 5, engine="coupled")
        assert a.summary() == b.summary()


class TestSpeedRuns:
    def test_symmetric(self):
        pr = Params(0.5, 0.5)
        small = [abs(record_speed_run(Q0, pr, 10**6, s).speed) < 0.01 for s in range(100)]
        assert sum(small) >= 99

    def test_five_thirteenths(self):
        pr = Params(0.9, 0.6)
        v = np.mean([record_speed_run(Q0, pr, 10**6, s).speed for s in range(100)])
        assert abs(v - 5 / 13) < 0.01

    def test_budget_zero(self):
        with pytest.raises(BudgetZero):
            record_speed_run(Q0, Params(0.5, 0.5), 0, 0)


class TestFormats:
    def test_trajectory_csv(self):
        out = run_until(Q0, Params(0.5, 0.5), 0, 3, -3, 50, 1, record_trajectory=True)
        lines = out.trajectory_csv().splitlines()
        assert lines[0] == "n,position" and lines[1] == "0,0"
        assert len(lines) == out.time + 2

    def test_no_trajectory(self):
        out = run_until(Q0, Params(0.5, 0.5), 0, 3, -3, 50, 1)
        with pytest.raises(ValueError):
            out.trajectory_csv()

    def test_counters_csv(self):
        out = run_until(Q0, Params(0.5, 0.5), 0, 1, -1, 10, 3)
        lines = out.counters.to_csv().splitlines()
        assert lines[0] == "x,N,R,L"
        assert len(lines) == 3
        assert out.summary()["kind"] in ("HitRightBarrier", "HitLeftBarrier")
