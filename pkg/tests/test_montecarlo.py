import numpy as np
import pytest

from feedbackwalk import montecarlo as mc
from feedbackwalk.analytic import speed_L1
from feedbackwalk.environment import Constant, EnvironmentSpec, P, Params, Periodic, Q
from feedbackwalk.errors import PreconditionViolated

Q0 = EnvironmentSpec.constant(Q(0))


class TestSeeds:
    def test_rep_seeds_distinct(self):
        seeds = {mc.rep_seed(0, k) for k in range(10000)}
        assert len(seeds) == 10000
        assert mc.rep_seed(0, 1) != mc.rep_seed(1, 0)

    def test_digest_order_free(self):
        assert mc.config_digest(a=1, b=2) == mc.config_digest(b=2, a=1)
        assert mc.config_digest(a=1) != mc.config_digest(a=2)


class TestSpeed:
    def test_reproducible_across_threads(self):
        pr = Params(0.7, 0.4, 2, 2)
        a = mc.estimate_speed(Q0, pr, 10**4, 16, 3, threads=1)
        b = mc.estimate_speed(Q0, pr, 10**4, 16, 3, threads=2)
        c = mc.estimate_speed(Q0, pr, 10**4, 16, 3)
        assert a == b == c
        assert (a.mean, a.stderr) == (b.mean, b.stderr)

    def test_symmetric(self):
        e = mc.estimate_speed(Q0, Params(0.5, 0.5), 10**5, 100, 0)
        assert e.within(0.0) and e.stderr > 0

    def test_five_thirteenths(self):
        e = mc.estimate_speed(Q0, Params(0.9, 0.6), 10**6, 100, 0)
        assert e.within(5 / 13) and e.stderr <= 0.005

    def test_bad_args(self):
        with pytest.raises(ValueError):
            mc.estimate_speed(Q0, Params(0.5, 0.5), 0, 10, 0)

    def test_csv_row(self):
        e = mc.estimate_speed(Q0, Params(0.5, 0.5), 100, 4, 9)
        assert mc.Estimate.CSV_HEADER == "estimator,p,q,R,L,mean,stderr,n,seed"
        fields = e.csv_row().split(",")
        assert fields[0] == "speed" and fields[1:5] == ["0.5", "0.5", "1", "1"]
        assert float(fields[5]) == e.mean and fields[7:] == ["4", "9"]

    def test_single_sample(self):
        e = mc.Estimate.from_samples("x", [1.0], 0, {})
        assert e.stderr == 0.0 and e.n_samples == 1
        with pytest.raises(ValueError):
            mc.Estimate.from_samples("x", [], 0, {})


class TestDirection:
    def test_barrier_one_is_first_step(self):
        pr = Params(0.7, 0.2)
        d = mc.estimate_direction(Q0, pr, 1, 10, 4000, 0)
        assert abs(d.f_right - 0.2) <= 3 * d.stderr_right
        spec = EnvironmentSpec.constant(P(0))
        d = mc.estimate_direction(spec, pr, 1, 10, 4000, 1)
        assert abs(d.f_right - 0.7) <= 3 * d.stderr_right
        assert d.f_right + d.f_left + d.f_timeout == pytest.approx(1.0)

    def test_coupled_reproducible_across_threads(self):
        pr = Params(0.7, 0.3, 2, 2)
        a = mc.estimate_direction(Q0, pr, 20, 10**5, 50, 4, engine="coupled")
        b = mc.estimate_direction(Q0, pr, 20, 10**5, 50, 4, engine="coupled", threads=2)
        assert a == b

    def test_split(self):
        d = mc.DirectionEstimate(0.3, 0.3, 0.4, 10, 0, 5, 5, "direct", "")
        assert d.split_excluding_timeouts() == (0.5, 0.5)
        d = mc.DirectionEstimate(0.0, 0.0, 1.0, 10, 0, 5, 5, "direct", "")
        assert all(np.isnan(d.split_excluding_timeouts()))

    def test_mixed_split_anchor(self):
        # no closed form exists for the split; this freezes the measured value
        pr = Params(0.75, 0.25, 2, 2)
        spec = EnvironmentSpec(Constant(Q(0)), Constant(P(0)))
        d = mc.estimate_direction(spec, pr, 200, 10**7, 1000, 10)
        fr, fl = d.split_excluding_timeouts()
        assert (fr, fl) == pytest.approx((0.663, 0.337), abs=1e-12)


class TestVisits:
    def test_gamma(self):
        pr = Params(0.9, 0.6)
        e = mc.estimate_E_Nx(Q0, pr, 5, 2000, 10**6, 0)
        assert e.within(2.6)
        assert e.settings["timeouts"] == 0

    def test_two_sites_agree(self):
        pr = Params(0.8, 0.5, 3, 1)
        a = mc.estimate_E_Nx(Q0, pr, 5, 2000, 10**6, 0)
        b = mc.estimate_E_Nx(Q0, pr, 40, 2000, 10**6, 1)
        assert abs(a.mean - b.mean) <= 3 * np.hypot(a.stderr, b.stderr)

    def test_inverse_is_speed(self):
        pr = Params(0.8, 0.5, 3, 1)
        e = mc.estimate_E_Nx(Q0, pr, 10, 2000, 10**6, 2)
        v = speed_L1(pr).speed
        # delta method for 1 / mean
        assert abs(1 / e.mean - v) <= 3 * e.stderr / e.mean**2

    def test_preconditions(self):
        with pytest.raises(PreconditionViolated):
            mc.estimate_E_Nx(Q0, Params(0.4, 0.1), 5, 10, 100, 0)
        periodic = EnvironmentSpec(Constant(Q(0)), Periodic((P(0), Q(0))))
        with pytest.raises(PreconditionViolated):
            mc.estimate_E_Nx(periodic, Params(0.9, 0.6), 5, 10, 100, 0)


class TestSurvival:
    def test_positive_anchor(self):
        e = mc.estimate_Z_survival(Q0, Params(0.9, 0.6), 1000, 1000, 0)
        assert e.mean >= 0.2
        assert e.mean == 0.562

    def test_extinction(self):
        e = mc.estimate_Z_survival(Q0, Params(0.4, 0.1), 1000, 1000, 0)
        assert e.mean < 0.01

    def test_horizon_zero(self):
        assert mc.estimate_Z_survival(Q0, Params(0.4, 0.1), 0, 20, 0).mean == 1.0

    def test_matches_escape(self):
        # surviving Z is the same event as never returning to 0 after a first step right
        pr = Params(0.8, 0.55)
        z = mc.estimate_Z_survival(Q0, pr, 1000, 2000, 0)
        x = mc.estimate_escape_from_one(Q0, pr, 1000, 2000, 1)
        assert abs(z.mean - x.mean) <= 3 * np.hypot(z.stderr, x.stderr)


class TestProbe:
    def test_shape_and_symmetric(self):
        rows = mc.critical_speed_probe(Q0, Params(0.5, 0.5), [10**4, 10**3, 10**5], 50, 0)
        assert [r.n for r in rows] == [10**3, 10**4, 10**5]
        for r in rows:
            assert abs(r.mean_speed) <= 3 * r.stderr
            assert r.mean_abs_speed >= 0 and r.stderr_abs > 0

    def test_rejects_noncritical(self):
        with pytest.raises(PreconditionViolated):
            mc.critical_speed_probe(Q0, Params(0.9, 0.6), [100], 2, 0)
