"""Acceptance criteria 1-10, each at its stated tolerance and scale.

Every test prints one ``[PASS]`` or ``[FAIL]`` line for its criterion.
"""

import time
from pathlib import Path

import pytest

from feedbackwalk import validation as v

GOLDEN = Path(__file__).parent / "golden"


def report(capsys, k: int, title: str, results, elapsed: float, budget: float = None) -> None:
    failed = [r.check_name for r in results if not r.passed]
    slow = budget is not None and elapsed > budget
    ok = not failed and not slow
    n = len(results)
    detail = f"{n} check{'' if n == 1 else 's'}, {elapsed:.1f}s"
    if failed:
        detail += ", failed: " + ", ".join(failed)
    if slow:
        detail += f", over the {budget:.0f}s budget"
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {k}: {title} ({detail})")
    assert not failed, failed
    assert not slow, f"{elapsed:.1f}s > {budget}s"


def timed(fn, *args, **kw):
    t = time.perf_counter()
    out = fn(*args, **kw)
    return out, time.perf_counter() - t


def test_criterion_1(capsys):
    res, dt = timed(v.criterion_1, 0)
    report(capsys, 1, "analytic identities", res, dt, budget=10)


def test_criterion_2(capsys):
    res, dt = timed(v.criterion_2)
    report(capsys, 2, "published constants", res, dt)


def test_criterion_3(capsys):
    res, dt = timed(v.criterion_3, 0)
    report(capsys, 3, "closed-form speed agreement", res, dt)


@pytest.mark.slow
def test_criterion_4(capsys):
    res, dt = timed(v.criterion_4, 0)
    assert len(v.speed_points()) >= 5
    report(capsys, 4, "Monte Carlo speed and visits vs closed forms", res, dt, budget=300)


@pytest.mark.slow
def test_criterion_5(capsys):
    res, dt = timed(v.criterion_5, 0)
    report(capsys, 5, "transience cutoff at barrier 1000", res, dt)


def test_criterion_6(capsys):
    res, dt = timed(v.criterion_6)
    report(capsys, 6, "critical classification consistency", res, dt)


def test_criterion_7(capsys):
    res, dt = timed(v.criterion_7)
    for q, R, L in v.TWO_CROSSING_CASES:
        golden = (GOLDEN / f"alpha_scan_q{q}_R{R}_L{L}.csv").read_text()
        fresh = v.alpha_scan_csv(q, R, L, 0.001, 0.999, 1000)
        res.append(v.CheckResult(f"C7.golden_L{L}", "pass" if fresh == golden else "fail",
                                 "byte-identical", fresh == golden, 0.0))
    report(capsys, 7, "two sign changes of alpha - 1/2, golden scans", res, dt)


@pytest.mark.slow
def test_criterion_8(capsys):
    res, dt = timed(v.criterion_8, 0)
    report(capsys, 8, "coupled vs direct construction", res, dt)


def test_criterion_9(capsys):
    res, dt = timed(v.criterion_9, 0)
    report(capsys, 9, "monotone coupling", res, dt)


@pytest.mark.slow
def test_criterion_10(capsys):
    res, dt = timed(v.criterion_10, 0)
    report(capsys, 10, "mixed transience split", res, dt)
