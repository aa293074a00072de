"""Polynomial evaluation and bracketed scalar root finding."""

from __future__ import annotations

from typing import Callable, Sequence

from .errors import RootNotBracketed


def horner(coeffs: Sequence[float], x: float) -> float:
    """Evaluate a polynomial given by coefficients in descending degree."""
    acc = 0.0
    for c in coeffs:
        acc = acc * x + c
    return acc


def horner_with_derivative(coeffs: Sequence[float], x: float) -> tuple[float, float]:
    val = 0.0
    der = 0.0
    for c in coeffs:
        der = der * x + val
        val = val * x + c
    return val, der


def bisect(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    xtol: float = 0.0,
    max_iter: int = 200,
) -> float:
    """Bisection on a sign-changing bracket.

    With ``xtol=0`` the loop runs until the midpoint no longer separates the
    endpoints, i.e. to full double precision.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise RootNotBracketed(f"no sign change on [{lo}, {hi}]: f={flo}, {fhi}")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi or hi - lo <= xtol:
            break
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def bracketed_newton(
    f: Callable[[float], float],
    df: Callable[[float], float],
    lo: float,
    hi: float,
    coarse_tol: float = 1e-6,
    tol: float = 1e-13,
    max_iter: int = 100,
) -> float:
    """Bisection down to ``coarse_tol`` then Newton polishing inside the bracket.

    Any Newton step that leaves the bracket or fails to shrink the residual is
    replaced by a bisection step, so the bracket is maintained throughout.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise RootNotBracketed(f"no sign change on [{lo}, {hi}]: f={flo}, {fhi}")
    lo_positive = flo > 0

    def shrink(x: float, fx: float) -> None:
        nonlocal lo, hi
        if (fx > 0) == lo_positive:
            lo = x
        else:
            hi = x

    while hi - lo > coarse_tol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        shrink(mid, fm)

    x = 0.5 * (lo + hi)
    fx = f(x)
    for _ in range(max_iter):
        if fx == 0.0:
            return x
        d = df(x)
        step_ok = d != 0.0
        if step_ok:
            nx = x - fx / d
            step_ok = lo < nx < hi
        if not step_ok:
            nx = 0.5 * (lo + hi)
        fn = f(nx)
        if step_ok and abs(fn) >= abs(fx):
            # Newton stalled; bisect instead
            step_ok = False
            nx = 0.5 * (lo + hi)
            fn = f(nx)
        shrink(nx, fn)
        # a bisection midpoint can coincide with x, so only a Newton step's size says anything
        done = (step_ok and abs(nx - x) <= tol) or hi - lo <= tol
        x, fx = nx, fn
        if done:
            break
    return x


def sign_changes(values: Sequence[float]) -> int:
    """Number of strict sign changes, skipping exact zeros."""
    signs = [v > 0 for v in values if v != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)
