"""Closed-form quantities: drift parameter alpha, critical points, speeds, and
the critical-case polynomials and classification rules."""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from .environment import (
    Constant,
    ConfigPattern,
    EnvironmentSpec,
    Mode,
    P,
    Params,
    Q,
    SiteConfig,
)
from .errors import (
    AmbiguousTailClass,
    MissingConstantTail,
    NoCriticalPoint,
    PreconditionViolated,
    WithinCriticalTolerance,
)
from .roots import bisect, bracketed_newton, horner, horner_with_derivative

CRITICAL_TOL = 1e-9
ZERO_TOL = 1e-12


class Verdict(enum.Enum):
    TRANSIENT_RIGHT = "TransientRight"
    TRANSIENT_LEFT = "TransientLeft"
    RECURRENT = "Recurrent"
    MIXED_TRANSIENT = "MixedTransient"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class Classification:
    verdict: Verdict
    rule: str
    certificates: Mapping[str, Union[float, bool, str]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"verdict": self.verdict.value, "rule": self.rule, "certificates": dict(self.certificates)}


class SpeedMethod(enum.Enum):
    L1_POLYNOMIAL = "L1Polynomial"
    R1_LINEAR_SYSTEM = "R1LinearSystem"
    R1L1_CLOSED = "R1L1Closed"


@dataclass(frozen=True)
class SpeedResult:
    speed: float
    method: SpeedMethod
    gamma: float
    t_star: Optional[float] = None
    a: Optional[tuple[float, ...]] = None

    def to_dict(self) -> dict:
        out = {"speed": self.speed, "method": self.method.value, "gamma": self.gamma}
        if self.t_star is not None:
            out["t_star"] = self.t_star
        if self.a is not None:
            out["a"] = list(self.a)
        return out


# ---------------------------------------------------------------------------
# alpha and the stationary weights


def _one_minus_pow(x: float, n: int) -> float:
    """1 - (1 - x)**n without cancellation for small x."""
    return -math.expm1(n * math.log1p(-x))


def stationary_weights(params: Params) -> tuple[float, float]:
    """Unnormalized stationary masses (A, B) of the p-mode and q-mode classes."""
    p, q, R, L = params.p, params.q, params.R, params.L
    A = (1.0 - q) * q**R * _one_minus_pow(p, L)
    B = p * (1.0 - p) ** L * _one_minus_pow(1.0 - q, R)
    return A, B


def alpha(params: Params) -> float:
    """Long-run fraction of right jumps made from a single site."""
    A, B = stationary_weights(params)
    # q plus a nonnegative excess: exact monotone rounding when alpha - q is tiny
    return params.q + (params.p - params.q) * (A / (A + B))


def classify_noncritical(params: Params, tol: float = CRITICAL_TOL) -> Classification:
    a = alpha(params)
    if abs(a - 0.5) <= tol:
        raise WithinCriticalTolerance(f"alpha={a!r} is within {tol} of 1/2")
    verdict = Verdict.TRANSIENT_RIGHT if a > 0.5 else Verdict.TRANSIENT_LEFT
    return Classification(verdict, "Thm1", {"alpha": a})


def is_critical(params: Params, tol: float = CRITICAL_TOL) -> bool:
    return abs(alpha(params) - 0.5) <= tol


# ---------------------------------------------------------------------------
# critical points


def critical_points(q: float, R: int, L: int, grid: int = 4000) -> list[float]:
    """All roots of alpha(p) = 1/2 in (0, 1) found by a grid scan plus bisection."""

    def g(p: float) -> float:
        return alpha(Params(p, q, R, L)) - 0.5

    ps = np.linspace(0.0, 1.0, grid + 1)[1:-1]
    vals = [g(p) for p in ps]
    roots = []
    for k in range(len(ps) - 1):
        if vals[k] == 0.0:
            roots.append(float(ps[k]))
        elif (vals[k] > 0) != (vals[k + 1] > 0) and vals[k + 1] != 0.0:
            roots.append(bisect(g, float(ps[k]), float(ps[k + 1])))
    if vals[-1] == 0.0:
        roots.append(float(ps[-1]))
    return roots


def _unrepresentable(q: float, R: int, L: int) -> str:
    return (f"critical point for q={q}, R={R}, L={L} lies above the largest double below 1 "
            "and cannot be represented")


def critical_p0(q: float, R: int, L: int) -> float:
    """The p solving alpha(p, q, R, L) = 1/2."""
    if not 0.0 < q < 1.0:
        raise ValueError(f"q must lie in (0, 1), got {q}")
    if L == 1:
        num = 1.0 - 2.0 * q + q ** (R + 1)
        if num <= 0.0:
            raise NoCriticalPoint(f"alpha > 1/2 for every p when q={q}, R={R}, L=1")
        p0 = num / (1.0 - 2.0 * q + q**R)
        if p0 >= 1.0:
            raise NoCriticalPoint(_unrepresentable(q, R, L))
        return p0
    if q < 0.5:

        def g(p: float) -> float:
            return alpha(Params(p, q, R, L)) - 0.5

        top = math.nextafter(1.0, 0.0)
        if g(top) < 0.0:
            raise NoCriticalPoint(_unrepresentable(q, R, L))
        return bisect(g, 0.5, top)
    roots = critical_points(q, R, L)
    if not roots:
        raise NoCriticalPoint(f"alpha - 1/2 has no sign change in p for q={q}, R={R}, L={L}")
    if len(roots) > 1:
        warnings.warn(
            f"critical point not unique for q={q}, R={R}, L={L}: {roots}; returning the one nearest 1-q",
            RuntimeWarning,
            stacklevel=2,
        )
    return min(roots, key=lambda r: abs(r - (1.0 - q)))


def critical_q0(p: float, L: int, R: int = 1) -> float:
    """The q solving alpha(p, q, 1, L) = 1/2."""
    if R != 1:
        raise PreconditionViolated("closed-form q0 needs R = 1")
    den = 2.0 * p - 1.0 + (1.0 - p) ** L
    if den <= 0.0:
        raise NoCriticalPoint(f"alpha < 1/2 for every q when p={p}, L={L}")
    q0 = p * (1.0 - p) ** L / den
    if not 0.0 < q0 < 1.0:
        raise NoCriticalPoint(f"formula gives q0={q0} outside (0, 1) for p={p}, L={L}")
    return q0


# ---------------------------------------------------------------------------
# speeds


def _ascending_to_descending(c: np.ndarray) -> list[float]:
    return [float(x) for x in c[::-1]]


def speed_polynomial_L1(params: Params) -> list[float]:
    """Coefficients (descending) of the quartic-plus polynomial whose root gives the speed."""
    p, q, R = params.p, params.q, params.R
    c = np.zeros(max(R + 1, 3) + 1)
    c[0] += 1.0 - q
    c[1] += p * q - p - 1.0
    c[2] += p + q
    c[3] += -p * q
    c[R] += -(p - q) * q**R
    c[R + 1] += (p - q) * q**R
    return _ascending_to_descending(c)


def reduced_speed_polynomial_L1(params: Params) -> list[float]:
    """The cofactor after dividing out the trivial root t = 1."""
    p, q, R = params.p, params.q, params.R
    c = np.zeros(max(R, 2) + 1)
    c[0] += 1.0 - q
    c[1] += p * q - p - q
    c[2] += p * q
    c[R] += -(p - q) * q**R
    return _ascending_to_descending(c)


def speed_L1(params: Params) -> SpeedResult:
    if params.L != 1:
        raise PreconditionViolated(f"speed_L1 needs L = 1, got L={params.L}")
    a = alpha(params)
    if a <= 0.5:
        raise PreconditionViolated(f"speed_L1 needs alpha > 1/2, got {a}")
    coeffs = reduced_speed_polynomial_L1(params)

    def f(t: float) -> float:
        return horner(coeffs, t)

    def df(t: float) -> float:
        return horner_with_derivative(coeffs, t)[1]

    t = bracketed_newton(f, df, 1.0 - params.q, 1.0)
    return SpeedResult(
        speed=(1.0 - t) / (1.0 + t),
        method=SpeedMethod.L1_POLYNOMIAL,
        gamma=(1.0 + t) / (1.0 - t),
        t_star=t,
    )


def _check_densities(d: Sequence, L: int) -> np.ndarray:
    if len(d) != L + 1:
        raise PreconditionViolated(f"need L+1 = {L + 1} densities, got {len(d)}")
    if any(x < 0 for x in d):
        raise PreconditionViolated("densities must be nonnegative")
    total = sum(d)
    if isinstance(total, Fraction) and total != 1 or abs(float(total) - 1.0) > 1e-12:
        raise PreconditionViolated(f"densities must sum to 1, got {total}")
    return np.array([float(x) for x in d])


def speed_R1_coefficients(params: Params) -> np.ndarray:
    """Expected visit counts a_0..a_L attached to (p,0), ..., (p,L-1) and q-sites."""
    p, q, L = params.p, params.q, params.L
    c = p / q - 1.0
    a0 = (1.0 + c * (1.0 - p) ** L) / ((2.0 * p - 1.0) - c * (1.0 - p) ** L)
    a = [a0]
    for i in range(1, L + 1):
        w = (1.0 - p) ** (L - i)
        a.append((1.0 + c * w) / p + ((1.0 - p) + c * w) / p * a0)
    return np.array(a)


def speed_R1(params: Params, d: Sequence) -> SpeedResult:
    if params.R != 1:
        raise PreconditionViolated(f"speed_R1 needs R = 1, got R={params.R}")
    a_ = alpha(params)
    if a_ <= 0.5:
        raise PreconditionViolated(f"speed_R1 needs alpha > 1/2, got {a_}")
    dv = _check_densities(d, params.L)
    a = speed_R1_coefficients(params)
    gamma = float(a @ dv)
    return SpeedResult(1.0 / gamma, SpeedMethod.R1_LINEAR_SYSTEM, gamma, a=tuple(float(x) for x in a))


def speed_R1_residual(params: Params, a: Sequence[float]) -> float:
    """Max residual of the first-step equations satisfied by a_0..a_L."""
    p, q, L = params.p, params.q, params.L
    res = [abs(a[i] - (p + (1.0 - p) * (1.0 + a[0] + a[i + 1]))) for i in range(L)]
    res.append(abs(a[L] - (q + (1.0 - q) * (1.0 + a[0] + a[L]))))
    return max(res)


def speed_RL1_closed(p: float, q: float, d: float) -> float:
    """Speed for R = L = 1 when a fraction d of the right tail is in (p,0)."""
    return (p + q - 1.0) / (1.0 + (1.0 - 2.0 * d) * (p - q))


def ballistic_speed(spec: EnvironmentSpec, params: Params) -> tuple[float, SpeedResult]:
    """Signed asymptotic speed for the cases with a closed form.

    Left-transient parameters are handled through the reflection x -> -x.
    """
    a = alpha(params)
    if abs(a - 0.5) <= CRITICAL_TOL:
        raise WithinCriticalTolerance("no closed-form speed at criticality")
    sign = 1.0
    if a < 0.5:
        spec, params, sign = spec.mirrored(), params.mirrored(), -1.0
    if params.R == 1:
        from .environment import densities

        res = speed_R1(params, densities(spec, params))
        if params.L == 1:
            d0 = float(densities(spec, params)[0])
            res = SpeedResult(
                speed_RL1_closed(params.p, params.q, d0), SpeedMethod.R1L1_CLOSED, res.gamma, a=res.a
            )
        return sign * res.speed, res
    if params.L == 1:
        if not (isinstance(spec.right_tail, Constant) and spec.right_tail.config == Q(0)):
            raise PreconditionViolated("the L = 1 speed formula needs a (q,0) right tail")
        res = speed_L1(params)
        return sign * res.speed, res
    raise PreconditionViolated("closed-form speed needs R = 1 or L = 1")


# ---------------------------------------------------------------------------
# session moments


def mean_S(params: Params, i: int) -> float:
    """Mean number of right jumps in one session started from (q, i); i = R means (p, 0)."""
    p, q, R = params.p, params.q, params.R
    if not 0 <= i <= R:
        raise ValueError(f"session index must be in 0..{R}, got {i}")
    m = R - i
    qm = q**m
    return (q - m * qm + (m - 1) * qm * q) / (1.0 - q) + qm * (m + p / (1.0 - p))


def second_moment_S(params: Params, i: int) -> float:
    p, q, R = params.p, params.q, params.R
    if not 0 <= i <= R:
        raise ValueError(f"session index must be in 0..{R}, got {i}")
    m = R - i
    qm = q**m
    c1 = 2 * m * m - 2 * m - 1
    c2 = (m - 1) ** 2
    head = (q + q * q - qm * (m * m - c1 * q + c2 * q * q)) / (1.0 - q) ** 2
    tail = qm * (m * m - c1 * p + c2 * p * p) / (1.0 - p) ** 2
    return head + tail


def second_moment_S0(params: Params) -> float:
    return second_moment_S(params, 0)


def mean_S_critical_L1(q: float, R: int, i: int) -> float:
    """Session mean with p eliminated through the L = 1 critical point."""
    return (1.0 - 2.0 * q + q ** (i + 1)) / (q**i * (1.0 - q))


def second_moment_S0_critical_L1(q: float, R: int) -> float:
    num = (
        2.0
        - 8.0 * q
        + 8.0 * q * q
        + (2 * R + 1) * q**R
        + (2 - 6 * R) * q ** (R + 1)
        + (4 * R - 5) * q ** (R + 2)
    )
    return num / (q**R * (1.0 - q) ** 2)


# ---------------------------------------------------------------------------
# critical-case polynomials


def poly_P_Ri_coeffs(R: int, i: int) -> list[float]:
    if R < 2 or not 1 <= i <= R:
        raise ValueError(f"need R >= 2 and 1 <= i <= R, got R={R}, i={i}")
    c = np.zeros(R + 3)
    c[R + 2] += 2 * R - 1
    c[R + 1] -= 3 * R + 1
    c[R] += R + 1
    c[R + 2 - i] -= 2
    c[R + 1 - i] += 3
    c[R - i] -= 1
    c[0] += 1
    c[1] -= 4
    c[2] += 4
    return _ascending_to_descending(c)


def poly_P_Ri(q: float, R: int, i: int) -> float:
    return horner(poly_P_Ri_coeffs(R, i), q)


def poly_P_RR(q: float, R: int) -> float:
    return poly_P_Ri(q, R, R)


def poly_P_tilde(q: float, R: int) -> float:
    c = np.zeros(max(R - 1, 1) + 1)
    c[0] = -1.0
    for j in range(1, R - 2):
        c[j + 1] += j
    c[R - 1] += 2 * R - 1
    return horner(_ascending_to_descending(c), q)


def poly_P_RR_factored(q: float, R: int) -> float:
    return q * (1.0 - q) ** 2 * poly_P_tilde(q, R)


def q_star(R: int) -> float:
    """Unique zero in (0, 1/2) of the reduced (p,0)-tail polynomial."""
    if R < 2:
        raise ValueError("q_star needs R >= 2")
    return bisect(lambda q: poly_P_tilde(q, R), 0.0, 0.5)


def negativity_window(R: int, i: int, lo: float = 0.0, hi: float = 1.0, grid: int = 2000) -> list[tuple[float, float]]:
    """Maximal subintervals of (lo, hi) on which P_{R,i} is negative."""

    def f(q: float) -> float:
        return poly_P_Ri(q, R, i)

    qs = np.linspace(lo, hi, grid + 1)[1:-1]
    vals = np.array([f(q) for q in qs])
    out = []
    start = None
    for k in range(len(qs)):
        if vals[k] < 0 and start is None:
            start = bisect(f, float(qs[k - 1]), float(qs[k])) if k > 0 else lo
        if vals[k] >= 0 and start is not None:
            out.append((start, bisect(f, float(qs[k - 1]), float(qs[k]))))
            start = None
    if start is not None:
        out.append((start, hi))
    return out


def poly_Q_k(q: float, k: int) -> float:
    return (1.0 - 2.0 * q) ** 2 - q**k + 3.0 * q ** (k + 1) - 2.0 * q ** (k + 2)


def a_k_root(k: int) -> float:
    """Zero in (0, 1/2) of 2q - 1 + q^k - q^(k+1), the sign switch of Q_k below 1/2."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return bisect(lambda q: 2.0 * q - 1.0 + q**k - q ** (k + 1), 0.0, 0.5)


# ---------------------------------------------------------------------------
# theta values


def _theta_L1_denominator(q: float, R: int) -> float:
    return (
        1.0
        - 4.0 * q
        + 4.0 * q * q
        + R * q**R
        + (2 - 3 * R) * q ** (R + 1)
        + (2 * R - 3) * q ** (R + 2)
    )


def theta_L1(q: float, R: int, i: int) -> float:
    """Drift-to-variance ratio for L = 1 at criticality with right tail (q,i), or (p,0) if i = R."""
    if not 0 <= i <= R:
        raise ValueError(f"i must be in 0..{R}")
    num = q ** (R - i) * (1.0 - q) * (1.0 - 2.0 * q - q**i + 2.0 * q ** (i + 1))
    return num / _theta_L1_denominator(q, R)


def theta_L1_from_moments(q: float, R: int, i: int) -> float:
    """Same quantity rebuilt from the session moments at p = p0(q, R, 1)."""
    params = Params(critical_p0(q, R, 1), q, R, 1)
    rho = mean_S(params, i) - 1.0
    nu = second_moment_S0(params) - 1.0
    return 2.0 * rho / nu


def theta_RL2(q: float) -> tuple[float, float, float, float]:
    """Ratios for R = L = 2, p = 1 - q, for tails (p,0), (p,1), (q,0), (q,1)."""
    den = (1.0 - q) * (1.0 - q + q * q)
    return (
        (1.0 - 2.0 * q) * (1.0 + q + q * q) / den,
        (1.0 - 2.0 * q) / den,
        (2.0 * q - 1.0) * q / den,
        q * q * (1.0 - 2.0 * q) / den,
    )


def q1_star() -> float:
    return (math.sqrt(13.0) - 3.0) / 2.0


def q2_star() -> float:
    return bisect(lambda q: q**3 + q - 1.0, 0.0, 1.0)


# ---------------------------------------------------------------------------
# critical classifiers


def _as_constant(pattern: Union[ConfigPattern, SiteConfig]) -> Optional[SiteConfig]:
    if isinstance(pattern, SiteConfig):
        return pattern
    if isinstance(pattern, Constant):
        return pattern.config
    if len(set(pattern.configs)) == 1:
        return pattern.configs[0]
    return None


def _sign_rule(q: float, R: int, i: int, rule: str, certs: dict) -> Classification:
    val = poly_P_Ri(q, R, i)
    certs = dict(certs, P_Ri=val, theta=theta_L1(q, R, i), i=float(i))
    if abs(val) <= ZERO_TOL:
        certs["P_Ri_zero_within_tol"] = True
        val = 0.0
    verdict = Verdict.RECURRENT if val >= 0.0 else Verdict.TRANSIENT_RIGHT
    return Classification(verdict, rule, certs)


def classify_critical_L1(
    params: Params,
    right_tail: Union[ConfigPattern, SiteConfig],
    left_tail: Union[ConfigPattern, SiteConfig],
) -> Classification:
    if params.L != 1 or params.R < 2:
        raise PreconditionViolated(f"needs L = 1 and R >= 2, got R={params.R}, L={params.L}")
    a = alpha(params)
    if abs(a - 0.5) > CRITICAL_TOL:
        raise PreconditionViolated(f"parameters are not critical: alpha={a}")
    q, R = params.q, params.R
    certs = {"alpha": a, "p0": critical_p0(q, R, 1)}
    negative = params.p < params.q
    if negative and _as_constant(left_tail) is None:
        raise MissingConstantTail("negative feedback needs a constant left tail")
    right = _as_constant(right_tail)
    if right is not None:
        if right == Q(0):
            return Classification(Verdict.RECURRENT, "Thm8.i", dict(certs, theta=0.0))
        if right.mode is Mode.Q:
            return _sign_rule(q, R, right.charges, "Thm8.ii", certs)
        return _sign_rule(q, R, R, "Thm8.iii", certs)
    if negative:
        return Classification(Verdict.UNKNOWN, "none", dict(certs, reason="non-constant right tail"))
    best = _sign_rule(q, R, R, "Thm8.iii", certs)
    if best.verdict is Verdict.RECURRENT:
        return Classification(Verdict.RECURRENT, "Thm8.Rem1", best.certificates)
    return Classification(
        Verdict.UNKNOWN, "none", dict(best.certificates, reason="(p,0) tail is transient; domination inconclusive")
    )


class TailClass(enum.Enum):
    IS_P0 = "IsP0"
    IS_Q0 = "IsQ0"
    NEVER_P0 = "NeverP0"
    NEVER_Q0 = "NeverQ0"
    CONSTANT_OTHER = "ConstantOther"


# (is (p,0) eventually, is (q,0) eventually); None means not determined by the class
_TAIL_FACTS = {
    TailClass.IS_P0: (True, False),
    TailClass.IS_Q0: (False, True),
    TailClass.NEVER_P0: (False, None),
    TailClass.NEVER_Q0: (None, False),
    TailClass.CONSTANT_OTHER: (False, False),
}

_CASE = {
    (True, False): (Verdict.TRANSIENT_RIGHT, "a"),
    (False, True): (Verdict.TRANSIENT_LEFT, "b"),
    (False, False): (Verdict.RECURRENT, "c"),
    (True, True): (Verdict.MIXED_TRANSIENT, "d"),
}


def tail_class(pattern: ConfigPattern) -> Optional[TailClass]:
    """Most specific class of a tail pattern, or None if it meets both (p,0) and (q,0)."""
    c = _as_constant(pattern)
    if c == P(0):
        return TailClass.IS_P0
    if c == Q(0):
        return TailClass.IS_Q0
    if c is not None:
        return TailClass.CONSTANT_OTHER
    if P(0) not in pattern.configs:
        return TailClass.NEVER_P0
    if Q(0) not in pattern.configs:
        return TailClass.NEVER_Q0
    return None


def classify_RL2(
    q: float,
    right: Union[TailClass, str],
    left: Union[TailClass, str],
    *,
    constant_tails: bool = True,
) -> Classification:
    right, left = TailClass(right), TailClass(left)
    if not 0.0 < q < 1.0:
        raise PreconditionViolated(f"q must lie in (0, 1), got {q}")
    q1, q2 = q1_star(), q2_star()
    th = theta_RL2(q)
    certs = {
        "q1_star": q1,
        "q2_star": q2,
        "theta_p0": th[0],
        "theta_p1": th[1],
        "theta_q0": th[2],
        "theta_q1": th[3],
    }
    if q > 0.5 and not constant_tails:
        raise MissingConstantTail("negative feedback needs constant tails at both ends")
    if q1 <= q <= q2:
        return Classification(Verdict.RECURRENT, "Thm9.iii", certs)
    if q < q1:
        key = (_TAIL_FACTS[right][0], _TAIL_FACTS[left][1])
        part = "i"
    else:
        key = (_TAIL_FACTS[right][1], _TAIL_FACTS[left][0])
        part = "ii"
    if None in key:
        needed = ("(p,0)", "(q,0)") if part == "i" else ("(q,0)", "(p,0)")
        raise AmbiguousTailClass(
            f"at q={q} the right tail must be classified against {needed[0]} "
            f"and the left tail against {needed[1]}; got {right.value}, {left.value}"
        )
    verdict, letter = _CASE[key]
    return Classification(verdict, f"Thm9.{part}.{letter}", certs)


def classify_critical_RL1(q: float) -> Classification:
    return Classification(
        Verdict.RECURRENT,
        "Cor1",
        {"q": q, "p": 1.0 - q, "needs_constant_tails": q > 0.5},
    )


def _flip(v: Verdict) -> Verdict:
    return {
        Verdict.TRANSIENT_RIGHT: Verdict.TRANSIENT_LEFT,
        Verdict.TRANSIENT_LEFT: Verdict.TRANSIENT_RIGHT,
    }.get(v, v)


def classify(spec: EnvironmentSpec, params: Params, tol: float = CRITICAL_TOL) -> Classification:
    """Apply whichever rule covers (params, tails); Unknown when none does."""
    a = alpha(params)
    if abs(a - 0.5) > tol:
        return classify_noncritical(params, tol)
    p, q, R, L = params.p, params.q, params.R, params.L
    both_constant = isinstance(spec.left_tail, Constant) and isinstance(spec.right_tail, Constant)
    if R == 1 and L == 1:
        if q > 0.5 and not both_constant:
            return Classification(Verdict.UNKNOWN, "none", {"alpha": a, "reason": "needs constant tails"})
        return classify_critical_RL1(q)
    if L == 1:
        try:
            return classify_critical_L1(params, spec.right_tail, spec.left_tail)
        except MissingConstantTail as exc:
            return Classification(Verdict.UNKNOWN, "none", {"alpha": a, "reason": str(exc)})
    if R == 1:
        m = spec.mirrored()
        try:
            c = classify_critical_L1(params.mirrored(), m.right_tail, m.left_tail)
        except (MissingConstantTail, PreconditionViolated) as exc:
            return Classification(Verdict.UNKNOWN, "none", {"alpha": a, "reason": str(exc)})
        return Classification(_flip(c.verdict), c.rule + ".mirror", c.certificates)
    if R == 2 and L == 2 and abs(p - (1.0 - q)) <= 1e-12:
        rc, lc = tail_class(spec.right_tail), tail_class(spec.left_tail)
        if rc is not None and lc is not None:
            try:
                return classify_RL2(q, rc, lc, constant_tails=both_constant)
            except (AmbiguousTailClass, MissingConstantTail) as exc:
                return Classification(Verdict.UNKNOWN, "none", {"alpha": a, "reason": str(exc)})
    if q < p and _as_constant(spec.right_tail) == Q(0) and _as_constant(spec.left_tail) == P(0):
        return Classification(Verdict.RECURRENT, "Thm6", {"alpha": a})
    return Classification(Verdict.UNKNOWN, "none", {"alpha": a, "reason": "no implemented rule covers this case"})
