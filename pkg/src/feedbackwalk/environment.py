"""Single-site configurations, the charge-update automaton and initial environments.

A site is either in the p-mode or the q-mode and carries a number of charges
toward the opposite mode. ``R`` consecutive right jumps from a q-site switch it
to the p-mode, ``L`` consecutive left jumps from a p-site switch it to the
q-mode.

Configurations are written as tokens ``p<i>`` / ``q<i>``. Simulation kernels
work on integer codes: ``(p, i) -> i`` and ``(q, i) -> L + i``, which is also
the state order used for every transition matrix.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence, Union

import numpy as np

from .errors import ChargeOutOfRange, InvalidEnvironment

RIGHT = 1
LEFT = -1


class Mode(enum.Enum):
    P = "p"
    Q = "q"


@dataclass(frozen=True)
class SiteConfig:
    mode: Mode
    charges: int = 0

    def __post_init__(self):
        if self.charges < 0:
            raise ChargeOutOfRange(f"negative charge count {self.charges}")

    @property
    def token(self) -> str:
        return f"{self.mode.value}{self.charges}"

    @classmethod
    def from_token(cls, token: str) -> "SiteConfig":
        m = re.fullmatch(r"\s*([pq])(\d+)\s*", token)
        if m is None:
            raise InvalidEnvironment(f"bad configuration token {token!r}")
        return cls(Mode(m.group(1)), int(m.group(2)))

    def __str__(self) -> str:
        return self.token


def P(i: int = 0) -> SiteConfig:
    return SiteConfig(Mode.P, i)


def Q(i: int = 0) -> SiteConfig:
    return SiteConfig(Mode.Q, i)


@dataclass(frozen=True)
class Params:
    p: float
    q: float
    R: int = 1
    L: int = 1

    def __post_init__(self):
        if not (0.0 < self.p < 1.0 and 0.0 < self.q < 1.0):
            raise ValueError(f"p and q must lie in (0, 1), got p={self.p}, q={self.q}")
        if int(self.R) != self.R or int(self.L) != self.L or self.R < 1 or self.L < 1:
            raise ValueError(f"R and L must be positive integers, got R={self.R}, L={self.L}")

    @property
    def n_configs(self) -> int:
        return self.L + self.R

    def configs(self) -> list[SiteConfig]:
        """All configurations in matrix order: (p,0..L-1) then (q,0..R-1)."""
        return [P(i) for i in range(self.L)] + [Q(i) for i in range(self.R)]

    def labels(self) -> list[str]:
        return [c.token for c in self.configs()]

    def code(self, config: SiteConfig) -> int:
        validate_config(config, self)
        return config.charges if config.mode is Mode.P else self.L + config.charges

    def decode(self, code: int) -> SiteConfig:
        code = int(code)
        return P(code) if code < self.L else Q(code - self.L)

    def mirrored(self) -> "Params":
        """Parameters of the reflected walk x -> -x: (1-q, 1-p, L, R)."""
        return Params(1.0 - self.q, 1.0 - self.p, self.L, self.R)

    def as_dict(self) -> dict:
        return {"p": self.p, "q": self.q, "R": self.R, "L": self.L}


def validate_config(config: SiteConfig, params: Params) -> SiteConfig:
    limit = params.L if config.mode is Mode.P else params.R
    if config.charges >= limit:
        raise ChargeOutOfRange(
            f"{config.token} invalid: {config.mode.value}-charges must be <= {limit - 1}"
        )
    return config


def make_config(mode: Union[Mode, str], charges: int, params: Params) -> SiteConfig:
    return validate_config(SiteConfig(Mode(mode), int(charges)), params)


def update_config(config: SiteConfig, jump: int, params: Params) -> SiteConfig:
    """Configuration left behind at a site after the walk jumps from it."""
    if jump == RIGHT:
        if config.mode is Mode.P or config.charges == params.R - 1:
            return P(0)
        return Q(config.charges + 1)
    if jump == LEFT:
        if config.mode is Mode.Q or config.charges == params.L - 1:
            return Q(0)
        return P(config.charges + 1)
    raise ValueError(f"jump must be +1 or -1, got {jump!r}")


def jump_prob_right(config: SiteConfig, params: Params) -> float:
    return params.p if config.mode is Mode.P else params.q


def config_rank(config: SiteConfig, params: Params) -> int:
    """Position in the chain (q,0) < ... < (q,R-1) < (p,L-1) < ... < (p,0)."""
    if config.mode is Mode.Q:
        return config.charges
    return params.R + params.L - 1 - config.charges


def config_compare(a: SiteConfig, b: SiteConfig) -> int:
    """Three-way comparison (-1, 0, 1) in the domination order."""
    if a.mode is not b.mode:
        return -1 if a.mode is Mode.Q else 1
    if a.charges == b.charges:
        return 0
    less = a.charges < b.charges if a.mode is Mode.Q else a.charges > b.charges
    return -1 if less else 1


def transition_tables(params: Params) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-code right-jump probability and successor codes after a right/left jump."""
    configs = params.configs()
    prob = np.array([jump_prob_right(c, params) for c in configs], dtype=np.float64)
    nxt_r = np.array([params.code(update_config(c, RIGHT, params)) for c in configs], dtype=np.int64)
    nxt_l = np.array([params.code(update_config(c, LEFT, params)) for c in configs], dtype=np.int64)
    return prob, nxt_r, nxt_l


# ---------------------------------------------------------------------------
# Environments


@dataclass(frozen=True)
class Constant:
    config: SiteConfig

    @property
    def period(self) -> int:
        return 1

    @property
    def configs(self) -> tuple[SiteConfig, ...]:
        return (self.config,)

    def at(self, offset: int) -> SiteConfig:
        return self.config

    def to_dict(self) -> dict:
        return {"constant": self.config.token}


@dataclass(frozen=True)
class Periodic:
    configs: tuple[SiteConfig, ...]

    def __post_init__(self):
        object.__setattr__(self, "configs", tuple(self.configs))
        if not self.configs:
            raise InvalidEnvironment("periodic pattern must be nonempty")

    @property
    def period(self) -> int:
        return len(self.configs)

    def at(self, offset: int) -> SiteConfig:
        return self.configs[offset % len(self.configs)]

    def to_dict(self) -> dict:
        return {"periodic": [c.token for c in self.configs]}


ConfigPattern = Union[Constant, Periodic]


def pattern_from_dict(doc: Union[Mapping, str]) -> ConfigPattern:
    if isinstance(doc, str):
        return Constant(SiteConfig.from_token(doc))
    if "constant" in doc:
        return Constant(SiteConfig.from_token(doc["constant"]))
    if "periodic" in doc:
        return Periodic(tuple(SiteConfig.from_token(t) for t in doc["periodic"]))
    raise InvalidEnvironment(f"tail pattern needs 'constant' or 'periodic': {doc!r}")


@dataclass(frozen=True)
class EnvironmentSpec:
    """Initial environment: patterned tails plus finitely many overridden sites.

    The right tail covers ``x >= right_tail_start`` and is read at offset
    ``x - right_tail_start``; the left tail covers ``x <= left_tail_start`` and
    is read at offset ``left_tail_start - x``. Overrides must lie strictly
    between the two starts.
    """

    left_tail: ConfigPattern = field(default_factory=lambda: Constant(Q(0)))
    right_tail: ConfigPattern = field(default_factory=lambda: Constant(Q(0)))
    overrides: Mapping[int, SiteConfig] = field(default_factory=dict)
    left_tail_start: int = -1
    right_tail_start: int = 0

    def __post_init__(self):
        object.__setattr__(self, "overrides", {int(k): v for k, v in dict(self.overrides).items()})
        if self.left_tail_start >= self.right_tail_start:
            raise InvalidEnvironment("left_tail_start must be smaller than right_tail_start")
        for x in self.overrides:
            if not self.left_tail_start < x < self.right_tail_start:
                raise InvalidEnvironment(
                    f"override at {x} outside ({self.left_tail_start}, {self.right_tail_start})"
                )
        gap = set(range(self.left_tail_start + 1, self.right_tail_start)) - set(self.overrides)
        if gap:
            raise InvalidEnvironment(f"sites {sorted(gap)} are covered by neither a tail nor an override")

    @classmethod
    def constant(cls, config: SiteConfig) -> "EnvironmentSpec":
        return cls(Constant(config), Constant(config))

    @classmethod
    def with_overrides(
        cls,
        left_tail: ConfigPattern,
        right_tail: ConfigPattern,
        overrides: Mapping[int, SiteConfig],
    ) -> "EnvironmentSpec":
        """Replace finitely many sites of the environment whose tails start at -1 and 0.

        The tail starts are widened to enclose the overrides; the sites that
        fall inside the widened band keep the value of the base environment.
        """
        base = cls(left_tail, right_tail)
        if not overrides:
            return base
        lo = min(-1, min(overrides) - 1)
        hi = max(0, max(overrides) + 1)
        band = {x: overrides.get(x, base.lookup(x)) for x in range(lo + 1, hi)}
        return cls(left_tail, right_tail, band, lo, hi)

    def lookup(self, x: int) -> SiteConfig:
        if x in self.overrides:
            return self.overrides[x]
        if x >= self.right_tail_start:
            return self.right_tail.at(x - self.right_tail_start)
        return self.left_tail.at(self.left_tail_start - x)

    def validate(self, params: Params) -> "EnvironmentSpec":
        for c in (*self.left_tail.configs, *self.right_tail.configs, *self.overrides.values()):
            validate_config(c, params)
        return self

    def materialize(self, params: Params, lo: int, hi: int) -> np.ndarray:
        """Integer codes of sites ``lo..hi`` inclusive."""
        xs = np.arange(lo, hi + 1, dtype=np.int64)
        out = np.empty(xs.size, dtype=np.int64)
        right = xs >= self.right_tail_start
        rcodes = np.array([params.code(c) for c in self.right_tail.configs], dtype=np.int64)
        lcodes = np.array([params.code(c) for c in self.left_tail.configs], dtype=np.int64)
        out[right] = rcodes[(xs[right] - self.right_tail_start) % rcodes.size]
        out[~right] = lcodes[(self.left_tail_start - xs[~right]) % lcodes.size]
        for x, c in self.overrides.items():
            if lo <= x <= hi:
                out[x - lo] = params.code(c)
        return out

    def mirrored(self) -> "EnvironmentSpec":
        """Environment seen by the reflected walk: x -> -x with modes exchanged.

        A (q, i) site becomes a (p, i) site of the mirrored parameters and vice
        versa, see :meth:`Params.mirrored`.
        """

        def flip(c: SiteConfig) -> SiteConfig:
            return SiteConfig(Mode.P if c.mode is Mode.Q else Mode.Q, c.charges)

        def flip_pattern(pat: ConfigPattern) -> ConfigPattern:
            if isinstance(pat, Constant):
                return Constant(flip(pat.config))
            return Periodic(tuple(flip(c) for c in pat.configs))

        return EnvironmentSpec(
            left_tail=flip_pattern(self.right_tail),
            right_tail=flip_pattern(self.left_tail),
            overrides={-x: flip(c) for x, c in self.overrides.items()},
            left_tail_start=-self.right_tail_start,
            right_tail_start=-self.left_tail_start,
        )

    def to_dict(self) -> dict:
        return {
            "left_tail": self.left_tail.to_dict(),
            "right_tail": self.right_tail.to_dict(),
            "overrides": {str(x): c.token for x, c in sorted(self.overrides.items())},
            "left_tail_start": self.left_tail_start,
            "right_tail_start": self.right_tail_start,
        }

    @classmethod
    def from_dict(cls, doc: Mapping) -> "EnvironmentSpec":
        left = pattern_from_dict(doc.get("left_tail", {"constant": "q0"}))
        right = pattern_from_dict(doc.get("right_tail", {"constant": "q0"}))
        overrides = {int(x): SiteConfig.from_token(t) for x, t in doc.get("overrides", {}).items()}
        if "left_tail_start" in doc or "right_tail_start" in doc:
            return cls(
                left,
                right,
                overrides,
                int(doc.get("left_tail_start", -1)),
                int(doc.get("right_tail_start", 0)),
            )
        return cls.with_overrides(left, right, overrides)


def env_lookup(spec: EnvironmentSpec, x: int) -> SiteConfig:
    return spec.lookup(x)


def densities(spec: EnvironmentSpec, params: Params) -> list[Fraction]:
    """Exact right-tail frequencies d_0..d_L.

    ``d_i`` (i < L) is the density of (p, i) sites and ``d_L`` the density of
    all q-mode sites. Overrides are finitely many and do not contribute.
    """
    spec.validate(params)
    counts = [0] * (params.L + 1)
    configs: Sequence[SiteConfig] = spec.right_tail.configs
    for c in configs:
        counts[c.charges if c.mode is Mode.P else params.L] += 1
    return [Fraction(n, len(configs)) for n in counts]


def right_tail_is(spec: EnvironmentSpec, config: SiteConfig) -> bool:
    return isinstance(spec.right_tail, Constant) and spec.right_tail.config == config
