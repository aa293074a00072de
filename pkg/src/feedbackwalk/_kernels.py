"""Compiled inner loops.

Sites are handled through integer configuration codes and the lookup tables
built by :func:`feedbackwalk.environment.transition_tables`.

Per-site uniform streams for the jump-pattern construction come from a
counter-based SplitMix64 hash: the k-th uniform at site x depends only on
(seed, x, k), so jump sequences can be consumed in any order.
"""

from __future__ import annotations

import numpy as np
from numba import njit

STATUS_BUDGET = 0
STATUS_RIGHT = 1
STATUS_LEFT = 2
STATUS_GROW = 3

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_SITE_SALT = 0xD1B54A32D192ED03
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_INV53 = 1.0 / 9007199254740992.0


@njit(cache=True, nogil=True)
def _mix(z):
    z = np.uint64(z)
    z = z ^ (z >> np.uint64(30))
    z = z * np.uint64(_M1)
    z = z ^ (z >> np.uint64(27))
    z = z * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


@njit(cache=True, nogil=True)
def site_key(seed, x):
    zz = np.uint64((x << 1) ^ (x >> 63))
    return _mix(np.uint64(seed) ^ _mix(zz + np.uint64(_SITE_SALT)))


@njit(cache=True, nogil=True)
def site_uniform(key, k):
    z = _mix(np.uint64(key) + np.uint64(k + 1) * np.uint64(_GOLDEN))
    return float(z >> np.uint64(11)) * _INV53


def py_site_key(seed: int, x: int) -> int:
    """Pure-Python twin of :func:`site_key`, used as a test oracle."""

    def mix(z: int) -> int:
        z ^= z >> 30
        z = (z * _M1) & _MASK
        z ^= z >> 27
        z = (z * _M2) & _MASK
        return z ^ (z >> 31)

    zz = ((x << 1) ^ (x >> 63)) & _MASK
    return mix((seed & _MASK) ^ mix((zz + _SITE_SALT) & _MASK))


def py_site_uniform(key: int, k: int) -> float:
    z = (key + ((k + 1) * _GOLDEN)) & _MASK
    z ^= z >> 30
    z = (z * _M1) & _MASK
    z ^= z >> 27
    z = (z * _M2) & _MASK
    z ^= z >> 31
    return (z >> 11) * _INV53


@njit(cache=True, nogil=True)
def walk_kernel(
    codes,
    rights,
    lefts,
    first_hit,
    origin,
    pos,
    time,
    max_time,
    right_barrier,
    left_barrier,
    prob,
    nxt_r,
    nxt_l,
    rng,
    coupled,
    seed,
    traj,
    traj_start,
):
    """Advance the walk inside the window [origin, origin + len(codes)).

    Returns (status, pos, time). ``traj`` (if nonempty) receives the position
    after step n at index n - traj_start.
    """
    n = codes.shape[0]
    record = traj.shape[0] > 0
    while time < max_time:
        if pos >= right_barrier:
            return STATUS_RIGHT, pos, time
        if pos <= left_barrier:
            return STATUS_LEFT, pos, time
        i = pos - origin
        if i <= 0 or i >= n - 1:
            return STATUS_GROW, pos, time
        c = codes[i]
        if coupled:
            u = site_uniform(site_key(seed, pos), rights[i] + lefts[i])
        else:
            u = rng.random()
        if u <= prob[c]:
            codes[i] = nxt_r[c]
            rights[i] += 1
            pos += 1
        else:
            codes[i] = nxt_l[c]
            lefts[i] += 1
            pos -= 1
        time += 1
        j = pos - origin
        if first_hit[j] < 0:
            first_hit[j] = time
        if record:
            traj[time - traj_start] = pos
    if pos >= right_barrier:
        return STATUS_RIGHT, pos, time
    if pos <= left_barrier:
        return STATUS_LEFT, pos, time
    return STATUS_BUDGET, pos, time


@njit(cache=True, nogil=True)
def jumps_from_uniforms(code, prob, nxt_r, nxt_l, uniforms, out):
    """Jump sequence of one site chain driven by a given uniform stream."""
    c = code
    for k in range(uniforms.shape[0]):
        if uniforms[k] <= prob[c]:
            out[k] = 1
            c = nxt_r[c]
        else:
            out[k] = -1
            c = nxt_l[c]
    return c


@njit(cache=True, nogil=True)
def site_jumps(code, prob, nxt_r, nxt_l, seed, x, start, count, state_code, out):
    """Jumps J_{start+1..start+count} at site x, continuing from ``state_code``."""
    key = site_key(seed, x)
    c = state_code
    for k in range(count):
        if site_uniform(key, start + k) <= prob[c]:
            out[k] = 1
            c = nxt_r[c]
        else:
            out[k] = -1
            c = nxt_l[c]
    return c


@njit(cache=True, nogil=True)
def count_rights_before_lefts(code, prob, nxt_r, nxt_l, key, z_prev, cap):
    """Right jumps seen before the z_prev-th left jump; stops early once above cap."""
    c = code
    lefts = 0
    rights = 0
    k = 0
    while lefts < z_prev:
        if site_uniform(key, k) <= prob[c]:
            rights += 1
            c = nxt_r[c]
            if cap > 0 and rights > cap:
                return rights
        else:
            lefts += 1
            c = nxt_l[c]
        k += 1
    return rights


@njit(cache=True, nogil=True)
def right_jumps_kernel(site_codes, prob, nxt_r, nxt_l, seed, first_site, cap, out):
    """Z_x for x = first_site, first_site + 1, ... with Z_{first_site - 1} = 1.

    Returns the number of entries written: it stops after writing the first
    zero (extinction) or the first value above ``cap`` (cap <= 0 disables).
    """
    z = 1
    for j in range(site_codes.shape[0]):
        z = count_rights_before_lefts(
            site_codes[j], prob, nxt_r, nxt_l, site_key(seed, first_site + j), z, cap
        )
        out[j] = z
        if z == 0 or (cap > 0 and z > cap):
            return j + 1
    return site_codes.shape[0]


@njit(cache=True, nogil=True)
def count_lefts_before_rights(code, prob, nxt_r, nxt_l, key, needed):
    c = code
    rights = 0
    lefts = 0
    k = 0
    while rights < needed:
        if site_uniform(key, k) <= prob[c]:
            rights += 1
            c = nxt_r[c]
        else:
            lefts += 1
            c = nxt_l[c]
        k += 1
    return lefts


@njit(cache=True, nogil=True)
def left_jumps_kernel(code, prob, nxt_r, nxt_l, seed, n, out):
    """W_1..W_n with W_0 = 0; step k reads the jump sequence of site -k."""
    w = 0
    for k in range(n):
        w = count_lefts_before_rights(code, prob, nxt_r, nxt_l, site_key(seed, -(k + 1)), w + 1)
        out[k] = w
