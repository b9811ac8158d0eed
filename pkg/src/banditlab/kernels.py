"""Compiled inner loops for long-horizon trials.

These kernels replicate, step for step, the pure-Python policy state
machines in :mod:`banditlab.policies`; a unit test keeps the two routes in
lockstep on shared streams. Rewards arrive as pre-generated per-arm buffers
(arm ``i``'s ``k``-th pull is ``rewards[i, k]``), and tie-breaks consume one
uniform from ``tie_u`` per tie event, exactly like the Python route.
"""

from __future__ import annotations

import numpy as np
from numba import njit

# Resumption codes for the fixed-confidence kernel.
RUN_STOPPED = 0
RUN_CAP = 1
RUN_REWARDS_EXHAUSTED = 2
RUN_TIES_EXHAUSTED = 3


@njit(cache=True)
def _tie_argmax(values, tie_u, tie_ptr):
    """Argmax with uniform tie-breaking; returns (arm, new_ptr, ok)."""
    L = values.shape[0]
    best = values[0]
    for i in range(1, L):
        if values[i] > best:
            best = values[i]
    ties = 0
    first = -1
    for i in range(L):
        if values[i] == best:
            if first < 0:
                first = i
            ties += 1
    if ties == 1:
        return first, tie_ptr, True
    if tie_ptr >= tie_u.shape[0]:
        return -1, tie_ptr, False
    k = int(tie_u[tie_ptr] * ties)
    tie_ptr += 1
    seen = 0
    for i in range(L):
        if values[i] == best:
            if seen == k:
                return i, tie_ptr, True
            seen += 1
    return first, tie_ptr, True


@njit(cache=True)
def bobw_trial(rewards, tie_u, T, sigma, eps, beta, gamma, check_means, do_check):
    """Full fixed-budget run of the iterated-logarithm index policy.

    Returns pull counts, reward sums, and (when ``do_check``) whether any
    empirical mean ever left its confidence radius around ``check_means``.
    """
    L = rewards.shape[0]
    N = np.zeros(L, dtype=np.int64)
    s = np.zeros(L, dtype=np.float64)
    U = np.empty(L, dtype=np.float64)
    tie_ptr = 0
    violated = False
    for i in range(L):
        r = rewards[i, 0]
        N[i] = 1
        s[i] = r
        arg = np.log(beta + (1.0 + eps) * 1) / gamma
        rad = (
            5.0
            * sigma
            * (1.0 + np.sqrt(eps))
            * np.sqrt(2.0 * (1.0 + eps) / 1 * np.log(arg))
        )
        mean = s[i] / 1
        U[i] = mean + rad
        if do_check and abs(mean - check_means[i]) > rad:
            violated = True
    for t in range(L, T):
        a, tie_ptr, ok = _tie_argmax(U, tie_u, tie_ptr)
        r = rewards[a, N[a]]
        N[a] += 1
        s[a] += r
        n = N[a]
        arg = np.log(beta + (1.0 + eps) * n) / gamma
        rad = (
            5.0
            * sigma
            * (1.0 + np.sqrt(eps))
            * np.sqrt(2.0 * (1.0 + eps) / n * np.log(arg))
        )
        mean = s[a] / n
        U[a] = mean + rad
        if do_check and abs(mean - check_means[a]) > rad:
            violated = True
    return N, s, violated


@njit(cache=True)
def ucbe_trial(rewards, tie_u, T, a_param):
    """Full fixed-budget run of the fixed-exploration index policy."""
    L = rewards.shape[0]
    N = np.zeros(L, dtype=np.int64)
    s = np.zeros(L, dtype=np.float64)
    U = np.empty(L, dtype=np.float64)
    tie_ptr = 0
    for i in range(L):
        r = rewards[i, 0]
        N[i] = 1
        s[i] = r
        U[i] = s[i] / 1 + np.sqrt(a_param / 1)
    for t in range(L, T):
        a, tie_ptr, ok = _tie_argmax(U, tie_u, tie_ptr)
        r = rewards[a, N[a]]
        N[a] += 1
        s[a] += r
        U[a] = s[a] / N[a] + np.sqrt(a_param / N[a])
    return N, s


@njit(cache=True)
def ucbalpha_trial(rewards, ptr, tie_u, tie_ptr_box, N, s, t_box, alpha, delta, cap):
    """Resumable fixed-confidence run of the stopping UCB policy.

    Mutates the state arrays in place and returns a resumption code:
    stopped, cap reached, some arm's reward buffer exhausted (its index is
    written to ``t_box[1]``), or the tie buffer exhausted.
    """
    L = rewards.shape[0]
    W = rewards.shape[1]
    t = t_box[0]
    tie_ptr = tie_ptr_box[0]
    U = np.empty(L, dtype=np.float64)
    while t < cap:
        if t < L:
            a = t
        else:
            tmax = t if t > 2 else 2
            for i in range(L):
                U[i] = s[i] / N[i] + np.sqrt(alpha * np.log(tmax) / (2.0 * N[i]))
            a, tie_ptr, ok = _tie_argmax(U, tie_u, tie_ptr)
            if not ok:
                t_box[0] = t
                tie_ptr_box[0] = tie_ptr
                return RUN_TIES_EXHAUSTED
        if ptr[a] >= W:
            t_box[0] = t
            t_box[1] = a
            tie_ptr_box[0] = tie_ptr
            return RUN_REWARDS_EXHAUSTED
        r = rewards[a, ptr[a]]
        ptr[a] += 1
        N[a] += 1
        s[a] += r
        t += 1
        if t >= L:
            tmax = t if t > 2 else 2
            thresh = np.log(2.0 * L * tmax * tmax / delta)
            b = 0
            bmean = s[0] / N[0]
            for i in range(1, L):
                m = s[i] / N[i]
                if m > bmean:
                    bmean = m
                    b = i
            lower = bmean - np.sqrt(thresh / (2.0 * N[b]))
            highest = -np.inf
            for i in range(L):
                if i == b:
                    continue
                up = s[i] / N[i] + np.sqrt(thresh / (2.0 * N[i]))
                if up > highest:
                    highest = up
            if L == 1 or lower >= highest:
                t_box[0] = t
                tie_ptr_box[0] = tie_ptr
                return RUN_STOPPED
    t_box[0] = t
    tie_ptr_box[0] = tie_ptr
    return RUN_CAP
