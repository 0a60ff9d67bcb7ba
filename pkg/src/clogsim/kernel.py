"""Throughput kernel: the collapsed-excursion run loop, jit-compiled.

This is the same algorithm as composing
:func:`clogsim.engine.run_particle_fast` with
:func:`clogsim.model.apply_freeze`, draw for draw: both consume one
splitmix64 stream with the documented schema, so for a given run seed
the kernel and the pure-Python loop produce bit-identical results
(pinned by tests).  The kernel exists purely for speed; per-site
capacity sweeps run millions of particles per run at larger n.

``nogil`` lets the harness parallelise runs with plain threads.
"""
from __future__ import annotations

from typing import Optional, Tuple

import numpy as np
from numba import boolean, float64, int64, njit, uint64

from .model import ClusterState, ModelParams, init_cluster, resolve_budget

_EMPTY_I64 = np.empty(0, dtype=np.int64)
_EMPTY_U8 = np.empty(0, dtype=np.uint8)


@njit(cache=True, nogil=True)
def _mix64(state):
    z = state
    z = (z ^ (z >> uint64(30))) * uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> uint64(27))) * uint64(0x94D049BB133111EB)
    return z ^ (z >> uint64(31))


@njit(cache=True, nogil=True)
def _next_uniform(state):
    state = state + uint64(0x9E3779B97F4A7C15)
    z = _mix64(state)
    return state, float64(z >> uint64(11)) * (2.0**-53)


@njit(cache=True, nogil=True)
def _pow_int(base, exponent):
    # Binary exponentiation; same float op sequence as rng.pow_int.
    result = 1.0
    b = base
    e = exponent
    while e > 0:
        if e & 1:
            result *= b
        b *= b
        e >>= 1
    return result


@njit(cache=True, nogil=True)
def _rng_selftest(seed, k):
    out = np.empty(k, dtype=np.float64)
    state = seed
    for i in range(k):
        state, u = _next_uniform(state)
        out[i] = u
    return out


@njit(cache=True, nogil=True)
def _run_loop(
    counts_init,
    rightmost0,
    capacity,
    p_left,
    stop_on_blockage,
    first_index,
    max_arrivals,
    seed,
    blockage0,
    log_sites,
    log_upon,
    log_mins,
    do_log,
):
    size = 64
    while size < rightmost0 + 2:
        size *= 2
    counts = np.zeros(size, dtype=np.int64)
    counts[: rightmost0 + 1] = counts_init
    rightmost = rightmost0
    blockage = blockage0
    state = seed
    arrivals = 0
    escaped = 0
    j = first_index

    if p_left < 0.5:
        ratio_right = p_left / (1.0 - p_left)
    else:
        ratio_right = 1.0
    if p_left > 0.5:
        ratio_left = (1.0 - p_left) / p_left
    else:
        ratio_left = 1.0

    while arrivals < max_arrivals:
        if blockage >= 0 and stop_on_blockage:
            break
        entry = rightmost + 1
        site = int64(-9)
        upon = False
        minrec = entry + 1

        if ratio_right < 1.0 and j + 1 > entry:
            state, u = _next_uniform(state)
            if u >= _pow_int(ratio_right, j + 1 - entry):
                site = int64(-1)  # escaped during the approach

        if site == int64(-9):
            pos = entry
            min_before = entry + 1
            while True:
                if pos >= 1:
                    c = counts[pos - 1]
                    if c > 0 and pos <= rightmost and counts[pos] >= capacity:
                        c = int64(0)  # target full: freeze suppressed
                else:
                    c = int64(0)
                state, u = _next_uniform(state)
                freeze_p = c / capacity
                if u < freeze_p:
                    site = pos
                    upon = pos < min_before
                    if pos < min_before:
                        minrec = pos
                    else:
                        minrec = min_before
                    break
                if u < freeze_p + (1.0 - freeze_p) * p_left:
                    if pos == 0:
                        min_before = -1
                        if ratio_left < 1.0:
                            state, u2 = _next_uniform(state)
                            if u2 >= ratio_left:
                                site = int64(-1)
                                minrec = -1
                                break
                    else:
                        if pos < min_before:
                            min_before = pos
                        pos -= 1
                else:
                    if pos == entry:
                        if pos < min_before:
                            min_before = pos
                        if ratio_right < 1.0:
                            state, u2 = _next_uniform(state)
                            if u2 >= ratio_right:
                                site = int64(-1)
                                minrec = min_before
                                break
                    else:
                        if pos < min_before:
                            min_before = pos
                        pos += 1

        if do_log:
            log_sites[arrivals] = site
            log_upon[arrivals] = uint64(1) if upon else uint64(0)
            log_mins[arrivals] = minrec
        arrivals += 1
        if site >= 0:
            if site + 2 > counts.shape[0]:
                grown = np.zeros(counts.shape[0] * 2, dtype=np.int64)
                grown[: counts.shape[0]] = counts
                counts = grown
            if site > rightmost + 1:
                raise ValueError("frontier advanced by more than one site")
            counts[site] += 1
            if site > rightmost:
                rightmost = site
            if counts[site] == capacity:
                if blockage < 0 or site < blockage:
                    blockage = site
        else:
            escaped += 1
        j += 1

    return blockage, arrivals, escaped, rightmost, counts[: rightmost + 1].copy()


def run_cluster_kernel(
    params: ModelParams,
    seed: int,
    log: bool = False,
    max_arrivals: Optional[int] = None,
) -> Tuple[ClusterState, int, int, Optional[np.ndarray], Optional[np.ndarray], Optional[np.ndarray]]:
    """Run one seeded process to saturation or budget exhaustion.

    Returns (final cluster, arrivals_used, escaped_count, sites, upon,
    mins); the last three are per-arrival logs (site -1 = escaped) or
    None when ``log`` is off.
    """
    start = init_cluster(params)
    budget = resolve_budget(params) if max_arrivals is None else max_arrivals
    if log:
        log_sites = np.zeros(budget, dtype=np.int64)
        log_upon = np.zeros(budget, dtype=np.uint8)
        log_mins = np.zeros(budget, dtype=np.int64)
    else:
        log_sites, log_upon, log_mins = _EMPTY_I64, _EMPTY_U8, _EMPTY_I64
    blockage0 = -1 if start.blockage_site is None else start.blockage_site
    blockage, arrivals, escaped, rightmost, counts = _run_loop(
        np.asarray(start.counts, dtype=np.int64),
        start.rightmost,
        params.n,
        params.left_step_prob,
        params.stop_on_blockage,
        params.first_arrival_index,
        budget,
        np.uint64(seed),
        blockage0,
        log_sites,
        log_upon,
        log_mins,
        log,
    )
    cluster = ClusterState(
        counts=[int(c) for c in counts],
        rightmost=int(rightmost),
        particles_placed=start.particles_placed + int(arrivals) - int(escaped),
        capacity=params.n,
        blockage_site=None if blockage < 0 else int(blockage),
    )
    if log:
        return (
            cluster,
            int(arrivals),
            int(escaped),
            log_sites[:arrivals],
            log_upon[:arrivals],
            log_mins[:arrivals],
        )
    return cluster, int(arrivals), int(escaped), None, None, None


def rng_selftest(seed: int, k: int) -> np.ndarray:
    """Kernel-side uniforms for the bit-identity test against SplitMix64."""
    return _rng_selftest(np.uint64(seed), k)
