"""Compiled hot loops: Gray-code enumeration, Metropolis annealing, tempering.

All kernels are deterministic given their inputs. Solver kernels carry their
own splitmix64 state, so results are reproducible for a fixed seed regardless
of thread count or global RNG state. Incrementally maintained energies and
local fields are rebuilt from scratch every 2^20 flips to bound drift.

Couplings enter either unscaled (``jmat``, enumeration kernels, energies in
units of J scaled by 1/sqrt(n) internally) or pre-scaled by 1/sqrt(n)
(``wmat``, solver kernels, so H = -(1/2) sigma @ W @ sigma).
"""

import numpy as np
from numba import njit

REBUILD_PERIOD = 1 << 20
_REBUILD_MASK = REBUILD_PERIOD - 1

_SM_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_SM_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_SM_MIX2 = np.uint64(0x94D049BB133111EB)
_RESTART_STRIDE = np.uint64(0x632BE59BD9B4E019)
_INV_2_53 = 1.1102230246251565e-16


@njit(inline="always")
def _next_u64(state):
    # splitmix64: full-avalanche output even for sequential seeds
    state[0] += _SM_GAMMA
    z = state[0]
    z = (z ^ (z >> np.uint64(30))) * _SM_MIX1
    z = (z ^ (z >> np.uint64(27))) * _SM_MIX2
    return z ^ (z >> np.uint64(31))


@njit(inline="always")
def _uniform(state):
    return (_next_u64(state) >> np.uint64(11)) * _INV_2_53


@njit(inline="always")
def _energy_and_fields(wmat, sigma, h):
    # H = -(1/2) sigma @ W @ sigma with fields written into h
    n = wmat.shape[0]
    e = 0.0
    for i in range(n):
        acc = 0.0
        for j in range(n):
            acc += wmat[i, j] * sigma[j]
        h[i] = acc
        e += sigma[i] * acc
    return -0.5 * e


@njit(inline="always")
def _energy_scratch(wmat, sigma):
    n = wmat.shape[0]
    e = 0.0
    for i in range(n):
        acc = 0.0
        for j in range(n):
            acc += wmat[i, j] * sigma[j]
        e += sigma[i] * acc
    return -0.5 * e


@njit(inline="always")
def _metropolis_sweep(wmat, sigma, h, e, beta, state):
    # One sequential pass over all sites; O(1) per rejection, O(n) per flip.
    n = wmat.shape[0]
    accepted = 0
    for k in range(n):
        de = 2.0 * sigma[k] * h[k]
        if de <= 0.0 or _uniform(state) < np.exp(-beta * de):
            c = 2.0 * sigma[k]
            for j in range(n):
                h[j] -= c * wmat[j, k]
            sigma[k] = -sigma[k]
            e += de
            accepted += 1
    return e, accepted


@njit(cache=True, nogil=True)
def gray_thermo_kernel(jmat, betas, halve):
    """One Gray-code sweep accumulating log Z and sum(H w) for every beta.

    Returns (log_z per beta, mean H per beta, min H, argmin bit word, states
    visited). With ``halve`` the last spin is pinned up and the global-flip
    symmetry contributes log 2 to log Z; means and minima are unaffected.
    """
    n = jmat.shape[0]
    inv = 1.0 / np.sqrt(n)
    nb = betas.shape[0]
    sigma = np.ones(n)
    h = np.empty(n)
    for i in range(n):
        acc = 0.0
        for j in range(n):
            acc += jmat[i, j]
        h[i] = acc
    tot = 0.0
    for i in range(n):
        tot += h[i]
    e = -0.5 * inv * tot

    m = np.empty(nb)
    s_acc = np.empty(nb)
    t_acc = np.empty(nb)
    for b in range(nb):
        m[b] = -betas[b] * e
        s_acc[b] = 1.0
        t_acc[b] = e
    e_min = e
    argmin = np.int64(0)
    bits = np.int64(0)

    nfree = n - 1 if halve else n
    total = np.int64(1) << np.int64(nfree)
    for i in range(1, total):
        k = 0
        ii = i
        while ii & 1 == 0:
            ii >>= 1
            k += 1
        sk = sigma[k]
        e += 2.0 * inv * sk * h[k]
        c = 2.0 * sk
        for j in range(n):
            h[j] -= c * jmat[j, k]
        sigma[k] = -sk
        bits ^= np.int64(1) << np.int64(k)
        if i & _REBUILD_MASK == 0:
            tot = 0.0
            for a in range(n):
                acc = 0.0
                for j in range(n):
                    acc += jmat[a, j] * sigma[j]
                h[a] = acc
                tot += sigma[a] * acc
            e = -0.5 * inv * tot
        if e < e_min:
            e_min = e
            argmin = bits
        for b in range(nb):
            x = -betas[b] * e
            if x > m[b]:
                r = np.exp(m[b] - x)
                s_acc[b] = s_acc[b] * r + 1.0
                t_acc[b] = t_acc[b] * r + e
                m[b] = x
            else:
                w = np.exp(x - m[b])
                s_acc[b] += w
                t_acc[b] += e * w

    log_z = np.empty(nb)
    mean_h = np.empty(nb)
    extra = np.log(2.0) if halve else 0.0
    for b in range(nb):
        log_z[b] = m[b] + np.log(s_acc[b]) + extra
        mean_h[b] = t_acc[b] / s_acc[b]
    return log_z, mean_h, e_min, argmin, total


@njit(cache=True, nogil=True)
def gray_ground_state_kernel(jmat, halve):
    """Minimum energy and its bit word over the (half) configuration space."""
    n = jmat.shape[0]
    inv = 1.0 / np.sqrt(n)
    sigma = np.ones(n)
    h = np.empty(n)
    for i in range(n):
        acc = 0.0
        for j in range(n):
            acc += jmat[i, j]
        h[i] = acc
    tot = 0.0
    for i in range(n):
        tot += h[i]
    e = -0.5 * inv * tot
    e_min = e
    argmin = np.int64(0)
    bits = np.int64(0)

    nfree = n - 1 if halve else n
    total = np.int64(1) << np.int64(nfree)
    for i in range(1, total):
        k = 0
        ii = i
        while ii & 1 == 0:
            ii >>= 1
            k += 1
        sk = sigma[k]
        e += 2.0 * inv * sk * h[k]
        c = 2.0 * sk
        for j in range(n):
            h[j] -= c * jmat[j, k]
        sigma[k] = -sk
        bits ^= np.int64(1) << np.int64(k)
        if i & _REBUILD_MASK == 0:
            tot = 0.0
            for a in range(n):
                acc = 0.0
                for j in range(n):
                    acc += jmat[a, j] * sigma[j]
                h[a] = acc
                tot += sigma[a] * acc
            e = -0.5 * inv * tot
        if e < e_min:
            e_min = e
            argmin = bits
    return e_min, argmin, total - 1


@njit(cache=True, nogil=True)
def gray_all_energies_kernel(jmat):
    """Energy of every configuration, indexed by its bit word (no halving)."""
    n = jmat.shape[0]
    inv = 1.0 / np.sqrt(n)
    total = np.int64(1) << np.int64(n)
    out = np.empty(total)
    sigma = np.ones(n)
    h = np.empty(n)
    for i in range(n):
        acc = 0.0
        for j in range(n):
            acc += jmat[i, j]
        h[i] = acc
    tot = 0.0
    for i in range(n):
        tot += h[i]
    e = -0.5 * inv * tot
    bits = np.int64(0)
    out[0] = e
    for i in range(1, total):
        k = 0
        ii = i
        while ii & 1 == 0:
            ii >>= 1
            k += 1
        sk = sigma[k]
        e += 2.0 * inv * sk * h[k]
        c = 2.0 * sk
        for j in range(n):
            h[j] -= c * jmat[j, k]
        sigma[k] = -sk
        bits ^= np.int64(1) << np.int64(k)
        if i & _REBUILD_MASK == 0:
            tot = 0.0
            for a in range(n):
                acc = 0.0
                for j in range(n):
                    acc += jmat[a, j] * sigma[j]
                h[a] = acc
                tot += sigma[a] * acc
            e = -0.5 * inv * tot
        out[bits] = e
    return out


@njit(cache=True, nogil=True)
def anneal_kernel(wmat, beta_start, beta_end, sweeps, restarts, seed):
    """Best energy over independent restarts of single-flip Metropolis.

    The inverse temperature follows a geometric schedule from beta_start to
    beta_end across the sweeps of each restart. The returned energy is always
    recomputed from scratch, so it is exact for the returned configuration.
    """
    n = wmat.shape[0]
    state = np.empty(1, dtype=np.uint64)
    sigma = np.empty(n)
    h = np.empty(n)
    best_sigma = np.ones(n)
    best_e = np.inf
    flips = 0
    ratio = 1.0
    if sweeps > 1:
        ratio = (beta_end / beta_start) ** (1.0 / (sweeps - 1))
    for r in range(restarts):
        state[0] = np.uint64(seed) + np.uint64(r) * _RESTART_STRIDE
        _next_u64(state)
        _next_u64(state)
        for i in range(n):
            sigma[i] = 1.0 if _uniform(state) < 0.5 else -1.0
        e = _energy_and_fields(wmat, sigma, h)
        beta = beta_start
        since_rebuild = 0
        for _ in range(sweeps):
            e, accepted = _metropolis_sweep(wmat, sigma, h, e, beta, state)
            flips += accepted
            since_rebuild += accepted
            if since_rebuild >= REBUILD_PERIOD:
                e = _energy_and_fields(wmat, sigma, h)
                since_rebuild = 0
            beta *= ratio
        e = _energy_and_fields(wmat, sigma, h)
        if e < best_e:
            best_e = e
            for i in range(n):
                best_sigma[i] = sigma[i]
    return best_e, best_sigma, flips


@njit(cache=True, nogil=True)
def tempering_kernel(wmat, ladder, sweeps, seed):
    """Parallel tempering over a beta ladder with adjacent replica exchange.

    Swap of replicas r, r+1 is accepted with probability
    min(1, exp((beta_{r+1} - beta_r)(E_{r+1} - E_r))), which satisfies
    detailed balance on the joint chain. Returns the best scratch-verified
    energy seen by any replica.
    """
    n = wmat.shape[0]
    n_rungs = ladder.shape[0]
    state = np.empty(1, dtype=np.uint64)
    state[0] = np.uint64(seed)
    _next_u64(state)
    _next_u64(state)

    sig = np.empty((n_rungs, n))
    h = np.empty((n_rungs, n))
    e = np.empty(n_rungs)
    since_rebuild = np.zeros(n_rungs, dtype=np.int64)
    for r in range(n_rungs):
        for i in range(n):
            sig[r, i] = 1.0 if _uniform(state) < 0.5 else -1.0
        e[r] = _energy_and_fields(wmat, sig[r], h[r])

    best_e = np.inf
    best_sigma = np.ones(n)
    flips = 0
    swaps = 0
    for _ in range(sweeps):
        for r in range(n_rungs):
            e[r], accepted = _metropolis_sweep(wmat, sig[r], h[r], e[r], ladder[r], state)
            flips += accepted
            since_rebuild[r] += accepted
            if since_rebuild[r] >= REBUILD_PERIOD:
                e[r] = _energy_and_fields(wmat, sig[r], h[r])
                since_rebuild[r] = 0
            if e[r] < best_e:
                es = _energy_scratch(wmat, sig[r])
                if es < best_e:
                    best_e = es
                    for i in range(n):
                        best_sigma[i] = sig[r, i]
        for r in range(n_rungs - 1):
            delta = (ladder[r + 1] - ladder[r]) * (e[r + 1] - e[r])
            if delta >= 0.0 or _uniform(state) < np.exp(delta):
                for i in range(n):
                    tmp = sig[r, i]
                    sig[r, i] = sig[r + 1, i]
                    sig[r + 1, i] = tmp
                    tmph = h[r, i]
                    h[r, i] = h[r + 1, i]
                    h[r + 1, i] = tmph
                te = e[r]
                e[r] = e[r + 1]
                e[r + 1] = te
                ts = since_rebuild[r]
                since_rebuild[r] = since_rebuild[r + 1]
                since_rebuild[r + 1] = ts
                swaps += 1
    return best_e, best_sigma, flips, swaps
