"""Compiled numeric kernels.

These inner loops are the per-trial hot path of every Monte-Carlo run and
the per-sample hot path of the streaming accumulator, so they are jitted.
fastmath stays off: the streaming accumulator promises bit-exact compensated
sums, and the power iteration promises IEEE-754 reproducibility.
"""

from __future__ import annotations

import numba
import numpy as np


@numba.njit(cache=True, fastmath=False)
def power_iteration(R, x, max_iters, tol_abs):
    """In-place power iteration on symmetric R; x holds the final iterate.

    Returns (rayleigh, residual, iterations); on success the returned pair
    is exactly the one whose residual ||Rx - lam*x|| was certified. The
    residual is accumulated componentwise; the algebraically equivalent
    sqrt(||Rx||^2 - lam^2) cancels catastrophically near convergence.
    """
    n = R.shape[0]
    y = np.empty(n)
    lam = 0.0
    res = np.inf
    for it in range(max_iters):
        for i in range(n):
            acc = 0.0
            for j in range(n):
                acc += R[i, j] * x[j]
            y[i] = acc
        nrm2 = 0.0
        lam = 0.0
        for i in range(n):
            nrm2 += y[i] * y[i]
            lam += x[i] * y[i]
        if nrm2 == 0.0:
            # x lies in the nullspace; caller decides whether that means
            # a zero matrix or an unlucky start vector
            return 0.0, 0.0, it + 1
        r2 = 0.0
        for i in range(n):
            d = y[i] - lam * x[i]
            r2 += d * d
        res = np.sqrt(r2)
        if res <= tol_abs:
            return lam, res, it + 1
        nrm = np.sqrt(nrm2)
        for i in range(n):
            x[i] = y[i] / nrm
    return lam, res, max_iters


@numba.njit(cache=True, fastmath=False)
def max_abs_circular_corr(a, b):
    """max over all circular lags l of |sum_k a[k] * b[(k+l) mod n]|."""
    n = a.shape[0]
    best = 0.0
    for lag in range(n):
        acc = 0.0
        for k in range(n):
            kk = k + lag
            if kk >= n:
                kk -= n
            acc += a[k] * b[kk]
        if acc < 0.0:
            acc = -acc
        if acc > best:
            best = acc
    return best


@numba.njit(cache=True, fastmath=False)
def accumulate_samples(samples, window, sums, comps, seen, stride):
    """Feed samples one at a time into the running triangle sums.

    `window` holds the last n samples oldest-first. Once full, every
    stride-th arrival completes a vector whose outer-product upper triangle
    is added to `sums` with Neumaier-compensated summation (`comps` holds
    the corrections). Returns (samples_seen, vectors_seen).
    """
    n = window.shape[0]
    vectors = 0
    for s in range(samples.shape[0]):
        if seen < n:
            window[seen] = samples[s]
        else:
            for k in range(n - 1):
                window[k] = window[k + 1]
            window[n - 1] = samples[s]
        seen += 1
        if seen >= n and (seen - n) % stride == 0:
            vectors += 1
            for i in range(n):
                wi = window[i]
                for j in range(i, n):
                    x = wi * window[j]
                    t = sums[i, j] + x
                    if abs(sums[i, j]) >= abs(x):
                        comps[i, j] += (sums[i, j] - t) + x
                    else:
                        comps[i, j] += (x - t) + sums[i, j]
                    sums[i, j] = t
    return seen, vectors
