"""Compiled log-domain Sinkhorn sweeps, batched over label slices."""

import math

import numba
import numpy as np


@numba.njit(cache=True, nogil=True)
def sinkhorn_batch(log_a, log_r, log_c, log_u, log_v, active, max_iter, tol):
    """Run log-domain Sinkhorn independently on every active slice.

    ``log_a`` is (k, m, n); ``log_r`` and ``log_u`` are (k, m); ``log_c`` and
    ``log_v`` are (k, n). ``log_u`` and ``log_v`` are updated in place
    (``log_v`` is the warm start). Returns per-slice sweep counts, the final
    max-norm change of ``log_v``, and a flag that is False if any quantity
    went non-finite.
    """
    k, m, n = log_a.shape
    iters = np.zeros(k, dtype=np.int64)
    delta = np.zeros(k)
    v_new = np.empty(n)
    finite = True
    for y in range(k):
        if not active[y]:
            continue
        a = log_a[y]
        for it in range(1, max_iter + 1):
            for i in range(m):
                mx = -math.inf
                for j in range(n):
                    s = a[i, j] + log_v[y, j]
                    if s > mx:
                        mx = s
                acc = 0.0
                for j in range(n):
                    acc += math.exp(a[i, j] + log_v[y, j] - mx)
                log_u[y, i] = log_r[y, i] - (mx + math.log(acc))
            for j in range(n):
                mx = -math.inf
                for i in range(m):
                    s = a[i, j] + log_u[y, i]
                    if s > mx:
                        mx = s
                acc = 0.0
                for i in range(m):
                    acc += math.exp(a[i, j] + log_u[y, i] - mx)
                v_new[j] = log_c[y, j] - (mx + math.log(acc))
            d = 0.0
            for j in range(n):
                diff = abs(v_new[j] - log_v[y, j])
                if not (diff <= d):
                    # catches nan as well as growth
                    d = diff
                log_v[y, j] = v_new[j]
            iters[y] = it
            delta[y] = d
            if not math.isfinite(d):
                finite = False
                break
            if d < tol:
                break
        if not finite:
            break
    return iters, delta, finite
