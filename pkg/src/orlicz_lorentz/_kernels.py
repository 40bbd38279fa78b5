"""Compiled inner loop of the projected subgradient estimator for P."""

from __future__ import annotations

import math

import numpy as np
from numba import njit

# family codes understood by the kernel
POWER, EXP_N, EXP_PLAIN, PIECEWISE = 0, 1, 2, 3


@njit(cache=True)
def _phi_and_slope(code, c, p, br, sl, u):
    if code == POWER:
        if p == 1.0:
            return c * u, c
        return c * u**p, c * p * u ** (p - 1.0)
    if code == EXP_N:
        if u < 0.5:
            term = u * u / 2.0
            acc = term
            for k in range(3, 22):
                term = term * u / k
                acc += term
            return acc, math.expm1(u)
        return math.expm1(u) - u, math.expm1(u)
    if code == EXP_PLAIN:
        return math.expm1(u), math.exp(u)
    # piecewise linear
    val = 0.0
    left = 0.0
    j = 0
    while j < br.size and u >= br[j]:
        val += sl[j] * (br[j] - left)
        left = br[j]
        j += 1
    return val + sl[j] * (u - left), sl[j]


@njit(cache=True)
def _objective(code, c, p, br, sl, f, v, dt):
    total = 0.0
    for i in range(f.size):
        if f[i] == 0.0:
            continue
        if v[i] <= 0.0:
            return math.inf
        val, _ = _phi_and_slope(code, c, p, br, sl, f[i] / v[i])
        total += v[i] * val * dt[i]
    return total


@njit(cache=True)
def _pava_nonincreasing(v, dt):
    n = v.size
    vals = np.empty(n)
    wts = np.empty(n)
    cnt = np.empty(n, dtype=np.int64)
    top = 0
    for i in range(n):
        vals[top] = v[i]
        wts[top] = dt[i]
        cnt[top] = 1
        top += 1
        while top > 1 and vals[top - 2] < vals[top - 1]:
            wsum = wts[top - 2] + wts[top - 1]
            vals[top - 2] = (vals[top - 2] * wts[top - 2] + vals[top - 1] * wts[top - 1]) / wsum
            wts[top - 2] = wsum
            cnt[top - 2] += cnt[top - 1]
            top -= 1
    k = 0
    for b in range(top):
        for _ in range(cnt[b]):
            v[k] = vals[b]
            k += 1


@njit(cache=True)
def _project(v, dt, wnodes, floor):
    for _ in range(20):
        _pava_nonincreasing(v, dt)
        for i in range(v.size):
            if v[i] < floor:
                v[i] = floor
        acc = 0.0
        ratio = 0.0
        for i in range(v.size):
            acc += v[i] * dt[i]
            r = acc / wnodes[i]
            if r > ratio:
                ratio = r
        if ratio > 1.0:
            for i in range(v.size):
                v[i] /= ratio
        ok = True
        for i in range(1, v.size):
            if v[i] > v[i - 1]:
                ok = False
                break
        if ok:
            break


@njit(cache=True)
def projected_subgradient(code, c, p, br, sl, f, dt, wnodes, v0, iters):
    """Minimise ``sum v phi(f / v) dt`` over non-increasing ``v`` with prefix sums <= W."""
    v = v0.copy()
    floor = 1e-12 * np.max(v0)
    _project(v, dt, wnodes, floor)
    best = _objective(code, c, p, br, sl, f, v, dt)
    best_v = v.copy()
    scale = 0.25 * np.mean(v0)
    g = np.empty(v.size)
    for it in range(1, iters + 1):
        gmax = 0.0
        for i in range(v.size):
            if f[i] == 0.0:
                g[i] = 0.0
                continue
            u = f[i] / v[i]
            val, slope = _phi_and_slope(code, c, p, br, sl, u)
            # d/dv of v phi(f/v) is phi(u) - u p(u)
            g[i] = (val - u * slope) * dt[i]
            if abs(g[i]) > gmax:
                gmax = abs(g[i])
        if gmax == 0.0 or not math.isfinite(gmax):
            break
        step = scale / math.sqrt(it)
        for i in range(v.size):
            v[i] -= step * g[i] / gmax
        _project(v, dt, wnodes, floor)
        val = _objective(code, c, p, br, sl, f, v, dt)
        if val < best:
            best = val
            best_v[:] = v
    return best, best_v


@njit(cache=True)
def legendre_values(code, c, p, br, sl, v, grid, gvals, steps):
    """``sup_u (u v - phi(u))`` on ``grid`` followed by golden-section refinement."""
    gold = (math.sqrt(5.0) - 1.0) / 2.0
    out = np.empty(v.size)
    for i in range(v.size):
        vi = v[i]
        if vi == 0.0:
            out[i] = 0.0
            continue
        # u v - phi(u) is concave on the grid: find where its increments turn negative
        lo = 0
        hi = grid.size - 1
        while lo < hi:
            mid = (lo + hi) // 2
            if gvals[mid + 1] == math.inf or vi * (grid[mid + 1] - grid[mid]) < (
                gvals[mid + 1] - gvals[mid]
            ):
                hi = mid
            else:
                lo = mid + 1
        j = lo
        best = vi * grid[j] - gvals[j]
        a = grid[j - 1] if j > 0 else 0.0
        b = grid[j + 1] if j + 1 < grid.size else grid[j]
        x1 = b - gold * (b - a)
        x2 = a + gold * (b - a)
        f1 = vi * x1 - _phi_and_slope(code, c, p, br, sl, x1)[0]
        f2 = vi * x2 - _phi_and_slope(code, c, p, br, sl, x2)[0]
        for _ in range(steps):
            if f1 >= f2:
                b = x2
                x2 = x1
                f2 = f1
                x1 = b - gold * (b - a)
                f1 = vi * x1 - _phi_and_slope(code, c, p, br, sl, x1)[0]
            else:
                a = x1
                x1 = x2
                f1 = f2
                x2 = a + gold * (b - a)
                f2 = vi * x2 - _phi_and_slope(code, c, p, br, sl, x2)[0]
        out[i] = max(best, f1, f2, 0.0)
    return out


@njit(cache=True)
def exp_n_values(u):
    out = np.empty(u.size)
    for i in range(u.size):
        out[i] = _phi_and_slope(EXP_N, 1.0, 1.0, u, u, u[i])[0]
    return out
