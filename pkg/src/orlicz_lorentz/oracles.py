"""Slow reference computations used to validate the fast ones.

Nothing here shares code with the production algorithms: level functions
come from the min-max formula for antitonic regression in exact rational
arithmetic, complementary functions from closed forms.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .orliczfn import OrliczFunction
from .stepfn import StepFunction, Weight, merge_grids


def _fractions(x) -> list[Fraction]:
    return [Fraction(float(v)) for v in x]


def level_ratios_exact(f: StepFunction, w: Weight) -> tuple[list[Fraction], list[Fraction]]:
    """Grid and ``f⁰ / w`` per cell from ``min_{a <= i} max_{b >= i} F(a, b) / W(a, b)``.

    ``F`` and ``W`` are the masses of ``f`` and ``w`` over cells ``a..b``;
    prefix sums make every average O(1), so the whole table is O(n^2).
    """
    f = f.pad(w.domain)
    grid = merge_grids(f, w)
    g = _fractions(grid)
    dt = [b - a for a, b in zip(g[:-1], g[1:])]
    fv, wv = _fractions(f.on_grid(grid)), _fractions(w.on_grid(grid))
    n = len(dt)
    F = [Fraction(0)]
    W = [Fraction(0)]
    for i in range(n):
        F.append(F[-1] + fv[i] * dt[i])
        W.append(W[-1] + wv[i] * dt[i])
    # best[a][i] = max over b >= i of the average over cells a..b
    ratios = [None] * n
    best_from: list[list[Fraction]] = []
    for a in range(n):
        row = [None] * n
        running = None
        for b in range(n - 1, a - 1, -1):
            avg = (F[b + 1] - F[a]) / (W[b + 1] - W[a])
            running = avg if running is None or avg > running else running
            row[b] = running
        best_from.append(row)
    for i in range(n):
        ratios[i] = min(best_from[a][i] for a in range(i + 1))
    return g, ratios


def maximal_level_intervals(f: StepFunction, w: Weight) -> list[tuple[Fraction, Fraction]]:
    """Maximal runs of at least two grid cells sharing one level ratio."""
    g, ratios = level_ratios_exact(f, w)
    out = []
    i = 0
    while i < len(ratios):
        j = i + 1
        while j < len(ratios) and ratios[j] == ratios[i]:
            j += 1
        if j - i > 1:
            out.append((g[i], g[j]))
        i = j
    return out


def conjugate_closed_form(phi: OrliczFunction):
    """Complementary function of a family member with a textbook formula."""
    fam = phi.family
    if fam in ("power", "scaled_power"):
        c, p = phi._cp()
        if p == 1:
            return lambda v: np.where(np.asarray(v) <= c, 0.0, math.inf)
        q = p / (p - 1)
        return lambda v: (p - 1) * c * (np.asarray(v, float) / (c * p)) ** q
    if fam == "exp_n":
        return lambda v: (1 + np.asarray(v, float)) * np.log1p(v) - np.asarray(v, float)
    if fam == "exp_plain":
        def conj(v):
            v = np.asarray(v, dtype=float)
            with np.errstate(divide="ignore", invalid="ignore"):
                return np.where(v <= 1, 0.0, v * np.log(np.maximum(v, 1.0)) - v + 1)
        return conj
    raise ValueError(f"no closed form for {phi}")
