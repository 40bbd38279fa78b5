"""Level functions of a step function with respect to a step weight.

Two independent constructions are provided.  ``halperin_level`` merges grid
cells into maximal level intervals with a stack (pool adjacent blocks while
their mass-to-weight ratios fail to decrease) and replaces ``f`` by
``ratio * w`` on each of them.  ``sinnamon_level`` builds the least concave
majorant of the points ``(W(t_i), ∫_0^{t_i} f w)`` and returns its slopes.
The identity ``halperin_level(f, w).level / w == sinnamon_level(f / w, w)``
lets each serve as an oracle for the other.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError, InvariantError
from .stepfn import StepFunction, Weight, merge_grids

__all__ = [
    "LevelInterval",
    "LevelDecomposition",
    "halperin_level",
    "sinnamon_level",
    "crosscheck_level",
    "CrosscheckReport",
    "inverse_level_weight",
    "level_blocks",
]


@dataclass(frozen=True)
class LevelInterval:
    """Maximal level interval ``(a, b]`` with ratio ``F(a, b) / W(a, b)``."""

    a: float
    b: float
    ratio: float
    mass: float
    weight_mass: float


@dataclass(frozen=True, eq=False)
class LevelDecomposition:
    source: StepFunction
    weight: Weight
    grid: np.ndarray
    blocks: tuple  # (first cell, one past last cell) for every block, trivial ones included
    intervals: tuple  # LevelInterval for blocks spanning more than one grid cell
    level: StepFunction
    inverse_weight: Optional[StepFunction]
    ratio_profile: np.ndarray  # f⁰ / w on the cells of grid


def _check_inputs(f: StepFunction, w: Weight):
    if not isinstance(w, Weight):
        raise DomainError("the weight must be a Weight instance")
    if f.domain > w.domain:
        raise DomainError(f"f lives on [0, {f.domain}) but w only on [0, {w.domain})")
    return f.pad(w.domain)


def level_blocks(fmass: np.ndarray, wmass: np.ndarray) -> list[tuple[int, int, float, float]]:
    """Stack merge of cells into blocks with strictly decreasing ratios.

    Each entry is ``(first, stop, F, W)``.  Ratios are compared by
    cross-multiplication and ties are merged, so blocks are maximal.
    """
    stack: list[list] = []
    for i, (fm, wm) in enumerate(zip(fmass.tolist(), wmass.tolist())):
        stack.append([i, i + 1, fm, wm])
        while len(stack) > 1:
            prev, top = stack[-2], stack[-1]
            if prev[2] * top[3] <= top[2] * prev[3]:
                prev[1] = top[1]
                prev[2] += top[2]
                prev[3] += top[3]
                stack.pop()
            else:
                break
    return [tuple(b) for b in stack]


def halperin_level(f: StepFunction, w: Weight) -> LevelDecomposition:
    f = _check_inputs(f, w)
    grid = merge_grids(f, w)
    dt = np.diff(grid)
    fv, wv = f.on_grid(grid), w.on_grid(grid)
    fmass, wmass = fv * dt, wv * dt
    blocks = level_blocks(fmass, wmass)
    level = fv.copy()
    ratios = fv / wv
    intervals = []
    for i, j, F, Wm in blocks:
        if j - i > 1:
            ratio = F / Wm
            # one rounding instead of two; exact products on dyadic data
            with np.errstate(over="ignore"):
                scaled = (F * wv[i:j]) / Wm
            level[i:j] = np.where(np.isfinite(scaled), scaled, ratio * wv[i:j])
            ratios[i:j] = ratio
            intervals.append(LevelInterval(float(grid[i]), float(grid[j]), ratio, F, Wm))
    inverse = None
    if f.is_nonincreasing():
        inverse = _inverse_from_blocks(grid, fv, wv, blocks)
    return LevelDecomposition(
        source=f,
        weight=w,
        grid=grid,
        blocks=tuple((i, j) for i, j, _, _ in blocks),
        intervals=tuple(intervals),
        level=StepFunction(grid, level),
        inverse_weight=inverse,
        ratio_profile=ratios,
    )


def _inverse_from_blocks(grid, fv, wv, blocks) -> StepFunction:
    out = wv.copy()
    for i, j, F, Wm in blocks:
        if j - i > 1 and F > 0:
            out[i:j] = (fv[i:j] / F) * Wm
    return StepFunction(grid, out)


def inverse_level_weight(fstar: StepFunction, w: Weight) -> StepFunction:
    """``w`` off the level intervals of ``fstar`` and ``fstar * W(a,b) / F(a,b)`` on them."""
    if not fstar.is_nonincreasing():
        raise DomainError("inverse_level_weight needs a non-increasing function")
    return halperin_level(fstar, w).inverse_weight


def upper_hull(x: np.ndarray, y: np.ndarray) -> list[int]:
    """Indices of the vertices of the least concave majorant of the points."""
    hull: list[int] = []
    for k in range(x.size):
        while len(hull) > 1:
            o, a = hull[-2], hull[-1]
            # drop a when it lies on or below the chord from o to k
            if (y[a] - y[o]) * (x[k] - x[o]) <= (y[k] - y[o]) * (x[a] - x[o]):
                hull.pop()
            else:
                break
        hull.append(k)
    return hull


def sinnamon_level(f: StepFunction, w: Weight) -> StepFunction:
    """Slopes of the least concave majorant of ``(W(t), ∫_0^t f w)``."""
    f = _check_inputs(f, w)
    grid = merge_grids(f, w)
    dt = np.diff(grid)
    wv = w.on_grid(grid)
    x = np.concatenate(([0.0], np.cumsum(wv * dt)))
    y = np.concatenate(([0.0], np.cumsum(f.on_grid(grid) * wv * dt)))
    hull = upper_hull(x, y)
    slopes = np.empty(grid.size - 1)
    for a, b in zip(hull[:-1], hull[1:]):
        slopes[a:b] = (y[b] - y[a]) / (x[b] - x[a])
    return StepFunction(grid, slopes)


@dataclass(frozen=True)
class CrosscheckReport:
    max_deviation: float
    agrees: bool


def crosscheck_level(f: StepFunction, w: Weight, tol: float = 1e-10, strict: bool = False
                     ) -> CrosscheckReport:
    """Compare ``f⁰ / w`` from the stack merge with the hull slopes of ``f / w``."""
    f = _check_inputs(f, w)
    left = halperin_level(f, w).level / w
    right = sinnamon_level(f / w, w)
    grid = merge_grids(left, right)
    a, b = left.on_grid(grid), right.on_grid(grid)
    dev = float(np.max(np.abs(a - b) / np.maximum(1.0, np.abs(a))))
    report = CrosscheckReport(dev, dev <= tol)
    if strict and not report.agrees:
        raise InvariantError(f"level constructions disagree by {dev:.3e}")
    return report
