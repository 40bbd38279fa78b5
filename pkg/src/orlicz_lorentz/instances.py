"""Seeded random step functions, weights and Orlicz functions."""

from __future__ import annotations

import numpy as np

from .orliczfn import OrliczFunction
from .stepfn import StepFunction, Weight

N_FAMILIES = {
    "power1.5": OrliczFunction.power(1.5),
    "power2": OrliczFunction.power(2),
    "power3": OrliczFunction.power(3),
    "exp_n": OrliczFunction.exp_n(),
}


def _breaks(rng: np.random.Generator, n: int, T: float, dyadic: bool) -> np.ndarray:
    if dyadic:
        # cut points on a 1/64 lattice keep every sum and product exact
        inner = rng.choice(np.arange(1, 64), size=n - 1, replace=False) / 64.0
    else:
        inner = rng.uniform(0.0, 1.0, size=n - 1)
        while np.unique(inner).size < n - 1:
            inner = rng.uniform(0.0, 1.0, size=n - 1)
    return np.concatenate(([0.0], np.sort(inner), [1.0])) * T


def random_step(rng: np.random.Generator, max_cells: int = 8, T: float = 1.0,
                dyadic: bool = False, zero_prob: float = 0.15, scale: float = 3.0) -> StepFunction:
    """Non-negative step function on ``[0, T)`` with up to ``max_cells`` cells."""
    n = int(rng.integers(1, max_cells + 1))
    if dyadic:
        n = min(n, 63)
        vals = rng.integers(0, 33, size=n) / 8.0
    else:
        vals = rng.uniform(0.0, scale, size=n)
        vals[rng.random(n) < zero_prob] = 0.0
    return StepFunction(_breaks(rng, n, T, dyadic), vals)


def random_weight(rng: np.random.Generator, max_cells: int = 8, T: float = 1.0,
                  dyadic: bool = False) -> Weight:
    """Positive non-increasing step weight on ``[0, T)``."""
    n = int(rng.integers(1, max_cells + 1))
    if dyadic:
        n = min(n, 63)
        vals = np.sort(rng.integers(1, 33, size=n) / 8.0)[::-1]
    else:
        vals = np.sort(rng.uniform(0.1, 3.0, size=n))[::-1]
    return Weight(_breaks(rng, n, T, dyadic), vals)


def random_decreasing(rng: np.random.Generator, max_cells: int = 8, T: float = 1.0,
                      dyadic: bool = False) -> StepFunction:
    f = random_step(rng, max_cells, T, dyadic, zero_prob=0.0)
    return StepFunction(f.breaks, np.sort(f.values)[::-1])


def random_pair(rng: np.random.Generator, max_cells: int = 8, T: float = 1.0,
                dyadic: bool = False) -> tuple[StepFunction, Weight]:
    return random_step(rng, max_cells, T, dyadic), random_weight(rng, max_cells, T, dyadic)


def nonzero_pair(rng: np.random.Generator, max_cells: int = 8, T: float = 1.0
                 ) -> tuple[StepFunction, Weight]:
    while True:
        f, w = random_pair(rng, max_cells, T)
        if np.any(f.values > 0):
            return f, w


def cells_capped(rng: np.random.Generator, cap: int, T: float = 1.0
                 ) -> tuple[StepFunction, Weight]:
    """Decreasing ``f`` sharing its grid with ``w``, so ``f*`` and ``w`` have at most ``cap`` cells."""
    n = int(rng.integers(1, cap + 1))
    br = _breaks(rng, n, T, False)
    f = StepFunction(br, np.sort(rng.uniform(0.05, 3.0, size=n))[::-1])
    w = Weight(br, np.sort(rng.uniform(0.1, 3.0, size=n))[::-1])
    return f, w


def pick_family(rng: np.random.Generator) -> tuple[str, OrliczFunction]:
    name = list(N_FAMILIES)[int(rng.integers(len(N_FAMILIES)))]
    return name, N_FAMILIES[name]
