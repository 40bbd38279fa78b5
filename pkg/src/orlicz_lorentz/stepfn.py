"""Nonnegative step functions on a finite interval [0, T).

A step function is stored as a strictly increasing breakpoint array
``0 = t_0 < t_1 < ... < t_n = T`` and one value per cell ``[t_{i-1}, t_i)``.
Every constructor returns the canonical form in which adjacent cells never
share a value, so two step functions are equal exactly when their arrays are.

Binary operations first refine both operands to the union of their
breakpoints.  Nothing is ever interpolated, so integrals, distribution
functions and rearrangements are exact up to the floating point sums that
define them (and exact outright on dyadic grids).
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, RejectedInputError

__all__ = [
    "StepFunction",
    "Weight",
    "HardyReport",
    "merge_grids",
    "integrate",
    "distribution",
    "rearrange",
    "submajorizes",
    "hardy_pairing_check",
    "characteristic",
]


def _canonical(breaks: np.ndarray, values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    keep = np.ones(values.size, dtype=bool)
    keep[1:] = values[1:] != values[:-1]
    values = values[keep]
    inner = breaks[1:-1][keep[1:]]
    breaks = np.concatenate(([breaks[0]], inner, [breaks[-1]]))
    return breaks, values


@dataclass(frozen=True, eq=False)
class StepFunction:
    """Right-continuous step function ``f = values[i]`` on ``[breaks[i], breaks[i+1])``."""

    breaks: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        b = np.array(self.breaks, dtype=float).ravel()
        v = np.array(self.values, dtype=float).ravel()
        if b.size < 2 or v.size != b.size - 1:
            raise RejectedInputError(
                f"need len(breaks) == len(values) + 1 >= 2, got {b.size} and {v.size}"
            )
        if b[0] != 0.0:
            raise RejectedInputError(f"first breakpoint must be 0, got {b[0]!r}")
        if not np.all(np.isfinite(b)) or np.any(np.diff(b) <= 0):
            raise RejectedInputError("breakpoints must be finite and strictly increasing")
        if not np.all(np.isfinite(v)):
            raise RejectedInputError("values must be finite")
        if np.any(v < 0):
            i = int(np.flatnonzero(v < 0)[0])
            raise RejectedInputError(f"value {v[i]!r} on cell {i} is negative")
        b, v = _canonical(b, v)
        b.flags.writeable = False
        v.flags.writeable = False
        object.__setattr__(self, "breaks", b)
        object.__setattr__(self, "values", v)

    # construction helpers

    @classmethod
    def constant(cls, c: float, T: float) -> "StepFunction":
        return cls([0.0, T], [c])

    @classmethod
    def from_sequence(cls, x: Sequence[float]) -> "StepFunction":
        """Embed a finite sequence as a step function with unit-width cells."""
        x = np.asarray(x, dtype=float)
        return cls(np.arange(x.size + 1, dtype=float), np.abs(x))

    # basic accessors

    @property
    def domain(self) -> float:
        return float(self.breaks[-1])

    @property
    def lengths(self) -> np.ndarray:
        return np.diff(self.breaks)

    @property
    def n_cells(self) -> int:
        return int(self.values.size)

    def __len__(self) -> int:
        return self.n_cells

    def __eq__(self, other) -> bool:
        if not isinstance(other, StepFunction):
            return NotImplemented
        return np.array_equal(self.breaks, other.breaks) and np.array_equal(
            self.values, other.values
        )

    def __hash__(self):
        return hash((self.breaks.tobytes(), self.values.tobytes()))

    def __repr__(self) -> str:
        return f"{type(self).__name__}(breaks={self.breaks.tolist()}, values={self.values.tolist()})"

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < 0) or np.any(t >= self.domain):
            raise DomainError(f"evaluation point outside [0, {self.domain})")
        idx = np.searchsorted(self.breaks, t, side="right") - 1
        out = self.values[idx]
        return float(out) if out.ndim == 0 else out

    def on_grid(self, grid: np.ndarray) -> np.ndarray:
        """Values on the cells of ``grid``, which must refine ``self.breaks``."""
        idx = np.searchsorted(self.breaks, grid[:-1], side="right") - 1
        return self.values[idx]

    def is_nonincreasing(self) -> bool:
        return bool(np.all(np.diff(self.values) <= 0))

    def integral(self) -> float:
        return float(np.dot(self.values, self.lengths))

    def primitive(self, t) -> np.ndarray:
        """``∫_0^t f`` for each entry of ``t`` (piecewise linear in ``t``)."""
        t = np.clip(np.asarray(t, dtype=float), 0.0, self.domain)
        nodes = np.concatenate(([0.0], np.cumsum(self.values * self.lengths)))
        idx = np.clip(np.searchsorted(self.breaks, t, side="right") - 1, 0, self.n_cells - 1)
        return nodes[idx] + self.values[idx] * (t - self.breaks[idx])

    def pad(self, T: float) -> "StepFunction":
        """Extend by zero to ``[0, T)``."""
        if T < self.domain:
            raise DomainError(f"cannot pad a function on [0, {self.domain}) down to [0, {T})")
        if T == self.domain:
            return self
        return StepFunction(np.append(self.breaks, T), np.append(self.values, 0.0))

    def restrict(self, T: float) -> "StepFunction":
        """Restriction to ``[0, T)``."""
        if not 0 < T <= self.domain:
            raise DomainError(f"restriction length {T} outside (0, {self.domain}]")
        inner = self.breaks[(self.breaks > 0) & (self.breaks < T)]
        grid = np.concatenate(([0.0], inner, [T]))
        return StepFunction(grid, self.on_grid(grid))

    # arithmetic on the merged grid

    def _binary(self, other, op):
        if isinstance(other, StepFunction):
            grid = merge_grids(self, other)
            return StepFunction(grid, op(self.on_grid(grid), other.on_grid(grid)))
        return StepFunction(self.breaks, op(self.values, float(other)))

    def __add__(self, other):
        return self._binary(other, np.add)

    __radd__ = __add__

    def __sub__(self, other):
        # the constructor rejects negative results
        return self._binary(other, np.subtract)

    def __mul__(self, other):
        return self._binary(other, np.multiply)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, StepFunction):
            if np.any(other.values <= 0):
                raise DomainError("division by a step function with a nonpositive value")
        elif float(other) <= 0:
            raise DomainError("division by a nonpositive scalar")
        return self._binary(other, np.divide)

    def apply(self, fn) -> "StepFunction":
        """Apply a vectorised map cellwise."""
        return StepFunction(self.breaks, fn(self.values))

    # serialisation

    def to_dict(self) -> dict:
        return {"breaks": self.breaks.tolist(), "values": self.values.tolist()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["t_left", "t_right", "value"])
        for a, b, c in zip(self.breaks[:-1], self.breaks[1:], self.values):
            writer.writerow([repr(float(a)), repr(float(b)), repr(float(c))])
        return buf.getvalue()

    @classmethod
    def from_dict(cls, data: dict) -> "StepFunction":
        try:
            return cls(data["breaks"], data["values"])
        except (KeyError, TypeError) as exc:
            raise RejectedInputError(f"malformed step function: {exc}") from None

    @classmethod
    def from_json(cls, text: str) -> "StepFunction":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise RejectedInputError(f"invalid JSON: {exc}") from None
        return cls.from_dict(data)

    @classmethod
    def from_csv(cls, text: str) -> "StepFunction":
        rows = [r for r in csv.reader(io.StringIO(text)) if r]
        if rows and rows[0][0].strip() == "t_left":
            rows = rows[1:]
        try:
            left = [float(r[0]) for r in rows]
            right = [float(r[1]) for r in rows]
            vals = [float(r[2]) for r in rows]
        except (IndexError, ValueError) as exc:
            raise RejectedInputError(f"malformed CSV row: {exc}") from None
        if not rows:
            raise RejectedInputError("empty CSV")
        if left[1:] != right[:-1]:
            raise RejectedInputError("CSV cells are not contiguous")
        return cls([left[0]] + right, vals)


@dataclass(frozen=True, eq=False, repr=False)
class Weight(StepFunction):
    """A positive non-increasing step weight together with its primitive ``W``."""

    nodes: np.ndarray = field(init=False)

    def __post_init__(self):
        super().__post_init__()
        v = self.values
        if np.any(v <= 0):
            raise RejectedInputError("weight values must be strictly positive")
        if np.any(np.diff(v) > 0):
            i = int(np.flatnonzero(np.diff(v) > 0)[0]) + 1
            raise RejectedInputError(f"weight increases on cell {i}")
        nodes = np.concatenate(([0.0], np.cumsum(v * self.lengths)))
        nodes.flags.writeable = False
        object.__setattr__(self, "nodes", nodes)

    @classmethod
    def constant(cls, c: float, T: float) -> "Weight":
        return cls([0.0, T], [c])

    @classmethod
    def from_sequence(cls, x: Sequence[float]) -> "Weight":
        x = np.asarray(x, dtype=float)
        return cls(np.arange(x.size + 1, dtype=float), x)

    @classmethod
    def from_step(cls, f: StepFunction) -> "Weight":
        return cls(f.breaks, f.values)

    def as_step(self) -> StepFunction:
        return StepFunction(self.breaks, self.values)

    def W(self, t):
        """Primitive ``W(t) = ∫_0^t w``; exact at breakpoints."""
        t = np.asarray(t, dtype=float)
        if np.any(t < 0) or np.any(t > self.domain):
            raise DomainError(f"W evaluated outside [0, {self.domain}]")
        idx = np.clip(np.searchsorted(self.breaks, t, side="right") - 1, 0, self.n_cells - 1)
        out = self.nodes[idx] + self.values[idx] * (t - self.breaks[idx])
        return float(out) if out.ndim == 0 else out

    def W_between(self, a: float, b: float) -> float:
        return float(self.W(b) - self.W(a))

    def W_inverse(self, y):
        """Exact inverse of the piecewise-linear primitive."""
        y = np.asarray(y, dtype=float)
        if np.any(y < 0) or np.any(y > self.nodes[-1]):
            raise DomainError(f"W inverse evaluated outside [0, {self.nodes[-1]}]")
        idx = np.clip(np.searchsorted(self.nodes, y, side="right") - 1, 0, self.n_cells - 1)
        out = self.breaks[idx] + (y - self.nodes[idx]) / self.values[idx]
        out = np.minimum(out, self.breaks[idx + 1])
        return float(out) if out.ndim == 0 else out

    def to_dict(self) -> dict:
        return {"kind": "weight", **super().to_dict()}

    @classmethod
    def from_dict(cls, data: dict) -> "Weight":
        kind = data.get("kind", "weight")
        if kind != "weight":
            raise RejectedInputError(f"expected kind 'weight', got {kind!r}")
        try:
            return cls(data["breaks"], data["values"])
        except (KeyError, TypeError) as exc:
            raise RejectedInputError(f"malformed weight: {exc}") from None


def characteristic(a: float, b: float, T: float, height: float = 1.0) -> StepFunction:
    """``height * 1_[a, b)`` on ``[0, T)``."""
    if not 0 <= a < b <= T:
        raise DomainError(f"need 0 <= a < b <= T, got a={a}, b={b}, T={T}")
    grid = sorted({0.0, float(a), float(b), float(T)})
    vals = [height if lo >= a and hi <= b else 0.0 for lo, hi in zip(grid[:-1], grid[1:])]
    return StepFunction(grid, vals)


def merge_grids(*fs: StepFunction) -> np.ndarray:
    """Union of breakpoints; all operands must share the same domain."""
    T = fs[0].domain
    for f in fs[1:]:
        if f.domain != T:
            raise DomainError(f"domains differ: [0, {T}) and [0, {f.domain})")
    grid = fs[0].breaks
    for f in fs[1:]:
        grid = np.union1d(grid, f.breaks)
    return grid


def _common(*fs: StepFunction) -> list[StepFunction]:
    T = max(f.domain for f in fs)
    return [f.pad(T) for f in fs]


def integrate(f: StepFunction, a: float, b: float) -> float:
    if not 0 <= a <= b <= f.domain:
        raise DomainError(f"need 0 <= a <= b <= {f.domain}, got a={a}, b={b}")
    clipped = np.clip(f.breaks, a, b)
    return float(np.dot(f.values, np.diff(clipped)))


def distribution(f: StepFunction, lam: float) -> float:
    """Measure of ``{f > lam}``."""
    if lam < 0:
        raise DomainError(f"lambda must be nonnegative, got {lam}")
    return float(np.sum(f.lengths[f.values > lam]))


def rearrange(f: StepFunction) -> StepFunction:
    """Decreasing rearrangement by a measure-weighted sort of the cells."""
    if f.is_nonincreasing():
        return f
    order = np.argsort(-f.values, kind="stable")
    lengths = f.lengths[order]
    breaks = np.concatenate(([0.0], np.cumsum(lengths)))
    breaks[-1] = f.domain
    return StepFunction(breaks, f.values[order])


def submajorizes(g: StepFunction, f: StepFunction, tol: float = 0.0) -> bool:
    """True when ``f`` is submajorized by ``g``: ``∫_0^t f* <= ∫_0^t g*`` for all t."""
    fs, gs = (rearrange(h) for h in _common(f, g))
    grid = merge_grids(fs, gs)
    return bool(np.all(fs.primitive(grid) <= gs.primitive(grid) + tol))


@dataclass(frozen=True)
class HardyReport:
    lhs: float
    rhs: float
    holds: bool


def hardy_pairing_check(
    f1: StepFunction, f2: StepFunction, g: StepFunction, rtol: float = 1e-12
) -> HardyReport:
    """Check ``∫ f1 g <= ∫ f2 g`` for non-increasing ``g`` when ``∫_0^t f1 <= ∫_0^t f2``."""
    f1, f2, g = _common(f1, f2, g)
    steps = np.diff(g.values)
    if np.any(steps > 0):
        i = int(np.flatnonzero(steps > 0)[0]) + 1
        raise RejectedInputError(f"g is not non-increasing: it increases on cell {i}")
    grid = merge_grids(f1, f2)
    p1, p2 = f1.primitive(grid), f2.primitive(grid)
    slack = rtol * (1.0 + np.abs(p2))
    bad = np.flatnonzero(p1 > p2 + slack)
    if bad.size:
        t = grid[bad[0]]
        raise RejectedInputError(
            f"primitive of f1 exceeds that of f2 at t={t!r}: {p1[bad[0]]!r} > {p2[bad[0]]!r}"
        )
    lhs = (f1 * g).integral()
    rhs = (f2 * g).integral()
    holds = lhs <= rhs + rtol * (1.0 + abs(lhs) + abs(rhs))
    return HardyReport(lhs=lhs, rhs=rhs, holds=bool(holds))


def cell_masses(f: StepFunction, w: Weight) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Merged grid of ``f`` and ``w`` with the values of both on it."""
    grid = merge_grids(f, w)
    return grid, f.on_grid(grid), w.on_grid(grid)


def from_cells(lengths: Iterable[float], values: Iterable[float]) -> StepFunction:
    lengths = np.asarray(list(lengths), dtype=float)
    return StepFunction(np.concatenate(([0.0], np.cumsum(lengths))), list(values))
