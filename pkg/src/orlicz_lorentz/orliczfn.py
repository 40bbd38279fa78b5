"""Orlicz functions, their complementary functions and sampling probes.

Two concrete types share one interface:

* ``OrliczFunction`` is finite valued: the power, scaled power, ``exp_n``
  (``e^u - 1 - u``), ``exp_plain`` (``e^u - 1``) and piecewise linear convex
  families.
* ``ExtOrliczFunction`` may jump to ``+inf`` past a threshold ``domain_end``.
  It appears as the complementary function of an Orlicz function with linear
  growth, and as the numerically computed complementary function of the
  exponential families.

Every function exposes evaluation, the right derivative, the least-inverse,
``conjugate_at_derivative(u) = u p(u) - phi(u)`` (the value of the
complementary function at ``p(u)``) and ``derivative_inverse``, which is the
right derivative of the complementary function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import mpmath
import numpy as np

from . import _kernels
from .errors import DomainError, RejectedInputError

__all__ = [
    "OrliczFunction",
    "ExtOrliczFunction",
    "complementary",
    "young_gap",
    "delta2_probe",
    "order_leq",
    "n_function_probe",
    "ProbeResult",
    "NProbe",
]

INF = math.inf

# numeric Legendre transform: 512 log-spaced points per decade on [1e-8, 1e8]
LEGENDRE_GRID = np.logspace(-8.0, 8.0, 16 * 512 + 1)
GOLDEN_STEPS = 40
_GOLD = (math.sqrt(5.0) - 1.0) / 2.0


def _as_array(u):
    arr = np.asarray(u, dtype=float)
    if (arr < 0).any():
        raise DomainError("Orlicz functions are evaluated at nonnegative arguments only")
    return arr


def _out(arr):
    return float(arr) if np.ndim(arr) == 0 else arr


def _exp_n(u: np.ndarray) -> np.ndarray:
    # e^u - 1 - u with a Taylor tail below 1/2 against cancellation
    return _kernels.exp_n_values(np.ascontiguousarray(u, dtype=float).ravel()).reshape(u.shape)


def _bisect_up(fn, y: np.ndarray, hi0: float = 1.0, rtol: float = 1e-15) -> np.ndarray:
    """Least ``u`` with ``fn(u) >= y`` for a continuous non-decreasing ``fn``."""
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if np.any(np.isinf(y)):
        out = np.full_like(y, INF)
        fin = np.isfinite(y)
        out[fin] = _bisect_up(fn, y[fin], hi0, rtol) if np.any(fin) else out[fin]
        return out
    lo = np.zeros_like(y)
    hi = np.full_like(y, hi0)
    for _ in range(2100):
        low = fn(hi) < y
        if not np.any(low):
            break
        hi = np.where(low, hi * 2.0, hi)
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        up = fn(mid) >= y
        hi = np.where(up, mid, hi)
        lo = np.where(up, lo, mid)
        if np.all(hi - lo <= rtol * np.maximum(hi, 1e-300)):
            break
    return np.where(y <= 0, 0.0, hi)


# piecewise-linear convex functions with an optional +inf tail


def _pl_nodes(breaks, slopes):
    b = np.concatenate(([0.0], np.asarray(breaks, dtype=float)))
    s = np.asarray(slopes, dtype=float)
    nodes = np.concatenate(([0.0], np.cumsum(s[:-1] * np.diff(b))))
    return b, s, nodes


def _pl_eval(breaks, slopes, end, u):
    b, s, nodes = _pl_nodes(breaks, slopes)
    j = np.searchsorted(b, u, side="right") - 1
    val = nodes[j] + s[j] * (u - b[j])
    return np.where(u > end, INF, val)


def _pl_derivative(breaks, slopes, end, u):
    b, s, _ = _pl_nodes(breaks, slopes)
    j = np.searchsorted(b, u, side="right") - 1
    return np.where(u >= end, INF, s[j])


def _pl_inverse(breaks, slopes, end, y):
    b, s, nodes = _pl_nodes(breaks, slopes)
    y = np.asarray(y, dtype=float)
    top = _pl_eval(breaks, slopes, end, np.array(end)) if math.isfinite(end) else INF
    ends = np.append(nodes[1:], top)
    j = np.clip(np.searchsorted(ends, y, side="left"), 0, s.size - 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        u = b[j] + (y - nodes[j]) / s[j]
    u = np.where(y <= 0, 0.0, u)
    return np.where(y > top, end, u)


def _pl_derivative_inverse(breaks, slopes, end, v):
    # sup{u : p(u) <= v}, the right derivative of the complementary function
    b, s, _ = _pl_nodes(breaks, slopes)
    k = np.searchsorted(s, v, side="right")
    right = np.append(b[1:], end)
    return np.where(k == 0, 0.0, right[np.clip(k - 1, 0, s.size - 1)])


def _pl_conjugate(breaks, slopes, end):
    """Exact complementary function of a piecewise-linear convex function."""
    b = list(map(float, breaks))
    s = list(map(float, slopes))
    # merge equal consecutive slopes so the conjugate has distinct breakpoints
    mb, ms = [], [s[0]]
    for bj, sj in zip(b, s[1:]):
        if sj == ms[-1]:
            continue
        mb.append(bj)
        ms.append(sj)
    if math.isfinite(end):
        cbreaks = ms[:]
        cslopes = [0.0] + mb + [end]
        cend = INF
    else:
        cbreaks = ms[:-1]
        cslopes = [0.0] + mb
        cend = ms[-1]
    if cbreaks and cbreaks[0] == 0.0:
        cbreaks = cbreaks[1:]
        cslopes = cslopes[1:]
    return tuple(cbreaks), tuple(cslopes), cend


# shared interface


class _ConvexBase:
    """Methods shared by finite and extended-valued convex functions."""

    domain_end: float = INF

    def __call__(self, u):
        raise NotImplementedError

    def derivative(self, u):
        raise NotImplementedError

    def inverse(self, y):
        raise NotImplementedError

    def derivative_inverse(self, v):
        raise NotImplementedError

    def conjugate_at_derivative(self, u):
        """``u p(u) - phi(u)``, equal to the complementary function at ``p(u)``."""
        u = _as_array(u)
        with np.errstate(invalid="ignore", over="ignore"):
            out = u * self.derivative(u) - self(u)
        out = np.where(np.isnan(out), INF, out)
        out = np.where(u == 0, 0.0, out)
        out = np.where(u > self.domain_end, INF, out)
        return _out(np.maximum(out, 0.0))

    def log_value(self, u):
        u = _as_array(u)
        with np.errstate(divide="ignore"):
            return _out(np.log(np.asarray(self(u), dtype=float)))

    def complementary(self):
        return complementary(self)

    @property
    def is_finite(self) -> bool:
        return not math.isfinite(self.domain_end)


@dataclass(frozen=True)
class OrliczFunction(_ConvexBase):
    """Finite convex ``phi`` with ``phi(0) = 0`` and ``phi(u) > 0`` for ``u > 0``."""

    family: str
    params: tuple = ()
    is_n_at_zero: Optional[bool] = field(default=None, compare=False)
    is_n_at_infinity: Optional[bool] = field(default=None, compare=False)

    def __post_init__(self):
        fam = self.family
        if fam == "power":
            (p,) = self.params
            if not p >= 1:
                raise RejectedInputError(f"power exponent must be >= 1, got {p}")
            flags = (p > 1, p > 1)
        elif fam == "scaled_power":
            c, p = self.params
            if not (c > 0 and p >= 1):
                raise RejectedInputError(f"scaled_power needs c > 0 and p >= 1, got c={c}, p={p}")
            flags = (p > 1, p > 1)
        elif fam == "exp_n":
            flags = (True, True)
        elif fam == "exp_plain":
            flags = (False, True)
        elif fam == "piecewise":
            breaks, slopes = self.params
            if len(slopes) != len(breaks) + 1:
                raise RejectedInputError("piecewise needs one more slope than breakpoint")
            if any(x <= 0 for x in breaks) or any(
                b2 <= b1 for b1, b2 in zip(breaks, breaks[1:])
            ):
                raise RejectedInputError("piecewise breakpoints must be positive and increasing")
            if any(s2 < s1 for s1, s2 in zip(slopes, slopes[1:])):
                raise RejectedInputError("piecewise slopes must be non-decreasing")
            if not slopes[0] > 0:
                raise RejectedInputError("first slope must be positive so that phi(u) > 0")
            flags = (False, False)
        else:
            raise RejectedInputError(f"unknown Orlicz family {fam!r}")
        if self.is_n_at_zero is None:
            object.__setattr__(self, "is_n_at_zero", flags[0])
        if self.is_n_at_infinity is None:
            object.__setattr__(self, "is_n_at_infinity", flags[1])

    # constructors

    @classmethod
    def power(cls, p: float) -> "OrliczFunction":
        return cls("power", (float(p),))

    @classmethod
    def scaled_power(cls, c: float, p: float) -> "OrliczFunction":
        return cls("scaled_power", (float(c), float(p)))

    @classmethod
    def exp_n(cls) -> "OrliczFunction":
        return cls("exp_n")

    @classmethod
    def exp_plain(cls) -> "OrliczFunction":
        return cls("exp_plain")

    @classmethod
    def piecewise(cls, breaks, slopes) -> "OrliczFunction":
        breaks = [float(x) for x in breaks]
        if breaks and breaks[0] == 0.0:
            breaks = breaks[1:]
        return cls("piecewise", (tuple(breaks), tuple(float(s) for s in slopes)))

    @classmethod
    def from_descriptor(cls, d: dict) -> "OrliczFunction":
        fam = d.get("family")
        try:
            if fam == "power":
                return cls.power(d["p"])
            if fam == "scaled_power":
                return cls.scaled_power(d["c"], d["p"])
            if fam in ("exp_n", "exp_plain"):
                return cls(fam)
            if fam in ("piecewise", "piecewise_convex"):
                return cls.piecewise(d["breaks"], d["slopes"])
        except KeyError as exc:
            raise RejectedInputError(f"descriptor for {fam!r} is missing {exc}") from None
        raise RejectedInputError(f"unknown Orlicz family {fam!r}")

    def to_descriptor(self) -> dict:
        if self.family == "power":
            return {"family": "power", "p": self.params[0]}
        if self.family == "scaled_power":
            return {"family": "scaled_power", "c": self.params[0], "p": self.params[1]}
        if self.family == "piecewise":
            return {"family": "piecewise", "breaks": list(self.params[0]),
                    "slopes": list(self.params[1])}
        return {"family": self.family}

    @property
    def is_n_function(self) -> bool:
        return bool(self.is_n_at_zero and self.is_n_at_infinity)

    def _cp(self):
        if self.family == "power":
            return 1.0, self.params[0]
        return self.params

    # evaluation

    def __call__(self, u):
        u = _as_array(u)
        fam = self.family
        if fam in ("power", "scaled_power"):
            c, p = self._cp()
            with np.errstate(over="ignore"):
                out = c * u**p
        elif fam == "exp_n":
            out = _exp_n(np.atleast_1d(u)).reshape(u.shape)
        elif fam == "exp_plain":
            with np.errstate(over="ignore"):
                out = np.expm1(u)
        else:
            out = _pl_eval(*self.params, INF, u)
        return _out(out)

    def derivative(self, u):
        """Right derivative ``p(u)``."""
        u = _as_array(u)
        fam = self.family
        if fam in ("power", "scaled_power"):
            c, p = self._cp()
            if p == 1:
                out = np.full_like(u, c)
            else:
                with np.errstate(over="ignore"):
                    out = c * p * u ** (p - 1)
        elif fam == "exp_n":
            with np.errstate(over="ignore"):
                out = np.expm1(u)
        elif fam == "exp_plain":
            with np.errstate(over="ignore"):
                out = np.exp(u)
        else:
            out = _pl_derivative(*self.params, INF, u)
        return _out(out)

    def conjugate_at_derivative(self, u):
        if self.family in ("power", "scaled_power") and self._cp()[1] > 1:
            c, p = self._cp()
            u = _as_array(u)
            with np.errstate(over="ignore"):
                return _out((p - 1.0) * c * u**p)
        return super().conjugate_at_derivative(u)

    def inverse(self, y):
        """Least ``u`` with ``phi(u) >= y``."""
        y = _as_array(y)
        fam = self.family
        if fam in ("power", "scaled_power"):
            c, p = self._cp()
            out = (y / c) ** (1.0 / p)
        elif fam == "exp_plain":
            out = np.log1p(y)
        elif fam == "exp_n":
            out = _bisect_up(self.__call__, y).reshape(y.shape)
        else:
            out = _pl_inverse(*self.params, INF, y)
        return _out(out)

    def derivative_inverse(self, v):
        """``sup{u : p(u) <= v}``: the right derivative of the complementary function."""
        v = _as_array(v)
        fam = self.family
        if fam in ("power", "scaled_power"):
            c, p = self._cp()
            if p == 1:
                out = np.where(v < c, 0.0, INF)
            else:
                out = (v / (c * p)) ** (1.0 / (p - 1))
        elif fam == "exp_n":
            out = np.log1p(v)
        elif fam == "exp_plain":
            with np.errstate(divide="ignore"):
                out = np.where(v < 1.0, 0.0, np.log(np.maximum(v, 1.0)))
        else:
            out = _pl_derivative_inverse(*self.params, INF, v)
        return _out(out)

    def log_value(self, u):
        """``log(phi(u))`` without overflow for the exponential families."""
        u = _as_array(u)
        fam = self.family
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            if fam in ("power", "scaled_power"):
                c, p = self._cp()
                out = math.log(c) + p * np.log(u)
            elif fam == "exp_n":
                big = u > 2.0
                safe = np.where(big, u, 2.0)
                tail = safe + np.log1p(-(1.0 + safe) * np.exp(-safe))
                out = np.where(big, tail, np.log(np.asarray(self(np.minimum(u, 2.0)))))
            elif fam == "exp_plain":
                big = u > 2.0
                safe = np.where(big, u, 2.0)
                tail = safe + np.log1p(-np.exp(-safe))
                out = np.where(big, tail, np.log(np.expm1(np.minimum(u, 2.0))))
            else:
                out = np.log(np.asarray(self(u)))
        return _out(out)

    def value_mp(self, u):
        """Evaluation in mpmath arithmetic at the current working precision."""
        u = mpmath.mpf(u)
        fam = self.family
        if fam in ("power", "scaled_power"):
            c, p = self._cp()
            return mpmath.mpf(c) * u ** mpmath.mpf(p)
        if fam == "exp_n":
            return mpmath.expm1(u) - u
        if fam == "exp_plain":
            return mpmath.expm1(u)
        b, s, nodes = _pl_nodes(*self.params)
        j = int(np.searchsorted(b, float(u), side="right") - 1)
        return mpmath.mpf(nodes[j]) + mpmath.mpf(s[j]) * (u - mpmath.mpf(b[j]))

    def delta2_known(self, regime: str) -> Optional[bool]:
        """Closed-form Delta2 answer where the family determines it."""
        if self.family in ("power", "scaled_power", "piecewise"):
            return True
        if regime == "zero":
            return True
        return False

    def __str__(self) -> str:
        d = self.to_descriptor()
        rest = ",".join(f"{k}={v}" for k, v in d.items() if k != "family")
        return f"{d['family']}({rest})"


@dataclass(frozen=True)
class ExtOrliczFunction(_ConvexBase):
    """Convex, possibly ``+inf`` valued function vanishing at zero.

    ``kind == "piecewise"`` stores breakpoints, slopes and the threshold
    ``domain_end`` beyond which the value is ``+inf`` (the value at the
    threshold itself is finite).  ``kind == "legendre"`` is the numerically
    evaluated complementary function of ``base``.
    """

    kind: str
    breaks: tuple = ()
    slopes: tuple = ()
    domain_end: float = INF
    base: Optional[_ConvexBase] = None

    def __post_init__(self):
        if self.kind == "piecewise":
            if len(self.slopes) != len(self.breaks) + 1:
                raise RejectedInputError("need one more slope than breakpoint")
            if any(s < 0 for s in self.slopes) or any(
                s2 < s1 for s1, s2 in zip(self.slopes, self.slopes[1:])
            ):
                raise RejectedInputError("slopes must be nonnegative and non-decreasing")
        elif self.kind == "legendre":
            if self.base is None:
                raise RejectedInputError("legendre kind needs a base function")
        else:
            raise RejectedInputError(f"unknown kind {self.kind!r}")

    # A complementary function is an N-function exactly when its base is one;
    # the piecewise kind (linear growth or a +inf tail) never is.
    @property
    def is_n_at_zero(self) -> bool:
        return self.kind == "legendre" and bool(getattr(self.base, "is_n_at_zero", False))

    @property
    def is_n_at_infinity(self) -> bool:
        return self.kind == "legendre" and bool(getattr(self.base, "is_n_at_infinity", False))

    @property
    def is_n_function(self) -> bool:
        return self.is_n_at_zero and self.is_n_at_infinity

    def __call__(self, v):
        v = _as_array(v)
        if self.kind == "piecewise":
            return _out(_pl_eval(self.breaks, self.slopes, self.domain_end, v))
        return _out(_legendre(self.base, v))

    def derivative(self, v):
        v = _as_array(v)
        if self.kind == "piecewise":
            return _out(_pl_derivative(self.breaks, self.slopes, self.domain_end, v))
        return self.base.derivative_inverse(v)

    def derivative_inverse(self, u):
        u = _as_array(u)
        if self.kind == "piecewise":
            return _out(_pl_derivative_inverse(self.breaks, self.slopes, self.domain_end, u))
        return self.base.derivative(u)

    def conjugate_at_derivative(self, v):
        if self.kind == "piecewise":
            return super().conjugate_at_derivative(v)
        # Young's equality for the pair (base, base_*): v p_*(v) - base_*(v) = base(p_*(v))
        v = _as_array(v)
        with np.errstate(over="ignore"):
            return _out(np.asarray(self.base(self.base.derivative_inverse(v)), dtype=float))

    def inverse(self, y):
        y = _as_array(y)
        if self.kind == "piecewise":
            return _out(_pl_inverse(self.breaks, self.slopes, self.domain_end, y))
        return _out(_bisect_up(self.__call__, y).reshape(y.shape))

    def value_mp(self, v):
        return mpmath.mpf(self(float(v)))

    def to_descriptor(self) -> dict:
        if self.kind == "piecewise":
            return {"family": "ext_piecewise", "breaks": list(self.breaks),
                    "slopes": list(self.slopes), "domain_end": self.domain_end}
        return {"family": "legendre", "base": self.base.to_descriptor()}

    def __str__(self) -> str:
        if self.kind == "piecewise":
            return f"ext_piecewise(breaks={list(self.breaks)}, slopes={list(self.slopes)}, end={self.domain_end})"
        return f"conjugate({self.base})"


def _golden_max(obj, lo: np.ndarray, hi: np.ndarray, steps: int = GOLDEN_STEPS):
    a, b = lo.copy(), hi.copy()
    c = b - _GOLD * (b - a)
    d = a + _GOLD * (b - a)
    fc, fd = obj(c), obj(d)
    for _ in range(steps):
        left = fc >= fd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        new_c = b - _GOLD * (b - a)
        new_d = a + _GOLD * (b - a)
        # reuse the surviving interior point
        c_next = np.where(left, new_c, d)
        d_next = np.where(left, c, new_d)
        f_new = obj(np.where(left, c_next, d_next))
        fc, fd = np.where(left, f_new, fd), np.where(left, fc, f_new)
        c, d = c_next, d_next
    return np.maximum(fc, fd)


def kernel_params(phi):
    """Arguments describing ``phi`` to the compiled kernels, or ``None``."""
    empty = np.zeros(0)
    if isinstance(phi, OrliczFunction):
        if phi.family in ("power", "scaled_power"):
            c, p = phi._cp()
            return _kernels.POWER, c, p, empty, np.zeros(1)
        if phi.family == "exp_n":
            return _kernels.EXP_N, 1.0, 1.0, empty, np.zeros(1)
        if phi.family == "exp_plain":
            return _kernels.EXP_PLAIN, 1.0, 1.0, empty, np.zeros(1)
        br, sl = phi.params
        return _kernels.PIECEWISE, 1.0, 1.0, np.array(br, float), np.array(sl, float)
    if isinstance(phi, ExtOrliczFunction) and phi.kind == "piecewise" and not math.isfinite(
        phi.domain_end
    ):
        return _kernels.PIECEWISE, 1.0, 1.0, np.array(phi.breaks, float), np.array(phi.slopes, float)
    return None


@lru_cache(maxsize=32)
def _grid_values(base) -> np.ndarray:
    with np.errstate(over="ignore"):
        return np.asarray(base(LEGENDRE_GRID), dtype=float)


def _legendre(base, v: np.ndarray) -> np.ndarray:
    """``sup_{u > 0} (u v - base(u))`` on the log grid, refined by golden section."""
    flat = np.atleast_1d(v).ravel()
    grid = LEGENDRE_GRID
    gvals = _grid_values(base)
    params = kernel_params(base)
    if params is not None:
        out = _kernels.legendre_values(*params, flat.astype(float), grid, gvals, GOLDEN_STEPS)
        return out.reshape(np.shape(v))
    out = np.empty_like(flat)
    for start in range(0, flat.size, 128):
        vv = flat[start:start + 128]
        with np.errstate(invalid="ignore", over="ignore"):
            obj = vv[:, None] * grid[None, :] - gvals[None, :]
        obj = np.where(np.isnan(obj), -INF, obj)
        j = np.argmax(obj, axis=1)
        best = obj[np.arange(vv.size), j]
        lo = np.where(j > 0, grid[np.maximum(j - 1, 0)], 0.0)
        hi = grid[np.minimum(j + 1, grid.size - 1)]

        def f(u, vv=vv):
            with np.errstate(invalid="ignore", over="ignore"):
                r = u * vv - np.asarray(base(u), dtype=float)
            return np.where(np.isnan(r), -INF, r)

        refined = _golden_max(f, lo, hi)
        out[start:start + 128] = np.maximum(np.maximum(best, refined), 0.0)
    out = np.where(flat == 0, 0.0, out)
    return out.reshape(np.shape(v))


@lru_cache(maxsize=64)
def complementary(phi):
    """Complementary function ``phi_*(v) = sup_{u>0} (u v - phi(u))``."""
    if isinstance(phi, OrliczFunction):
        if phi.family in ("power", "scaled_power"):
            c, p = phi._cp()
            if p == 1:
                return ExtOrliczFunction("piecewise", (), (0.0,), c)
            q = p / (p - 1.0)
            return OrliczFunction.scaled_power((p - 1.0) * c ** (1.0 - q) * p ** (-q), q)
        if phi.family == "piecewise":
            b, s, e = _pl_conjugate(*phi.params, INF)
            return ExtOrliczFunction("piecewise", b, s, e)
        return ExtOrliczFunction("legendre", base=phi)
    if isinstance(phi, ExtOrliczFunction) and phi.kind == "piecewise":
        b, s, e = _pl_conjugate(phi.breaks, phi.slopes, phi.domain_end)
        if not math.isfinite(e) and s and s[0] > 0:
            return OrliczFunction.piecewise(b, s)
        return ExtOrliczFunction("piecewise", b, s, e)
    return ExtOrliczFunction("legendre", base=phi)


def young_gap(phi, u: float, v: float) -> float:
    """``phi(u) + phi_*(v) - u v``, nonnegative by Young's inequality."""
    if u < 0 or v < 0:
        raise DomainError("Young's inequality is stated for nonnegative arguments")
    star = complementary(phi)
    a, b = phi(u), star(v)
    if math.isinf(a) or math.isinf(b):
        return INF
    return a + b - u * v


@dataclass(frozen=True)
class ProbeResult:
    passed: bool
    witness: Optional[float]
    ratio: Optional[float]
    regime: str
    known: Optional[bool] = None


_DEFAULT_RANGE = {"zero": (1e-8, 1.0), "infinity": (1.0, 1e3), "global": (1e-8, 1e3)}


def delta2_probe(phi, regime: str, K: float, u_range=None, samples: int = 200) -> ProbeResult:
    """Scan ``phi(2u) <= K phi(u)`` on a log-spaced ladder; a witness is conclusive."""
    if regime not in _DEFAULT_RANGE:
        raise DomainError(f"regime must be one of {sorted(_DEFAULT_RANGE)}")
    if not K > 2:
        raise DomainError("Delta2 probes need K > 2")
    a, b = u_range if u_range is not None else _DEFAULT_RANGE[regime]
    if not 0 < a < b or samples < 2:
        raise DomainError("need 0 < a < b and samples >= 2")
    u = np.logspace(math.log10(a), math.log10(b), samples)
    log_ratio = np.asarray(phi.log_value(2 * u)) - np.asarray(phi.log_value(u))
    bad = np.flatnonzero(log_ratio > math.log(K))
    known = phi.delta2_known(regime) if hasattr(phi, "delta2_known") else None
    if bad.size:
        i = bad[0]
        return ProbeResult(False, float(u[i]), float(np.exp(log_ratio[i])), regime, known)
    return ProbeResult(True, None, float(np.exp(np.max(log_ratio))), regime, known)


def order_leq(phi1, phi2, regime: str, b: float, u0: float = 0.0, u_range=(1e-6, 1e6),
              samples: int = 400) -> ProbeResult:
    """Scan ``phi1(u) <= phi2(b u)`` on sampled ``u`` (``u >= u0`` at infinity)."""
    if not b > 0 or u0 < 0:
        raise DomainError("need b > 0 and u0 >= 0")
    if regime not in ("global", "infinity"):
        raise DomainError("regime must be 'global' or 'infinity'")
    lo, hi = u_range
    if regime == "infinity":
        lo = max(lo, u0)
    if not 0 < lo < hi:
        raise DomainError("empty sampling range")
    u = np.logspace(math.log10(lo), math.log10(hi), samples)
    l1 = np.asarray(phi1.log_value(u))
    l2 = np.asarray(phi2.log_value(b * u))
    bad = np.flatnonzero(l1 > l2 + 1e-12)
    if bad.size:
        i = bad[0]
        return ProbeResult(False, float(u[i]), float(np.exp(l1[i] - l2[i])), regime)
    return ProbeResult(True, None, float(np.exp(np.max(l1 - l2))), regime)


@dataclass(frozen=True)
class NProbe:
    at: str
    ladder: np.ndarray
    ratios: np.ndarray
    known: Optional[bool]

    @property
    def trend(self) -> str:
        """``"zero"``, ``"diverges"`` or ``"bounded"`` along the ladder."""
        r = self.ratios
        if self.at == "zero":
            return "zero" if r[-1] < 1e-3 * r[0] and np.all(r[1:] <= r[:-1]) else "bounded"
        return "diverges" if r[-1] > 1e3 * r[0] and np.all(r[1:] >= r[:-1]) else "bounded"


def n_function_probe(phi, at: str) -> NProbe:
    """``phi(u)/u`` on the ladder ``u = 10^{-k}`` (at zero) or ``10^{k}`` (at infinity)."""
    if at not in ("zero", "infinity"):
        raise DomainError("at must be 'zero' or 'infinity'")
    k = np.arange(13, dtype=float)
    u = 10.0 ** (-k) if at == "zero" else 10.0**k
    with np.errstate(over="ignore"):
        ratios = np.exp(np.asarray(phi.log_value(u)) - np.log(u))
    known = getattr(phi, "is_n_at_zero" if at == "zero" else "is_n_at_infinity", None)
    return NProbe(at, u, ratios, known)
