"""Pairings between the Orlicz-Lorentz space and its Köthe dual.

Functionals on the Orlicz-Lorentz space split into a regular part
``f -> ∫ f h`` and a singular part that only enters through its norm.  The
norm of ``H + S`` is the least ``lam`` with ``P_{phi*}(h / lam) + |S| / lam <= 1``.
On finite grids the singular part is synthetic: a scalar norm plus an
optional table of values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from .errors import DomainError, RejectedInputError
from .level import halperin_level
from .modular import (
    Profile,
    luxemburg_norm,
    orlicz_from_profile,
    orlicz_norm,
    p_modular,
    q_profile,
    rho,
)
from .orliczfn import complementary
from .stepfn import StepFunction, Weight, merge_grids, rearrange

__all__ = [
    "DualFunctional",
    "HolderReport",
    "holder_audit",
    "DualOracleResult",
    "dual_norm_oracle",
    "functional_norm",
    "AttainmentReport",
    "attainment_check",
    "ExtensionGap",
    "extension_gap",
]


@dataclass(frozen=True, eq=False)
class DualFunctional:
    """``F = H + S`` with ``H(f) = ∫ f h`` and a singular part known by its norm.

    ``s_oracle`` maps ``k`` to a claimed value of ``S(k f0)`` for a fixed test
    vector ``f0``.  ``kernel_norm`` attaches an analytic ``|h|_M`` to kernels
    that are truncations of infinite constructions, whose grid norm is not
    the one they stand in for.
    """

    h: StepFunction
    s_norm: float = 0.0
    s_oracle: Mapping[float, float] = field(default_factory=dict)
    kernel_norm: Optional[float] = None

    def __post_init__(self):
        if not (self.s_norm >= 0 and math.isfinite(self.s_norm)):
            raise DomainError(f"s_norm must be a finite non-negative number, got {self.s_norm}")
        if self.kernel_norm is not None and not self.kernel_norm > 0:
            raise DomainError("kernel_norm must be positive")

    def validate_oracle(self, phi, w: Weight, f0: StepFunction, tol: float = 1e-10) -> None:
        """Check ``|S(k f0)| <= s_norm * |k f0|`` for every tabulated ``k``."""
        base = luxemburg_norm(phi, w, f0, "lambda").value
        for k, value in self.s_oracle.items():
            bound = self.s_norm * abs(k) * base
            if abs(value) > bound * (1 + tol) + tol:
                raise RejectedInputError(
                    f"oracle value S({k} f0) = {value} exceeds s_norm * |k f0| = {bound}"
                )


def _dual_profile(w: Weight, h: StepFunction) -> Profile:
    return q_profile(h, w)


def _dual_modular(phi_star, w: Weight, h: StepFunction, modular: str):
    """``lam -> P_{phi*}(h / lam)`` through Q (equal for N-functions) or convex_opt."""
    if modular == "q":
        prof = _dual_profile(w, h)
        return lambda lam: prof.modular(phi_star, 1.0 / lam)
    if modular == "p":
        return lambda lam: p_modular(phi_star, w, h * (1.0 / lam))
    raise DomainError(f"modular must be 'q' or 'p', got {modular!r}")


def _least_root(g, start: float, tol: float = 1e-14) -> float:
    """Least ``lam > 0`` with ``g(lam) <= 1`` for a non-increasing ``g``."""
    hi = start
    while g(hi) > 1.0:
        hi *= 2.0
        if hi > 1e300:
            raise DomainError("no finite lam with g(lam) <= 1")
    lo = hi
    while g(lo) <= 1.0:
        lo /= 2.0
        if lo == 0.0:
            return 0.0
    while hi - lo > tol * hi:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if g(mid) <= 1.0:
            hi = mid
        else:
            lo = mid
    return hi


@dataclass(frozen=True)
class HolderReport:
    pairing: float
    rearranged_pairing: float
    bound_lux_orlicz: float
    bound_orlicz_lux: float
    holds: bool

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def holder_audit(phi, w: Weight, f: StepFunction, g: StepFunction, tol: float = 1e-8
                 ) -> HolderReport:
    """Check ``∫|fg| <= ∫f*g* <= |f| |g|⁰ and |f|⁰ |g|`` with ``phi*`` on the dual side."""
    f, g = f.pad(w.domain), g.pad(w.domain)
    phi_star = complementary(phi)
    pairing = (f * g).integral()
    rearranged = (rearrange(f) * rearrange(g)).integral()
    lux_f = luxemburg_norm(phi, w, f, "lambda").value
    orl_f = orlicz_norm(phi, w, f, "lambda")[0].value
    lux_g = luxemburg_norm(phi_star, w, g, "m").value
    orl_g = orlicz_norm(phi_star, w, g, "m")[0].value
    b1, b2 = lux_f * orl_g, orl_f * lux_g
    slack = tol * (1.0 + min(b1, b2))
    holds = pairing <= rearranged + slack and rearranged <= min(b1, b2) + slack
    return HolderReport(pairing, rearranged, b1, b2, bool(holds))


@dataclass(frozen=True, eq=False)
class DualOracleResult:
    value: float
    g: Optional[StepFunction]
    source: str  # analytic | random | trivial
    candidates: int


def _scale_to_unit(phi_star, shape: np.ndarray, masses: np.ndarray) -> float:
    """Largest ``c`` with ``sum phi*(c shape) masses <= 1``."""
    prof = Profile(shape, masses)
    if prof.is_zero:
        return 0.0

    def m(c):
        return prof.modular(phi_star, c)

    hi = 1.0 / prof.top
    while m(hi) <= 1.0:
        hi *= 2.0
    lo = hi
    while m(lo) > 1.0:
        lo /= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if m(mid) <= 1.0:
            lo = mid
        else:
            hi = mid
    return lo


def dual_norm_oracle(phi, w: Weight, f: StepFunction, budget: int,
                     rng: Optional[np.random.Generator] = None) -> DualOracleResult:
    """Lower bound for ``|f|⁰_M`` from ``sup {∫ f* g : rho_{phi*}(g) <= 1}``.

    Candidates are non-increasing on the merged grid of ``f*`` and ``w``:
    the shapes ``p(k (f*)⁰ / w)`` for ``k`` around the minimising interval,
    and ``budget`` random decreasing shapes.  Each is scaled by bisection to
    dual modular at most one, so every value is a valid lower bound.
    """
    if budget < 1:
        raise DomainError("budget must be at least 1")
    rng = rng if rng is not None else np.random.default_rng(0)
    fs = rearrange(f.pad(w.domain))
    grid = merge_grids(fs, w)
    dt = np.diff(grid)
    fv = fs.on_grid(grid)
    if not np.any(fv > 0):
        return DualOracleResult(0.0, StepFunction(grid, np.zeros(dt.size)), "trivial", 0)
    phi_star = complementary(phi)
    masses = w.on_grid(grid) * dt
    fmass = fv * dt

    shapes: list[tuple[str, np.ndarray]] = []
    prof = q_profile(fs, w)
    ratio = prof.values if np.array_equal(prof.grid, grid) else StepFunction(
        prof.grid, prof.values).on_grid(grid)
    _, K = orlicz_from_profile(phi, Profile(ratio, masses, grid), "m")
    if K is not None:
        ks = [K.k_star] + ([K.k_star_star] if math.isfinite(K.k_star_star) else [])
        ks += [K.k_star * r for r in (0.5, 0.9, 1.1, 2.0)]
        for k in ks:
            shapes.append(("analytic", np.asarray(phi.derivative(k * ratio), dtype=float)))
    for _ in range(budget):
        shapes.append(("random", np.sort(rng.exponential(size=dt.size))[::-1]))

    best, best_g, best_src = -math.inf, None, "random"
    for src, shape in shapes:
        if not np.all(np.isfinite(shape)):
            continue
        c = _scale_to_unit(phi_star, shape, masses)
        value = float(np.dot(fmass, c * shape))
        if value > best:
            best, best_g, best_src = value, c * shape, src
    return DualOracleResult(best, StepFunction(grid, best_g), best_src, len(shapes))


def functional_norm(phi, w: Weight, F: DualFunctional, modular: str = "q") -> float:
    """Least ``lam`` with ``P_{phi*}(h / lam) + s_norm / lam <= 1``."""
    h = F.h.pad(w.domain)
    hzero = not np.any(h.values > 0)
    if hzero and F.s_norm == 0:
        return 0.0
    if hzero:
        return F.s_norm
    dual = _dual_modular(complementary(phi), w, h, modular)

    def g(lam):
        return dual(lam) + F.s_norm / lam

    start = max(float(np.max(h.values)), F.s_norm, 1e-300)
    return _least_root(g, start)


@dataclass(frozen=True)
class AttainmentReport:
    norm_F: float
    functional_at_f: float
    residual_i: float
    residual_ii: float
    residual_iii: float
    alignment: Optional[tuple]
    tol: float
    verdict: bool

    def to_dict(self) -> dict:
        out = dict(self.__dict__)
        out["alignment"] = list(self.alignment) if self.alignment is not None else None
        return out


def attainment_check(phi, w: Weight, f: StepFunction, h: StepFunction, s_norm: float,
                     s_value_at_kf: float, k: float, aligned: bool = False, tol: float = 1e-6,
                     modular: str = "q") -> AttainmentReport:
    """Residuals of the three conditions under which ``H + S`` attains its norm at ``f``.

    ``f`` must have Orlicz norm one and ``k`` must lie in its minimising
    interval.  With ``aligned`` the rearrangement equalities
    ``∫hf = ∫h*f* = ∫(h*)⁰f*`` are reported as well and enter the verdict.
    """
    f, h = f.pad(w.domain), h.pad(w.domain)
    cert, K = orlicz_norm(phi, w, f, "lambda")
    if abs(cert.value - 1.0) > 1e-8:
        raise RejectedInputError(f"|f|⁰ = {cert.value!r} differs from 1 by more than 1e-8")
    if K is None or not (K.k_star * (1 - 1e-8) <= k <= K.k_star_star * (1 + 1e-8)):
        raise RejectedInputError(f"k = {k!r} lies outside the minimising interval {K}")
    F = DualFunctional(h, s_norm)
    N = functional_norm(phi, w, F, modular)
    phi_star = complementary(phi)
    dual = _dual_modular(phi_star, w, h, modular)
    P = dual(N)
    res_i = abs(P + s_norm / N - 1.0)
    res_ii = abs(s_norm - s_value_at_kf)
    hs, fs = rearrange(h), rearrange(f)
    hlevel = halperin_level(hs, w).level
    lhs = k * (hlevel * fs).integral() / N
    res_iii = abs(lhs - rho(phi, w, f * k) - P)
    alignment = None
    residuals = [res_i, res_ii, res_iii]
    if aligned:
        plain = (h * f).integral()
        sorted_pair = (hs * fs).integral()
        level_pair = (hlevel * fs).integral()
        alignment = (abs(plain - sorted_pair), abs(sorted_pair - level_pair))
        residuals.extend(alignment)
    value_at_f = (h * f).integral() + s_value_at_kf / k
    verdict = all(r < tol for r in residuals)
    return AttainmentReport(N, value_at_f, res_i, res_ii, res_iii, alignment, tol, verdict)


@dataclass(frozen=True)
class ExtensionGap:
    g_at_1: float
    lambda0: Optional[float]
    status: str  # gap-present | gap-absent | unbounded-gap
    kernel_norm: float

    @property
    def gap_present(self) -> bool:
        return self.status != "gap-absent"

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def extension_gap(phi, w: Weight, h: StepFunction, s_norm: float,
                  kernel_norm: Optional[float] = None, modular: str = "q",
                  slack: float = 1e-12) -> ExtensionGap:
    """Whether adding a singular part of norm ``s_norm`` to ``H`` raises its norm.

    ``g(lam) = P_{phi*}(h / lam) + s_norm / lam``.  If ``g(1) > 1`` the
    returned ``lambda0 > 1`` satisfies ``g(lambda0) > 1`` and so bounds
    ``|H + S|`` from below; otherwise ``|H + S| = |H| = 1``.  A supplied
    ``kernel_norm`` replaces the grid norm of ``h`` in the unit-norm check.
    """
    if s_norm < 0:
        raise DomainError("s_norm must be non-negative")
    h = h.pad(w.domain)
    phi_star = complementary(phi)
    norm = kernel_norm if kernel_norm is not None else luxemburg_norm(phi_star, w, h, "m").value
    if abs(norm - 1.0) > 1e-8:
        raise RejectedInputError(f"|h|_M = {norm!r} differs from 1 by more than 1e-8")
    dual = _dual_modular(phi_star, w, h, modular)

    def g(lam):
        return dual(lam) + s_norm / lam

    g1 = g(1.0)
    if g1 <= 1.0 + slack:
        return ExtensionGap(g1, None, "gap-absent", norm)
    lo, hi = 1.0, 2.0
    while g(hi) > 1.0:
        lo, hi = hi, 2.0 * hi
        if hi > 1e6:
            return ExtensionGap(g1, lo, "unbounded-gap", norm)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi or hi - lo <= 1e-12 * hi:
            break
        if g(mid) > 1.0:
            lo = mid
        else:
            hi = mid
    return ExtensionGap(g1, lo, "gap-present", norm)
