"""Modulars and norms of the Orlicz-Lorentz space and its Köthe dual.

``rho(phi, w, f) = ∫ phi(f*) w`` is the modular of the Orlicz-Lorentz space.
The dual space carries two modulars: ``q_modular = ∫ phi((f*)⁰ / w) w`` built
from the level function, and ``p_modular``, an infimum over non-increasing
weights majorised by ``w``.  Luxemburg norms come from bisection on the
modular and Orlicz norms from root finding on the map

    D(k) = ∫ phi_*(p(k g)) w,   g = f*  or  (f*)⁰ / w,

whose level set ``{D = 1}`` is the interval of minimisers of
``(1 + modular(k f)) / k``.

Every quantity reduces to a *profile*: a non-increasing array of heights with
the ``w``-mass of each cell.  Modulars are positively homogeneous in the
profile, so a norm computation evaluates the level function only once.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _kernels
from .errors import DomainError, InvariantError, ModeError, SizeError
from .level import halperin_level
from .orliczfn import kernel_params
from .stepfn import StepFunction, Weight, characteristic, merge_grids, rearrange

__all__ = [
    "Profile",
    "rho_profile",
    "q_profile",
    "rho",
    "q_modular",
    "q_modular_inverse_weight",
    "p_modular",
    "NormCertificate",
    "KInterval",
    "luxemburg_norm",
    "orlicz_norm",
    "theta_bar",
    "fundamental",
    "fundamental_closed_form",
    "weighted_sum",
]

SPACES = ("lambda", "m")
P_CAPS = {"convex_opt": 32, "grid_oracle": 6}


def weighted_sum(values: np.ndarray, masses: np.ndarray) -> float:
    """``sum values * masses`` with ``inf * 0 = 0`` and saturating ``+inf``."""
    values = np.asarray(values, dtype=float)
    if not (masses > 0).all():
        live = masses > 0
        values, masses = values[live], masses[live]
    if np.isinf(values).any():
        return math.inf
    return float(np.dot(values, masses))


@dataclass(frozen=True, eq=False)
class Profile:
    """Non-increasing heights with the ``w``-mass of the cell carrying each."""

    values: np.ndarray
    masses: np.ndarray
    grid: Optional[np.ndarray] = None

    def modular(self, phi, scale: float = 1.0) -> float:
        if scale == 0:
            return 0.0
        with np.errstate(over="ignore"):
            return weighted_sum(phi(scale * self.values), self.masses)

    def dual_map(self, phi, k: float) -> float:
        """``D(k) = sum phi_*(p(k g)) w`` evaluated through Young's equality."""
        with np.errstate(over="ignore"):
            return weighted_sum(phi.conjugate_at_derivative(k * self.values), self.masses)

    @property
    def is_zero(self) -> bool:
        return not np.any(self.values[self.masses > 0] > 0)

    @property
    def top(self) -> float:
        return float(np.max(self.values))


def _on_weight(f: StepFunction, w: Weight) -> StepFunction:
    if not isinstance(w, Weight):
        raise DomainError("the weight must be a Weight instance")
    if f.domain > w.domain:
        raise DomainError(f"f lives on [0, {f.domain}) but w only on [0, {w.domain})")
    return f.pad(w.domain)


def rho_profile(f: StepFunction, w: Weight) -> Profile:
    fs = rearrange(_on_weight(f, w))
    grid = merge_grids(fs, w)
    return Profile(fs.on_grid(grid), w.on_grid(grid) * np.diff(grid), grid)


def q_profile(f: StepFunction, w: Weight) -> Profile:
    fs = rearrange(_on_weight(f, w))
    dec = halperin_level(fs, w)
    return Profile(dec.ratio_profile, dec.weight.on_grid(dec.grid) * np.diff(dec.grid), dec.grid)


def profile(f: StepFunction, w: Weight, space: str) -> Profile:
    if space == "lambda":
        return rho_profile(f, w)
    if space == "m":
        return q_profile(f, w)
    raise DomainError(f"space must be one of {SPACES}, got {space!r}")


def rho(phi, w: Weight, f: StepFunction) -> float:
    """``∫ phi(f*) w`` as an exact cell sum."""
    return rho_profile(f, w).modular(phi)


def q_modular_inverse_weight(phi, w: Weight, f: StepFunction) -> float:
    """``∫ phi(f* / w^{f*}) w^{f*}``, the second form of the Q modular."""
    fs = rearrange(_on_weight(f, w))
    dec = halperin_level(fs, w)
    grid = dec.grid
    vf = dec.inverse_weight.on_grid(grid)
    fv = fs.on_grid(grid)
    with np.errstate(over="ignore"):
        vals = phi(fv / vf)
    return weighted_sum(vals, vf * np.diff(grid))


def q_modular(phi, w: Weight, f: StepFunction, check: bool = True, tol: float = 1e-10) -> float:
    """``∫ phi((f*)⁰ / w) w``; with ``check`` the inverse-weight form must agree."""
    value = q_profile(f, w).modular(phi)
    if check:
        other = q_modular_inverse_weight(phi, w, f)
        if not (value == other or abs(value - other) <= tol * (1.0 + abs(value))):
            raise InvariantError(f"Q forms disagree: {value!r} vs {other!r}")
    return value


def _perspective(phi, f: np.ndarray, v: np.ndarray, dt: np.ndarray) -> np.ndarray:
    """Objective ``sum v phi(f / v) dt`` for a batch of candidate rows ``v``."""
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        u = np.where(f > 0, f / v, 0.0)
        vals = np.asarray(phi(np.where(np.isfinite(u), u, 0.0)), dtype=float)
        terms = np.where(f > 0, v * vals * dt, 0.0)
        terms = np.where((f > 0) & ~np.isfinite(u), math.inf, terms)
    return np.sum(terms, axis=-1)


def _from_fractions(theta: np.ndarray, dt: np.ndarray, wnodes: np.ndarray) -> np.ndarray:
    """Map ``theta`` in ``(0, 1]^n`` onto feasible ``v``.

    ``v_i`` is the fraction ``theta_i`` of the largest value allowed by
    monotonicity and by the prefix constraint given ``v_1, ..., v_{i-1}``, so
    the box covers the feasible set exactly.
    """
    v = np.empty_like(theta)
    used = np.zeros(theta.shape[0])
    prev = np.full(theta.shape[0], np.inf)
    for i in range(theta.shape[1]):
        room = np.minimum(prev, (wnodes[i] - used) / dt[i])
        v[:, i] = theta[:, i] * np.maximum(room, 0.0)
        used = used + v[:, i] * dt[i]
        prev = v[:, i]
    return v


def _grid_oracle(phi, f: np.ndarray, dt: np.ndarray, wnodes: np.ndarray, levels: int = 8,
                 radius: int = 2) -> float:
    """Exhaust a lattice of feasible ``v`` and refine it around the best point."""
    n = f.size
    ladder = np.arange(1, levels + 1) / levels
    theta = np.array(list(itertools.product(ladder, repeat=n)))
    scores = _perspective(phi, f, _from_fractions(theta, dt, wnodes), dt)
    i = int(np.argmin(scores))
    best, best_t = float(scores[i]), theta[i]
    offsets = np.array(list(itertools.product(range(-radius, radius + 1), repeat=n)), float)
    h = 1.0 / levels
    while h > 1e-15:
        cand = best_t + h * offsets
        cand = cand[np.all((cand > 0) & (cand <= 1.0), axis=1)]
        scores = _perspective(phi, f, _from_fractions(cand, dt, wnodes), dt)
        j = int(np.argmin(scores))
        if scores[j] < best - 1e-15 * abs(best):
            best, best_t = float(scores[j]), cand[j]
        else:
            h /= 2.0
    return best


def p_modular(phi, w: Weight, f: StepFunction, mode: str = "convex_opt", cap: Optional[int] = None,
              iters: int = 10_000) -> float:
    """``inf { ∫ phi(f*/v) v : v non-increasing, v majorised by w }``."""
    if mode == "via_q":
        if not getattr(phi, "is_n_function", False):
            raise ModeError("mode 'via_q' is only valid for N-functions")
        return q_modular(phi, w, f)
    if mode not in P_CAPS:
        raise ModeError(f"unknown mode {mode!r}")
    fs = rearrange(_on_weight(f, w))
    grid = merge_grids(fs, w)
    n = grid.size - 1
    limit = P_CAPS[mode] if cap is None else cap
    if n > limit:
        raise SizeError(f"{mode} is limited to {limit} cells, got {n}")
    dt = np.diff(grid)
    fv = fs.on_grid(grid)
    wv = w.on_grid(grid)
    wnodes = np.cumsum(wv * dt)
    if not np.any(fv > 0):
        return 0.0
    if mode == "grid_oracle":
        return _grid_oracle(phi, fv, dt, wnodes)
    params = kernel_params(phi)
    if params is None:
        raise ModeError(f"{phi} has no compiled form; use mode 'via_q' or 'grid_oracle'")
    code, c, p, br, sl = params
    v0 = halperin_level(fs, w).inverse_weight.on_grid(grid)
    value, _ = _kernels.projected_subgradient(code, c, p, br, sl, fv, dt, wnodes, v0, iters)
    return float(value)


@dataclass(frozen=True)
class KInterval:
    k_star: float
    k_star_star: float
    space: str
    theta_bar: float = 0.0


@dataclass(frozen=True)
class NormCertificate:
    value: float
    kind: str  # trivial | luxemburg | orlicz-attained | orlicz-limit
    witness: float
    modular_at_witness: float
    space: str
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "kind": self.kind,
            "witness": self.witness,
            "modular_at_witness": self.modular_at_witness,
            "space": self.space,
            **({"details": self.details} if self.details else {}),
        }


def _trivial(space: str) -> NormCertificate:
    return NormCertificate(0.0, "trivial", 0.0, 0.0, space)


def _check_phi_values(f: StepFunction):
    if not np.all(np.isfinite(f.values)):
        raise DomainError("norms are defined for finite-valued step functions only")


def luxemburg_from_profile(phi, prof: Profile, space: str, tol: float = 0.0) -> NormCertificate:
    if prof.is_zero:
        return _trivial(space)

    def m(eps):
        return prof.modular(phi, 1.0 / eps)

    hi = prof.top if prof.top > 0 else 1.0
    while m(hi) > 1.0:
        hi *= 2.0
    lo = hi
    while m(lo) <= 1.0:
        lo /= 2.0
        if lo == 0.0:
            raise InvariantError("Luxemburg bracket collapsed")
    # invariant: m(lo) > 1 >= m(hi)
    while hi - lo > tol * hi:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if m(mid) <= 1.0:
            hi = mid
        else:
            lo = mid
    return NormCertificate(hi, "luxemburg", hi, m(hi), space)


def luxemburg_norm(phi, w: Weight, f: StepFunction, space: str = "lambda", tol: float = 0.0
                   ) -> NormCertificate:
    """``inf {eps > 0 : modular(f / eps) <= 1}`` with rho (lambda) or Q (m)."""
    _check_phi_values(f)
    return luxemburg_from_profile(phi, profile(f, w, space), space, tol)


def _bisect_k(D, lo: float, hi: float, strict: bool) -> float:
    """Boundary of ``{D < 1}`` (strict) or ``{D <= 1}`` between ``lo`` and ``hi``."""
    below = (lambda x: D(x) < 1.0) if strict else (lambda x: D(x) <= 1.0)
    for _ in range(2000):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if below(mid):
            lo = mid
        else:
            hi = mid
    return hi if strict else lo


def orlicz_from_profile(phi, prof: Profile, space: str, theta: float = 0.0,
                        delta: float = 1e-6) -> tuple[NormCertificate, Optional[KInterval]]:
    if prof.is_zero:
        return _trivial(space), None

    def D(k):
        return prof.dual_map(phi, k)

    def T(k):
        return (1.0 + prof.modular(phi, k)) / k

    scale = 1.0 / prof.top
    if not math.isfinite(scale):
        raise DomainError(f"largest value {prof.top!r} is too small to scale")
    k_hi = scale
    while D(k_hi) < 1.0 and k_hi < 1e6 * scale:
        k_hi *= 2.0
    if D(k_hi) < 1.0:
        return _orlicz_limit(T, space, scale), None
    k_lo = k_hi
    while D(k_lo) >= 1.0:
        k_lo /= 2.0
        if k_lo == 0.0:
            raise InvariantError("dual map does not vanish near zero")
    k_star = _bisect_k(D, k_lo, k_hi, strict=True)
    top = k_star
    while D(top) <= 1.0 and top < 1e12 * k_star:
        top *= 2.0
    k_star_star = _bisect_k(D, k_lo, top, strict=False) if D(top) > 1.0 else math.inf
    k_star_star = max(k_star_star, k_star)
    values = [T(k_star)]
    if math.isfinite(k_star_star):
        values.append(T(k_star_star))
    value = min(values)
    witness = k_star if values[0] <= value else k_star_star
    neighbours = [T(k_star * (1 - delta)), T(k_star_star * (1 + delta)) if math.isfinite(
        k_star_star) else T(k_star * (1 + delta))]
    local_min = all(t >= value * (1 - 1e-12) for t in neighbours)
    cert = NormCertificate(
        value,
        "orlicz-attained",
        witness,
        prof.modular(phi, witness),
        space,
        {"local_min": bool(local_min)},
    )
    return cert, KInterval(k_star, k_star_star, space, theta)


def _orlicz_limit(T, space: str, scale: float) -> NormCertificate:
    ks = scale * np.logspace(-6, 6, 121)
    ts = np.array([T(k) for k in ks])
    i = int(np.argmin(ts))
    tail = ts[-10:]
    slope = float((np.log(tail[-1]) - np.log(tail[0])) / (np.log(ks[-1]) - np.log(ks[-10])))
    return NormCertificate(
        float(ts[i]), "orlicz-limit", float(ks[i]), float(T(ks[i]) * ks[i] - 1.0), space,
        {"largest_k": float(ks[-1]), "tail_log_slope": slope,
         "tail_nonincreasing": bool(np.all(np.diff(tail) <= 1e-15 * tail[:-1]))},
    )


def orlicz_norm(phi, w: Weight, f: StepFunction, space: str = "lambda"
                ) -> tuple[NormCertificate, Optional[KInterval]]:
    """``inf_k (1 + modular(k f)) / k`` together with the interval of minimisers."""
    _check_phi_values(f)
    prof = profile(f, w, space)
    theta = theta_bar(phi, w, f) if space == "m" else 0.0
    return orlicz_from_profile(phi, prof, space, theta)


def dual_map(phi, w: Weight, f: StepFunction, space: str, k: float) -> float:
    """``D(k)``; exposed for certificate replay."""
    return profile(f, w, space).dual_map(phi, k)


def theta_bar(phi, w: Weight, f: StepFunction) -> float:
    """``inf {lam > 0 : Q(f / lam) < inf}``; zero for finite-valued ``phi``."""
    end = getattr(phi, "domain_end", math.inf)
    prof = q_profile(f, w)
    if not math.isfinite(end) or prof.is_zero:
        return 0.0

    def finite(lam):
        return math.isfinite(prof.modular(phi, 1.0 / lam))

    hi = 1.0
    while not finite(hi):
        hi *= 2.0
    lo = hi
    while finite(lo) and lo > 1e-300:
        lo /= 2.0
    if finite(lo):
        return 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if finite(mid):
            hi = mid
        else:
            lo = mid
    return hi


def fundamental_closed_form(space: str, phi, w: Weight, t: float) -> float:
    """Luxemburg norm of the indicator of ``(0, t)`` in closed form."""
    Wt = w.W(t)
    if space == "lambda":
        return 1.0 / phi.inverse(1.0 / Wt)
    return t / (Wt * phi.inverse(1.0 / Wt))


def fundamental(space: str, norm: str, phi, w: Weight, t: float, check: bool = True,
                tol: float = 1e-8) -> float:
    """Norm of ``1_(0, t)``; Luxemburg values are checked against the closed form."""
    if not 0 < t <= w.domain:
        raise DomainError(f"t must lie in (0, {w.domain}], got {t}")
    chi = characteristic(0.0, t, w.domain)
    if norm == "lux":
        value = luxemburg_norm(phi, w, chi, space).value
        if check:
            closed = fundamental_closed_form(space, phi, w, t)
            if abs(value - closed) > tol * max(1.0, closed):
                raise InvariantError(f"fundamental function {value!r} vs closed form {closed!r}")
        return value
    if norm == "orlicz":
        return orlicz_norm(phi, w, chi, space)[0].value
    raise DomainError(f"norm must be 'lux' or 'orlicz', got {norm!r}")
