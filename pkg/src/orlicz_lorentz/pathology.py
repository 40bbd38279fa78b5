"""Explicit counterexamples built from fast-growing Orlicz functions.

When ``phi`` fails Delta2 there are ``u_n`` with
``phi((1 + 1/n) u_n) > 2^n phi(u_n)``.  Cutting ``[0, T)`` at points ``t_n``
with ``∫_{t_n}^{t_{n-1}} w = 1 / (2^n phi(u_n))`` and placing ``u_n w`` on
each piece gives functions whose Q modular is at most one while every
larger multiple has divergent modular.  Blocks of such functions with
disjoint supports all have norm one, and so does their sum.

The numbers involved overflow double precision almost immediately (``u_n``
grows like ``n^2`` for ``exp_n``), so families live in mpmath.  Blocks are
stored untranslated: block ``k`` is ``g_k(t - offset_k)``, which keeps tiny
cut points exact next to offsets of order one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import mpmath
import numpy as np

from .errors import DomainError, InvariantError, RejectedInputError
from .level import halperin_level
from .modular import luxemburg_norm, q_modular, q_profile
from .stepfn import StepFunction, Weight, rearrange

__all__ = [
    "WitnessSequence",
    "delta2_witness_sequence",
    "PathologyFamily",
    "build_disjoint_family",
    "build_family",
    "FamilyReport",
    "verify_family",
    "EmbeddingEvidence",
    "linf_embedding_check",
    "ComparisonReport",
    "comparison_counterexample",
    "EmbeddingBound",
    "embedding_bound",
    "check_block_modular",
]

DPS = 50
LN2 = math.log(2.0)


# exact arithmetic on step weights at mpmath precision


def _mp_W(w: Weight, t) -> mpmath.mpf:
    t = mpmath.mpf(t)
    total = mpmath.mpf(0)
    for a, b, v in zip(w.breaks[:-1], w.breaks[1:], w.values):
        a, b = mpmath.mpf(a), mpmath.mpf(b)
        if t <= a:
            break
        total += mpmath.mpf(v) * (min(t, b) - a)
    return total


def _mp_W_inverse(w: Weight, y) -> mpmath.mpf:
    y = mpmath.mpf(y)
    acc = mpmath.mpf(0)
    for a, b, v in zip(w.breaks[:-1], w.breaks[1:], w.values):
        mass = mpmath.mpf(v) * (mpmath.mpf(b) - mpmath.mpf(a))
        if y <= acc + mass:
            return mpmath.mpf(a) + (y - acc) / mpmath.mpf(v)
        acc += mass
    raise DomainError(f"W only reaches {float(acc)}, asked for {float(y)}")


def _w_cells(w: Weight, a, b) -> list[tuple]:
    """Pieces ``(a', b', w_j)`` of ``[a, b)`` on which ``w`` is constant."""
    out = []
    for lo, hi, v in zip(w.breaks[:-1], w.breaks[1:], w.values):
        lo, hi = max(mpmath.mpf(lo), a), min(mpmath.mpf(hi), b)
        if lo < hi:
            out.append((lo, hi, mpmath.mpf(v)))
    return out


def _mp_q(phi, cells: Sequence[tuple], w: Weight, scale=1) -> mpmath.mpf:
    """``Q(scale * f)`` for ``f`` given as unordered ``(length, value)`` cells.

    The cells are sorted into ``f*``, split on the breaks of ``w`` and merged
    into level blocks by the same stack rule as the float implementation.
    """
    scale = mpmath.mpf(scale)
    ordered = sorted((c for c in cells if c[0] > 0 and c[1] > 0), key=lambda c: -c[1])
    breaks = [mpmath.mpf(b) for b in w.breaks]
    pieces = []
    pos = mpmath.mpf(0)
    j = 0
    for length, value in ordered:
        end = pos + length
        while pos < end:
            while j + 1 < len(breaks) and breaks[j + 1] <= pos:
                j += 1
            if j + 1 >= len(breaks):
                raise DomainError("support of f is longer than the domain of w")
            stop = min(end, breaks[j + 1])
            wv = mpmath.mpf(w.values[j])
            pieces.append([value * (stop - pos), wv * (stop - pos)])
            pos = stop
    stack: list[list] = []
    for fm, wm in pieces:
        stack.append([fm, wm])
        while len(stack) > 1 and stack[-2][0] * stack[-1][1] <= stack[-1][0] * stack[-2][1]:
            top = stack.pop()
            stack[-1][0] += top[0]
            stack[-1][1] += top[1]
    return mpmath.fsum(phi.value_mp(scale * fm / wm) * wm for fm, wm in stack)


def _mp_norm(phi, cells, w: Weight, tol: float = 1e-13) -> float:
    """Luxemburg norm from ``_mp_q`` by bisection on the scale."""
    if not any(c[0] > 0 and c[1] > 0 for c in cells):
        return 0.0

    def q(lam):
        return _mp_q(phi, cells, w, 1 / mpmath.mpf(lam))

    hi = 1.0
    while q(hi) > 1:
        hi *= 2.0
    lo = hi
    while q(lo) <= 1:
        lo /= 2.0
    while hi - lo > tol * hi:
        mid = 0.5 * (lo + hi)
        if q(mid) <= 1:
            hi = mid
        else:
            lo = mid
    return hi


# witnesses


@dataclass(frozen=True)
class WitnessSequence:
    u_seq: tuple
    passed: bool
    failed_at: Optional[int]
    log_margins: tuple  # log phi((1+1/n) u_n) - log phi(u_n) - n log 2

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def _witness_holds(phi, n: int, u: float) -> bool:
    with mpmath.workdps(DPS):
        u = mpmath.mpf(u)
        return phi.value_mp((1 + mpmath.mpf(1) / n) * u) > mpmath.mpf(2) ** n * phi.value_mp(u)


def delta2_witness_sequence(phi, n_max: int, search_range=(1e-3, 1e6), start: float = 0.0,
                            ladder_ratio: float = 1.01) -> WitnessSequence:
    """Increasing ``u_n`` with ``phi((1 + 1/n) u_n) > 2^n phi(u_n)`` for ``n <= n_max``.

    Each ``u_n`` is the first point of a geometric ladder over
    ``search_range`` that exceeds ``u_{n-1}`` (and ``start``) and satisfies
    the inequality.  The first ``n`` without a witness is reported instead;
    for Delta2 functions this is evidence that none exist.
    """
    if n_max < 2:
        raise DomainError("n_max must be at least 2")
    lo, hi = search_range
    if not 0 < lo < hi or not ladder_ratio > 1:
        raise DomainError("need 0 < lo < hi and ladder_ratio > 1")
    ladder = lo * ladder_ratio ** np.arange(int(math.log(hi / lo) / math.log(ladder_ratio)) + 1)
    base = np.asarray(phi.log_value(ladder), dtype=float)
    seq: list[float] = []
    margins: list[float] = []
    floor = max(start, 0.0)
    for n in range(1, n_max + 1):
        up = np.asarray(phi.log_value((1 + 1 / n) * ladder), dtype=float)
        margin = up - base - n * LN2
        ok = np.flatnonzero((margin > 0) & (ladder > floor) & (ladder >= start))
        found = None
        for i in ok:
            # float logs pick the candidate, mpmath confirms it
            if _witness_holds(phi, n, ladder[i]):
                found = i
                break
        if found is None:
            return WitnessSequence(tuple(seq), False, n, tuple(margins))
        seq.append(float(ladder[found]))
        margins.append(float(margin[found]))
        floor = ladder[found]
    return WitnessSequence(tuple(seq), True, None, tuple(margins))


# disjoint families


@dataclass(frozen=True, eq=False)
class PathologyFamily:
    """Blocks ``f_k = g_k(. - offset_k)`` with ``g_k = sum u_n w 1_[t_n, t_{n-1})``.

    ``g_k`` runs over ``n = n_k + 1, ..., n_k + depth`` where ``n_k`` is the
    k-th entry of ``subsequence``.  ``masses[n-1]`` is ``1 / (2^n phi(u_n))``
    and ``t_seq[n]`` is ``t_n``; all of these are mpmath numbers.
    """

    phi: object
    w: Weight
    u_seq: tuple
    masses: tuple
    t_seq: tuple
    subsequence: tuple
    offsets: tuple
    depth: int

    @property
    def k_count(self) -> int:
        return len(self.subsequence)

    @property
    def n_max(self) -> int:
        return self.subsequence[-1] + self.depth

    def indices(self, k: int) -> range:
        n_k = self.subsequence[k - 1]
        return range(n_k + 1, n_k + self.depth + 1)

    def support(self, k: int) -> tuple:
        off = self.offsets[k - 1]
        return off, off + self.t_seq[self.subsequence[k - 1]]

    def block_cells(self, k: int, scale=1) -> list[tuple]:
        """``(length, value)`` cells of ``scale * f_k``."""
        out = []
        for n in self.indices(k):
            u = self.u_seq[n - 1] * scale
            for a, b, wv in _w_cells(self.w, self.t_seq[n], self.t_seq[n - 1]):
                out.append((b - a, u * wv))
        return out

    def block_terms(self, k: int, s=1) -> list:
        """Summands ``phi(s u_n) ∫_{t_n}^{t_{n-1}} w`` of ``Q(s f_k)``, since ``f_k* = (f_k*)⁰``."""
        with mpmath.workdps(DPS):
            return [self.phi.value_mp(s * self.u_seq[n - 1]) * self.masses[n - 1]
                    for n in self.indices(k)]

    def block_step(self, k: int, terms: int) -> StepFunction:
        """The untranslated first ``terms`` pieces of ``f_k`` in double precision."""
        idx = list(self.indices(k))[:terms]
        n_last = idx[-1]
        cuts = [float(self.t_seq[n]) for n in [n_last] + idx[::-1][1:]] + [
            float(self.t_seq[idx[0] - 1])]
        if cuts[0] <= 0 or np.any(np.diff(cuts) <= 0):
            raise DomainError("the requested prefix is not representable in double precision")
        breaks = [0.0] + cuts
        grid = np.array(sorted(set(breaks) | {float(b) for b in self.w.breaks if b < cuts[-1]}))
        vals = np.zeros(grid.size - 1)
        for n in idx:
            lo, hi = float(self.t_seq[n]), float(self.t_seq[n - 1])
            mid = 0.5 * (grid[:-1] + grid[1:])
            sel = (mid >= lo) & (mid < hi)
            vals[sel] = float(self.u_seq[n - 1]) * self.w.on_grid(grid)[sel]
        return StepFunction(grid, vals).pad(self.w.domain)

    def to_dict(self) -> dict:
        return {
            "phi": self.phi.to_descriptor(),
            "w": self.w.to_dict(),
            "u_seq": [mpmath.nstr(u, 17) for u in self.u_seq],
            "masses": [mpmath.nstr(m, 17) for m in self.masses],
            "t_seq": [mpmath.nstr(t, 17) for t in self.t_seq],
            "subsequence": list(self.subsequence),
            "offsets": [mpmath.nstr(o, 17) for o in self.offsets],
            "depth": self.depth,
        }


def _cut_points(w: Weight, masses: list, N: int) -> list:
    # t_n = W^{-1}(sum_{n < m <= N} mass_m), so t_N = 0
    tails = [mpmath.mpf(0)] * (N + 1)
    for n in range(N - 1, -1, -1):
        tails[n] = tails[n + 1] + masses[n]
    return [_mp_W_inverse(w, y) for y in tails]


def _greedy(t: list, T, k_count: int, depth: int) -> Optional[list]:
    chosen: list[int] = []
    used = mpmath.mpf(0)
    n = 0
    for _ in range(k_count):
        n += 1
        while n < len(t) and t[n] > (T - used) / 2:
            n += 1
        if n >= len(t):
            return None
        chosen.append(n)
        used += t[n]
    return chosen


def build_disjoint_family(phi, w: Weight, u_seq: Sequence[float], k_count: int, depth: int
                          ) -> PathologyFamily:
    """Cut points, greedy disjoint placement and truncated blocks from given witnesses."""
    if k_count < 1 or depth < 1:
        raise DomainError("k_count and depth must be positive")
    if any(b <= a for a, b in zip(u_seq[:-1], u_seq[1:])):
        raise RejectedInputError("u_seq must be strictly increasing")
    T = w.domain
    with mpmath.workdps(DPS):
        u = [mpmath.mpf(x) for x in u_seq]
        masses = [1 / (mpmath.mpf(2) ** n * phi.value_mp(u[n - 1])) for n in range(1, len(u) + 1)]
        total = mpmath.fsum(masses)
        WT = _mp_W(w, T)
        if total >= WT:
            need = "extend w" if math.isclose(float(w.values[-1]), 0.0) else (
                f"T >= {T + float((total - WT) / mpmath.mpf(w.values[-1])):.6g}")
            raise DomainError(
                f"witness masses sum to {float(total):.6g} but W(T) = {float(WT):.6g}; {need}"
            )
        N = k_count + depth
        while True:
            if N > len(u):
                raise DomainError(f"need at least {N} witnesses, got {len(u)}")
            t = _cut_points(w, masses[:N], N)
            chosen = _greedy(t, mpmath.mpf(T), k_count, depth)
            if chosen is None:
                raise DomainError("not enough cut points for a disjoint placement")
            if chosen[-1] + depth <= N:
                break
            N = chosen[-1] + depth
        offsets = [mpmath.mpf(0)]
        for n_k in chosen[:-1]:
            offsets.append(offsets[-1] + t[n_k])
        fam = PathologyFamily(phi, w, tuple(u[:N]), tuple(masses[:N]), tuple(t), tuple(chosen),
                              tuple(offsets), depth)
        _assert_family(fam)
    return fam


def build_family(phi, w: Weight, k_count: int, depth: int, search_range=(1e-3, 1e6),
                 ladder_ratio: float = 1.01) -> PathologyFamily:
    """Witnesses starting above ``phi^{-1}(2 / W(T))`` followed by ``build_disjoint_family``."""
    WT = w.W(w.domain)
    start = float(phi.inverse(2.0 / WT))
    extra = k_count + depth
    while True:
        seq = delta2_witness_sequence(phi, k_count + depth + extra, search_range, start,
                                      ladder_ratio)
        if not seq.passed:
            raise DomainError(f"no Delta2 witness for n = {seq.failed_at} in {search_range}")
        try:
            return build_disjoint_family(phi, w, seq.u_seq, k_count, depth)
        except DomainError as err:
            if "witnesses" not in str(err) or extra > 8 * (k_count + depth):
                raise
            extra *= 2


def _assert_family(fam: PathologyFamily) -> None:
    phi, w = fam.phi, fam.w
    for n in range(1, fam.n_max + 1):
        if not _witness_holds(phi, n, fam.u_seq[n - 1]):
            raise InvariantError(f"u_{n} is not a witness")
        piece = _mp_W(w, fam.t_seq[n - 1]) - _mp_W(w, fam.t_seq[n])
        if abs(piece - fam.masses[n - 1]) > 1e-10 * fam.masses[n - 1]:
            raise InvariantError(f"cut points t_{n}, t_{n - 1} carry the wrong w-mass")
    for k in range(1, fam.k_count):
        if fam.support(k)[1] > fam.support(k + 1)[0]:
            raise InvariantError(f"blocks {k} and {k + 1} overlap")
    if fam.support(fam.k_count)[1] > w.domain:
        raise InvariantError("blocks leave the domain")
    for k in range(1, fam.k_count + 1):
        if mpmath.fsum(fam.block_terms(k)) > mpmath.mpf(2) ** -k + mpmath.mpf("1e-10"):
            raise InvariantError(f"Q(f_{k}) exceeds 2^-{k}")


def _all_cells(fam: PathologyFamily, coeffs) -> list:
    cells = []
    for k, c in enumerate(coeffs, start=1):
        if c:
            cells.extend(fam.block_cells(k, mpmath.mpf(c)))
    return cells


# verification


def _first_exceeding(partial: list, threshold) -> Optional[int]:
    for i, value in enumerate(partial):
        if value > threshold:
            return i + 1
    return None


def _rising_tail(partial: list) -> bool:
    q = max(1, len(partial) // 4)
    tail = partial[-q - 1:]
    return all(b > a for a, b in zip(tail[:-1], tail[1:]))


@dataclass(frozen=True)
class FamilyReport:
    s: float
    threshold: float
    block_q: tuple
    block_bound_ok: bool
    block_q_recomputed: tuple
    partial_sums: tuple  # per block, Q(s f_k) after 1, 2, ... terms
    terms_to_threshold: tuple
    diverges: bool
    block_norms: tuple
    norm_of_sum: float
    truncation_allowance: float
    norm_in_range: bool
    passed: bool

    def to_dict(self) -> dict:
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in self.__dict__.items()}


def _to_float(x) -> float:
    try:
        return float(x)
    except OverflowError:
        return math.inf


def verify_family(fam: PathologyFamily, s: float = 1.5, threshold: float = 1e3) -> FamilyReport:
    """Block modulars, divergence of ``Q(s f_k)`` and the norm of ``sum f_k``.

    The norm of the sum lies in ``[1 - a, 1]`` with ``a = 1 / (N + 1)`` where
    ``N`` is the last retained index: the ``N``-th witness already pushes
    ``Q((1 + 1/N) f_K)`` above one.
    """
    if not s >= 1:
        raise DomainError("s must be at least 1")
    with mpmath.workdps(DPS):
        qs, recomputed, partials, hits = [], [], [], []
        for k in range(1, fam.k_count + 1):
            qs.append(mpmath.fsum(fam.block_terms(k)))
            recomputed.append(_mp_q(fam.phi, fam.block_cells(k), fam.w))
            acc, partial = mpmath.mpf(0), []
            for term in fam.block_terms(k, s):
                acc += term
                partial.append(acc)
            partials.append(partial)
            hits.append(_first_exceeding(partial, threshold))
        bound_ok = all(q <= mpmath.mpf(2) ** -k + mpmath.mpf("1e-10")
                       for k, q in enumerate(qs, start=1))
        agree = all(abs(a - b) <= mpmath.mpf("1e-20") * (1 + abs(a)) for a, b in zip(qs, recomputed))
        if not agree:
            raise InvariantError("closed-form and level-merge block modulars disagree")
        norms = tuple(_mp_norm(fam.phi, fam.block_cells(k), fam.w)
                      for k in range(1, fam.k_count + 1))
        total = _mp_norm(fam.phi, _all_cells(fam, [1] * fam.k_count), fam.w)
    allowance = 1.0 / (fam.n_max + 1)
    in_range = 1.0 - allowance <= total <= 1.0 + 1e-8
    diverges = all(h is not None for h in hits) and all(_rising_tail(p) for p in partials)
    return FamilyReport(
        s=s,
        threshold=threshold,
        block_q=tuple(_to_float(q) for q in qs),
        block_bound_ok=bool(bound_ok),
        block_q_recomputed=tuple(_to_float(q) for q in recomputed),
        partial_sums=tuple(tuple(_to_float(x) for x in p) for p in partials),
        terms_to_threshold=tuple(hits),
        diverges=bool(diverges),
        block_norms=norms,
        norm_of_sum=total,
        truncation_allowance=allowance,
        norm_in_range=bool(in_range),
        passed=bool(bound_ok and in_range),
    )


@dataclass(frozen=True)
class EmbeddingEvidence:
    sup_norm: float
    norm_Tx: float
    upper_bound: float
    upper_ok: bool
    k0: Optional[int]
    q_below: float  # Q(Tx / (lam |x|_inf))
    partial_sums: tuple  # block k0 summands of that modular, accumulated
    lower_evidence: bool
    passed: bool

    def to_dict(self) -> dict:
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in self.__dict__.items()}


def linf_embedding_check(fam: PathologyFamily, x: Sequence[float], lam: float,
                         norm_of_sum: Optional[float] = None, tol: float = 1e-8
                         ) -> EmbeddingEvidence:
    """Evidence that ``x -> sum |x_k| f_k`` preserves the sup norm.

    Upper bound: ``|Tx| <= |x|_inf |sum f_k|``.  Lower bound: the modular of
    ``Tx / (lam |x|_inf)`` exceeds one, so ``|Tx| >= lam |x|_inf``.
    """
    if not 0 < lam < 1:
        raise RejectedInputError(f"lam must lie in (0, 1), got {lam}")
    if len(x) > fam.k_count:
        raise RejectedInputError(f"x has {len(x)} entries but the family only {fam.k_count} blocks")
    ax = [abs(float(v)) for v in x]
    sup = max(ax, default=0.0)
    if sup == 0:
        return EmbeddingEvidence(0.0, 0.0, 0.0, True, None, 0.0, (), True, True)
    with mpmath.workdps(DPS):
        cells = _all_cells(fam, ax)
        norm_Tx = _mp_norm(fam.phi, cells, fam.w)
        if norm_of_sum is None:
            norm_of_sum = _mp_norm(fam.phi, _all_cells(fam, [1] * fam.k_count), fam.w)
        scale = 1 / (mpmath.mpf(lam) * sup)
        q_below = _mp_q(fam.phi, cells, fam.w, scale)
        k0 = int(np.argmax(ax)) + 1
        acc, partial = mpmath.mpf(0), []
        for term in fam.block_terms(k0, ax[k0 - 1] * scale):
            acc += term
            partial.append(_to_float(acc))
    upper = sup * norm_of_sum
    upper_ok = norm_Tx <= upper * (1 + tol) + tol
    lower = bool(q_below > 1)
    return EmbeddingEvidence(sup, norm_Tx, upper, bool(upper_ok), k0, _to_float(q_below),
                             tuple(partial), lower, bool(upper_ok and lower))


# comparison of modular spaces


@dataclass(frozen=True, eq=False)
class ComparisonReport:
    order_holds: bool
    failed_at: Optional[int]
    a_seq: tuple
    t_seq: tuple
    q_phi2: float
    q_phi2_below_one: bool
    partial_sums: dict  # eps -> accumulated summands of Q_phi1(eps f)
    terms_to_threshold: dict
    exceeded: dict
    f: Optional[StepFunction]
    f_is_level: Optional[bool]

    def to_dict(self) -> dict:
        return {
            "order_holds": self.order_holds,
            "failed_at": self.failed_at,
            "a_seq": list(self.a_seq),
            "t_seq": [mpmath.nstr(t, 17) for t in self.t_seq],
            "q_phi2": self.q_phi2,
            "q_phi2_below_one": self.q_phi2_below_one,
            "partial_sums": {str(k): list(v) for k, v in self.partial_sums.items()},
            "terms_to_threshold": {str(k): v for k, v in self.terms_to_threshold.items()},
            "exceeded": {str(k): v for k, v in self.exceeded.items()},
            "f": self.f.to_dict() if self.f is not None else None,
            "f_is_level": self.f_is_level,
        }


def _order_witness(phi1, phi2, n: int, a) -> bool:
    with mpmath.workdps(DPS):
        a = mpmath.mpf(a)
        return phi1.value_mp(a) > phi2.value_mp(mpmath.mpf(2) ** n * n * n * a)


def comparison_counterexample(phi1, phi2, w: Weight, n_max: int, eps_list=(0.1,),
                              threshold: float = 1e3, search_range=(1.0, 1e6),
                              ladder_ratio: float = 1.01) -> ComparisonReport:
    """``f`` in the M space of ``phi2`` with ``Q_{phi1}(eps f)`` divergent for every ``eps``.

    Needs increasing ``a_n`` with ``phi1(a_n) > phi2(2^n n^2 a_n)``.  The
    pieces carry ``w``-mass ``1 / (2^n phi2(n^2 a_n))``; ``a_n`` is also
    required to make that mass at most ``W(T) / 2^n`` so the pieces fit.
    """
    lo, hi = search_range
    ladder = lo * ladder_ratio ** np.arange(int(math.log(hi / lo) / math.log(ladder_ratio)) + 1)
    l1 = np.asarray(phi1.log_value(ladder), dtype=float)
    WT = w.W(w.domain)
    a_seq: list[float] = []
    floor = 0.0
    for n in range(1, n_max + 1):
        l2 = np.asarray(phi2.log_value((2.0**n * n * n) * ladder), dtype=float)
        fits = np.asarray(phi2.log_value(n * n * ladder), dtype=float) >= -math.log(WT)
        ok = np.flatnonzero((l1 > l2) & fits & (ladder > floor))
        found = next((i for i in ok if _order_witness(phi1, phi2, n, ladder[i])), None)
        if found is None:
            return ComparisonReport(True, n, tuple(a_seq), (), math.nan, False, {}, {}, {}, None,
                                    None)
        a_seq.append(float(ladder[found]))
        floor = ladder[found]
    with mpmath.workdps(DPS):
        a = [mpmath.mpf(v) for v in a_seq]
        masses = [1 / (mpmath.mpf(2) ** n * phi2.value_mp(n * n * a[n - 1]))
                  for n in range(1, n_max + 1)]
        if mpmath.fsum(masses) >= _mp_W(w, w.domain):
            raise DomainError("the pieces do not fit under W(T)")
        t = _cut_points(w, masses, n_max)
        heights = [n * a[n - 1] for n in range(1, n_max + 1)]
        q2 = mpmath.fsum(phi2.value_mp(heights[n - 1]) * masses[n - 1] for n in range(1, n_max + 1))
        cells = []
        for n in range(1, n_max + 1):
            for lo_, hi_, wv in _w_cells(w, t[n], t[n - 1]):
                cells.append((hi_ - lo_, heights[n - 1] * wv))
        q2_check = _mp_q(phi2, cells, w)
        if abs(q2 - q2_check) > mpmath.mpf("1e-20") * (1 + q2):
            raise InvariantError("closed-form and level-merge modulars disagree")
        partial_sums, hits, exceeded = {}, {}, {}
        for eps in eps_list:
            acc, partial = mpmath.mpf(0), []
            for n in range(1, n_max + 1):
                acc += phi1.value_mp(eps * heights[n - 1]) * masses[n - 1]
                partial.append(_to_float(acc))
            partial_sums[eps] = tuple(partial)
            hits[eps] = _first_exceeding(partial, threshold)
            exceeded[eps] = hits[eps] is not None
    f, is_level = _float_profile(w, t, heights)
    return ComparisonReport(False, None, tuple(a_seq), tuple(t), _to_float(q2), bool(q2 < 1),
                            partial_sums, hits, exceeded, f, is_level)


def _float_profile(w: Weight, t: list, heights: list):
    """``sum h_n w 1_[t_n, t_{n-1})`` in doubles with the check ``f = f* = (f*)⁰``."""
    cuts = sorted({0.0, *(float(x) for x in t)} | {float(b) for b in w.breaks if b <= float(t[0])})
    grid = np.array(cuts)
    if grid.size < 2 or np.any(np.diff(grid) <= 0) or len({float(x) for x in t}) != len(t):
        return None, None
    mid = 0.5 * (grid[:-1] + grid[1:])
    vals = np.zeros(mid.size)
    for n in range(1, len(t)):
        sel = (mid >= float(t[n])) & (mid < float(t[n - 1]))
        vals[sel] = float(heights[n - 1])
    f = StepFunction(grid, vals * w.on_grid(grid)).pad(w.domain)
    return f, _same(f, rearrange(f)) and _same(f, halperin_level(f, w).level)


def _same(f: StepFunction, g: StepFunction, rtol: float = 1e-12) -> bool:
    grid = np.union1d(f.breaks, g.breaks)
    a, b = f.on_grid(grid), g.on_grid(grid)
    return bool(np.all(np.abs(a - b) <= rtol * np.maximum(np.abs(a), np.abs(b))))


@dataclass(frozen=True)
class EmbeddingBound:
    norm_phi1: float
    norm_phi2: float
    measure_E: float
    M: float
    bound: float
    holds: bool


def embedding_bound(phi1, phi2, w: Weight, f: StepFunction, b: float, u0: float,
                    tol: float = 1e-8) -> EmbeddingBound:
    """``|f|_{M, phi1} <= M b |f|_{M, phi2}`` when ``phi1(u) <= phi2(b u)`` for ``u >= u0``.

    ``M = phi1(u0) (W(T) - W(T - |E|)) + 1`` where ``E`` is the final
    interval on which ``(f*)⁰ / w <= u0 b |f|_{M, phi2}``.
    """
    n1 = luxemburg_norm(phi1, w, f, "m").value
    n2 = luxemburg_norm(phi2, w, f, "m").value
    prof = q_profile(f, w)
    lengths = np.diff(prof.grid)
    mE = float(np.sum(lengths[prof.values <= u0 * b * n2]))
    T = w.domain
    M = float(phi1(u0)) * (w.W(T) - w.W(max(T - mE, 0.0))) + 1.0
    bound = M * b * n2
    return EmbeddingBound(n1, n2, mE, M, bound, bool(n1 <= bound * (1 + tol) + tol))


def check_block_modular(fam: PathologyFamily, k: int, terms: int, tol: float = 1e-10) -> float:
    """Float ``Q`` of a representable prefix of ``f_k`` against the mpmath sum."""
    g = fam.block_step(k, terms)
    with mpmath.workdps(DPS):
        exact = float(mpmath.fsum(fam.block_terms(k)[:terms]))
    value = q_modular(fam.phi, fam.w, g)
    if abs(value - exact) > tol * (1 + exact):
        raise InvariantError(f"float Q {value!r} differs from the exact prefix sum {exact!r}")
    return value
