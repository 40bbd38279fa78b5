"""Named invariant checks over seeded random instances.

Every check draws its instances from its own generator seeded with
``(seed, index)``, so a summary depends only on the seed and the case count
and individual checks can be replayed in isolation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import instances as inst
from .duality import (
    DualFunctional,
    attainment_check,
    dual_norm_oracle,
    extension_gap,
    functional_norm,
    holder_audit,
)
from .level import crosscheck_level, halperin_level, sinnamon_level, upper_hull
from .modular import (
    dual_map,
    luxemburg_norm,
    orlicz_norm,
    p_modular,
    q_modular,
    q_modular_inverse_weight,
    rho,
)
from .orliczfn import OrliczFunction, complementary, order_leq, young_gap
from .pathology import build_family, embedding_bound, verify_family
from .stepfn import (
    StepFunction,
    Weight,
    characteristic,
    distribution,
    hardy_pairing_check,
    merge_grids,
    rearrange,
    submajorizes,
)


@dataclass(frozen=True)
class Check:
    name: str
    module: str
    run: Callable[[np.random.Generator], float]  # returns a residual
    tol: float
    share: float = 1.0  # fraction of the requested cases; 0 runs a fixed fixture once


def _close(a: float, b: float) -> float:
    return abs(a - b) / max(1.0, abs(a), abs(b))


def _grid_gap(f: StepFunction, g: StepFunction) -> float:
    grid = merge_grids(f.pad(max(f.domain, g.domain)), g.pad(max(f.domain, g.domain)))
    return float(np.max(np.abs(f.on_grid(grid) - g.on_grid(grid)), initial=0.0))


# stepfn


def _equimeasurable(rng):
    f = inst.random_step(rng, 12, dyadic=True)
    fs = rearrange(f)
    probes = np.concatenate((f.values, f.values + 0.0625, [0.0]))
    return max(abs(distribution(fs, lam) - distribution(f, lam)) for lam in probes)


def _rearrange_idempotent(rng):
    f = inst.random_step(rng, 12)
    fs = rearrange(f)
    return max(_grid_gap(rearrange(fs), fs), _close(fs.integral(), f.integral()))


def _submajorization_preorder(rng):
    f = inst.random_step(rng, 8, dyadic=True)
    g = f + inst.random_step(rng, 8, dyadic=True)
    h = rearrange(g) + inst.random_step(rng, 8, dyadic=True)
    ok = submajorizes(f, f) and submajorizes(g, f) and submajorizes(h, g) and submajorizes(h, f)
    return 0.0 if ok else 1.0


def _rearrangement_contraction(rng):
    f = inst.random_step(rng, 10)
    top = float(np.max(f.values))
    sups = [float(np.max(rearrange(f - f * (1 - 2.0**-n)).values)) for n in range(1, 12)]
    monotone = all(b <= a for a, b in zip(sups[:-1], sups[1:]))
    return 0.0 if monotone and sups[-1] <= 2.0**-11 * top * (1 + 1e-12) else 1.0


def _hardy(rng):
    f1 = inst.random_step(rng, 10)
    g = inst.random_decreasing(rng, 10)
    return 0.0 if hardy_pairing_check(f1, rearrange(f1), g).holds else 1.0


# orliczfn


def _random_phi(rng):
    choice = int(rng.integers(6))
    if choice < 4:
        return inst.pick_family(rng)[1]
    if choice == 4:
        return OrliczFunction.exp_plain()
    slopes = np.sort(rng.uniform(0.2, 4.0, size=3))
    return OrliczFunction.piecewise(np.sort(rng.uniform(0.2, 3.0, size=2)).tolist(),
                                    slopes.tolist())


def _convexity(rng):
    phi = _random_phi(rng)
    u, v = np.sort(rng.uniform(0, 8, size=2))
    th = rng.uniform()
    lhs = phi(th * u + (1 - th) * v)
    rhs = th * phi(u) + (1 - th) * phi(v)
    return max(0.0, (lhs - rhs) / max(1.0, rhs))


def _derivative_consistency(rng):
    phi = _random_phi(rng)
    u = rng.uniform(0.05, 6)
    hs = 2.0 ** -np.arange(4, 24)
    quot = (phi(u + hs) - phi(u)) / hs
    p = phi.derivative(u)
    # rounding in phi(u + h) - phi(u) is amplified by 1/h
    noise = 8 * np.finfo(float).eps * max(1.0, float(phi(u + hs[0]))) / hs[1:]
    monotone = bool(np.all(np.diff(quot) <= noise + 1e-12 * max(1.0, p)))
    return (0.0 if monotone else 1.0) + abs(quot[-1] - p) / max(1.0, p) * 1e-3


def _biconjugation(rng):
    phi = _random_phi(rng)
    u = np.linspace(0.1, 5, 7)
    back = complementary(complementary(phi))(u)
    return float(np.max(np.abs(back - phi(u)) / np.maximum(phi(u), 1e-300)))


def _young(rng):
    phi = _random_phi(rng)
    u, v = rng.uniform(0, 5, size=2)
    gap = young_gap(phi, u, v)
    on_graph = abs(young_gap(phi, u, float(phi.derivative(u))))
    return max(0.0, -gap) + on_graph / max(1.0, float(phi(u)))


def _inverse_roundtrip(rng):
    phi = _random_phi(rng)
    u = rng.uniform(0.01, 10)
    return abs(float(phi.inverse(phi(u))) - u) / u


# level


def _level_monotone(rng):
    f, w = inst.random_pair(rng, 10)
    g = f + inst.random_step(rng, 10)
    lf, lg = halperin_level(f, w).level, halperin_level(g, w).level
    grid = merge_grids(lf, lg)
    return float(np.max(lf.on_grid(grid) - lg.on_grid(grid)).clip(min=0.0))


def _majorant(rng):
    f, w = inst.random_pair(rng, 10)
    grid = merge_grids(f, w)
    dt = np.diff(grid)
    wv = w.on_grid(grid)
    x = np.concatenate(([0.0], np.cumsum(wv * dt)))
    y = np.concatenate(([0.0], np.cumsum((f / w).on_grid(grid) * wv * dt)))
    hull = upper_hull(x, y)
    s = sinnamon_level(f / w, w)
    hv = np.concatenate(([0.0], np.cumsum(s.on_grid(grid) * wv * dt)))
    scale = max(1.0, float(np.max(y)))
    above = float(np.max(y - hv)) / scale
    touch = float(np.max(np.abs(hv[hull] - y[hull]))) / scale
    # lowering an interior vertex leaves some node above the new hull
    tight = 0.0
    for i in hull[1:-1]:
        y2 = hv.copy()
        a, b = hull[hull.index(i) - 1], hull[hull.index(i) + 1]
        lowered = y[i] - 1e-6 * scale
        y2[a:i + 1] = np.interp(x[a:i + 1], [x[a], x[i]], [hv[a], lowered])
        y2[i:b + 1] = np.interp(x[i:b + 1], [x[i], x[b]], [lowered, hv[b]])
        if not np.any(y > y2 + 1e-12 * scale):
            tight = 1.0
    return max(above, 0.0) + touch + tight


def _front_loading(rng):
    f, w = inst.random_pair(rng, 10)
    lv = halperin_level(f, w).level
    grid = merge_grids(f.pad(w.domain), lv)
    pf, pl = f.pad(w.domain).primitive(grid), lv.primitive(grid)
    scale = max(1.0, pf[-1])
    return max(0.0, float(np.max(pf - pl)) / scale) + abs(pf[-1] - pl[-1]) / scale


def _level_idempotent(rng):
    f, w = inst.random_pair(rng, 10)
    lv = halperin_level(f, w).level
    return _grid_gap(halperin_level(lv, w).level, lv) / max(1.0, float(np.max(lv.values)))


def _level_crosscheck(rng):
    f, w = inst.random_pair(rng, 64)
    return crosscheck_level(f, w).max_deviation


# modular


def _p_le_q(rng):
    _, phi = inst.pick_family(rng)
    f, w = inst.cells_capped(rng, 8)
    P = p_modular(phi, w, f)
    Q = q_modular(phi, w, f)
    return max(0.0, P - Q) + abs(P - Q) / (1 + Q) * 1e-2


def _q_forms(rng):
    _, phi = inst.pick_family(rng)
    f, w = inst.random_pair(rng, 10)
    a, b = q_modular(phi, w, f, check=False), q_modular_inverse_weight(phi, w, f)
    return abs(a - b) / (1 + abs(a))


def _norm_axioms(rng):
    _, phi = inst.pick_family(rng)
    f, w = inst.nonzero_pair(rng, 8)
    g = inst.random_step(rng, 8)
    c = float(rng.uniform(0.1, 5))
    worst = 0.0
    for space in ("lambda", "m"):
        def n(h):
            return luxemburg_norm(phi, w, h, space).value
        nf, ng, nfg = n(f), n(g), n(f + g)
        worst = max(worst, (nfg - nf - ng) / (1 + nf + ng))
        worst = max(worst, _close(n(f * c), c * nf) * 1e-2)
        worst = max(worst, (nf - nfg) / (1 + nf))
        worst = max(worst, _close(n(rearrange(f)), nf))
    return max(worst, 0.0)


def _sandwich(rng):
    _, phi = inst.pick_family(rng)
    f, w = inst.nonzero_pair(rng, 8)
    worst = 0.0
    for space in ("lambda", "m"):
        lux = luxemburg_norm(phi, w, f, space).value
        orl = orlicz_norm(phi, w, f, space)[0].value
        worst = max(worst, (lux - orl) / lux, (orl - 2 * lux) / lux)
    return max(worst, 0.0)


def _unit_ball(rng):
    _, phi = inst.pick_family(rng)
    f, w = inst.nonzero_pair(rng, 8)
    f = f * (float(rng.uniform(0.1, 1.0)) / luxemburg_norm(phi, w, f, "m").value)
    nm = luxemburg_norm(phi, w, f, "m").value
    P = p_modular(phi, w, f, mode="via_q")
    return max(0.0, P - q_modular(phi, w, f), q_modular(phi, w, f) - nm)


def _vanishing(rng):
    _, phi = inst.pick_family(rng)
    f, w = inst.nonzero_pair(rng, 8)
    worst = 0.0
    for k in (1, 2, 10):
        qs = [q_modular(phi, w, f * (k * 2.0**-n)) for n in range(0, 60, 6)]
        if not all(b <= a for a, b in zip(qs[:-1], qs[1:])):
            return 1.0
        worst = max(worst, qs[-1])
    return worst


def _identity_is_l1(rng):
    f, w = inst.nonzero_pair(rng, 10)
    lux = luxemburg_norm(OrliczFunction.power(1), w, f, "m").value
    return _close(lux, f.integral())


def _k_interval(rng):
    _, phi = inst.pick_family(rng)
    f, w = inst.nonzero_pair(rng, 8)
    worst = 0.0
    for space in ("lambda", "m"):
        cert, K = orlicz_norm(phi, w, f, space)
        d = 1e-6 * K.k_star
        below = dual_map(phi, w, f, space, K.k_star - d)
        above = dual_map(phi, w, f, space, K.k_star_star + d)
        worst = max(worst, 0.0 if below < 1 < above else 1.0)
        T = lambda k: (1 + rho(phi, w, f * k) if space == "lambda" else 1 + q_modular(
            phi, w, f * k, check=False)) / k
        outside = np.concatenate((K.k_star * np.logspace(-3, -0.01, 10),
                                  K.k_star_star * np.logspace(0.01, 3, 11)))
        base = cert.value
        worst = max(worst, max(0.0, max(base - T(k) for k in outside) / base))
    return worst


# duality


def _holder(rng):
    _, phi = inst.pick_family(rng)
    f, w = inst.random_pair(rng, 8)
    g = inst.random_step(rng, 8)
    return 0.0 if holder_audit(phi, w, f, g).holds else 1.0


def _oracle(rng):
    _, phi = inst.pick_family(rng)
    f, w = inst.nonzero_pair(rng, 6)
    value = dual_norm_oracle(phi, w, f, 8, rng).value
    target = orlicz_norm(phi, w, f, "m")[0].value
    return max(0.0, value - target - 1e-8) + max(0.0, target - value) * 1e-4


def _functional_vs_lux(rng):
    _, phi = inst.pick_family(rng)
    h, w = inst.nonzero_pair(rng, 8)
    a = functional_norm(phi, w, DualFunctional(h))
    b = luxemburg_norm(complementary(phi), w, h, "m").value
    return _close(a, b)


def attainment_fixtures() -> list[tuple[str, bool, object]]:
    """``(label, expected verdict, report)`` for the built-in attainment fixtures."""
    p2 = OrliczFunction.power(2)
    kink = OrliczFunction.piecewise([1.0], [1.0, 1.5])
    w1, w4 = Weight.constant(1.0, 1.0), Weight.constant(1.0, 4.0)
    chi = characteristic(0, 1, 1)
    f4, h4 = StepFunction.constant(0.2, 4), StepFunction.constant(1.175, 4)
    spike = StepFunction([0, 0.1, 4], [10.0, 1.175])
    return [
        ("smooth", True, attainment_check(p2, w1, chi * 0.5, chi, 0.0, 0.0, 2.0, aligned=True)),
        ("kinked", True, attainment_check(kink, w4, f4, h4, 0.3, 0.3, 5.0, aligned=True)),
        ("break-i", False, attainment_check(kink, w4, f4, spike, 0.3, 0.3, 5.0)),
        ("break-ii", False, attainment_check(kink, w4, f4, h4, 0.3, 0.2, 5.0)),
        ("break-iii", False, attainment_check(p2, w1, chi * 0.5, StepFunction([0, 0.5, 1],
                                                                             [1.5, 0.5]),
                                              0.0, 0.0, 2.0)),
    ]


def _attainment(rng):
    return float(sum(r.verdict != expected for _, expected, r in attainment_fixtures()))


def _extension_dichotomy(rng):
    _, phi = inst.pick_family(rng)
    h, w = inst.nonzero_pair(rng, 8)
    star = complementary(phi)
    h = h * (1.0 / luxemburg_norm(star, w, h, "m").value)
    s = float(rng.choice([0.0, rng.uniform(0, 1)]))
    gap = extension_gap(phi, w, h, s, kernel_norm=1.0)
    present = gap.status != "gap-absent" and gap.lambda0 is not None and gap.lambda0 > 1
    absent = gap.status == "gap-absent" and gap.g_at_1 <= 1 + 1e-12
    return 0.0 if present != absent else 1.0


# pathology

_FAMILY = {}


def _family():
    if "fam" not in _FAMILY:
        _FAMILY["fam"] = build_family(OrliczFunction.exp_n(), Weight.constant(1.0, 1.0), 3, 12)
    return _FAMILY["fam"]


def _family_invariants(rng):
    import mpmath

    fam = _family()
    worst = 0.0
    with mpmath.workdps(50):
        for n in range(1, fam.n_max + 1):
            u = fam.u_seq[n - 1]
            lhs = fam.phi.value_mp((1 + mpmath.mpf(1) / n) * u)
            worst = max(worst, 0.0 if lhs > 2**n * fam.phi.value_mp(u) else 1.0)
            piece = (fam.t_seq[n - 1] - fam.t_seq[n]) * fam.w.values[0]
            target = 1 / (2**n * fam.phi.value_mp(u))
            worst = max(worst, float(abs(piece - target) / target))
    for k in range(1, fam.k_count):
        worst = max(worst, 0.0 if fam.support(k)[1] <= fam.support(k + 1)[0] else 1.0)
    report = verify_family(fam, 1.0)
    return worst + (0.0 if report.block_bound_ok else 1.0)


def _forward_embedding(rng):
    p2, p3 = OrliczFunction.power(2), OrliczFunction.power(3)
    if not order_leq(p2, p3, "infinity", 1.0, 1.0).passed:
        return 1.0
    f, w = inst.nonzero_pair(rng, 8)
    r = embedding_bound(p2, p3, w, f, 1.0, 1.0)
    return max(0.0, r.norm_phi1 - r.bound) / r.bound


def _family_monotone(rng):
    fam = _family()
    worst = 0.0
    prev = None
    for s in (1.0, 1.2, 1.5):
        sums = verify_family(fam, s).partial_sums
        for p in sums:
            worst = max(worst, 0.0 if all(b >= a for a, b in zip(p[:-1], p[1:])) else 1.0)
        if prev is not None:
            for p, q in zip(prev, sums):
                worst = max(worst, 0.0 if all(b >= a for a, b in zip(p, q)) else 1.0)
        prev = sums
    return worst


CHECKS = [
    Check("equimeasurability", "stepfn", _equimeasurable, 0.0),
    Check("rearrange-idempotent", "stepfn", _rearrange_idempotent, 1e-12),
    Check("submajorization-preorder", "stepfn", _submajorization_preorder, 0.0),
    Check("rearrangement-contraction", "stepfn", _rearrangement_contraction, 0.0),
    Check("hardy-pairing", "stepfn", _hardy, 0.0),
    Check("convexity", "orliczfn", _convexity, 1e-12),
    Check("derivative-consistency", "orliczfn", _derivative_consistency, 1e-6),
    Check("bi-conjugation", "orliczfn", _biconjugation, 1e-6, 0.05),
    Check("young-inequality", "orliczfn", _young, 1e-9),
    Check("inverse-roundtrip", "orliczfn", _inverse_roundtrip, 1e-10),
    Check("level-monotone", "level", _level_monotone, 1e-12),
    Check("hull-majorant", "level", _majorant, 1e-12),
    Check("level-front-loading", "level", _front_loading, 1e-12),
    Check("level-idempotent", "level", _level_idempotent, 1e-12),
    Check("level-crosscheck", "level", _level_crosscheck, 1e-10),
    Check("p-le-q", "modular", _p_le_q, 1e-8, 0.1),
    Check("q-forms", "modular", _q_forms, 1e-10),
    Check("norm-axioms", "modular", _norm_axioms, 1e-8, 0.2),
    Check("norm-sandwich", "modular", _sandwich, 1e-8, 0.5),
    Check("unit-ball-modulars", "modular", _unit_ball, 1e-8),
    Check("modular-vanishing", "modular", _vanishing, 1e-12),
    Check("identity-is-l1", "modular", _identity_is_l1, 1e-10),
    Check("k-interval", "modular", _k_interval, 1e-9, 0.1),
    Check("holder", "duality", _holder, 0.0, 0.2),
    Check("dual-oracle", "duality", _oracle, 1e-8, 0.1),
    Check("functional-vs-luxemburg", "duality", _functional_vs_lux, 1e-8, 0.5),
    Check("attainment-fixtures", "duality", _attainment, 0.0, 0.0),
    Check("extension-dichotomy", "duality", _extension_dichotomy, 0.0, 0.5),
    Check("family-invariants", "pathology", _family_invariants, 1e-10, 0.0),
    Check("forward-embedding", "pathology", _forward_embedding, 1e-8, 0.5),
    Check("family-monotone", "pathology", _family_monotone, 0.0, 0.0),
]


def runs_for(check: Check, cases: int) -> int:
    if cases <= 0:
        return 0
    if check.share == 0:
        return 1
    return max(1, math.ceil(cases * check.share))


def run_suite(seed: int, cases: int, only: tuple = ()) -> dict:
    """Summary with pass and fail counts and the worst residual of every check."""
    rows = []
    for index, check in enumerate(CHECKS):
        if only and check.name not in only and check.module not in only:
            continue
        runs = runs_for(check, cases)
        if runs == 0:
            continue
        rng = np.random.default_rng([seed, index])
        passed = failed = 0
        worst = 0.0
        last_error = None
        for _ in range(runs):
            try:
                residual = float(check.run(rng))
            except Exception as err:  # a crash counts as a failed case
                residual = math.inf
                last_error = f"{type(err).__name__}: {err}"
            worst = max(worst, residual)
            if residual <= check.tol:
                passed += 1
            else:
                failed += 1
        row = {
            "name": check.name,
            "module": check.module,
            "runs": runs,
            "passed": passed,
            "failed": failed,
            "worst_residual": worst,
            "tolerance": check.tol,
        }
        if last_error:
            row["last_error"] = last_error
        rows.append(row)
    return {
        "seed": seed,
        "cases": cases,
        "checks": rows,
        "all_passed": all(r["failed"] == 0 for r in rows),
    }
