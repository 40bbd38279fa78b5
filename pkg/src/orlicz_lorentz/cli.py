"""``ols``: command-line access to modulars, norms, level functions and counterexamples.

Inputs accept a small inline language besides JSON files::

    --phi power:2 | scaled_power:c:p | exp_n | exp_plain | piecewise:b1,b2:s1,s2,s3 | JSON
    --w   const:c | JSON | path to a weight JSON file
    --f   chi:a:b[:height] | const:c | seq:x1,x2,... | JSON | path (.json or .csv)

Exit status is 0 on success, 1 when a verification inside the command fails
and 2 on invalid input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import instances as inst
from .duality import DualFunctional, extension_gap, functional_norm, holder_audit
from .errors import InvariantError, OrliczLorentzError
from .level import crosscheck_level, halperin_level
from .modular import (
    fundamental,
    fundamental_closed_form,
    luxemburg_norm,
    orlicz_norm,
    p_modular,
    q_modular,
    rho,
)
from .orliczfn import OrliczFunction, complementary, delta2_probe
from .pathology import build_family, comparison_counterexample, delta2_witness_sequence, \
    linf_embedding_check, verify_family
from .stepfn import StepFunction, Weight, characteristic, rearrange
from .suite import run_suite

EXIT_OK, EXIT_FAILED, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    seed: int = 0
    out: Optional[str] = None
    fmt: str = "json"
    T: float = 1.0
    options: dict = field(default_factory=dict)


# input language


def _load_json(text: str):
    path = Path(text)
    if not text.lstrip().startswith(("{", "[")) and path.exists():
        text = path.read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise InputError(f"cannot read {text[:40]!r}: {err}") from err


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as err:
        raise InputError(f"expected comma-separated numbers, got {text!r}") from err


def parse_phi(text: str) -> OrliczFunction:
    head, *rest = text.split(":")
    try:
        if head == "power" and len(rest) == 1:
            return OrliczFunction.power(float(rest[0]))
        if head == "scaled_power" and len(rest) == 2:
            return OrliczFunction.scaled_power(float(rest[0]), float(rest[1]))
        if head == "exp_n" and not rest:
            return OrliczFunction.exp_n()
        if head == "exp_plain" and not rest:
            return OrliczFunction.exp_plain()
        if head == "piecewise" and len(rest) == 2:
            return OrliczFunction.piecewise(_floats(rest[0]), _floats(rest[1]))
    except ValueError as err:
        raise InputError(str(err)) from err
    data = _load_json(text)
    return OrliczFunction.from_descriptor(data)


def parse_weight(text: str, T: float) -> Weight:
    if text.startswith("const:"):
        return Weight.constant(float(text.split(":", 1)[1]), T)
    return Weight.from_dict(_load_json(text))


def parse_step(text: str, T: float) -> StepFunction:
    head, *rest = text.split(":")
    try:
        if head == "chi" and len(rest) in (2, 3):
            height = float(rest[2]) if len(rest) == 3 else 1.0
            return characteristic(float(rest[0]), float(rest[1]), T, height)
        if head == "const" and len(rest) == 1:
            return StepFunction.constant(float(rest[0]), T)
        if head == "seq" and len(rest) == 1:
            return StepFunction.from_sequence(_floats(rest[0]))
    except ValueError as err:
        raise InputError(str(err)) from err
    path = Path(text)
    if path.suffix == ".csv" and path.exists():
        return StepFunction.from_csv(path.read_text())
    return StepFunction.from_dict(_load_json(text))


# output


def _clean(value):
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, np.ndarray):
        return _clean(value.tolist())
    if isinstance(value, StepFunction):
        return value.to_dict()
    if isinstance(value, float) and not math.isfinite(value):
        return repr(value)
    return value


def emit(cfg: RunConfig, payload) -> None:
    if isinstance(payload, str):
        text = payload
    else:
        text = json.dumps(_clean(payload), indent=2, sort_keys=True, default=str) + "\n"
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)


def _csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x
                         for x in row])
    return buf.getvalue()


# commands


def cmd_rearrange(cfg, a):
    f = parse_step(a.f, cfg.T)
    fs = rearrange(f)
    emit(cfg, fs.to_csv() if cfg.fmt == "csv" else fs.to_dict())
    return EXIT_OK


def cmd_level(cfg, a):
    w = parse_weight(a.w, cfg.T)
    f = parse_step(a.f, w.domain)
    dec = halperin_level(f, w)
    check = crosscheck_level(f, w)
    if cfg.fmt == "csv":
        grid = dec.grid
        rows = [[t, fv, lv, wv] for t, fv, lv, wv in zip(
            grid[:-1], f.pad(w.domain).on_grid(grid), dec.level.on_grid(grid), w.on_grid(grid))]
        emit(cfg, _csv(["t", "f", "level", "w"], rows))
    else:
        emit(cfg, {
            "intervals": [iv.__dict__ for iv in dec.intervals],
            "level": dec.level.to_dict(),
            "inverse_weight": dec.inverse_weight.to_dict() if dec.inverse_weight else None,
            "crosscheck": check.__dict__,
        })
    return EXIT_OK if check.agrees else EXIT_FAILED


def cmd_modular(cfg, a):
    phi = parse_phi(a.phi)
    w = parse_weight(a.w, cfg.T)
    f = parse_step(a.f, w.domain)
    out = {"rho": rho(phi, w, f), "Q": q_modular(phi, w, f)}
    status = EXIT_OK
    if a.p_mode != "none":
        out["P"] = p_modular(phi, w, f, mode=a.p_mode)
        out["p_mode"] = a.p_mode
        if out["P"] > out["Q"] * (1 + 1e-9) + 1e-12:
            status = EXIT_FAILED
    emit(cfg, out)
    return status


def cmd_norm(cfg, a):
    phi = parse_phi(a.phi)
    w = parse_weight(a.w, cfg.T)
    f = parse_step(a.f, w.domain)
    if a.kind == "lux":
        out = luxemburg_norm(phi, w, f, a.space).to_dict()
    else:
        cert, K = orlicz_norm(phi, w, f, a.space)
        out = cert.to_dict()
        if K is not None:
            out.update(k_star=K.k_star, k_star_star=K.k_star_star, theta_bar=K.theta_bar)
    emit(cfg, out)
    return EXIT_OK


def cmd_fundamental(cfg, a):
    phi = parse_phi(a.phi)
    w = parse_weight(a.w, cfg.T)
    rows = []
    status = EXIT_OK
    for j in range(a.ladder + 1):
        t = w.domain * 2.0**-j
        try:
            value = fundamental(a.space, a.kind, phi, w, t)
        except InvariantError:
            value = fundamental(a.space, a.kind, phi, w, t, check=False)
            status = EXIT_FAILED
        row = [t, value]
        if a.kind == "lux":
            row.append(fundamental_closed_form(a.space, phi, w, t))
        rows.append(row)
    header = ["t", "value"] + (["closed_form"] if a.kind == "lux" else [])
    emit(cfg, _csv(header, rows))
    return status


def cmd_dualnorm(cfg, a):
    phi = parse_phi(a.phi)
    w = parse_weight(a.w, cfg.T)
    h = parse_step(a.h, w.domain)
    F = DualFunctional(h, a.s_norm, kernel_norm=a.kernel_norm)
    value = functional_norm(phi, w, F)
    out = {"norm": value, "s_norm": a.s_norm}
    hn = a.kernel_norm or luxemburg_norm(complementary(phi), w, h, "m").value
    if hn > 0:
        # the gap is stated for a regular part of norm one
        gap = extension_gap(phi, w, h * (1.0 / hn), a.s_norm / hn,
                            kernel_norm=1.0 if a.kernel_norm else None)
        out["extension_gap"] = {**gap.to_dict(), "normalized_by": hn}
    emit(cfg, out)
    return EXIT_OK


def cmd_holder_audit(cfg, a):
    rng = np.random.default_rng(cfg.seed)
    phis = [parse_phi(a.phi)] if a.phi else list(inst.N_FAMILIES.values())
    rows = []
    status = EXIT_OK
    for i in range(a.cases):
        phi = phis[i % len(phis)]
        f, w = inst.random_pair(rng, a.cells)
        g = inst.random_step(rng, a.cells)
        r = holder_audit(phi, w, f, g)
        rows.append([i, str(phi), r.pairing, r.rearranged_pairing, r.bound_lux_orlicz,
                     r.bound_orlicz_lux, r.holds])
        if not r.holds:
            status = EXIT_FAILED
    emit(cfg, _csv(["case", "phi", "pairing", "rearranged_pairing", "bound_lux_orlicz",
                    "bound_orlicz_lux", "holds"], rows))
    return status


def cmd_delta2(cfg, a):
    phi = parse_phi(a.phi)
    probe = delta2_probe(phi, a.regime, a.K)
    out = {"regime": a.regime, "K": a.K, **probe.__dict__}
    if a.witnesses:
        seq = delta2_witness_sequence(phi, a.witnesses)
        out["witness_sequence"] = seq.to_dict()
    emit(cfg, out)
    return EXIT_OK


def cmd_compare(cfg, a):
    phi1, phi2 = parse_phi(a.phi1), parse_phi(a.phi2)
    w = parse_weight(a.w, cfg.T)
    report = comparison_counterexample(phi1, phi2, w, a.n_max, tuple(a.eps), a.threshold)
    emit(cfg, report.to_dict())
    if report.order_holds:
        return EXIT_OK
    ok = report.q_phi2_below_one and all(report.exceeded.values())
    return EXIT_OK if ok else EXIT_FAILED


def cmd_pathology(cfg, a):
    phi = parse_phi(a.phi)
    w = parse_weight(a.w, cfg.T)
    fam = build_family(phi, w, a.blocks, a.depth)
    report = verify_family(fam, a.s, a.threshold)
    out = {"family": fam.to_dict(), "report": report.to_dict()}
    if a.x:
        out["linf"] = linf_embedding_check(fam, _floats(a.x), a.lam, report.norm_of_sum).to_dict()
    emit(cfg, out)
    ok = report.passed and (a.s == 1 or report.diverges)
    if a.x:
        ok = ok and out["linf"]["passed"]
    return EXIT_OK if ok else EXIT_FAILED


def cmd_suite(cfg, a):
    only = tuple(a.only.split(",")) if a.only else ()
    summary = run_suite(cfg.seed, a.cases, only)
    emit(cfg, summary)
    return EXIT_OK if summary["all_passed"] else EXIT_FAILED


# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for random suites")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json")
    common.add_argument("--T", type=float, default=1.0, help="truncation length of [0, T)")

    parser = argparse.ArgumentParser(prog="ols", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(handler=fn)
        return p

    p = add("rearrange", cmd_rearrange, "decreasing rearrangement of a step function")
    p.add_argument("--f", required=True)

    p = add("level", cmd_level, "level function, level intervals and inverse weight")
    p.add_argument("--f", required=True)
    p.add_argument("--w", required=True)

    p = add("modular", cmd_modular, "rho, Q and P modulars")
    for flag in ("--phi", "--w", "--f"):
        p.add_argument(flag, required=True)
    p.add_argument("--p-mode", default="via_q",
                   choices=("via_q", "convex_opt", "grid_oracle", "none"))

    p = add("norm", cmd_norm, "Luxemburg or Orlicz norm with certificate")
    for flag in ("--phi", "--w", "--f"):
        p.add_argument(flag, required=True)
    p.add_argument("--space", choices=("lambda", "m"), default="lambda")
    p.add_argument("--kind", choices=("lux", "orlicz"), default="lux")

    p = add("fundamental", cmd_fundamental, "norms of 1_(0,t) on a dyadic ladder of t")
    p.add_argument("--phi", required=True)
    p.add_argument("--w", required=True)
    p.add_argument("--space", choices=("lambda", "m"), default="m")
    p.add_argument("--kind", choices=("lux", "orlicz"), default="lux")
    p.add_argument("--ladder", type=int, default=20)

    p = add("dualnorm", cmd_dualnorm, "norm of H + S and the extension gap")
    p.add_argument("--phi", required=True)
    p.add_argument("--w", required=True)
    p.add_argument("--h", required=True)
    p.add_argument("--s-norm", type=float, default=0.0)
    p.add_argument("--kernel-norm", type=float, default=None)

    p = add("holder-audit", cmd_holder_audit, "Hölder bounds on random pairs, as CSV")
    p.add_argument("--phi", default=None, help="default: cycle through the N-function families")
    p.add_argument("--cases", type=int, default=100)
    p.add_argument("--cells", type=int, default=8)

    p = add("delta2", cmd_delta2, "Delta2 probe and witness ladder")
    p.add_argument("--phi", required=True)
    p.add_argument("--regime", choices=("zero", "infinity", "global"), default="infinity")
    p.add_argument("--K", type=float, default=4.0)
    p.add_argument("--witnesses", type=int, default=0, help="length of a witness sequence")

    p = add("compare", cmd_compare, "counterexample to an embedding between M spaces")
    p.add_argument("--phi1", required=True)
    p.add_argument("--phi2", required=True)
    p.add_argument("--w", default="const:1")
    p.add_argument("--n-max", type=int, default=30)
    p.add_argument("--eps", type=float, nargs="+", default=[0.1])
    p.add_argument("--threshold", type=float, default=1e3)

    p = add("pathology", cmd_pathology, "disjoint norm-one family with norm-one sum")
    p.add_argument("--phi", default="exp_n")
    p.add_argument("--w", default="const:1")
    p.add_argument("--blocks", type=int, default=3)
    p.add_argument("--depth", type=int, default=20)
    p.add_argument("--s", type=float, default=1.5)
    p.add_argument("--threshold", type=float, default=1e3)
    p.add_argument("--x", default=None, help="comma-separated sequence for the sup-norm check")
    p.add_argument("--lam", type=float, default=0.9)

    p = add("suite", cmd_suite, "run every invariant check on seeded instances")
    p.add_argument("--cases", type=int, default=100)
    p.add_argument("--only", default=None, help="comma-separated check or module names")
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    seed = args.seed
    if os.environ.get("OLS_SEED"):
        try:
            seed = int(os.environ["OLS_SEED"])
        except ValueError:
            print(f"ols: OLS_SEED must be an integer, got {os.environ['OLS_SEED']!r}",
                  file=sys.stderr)
            return EXIT_INPUT
    cfg = RunConfig(args.command, seed, args.out, args.fmt, args.T, vars(args))
    try:
        return args.handler(cfg, args)
    except InvariantError as err:
        print(f"ols: verification failed: {err}", file=sys.stderr)
        return EXIT_FAILED
    except (InputError, OrliczLorentzError, ValueError, KeyError, TypeError, OSError) as err:
        print(f"ols: {err}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
