"""A disjoint family in M_{phi,w} whose sum behaves like the sup norm.

For phi(u) = e^u - 1 - u the Δ2 condition fails, and the blocks f_k built
below have Q(f_k) <= 2^-k while every Q(1.5 f_k) series blows past 10^3.
"""

from orlicz_lorentz import OrliczFunction, Weight
from orlicz_lorentz.pathology import (
    build_family,
    comparison_counterexample,
    delta2_witness_sequence,
    linf_embedding_check,
    verify_family,
)

phi = OrliczFunction.exp_n()
w = Weight.constant(1.0, 1.0)

seq = delta2_witness_sequence(phi, 6)
print("witness points u_n:", [f"{float(u):.4f}" for u in seq.u_seq])

fam = build_family(phi, w, 3, 40)
rep = verify_family(fam, s=1.5, threshold=1e3)
for k, (q, n) in enumerate(zip(rep.block_q, rep.terms_to_threshold), start=1):
    print(f"block {k}: Q(f_k) = {q:.6f}  Q(1.5 f_k) passes 10^3 after {n} terms")
print(f"norm of the sum {rep.norm_of_sum:.6f}, allowance {rep.truncation_allowance:.4f}")

ev = linf_embedding_check(fam, [1.0, 1.0, 1.0], 0.9, rep.norm_of_sum)
print(f"sup-norm comparison: |x|_inf = {ev.sup_norm}, |Tx| = {ev.norm_Tx:.6f}, passed {ev.passed}")

# the reverse embedding M_{phi2} -> M_{phi1} fails when phi1 grows faster
cx = comparison_counterexample(phi, OrliczFunction.power(2), w, 40, (0.1,), 1e3)
print(f"\nQ_phi2(f) = {cx.q_phi2:.4f}; Q_phi1(0.1 f) exceeds 10^3: {cx.exceeded[0.1]}")
