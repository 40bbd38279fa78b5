"""Luxemburg and Orlicz norms, the fundamental function and a Hölder audit."""

from orlicz_lorentz import OrliczFunction, StepFunction, Weight, characteristic
from orlicz_lorentz.duality import holder_audit
from orlicz_lorentz.modular import (
    fundamental,
    fundamental_closed_form,
    luxemburg_norm,
    orlicz_norm,
    p_modular,
    q_modular,
    rho,
)

phi = OrliczFunction.power(2)
w = Weight([0, 0.125, 1.0], [4.0, 1.0])
f = StepFunction([0, 0.3, 0.6, 1.0], [0.5, 2.0, 1.0])

print("rho  =", rho(phi, w, f))
print("Q    =", q_modular(phi, w, f))
print("P    =", p_modular(phi, w, f))  # never below Q, and equal for these inputs

for space in ("lambda", "m"):
    lux = luxemburg_norm(phi, w, f, space)
    orl, K = orlicz_norm(phi, w, f, space)
    print(f"\n{space}: luxemburg {lux.value:.12f}  orlicz {orl.value:.12f} ({orl.kind})")
    print(f"  minimisers k in [{K.k_star:.6f}, {K.k_star_star:.6f}]")
    assert lux.value <= orl.value <= 2 * lux.value + 1e-12

# norm of chi_[0,t) as t shrinks
print("\nfundamental function, lambda space, Luxemburg norm")
for t in (0.5, 0.125, 2.0**-10):
    val = fundamental("lambda", "lux", phi, w, t)
    print(f"  t={t:<12g} bisection {val:.12f}  closed form {fundamental_closed_form('lambda', phi, w, t):.12f}")

# pairing against a second function, with the complementary function on the dual side
g = characteristic(0.0, 0.5, 1.0, height=3.0)
rep = holder_audit(phi, w, f, g)
print("\nHölder audit:", rep.to_dict())

# phi = identity: both norms collapse to the L1 norm, the Orlicz one only as k grows
ident = OrliczFunction.power(1)
one = Weight.constant(1.0, 1.0)
cert, _ = orlicz_norm(ident, one, f, "lambda")
print("\nintegral", f.integral())
print("identity Luxemburg norm", luxemburg_norm(ident, one, f, "lambda").value)
print("identity Orlicz norm", cert.value, cert.kind, "largest k", cert.details.get("largest_k"))
