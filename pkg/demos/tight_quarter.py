"""How close can a Max-NSW allocation get to the 1/4 floor?

The tight-quarter family has one big item and 1/eps small ones. Both agents
can afford either the big item or all the small ones. As eps shrinks, the
optimum's EF1 factor falls toward 1/4 but never reaches it.
"""
from fractions import Fraction

from budget_fair import audit_allocation, solve_exact, tight_quarter

inst, ref = tight_quarter(Fraction(1, 10))
opt = solve_exact(inst)
print(f"eps=1/10: {inst.m} items, exact optimum {[sorted(b) for b in opt.allocation.bundles]}")
print(f"  product {opt.nsw.product}, same as reference: {opt.allocation == ref}")

print("\nEF1 factor of the optimum as eps shrinks:")
for d in (2, 10, 100, 1000):
    eps = Fraction(1, d)
    inst, ref = tight_quarter(eps)
    rep = audit_allocation(inst, ref)
    print(f"  eps=1/{d:<5} alpha={str(rep.ef1_alpha):>10} = {float(rep.ef1_alpha):.6f}")
print("Every value stays above 0.25.")
