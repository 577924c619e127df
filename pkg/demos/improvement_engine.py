"""Turning an EF1 violation into a strictly better allocation.

Start from a poor allocation of the tight-quarter instance. The auditor
finds a pair whose envy exceeds four times the envier's own value. The
quarter construction then hands the envier part of the envied bundle, and
the Nash welfare goes up. Repeating this climbs toward a fairer allocation.
"""
from fractions import Fraction

from budget_fair import Allocation, audit_allocation, find_violation, nsw, tight_quarter
from budget_fair.constructions import construct_improvement_quarter

inst, _ = tight_quarter(Fraction(1, 10))
X = Allocation((frozenset({1}), frozenset(range(2, 11))), frozenset({0}))

step = 0
while True:
    rep = audit_allocation(inst, X)
    print(f"step {step}: bundles {[sorted(b) for b in X.bundles]}, "
          f"product {nsw(inst, X).product}, ef1_alpha {rep.ef1_alpha}")
    w = find_violation(inst, X, Fraction(4))
    if w is None:
        print("no pair violates 1/4-EF1 any more")
        break
    X = construct_improvement_quarter(inst, X, (w.envier, w.envied, w.set))
    step += 1
