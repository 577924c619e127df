"""A fair-looking allocation far from the welfare optimum.

In the approx-gap family each agent can afford kappa items. Splitting the
valuable items evenly is optimal. Giving one agent all of them gets only
5/9 of the optimal product. Its EF1 factor still respects the bound that
an alpha-approximation guarantees.
"""
from budget_fair import approx_gap, nsw, solve_exact
from budget_fair.solver import verify_approx_corollary

inst, ref = approx_gap(4)
opt = solve_exact(inst)
print(f"optimum bundles {[sorted(b) for b in opt.allocation.bundles]}, product {opt.nsw.product}")
print(f"reference bundles {[sorted(b) for b in ref.bundles]}, product {nsw(inst, ref).product}")
rep = verify_approx_corollary(inst, ref)
print(f"approximation ratio {rep.alpha}, ef1_alpha {rep.ef1_alpha}, "
      f"needed at least {rep.alpha / 4}: {'holds' if rep.holds else 'FAILS'}")
