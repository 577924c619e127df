"""Cutting light items into k pieces of equal cost and value.

Items are laid out by density. Each piece takes one slice from the dense
end and one from the middle, with boundaries solved exactly. Every piece
then has the same cost and value, and only a handful of items end up
split. Rounding gives each split item to its lowest-index piece.
"""
import random
from fractions import Fraction

from budget_fair.constructions import fractional_even_partition

rng = random.Random(3)
m, k = 24, 3
costs = [Fraction(rng.randint(1, 4)) for _ in range(m)]
vals = [Fraction(rng.randint(1, 12)) for _ in range(m)]
fp = fractional_even_partition(range(m), k, costs, vals)

print(f"{m} items, total cost {sum(costs)}, total value {sum(vals)}, k={k}")
print(f"boundaries: {[str(b) for b in fp.boundaries]}")
for i, part in enumerate(fp.parts):
    c = sum(costs[j] * y for j, y in part.items())
    v = sum(vals[j] * y for j, y in part.items())
    split = {j: str(part[j]) for j in fp.fractional_items(i)}
    print(f"piece {i}: cost {c}, value {v}, split items {split}")
for i, Y in enumerate(fp.rounded):
    print(f"rounded {i}: {sorted(Y)} cost {sum(costs[j] for j in Y)} value {sum(vals[j] for j in Y)}")
