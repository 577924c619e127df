"""Exact 0/1 knapsack on integer-scaled data.

Values and costs are Fractions in the model; here they are rescaled to
integers once per instance (:class:`IntView`) so the inner loops stay in
plain ``int`` arithmetic.
"""
from __future__ import annotations

import math
import sys
from fractions import Fraction
from typing import Iterable, Sequence

from .model import Instance


class IntView:
    """Integer image of an instance.

    One common value scale is used for every agent so that products over
    the same number of agents stay comparable after scaling.
    """

    def __init__(self, inst: Instance):
        value_dens = [v.denominator for a in inst.agents for v in a.values]
        cost_dens = [c.denominator for c in inst.costs] + [b.denominator for b in inst.budgets]
        self.vscale = math.lcm(1, *value_dens)
        self.cscale = math.lcm(1, *cost_dens)
        self.vals = [
            [int(v * self.vscale) for v in a.values] for a in inst.agents
        ]
        self.costs = [int(c * self.cscale) for c in inst.costs]
        self.budgets = [int(b * self.cscale) for b in inst.budgets]

    def value(self, scaled: int) -> Fraction:
        return Fraction(scaled, self.vscale)

    def cost(self, scaled: int) -> Fraction:
        return Fraction(scaled, self.cscale)


def _density_order(items: Sequence[int], vals: Sequence[int], costs: Sequence[int]) -> list[int]:
    return sorted(items, key=lambda j: (-Fraction(vals[j], costs[j]), j))


def knapsack_value(
    items: Iterable[int], vals: Sequence[int], costs: Sequence[int], cap: int
) -> int:
    """Maximum of ``sum(vals[S])`` over ``S ⊆ items`` with ``sum(costs[S]) <= cap``.

    Branch-and-bound over items sorted by density, pruned with the
    fractional (LP) relaxation.
    """
    if cap < 0:
        return -1
    base = 0
    cand = []
    for j in items:
        v = vals[j]
        if v <= 0:
            continue
        c = costs[j]
        if c == 0:
            base += v
        elif c <= cap:
            cand.append(j)
    if sum(costs[j] for j in cand) <= cap:
        return base + sum(vals[j] for j in cand)

    order = _density_order(cand, vals, costs)
    V = [vals[j] for j in order]
    C = [costs[j] for j in order]
    N = len(order)

    def frac_bound(k: int, room: int) -> int:
        total = 0
        for p in range(k, N):
            if C[p] <= room:
                room -= C[p]
                total += V[p]
            else:
                return total + V[p] * room // C[p]
        return total

    # greedy incumbent
    best = 0
    room = cap
    for p in range(N):
        if C[p] <= room:
            room -= C[p]
            best += V[p]

    def dfs(k: int, room: int, val: int) -> None:
        nonlocal best
        if val > best:
            best = val
        if k == N or val + frac_bound(k, room) <= best:
            return
        if C[k] <= room:
            dfs(k + 1, room - C[k], val + V[k])
        dfs(k + 1, room, val)

    limit = sys.getrecursionlimit()
    if N + 100 > limit:
        sys.setrecursionlimit(N + 100)
    dfs(0, cap, 0)
    return base + best


def knapsack_lexmin(
    items: Iterable[int], vals: Sequence[int], costs: Sequence[int], cap: int
) -> tuple[int, tuple[int, ...]]:
    """Optimal value and the lexicographically smallest optimal set.

    Zero-valued items never appear in the returned set.
    """
    cand = sorted(j for j in items if vals[j] > 0 and costs[j] <= cap)
    if cap < 0:
        return -1, ()
    if sum(costs[j] for j in cand) <= cap:
        return sum(vals[j] for j in cand), tuple(cand)
    best = knapsack_value(cand, vals, costs, cap)
    suffix_value = [0] * (len(cand) + 1)
    for p in range(len(cand) - 1, -1, -1):
        suffix_value[p] = suffix_value[p + 1] + vals[cand[p]]

    chosen = []
    cur, room = 0, cap
    for p, j in enumerate(cand):
        if cur == best:
            break
        if costs[j] > room or cur + suffix_value[p] < best:
            continue
        rest = knapsack_value(cand[p + 1:], vals, costs, room - costs[j])
        if cur + vals[j] + rest == best:
            chosen.append(j)
            cur += vals[j]
            room -= costs[j]
    return best, tuple(chosen)
