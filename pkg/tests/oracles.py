"""Brute-force reference implementations, independent of the package's search code.

Everything here enumerates subsets or assignments directly with Fractions.
"""
from fractions import Fraction
from itertools import combinations
from math import lcm

from budget_fair.families import generate_random
from budget_fair.model import Allocation


def subsets(items):
    items = sorted(items)
    for r in range(len(items) + 1):
        yield from combinations(items, r)


def _val(inst, i, S):
    return sum((inst.agents[i].values[g] for g in S), Fraction(0))


def _cost(inst, S):
    return sum((inst.items[g].cost for g in S), Fraction(0))


def brute_max_envy_ef(inst, X, i, j):
    B = inst.agents[i].budget
    return max(_val(inst, i, S) for S in subsets(X.bundles[j]) if _cost(inst, S) <= B)


def brute_max_envy_ef1(inst, X, i, j):
    B = inst.agents[i].budget
    best = Fraction(0)
    for S in subsets(X.bundles[j]):
        if S and _cost(inst, S) <= B:
            top = max(inst.agents[i].values[g] for g in S)
            best = max(best, _val(inst, i, S) - top)
    return best


def brute_alpha(inst, X, ef1=True):
    """min v_i(X_i)/envy over pairs with positive envy; None means unconstrained."""
    alpha = None
    for i in range(inst.n):
        own = _val(inst, i, X.bundles[i])
        for j in range(inst.n):
            if i == j:
                continue
            e = brute_max_envy_ef1(inst, X, i, j) if ef1 else brute_max_envy_ef(inst, X, i, j)
            if e > 0:
                r = own / e
                alpha = r if alpha is None else min(alpha, r)
    return alpha


def _scaled(inst):
    """Values and costs over common denominators, so sums are plain ints."""
    dv = lcm(1, *(v.denominator for a in inst.agents for v in a.values))
    dc = lcm(1, *(it.cost.denominator for it in inst.items),
             *(a.budget.denominator for a in inst.agents))
    vals = [[int(v * dv) for v in a.values] for a in inst.agents]
    costs = [int(it.cost * dc) for it in inst.items]
    budgets = [int(a.budget * dc) for a in inst.agents]
    return vals, costs, budgets


def _assignments(inst):
    """Every budget-feasible assignment vector in lexicographic order, with
    per-agent (scaled) values. No pruning beyond discarding overspends."""
    n, m = inst.n, inst.m
    vals, costs, budgets = _scaled(inst)
    got, spent, assign = [0] * n, [0] * n, [0] * m

    def rec(j):
        if j == m:
            yield tuple(assign), tuple(got)
            return
        for o in range(n + 1):
            assign[j] = o
            if o:
                a = o - 1
                spent[a] += costs[j]
                got[a] += vals[a][j]
                if spent[a] <= budgets[a]:
                    yield from rec(j + 1)
                spent[a] -= costs[j]
                got[a] -= vals[a][j]
            else:
                yield from rec(j + 1)

    yield from rec(0)


def _key(got):
    count, prod = 0, 1
    for v in got:
        if v > 0:
            count += 1
            prod *= v
    return count, prod


def brute_solve(inst):
    """Lexicographically smallest assignment vector achieving the lexicographic Max-NSW."""
    best, best_assign = None, None
    for assign, got in _assignments(inst):
        key = _key(got)
        if best is None or key > best:
            best, best_assign = key, assign
    dv = lcm(1, *(v.denominator for a in inst.agents for v in a.values))
    count, prod = best
    return (count, Fraction(prod, dv**count)), Allocation.from_assignment(best_assign, inst.n)


def brute_po(inst, X):
    vals, _, _ = _scaled(inst)
    target = [sum(vals[i][g] for g in X.bundles[i]) for i in range(inst.n)]
    for _, got in _assignments(inst):
        if all(v >= t for v, t in zip(got, target)) and got != tuple(target):
            return False
    return True


def ac2_corpus(count=500):
    """Seeded corpus: n in {2,3}, m in {4..8}, kappa in {1,2,3}."""
    for s in range(count):
        n = 2 + s % 2
        m = 4 + (s // 2) % 5
        k = 1 + (s // 10) % 3
        yield s, generate_random(n, m, k, s)
