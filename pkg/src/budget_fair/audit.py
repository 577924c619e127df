"""Exact EF / EF1 approximation factors under budget constraints, and PO checks.

For an ordered pair (i, j) the EF envy is the best budget-feasible subset of
``X_j`` under ``v_i``; the EF1 envy ``D`` is the best such subset after
dropping its most valuable item. ``D`` is computed by fixing that most
valuable item (the *anchor*) and solving a knapsack over the items no more
valuable than it.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .knapsack import IntView, knapsack_lexmin, knapsack_value
from .model import (
    Allocation,
    BudgetFairError,
    bundle_value,
    Instance,
    format_num,
    require_feasible,
)

INFINITE = math.inf
Ratio = Union[Fraction, float]

DEFAULT_PO_LIMIT = 2 * 10**6


class POLimitExceeded(BudgetFairError):
    pass


@dataclass(frozen=True)
class EnvyWitness:
    envier: int
    envied: int
    set: tuple[int, ...]
    removed_item: Optional[int]
    envy_value: Fraction

    def to_dict(self) -> dict:
        return {
            "envier": self.envier,
            "envied": self.envied,
            "set": list(self.set),
            "removed_item": self.removed_item,
            "envy_value": format_num(self.envy_value),
        }


@dataclass(frozen=True)
class AuditReport:
    ef_alpha: Ratio
    ef1_alpha: Ratio
    ef_witness: Optional[EnvyWitness] = None
    ef1_witness: Optional[EnvyWitness] = None
    po: Optional[bool] = None

    @property
    def is_ef1(self) -> bool:
        return self.ef1_alpha >= 1

    def to_dict(self) -> dict:
        return {
            "ef_alpha": format_num(self.ef_alpha),
            "ef1_alpha": format_num(self.ef1_alpha),
            "ef_witness": self.ef_witness.to_dict() if self.ef_witness else None,
            "ef1_witness": self.ef1_witness.to_dict() if self.ef1_witness else None,
            "po": self.po,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _check_pair(inst: Instance, i: int, j: int) -> None:
    if not (0 <= i < inst.n and 0 <= j < inst.n):
        raise IndexError(f"agent pair ({i}, {j}) out of range")
    if i == j:
        raise ValueError("envier and envied must differ")


def _ef_envy(view: IntView, X: Allocation, i: int, j: int) -> tuple[int, tuple[int, ...]]:
    return knapsack_lexmin(X.bundles[j], view.vals[i], view.costs, view.budgets[i])


def _anchor_candidates(vi, bundle, a):
    return [g for g in bundle if g != a and 0 < vi[g] <= vi[a]]


def _ef1_envy(view: IntView, X: Allocation, i: int, j: int, witness: bool = True):
    """Scaled EF1 envy ``D`` for (i, j) and, if asked, the lex-min witness set."""
    vi, costs, cap = view.vals[i], view.costs, view.budgets[i]
    bundle = sorted(X.bundles[j])
    anchors = [a for a in bundle if vi[a] > 0 and costs[a] <= cap]
    best = 0
    for a in anchors:
        cands = _anchor_candidates(vi, bundle, a)
        if sum(vi[g] for g in cands) <= best:
            continue
        best = max(best, knapsack_value(cands, vi, costs, cap - costs[a]))
    if best == 0 or not witness:
        return best, None

    best_set = None
    for a in anchors:
        cands = _anchor_candidates(vi, bundle, a)
        if sum(vi[g] for g in cands) < best:
            continue
        val, rest = knapsack_lexmin(cands, vi, costs, cap - costs[a])
        if val != best:
            continue
        S = tuple(sorted((a, *rest)))
        if best_set is None or S < best_set:
            best_set = S
    return best, best_set


def max_envy_ef(inst: Instance, X: Allocation, i: int, j: int) -> tuple[Fraction, frozenset[int]]:
    """Most valuable (to ``i``) subset of ``X_j`` that ``i`` can afford."""
    _check_pair(inst, i, j)
    require_feasible(inst, X)
    view = IntView(inst)
    val, S = _ef_envy(view, X, i, j)
    return view.value(val), frozenset(S)


def _ef1_witness(inst, view, i, j, D, S) -> EnvyWitness:
    vi = view.vals[i]
    top = max(vi[g] for g in S)
    removed = min(g for g in S if vi[g] == top)
    return EnvyWitness(i, j, S, removed, view.value(D))


def max_envy_ef1(inst: Instance, X: Allocation, i: int, j: int) -> tuple[Fraction, Optional[EnvyWitness]]:
    """EF1 envy ``D`` of ``i`` towards ``j`` with its witness, or ``(0, None)``."""
    _check_pair(inst, i, j)
    require_feasible(inst, X)
    view = IntView(inst)
    D, S = _ef1_envy(view, X, i, j)
    if D == 0:
        return Fraction(0), None
    return view.value(D), _ef1_witness(inst, view, i, j, D, S)


def audit_allocation(
    inst: Instance,
    X: Allocation,
    check_po: bool = False,
    po_limit: int = DEFAULT_PO_LIMIT,
) -> AuditReport:
    """Exact EF and EF1 factors of X (``INFINITE`` when no pair constrains).

    Ties between pairs go to the smallest ``(i, j)``.
    """
    require_feasible(inst, X)
    view = IntView(inst)
    own = [sum(view.vals[i][g] for g in X.bundles[i]) for i in range(inst.n)]

    ef_alpha: Ratio = INFINITE
    ef1_alpha: Ratio = INFINITE
    ef_pair = ef1_pair = None
    for i in range(inst.n):
        for j in range(inst.n):
            if i == j:
                continue
            e, _ = _ef_envy(view, X, i, j)
            if e > 0:
                r = Fraction(own[i], e)
                if r < ef_alpha:
                    ef_alpha, ef_pair = r, (i, j)
            d, _ = _ef1_envy(view, X, i, j, witness=False)
            if d > 0:
                r = Fraction(own[i], d)
                if r < ef1_alpha:
                    ef1_alpha, ef1_pair = r, (i, j)

    ef_witness = ef1_witness = None
    if ef_pair is not None:
        i, j = ef_pair
        e, S = _ef_envy(view, X, i, j)
        ef_witness = EnvyWitness(i, j, S, None, view.value(e))
    if ef1_pair is not None:
        i, j = ef1_pair
        d, S = _ef1_envy(view, X, i, j)
        ef1_witness = _ef1_witness(inst, view, i, j, d, S)

    po = is_pareto_optimal(inst, X, po_limit) if check_po else None
    return AuditReport(ef_alpha, ef1_alpha, ef_witness, ef1_witness, po)


def charity_swap_optimal(inst: Instance, X: Allocation, i: int) -> bool:
    """True iff agent ``i`` cannot gain by re-picking from ``X_i ∪ X_0``."""
    require_feasible(inst, X)
    view = IntView(inst)
    vi = view.vals[i]
    pool = X.bundles[i] | X.charity
    best = knapsack_value(pool, vi, view.costs, view.budgets[i])
    return best <= sum(vi[g] for g in X.bundles[i])


def is_pareto_optimal(inst: Instance, X: Allocation, limit: int = DEFAULT_PO_LIMIT) -> bool:
    """Exhaustive Pareto-optimality check over all ``(n+1)^m`` assignments.

    The search is a pruned depth-first enumeration; a branch is cut only
    when some agent can no longer reach its current value or a budget is
    exceeded, so every dominating allocation would still be found.
    """
    require_feasible(inst, X)
    n, m = inst.n, inst.m
    if (n + 1) ** m > limit:
        raise POLimitExceeded(
            f"(n+1)^m = {n + 1}^{m} exceeds the limit {limit}; "
            "use charity_swap_optimal as a necessary condition instead"
        )
    if n == 0:
        return True
    view = IntView(inst)
    for i in range(n):
        if not charity_swap_optimal(inst, X, i):
            return False

    vals, costs, budgets = view.vals, view.costs, view.budgets
    target = [sum(vals[i][g] for g in X.bundles[i]) for i in range(n)]
    # suffix[i][k]: value agent i could still collect from items k..m-1
    suffix = [[0] * (m + 1) for _ in range(n)]
    for i in range(n):
        for k in range(m - 1, -1, -1):
            suffix[i][k] = suffix[i][k + 1] + vals[i][k]
    got = [0] * n
    spent = [0] * n

    def dfs(k: int) -> bool:
        for i in range(n):
            if got[i] + suffix[i][k] < target[i]:
                return False
        if k == m:
            return any(got[i] > target[i] for i in range(n))
        for i in range(n):
            if spent[i] + costs[k] <= budgets[i]:
                spent[i] += costs[k]
                got[i] += vals[i][k]
                found = dfs(k + 1)
                spent[i] -= costs[k]
                got[i] -= vals[i][k]
                if found:
                    return True
        return dfs(k + 1)

    return not dfs(0)


def find_violation(inst: Instance, X: Allocation, factor) -> Optional[EnvyWitness]:
    """First pair (i, j) in index order whose EF1 envy exceeds ``factor * v_i(X_i)``."""
    for i in range(inst.n):
        own = bundle_value(inst, i, X.bundles[i])
        for j in range(inst.n):
            if i == j:
                continue
            D, w = max_envy_ef1(inst, X, i, j)
            if w is not None and D > factor * own:
                return w
    return None
