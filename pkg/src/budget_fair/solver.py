"""Max-NSW allocation under budgets: exact branch-and-bound and a local search."""
from __future__ import annotations

import os
import random
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .audit import INFINITE, AuditReport, audit_allocation, DEFAULT_PO_LIMIT
from .knapsack import IntView
from .model import (
    Allocation,
    BudgetFairError,
    Instance,
    NswValue,
    format_num,
    nsw,
    require_feasible,
)

DEFAULT_NODE_LIMIT = 10**7


class SearchLimitExceeded(BudgetFairError):
    pass


class CorollaryUndefined(BudgetFairError):
    """The reference allocation has fewer positive agents than the optimum."""


def default_node_limit() -> int:
    raw = os.environ.get("BUDGET_FAIR_NODE_LIMIT")
    return int(raw) if raw else DEFAULT_NODE_LIMIT


@dataclass(frozen=True)
class SolveResult:
    allocation: Allocation
    nsw: NswValue
    exact: bool
    nodes_explored: int

    def to_dict(self) -> dict:
        return {
            "allocation": self.allocation.to_dict(),
            "nsw": self.nsw.to_dict(),
            "exact": self.exact,
            "nodes_explored": self.nodes_explored,
        }


def _scaled_key(view: IntView, values) -> tuple[int, int]:
    count, prod = 0, 1
    for v in values:
        if v > 0:
            count += 1
            prod *= v
    return count, prod


def _frac_knapsack_bound(order, vals, costs, start, room) -> int:
    """LP bound on what an agent can still add from items ``start..``."""
    total = 0
    for j in order:
        if j < start:
            continue
        c = costs[j]
        if c <= room:
            room -= c
            total += vals[j]
        else:
            return total + vals[j] * room // c
    return total


def solve_exact(inst: Instance, node_limit: Optional[int] = None) -> SolveResult:
    """Lexicographic Max-NSW allocation by depth-first branch-and-bound.

    Items are decided in index order, each going to charity first and then
    to agents 1..n, so the first optimum met is the lexicographically
    smallest assignment vector. A local-search value primes the incumbent
    without fixing its assignment.
    """
    if node_limit is None:
        node_limit = default_node_limit()
    n, m = inst.n, inst.m
    view = IntView(inst)
    vals, costs, budgets = view.vals, view.costs, view.budgets

    orders = []
    for i in range(n):
        useful = [j for j in range(m) if vals[i][j] > 0]
        free = [j for j in useful if costs[j] == 0]
        paid = sorted(
            (j for j in useful if costs[j] > 0),
            key=lambda j, i=i: (-Fraction(vals[i][j], costs[j]), j),
        )
        orders.append(free + paid)

    seed = solve_local_search(inst, seed=0, max_iters=10_000)
    seed_alloc = seed.allocation.assignment(m)
    seed_key = _scaled_key(
        view, [sum(vals[i][j] for j in seed.allocation.bundles[i]) for i in range(n)]
    )

    best_key = seed_key
    best_assign: Optional[list[int]] = None
    assign = [0] * m
    got = [0] * n
    room = list(budgets)
    nodes = 0
    aborted = False
    cache: dict = {}

    def bound(k: int) -> tuple[int, int]:
        count, prod = 0, 1
        for i in range(n):
            key = (i, k, room[i])
            extra = cache.get(key)
            if extra is None:
                extra = _frac_knapsack_bound(orders[i], vals[i], costs, k, room[i])
                cache[key] = extra
            u = got[i] + extra
            if u > 0:
                count += 1
                prod *= u
        return count, prod

    def dfs(k: int) -> None:
        nonlocal best_key, best_assign, nodes, aborted
        nodes += 1
        if nodes > node_limit:
            aborted = True
            return
        if k == m:
            key = _scaled_key(view, got)
            if key > best_key or (key == best_key and best_assign is None):
                best_key, best_assign = key, assign.copy()
            return
        ub = bound(k)
        if ub < best_key or (ub == best_key and best_assign is not None):
            return
        c = costs[k]
        assign[k] = 0
        dfs(k + 1)
        for i in range(n):
            if aborted:
                return
            if c <= room[i]:
                assign[k] = i + 1
                room[i] -= c
                got[i] += vals[i][k]
                dfs(k + 1)
                room[i] += c
                got[i] -= vals[i][k]
        assign[k] = 0

    limit = sys.getrecursionlimit()
    if m + 100 > limit:
        sys.setrecursionlimit(m + 100)
    dfs(0)

    if best_assign is None:
        # only possible when the search was cut short
        best_assign = list(seed_alloc)
    X = Allocation.from_assignment(best_assign, n)
    return SolveResult(X, nsw(inst, X), not aborted, nodes)


def _max_density(inst: Instance, j: int):
    c = inst.items[j].cost
    best = max((a.values[j] for a in inst.agents), default=Fraction(0))
    if c == 0:
        return INFINITE if best > 0 else Fraction(0)
    return best / c


def solve_local_search(inst: Instance, seed: int = 0, max_iters: int = 10_000) -> SolveResult:
    """Greedy seeding followed by first-improvement hill climbing.

    Moves are single-item shifts (between agents and charity) and swaps of
    two items with different owners. Strict lexicographic NSW gains are
    preferred; when none exists, up to 2m consecutive equal-value moves to
    unvisited allocations are taken, so NSW never decreases. ``seed`` fixes
    the scan order of moves.
    """
    n, m = inst.n, inst.m
    view = IntView(inst)
    vals, costs, budgets = view.vals, view.costs, view.budgets
    rng = random.Random(seed)

    owner = [0] * m
    got = [0] * n
    spent = [0] * n
    for j in sorted(range(m), key=lambda j: (-_max_density(inst, j), j)):
        feasible = [i for i in range(n) if vals[i][j] > 0 and spent[i] + costs[j] <= budgets[i]]
        if not feasible:
            continue
        i = min(feasible, key=lambda i: (got[i], i))
        owner[j] = i + 1
        got[i] += vals[i][j]
        spent[i] += costs[j]

    def key_of(g) -> tuple[int, int]:
        return _scaled_key(view, g)

    current = key_of(got)
    moves = [("shift", j, o) for j in range(m) for o in range(n + 1)]
    moves += [("swap", a, b) for a in range(m) for b in range(a + 1, m)]
    rng.shuffle(moves)

    def move(j: int, old: int, new: int, g: list, s: list) -> None:
        if old:
            g[old - 1] -= vals[old - 1][j]
            s[old - 1] -= costs[j]
        if new:
            g[new - 1] += vals[new - 1][j]
            s[new - 1] += costs[j]

    def try_move(kind: str, a: int, b: int):
        g, s = got.copy(), spent.copy()
        if kind == "shift":
            if owner[a] == b:
                return None
            move(a, owner[a], b, g, s)
            changes = {a: b}
        else:
            oa, ob = owner[a], owner[b]
            if oa == ob:
                return None
            move(a, oa, ob, g, s)
            move(b, ob, oa, g, s)
            changes = {a: ob, b: oa}
        if any(s[i] > budgets[i] for i in range(n)):
            return None
        return key_of(g), g, s, changes

    # strict gains first; on a plateau take unvisited equal-value moves,
    # at most 2m in a row before giving up
    visited = {tuple(owner)}
    sideways = 0
    iters = 0
    while iters < max_iters:
        chosen = None
        plateau = None
        for kind, a, b in moves:
            res = try_move(kind, a, b)
            if res is None:
                continue
            if res[0] > current:
                chosen = res
                break
            if plateau is None and res[0] == current:
                nxt = owner.copy()
                for j, o in res[3].items():
                    nxt[j] = o
                if tuple(nxt) not in visited:
                    plateau = res
        if chosen is None:
            if plateau is None or sideways >= 2 * m:
                break
            chosen = plateau
            sideways += 1
        else:
            sideways = 0
        current, got, spent, changes = chosen
        for j, o in changes.items():
            owner[j] = o
        visited.add(tuple(owner))
        iters += 1

    X = Allocation.from_assignment(owner, n)
    return SolveResult(X, nsw(inst, X), False, iters)


@dataclass
class Theorem1Report:
    solve: SolveResult
    audit: AuditReport
    ef1_ok: bool
    po_ok: bool

    @property
    def passed(self) -> bool:
        return self.ef1_ok and self.po_ok

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "ef1_bound": "1/4",
            "ef1_ok": self.ef1_ok,
            "po_ok": self.po_ok,
            "solve": self.solve.to_dict(),
            "audit": self.audit.to_dict(),
        }


def verify_theorem1(
    inst: Instance, po_limit: int = DEFAULT_PO_LIMIT, node_limit: Optional[int] = None
) -> Theorem1Report:
    """Solve exactly, then check the optimum is 1/4-EF1 and Pareto optimal."""
    res = solve_exact(inst, node_limit)
    if not res.exact:
        raise SearchLimitExceeded(f"solver stopped after {res.nodes_explored} nodes")
    rep = audit_allocation(inst, res.allocation, check_po=True, po_limit=po_limit)
    return Theorem1Report(res, rep, rep.ef1_alpha >= Fraction(1, 4), bool(rep.po))


@dataclass
class CorollaryReport:
    alpha: Fraction
    ef1_alpha: object
    optimum: SolveResult
    holds: bool

    def to_dict(self) -> dict:
        return {
            "alpha": format_num(self.alpha),
            "ef1_alpha": format_num(self.ef1_alpha),
            "required": format_num(self.alpha / 4),
            "holds": self.holds,
            "optimum": self.optimum.to_dict(),
        }


def verify_approx_corollary(
    inst: Instance, alloc: Allocation, node_limit: Optional[int] = None
) -> CorollaryReport:
    """Check that an ``alpha``-approximate Max-NSW allocation is ``alpha/4``-EF1."""
    require_feasible(inst, alloc)
    opt = solve_exact(inst, node_limit)
    if not opt.exact:
        raise SearchLimitExceeded(f"solver stopped after {opt.nodes_explored} nodes")
    mine = nsw(inst, alloc)
    if mine.positive_count != opt.nsw.positive_count:
        raise CorollaryUndefined(
            f"allocation has {mine.positive_count} positive agents, optimum has "
            f"{opt.nsw.positive_count}"
        )
    alpha = mine.product / opt.nsw.product
    rep = audit_allocation(inst, alloc)
    return CorollaryReport(alpha, rep.ef1_alpha, opt, rep.ef1_alpha >= alpha / 4)
