"""Constructive steps behind the EF1 guarantees of Max-NSW allocations.

Each function here is one building block of an exchange argument: given a
pair of agents where the envier wants a set ``T`` out of the other agent's
bundle much more than its own bundle, the ``construct_improvement_*``
functions rebuild the allocation so that the lexicographic NSW strictly
grows. Value vectors are indexed by item; sets are item indices.

Sorting ties are always broken by item index so every result is
deterministic.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .model import (
    Allocation,
    BudgetFairError,
    Instance,
    bundle_cost,
    bundle_value,
    require_feasible,
)


class PreconditionError(BudgetFairError, ValueError):
    pass


class DegenerateConstruction(BudgetFairError):
    pass


def _v(v: Sequence, S: Iterable[int]) -> Fraction:
    return sum((Fraction(v[j]) for j in S), Fraction(0))


# --------------------------------------------------------------------------
# splitting a set in two


@dataclass(frozen=True)
class PairPartition:
    t: int
    part1: frozenset[int]
    part2: frozenset[int]


def balanced_pair_partition(T: Iterable[int], v: Sequence) -> PairPartition:
    """Split ``T`` into a top item ``t`` and two alternating halves.

    Items are sorted by ascending value; the largest becomes ``t`` and the
    rest are dealt alternately into ``part1`` (1st, 3rd, ...) and ``part2``.
    Giving ``t`` to the lighter half makes it at least as valuable as the
    heavier one, and each half is worth at most ``v(T) / 2``.

    >>> p = balanced_pair_partition([0, 1, 2, 3, 4], [1, 2, 3, 4, 5])
    >>> p.t, sorted(p.part1), sorted(p.part2)
    (4, [0, 2], [1, 3])
    """
    order = sorted(T, key=lambda j: (v[j], j))
    if not order:
        raise PreconditionError("cannot partition an empty set")
    rest = order[:-1]
    return PairPartition(order[-1], frozenset(rest[0::2]), frozenset(rest[1::2]))


def subadditive_partition(
    T: Iterable[int], v: Callable[[frozenset[int]], Fraction]
) -> tuple[frozenset[int], frozenset[int]]:
    """Local search for a two-way split under an arbitrary set valuation ``v``.

    Start with everything in ``T1``; while some ``e`` in ``T1`` (scanned by
    ascending index) has ``v(T1 - e) > v(T2 + e)``, move it to ``T2``. Every
    move shrinks ``T1``, so there are at most ``|T|`` moves.
    """
    T1 = set(T)
    T2: set[int] = set()
    moved = True
    while moved:
        moved = False
        for e in sorted(T1):
            if v(frozenset(T1 - {e})) > v(frozenset(T2 | {e})):
                T1.remove(e)
                T2.add(e)
                moved = True
                break
    return frozenset(T1), frozenset(T2)


def keep_fraction(X: Iterable[int], B, costs: Sequence, v: Sequence) -> frozenset[int]:
    """A subset of ``X`` with cost at most ``B/2`` and at least a third of its value.

    Requires ``c(X) <= B`` and every item of ``X`` costing at most ``B/2``.
    """
    X = sorted(X)
    B = Fraction(B)
    half = B / 2
    total = _v(costs, X)
    if total > B:
        raise PreconditionError("keep_fraction needs c(X) <= B")
    if any(costs[j] > half for j in X):
        raise PreconditionError("keep_fraction needs every item cost <= B/2")
    if total <= half:
        return frozenset(X)
    prefix: list[int] = []
    spent = Fraction(0)
    for j in X:
        prefix.append(j)
        spent += costs[j]
        if spent > half:
            break
    last = prefix[-1]
    pieces = [frozenset(prefix[:-1]), frozenset([last]), frozenset(X) - frozenset(prefix)]
    return max(pieces, key=lambda P: _v(v, P))  # first maximum wins


# --------------------------------------------------------------------------
# large-budget machinery


def density(v_j, c_j) -> Fraction:
    c_j = Fraction(c_j)
    if c_j <= 0:
        raise PreconditionError("density needs a positive cost")
    return Fraction(v_j) / c_j


def density_trim(X: Iterable[int], Y: Iterable[int], B, k, costs: Sequence, v: Sequence) -> frozenset[int]:
    """Make room for ``Y`` inside budget ``B`` by dropping the least dense items of ``X``.

    With every item of ``X`` costing at most ``B / k**4``, the result ``Z``
    satisfies ``c(Z) <= B`` and
    ``v(Z) >= (1 - c(Y)/B - 1/k**4) * v(X) + v(Y)``.
    """
    X, Y = frozenset(X), frozenset(Y)
    B, k = Fraction(B), Fraction(k)
    if X & Y:
        raise PreconditionError("X and Y must be disjoint")
    if _v(costs, X) > B or _v(costs, Y) > B:
        raise PreconditionError("density_trim needs c(X) <= B and c(Y) <= B")
    if k <= 0 or any(costs[j] > B / k**4 for j in X):
        raise PreconditionError("density_trim needs every item of X to cost <= B/k^4")

    def removal_key(j):
        c = Fraction(costs[j])
        rho = Fraction(v[j]) / c if c > 0 else math.inf
        return (rho, Fraction(v[j]), -j)

    room = B - _v(costs, Y)
    kept = set(X)
    spent = _v(costs, X)
    for j in sorted(X, key=removal_key):
        if spent <= room:
            break
        kept.remove(j)
        spent -= costs[j]
    return frozenset(kept) | Y


@dataclass(frozen=True)
class HeavyLightSplit:
    heavy: frozenset[int]
    light: frozenset[int]
    f: Fraction
    k: Fraction


def heavy_light_split(T_hat: Iterable[int], v: Sequence, k) -> HeavyLightSplit:
    """Items worth at least ``1/k**3`` of ``v(T_hat)`` are heavy, the rest light.

    ``f`` is the light items' share of ``v(T_hat)``; an empty or worthless
    ``T_hat`` gives two empty sets and ``f = 0``.
    """
    k = Fraction(k)
    if k <= 0:
        raise PreconditionError("k must be positive")
    T_hat = frozenset(T_hat)
    total = _v(v, T_hat)
    if total == 0:
        return HeavyLightSplit(frozenset(), frozenset(), Fraction(0), k)
    cut = total / k**3
    heavy = frozenset(j for j in T_hat if v[j] >= cut)
    light = T_hat - heavy
    return HeavyLightSplit(heavy, light, _v(v, light) / total, k)


@dataclass(frozen=True)
class FractionalPartition:
    parts: tuple[dict, ...]
    boundaries: tuple[Fraction, ...]
    rounded: tuple[frozenset[int], ...]

    def fractional_items(self, i: int) -> list[int]:
        return [j for j, y in self.parts[i].items() if 0 < y < 1]


class _Prefix:
    """Cumulative value of the densest-first fractional prefix of a set."""

    def __init__(self, order, costs, v):
        self.order = order
        self.starts = [Fraction(0)]
        self.cum_value = [Fraction(0)]
        for j in order:
            self.starts.append(self.starts[-1] + Fraction(costs[j]))
            self.cum_value.append(self.cum_value[-1] + Fraction(v[j]))
        self.rho = [Fraction(v[j]) / Fraction(costs[j]) for j in order]
        self.total = self.starts[-1]

    def value(self, b: Fraction) -> Fraction:
        """Value of the prefix of cost ``b``."""
        if b <= 0:
            return Fraction(0)
        if b >= self.total:
            return self.cum_value[-1]
        p = bisect.bisect_right(self.starts, b) - 1
        return self.cum_value[p] + (b - self.starts[p]) * self.rho[p]

    def add_interval(self, frac: dict, lo: Fraction, hi: Fraction, costs) -> None:
        """Accumulate into ``frac`` the item fractions covering cost range ``(lo, hi]``."""
        if hi <= lo:
            return
        p = max(bisect.bisect_right(self.starts, lo) - 1, 0)
        while p < len(self.order) and self.starts[p] < hi:
            a = max(lo, self.starts[p])
            b = min(hi, self.starts[p + 1])
            if b > a:
                j = self.order[p]
                frac[j] = frac.get(j, Fraction(0)) + (b - a) / Fraction(costs[j])
            p += 1


def _solve_boundary(prefix: _Prefix, lo, width, L, base, target) -> Fraction:
    """Smallest ``b`` in ``[lo, lo + width]`` with ``base + F(b) - F(L + b) == target``.

    The left side is piecewise linear and nondecreasing in ``b``; its
    breakpoints are item boundaries ``s`` and ``s - L``.
    """
    hi = lo + width

    def g(b):
        return base + prefix.value(b) - prefix.value(L + b)

    points = {lo, hi}
    for s in prefix.starts:
        for x in (s, s - L):
            if lo < x < hi:
                points.add(x)
    pts = sorted(points)
    prev_b, prev_g = pts[0], g(pts[0])
    if prev_g >= target:
        return prev_b
    for b in pts[1:]:
        gb = g(b)
        if gb >= target:
            # linear between prev_b and b
            return prev_b + (target - prev_g) * (b - prev_b) / (gb - prev_g)
        prev_b, prev_g = b, gb
    raise AssertionError("boundary search left its bracket")  # unreachable


def fractional_even_partition(T_l: Iterable[int], k: int, costs: Sequence, v: Sequence) -> FractionalPartition:
    """Split ``T_l`` fractionally into ``k`` parts of equal cost and equal value.

    Items are laid out on a cost axis, densest first. Part ``i`` takes the
    cost ranges ``(b_{i-1}, b_i]`` and ``(L_i + b_i, L_i + S/k + b_{i-1}]``
    where ``S = c(T_l)`` and ``L_i = (k - i) S / k``; ``b_i`` is chosen so
    the part is worth exactly ``v(T_l) / k``. With only four range ends per
    part, at most four items are split in any part. Split items are then
    rounded to the lowest-numbered part holding a piece of them.
    """
    if isinstance(k, bool) or int(k) != k or k < 1:
        raise PreconditionError("k must be a positive integer")
    k = int(k)
    T_l = list(T_l)
    if not T_l:
        raise PreconditionError("T_l must be nonempty")
    if any(costs[j] <= 0 for j in T_l):
        raise PreconditionError("all costs must be positive")

    order = sorted(T_l, key=lambda j: (-density(v[j], costs[j]), j))
    prefix = _Prefix(order, costs, v)
    S = prefix.total
    per_part_value = prefix.cum_value[-1] / k
    width = S / k

    parts: list[dict] = []
    boundaries: list[Fraction] = []
    b_prev = Fraction(0)
    for i in range(1, k + 1):
        L = (k - i) * width
        top = L + width + b_prev  # upper end of the remaining range
        if i < k:
            base = prefix.value(top) - prefix.value(b_prev)
            b = _solve_boundary(prefix, b_prev, width, L, base, per_part_value)
            boundaries.append(b)
        else:
            b = b_prev + width
        frac: dict = {}
        prefix.add_interval(frac, b_prev, b, costs)
        prefix.add_interval(frac, L + b, top, costs)
        parts.append(frac)
        b_prev = b

    rounded: list[set[int]] = [set() for _ in range(k)]
    placed: set[int] = set()
    for i, frac in enumerate(parts):
        for j, y in frac.items():
            if y == 1:
                rounded[i].add(j)
                placed.add(j)
    for i, frac in enumerate(parts):
        for j, y in sorted(frac.items()):
            if 0 < y < 1 and j not in placed:
                rounded[i].add(j)
                placed.add(j)
    return FractionalPartition(
        tuple(parts), tuple(boundaries), tuple(frozenset(r) for r in rounded)
    )


# --------------------------------------------------------------------------
# improvement builders


def _witness_parts(inst: Instance, X: Allocation, witness):
    i, j, T = witness
    T = frozenset(T)
    require_feasible(inst, X)
    if not (0 <= i < inst.n and 0 <= j < inst.n) or i == j:
        raise PreconditionError("witness needs two distinct agents")
    if not T:
        raise PreconditionError("witness set is empty")
    if not T <= X.bundles[j]:
        raise PreconditionError("witness set is not inside the envied bundle")
    if bundle_cost(inst, T) > inst.agents[i].budget:
        raise PreconditionError("witness set exceeds the envier's budget")
    return i, j, T


def _violates(inst, i, T, X, factor) -> bool:
    """``v_i(T - g) > factor * v_i(X_i)`` for every ``g`` in ``T``."""
    vi = inst.agents[i].values
    whole = _v(vi, T)
    own = bundle_value(inst, i, X.bundles[i])
    return whole - max(vi[g] for g in T) > factor * own


def _others_positive(inst, X, i) -> bool:
    return all(
        bundle_value(inst, a, X.bundles[a]) > 0 for a in range(inst.n) if a != i
    )


def _reassign(X: Allocation, i: int, j: int, new_i: frozenset, taken: frozenset) -> Allocation:
    bundles = list(X.bundles)
    dropped = bundles[i] - new_i
    bundles[i] = frozenset(new_i)
    bundles[j] = bundles[j] - taken
    return Allocation(tuple(bundles), X.charity | dropped)


def _preferred_part(inst, i, pp: PairPartition):
    vi = inst.agents[i].values
    return pp.part1 if _v(vi, pp.part1) >= _v(vi, pp.part2) else pp.part2


def construct_improvement_quarter(inst: Instance, X: Allocation, witness) -> Allocation:
    """Rebuild X from a 1/4-EF1 violation so that its NSW strictly increases.

    ``witness = (i, j, T)`` with ``T`` inside ``X_j``, affordable for ``i``,
    and ``v_i(T - g) > 4 v_i(X_i)`` for every ``g`` in ``T``. Agent ``i``
    gives up its bundle and takes its preferred half of ``T`` (halves formed
    under the owner's valuation).
    """
    i, j, T = _witness_parts(inst, X, witness)
    if not _violates(inst, i, T, X, 4):
        raise PreconditionError("witness does not violate 1/4-EF1")
    if not _others_positive(inst, X, i):
        raise PreconditionError("every agent other than the envier needs positive value")
    pp = balanced_pair_partition(T, inst.agents[j].values)
    part = _preferred_part(inst, i, pp)
    return _reassign(X, i, j, part, part)


def warmup_case(inst: Instance, X: Allocation, witness) -> int:
    """Which branch of the 3/11 argument applies: 1 (a half is worth more
    than twice ``v_i(X_i)``) or 2."""
    i, j, T = _witness_parts(inst, X, witness)
    pp = balanced_pair_partition(T, inst.agents[j].values)
    vi = inst.agents[i].values
    own = bundle_value(inst, i, X.bundles[i])
    return 1 if max(_v(vi, pp.part1), _v(vi, pp.part2)) > 2 * own else 2


def construct_improvement_warmup(inst: Instance, X: Allocation, witness) -> Allocation:
    """Improvement for a 3/11-EF1 violation when budgets cover two of any item.

    Case 1 moves the envier's preferred half as in the quarter variant.
    Case 2 moves the cheaper half and lets the envier keep a third of its
    old value inside the other half of its budget.
    """
    i, j, T = _witness_parts(inst, X, witness)
    B = inst.agents[i].budget
    costs = inst.costs
    if any(2 * costs[g] > B for g in X.bundles[i] | T):
        raise PreconditionError("warm-up needs B_i >= 2 c_g for the items involved")
    if not _violates(inst, i, T, X, Fraction(11, 3)):
        raise PreconditionError("witness does not violate 3/11-EF1")
    if not _others_positive(inst, X, i):
        raise PreconditionError("every agent other than the envier needs positive value")
    pp = balanced_pair_partition(T, inst.agents[j].values)
    if warmup_case(inst, X, witness) == 1:
        part = _preferred_part(inst, i, pp)
        return _reassign(X, i, j, part, part)
    part = pp.part1 if _v(costs, pp.part1) <= _v(costs, pp.part2) else pp.part2
    keep = keep_fraction(X.bundles[i], B, costs, inst.agents[i].values)
    return _reassign(X, i, j, part | keep, part)


def large_budget_factor(k) -> Fraction:
    """Violation factor ``2 + 20/(k - 10)``, the inverse of ``1/2 - 5/k``."""
    k = Fraction(k)
    if k <= 10:
        raise PreconditionError("the large-budget factor needs k > 10")
    return 2 + 20 / (k - 10)


def construct_improvement_large_budget(inst: Instance, X: Allocation, witness, k) -> Allocation:
    """Improvement for a ``(1/2 - 5/k)``-EF1 violation with small items.

    Drops the owner's favourite item ``j*`` from ``T``, splits the rest into
    heavy and light items, cuts the light items into ``floor(k)`` parts of
    near-equal cost and value, hands the envier's favourite part to that agent, and
    trims its old bundle by density to stay within budget.
    """
    k = Fraction(k)
    factor = large_budget_factor(k)
    i, j, T = _witness_parts(inst, X, witness)
    vi, vj = inst.agents[i].values, inst.agents[j].values
    B = inst.agents[i].budget
    costs = inst.costs
    j_star = max(T, key=lambda g: (vj[g], g))
    T_hat = T - {j_star}
    if _v(vi, T_hat) <= factor * bundle_value(inst, i, X.bundles[i]):
        raise PreconditionError("witness does not violate (1/2 - 5/k)-EF1")
    if not _others_positive(inst, X, i):
        raise PreconditionError("every agent other than the envier needs positive value")
    split = heavy_light_split(T_hat, vj, k)
    if not split.light:
        raise DegenerateConstruction("empty light part")
    fp = fractional_even_partition(split.light, math.floor(k), costs, vj)
    Y = max(fp.rounded, key=lambda P: _v(vi, P))  # lowest index on ties
    if not Y:
        raise DegenerateConstruction("empty light part")
    Z = density_trim(X.bundles[i], Y, B, k, costs, vi)
    return _reassign(X, i, j, Z, Y)


def heavy_item_transfer(inst: Instance, X: Allocation, witness, k) -> Allocation | None:
    """Move a single heavy item the envier values relatively highly.

    Returns None when no heavy item ``g`` has
    ``v_ig / v_i(T_hat) >= 1/2 * v_jg / v_j(T_hat)``; in that case the light
    items carry most of the envier's value and
    :func:`construct_improvement_large_budget` applies instead.
    """
    k = Fraction(k)
    i, j, T = _witness_parts(inst, X, witness)
    vi, vj = inst.agents[i].values, inst.agents[j].values
    j_star = max(T, key=lambda g: (vj[g], g))
    T_hat = T - {j_star}
    split = heavy_light_split(T_hat, vj, k)
    vi_hat, vj_hat = _v(vi, T_hat), _v(vj, T_hat)
    if vi_hat == 0 or vj_hat == 0:
        return None
    for g in sorted(split.heavy):
        if Fraction(vi[g]) / vi_hat >= Fraction(vj[g]) / vj_hat / 2:
            Z = density_trim(X.bundles[i], {g}, inst.agents[i].budget, k, inst.costs, vi)
            return _reassign(X, i, j, Z, frozenset([g]))
    return None
