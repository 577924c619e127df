"""Domain types for budget-feasible allocation of indivisible goods.

All quantities (values, costs, budgets) are held as :class:`fractions.Fraction`
so that every comparison made downstream is exact.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from typing import Iterable, Sequence

Num = Fraction

__all__ = [
    "Num",
    "BudgetFairError",
    "ParseError",
    "ValidationError",
    "PartitionError",
    "InfeasibleAllocationError",
    "Agent",
    "Item",
    "Instance",
    "Allocation",
    "NswValue",
    "parse_num",
    "format_num",
    "load_instance",
    "dump_instance",
    "load_allocation",
    "dump_allocation",
    "bundle_value",
    "bundle_cost",
    "is_feasible",
    "nsw",
    "kappa",
    "fourth_root_lower",
]


class BudgetFairError(Exception):
    """Base class for every error raised by this package."""


class ParseError(BudgetFairError, ValueError):
    pass


class ValidationError(BudgetFairError, ValueError):
    pass


class PartitionError(ValidationError):
    """Allocation bundles overlap, omit an item, or reference a bad index."""


class InfeasibleAllocationError(BudgetFairError):
    pass


def parse_num(raw) -> Fraction:
    """Parse an exact number from an int, a finite decimal, or a ``"p/q"`` string.

    >>> parse_num("2/6")
    Fraction(1, 3)
    >>> parse_num(0.1)
    Fraction(1, 10)
    """
    if isinstance(raw, bool):
        raise ParseError(f"boolean is not a number: {raw!r}")
    if isinstance(raw, Fraction):
        return raw
    if isinstance(raw, int):
        return Fraction(raw)
    if isinstance(raw, Decimal):
        if not raw.is_finite():
            raise ParseError(f"non-finite number: {raw}")
        return Fraction(raw)
    if isinstance(raw, float):
        if not math.isfinite(raw):
            raise ParseError(f"non-finite number: {raw}")
        # shortest repr, so 0.1 means 1/10 rather than its binary expansion
        return Fraction(repr(raw))
    if isinstance(raw, str):
        try:
            return Fraction(raw.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"cannot parse number {raw!r}") from exc
    raise ParseError(f"unsupported number type {type(raw).__name__}")


def format_num(x) -> str:
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class Agent:
    id: str
    budget: Fraction
    values: tuple[Fraction, ...]


@dataclass(frozen=True)
class Item:
    id: str
    cost: Fraction


@dataclass(frozen=True)
class Instance:
    """Agents with budgets and additive values, items with costs."""

    agents: tuple[Agent, ...]
    items: tuple[Item, ...]

    def __post_init__(self):
        object.__setattr__(self, "agents", tuple(self.agents))
        object.__setattr__(self, "items", tuple(self.items))
        m = len(self.items)
        if len({a.id for a in self.agents}) != len(self.agents):
            raise ValidationError("duplicate agent id")
        if len({it.id for it in self.items}) != m:
            raise ValidationError("duplicate item id")
        for it in self.items:
            if it.cost < 0:
                raise ValidationError(f"item {it.id!r} has negative cost")
        for a in self.agents:
            if a.budget < 0:
                raise ValidationError(f"agent {a.id!r} has negative budget")
            if len(a.values) != m:
                raise ValidationError(
                    f"agent {a.id!r} has {len(a.values)} values for {m} items"
                )
            if any(v < 0 for v in a.values):
                raise ValidationError(f"agent {a.id!r} has a negative value")

    @classmethod
    def from_arrays(cls, budgets, values, costs) -> "Instance":
        """Build an instance from plain sequences; ids are ``a1.., g1..``."""
        if len(budgets) != len(values):
            raise ValidationError("budgets and value rows differ in length")
        items = tuple(Item(f"g{j + 1}", parse_num(c)) for j, c in enumerate(costs))
        agents = tuple(
            Agent(f"a{i + 1}", parse_num(b), tuple(parse_num(v) for v in row))
            for i, (b, row) in enumerate(zip(budgets, values))
        )
        return cls(agents, items)

    @property
    def n(self) -> int:
        return len(self.agents)

    @property
    def m(self) -> int:
        return len(self.items)

    @property
    def budgets(self) -> tuple[Fraction, ...]:
        return tuple(a.budget for a in self.agents)

    @property
    def costs(self) -> tuple[Fraction, ...]:
        return tuple(it.cost for it in self.items)

    def value(self, agent: int, item: int) -> Fraction:
        return self.agents[agent].values[item]

    def to_dict(self) -> dict:
        return {
            "agents": [
                {
                    "id": a.id,
                    "budget": format_num(a.budget),
                    "values": [format_num(v) for v in a.values],
                }
                for a in self.agents
            ],
            "items": [{"id": it.id, "cost": format_num(it.cost)} for it in self.items],
        }


@dataclass(frozen=True)
class Allocation:
    """Bundles ``X_1..X_n`` plus the charity bundle ``X_0`` (item indices)."""

    bundles: tuple[frozenset[int], ...]
    charity: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "bundles", tuple(frozenset(b) for b in self.bundles))
        object.__setattr__(self, "charity", frozenset(self.charity))

    @classmethod
    def from_bundles(cls, bundles: Iterable[Iterable[int]], m: int) -> "Allocation":
        """Bundles as given; every item not in a bundle goes to charity."""
        bundles = tuple(frozenset(b) for b in bundles)
        used = frozenset().union(*bundles) if bundles else frozenset()
        return cls(bundles, frozenset(range(m)) - used)

    @classmethod
    def from_assignment(cls, assignment: Sequence[int], n: int) -> "Allocation":
        """``assignment[j]`` is 0 for charity or ``i + 1`` for agent ``i``."""
        bundles = [set() for _ in range(n)]
        charity = set()
        for j, owner in enumerate(assignment):
            if owner == 0:
                charity.add(j)
            else:
                bundles[owner - 1].add(j)
        return cls(tuple(bundles), charity)

    @classmethod
    def empty(cls, inst: Instance) -> "Allocation":
        return cls(tuple(frozenset() for _ in range(inst.n)), frozenset(range(inst.m)))

    def assignment(self, m: int) -> tuple[int, ...]:
        out = [0] * m
        for i, b in enumerate(self.bundles):
            for j in b:
                out[j] = i + 1
        return tuple(out)

    def validate(self, inst: Instance) -> None:
        if len(self.bundles) != inst.n:
            raise PartitionError(
                f"allocation has {len(self.bundles)} bundles for {inst.n} agents"
            )
        seen: set[int] = set()
        for part in (*self.bundles, self.charity):
            for j in part:
                if not isinstance(j, int) or not 0 <= j < inst.m:
                    raise PartitionError(f"item index {j!r} out of range")
                if j in seen:
                    raise PartitionError(f"item {j} appears in two bundles")
                seen.add(j)
        if len(seen) != inst.m:
            missing = sorted(set(range(inst.m)) - seen)
            raise PartitionError(f"items {missing} are not allocated")

    def to_dict(self) -> dict:
        return {
            "bundles": [sorted(b) for b in self.bundles],
            "charity": sorted(self.charity),
        }


@dataclass(frozen=True, order=True)
class NswValue:
    """Lexicographic Nash welfare: more positive agents first, then product."""

    positive_count: int
    product: Fraction

    def to_dict(self) -> dict:
        return {"positive_count": self.positive_count, "product": format_num(self.product)}


def _check_items(inst: Instance, S: Iterable[int]) -> list[int]:
    S = list(S)
    for j in S:
        if not 0 <= j < inst.m:
            raise IndexError(f"item index {j} out of range")
    return S


def bundle_value(inst: Instance, agent: int, S: Iterable[int]) -> Fraction:
    if not 0 <= agent < inst.n:
        raise IndexError(f"agent index {agent} out of range")
    vals = inst.agents[agent].values
    return sum((vals[j] for j in _check_items(inst, S)), Fraction(0))


def bundle_cost(inst: Instance, S: Iterable[int]) -> Fraction:
    return sum((inst.items[j].cost for j in _check_items(inst, S)), Fraction(0))


def is_feasible(inst: Instance, X: Allocation) -> bool:
    """Budget feasibility; raises :class:`PartitionError` if X is not a partition."""
    X.validate(inst)
    return all(
        bundle_cost(inst, b) <= a.budget for a, b in zip(inst.agents, X.bundles)
    )


def require_feasible(inst: Instance, X: Allocation) -> None:
    if not is_feasible(inst, X):
        raise InfeasibleAllocationError("allocation violates a budget")


def nsw(inst: Instance, X: Allocation) -> NswValue:
    require_feasible(inst, X)
    count, product = 0, Fraction(1)
    for i, b in enumerate(X.bundles):
        v = bundle_value(inst, i, b)
        if v > 0:
            count += 1
            product *= v
    return NswValue(count, product)


def kappa(inst: Instance) -> int:
    """Budget-cost ratio ``floor(min_i B_i / max_j c_j)``."""
    if inst.n == 0 or inst.m == 0:
        raise ValidationError("kappa needs at least one agent and one item")
    max_cost = max(inst.costs)
    if min(inst.costs) == 0:
        raise ValidationError("kappa is undefined with zero-cost items")
    return math.floor(min(inst.budgets) / max_cost)


def fourth_root_lower(x, denominator: int = 10**6) -> Fraction:
    """Largest ``p / denominator`` whose fourth power does not exceed ``x``."""
    x = Fraction(x)
    if x < 0:
        raise ValueError("negative argument")
    scaled = x * denominator**4
    p = math.isqrt(math.isqrt(scaled.numerator // scaled.denominator))
    return Fraction(p, denominator)


# --------------------------------------------------------------------------
# JSON


def _num_hook(s: str) -> Decimal:
    return Decimal(s)


def _parse_json(text) -> object:
    if isinstance(text, (bytes, bytearray)):
        text = text.decode("utf-8")
    try:
        return json.loads(text, parse_float=_num_hook)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc}") from exc


def instance_from_dict(doc) -> Instance:
    if not isinstance(doc, dict):
        raise ParseError("instance must be a JSON object")
    try:
        raw_items = doc["items"]
        raw_agents = doc["agents"]
        items = tuple(Item(str(it["id"]), parse_num(it["cost"])) for it in raw_items)
        agents = tuple(
            Agent(
                str(a["id"]),
                parse_num(a["budget"]),
                tuple(parse_num(v) for v in a["values"]),
            )
            for a in raw_agents
        )
    except (KeyError, TypeError) as exc:
        raise ParseError(f"instance JSON is missing a field: {exc}") from exc
    return Instance(agents, items)


def load_instance(text, format: str = "json") -> Instance:
    if format != "json":
        raise ParseError(f"unsupported format {format!r}")
    return instance_from_dict(_parse_json(text))


def dump_instance(inst: Instance) -> str:
    return json.dumps(inst.to_dict(), indent=2)


def allocation_from_dict(doc) -> Allocation:
    if not isinstance(doc, dict):
        raise ParseError("allocation must be a JSON object")
    try:
        bundles = doc["bundles"]
        charity = doc.get("charity", [])
        if not all(isinstance(j, int) and not isinstance(j, bool)
                   for b in [*bundles, charity] for j in b):
            raise ParseError("allocation item indices must be integers")
        return Allocation(tuple(frozenset(b) for b in bundles), frozenset(charity))
    except (KeyError, TypeError) as exc:
        raise ParseError(f"allocation JSON is malformed: {exc}") from exc


def load_allocation(text) -> Allocation:
    """Parse an allocation; overlap is reported here, range on validate()."""
    doc = _parse_json(text)
    if isinstance(doc, dict) and isinstance(doc.get("bundles"), list):
        flat = [j for b in doc["bundles"] for j in b] + list(doc.get("charity", []))
        if len(flat) != len(set(map(repr, flat))):
            raise PartitionError("allocation lists an item twice")
    return allocation_from_dict(doc)


def dump_allocation(X: Allocation) -> str:
    return json.dumps(X.to_dict())
