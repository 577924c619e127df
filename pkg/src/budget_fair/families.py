"""Instance generators: the three named tight families and seeded random instances.

Random instances use SplitMix64 so that the same seed yields the same
instance in any language:

    state += 0x9E3779B97F4A7C15                      (mod 2**64)
    z = state
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9          (mod 2**64)
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB          (mod 2**64)
    return z ^ (z >> 31)

Bounded draws are ``next() % k``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .model import Allocation, Instance, ValidationError, parse_num

FAMILIES = ("tight-quarter", "large-budget-tight", "approx-gap", "random")

_MASK = (1 << 64) - 1


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def below(self, k: int) -> int:
        """Integer in ``[0, k)``."""
        return self.next() % k


@dataclass(frozen=True)
class FamilySpec:
    family: str
    params: dict = field(default_factory=dict)


def tight_quarter(eps) -> tuple[Instance, Allocation]:
    """Two identical agents with budget 1: one item of value ``1+eps`` and cost 1,
    and ``1/eps`` items of value ``4 eps`` and cost ``eps``.

    The designated optimum gives the big item to agent 1 and all small items
    to agent 2.
    """
    eps = parse_num(eps)
    if eps <= 0 or (1 / eps).denominator != 1:
        raise ValidationError("tight-quarter needs 1/eps to be a positive integer")
    count = int(1 / eps)
    values = [1 + eps] + [4 * eps] * count
    costs = [Fraction(1)] + [eps] * count
    inst = Instance.from_arrays([1, 1], [values, values], costs)
    return inst, Allocation.from_bundles([{0}, set(range(1, count + 1))], inst.m)


def _check_kappa(kappa) -> int:
    if isinstance(kappa, bool) or int(kappa) != kappa or kappa < 1:
        raise ValidationError(f"kappa must be an integer >= 1, got {kappa!r}")
    return int(kappa)


def large_budget_tight(kappa: int) -> tuple[Instance, Allocation]:
    """Two agents with budget kappa and 2 kappa unit-cost items.

    Agent 1 values the first half at 1 and the second at 2; agent 2 values
    them at 0 and 2.
    """
    k = _check_kappa(kappa)
    v1 = [1] * k + [2] * k
    v2 = [0] * k + [2] * k
    inst = Instance.from_arrays([k, k], [v1, v2], [1] * (2 * k))
    return inst, Allocation.from_bundles([range(k), range(k, 2 * k)], inst.m)


def approx_gap(kappa: int) -> tuple[Instance, Allocation]:
    """Identical agents, budget kappa, kappa items of value 1 and kappa of value 1/5."""
    k = _check_kappa(kappa)
    v = [Fraction(1)] * k + [Fraction(1, 5)] * k
    inst = Instance.from_arrays([k, k], [v, v], [1] * (2 * k))
    return inst, Allocation.from_bundles([range(k), range(k, 2 * k)], inst.m)


def generate_random(n: int, m: int, kappa_target: int, seed: int) -> Instance:
    """Seeded random instance whose :func:`~budget_fair.model.kappa` is ``kappa_target``.

    Costs are drawn from ``{1/2, 1, 3/2, 2}``, values from ``{0, 1/4, ..., 100}``.
    Every budget lies in ``[kappa_target * c_max, (kappa_target + 1) * c_max)``.
    """
    if n < 1 or m < 1:
        raise ValidationError("random instances need n >= 1 and m >= 1")
    kappa_target = _check_kappa(kappa_target)
    rng = SplitMix64(seed)
    costs = [Fraction(1 + rng.below(4), 2) for _ in range(m)]
    c_max = max(costs)
    budgets = [c_max * kappa_target + c_max * Fraction(rng.below(8), 8) for _ in range(n)]
    values = [[Fraction(rng.below(401), 4) for _ in range(m)] for _ in range(n)]
    return Instance.from_arrays(budgets, values, costs)


def generate(spec: FamilySpec) -> tuple[Instance, Optional[Allocation]]:
    """Instance for ``spec``; named families also return their reference allocation."""
    p = spec.params
    try:
        if spec.family == "tight-quarter":
            return tight_quarter(p["eps"])
        if spec.family == "large-budget-tight":
            return large_budget_tight(p["kappa"])
        if spec.family == "approx-gap":
            return approx_gap(p["kappa"])
        if spec.family == "random":
            return generate_random(p["n"], p["m"], p["kappa"], p["seed"]), None
    except KeyError as exc:
        raise ValidationError(f"family {spec.family!r} needs parameter {exc}") from exc
    raise ValidationError(f"unknown family {spec.family!r}")
