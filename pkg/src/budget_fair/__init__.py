"""Max-NSW allocations under budget constraints and exact EF1 auditing."""
from .model import (
    Agent,
    Allocation,
    BudgetFairError,
    Instance,
    InfeasibleAllocationError,
    Item,
    NswValue,
    ParseError,
    PartitionError,
    ValidationError,
    bundle_cost,
    bundle_value,
    dump_allocation,
    dump_instance,
    format_num,
    is_feasible,
    kappa,
    load_allocation,
    load_instance,
    nsw,
    parse_num,
)
from .audit import (
    INFINITE,
    AuditReport,
    EnvyWitness,
    POLimitExceeded,
    audit_allocation,
    charity_swap_optimal,
    find_violation,
    is_pareto_optimal,
    max_envy_ef,
    max_envy_ef1,
)
from .solver import (
    SearchLimitExceeded,
    SolveResult,
    solve_exact,
    solve_local_search,
    verify_approx_corollary,
    verify_theorem1,
)
from .families import (
    FamilySpec,
    approx_gap,
    generate,
    generate_random,
    large_budget_tight,
    tight_quarter,
)

__version__ = "0.1.0"

__all__ = [
    "Agent",
    "Allocation",
    "AuditReport",
    "BudgetFairError",
    "EnvyWitness",
    "FamilySpec",
    "INFINITE",
    "InfeasibleAllocationError",
    "Instance",
    "Item",
    "NswValue",
    "POLimitExceeded",
    "ParseError",
    "PartitionError",
    "SearchLimitExceeded",
    "SolveResult",
    "ValidationError",
    "approx_gap",
    "audit_allocation",
    "bundle_cost",
    "bundle_value",
    "charity_swap_optimal",
    "dump_allocation",
    "dump_instance",
    "find_violation",
    "format_num",
    "generate",
    "generate_random",
    "is_feasible",
    "is_pareto_optimal",
    "kappa",
    "large_budget_tight",
    "load_allocation",
    "load_instance",
    "max_envy_ef",
    "max_envy_ef1",
    "nsw",
    "parse_num",
    "solve_exact",
    "solve_local_search",
    "tight_quarter",
    "verify_approx_corollary",
    "verify_theorem1",
]
