"""Command-line front end.

Exit codes: 0 ok, 1 nothing to do (no witness), 2 input error, 3 search
limit hit, 4 infeasible allocation, 5 theorem check failed, 6 degenerate
construction.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import audit as audit_mod
from .audit import audit_allocation, find_violation
from .constructions import (
    DegenerateConstruction,
    PreconditionError,
    construct_improvement_large_budget,
    construct_improvement_quarter,
    construct_improvement_warmup,
    large_budget_factor,
)
from .families import FamilySpec, generate, large_budget_tight
from .model import (
    InfeasibleAllocationError,
    ParseError,
    ValidationError,
    dump_allocation,
    dump_instance,
    format_num,
    fourth_root_lower,
    is_feasible,
    kappa,
    load_allocation,
    load_instance,
    nsw,
    parse_num,
)
from .solver import (
    SearchLimitExceeded,
    solve_exact,
    solve_local_search,
    verify_theorem1,
)

EXIT_OK, EXIT_NOOP, EXIT_INPUT, EXIT_LIMIT, EXIT_INFEASIBLE, EXIT_THEOREM, EXIT_DEGENERATE = range(7)

AUDITED_KAPPA_MAX = 8


class _InputError(Exception):
    pass


def _read(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise _InputError(str(exc)) from exc


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _load_pair(args):
    inst = load_instance(_read(args.instance))
    X = load_allocation(_read(args.allocation))
    X.validate(inst)
    return inst, X


def cmd_solve(args) -> int:
    inst = load_instance(_read(args.instance))
    if args.method == "exact":
        res = solve_exact(inst)
    else:
        res = solve_local_search(inst, seed=args.seed)
    _emit(json.dumps(res.to_dict(), indent=2), args.out)
    if args.method == "exact" and not res.exact:
        return EXIT_LIMIT
    return EXIT_OK


def cmd_audit(args) -> int:
    inst, X = _load_pair(args)
    if not is_feasible(inst, X):
        print("allocation is not budget-feasible", file=sys.stderr)
        return EXIT_INFEASIBLE
    rep = audit_allocation(inst, X, check_po=args.po)
    _emit(rep.to_json(), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    inst = load_instance(_read(args.instance))
    rep = verify_theorem1(inst)
    print(json.dumps(rep.to_dict(), indent=2))
    if not rep.passed:
        print("COUNTEREXAMPLE: Max-NSW allocation fails the 1/4-EF1 + PO check",
              file=sys.stderr)
        return EXIT_THEOREM
    return EXIT_OK


def theorem2_bound(k: int) -> Fraction:
    """``1/2 - 5/r`` with ``r`` a rational lower bound on the fourth root of ``k``."""
    r = fourth_root_lower(k)
    return Fraction(1, 2) - 5 / r if r > 0 else Fraction(-10**9)


def sweep_rows(family: str, kappas) -> list[dict]:
    if family != "large-budget-tight":
        raise _InputError(f"sweep supports only large-budget-tight, not {family!r}")
    rows = []
    for k in kappas:
        if k < 1:
            raise _InputError("kappa must be >= 1")
        if k <= AUDITED_KAPPA_MAX:
            inst, _ = large_budget_tight(k)
            res = solve_exact(inst)
            if not res.exact:
                raise SearchLimitExceeded(f"kappa={k}: solver hit its node limit")
            alpha = audit_allocation(inst, res.allocation).ef1_alpha
            source = "audited"
        else:
            alpha = Fraction(k, 2 * (k - 1))
            source = "closed_form"
        bound = theorem2_bound(k)
        ok = bound <= 0 or alpha >= bound
        rows.append(
            {"kappa": k, "ef1_alpha": alpha, "theorem2_bound": bound,
             "bound_satisfied": ok, "source": source}
        )
    return rows


def cmd_sweep(args) -> int:
    try:
        kappas = [int(x) for x in args.kappas.split(",") if x.strip()]
    except ValueError as exc:
        raise _InputError(f"bad kappa list {args.kappas!r}") from exc
    rows = sweep_rows(args.family, kappas)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["kappa", "ef1_alpha", "theorem2_bound", "bound_satisfied", "source"])
    for r in rows:
        w.writerow([r["kappa"], format_num(r["ef1_alpha"]), format_num(r["theorem2_bound"]),
                    str(r["bound_satisfied"]).lower(), r["source"]])
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_gen(args) -> int:
    params = {}
    if args.family == "tight-quarter":
        if args.eps is None:
            raise _InputError("tight-quarter needs --eps")
        params["eps"] = parse_num(args.eps)
    elif args.family in ("large-budget-tight", "approx-gap"):
        if args.kappa is None:
            raise _InputError(f"{args.family} needs --kappa")
        params["kappa"] = args.kappa
    else:
        if None in (args.n, args.m, args.kappa):
            raise _InputError("random needs --n, --m and --kappa")
        params.update(n=args.n, m=args.m, kappa=args.kappa, seed=args.seed)
    inst, ref = generate(FamilySpec(args.family, params))
    _emit(dump_instance(inst), args.out)
    if ref is not None and args.alloc_out:
        _emit(dump_allocation(ref), args.alloc_out)
    return EXIT_OK


def cmd_improve(args) -> int:
    inst, X = _load_pair(args)
    if not is_feasible(inst, X):
        print("allocation is not budget-feasible", file=sys.stderr)
        return EXIT_INFEASIBLE
    k = None
    if args.variant == "quarter":
        factor = Fraction(4)
    elif args.variant == "warmup":
        factor = Fraction(11, 3)
    else:
        k = fourth_root_lower(kappa(inst))
        try:
            factor = large_budget_factor(k)
        except PreconditionError as exc:
            print(f"degenerate: {exc}", file=sys.stderr)
            return EXIT_DEGENERATE
    w = find_violation(inst, X, factor)
    if w is None:
        print(f"no witness at factor {format_num(factor)}")
        return EXIT_NOOP
    witness = (w.envier, w.envied, w.set)
    try:
        if args.variant == "quarter":
            new = construct_improvement_quarter(inst, X, witness)
        elif args.variant == "warmup":
            new = construct_improvement_warmup(inst, X, witness)
        else:
            new = construct_improvement_large_budget(inst, X, witness, k)
    except (PreconditionError, DegenerateConstruction) as exc:
        print(f"degenerate: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    before, after = nsw(inst, X), nsw(inst, new)
    if not after > before:
        print("construction did not increase NSW", file=sys.stderr)
        return EXIT_DEGENERATE
    doc = {
        "variant": args.variant,
        "witness": w.to_dict(),
        "allocation": new.to_dict(),
        "nsw_before": before.to_dict(),
        "nsw_after": after.to_dict(),
    }
    _emit(json.dumps(doc, indent=2), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="budget-fair", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="compute a Max-NSW allocation")
    s.add_argument("instance")
    s.add_argument("--method", choices=["exact", "local-search"], default="exact")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("audit", help="exact EF/EF1 factors of an allocation")
    s.add_argument("instance")
    s.add_argument("allocation")
    s.add_argument("--po", action="store_true", help="also check Pareto optimality")
    s.add_argument("--out")
    s.set_defaults(func=cmd_audit)

    s = sub.add_parser("verify", help="check the 1/4-EF1 + PO guarantee on an instance")
    s.add_argument("instance")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("sweep", help="EF1 factor against the large-budget bound over kappa")
    s.add_argument("family")
    s.add_argument("--kappas", required=True, help="comma-separated list, e.g. 2,4,160000")
    s.add_argument("--out")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("gen", help="generate an instance")
    s.add_argument("family", choices=["tight-quarter", "large-budget-tight", "approx-gap", "random"])
    s.add_argument("--eps")
    s.add_argument("--kappa", type=int)
    s.add_argument("--n", type=int)
    s.add_argument("--m", type=int)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out")
    s.add_argument("--alloc-out", help="where to write the reference allocation")
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("improve", help="turn an EF1 violation into a better allocation")
    s.add_argument("instance")
    s.add_argument("allocation")
    s.add_argument("--variant", choices=["quarter", "warmup", "large-budget"], default="quarter")
    s.add_argument("--out")
    s.set_defaults(func=cmd_improve)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except InfeasibleAllocationError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except SearchLimitExceeded as exc:
        print(f"search limit: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except audit_mod.POLimitExceeded as exc:
        print(f"search limit: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except (_InputError, ParseError, ValidationError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
