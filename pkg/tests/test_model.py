import json
import threading
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from budget_fair.families import approx_gap, large_budget_tight, tight_quarter
from budget_fair.model import (
    Allocation,
    Instance,
    InfeasibleAllocationError,
    NswValue,
    ParseError,
    PartitionError,
    ValidationError,
    bundle_cost,
    bundle_value,
    dump_instance,
    fourth_root_lower,
    is_feasible,
    kappa,
    load_allocation,
    load_instance,
    nsw,
    parse_num,
)


def test_load_example1_file():
    inst, _ = tight_quarter(F(1, 10))
    again = load_instance(dump_instance(inst).encode())
    assert again.n == 2 and again.m == 11
    assert again == inst


def test_load_empty_instance():
    inst = load_instance(b'{"agents": [], "items": []}')
    assert inst.n == 0 and inst.m == 0


def test_number_forms():
    doc = {
        "agents": [{"id": "a", "budget": 1.5, "values": ["2/6", 3, 0.1]}],
        "items": [{"id": "x", "cost": "1"}, {"id": "y", "cost": 2}, {"id": "z", "cost": "0.25"}],
    }
    inst = load_instance(json.dumps(doc))
    assert inst.agents[0].values == (F(1, 3), F(3), F(1, 10))
    assert inst.agents[0].budget == F(3, 2)
    assert inst.items[2].cost == F(1, 4)
    assert parse_num("2/6") == F(1, 3)
    assert parse_num("2/6").denominator == 3


@pytest.mark.parametrize(
    "doc",
    [
        '{"agents": [{"id": "a", "budget": -1, "values": []}], "items": []}',
        '{"agents": [{"id": "a", "budget": 1, "values": [1]}], "items": []}',
        '{"agents": [], "items": [{"id": "g", "cost": "-1/2"}]}',
        '{"agents": [{"id": "a", "budget": 1, "values": []},'
        ' {"id": "a", "budget": 1, "values": []}], "items": []}',
        '{"agents": [], "items": [{"id": "g", "cost": 1}, {"id": "g", "cost": 1}]}',
        '{"agents": [{"id": "a", "budget": 1, "values": ["-3"]}], "items": [{"id": "g", "cost": 1}]}',
    ],
)
def test_validation_errors(doc):
    with pytest.raises(ValidationError):
        load_instance(doc)


@pytest.mark.parametrize("doc", ["{not json", "[]", '{"agents": []}', '{"agents": [], "items": [{"id": "g", "cost": "x/y"}]}'])
def test_parse_errors(doc):
    with pytest.raises(ParseError):
        load_instance(doc)


def test_bundle_value_and_cost():
    inst, _ = large_budget_tight(4)
    M1, M2 = range(4), range(4, 8)
    assert bundle_value(inst, 0, M1) == 4
    assert bundle_value(inst, 1, M1) == 0
    assert bundle_value(inst, 0, []) == 0
    assert bundle_cost(inst, M2) == 4
    assert bundle_cost(inst, []) == 0
    q, _ = tight_quarter(F(1, 10))
    assert bundle_cost(q, range(1, 11)) == 1
    with pytest.raises(IndexError):
        bundle_value(inst, 0, [8])
    with pytest.raises(IndexError):
        bundle_value(inst, 2, [0])


def test_feasibility():
    inst, ref = large_budget_tight(4)
    assert is_feasible(inst, ref)
    assert is_feasible(inst, Allocation.empty(inst))
    q, _ = tight_quarter(F(1, 10))
    assert not is_feasible(q, Allocation.from_bundles([{0, 1}, set()], q.m))


def test_partition_violations_are_errors():
    inst, _ = large_budget_tight(2)
    with pytest.raises(PartitionError):
        is_feasible(inst, Allocation(({0, 1}, {1}), {2, 3}))
    with pytest.raises(PartitionError):
        is_feasible(inst, Allocation(({0},), {1, 2, 3}))
    with pytest.raises(PartitionError):
        is_feasible(inst, Allocation(({0}, {1}), {2}))
    with pytest.raises(PartitionError):
        load_allocation('{"bundles": [[0], [0, 1]], "charity": [2, 3]}')


def test_nsw_values():
    inst, ref = large_budget_tight(4)
    assert nsw(inst, ref) == NswValue(2, F(32))
    assert nsw(inst, Allocation.empty(inst)) == NswValue(0, F(1))
    q, qref = tight_quarter(F(1, 10))
    assert nsw(q, qref) == NswValue(2, F(22, 5))
    with pytest.raises(InfeasibleAllocationError):
        nsw(q, Allocation.from_bundles([{0, 1}, set()], q.m))


def test_nsw_order_is_lexicographic():
    assert NswValue(2, F(1, 100)) > NswValue(1, F(10**6))
    assert NswValue(2, F(3)) > NswValue(2, F(2))
    assert sorted([NswValue(1, F(5)), NswValue(0, F(1)), NswValue(1, F(2))]) == [
        NswValue(0, F(1)), NswValue(1, F(2)), NswValue(1, F(5))
    ]


def test_kappa():
    inst, _ = large_budget_tight(4)
    assert kappa(inst) == 4
    assert kappa(Instance.from_arrays([7], [[1]], [2])) == 3
    q, _ = tight_quarter(F(1, 10))
    assert kappa(q) == 1
    with pytest.raises(ValidationError):
        kappa(Instance.from_arrays([7], [[1, 1]], [2, 0]))
    with pytest.raises(ValidationError):
        kappa(Instance.from_arrays([], [], []))


def test_fourth_root_lower():
    assert fourth_root_lower(160000) == 20
    assert fourth_root_lower(10**8) == 100
    r = fourth_root_lower(160001)
    assert r**4 <= 160001 < (r + F(1, 10**6)) ** 4


def test_allocation_json_roundtrip():
    X = load_allocation('{"bundles": [[0], [1, 2, 3]], "charity": [4]}')
    assert X.bundles == (frozenset({0}), frozenset({1, 2, 3}))
    assert X.charity == frozenset({4})
    assert load_allocation(json.dumps(X.to_dict())) == X


def test_concurrent_reads():
    inst, ref = approx_gap(4)
    out = []
    threads = [threading.Thread(target=lambda: out.append(nsw(inst, ref))) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert set(out) == {NswValue(2, F(16, 5))}


fracs = st.fractions(min_value=0, max_value=50, max_denominator=12)


@st.composite
def instances(draw, max_n=3, max_m=6):
    n = draw(st.integers(0, max_n))
    m = draw(st.integers(0, max_m))
    costs = draw(st.lists(fracs, min_size=m, max_size=m))
    budgets = draw(st.lists(fracs, min_size=n, max_size=n))
    values = [draw(st.lists(fracs, min_size=m, max_size=m)) for _ in range(n)]
    return Instance.from_arrays(budgets, values, costs)


@given(instances())
def test_serialization_roundtrip(inst):
    assert load_instance(dump_instance(inst)) == inst


@given(instances(max_n=2), st.data())
def test_additivity(inst, data):
    if inst.n == 0:
        return
    items = list(range(inst.m))
    S = set(data.draw(st.lists(st.sampled_from(items), unique=True))) if items else set()
    T = set(items) - S
    for i in range(inst.n):
        assert bundle_value(inst, i, S | T) == bundle_value(inst, i, S) + bundle_value(inst, i, T)
    assert bundle_cost(inst, S | T) == bundle_cost(inst, S) + bundle_cost(inst, T)


@given(st.lists(st.tuples(st.integers(0, 4), fracs), min_size=3, max_size=3))
def test_nsw_order_transitive(raw):
    a, b, c = (NswValue(k, p) for k, p in raw)
    if a <= b and b <= c:
        assert a <= c
