import pytest

from fixtures.sweep import CONNECTIVES, formulas, sweep
from specsynth.checker import (
    FAULT_INSIDE_PRECONDITION,
    EvalEnv,
    EvalError,
    Outcome,
    OracleTooLarge,
    check_contract,
    eval_formula,
    oracle_eval_split,
)
from specsynth.minilang import Ref, execute, parse_function
from specsynth.minilang.interp import HeapState
from specsynth.speclang import Or, SepConj, parse_contract, parse_formula

from conftest import SWAP_CONTRACT

X, Y = 16, 18


def env(bindings, cells):
    return EvalEnv(bindings, HeapState.from_cells(cells))


def holds(text, bindings, cells):
    return eval_formula(parse_formula(text, params=list(bindings)), env(bindings, cells))


# -- eval_formula -------------------------------------------------------------

def test_points_to_value():
    v = holds("x |-> 5", {"x": X}, {X: 5})
    assert v.holds and v.footprint == {X}
    assert not holds("x |-> 4", {"x": X}, {X: 5}).holds
    assert not holds("x |-> _", {"x": X}, {}).holds


def test_sepconj_disjointness():
    v = holds("(x |-> _) * (y |-> _)", {"x": X, "y": X}, {X: 1})
    assert not v.holds
    assert v.blame.kind == "SepConj"
    assert holds("(x |-> _) * (y |-> _)", {"x": X, "y": Y}, {X: 1, Y: 2}).holds


def test_plain_and_allows_overlap():
    v = holds("x |-> _ && y |-> _", {"x": X, "y": X}, {X: 1})
    assert v.holds and v.footprint == {X}


def test_sepforall_footprint():
    v = holds("SEPFORALL(0, i, 2, p + i |-> 0)", {"p": X}, {X: 0, X + 1: 0})
    assert v.holds and v.footprint == {X, X + 1}
    assert not holds("SEPFORALL(0, i, 2, p |-> 0)", {"p": X}, {X: 0}).holds


def test_sepexists_takes_first_ascending_witness():
    v = holds("SEPEXISTS(0, i, 3, p + i |-> 1)", {"p": X}, {X: 0, X + 1: 1, X + 2: 1})
    assert v.holds and v.footprint == {X + 1}


def test_exists_witness_and_forall_blame():
    a = {"a": (3, -1, 4, -5)}
    assert holds("EXISTS(0, i, len(a), a[i] < 0)", a, {}).holds
    v = holds("FORALL(0, i, len(a), a[i] > 0)", a, {})
    assert not v.holds and v.blame is not None


def test_empty_ranges():
    assert holds("FORALL(3, i, 1, false)", {}, {}).holds
    assert holds("SEPFORALL(0, i, 0, false)", {}, {}).holds
    assert not holds("EXISTS(0, i, 0, true)", {}, {}).holds
    assert not holds("SEPEXISTS(2, i, 2, true)", {}, {}).holds


def test_binder_carries_cell_value():
    assert holds("x |-> v && v > 3", {"x": X}, {X: 5}).holds
    assert not holds("x |-> v && v > 3", {"x": X}, {X: 2}).holds


def test_division_by_zero_is_an_eval_error():
    with pytest.raises(EvalError):
        holds("x / 0 == 1", {"x": 1}, {})


def test_unbound_name_is_an_eval_error():
    with pytest.raises(EvalError):
        eval_formula(parse_formula("z == 1"), env({}, {}))


def test_evaluation_is_deterministic():
    f = parse_formula("(x |-> _) * (y |-> 1) || EXISTS(0, i, 2, x + i |-> 0)",
                      params=["x", "y"])
    e = env({"x": X, "y": X}, {X: 0, X + 1: 0})
    a, b = eval_formula(f, e), eval_formula(f, e)
    assert a == b and a.blame == b.blame


def test_disjointness_locality_and_weakening():
    fs = formulas(2)
    e = env({"p": 1, "q": 1}, {1: 0, 2: 1})
    for f in fs:
        for g in fs:
            sep = eval_formula(SepConj(f, g), e)
            left, right = eval_formula(f, e), eval_formula(g, e)
            if sep.holds:
                assert left.holds and right.holds
            if left.holds:
                assert eval_formula(Or(f, g), e).holds
    assert CONNECTIVES


# -- check_contract -------------------------------------------------------------

SWAP_FN = parse_function("fn swap(x: ptr, y: ptr) -> void { var t: int = *x;"
                         " *x = *y; *y = t; }")[0]
SWAP = parse_contract(SWAP_CONTRACT, params=["x", "y"])


def test_swap_contract_on_distinct_cells_passes():
    o = execute(SWAP_FN, (Ref(0), Ref(1)), ((1,), (2,)))
    assert check_contract(SWAP, o).outcome is Outcome.PASS


def test_swap_contract_on_aliased_cells_is_pre_failed():
    o = execute(SWAP_FN, (Ref(0), Ref(0)), ((1,),))
    v = check_contract(SWAP, o)
    assert v.outcome is Outcome.PRE_FAILED and v.side == "requires"


def test_wrong_return_value_is_blamed_at_the_comparison():
    fn, _ = parse_function("fn seven() -> int { return 7; }")
    v = check_contract(parse_contract("ensures: __out == 0"), execute(fn, ()))
    assert v.outcome is Outcome.POST_VIOLATED
    assert v.blame.side == "ensures" and v.blame.kind == "Cmp"
    assert v.blame.text == "__out == 0"


def test_fault_under_precondition_violates():
    o = execute(SWAP_FN, (0, Ref(0)), ((1,),))
    v = check_contract(parse_contract("requires: true\nensures: true"), o)
    assert v.outcome is Outcome.POST_VIOLATED
    assert FAULT_INSIDE_PRECONDITION in v.detail


def test_eval_error_is_reported_with_blame():
    fn, _ = parse_function("fn id(x: int) -> int { return x; }")
    v = check_contract(parse_contract("ensures: FORALL(0, i, 1 / x, true)"), execute(fn, (0,)))
    assert v.outcome is Outcome.EVAL_ERROR and v.blame.kind == "eval-error"
    assert v.blame.to_json()["side"] == "ensures"


def test_precondition_binders_reach_the_postcondition():
    fn, _ = parse_function("fn inc(p: ptr) -> void { *p = *p + 1; }")
    c = parse_contract("requires: p |-> v\nensures: p |-> (v + 1)", params=["p"])
    assert check_contract(c, execute(fn, (Ref(0),), ((4,),))).passed


# -- oracle -------------------------------------------------------------------

def test_oracle_agrees_on_points_to():
    f = parse_formula("x |-> 5", params=["x"])
    e = env({"x": X}, {X: 5})
    assert oracle_eval_split(f, e) == eval_formula(f, e).holds is True


def test_oracle_agrees_on_swap_post_over_two_cell_heaps():
    post = parse_formula("(x |-> a) * (y |-> b)", params=["x", "y", "a", "b"])
    for cells in ({X: 1, Y: 2}, {X: 2, Y: 1}, {X: 1}, {}):
        for y in (X, Y):
            e = env({"x": X, "y": y, "a": 2, "b": 1}, cells)
            assert oracle_eval_split(post, e) == eval_formula(post, e).holds


def test_oracle_rejects_large_states():
    f = parse_formula("true")
    with pytest.raises(OracleTooLarge):
        oracle_eval_split(f, env({}, {i: 0 for i in range(1, 9)}))


def test_depth_two_sweep_has_no_disagreements():
    checks, bad = sweep(formulas(2))
    assert checks > 0 and bad == []
