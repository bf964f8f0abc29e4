import random

import pytest
from hypothesis import given, strategies as st

from heapinv.fixpoint import Interpretation
from heapinv.interp import (
    ASSUME_FAILED, Bot, CompiledProgram, FUEL_EXHAUSTED, Fuel, ObjVal, TOP,
    Undefined, eval_stmt, heap_allocate, heap_read, heap_write, trunc_div,
    trunc_mod,
)
from heapinv.lang import expand_program_havocs, parse_and_check

import progen

NODE = ObjVal("node", (7, 0))
NODE2 = ObjVal("node", (9, 1))
DEF = ObjVal("node", (0, 0))


# ---------------------------------------------------------------------------
# heap operations


def test_allocate_on_empty():
    h, a = heap_allocate([], NODE)
    assert h == [NODE] and a == 1


def test_allocate_appends():
    h, a = heap_allocate([NODE], NODE2)
    assert h == [NODE, NODE2] and a == 2


def test_allocation_count():
    h = []
    for n in range(1, 9):
        h, a = heap_allocate(h, NODE)
        assert a == n and len(h) == n


def test_read_out_of_range_gives_default():
    assert heap_read([], 5, DEF) == DEF
    assert heap_read([NODE], 0, DEF) == DEF
    assert heap_read([NODE], 2, DEF) == DEF


def test_read_after_allocate():
    h, a = heap_allocate([], NODE)
    assert heap_read(h, a, DEF) == NODE


def test_invalid_write_is_noop():
    assert heap_write([], 1, NODE) == []
    assert heap_write([NODE], 0, NODE2) == [NODE]
    assert heap_write([NODE], 2, NODE2) == [NODE]


def test_write_read_laws_sampled():
    objs = [NODE, NODE2, DEF]
    rng = random.Random(7)
    for _ in range(200):
        h = [rng.choice(objs) for _ in range(rng.randint(0, 4))]
        a = rng.randint(0, 5)
        o = rng.choice(objs)
        h2 = heap_write(h, a, o)
        if 0 < a <= len(h):
            assert heap_read(h2, a, DEF) == o
        else:
            assert h2 == h
        for b in range(0, 6):
            if b != a:
                assert heap_read(h2, b, DEF) == heap_read(h, b, DEF)


# ---------------------------------------------------------------------------
# truncating division


@given(st.integers(-1000, 1000), st.integers(-20, 20).filter(lambda b: b != 0))
def test_trunc_div_matches_c_semantics(a, b):
    q, r = trunc_div(a, b), trunc_mod(a, b)
    assert a == b * q + r
    assert abs(r) < abs(b)
    assert r == 0 or (r < 0) == (a < 0)  # remainder follows the dividend


# ---------------------------------------------------------------------------
# statement evaluation


def run_src(src, inputs=None, interp=None, loop_fuel=64, heap_fuel=32):
    p = parse_and_check(src)
    return CompiledProgram(p).run(inputs=inputs or {},
                                  interp=interp or Interpretation.empty(),
                                  loop_fuel=loop_fuel, heap_fuel=heap_fuel)


def test_assert_zero_fails_with_reserved_predicate():
    res = run_src("prog { assert(0); }")
    assert res.outcome == Bot("F", ())


def test_assume_zero_is_undefined():
    res = run_src("prog { assume(0); }")
    assert res.outcome == Undefined(ASSUME_FAILED)


def test_predicate_assert_passes_under_matching_interpretation():
    res = run_src("prog { pred P(Int); assert(P(1)); }",
                  interp=Interpretation({"P": {(1,)}}))
    assert res.outcome == TOP


def test_predicate_assert_fails_with_tuple():
    res = run_src("prog { pred P(Int); var i: Int; i := 2; assert(P(i + 1)); }")
    assert res.outcome == Bot("P", (3,))


def test_predicate_assume_blocks():
    res = run_src("prog { pred P(Int); assume(P(5)); assert(0); }")
    assert res.outcome == Undefined(ASSUME_FAILED)
    assert res.blocker == ("P", (5,))


def test_bot_propagates_through_sequence_and_loop():
    res = run_src("""prog {
      var i: Int;
      i := 0;
      while (i < 10) {
        if (i = 3) { assert(0); }
        i := i + 1;
      }
      i := 99;
    }""")
    assert res.outcome == Bot("F", ())
    assert res.env["i"] == 3  # loop stopped at the failure


def test_division_by_zero_is_a_failure():
    res = run_src("prog { var i: Int; i := 1 / (i - i); }")
    assert res.outcome == Bot("F", ())
    res = run_src("prog { var i: Int; i := 5 % (i * 0); }")
    assert res.outcome == Bot("F", ())


def test_division_truncates_toward_zero():
    res = run_src("prog { var i: Int; var j: Int; i := -7 / 2; j := -7 % 2; }")
    assert res.env["i"] == -3 and res.env["j"] == -1


def test_loop_fuel_exhaustion():
    res = run_src("prog { var i: Int; while (1) { i := i + 1; } }", loop_fuel=8)
    assert res.outcome == Undefined(FUEL_EXHAUSTED)
    assert res.env["i"] == 8


def test_heap_fuel_exhaustion():
    src = """prog {
      adt Node { node(data: Int, next: Addr); }
      heaptype Node;
      var p: Addr;
      p := alloc(defObj);
      p := alloc(defObj);
    }"""
    res = run_src(src, heap_fuel=1)
    assert res.outcome == Undefined(FUEL_EXHAUSTED)
    assert res.heap_len == 1


def test_uninitialized_defaults():
    src = """prog {
      adt Node { node(data: Int, next: Addr); }
      heaptype Node;
      var i: Int; var p: Addr; var x: Node;
      skip;
    }"""
    res = run_src(src)
    assert res.env["i"] == 0 and res.env["p"] == 0
    assert res.env["x"] == ObjVal("node", (0, 0))


def test_wrong_constructor_selector_gives_field_default():
    src = """prog {
      adt Pair { mk(fst: Int, snd: Int); unit(tag: Int); }
      heaptype Pair;
      var o: Pair; var i: Int;
      o := unit(9);
      i := fst(o);
    }"""
    res = run_src(src)
    assert res.env["i"] == 0


def test_tester_expression():
    src = """prog {
      adt Pair { mk(fst: Int, snd: Int); unit(tag: Int); }
      heaptype Pair;
      var o: Pair; var i: Int;
      o := unit(9);
      if (is_unit(o)) { i := 1; } else { i := 2; }
    }"""
    assert run_src(src).env["i"] == 1


def test_negative_seed_rejected():
    p = parse_and_check("prog { seed seed; skip; }")
    with pytest.raises(ValueError):
        CompiledProgram(p).run(inputs={"seed": -1})


def test_eval_stmt_entry_point():
    p = parse_and_check("""prog {
      adt Node { node(data: Int, next: Addr); }
      heaptype Node;
      var p: Addr; var x: Node;
      x := read(p);
    }""")
    stack = {"p": 1, "x": ObjVal("node", (0, 0))}
    heap = [NODE]
    out, st, h = eval_stmt(p.body, stack, heap, Interpretation.empty(),
                           Fuel(8, 8), p)
    assert out == TOP
    assert st["x"] == NODE
    assert h == [NODE]
    assert stack["x"] == ObjVal("node", (0, 0))  # inputs not mutated


# ---------------------------------------------------------------------------
# determinism and fuel monotonicity


def result_triple(cp, inputs, loop_fuel, heap_fuel):
    r = cp.run(inputs=inputs, loop_fuel=loop_fuel, heap_fuel=heap_fuel)
    return r.outcome, r.env, r.heap


def test_evaluation_is_deterministic():
    for seed in range(25):
        p = progen.gen_program(seed, allow_havoc=True)
        cp = CompiledProgram(p)
        for in_v in (-2, 0, 3):
            ins = {"in": in_v, "seed": 19}
            assert result_triple(cp, ins, 40, 16) == result_triple(cp, ins, 40, 16)


def test_fuel_monotonicity():
    # a defined outcome is stable under any fuel increase
    rng = random.Random(3)
    checked = 0
    for seed in range(60):
        p = progen.gen_program(seed, allow_havoc=True)
        cp = CompiledProgram(p)
        for in_v in (-1, 2):
            ins = {"in": in_v, "seed": rng.randrange(256)}
            lf, hf = rng.randint(0, 12), rng.randint(0, 6)
            base = cp.run(inputs=ins, loop_fuel=lf, heap_fuel=hf)
            if isinstance(base.outcome, Undefined) \
                    and base.outcome.reason == FUEL_EXHAUSTED:
                continue
            for dlf, dhf in ((1, 0), (0, 1), (7, 9)):
                again = cp.run(inputs=ins, loop_fuel=lf + dlf, heap_fuel=hf + dhf)
                assert again.outcome == base.outcome
                assert again.env == base.env
                assert again.heap == base.heap
            checked += 1
    assert checked > 30


def test_native_havoc_equals_expanded_macro():
    for seed in range(15):
        p = progen.gen_program(seed, allow_havoc=True)
        expanded = expand_program_havocs(p)
        cn, ce = CompiledProgram(p), CompiledProgram(expanded)
        common = set(p.var_types)
        for s in range(0, 256, 7):
            ins = {"in": 1, "seed": s}
            rn, re_ = cn.run(inputs=ins), ce.run(inputs=ins)
            assert rn.outcome == re_.outcome, (seed, s)
            if not isinstance(rn.outcome, Undefined):
                assert {v: rn.env[v] for v in common} == \
                       {v: re_.env[v] for v in common}, (seed, s)
                assert rn.heap == re_.heap
