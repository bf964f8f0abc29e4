import pytest

from heapinv.chc import ChcError, emit_smtlib, to_chc
from heapinv.encode import enc_r, enc_rw
from heapinv.lang import parse_and_check

import progen


def clauses(src, **enc_kw):
    p = parse_and_check(src)
    if enc_kw.pop("encode", False):
        p = enc_r(p, native_havoc=True, **enc_kw).program
    return to_chc(p)


def test_skip_program_single_entry_clause():
    cs = clauses("prog { skip; }")
    assert len(cs.clauses) == 1
    entry = cs.clauses[0]
    assert entry.head is not None and entry.head.name == cs.entry
    assert entry.body == [] and entry.constraint == []
    assert cs.false_clauses() == []


def test_assert_false_program_yields_false_clause():
    cs = clauses("prog { assert(0); }")
    assert len(cs.false_clauses()) == 1
    fc = cs.false_clauses()[0]
    assert [a.name for a in fc.body] == [cs.entry]


def test_every_assert_yields_a_false_clause():
    cs = clauses("prog { var i: Int; assert(i = 0); i := 1; assert(i = 1); }")
    assert len(cs.false_clauses()) == 2


def test_predicate_assert_in_head():
    cs = clauses("prog { pred P(Int); var i: Int; assert(P(i)); }")
    heads = [c.head.name for c in cs.clauses if c.head is not None]
    assert "P" in heads


def test_predicate_assume_in_body_nonlinear():
    cs = clauses("prog { pred P(Int); var i: Int; assume(P(i)); }")
    multi = [c for c in cs.clauses if len(c.body) == 2]
    assert len(multi) == 1
    assert {a.name for a in multi[0].body} == {cs.entry, "P"}


def test_body_atom_bound_is_two():
    for seed in range(10):
        p = progen.gen_program(seed)
        q = enc_rw(p, native_havoc=True).program
        cs = to_chc(q)
        assert cs.max_body_atoms() <= 2


def test_heap_statements_rejected():
    src = """prog {
      adt Node { node(data: Int, next: Addr); }
      heaptype Node;
      var p: Addr;
      p := alloc(defObj);
    }"""
    with pytest.raises(ChcError):
        to_chc(parse_and_check(src))


def test_nondet_leaves_variable_unconstrained():
    cs = clauses("prog { seed seed; var i: Int; nondet(i); }")
    hav = [c for c in cs.clauses
           if c.head is not None and any(n.startswith("i!") for n, _ in c.vars)]
    assert len(hav) == 1
    clause = hav[0]
    fresh = next(n for n, _ in clause.vars if n.startswith("i!"))
    assert fresh in clause.head.args


def test_while_produces_recursive_clause():
    cs = clauses("prog { var i: Int; while (i < 3) { i := i + 1; } }")
    # some location predicate appears in its own derivation cycle: there is
    # a clause whose head equals a body predicate of another clause chain
    heads = {c.head.name for c in cs.clauses if c.head}
    loop_heads = {c.head.name for c in cs.clauses
                  if c.head and c.body and c.head.name in
                  {b.name for cc in cs.clauses if cc.head and
                   cc.head.name == c.head.name for b in cc.body}}
    assert heads  # structure exists; the loop head receives two entries
    entries = {}
    for c in cs.clauses:
        if c.head:
            entries[c.head.name] = entries.get(c.head.name, 0) + 1
    assert max(entries.values()) >= 2  # loop head: from before and from body


# ---------------------------------------------------------------------------
# emission


def tokenize_sexprs(text):
    """Minimal S-expression reader used to sanity-check the emitted file."""
    toks = text.replace("(", " ( ").replace(")", " ) ").split()
    stack, top = [], []
    for t in toks:
        if t == "(":
            stack.append(top)
            top = []
        elif t == ")":
            done = top
            top = stack.pop()
            top.append(done)
        else:
            top.append(t)
    assert not stack, "unbalanced parentheses"
    return top


def test_emit_is_deterministic_and_retokenizes():
    src = """prog {
      adt Node { node(data: Int, next: Addr); }
      heaptype Node;
      input in;
      seed seed;
      var p: Addr;
      var x: Node;
      p := alloc(node(5, null));
      x := read(p);
      assert(data(x) = 5);
    }"""
    p = enc_r(parse_and_check(src), native_havoc=True).program
    cs = to_chc(p)
    text = emit_smtlib(cs)
    assert emit_smtlib(cs) == text
    forms = tokenize_sexprs(text)
    assert forms[0] == ["set-logic", "HORN"]
    assert forms[-1] == ["check-sat"]
    asserts = [f for f in forms if f and f[0] == "assert"]
    assert len(asserts) == len(cs.clauses)
    datatypes = [f for f in forms if f and f[0] == "declare-datatypes"]
    assert len(datatypes) == 1


def test_empty_clause_set_header_and_checksat():
    from heapinv.chc import ClauseSet
    text = emit_smtlib(ClauseSet(adts=[], preds={}))
    assert text == "(set-logic HORN)\n(check-sat)\n"


def test_division_requires_positive_constant_divisor():
    with pytest.raises(ChcError):
        to_chc(parse_and_check("prog { var i: Int; var j: Int; i := i / j; }"))
    cs = to_chc(parse_and_check("prog { var i: Int; i := i / 2; }"))
    assert "div" in emit_smtlib(cs)


def test_golden_file_for_encoded_list_program(corpus):
    import pathlib
    entry = next(e for e in corpus if e.name == "list-build-traverse")
    p = enc_r(entry.load(), native_havoc=True).program
    text = emit_smtlib(to_chc(p))
    golden = pathlib.Path(__file__).parent / "golden" / "list_encoded.smt2"
    assert text == golden.read_text(encoding="utf-8")
