"""Random well-typed program generation for round-trip and differential
tests.  Everything is driven by an explicit Random instance so failures
reproduce."""

from __future__ import annotations

import random

from heapinv.lang import (
    ADDR, AdtDecl, Alloc, Assign, AssertExpr, AssertPred, AssumeExpr,
    AssumePred, Binary, Block, CtorApp, CtorDecl, DefObj, HavocStmt, If,
    INT, IntLit, Null, PredDecl, Program, Read, SelApp, Skip, TestApp,
    Unary, Var, While, Write, assign_locations, obj_type, typecheck,
)

NODE_ADT = AdtDecl("Node", [CtorDecl("node", [("data", INT), ("next", ADDR)])])
PAIR_ADT = AdtDecl("Pair", [
    CtorDecl("mk", [("fst", INT), ("snd", INT)]),
    CtorDecl("unit", [("tag", INT)]),
])

INT_VARS = ["i", "j", "k"]
ADDR_VARS = ["p", "q"]
OBJ_VARS = ["x", "y"]

CMP_OPS = ["<", "<=", ">", ">=", "=", "!="]
ARITH_OPS = ["+", "-", "*"]


class Gen:
    def __init__(self, rng: random.Random, allow_havoc: bool = False,
                 allow_preds: bool = True, allow_pair_adt: bool = False):
        self.rng = rng
        self.allow_havoc = allow_havoc
        self.allow_preds = allow_preds
        self.allow_pair_adt = allow_pair_adt

    def pick(self, xs):
        return self.rng.choice(xs)

    # expressions

    def int_expr(self, depth: int):
        r = self.rng.random()
        if depth <= 0 or r < 0.35:
            if self.rng.random() < 0.5:
                return IntLit(self.rng.randint(-3, 3))
            return Var(self.pick(INT_VARS + ["in"]))
        if r < 0.55:
            return Binary(self.pick(ARITH_OPS),
                          self.int_expr(depth - 1), self.int_expr(depth - 1))
        if r < 0.65:
            return SelApp("data", self.obj_expr(depth - 1))
        if r < 0.72:
            inner = self.int_expr(depth - 1)
            if isinstance(inner, IntLit):  # parser folds -literal
                return IntLit(-inner.value)
            return Unary("-", inner)
        if r < 0.80:
            return Binary("%", self.int_expr(depth - 1), IntLit(self.rng.randint(2, 3)))
        if r < 0.9:
            return self.cond_expr(depth - 1)
        if self.allow_pair_adt:
            return SelApp(self.pick(["fst", "snd", "tag"]), self.pair_expr(depth - 1))
        return Binary(self.pick(ARITH_OPS),
                      self.int_expr(depth - 1), self.int_expr(depth - 1))

    def cond_expr(self, depth: int):
        r = self.rng.random()
        if depth <= 0 or r < 0.5:
            return Binary(self.pick(CMP_OPS),
                          self.int_expr(max(depth - 1, 0)),
                          self.int_expr(max(depth - 1, 0)))
        if r < 0.65:
            return Binary(self.pick(["&&", "||"]),
                          self.cond_expr(depth - 1), self.cond_expr(depth - 1))
        if r < 0.75:
            return Unary("!", self.cond_expr(depth - 1))
        if r < 0.85:
            return Binary("=", self.addr_expr(), self.addr_expr())
        if r < 0.95:
            return TestApp("node", self.obj_expr(depth - 1))
        return Binary("=", self.obj_expr(depth - 1), self.obj_expr(depth - 1))

    def addr_expr(self):
        return Null() if self.rng.random() < 0.3 else Var(self.pick(ADDR_VARS))

    def obj_expr(self, depth: int):
        r = self.rng.random()
        if depth <= 0 or r < 0.4:
            return Var(self.pick(OBJ_VARS)) if self.rng.random() < 0.7 else DefObj()
        return CtorApp("node", [self.int_expr(depth - 1), self.addr_expr()])

    def pair_expr(self, depth: int):
        if self.rng.random() < 0.5:
            return CtorApp("mk", [self.int_expr(depth - 1), self.int_expr(depth - 1)])
        return CtorApp("unit", [self.int_expr(depth - 1)])

    # statements

    def stmt(self, depth: int):
        r = self.rng.random()
        if depth <= 0:
            r = min(r, 0.69)  # leaves only
        if r < 0.18:
            return Assign(self.pick(INT_VARS), self.int_expr(2))
        if r < 0.26:
            return Assign(self.pick(ADDR_VARS), self.addr_expr())
        if r < 0.34:
            return Assign(self.pick(OBJ_VARS), self.obj_expr(2))
        if r < 0.42:
            return Alloc(self.pick(ADDR_VARS), self.obj_expr(2))
        if r < 0.50:
            return Read(self.pick(OBJ_VARS), self.pick(ADDR_VARS))
        if r < 0.58:
            return Write(self.pick(ADDR_VARS), self.obj_expr(2))
        if r < 0.62:
            return AssertExpr(self.cond_expr(2))
        if r < 0.64:
            return AssumeExpr(self.cond_expr(1))
        if r < 0.66 and self.allow_preds:
            cls = AssertPred if self.rng.random() < 0.7 else AssumePred
            return cls("P", [self.int_expr(1)])
        if r < 0.68 and self.allow_havoc:
            return HavocStmt(self.pick(INT_VARS))
        if r < 0.70:
            return Skip()
        if r < 0.85:
            return If(self.cond_expr(2), self.block(depth - 1),
                      self.block(depth - 1) if self.rng.random() < 0.6 else Block(()))
        # counted loop: an increment keeps most runs inside the fuel budget
        v = self.pick(INT_VARS)
        body = list(self.block(depth - 1).stmts)
        body.append(Assign(v, Binary("+", Var(v), IntLit(1))))
        return Block((
            Assign(v, IntLit(0)),
            While(Binary("<", Var(v), IntLit(self.rng.randint(1, 3))),
                  Block(tuple(body))),
        ))

    def block(self, depth: int) -> Block:
        n = self.rng.randint(1, 4)
        out = []
        for _ in range(n):
            s = self.stmt(depth)
            # splice block-shaped templates: the printer flattens nesting,
            # so keeping the AST flat preserves round-trip equality
            out.extend(s.stmts if isinstance(s, Block) else (s,))
        return Block(tuple(out))

    def program(self, size: int = 6) -> Program:
        adts = [NODE_ADT] + ([PAIR_ADT] if self.allow_pair_adt else [])
        var_types = {"in": INT, "seed": INT}
        for v in INT_VARS:
            var_types[v] = INT
        for v in ADDR_VARS:
            var_types[v] = ADDR
        for v in OBJ_VARS:
            var_types[v] = obj_type("Node")
        preds = [PredDecl("P", [INT])] if self.allow_preds else []
        top = []
        for _ in range(size):
            s = self.stmt(2)
            top.extend(s.stmts if isinstance(s, Block) else (s,))
        body = Block(tuple(top))
        prog = Program(adts=adts, heap_adt="Node", preds=preds,
                       input_var="in", seed_var="seed",
                       var_types=var_types, body=body)
        assign_locations(prog)
        diags = typecheck(prog)
        assert not diags, f"generator produced ill-typed program: {diags[0]}"
        return prog


def gen_program(seed: int, **kw) -> Program:
    return Gen(random.Random(seed), **kw).program()


def compare_heap_and_trace(program: Program, in_values, seed_range,
                           loop_fuel=64, heap_fuel=32) -> int:
    """Run both heap models over the input grid (seeds enumerated by
    consumed-prefix classes) and check observable agreement.  Returns the
    number of executions compared."""
    from heapinv.interp import CompiledProgram
    heap_cp = CompiledProgram(program, mode="heap")
    trace_cp = CompiledProgram(program, mode="trace")
    lo, hi = seed_range
    compared = 0
    for in_v in in_values:
        covered = []
        for s in range(lo, hi + 1):
            if any(s & mask == residue for mask, residue in covered):
                continue
            ins = {"in": in_v, "seed": s}
            rh = heap_cp.run(inputs=ins, loop_fuel=loop_fuel, heap_fuel=heap_fuel)
            rt = trace_cp.run(inputs=ins, loop_fuel=loop_fuel, heap_fuel=heap_fuel)
            assert rh.outcome == rt.outcome, (in_v, s)
            assert rh.env == rt.env, (in_v, s)
            assert rh.heap_len == rt.heap_len, (in_v, s)
            assert rh.bits_consumed == rt.bits_consumed, (in_v, s)
            compared += 1
            mask = (1 << rh.bits_consumed) - 1
            covered.append((mask, s & mask))
    return compared
