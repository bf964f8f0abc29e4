"""Constrained Horn clause translation and SMT-LIB2 HORN emission.

Heap-free programs (typically encoder outputs) are translated into clauses
over one location predicate per control point, each ranging over all
declared variables.  Predicate assertions put the uninterpreted predicate
in a clause head; predicate assumptions put it in the body alongside the
location predicate (making the clause set non-linear).  Satisfiability of
the emitted system certifies program safety.
"""

from __future__ import annotations

import os
import shlex
import shutil
import subprocess
import sys
from dataclasses import dataclass, field

from .lang import (
    ADDR, INT, Alloc, Assign, AssertExpr, AssertPred, AssumeExpr, AssumePred,
    Binary, Block, CtorApp, DefObj, Expr, HavocStmt, If, IntLit, NondetStmt,
    Null, Program, Read, SelApp, Skip, Stmt, TestApp, Type, Unary, Var,
    While, Write, contains_heap_statements,
)

Term = object  # str | tuple of Terms, rendered as S-expressions


class ChcError(Exception):
    pass


@dataclass
class PredApp:
    name: str
    args: list


@dataclass
class Clause:
    head: PredApp | None            # None encodes False
    body: list[PredApp]
    constraint: list                # conjunction of Bool terms
    vars: list[tuple[str, str]]     # quantified variables with sorts


@dataclass
class ClauseSet:
    adts: list                      # AdtDecl list (declaration order)
    preds: dict[str, list[str]]     # name -> argument sorts
    clauses: list[Clause] = field(default_factory=list)
    entry: str = ""

    def false_clauses(self) -> list[Clause]:
        return [c for c in self.clauses if c.head is None]

    def max_body_atoms(self) -> int:
        return max((len(c.body) for c in self.clauses), default=0)


def _sort_of(ty: Type) -> str:
    if ty in (INT, ADDR):
        return "Int"
    return ty.adt


class _Translator:
    def __init__(self, program: Program):
        if contains_heap_statements(program):
            raise ChcError("program still contains heap statements; encode it first")
        self.p = program
        self.adts = program.adts_by_name()
        self.state = [(name, _sort_of(ty)) for name, ty in program.var_types.items()]
        self.cs = ClauseSet(adts=list(program.adts), preds={})
        for pd in program.preds:
            self.cs.preds[pd.name] = [_sort_of(t) for t in pd.arg_types]
        self.loc_count = 0
        self.fresh_count = 0

    # location predicates

    def new_loc(self) -> str:
        name = f"L{self.loc_count}"
        self.loc_count += 1
        self.cs.preds[name] = [s for _, s in self.state]
        return name

    def state_args(self, env: dict[str, Term]) -> list:
        return [env[n] for n, _ in self.state]

    def base_env(self) -> dict[str, Term]:
        return {n: n for n, _ in self.state}

    def fresh(self, base: str, sort: str, cvars: list) -> str:
        name = f"{base}!{self.fresh_count}"
        self.fresh_count += 1
        cvars.append((name, sort))
        return name

    # terms

    def term(self, e: Expr) -> Term:
        if isinstance(e, IntLit):
            return str(e.value) if e.value >= 0 else ("-", str(-e.value))
        if isinstance(e, Var):
            return e.name
        if isinstance(e, Null):
            return "0"
        if isinstance(e, DefObj):
            return self.default_term(self.p.heap_adt)
        if isinstance(e, Unary):
            if e.op == "-":
                return ("-", self.term(e.operand))
            return self.bool_to_int(("not", self.formula(e.operand)))
        if isinstance(e, Binary):
            op = e.op
            lt, rt = self.term(e.left), self.term(e.right)
            if op in ("+", "-", "*"):
                return (op, lt, rt)
            if op == "/":
                return self.trunc_div(lt, e.right)
            if op == "%":
                return self.trunc_mod(lt, e.right)
            return self.bool_to_int(self.formula(e))
        if isinstance(e, CtorApp):
            if not e.args:
                return e.ctor
            return (e.ctor, *[self.term(a) for a in e.args])
        if isinstance(e, SelApp):
            return (e.sel, self.term(e.arg))
        if isinstance(e, TestApp):
            return self.bool_to_int((("_", "is", e.ctor), self.term(e.arg)))
        raise ChcError(f"cannot translate expression {e!r}")

    def formula(self, e: Expr) -> Term:
        """Bool view of an Int-typed expression: nonzero means true."""
        if isinstance(e, Binary):
            op = e.op
            if op in ("<", "<=", ">", ">="):
                return (op, self.term(e.left), self.term(e.right))
            if op in ("=", "!="):
                eqt = ("=", self.term(e.left), self.term(e.right))
                return eqt if op == "=" else ("not", eqt)
            if op == "&&":
                return ("and", self.formula(e.left), self.formula(e.right))
            if op == "||":
                return ("or", self.formula(e.left), self.formula(e.right))
        if isinstance(e, Unary) and e.op == "!":
            return ("not", self.formula(e.operand))
        if isinstance(e, TestApp):
            return (("_", "is", e.ctor), self.term(e.arg))
        if isinstance(e, IntLit):
            return "true" if e.value != 0 else "false"
        return ("not", ("=", self.term(e), "0"))

    def bool_to_int(self, b: Term) -> Term:
        return ("ite", b, "1", "0")

    def trunc_div(self, lt: Term, divisor: Expr) -> Term:
        d = self._positive_const(divisor)
        # SMT-LIB div is Euclidean; truncation flips the sign for negative
        # dividends
        return ("ite", (">=", lt, "0"), ("div", lt, d),
                ("-", ("div", ("-", lt), d)))

    def trunc_mod(self, lt: Term, divisor: Expr) -> Term:
        d = self._positive_const(divisor)
        return ("ite", (">=", lt, "0"), ("mod", lt, d),
                ("-", ("mod", ("-", lt), d)))

    def _positive_const(self, e: Expr) -> str:
        if isinstance(e, IntLit) and e.value > 0:
            return str(e.value)
        raise ChcError(
            "division in clause translation is supported only for positive "
            "constant divisors (use native nondeterminism instead of the "
            "seed macro when encoding for clause emission)")

    def default_term(self, adt_name: str | None) -> Term:
        if adt_name is None:
            raise ChcError("defObj without heaptype")
        adt = self.adts[adt_name]
        ctor = adt.ctors[0]
        if not ctor.fields:
            return ctor.name
        args = []
        for _, fty in ctor.fields:
            if fty.kind == "Obj":
                args.append(self.default_term(fty.adt))
            else:
                args.append("0")
        return (ctor.name, *args)

    # clauses

    def clause(self, head: PredApp | None, body: list[PredApp],
               constraint: list, extra_vars: list) -> None:
        cvars = list(self.state) + extra_vars
        self.cs.clauses.append(Clause(head, body, constraint, cvars))

    def translate(self) -> ClauseSet:
        entry = self.new_loc()
        self.cs.entry = entry
        # single entry clause: every variable starts unconstrained
        self.clause(PredApp(entry, self.state_args(self.base_env())), [], [], [])
        self.stmt(self.p.body, entry)
        return self.cs

    def goto(self, pre: str, post: str, constraint: list,
             env: dict[str, Term] | None = None,
             extra_body: list | None = None,
             extra_vars: list | None = None) -> None:
        env = env or self.base_env()
        body = [PredApp(pre, self.state_args(self.base_env()))]
        if extra_body:
            body.extend(extra_body)
        self.clause(PredApp(post, self.state_args(env)), body, constraint,
                    extra_vars or [])

    def stmt(self, s: Stmt, pre: str) -> str:
        if isinstance(s, Block):
            cur = pre
            for c in s.stmts:
                cur = self.stmt(c, cur)
            return cur
        if isinstance(s, Skip):
            return pre
        if isinstance(s, Assign):
            post = self.new_loc()
            env = self.base_env()
            env[s.target] = self.term(s.expr)
            self.goto(pre, post, [], env)
            return post
        if isinstance(s, (HavocStmt, NondetStmt)):
            post = self.new_loc()
            cvars: list = []
            sort = _sort_of(self.p.var_types[s.target])
            fresh = self.fresh(s.target.replace("$", "_"), sort, cvars)
            env = self.base_env()
            env[s.target] = fresh
            self.goto(pre, post, [], env, extra_vars=cvars)
            return post
        if isinstance(s, If):
            cond = self.formula(s.cond)
            then_in, else_in = self.new_loc(), self.new_loc()
            self.goto(pre, then_in, [cond])
            self.goto(pre, else_in, [("not", cond)])
            then_out = self.stmt(s.then, then_in)
            else_out = self.stmt(s.els, else_in)
            join = self.new_loc()
            self.goto(then_out, join, [])
            self.goto(else_out, join, [])
            return join
        if isinstance(s, While):
            head = self.new_loc()
            self.goto(pre, head, [])
            cond = self.formula(s.cond)
            body_in = self.new_loc()
            self.goto(head, body_in, [cond])
            body_out = self.stmt(s.body, body_in)
            self.goto(body_out, head, [])
            post = self.new_loc()
            self.goto(head, post, [("not", cond)])
            return post
        if isinstance(s, AssumeExpr):
            post = self.new_loc()
            self.goto(pre, post, [self.formula(s.expr)])
            return post
        if isinstance(s, AssertExpr):
            cond = self.formula(s.expr)
            self.clause(None, [PredApp(pre, self.state_args(self.base_env()))],
                        [("not", cond)], [])
            post = self.new_loc()
            self.goto(pre, post, [cond])
            return post
        if isinstance(s, AssumePred):
            post = self.new_loc()
            app = PredApp(s.pred, [self.term(a) for a in s.args])
            self.goto(pre, post, [], extra_body=[app])
            return post
        if isinstance(s, AssertPred):
            app = PredApp(s.pred, [self.term(a) for a in s.args])
            self.clause(app, [PredApp(pre, self.state_args(self.base_env()))],
                        [], [])
            post = self.new_loc()
            self.goto(pre, post, [])
            return post
        if isinstance(s, (Alloc, Read, Write)):
            raise ChcError("program still contains heap statements; encode it first")
        raise ChcError(f"cannot translate statement {type(s).__name__}")


def to_chc(program: Program) -> ClauseSet:
    """Translate a heap-free typed program into Horn clauses."""
    return _Translator(program).translate()


# ---------------------------------------------------------------------------
# SMT-LIB2 rendering


def _render(t: Term) -> str:
    if isinstance(t, str):
        return t
    return "(" + " ".join(_render(x) for x in t) + ")"


def emit_smtlib(cs: ClauseSet) -> str:
    """Byte-stable HORN-fragment rendering of a clause set."""
    out = ["(set-logic HORN)"]
    for adt in cs.adts:
        ctors = []
        for c in adt.ctors:
            flds = " ".join(f"({fn} {_sort_of(ft)})" for fn, ft in c.fields)
            ctors.append(f"({c.name}{(' ' + flds) if flds else ''})")
        out.append(f"(declare-datatypes (({adt.name} 0)) ((" + " ".join(ctors) + ")))")
    for name, sorts in cs.preds.items():
        out.append(f"(declare-fun {name} ({' '.join(sorts)}) Bool)")
    for cl in cs.clauses:
        head = "false" if cl.head is None else _render(_app(cl.head))
        atoms = [_render(_app(a)) for a in cl.body]
        atoms += [_render(c) for c in cl.constraint]
        if not atoms:
            body = "true"
        elif len(atoms) == 1:
            body = atoms[0]
        else:
            body = "(and " + " ".join(atoms) + ")"
        impl = f"(=> {body} {head})"
        if cl.vars:
            qvars = " ".join(f"({n} {s})" for n, s in cl.vars)
            out.append(f"(assert (forall ({qvars}) {impl}))")
        else:
            out.append(f"(assert {impl})")
    out.append("(check-sat)")
    return "\n".join(out) + "\n"


def _app(app: PredApp) -> Term:
    if not app.args:
        return app.name
    return (app.name, *app.args)


# ---------------------------------------------------------------------------
# external solver driver


@dataclass(frozen=True)
class SolveResult:
    kind: str  # "sat" | "unsat" | "unknown" | "error"
    detail: str = ""

    @property
    def is_error(self) -> bool:
        return self.kind == "error"


SOLVER_ENV_VAR = "HEAPINV_SOLVER"


def default_solver_command() -> str | None:
    """Resolution order: HEAPINV_SOLVER, then a z3 binary on PATH, then the
    z3 Python bindings run as a subprocess."""
    env = os.environ.get(SOLVER_ENV_VAR)
    if env:
        return env
    if shutil.which("z3"):
        return "z3 {file}"
    try:
        import z3  # noqa: F401
        return f"{shlex.quote(sys.executable)} -m heapinv._solver_shim {{file}}"
    except ImportError:
        return None


def solve(path: str, solver_cmd: str | None = None,
          timeout: float = 300.0) -> SolveResult:
    """Run an external Horn solver on an .smt2 file.

    The command template must contain a ``{file}`` placeholder.  sat means
    the encoded program is safe (an interpretation of the predicates
    exists).  Missing binaries, timeouts and unparseable output are
    reported as errors, never as verdicts.
    """
    cmd = solver_cmd or default_solver_command()
    if cmd is None:
        return SolveResult("error", "no Horn solver available "
                           f"(set {SOLVER_ENV_VAR} or install z3)")
    if "{file}" not in cmd:
        return SolveResult("error", "solver command template lacks {file}")
    argv = shlex.split(cmd.replace("{file}", shlex.quote(path)))
    try:
        proc = subprocess.run(argv, capture_output=True, text=True,
                              timeout=timeout)
    except FileNotFoundError:
        return SolveResult("error", f"solver binary not found: {argv[0]}")
    except subprocess.TimeoutExpired:
        return SolveResult("error", f"solver timed out after {timeout}s")
    for line in proc.stdout.splitlines():
        word = line.strip()
        if word in ("sat", "unsat", "unknown"):
            return SolveResult(word)
    return SolveResult("error",
                       "unrecognised solver output: "
                       f"stdout={proc.stdout[:200]!r} stderr={proc.stderr[:200]!r}")
