"""Heap-eliminating program transformations.

All encodings rewrite heap statements into integer bookkeeping plus
assert/assume statements over fresh uninterpreted predicates:

* ``n``  — budget instrumentation only: a counter is decremented and
  checked before every heap statement (the other encodings are proved
  against programs instrumented this way).
* ``r``  — records the value returned by every read in a predicate
  ``R(input, readCount, obj)``, using a prophecy variable ``$last_addr``
  and a history variable ``$last`` tracking the object at that address.
* ``rw`` — additionally records writes in ``W(input, opCount, obj)`` and
  resolves reads in two steps (read count -> write count -> object).
* ``rwfun`` — the rw variant for functional properties of memory-safe
  programs: allocation writes nothing and the initial-object assert is
  dropped.
* ``rwmem`` — the rwfun variant for memory-safety checking: validity
  asserts are added to reads and writes.

Optional extensions: location tagging, a one-element cache, scope-variable
augmentation, and argument removal (a sound abstraction).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .lang import (
    ADDR, INT, AdtDecl, Alloc, Assign, AssertExpr, AssertPred, AssumeExpr,
    AssumePred, Binary, Block, CtorApp, CtorDecl, DefObj, Expr, HavocStmt,
    If, IntLit, NondetStmt, Null, PredDecl, Program, Read, SelApp, Skip,
    Stmt, TestApp, Type, Unary, Var, While, Write, assign_locations,
    contains_heap_statements, obj_type, typecheck,
)

READ_PRED = "R"
WRITE_PRED = "W"

V_CNT_ALLOC = "$cnt_alloc"
V_CNT = "$cnt"
V_LAST = "$last"
V_CNT_LAST = "$cnt_last"
V_T = "$t"
V_LAST_ADDR = "$last_addr"
V_COUNTER = "$c"
V_LAST_LOC = "$last_loc"
V_TAG_TMP = "$l"
V_TAG_TMP_W = "$lw"
V_CACHE_ADDR = "$lastc_addr"
V_CACHE_DATA = "$lastc_data"


@dataclass(frozen=True)
class EncodingConfig:
    base: str = "r"  # "r" | "rw" | "rwfun" | "rwmem"
    tagging: bool = False
    caching: bool = False
    scope_vars: tuple[str, ...] = ()
    drop_args: tuple[tuple[str, int], ...] = ()  # (predicate, index)
    assume_memsafe: bool = False
    native_havoc: bool = False
    strip_asserts: bool = False      # rwmem: drop the source assert statements
    alloc_init_write: bool = False   # rwfun/rwmem: record an object at alloc


@dataclass
class EncodedProgram:
    program: Program
    source: Program
    config: EncodingConfig
    introduced: dict[str, str] = field(default_factory=dict)
    pred_sigs: dict[str, list[Type]] = field(default_factory=dict)


class EncodingError(Exception):
    pass


# ---------------------------------------------------------------------------
# small AST builders

def _v(name: str) -> Var:
    return Var(name)


def _n(value: int) -> IntLit:
    return IntLit(value)


def _eq(a: Expr, b: Expr) -> Binary:
    return Binary("=", a, b)


def _and(a: Expr, b: Expr) -> Binary:
    return Binary("&&", a, b)


def _plus1(name: str) -> Assign:
    return Assign(name, Binary("+", _v(name), _n(1)))


def _block(stmts: list[Stmt]) -> Block:
    return Block(tuple(stmts))


def _if(cond: Expr, then: list[Stmt], els: list[Stmt] | None = None) -> If:
    return If(cond, _block(then), _block(els or []))


def _tx_branch(tx, s: Stmt) -> Block:
    """Transform an if/while branch without introducing nested blocks."""
    if isinstance(s, Block):
        return tx(s)[0]
    return _block(tx(s))


# ---------------------------------------------------------------------------
# validation and shared passes


def _validate_source(program: Program, need_heap_adt: bool = True) -> None:
    diags = typecheck(program)
    if diags:
        raise EncodingError(f"source program does not typecheck: {diags[0]}")
    if program.input_var is None:
        raise EncodingError("encoding requires an input declaration")
    if program.seed_var is None:
        raise EncodingError("encoding requires a seed declaration")
    for name in program.var_types:
        # the budget counter may already be present: the heap encodings are
        # routinely composed with the budget instrumentation
        if name.startswith("$") and name != V_COUNTER:
            raise EncodingError(
                f"variable {name!r}: the '$' prefix is reserved for introduced names")
    for pd in program.preds:
        if pd.name in (READ_PRED, WRITE_PRED):
            raise EncodingError(
                f"predicate name {pd.name!r} is reserved by the encoding")
    if need_heap_adt and program.heap_adt is None:
        raise EncodingError("encoding requires a heaptype declaration")


def _tx_expr(e: Expr) -> Expr:
    """Rebuild an expression with null lowered to the integer 0."""
    if isinstance(e, Null):
        return IntLit(0, pos=e.pos)
    if isinstance(e, IntLit):
        return IntLit(e.value, pos=e.pos)
    if isinstance(e, Var):
        return Var(e.name, pos=e.pos)
    if isinstance(e, DefObj):
        return DefObj(pos=e.pos)
    if isinstance(e, Unary):
        return Unary(e.op, _tx_expr(e.operand), pos=e.pos)
    if isinstance(e, Binary):
        return Binary(e.op, _tx_expr(e.left), _tx_expr(e.right), pos=e.pos)
    if isinstance(e, CtorApp):
        return CtorApp(e.ctor, [_tx_expr(a) for a in e.args], pos=e.pos)
    if isinstance(e, SelApp):
        return SelApp(e.sel, _tx_expr(e.arg), pos=e.pos)
    if isinstance(e, TestApp):
        return TestApp(e.ctor, _tx_expr(e.arg), pos=e.pos)
    raise EncodingError(f"cannot transform expression {e!r}")


def _expr_vars(e: Expr) -> set[str]:
    out = set()
    stack = [e]
    while stack:
        x = stack.pop()
        if isinstance(x, Var):
            out.add(x.name)
        elif isinstance(x, Unary):
            stack.append(x.operand)
        elif isinstance(x, Binary):
            stack.extend((x.left, x.right))
        elif isinstance(x, CtorApp):
            stack.extend(x.args)
        elif isinstance(x, (SelApp, TestApp)):
            stack.append(x.arg)
    return out


def _addr_fields_to_int(adts: list[AdtDecl]) -> list[AdtDecl]:
    out = []
    for a in adts:
        ctors = [CtorDecl(c.name, [(fn, INT if ft == ADDR else ft)
                                   for fn, ft in c.fields])
                 for c in a.ctors]
        out.append(AdtDecl(a.name, ctors))
    return out


# ---------------------------------------------------------------------------
# the budget instrumentation


def enc_n(program: Program) -> Program:
    """Insert ``$c := $c - 1; assume($c >= 0);`` before every heap
    statement.  ``$c`` is declared but not initialised; the oracle seeds it
    with the heap-operation budget."""
    _validate_source(program, need_heap_adt=False)
    prelude = lambda: [
        Assign(V_COUNTER, Binary("-", _v(V_COUNTER), _n(1))),
        AssumeExpr(Binary(">=", _v(V_COUNTER), _n(0))),
    ]

    def tx(s: Stmt) -> list[Stmt]:
        if isinstance(s, Block):
            return [Block(tuple(x for c in s.stmts for x in tx(c)), loc=s.loc, pos=s.pos)]
        if isinstance(s, If):
            return [If(s.cond, _tx_branch(tx, s.then), _tx_branch(tx, s.els), pos=s.pos)]
        if isinstance(s, While):
            return [While(s.cond, _tx_branch(tx, s.body), pos=s.pos)]
        if isinstance(s, (Alloc, Read, Write)):
            return prelude() + [s]
        return [s]

    var_types = dict(program.var_types)
    var_types[V_COUNTER] = INT
    out = replace(program, var_types=var_types, body=tx(program.body)[0])
    assign_locations(out)
    return out


# ---------------------------------------------------------------------------
# the heap-eliminating encodings


class _HeapEncoder:
    def __init__(self, program: Program, config: EncodingConfig):
        _validate_source(program)
        if config.base not in ("r", "rw", "rwfun", "rwmem"):
            raise EncodingError(f"unknown encoding base {config.base!r}")
        if config.base == "rwfun" and not config.assume_memsafe:
            raise EncodingError(
                "the rwfun encoding is only correct for memory-safe programs; "
                "pass assume_memsafe to acknowledge this")
        self.src = program
        self.cfg = config
        assign_locations(program)
        self.obj_ty = obj_type(program.heap_adt)
        self.in_var = program.input_var

    # havoc emission (macro by default, native statement on request)

    def _havoc(self, target: str) -> Stmt:
        if self.cfg.native_havoc:
            return NondetStmt(target)
        return HavocStmt(target)

    # predicate applications, with tagging/scope hooks applied uniformly

    def _r_args(self, third: Expr, write_loc: Expr | None,
                read_loc: int | None) -> list[Expr]:
        args = [_v(self.in_var), _v(V_CNT), third]
        if self.cfg.tagging:
            args.append(write_loc)
            args.append(_n(read_loc))
        return args

    def _w_args(self, cnt: Expr, obj: Expr, loc: int | None) -> list[Expr]:
        args = [_v(self.in_var), cnt, obj]
        if self.cfg.tagging:
            args.append(_n(loc) if loc is not None else _v(V_TAG_TMP_W))
        return args

    # statement rewriting

    def encode(self) -> EncodedProgram:
        cfg = self.cfg
        base = cfg.base
        introduced: dict[str, str] = {}

        var_types: dict[str, Type] = {}
        for name, ty in self.src.var_types.items():
            var_types[name] = INT if ty == ADDR else ty

        def intro(name: str, ty: Type):
            var_types[name] = ty
            introduced[name] = str(ty)

        intro(V_CNT_ALLOC, INT)
        intro(V_CNT, INT)
        if base == "r":
            intro(V_LAST, self.obj_ty)
        else:
            intro(V_CNT_LAST, INT)
            intro(V_T, INT)
        intro(V_LAST_ADDR, INT)
        if cfg.tagging:
            intro(V_LAST_LOC, INT)
            intro(V_TAG_TMP, INT)
            if base != "r":
                intro(V_TAG_TMP_W, INT)
        if cfg.caching:
            intro(V_CACHE_ADDR, INT)
            intro(V_CACHE_DATA, self.obj_ty)

        self._tmp_counter = 0

        def fresh_tmp() -> str:
            name = f"$e{self._tmp_counter}"
            self._tmp_counter += 1
            intro(name, self.obj_ty)
            return name

        # initialisation block
        init: list[Stmt] = [
            Assign(V_CNT_ALLOC, _n(0)),
            Assign(V_CNT, _n(0)),
        ]
        if base == "r":
            init.append(Assign(V_LAST, DefObj()))
        else:
            init.append(Assign(V_CNT_LAST, _n(0)))
            init.append(Assign(V_T, _n(0)))
            if base == "rw":
                init.append(AssertPred(
                    WRITE_PRED, self._w_args(_n(0), DefObj(), 0)))
        if cfg.tagging:
            init.append(Assign(V_LAST_LOC, _n(0)))
        if cfg.caching:
            init.append(Assign(V_CACHE_ADDR, _n(0)))
            init.append(Assign(V_CACHE_DATA, DefObj()))

        valid = lambda p: _and(Binary("<", _n(0), _v(p)),
                               Binary("<=", _v(p), _v(V_CNT_ALLOC)))

        def cache_update(addr: str, obj: Expr) -> list[Stmt]:
            return [Assign(V_CACHE_ADDR, _v(addr)),
                    Assign(V_CACHE_DATA, obj)]

        def tx_alloc(s: Alloc) -> list[Stmt]:
            e = _tx_expr(s.expr)
            out: list[Stmt] = []
            if s.target in _expr_vars(e):
                # the table overwrites the target before using the operand;
                # pre-evaluate to preserve the original evaluation order
                tmp = fresh_tmp()
                out.append(Assign(tmp, e))
                e = _v(tmp)
            out.append(_plus1(V_CNT_ALLOC))
            out.append(Assign(s.target, _v(V_CNT_ALLOC)))
            record_obj = base == "rw" or (base in ("rwfun", "rwmem")
                                          and cfg.alloc_init_write)
            if base == "r":
                then = [Assign(V_LAST, e)]
                if cfg.tagging:
                    then.append(Assign(V_LAST_LOC, _n(s.loc)))
                out.append(_if(_eq(_v(V_LAST_ADDR), _v(s.target)), then))
                if cfg.caching:
                    out.extend(cache_update(s.target, e))
            elif record_obj:
                out.append(_plus1(V_CNT))
                out.append(AssertPred(WRITE_PRED, self._w_args(_v(V_CNT), e, s.loc)))
                then = [Assign(V_CNT_LAST, _v(V_CNT))]
                if cfg.tagging:
                    then.append(Assign(V_LAST_LOC, _n(s.loc)))
                out.append(_if(_eq(_v(V_LAST_ADDR), _v(s.target)), then))
                if cfg.caching:
                    out.extend(cache_update(s.target, e))
            # rwfun/rwmem without the init-write adjustment: the operand is
            # dropped, allocation is pure counter arithmetic
            return out

        def read_core(s: Read) -> list[Stmt]:
            if base == "r":
                then = [
                    AssertPred(READ_PRED, self._r_args(
                        _v(V_LAST), _v(V_LAST_LOC) if cfg.tagging else None, s.loc)),
                    Assign(s.target, _v(V_LAST)),
                ]
                els: list[Stmt] = [self._havoc(s.target)]
                if cfg.tagging:
                    els.append(self._havoc(V_TAG_TMP))
                els.append(AssumePred(READ_PRED, self._r_args(
                    _v(s.target), _v(V_TAG_TMP) if cfg.tagging else None, s.loc)))
                return [_if(_eq(_v(V_LAST_ADDR), _v(s.addr)), then, els)]
            then = [
                AssertPred(READ_PRED, self._r_args(
                    _v(V_CNT_LAST), _v(V_LAST_LOC) if cfg.tagging else None, s.loc)),
                Assign(V_T, _v(V_CNT_LAST)),
            ]
            els = [self._havoc(V_T)]
            if cfg.tagging:
                els.append(self._havoc(V_TAG_TMP))
            els.append(AssumePred(READ_PRED, self._r_args(
                _v(V_T), _v(V_TAG_TMP) if cfg.tagging else None, s.loc)))
            out: list[Stmt] = [_if(_eq(_v(V_LAST_ADDR), _v(s.addr)), then, els)]
            out.append(self._havoc(s.target))
            if cfg.tagging:
                out.append(self._havoc(V_TAG_TMP_W))
            out.append(AssumePred(WRITE_PRED, self._w_args(
                _v(V_T), _v(s.target), None)))
            return out

        def tx_read(s: Read) -> list[Stmt]:
            out: list[Stmt] = [_plus1(V_CNT)]
            if base == "rwmem":
                # every read is validity-checked, cache hits included
                out.append(AssertExpr(valid(s.addr)))
            core = read_core(s)
            if cfg.caching:
                hit = [Assign(s.target, _v(V_CACHE_DATA))]
                miss = core + cache_update(s.addr, _v(s.target))
                out.append(_if(_eq(_v(V_CACHE_ADDR), _v(s.addr)), hit, miss))
            else:
                out.extend(core)
            return out

        def tx_write(s: Write) -> list[Stmt]:
            e = _tx_expr(s.expr)
            if base == "r":
                then = [Assign(V_LAST, e)]
                if cfg.tagging:
                    then.append(Assign(V_LAST_LOC, _n(s.loc)))
                if cfg.caching:
                    # one validity test guards both the tracking update and
                    # the cache update (an invalid write changes nothing)
                    inner = [_if(_eq(_v(V_LAST_ADDR), _v(s.addr)), then)]
                    inner.extend(cache_update(s.addr, e))
                    return [_if(valid(s.addr), inner)]
                return [_if(_and(_eq(_v(V_LAST_ADDR), _v(s.addr)), valid(s.addr)),
                            then)]
            out: list[Stmt] = [_plus1(V_CNT)]
            then = [AssertPred(WRITE_PRED, self._w_args(_v(V_CNT), e, s.loc))]
            inner_then = [Assign(V_CNT_LAST, _v(V_CNT))]
            if cfg.tagging:
                inner_then.append(Assign(V_LAST_LOC, _n(s.loc)))
            then.append(_if(_eq(_v(V_LAST_ADDR), _v(s.addr)), inner_then))
            if cfg.caching:
                then.extend(cache_update(s.addr, e))
            if base == "rwmem":
                out.append(_if(valid(s.addr), then, [AssertExpr(_n(0))]))
            else:
                out.append(_if(valid(s.addr), then))
            return out

        def tx(s: Stmt) -> list[Stmt]:
            if isinstance(s, Block):
                return [Block(tuple(x for c in s.stmts for x in tx(c)), pos=s.pos)]
            if isinstance(s, If):
                return [If(_tx_expr(s.cond), _tx_branch(tx, s.then),
                           _tx_branch(tx, s.els), pos=s.pos)]
            if isinstance(s, While):
                return [While(_tx_expr(s.cond), _tx_branch(tx, s.body), pos=s.pos)]
            if isinstance(s, Alloc):
                return tx_alloc(s)
            if isinstance(s, Read):
                return tx_read(s)
            if isinstance(s, Write):
                return tx_write(s)
            if isinstance(s, Assign):
                return [Assign(s.target, _tx_expr(s.expr), pos=s.pos)]
            if isinstance(s, AssumeExpr):
                return [AssumeExpr(_tx_expr(s.expr), pos=s.pos)]
            if isinstance(s, AssertExpr):
                if base == "rwmem" and cfg.strip_asserts:
                    return []
                return [AssertExpr(_tx_expr(s.expr), pos=s.pos)]
            if isinstance(s, AssumePred):
                return [AssumePred(s.pred, [_tx_expr(a) for a in s.args], pos=s.pos)]
            if isinstance(s, AssertPred):
                if base == "rwmem" and cfg.strip_asserts:
                    return []
                return [AssertPred(s.pred, [_tx_expr(a) for a in s.args], pos=s.pos)]
            if isinstance(s, (Skip, HavocStmt, NondetStmt)):
                return [s]
            raise EncodingError(f"cannot encode statement {type(s).__name__}")

        body_stmts = init + list(tx(self.src.body)[0].stmts)

        # predicate signatures
        pred_sigs: dict[str, list[Type]] = {}
        if base == "r":
            sig_r = [INT, INT, self.obj_ty]
            if cfg.tagging:
                sig_r += [INT, INT]
            pred_sigs[READ_PRED] = sig_r
        else:
            sig_r = [INT, INT, INT]
            if cfg.tagging:
                sig_r += [INT, INT]
            sig_w = [INT, INT, self.obj_ty]
            if cfg.tagging:
                sig_w += [INT]
            pred_sigs[READ_PRED] = sig_r
            pred_sigs[WRITE_PRED] = sig_w

        preds = [PredDecl(p.name, list(p.arg_types)) for p in self.src.preds]
        for name, sig in pred_sigs.items():
            preds.append(PredDecl(name, list(sig)))

        out = Program(
            adts=_addr_fields_to_int(self.src.adts),
            heap_adt=self.src.heap_adt,
            preds=preds,
            input_var=self.src.input_var,
            seed_var=self.src.seed_var,
            var_types=var_types,
            body=_block(body_stmts),
        )
        assign_locations(out)
        diags = typecheck(out)
        if diags:
            raise AssertionError(f"encoder produced an ill-typed program: {diags[0]}")
        enc = EncodedProgram(out, self.src, cfg, introduced, pred_sigs)
        if cfg.scope_vars:
            enc = apply_scope_vars(enc, list(cfg.scope_vars))
        if cfg.drop_args:
            drop: dict[str, list[int]] = {}
            for pred, idx in cfg.drop_args:
                drop.setdefault(pred, []).append(idx)
            enc = remove_arguments(enc, drop)
        return enc


def encode(program: Program, config: EncodingConfig) -> EncodedProgram:
    return _HeapEncoder(program, config).encode()


def enc_r(program: Program, **kw) -> EncodedProgram:
    return encode(program, EncodingConfig(base="r", **kw))


def enc_rw(program: Program, **kw) -> EncodedProgram:
    return encode(program, EncodingConfig(base="rw", **kw))


def enc_rwfun(program: Program, **kw) -> EncodedProgram:
    kw.setdefault("assume_memsafe", True)
    return encode(program, EncodingConfig(base="rwfun", **kw))


def enc_rwmem(program: Program, **kw) -> EncodedProgram:
    return encode(program, EncodingConfig(base="rwmem", **kw))


# ---------------------------------------------------------------------------
# extension passes


def apply_tagging(enc: EncodedProgram) -> EncodedProgram:
    """Re-encode the source with location tagging enabled."""
    if enc.config.tagging:
        return enc
    return encode(enc.source, replace(enc.config, tagging=True))


def apply_caching(enc: EncodedProgram) -> EncodedProgram:
    """Re-encode the source with the one-element cache enabled."""
    if enc.config.caching:
        return enc
    return encode(enc.source, replace(enc.config, caching=True))


def apply_scope_vars(enc: EncodedProgram, names: list[str]) -> EncodedProgram:
    """Append the current values of the named Int variables as extra
    arguments at every occurrence of the encoding predicates.  The extras
    are never havoced in assume branches: as history they are uniquely
    determined by the surrounding execution."""
    if not names:
        return enc
    prog = enc.program
    for nm in names:
        ty = prog.var_types.get(nm)
        if ty is None:
            raise EncodingError(f"unknown scope variable {nm!r}")
        if ty != INT:
            raise EncodingError(f"scope variable {nm!r} must have type Int, has {ty}")

    targets = set(enc.pred_sigs)

    def tx(s: Stmt) -> Stmt:
        if isinstance(s, Block):
            return Block(tuple(tx(c) for c in s.stmts), loc=s.loc, pos=s.pos)
        if isinstance(s, If):
            return If(s.cond, tx(s.then), tx(s.els), loc=s.loc, pos=s.pos)
        if isinstance(s, While):
            return While(s.cond, tx(s.body), loc=s.loc, pos=s.pos)
        if isinstance(s, (AssumePred, AssertPred)) and s.pred in targets:
            cls = type(s)
            return cls(s.pred, list(s.args) + [Var(nm) for nm in names],
                       loc=s.loc, pos=s.pos)
        return s

    preds = [PredDecl(p.name, list(p.arg_types) + [INT] * len(names))
             if p.name in targets else p for p in prog.preds]
    new_sigs = {name: sig + [INT] * len(names)
                for name, sig in enc.pred_sigs.items()}
    out = replace(prog, preds=preds, body=tx(prog.body))
    assign_locations(out)
    diags = typecheck(out)
    if diags:
        raise AssertionError(f"scope augmentation broke typing: {diags[0]}")
    return EncodedProgram(out, enc.source, enc.config, dict(enc.introduced),
                          new_sigs)


def remove_arguments(enc: EncodedProgram,
                     drop: dict[str, list[int]]) -> EncodedProgram:
    """Remove the given argument positions from predicate declarations and
    every application.  Sound but possibly incomplete."""
    if not drop:
        return enc
    prog = enc.program
    by_pred: dict[str, set[int]] = {}
    decl = {p.name: p for p in prog.preds}
    for pred, idxs in drop.items():
        if pred not in decl:
            raise EncodingError(f"unknown predicate {pred!r}")
        arity = len(decl[pred].arg_types)
        for i in idxs:
            if not (0 <= i < arity):
                raise EncodingError(
                    f"argument index {i} out of range for {pred!r}/{arity}")
        by_pred[pred] = set(idxs)

    def keep(pred: str, xs: list) -> list:
        dead = by_pred.get(pred)
        if not dead:
            return list(xs)
        return [x for i, x in enumerate(xs) if i not in dead]

    def tx(s: Stmt) -> Stmt:
        if isinstance(s, Block):
            return Block(tuple(tx(c) for c in s.stmts), loc=s.loc, pos=s.pos)
        if isinstance(s, If):
            return If(s.cond, tx(s.then), tx(s.els), loc=s.loc, pos=s.pos)
        if isinstance(s, While):
            return While(s.cond, tx(s.body), loc=s.loc, pos=s.pos)
        if isinstance(s, (AssumePred, AssertPred)) and s.pred in by_pred:
            cls = type(s)
            return cls(s.pred, keep(s.pred, s.args), loc=s.loc, pos=s.pos)
        return s

    preds = [PredDecl(p.name, keep(p.name, p.arg_types)) for p in prog.preds]
    new_sigs = {name: keep(name, sig) for name, sig in enc.pred_sigs.items()}
    out = replace(prog, preds=preds, body=tx(prog.body))
    assign_locations(out)
    diags = typecheck(out)
    if diags:
        raise AssertionError(f"argument removal broke typing: {diags[0]}")
    return EncodedProgram(out, enc.source, enc.config, dict(enc.introduced),
                          new_sigs)


# ---------------------------------------------------------------------------
# structural postconditions (used by tests and the CLI)


def encoding_is_heap_free(program: Program) -> bool:
    return not contains_heap_statements(program) and all(
        ty != ADDR for ty in program.var_types.values())
