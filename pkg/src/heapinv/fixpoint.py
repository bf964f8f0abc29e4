"""Bounded least-fixed-point oracle for uninterpreted predicates.

The strongest interpretation under which no predicate assertion fails is
computed by iterating the operator ``T``: one application runs the program
over a finite grid of inputs and adds every argument tuple whose assertion
failed.  Safety of a program over the same grid is then decided by running
it once more under the fixed point: only expression assertions can still
fail there.

Executions are deterministic given (input, seed, prophecy address, fuel),
which allows two big savings without changing the computed sets:

* seeds are enumerated by equivalence classes of consumed bit prefixes
  whenever the seed variable is only touched by havoc/nondet draws;
* between iterations only the executions blocked on a newly added tuple
  are rerun (an execution stops at its first negative predicate query, so
  one blocked tuple per execution suffices).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .interp import (
    Bot, CompiledProgram, FUEL_EXHAUSTED, ObjVal, Undefined, Value,
    default_obj, heap_read,
)
from .lang import FAILURE_PRED, Program, Type, variables_read

# Conventional names for encoder-introduced inputs; programs declaring them
# get those dimensions of the grid enumerated.
LAST_ADDR_VAR = "$last_addr"
COUNTER_VAR = "$c"


# ---------------------------------------------------------------------------
# Interpretations


class Interpretation:
    """Finite interpretation: predicate name -> set of argument tuples."""

    __slots__ = ("rels",)

    def __init__(self, rels: dict[str, set[tuple]] | None = None):
        self.rels: dict[str, set[tuple]] = {k: set(v) for k, v in (rels or {}).items()}

    @staticmethod
    def empty() -> "Interpretation":
        return Interpretation()

    def contains(self, name: str, args: tuple) -> bool:
        rel = self.rels.get(name)
        return rel is not None and args in rel

    def add(self, name: str, args: tuple) -> bool:
        rel = self.rels.setdefault(name, set())
        if args in rel:
            return False
        rel.add(args)
        return True

    def tuples(self, name: str) -> frozenset:
        return frozenset(self.rels.get(name, ()))

    def copy(self) -> "Interpretation":
        return Interpretation(self.rels)

    def union(self, other: "Interpretation") -> "Interpretation":
        out = self.copy()
        for name, rel in other.rels.items():
            out.rels.setdefault(name, set()).update(rel)
        return out

    def is_subset(self, other: "Interpretation") -> bool:
        return all(rel <= other.rels.get(name, set())
                   for name, rel in self.rels.items())

    def sizes(self) -> dict[str, int]:
        return {name: len(rel) for name, rel in sorted(self.rels.items())}

    def total_size(self) -> int:
        return sum(len(rel) for rel in self.rels.values())

    def __eq__(self, other):
        if not isinstance(other, Interpretation):
            return NotImplemented
        names = set(self.rels) | set(other.rels)
        return all(self.rels.get(n, set()) == other.rels.get(n, set())
                   for n in names)

    def __repr__(self):
        return f"Interpretation({self.sizes()})"


# ---------------------------------------------------------------------------
# Input domain


@dataclass(frozen=True)
class InputDomain:
    """Finite restriction of the space of initial stacks."""

    in_range: tuple[int, int] = (-3, 3)
    seed_range: tuple[int, int] = (0, 255)
    last_addr_range: tuple[int, int] = (0, 6)
    loop_fuel: int = 64
    heap_op_fuel: int = 32
    iteration_cap: int | None = None

    def __post_init__(self):
        for lo, hi in (self.in_range, self.seed_range, self.last_addr_range):
            if lo > hi:
                raise ValueError("empty input range")
        if self.seed_range[0] < 0:
            raise ValueError("seeds must be nonnegative")
        if self.last_addr_range[0] < 0:
            raise ValueError("addresses are naturals")

    def grid_size(self) -> int:
        return ((self.in_range[1] - self.in_range[0] + 1)
                * (self.seed_range[1] - self.seed_range[0] + 1)
                * (self.last_addr_range[1] - self.last_addr_range[0] + 1))

    def cap(self) -> int:
        return self.iteration_cap if self.iteration_cap is not None \
            else 10 * self.grid_size()


def program_uses_seed(program: Program) -> bool:
    """True when executions can depend on the seed: a draw statement exists
    or the seed variable is read by an expression."""
    from .lang import HavocStmt, NondetStmt, walk_statements
    if program.seed_var is None:
        return False
    if program.seed_var in variables_read(program):
        return True
    return any(isinstance(s, (HavocStmt, NondetStmt))
               for s in walk_statements(program.body))


def program_uses_input(program: Program) -> bool:
    return (program.input_var is not None
            and program.input_var in variables_read(program))


def _class_count(lo: int, hi: int, residue: int, bits: int) -> int:
    """Number of seeds in [lo, hi] congruent to residue mod 2**bits."""
    step = 1 << bits
    r = residue % step
    first = lo + ((r - lo) % step)
    if first > hi:
        return 0
    return (hi - first) // step + 1


# ---------------------------------------------------------------------------
# Grid executor


@dataclass
class Leaf:
    seed: int            # representative (smallest in class)
    bits: int            # consumed seed bits; class = seeds matching mod 2^bits
    outcome: object
    blocker: tuple | None
    weight: int          # number of seeds in the class within range


@dataclass
class Cell:
    in_v: int | None
    last_addr: int | None
    leaves: list[Leaf] = field(default_factory=list)

    def blockers(self) -> set[tuple]:
        return {l.blocker for l in self.leaves if l.blocker is not None}


class GridExecutor:
    """Runs a compiled program over the bounded input grid with per-cell
    memoisation between fixpoint iterations."""

    def __init__(self, program: Program, domain: InputDomain,
                 mode: str = "heap"):
        self.program = program
        self.domain = domain
        self.compiled = CompiledProgram(program, mode=mode)
        self.enumerate_in = program_uses_input(program)
        self.enumerate_last_addr = LAST_ADDR_VAR in program.var_types
        self.has_counter = COUNTER_VAR in program.var_types
        # seed classing is sound only when the seed variable is never read
        # by ordinary expressions (draws are not expression reads)
        self.seed_var = program.seed_var
        self.seed_classing = (self.seed_var is not None
                              and self.seed_var not in variables_read(program))
        self.cells: dict[tuple, Cell] = {}

    # enumeration dimensions

    def in_values(self) -> list[int | None]:
        if self.enumerate_in:
            lo, hi = self.domain.in_range
            return list(range(lo, hi + 1))
        return [None]

    def last_addr_values(self) -> list[int | None]:
        if self.enumerate_last_addr:
            lo, hi = self.domain.last_addr_range
            return list(range(lo, hi + 1))
        return [None]

    def _inputs(self, in_v, la, seed) -> dict:
        inputs = {}
        if in_v is not None:
            inputs[self.program.input_var] = in_v
        if la is not None:
            inputs[LAST_ADDR_VAR] = la
        if self.seed_var is not None:
            inputs[self.seed_var] = seed
        if self.has_counter:
            inputs[COUNTER_VAR] = self.domain.heap_op_fuel
        return inputs

    def _run_one(self, in_v, la, seed, interp):
        return self.compiled.run(
            inputs=self._inputs(in_v, la, seed), interp=interp,
            loop_fuel=self.domain.loop_fuel,
            heap_fuel=self.domain.heap_op_fuel)

    def run_cell(self, in_v, la, interp) -> Cell:
        cell = Cell(in_v, la)
        lo, hi = self.domain.seed_range
        if self.seed_var is None:
            res = self.compiled.run(
                inputs=self._inputs(in_v, la, 0), interp=interp,
                loop_fuel=self.domain.loop_fuel,
                heap_fuel=self.domain.heap_op_fuel)
            cell.leaves.append(Leaf(0, 0, res.outcome, res.blocker, 1))
            return cell
        if not self.seed_classing:
            for s in range(lo, hi + 1):
                res = self._run_one(in_v, la, s, interp)
                cell.leaves.append(Leaf(s, 0, res.outcome, res.blocker, 1))
            return cell
        covered: list[tuple[int, int]] = []  # (mask, residue)
        for s in range(lo, hi + 1):
            if any(s & mask == residue for mask, residue in covered):
                continue
            res = self._run_one(in_v, la, s, interp)
            bits = res.bits_consumed
            mask = (1 << bits) - 1
            covered.append((mask, s & mask))
            cell.leaves.append(Leaf(s, bits, res.outcome, res.blocker,
                                    _class_count(lo, hi, s & mask, bits)))
        return cell

    def run_all(self, interp):
        for in_v in self.in_values():
            for la in self.last_addr_values():
                self.cells[(in_v, la)] = self.run_cell(in_v, la, interp)

    def rerun_blocked(self, interp, added: set[tuple]):
        for key, cell in list(self.cells.items()):
            if cell.blockers() & added:
                self.cells[key] = self.run_cell(cell.in_v, cell.last_addr, interp)

    # harvesting

    def failing_tuples(self) -> set[tuple]:
        """(pred, args) pairs from failed predicate assertions."""
        out = set()
        for cell in self.cells.values():
            for leaf in cell.leaves:
                o = leaf.outcome
                if isinstance(o, Bot) and o.pred != FAILURE_PRED:
                    out.add((o.pred, o.args))
        return out

    def expression_failures(self) -> list[tuple]:
        """Witnesses (in, seed, last_addr) of expression assertion failures,
        lexicographically sorted."""
        out = []
        for cell in self.cells.values():
            for leaf in cell.leaves:
                if isinstance(leaf.outcome, Bot) and leaf.outcome.pred == FAILURE_PRED:
                    out.append((cell.in_v, leaf.seed, cell.last_addr))
        def key(w):
            return tuple(-(10 ** 9) if v is None else v for v in w)
        return sorted(out, key=key)

    def collapsed_multiplier(self) -> int:
        """Grid points represented by each run through unenumerated
        dimensions (unused input, no prophecy variable, no seed)."""
        d = self.domain
        m = 1
        if not self.enumerate_in:
            m *= d.in_range[1] - d.in_range[0] + 1
        if not self.enumerate_last_addr:
            m *= d.last_addr_range[1] - d.last_addr_range[0] + 1
        if self.seed_var is None:
            m *= d.seed_range[1] - d.seed_range[0] + 1
        return m

    def fuel_exhausted_weight(self) -> int:
        n = 0
        for cell in self.cells.values():
            for leaf in cell.leaves:
                if isinstance(leaf.outcome, Undefined) and \
                        leaf.outcome.reason == FUEL_EXHAUSTED:
                    n += leaf.weight
        return n * self.collapsed_multiplier()

    def predicate_bot_leaves(self) -> list:
        out = []
        for cell in self.cells.values():
            for leaf in cell.leaves:
                if isinstance(leaf.outcome, Bot) and leaf.outcome.pred != FAILURE_PRED:
                    out.append((cell, leaf))
        return out


# ---------------------------------------------------------------------------
# The operator T and its least fixed point


def immediate_consequence(program: Program, interp: Interpretation,
                          domain: InputDomain) -> Interpretation:
    """One application of T: add every tuple whose predicate assertion fails
    for some grid input, starting from the empty heap."""
    ex = GridExecutor(program, domain)
    ex.run_all(interp)
    out = interp.copy()
    for pred, args in ex.failing_tuples():
        out.add(pred, args)
    return out


@dataclass
class FixpointInfo:
    interp: Interpretation
    iterations: int
    executor: GridExecutor


class IterationCapExceeded(Exception):
    def __init__(self, cap: int, sizes: dict[str, int]):
        super().__init__(
            f"fixpoint iteration cap {cap} exceeded; predicate sizes {sizes}")
        self.cap = cap
        self.sizes = sizes


def least_fixpoint_info(program: Program, domain: InputDomain) -> FixpointInfo:
    # iterations counts the applications of T that grew the interpretation;
    # the final, confirming application is always performed
    interp = Interpretation.empty()
    ex = GridExecutor(program, domain)
    ex.run_all(interp)
    iterations = 0
    cap = domain.cap()
    added = {t for t in ex.failing_tuples() if not interp.contains(*t)}
    while added:
        for pred, args in added:
            interp.add(pred, args)
        iterations += 1
        if iterations > cap:
            raise IterationCapExceeded(cap, interp.sizes())
        ex.rerun_blocked(interp, added)
        added = {t for t in ex.failing_tuples() if not interp.contains(*t)}
    return FixpointInfo(interp, iterations, ex)


def least_fixpoint(program: Program, domain: InputDomain) -> Interpretation:
    """Iterate T from the empty interpretation until it stabilises."""
    return least_fixpoint_info(program, domain).interp


# ---------------------------------------------------------------------------
# Safety


@dataclass(frozen=True)
class Witness:
    inputs: dict
    pred: str
    args: tuple


@dataclass
class SafetyVerdict:
    kind: str  # "safe" | "unsafe" | "inconclusive"
    witness: Witness | None = None
    inconclusive_count: int = 0
    iterations: int = 0
    pred_sizes: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "verdict": self.kind,
            "iterations": self.iterations,
            "predicateSizes": dict(self.pred_sizes),
            "inconclusiveCount": self.inconclusive_count,
            "witnesses": [] if self.witness is None else [{
                "inputs": {k: v for k, v in self.witness.inputs.items()},
                "pred": self.witness.pred,
                "args": [_value_json(v) for v in self.witness.args],
            }],
        }


def _value_json(v: Value):
    if isinstance(v, ObjVal):
        return {"ctor": v.ctor, "fields": [_value_json(f) for f in v.fields]}
    return v


def _witness_inputs(program: Program, domain: InputDomain,
                    in_v, seed, la) -> dict:
    inputs = {}
    if program.input_var is not None:
        inputs[program.input_var] = in_v if in_v is not None else domain.in_range[0]
    if program.seed_var is not None:
        inputs[program.seed_var] = seed
    if LAST_ADDR_VAR in program.var_types:
        inputs[LAST_ADDR_VAR] = la if la is not None else domain.last_addr_range[0]
    if COUNTER_VAR in program.var_types:
        inputs[COUNTER_VAR] = domain.heap_op_fuel
    return inputs


def verdict_from_executor(program: Program, domain: InputDomain,
                          info: FixpointInfo) -> SafetyVerdict:
    ex = info.executor
    # under the fixed point no predicate assertion can still fail
    leftovers = ex.predicate_bot_leaves()
    if leftovers:
        raise AssertionError(
            f"predicate assertion failing under the fixed point: {leftovers[0]}")
    failures = ex.expression_failures()
    fuel = ex.fuel_exhausted_weight()
    sizes = info.interp.sizes()
    if failures:
        in_v, seed, la = failures[0]
        w = Witness(_witness_inputs(program, domain, in_v, seed, la),
                    FAILURE_PRED, ())
        return SafetyVerdict("unsafe", w, fuel, info.iterations, sizes)
    if fuel:
        return SafetyVerdict("inconclusive", None, fuel, info.iterations, sizes)
    return SafetyVerdict("safe", None, 0, info.iterations, sizes)


def check_safety(program: Program, domain: InputDomain) -> SafetyVerdict:
    """Bounded safety: compute the least fixed point, then look for any
    expression assertion failure across the grid."""
    info = least_fixpoint_info(program, domain)
    return verdict_from_executor(program, domain, info)


def sweep_under(program: Program, domain: InputDomain, interp) -> SafetyVerdict:
    """Run the grid under a fixed interpretation (no fixpoint computation).
    Predicate assertion failures count as unsafe here."""
    ex = GridExecutor(program, domain)
    ex.run_all(interp)
    bots = []
    for cell in ex.cells.values():
        for leaf in cell.leaves:
            if isinstance(leaf.outcome, Bot):
                bots.append((cell.in_v, leaf.seed, cell.last_addr, leaf.outcome))
    fuel = ex.fuel_exhausted_weight()
    if bots:
        bots.sort(key=lambda w: tuple(-(10 ** 9) if v is None else v for v in w[:3]))
        in_v, seed, la, o = bots[0]
        w = Witness(_witness_inputs(program, domain, in_v, seed, la), o.pred, o.args)
        return SafetyVerdict("unsafe", w, fuel, 0, {})
    if fuel:
        return SafetyVerdict("inconclusive", None, fuel, 0, {})
    return SafetyVerdict("safe", None, 0, 0, {})


# ---------------------------------------------------------------------------
# Equi-safety


@dataclass
class EquisafetyResult:
    agree: bool
    verdict_left: SafetyVerdict
    verdict_right: SafetyVerdict
    cosim: "CosimReport | None" = None

    @property
    def kind(self) -> str:
        if self.agree:
            return f"agree({self.verdict_left.kind})"
        return "disagree"

    def to_json(self) -> dict:
        out = {
            "agree": self.agree,
            "kind": self.kind,
            "left": self.verdict_left.to_json(),
            "right": self.verdict_right.to_json(),
        }
        if self.cosim is not None:
            out["cosim"] = self.cosim.to_json()
        return out


def check_equisafety(left: Program, right: Program, domain: InputDomain,
                     cosim_source: Program | None = None) -> EquisafetyResult:
    """Compare bounded safety verdicts of a program and (typically) its
    encoding; fixed points are computed per program.

    When the right-hand side is the read-invariant encoding of the
    budget-instrumented left program, pass that intermediate as
    ``cosim_source`` to also run the final-state preservation check.
    """
    v1 = check_safety(left, domain)
    v2 = check_safety(right, domain)
    result = EquisafetyResult(v1.kind == v2.kind, v1, v2)
    if cosim_source is not None:
        result.cosim = cosim_check(cosim_source, right, domain)
    return result


# ---------------------------------------------------------------------------
# Seed construction for executions with known draw sequences


def encode_int_bits(v: int) -> list[int]:
    """Bits (least significant first) that make the havoc macro produce v."""
    bits = [1 if v < 0 else 0]
    if v < 0:
        # appending digits to -1: after k digits x = -2^k + digits
        k = 0
        while -(1 << k) > v:
            k += 1
        digits = format((1 << k) + v, f"0{k}b") if k else ""
    else:
        digits = format(v, "b") if v else ""
    for d in digits:
        bits.append(1)
        bits.append(int(d))
    bits.append(0)
    return bits


def encode_value_bits(v: Value, ty: Type, adts: dict) -> list[int]:
    """Bits for a havoc draw of the given type producing exactly v."""
    if ty.kind != "Obj":
        return encode_int_bits(v)
    adt = adts[ty.adt]
    bits = []
    if len(adt.ctors) > 1:
        idx = next(i for i, c in enumerate(adt.ctors) if c.name == v.ctor)
        bits.extend(encode_int_bits(idx))
        ctor = adt.ctors[idx]
    else:
        ctor = adt.ctors[0]
    for fv, (_, fty) in zip(v.fields, ctor.fields):
        bits.extend(encode_value_bits(fv, fty, adts))
    return bits


def pack_bits(bits: list[int]) -> int:
    seed = 0
    for i, b in enumerate(bits):
        seed |= b << i
    return seed


# ---------------------------------------------------------------------------
# Read-trace interpretation and co-simulation

def read_trace_interpretation(program: Program, domain: InputDomain,
                              pred: str = "R",
                              counter_value: int | None = None) -> Interpretation:
    """The limit interpretation of the read predicate for a deterministic
    program: for every input, tuple (input, k, v) where v is the value
    returned by the k-th read.  Derived directly from the heap-model read
    trace; the grid fixed point is always a subset of this."""
    cp = CompiledProgram(program, record_reads=True)
    interp = Interpretation.empty()
    lo, hi = domain.in_range
    for in_v in range(lo, hi + 1):
        inputs = {}
        if program.input_var is not None:
            inputs[program.input_var] = in_v
        if COUNTER_VAR in program.var_types:
            inputs[COUNTER_VAR] = (counter_value if counter_value is not None
                                   else domain.heap_op_fuel)
        res = cp.run(inputs=inputs, loop_fuel=domain.loop_fuel,
                     heap_fuel=domain.heap_op_fuel)
        for k, (_, v) in enumerate(res.reads, start=1):
            interp.add(pred, (in_v, k, v))
    return interp


@dataclass
class CosimPoint:
    in_v: int
    last_addr: int
    ok: bool
    detail: str = ""


@dataclass
class CosimReport:
    points: list[CosimPoint]

    @property
    def ok(self) -> bool:
        return all(p.ok for p in self.points)

    def failures(self) -> list[CosimPoint]:
        return [p for p in self.points if not p.ok]

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "points": len(self.points),
            "failures": [{"in": p.in_v, "lastAddr": p.last_addr,
                          "detail": p.detail} for p in self.failures()],
        }


def _draw_bits(raw: int, nbits: int) -> list[int]:
    return [(raw >> i) & 1 for i in range(nbits)]


def read_trace_interpretation_for(program: Program, domain: InputDomain,
                                  counter_value: int | None,
                                  source_seed: int) -> Interpretation:
    cp = CompiledProgram(program, record_reads=True)
    interp = Interpretation.empty()
    lo, hi = domain.in_range
    for in_v in range(lo, hi + 1):
        inputs = {}
        if program.input_var is not None:
            inputs[program.input_var] = in_v
        if program.seed_var is not None:
            inputs[program.seed_var] = source_seed
        if COUNTER_VAR in program.var_types:
            inputs[COUNTER_VAR] = (counter_value if counter_value is not None
                                   else domain.heap_op_fuel)
        res = cp.run(inputs=inputs, loop_fuel=domain.loop_fuel,
                     heap_fuel=domain.heap_op_fuel)
        for k, (_, v) in enumerate(res.reads, start=1):
            interp.add("R", (in_v, k, v))
    return interp


def cosim_check(p_star: Program, p_encoded: Program, domain: InputDomain,
                *, last_var: str = "$last", cnt_alloc_var: str = "$cnt_alloc",
                counter_values: tuple[int, ...] | None = None,
                source_seeds: tuple[int, ...] = (0,)) -> CosimReport:
    """Pointwise final-state preservation between a heap program (with the
    budget counter inserted) and its read-invariant encoding.

    For every (input, prophecy address) pair, the defined execution of the
    encoded program is realised by constructing a seed: source-level draws
    replay the bits the original consumed, and each read of a non-matching
    address contributes the bits that make the read havoc reproduce the
    value actually read.  The encoded program runs under the read-trace
    interpretation.  Checks: equal outcomes, equal final values of the
    common variables (the seed variable is excluded: the encoding consumes
    seed bits the original never touches), final ``$last`` equal to the
    final heap contents at the prophecy address, and final ``$cnt_alloc``
    equal to the final heap size.
    """
    if p_star.seed_var is None or p_encoded.seed_var is None:
        raise ValueError("co-simulation requires seed declarations")
    star = CompiledProgram(p_star, record_reads=True)
    enc = CompiledProgram(p_encoded)
    adts = p_encoded.adts_by_name()
    heap_ty = p_encoded.heap_obj_type()
    def_obj = default_obj(p_star.heap_adt, p_star.adts_by_name())
    common = [v for v in p_star.var_types
              if v != p_star.seed_var and v in p_encoded.var_types]
    if counter_values is None:
        counter_values = (domain.heap_op_fuel,)
    points: list[CosimPoint] = []
    in_lo, in_hi = domain.in_range
    la_lo, la_hi = domain.last_addr_range
    for n in counter_values:
        for s0 in source_seeds:
            interp = read_trace_interpretation_for(p_star, domain, n, s0)
            for in_v in range(in_lo, in_hi + 1):
                inputs1 = {}
                if p_star.input_var is not None:
                    inputs1[p_star.input_var] = in_v
                inputs1[p_star.seed_var] = s0
                if COUNTER_VAR in p_star.var_types:
                    inputs1[COUNTER_VAR] = n
                res1 = star.run(inputs=inputs1, loop_fuel=domain.loop_fuel,
                                heap_fuel=max(domain.heap_op_fuel, n + 1))
                for la in range(la_lo, la_hi + 1):
                    bits: list[int] = []
                    for ev in res1.events:
                        if ev[0] == "draw":
                            bits.extend(_draw_bits(ev[1], ev[2]))
                        elif ev[1] != la:
                            bits.extend(encode_value_bits(ev[2], heap_ty, adts))
                    seed = pack_bits(bits)
                    inputs2 = dict(inputs1)
                    inputs2[p_encoded.seed_var] = seed
                    inputs2[LAST_ADDR_VAR] = la
                    res2 = enc.run(inputs=inputs2, interp=interp,
                                   loop_fuel=max(domain.loop_fuel,
                                                 4 * len(bits) + 8),
                                   heap_fuel=domain.heap_op_fuel)
                    detail = _compare_point(res1, res2, common, la, def_obj,
                                            last_var, cnt_alloc_var)
                    if detail:
                        detail = f"[c={n} seed0={s0}] {detail}"
                    points.append(CosimPoint(in_v, la, detail == "", detail))
    return CosimReport(points)


def _compare_point(res1, res2, common, la, def_obj, last_var, cnt_alloc_var) -> str:
    o1, o2 = res1.outcome, res2.outcome
    if isinstance(o1, Undefined) or isinstance(o2, Undefined):
        if isinstance(o1, Undefined) and isinstance(o2, Undefined):
            return ""
        return f"outcome mismatch: {o1} vs {o2}"
    if o1 != o2:
        return f"outcome mismatch: {o1} vs {o2}"
    for v in common:
        if res1.env[v] != res2.env[v]:
            return (f"stack mismatch on {v!r}: "
                    f"{res1.env[v]!r} vs {res2.env[v]!r}")
    want = heap_read(res1.heap, la, def_obj)
    if res2.env[last_var] != want:
        return f"read tracking mismatch: heap[{la}]={want!r} vs {res2.env[last_var]!r}"
    if res2.env[cnt_alloc_var] != len(res1.heap):
        return (f"allocation count mismatch: |heap|={len(res1.heap)} vs "
                f"{res2.env[cnt_alloc_var]!r}")
    return ""
