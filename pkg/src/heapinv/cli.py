"""Command-line front end.

Subcommands wire the pipeline together: parse -> encode -> run / fixpoint /
equisafe / emit-chc / solve, plus the bundled corpus runner.  Exit codes:
0 success (or verdicts agree), 1 disagreement or corpus mismatch, 2 usage
or tool errors.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import chc, encode as enc_mod, fixpoint as fp
from .corpus import load_corpus
from .encode import EncodingConfig, enc_n, encode
from .formula import load_interpretation
from .interp import Bot, CompiledProgram, ObjVal, Top
from .lang import (
    Program, SourceError, parse_program, pretty_print, typecheck,
)

EXIT_OK = 0
EXIT_DISAGREE = 1
EXIT_ERROR = 2


class CliError(Exception):
    pass


def _load_program(path: str) -> Program:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise CliError(str(exc))
    try:
        prog = parse_program(text)
    except SourceError as exc:
        raise CliError(f"{path}:{exc}")
    diags = typecheck(prog)
    if diags:
        for d in diags:
            print(f"{path}:{d}", file=sys.stderr)
        raise CliError(f"{path}: {len(diags)} type error(s)")
    return prog


def _parse_range(text: str) -> tuple[int, int]:
    lo, sep, hi = text.rpartition(":")
    if not sep:
        raise CliError(f"range must look like LO:HI, got {text!r}")
    try:
        return int(lo), int(hi)
    except ValueError:
        raise CliError(f"bad range {text!r}")


def _add_domain_args(p: argparse.ArgumentParser):
    p.add_argument("--in-range", default="-3:3", metavar="LO:HI")
    p.add_argument("--seed-range", default="0:255", metavar="LO:HI")
    p.add_argument("--last-addr-range", default="0:6", metavar="LO:HI")
    p.add_argument("--loop-fuel", type=int, default=64)
    p.add_argument("--heap-op-fuel", type=int, default=32)
    p.add_argument("--iteration-cap", type=int, default=None)


def _domain(args) -> fp.InputDomain:
    return fp.InputDomain(
        in_range=_parse_range(args.in_range),
        seed_range=_parse_range(args.seed_range),
        last_addr_range=_parse_range(args.last_addr_range),
        loop_fuel=args.loop_fuel,
        heap_op_fuel=args.heap_op_fuel,
        iteration_cap=args.iteration_cap,
    )


def _add_encoding_args(p: argparse.ArgumentParser, require: bool = True):
    p.add_argument("--enc", required=require, default=None,
                   choices=["n", "r", "rw", "rwfun", "rwmem"])
    p.add_argument("--tag", action="store_true")
    p.add_argument("--cache", action="store_true")
    p.add_argument("--scope-vars", default="", metavar="A,B")
    p.add_argument("--drop", action="append", default=[], metavar="PRED:IDX")
    p.add_argument("--assume-memsafe", action="store_true")
    p.add_argument("--native-havoc", action="store_true")
    p.add_argument("--strip-asserts", action="store_true")
    p.add_argument("--alloc-init-write", action="store_true")


def _config(args) -> EncodingConfig:
    drops = []
    for item in args.drop:
        pred, sep, idx = item.rpartition(":")
        if not sep:
            raise CliError(f"--drop expects PRED:IDX, got {item!r}")
        try:
            drops.append((pred, int(idx)))
        except ValueError:
            raise CliError(f"--drop expects PRED:IDX, got {item!r}")
    scope = tuple(s for s in args.scope_vars.split(",") if s)
    return EncodingConfig(
        base=args.enc, tagging=args.tag, caching=args.cache,
        scope_vars=scope, drop_args=tuple(drops),
        assume_memsafe=args.assume_memsafe, native_havoc=args.native_havoc,
        strip_asserts=args.strip_asserts,
        alloc_init_write=args.alloc_init_write,
    )


def _encode_program(prog: Program, args) -> Program:
    if args.enc == "n":
        return enc_n(prog)
    try:
        return encode(prog, _config(args)).program
    except enc_mod.EncodingError as exc:
        raise CliError(str(exc))


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommands


def cmd_encode(args) -> int:
    prog = _load_program(args.file)
    _emit(pretty_print(_encode_program(prog, args)), args.output)
    return EXIT_OK


def _value_json(v):
    if isinstance(v, ObjVal):
        return {"ctor": v.ctor, "fields": [_value_json(f) for f in v.fields]}
    return v


def _outcome_json(o):
    if isinstance(o, Top):
        return {"kind": "top"}
    if isinstance(o, Bot):
        return {"kind": "bot", "pred": o.pred, "args": [_value_json(a) for a in o.args]}
    return {"kind": "undefined", "reason": o.reason}


def cmd_run(args) -> int:
    prog = _load_program(args.file)
    domain = fp.InputDomain(loop_fuel=args.loop_fuel,
                            heap_op_fuel=args.heap_op_fuel)
    if args.interp == "empty":
        interp = fp.Interpretation.empty()
    elif args.interp == "fixpoint":
        interp = fp.least_fixpoint(prog, domain)
    else:
        try:
            interp = load_interpretation(args.interp, prog)
        except (OSError, ValueError, SourceError) as exc:
            raise CliError(f"cannot load interpretation: {exc}")
    mode = "trace" if args.trace_mode else "heap"
    compiled = CompiledProgram(prog, mode=mode)

    def one(in_v, seed, la) -> dict:
        inputs = {}
        if prog.input_var is not None:
            inputs[prog.input_var] = in_v
        if prog.seed_var is not None:
            inputs[prog.seed_var] = seed
        if fp.LAST_ADDR_VAR in prog.var_types:
            inputs[fp.LAST_ADDR_VAR] = la
        if fp.COUNTER_VAR in prog.var_types:
            inputs[fp.COUNTER_VAR] = args.heap_op_fuel
        res = compiled.run(inputs=inputs, interp=interp,
                           loop_fuel=args.loop_fuel,
                           heap_fuel=args.heap_op_fuel)
        dump = {
            "outcome": _outcome_json(res.outcome),
            "stack": {k: _value_json(v) for k, v in sorted(res.env.items())},
            "heapLen": res.heap_len,
        }
        if args.all_inputs:
            dump["inputs"] = dict(inputs)
        return dump

    if args.all_inputs:
        # one JSON line per grid execution; dimensions the program cannot
        # observe would only repeat identical lines, so they collapse
        def dim(used, rng, default):
            return range(rng[0], rng[1] + 1) if used else (default,)

        for in_v in dim(fp.program_uses_input(prog), domain.in_range,
                        args.in_value):
            for seed in dim(fp.program_uses_seed(prog), domain.seed_range,
                            args.seed):
                for la in dim(fp.LAST_ADDR_VAR in prog.var_types,
                              domain.last_addr_range, args.last_addr):
                    print(json.dumps(one(in_v, seed, la), sort_keys=True))
    else:
        print(json.dumps(one(args.in_value, args.seed, args.last_addr),
                         sort_keys=True))
    return EXIT_OK


def cmd_fixpoint(args) -> int:
    prog = _load_program(args.file)
    domain = _domain(args)
    try:
        verdict = fp.check_safety(prog, domain)
    except fp.IterationCapExceeded as exc:
        raise CliError(str(exc))
    report = verdict.to_json()
    if args.format == "json":
        print(json.dumps(report, sort_keys=True))
    else:
        print(f"verdict: {verdict.kind}")
        print(f"iterations: {verdict.iterations}")
        print(f"predicate sizes: {verdict.pred_sizes}")
        print(f"fuel-exhausted executions: {verdict.inconclusive_count}")
        if verdict.witness:
            print(f"witness: {verdict.witness.inputs} -> "
                  f"{verdict.witness.pred}{verdict.witness.args}")
    return EXIT_OK


def cmd_equisafe(args) -> int:
    prog = _load_program(args.file)
    domain = _domain(args)
    cosim_report = None
    if args.cosim:
        if args.enc != "r" or args.tag or args.cache or args.scope_vars \
                or args.drop:
            raise CliError("--cosim applies to the plain r encoding")
        p_star = enc_n(prog)
        encoded = encode(p_star, _config(args)).program
        result = fp.check_equisafety(prog, encoded, domain,
                                     cosim_source=p_star)
        cosim_report = result.cosim
    else:
        encoded = _encode_program(prog, args)
        result = fp.check_equisafety(prog, encoded, domain)
    if args.format == "json":
        print(json.dumps(result.to_json(), sort_keys=True))
    else:
        print(f"{args.file}: {result.kind}"
              f" (original={result.verdict_left.kind},"
              f" encoded={result.verdict_right.kind})")
        if not result.agree and args.enc in ("rwfun", "rwmem"):
            print("note: this variant assumes memory-safe input programs; "
                  "a disagreement usually means the precondition does not hold",
                  file=sys.stderr)
        if cosim_report is not None:
            status = "ok" if cosim_report.ok else "FAILED"
            print(f"co-simulation: {status} over {len(cosim_report.points)} points")
    ok = result.agree and (cosim_report is None or cosim_report.ok)
    return EXIT_OK if ok else EXIT_DISAGREE


def cmd_emit_chc(args) -> int:
    prog = _load_program(args.file)
    if args.enc is not None:
        prog = _encode_program(prog, args)
    try:
        clause_set = chc.to_chc(prog)
    except chc.ChcError as exc:
        raise CliError(str(exc))
    _emit(chc.emit_smtlib(clause_set), args.output)
    return EXIT_OK


def cmd_solve(args) -> int:
    res = chc.solve(args.file, solver_cmd=args.solver, timeout=args.timeout)
    if res.is_error:
        print(f"error: {res.detail}", file=sys.stderr)
        return EXIT_ERROR
    print(res.kind)
    return EXIT_OK


_CORPUS_VARIANTS = {
    "n": lambda p, e: enc_n(p),
    "r": lambda p, e: encode(p, EncodingConfig(base="r")).program,
    "rw": lambda p, e: encode(p, EncodingConfig(base="rw")).program,
    "rwfun": lambda p, e: encode(p, EncodingConfig(
        base="rwfun", assume_memsafe=True)).program,
    "rwmem": lambda p, e: encode(p, EncodingConfig(
        base="rwmem", strip_asserts=True)).program,
    "r_t": lambda p, e: encode(p, EncodingConfig(base="r", tagging=True)).program,
    "r_c": lambda p, e: encode(p, EncodingConfig(base="r", caching=True)).program,
    "rw_c": lambda p, e: encode(p, EncodingConfig(base="rw", caching=True)).program,
    "rw_ct": lambda p, e: encode(p, EncodingConfig(
        base="rw", caching=True, tagging=True)).program,
}


def cmd_corpus(args) -> int:
    if args.filter is not None and args.filter == "":
        raise CliError("--filter needs a nonempty substring")
    variants = [v for v in args.enc.split(",") if v]
    for v in variants:
        if v not in _CORPUS_VARIANTS:
            raise CliError(f"unknown corpus variant {v!r}; "
                           f"choose from {', '.join(sorted(_CORPUS_VARIANTS))}")
    domain = _domain(args)
    entries = load_corpus()
    if args.filter:
        entries = [e for e in entries if args.filter in e.name]
        if not entries:
            raise CliError(f"no corpus entry matches {args.filter!r}")
    rows = []
    ok_all = True
    for entry in sorted(entries, key=lambda e: e.name):
        prog = entry.load()
        verdict = fp.check_safety(prog, domain)
        row = {"name": entry.name, "expected": entry.expected,
               "original": verdict.kind, "variants": {}, "ok": True}
        if verdict.kind != entry.expected:
            row["ok"] = False
        for vname in variants:
            if vname == "rwfun" and not entry.memory_safe:
                row["variants"][vname] = "skipped"
                continue
            encoded = _CORPUS_VARIANTS[vname](prog, entry)
            ev = fp.check_safety(encoded, domain)
            row["variants"][vname] = ev.kind
            if vname == "rwmem":
                expect = "unsafe" if entry.invalid_access else "safe"
                if ev.kind != expect:
                    row["ok"] = False
            elif ev.kind != verdict.kind:
                row["ok"] = False
        ok_all &= row["ok"]
        rows.append(row)
    if args.format == "json":
        print(json.dumps({"ok": ok_all, "entries": rows}, sort_keys=True))
    else:
        for row in rows:
            vs = " ".join(f"{k}={v}" for k, v in row["variants"].items())
            mark = "ok" if row["ok"] else "MISMATCH"
            print(f"{row['name']:32s} expected={row['expected']:8s} "
                  f"got={row['original']:8s} {vs} [{mark}]")
        print(f"corpus: {'all agree' if ok_all else 'MISMATCHES FOUND'} "
              f"({len(rows)} entries)")
    return EXIT_OK if ok_all else EXIT_DISAGREE


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="heapinv",
        description="Heap-eliminating encodings over uninterpreted "
                    "predicates, with a bounded differential oracle")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", help="rewrite heap statements away")
    p.add_argument("file")
    _add_encoding_args(p)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("run", help="evaluate a program on one input")
    p.add_argument("file")
    p.add_argument("--in", dest="in_value", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--last-addr", type=int, default=0)
    p.add_argument("--loop-fuel", type=int, default=64)
    p.add_argument("--heap-op-fuel", type=int, default=32)
    p.add_argument("--interp", default="empty",
                   help="'empty', 'fixpoint', or a formula file")
    p.add_argument("--trace-mode", action="store_true")
    p.add_argument("--all-inputs", action="store_true",
                   help="dump one JSON line per execution over the default "
                        "input grid")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("fixpoint", help="bounded least fixed point + safety")
    p.add_argument("file")
    _add_domain_args(p)
    p.add_argument("--format", choices=["human", "json"], default="human")
    p.set_defaults(func=cmd_fixpoint)

    p = sub.add_parser("equisafe", help="compare a program with its encoding")
    p.add_argument("file")
    _add_encoding_args(p)
    _add_domain_args(p)
    p.add_argument("--cosim", action="store_true",
                   help="also check final-state preservation")
    p.add_argument("--format", choices=["human", "json"], default="human")
    p.set_defaults(func=cmd_equisafe)

    p = sub.add_parser("emit-chc", help="translate to Horn clauses (.smt2)")
    p.add_argument("file")
    _add_encoding_args(p, require=False)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_emit_chc)

    p = sub.add_parser("solve", help="run an external Horn solver")
    p.add_argument("file")
    p.add_argument("--solver", default=None,
                   help="command template with a {file} placeholder")
    p.add_argument("--timeout", type=float, default=300.0)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("corpus", help="run the bundled corpus")
    p.add_argument("--enc", default="r",
                   help="comma-separated variants "
                        f"({', '.join(sorted(_CORPUS_VARIANTS))})")
    p.add_argument("--filter", default=None)
    _add_domain_args(p)
    p.add_argument("--format", choices=["human", "json"], default="human")
    p.set_defaults(func=cmd_corpus)

    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except fp.IterationCapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except BrokenPipeError:
        # downstream consumer (e.g. head) closed the stream
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
