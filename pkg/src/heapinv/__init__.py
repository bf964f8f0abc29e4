"""heapinv: heap-eliminating program encodings over uninterpreted
predicates, a bounded differential safety oracle, and Horn clause
emission."""

from .lang import (
    Program, SourceError, Diagnostic, assign_locations, parse_and_check,
    parse_program, pretty_print, typecheck,
)
from .interp import (
    Bot, CompiledProgram, Fuel, ObjVal, Top, Undefined, eval_stmt,
    eval_trace_mode, heap_allocate, heap_read, heap_write, run_program,
)
from .fixpoint import (
    InputDomain, Interpretation, check_equisafety, check_safety,
    cosim_check, immediate_consequence, least_fixpoint,
)
from .encode import (
    EncodedProgram, EncodingConfig, apply_caching, apply_scope_vars,
    apply_tagging, enc_n, enc_r, enc_rw, enc_rwfun, enc_rwmem, encode,
    remove_arguments,
)
from .chc import ClauseSet, emit_smtlib, solve, to_chc
from .formula import FormulaInterpretation, load_interpretation
from .corpus import CorpusEntry, load_corpus

__version__ = "0.1.0"

__all__ = [
    "Program", "SourceError", "Diagnostic", "assign_locations",
    "parse_and_check", "parse_program", "pretty_print", "typecheck",
    "Bot", "CompiledProgram", "Fuel", "ObjVal", "Top", "Undefined",
    "eval_stmt", "eval_trace_mode", "heap_allocate", "heap_read",
    "heap_write", "run_program",
    "InputDomain", "Interpretation", "check_equisafety", "check_safety",
    "cosim_check", "immediate_consequence", "least_fixpoint",
    "EncodedProgram", "EncodingConfig", "apply_caching", "apply_scope_vars",
    "apply_tagging", "enc_n", "enc_r", "enc_rw", "enc_rwfun", "enc_rwmem",
    "encode", "remove_arguments",
    "ClauseSet", "emit_smtlib", "solve", "to_chc",
    "FormulaInterpretation", "load_interpretation",
    "CorpusEntry", "load_corpus",
    "__version__",
]
