import time

import pytest

from heapinv.corpus import load_corpus
from heapinv.encode import EncodingConfig, enc_n, encode
from heapinv.fixpoint import InputDomain, least_fixpoint_info, verdict_from_executor


@pytest.fixture(scope="session")
def domain():
    return InputDomain()


@pytest.fixture(scope="session")
def corpus():
    return load_corpus()


VARIANTS = {
    "r": EncodingConfig(base="r"),
    "rw": EncodingConfig(base="rw"),
    "r_t": EncodingConfig(base="r", tagging=True),
    "r_c": EncodingConfig(base="r", caching=True),
    "rw_c": EncodingConfig(base="rw", caching=True),
    "rw_ct": EncodingConfig(base="rw", caching=True, tagging=True),
    "rw_t": EncodingConfig(base="rw", tagging=True),
    "rwfun": EncodingConfig(base="rwfun", assume_memsafe=True),
    "rwmem": EncodingConfig(base="rwmem", strip_asserts=True),
}


class MatrixRow:
    def __init__(self, entry, program):
        self.entry = entry
        self.program = program
        self.encoded = {}    # variant -> Program
        self.verdicts = {}   # variant -> SafetyVerdict ("orig", "n", encodings)
        self.fixinfo = {}    # variant -> FixpointInfo


@pytest.fixture(scope="session")
def corpus_matrix(corpus, domain):
    """Fixed points and verdicts for every corpus entry and every encoding
    variant exercised by the acceptance suite; computed once per session."""
    t0 = time.time()
    rows = {}
    for entry in corpus:
        row = MatrixRow(entry, entry.load())

        def run(key, program):
            info = least_fixpoint_info(program, domain)
            row.fixinfo[key] = info
            row.verdicts[key] = verdict_from_executor(program, domain, info)

        run("orig", row.program)
        row.encoded["n"] = enc_n(row.program)
        run("n", row.encoded["n"])
        for name, cfg in VARIANTS.items():
            if name == "rwfun" and not entry.memory_safe:
                continue
            if name == "rw_t" and not entry.rw_tagged_visible:
                continue
            row.encoded[name] = encode(row.program, cfg).program
            run(name, row.encoded[name])
        if entry.scope_var:
            cfg = EncodingConfig(base="r", scope_vars=(entry.scope_var,))
            row.encoded["r_scope"] = encode(row.program, cfg).program
            run("r_scope", row.encoded["r_scope"])
        rows[entry.name] = row
    rows["__build_seconds__"] = time.time() - t0
    return rows
