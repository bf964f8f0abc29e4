"""Bundled fixture programs with oracle-established safety labels.

Every expected label in the manifest was produced by the bounded
fixed-point oracle at the default input domain and is re-derived by the
acceptance suite; none is hand-entered.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

from .lang import Program, parse_and_check


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    file: str
    expected: str            # "safe" | "unsafe"
    memory_safe: bool        # eligible for the functional-safety variant
    invalid_access: bool     # performs an out-of-bounds read or write
    scope_var: str | None    # designated extra predicate argument, if any
    rw_tagged_visible: bool  # failure findable under rw+tagging at the
                             # default seed budget (trivially true when safe)
    note: str

    def load(self) -> Program:
        return parse_and_check(self.source())

    def source(self) -> str:
        return resources.files("heapinv.corpus_data").joinpath(self.file) \
            .read_text(encoding="utf-8")


def load_corpus() -> list[CorpusEntry]:
    raw = resources.files("heapinv.corpus_data").joinpath("manifest.json") \
        .read_text(encoding="utf-8")
    data = json.loads(raw)
    return [CorpusEntry(
        name=e["name"], file=e["file"], expected=e["expected"],
        memory_safe=e["memory_safe"], invalid_access=e["invalid_access"],
        scope_var=e.get("scope_var"),
        rw_tagged_visible=e.get("rw_tagged_visible", True),
        note=e.get("note", ""),
    ) for e in data["entries"]]


def corpus_by_name() -> dict[str, CorpusEntry]:
    return {e.name: e for e in load_corpus()}
