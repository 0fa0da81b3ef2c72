"""Text formats for systems, test cases and run logs.

Both documents share one line grammar::

    # comment
    key: value value ...
    SOURCE -label-> TARGET

Systems use the keys ``name``, ``inputs``, ``outputs``, ``initial`` and
``states``; ``tau`` marks an internal step. Test cases use ``kind``,
``inputs``, ``outputs`` and ``root`` and name their terminals PASS and FAIL.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .lts import RESERVED, TAU, THETA, THETA_S, TOKEN_RE, Lts, LtsError, validate
from .testgen import FAIL, PASS, TestCase

_EDGE = re.compile(r"(\S+)\s+-(\S+)->\s+(\S+)")
_KEY = re.compile(r"([a-z_]+):(.*)")


class ParseError(LtsError):
    def __init__(self, line: int, column: int, message: str) -> None:
        super().__init__(f"line {line}, column {column}: {message}")
        self.line, self.column = line, column


@dataclass
class _Doc:
    keys: dict[str, tuple[int, list[str]]]
    edges: list[tuple[int, str, str, str]]


def _scan(text: str, allowed: set[str]) -> _Doc:
    keys: dict[str, tuple[int, list[str]]] = {}
    edges = []
    for num, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        body = line.lstrip()
        if not body:
            continue
        col = len(line) - len(body) + 1
        m = _KEY.fullmatch(body)
        if m:
            key = m.group(1)
            if key not in allowed:
                raise ParseError(num, col, f"unknown key {key!r}")
            if key in keys:
                raise ParseError(num, col, f"duplicate key {key!r}")
            keys[key] = (num, m.group(2).split())
            continue
        m = _EDGE.fullmatch(body)
        if not m:
            raise ParseError(num, col, "expected 'key: values' or 'SOURCE -label-> TARGET'")
        edges.append((num, m.group(1), m.group(2), m.group(3)))
    return _Doc(keys, edges)


def _tokens(doc: _Doc, key: str, reserved_ok: frozenset[str] = frozenset()) -> list[str]:
    num, toks = doc.keys.get(key, (0, []))
    for tok in toks:
        if not TOKEN_RE.fullmatch(tok):
            raise ParseError(num, 1, f"bad label token {tok!r}")
        if tok in RESERVED and tok not in reserved_ok:
            raise ParseError(num, 1, f"reserved label {tok!r}")
    return toks


def parse_lts(text: str, check: bool = True) -> Lts:
    """Parse a system. With ``check`` off, well-formedness is left to the caller."""
    doc = _scan(text, {"name", "inputs", "outputs", "initial", "states"})
    inputs, outputs = _tokens(doc, "inputs"), _tokens(doc, "outputs")
    if "initial" not in doc.keys or len(doc.keys["initial"][1]) != 1:
        raise ParseError(doc.keys.get("initial", (1,))[0], 1, "exactly one initial state required")
    initial = doc.keys["initial"][1][0]
    states = doc.keys.get("states", (0, []))[1]
    if len(set(states)) != len(states):
        raise ParseError(doc.keys["states"][0], 1, "state names must be unique")
    trans = []
    for num, src, lab, dst in doc.edges:
        if lab in RESERVED - {TAU}:
            raise ParseError(num, 1, f"reserved label {lab!r} cannot label a transition")
        if lab != TAU and lab not in inputs and lab not in outputs:
            raise ParseError(num, 1, f"label {lab!r} is neither an input nor an output")
        trans.append((src, lab, dst))
    name = " ".join(doc.keys.get("name", (0, []))[1])
    lts = Lts.build(inputs, outputs, trans, initial, states, name=name)
    if check:
        report = validate(lts)
        if not report.ok:
            raise LtsError("; ".join(report.violations))
    return lts


def serialize_lts(l: Lts) -> str:
    lines = []
    if l.name:
        lines.append(f"name: {l.name}")
    lines.append("inputs: " + " ".join(sorted(l.inputs)))
    lines.append("outputs: " + " ".join(sorted(l.outputs)))
    # keep the initial state first so that parsing gives back the same ids
    order = [l.initial] + [q for q in l.states if q != l.initial]
    renumber = {q: k for k, q in enumerate(order)}
    lines.append(f"initial: {l.names[l.initial]}")
    lines.append("states: " + " ".join(l.names[q] for q in order))
    for src, lab, dst in sorted(l.transitions, key=lambda t: (renumber[t[0]], t[1], renumber[t[2]])):
        lines.append(f"{l.names[src]} -{lab}-> {l.names[dst]}")
    return "\n".join(line.rstrip() for line in lines) + "\n"


def parse_test_case(text: str) -> TestCase:
    doc = _scan(text, {"kind", "inputs", "outputs", "root"})
    extra = frozenset({THETA, THETA_S})
    inputs, outputs = _tokens(doc, "inputs", extra), _tokens(doc, "outputs")
    kind = doc.keys.get("kind", (0, ["eco"]))[1][0]
    root_name = doc.keys.get("root", (0, ["PASS"]))[1][0]
    index = {"PASS": PASS, "FAIL": FAIL}

    def nid(name: str) -> int:
        if name not in index:
            index[name] = len(index)
        return index[name]

    nid(root_name)
    raw = [(nid(a), lab, nid(b)) for _, a, lab, b in doc.edges]
    edges: list[list[tuple[str, int]]] = [[] for _ in index]
    for a, lab, b in raw:
        edges[a].append((lab, b))
    return TestCase(
        inputs=frozenset(inputs),
        outputs=frozenset(outputs),
        edges=tuple(tuple(sorted(es)) for es in edges),
        root=index[root_name],
        kind=kind,
    )


def serialize_test_case(t: TestCase) -> str:
    # number nodes in depth-first order from the root
    names = {PASS: "PASS", FAIL: "FAIL"}
    order = []
    stack = [t.root]
    while stack:
        n = stack.pop()
        if n < 2 or n in names:
            continue
        names[n] = f"n{len(order)}"
        order.append(n)
        stack.extend(child for _, child in reversed(t.edges[n]))
    lines = [
        f"kind: {t.kind}",
        "inputs: " + " ".join(sorted(t.inputs)),
        "outputs: " + " ".join(sorted(t.outputs)),
        f"root: {names[t.root]}",
    ]
    for n in order:
        note = t.notes[n] if n < len(t.notes) and t.notes[n] else ""
        if note:
            lines.append(f"# {names[n]} {note}")
        for lab, child in t.edges[n]:
            lines.append(f"{names[n]} -{lab}-> {names[child]}")
    return "\n".join(line.rstrip() for line in lines) + "\n"
