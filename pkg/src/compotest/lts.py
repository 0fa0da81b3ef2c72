"""Finite labelled transition systems with inputs, outputs and internal steps.

States are dense integers; the original names live in ``Lts.names``.
Quiescence is never stored as a transition, it is computed from the
outgoing transitions of a state.
"""

from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Sequence

TAU = "tau"
DELTA = "delta"
THETA = "theta"
THETA_S = "theta_s"
RESERVED = frozenset({TAU, DELTA, THETA, THETA_S})

TOKEN_RE = re.compile(r"[A-Za-z0-9_.-]+")

StateSet = tuple[int, ...]
Trace = tuple[str, ...]

_PRETTY = {TAU: "τ", DELTA: "δ", THETA: "θ", THETA_S: "θ_s"}


class LtsError(ValueError):
    """Raised when an operation is applied to an unsuitable system."""


class NotInputEnabled(LtsError):
    pass


def show_label(label: str) -> str:
    return _PRETTY.get(label, label)


def show_trace(trace: Sequence[str]) -> str:
    if not trace:
        return "ε"
    return " · ".join(show_label(x) for x in trace)


def state_set(states: Iterable[int]) -> StateSet:
    return tuple(sorted(set(states)))


@dataclass(frozen=True, eq=False)
class Lts:
    """A finite LTS ``<Q, I, U, T, q0>``.

    ``pairs`` and ``parts`` are only set on composed systems: ``pairs[q]``
    is the (left, right) component state of composed state ``q``.
    """

    names: tuple[str, ...]
    inputs: frozenset[str]
    outputs: frozenset[str]
    transitions: frozenset[tuple[int, str, int]]
    initial: int = 0
    name: str = ""
    pairs: tuple[tuple[int, int], ...] | None = None
    parts: tuple["Lts", "Lts"] | None = None
    _succ: dict = field(default_factory=dict, repr=False)
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        succ: dict[int, dict[str, list[int]]] = defaultdict(lambda: defaultdict(list))
        for src, label, dst in sorted(self.transitions):
            succ[src][label].append(dst)
        for src, by_label in succ.items():
            self._succ[src] = {lab: tuple(ts) for lab, ts in by_label.items()}

    @classmethod
    def build(
        cls,
        inputs: Iterable[str],
        outputs: Iterable[str],
        transitions: Iterable[tuple[str, str, str]],
        initial: str,
        states: Iterable[str] = (),
        name: str = "",
    ) -> "Lts":
        """Build from named states; ids follow first appearance, initial first."""
        index: dict[str, int] = {}

        def sid(n: str) -> int:
            if n not in index:
                index[n] = len(index)
            return index[n]

        sid(initial)
        for n in states:
            sid(n)
        trans = frozenset((sid(a), lab, sid(b)) for a, lab, b in transitions)
        return cls(
            names=tuple(index),
            inputs=frozenset(inputs),
            outputs=frozenset(outputs),
            transitions=trans,
            initial=0,
            name=name,
        )

    @property
    def states(self) -> range:
        return range(len(self.names))

    @property
    def labels(self) -> frozenset[str]:
        return self.inputs | self.outputs

    def index_of(self, name: str) -> int:
        return self.names.index(name)

    def moves(self, q: int) -> dict[str, tuple[int, ...]]:
        return self._succ.get(q, {})

    def state_name(self, q: int) -> str:
        return self.names[q]

    def show_set(self, x: Iterable[int]) -> str:
        return "{" + ",".join(self.names[q] for q in x) + "}"


@dataclass(frozen=True)
class Report:
    """Outcome of a validation: ``ok`` iff there are no violations."""

    violations: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class Answer:
    """A yes/no answer that carries a witness when the answer is no."""

    ok: bool
    witness: object = None

    def __bool__(self) -> bool:
        return self.ok


def _tau_cycle(l: Lts) -> list[int] | None:
    colour = dict.fromkeys(l.states, 0)
    for root in l.states:
        if colour[root]:
            continue
        stack = [(root, iter(l.moves(root).get(TAU, ())))]
        path = [root]
        colour[root] = 1
        while stack:
            q, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                stack.pop()
                path.pop()
                colour[q] = 2
            elif colour.get(nxt) == 1:
                return path[path.index(nxt):]
            elif colour.get(nxt) == 0:
                colour[nxt] = 1
                path.append(nxt)
                stack.append((nxt, iter(l.moves(nxt).get(TAU, ()))))
    return None


def validate(l: Lts) -> Report:
    problems: list[str] = []
    overlap = l.inputs & l.outputs
    if overlap:
        problems.append("alphabet overlap {" + ",".join(sorted(overlap)) + "}")
    for lab in sorted(l.labels):
        if lab in RESERVED:
            problems.append(f"reserved label {lab} in alphabet")
        elif not TOKEN_RE.fullmatch(lab):
            problems.append(f"invalid label token {lab!r}")
    n = len(l.names)
    if len(set(l.names)) != n:
        problems.append("duplicate state names")
    if not 0 <= l.initial < n:
        problems.append(f"initial state {l.initial} not a state")
    endpoints_ok = True
    for src, lab, dst in sorted(l.transitions):
        if not (0 <= src < n and 0 <= dst < n):
            problems.append(f"transition {src} -{lab}-> {dst} has an unknown endpoint")
            endpoints_ok = False
        elif lab != TAU and lab not in l.labels:
            problems.append(f"label {lab} of {l.names[src]} -{lab}-> {l.names[dst]} not in I or U")
    if endpoints_ok:
        cycle = _tau_cycle(l)
        if cycle is not None:
            problems.append("tau-cycle at [" + ", ".join(l.names[q] for q in cycle) + "]")
    return Report(tuple(problems))


def quiescent(l: Lts, q: int) -> bool:
    return not any(lab == TAU or lab in l.outputs for lab in l.moves(q))


def _closure_of(l: Lts, q: int) -> StateSet:
    key = ("clo", q)
    got = l._cache.get(key)
    if got is None:
        seen = {q}
        todo = [q]
        while todo:
            for nxt in l.moves(todo.pop()).get(TAU, ()):
                if nxt not in seen:
                    seen.add(nxt)
                    todo.append(nxt)
        got = l._cache[key] = tuple(sorted(seen))
    return got


def epsilon_closure(l: Lts, x: Iterable[int]) -> StateSet:
    out: set[int] = set()
    for q in x:
        out.update(_closure_of(l, q))
    return tuple(sorted(out))


def _step(l: Lts, x: StateSet, label: str) -> StateSet:
    """One determinized step from an already closed set."""
    key = (x, label)
    got = l._cache.get(key)
    if got is None:
        if label == DELTA:
            got = tuple(q for q in x if quiescent(l, q))
        else:
            nxt: set[int] = set()
            for q in x:
                nxt.update(l.moves(q).get(label, ()))
            got = epsilon_closure(l, nxt)
        l._cache[key] = got
    return got


def after(l: Lts, x: Iterable[int], trace: Sequence[str] = ()) -> StateSet:
    cur = epsilon_closure(l, x)
    for label in trace:
        if not cur:
            break
        cur = _step(l, cur, label)
    return cur


def _outs_of(l: Lts, q: int) -> frozenset[str]:
    key = ("out", q)
    got = l._cache.get(key)
    if got is None:
        labs = {lab for lab in l.moves(q) if lab in l.outputs}
        if quiescent(l, q):
            labs.add(DELTA)
        got = l._cache[key] = frozenset(labs)
    return got


def _ins_of(l: Lts, q: int) -> frozenset[str]:
    """Inputs weakly enabled in ``q``."""
    key = ("in", q)
    got = l._cache.get(key)
    if got is None:
        labs: set[str] = set()
        for p in _closure_of(l, q):
            labs.update(lab for lab in l.moves(p) if lab in l.inputs)
        got = l._cache[key] = frozenset(labs)
    return got


def out_set(l: Lts, x: Iterable[int]) -> frozenset[str]:
    res: set[str] = set()
    for q in epsilon_closure(l, x):
        res |= _outs_of(l, q)
    return frozenset(res)


def in_set(l: Lts, x: Iterable[int]) -> frozenset[str]:
    closed = epsilon_closure(l, x)
    if not closed:
        raise LtsError("in_set of an empty state set")
    res = set(l.inputs)
    for q in closed:
        res &= _ins_of(l, q)
    return frozenset(res)


def is_input_enabled(l: Lts) -> Answer:
    for q in l.states:
        missing = l.inputs - _ins_of(l, q)
        if missing:
            return Answer(False, (q, min(missing)))
    return Answer(True)


def require_input_enabled(l: Lts) -> None:
    ans = is_input_enabled(l)
    if not ans:
        q, lab = ans.witness
        raise NotInputEnabled(f"{l.name or 'system'} refuses input {lab} in state {l.names[q]}")


def project(trace: Sequence[str], keep: Iterable[str]) -> Trace:
    keep = set(keep)
    return tuple(x for x in trace if x in keep)


def substitute(trace: Sequence[str], old: str, new: str) -> Trace:
    return tuple(new if x == old else x for x in trace)
