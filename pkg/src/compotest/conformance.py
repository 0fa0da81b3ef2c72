"""Decision procedures for uioco and eco, plus bounded brute-force oracles.

All searches are breadth first with labels expanded in token order, so a
reported counterexample is the shortest one and, among those, the
lexicographically least.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .composition import NotComposable, compose, composable
from .lts import (
    DELTA,
    TAU,
    Answer,
    Lts,
    LtsError,
    StateSet,
    Trace,
    after,
    in_set,
    out_set,
    require_input_enabled,
    show_trace,
)


class AlphabetMismatch(LtsError):
    pass


Pair = tuple[StateSet, StateSet]


@dataclass(frozen=True)
class Counterexample:
    trace: Trace
    label: str
    site: str = ""

    def __str__(self) -> str:
        return show_trace(self.trace + (self.label,))


@dataclass(frozen=True)
class ConformanceVerdict:
    passed: bool
    counterexample: Counterexample | None = None
    relation: frozenset[Pair] | None = None

    def __bool__(self) -> bool:
        return self.passed


def _bfs_trace(parent: dict, node) -> Trace:
    labels = []
    while parent[node] is not None:
        node, lab = parent[node]
        labels.append(lab)
    return tuple(reversed(labels))


def check_uioco(i: Lts, s: Lts) -> ConformanceVerdict:
    if i.inputs != s.inputs or i.outputs != s.outputs:
        raise AlphabetMismatch("implementation and specification alphabets differ")
    require_input_enabled(i)
    start = (after(i, [i.initial]), after(s, [s.initial]))
    parent: dict = {start: None}
    todo = deque([start])
    while todo:
        node = todo.popleft()
        xi, xs = node
        outs_s = out_set(s, xs)
        extra = out_set(i, xi) - outs_s
        if extra:
            lab = min(extra)
            return ConformanceVerdict(
                False, Counterexample(_bfs_trace(parent, node), lab, f"at {s.show_set(xs)}")
            )
        for lab in sorted(outs_s | in_set(s, xs)):
            ni = after(i, xi, [lab])
            if not ni:
                continue
            nxt = (ni, after(s, xs, [lab]))
            if nxt not in parent:
                parent[nxt] = (node, lab)
                todo.append(nxt)
    return ConformanceVerdict(True)


def _eco_successors(s: Lts, e: Lts, xs: StateSet, xe: StateSet):
    """Successor pairs of (xs, xe) by the eco-simulation rules, in label order."""
    out_s, out_e = out_set(s, xs), out_set(e, xe)
    in_s, in_e = in_set(s, xs), in_set(e, xe)
    ls, le = s.labels, e.labels
    both = set((out_s & e.inputs) | (out_e & s.inputs) | (in_s & in_e))
    if DELTA in out_s and DELTA in out_e:
        both.add(DELTA)
    s_only = (out_s | in_s) - le - {DELTA}
    e_only = (out_e | in_e) - ls - {DELTA}
    moves = [(lab, True, True) for lab in both]
    moves += [(lab, True, False) for lab in s_only]
    moves += [(lab, False, True) for lab in e_only]
    for lab, ms, me in sorted(moves):
        yield lab, (after(s, xs, [lab]) if ms else xs, after(e, xe, [lab]) if me else xe)


def _eco_violation(s: Lts, e: Lts, xs: StateSet, xe: StateSet) -> tuple[str, str] | None:
    bad = (out_set(s, xs) & e.inputs) - in_set(e, xe)
    if bad:
        return min(bad), "e"
    bad = (out_set(e, xe) & s.inputs) - in_set(s, xs)
    if bad:
        return min(bad), "s"
    return None


def decide_eco(s: Lts, e: Lts) -> ConformanceVerdict:
    """Build the least eco-simulation from the initial pair, or report why none exists.

    On failure ``site`` names the side that does not accept ``label``.
    """
    if not composable(s, e):
        raise NotComposable("output alphabets overlap")
    start = (after(s, [s.initial]), after(e, [e.initial]))
    parent: dict = {start: None}
    todo = deque([start])
    while todo:
        node = todo.popleft()
        bad = _eco_violation(s, e, *node)
        if bad:
            lab, side = bad
            return ConformanceVerdict(False, Counterexample(_bfs_trace(parent, node), lab, side))
        for lab, nxt in _eco_successors(s, e, *node):
            if nxt not in parent:
                parent[nxt] = (node, lab)
                todo.append(nxt)
    return ConformanceVerdict(True, relation=frozenset(parent))


def check_mutual_acceptance(s: Lts, e: Lts) -> ConformanceVerdict:
    return decide_eco(s, e)


def _utrace_graph(l: Lts):
    """Successors of a closed set along utrace extensions."""

    def succ(x: StateSet):
        labs = out_set(l, x) | in_set(l, x)
        for lab in sorted(labs):
            nxt = after(l, x, [lab])
            if nxt:
                yield lab, nxt

    return succ


def utrace_depth(l: Lts) -> int:
    """Largest BFS level of the determinized utrace graph of ``l``."""
    succ = _utrace_graph(l)
    start = after(l, [l.initial])
    level = {start: 0}
    todo = deque([start])
    while todo:
        x = todo.popleft()
        for _, nxt in succ(x):
            if nxt not in level:
                level[nxt] = level[x] + 1
                todo.append(nxt)
    return max(level.values())


def ma_oracle(s: Lts, e: Lts, depth: int | None = None) -> ConformanceVerdict:
    """Mutual acceptance checked state by state over the utraces of ``s || e``.

    Works directly on the composed transitions with its own closure code and
    never touches the eco rules. ``depth`` bounds the utrace length.
    """
    if not composable(s, e):
        raise NotComposable("output alphabets overlap")
    c = compose(s, e)
    succ: dict[int, dict[str, set[int]]] = {q: {} for q in c.states}
    for a, lab, b in c.transitions:
        succ[a].setdefault(lab, set()).add(b)

    def close(states) -> frozenset[int]:
        seen = set(states)
        todo = list(seen)
        while todo:
            for b in succ[todo.pop()].get(TAU, ()):
                if b not in seen:
                    seen.add(b)
                    todo.append(b)
        return frozenset(seen)

    def strong_out(l: Lts, q: int) -> set[str]:
        return {lab for lab in l.moves(q) if lab in l.outputs}

    def weak_in(l: Lts, q: int) -> set[str]:
        seen, todo, labs = {q}, [q], set()
        while todo:
            p = todo.pop()
            for lab, ts in l.moves(p).items():
                if lab in l.inputs:
                    labs.add(lab)
                elif lab == TAU:
                    for t in ts:
                        if t not in seen:
                            seen.add(t)
                            todo.append(t)
        return labs

    def c_quiet(q: int) -> bool:
        return not any(lab == TAU or lab in c.outputs for lab in succ[q])

    def violation(x: frozenset[int]):
        pairs = [c.pairs[q] for q in x]
        bad = set()
        for qs, qe in pairs:
            bad |= (strong_out(s, qs) & e.inputs) - weak_in(e, qe)
        if bad:
            return min(bad), "e"
        for qs, qe in pairs:
            bad |= (strong_out(e, qe) & s.inputs) - weak_in(s, qs)
        if bad:
            return min(bad), "s"
        return None

    def c_in(q: int) -> set[str]:
        labs = set()
        for p in close([q]):
            labs |= {lab for lab in succ[p] if lab in c.inputs}
        return labs

    start = close([c.initial])
    parent: dict = {start: None}
    dist = {start: 0}
    todo = deque([start])
    while todo:
        x = todo.popleft()
        bad = violation(x)
        if bad:
            return ConformanceVerdict(False, Counterexample(_bfs_trace(parent, x), *bad))
        if depth is not None and dist[x] >= depth:
            continue
        enabled_in = set.intersection(*(c_in(q) for q in x))
        labs = {lab for q in x for lab in succ[q] if lab in c.outputs} | enabled_in
        if any(c_quiet(q) for q in x):
            labs.add(DELTA)
        for lab in sorted(labs):
            if lab == DELTA:
                nxt = frozenset(q for q in x if c_quiet(q))
            else:
                nxt = close(b for q in x for b in succ[q].get(lab, ()))
            if nxt and nxt not in parent:
                parent[nxt] = (x, lab)
                dist[nxt] = dist[x] + 1
                todo.append(nxt)
    return ConformanceVerdict(True)


def is_utrace_closed(l: Lts) -> Answer:
    """Whether every executable suspension trace of ``l`` is a utrace.

    The witness for a negative answer is a shortest trace whose last input is
    possible from some reachable state but not from all of them.
    """
    start = after(l, [l.initial])
    parent: dict = {start: None}
    todo = deque([start])
    labels = sorted(l.labels | {DELTA})
    while todo:
        x = todo.popleft()
        enabled = in_set(l, x)
        for lab in labels:
            nxt = after(l, x, [lab])
            if not nxt:
                continue
            if lab in l.inputs and lab not in enabled:
                return Answer(False, _bfs_trace(parent, x) + (lab,))
        for lab in labels:
            nxt = after(l, x, [lab])
            if nxt and nxt not in parent:
                parent[nxt] = (x, lab)
                todo.append(nxt)
    return Answer(True)
