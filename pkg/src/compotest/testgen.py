"""Offline test cases: generation, validation, execution and verdicts.

A test case is a finite tree whose leaves are the terminals PASS and FAIL.
Two generators share one tree builder; they differ only in the tracker they
keep per node and in how cases and input responses are computed:

* eco tests track a state set of the environment ``e`` and check that the
  SUT only sends ``e`` what it accepts;
* combined tests track a state set of ``s || e`` and check both the SUT's
  outputs against ``s`` and its communication with ``e``.

At every node one case is chosen: A (stop), B (send the SUT an input it may
receive), C (wait for quiescence), D (move the environment on its own) or
E (send the SUT an input the environment knows nothing about).
"""

from __future__ import annotations

import random
import warnings
from collections import deque
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence

from .composition import NotComposable, compose, composable, split
from .lts import (
    DELTA,
    TAU,
    THETA,
    THETA_S,
    Lts,
    LtsError,
    Report,
    StateSet,
    after,
    epsilon_closure,
    in_set,
    out_set,
    quiescent,
    require_input_enabled,
)

PASS, FAIL = 0, 1
TERMINALS = ("PASS", "FAIL")
CASES = ("A", "B", "C", "D", "E")
DEFAULT_WEIGHTS = {"A": 0.0, "B": 1.0, "C": 1.0, "D": 1.0, "E": 0.1}


class EmptyChoice(LtsError):
    """A directed step names a case or label that is not available."""


@dataclass(frozen=True)
class TestCase:
    """Tree-shaped test. ``edges[n]`` lists the ``(label, child)`` pairs of node ``n``.

    Nodes 0 and 1 are the PASS and FAIL terminals and have no edges.
    ``notes`` holds a human readable tracker per node and is not compared.
    """

    __test__ = False

    inputs: frozenset[str]
    outputs: frozenset[str]
    edges: tuple[tuple[tuple[str, int], ...], ...]
    root: int
    kind: str = "eco"
    notes: tuple[str, ...] = field(default=(), compare=False)

    @property
    def labels(self) -> frozenset[str]:
        return self.inputs | self.outputs

    def node_name(self, n: int) -> str:
        return TERMINALS[n] if n < 2 else f"n{n}"

    def size(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class GenPolicy:
    """How the nondeterministic case choice of the generators is resolved.

    ``steps`` drives directed mode; each step is ``CASE[:label][>child]``
    where ``child`` names an input response to follow instead of the case's
    own branch. All branches that are not followed end in PASS.
    """

    mode: str = "random"
    seed: int = 0
    weights: Mapping[str, float] = field(default_factory=lambda: dict(DEFAULT_WEIGHTS))
    stop_probability: float = 0.2
    depth_cap: int = 6
    steps: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.mode not in ("random", "directed", "exhaustive"):
            raise ValueError(f"unknown mode {self.mode}")
        if self.depth_cap < 1:
            raise ValueError("depth_cap must be at least 1")
        if any(w < 0 for w in self.weights.values()):
            raise ValueError("case weights must be non-negative")


Step = tuple[str, str | None, str | None]


def parse_step(text: str) -> Step:
    case, _, follow = text.partition(">")
    case, _, label = case.partition(":")
    case = case.strip().upper()
    if case not in CASES:
        raise ValueError(f"bad step {text!r}")
    return case, label.strip() or None, follow.strip() or None


def format_step(step: Step) -> str:
    case, label, follow = step
    return case + (f":{label}" if label else "") + (f">{follow}" if follow else "")


# -- trackers ---------------------------------------------------------------

Child = StateSet | None  # None is the FAIL terminal


class _EcoModel:
    kind = "eco"

    def __init__(self, e: Lts, sut_inputs, sut_outputs) -> None:
        ui, ii = frozenset(sut_outputs), frozenset(sut_inputs)
        if ui & e.outputs or ui & ii:
            raise NotComposable("SUT outputs overlap the environment's outputs or SUT inputs")
        self.e, self.si, self.su = e, ii, ui
        self.sut_labels = ii | ui
        self.inputs = (ui & e.inputs) | {THETA}
        self.outputs = e.outputs | (e.inputs - ui) | (ii - e.labels)
        self.root = after(e, [e.initial])
        self._cache: dict = {}

    def describe(self, x: StateSet) -> str:
        return self.e.show_set(x)

    def cases(self, x: StateSet) -> dict[str, list[tuple[str, Child]]]:
        got = self._cache.get(("c", x))
        if got is None:
            e = self.e
            avail = out_set(e, x) | in_set(e, x)
            quiet = after(e, x, [DELTA]) if DELTA in out_set(e, x) else x
            got = self._cache[("c", x)] = {
                "B": [(lab, after(e, x, [lab])) for lab in sorted(avail & self.si)],
                "C": [(THETA, quiet)],
                "D": [(lab, after(e, x, [lab])) for lab in sorted(avail - self.sut_labels - {DELTA})],
                "E": [(lab, x) for lab in sorted(self.si - e.labels)],
            }
        return got

    def responses(self, x: StateSet) -> list[tuple[str, Child]]:
        got = self._cache.get(("r", x))
        if got is None:
            e = self.e
            acc = in_set(e, x)
            got = self._cache[("r", x)] = [
                (lab, after(e, x, [lab]) if lab in acc else None)
                for lab in sorted(self.su & e.inputs)
            ]
        return got


class _CombinedModel:
    kind = "cioco"

    def __init__(self, s: Lts, e: Lts) -> None:
        if not composable(s, e):
            raise NotComposable("output alphabets overlap")
        self.s, self.e = s, e
        self.c = compose(s, e)
        self.sut_labels = s.labels
        self.inputs = s.outputs | {THETA, THETA_S}
        self.outputs = e.outputs | (e.inputs - s.outputs) | (s.inputs - e.labels)
        self.root = after(self.c, [self.c.initial])
        self._cache: dict = {}

    def describe(self, x: StateSet) -> str:
        return self.c.show_set(x)

    def cases(self, x: StateSet) -> dict[str, list[tuple[str, Child]]]:
        got = self._cache.get(("c", x))
        if got is None:
            c = self.c
            xs, _ = split(c, x)
            out_c, in_c = out_set(c, x), in_set(c, x)
            if DELTA not in out_set(self.s, xs):
                theta: tuple[str, Child] = (THETA, None)
            elif DELTA in out_c:
                theta = (THETA, after(c, x, [DELTA]))
            else:
                theta = (THETA_S, x)
            got = self._cache[("c", x)] = {
                "B": [(lab, after(c, x, [lab])) for lab in sorted(in_set(self.s, xs) & (in_c | out_c))],
                "C": [theta],
                "D": [(lab, after(c, x, [lab])) for lab in sorted((out_c | in_c) - self.s.labels - {DELTA})],
                "E": [],
            }
        return got

    def responses(self, x: StateSet) -> list[tuple[str, Child]]:
        got = self._cache.get(("r", x))
        if got is None:
            c = self.c
            _, xe = split(c, x)
            out_c, in_e = out_set(c, x), in_set(self.e, xe)
            got = []
            for lab in sorted(self.s.outputs):
                bad = (lab in self.e.inputs and lab not in in_e) or lab not in out_c
                got.append((lab, None if bad else after(c, x, [lab])))
            self._cache[("r", x)] = got
        return got


def _eco_model(e: Lts, sut_inputs, sut_outputs) -> _EcoModel:
    return _EcoModel(e, sut_inputs, sut_outputs)


def _combined_model(s: Lts, e: Lts) -> _CombinedModel:
    from .conformance import is_utrace_closed

    for side in (s, e):
        if not is_utrace_closed(side):
            warnings.warn(f"{side.name or 'operand'} is not utrace-closed; exhaustiveness is not guaranteed")
    return _CombinedModel(s, e)


# -- tree building ------------------------------------------------------------


class _Tree:
    def __init__(self, model) -> None:
        self.model = model
        self.edges: list[list[tuple[str, int]]] = [[], []]
        self.notes: list[str] = ["", ""]

    def node(self, x: StateSet) -> int:
        self.edges.append([])
        self.notes.append(self.model.describe(x))
        return len(self.edges) - 1

    def finish(self, root: int) -> TestCase:
        return TestCase(
            inputs=frozenset(self.model.inputs),
            outputs=frozenset(self.model.outputs),
            edges=tuple(tuple(sorted(es)) for es in self.edges),
            root=root,
            kind=self.model.kind,
            notes=tuple(self.notes),
        )


def _random_tree(model, policy: GenPolicy) -> TestCase:
    rng = random.Random(policy.seed)
    tree = _Tree(model)
    weights = {**DEFAULT_WEIGHTS, **policy.weights}

    def grow(x: StateSet, depth: int) -> int:
        if depth >= policy.depth_cap or (depth and rng.random() < policy.stop_probability):
            return PASS
        options = {c: opts for c, opts in model.cases(x).items() if opts and weights[c] > 0}
        if not options:
            return PASS
        names = sorted(options)
        case = rng.choices(names, [weights[c] for c in names])[0]
        lab, child = rng.choice(options[case])
        me = tree.node(x)
        branches = [(lab, child)] + model.responses(x)
        for blab, bchild in branches:
            target = FAIL if bchild is None else grow(bchild, depth + 1)
            tree.edges[me].append((blab, target))
        return me

    return tree.finish(grow(model.root, 0))


def _path_tree(model, steps: Sequence[Step]) -> TestCase:
    tree = _Tree(model)

    def grow(x: StateSet, k: int) -> int:
        if k >= len(steps) or steps[k][0] == "A":
            return PASS
        case, label, follow = steps[k]
        opts = model.cases(x)[case]
        if label is not None:
            opts = [o for o in opts if o[0] == label]
        if not opts:
            raise EmptyChoice(f"step {format_step(steps[k])} has nothing to choose at {model.describe(x)}")
        lab, child = opts[0]
        me = tree.node(x)
        followed = False
        for idx, (blab, bchild) in enumerate([(lab, child)] + model.responses(x)):
            take = follow == blab if follow is not None else idx == 0
            followed = followed or take
            if bchild is None:
                target = FAIL
            else:
                target = grow(bchild, k + 1) if take else PASS
            tree.edges[me].append((blab, target))
        if follow is not None and not followed:
            raise EmptyChoice(f"step {format_step(steps[k])}: no branch {follow} to follow")
        return me

    return tree.finish(grow(model.root, 0))


def _path_options(model, x: StateSet, last: bool) -> list[Step]:
    """Every (case, label, followed branch) available at a node of a path test."""
    resp = [lab for lab, child in model.responses(x) if child is not None]
    opts: list[Step] = []
    for case, choices in sorted(model.cases(x).items()):
        for lab, child in choices:
            if last:
                opts.append((case, lab, None))
                continue
            if child is not None:
                opts.append((case, lab, None))
            opts.extend((case, lab, r) for r in resp)
            if child is None and not resp:
                opts.append((case, lab, None))
    return opts


def _step_child(model, x: StateSet, step: Step) -> Child:
    case, label, follow = step
    if follow is None:
        return next(ch for lab, ch in model.cases(x)[case] if lab == label)
    return next(ch for lab, ch in model.responses(x) if lab == follow)


def _all_paths(model, depth: int) -> Iterator[tuple[Step, ...]]:
    def walk(x: Child, k: int, prefix: tuple[Step, ...]):
        if x is None or k >= depth:
            yield prefix
            return
        opts = _path_options(model, x, k == depth - 1)
        if not opts:
            yield prefix
            return
        for step in opts:
            yield from walk(_step_child(model, x, step) if k < depth - 1 else None, k + 1, prefix + (step,))

    yield from walk(model.root, 0, ())


def _generate(model, policy: GenPolicy) -> TestCase:
    if policy.mode == "random":
        return _random_tree(model, policy)
    if policy.mode == "directed":
        return _path_tree(model, [parse_step(s) for s in policy.steps])
    raise ValueError("exhaustive mode yields a suite; use the *_suite functions")


def gen_eco_test(e: Lts, sut_inputs, sut_outputs, policy: GenPolicy) -> TestCase:
    return _generate(_eco_model(e, sut_inputs, sut_outputs), policy)


def gen_combined_test(s: Lts, e: Lts, policy: GenPolicy) -> TestCase:
    return _generate(_combined_model(s, e), policy)


def eco_suite(e: Lts, sut_inputs, sut_outputs, depth: int) -> Iterator[TestCase]:
    """All maximal single-path tests of the given depth, lazily."""
    model = _eco_model(e, sut_inputs, sut_outputs)
    for path in _all_paths(model, depth):
        yield _path_tree(model, path)


def combined_suite(s: Lts, e: Lts, depth: int) -> Iterator[TestCase]:
    model = _combined_model(s, e)
    for path in _all_paths(model, depth):
        yield _path_tree(model, path)


# -- validation ---------------------------------------------------------------


def validate_test_case(t: TestCase) -> Report:
    problems: list[str] = []
    name = t.node_name
    if THETA not in t.inputs:
        problems.append("theta is not a test input")
    if t.inputs & t.outputs:
        problems.append("test alphabets overlap")
    n = len(t.edges)
    incoming = [0] * n
    for node in range(n):
        es = t.edges[node]
        if node < 2:
            if es:
                problems.append(f"terminal {name(node)} has outgoing edges")
            continue
        labels = [lab for lab, _ in es]
        for lab, child in es:
            if lab in (TAU, DELTA):
                problems.append(f"{name(node)} has a {lab} edge")
            elif lab not in t.labels:
                problems.append(f"{name(node)} has edge {lab} outside the test alphabet")
            if not 0 <= child < n:
                problems.append(f"{name(node)} -{lab}-> unknown node {child}")
            else:
                incoming[child] += 1
        outs = [lab for lab in labels if lab in t.outputs]
        if len(outs) > 1:
            problems.append(f"{name(node)} has {len(outs)} output edges")
        for lab in sorted(t.inputs - {THETA, THETA_S}):
            k = labels.count(lab)
            if k != 1:
                problems.append(f"{name(node)} has {k} edges for input {lab}")
        for lab in (THETA, THETA_S):
            if labels.count(lab) > 1:
                problems.append(f"{name(node)} has {labels.count(lab)} edges for {lab}")
        if not es:
            problems.append(f"leaf {name(node)} is not a terminal")
    for node in range(2, n):
        want = 0 if node == t.root else 1
        if incoming[node] != want:
            problems.append(f"{name(node)} has {incoming[node]} incoming edges")
    if not 0 <= t.root < n:
        problems.append("root is not a node")
    return Report(tuple(problems))


# -- execution ----------------------------------------------------------------


@dataclass(frozen=True)
class TestRun:
    __test__ = False

    trace: tuple[str, ...]
    terminal: str
    impl_state: int


@dataclass(frozen=True)
class Verdict:
    passed: bool
    runs: tuple[TestRun, ...] = ()
    test_index: int | None = None

    def __bool__(self) -> bool:
        return self.passed

    @property
    def failing_run(self) -> TestRun | None:
        return next((r for r in self.runs if r.terminal == "FAIL"), None)


def _exec_moves(t: TestCase, i: Lts, node: int, q: int):
    """Moves of configuration (node, q) of t || i; terminals are absorbing."""
    if node < 2:
        return
    lt, li = t.labels, i.labels
    tedges = t.edges[node]
    for lab, targets in i.moves(q).items():
        if lab == TAU or lab not in lt:
            for q2 in targets:
                yield lab, node, q2
    for lab, child in tedges:
        if lab in (THETA, THETA_S):
            if quiescent(i, q):
                yield lab, child, q
        elif lab not in li:
            yield lab, child, q
        else:
            for q2 in i.moves(q).get(lab, ()):
                yield lab, child, q2


def _check_exec_alphabets(t: TestCase, i: Lts) -> None:
    require_input_enabled(i)
    for node in range(2, len(t.edges)):
        for lab, _ in t.edges[node]:
            if lab in t.outputs and lab in i.outputs:
                raise LtsError(f"test output {lab} is an output of the implementation")


def test_exec(t: TestCase, i: Lts) -> Lts:
    """The closed system t || i over its reachable configurations."""
    _check_exec_alphabets(t, i)
    start = (t.root, i.initial)
    index = {start: 0}
    order = [start]
    trans = set()
    todo = deque([start])
    while todo:
        cfg = todo.popleft()
        for lab, n2, q2 in _exec_moves(t, i, *cfg):
            nxt = (n2, q2)
            if nxt not in index:
                index[nxt] = len(order)
                order.append(nxt)
                todo.append(nxt)
            trans.add((index[cfg], lab, index[nxt]))
    names = tuple(f"({t.node_name(n)},{i.names[q]})" for n, q in order)
    return Lts(
        names=names,
        inputs=frozenset(),
        outputs=i.outputs | (t.labels - {THETA}),
        transitions=frozenset(trans),
        pairs=tuple(order),
    )


test_exec.__test__ = False  # keep pytest from collecting the operator


def run_test(t: TestCase, i: Lts) -> Verdict:
    """Explore every configuration of t || i; fail iff FAIL is reachable.

    ``runs`` holds a shortest run to each reachable terminal configuration,
    failing runs first.
    """
    _check_exec_alphabets(t, i)
    start = (t.root, i.initial)
    parent: dict = {start: None}
    todo = deque([start])
    ends = []
    while todo:
        cfg = todo.popleft()
        if cfg[0] < 2:
            ends.append(cfg)
            continue
        for lab, n2, q2 in _exec_moves(t, i, *cfg):
            nxt = (n2, q2)
            if nxt not in parent:
                parent[nxt] = (cfg, lab)
                todo.append(nxt)
    runs = []
    for cfg in ends:
        trace, cur = [], cfg
        while parent[cur] is not None:
            cur, lab = parent[cur]
            if lab != TAU:
                trace.append(lab)
        runs.append(TestRun(tuple(reversed(trace)), TERMINALS[cfg[0]], cfg[1]))
    runs.sort(key=lambda r: (r.terminal != "FAIL", len(r.trace), r.trace, r.impl_state))
    return Verdict(not any(r.terminal == "FAIL" for r in runs), tuple(runs))


def run_suite(ts: Sequence[TestCase], i: Lts) -> Verdict:
    for k, t in enumerate(ts):
        v = run_test(t, i)
        if not v.passed:
            return Verdict(False, v.runs, k)
    return Verdict(True)


# -- bounded exhaustive verdicts ---------------------------------------------


def _exhaustive_search(model, i: Lts, depth: int) -> tuple[Step, ...] | None:
    """Steps of a failing path test of at most ``depth`` nodes, or None.

    Equivalent to running every test of the matching ``*_suite`` but shares
    work between tests: a configuration is a tracker plus the set of
    implementation states a path test can be in at that node.
    """
    require_input_enabled(i)
    solo = frozenset(i.labels - model.inputs - model.outputs)

    def close(states) -> frozenset[int]:
        seen = set(epsilon_closure(i, states))
        todo = list(seen)
        while todo:
            q = todo.pop()
            for lab in solo:
                for q2 in epsilon_closure(i, i.moves(q).get(lab, ())):
                    if q2 not in seen:
                        seen.add(q2)
                        todo.append(q2)
        return frozenset(seen)

    def move(ys, lab: str) -> frozenset[int]:
        if lab in (THETA, THETA_S):
            return frozenset(q for q in ys if quiescent(i, q))
        if lab not in i.labels:
            return ys
        return close(q2 for q in ys for q2 in i.moves(q).get(lab, ()))

    memo: dict = {}

    def search(x: StateSet, ys: frozenset[int], left: int):
        key = (x, ys, left)
        if key in memo:
            return memo[key]
        memo[key] = None
        resp = model.responses(x)
        for lab, child in resp:
            if child is None and move(ys, lab):
                memo[key] = (("C", None, None),)
                return memo[key]
        for case, choices in sorted(model.cases(x).items()):
            for lab, child in choices:
                ys2 = move(ys, lab)
                if not ys2:
                    continue
                if child is None:
                    memo[key] = ((case, lab, None),)
                    return memo[key]
                if left > 1:
                    found = search(child, ys2, left - 1)
                    if found is not None:
                        memo[key] = ((case, lab, None),) + found
                        return memo[key]
            if left > 1:
                for lab, _ in choices:
                    for rlab, rchild in resp:
                        if rchild is None:
                            continue
                        ys2 = move(ys, rlab)
                        if ys2:
                            found = search(rchild, ys2, left - 1)
                            if found is not None:
                                memo[key] = ((case, lab, rlab),) + found
                                return memo[key]
        return None

    if depth < 1:
        return None
    return search(model.root, close([i.initial]), depth)


def eco_exhaustive(e: Lts, sut: Lts, depth: int) -> TestCase | None:
    """A failing test among all eco tests up to ``depth``, or None if ``sut`` passes them all."""
    model = _eco_model(e, sut.inputs, sut.outputs)
    steps = _exhaustive_search(model, sut, depth)
    return None if steps is None else _path_tree(model, _fill_labels(model, steps))


def combined_exhaustive(s: Lts, e: Lts, sut: Lts, depth: int) -> TestCase | None:
    model = _combined_model(s, e)
    steps = _exhaustive_search(model, sut, depth)
    return None if steps is None else _path_tree(model, _fill_labels(model, steps))


def _fill_labels(model, steps: Sequence[Step]) -> list[Step]:
    """Give the C steps produced by the search an explicit label."""
    out = []
    x: Child = model.root
    for case, lab, follow in steps:
        if lab is None:
            lab = model.cases(x)[case][0][0]
        out.append((case, lab, follow))
        if x is not None:
            x = _step_child(model, x, (case, lab, follow))
    return out
