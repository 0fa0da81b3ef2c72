"""On-the-fly testing against a system under test behind an adapter.

The drivers keep a tracker (a state set of the model s or of the
composed model s || e) and at each step draw one case:

    A  stop            B  send an input        C  observe the SUT
    D  let the simulated environment move      E  send a non-interacting input
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Mapping, Protocol

from .composition import NotComposable, compose, composable, split
from .lts import (
    DELTA,
    TAU,
    Lts,
    LtsError,
    StateSet,
    after,
    epsilon_closure,
    in_set,
    out_set,
    quiescent,
    require_input_enabled,
    show_label,
)
from .testgen import DEFAULT_WEIGHTS


class UnknownInput(LtsError):
    pass


class AdapterError(RuntimeError):
    """Transport failure of an adapter; the run is aborted."""


class SutAdapter(Protocol):
    def alphabet(self) -> tuple[frozenset[str], frozenset[str]]: ...

    def send(self, label: str) -> str | None:
        """Deliver an input. Returns an output if the SUT emitted one first."""
        ...

    def observe(self, budget: float | None = None) -> str:
        """An output label, or ``DELTA`` when none is forthcoming."""
        ...

    def reset(self) -> None: ...


class SimulatedAdapter:
    """Runs an input-enabled Lts as a black box with seeded choices."""

    def __init__(self, i: Lts, seed: int = 0, input_wins: float = 0.5) -> None:
        require_input_enabled(i)
        self.lts = i
        self.seed = seed
        self.input_wins = input_wins
        self.resets = 0
        self._start()

    def alphabet(self) -> tuple[frozenset[str], frozenset[str]]:
        return self.lts.inputs, self.lts.outputs

    def _start(self) -> None:
        self.rng = random.Random(f"{self.seed}/{self.resets}")
        self.state = self.lts.initial

    def reset(self) -> None:
        self.resets += 1
        self._start()

    def _emit(self) -> str:
        i = self.lts
        while True:
            moves = [
                (lab, t) for lab, ts in sorted(i.moves(self.state).items())
                if lab == TAU or lab in i.outputs for t in ts
            ]
            if not moves:
                return DELTA
            lab, self.state = self.rng.choice(moves)
            if lab != TAU:
                return lab

    def observe(self, budget: float | None = None) -> str:
        return self._emit()

    def send(self, label: str) -> str | None:
        i = self.lts
        if label not in i.inputs:
            raise UnknownInput(label)
        if not quiescent(i, self.state) and self.rng.random() >= self.input_wins:
            raced = self._emit()
            if raced != DELTA:
                return raced
        targets = sorted({t for q in epsilon_closure(i, [self.state]) for t in i.moves(q).get(label, ())})
        self.state = self.rng.choice(targets)
        return None


def simulate_adapter(i: Lts, seed: int = 0, input_wins: float = 0.5) -> SimulatedAdapter:
    return SimulatedAdapter(i, seed, input_wins)


@dataclass(frozen=True)
class OtfConfig:
    max_steps: int = 100
    seed: int = 0
    weights: Mapping[str, float] = field(default_factory=lambda: dict(DEFAULT_WEIGHTS))
    budget: float | None = None

    def __post_init__(self) -> None:
        if self.max_steps < 0:
            raise ValueError("max_steps must be non-negative")


@dataclass(frozen=True)
class Event:
    kind: str  # send, observe, env
    label: str
    before: StateSet
    after: StateSet
    raced: bool = False

    def line(self) -> str:
        mark = {"send": ">", "observe": "<", "env": "~"}[self.kind]
        return mark + show_label(self.label)


@dataclass(frozen=True)
class RunLog:
    verdict: str  # PASS, FAIL or ABORT
    events: tuple[Event, ...]
    reason: str = ""

    @property
    def passed(self) -> bool:
        return self.verdict == "PASS"

    def __bool__(self) -> bool:
        return self.passed

    def lines(self) -> list[str]:
        return [ev.line() for ev in self.events] + [self.verdict]

    def text(self) -> str:
        return "\n".join(self.lines()) + "\n"

    def trace(self) -> tuple[str, ...]:
        return tuple(ev.label for ev in self.events)


class _Fail(Exception):
    pass


class _Driver:
    """Shared loop; subclasses supply the choose-sets and the observation rule."""

    def __init__(self, adapter: SutAdapter, cfg: OtfConfig) -> None:
        self.adapter = adapter
        self.cfg = cfg
        self.rng = random.Random(cfg.seed)
        self.weights = {**DEFAULT_WEIGHTS, **cfg.weights}
        self.events: list[Event] = []

    def choices(self, x: StateSet) -> dict[str, list[str]]:
        raise NotImplementedError

    def apply(self, x: StateSet, case: str, label: str) -> StateSet:
        raise NotImplementedError

    def observed(self, x: StateSet, label: str) -> StateSet:
        raise NotImplementedError

    def _observe(self, x: StateSet, label: str, raced: bool = False) -> StateSet:
        try:
            nxt = self.observed(x, label)
        except _Fail:
            self.events.append(Event("observe", label, x, (), raced))
            raise
        self.events.append(Event("observe", label, x, nxt, raced))
        return nxt

    def run(self, x: StateSet) -> RunLog:
        try:
            for _ in range(self.cfg.max_steps):
                opts = {c: v for c, v in self.choices(x).items() if v and self.weights.get(c, 0) > 0}
                if self.weights.get("A", 0) > 0:
                    opts["A"] = ["stop"]
                if not opts:
                    break
                names = sorted(opts)
                case = self.rng.choices(names, [self.weights[c] for c in names])[0]
                if case == "A":
                    break
                if case == "C":
                    x = self._observe(x, self.adapter.observe(self.cfg.budget))
                    continue
                label = self.rng.choice(opts[case])
                if case == "D":
                    nxt = self.apply(x, case, label)
                    self.events.append(Event("env", label, x, nxt))
                    x = nxt
                    continue
                raced = self.adapter.send(label)
                if raced is not None:
                    x = self._observe(x, raced, raced=True)
                    continue
                nxt = self.apply(x, case, label)
                self.events.append(Event("send", label, x, nxt))
                x = nxt
        except _Fail as exc:
            return RunLog("FAIL", tuple(self.events), str(exc))
        except AdapterError as exc:
            return RunLog("ABORT", tuple(self.events), str(exc))
        return RunLog("PASS", tuple(self.events))


class _EcoDriver(_Driver):
    def __init__(self, adapter: SutAdapter, e: Lts, cfg: OtfConfig) -> None:
        super().__init__(adapter, cfg)
        ii, uu = adapter.alphabet()
        if uu & e.outputs:
            raise NotComposable("SUT and environment share outputs")
        self.e, self.si, self.sl = e, frozenset(ii), frozenset(ii) | frozenset(uu)

    def choices(self, x: StateSet) -> dict[str, list[str]]:
        e = self.e
        avail = out_set(e, x) | in_set(e, x)
        return {
            "B": sorted(avail & self.si),
            "C": ["observe"],
            "D": sorted(avail - self.sl - {DELTA}),
            "E": sorted(self.si - e.labels),
        }

    def apply(self, x: StateSet, case: str, label: str) -> StateSet:
        return x if case == "E" else after(self.e, x, [label])

    def observed(self, x: StateSet, label: str) -> StateSet:
        e = self.e
        if label in e.inputs:
            if label not in in_set(e, x):
                raise _Fail(f"environment in {e.show_set(x)} does not accept {label}")
            return after(e, x, [label])
        if label == DELTA and DELTA in out_set(e, x):
            return after(e, x, [DELTA])
        return x


class _UiocoDriver(_Driver):
    def __init__(self, adapter: SutAdapter, s: Lts, cfg: OtfConfig) -> None:
        super().__init__(adapter, cfg)
        if tuple(adapter.alphabet()) != (s.inputs, s.outputs):
            raise LtsError("SUT alphabet differs from that of s")
        self.s = s

    def choices(self, x: StateSet) -> dict[str, list[str]]:
        return {"B": sorted(in_set(self.s, x)), "C": ["observe"]}

    def apply(self, x: StateSet, case: str, label: str) -> StateSet:
        return after(self.s, x, [label])

    def observed(self, x: StateSet, label: str) -> StateSet:
        nxt = after(self.s, x, [label])
        if not nxt:
            raise _Fail(f"{show_label(label)} not allowed in {self.s.show_set(x)}")
        return nxt


class _CiocoDriver(_Driver):
    def __init__(self, adapter: SutAdapter, s: Lts, e: Lts, cfg: OtfConfig) -> None:
        super().__init__(adapter, cfg)
        if not composable(s, e):
            raise NotComposable("output alphabets overlap")
        if tuple(adapter.alphabet()) != (s.inputs, s.outputs):
            raise LtsError("SUT alphabet differs from that of s")
        self.s, self.e, self.c = s, e, compose(s, e)

    def choices(self, x: StateSet) -> dict[str, list[str]]:
        c = self.c
        xs, _ = split(c, x)
        out_c, in_c = out_set(c, x), in_set(c, x)
        return {
            "B": sorted(in_set(self.s, xs) & (in_c | out_c)),
            "C": ["observe"],
            "D": sorted((out_c | in_c) - self.s.labels - {DELTA}),
        }

    def apply(self, x: StateSet, case: str, label: str) -> StateSet:
        return after(self.c, x, [label])

    def observed(self, x: StateSet, label: str) -> StateSet:
        c = self.c
        xs, xe = split(c, x)
        if label in self.e.inputs and label not in in_set(self.e, xe):
            raise _Fail(f"environment in {self.e.show_set(xe)} does not accept {label}")
        if label not in out_set(self.s, xs):
            raise _Fail(f"{show_label(label)} not allowed in {self.s.show_set(xs)}")
        if label == DELTA and DELTA not in out_set(self.e, xe):
            return x
        nxt = after(c, x, [label])
        if nxt:
            return nxt
        if label == DELTA:
            # both sides may be quiescent without a common quiescent pair
            return x
        raise _Fail(f"{label} not possible in {c.show_set(x)}")


def otf_eco(adapter: SutAdapter, e: Lts, cfg: OtfConfig = OtfConfig()) -> RunLog:
    return _EcoDriver(adapter, e, cfg).run(after(e, [e.initial]))


def otf_uioco(adapter: SutAdapter, s: Lts, cfg: OtfConfig = OtfConfig()) -> RunLog:
    return _UiocoDriver(adapter, s, cfg).run(after(s, [s.initial]))


def otf_cioco(adapter: SutAdapter, s: Lts, e: Lts, cfg: OtfConfig = OtfConfig()) -> RunLog:
    d = _CiocoDriver(adapter, s, e, cfg)
    return d.run(after(d.c, [d.c.initial]))

