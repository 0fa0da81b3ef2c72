import random

import pytest

from compotest.composition import compose
from compotest.conformance import check_uioco, decide_eco
from compotest.lts import DELTA, Lts, LtsError, NotInputEnabled, after
from compotest.otf import (
    AdapterError,
    OtfConfig,
    SimulatedAdapter,
    UnknownInput,
    otf_cioco,
    otf_eco,
    otf_uioco,
    simulate_adapter,
)
from compotest.testgen import GenPolicy, gen_eco_test, run_test
from randsys import input_complete, mutate, random_alphabets, random_lts


def test_adapter_observe(fx):
    ad = simulate_adapter(fx["fig5i"], seed=1)
    assert ad.alphabet() == ({"b", "r"}, {"a"})
    assert ad.observe() == "a"
    assert ad.observe() == DELTA
    assert ad.send("b") is None
    assert ad.observe() == "a"


def test_adapter_quiescent_sut(fx):
    ad = simulate_adapter(fx["fig9is"], seed=5)
    assert all(ad.observe() == DELTA for _ in range(10))
    ad.send("b")
    assert ad.observe() == DELTA


def test_adapter_race(fx):
    eager = simulate_adapter(fx["fig5i"], input_wins=0.0)
    assert eager.send("b") == "a"
    # the input was withdrawn; the SUT moved on the output only
    assert eager.observe() == DELTA
    patient = simulate_adapter(fx["fig5i"], input_wins=1.0)
    assert patient.send("b") is None
    assert patient.observe() == "a"


def test_adapter_errors(fx):
    ad = simulate_adapter(fx["fig5i"])
    with pytest.raises(UnknownInput):
        ad.send("a")
    with pytest.raises(NotInputEnabled):
        SimulatedAdapter(fx["fig5e"])


def test_adapter_is_seeded(fx):
    def sample(ad):
        out = []
        for k in range(30):
            out.append(ad.send(["a", "b", "r"][k % 3]))
            out.append(ad.observe())
        return out

    i = fx["fig7is"]
    assert sample(simulate_adapter(i, 4)) == sample(simulate_adapter(i, 4))
    ad = simulate_adapter(i, 4)
    first = sample(ad)
    ad.reset()
    assert ad.resets == 1 and ad.state == i.initial
    again = simulate_adapter(i, 4)
    again.reset()
    assert sample(ad) == sample(again)
    assert first == sample(simulate_adapter(i, 4))


def test_zero_steps(fx):
    log = otf_eco(simulate_adapter(fx["fig5i"]), fx["fig5e"], OtfConfig(max_steps=0))
    assert log.passed and log.events == () and log.lines() == ["PASS"]


def test_config_checks():
    with pytest.raises(ValueError):
        OtfConfig(max_steps=-1)


def test_fig5_eco_fails_and_agrees(fx):
    i, e = fx["fig5i"], fx["fig5e"]
    logs = [otf_eco(simulate_adapter(i, k), e, OtfConfig(seed=k)) for k in range(20)]
    failing = [log for log in logs if not log]
    assert len(failing) >= 10
    assert not decide_eco(i, e)
    for log in failing:
        last = log.events[-1]
        assert last.kind == "observe" and last.label == "a" and last.after == ()
        assert "does not accept a" in log.reason
    # the offline test along the same steps fails too
    t = gen_eco_test(e, i.inputs, i.outputs, GenPolicy(mode="directed", steps=("C>a", "E:r", "C")))
    assert not run_test(t, i)


def test_stop_weight(fx):
    cfg = OtfConfig(max_steps=10**6, weights={"A": 1.0})
    log = otf_eco(simulate_adapter(fx["fig7is"]), fx["fig7ie"], cfg)
    assert log.passed and len(log.events) < 100


def _replays(log, start):
    x = start
    for ev in log.events:
        assert ev.before == x
        x = ev.after
    return x


def test_event_replay(fx):
    i, e = fx["fig5i"], fx["fig5e"]
    for k in range(10):
        log = otf_eco(simulate_adapter(i, k), e, OtfConfig(seed=k))
        _replays(log, after(e, [e.initial]))
        assert log.text() == "\n".join(log.lines()) + "\n"
        assert log.trace() == tuple(ev.label for ev in log.events)


def test_fig7_uioco_fails_on_quiescence(fx):
    i, s = fx["fig7is"], fx["fig7s"]
    for k in range(20):
        log = otf_uioco(simulate_adapter(i, k), s, OtfConfig(seed=k))
        assert not log
        assert log.events[-1].label == DELTA
        assert "b" in log.trace()
        # the tracker only empties at the failing step
        assert log.events[-1].after == ()
        assert all(ev.after for ev in log.events[:-1])
    assert not check_uioco(i, s)


def test_fig7_cioco_passes(fx):
    s, e, i = fx["fig7s"], fx["fig7e"], fx["fig7is"]
    c = compose(s, e)
    for k in range(3):
        log = otf_cioco(simulate_adapter(i, k), s, e, OtfConfig(max_steps=2000, seed=k))
        assert log.passed, log.reason
        # r is never offered: it is not enabled in every state after a
        assert "r" not in log.trace()
        _replays(log, after(c, [c.initial]))
        assert all(ev.after for ev in log.events)


def test_fig9_cioco_fails_fast(fx):
    s, e, i = fx["fig9s"], fx["fig9e"], fx["fig9is"]
    for k in range(1, 21):
        log = otf_cioco(simulate_adapter(i, k), s, e, OtfConfig(seed=k))
        assert not log and len(log.events) <= 2


def test_alphabet_checks(fx):
    with pytest.raises(LtsError):
        otf_uioco(simulate_adapter(fx["fig5i"]), fx["fig7s"])
    with pytest.raises(LtsError):
        otf_cioco(simulate_adapter(fx["fig5i"]), fx["fig7s"], fx["fig7e"])
    with pytest.raises(LtsError):
        # SUT and environment both output a
        otf_eco(simulate_adapter(fx["fig5i"]), fx["fig9s"])


class _Broken:
    """Adapter whose transport dies after a few calls."""

    def __init__(self, i: Lts, calls: int) -> None:
        self.inner = simulate_adapter(i)
        self.calls = calls

    def alphabet(self):
        return self.inner.alphabet()

    def _tick(self):
        self.calls -= 1
        if self.calls < 0:
            raise AdapterError("connection lost")

    def send(self, label):
        self._tick()
        return self.inner.send(label)

    def observe(self, budget=None):
        self._tick()
        return self.inner.observe(budget)

    def reset(self):
        self.inner.reset()


def test_adapter_failure_aborts(fx):
    log = otf_cioco(_Broken(fx["fig7is"], 3), fx["fig7s"], fx["fig7e"], OtfConfig(seed=1))
    assert log.verdict == "ABORT" and len(log.events) == 3
    assert log.reason == "connection lost"
    assert not log


def replay_steps(log, e):
    """Directed test steps that follow the events of an otf_eco run."""
    steps = []
    for ev in log.events:
        if ev.kind == "send":
            steps.append(("B:" if ev.label in e.labels else "E:") + ev.label)
        elif ev.kind == "env":
            steps.append("D:" + ev.label)
        elif ev.label == DELTA:
            steps.append("C")
        elif ev.label not in e.inputs:
            # outputs e does not listen to happen silently offline
            continue
        elif ev.after:
            steps.append("C>" + ev.label)
        else:
            # the failing observation: its FAIL edge hangs off any node
            steps.append("C")
    return tuple(steps)


def _check_agreement(i, e, seeds):
    fails = 0
    for k in seeds:
        log = otf_eco(simulate_adapter(i, k), e, OtfConfig(max_steps=40, seed=k))
        if log.verdict != "FAIL":
            continue
        fails += 1
        t = gen_eco_test(e, i.inputs, i.outputs, GenPolicy(mode="directed", steps=replay_steps(log, e)))
        v = run_test(t, i)
        assert not v
        assert not decide_eco(i, e)
    return fails


def test_fig5_failing_runs_replay_offline(fx):
    assert _check_agreement(fx["fig5i"], fx["fig5e"], range(30)) > 0


@pytest.mark.parametrize("seed", range(40))
def test_failing_runs_replay_offline(seed):
    rng = random.Random(seed)
    (si, su), (ei, eu) = random_alphabets(rng)
    i, e = input_complete(random_lts(rng, si, su)), random_lts(rng, ei, eu)
    _check_agreement(i, e, range(5))


def test_fig3_soundness_long_runs(fx):
    i, e = input_complete(fx["fig3s"]), fx["fig3e"]
    assert decide_eco(i, e)
    for k in range(3):
        assert otf_eco(simulate_adapter(i, k), e, OtfConfig(max_steps=10**4, seed=k))


@pytest.mark.parametrize("seed", range(40))
def test_eco_soundness(seed):
    rng = random.Random(seed)
    (si, su), (ei, eu) = random_alphabets(rng)
    i, e = input_complete(random_lts(rng, si, su)), random_lts(rng, ei, eu)
    if not decide_eco(i, e):
        return
    for k in range(10):
        log = otf_eco(simulate_adapter(i, k), e, OtfConfig(max_steps=60, seed=k))
        assert log.passed, log.reason


@pytest.mark.parametrize("seed", range(40))
def test_uioco_soundness(seed):
    rng = random.Random(seed)
    (si, su), _ = random_alphabets(rng)
    s = random_lts(rng, si, su)
    i = input_complete(mutate(rng, s))
    if not check_uioco(i, s):
        return
    for k in range(10):
        log = otf_uioco(simulate_adapter(i, k), s, OtfConfig(max_steps=60, seed=k))
        assert log.passed, log.reason
