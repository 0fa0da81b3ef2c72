import random
from itertools import product

import pytest

from compotest.composition import NotComposable, collect_tuple, compose, composable, split
from compotest.lts import DELTA, TAU, Lts, project
from oracles import isomorphic_by, naive_after, traces
from randsys import random_lts


def test_composable_examples(fx):
    assert composable(fx["fig3s"], fx["fig3e"])
    x1 = Lts.build([], ["x"], [], "1")
    x2 = Lts.build([], ["x"], [], "A")
    assert not composable(x1, x2)
    listener = Lts.build(["x"], [], [], "A")
    assert composable(x1, listener)
    with pytest.raises(NotComposable):
        compose(x1, x2)


def test_fig9_composition_deadlocks(fx):
    c = compose(fx["fig9s"], fx["fig9e"])
    assert c.names == ("(1,A)",)
    assert not c.transitions


def test_fig3_composition_cycle(fx):
    c = compose(fx["fig3s"], fx["fig3e"])
    named = {(c.names[a], lab, c.names[b]) for a, lab, b in c.transitions}
    assert named == {("(1,A)", "a", "(2,B)"), ("(2,B)", TAU, "(2,C)"), ("(2,C)", "b", "(1,A)")}
    assert c.inputs == frozenset() and c.outputs == {"a", "b"}


def test_disjoint_alphabets_interleave():
    rng = random.Random(5)
    s = random_lts(rng, {"i"}, {"o"}, n_states=3, density=0.8)
    e = random_lts(rng, {"j"}, {"p"}, n_states=3, density=0.8)
    c = compose(s, e)
    # the reachable product of two independent systems is the product of reachable parts
    reach_s = set().union(*(naive_after(s, [s.initial], t) for t in traces(s, 4)))
    reach_e = set().union(*(naive_after(e, [e.initial], t) for t in traces(e, 4)))
    assert set(c.pairs) == set(product(reach_s, reach_e))


def test_collect_tuple_examples():
    assert collect_tuple({(1, "A"), (2, "B")}) == ((1, 2), ("A", "B"))
    assert collect_tuple(set()) == ((), ())
    assert collect_tuple({(1, "A"), (1, "B")}) == ((1,), ("A", "B"))


def test_split(fx):
    c = compose(fx["fig3s"], fx["fig3e"])
    xs, xe = split(c, c.states)
    assert xs == (0, 1) and xe == (0, 1, 2)


def _triple(rng):
    pool = ["a", "b", "c", "d", "f"]
    owner = {lab: rng.randrange(3) for lab in pool}
    systems = []
    for k in range(3):
        outs = {lab for lab in pool if owner[lab] == k and rng.random() < 0.7}
        ins = {lab for lab in pool if owner[lab] != k and rng.random() < 0.5}
        systems.append(random_lts(rng, ins, outs, n_states=rng.randint(1, 3), tau_p=0.2))
    return systems


@pytest.mark.parametrize("seed", range(40))
def test_commutative_and_associative(seed):
    a, b, c = _triple(random.Random(seed))
    ab, ba = compose(a, b), compose(b, a)
    swap = {q: ba.pairs.index((y, x)) for q, (x, y) in enumerate(ab.pairs)}
    assert isomorphic_by(ab, ba, swap)
    left, right = compose(ab, c), compose(a, compose(b, c))
    inner_l, inner_r = left.parts[0], right.parts[1]
    assoc = {}
    for q, (xy, z) in enumerate(left.pairs):
        x, y = inner_l.pairs[xy]
        assoc[q] = right.pairs.index((x, inner_r.pairs.index((y, z))))
    assert isomorphic_by(left, right, assoc)


@pytest.mark.parametrize("seed", range(40))
def test_label_partition(seed):
    a, b, _ = _triple(random.Random(seed))
    c = compose(a, b)
    # every label ends up as output iff someone outputs it, input otherwise
    assert c.outputs == a.outputs | b.outputs
    assert c.inputs == (a.labels | b.labels) - c.outputs
    assert not c.inputs & c.outputs


def _projection_lemma(s, e, depth, with_delta):
    c = compose(s, e)
    alphabet = sorted(c.labels | ({DELTA} if with_delta else set()))
    for n in range(depth + 1):
        for t in product(alphabet, repeat=n):
            for q in c.states:
                qs, qe = c.pairs[q]
                got = {c.pairs[p] for p in naive_after(c, [q], t)}
                ts = project(t, s.labels | {DELTA})
                te = project(t, e.labels | {DELTA})
                want = set(product(naive_after(s, [qs], ts), naive_after(e, [qe], te)))
                assert got == want, (t, c.names[q])


@pytest.mark.parametrize("pair", [("fig3s", "fig3e"), ("fig7s", "fig7e"), ("fig9s", "fig9e")])
def test_projection_lemma_without_delta(fx, pair):
    _projection_lemma(fx[pair[0]], fx[pair[1]], 5 if pair[0] != "fig7s" else 4, with_delta=False)


@pytest.mark.parametrize("pair", [("fig5i", "fig9ie"), ("fig7is", "fig7ie")])
def test_projection_lemma_input_enabled(fx, pair):
    _projection_lemma(fx[pair[0]], fx[pair[1]], 4, with_delta=True)
