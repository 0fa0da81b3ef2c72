"""Parallel composition of two systems, built over the reachable product only."""

from __future__ import annotations

from collections import deque
from typing import Iterable

from .lts import TAU, Lts, LtsError, StateSet


class NotComposable(LtsError):
    pass


def composable(s: Lts, e: Lts) -> bool:
    return not (s.outputs & e.outputs)


def compose(s: Lts, e: Lts) -> Lts:
    """Reachable part of ``s || e``.

    Labels outside the other side's alphabet (and tau) move one side alone;
    shared labels move both sides together.
    """
    if not composable(s, e):
        clash = ",".join(sorted(s.outputs & e.outputs))
        raise NotComposable(f"both sides output {{{clash}}}")
    ls, le = s.labels, e.labels
    start = (s.initial, e.initial)
    index = {start: 0}
    order = [start]
    trans: set[tuple[int, str, int]] = set()
    todo = deque([start])

    def add(src: int, lab: str, pair: tuple[int, int]) -> None:
        if pair not in index:
            index[pair] = len(order)
            order.append(pair)
            todo.append(pair)
        trans.add((src, lab, index[pair]))

    while todo:
        pair = todo.popleft()
        qs, qe = pair
        me = index[pair]
        ms, me_moves = s.moves(qs), e.moves(qe)
        for lab in sorted(ms):
            if lab == TAU or lab not in le:
                for t in ms[lab]:
                    add(me, lab, (t, qe))
            elif lab in me_moves:
                for t in ms[lab]:
                    for u in me_moves[lab]:
                        add(me, lab, (t, u))
        for lab in sorted(me_moves):
            if lab == TAU or lab not in ls:
                for u in me_moves[lab]:
                    add(me, lab, (qs, u))

    names = tuple(f"({s.names[a]},{e.names[b]})" for a, b in order)
    return Lts(
        names=names,
        inputs=(s.inputs - e.outputs) | (e.inputs - s.outputs),
        outputs=s.outputs | e.outputs,
        transitions=frozenset(trans),
        initial=0,
        name=f"{s.name}||{e.name}" if s.name or e.name else "",
        pairs=tuple(order),
        parts=(s, e),
    )


def collect_tuple(pairs: Iterable[tuple[int, int]]) -> tuple[StateSet, StateSet]:
    pairs = list(pairs)
    return (
        tuple(sorted({a for a, _ in pairs})),
        tuple(sorted({b for _, b in pairs})),
    )


def split(c: Lts, x: Iterable[int]) -> tuple[StateSet, StateSet]:
    """The component state sets (pi_1, pi_2) of a set of composed states."""
    if c.pairs is None:
        raise LtsError("not a composed system")
    return collect_tuple(c.pairs[q] for q in x)
