"""Random chain generation and refinement-free probability oracles.

The random chains use transition masses that are multiples of 1/64, so
row sums are exactly 1.0 in floating point and validation never trips on
generator dust.  The oracles compose only graph passes and single linear
solves (until_prob / next_prob / BSCC characterizations); none of them
touch the prophecy-refinement path they are used to judge.
"""
from __future__ import annotations

import random

import numpy as np

from pltl_learn.dtmc import Dtmc
from pltl_learn.engine import fg_oracle, gf_oracle, next_prob, until_prob


def _masses(rng: random.Random, k: int) -> list[float]:
    """k positive multiples of 1/64 summing to exactly 1.0."""
    cuts = sorted(rng.sample(range(1, 64), k - 1)) if k > 1 else []
    bounds = [0, *cuts, 64]
    return [(b - a) / 64.0 for a, b in zip(bounds, bounds[1:])]


def random_chain(rng: random.Random, max_states: int = 20, ap=("a", "b")) -> Dtmc:
    n = rng.randint(1, max_states)
    labels = [
        frozenset(p for p in ap if rng.random() < 0.35) for _ in range(n)
    ]
    edges = []
    for s in range(n):
        k = rng.randint(1, min(3, n))
        for t, q in zip(rng.sample(range(n), k), _masses(rng, k)):
            edges.append((s, t, q))
    return Dtmc(
        n_states=n,
        init=rng.randrange(n),
        ap=tuple(ap),
        labels=tuple(labels),
        transitions=tuple(edges),
    )


def _true(_s: int) -> bool:
    return True


def f_prob(m: Dtmc, prop: str) -> list[float]:
    return until_prob(m, _true, prop)


def g_prob(m: Dtmc, prop: str) -> list[float]:
    bad = lambda s: prop not in m.labels[s]
    return [1.0 - v for v in until_prob(m, _true, bad)]


def xx_prob(m: Dtmc, prop: str) -> list[float]:
    one = np.array(next_prob(m, prop))
    return list(m.matrix @ one)


def seq_prob(m: Dtmc, first: str, second: str) -> list[float]:
    """Pr of seeing `first` and then (possibly simultaneously) `second`.

    Product chain over a seen-`first` flag: copy s of the original state
    space keeps the flag false, copy n_states+s keeps it true; the target
    is any flagged `second` state.  Entry from state s starts with the
    flag already reflecting s's own label.
    """
    n = m.n_states

    def pid(s: int, seen: bool) -> int:
        return s + (n if seen else 0)

    edges = []
    for s in range(n):
        for t, q in m.rows[s]:
            hit = first in m.labels[t]
            edges.append((pid(s, False), pid(t, hit), q))
            edges.append((pid(s, True), pid(t, True), q))
    labels = [frozenset()] * n + [
        frozenset({"hit"}) if second in m.labels[s] else frozenset()
        for s in range(n)
    ]
    prod = Dtmc(
        n_states=2 * n,
        init=pid(m.init, first in m.labels[m.init]),
        ap=("hit",),
        labels=tuple(labels),
        transitions=tuple(edges),
    )
    full = until_prob(prod, _true, "hit")
    return [full[pid(s, first in m.labels[s])] for s in range(n)]


def oracle_suite(m: Dtmc) -> dict[str, list[float]]:
    """The ten reference vectors the engine must reproduce."""
    no_h = lambda s: "h" not in m.labels[s]
    h = lambda s: "h" in m.labels[s]
    return {
        "F(a)": f_prob(m, "a"),
        "G(a)": g_prob(m, "a"),
        "X(a)": next_prob(m, "a"),
        "(a U b)": until_prob(m, "a", "b"),
        "G(F(a))": gf_oracle(m, "a"),
        "F(G(a))": fg_oracle(m, "a"),
        "F(a & F(b))": seq_prob(m, "a", "b"),
        "X(X(a))": xx_prob(m, "a"),
        "(!h U a)": until_prob(m, no_h, "a"),
        "G(!h)": [1.0 - v for v in until_prob(m, _true, h)],
    }
