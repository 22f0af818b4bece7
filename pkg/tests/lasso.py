"""Bounded lasso-word model checking, used as an independent oracle.

Evaluates NNF LTL formulas over every ultimately periodic word u.v^omega
with |u|+|v| <= bound over a single proposition.  Disagreement anywhere
proves two formulas inequivalent; agreement on the full bounded family is
the evidence the suite's soundness checks ask for.  All satisfaction sets
are computed as one boolean matrix (word x position) per subformula, with
fixpoints iterated to convergence, so whole enumeration layers stay cheap.
"""
from __future__ import annotations

import numpy as np

from pltl_learn.ltl import (
    And,
    Finally,
    Globally,
    Lit,
    LtlFormula,
    Next,
    Or,
    Until,
    print_ltl,
)


def all_words(bound: int) -> list[tuple[tuple[int, ...], int]]:
    """Every (bits, loop_start) with 1 <= len(bits) <= bound.

    Position i carries bit i; the successor of the last position is
    loop_start.  For bound 8 this is 3586 words.
    """
    words = []
    for n in range(1, bound + 1):
        for loop in range(n):
            for mask in range(1 << n):
                bits = tuple((mask >> i) & 1 for i in range(n))
                words.append((bits, loop))
    return words


class LassoChecker:
    def __init__(self, bound: int = 8, prop: str = "p"):
        self.prop = prop
        self.words = all_words(bound)
        w = len(self.words)
        self.width = bound
        bits = np.zeros((w, bound), dtype=bool)
        succ = np.zeros((w, bound), dtype=np.int64)
        for i, (bs, loop) in enumerate(self.words):
            n = len(bs)
            for j in range(n):
                bits[i, j] = bool(bs[j])
                succ[i, j] = j + 1 if j + 1 < n else loop
            for j in range(n, bound):
                succ[i, j] = j  # padding, never reached from position 0
        self.bits = bits
        self.succ = succ
        self.rows = np.arange(w)[:, None]
        # Fixpoints stabilize in at most `bound` steps; double for slack.
        self.iters = 2 * bound
        self._cache: dict[str, np.ndarray] = {}

    def _step(self, sat: np.ndarray) -> np.ndarray:
        return sat[self.rows, self.succ]

    def sat(self, f: LtlFormula) -> np.ndarray:
        """Word x position satisfaction matrix for f."""
        key = print_ltl(f)
        got = self._cache.get(key)
        if got is not None:
            return got
        if isinstance(f, Lit):
            if f.name != self.prop:
                raise ValueError(f"single-proposition checker, got {f.name!r}")
            out = self.bits if f.positive else ~self.bits
        elif isinstance(f, And):
            out = self.sat(f.left) & self.sat(f.right)
        elif isinstance(f, Or):
            out = self.sat(f.left) | self.sat(f.right)
        elif isinstance(f, Next):
            out = self._step(self.sat(f.child))
        elif isinstance(f, Finally):
            child = self.sat(f.child)
            out = child.copy()
            for _ in range(self.iters):
                out = child | self._step(out)
        elif isinstance(f, Globally):
            child = self.sat(f.child)
            out = child.copy()
            for _ in range(self.iters):
                out = child & self._step(out)
        elif isinstance(f, Until):
            a, b = self.sat(f.left), self.sat(f.right)
            out = b.copy()
            for _ in range(self.iters):
                out = b | (a & self._step(out))
        else:
            raise TypeError(f"unknown node {f!r}")
        self._cache[key] = out
        return out

    def signature(self, f: LtlFormula) -> bytes:
        """Satisfaction at position zero across all words, as bytes."""
        return self.sat(f)[:, 0].tobytes()

    def is_constant(self, f: LtlFormula) -> bool:
        col = self.sat(f)[:, 0]
        return bool(col.all() or not col.any())


_shared: LassoChecker | None = None


def checker() -> LassoChecker:
    """Process-wide checker so subformula matrices are shared by tests."""
    global _shared
    if _shared is None:
        _shared = LassoChecker(8)
    return _shared


def all_syntactic(max_size: int, max_depth: int | None = None, prop: str = "p"):
    """Every raw NNF formula over one proposition, grouped by size.

    No pruning and no canonicalization: this is the full grammar, the
    reference universe that enumeration-soundness tests compare against.
    """
    by_size: dict[int, list[LtlFormula]] = {
        1: [Lit(prop, True), Lit(prop, False)]
    }
    for n in range(2, max_size + 1):
        layer: list[LtlFormula] = []
        for child in by_size[n - 1]:
            layer += [Next(child), Finally(child), Globally(child)]
        for k in range(1, n - 1):
            for left in by_size[k]:
                for right in by_size[n - 1 - k]:
                    layer += [And(left, right), Or(left, right), Until(left, right)]
        by_size[n] = layer
    if max_depth is not None:
        by_size = {
            n: [f for f in layer if f.depth <= max_depth]
            for n, layer in by_size.items()
        }
    return by_size
