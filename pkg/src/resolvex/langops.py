"""Language-level decisions by on-the-fly subset construction, and enumeration
of the supports that keep the language of an automaton unchanged."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import combinations, product
from typing import Iterator

from .core import Nfa, View, Word, view
from .errors import AlphabetMismatch

MODES = ("empty", "universal", "includes", "equivalent")


@dataclass(frozen=True)
class Relation:
    holds: bool
    counterexample: Word | None = None

    def __bool__(self) -> bool:
        return self.holds


def _align(a: Nfa, b: Nfa) -> dict[int, int]:
    """Map each symbol index of ``a`` to the symbol index of ``b`` with the same name."""
    if set(a.alphabet) != set(b.alphabet):
        raise AlphabetMismatch(f"alphabets differ: {a.alphabet} vs {b.alphabet}")
    return {i: b.symbol_index[s] for i, s in enumerate(a.alphabet)}


def _pair_search(va: View, vb: View, sym_map: dict[int, int], bad) -> Word | None:
    """Breadth-first search over pairs of subsets; returns a shortest word
    reaching a pair for which ``bad(acc_a, acc_b)`` holds."""
    fa, fb = va.nfa.accepting, vb.nfa.accepting
    start = (frozenset({va.nfa.initial}), frozenset({vb.nfa.initial}))
    parent: dict = {start: None}
    todo = deque([start])
    n_sym = len(va.nfa.alphabet)
    while todo:
        pair = todo.popleft()
        x, y = pair
        if bad(bool(x & fa), bool(y & fb)):
            word = []
            while parent[pair] is not None:
                pair, sym = parent[pair]
                word.append(sym)
            return tuple(reversed(word))
        for sym in range(n_sym):
            nxt = (va.step(x, sym), vb.step(y, sym_map[sym]))
            if nxt not in parent:
                parent[nxt] = (pair, sym)
                todo.append(nxt)
    return None


def language_relation(a: Nfa, b: Nfa | None = None, mode: str = "equivalent") -> Relation:
    """Decide a language relation. ``includes`` asks whether L(a) contains L(b).

    A counterexample is a shortest word refuting the relation."""
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode}")
    va = view(a)
    if mode in ("empty", "universal"):
        # pair the automaton with itself; only the first component matters
        want_accept = mode == "empty"
        w = _pair_search(va, va, {i: i for i in range(len(a.alphabet))},
                         lambda x, _: x == want_accept)
        return Relation(w is None, w)
    if b is None:
        raise ValueError(f"mode {mode} needs two automata")
    sym_map = _align(a, b)
    vb = view(b)
    if mode == "includes":
        w = _pair_search(va, vb, sym_map, lambda x, y: y and not x)
    else:
        w = _pair_search(va, vb, sym_map, lambda x, y: x != y)
    return Relation(w is None, w)


def support_included(a: Nfa, s1: frozenset, s2: frozenset) -> Relation:
    """Is L(a restricted to s1) contained in L(a restricted to s2)?"""
    n = len(a.alphabet)
    w = _pair_search(view(a, s1), view(a, s2), {i: i for i in range(n)}, lambda x, y: x and not y)
    return Relation(w is None, w)


def _row_choices(ts: tuple[int, ...]) -> list[frozenset]:
    out = []
    for size in range(len(ts), 0, -1):
        out.extend(frozenset(c) for c in combinations(ts, size))
    return out


def candidate_supports(a: Nfa) -> Iterator[frozenset]:
    """Every transition subset covering each nonempty row; full support first."""
    rows = [view(a).rows[k] for k in sorted(view(a).rows)]
    for choice in product(*(_row_choices(ts) for ts in rows)):
        yield frozenset().union(*choice)


def enumerate_supports(a: Nfa) -> Iterator[frozenset]:
    """Supports whose restriction accepts exactly L(a). Restriction can only
    shrink the language, so one inclusion check suffices."""
    full = a.full_support
    for s in candidate_supports(a):
        if s == full or support_included(a, full, s):
            yield s
