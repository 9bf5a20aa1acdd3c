"""Degree of ambiguity: unambiguous, finitely ambiguous with exact degree, or
infinitely ambiguous."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import combinations_with_replacement, product

from .core import Nfa, Word, strongly_connected, trim, view
from .errors import DegreeCapExceeded


@dataclass(frozen=True)
class AmbiguityClass:
    kind: str  # "Unambiguous", "Finite" or "Infinite"
    degree: int | None = None
    witness: Word | None = None  # a word with `degree` accepting runs

    def __str__(self) -> str:
        return f"Finite({self.degree})" if self.kind == "Finite" else self.kind

    @property
    def finite(self) -> bool:
        return self.kind != "Infinite"


def _has_eda(a: Nfa) -> bool:
    """Two distinct cycles over the same word at one state: a strongly
    connected part of the self-product holding a diagonal and an off-diagonal pair."""
    v = view(a)
    n = a.n_states
    idx = lambda p, q: p * n + q
    succ = [[] for _ in range(n * n)]
    for (p, x), ps in v.succ.items():
        for q in range(n):
            qs = v.targets(q, x)
            for p2 in ps:
                for q2 in qs:
                    succ[idx(p, q)].append(idx(p2, q2))
    cond = strongly_connected(n * n, succ)
    for i, comp in enumerate(cond.components):
        if not cond.cyclic[i]:
            continue
        diag = any(c // n == c % n for c in comp)
        off = any(c // n != c % n for c in comp)
        if diag and off:
            return True
    return False


def _has_ida(a: Nfa) -> bool:
    """States p != q and a word v with p -v-> p, p -v-> q and q -v-> q."""
    v = view(a)
    n = a.n_states
    letters = range(len(a.alphabet))

    def step(t, x):
        ps, qs, rs = (v.targets(s, x) for s in t)
        return product(ps, qs, rs)

    for p in range(n):
        for q in range(n):
            if p == q:
                continue
            start, goal = (p, p, q), (p, q, q)
            seen = {start}
            todo = deque([start])
            found = False
            while todo and not found:
                t = todo.popleft()
                for x in letters:
                    for u in step(t, x):
                        if u == goal:
                            found = True
                            break
                        if u not in seen:
                            seen.add(u)
                            todo.append(u)
                    if found:
                        break
            if found:
                return True
    return False


def has_m_distinct_runs(a: Nfa, m: int) -> Word | None:
    """Shortest word with at least ``m`` pairwise distinct accepting runs.

    Tuples are kept in lexicographic order of run prefixes: members of one
    block share their whole prefix so far, and a block splitting on a letter
    assigns successors in nondecreasing order. This removes the m! symmetric
    copies of every tuple."""
    v = view(a)
    start = ((a.initial,) * m, (m,))
    parent = {start: None}
    todo = deque([start])
    while todo:
        node = todo.popleft()
        states, blocks = node
        if len(blocks) == m and all(q in a.accepting for q in states):
            word = []
            while parent[node] is not None:
                node, x = parent[node]
                word.append(x)
            return tuple(reversed(word))
        for x in range(len(a.alphabet)):
            options = []
            pos = 0
            for size in blocks:
                targets = sorted(v.targets(states[pos], x))
                if not targets:
                    options = None
                    break
                options.append(list(combinations_with_replacement(targets, size)))
                pos += size
            if options is None:
                continue
            for choice in product(*options):
                new_states = tuple(q for part in choice for q in part)
                new_blocks = []
                for part in choice:
                    count = 1
                    for i in range(1, len(part)):
                        if part[i] == part[i - 1]:
                            count += 1
                        else:
                            new_blocks.append(count)
                            count = 1
                    new_blocks.append(count)
                nxt = (new_states, tuple(new_blocks))
                if nxt not in parent:
                    parent[nxt] = (node, x)
                    todo.append(nxt)
    return None


def is_infinitely_ambiguous(a: Nfa) -> bool:
    a = trim(a)
    return _has_eda(a) or _has_ida(a)


def classify_ambiguity(a: Nfa, degree_cap: int = 8) -> AmbiguityClass:
    a = trim(a)
    if not a.accepting:
        return AmbiguityClass("Unambiguous", 1)
    if _has_eda(a) or _has_ida(a):
        return AmbiguityClass("Infinite")
    best = has_m_distinct_runs(a, 1)
    degree = 1
    m = 2
    while True:
        w = has_m_distinct_runs(a, m)
        if w is None:
            break
        if m > degree_cap:
            raise DegreeCapExceeded(f"ambiguity degree exceeds {degree_cap}")
        degree, best = m, w
        m += 1
    if degree == 1:
        return AmbiguityClass("Unambiguous", 1, best)
    return AmbiguityClass("Finite", degree, best)


def is_unambiguous(a: Nfa) -> bool:
    a = trim(a)
    return not a.accepting or has_m_distinct_runs(a, 2) is None
