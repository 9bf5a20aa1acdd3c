"""Automaton data model and structural utilities.

States and symbols are addressed by dense indices internally; names are kept
only for I/O. A missing (state, letter) row means the word is rejected there,
so automata never need to be completed explicitly.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

Transition = tuple[int, int, int]
Word = tuple[int, ...]
Run = tuple[int, ...]
Support = frozenset


@dataclass(frozen=True)
class Nfa:
    alphabet: tuple[str, ...]
    states: tuple[str, ...]
    initial: int
    accepting: frozenset
    transitions: tuple[Transition, ...]
    name: str = "A"

    def __post_init__(self):
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "accepting", frozenset(self.accepting))
        object.__setattr__(self, "transitions", tuple(tuple(t) for t in self.transitions))
        if len(set(self.alphabet)) != len(self.alphabet):
            raise ValueError("duplicate alphabet symbol")
        if len(set(self.states)) != len(self.states):
            raise ValueError("duplicate state name")
        n, m = len(self.states), len(self.alphabet)
        if not 0 <= self.initial < n:
            raise ValueError("initial state out of range")
        if any(not 0 <= q < n for q in self.accepting):
            raise ValueError("accepting state out of range")
        for p, a, q in self.transitions:
            if not (0 <= p < n and 0 <= q < n and 0 <= a < m):
                raise ValueError(f"transition {(p, a, q)} out of range")
        if len(set(self.transitions)) != len(self.transitions):
            raise ValueError("duplicate transition")

    @property
    def n_states(self) -> int:
        return len(self.states)

    @property
    def full_support(self) -> frozenset:
        return frozenset(range(len(self.transitions)))

    @cached_property
    def state_index(self) -> dict[str, int]:
        return {s: i for i, s in enumerate(self.states)}

    @cached_property
    def symbol_index(self) -> dict[str, int]:
        return {s: i for i, s in enumerate(self.alphabet)}

    def transition_index(self, src: str, sym: str, dst: str) -> int:
        key = (self.state_index[src], self.symbol_index[sym], self.state_index[dst])
        return self.transitions.index(key)

    def describe(self, t: int) -> str:
        p, a, q = self.transitions[t]
        return f"{self.states[p]} -{self.alphabet[a]}-> {self.states[q]}"

    def restrict(self, s: Iterable[int]) -> "Nfa":
        """Sub-automaton keeping the transitions in ``s`` (in host order)."""
        keep = sorted(set(s))
        return Nfa(self.alphabet, self.states, self.initial, self.accepting,
                   tuple(self.transitions[t] for t in keep), self.name)

    def is_deterministic(self) -> bool:
        return all(len(ts) == 1 for ts in view(self).rows.values())


class View:
    """An automaton seen through a support: rows, successor maps, nondeterminism."""

    def __init__(self, a: Nfa, s: frozenset | None = None):
        self.nfa = a
        self.support = a.full_support if s is None else frozenset(s)
        rows: dict[tuple[int, int], list[int]] = {}
        for t in sorted(self.support):
            p, sym, _ = a.transitions[t]
            rows.setdefault((p, sym), []).append(t)
        self.rows = {k: tuple(v) for k, v in rows.items()}
        self.nondet = frozenset(t for ts in self.rows.values() if len(ts) > 1 for t in ts)
        self.succ = {k: frozenset(a.transitions[t][2] for t in ts) for k, ts in self.rows.items()}
        self.pred: dict[tuple[int, int], frozenset] = {}
        tmp: dict[tuple[int, int], set] = {}
        for t in self.support:
            p, sym, q = a.transitions[t]
            tmp.setdefault((q, sym), set()).add(p)
        self.pred = {k: frozenset(v) for k, v in tmp.items()}

    def row(self, p: int, sym: int) -> tuple[int, ...]:
        return self.rows.get((p, sym), ())

    def targets(self, p: int, sym: int) -> frozenset:
        return self.succ.get((p, sym), frozenset())

    def step(self, states: Iterable[int], sym: int) -> frozenset:
        out: set[int] = set()
        for p in states:
            out |= self.targets(p, sym)
        return frozenset(out)

    def back(self, states: Iterable[int], sym: int) -> frozenset:
        out: set[int] = set()
        for q in states:
            out |= self.pred.get((q, sym), frozenset())
        return frozenset(out)

    def forward_sets(self, w: Sequence[int]) -> list[frozenset]:
        cur = frozenset({self.nfa.initial})
        out = [cur]
        for sym in w:
            cur = self.step(cur, sym)
            out.append(cur)
        return out

    def coaccepting_sets(self, w: Sequence[int]) -> list[frozenset]:
        """co[i] = states from which the suffix w[i:] is accepted."""
        cur = frozenset(self.nfa.accepting)
        out = [cur]
        for sym in reversed(w):
            cur = self.back(cur, sym)
            out.append(cur)
        out.reverse()
        return out

    def accepts(self, w: Sequence[int]) -> bool:
        return bool(self.forward_sets(w)[-1] & self.nfa.accepting)

    def successors(self, p: int) -> set[int]:
        return {self.nfa.transitions[t][2] for (q, _), ts in self.rows.items() if q == p for t in ts}

    @cached_property
    def graph(self) -> list[list[int]]:
        adj = [set() for _ in range(self.nfa.n_states)]
        for t in self.support:
            p, _, q = self.nfa.transitions[t]
            adj[p].add(q)
        return [sorted(x) for x in adj]


@lru_cache(maxsize=4096)
def view(a: Nfa, s: frozenset | None = None) -> View:
    return View(a, s)


def normalize_support(a: Nfa, s: Iterable[int] | None) -> frozenset:
    return a.full_support if s is None else frozenset(s)


def is_valid_support(a: Nfa, s: frozenset) -> bool:
    """Every (state, letter) row of the host keeps at least one transition."""
    covered = {(a.transitions[t][0], a.transitions[t][1]) for t in s}
    return s <= a.full_support and covered == set(view(a).rows)


# --- words -----------------------------------------------------------------

def parse_word(a: Nfa, text: str) -> Word:
    """Read a word. Symbols may be written back to back when all are one
    character long; otherwise separate them with spaces or commas."""
    text = text.strip()
    if text in ("", "ε", "eps", "-"):
        return ()
    idx = a.symbol_index
    if any(c in text for c in " ,"):
        tokens = text.replace(",", " ").split()
        if all(t in idx for t in tokens):
            return tuple(idx[t] for t in tokens)
    if text in idx:
        return (idx[text],)
    if all(c in idx for c in text):
        return tuple(idx[c] for c in text)
    raise ValueError(f"cannot read word {text!r} over alphabet {' '.join(a.alphabet)}")


def format_word(a: Nfa, w: Sequence[int]) -> str:
    if all(len(s) == 1 for s in a.alphabet):
        return "".join(a.alphabet[x] for x in w)
    return " ".join(a.alphabet[x] for x in w)


def all_words(n_letters: int, max_len: int, min_len: int = 0):
    from itertools import product
    for length in range(min_len, max_len + 1):
        yield from product(range(n_letters), repeat=length)


# --- runs ------------------------------------------------------------------

def accepting_runs(a: Nfa, w: Sequence[int], s: frozenset | None = None) -> list[Run]:
    """All accepting runs of ``w`` as transition-index tuples, in
    lexicographic order of their state sequences."""
    v = view(a, s)
    w = tuple(w)
    co = v.coaccepting_sets(w)
    if a.initial not in co[0]:
        return []
    runs: list[Run] = []

    def extend(i: int, p: int, acc: list[int]):
        if i == len(w):
            runs.append(tuple(acc))
            return
        for t in sorted(v.row(p, w[i]), key=lambda t: a.transitions[t][2]):
            q = a.transitions[t][2]
            if q in co[i + 1]:
                acc.append(t)
                extend(i + 1, q, acc)
                acc.pop()

    extend(0, a.initial, [])
    return runs


def run_states(a: Nfa, run: Run) -> tuple[int, ...]:
    if not run:
        return (a.initial,)
    return (a.transitions[run[0]][0],) + tuple(a.transitions[t][2] for t in run)


def count_accepting_runs(a: Nfa, w: Sequence[int], s: frozenset | None = None) -> int:
    v = view(a, s)
    counts = {a.initial: 1}
    for sym in w:
        nxt: dict[int, int] = {}
        for p, c in counts.items():
            for q in v.targets(p, sym):
                nxt[q] = nxt.get(q, 0) + c
        counts = nxt
    return sum(c for q, c in counts.items() if q in a.accepting)


# --- structure -------------------------------------------------------------

def reachable(a: Nfa, s: frozenset | None = None) -> set[int]:
    g = view(a, s).graph
    seen = {a.initial}
    todo = deque([a.initial])
    while todo:
        p = todo.popleft()
        for q in g[p]:
            if q not in seen:
                seen.add(q)
                todo.append(q)
    return seen


def productive(a: Nfa, s: frozenset | None = None) -> set[int]:
    g = view(a, s).graph
    rev = [[] for _ in range(a.n_states)]
    for p, qs in enumerate(g):
        for q in qs:
            rev[q].append(p)
    seen = set(a.accepting)
    todo = deque(seen)
    while todo:
        q = todo.popleft()
        for p in rev[q]:
            if p not in seen:
                seen.add(p)
                todo.append(p)
    return seen


def trim(a: Nfa) -> Nfa:
    """Keep exactly the reachable and productive states."""
    useful = reachable(a) & productive(a)
    if a.initial not in useful:
        return Nfa(a.alphabet, (a.states[a.initial],), 0, frozenset(), (), a.name)
    keep = sorted(useful)
    new = {q: i for i, q in enumerate(keep)}
    trans = tuple((new[p], x, new[q]) for p, x, q in a.transitions if p in new and q in new)
    return Nfa(a.alphabet, tuple(a.states[q] for q in keep), new[a.initial],
               frozenset(new[q] for q in a.accepting if q in new), trans, a.name)


def is_trim(a: Nfa) -> bool:
    return len(reachable(a) & productive(a)) == a.n_states


@dataclass(frozen=True)
class Condensation:
    components: tuple[tuple[int, ...], ...]  # topological order, sources first
    comp_of: tuple[int, ...]
    edges: frozenset  # pairs (i, j) of component indices, i != j
    cyclic: tuple[bool, ...]  # component carries at least one internal edge
    bottom: tuple[bool, ...] = field(default=())

    def successors(self, c: int) -> list[int]:
        return sorted(j for i, j in self.edges if i == c)


def strongly_connected(n: int, succ: Sequence[Iterable[int]]) -> Condensation:
    """Tarjan's algorithm, iterative. Components are returned in topological
    order of the condensation."""
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    comps: list[tuple[int, ...]] = []
    counter = 0
    adj = [list(s) for s in succ]
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, i = work[-1]
            if i < len(adj[v]):
                work[-1] = (v, i + 1)
                u = adj[v][i]
                if index[u] == -1:
                    index[u] = low[u] = counter
                    counter += 1
                    stack.append(u)
                    on_stack[u] = True
                    work.append((u, 0))
                elif on_stack[u]:
                    low[v] = min(low[v], index[u])
            else:
                work.pop()
                if work:
                    low[work[-1][0]] = min(low[work[-1][0]], low[v])
                if low[v] == index[v]:
                    comp = []
                    while True:
                        u = stack.pop()
                        on_stack[u] = False
                        comp.append(u)
                        if u == v:
                            break
                    comps.append(tuple(sorted(comp)))
    comps.reverse()
    comp_of = [0] * n
    for i, c in enumerate(comps):
        for v in c:
            comp_of[v] = i
    edges = set()
    cyclic = [False] * len(comps)
    for v in range(n):
        for u in adj[v]:
            if comp_of[u] == comp_of[v]:
                cyclic[comp_of[v]] = True
            else:
                edges.add((comp_of[v], comp_of[u]))
    has_out = {i for i, _ in edges}
    bottom = tuple(i not in has_out for i in range(len(comps)))
    return Condensation(tuple(comps), tuple(comp_of), frozenset(edges), tuple(cyclic), bottom)


def scc_decompose(a: Nfa, s: frozenset | None = None) -> Condensation:
    return strongly_connected(a.n_states, view(a, s).graph)


def closed_bottom_states(a: Nfa, s: frozenset | None = None) -> set[int]:
    """States in a bottom component that keeps all mass: a cyclic component
    with no exits in which every state has a successor (a state with an empty
    row leaks to the implicit sink)."""
    cond = scc_decompose(a, s)
    g = view(a, s).graph
    out = set()
    for i, comp in enumerate(cond.components):
        if cond.bottom[i] and cond.cyclic[i] and all(g[q] for q in comp):
            out.update(comp)
    return out


def shortest_word(a: Nfa, sources: Iterable[int], targets: Iterable[int],
                  s: frozenset | None = None) -> tuple[Word, int] | None:
    """Shortest word leading from some source to some target state, with the
    target reached. Ties are broken by letter order."""
    v = view(a, s)
    goal = set(targets)
    parent: dict[int, tuple[int, int] | None] = {}
    todo = deque()
    for p in sorted(set(sources)):
        parent[p] = None
        todo.append(p)
    while todo:
        p = todo.popleft()
        if p in goal:
            word = []
            end = p
            while parent[p] is not None:
                p, x = parent[p]
                word.append(x)
            return tuple(reversed(word)), end
        for x in range(len(a.alphabet)):
            for q in sorted(v.targets(p, x)):
                if q not in parent:
                    parent[q] = (p, x)
                    todo.append(q)
    return None
