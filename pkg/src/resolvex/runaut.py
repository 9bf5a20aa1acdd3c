"""The run automaton: tuples of simultaneous accepting runs plus the set of
reached states that can no longer accept.

Only transitions consistent with a nice run are built: after each prefix the
tuple holds exactly the reached states that still have an accepting
continuation, and ``rejected`` holds the other reached states. States also
record how the tuple splits into blocks of components sharing the same run
prefix, which lets every step check that all accepting runs are tracked.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

from .core import Nfa, Run, Word, accepting_runs, run_states, strongly_connected, view
from .errors import StateBudgetExceeded


@dataclass(frozen=True)
class GammaState:
    tuple: tuple[int, ...]
    rejected: frozenset
    blocks: tuple[int, ...]  # sizes of runs of equal-prefix components

    def __repr__(self) -> str:
        return f"(({','.join(map(str, self.tuple))}),{{{','.join(map(str, sorted(self.rejected)))}}})"

    def label(self, a: Nfa) -> str:
        tup = ",".join(a.states[q] for q in self.tuple)
        rej = ",".join(a.states[q] for q in sorted(self.rejected))
        return f"(({tup}),{{{rej}}})"


@dataclass
class RunAutomaton:
    nfa: Nfa
    support: frozenset
    k: int
    states: list[GammaState]
    index: dict[GammaState, int]
    edges: list[tuple[int, int, int, tuple[int, ...]]]  # src, letter, dst, component transitions
    final: set[int]
    out: list[list[int]] = field(default_factory=list)  # edge ids per source

    @property
    def initial(self) -> int:
        return 0

    def _graph(self) -> list[list[int]]:
        succ = [[] for _ in self.states]
        for src, _, dst, _ in self.edges:
            succ[src].append(dst)
        return succ

    def useful(self) -> set[int]:
        """States lying on some path from the initial state to a final state."""
        rev = [[] for _ in self.states]
        for src, _, dst, _ in self.edges:
            rev[dst].append(src)
        seen = set(self.final)
        todo = deque(seen)
        while todo:
            x = todo.popleft()
            for y in rev[x]:
                if y not in seen:
                    seen.add(y)
                    todo.append(y)
        return seen

    def diminishable(self) -> list[frozenset]:
        """Per state, the component indices that take a nondeterministic step
        on some cycle through that state."""
        cond = strongly_connected(len(self.states), self._graph())
        nondet = view(self.nfa, self.support).nondet
        per_comp = [set() for _ in cond.components]
        for src, _, dst, comps in self.edges:
            c = cond.comp_of[src]
            if cond.comp_of[dst] == c:
                per_comp[c].update(j for j, t in enumerate(comps) if t in nondet)
        return [frozenset(per_comp[cond.comp_of[i]]) for i in range(len(self.states))]

    def has_cycle(self) -> bool:
        cond = strongly_connected(len(self.states), self._graph())
        return any(cond.cyclic)


def _compositions(n: int, m: int):
    """Ways to write n as an ordered sum of m positive parts."""
    for cuts in combinations(range(1, n), m - 1):
        bounds = (0,) + cuts + (n,)
        yield tuple(bounds[i + 1] - bounds[i] for i in range(m))


def gamma_successors(a: Nfa, s: frozenset, g: GammaState):
    """Yield (letter, successor, component transitions) for nice-run-consistent steps."""
    v = view(a, s)
    tup, rej, blocks = g.tuple, g.rejected, g.blocks
    tset = set(tup)
    starts = []
    pos = 0
    for size in blocks:
        starts.append(pos)
        pos += size
    for x in range(len(a.alphabet)):
        from_rej = v.step(rej, x)
        from_tup = v.step(tset, x)
        cand = sorted(from_tup - from_rej)
        everything = from_rej | from_tup
        for r in range(1, len(cand) + 1):
            for chosen in combinations(cand, r):
                tnew = frozenset(chosen)
                per_block = []
                ok = True
                covered = set()
                for b, size in enumerate(blocks):
                    c = sorted(v.targets(tup[starts[b]], x) & tnew)
                    if not c or len(c) > size:
                        ok = False
                        break
                    per_block.append(c)
                    covered.update(c)
                if not ok or covered != tnew:
                    continue
                new_rej = everything - tnew
                # distribute members of each block over its chosen successors
                options = [list(_compositions(size, len(c))) for size, c in zip(blocks, per_block)]
                for combo in _product(options):
                    new_tup, new_blocks, comps = [], [], []
                    for b, parts in enumerate(combo):
                        src = tup[starts[b]]
                        for q, count in zip(per_block[b], parts):
                            t = _transition(v, src, x, q)
                            new_tup.extend([q] * count)
                            comps.extend([t] * count)
                        new_blocks.extend(parts)
                    yield x, GammaState(tuple(new_tup), new_rej, tuple(new_blocks)), tuple(comps)


def _product(options):
    if not options:
        yield ()
        return
    first, rest = options[0], options[1:]
    for x in first:
        for tail in _product(rest):
            yield (x,) + tail


def _transition(v, p: int, x: int, q: int) -> int:
    for t in v.row(p, x):
        if v.nfa.transitions[t][2] == q:
            return t
    raise KeyError((p, x, q))


def initial_gamma_state(a: Nfa, k: int) -> GammaState:
    return GammaState((a.initial,) * k, frozenset(), (k,))


def is_final(a: Nfa, g: GammaState) -> bool:
    return all(q in a.accepting for q in g.tuple) and not (g.rejected & a.accepting)


def build_run_automaton(a: Nfa, s: frozenset | None, k: int, budget: int = 10 ** 6) -> RunAutomaton:
    s = a.full_support if s is None else frozenset(s)
    start = initial_gamma_state(a, k)
    states = [start]
    index = {start: 0}
    edges = []
    out: list[list[int]] = [[]]
    todo = deque([0])
    while todo:
        i = todo.popleft()
        for x, nxt, comps in gamma_successors(a, s, states[i]):
            j = index.get(nxt)
            if j is None:
                if len(states) >= budget:
                    raise StateBudgetExceeded(f"run automaton exceeds {budget} states")
                j = len(states)
                index[nxt] = j
                states.append(nxt)
                out.append([])
                todo.append(j)
            out[i].append(len(edges))
            edges.append((i, x, j, comps))
    final = {i for i, g in enumerate(states) if is_final(a, g)}
    return RunAutomaton(a, s, k, states, index, edges, final, out)


@dataclass(frozen=True)
class NiceRun:
    word: Word
    states: tuple[GammaState, ...]
    run_components: tuple[Run, ...]
    distinct: int  # number of distinct accepting runs before padding


def nice_run(a: Nfa, s: frozenset | None, w: Sequence[int], k: int | None = None) -> NiceRun | None:
    """Canonical nice run: accepting runs in lexicographic order of their state
    sequences, the least one duplicated to reach ``k`` components."""
    w = tuple(w)
    runs = accepting_runs(a, w, s)
    if not runs:
        return None
    m = len(runs)
    k = m if k is None else k
    if k < m:
        raise ValueError(f"word has {m} accepting runs, more than k={k}")
    comps = [runs[0]] * (k - m) + list(runs)
    seqs = [run_states(a, r) for r in comps]
    forward = view(a, s).forward_sets(w)
    states = []
    for i in range(len(w) + 1):
        tup = tuple(seq[i] for seq in seqs)
        blocks = []
        for j in range(k):
            if j > 0 and seqs[j][: i + 1] == seqs[j - 1][: i + 1]:
                blocks[-1] += 1
            else:
                blocks.append(1)
        states.append(GammaState(tup, forward[i] - set(tup), tuple(blocks)))
    return NiceRun(w, tuple(states), tuple(comps), m)


def diminishable_components(gamma: RunAutomaton, state: GammaState,
                            cache: list[frozenset] | None = None) -> frozenset:
    dim = cache if cache is not None else gamma.diminishable()
    return dim[gamma.index[state]]


def gamma_bad_word(gamma: RunAutomaton) -> Word | None:
    """Lasso search: a path from the initial to a final state such that every
    component is diminishable at some visited state. Returns the path word."""
    dim = gamma.diminishable()
    full = (1 << gamma.k) - 1
    masks = [sum(1 << j for j in d) for d in dim]
    start = (0, masks[0])
    parent = {start: None}
    todo = deque([start])
    while todo:
        node = todo.popleft()
        i, mask = node
        if i in gamma.final and mask == full:
            word = []
            while parent[node] is not None:
                node, x = parent[node]
                word.append(x)
            return tuple(reversed(word))
        for e in gamma.out[i]:
            _, x, j, _ = gamma.edges[e]
            nxt = (j, mask | masks[j])
            if nxt not in parent:
                parent[nxt] = (node, x)
                todo.append(nxt)
    return None
