"""Positive resolvability of finitely ambiguous automata.

A support is bad when some word splits as x0 y1 x1 ... yl xl where every
accepting run loops on some y_i through a nondeterministic transition; pumping
those blocks drives every run's probability to zero. Bad words are searched on
a finite abstraction that only tracks sets of states: A (states on accepting
runs), G (states still carrying a run not yet shown to diminish) and R (reached
states without an accepting continuation), plus loop bookkeeping while a block
y_i is being read.
"""
from __future__ import annotations

import re
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Sequence

from .ambiguity import classify_ambiguity
from .core import Nfa, Word, accepting_runs, format_word, parse_word, trim, view
from .errors import InfiniteAmbiguity, ParseError
from .langops import enumerate_supports
from .pfa import Pfa, uniform_resolver


@dataclass(frozen=True)
class BadWordWitness:
    blocks: tuple[Word, ...]  # x0, y1, x1, ..., yl, xl
    q_sets: tuple[frozenset, ...]
    pivots: tuple[int, ...]
    r_sets: tuple[frozenset, ...]

    @property
    def loops(self) -> int:
        return len(self.pivots)

    def xs(self) -> tuple[Word, ...]:
        return self.blocks[0::2]

    def ys(self) -> tuple[Word, ...]:
        return self.blocks[1::2]

    def word(self) -> Word:
        return tuple(x for b in self.blocks for x in b)

    def pumped(self, j: int) -> Word:
        """The word with every y-block repeated j times."""
        out: list[int] = []
        for i, b in enumerate(self.blocks):
            out.extend(b * (j if i % 2 else 1))
        return tuple(out)


def format_witness(a: Nfa, w: BadWordWitness) -> str:
    parts = []
    for i, b in enumerate(w.blocks):
        name = f"x{i // 2}" if i % 2 == 0 else f"y{i // 2 + 1}"
        parts.append(f"{name}={format_word(a, b)}")
    sets = []
    names = lambda qs: "{" + ",".join(a.states[q] for q in sorted(qs)) + "}"
    for i, (q, p, r) in enumerate(zip(w.q_sets, w.pivots, w.r_sets), 1):
        sets.append(f"Q{i}={names(q)} p{i}={a.states[p]} R{i}={names(r)}")
    return " ".join(parts) + "; " + " ".join(sets)


def parse_witness(a: Nfa, text: str) -> BadWordWitness:
    if ";" not in text:
        raise ParseError("witness needs a ';' between blocks and sets")
    left, right = text.split(";", 1)
    found = dict(re.findall(r"([xy]\d+)=(\S*)", left))
    ell = sum(1 for k in found if k.startswith("y"))
    blocks = []
    try:
        for i in range(ell + 1):
            blocks.append(parse_word(a, found.get(f"x{i}", "")))
            if i < ell:
                blocks.append(parse_word(a, found[f"y{i + 1}"]))
    except (KeyError, ValueError) as e:
        raise ParseError(f"bad witness blocks: {e}") from None
    sets = dict(re.findall(r"([QpR]\d+)=(\{[^}]*\}|\S+)", right))

    def state_set(tok: str) -> frozenset:
        body = tok.strip("{}").strip()
        return frozenset(a.state_index[x.strip()] for x in body.split(",") if x.strip())

    try:
        qs = tuple(state_set(sets[f"Q{i}"]) for i in range(1, ell + 1))
        ps = tuple(a.state_index[sets[f"p{i}"]] for i in range(1, ell + 1))
        rs = tuple(state_set(sets[f"R{i}"]) for i in range(1, ell + 1))
    except KeyError as e:
        raise ParseError(f"witness set missing or unknown state: {e}") from None
    return BadWordWitness(tuple(blocks), qs, ps, rs)


# --- verification ----------------------------------------------------------

@dataclass(frozen=True)
class Verification:
    ok: bool
    diagnostics: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.ok


def _loops_back(v, q: int, y: Word, need_nondet: bool) -> bool:
    """Is there a path q -y-> q (with a nondeterministic step if requested)?"""
    cur = {(q, False)}
    for x in y:
        nxt = set()
        for p, flag in cur:
            for t in v.row(p, x):
                nxt.add((v.nfa.transitions[t][2], flag or t in v.nondet))
        cur = nxt
    return (q, True) in cur or (not need_nondet and (q, False) in cur)


def verify_bad_word(a: Nfa, s: frozenset | None, w: BadWordWitness) -> Verification:
    """Check the four defining conditions of a bad word directly on runs."""
    s = a.full_support if s is None else frozenset(s)
    v = view(a, s)
    diag: list[str] = []
    ell = w.loops
    if ell == 0 or len(w.blocks) != 2 * ell + 1:
        return Verification(False, ("no y-block",))
    if len(w.q_sets) != ell or len(w.r_sets) != ell:
        return Verification(False, ("set counts do not match the number of y-blocks",))
    if any(len(y) == 0 for y in w.ys()):
        diag.append("empty y-block")
    word = w.word()
    runs = accepting_runs(a, word, s)
    if not runs:
        diag.append("word not accepted")
    forward = v.forward_sets(word)
    co = v.coaccepting_sets(word)
    # positions where y_i starts and ends
    starts, ends = [], []
    pos = 0
    for i, b in enumerate(w.blocks):
        if i % 2 == 1:
            starts.append(pos)
            ends.append(pos + len(b))
        pos += len(b)
    for i in range(ell):
        st, en, y = starts[i], ends[i], w.ys()[i]
        q_set, pivot, r_set = w.q_sets[i], w.pivots[i], w.r_sets[i]
        live = forward[st] & co[st]
        if q_set != live:
            diag.append(f"condition 1: Q{i + 1} should be the states on accepting runs before y{i + 1}")
        if pivot not in q_set:
            diag.append(f"condition 1: pivot p{i + 1} not in Q{i + 1}")
        for q in sorted(q_set):
            if not _loops_back(v, q, y, need_nondet=(q == pivot)):
                if q == pivot and _loops_back(v, q, y, need_nondet=False):
                    diag.append(f"condition 3: loop of y{i + 1} at pivot {a.states[q]} is deterministic")
                else:
                    diag.append(f"condition 3: y{i + 1} does not lead {a.states[q]} back to itself")
        for run in runs:
            seq = [a.initial] + [a.transitions[t][2] for t in run]
            if seq[st] in q_set and seq[en] != seq[st]:
                diag.append(f"condition 3: an accepting run leaves {a.states[seq[st]]} over y{i + 1}")
                break
        dead_before = forward[st] - co[st]
        dead_after = forward[en] - co[en]
        if r_set != dead_before or r_set != dead_after:
            diag.append(f"condition 4: R{i + 1} is not the rejecting-reachable set around y{i + 1}")
    for run in runs:
        seq = [a.initial] + [a.transitions[t][2] for t in run]
        if not any(seq[starts[i]] == w.pivots[i] and seq[ends[i]] == w.pivots[i] for i in range(ell)):
            diag.append("condition 2: an accepting run avoids every pivot")
            break
    return Verification(not diag, tuple(dict.fromkeys(diag)))


# --- abstraction search ----------------------------------------------------

@dataclass(frozen=True)
class AbstractionState:
    looping: bool
    A: frozenset
    G: frozenset
    R: frozenset
    L: frozenset = frozenset()
    pivot: int = -1
    flag: bool = False
    bij: tuple[tuple[int, int], ...] = ()  # sorted pairs (origin in L, current state in A)
    R0: frozenset = frozenset()


def _branching_steps(v, st: AbstractionState, x: int):
    rr = v.step(st.R, x)
    succ = {p: v.targets(p, x) for p in st.A}
    if any(not succ[p] - rr for p in st.A):
        return
    cand = sorted(set().union(*succ.values()) - rr)
    everything = rr | frozenset(cand)
    g_succ = v.step(st.G, x)
    for r in range(1, len(cand) + 1):
        for chosen in combinations(cand, r):
            a_new = frozenset(chosen)
            if any(not (succ[p] & a_new) for p in st.A):
                continue
            yield AbstractionState(False, a_new, g_succ & a_new, everything - a_new)


def _looping_steps(v, st: AbstractionState, x: int):
    rr = v.step(st.R, x)
    current = dict(st.bij)
    origins = sorted(current)
    options = []
    for o in origins:
        c = sorted(v.targets(current[o], x) - rr)
        if not c:
            return
        options.append(c)
    everything = rr | v.step(st.A, x)
    pivot_state = current[st.pivot]
    nondet_pivot = len(v.row(pivot_state, x)) > 1
    for choice in product(*options):
        if len(set(choice)) != len(choice):
            continue
        a_new = frozenset(choice)
        # each tracked state keeps exactly one successor on accepting runs
        if any(len(v.targets(current[o], x) & a_new) != 1 for o in origins):
            continue
        yield AbstractionState(True, a_new, st.G, everything - a_new, st.L, st.pivot,
                               st.flag or nondet_pivot, tuple(zip(origins, choice)), st.R0)


def _eps_steps(st: AbstractionState):
    if not st.looping:
        for q in sorted(st.G):
            yield ("enter", q), AbstractionState(True, st.A, st.G, st.R, st.A, q, False,
                                                 tuple((p, p) for p in sorted(st.A)), st.R)
    elif st.flag and all(o == c for o, c in st.bij) and st.R == st.R0:
        yield ("exit", st.pivot), AbstractionState(False, st.A, st.G - {st.pivot}, st.R)


def _accepting(a: Nfa, st: AbstractionState) -> bool:
    return (not st.looping and not (st.R & a.accepting) and not st.G
            and bool(st.A) and st.A <= a.accepting)


@dataclass
class SearchResult:
    witness: BadWordWitness | None
    explored: int
    truncated: bool = False


def search_bad_word(a: Nfa, s: frozenset | None = None, length_cap: int | None = None) -> SearchResult:
    """Shortest-word search (0-1 BFS, mode switches cost nothing)."""
    s = a.full_support if s is None else frozenset(s)
    v = view(a, s)
    start = AbstractionState(False, frozenset({a.initial}), frozenset({a.initial}), frozenset())
    dist = {start: 0}
    parent: dict = {start: None}
    todo = deque([start])
    done = set()
    truncated = False
    while todo:
        st = todo.popleft()
        if st in done:
            continue
        done.add(st)
        d = dist[st]
        if _accepting(a, st):
            return SearchResult(_decode(parent, st), len(done))
        for label, nxt in _eps_steps(st):
            if nxt not in dist or dist[nxt] > d:
                dist[nxt] = d
                parent[nxt] = (st, label)
                todo.appendleft(nxt)
        if length_cap is not None and d >= length_cap:
            truncated = True
            continue
        for x in range(len(a.alphabet)):
            steps = _looping_steps(v, st, x) if st.looping else _branching_steps(v, st, x)
            for nxt in steps:
                if nxt not in dist or dist[nxt] > d + 1:
                    dist[nxt] = d + 1
                    parent[nxt] = (st, ("letter", x))
                    todo.append(nxt)
    return SearchResult(None, len(done), truncated)


def _decode(parent, st) -> BadWordWitness:
    events = []
    node = st
    while parent[node] is not None:
        node, label = parent[node]
        events.append((label, node))
    events.reverse()
    blocks: list[list[int]] = [[]]
    qs, ps, rs = [], [], []
    for (kind, val), before in events:
        if kind == "letter":
            blocks[-1].append(val)
        elif kind == "enter":
            qs.append(before.A)
            ps.append(val)
            rs.append(before.R)
            blocks.append([])
        else:
            blocks.append([])
    return BadWordWitness(tuple(tuple(b) for b in blocks), tuple(qs), tuple(ps), tuple(rs))


def fnfa_find_bad_word(a: Nfa, s: frozenset | None = None, length_cap: int | None = None,
                       assume_finite: bool = False) -> BadWordWitness | None:
    if not assume_finite and not classify_ambiguity(a).finite:
        raise InfiniteAmbiguity(f"{a.name} is infinitely ambiguous")
    res = search_bad_word(a, s, length_cap)
    if res.witness is not None:
        check = verify_bad_word(a, s, res.witness)
        if not check:
            raise AssertionError(f"decoded witness fails verification: {check.diagnostics}")
    elif res.truncated:
        import warnings
        from .errors import CapTooSmall
        warnings.warn(CapTooSmall(f"bad-word search cut at length {length_cap}"))
    return res.witness


# --- support-level decision ------------------------------------------------

@dataclass
class SupportVerdict:
    support: frozenset
    bad: bool
    witness: BadWordWitness | None


@dataclass
class FnfaReport:
    resolvable: bool
    automaton: Nfa
    verdicts: list[SupportVerdict] = field(default_factory=list)
    good_support: frozenset | None = None
    resolver: Pfa | None = None
    witness: BadWordWitness | None = None
    ambiguity: str = ""


def _support_verdict(args) -> SupportVerdict:
    a, s, cap = args
    w = fnfa_find_bad_word(a, s, cap, assume_finite=True)
    return SupportVerdict(s, w is not None, w)


def fnfa_check_pr(a: Nfa, exhaustive: bool = False, length_cap: int | None = None,
                  jobs: int = 1) -> FnfaReport:
    """Resolvable iff some language-preserving support has no bad word.

    Stops at the first good support unless ``exhaustive``."""
    a = trim(a)
    amb = classify_ambiguity(a)
    if not amb.finite:
        raise InfiniteAmbiguity(f"{a.name} is infinitely ambiguous")
    report = FnfaReport(False, a, ambiguity=str(amb))
    supports = list(enumerate_supports(a))
    if jobs > 1 and len(supports) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            verdicts = list(pool.map(_support_verdict, [(a, s, length_cap) for s in supports]))
    else:
        verdicts = []
        for s in supports:
            verdicts.append(_support_verdict((a, s, length_cap)))
            if not verdicts[-1].bad and not exhaustive:
                break
    report.verdicts = verdicts
    for vd in verdicts:
        if not vd.bad:
            report.resolvable = True
            report.good_support = vd.support
            report.resolver = uniform_resolver(a, vd.support)
            break
    if not report.resolvable:
        report.witness = verdicts[0].witness
    return report
