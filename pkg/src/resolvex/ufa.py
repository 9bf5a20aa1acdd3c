"""Procedures for unambiguous automata: deciding positive resolvability,
computing the optimal threshold and building a resolver that attains it."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .ambiguity import is_unambiguous
from .core import Nfa, Word, reachable, scc_decompose, shortest_word, trim, view
from .errors import NotPositivelyResolvable, NotUnambiguous
from .pfa import Pfa


@dataclass(frozen=True)
class UfaBadWitness:
    x: Word
    y: Word
    z: Word
    pivot: int

    def word(self) -> Word:
        return self.x + self.y + self.z


@dataclass(frozen=True)
class UfaVerdict:
    resolvable: bool
    witness: UfaBadWitness | None = None
    automaton: Nfa | None = None


def check_ufa_witness(a: Nfa, w: UfaBadWitness) -> bool:
    v = view(a)
    if not w.y or not w.z or w.y[0] != w.z[0]:
        return False
    if w.pivot not in v.forward_sets(w.x)[-1]:
        return False
    loop = {w.pivot}
    for x in w.y:
        loop = v.step(loop, x)
    if w.pivot not in loop:
        return False
    end = {w.pivot}
    for x in w.z:
        end = v.step(end, x)
    if not end & a.accepting:
        return False
    return len(v.row(w.pivot, w.y[0])) >= 2


def find_ufa_witness(a: Nfa) -> UfaBadWitness | None:
    """Search pivots p reachable from the initial state with a branching row
    (p, x) such that one x-successor returns to p and another reaches F."""
    v = view(a)
    for p in sorted(reachable(a)):
        for x in range(len(a.alphabet)):
            targets = sorted(v.targets(p, x))
            if len(targets) < 2:
                continue
            for q in targets:
                back = shortest_word(a, [q], [p])
                if back is None:
                    continue
                for r in targets:
                    if r == q:
                        continue
                    out = shortest_word(a, [r], a.accepting)
                    if out is None:
                        continue
                    prefix = shortest_word(a, [a.initial], [p])
                    return UfaBadWitness(prefix[0], (x,) + back[0], (x,) + out[0], p)
    return None


def resolvable_by_scc(a: Nfa) -> bool:
    """Every transition inside a strongly connected component is deterministic."""
    a = trim(a)
    cond = scc_decompose(a)
    v = view(a)
    for (p, _), ts in v.rows.items():
        if len(ts) > 1 and any(cond.comp_of[a.transitions[t][2]] == cond.comp_of[p] for t in ts):
            return False
    return True


def ufa_check_pr(a: Nfa) -> UfaVerdict:
    a = trim(a)
    if not is_unambiguous(a):
        raise NotUnambiguous(f"{a.name} has a word with two accepting runs")
    w = find_ufa_witness(a)
    if w is None:
        return UfaVerdict(True, None, a)
    return UfaVerdict(False, w, a)


@dataclass(frozen=True)
class LambdaStarReport:
    lambda_star: Fraction
    g: dict  # node name -> int
    f: dict  # node name -> symbol name or None for sink nodes
    automaton: Nfa
    node_of: tuple[int, ...]
    node_value: tuple[int, ...]

    def g_state(self, q: int) -> int:
        return self.node_value[self.node_of[q]]


def _node_name(a: Nfa, comp) -> str:
    if len(comp) == 1:
        return a.states[comp[0]]
    return "{" + ",".join(a.states[q] for q in comp) + "}"


def condensation_lambda_star(a: Nfa) -> LambdaStarReport:
    """Best threshold on the condensation of the trimmed automaton.

    A node's value is the largest, over its states p and letters x whose
    x-row leaves the node, of the summed values of the x-successors; a node
    with no leaving row has value 1. Rows that stay inside a node must be
    deterministic. Does not check unambiguity."""
    a = trim(a)
    if not a.accepting:
        raise NotPositivelyResolvable("empty language")
    cond = scc_decompose(a)
    v = view(a)
    for (p, _), ts in v.rows.items():
        if len(ts) > 1 and any(cond.comp_of[a.transitions[t][2]] == cond.comp_of[p] for t in ts):
            raise NotPositivelyResolvable(
                f"nondeterministic transition inside the component of {a.states[p]}")
    value = [0] * len(cond.components)
    best_letter: list[int | None] = [None] * len(cond.components)
    for c in reversed(range(len(cond.components))):
        g, f = 1, None
        for p in cond.components[c]:
            for x in range(len(a.alphabet)):
                ts = v.row(p, x)
                if not ts:
                    continue
                succ = [cond.comp_of[a.transitions[t][2]] for t in ts]
                if any(s == c for s in succ):
                    continue
                total = sum(value[s] for s in succ)
                if total > g or (f is None and total == g):
                    g, f = total, x
        value[c], best_letter[c] = g, f
    root = cond.comp_of[a.initial]
    names = [_node_name(a, comp) for comp in cond.components]
    return LambdaStarReport(
        Fraction(1, value[root]),
        {names[c]: value[c] for c in range(len(names))},
        {names[c]: (a.alphabet[best_letter[c]] if best_letter[c] is not None else None)
         for c in range(len(names))},
        a, cond.comp_of, tuple(value))


def ufa_lambda_star(a: Nfa) -> LambdaStarReport:
    verdict = ufa_check_pr(a)
    if not verdict.resolvable:
        raise NotPositivelyResolvable(f"{a.name} is not positively resolvable")
    return condensation_lambda_star(a)


def synthesize_from_report(rep: LambdaStarReport) -> Pfa:
    """Split each branching row in proportion to the successors' node values."""
    a = rep.automaton
    weights: dict[int, Fraction] = {}
    for ts in view(a).rows.values():
        vals = [rep.g_state(a.transitions[t][2]) for t in ts]
        total = sum(vals)
        for t, g in zip(ts, vals):
            weights[t] = Fraction(g, total)
    return Pfa.from_mapping(a, weights)


def ufa_synthesize(a: Nfa) -> Pfa:
    return synthesize_from_report(ufa_lambda_star(a))
