"""Generators for the hardness and spectrum constructions, with structural
validators."""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb, gcd
from typing import Sequence

from .core import Nfa, Word, view
from .errors import AlphabetMismatch, GeneratorError
from .langops import language_relation
from .pfa import Pfa


class _Builder:
    def __init__(self, alphabet: Sequence[str]):
        self.alphabet = list(alphabet)
        self.sym = {x: i for i, x in enumerate(self.alphabet)}
        self.states: list[str] = []
        self.idx: dict[str, int] = {}
        self.accepting: set[int] = set()
        self.trans: list[tuple[int, int, int]] = []
        self._seen: set[tuple[int, int, int]] = set()

    def state(self, name: str, accepting: bool = False) -> int:
        if name not in self.idx:
            self.idx[name] = len(self.states)
            self.states.append(name)
        if accepting:
            self.accepting.add(self.idx[name])
        return self.idx[name]

    def add(self, p: str, x: str, q: str) -> None:
        t = (self.state(p), self.sym[x], self.state(q))
        if t not in self._seen:
            self._seen.add(t)
            self.trans.append(t)

    def build(self, initial: str, name: str) -> Nfa:
        return Nfa(tuple(self.alphabet), tuple(self.states), self.idx[initial],
                   frozenset(self.accepting), tuple(self.trans), name)


# --- spectrum ----------------------------------------------------------------

def gen_spectrum(m: int, n: int) -> Nfa:
    """An m-ambiguous automaton whose best threshold is exactly m/n: n branches
    walk through the m-subsets of {1..n} in lexicographic order, and branch j
    accepts at a subset iff j belongs to it."""
    if not (0 < m < n) or gcd(m, n) != 1:
        raise GeneratorError(f"need 0 < m < n with gcd(m, n) = 1, got {m}/{n}")
    subsets = list(combinations(range(1, n + 1), m))
    sep = "" if n < 10 else "."
    b = _Builder(["a"])
    b.state("q0")
    for j in range(1, n + 1):
        prev = "q0"
        for sub in subsets:
            name = f"q{j}_{sep.join(map(str, sub))}"
            b.state(name, j in sub)
            b.add(prev, "a", name)
            prev = name
    return b.build("q0", f"spectrum{m}_{n}")


def spectrum_state_count(m: int, n: int) -> int:
    return 1 + n * comb(n, m)


# --- unary hardness ------------------------------------------------------------

def gen_unary_hardness(cycles: Sequence[tuple[int, Sequence[int]]]) -> Nfa:
    """Cycle union reached from an accepting q0, plus the t1 and t2/t3 branches
    that make every length accepted. Cycle i reaches position n mod L_i after
    reading a^n."""
    if not cycles:
        raise GeneratorError("need at least one cycle")
    b = _Builder(["a"])
    b.state("q0", True)
    for i, (length, acc) in enumerate(cycles):
        if length < 1:
            raise GeneratorError(f"cycle length {length} must be positive")
        acc = set(acc)
        for j in range(length):
            b.state(f"c{i}_{j}", j in acc)
        b.add("q0", "a", f"c{i}_{1 % length}")
        for j in range(length):
            b.add(f"c{i}_{j}", "a", f"c{i}_{(j + 1) % length}")
    b.state("t1", True)
    b.state("t2")
    b.state("t3", True)
    b.add("q0", "a", "t1")
    b.add("q0", "a", "t2")
    b.add("t2", "a", "t2")
    b.add("t2", "a", "t3")
    return b.build("q0", "unary_hard")


def parse_cycle_spec(text: str) -> list[tuple[int, list[int]]]:
    """`2:all,3:0.2` -> [(2, [0, 1]), (3, [0, 2])]."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        length_s, _, acc_s = part.partition(":")
        length = int(length_s)
        if acc_s in ("", "all"):
            acc = list(range(length))
        elif acc_s == "none":
            acc = []
        else:
            acc = [int(x) for x in acc_s.split(".")]
        if any(not 0 <= x < length for x in acc):
            raise GeneratorError(f"accepting position out of range in {part!r}")
        out.append((length, acc))
    return out


def cycle_union_universal(cycles: Sequence[tuple[int, Sequence[int]]]) -> bool:
    """Whether every length n >= 1 lands on an accepting position of some cycle."""
    from math import lcm
    period = 1
    for length, _ in cycles:
        period = lcm(period, length)
    return all(any(n % length in set(acc) for length, acc in cycles) for n in range(1, period + 1))


# --- PSPACE hardness -----------------------------------------------------------

def gen_pspace_hardness(dfas: Sequence[Nfa]) -> Nfa:
    """t1 loops on a and fans out on b to the DFA initial states; t2/t3
    alternate on a/b blocks. The initial t0 carries copies of the outgoing
    transitions of t1, t2 and t3 in place of silent moves."""
    if not dfas:
        raise GeneratorError("need at least one DFA")
    for i, d in enumerate(dfas):
        if set(d.alphabet) != {"a", "b"}:
            raise AlphabetMismatch(f"input {i} is over {d.alphabet}, expected a and b")
        if not d.is_deterministic():
            raise GeneratorError(f"input {i} is not deterministic")
    b = _Builder(["a", "b"])
    for name in ("t0", "t1", "t2", "t3"):
        b.state(name, True)
    inits = []
    for i, d in enumerate(dfas):
        pre = f"d{i}:"
        for q, qname in enumerate(d.states):
            b.state(pre + qname, q in d.accepting)
        for p, x, q in d.transitions:
            b.add(pre + d.states[p], d.alphabet[x], pre + d.states[q])
        inits.append(pre + d.states[d.initial])
    gadget = [("t1", "a", "t1")] + [("t1", "b", q) for q in inits]
    gadget += [("t2", "a", "t2"), ("t2", "a", "t3"), ("t3", "b", "t3"), ("t3", "b", "t2")]
    for p, x, q in gadget:
        b.add(p, x, q)
    for _, x, q in gadget:
        b.add("t0", x, q)
    return b.build("t0", "pspace_hard")


# --- simple PFAs and the undecidability gadget ---------------------------------

@dataclass(frozen=True)
class SimplePfaCheck:
    is_simple_unique: bool
    pfa: Pfa | None = None


def unique_simple_pfa(a: Nfa) -> SimplePfaCheck:
    """Rows of one transition are forced to 1 and rows of two to 1/2 each;
    a wider row admits no simple PFA."""
    weights = {}
    for ts in view(a).rows.values():
        if len(ts) > 2:
            return SimplePfaCheck(False, None)
        for t in ts:
            weights[t] = Fraction(1, len(ts))
    return SimplePfaCheck(True, Pfa.from_mapping(a, weights))


def st_symbol(name: str) -> str:
    return f"st:{name}"


def tr_symbol(a: Nfa, t: int) -> str:
    p, x, q = a.transitions[t]
    return f"tr:{a.states[p]}.{a.alphabet[x]}.{a.states[q]}"


DOLLARS = tuple(f"${i}" for i in range(7))


def gen_undecidability(p: Pfa | Nfa, check_universal: bool = True) -> Nfa:
    """Extend the host of a simple PFA so that the only 1/4-resolver is the
    simple one and the words $0 q0 w get half the original probability."""
    a = p.host if isinstance(p, Pfa) else p
    check = unique_simple_pfa(a)
    if not check.is_simple_unique:
        raise GeneratorError("host has a row with more than two transitions")
    if isinstance(p, Pfa) and p.weights != check.pfa.weights:
        raise GeneratorError("input PFA is not simple")
    if check_universal and not language_relation(a, mode="universal").holds:
        raise GeneratorError("host automaton is not universal")
    sigma = list(a.alphabet)
    qsyms = [st_symbol(q) for q in a.states]
    dsyms = [tr_symbol(a, t) for t in range(len(a.transitions))]
    b = _Builder(sigma + qsyms + dsyms + list(DOLLARS))
    init, x, y, qf = "g:q0'", "g:x", "g:y", "g:qf"
    b.state(init)
    b.state(x)
    b.state(y)
    b.state(qf, True)
    for q in a.states:
        b.state(q, a.state_index[q] in a.accepting)
    for src, sym, dst in a.transitions:
        b.add(a.states[src], a.alphabet[sym], a.states[dst])
    # dollar gadget
    b.add(init, "$0", x)
    b.add(init, "$0", y)
    for mid, (d1, d2) in ((x, ("g:q3", "g:q4")), (y, ("g:q5", "g:q6"))):
        sym = "$1" if mid == x else "$2"
        b.add(mid, sym, d1)
        b.add(mid, sym, d2)
    for i, d in zip(range(3, 7), ("g:q3", "g:q4", "g:q5", "g:q6")):
        b.add(d, f"${i}", qf)
    # extra words: $0 p Sigma* for p != q0, and $0 p w tau with |w| != 1
    e1, e2, e3, ef = "g:e1", "g:e2", "g:e3", "g:ef"
    z0, z1, z2 = "g:z0", "g:z1", "g:z2"
    for s in (e1, e2, e3, ef):
        b.state(s, True)
    q0 = a.states[a.initial]
    for q in a.states:
        b.add(x, st_symbol(q), z0 if q == q0 else e1)
    for s in sigma:
        b.add(e1, s, e2)
        b.add(e2, s, e3)
        b.add(e3, s, e3)
        b.add(z0, s, z1)
        b.add(z1, s, z2)
        b.add(z2, s, z2)
    for d in dsyms:
        for s in (e1, e3, z0, z2):
            b.add(s, d, ef)
    # extension and nondeterminism gadgets
    for q in a.states:
        b.add(y, st_symbol(q), q)
    for (src, sym), ts in view(a).rows.items():
        if len(ts) == 2:
            for t in ts:
                b.add(a.states[a.transitions[t][2]], tr_symbol(a, t), qf)
    return b.build(init, f"undec_{a.name}")


def satisfies_c1(a: Nfa) -> bool:
    """Every (state, letter) row has at most two transitions."""
    return all(len(ts) <= 2 for ts in view(a).rows.values())


def ext_word(a: Nfa, host: Nfa, w: Sequence[int]) -> Word:
    """$0 q0 w over the extended alphabet, for a host word w."""
    sym = {s: i for i, s in enumerate(a.alphabet)}
    return (sym["$0"], sym[st_symbol(host.states[host.initial])]) + tuple(sym[host.alphabet[x]] for x in w)


def dollar_words(a: Nfa) -> list[Word]:
    sym = {s: i for i, s in enumerate(a.alphabet)}
    return [(sym["$0"], sym[f"${i}"], sym[f"${j}"]) for i, j in ((1, 3), (1, 4), (2, 5), (2, 6))]


def sample_ind_word(a: Nfa, host: Nfa, rng: random.Random, max_len: int = 6) -> Word:
    """A random word from the independent part of the extended language."""
    sym = {s: i for i, s in enumerate(a.alphabet)}
    sig = [sym[s] for s in host.alphabet]
    kind = rng.randrange(4)
    if kind == 0:
        return rng.choice(dollar_words(a))
    others = [q for q in range(host.n_states) if q != host.initial]
    if kind == 1 and others:
        p = rng.choice(others)
        return (sym["$0"], sym[st_symbol(host.states[p])]) + tuple(rng.choice(sig) for _ in range(rng.randrange(max_len)))
    if kind <= 2:
        p = rng.randrange(host.n_states)
        n = rng.choice([0] + list(range(2, max_len)))
        t = rng.randrange(len(host.transitions))
        return ((sym["$0"], sym[st_symbol(host.states[p])]) + tuple(rng.choice(sig) for _ in range(n))
                + (sym[tr_symbol(host, t)],))
    pairs = [ts for ts in view(host).rows.values() if len(ts) == 2]
    if not pairs:
        return rng.choice(dollar_words(a))
    t = rng.choice(rng.choice(pairs))
    p, x, _ = host.transitions[t]
    return (sym["$0"], sym[st_symbol(host.states[p])], sym[host.alphabet[x]], sym[tr_symbol(host, t)])
