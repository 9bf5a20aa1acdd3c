"""Random automaton generators and brute-force oracles for the tests."""
from __future__ import annotations

import random
from fractions import Fraction
from itertools import product

from resolvex.ambiguity import classify_ambiguity, is_unambiguous
from resolvex.core import Nfa, all_words, is_trim, trim
from resolvex.errors import DegreeCapExceeded


def random_nfa(rng: random.Random, max_states: int = 5, max_letters: int = 2,
               density: float = 0.35, name: str = "rand") -> Nfa:
    n = rng.randint(min(3, max_states), max_states)
    k = rng.randint(1, max_letters)
    alphabet = tuple("abcd"[:k])
    trans = [(p, x, q) for p in range(n) for x in range(k) for q in range(n) if rng.random() < density]
    acc = frozenset(q for q in range(n) if rng.random() < 0.4) or frozenset({rng.randrange(n)})
    return Nfa(alphabet, tuple(f"s{i}" for i in range(n)), 0, acc, tuple(trans), name)


def random_trim_nfa(rng: random.Random, **kw) -> Nfa:
    while True:
        a = trim(random_nfa(rng, **kw))
        if a.n_states >= 2 and not a.is_deterministic() and is_trim(a):
            return a


def random_fnfa(rng: random.Random, max_states: int = 5, max_letters: int = 2, max_degree: int = 3) -> Nfa:
    """A trim finitely-ambiguous automaton of degree at most ``max_degree``."""
    while True:
        a = random_trim_nfa(rng, max_states=max_states, max_letters=max_letters)
        try:
            amb = classify_ambiguity(a, degree_cap=max_degree)
        except DegreeCapExceeded:
            continue
        if amb.finite:
            return a


def random_ufa(rng: random.Random, max_states: int = 6, max_letters: int = 2) -> Nfa:
    while True:
        a = random_trim_nfa(rng, max_states=max_states, max_letters=max_letters, density=0.3)
        if is_unambiguous(a):
            return a


# --- oracles ---------------------------------------------------------------------

def brute_runs(a: Nfa, w) -> int:
    """Count accepting runs by enumerating every state sequence."""
    n = a.n_states
    edges = {}
    for p, x, q in a.transitions:
        edges[(p, x, q)] = edges.get((p, x, q), 0) + 1
    total = 0
    for seq in product(range(n), repeat=len(w)):
        path = (a.initial,) + seq
        if path[-1] not in a.accepting:
            continue
        m = 1
        for i, x in enumerate(w):
            m *= edges.get((path[i], x, path[i + 1]), 0)
            if not m:
                break
        total += m
    return total


def brute_accepts(a: Nfa, w, s=None) -> bool:
    cur = {a.initial}
    for x in w:
        cur = {q for t, (p, y, q) in enumerate(a.transitions)
               if p in cur and y == x and (s is None or t in s)}
    return bool(cur & a.accepting)


def brute_max_runs(a: Nfa, max_len: int) -> int:
    return max(brute_runs(a, w) for w in all_words(len(a.alphabet), max_len))


def brute_prob(p, w) -> Fraction:
    """Sum over accepting runs of the product of weights."""
    a = p.host
    total = Fraction(0)

    def go(i, q, acc):
        nonlocal total
        if i == len(w):
            if q in a.accepting:
                total += acc
            return
        for t, (src, x, dst) in enumerate(a.transitions):
            if src == q and x == w[i] and p.weights[t]:
                go(i + 1, dst, acc * p.weights[t])

    go(0, a.initial, Fraction(1))
    return total


# --- hypothesis strategies ---------------------------------------------------------

def _strategies():
    from hypothesis import strategies as st

    @st.composite
    def nfas(draw, max_states: int = 4, max_letters: int = 2, min_states: int = 1):
        n = draw(st.integers(min_states, max_states))
        k = draw(st.integers(1, max_letters))
        cells = [(p, x, q) for p in range(n) for x in range(k) for q in range(n)]
        trans = draw(st.lists(st.sampled_from(cells), unique=True, max_size=min(len(cells), 3 * n * k)))
        acc = draw(st.frozensets(st.integers(0, n - 1), max_size=n))
        return Nfa(tuple("abcd"[:k]), tuple(f"s{i}" for i in range(n)), 0, acc, tuple(trans), "hyp")

    return nfas


nfas = _strategies()


def random_chain(rng: random.Random, max_states: int = 6, density: float = 0.4):
    """A random stochastic matrix with rational entries and a random initial
    distribution; rows keep at least one positive entry."""
    n = rng.randint(1, max_states)
    P = []
    for _ in range(n):
        ks = [rng.randint(1, 5) if rng.random() < density else 0 for _ in range(n)]
        if not any(ks):
            ks[rng.randrange(n)] = 1
        total = sum(ks)
        P.append([Fraction(k, total) for k in ks])
    if rng.random() < 0.5:
        I = [Fraction(int(q == 0)) for q in range(n)]
    else:
        ks = [rng.randint(0, 3) for _ in range(n)]
        if not any(ks):
            ks[0] = 1
        I = [Fraction(k, sum(ks)) for k in ks]
    return P, I


def power_limit(P, I, k: int, T: int, rounds: int = 500):
    """I · P^(k + rounds·T) in floating point."""
    import numpy as np
    M = np.array([[float(x) for x in row] for row in P])
    v = np.array([float(x) for x in I])
    return v @ np.linalg.matrix_power(M, k + rounds * T)


# acceptance lines keyed by criterion number, echoed in the terminal summary
ACCEPTANCE_LINES: dict[int, str] = {}
