"""Resolvers, probabilistic automata and acceptance probabilities."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .core import Nfa, Run, accepting_runs, view


@dataclass(frozen=True)
class Pfa:
    """An automaton together with a weight per transition.

    Weights of zero mark transitions outside the support. Each (state, letter)
    row that has transitions in the host must carry total weight one. Used both
    for resolvers over an NFA and for PFAs read from files.
    """

    host: Nfa
    weights: tuple[Fraction, ...]

    def __post_init__(self):
        w = tuple(Fraction(x) for x in self.weights)
        object.__setattr__(self, "weights", w)
        if len(w) != len(self.host.transitions):
            raise ValueError("one weight per transition required")
        for x in w:
            if x < 0 or x > 1:
                raise ValueError(f"weight {x} outside [0,1]")
        for (p, a), ts in view(self.host).rows.items():
            total = sum(w[t] for t in ts)
            if total != 1:
                raise ValueError(
                    f"weights on {self.host.states[p]}/{self.host.alphabet[a]} sum to {total}, not 1")

    @classmethod
    def from_mapping(cls, host: Nfa, weights: Mapping[int, Fraction]) -> "Pfa":
        return cls(host, tuple(Fraction(weights.get(t, 0)) for t in range(len(host.transitions))))

    @property
    def support(self) -> frozenset:
        return frozenset(t for t, x in enumerate(self.weights) if x > 0)

    @property
    def is_simple(self) -> bool:
        return all(x in (Fraction(1, 2), Fraction(1)) for x in self.weights if x > 0)

    def mapping(self) -> dict[int, Fraction]:
        return {t: x for t, x in enumerate(self.weights) if x > 0}


Resolver = Pfa


def uniform_resolver(a: Nfa, s: frozenset | None = None) -> Pfa:
    v = view(a, s)
    weights = {}
    for ts in v.rows.values():
        for t in ts:
            weights[t] = Fraction(1, len(ts))
    return Pfa.from_mapping(a, weights)


def random_resolver(a: Nfa, s: frozenset | None, rng: random.Random, spread: int = 9) -> Pfa:
    """Random rational weights k/sum with k drawn from 1..spread."""
    v = view(a, s)
    weights = {}
    for ts in v.rows.values():
        ks = [rng.randint(1, spread) for _ in ts]
        total = sum(ks)
        for t, k in zip(ts, ks):
            weights[t] = Fraction(k, total)
    return Pfa.from_mapping(a, weights)


def eval_exact(p: Pfa, w: Sequence[int]) -> Fraction:
    """Acceptance probability by forward propagation of the state distribution."""
    a = p.host
    v = view(a)
    dist = {a.initial: Fraction(1)}
    for sym in w:
        nxt: dict[int, Fraction] = {}
        for q, mass in dist.items():
            for t in v.row(q, sym):
                x = p.weights[t]
                if x:
                    r = a.transitions[t][2]
                    nxt[r] = nxt.get(r, 0) + mass * x
        dist = nxt
        if not dist:
            return Fraction(0)
    return sum((m for q, m in dist.items() if q in a.accepting), Fraction(0))


def run_probability(p: Pfa, run: Run) -> Fraction:
    out = Fraction(1)
    for t in run:
        out *= p.weights[t]
    return out


def eval_by_runs(p: Pfa, w: Sequence[int]) -> Fraction:
    """Sum over accepting runs of the weight products; a slow cross-check."""
    return sum((run_probability(p, r) for r in accepting_runs(p.host, w)), Fraction(0))


@dataclass(frozen=True)
class MonteCarloEstimate:
    estimate: float
    half_width: float
    samples: int


def eval_monte_carlo(p: Pfa, w: Sequence[int], samples: int, seed: int) -> MonteCarloEstimate:
    """Sample runs of the PFA on ``w`` and report the acceptance frequency
    with a normal-approximation 95% half-width."""
    if samples < 1:
        raise ValueError("samples must be positive")
    a = p.host
    v = view(a)
    rng = random.Random(seed)
    tables = {}
    for key, ts in v.rows.items():
        live = [t for t in ts if p.weights[t] > 0]
        cum, acc = [], 0.0
        for t in live:
            acc += float(p.weights[t])
            cum.append(acc)
        tables[key] = ([a.transitions[t][2] for t in live], cum)
    hits = 0
    for _ in range(samples):
        q = a.initial
        for sym in w:
            row = tables.get((q, sym))
            if row is None:
                q = -1
                break
            targets, cum = row
            if len(targets) == 1:
                q = targets[0]
                continue
            u = rng.random() * cum[-1]
            for target, c in zip(targets, cum):
                if u < c:
                    q = target
                    break
            else:
                q = targets[-1]
        if q in a.accepting:
            hits += 1
    est = hits / samples
    return MonteCarloEstimate(est, 1.96 * math.sqrt(est * (1 - est) / samples), samples)


def min_nondet_count(a: Nfa, s: frozenset | None, w: Sequence[int]) -> int | None:
    """Least number of nondeterministic steps (relative to the support) on an
    accepting run of ``w``; None when ``w`` is rejected."""
    v = view(a, s)
    co = v.coaccepting_sets(w)
    if a.initial not in co[0]:
        return None
    dist = {a.initial: 0}
    for i, sym in enumerate(w):
        nxt: dict[int, int] = {}
        for q, d in dist.items():
            for t in v.row(q, sym):
                r = a.transitions[t][2]
                if r not in co[i + 1]:
                    continue
                c = d + (t in v.nondet)
                if c < nxt.get(r, c + 1):
                    nxt[r] = c
        dist = nxt
    return min(d for q, d in dist.items() if q in a.accepting)


def min_nondet_count_by_runs(a: Nfa, s: frozenset | None, w: Sequence[int]) -> int | None:
    v = view(a, s)
    runs = accepting_runs(a, w, s)
    if not runs:
        return None
    return min(sum(t in v.nondet for t in r) for r in runs)
