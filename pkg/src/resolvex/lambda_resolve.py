"""Threshold resolvability for finitely ambiguous automata.

Every word whose nice run visits no run-automaton state twice (a primitive
word) contributes one polynomial constraint on the resolver weights: the total
weight of its accepting runs that cannot be diminished by pumping a loop must
reach the threshold. This module builds those systems, maximizes the smallest
constraint value numerically, certifies results in exact arithmetic and proves
upper bounds through weighted combinations of constraints.
"""
from __future__ import annotations

import math
import random
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Sequence

import numpy as np
from scipy.optimize import linprog, minimize

from .ambiguity import classify_ambiguity
from .core import Nfa, Word, format_word, parse_word, trim, view
from .errors import CapTooSmall, InfiniteAmbiguity, ParseError, StateBudgetExceeded
from .fnfa import fnfa_check_pr
from .pfa import Pfa, uniform_resolver
from .runaut import NiceRun, RunAutomaton, build_run_automaton, nice_run
from .ufa import ufa_check_pr, ufa_lambda_star, ufa_synthesize

Monomial = tuple[int, ...]  # sorted transition indices, repeated for powers
Polynomial = tuple[Monomial, ...]  # sorted; () is the zero polynomial


@dataclass(frozen=True)
class PrimitiveWord:
    word: Word
    nice: NiceRun
    bad_set: frozenset  # indices into the distinct accepting runs
    monomials: Polynomial


@dataclass
class GammaContext:
    """A support together with its run automaton and per-state diminishable sets."""
    nfa: Nfa
    support: frozenset
    k: int
    gamma: RunAutomaton
    dim: list[frozenset]

    @classmethod
    def build(cls, a: Nfa, s: frozenset | None = None, budget: int = 10 ** 6) -> "GammaContext":
        s = a.full_support if s is None else frozenset(s)
        amb = classify_ambiguity(a.restrict(s))
        if not amb.finite:
            raise InfiniteAmbiguity("support is infinitely ambiguous")
        k = amb.degree or 1
        g = build_run_automaton(a, s, k, budget)
        return cls(a, s, k, g, g.diminishable())


def _bad_and_monomials(ctx: GammaContext, w: Word) -> tuple[NiceRun, frozenset, Polynomial]:
    a, s = ctx.nfa, ctx.support
    padded = nice_run(a, s, w, ctx.k)
    if padded is None:
        raise ValueError("word not accepted by the support")
    m = padded.distinct
    shift = ctx.k - m
    bad = set()
    for st in padded.states:
        for j in ctx.dim[ctx.gamma.index[st]]:
            bad.add(max(0, j - shift))
    nondet = view(a, s).nondet
    runs = padded.run_components[shift:]
    monos = sorted(tuple(sorted(t for t in r if t in nondet)) for i, r in enumerate(runs) if i not in bad)
    return padded, frozenset(bad), tuple(monos)


def compute_bad_set(a: Nfa, s: frozenset | None, w: Sequence[int], ctx: GammaContext | None = None) -> frozenset:
    ctx = ctx or GammaContext.build(a, s)
    return _bad_and_monomials(ctx, tuple(w))[1]


def z_polynomial(a: Nfa, s: frozenset | None, w: Sequence[int], ctx: GammaContext | None = None) -> Polynomial:
    ctx = ctx or GammaContext.build(a, s)
    return _bad_and_monomials(ctx, tuple(w))[2]


def enumerate_primitive_words(a: Nfa, s: frozenset | None = None, length_cap: int | None = None,
                              ctx: GammaContext | None = None, path_budget: int = 500_000,
                              ) -> list[PrimitiveWord]:
    """All words up to ``length_cap`` whose nice run repeats no state, in
    shortlex order. The default cap is the number of useful run-automaton
    states, which bounds every simple path."""
    ctx = ctx or GammaContext.build(a, s)
    g = ctx.gamma
    useful = g.useful()
    cap = len(useful) if length_cap is None else length_cap
    words: set[Word] = set()
    truncated = False
    budget = [path_budget]
    if 0 in useful:
        on_path = {0}
        stack = [(0, iter(g.out[0]))]
        letters: list[int] = []
        if 0 in g.final:
            words.add(())
        while stack:
            node, it = stack[-1]
            e = next(it, None)
            if e is None:
                stack.pop()
                on_path.discard(node)
                if letters:
                    letters.pop()
                continue
            _, x, dst, _ = g.edges[e]
            if dst in on_path or dst not in useful:
                continue
            if len(letters) >= cap:
                truncated = True
                continue
            budget[0] -= 1
            if budget[0] < 0:
                raise StateBudgetExceeded("too many simple paths in the run automaton")
            letters.append(x)
            on_path.add(dst)
            if dst in g.final:
                words.add(tuple(letters))
            stack.append((dst, iter(g.out[dst])))
    if truncated:
        warnings.warn(CapTooSmall(f"primitive-word enumeration cut at length {cap}"))
    out = []
    for w in sorted(words, key=lambda w: (len(w), w)):
        nr, bad, monos = _bad_and_monomials(ctx, w)
        if len(set(nr.states)) != len(nr.states):
            continue
        out.append(PrimitiveWord(w, nr, bad, monos))
    return out


# --- constraint systems ----------------------------------------------------

@dataclass
class ConstraintSystem:
    nfa: Nfa
    support: frozenset
    variables: tuple[int, ...]
    simplex_rows: tuple[tuple[int, ...], ...]
    words: tuple[tuple[Word, Polynomial], ...]
    lambda_: Fraction | None = None  # None: symbolic
    truncated: bool = False

    def values(self, weights: dict[int, Fraction]) -> list[Fraction]:
        return [poly_value(p, weights) for _, p in self.words]

    def min_value(self, weights: dict[int, Fraction]) -> Fraction:
        vals = self.values(weights)
        return min(vals) if vals else Fraction(1)


def poly_value(p: Polynomial, weights) -> Fraction:
    total = Fraction(0)
    for mono in p:
        term = Fraction(1)
        for t in mono:
            term *= weights[t]
        total += term
    return total


def build_constraints(a: Nfa, s: frozenset | None = None, lambda_: Fraction | None = None,
                      length_cap: int | None = None, ctx: GammaContext | None = None) -> ConstraintSystem:
    ctx = ctx or GammaContext.build(a, s)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        prims = enumerate_primitive_words(a, ctx.support, length_cap, ctx)
    truncated = any(issubclass(c.category, CapTooSmall) for c in caught)
    v = view(a, ctx.support)
    rows = tuple(ts for _, ts in sorted(v.rows.items()) if len(ts) > 1)
    seen: dict[Polynomial, Word] = {}
    for pw in prims:
        seen.setdefault(pw.monomials, pw.word)
    words = tuple((w, p) for p, w in seen.items())
    return ConstraintSystem(a, ctx.support, tuple(sorted(v.nondet)), rows, words,
                            None if lambda_ is None else Fraction(lambda_), truncated)


def _mono_text(m: Monomial) -> str:
    return "*".join(f"x{t}" for t in m) if m else "1"


def export_constraints(c: ConstraintSystem, fmt: str = "native") -> str:
    if fmt == "native":
        return _export_native(c)
    if fmt == "smt":
        return _export_smt(c)
    raise ValueError(f"unknown format {fmt}")


def _export_native(c: ConstraintSystem) -> str:
    a = c.nfa
    lam = "symbolic" if c.lambda_ is None else f"{c.lambda_.numerator}/{c.lambda_.denominator}"
    out = [f"# constraints for {a.name}",
           "support " + " ".join(map(str, sorted(c.support))),
           f"lambda {lam}"]
    for t in c.variables:
        out.append(f"var x{t} in (0,1]  # {a.describe(t)}")
    for row in c.simplex_rows:
        out.append("simplex " + " + ".join(f"x{t}" for t in row) + " = 1")
    for w, poly in c.words:
        rhs = " + ".join(_mono_text(m) for m in poly) if poly else "0"
        out.append(f"word {format_word(a, w) or 'ε'}: {rhs} >= lambda")
    return "\n".join(out) + "\n"


def parse_constraints(text: str, a: Nfa) -> ConstraintSystem:
    support = None
    lam: Fraction | None = None
    variables, rows, words = [], [], []
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        try:
            if head == "support":
                support = frozenset(int(x) for x in rest.split())
            elif head == "lambda":
                lam = None if rest.strip() == "symbolic" else Fraction(rest.strip())
            elif head == "var":
                variables.append(int(rest.split()[0][1:]))
            elif head == "simplex":
                lhs = rest.split("=")[0]
                rows.append(tuple(int(t.strip()[1:]) for t in lhs.split("+")))
            elif head == "word":
                wtext, _, poly = rest.rpartition(":")
                poly = poly.replace(">= lambda", "").strip()
                monos = [] if poly == "0" else [
                    tuple(sorted(int(f[1:]) for f in m.strip().split("*") if f.strip() != "1"))
                    for m in poly.split("+")]
                w = parse_word(a, "" if wtext.strip() == "ε" else wtext)
                words.append((w, tuple(sorted(monos))))
            else:
                raise ParseError(f"unknown line {head!r}", no)
        except (ValueError, IndexError) as e:
            raise ParseError(str(e), no) from None
    if support is None:
        raise ParseError("missing support line")
    return ConstraintSystem(a, support, tuple(variables), tuple(rows), tuple(words), lam)


def _smt_real(x: Fraction) -> str:
    if x.denominator == 1:
        return f"{x.numerator}.0"
    return f"(/ {x.numerator}.0 {x.denominator}.0)"


def _smt_sum(terms: list[str]) -> str:
    if not terms:
        return "0.0"
    return terms[0] if len(terms) == 1 else "(+ " + " ".join(terms) + ")"


def _export_smt(c: ConstraintSystem) -> str:
    out = ["(set-logic QF_NRA)"]
    for t in c.variables:
        out.append(f"(declare-const x{t} Real)")
        out.append(f"(assert (and (< 0.0 x{t}) (<= x{t} 1.0)))")
    for row in c.simplex_rows:
        out.append(f"(assert (= {_smt_sum([f'x{t}' for t in row])} 1.0))")
    out.append("(declare-const lambda Real)")
    if c.lambda_ is None:
        out.append("(assert (< 0.0 lambda))")
    else:
        out.append(f"(assert (= lambda {_smt_real(c.lambda_)}))")
    for _, poly in c.words:
        terms = []
        for m in poly:
            if not m:
                terms.append("1.0")
            elif len(m) == 1:
                terms.append(f"x{m[0]}")
            else:
                terms.append("(* " + " ".join(f"x{t}" for t in m) + ")")
        out.append(f"(assert (>= {_smt_sum(terms)} lambda))")
    out.append("(check-sat)")
    return "\n".join(out) + "\n"


# --- numerical maximization --------------------------------------------------

class _Numeric:
    """Vectorized evaluation of all constraint polynomials."""

    def __init__(self, c: ConstraintSystem):
        self.c = c
        self.pos = {t: i for i, t in enumerate(c.variables)}
        self.n = len(c.variables)
        monos, owner, const = [], [], np.zeros(len(c.words))
        for w, (_, poly) in enumerate(c.words):
            for m in poly:
                if not m:
                    const[w] += 1
                    continue
                row = np.zeros(self.n)
                for t in m:
                    row[self.pos[t]] += 1
                monos.append(row)
                owner.append(w)
        self.E = np.array(monos) if monos else np.zeros((0, self.n))
        self.owner = np.array(owner, dtype=int)
        self.const = const
        self.m = len(c.words)
        self.rows = [np.array([self.pos[t] for t in r]) for r in c.simplex_rows]

    def values(self, x: np.ndarray) -> np.ndarray:
        z = self.const.copy()
        if len(self.E):
            prods = np.exp(self.E @ np.log(np.maximum(x, 1e-300)))
            np.add.at(z, self.owner, prods)
        return z

    def jacobian(self, x: np.ndarray) -> np.ndarray:
        J = np.zeros((self.m, self.n))
        if len(self.E):
            xs = np.maximum(x, 1e-300)
            prods = np.exp(self.E @ np.log(xs))
            grads = self.E * prods[:, None] / xs[None, :]
            np.add.at(J, self.owner, grads)
        return J

    def project(self, x: np.ndarray, eps: float = 1e-9) -> np.ndarray:
        y = x.copy()
        for r in self.rows:
            y[r] = _project_simplex(y[r] - eps, 1 - eps * len(r)) + eps
        return y

    def random_point(self, rng: np.random.Generator) -> np.ndarray:
        x = np.zeros(self.n)
        for r in self.rows:
            x[r] = rng.dirichlet(np.ones(len(r)))
        return self.project(x)

    def uniform_point(self) -> np.ndarray:
        x = np.zeros(self.n)
        for r in self.rows:
            x[r] = 1 / len(r)
        return x


def _project_simplex(v: np.ndarray, total: float) -> np.ndarray:
    """Euclidean projection onto {x >= 0, sum x = total}."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - total
    ind = np.arange(1, len(v) + 1)
    cond = u - css / ind > 0
    rho = ind[cond][-1]
    theta = css[cond][-1] / rho
    return np.maximum(v - theta, 0)


def _ascent(num: _Numeric, x: np.ndarray, iterations: int, step: float) -> np.ndarray:
    best, best_val = x, num.values(x).min()
    for it in range(iterations):
        z = num.values(x)
        w = int(np.argmin(z))
        g = num.jacobian(x)[w]
        norm = np.linalg.norm(g)
        if norm == 0:
            break
        x = num.project(x + step / math.sqrt(it + 1) * g / norm)
        val = num.values(x).min()
        if val > best_val:
            best, best_val = x, val
    return best


def _polish(num: _Numeric, x0: np.ndarray, tol: float) -> np.ndarray:
    """Local refinement of the epigraph form max t s.t. z_w(x) >= t."""
    n = num.n
    start = np.append(x0, num.values(x0).min())
    cons = [{"type": "ineq",
             "fun": lambda y: num.values(y[:n]) - y[n],
             "jac": lambda y: np.hstack([num.jacobian(y[:n]), -np.ones((num.m, 1))])}]
    for r in num.rows:
        def eq(y, r=r):
            return np.array([y[r].sum() - 1])

        def eq_jac(y, r=r):
            j = np.zeros((1, n + 1))
            j[0, r] = 1
            return j
        cons.append({"type": "eq", "fun": eq, "jac": eq_jac})
    bounds = [(1e-9, 1.0)] * n + [(None, None)]
    res = minimize(lambda y: -y[n], start, jac=lambda y: np.append(np.zeros(n), -1.0),
                   constraints=cons, bounds=bounds, method="SLSQP",
                   options={"maxiter": 500, "ftol": tol})
    x = num.project(np.clip(res.x[:n], 1e-9, 1))
    return x if num.values(x).min() >= num.values(x0).min() else x0


def rationalize(c: ConstraintSystem, x: np.ndarray, cap: int = 10 ** 6) -> tuple[dict[int, Fraction], Fraction]:
    """Round to rationals with growing denominator caps, repair each row to sum
    to one exactly, and keep the candidate with the best exact minimum."""
    pos = {t: i for i, t in enumerate(c.variables)}
    best = None
    limit = 10
    while limit <= cap:
        weights: dict[int, Fraction] = {}
        ok = True
        for row in c.simplex_rows:
            fr = [Fraction(float(x[pos[t]])).limit_denominator(limit) for t in row]
            fr = [max(f, Fraction(1, limit)) for f in fr]
            j = max(range(len(row)), key=lambda i: fr[i])
            fr[j] = 1 - (sum(fr) - fr[j])
            if fr[j] <= 0:
                ok = False
                break
            weights.update(zip(row, fr))
        if ok:
            val = c.min_value(weights)
            if best is None or val > best[1]:
                best = (weights, val)
        limit *= 10
    if best is None:
        weights = {t: Fraction(1, len(row)) for row in c.simplex_rows for t in row}
        best = (weights, c.min_value(weights))
    return best


def exact_upper_bound(c: ConstraintSystem, vertex_limit: int = 20000) -> Fraction | None:
    """An exact upper bound on max_x min_w z_w(x) over this support.

    Any convex combination of constraints bounds the minimum. Each monomial is
    first bounded by keeping one variable per simplex row (the others are at
    most one), so the combination is affine in each row and peaks at a vertex
    of the product of simplices. The combination weights come from a linear
    program and are rounded to rationals before the exact evaluation."""
    if not c.words:
        return Fraction(1)
    if any(not poly for _, poly in c.words):
        return Fraction(0)
    row_of = {t: i for i, r in enumerate(c.simplex_rows) for t in r}
    reduced = []
    for _, poly in c.words:
        rp = []
        for m in poly:
            keep = {}
            for t in m:
                keep.setdefault(row_of[t], t)
            rp.append(frozenset(keep.values()))
        reduced.append(rp)
    count = 1
    for r in c.simplex_rows:
        count *= len(r)
        if count > vertex_limit:
            return None
    vertices = [frozenset(v) for v in product(*c.simplex_rows)]
    A = np.array([[sum(1 for m in rp if m <= v) for rp in reduced] for v in vertices], dtype=float)
    nw = len(reduced)
    # minimize t subject to A y <= t, sum y = 1, y >= 0
    res = linprog(np.append(np.zeros(nw), 1.0),
                  A_ub=np.hstack([A, -np.ones((len(vertices), 1))]), b_ub=np.zeros(len(vertices)),
                  A_eq=np.append(np.ones(nw), 0.0)[None, :], b_eq=[1.0],
                  bounds=[(0, None)] * nw + [(None, None)], method="highs")
    if not res.success:
        return None
    counts = [[sum(1 for m in rp if m <= v) for rp in reduced] for v in vertices]
    best = None
    for limit in (10, 100, 1000, 10 ** 4, 10 ** 6):
        y = [Fraction(float(max(val, 0))).limit_denominator(limit) for val in res.x[:nw]]
        total = sum(y)
        if total == 0:
            continue
        y = [v / total for v in y]
        bound = max(sum(yy * cnt for yy, cnt in zip(y, row)) for row in counts)
        if best is None or bound < best:
            best = bound
    return best


@dataclass
class MaximizeResult:
    lambda_best: Fraction
    resolver: Pfa | None
    support: frozenset | None
    status: str  # "Certified", "LowerBoundOnly" or "Infeasible"
    upper_bound: Fraction | None = None
    float_value: float | None = None
    per_support: list = field(default_factory=list)

    @property
    def optimal(self) -> bool:
        return self.upper_bound is not None and self.upper_bound == self.lambda_best


def maximize_system(c: ConstraintSystem, starts: int = 8, iterations: int = 300,
                    tolerance: float = 1e-12, seed: int = 0) -> tuple[dict[int, Fraction], Fraction, float]:
    if not c.variables:
        return {}, c.min_value({}), float(c.min_value({}))
    num = _Numeric(c)
    rng = np.random.default_rng(seed)
    points = [num.uniform_point()] + [num.random_point(rng) for _ in range(max(0, starts - 1))]
    best_x, best_val = None, -1.0
    for x in points:
        x = _ascent(num, x, iterations, 0.1)
        x = _polish(num, x, tolerance)
        val = float(num.values(x).min())
        if val > best_val:
            best_x, best_val = x, val
    weights, exact = rationalize(c, best_x)
    return weights, exact, best_val


def maximize_lambda(a: Nfa, starts: int = 8, iterations: int = 300, tolerance: float = 1e-12,
                    seed: int = 0, jobs: int = 1) -> MaximizeResult:
    a = trim(a)
    report = fnfa_check_pr(a, exhaustive=True, jobs=jobs)
    good = [vd.support for vd in report.verdicts if not vd.bad]
    if not good:
        return MaximizeResult(Fraction(0), None, None, "Infeasible", Fraction(0))
    best = None
    uppers = []
    per = []
    for s in good:
        c = build_constraints(a, s)
        weights, exact, fval = maximize_system(c, starts, iterations, tolerance, seed)
        ub = exact_upper_bound(c)
        uppers.append(ub)
        per.append((s, exact, ub))
        if best is None or exact > best[1]:
            best = (s, exact, weights, fval)
    s, exact, weights, fval = best
    upper = None if any(u is None for u in uppers) else max(uppers)
    full = dict(weights)
    for ts in view(a, s).rows.values():
        if len(ts) == 1:
            full[ts[0]] = Fraction(1)
    resolver = Pfa.from_mapping(a, full)
    status = "Certified" if exact > 0 else "LowerBoundOnly"
    return MaximizeResult(exact, resolver, s, status, upper, fval, per)


@dataclass
class LambdaCheck:
    verdict: str  # "Yes", "No" or "Unknown"
    resolver: Pfa | None = None
    reason: str = ""


def certify_resolver(a: Nfa, r: Pfa, lam: Fraction, ctx: GammaContext | None = None) -> bool:
    """Exact check that every primitive-word constraint of the resolver's
    support holds at ``lam``."""
    s = r.support
    c = build_constraints(a, s, lam, ctx=ctx)
    return not c.truncated and c.min_value(dict(enumerate(r.weights))) >= lam


def check_lambda_resolvable(a: Nfa, lam: Fraction, starts: int = 8, iterations: int = 300,
                            seed: int = 0) -> LambdaCheck:
    lam = Fraction(lam)
    a = trim(a)
    if lam <= 0:
        return LambdaCheck("Yes", uniform_resolver(a), "non-positive threshold")
    if lam > 1:
        return LambdaCheck("No", None, "threshold above 1")
    amb = classify_ambiguity(a)
    if not amb.finite:
        return LambdaCheck("Unknown", None, "infinitely ambiguous")
    if amb.kind == "Unambiguous":
        if not ufa_check_pr(a).resolvable:
            return LambdaCheck("No", None, "not positively resolvable")
        star = ufa_lambda_star(a).lambda_star
        if lam <= star:
            return LambdaCheck("Yes", ufa_synthesize(a), f"optimal threshold {star}")
        return LambdaCheck("No", None, f"optimal threshold {star}")
    report = fnfa_check_pr(a, exhaustive=True)
    good = [vd.support for vd in report.verdicts if not vd.bad]
    if not good:
        return LambdaCheck("No", None, "every language-preserving support is bad")
    systems = [build_constraints(a, s) for s in good]
    for s, c in zip(good, systems):
        r = uniform_resolver(a, s)
        if not c.truncated and c.min_value(dict(enumerate(r.weights))) >= lam:
            return LambdaCheck("Yes", r, "uniform resolver meets every constraint")
    for s, c in zip(good, systems):
        weights, exact, _ = maximize_system(c, starts, iterations, 1e-12, seed)
        if not c.truncated and exact >= lam:
            full = dict(weights)
            for ts in view(a, s).rows.values():
                if len(ts) == 1:
                    full[ts[0]] = Fraction(1)
            return LambdaCheck("Yes", Pfa.from_mapping(a, full), "optimized resolver meets every constraint")
    uppers = [exact_upper_bound(c) for c in systems]
    if all(u is not None and u < lam for u in uppers):
        return LambdaCheck("No", None, f"exact upper bound {max(uppers)} below threshold")
    return LambdaCheck("Unknown", None, "no certificate and no refutation found")
