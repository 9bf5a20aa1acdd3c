"""Unary automata: periods, exact limit distributions of finite Markov chains,
and the positive-resolvability test over one-letter alphabets."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import Sequence

from .core import Nfa, closed_bottom_states, strongly_connected, trim, view
from .errors import NotStochastic, NotUnary, PeriodTooLarge
from .langops import enumerate_supports
from .pfa import Pfa, uniform_resolver

Matrix = list[list[Fraction]]


def graph_period(succ: Sequence[Sequence[int]]) -> int:
    """lcm over vertices of the gcd of cycle lengths through the vertex;
    vertices on no cycle contribute 1."""
    n = len(succ)
    cond = strongly_connected(n, succ)
    total = 1
    for c, comp in enumerate(cond.components):
        if not cond.cyclic[c]:
            continue
        members = set(comp)
        level = {comp[0]: 0}
        todo = [comp[0]]
        g = 0
        while todo:
            u = todo.pop()
            for v in succ[u]:
                if v not in members:
                    continue
                if v in level:
                    g = gcd(g, level[u] + 1 - level[v])
                else:
                    level[v] = level[u] + 1
                    todo.append(v)
        total = lcm(total, abs(g) or 1)
    return total


def _require_unary(a: Nfa) -> None:
    if len(a.alphabet) != 1:
        raise NotUnary(f"{a.name} has {len(a.alphabet)} letters")


def global_period(a: Nfa, s: frozenset | None = None) -> int:
    _require_unary(a)
    return graph_period(view(a, s).graph)


# --- exact linear algebra ----------------------------------------------------

def solve(A: Matrix, B: Matrix) -> Matrix:
    """Solve A X = B exactly by Gauss-Jordan elimination (A square, invertible)."""
    n = len(A)
    m = len(B[0]) if B else 0
    M = [list(A[i]) + list(B[i]) for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular system")
        M[col], M[piv] = M[piv], M[col]
        inv = 1 / M[col][col]
        M[col] = [x * inv for x in M[col]]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col]
                M[r] = [x - f * y for x, y in zip(M[r], M[col])]
    return [row[n:n + m] for row in M]


def mat_mul(A: Matrix, B: Matrix) -> Matrix:
    cols = list(zip(*B))
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in cols] for row in A]


def vec_mat(v: Sequence[Fraction], A: Matrix) -> list[Fraction]:
    n = len(A[0]) if A else 0
    out = [Fraction(0)] * n
    for i, x in enumerate(v):
        if x:
            row = A[i]
            for j in range(n):
                if row[j]:
                    out[j] += x * row[j]
    return out


def mat_pow(A: Matrix, k: int) -> Matrix:
    n = len(A)
    result = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    base = A
    while k:
        if k & 1:
            result = mat_mul(result, base)
        base = mat_mul(base, base)
        k >>= 1
    return result


def stationary(S: Matrix) -> list[Fraction]:
    """The unique distribution tau with tau S = tau on an irreducible block."""
    n = len(S)
    # (S^T - I) tau^T = 0 with the last equation replaced by sum(tau) = 1
    A = [[S[j][i] - (1 if i == j else 0) for j in range(n)] for i in range(n)]
    A[-1] = [Fraction(1)] * n
    b = [[Fraction(0)] for _ in range(n)]
    b[-1][0] = Fraction(1)
    return [row[0] for row in solve(A, b)]


# --- Markov limits -------------------------------------------------------------

@dataclass
class MarkovLimitReport:
    period_T: int
    limits: list[list[Fraction]]
    classification: list[str]  # "Transient" or "Recurrent(i)"
    stationary: list[list[Fraction]]  # per bottom class of P^T, over its states
    classes: list[tuple[int, ...]]
    absorption: dict[tuple[int, int], Fraction]  # (transient state, class) -> mass
    masses: list[list[Fraction]]  # masses[k][i] = theta_i at residue k


def _check_stochastic(P: Matrix, I: Sequence[Fraction]) -> None:
    n = len(P)
    if any(len(row) != n for row in P) or len(I) != n:
        raise NotStochastic("matrix is not square or the initial vector has the wrong size")
    for i, row in enumerate(P):
        if any(x < 0 for x in row) or sum(row) != 1:
            raise NotStochastic(f"row {i} is not a distribution")
    if any(x < 0 for x in I) or sum(I) != 1:
        raise NotStochastic("initial vector is not a distribution")


def support_graph(P: Matrix) -> list[list[int]]:
    return [[j for j, x in enumerate(row) if x] for row in P]


def markov_limits(P: Matrix, I: Sequence[Fraction], period_cap: int = 10 ** 4) -> MarkovLimitReport:
    """Exact limits pi^(k) = lim_l I P^(k + T l) for k < T."""
    P = [[Fraction(x) for x in row] for row in P]
    I = [Fraction(x) for x in I]
    _check_stochastic(P, I)
    n = len(P)
    T = graph_period(support_graph(P))
    if T > period_cap:
        raise PeriodTooLarge(f"period {T} exceeds {period_cap}")
    B = mat_pow(P, T)
    cond = strongly_connected(n, support_graph(B))
    classes = [comp for c, comp in enumerate(cond.components) if cond.bottom[c]]
    cls_of = {q: i for i, comp in enumerate(classes) for q in comp}
    transient = [q for q in range(n) if q not in cls_of]
    taus = [stationary([[B[i][j] for j in comp] for i in comp]) for comp in classes]
    absorption: dict[tuple[int, int], Fraction] = {}
    if transient:
        Q = [[B[i][j] for j in transient] for i in transient]
        IQ = [[(1 if a == b else 0) - Q[a][b] for b in range(len(transient))] for a in range(len(transient))]
        R = [[sum((B[i][j] for j in comp), Fraction(0)) for comp in classes] for i in transient]
        C = solve(IQ, R)
        for a, q in enumerate(transient):
            for i in range(len(classes)):
                absorption[(q, i)] = C[a][i]
    limits, masses = [], []
    J = list(I)
    for k in range(T):
        theta = []
        for i, comp in enumerate(classes):
            m = sum((J[q] for q in comp), Fraction(0))
            m += sum((J[q] * absorption[(q, i)] for q in transient), Fraction(0))
            theta.append(m)
        pi = [Fraction(0)] * n
        for i, comp in enumerate(classes):
            for q, t in zip(comp, taus[i]):
                pi[q] = theta[i] * t
        limits.append(pi)
        masses.append(theta)
        J = vec_mat(J, P)
    labels = [f"Recurrent({cls_of[q]})" if q in cls_of else "Transient" for q in range(n)]
    return MarkovLimitReport(T, limits, labels, taus, [tuple(c) for c in classes], absorption, masses)


def limit_support_by_graph(P: Matrix, I: Sequence[Fraction]) -> list[set[int]]:
    """Per residue k, the states q in a bottom component of the chain that are
    reachable from the initial support at some length k + T l with l <= d."""
    succ = support_graph(P)
    n = len(P)
    T = graph_period(succ)
    cond = strongly_connected(n, succ)
    bottom = {q for c, comp in enumerate(cond.components) if cond.bottom[c] for q in comp}
    cur = {q for q, x in enumerate(I) if x}
    hits = [set() for _ in range(T)]
    for t in range(T * (n + 1)):
        hits[t % T] |= cur
        cur = {v for u in cur for v in succ[u]}
    return [h & bottom for h in hits]


def chain_of(r: Pfa) -> tuple[Matrix, list[Fraction], int]:
    """The Markov chain of a unary resolver, with an added sink state that
    absorbs the mass of missing rows. Returns (P, I, sink index)."""
    a = r.host
    _require_unary(a)
    n = a.n_states + 1
    P = [[Fraction(0)] * n for _ in range(n)]
    for t, (p, _, q) in enumerate(a.transitions):
        P[p][q] += r.weights[t]
    for p in range(n - 1):
        rest = 1 - sum(P[p])
        P[p][n - 1] += rest
    P[n - 1][n - 1] = Fraction(1)
    I = [Fraction(int(q == a.initial)) for q in range(n)]
    return P, I, n - 1


# --- accepted lengths ----------------------------------------------------------

@dataclass(frozen=True)
class LengthProfile:
    transient: int
    cycle: int
    period: int
    accepted_residues_in_lasso: frozenset  # residues mod period with infinitely many accepted lengths
    finite_residues: frozenset


def _subset_lasso(a: Nfa, s: frozenset | None) -> tuple[list[frozenset], int]:
    v = view(a, s)
    seen: dict[frozenset, int] = {}
    seq: list[frozenset] = []
    cur = frozenset({a.initial})
    while cur not in seen:
        seen[cur] = len(seq)
        seq.append(cur)
        cur = v.step(cur, 0)
    return seq, seen[cur]


def accepted_length_profile(a: Nfa, s: frozenset | None = None, period: int | None = None) -> LengthProfile:
    _require_unary(a)
    seq, t0 = _subset_lasso(a, s)
    c = len(seq) - t0
    P = lcm(c, period or global_period(a, s))
    infinite = set()
    for k in range(P):
        # the cycle position hit by large lengths congruent to k mod P
        t = t0 + ((k - t0) % c)
        if seq[t] & a.accepting:
            infinite.add(k)
    return LengthProfile(t0, c, P, frozenset(infinite), frozenset(set(range(P)) - infinite))


def accepts_length(a: Nfa, n: int, s: frozenset | None = None) -> bool:
    seq, t0 = _subset_lasso(a, s)
    if n >= len(seq):
        c = len(seq) - t0
        n = t0 + (n - t0) % c
    return bool(seq[n] & a.accepting)


@dataclass
class UnaryReport:
    resolvable: bool
    support: frozenset | None = None
    resolver: Pfa | None = None
    failing: list = field(default_factory=list)  # (support, residue, period)
    automaton: Nfa | None = None


def support_failing_residues(a: Nfa, s: frozenset, period_cap: int = 10 ** 4) -> tuple[int, list[int]]:
    """Residues k mod T (T the support's period) holding infinitely many
    accepted lengths but no accepting state in a closed bottom component
    reachable at a length k + T l, l <= d."""
    T = global_period(a, s)
    if T > period_cap:
        raise PeriodTooLarge(f"period {T} exceeds {period_cap}")
    prof = accepted_length_profile(a, a.full_support)
    bottom_final = closed_bottom_states(a, s) & a.accepting
    v = view(a, s)
    d = a.n_states
    hits = [set() for _ in range(T)]
    cur = frozenset({a.initial})
    for t in range(T * (d + 1)):
        hits[t % T] |= cur
        cur = v.step(cur, 0)
    failing = []
    big = lcm(prof.period, T)
    for k in range(T):
        # infinitely many accepted lengths congruent to k mod T
        if not any((r % prof.period) in prof.accepted_residues_in_lasso for r in range(k, big, T)):
            continue
        if not hits[k] & bottom_final:
            failing.append(k)
    return T, failing


def unary_check_pr(a: Nfa, period_cap: int = 10 ** 4) -> UnaryReport:
    _require_unary(a)
    a = trim(a)
    if not a.accepting:
        return UnaryReport(True, frozenset(), uniform_resolver(a), [], a)
    failing = []
    for s in enumerate_supports(a):
        T, bad = support_failing_residues(a, s, period_cap)
        if not bad:
            return UnaryReport(True, s, uniform_resolver(a, s), failing, a)
        failing.append((s, bad[0], T))
    return UnaryReport(False, None, None, failing, a)
