"""Line-oriented text formats for automata, resolvers and stochastic matrices.

Automaton::

    nfa fig1a
    alphabet a b c
    state q0 init
    state qf accept
    trans q0 a qf
    end

A ``pfa`` block uses the same lines with a ``p/q`` weight on each ``trans``.
Resolver::

    resolver for fig1a
    resolve q0 a p 1/2
    end

Matrix::

    matrix 2
    1/2 1/2
    0 1
    initial 1 0
    end
"""
from __future__ import annotations

from fractions import Fraction

from .core import Nfa
from .errors import ParseError
from .pfa import Pfa


def _lines(text: str):
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line.split()


def parse_fraction(token: str, line: int | None = None) -> Fraction:
    try:
        return Fraction(token)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"not a rational number: {token!r}", line) from None


def parse_automaton(text: str) -> Nfa | Pfa:
    kind = name = None
    alphabet: list[str] | None = None
    states: list[str] = []
    initial: list[int] = []
    accepting: set[int] = set()
    trans: list[tuple[int, int, int]] = []
    weights: list[Fraction] = []
    ended = False
    for no, tok in _lines(text):
        head = tok[0]
        if ended:
            raise ParseError("content after 'end'", no)
        if kind is None:
            if head not in ("nfa", "pfa") or len(tok) != 2:
                raise ParseError("expected 'nfa <name>' or 'pfa <name>'", no)
            kind, name = head, tok[1]
            continue
        if head == "alphabet":
            if alphabet is not None:
                raise ParseError("alphabet declared twice", no)
            alphabet = tok[1:]
            if len(set(alphabet)) != len(alphabet):
                raise ParseError("duplicate alphabet symbol", no)
        elif head == "state":
            if len(tok) < 2:
                raise ParseError("state needs a name", no)
            if tok[1] in states:
                raise ParseError(f"duplicate state {tok[1]}", no)
            flags = tok[2:]
            for f in flags:
                if f not in ("init", "accept"):
                    raise ParseError(f"unknown state flag {f!r}", no)
            if "init" in flags:
                initial.append(len(states))
            if "accept" in flags:
                accepting.add(len(states))
            states.append(tok[1])
        elif head == "trans":
            if alphabet is None:
                raise ParseError("alphabet must precede transitions", no)
            want = 5 if kind == "pfa" else 4
            if len(tok) != want:
                msg = "pfa transitions need a probability" if kind == "pfa" else \
                    "nfa transitions take no probability"
                raise ParseError(msg, no)
            src, sym, dst = tok[1:4]
            for s in (src, dst):
                if s not in states:
                    raise ParseError(f"unknown state {s}", no)
            if sym not in alphabet:
                raise ParseError(f"unknown symbol {sym}", no)
            t = (states.index(src), alphabet.index(sym), states.index(dst))
            if t in trans:
                raise ParseError(f"duplicate transition {src} {sym} {dst}", no)
            trans.append(t)
            if kind == "pfa":
                weights.append(parse_fraction(tok[4], no))
        elif head == "end":
            ended = True
        else:
            raise ParseError(f"unknown directive {head!r}", no)
    if kind is None:
        raise ParseError("empty input")
    if not ended:
        raise ParseError("missing 'end'")
    if alphabet is None:
        raise ParseError("missing alphabet")
    if len(initial) != 1:
        raise ParseError(f"exactly one initial state required, found {len(initial)}")
    nfa = Nfa(tuple(alphabet), tuple(states), initial[0], frozenset(accepting), tuple(trans), name)
    if kind == "nfa":
        return nfa
    try:
        return Pfa(nfa, tuple(weights))
    except ValueError as e:
        raise ParseError(str(e)) from None


def parse_nfa(text: str) -> Nfa:
    obj = parse_automaton(text)
    return obj.host if isinstance(obj, Pfa) else obj


def format_automaton(obj: Nfa | Pfa) -> str:
    a = obj.host if isinstance(obj, Pfa) else obj
    kind = "pfa" if isinstance(obj, Pfa) else "nfa"
    out = [f"{kind} {a.name}", "alphabet " + " ".join(a.alphabet)]
    for i, s in enumerate(a.states):
        flags = (" init" if i == a.initial else "") + (" accept" if i in a.accepting else "")
        out.append(f"state {s}{flags}")
    for t, (p, x, q) in enumerate(a.transitions):
        line = f"trans {a.states[p]} {a.alphabet[x]} {a.states[q]}"
        if isinstance(obj, Pfa):
            line += f" {fmt_q(obj.weights[t])}"
        out.append(line)
    out.append("end")
    return "\n".join(out) + "\n"


def fmt_q(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_resolver(text: str, host: Nfa) -> Pfa:
    weights: dict[int, Fraction] = {}
    header = False
    ended = False
    for no, tok in _lines(text):
        if not header:
            if tok[:2] != ["resolver", "for"] or len(tok) != 3:
                raise ParseError("expected 'resolver for <name>'", no)
            header = True
            continue
        if tok[0] == "end":
            ended = True
            continue
        if tok[0] != "resolve" or len(tok) != 5:
            raise ParseError("expected 'resolve <src> <sym> <dst> <p/q>'", no)
        try:
            t = host.transition_index(*tok[1:4])
        except (KeyError, ValueError):
            raise ParseError(f"no transition {' '.join(tok[1:4])} in {host.name}", no) from None
        weights[t] = parse_fraction(tok[4], no)
    if not header or not ended:
        raise ParseError("incomplete resolver block")
    try:
        return Pfa.from_mapping(host, weights)
    except ValueError as e:
        raise ParseError(str(e)) from None


def format_resolver(r: Pfa) -> str:
    a = r.host
    out = [f"resolver for {a.name}"]
    for t, x in enumerate(r.weights):
        if x > 0:
            p, s, q = a.transitions[t]
            out.append(f"resolve {a.states[p]} {a.alphabet[s]} {a.states[q]} {fmt_q(x)}")
    out.append("end")
    return "\n".join(out) + "\n"


def parse_matrix(text: str) -> tuple[list[list[Fraction]], list[Fraction]]:
    d = None
    rows: list[list[Fraction]] = []
    init: list[Fraction] | None = None
    for no, tok in _lines(text):
        if d is None:
            if tok[0] != "matrix" or len(tok) != 2 or not tok[1].isdigit():
                raise ParseError("expected 'matrix <d>'", no)
            d = int(tok[1])
            continue
        if tok[0] == "end":
            break
        if tok[0] == "initial":
            init = [parse_fraction(x, no) for x in tok[1:]]
            if len(init) != d:
                raise ParseError(f"initial vector needs {d} entries", no)
            continue
        row = [parse_fraction(x, no) for x in tok]
        if len(row) != d:
            raise ParseError(f"row needs {d} entries", no)
        rows.append(row)
    if d is None or len(rows) != d:
        raise ParseError("matrix block incomplete")
    if init is None:
        init = [Fraction(int(i == 0)) for i in range(d)]
    return rows, init
