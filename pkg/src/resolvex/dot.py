"""Graphviz DOT rendering of automata, resolvers and run automata."""
from __future__ import annotations

from .core import Nfa
from .pfa import Pfa
from .runaut import RunAutomaton
from .textio import fmt_q


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def automaton_dot(obj: Nfa | Pfa, support: frozenset | None = None) -> str:
    """Transitions outside ``support`` are drawn dashed and grey."""
    a = obj.host if isinstance(obj, Pfa) else obj
    lines = [f"digraph {_quote(a.name)} {{", "  rankdir=LR;", '  __start [shape=point, label=""];']
    for i, s in enumerate(a.states):
        shape = "doublecircle" if i in a.accepting else "circle"
        lines.append(f"  {_quote(s)} [shape={shape}];")
    lines.append(f"  __start -> {_quote(a.states[a.initial])};")
    for t, (p, x, q) in enumerate(a.transitions):
        label = a.alphabet[x]
        if isinstance(obj, Pfa):
            label += f" {fmt_q(obj.weights[t])}"
        attrs = [f"label={_quote(label)}"]
        if support is not None and t not in support:
            attrs.append("style=dashed, color=grey")
        lines.append(f"  {_quote(a.states[p])} -> {_quote(a.states[q])} [{', '.join(attrs)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def gamma_dot(g: RunAutomaton) -> str:
    a = g.nfa
    lines = [f"digraph {_quote('gamma_' + a.name)} {{", "  rankdir=LR;", '  __start [shape=point, label=""];']
    for i, st in enumerate(g.states):
        shape = "doublecircle" if i in g.final else "box"
        lines.append(f"  n{i} [shape={shape}, label={_quote(st.label(a))}];")
    lines.append("  __start -> n0;")
    for src, x, dst, _ in g.edges:
        lines.append(f"  n{src} -> n{dst} [label={_quote(a.alphabet[x])}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
