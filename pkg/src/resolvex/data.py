"""Access to the automata shipped with the package."""
from __future__ import annotations

from importlib import resources

from .core import Nfa
from .pfa import Pfa
from .textio import parse_automaton

FIXTURES = ("fig1a", "fig1b", "ufa-dag", "ufa-scc", "fnfa4", "pump2", "infamb", "simple2")


def fixture_text(name: str) -> str:
    folder = resources.files("resolvex") / "fixtures"
    for ext in (".nfa", ".pfa"):
        f = folder / (name + ext)
        if f.is_file():
            return f.read_text()
    raise FileNotFoundError(f"no fixture named {name}")


def load_fixture(name: str) -> Nfa | Pfa:
    return parse_automaton(fixture_text(name))
