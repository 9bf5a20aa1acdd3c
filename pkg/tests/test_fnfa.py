import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import random_fnfa, random_ufa
from resolvex.core import count_accepting_runs
from resolvex.data import load_fixture
from resolvex.errors import InfiniteAmbiguity, ParseError
from resolvex.fnfa import (BadWordWitness, fnfa_check_pr, fnfa_find_bad_word, format_witness,
                           parse_witness, search_bad_word, verify_bad_word)
from resolvex.gens import gen_spectrum
from resolvex.langops import enumerate_supports
from resolvex.pfa import eval_exact, random_resolver
from resolvex.ufa import ufa_check_pr

LONG_WITNESS = "x0=ab y1=b x1=ab y2=b x2=ac; Q1={q1,q3} p1=q1 R1={qf} Q2={q4,q6} p2=q6 R2={qf}"


def test_fnfa4_long_decomposition_verifies():
    a = load_fixture("fnfa4")
    w = parse_witness(a, LONG_WITNESS)
    assert w.loops == 2
    res = verify_bad_word(a, None, w)
    assert res.ok, res.diagnostics
    assert count_accepting_runs(a, w.word()) == 4


def test_fnfa4_y_replaced_by_a_fails_condition_3():
    a = load_fixture("fnfa4")
    w = parse_witness(a, LONG_WITNESS.replace("y1=b", "y1=a"))
    res = verify_bad_word(a, None, w)
    assert not res.ok
    assert any(d.startswith("condition 3") for d in res.diagnostics)


def test_degenerate_witness_rejected():
    a = load_fixture("fnfa4")
    w = BadWordWitness(((0, 1, 1, 0, 1, 1, 0, 2),), (), (), ())
    res = verify_bad_word(a, None, w)
    assert not res.ok and res.diagnostics == ("no y-block",)


def test_fnfa4_search_finds_shortest_witness():
    a = load_fixture("fnfa4")
    w = fnfa_find_bad_word(a)
    assert format_witness(a, w) == "x0=ab y1=b x1=b; Q1={q1} p1=q1 R1={q3,qf}"
    assert verify_bad_word(a, None, w).ok


def test_witness_text_roundtrip():
    a = load_fixture("fnfa4")
    w = parse_witness(a, LONG_WITNESS)
    assert parse_witness(a, format_witness(a, w)) == w
    with pytest.raises(ParseError):
        parse_witness(a, "x0=ab y1=b")


def test_fig1a_and_dfa_have_no_bad_word():
    assert fnfa_find_bad_word(load_fixture("fig1a")) is None
    assert fnfa_find_bad_word(load_fixture("fig1b").restrict({0, 2})) is None


def test_fnfa4_every_support_bad():
    rep = fnfa_check_pr(load_fixture("fnfa4"), exhaustive=True)
    assert not rep.resolvable
    assert len(rep.verdicts) == 4 and all(v.bad for v in rep.verdicts)
    for v in rep.verdicts:
        assert verify_bad_word(rep.automaton, v.support, v.witness).ok


def test_spectrum_resolvable_via_full_support():
    a = gen_spectrum(2, 3)
    rep = fnfa_check_pr(a)
    assert rep.resolvable and rep.good_support == rep.automaton.full_support


def test_fig1b_not_resolvable():
    assert not fnfa_check_pr(load_fixture("fig1b")).resolvable


def test_infinite_ambiguity_rejected():
    with pytest.raises(InfiniteAmbiguity):
        fnfa_check_pr(load_fixture("infamb"))


def test_parallel_matches_serial():
    a = load_fixture("fnfa4")
    serial = fnfa_check_pr(a, exhaustive=True)
    parallel = fnfa_check_pr(a, exhaustive=True, jobs=2)
    assert [(v.support, v.bad) for v in serial.verdicts] == [(v.support, v.bad) for v in parallel.verdicts]


def test_agrees_with_ufa_path_on_unambiguous_inputs():
    rng = random.Random(5)
    for _ in range(150):
        a = random_ufa(rng, max_states=5)
        assert fnfa_check_pr(a).resolvable == ufa_check_pr(a).resolvable


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_witnesses_verify_and_diminish(seed):
    rng = random.Random(seed)
    a = random_fnfa(rng)
    for s in enumerate_supports(a):
        res = search_bad_word(a, s)
        w = res.witness
        if w is None:
            continue
        assert verify_bad_word(a, s, w).ok
        p = random_resolver(a, s, rng)
        probs = [eval_exact(p, w.pumped(j)) for j in (1, 2, 3, 4)]
        assert all(x > y for x, y in zip(probs, probs[1:]))
