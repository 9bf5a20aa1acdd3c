import random
from fractions import Fraction
import pytest

from resolvex.ambiguity import classify_ambiguity
from resolvex.core import Nfa, all_words, view
from resolvex.data import load_fixture
from resolvex.errors import AlphabetMismatch, GeneratorError
from resolvex.fnfa import fnfa_check_pr
from resolvex.gens import (DOLLARS, cycle_union_universal, dollar_words, ext_word, gen_pspace_hardness,
                           gen_spectrum, gen_unary_hardness, gen_undecidability, parse_cycle_spec,
                           sample_ind_word, satisfies_c1, spectrum_state_count, tr_symbol,
                           unique_simple_pfa)
from resolvex.langops import language_relation
from resolvex.lambda_resolve import maximize_lambda
from resolvex.pfa import eval_exact
from resolvex.unary import unary_check_pr


def test_spectrum_2_3_shape():
    a = gen_spectrum(2, 3)
    assert a.n_states == 10 == spectrum_state_count(2, 3)
    acc = sorted(a.states[q] for q in a.accepting)
    assert acc == ["q1_12", "q1_13", "q2_12", "q2_23", "q3_13", "q3_23"]
    # a^i with i = 1..3 reaches the i-th subset on every branch; exactly 2 accept
    v = view(a)
    for i in range(1, 4):
        assert len(v.forward_sets((0,) * i)[-1] & a.accepting) == 2


def test_spectrum_1_2():
    a = gen_spectrum(1, 2)
    assert a.n_states == 5
    assert maximize_lambda(a).lambda_best == Fraction(1, 2)


@pytest.mark.parametrize("m,n", [(1, 1), (2, 4), (3, 2), (0, 3)])
def test_spectrum_bad_parameters(m, n):
    with pytest.raises(GeneratorError):
        gen_spectrum(m, n)


def test_cycle_spec_parsing():
    assert parse_cycle_spec("2:all,3:0.2") == [(2, [0, 1]), (3, [0, 2])]
    with pytest.raises(GeneratorError):
        parse_cycle_spec("2:5")


def test_unary_hardness_universal():
    cycles = [(2, [0, 1]), (3, [0, 1, 2])]
    a = gen_unary_hardness(cycles)
    assert cycle_union_universal(cycles)
    assert language_relation(a, mode="universal").holds
    assert str(classify_ambiguity(a)) == "Finite(3)"
    assert unary_check_pr(a).resolvable


def test_unary_hardness_non_universal():
    cycles = [(2, [0])]
    assert not cycle_union_universal(cycles)
    assert not unary_check_pr(gen_unary_hardness(cycles)).resolvable


def test_unary_hardness_single_loop():
    a = gen_unary_hardness([(1, [0])])
    assert unary_check_pr(a).resolvable


def _dfa(name, n, delta, accepting):
    trans = [(p, x, delta[p][x]) for p in range(n) for x in range(2)]
    return Nfa(("a", "b"), tuple(f"d{i}" for i in range(n)), 0, frozenset(accepting), tuple(trans), name)


ENDS_A = _dfa("ends_a", 2, [[1, 0], [1, 0]], {1})
NOT_ENDS_A = _dfa("not_ends_a", 2, [[1, 0], [1, 0]], {0})
EVEN_B = _dfa("even_b", 2, [[0, 1], [1, 0]], {0})


def test_pspace_universal_union_resolvable():
    a = gen_pspace_hardness([ENDS_A, NOT_ENDS_A])
    assert language_relation(a, mode="universal").holds
    assert fnfa_check_pr(a).resolvable


def test_pspace_missing_word_not_resolvable():
    a = gen_pspace_hardness([ENDS_A, EVEN_B])
    assert language_relation(a, mode="universal").holds
    assert not fnfa_check_pr(a).resolvable


def test_pspace_errors():
    with pytest.raises(GeneratorError):
        gen_pspace_hardness([])
    with pytest.raises(AlphabetMismatch):
        gen_pspace_hardness([load_fixture("fig1a")])
    with pytest.raises(GeneratorError):
        gen_pspace_hardness([load_fixture("fig1b")])


def _random_dfa(rng, n):
    delta = [[rng.randrange(n) for _ in range(2)] for _ in range(n)]
    acc = {q for q in range(n) if rng.random() < 0.5}
    return _dfa(f"r{rng.random():.6f}", n, delta, acc)


def test_pspace_resolvable_iff_union_universal():
    rng = random.Random(12)
    for _ in range(10):
        dfas = [_random_dfa(rng, rng.randint(1, 3)) for _ in range(2)]
        a = gen_pspace_hardness(dfas)
        assert language_relation(a, mode="universal").holds
        union = all(any(view(d).accepts(w) for d in dfas) for w in all_words(2, 8))
        assert fnfa_check_pr(a).resolvable == union


def test_unique_simple_pfa():
    a = load_fixture("fig1a")
    chk = unique_simple_pfa(a)
    assert chk.is_simple_unique
    assert chk.pfa.weights[:2] == (Fraction(1, 2), Fraction(1, 2))
    dfa = load_fixture("fig1b").restrict({0, 2})
    assert all(x == 1 for x in unique_simple_pfa(dfa).pfa.weights)
    three = Nfa(("a",), ("p", "q", "r", "s"), 0, {1}, ((0, 0, 1), (0, 0, 2), (0, 0, 3)), "three")
    assert not unique_simple_pfa(three).is_simple_unique
    assert not satisfies_c1(three)


def test_undecidability_gadget():
    p = load_fixture("simple2")
    host = p.host
    a = gen_undecidability(p)
    assert len(a.alphabet) == 2 + host.n_states + len(host.transitions) + len(DOLLARS) == 17
    assert satisfies_c1(a)
    chk = unique_simple_pfa(a)
    assert chk.is_simple_unique
    for w in dollar_words(a):
        assert eval_exact(chk.pfa, w) == Fraction(1, 4)
    rng = random.Random(0)
    for _ in range(60):
        w = tuple(rng.randrange(2) for _ in range(rng.randint(0, 8)))
        assert eval_exact(chk.pfa, ext_word(a, host, w)) == eval_exact(p, w) / 2
        u = sample_ind_word(a, host, rng)
        assert eval_exact(chk.pfa, u) >= Fraction(1, 4)


def test_undecidability_rejects_non_simple_input():
    p = load_fixture("simple2")
    w = list(p.weights)
    w[0], w[1] = Fraction(1, 3), Fraction(2, 3)
    from resolvex.pfa import Pfa
    with pytest.raises(GeneratorError):
        gen_undecidability(Pfa(p.host, tuple(w)))


def test_single_letter_middle_only_through_the_gadget():
    # $0 q0 sigma tau_e is not in the extra language, so its probability comes
    # from the y-branch alone: 1/2 times the chance that q0 -sigma-> lands on
    # the target of e, and only when e sits in a two-transition row
    p = load_fixture("simple2")
    host = p.host
    a = gen_undecidability(p)
    r = unique_simple_pfa(a).pfa
    sym = a.symbol_index
    rows = view(host).rows
    for t, (src, x, dst) in enumerate(host.transitions):
        for sigma in range(len(host.alphabet)):
            w = (sym["$0"], sym["st:q0"], sym[host.alphabet[sigma]], sym[tr_symbol(host, t)])
            land = sum((p.weights[u] for u in rows.get((host.initial, sigma), ())
                        if host.transitions[u][2] == dst), Fraction(0))
            expected = land / 2 if len(rows[(src, x)]) == 2 else Fraction(0)
            assert eval_exact(r, w) == expected
