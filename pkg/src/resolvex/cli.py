"""Command-line front end.

Reports are JSON objects with sorted keys; rationals are written as ``p/q``
strings. Exit status: 0 affirmative or success, 1 negative, 2 unknown, 64 and
above for usage and input errors.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
import warnings
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from . import dot as dotmod
from .ambiguity import classify_ambiguity
from .data import FIXTURES, fixture_text
from .core import Nfa, format_word, parse_word, trim
from .errors import ResolvexError
from .fnfa import fnfa_check_pr, format_witness, parse_witness, verify_bad_word
from .gens import (gen_pspace_hardness, gen_spectrum, gen_undecidability, gen_unary_hardness,
                   parse_cycle_spec)
from .lambda_resolve import (GammaContext, build_constraints, certify_resolver, check_lambda_resolvable,
                             enumerate_primitive_words, export_constraints, maximize_lambda)
from .pfa import Pfa, eval_exact, eval_monte_carlo
from .runaut import build_run_automaton
from .textio import format_automaton, format_resolver, fmt_q, parse_automaton, parse_matrix, parse_resolver
from .ufa import ufa_check_pr, ufa_lambda_star, synthesize_from_report
from .unary import chain_of, markov_limits, unary_check_pr

EXIT_YES, EXIT_NO, EXIT_UNKNOWN = 0, 1, 2
EXIT_USAGE, EXIT_NOINPUT = 64, 66


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _q(x) -> str | None:
    return None if x is None else fmt_q(Fraction(x))


def _read(path: str) -> str:
    """File contents; a missing path whose stem names a bundled fixture
    (``fig1a.nfa`` or just ``fig1a``) falls back to that fixture."""
    try:
        return Path(path).read_text()
    except OSError as e:
        stem = Path(path).name.removesuffix(".nfa").removesuffix(".pfa")
        if not Path(path).exists() and stem in FIXTURES:
            return fixture_text(stem)
        raise FileNotFoundError(f"cannot read {path}: {e.strerror}") from None


def _digest(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def _load(path: str) -> tuple[Nfa | Pfa, str]:
    text = _read(path)
    return parse_automaton(text), text


def _load_nfa(path: str) -> tuple[Nfa, str]:
    obj, text = _load(path)
    return (obj.host if isinstance(obj, Pfa) else obj), text


def _support(a: Nfa, spec: str | None) -> frozenset:
    if spec in (None, "full"):
        return a.full_support
    if spec == "good":
        rep = fnfa_check_pr(a)
        if rep.good_support is None:
            raise UsageError("no good support exists")
        return rep.good_support
    try:
        s = frozenset(int(x) for x in spec.split(",") if x.strip())
    except ValueError:
        raise UsageError(f"bad support spec {spec!r}") from None
    if any(not 0 <= t < len(a.transitions) for t in s):
        raise UsageError("support index out of range")
    return s



def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    return int(os.environ.get("RESOLVEX_SEED", "0"))


# --- subcommands -------------------------------------------------------------

def cmd_classify(args):
    a, text = _load_nfa(args.file)
    amb = classify_ambiguity(a, args.degree_cap)
    t = trim(a)
    rep = {"kind": amb.kind, "degree": amb.degree, "class": str(amb),
           "witness": None if amb.witness is None else format_word(t, amb.witness)}
    return EXIT_YES, rep, text


def cmd_check_pr(args):
    a, text = _load_nfa(args.file)
    t = trim(a)
    amb = classify_ambiguity(t)
    rep = {"ambiguity": str(amb)}
    if not amb.finite:
        rep["verdict"] = "Unknown"
        rep["reason"] = "infinitely ambiguous"
        return EXIT_UNKNOWN, rep, text
    if amb.kind == "Unambiguous":
        v = ufa_check_pr(t)
        rep["method"] = "unambiguous"
        rep["resolvable"] = v.resolvable
        if v.witness:
            w = v.witness
            rep["witness"] = {"x": format_word(t, w.x), "y": format_word(t, w.y), "z": format_word(t, w.z),
                              "pivot": t.states[w.pivot], "word": format_word(t, w.word())}
    else:
        r = fnfa_check_pr(t, length_cap=args.max_bad_word_len, jobs=args.jobs)
        rep["method"] = "finitely-ambiguous"
        rep["resolvable"] = r.resolvable
        rep["supports"] = [{"support": sorted(vd.support), "bad": vd.bad,
                            "witness": None if vd.witness is None else format_witness(t, vd.witness)}
                           for vd in r.verdicts]
        if r.witness is not None:
            rep["witness"] = {"decomposition": format_witness(t, r.witness),
                              "word": format_word(t, r.witness.word())}
        if r.resolver is not None:
            rep["resolver"] = format_resolver(r.resolver)
    if rep["resolvable"] and "resolver" not in rep:
        from .pfa import uniform_resolver
        rep["resolver"] = format_resolver(uniform_resolver(t))
    rep["verdict"] = "Yes" if rep["resolvable"] else "No"
    return (EXIT_YES if rep["resolvable"] else EXIT_NO), rep, text


def cmd_lambda(args):
    a, text = _load_nfa(args.file)
    seed = _seed(args)
    if args.lambda_ is not None:
        return _check_lambda(a, Fraction(args.lambda_), args, seed, text)
    started = time.perf_counter()
    r = maximize_lambda(a, args.starts, args.iters, args.tol, seed, args.jobs)
    rep = {"lambda": _q(r.lambda_best), "status": r.status, "upper_bound": _q(r.upper_bound),
           "optimal": r.optimal,
           "support": None if r.support is None else sorted(r.support),
           "resolver": None if r.resolver is None else format_resolver(r.resolver),
           "telemetry": {"float_value": r.float_value}}
    if args.timing:
        rep["telemetry"]["seconds"] = round(time.perf_counter() - started, 3)
    code = {"Certified": EXIT_YES, "Infeasible": EXIT_NO}.get(r.status, EXIT_UNKNOWN)
    return code, rep, text


def _check_lambda(a, lam, args, seed, text):
    r = check_lambda_resolvable(a, lam, args.starts, args.iters, seed)
    rep = {"lambda": _q(lam), "verdict": r.verdict, "reason": r.reason,
           "resolver": None if r.resolver is None else format_resolver(r.resolver)}
    return {"Yes": EXIT_YES, "No": EXIT_NO}.get(r.verdict, EXIT_UNKNOWN), rep, text


def cmd_check_lambda(args):
    a, text = _load_nfa(args.file)
    try:
        lam = Fraction(args.threshold)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"bad threshold {args.threshold!r}") from None
    return _check_lambda(a, lam, args, _seed(args), text)


def cmd_synthesize(args):
    a, text = _load_nfa(args.file)
    rep_ = ufa_lambda_star(a)
    r = synthesize_from_report(rep_)
    rep = {"lambda_star": _q(rep_.lambda_star), "g": dict(rep_.g), "f": dict(rep_.f),
           "resolver": format_resolver(r)}
    return EXIT_YES, rep, text


def cmd_eval(args):
    obj, text = _load(args.file)
    if isinstance(obj, Pfa):
        p = obj
    else:
        if not args.resolver:
            raise UsageError("an NFA input needs --resolver")
        p = parse_resolver(_read(args.resolver), obj)
    w = parse_word(p.host, args.word)
    rep = {"word": format_word(p.host, w), "probability": _q(eval_exact(p, w))}
    if args.mc:
        est = eval_monte_carlo(p, w, args.mc, _seed(args))
        rep["monte_carlo"] = {"estimate": est.estimate, "half_width": est.half_width, "samples": est.samples}
    return EXIT_YES, rep, text


def _poly_text(poly) -> str:
    if not poly:
        return "0"
    return " + ".join("*".join(f"x{t}" for t in m) if m else "1" for m in poly)


def cmd_primitives(args):
    a, text = _load_nfa(args.file)
    t = trim(a)
    s = _support(t, args.support)
    ctx = GammaContext.build(t, s)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        prims = enumerate_primitive_words(t, s, args.length_cap, ctx)
    rep = {"support": sorted(s), "k": ctx.k, "gamma_states": len(ctx.gamma.states),
           "truncated": bool(caught),
           "words": [{"word": format_word(t, p.word), "bad": sorted(p.bad_set), "z": _poly_text(p.monomials)}
                     for p in prims]}
    return EXIT_YES, rep, text


def cmd_constraints(args):
    a, text = _load_nfa(args.file)
    t = trim(a)
    s = _support(t, args.support)
    lam = None if args.lambda_ is None else Fraction(args.lambda_)
    c = build_constraints(t, s, lam)
    return EXIT_YES, export_constraints(c, args.format), text


def cmd_unary(args):
    a, text = _load_nfa(args.file)
    r = unary_check_pr(a)
    rep = {"resolvable": r.resolvable, "verdict": "Yes" if r.resolvable else "No",
           "support": None if r.support is None else sorted(r.support),
           "failing": [{"support": sorted(s), "residue": k, "period": T} for s, k, T in r.failing]}
    if r.resolver is not None:
        rep["resolver"] = format_resolver(r.resolver)
    return (EXIT_YES if r.resolvable else EXIT_NO), rep, text


def cmd_markov(args):
    text = _read(args.file)
    if text.lstrip().startswith("matrix"):
        P, I = parse_matrix(text)
        names = [str(i) for i in range(len(P))]
    else:
        obj = parse_automaton(text)
        if not isinstance(obj, Pfa):
            raise UsageError("markov needs a matrix block or a single-letter pfa")
        P, I, _ = chain_of(obj)
        names = list(obj.host.states) + ["<sink>"]
    r = markov_limits(P, I, args.period_cap)
    rep = {"period": r.period_T, "states": names,
           "limits": [[_q(x) for x in row] for row in r.limits],
           "classification": dict(zip(names, r.classification)),
           "stationary": [{names[q]: _q(x) for q, x in zip(c, tau)} for c, tau in zip(r.classes, r.stationary)],
           "masses": [[_q(x) for x in m] for m in r.masses]}
    return EXIT_YES, rep, text


def cmd_gen(args):
    kind, params = args.kind, args.params
    if kind == "spectrum":
        if len(params) != 2:
            raise UsageError("gen spectrum M N")
        a = gen_spectrum(int(params[0]), int(params[1]))
    elif kind == "unary-hard":
        if len(params) != 1:
            raise UsageError("gen unary-hard SPEC (e.g. 2:all,3:0.2)")
        a = gen_unary_hardness(parse_cycle_spec(params[0]))
    elif kind == "pspace-hard":
        a = gen_pspace_hardness([_load_nfa(p)[0] for p in params])
    elif kind == "undec":
        if len(params) != 1:
            raise UsageError("gen undec FILE")
        a = gen_undecidability(_load(params[0])[0])
    else:
        raise UsageError(f"unknown generator {kind}")
    return EXIT_YES, format_automaton(a), ""


def cmd_dot(args):
    obj, text = _load(args.file)
    if args.gamma:
        a = trim(obj.host if isinstance(obj, Pfa) else obj)
        s = _support(a, args.support)
        k = classify_ambiguity(a.restrict(s)).degree or 1
        return EXIT_YES, dotmod.gamma_dot(build_run_automaton(a, s, k)), text
    s = None if args.support is None else _support(obj.host if isinstance(obj, Pfa) else obj, args.support)
    return EXIT_YES, dotmod.automaton_dot(obj, s), text


def cmd_verify(args):
    a, text = _load_nfa(args.file)
    t = trim(a)
    if args.witness is not None:
        s = _support(t, args.support)
        w = parse_witness(t, args.witness)
        v = verify_bad_word(t, s, w)
        rep = {"kind": "bad-word", "ok": v.ok, "diagnostics": list(v.diagnostics)}
        return (EXIT_YES if v.ok else EXIT_NO), rep, text
    if args.resolver is not None:
        if args.lambda_ is None:
            raise UsageError("verify --resolver needs --lambda")
        r = parse_resolver(_read(args.resolver), t)
        ok = certify_resolver(t, r, Fraction(args.lambda_))
        rep = {"kind": "resolver", "ok": ok, "lambda": _q(Fraction(args.lambda_))}
        return (EXIT_YES if ok else EXIT_NO), rep, text
    raise UsageError("verify needs --witness or --resolver")


# --- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="resolvex", description="Stochastic resolvability of nondeterministic automata.")
    p.add_argument("--timing", action="store_true", help="add wall-clock timing to reports")
    p.add_argument("--text", action="store_true", help="key: value output instead of JSON")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(fn=fn)
        return sp

    sp = add("classify", cmd_classify, "degree of ambiguity")
    sp.add_argument("file")
    sp.add_argument("--degree-cap", type=int, default=8)

    sp = add("check-pr", cmd_check_pr, "positive resolvability")
    sp.add_argument("file")
    sp.add_argument("--max-bad-word-len", type=int, default=None)
    sp.add_argument("--jobs", type=int, default=1)

    def optim(sp):
        sp.add_argument("--starts", type=int, default=8)
        sp.add_argument("--iters", type=int, default=300)
        sp.add_argument("--tol", type=float, default=1e-12)
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--jobs", type=int, default=1)

    sp = add("lambda", cmd_lambda, "maximize or test a threshold")
    sp.add_argument("file")
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--maximize", action="store_true")
    g.add_argument("--lambda", dest="lambda_")
    optim(sp)

    sp = add("check-lambda", cmd_check_lambda, "test a threshold")
    sp.add_argument("file")
    sp.add_argument("threshold")
    optim(sp)

    sp = add("synthesize", cmd_synthesize, "optimal resolver for an unambiguous automaton")
    sp.add_argument("file")

    sp = add("eval", cmd_eval, "acceptance probability of a word")
    sp.add_argument("file")
    sp.add_argument("--resolver")
    sp.add_argument("--word", required=True)
    sp.add_argument("--mc", type=int, default=0)
    sp.add_argument("--seed", type=int, default=None)

    sp = add("primitives", cmd_primitives, "primitive words of a support")
    sp.add_argument("file")
    sp.add_argument("--support")
    sp.add_argument("--length-cap", type=int, default=None)

    sp = add("constraints", cmd_constraints, "export the constraint system")
    sp.add_argument("file")
    sp.add_argument("--format", choices=("native", "smt"), default="native")
    sp.add_argument("--support")
    sp.add_argument("--lambda", dest="lambda_")

    sp = add("unary", cmd_unary, "positive resolvability over one letter")
    sp.add_argument("file")

    sp = add("markov", cmd_markov, "exact limit distributions of a chain")
    sp.add_argument("file")
    sp.add_argument("--period-cap", type=int, default=10 ** 4)

    sp = add("gen", cmd_gen, "generate constructions")
    sp.add_argument("kind", choices=("spectrum", "unary-hard", "pspace-hard", "undec"))
    sp.add_argument("params", nargs="*")

    sp = add("dot", cmd_dot, "Graphviz export")
    sp.add_argument("file")
    sp.add_argument("--gamma", action="store_true")
    sp.add_argument("--support")

    sp = add("verify", cmd_verify, "re-check a certificate")
    sp.add_argument("file")
    sp.add_argument("--witness")
    sp.add_argument("--support")
    sp.add_argument("--resolver")
    sp.add_argument("--lambda", dest="lambda_")
    return p


def _render(report, args, digest: str) -> str:
    if isinstance(report, str):
        return report
    full = {"command": args.command, "input_digest": digest, **report}
    if args.text:
        lines = []
        for k in sorted(full):
            v = full[k]
            lines.append(f"{k}: {v if isinstance(v, str) else json.dumps(v, sort_keys=True)}")
        return "\n".join(lines) + "\n"
    return json.dumps(full, sort_keys=True, indent=2) + "\n"


def run(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        code, report, text = args.fn(args)
    except UsageError as e:
        print(f"usage error: {e}", file=err)
        return EXIT_USAGE
    except FileNotFoundError as e:
        print(f"error: {e}", file=err)
        return EXIT_NOINPUT
    except ResolvexError as e:
        print(f"error: {type(e).__name__}: {e}", file=err)
        return e.exit_code
    except (ValueError, ZeroDivisionError) as e:
        print(f"error: {e}", file=err)
        return 65
    out.write(_render(report, args, _digest(text or "")))
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
