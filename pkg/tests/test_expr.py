import math
from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import assume, given
from hypothesis import strategies as st

from comodsys.errors import DomainError, InexactError, UnboundSymbol
from comodsys.expr import (
    ONE,
    ZERO,
    Const,
    Kind,
    Pow,
    Symbol,
    add,
    compile_exprs,
    count_nodes,
    differentiate,
    evaluate,
    evaluate_exact,
    exp,
    generator,
    momentum,
    mul,
    parameter,
    position,
    power,
    singular_bases,
    sqrt,
    substitute,
    to_string,
)
from comodsys.modelfile import Namespace, parse_expr
from strategies import SYMS, exprs, polys

q1, q2, p1, p2 = SYMS
NS = Namespace(frozenset({"J3", "Jp"}), frozenset({"a12", "z"}))


def to_sympy(e):
    return sympy.sympify(to_string(e), locals={s.ident: sympy.Symbol(s.ident) for s in SYMS})


def point(seed):
    rng = np.random.default_rng(seed)
    return {s: float(rng.uniform(0.3, 1.2)) for s in SYMS}


def safe_eval(e, b):
    try:
        v = evaluate(e, b)
    except DomainError:
        return None
    return v if math.isfinite(v) and abs(v) < 1e8 else None


# -- construction ------------------------------------------------------------

def test_symbol_identity_and_kinds():
    assert position(1) == Symbol("q", Kind.POSITION, 1)
    assert position(1) != momentum(1)
    assert generator("J3", 2).ident == "J3_2"
    assert position(3).ident == "q3"
    assert parameter("a12").ident == "a12"
    with pytest.raises(ValueError):
        Symbol("q", Kind.POSITION)
    with pytest.raises(ValueError):
        Symbol("c", Kind.PARAMETER, 1)


def test_builders_collect_like_terms():
    assert add(q1, q1) == mul(2, q1)
    assert add(q1, mul(-1, q1)) == ZERO
    assert mul(q1, q1) == power(q1, 2)
    assert mul(q1, power(q1, -1)) == ONE
    assert mul(0, q1) == ZERO
    assert power(q1, 0) == ONE
    assert power(Const(4), Fraction(1, 2)) == Const(2)
    assert isinstance(power(Const(2), Fraction(1, 2)), Pow)
    assert exp(0) == ONE
    assert mul(exp(q1), exp(mul(-1, q1))) == ONE
    assert power(exp(q1), 2) == exp(mul(2, q1))


def test_operators_match_builders():
    assert q1 + 2 * p1 - q1 == mul(2, p1)
    assert (q1 * p1) / p1 == q1
    assert (-q1) ** 2 == power(q1, 2)
    assert 1 - q1 == add(1, mul(-1, q1))


def test_hash_is_stable_for_equal_trees():
    a = add(mul(2, q1), power(p1, 3))
    b = add(mul(2, q1), power(p1, 3))
    assert a == b and hash(a) == hash(b)
    assert len({a, b}) == 1


# -- calculus ----------------------------------------------------------------

def test_derivative_examples():
    assert differentiate(power(q1, 3), q1) == mul(3, power(q1, 2))
    assert differentiate(exp(mul(2, q1)), q1) == mul(2, exp(mul(2, q1)))
    assert differentiate(p1, q1) == ZERO
    assert differentiate(sqrt(q1), q1) == mul(Fraction(1, 2), power(q1, Fraction(-1, 2)))


@given(exprs, st.sampled_from(SYMS), st.integers(0, 10**6))
def test_derivative_agrees_with_sympy(e, x, seed):
    b = point(seed)
    mine = safe_eval(differentiate(e, x), b)
    assume(mine is not None)
    ref = float(sympy.diff(to_sympy(e), sympy.Symbol(x.ident)).subs({sympy.Symbol(s.ident): v for s, v in b.items()}))
    assert mine == pytest.approx(ref, rel=1e-8, abs=1e-8)


@given(exprs, st.integers(0, 10**6))
def test_evaluate_agrees_with_sympy(e, seed):
    b = point(seed)
    mine = safe_eval(e, b)
    assume(mine is not None)
    ref = complex(to_sympy(e).subs({sympy.Symbol(s.ident): v for s, v in b.items()}).evalf())
    assert mine == pytest.approx(ref.real, rel=1e-9, abs=1e-9)


@given(polys, polys, st.integers(0, 10**6))
def test_product_rule(f, g, seed):
    d = differentiate(mul(f, g), q1)
    rhs = add(mul(differentiate(f, q1), g), mul(f, differentiate(g, q1)))
    b = point(seed)
    a, c = safe_eval(d, b), safe_eval(rhs, b)
    assume(a is not None and c is not None)
    assert a == pytest.approx(c, rel=1e-9, abs=1e-9)


@given(exprs, exprs, st.integers(0, 10**6))
def test_substitution_commutes_with_evaluation(e, r, seed):
    b = point(seed)
    rv = safe_eval(r, b)
    assume(rv is not None)
    lhs = safe_eval(substitute(e, {q1: r}), b)
    rhs = safe_eval(e, {**b, q1: rv})
    assume(lhs is not None and rhs is not None)
    assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-9)


def test_substitution_is_simultaneous():
    e = add(q1, mul(2, p1))
    assert substitute(e, {q1: p1, p1: q1}) == add(p1, mul(2, q1))


# -- evaluation --------------------------------------------------------------

def test_exact_evaluation():
    e = add(power(q1, -1), mul(Fraction(1, 3), p1))
    assert evaluate_exact(e, {q1: Fraction(2), p1: Fraction(3, 5)}) == Fraction(7, 10)
    assert evaluate_exact(sqrt(q1), {q1: Fraction(9, 4)}) == Fraction(3, 2)
    with pytest.raises(InexactError):
        evaluate_exact(sqrt(q1), {q1: Fraction(2)})
    with pytest.raises(DomainError):
        evaluate_exact(power(q1, -1), {q1: Fraction(0)})
    with pytest.raises(UnboundSymbol):
        evaluate_exact(q1, {})


def test_float_domain_errors():
    with pytest.raises(DomainError):
        evaluate(sqrt(q1), {q1: -1.0})
    with pytest.raises(DomainError):
        evaluate(power(q1, -2), {q1: 0.0})


@given(exprs, st.integers(0, 10**6))
def test_compiled_matches_tree_walk(e, seed):
    b = point(seed)
    v = safe_eval(e, b)
    assume(v is not None)
    fn = compile_exprs([e], SYMS)
    np_fn = compile_exprs([e], SYMS, backend="numpy")
    assert fn(*(b[s] for s in SYMS))[0] == pytest.approx(v, rel=1e-12, abs=1e-12)
    arr = np_fn(*(np.array([b[s]]) for s in SYMS))[0]
    assert float(np.asarray(arr).ravel()[0]) == pytest.approx(v, rel=1e-12, abs=1e-12)


def test_singular_bases_and_sharing():
    e = add(power(add(q1, q2), -2), sqrt(p1), q1)
    found = dict(singular_bases([e]))
    assert found == {add(q1, q2): False, p1: True}
    shared = mul(add(q1, p1), add(q1, p1))
    assert count_nodes(shared) < 6


# -- printing and parsing ------------------------------------------------------

def test_to_string_examples():
    assert to_string(add(mul(2, q1), mul(-1, p1))) == "2*q1 - p1"
    assert to_string(power(q1, Fraction(-1, 2))) == "q1**(-1/2)"
    assert to_string(exp(mul(-2, q1))) == "exp((-2)*q1)"
    assert to_string(mul(Fraction(1, 2), generator("J3", 1))) == "(1/2)*J3_1"


@given(exprs)
def test_print_parse_round_trip(e):
    assert parse_expr(to_string(e), NS) == e


def test_parse_resolves_declared_names():
    e = parse_expr("a12*J3_1 + Jp - z*q2/p1", NS)
    assert {s.ident for s in e.symbols} == {"a12", "J3_1", "Jp", "z", "q2", "p1"}
    assert generator("J3", 1) in e.symbols
    assert parameter("z") in e.symbols


@pytest.mark.parametrize("text", ["foo + 1", "q1**p1", "abs(q1)", "q1 if p1 else p2", "J3_"])
def test_parse_rejects_bad_input(text):
    from comodsys.errors import ModelFileError

    with pytest.raises(ModelFileError):
        parse_expr(text, NS)
