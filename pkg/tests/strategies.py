"""Hypothesis strategies for random expressions over two canonical pairs."""

from fractions import Fraction

from hypothesis import strategies as st

from comodsys.expr import add, exp, momentum, mul, position, power

SYMS = [position(1), position(2), momentum(1), momentum(2)]

small_fractions = st.fractions(min_value=-5, max_value=5, max_denominator=6)


def _leaf():
    return st.one_of(st.sampled_from(SYMS), small_fractions.map(lambda v: mul(v)))


def _extend(children):
    return st.one_of(
        st.tuples(children, children).map(lambda t: add(*t)),
        st.tuples(children, children).map(lambda t: mul(*t)),
        st.tuples(children, st.integers(min_value=-2, max_value=3)).map(lambda t: power(t[0], t[1])),
        children.map(lambda c: exp(mul(Fraction(1, 4), c))),
    )


exprs = st.recursive(_leaf(), _extend, max_leaves=8)
polys = st.recursive(
    _leaf(),
    lambda ch: st.one_of(
        st.tuples(ch, ch).map(lambda t: add(*t)),
        st.tuples(ch, ch).map(lambda t: mul(*t)),
        st.tuples(ch, st.integers(min_value=0, max_value=3)).map(lambda t: power(t[0], t[1])),
    ),
    max_leaves=8,
)
