"""Exact q-coefficients.

Elements are ``a + b*s`` with ``a, b`` rational functions of ``t = q^(1/2)``
over the rationals and ``s`` a formal square root of ``q - 1/q``.  Working
with ``t`` lets half-integer powers of ``q`` stay polynomial.  The rational
function field comes from sympy.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from sympy import QQ, Rational, symbols
from sympy.polys.fields import field

T_FIELD, t = field("t", QQ)
_ZERO = T_FIELD(0)
_ONE = T_FIELD(1)
# s^2 = q - q^-1 = t^2 - t^-2
S_SQUARED = t**2 - t**-2


@lru_cache(maxsize=256)
def _t_power(n: int):
    return t**n


def q_power_field(e) -> object:
    """``q^e`` as a field element; ``e`` must be a multiple of 1/2."""
    e = Fraction(e)
    n = 2 * e
    if n.denominator != 1:
        raise ValueError(f"q-exponent {e} is not a multiple of 1/2")
    return _t_power(int(n))


class QCoeff:
    __slots__ = ("a", "b")

    def __init__(self, a=_ZERO, b=_ZERO):
        self.a = a if not isinstance(a, (int, Fraction)) else _from_rational(a)
        self.b = b if not isinstance(b, (int, Fraction)) else _from_rational(b)

    # constructors ---------------------------------------------------------
    @staticmethod
    def rational(v) -> "QCoeff":
        return QCoeff(_from_rational(v))

    @staticmethod
    def q(e=1) -> "QCoeff":
        """``q^e``."""
        return QCoeff(q_power_field(e))

    @staticmethod
    def s() -> "QCoeff":
        """The formal square root of ``q - q^-1``."""
        return QCoeff(_ZERO, _ONE)

    @staticmethod
    def from_field(a, b=_ZERO) -> "QCoeff":
        return QCoeff(a, b)

    # predicates -----------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.a and not self.b

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        other = _coerce(other)
        return self.a == other.a and self.b == other.b

    def __hash__(self):
        return hash((self.a, self.b))

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        other = _coerce(other)
        return QCoeff(self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __neg__(self):
        return QCoeff(-self.a, -self.b)

    def __sub__(self, other):
        other = _coerce(other)
        return QCoeff(self.a - other.a, self.b - other.b)

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        other = _coerce(other)
        if not self.b and not other.b:
            return QCoeff(self.a * other.a)
        a = self.a * other.a + self.b * other.b * S_SQUARED
        b = self.a * other.b + self.b * other.a
        return QCoeff(a, b)

    __rmul__ = __mul__

    def inverse(self) -> "QCoeff":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero q-coefficient")
        if not self.b:
            return QCoeff(1 / self.a)
        norm = self.a * self.a - self.b * self.b * S_SQUARED
        return QCoeff(self.a / norm, -self.b / norm)

    def __truediv__(self, other):
        return self * _coerce(other).inverse()

    def __rtruediv__(self, other):
        return _coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = QCoeff(_ONE)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # evaluation -----------------------------------------------------------
    def at_q_one(self) -> Fraction:
        """Value at ``q = 1`` (where ``s = 0``)."""
        dv = self.a.denom(1)
        if dv == 0:
            raise ZeroDivisionError("coefficient has a pole at q = 1")
        v = QQ.convert(self.a.numer(1)) / QQ.convert(dv)
        return Fraction(int(QQ.numer(v)), int(QQ.denom(v)))

    def evaluate(self, q_value: float) -> complex:
        """Numeric value at a positive ``q`` (``s`` taken as the principal root)."""
        tv = q_value ** 0.5
        av = float(self.a.as_expr().subs("t", tv)) if self.a else 0.0
        bv = float(self.b.as_expr().subs("t", tv)) if self.b else 0.0
        sv = complex(q_value - 1 / q_value) ** 0.5
        return av + bv * sv

    def __str__(self):
        parts = []
        if self.a:
            parts.append(_fmt_field(self.a))
        if self.b:
            parts.append(f"({_fmt_field(self.b)})*s")
        return " + ".join(parts) if parts else "0"

    def __repr__(self):
        return f"QCoeff({self})"

    def to_json(self) -> list[str]:
        return [str(self.a.as_expr()), str(self.b.as_expr())]

    @staticmethod
    def from_json(data) -> "QCoeff":
        a, b = data
        return QCoeff(T_FIELD.from_expr(_parse(a)), T_FIELD.from_expr(_parse(b)))


def _parse(text: str):
    from sympy import sympify

    return sympify(text, locals={"t": symbols("t")})


def _fmt_field(x) -> str:
    q_expr = x.as_expr().subs(symbols("t"), symbols("q") ** Rational(1, 2))
    return str(q_expr)


def _from_rational(v):
    v = Fraction(v)
    return T_FIELD(QQ(v.numerator, v.denominator))


def _coerce(x) -> QCoeff:
    if isinstance(x, QCoeff):
        return x
    if isinstance(x, (int, Fraction)):
        return QCoeff(_from_rational(x))
    return QCoeff(T_FIELD(x))


ZERO = QCoeff()
ONE = QCoeff(_ONE)
