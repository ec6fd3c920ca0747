"""Immutable commutative expression trees with exact rational constants.

Nodes are plain immutable objects; the raw constructors (``Const``, ``Add``,
``Mul``, ``Pow``, ``Exp``) store exactly what they are given.  The builder
functions ``add``, ``mul``, ``power`` and ``exp`` (and the Python operators
on ``Expr``) apply the light normalisation of :func:`simplify_basic` while
building, which keeps derivative and substitution output small.

Hashes avoid Python's per-process string hashing, so set and dict orders,
and with them floating-point summation orders, repeat from run to run.

Equality of expressions in the mathematical sense is *not* decided here; see
:mod:`comodsys.sampling` for randomized equality testing.
"""

from __future__ import annotations

import math
import zlib
from enum import Enum
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping

from .errors import DomainError, InexactError, UnboundSymbol

Scalar = Fraction


def as_scalar(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite constant {value!r}")
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"cannot interpret {value!r} as an exact scalar")


class Kind(str, Enum):
    POSITION = "position"
    MOMENTUM = "momentum"
    GENERATOR = "generator"
    PARAMETER = "parameter"


class Expr:
    """Base class of all expression nodes."""

    __slots__ = ("_hash", "symbols")

    # -- operators build through the simplifying builders -----------------
    def __add__(self, other):
        return add(self, _coerce(other))

    def __radd__(self, other):
        return add(_coerce(other), self)

    def __sub__(self, other):
        return add(self, mul(Const(-1), _coerce(other)))

    def __rsub__(self, other):
        return add(_coerce(other), mul(Const(-1), self))

    def __mul__(self, other):
        return mul(self, _coerce(other))

    def __rmul__(self, other):
        return mul(_coerce(other), self)

    def __truediv__(self, other):
        return mul(self, power(_coerce(other), -1))

    def __rtruediv__(self, other):
        return mul(_coerce(other), power(self, -1))

    def __neg__(self):
        return mul(Const(-1), self)

    def __pos__(self):
        return self

    def __pow__(self, exponent):
        return power(self, exponent)

    def __hash__(self):
        return self._hash

    def __str__(self):
        return to_string(self)

    def __repr__(self):
        return f"{type(self).__name__}({to_string(self)})"

    @property
    def children(self) -> tuple["Expr", ...]:
        return ()

    def free(self, *kinds: Kind) -> frozenset["Symbol"]:
        """Symbols of the given kinds (all symbols when no kind is given)."""
        if not kinds:
            return self.symbols
        return frozenset(s for s in self.symbols if s.kind in kinds)


def _coerce(value) -> Expr:
    if isinstance(value, Expr):
        return value
    return Const(as_scalar(value))


class Const(Expr):
    __slots__ = ("value",)
    __hash__ = Expr.__hash__

    def __init__(self, value):
        self.value = as_scalar(value)
        self.symbols = frozenset()
        self._hash = hash((1, self.value))

    def __eq__(self, other):
        return self is other or (isinstance(other, Const) and self.value == other.value)


class Symbol(Expr):
    """A named variable.

    ``site`` is the tensor leg of a generator, or the particle index of a
    canonical coordinate.  Parameters never carry a site.
    """

    __slots__ = ("name", "kind", "site")
    __hash__ = Expr.__hash__

    def __init__(self, name: str, kind: Kind = Kind.GENERATOR, site: int | None = None):
        kind = Kind(kind)
        if kind in (Kind.POSITION, Kind.MOMENTUM) and site is None:
            raise ValueError("canonical coordinates need a site index")
        if kind is Kind.PARAMETER and site is not None:
            raise ValueError("parameters carry no site index")
        if site is not None and site < 0:
            raise ValueError("site indices are non-negative")
        self.name = name
        self.kind = kind
        self.site = site
        self._hash = hash((2, zlib.crc32(f"{name}|{kind.value}".encode()), -1 if site is None else site))
        self.symbols = frozenset((self,))

    def __eq__(self, other):
        return self is other or (
            isinstance(other, Symbol)
            and self.name == other.name
            and self.kind is other.kind
            and self.site == other.site
        )

    @property
    def ident(self) -> str:
        if self.site is None:
            return self.name
        if self.kind in (Kind.POSITION, Kind.MOMENTUM):
            return f"{self.name}{self.site}"
        return f"{self.name}_{self.site}"

    def on_site(self, site: int | None) -> "Symbol":
        return Symbol(self.name, self.kind, site)

    @property
    def is_canonical(self) -> bool:
        return self.kind in (Kind.POSITION, Kind.MOMENTUM)


class Add(Expr):
    __slots__ = ("terms",)
    __hash__ = Expr.__hash__

    def __init__(self, terms: Iterable[Expr]):
        self.terms = tuple(terms)
        self.symbols = frozenset().union(*(t.symbols for t in self.terms))
        self._hash = hash((3, self.terms))

    def __eq__(self, other):
        return self is other or (
            isinstance(other, Add) and self._hash == other._hash and self.terms == other.terms
        )

    @property
    def children(self):
        return self.terms


class Mul(Expr):
    __slots__ = ("factors",)
    __hash__ = Expr.__hash__

    def __init__(self, factors: Iterable[Expr]):
        self.factors = tuple(factors)
        self.symbols = frozenset().union(*(f.symbols for f in self.factors))
        self._hash = hash((4, self.factors))

    def __eq__(self, other):
        return self is other or (
            isinstance(other, Mul) and self._hash == other._hash and self.factors == other.factors
        )

    @property
    def children(self):
        return self.factors


class Pow(Expr):
    __slots__ = ("base", "exponent")
    __hash__ = Expr.__hash__

    def __init__(self, base: Expr, exponent):
        self.base = base
        self.exponent = as_scalar(exponent)
        self.symbols = base.symbols
        self._hash = hash((5, base, self.exponent))

    def __eq__(self, other):
        return self is other or (
            isinstance(other, Pow)
            and self._hash == other._hash
            and self.exponent == other.exponent
            and self.base == other.base
        )

    @property
    def children(self):
        return (self.base,)


class Exp(Expr):
    __slots__ = ("arg",)
    __hash__ = Expr.__hash__

    def __init__(self, arg: Expr):
        self.arg = arg
        self.symbols = arg.symbols
        self._hash = hash((6, arg))

    def __eq__(self, other):
        return self is other or (
            isinstance(other, Exp) and self._hash == other._hash and self.arg == other.arg
        )

    @property
    def children(self):
        return (self.arg,)


ZERO = Const(0)
ONE = Const(1)


# ---------------------------------------------------------------------------
# symbol helpers
# ---------------------------------------------------------------------------

def position(i: int) -> Symbol:
    return Symbol("q", Kind.POSITION, i)


def momentum(i: int) -> Symbol:
    return Symbol("p", Kind.MOMENTUM, i)


def generator(name: str, site: int | None = None) -> Symbol:
    return Symbol(name, Kind.GENERATOR, site)


def parameter(name: str) -> Symbol:
    return Symbol(name, Kind.PARAMETER)


def const(value) -> Const:
    return Const(as_scalar(value))


# ---------------------------------------------------------------------------
# simplifying builders
# ---------------------------------------------------------------------------

def _split_coefficient(term: Expr) -> tuple[Fraction, Expr | None]:
    if isinstance(term, Const):
        return term.value, None
    if isinstance(term, Mul) and isinstance(term.factors[0], Const):
        rest = term.factors[1:]
        core = rest[0] if len(rest) == 1 else Mul(rest)
        return term.factors[0].value, core
    return Fraction(1), term


def _scaled(coef: Fraction, core: Expr) -> Expr:
    if coef == 1:
        return core
    if isinstance(core, Mul):
        return Mul((Const(coef),) + core.factors)
    return Mul((Const(coef), core))


def add(*terms) -> Expr:
    flat: list[Expr] = []
    stack = [_coerce(t) for t in reversed(terms)]
    while stack:
        t = stack.pop()
        if isinstance(t, Add):
            stack.extend(reversed(t.terms))
        else:
            flat.append(t)
    constant = Fraction(0)
    collected: dict[Expr, Fraction] = {}
    for t in flat:
        c, core = _split_coefficient(t)
        if core is None:
            constant += c
        else:
            collected[core] = collected.get(core, Fraction(0)) + c
    out = [_scaled(c, core) for core, c in collected.items() if c != 0]
    if constant != 0:
        out.append(Const(constant))
    if not out:
        return ZERO
    if len(out) == 1:
        return out[0]
    return Add(out)


def mul(*factors) -> Expr:
    flat: list[Expr] = []
    stack = [_coerce(f) for f in reversed(factors)]
    while stack:
        f = stack.pop()
        if isinstance(f, Mul):
            stack.extend(reversed(f.factors))
        else:
            flat.append(f)
    coef = Fraction(1)
    bases: dict[Expr, Fraction] = {}
    exp_args: list[Expr] = []
    for f in flat:
        if isinstance(f, Const):
            coef *= f.value
            continue
        if isinstance(f, Exp):
            exp_args.append(f.arg)
            continue
        if isinstance(f, Pow):
            base, e = f.base, f.exponent
        else:
            base, e = f, Fraction(1)
        bases[base] = bases.get(base, Fraction(0)) + e
    if coef == 0:
        return ZERO
    out: list[Expr] = []
    for base, e in bases.items():
        p = power(base, e)
        if isinstance(p, Const):
            coef *= p.value
        elif isinstance(p, Mul):
            for g in p.factors:
                if isinstance(g, Const):
                    coef *= g.value
                else:
                    out.append(g)
        else:
            out.append(p)
    if exp_args:
        e = exp(add(*exp_args))
        if isinstance(e, Const):
            coef *= e.value
        else:
            out.append(e)
    if coef == 0:
        return ZERO
    if not out:
        return Const(coef)
    if coef != 1:
        out.insert(0, Const(coef))
    if len(out) == 1:
        return out[0]
    return Mul(out)


def _exact_root(value: Fraction, n: int) -> Fraction | None:
    if value < 0:
        return None
    num = _int_root(value.numerator, n)
    den = _int_root(value.denominator, n)
    if num is None or den is None:
        return None
    return Fraction(num, den)


def _int_root(x: int, n: int) -> int | None:
    if x in (0, 1):
        return x
    r = round(x ** (1.0 / n))
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand**n == x:
            return cand
    # fall back to integer Newton for large values
    lo, hi = 0, 1 << ((x.bit_length() + n - 1) // n + 1)
    while lo < hi:
        mid = (lo + hi) // 2
        if mid**n < x:
            lo = mid + 1
        else:
            hi = mid
    return lo if lo**n == x else None


def _const_power(value: Fraction, e: Fraction) -> Fraction | None:
    if e.denominator == 1:
        if value == 0 and e < 0:
            return None
        return value ** int(e)
    root = _exact_root(value, e.denominator)
    if root is None:
        return None
    if root == 0 and e < 0:
        return None
    return root ** e.numerator


def power(base, exponent) -> Expr:
    base = _coerce(base)
    e = as_scalar(exponent)
    if e == 0:
        return ONE
    if e == 1:
        return base
    if isinstance(base, Const):
        folded = _const_power(base.value, e)
        return Pow(base, e) if folded is None else Const(folded)
    if isinstance(base, Exp):
        return exp(mul(Const(e), base.arg))
    if e.denominator == 1:
        if isinstance(base, Pow):
            return power(base.base, base.exponent * e)
        if isinstance(base, Mul):
            return mul(*(power(f, e) for f in base.factors))
    return Pow(base, e)


def exp(arg) -> Expr:
    arg = _coerce(arg)
    if isinstance(arg, Const) and arg.value == 0:
        return ONE
    return Exp(arg)


def sqrt(x) -> Expr:
    return power(x, Fraction(1, 2))


def total(items: Iterable) -> Expr:
    return add(*items)


def product(items: Iterable) -> Expr:
    return mul(*items)


# ---------------------------------------------------------------------------
# tree operations
# ---------------------------------------------------------------------------

def simplify_basic(e: Expr) -> Expr:
    """Rebuild ``e`` bottom-up through the simplifying builders."""
    memo: dict[int, Expr] = {}

    def go(node: Expr) -> Expr:
        key = id(node)
        if key in memo:
            return memo[key]
        if isinstance(node, Add):
            out = add(*(go(t) for t in node.terms))
        elif isinstance(node, Mul):
            out = mul(*(go(f) for f in node.factors))
        elif isinstance(node, Pow):
            out = power(go(node.base), node.exponent)
        elif isinstance(node, Exp):
            out = exp(go(node.arg))
        else:
            out = node
        memo[key] = out
        return out

    return go(e)


def differentiate(e: Expr, x: Symbol, _memo: dict | None = None) -> Expr:
    """Exact partial derivative of ``e`` with respect to ``x``."""
    memo = {} if _memo is None else _memo

    def go(node: Expr) -> Expr:
        if x not in node.symbols:
            return ZERO
        if isinstance(node, Symbol):
            return ONE
        key = id(node)
        hit = memo.get(key)
        if hit is not None:
            return hit[1]
        if isinstance(node, Add):
            out = add(*(go(t) for t in node.terms))
        elif isinstance(node, Mul):
            fs = node.factors
            parts = []
            for i, f in enumerate(fs):
                if x in f.symbols:
                    parts.append(mul(*fs[:i], go(f), *fs[i + 1:]))
            out = add(*parts)
        elif isinstance(node, Pow):
            out = mul(Const(node.exponent), power(node.base, node.exponent - 1), go(node.base))
        elif isinstance(node, Exp):
            out = mul(node, go(node.arg))
        else:  # pragma: no cover - every node type handled above
            raise TypeError(type(node))
        # keep the node alive so id() stays unique for the memo's lifetime
        memo[key] = (node, out)
        return out

    return go(e)


def substitute(e: Expr, rules: Mapping[Symbol, Expr]) -> Expr:
    """Simultaneous substitution; replacement output is never re-substituted."""
    if not rules:
        return e
    rules = {k: _coerce(v) for k, v in rules.items()}
    keys = frozenset(rules)
    memo: dict[int, tuple[Expr, Expr]] = {}

    def go(node: Expr) -> Expr:
        if not (node.symbols & keys):
            return node
        if isinstance(node, Symbol):
            return rules[node]
        key = id(node)
        hit = memo.get(key)
        if hit is not None:
            return hit[1]
        if isinstance(node, Add):
            out = add(*(go(t) for t in node.terms))
        elif isinstance(node, Mul):
            out = mul(*(go(f) for f in node.factors))
        elif isinstance(node, Pow):
            out = power(go(node.base), node.exponent)
        elif isinstance(node, Exp):
            out = exp(go(node.arg))
        else:  # pragma: no cover
            raise TypeError(type(node))
        memo[key] = (node, out)
        return out

    return go(e)


def walk(e: Expr):
    """Yield every distinct node of ``e`` once (children before parents)."""
    seen: set[int] = set()
    stack: list[tuple[Expr, bool]] = [(e, False)]
    while stack:
        node, expanded = stack.pop()
        if id(node) in seen:
            continue
        if expanded:
            seen.add(id(node))
            yield node
            continue
        stack.append((node, True))
        for c in reversed(node.children):
            if id(c) not in seen:
                stack.append((c, False))


def count_nodes(e: Expr) -> int:
    return sum(1 for _ in walk(e))


def singular_bases(exprs: Iterable[Expr]) -> list[tuple[Expr, bool]]:
    """Bases of negative or fractional powers: ``(base, is_fractional)``.

    These are the subexpressions whose magnitude the sampler and the
    integrator's singularity guard keep away from zero.
    """
    found: dict[Expr, bool] = {}
    for e in exprs:
        for node in walk(e):
            if isinstance(node, Pow) and not isinstance(node.base, Const):
                frac = node.exponent.denominator != 1
                if node.exponent < 0 or frac:
                    found[node.base] = found.get(node.base, False) or frac
    return list(found.items())


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def evaluate(e: Expr, binding: Mapping[Symbol, float]) -> float:
    """IEEE double value of ``e``."""
    memo: dict[int, float] = {}

    def go(node: Expr) -> float:
        key = id(node)
        if key in memo:
            return memo[key]
        if isinstance(node, Const):
            out = float(node.value)
        elif isinstance(node, Symbol):
            try:
                out = float(binding[node])
            except KeyError:
                raise UnboundSymbol(node) from None
        elif isinstance(node, Add):
            out = math.fsum(go(t) for t in node.terms)
        elif isinstance(node, Mul):
            out = 1.0
            for f in node.factors:
                out *= go(f)
        elif isinstance(node, Pow):
            b = go(node.base)
            out = _float_pow(b, node.exponent)
        elif isinstance(node, Exp):
            try:
                out = math.exp(go(node.arg))
            except OverflowError:
                raise DomainError("exp overflow") from None
        else:  # pragma: no cover
            raise TypeError(type(node))
        memo[key] = out
        return out

    return go(e)


def _float_pow(b: float, e: Fraction) -> float:
    if e.denominator != 1 and b < 0:
        raise DomainError(f"fractional power {e} of negative base {b}")
    if b == 0 and e < 0:
        raise DomainError("division by zero")
    try:
        if e.denominator == 1:
            return b ** int(e)
        if e == Fraction(1, 2):
            return math.sqrt(b)
        return b ** float(e)
    except (ZeroDivisionError, OverflowError) as exc:
        raise DomainError(str(exc)) from None


def evaluate_exact(e: Expr, binding: Mapping[Symbol, Fraction]) -> Fraction:
    """Exact rational value; poles and irrational results raise."""
    memo: dict[int, Fraction] = {}

    def go(node: Expr) -> Fraction:
        key = id(node)
        if key in memo:
            return memo[key]
        if isinstance(node, Const):
            out = node.value
        elif isinstance(node, Symbol):
            try:
                out = as_scalar(binding[node])
            except KeyError:
                raise UnboundSymbol(node) from None
        elif isinstance(node, Add):
            out = sum((go(t) for t in node.terms), Fraction(0))
        elif isinstance(node, Mul):
            out = Fraction(1)
            for f in node.factors:
                out *= go(f)
                if out == 0:
                    break
        elif isinstance(node, Pow):
            b = go(node.base)
            if b == 0 and node.exponent < 0:
                raise DomainError("division by zero")
            if node.exponent.denominator != 1 and b < 0:
                raise DomainError(f"fractional power of negative base {b}")
            folded = _const_power(b, node.exponent)
            if folded is None:
                raise InexactError(f"{b}**{node.exponent} is irrational")
            out = folded
        elif isinstance(node, Exp):
            a = go(node.arg)
            if a != 0:
                raise InexactError("exp of a nonzero rational is irrational")
            out = Fraction(1)
        else:  # pragma: no cover
            raise TypeError(type(node))
        memo[key] = out
        return out

    return go(e)


# ---------------------------------------------------------------------------
# code generation for fast repeated evaluation
# ---------------------------------------------------------------------------

def _fpow_math(b, e):
    if b < 0:
        raise DomainError(f"fractional power of negative base {b}")
    return b**e


def _ipow_math(b, n):
    try:
        return b**n
    except ZeroDivisionError:
        raise DomainError("division by zero") from None


def _exp_math(a):
    try:
        return math.exp(a)
    except OverflowError:
        raise DomainError("exp overflow") from None


def compile_exprs(exprs, symbols, backend: str = "math"):
    """Compile expressions into one Python function of ``symbols``.

    Shared subtrees are computed once.  With ``backend="numpy"`` the
    arguments may be arrays; invalid operations produce ``nan``/``inf``
    rather than raising.
    """
    exprs = list(exprs)
    symbols = list(symbols)
    names: dict[Expr, str] = {}
    lines: list[str] = []
    args = []
    for i, s in enumerate(symbols):
        names[s] = f"x{i}"
        args.append(f"x{i}")
    counter = 0

    def ref(node: Expr) -> str:
        return names[node]

    for e in exprs:
        missing = e.symbols.difference(symbols)
        if missing:
            raise UnboundSymbol(sorted(missing, key=lambda s: s.ident)[0])
        for node in walk(e):
            if node in names:
                continue
            if isinstance(node, Const):
                names[node] = repr(float(node.value))
                continue
            if isinstance(node, Add):
                rhs = " + ".join(ref(t) for t in node.terms)
            elif isinstance(node, Mul):
                rhs = " * ".join(ref(f) for f in node.factors)
            elif isinstance(node, Pow):
                b = ref(node.base)
                if node.exponent.denominator == 1:
                    rhs = f"_ipow({b}, {int(node.exponent)})"
                elif node.exponent == Fraction(1, 2):
                    rhs = f"_sqrt({b})" if backend == "numpy" else f"_fpow({b}, 0.5)"
                else:
                    rhs = f"_fpow({b}, {float(node.exponent)!r})"
            elif isinstance(node, Exp):
                rhs = f"_exp({ref(node.arg)})"
            else:  # pragma: no cover
                raise TypeError(type(node))
            name = f"v{counter}"
            counter += 1
            lines.append(f"    {name} = {rhs}")
            names[node] = name
    outs = ", ".join(ref(e) for e in exprs)
    src = f"def _f({', '.join(args)}):\n" + "\n".join(lines) + f"\n    return ({outs}{',' if len(exprs) == 1 else ''})\n"
    if backend == "numpy":
        import numpy as np

        ns = {
            "_ipow": lambda b, n: np.power(b, float(n)),
            "_fpow": np.power,
            "_sqrt": np.sqrt,
            "_exp": np.exp,
        }
    elif backend == "math":
        ns = {"_ipow": _ipow_math, "_fpow": _fpow_math, "_exp": _exp_math}
    else:
        raise ValueError(f"unknown backend {backend!r}")
    exec(compile(src, "<comodsys-compiled>", "exec"), ns)
    fn = ns["_f"]
    fn.source = src
    return fn


# ---------------------------------------------------------------------------
# printing
# ---------------------------------------------------------------------------

_PREC_ADD, _PREC_MUL, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4


def _fmt_scalar(v: Fraction) -> str:
    if v.denominator == 1:
        return str(v.numerator)
    return f"{v.numerator}/{v.denominator}"


def to_string(e: Expr) -> str:
    """Python-syntax rendering; :func:`comodsys.modelfile.parse_expr` inverts it."""

    def go(node: Expr) -> tuple[str, int]:
        if isinstance(node, Const):
            v = node.value
            if v.denominator == 1 and v >= 0:
                return str(v.numerator), _PREC_ATOM
            return f"({_fmt_scalar(v)})", _PREC_ATOM
        if isinstance(node, Symbol):
            return node.ident, _PREC_ATOM
        if isinstance(node, Add):
            parts = []
            for i, t in enumerate(node.terms):
                c, core = _split_coefficient(t)
                if i > 0 and c < 0:
                    body = _term_str(-c, core)
                    parts.append(f" - {body}")
                else:
                    s, p = go(t)
                    parts.append((" + " if i else "") + s)
            return "".join(parts), _PREC_ADD
        if isinstance(node, Mul):
            return "*".join(wrap(f, _PREC_MUL) for f in node.factors), _PREC_MUL
        if isinstance(node, Pow):
            ex = node.exponent
            ex_s = str(ex.numerator) if ex.denominator == 1 and ex > 0 else f"({_fmt_scalar(ex)})"
            return f"{wrap(node.base, _PREC_ATOM)}**{ex_s}", _PREC_POW
        if isinstance(node, Exp):
            return f"exp({go(node.arg)[0]})", _PREC_ATOM
        raise TypeError(type(node))  # pragma: no cover

    def wrap(node: Expr, prec: int) -> str:
        s, p = go(node)
        return s if p >= prec else f"({s})"

    def _term_str(c: Fraction, core: Expr | None) -> str:
        if core is None:
            return _fmt_scalar(c) if c.denominator == 1 else f"({_fmt_scalar(c)})"
        body = "*".join(wrap(f, _PREC_MUL) for f in (core.factors if isinstance(core, Mul) else (core,)))
        if c == 1:
            return body
        cs = str(c.numerator) if c.denominator == 1 else f"({_fmt_scalar(c)})"
        return f"{cs}*{body}"

    return go(e)[0]
