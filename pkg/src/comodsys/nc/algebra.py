"""Noncommutative polynomials and their normal forms under exchange rules.

A *leg algebra* (:class:`RewriteSystem`) has letters in a fixed total order.
Letters are either plain generators or *group-like* ones: invertible
exponentials such as ``E_N = q^N`` that take rational exponents and pass
every plain letter at the cost of a power of ``q``::

    G^a X = q^(a * w(G, X)) X G^a

Every out-of-order pair of plain letters ``Y X`` (``Y > X``) needs an
exchange rule ``Y X -> rhs``.  Optional *contractions* rewrite in-order
pairs ``x y`` (possibly separated by group-like letters); they implement
quotients such as ``A^+ A = (q^-2N - 1)/(q^-2 - 1)``.

A tensor algebra (:class:`NCAlgebra`) assigns a leg algebra to each leg;
letters on different legs commute.  A word is a tuple of ``(leg, legword)``
segments sorted by leg, a legword a tuple of ``(name, exponent)`` tokens.
:class:`NCPoly` values are always kept in normal form.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product as cartesian
from typing import Iterable, Mapping, Sequence

from ..errors import BudgetExceeded, NonTerminating, RewriteError
from ..report import Check, Report
from .qcoeff import ONE as Q_ONE
from .qcoeff import QCoeff

Token = tuple  # (name, exponent)
LegWord = tuple  # tuple[Token, ...]
Word = tuple  # tuple[(leg, LegWord), ...]
LegPoly = dict  # dict[LegWord, QCoeff]

DEFAULT_BUDGET = 2_000_000


def _add_into(acc: dict, key, coef: QCoeff) -> None:
    cur = acc.get(key)
    if cur is None:
        if coef:
            acc[key] = coef
    else:
        new = cur + coef
        if new:
            acc[key] = new
        else:
            del acc[key]


def _exp_str(e) -> str:
    return str(e) if Fraction(e).denominator == 1 else f"({e})"


def legword_str(w: LegWord, leg=None) -> str:
    suffix = "" if leg is None else f"_{leg}"
    parts = []
    for name, e in w:
        parts.append(f"{name}{suffix}" if e == 1 else f"{name}{suffix}^{_exp_str(e)}")
    return "*".join(parts) if parts else "1"


class _Session:
    """Step accounting for one top-level reduction."""

    __slots__ = ("steps", "budget")

    def __init__(self, budget: int):
        self.steps = 0
        self.budget = budget

    def tick(self):
        self.steps += 1
        if self.steps > self.budget:
            raise NonTerminating(f"rewrite budget of {self.budget} steps exceeded")


class RewriteSystem:
    """Exchange rules of one leg algebra.

    ``rules`` maps an out-of-order plain pair ``(Y, X)`` to the normal-form
    replacement of the word ``Y X``; ``contractions`` maps an in-order pair
    ``(x, y)`` to the replacement of ``x y``.  Right-hand sides are
    ``{legword: coefficient}`` dictionaries (see :func:`terms`).
    """

    def __init__(
        self,
        name: str,
        order: Sequence[str],
        grouplike: Iterable[str] = (),
        weights: Mapping[tuple[str, str], object] | None = None,
        rules: Mapping[tuple[str, str], LegPoly] | None = None,
        contractions: Mapping[tuple[str, str], LegPoly] | None = None,
        budget: int = DEFAULT_BUDGET,
        audit: bool = True,
    ):
        self.name = name
        self.order = tuple(order)
        self.rank = {n: i for i, n in enumerate(self.order)}
        if len(self.rank) != len(self.order):
            raise RewriteError(f"{name}: duplicate letter in order")
        self.grouplike = frozenset(grouplike)
        for g in self.grouplike:
            if g not in self.rank:
                raise RewriteError(f"{name}: unknown group-like letter {g}")
        self.plain = tuple(n for n in self.order if n not in self.grouplike)
        self.weights = {k: Fraction(v) for k, v in (weights or {}).items()}
        for (g, x) in self.weights:
            if g not in self.grouplike or x not in self.rank or x in self.grouplike:
                raise RewriteError(f"{name}: weight ({g},{x}) must pair a group-like with a plain letter")
        self.rules = {k: dict(v) for k, v in (rules or {}).items()}
        self.contractions = {k: dict(v) for k, v in (contractions or {}).items()}
        self.budget = budget
        self._memo: dict = {}
        self._session: _Session | None = None
        self._check_rule_shapes()
        if audit:
            rep = self.audit()
            if not rep.passed:
                raise RewriteError(f"{name}: rewrite audit failed: {rep.failures[0].name} ({rep.failures[0].detail})")

    # -- helpers ------------------------------------------------------------
    def weight(self, g: str, x: str) -> Fraction:
        return self.weights.get((g, x), Fraction(0))

    def is_grouplike(self, name: str) -> bool:
        return name in self.grouplike

    def knows(self, name: str) -> bool:
        return name in self.rank

    def _check_rule_shapes(self):
        for (y, x), rhs in self.rules.items():
            for n in (x, y):
                if n not in self.rank or n in self.grouplike:
                    raise RewriteError(f"{self.name}: rule ({y},{x}) must involve plain letters")
            if self.rank[y] <= self.rank[x]:
                raise RewriteError(f"{self.name}: rule ({y},{x}) is not an out-of-order pair")
            self._check_rhs(rhs, (y, x))
        for (x, y), rhs in self.contractions.items():
            if self.rank[x] >= self.rank[y]:
                raise RewriteError(f"{self.name}: contraction ({x},{y}) must be in order")
            self._check_rhs(rhs, (x, y))
        for y in self.plain:
            for x in self.plain:
                if self.rank[y] > self.rank[x] and (y, x) not in self.rules:
                    raise RewriteError(f"{self.name}: no exchange rule for {y}*{x}")

    def _check_rhs(self, rhs: LegPoly, lhs):
        for w in rhs:
            for name, e in w:
                if name not in self.rank:
                    raise RewriteError(f"{self.name}: rule {lhs} mentions unknown letter {name}")
                if name not in self.grouplike and (not isinstance(e, int) or e < 1):
                    raise RewriteError(f"{self.name}: plain letter {name} needs a positive integer exponent")

    def is_normal(self, w: LegWord) -> bool:
        last = -1
        prev_plain = None
        for name, e in w:
            r = self.rank[name]
            if r <= last or e == 0:
                return False
            last = r
            if name not in self.grouplike:
                if prev_plain is not None and (prev_plain, name) in self.contractions:
                    return False
                prev_plain = name
        return True

    # -- reduction ----------------------------------------------------------
    def begin(self, budget: int | None = None):
        self._session = _Session(budget or self.budget)

    def _tick(self):
        if self._session is not None:
            self._session.tick()

    def nf_word(self, w: Sequence[Token]) -> LegPoly:
        """Normal form of an arbitrary leg word."""
        return self.mul_poly_word({(): Q_ONE}, tuple(w))

    def mul_poly_word(self, poly: LegPoly, w: LegWord) -> LegPoly:
        """``poly * w`` in normal form; ``poly`` must be normal."""
        for name, e in w:
            if name not in self.rank:
                raise RewriteError(f"{self.name}: unknown letter {name}")
            if name in self.grouplike:
                if e == 0:
                    continue
                poly = self._mul_token(poly, (name, Fraction(e)))
            else:
                if not isinstance(e, int) and Fraction(e).denominator != 1 or e < 1:
                    raise RewriteError(f"{self.name}: plain letter {name} needs a positive integer exponent")
                for _ in range(int(e)):
                    poly = self._mul_token(poly, (name, 1))
        return poly

    def _mul_token(self, poly: LegPoly, tok: Token) -> LegPoly:
        out: LegPoly = {}
        for u, c in poly.items():
            for v, d in self._insert(u, tok).items():
                _add_into(out, v, c * d)
        return out

    def _insert(self, u: LegWord, tok: Token) -> LegPoly:
        key = (u, tok)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        self._tick()
        try:
            res = self._insert_uncached(u, tok)
        except RecursionError:
            raise NonTerminating(f"{self.name}: rewriting recursed too deeply") from None
        self._memo[key] = res
        return res

    def _insert_uncached(self, u: LegWord, tok: Token) -> LegPoly:
        x, e = tok
        if x in self.grouplike:
            return self._insert_grouplike(u, x, e)
        if not u:
            return {((x, 1),): Q_ONE}
        y, f = u[-1]
        if y == x:
            return {u[:-1] + ((x, f + 1),): Q_ONE}
        if self.rank[y] < self.rank[x]:
            return self._append_plain(u, x)
        if y in self.grouplike:
            # G^f X = q^(f w) X G^f
            coef = QCoeff.q(f * self.weight(y, x))
            inner = self._insert(u[:-1], (x, 1))
            out: LegPoly = {}
            for v, d in inner.items():
                for v2, d2 in self._insert(v, (y, f)).items():
                    _add_into(out, v2, coef * d * d2)
            return out
        rhs = self.rules.get((y, x))
        if rhs is None:
            raise RewriteError(f"{self.name}: no exchange rule for {y}*{x}")
        head = u[:-1] + (((y, f - 1),) if f > 1 else ())
        out = {}
        for w, c in rhs.items():
            for v, d in self.mul_poly_word({head: Q_ONE}, w).items():
                _add_into(out, v, c * d)
        return out

    def _insert_grouplike(self, u: LegWord, g: str, e: Fraction) -> LegPoly:
        coef_exp = Fraction(0)
        i = len(u)
        rg = self.rank[g]
        while i > 0 and self.rank[u[i - 1][0]] > rg:
            name, f = u[i - 1]
            if name not in self.grouplike:
                # X^f G^e = q^(-e f w) G^e X^f
                coef_exp -= e * f * self.weight(g, name)
            i -= 1
        head, tail = u[:i], u[i:]
        if head and head[-1][0] == g:
            merged = head[-1][1] + e
            head = head[:-1] + (((g, merged),) if merged != 0 else ())
        else:
            head = head + ((g, e),)
        return {head + tail: QCoeff.q(coef_exp)}

    def _append_plain(self, u: LegWord, x: str) -> LegPoly:
        j = len(u) - 1
        shift = Fraction(0)
        while j >= 0 and u[j][0] in self.grouplike:
            shift += u[j][1] * self.weight(u[j][0], x)
            j -= 1
        if j >= 0 and (u[j][0], x) in self.contractions:
            pname, k = u[j]
            head = u[:j] + (((pname, k - 1),) if k > 1 else ())
            gs = u[j + 1:]
            rhs = self.contractions[(pname, x)]
            coef = QCoeff.q(shift)
            out: LegPoly = {}
            for w, c in rhs.items():
                for v, d in self.mul_poly_word({head: Q_ONE}, w + gs).items():
                    _add_into(out, v, coef * c * d)
            return out
        return {u + ((x, 1),): Q_ONE}

    # -- relations and audit --------------------------------------------------
    def relations(self) -> list[tuple[str, LegWord, LegPoly]]:
        """Defining relations as ``(label, lhs word, rhs poly)``."""
        rels = []
        for (y, x), rhs in self.rules.items():
            rels.append((f"{y}*{x}", ((y, 1), (x, 1)), rhs))
        for (x, y), rhs in self.contractions.items():
            rels.append((f"{x}*{y}", ((x, 1), (y, 1)), rhs))
        for g in sorted(self.grouplike, key=self.rank.get):
            for x in self.plain:
                w = self.weight(g, x)
                rels.append((f"{g}*{x}*{g}^-1", ((g, Fraction(1)), (x, 1), (g, Fraction(-1))), {((x, 1),): QCoeff.q(w)}))
        return rels

    def _measure(self, w: LegWord):
        letters = []
        for name, e in w:
            if name not in self.grouplike:
                letters.extend([self.rank[name]] * int(e))
        return (len(letters), tuple(letters))

    def audit(self, exponents=(Fraction(1), Fraction(-1), Fraction(1, 2))) -> Report:
        """Termination (deg-lex decrease of plain letters) and local confluence."""
        rep = Report(f"rewrite audit for {self.name}")
        for label, lhs, rhs in self.relations():
            if label.count("*") != 1:
                continue
            lm = self._measure(lhs)
            bad = [w for w in rhs if self._measure(w) >= lm]
            rep.add(Check(f"terminating {label}", not bad, "" if not bad else f"right side {legword_str(bad[0])} is not smaller"))
        if not rep.passed:
            return rep
        letters: list[Token] = [(n, 1) for n in self.plain]
        for g in self.grouplike:
            letters.extend((g, e) for e in exponents)
        self.begin()
        try:
            for a in letters:
                for b in letters:
                    ab = self.nf_word((a, b))
                    for c in letters:
                        left = self.mul_poly_word(ab, (c,))
                        right: LegPoly = {}
                        for w, k in self.nf_word((b, c)).items():
                            for v, d in self.nf_word((a,) + w).items():
                                _add_into(right, v, k * d)
                        diff = dict(left)
                        for v, d in right.items():
                            _add_into(diff, v, -d)
                        if diff:
                            rep.add(Check(
                                f"confluent {legword_str((a, b, c))}", False,
                                f"overlap resolves differently: {len(diff)} stray words",
                            ))
            if rep.passed:
                rep.add(Check(f"locally confluent on {len(letters) ** 3} letter triples", True))
        finally:
            self._session = None
        return rep

    def __repr__(self):
        return f"RewriteSystem({self.name!r}, order={self.order})"


def terms(*items) -> LegPoly:
    """Build a right-hand side: ``terms((coef, "A", ("E", -2)), ...)``.

    Each item is a coefficient followed by letters; a letter is a name
    (exponent 1) or a ``(name, exponent)`` pair.
    """
    out: LegPoly = {}
    for item in items:
        coef, *letters = item
        coef = coef if isinstance(coef, QCoeff) else QCoeff.rational(coef)
        w = tuple((l, 1) if isinstance(l, str) else (l[0], l[1]) for l in letters)
        _add_into(out, _merge(w), coef)
    return out


def _merge(w: LegWord) -> LegWord:
    out: list = []
    for name, e in w:
        if out and out[-1][0] == name:
            out[-1] = (name, out[-1][1] + e)
            if out[-1][1] == 0:
                out.pop()
        else:
            out.append((name, e))
    return tuple(out)


# ---------------------------------------------------------------------------
# tensor algebras of legs and polynomials
# ---------------------------------------------------------------------------

class NCAlgebra:
    """Tensor product of leg algebras indexed by integer legs."""

    def __init__(self, legs: Mapping[int, RewriteSystem], name: str | None = None):
        self.legs = dict(sorted(legs.items()))
        self.name = name or " (x) ".join(f"{s.name}[{l}]" for l, s in self.legs.items())

    def __eq__(self, other):
        return isinstance(other, NCAlgebra) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    @property
    def _key(self):
        return tuple((l, id(s)) for l, s in self.legs.items())

    def system(self, leg: int) -> RewriteSystem:
        try:
            return self.legs[leg]
        except KeyError:
            raise RewriteError(f"{self.name}: no leg {leg}") from None

    # constructors
    def zero(self) -> "NCPoly":
        return NCPoly(self, {})

    def one(self) -> "NCPoly":
        return NCPoly(self, {(): Q_ONE})

    def scalar(self, c) -> "NCPoly":
        c = c if isinstance(c, QCoeff) else QCoeff.rational(c)
        return NCPoly(self, {(): c} if c else {})

    def gen(self, name: str, leg: int | None = None, exponent=1) -> "NCPoly":
        if leg is None:
            if len(self.legs) != 1:
                raise RewriteError("leg required in a multi-leg algebra")
            leg = next(iter(self.legs))
        sys_ = self.system(leg)
        if not sys_.knows(name):
            raise RewriteError(f"{sys_.name}: unknown letter {name}")
        if sys_.is_grouplike(name):
            exponent = Fraction(exponent)
            if (2 * exponent).denominator != 1:
                raise RewriteError(f"group-like exponents must be multiples of 1/2, got {exponent}")
            if exponent == 0:
                return self.one()
        elif exponent != int(exponent) or exponent < 1:
            raise RewriteError("plain letters take positive integer exponents")
        else:
            exponent = int(exponent)
        return NCPoly(self, {((leg, ((name, exponent),)),): Q_ONE})

    def word(self, *letters) -> "NCPoly":
        """Product of ``(name, leg[, exponent])`` letters in the given order."""
        out = self.one()
        for item in letters:
            out = out * self.gen(*item)
        return out

    def from_leg_poly(self, leg: int, lp: LegPoly) -> "NCPoly":
        out = {}
        for w, c in lp.items():
            _add_into(out, ((leg, w),) if w else (), c)
        return NCPoly(self, out)

    # products
    def mul_words(self, u: Word, v: Word) -> dict:
        if not u:
            return {v: Q_ONE}
        if not v:
            return {u: Q_ONE}
        du, dv = dict(u), dict(v)
        legs = sorted(set(du) | set(dv))
        pieces: list[list[tuple]] = []
        for leg in legs:
            a, b = du.get(leg), dv.get(leg)
            if a is None or b is None:
                pieces.append([((leg, a if b is None else b), Q_ONE)])
                continue
            lp = self.system(leg).mul_poly_word({a: Q_ONE}, b)
            pieces.append([((leg, w) if w else None, c) for w, c in lp.items()])
        out: dict = {}
        for combo in cartesian(*pieces):
            coef = Q_ONE
            segs = []
            for seg, c in combo:
                coef = coef * c
                if seg is not None:
                    segs.append(seg)
            _add_into(out, tuple(segs), coef)
        return out

    def begin(self, budget: int | None = None):
        for s in self.legs.values():
            s.begin(budget)

    def end(self):
        for s in self.legs.values():
            s._session = None


class NCPoly:
    """A normal-form noncommutative polynomial over an :class:`NCAlgebra`."""

    __slots__ = ("alg", "terms")

    def __init__(self, alg: NCAlgebra, terms: Mapping[Word, QCoeff]):
        self.alg = alg
        self.terms = dict(terms)

    # arithmetic
    def _coerce(self, other) -> "NCPoly":
        if isinstance(other, NCPoly):
            if other.alg != self.alg:
                raise RewriteError("polynomials live in different algebras")
            return other
        return self.alg.scalar(other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for w, c in other.terms.items():
            _add_into(out, w, c)
        return NCPoly(self.alg, out)

    __radd__ = __add__

    def __neg__(self):
        return NCPoly(self.alg, {w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c) -> "NCPoly":
        c = c if isinstance(c, QCoeff) else QCoeff.rational(c)
        if not c:
            return self.alg.zero()
        return NCPoly(self.alg, {w: c * d for w, d in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (QCoeff, int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        out: dict = {}
        for u, c in self.terms.items():
            for v, d in other.terms.items():
                cd = c * d
                for w, e in self.alg.mul_words(u, v).items():
                    _add_into(out, w, cd * e)
        return NCPoly(self.alg, out)

    def __rmul__(self, other):
        if isinstance(other, (QCoeff, int, Fraction)):
            return self.scale(other)
        return self._coerce(other) * self

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers are not defined for polynomials")
        out = self.alg.one()
        for _ in range(n):
            out = out * self
        return out

    # queries
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if isinstance(other, NCPoly):
            return self.alg == other.alg and (self - other).is_zero()
        return (self - self.alg.scalar(other)).is_zero()

    __hash__ = None

    def __len__(self):
        return len(self.terms)

    def legs(self) -> set[int]:
        return {leg for w in self.terms for leg, _ in w}

    def letters(self) -> set[tuple[int, str]]:
        return {(leg, name) for w in self.terms for leg, lw in w for name, _ in lw}

    def coefficient(self, word: Word) -> QCoeff:
        return self.terms.get(word, QCoeff())

    def map_coefficients(self, f) -> dict:
        return {w: f(c) for w, c in self.terms.items()}

    def at_q_one(self) -> dict[Word, Fraction]:
        """Coefficients specialised to ``q = 1`` (``s = 0``); zeros dropped."""
        out = {}
        for w, c in self.terms.items():
            v = c.at_q_one()
            if v:
                out[w] = v
        return out

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for w, c in self.terms.items():
            ws = " ".join(legword_str(lw, leg) for leg, lw in w) or "1"
            parts.append(f"[{c}] {ws}")
        return " + ".join(parts)

    def __repr__(self):
        return f"NCPoly({self})"


def normal_form(p: NCPoly, budget: int | None = None) -> NCPoly:
    """Re-reduce every word of ``p`` from scratch (idempotent on normal input)."""
    alg = p.alg
    alg.begin(budget)
    try:
        out: dict = {}
        for w, c in p.terms.items():
            acc = {(): Q_ONE}
            for leg, lw in w:
                lp = alg.system(leg).nf_word(lw)
                nxt: dict = {}
                for u, d in acc.items():
                    for v, e in lp.items():
                        _add_into(nxt, u + (((leg, v),) if v else ()), d * e)
                acc = nxt
            for u, d in acc.items():
                _add_into(out, u, c * d)
        return NCPoly(alg, out)
    finally:
        alg.end()


def nc_commutator(a: NCPoly, b: NCPoly) -> NCPoly:
    """``[a, b] = ab - ba`` in normal form."""
    return a * b - b * a


def reduce_raw(alg: NCAlgebra, raw: Iterable[tuple[QCoeff, Sequence[tuple]]], budget: int | None = None) -> NCPoly:
    """Normal form of a linear combination of raw words.

    ``raw`` holds ``(coefficient, [(name, leg, exponent), ...])`` with letters
    in the written order; the step budget applies to the whole reduction.
    """
    alg.begin(budget)
    try:
        out = alg.zero()
        for coef, letters in raw:
            term = alg.one()
            for item in letters:
                term = term * alg.gen(*item)
            out = out + term.scale(coef if isinstance(coef, QCoeff) else QCoeff.rational(coef))
        return out
    finally:
        alg.end()


def check_budget(poly: NCPoly, max_terms: int) -> None:
    if len(poly) > max_terms:
        raise BudgetExceeded(f"polynomial has {len(poly)} terms (limit {max_terms})")
