"""Algebra maps between noncommutative algebras and matrix coactions."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from ..errors import RewriteError
from ..report import Check, Report
from .algebra import NCAlgebra, NCPoly, RewriteSystem, _add_into, legword_str
from .qcoeff import ONE as Q_ONE
from .qcoeff import QCoeff


@dataclass(frozen=True, eq=False)
class NCMorphism:
    """Generator images of a one-leg algebra into a tensor algebra.

    The source lives on leg ``source_leg`` of ``source``.  Group-like
    letters must map to a single group-like monomial (times a power of
    ``q``) so that rational powers of them are defined.
    """

    source: NCAlgebra
    target: NCAlgebra
    images: Mapping[str, NCPoly]
    name: str = "phi"

    def __post_init__(self):
        if len(self.source.legs) != 1:
            raise RewriteError("morphism source must be a single-leg algebra")
        sys_ = self.system
        for n in sys_.order:
            if n not in self.images:
                raise RewriteError(f"{self.name}: no image for {n}")
            if self.images[n].alg != self.target:
                raise RewriteError(f"{self.name}: image of {n} lives in another algebra")
        for g in sys_.grouplike:
            self._grouplike_image(g)

    @property
    def source_leg(self) -> int:
        return next(iter(self.source.legs))

    @property
    def system(self) -> RewriteSystem:
        return self.source.legs[self.source_leg]

    def _grouplike_image(self, g: str):
        img = self.images[g]
        if len(img.terms) != 1:
            raise RewriteError(f"{self.name}: group-like {g} must map to a monomial")
        (w, c), = img.terms.items()
        for leg, lw in w:
            sys_ = self.target.system(leg)
            for name, _ in lw:
                if not sys_.is_grouplike(name):
                    raise RewriteError(f"{self.name}: image of group-like {g} contains plain letter {name}")
        return w, c

    def letter_image(self, name: str, exponent) -> NCPoly:
        if self.system.is_grouplike(name):
            w, c = self._grouplike_image(name)
            e = Fraction(exponent)
            scaled = tuple((leg, tuple((n, f * e) for n, f in lw)) for leg, lw in w)
            if c != Q_ONE:
                raise RewriteError(f"{self.name}: group-like image of {name} carries a coefficient")
            return NCPoly(self.target, {scaled: Q_ONE})
        return self.images[name] ** int(exponent)

    def __call__(self, p: NCPoly) -> NCPoly:
        if p.alg != self.source:
            raise RewriteError(f"{self.name}: argument lives in another algebra")
        out = self.target.zero()
        for w, c in p.terms.items():
            term = self.target.one()
            for _, lw in w:
                for name, e in lw:
                    term = term * self.letter_image(name, e)
            out = out + term.scale(c)
        return out

    def on_leg(self, p: NCPoly, leg: int, target: NCAlgebra) -> NCPoly:
        """Apply the morphism to leg ``leg`` of ``p``.

        The image legs are relabelled to start at ``leg``; legs of ``p``
        above ``leg`` shift up by ``width - 1``.  ``target`` must provide the
        resulting leg algebras.
        """
        image_legs = sorted(self.target.legs)
        width = len(image_legs)
        relabel = {l: leg + i for i, l in enumerate(image_legs)}
        cache: dict = {}
        out: dict = {}
        for w, c in p.terms.items():
            before, after, seg = [], [], None
            for l, lw in w:
                if l < leg:
                    before.append((l, lw))
                elif l == leg:
                    seg = lw
                else:
                    after.append((l + width - 1, lw))
            if seg is None:
                img_terms = {(): Q_ONE}
            else:
                if seg not in cache:
                    src = NCPoly(self.source, {((self.source_leg, seg),): Q_ONE})
                    img = self(src)
                    cache[seg] = {tuple((relabel[l], x) for l, x in iw): d for iw, d in img.terms.items()}
                img_terms = cache[seg]
            for iw, d in img_terms.items():
                _add_into(out, tuple(before) + iw + tuple(after), c * d)
        return NCPoly(target, out)


def verify_nc_morphism(phi: NCMorphism, budget: int | None = None) -> Report:
    """Every defining relation of the source maps to zero in the target."""
    rep = Report(f"relations preserved by {phi.name}")
    sys_ = phi.system
    phi.target.begin(budget)
    try:
        for label, lhs, rhs in sys_.relations():
            img = phi.target.one()
            for name, e in lhs:
                img = img * phi.letter_image(name, e)
            for w, c in rhs.items():
                term = phi.target.one()
                for name, e in w:
                    term = term * phi.letter_image(name, e)
                img = img - term.scale(c)
            rep.add(Check(
                f"relation {label}", img.is_zero(),
                "" if img.is_zero() else f"image does not vanish ({len(img)} terms), e.g. {_first(img)}",
            ))
    finally:
        phi.target.end()
    return rep


def _first(p: NCPoly) -> str:
    w, c = next(iter(p.terms.items()))
    ws = " ".join(legword_str(lw, l) for l, lw in w) or "1"
    return f"[{c}] {ws}"


def compose_on_first_leg(outer: NCMorphism, inner: NCMorphism, target: NCAlgebra, name: str) -> NCMorphism:
    """``(outer on leg 1) o inner`` as a morphism into ``target``."""
    first = min(inner.target.legs)
    images = {n: outer.on_leg(img, first, target) for n, img in inner.images.items()}
    return NCMorphism(inner.source, target, images, name)


# ---------------------------------------------------------------------------
# matrices
# ---------------------------------------------------------------------------

Matrix = Sequence[Sequence[NCPoly]]


def mat_mul(x: Matrix, y: Matrix) -> list[list[NCPoly]]:
    n, m, p = len(x), len(y), len(y[0])
    out = []
    for i in range(n):
        row = []
        for j in range(p):
            acc = x[i][0] * y[0][j]
            for k in range(1, m):
                acc = acc + x[i][k] * y[k][j]
            row.append(acc)
        out.append(row)
    return out


def transpose(x: Matrix) -> list[list[NCPoly]]:
    return [list(r) for r in zip(*x)]


def matrix_coaction(t: Matrix, k: Matrix, transpose_right: bool = True) -> list[list[NCPoly]]:
    """Entry-wise normal forms of ``T K T^t`` (or ``T K T`` without transpose)."""
    right = transpose(t) if transpose_right else t
    return mat_mul(mat_mul(t, k), right)


def q_det(t: Matrix) -> NCPoly:
    """``det_q T = t11 t22 - q t12 t21``."""
    return t[0][0] * t[1][1] - (t[0][1] * t[1][0]).scale(QCoeff.q(1))
