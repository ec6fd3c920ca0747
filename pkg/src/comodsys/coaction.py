"""Algebra morphisms, coproducts and coactions between Poisson algebras.

Morphisms store images of generators only and are extended to arbitrary
expressions by substitution.  Tensor legs are numbered from 1; a morphism
``A -> A (x) H`` puts ``A`` on leg 1.

The iterated coaction follows the recursion

    phi^(2) = phi,   phi^(i) = (phi (x) id^(i-2)) o phi^(i-1),

and ``C^(i) = phi^(i)(C)`` padded with trailing units are the commuting
integrals.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, combinations_with_replacement
from typing import Mapping, Sequence

from .errors import ConditionViolated, EmbeddingNotHomomorphism, NotCasimir, UnknownGenerator
from .expr import ZERO, Add, Expr, Kind, Symbol, mul, substitute
from .poisson import (
    BracketAlgebra,
    PoissonAlgebraSpec,
    TensorAlgebraSpec,
    bracket,
    check_identities,
    check_zeros,
    is_casimir,
    poisson_algebra,
    tensor,
)
from .report import Check, Report
from .sampling import DomainSampler

DEFAULT_TRIALS = 100
DEFAULT_TOL = 1e-9


def relabel_legs(e: Expr, mapping: Mapping[int, int]) -> Expr:
    """Move generators from site ``k`` to ``mapping[k]`` (others untouched)."""
    rules = {}
    for s in e.symbols:
        if s.kind is Kind.GENERATOR and s.site in mapping and mapping[s.site] != s.site:
            rules[s] = s.on_site(mapping[s.site])
    return substitute(e, rules)


def shift_legs(e: Expr, offset: int, start: int = 1) -> Expr:
    """Add ``offset`` to every generator site ``>= start``."""
    if offset == 0:
        return e
    sites = {s.site for s in e.symbols if s.kind is Kind.GENERATOR and s.site is not None}
    return relabel_legs(e, {k: k + offset for k in sites if k >= start})


@dataclass(frozen=True, eq=False)
class AlgebraMorphism:
    source: PoissonAlgebraSpec
    target: TensorAlgebraSpec
    images: Mapping[Symbol, Expr]
    name: str = "phi"

    def __post_init__(self):
        missing = [g for g in self.source.generators if g not in self.images]
        if missing:
            raise ValueError(f"{self.name}: no image for {missing[0].ident}")
        for g, img in self.images.items():
            for s in img.symbols:
                if s.kind is not Kind.PARAMETER and not self.target.knows(s):
                    raise UnknownGenerator(s, self.target.name)

    @property
    def width(self) -> int:
        return self.target.legs

    def __call__(self, e: Expr) -> Expr:
        for s in e.symbols:
            if s.kind is not Kind.PARAMETER and not self.source.knows(s):
                raise UnknownGenerator(s, self.source.name)
        return substitute(e, self.images)

    def on_leg(self, e: Expr, leg: int) -> Expr:
        """Apply the morphism to tensor leg ``leg`` of ``e``.

        Leg ``leg`` is replaced by ``width`` legs; legs after it shift up.
        """
        width = self.width
        rules: dict[Symbol, Expr] = {}
        for s in e.symbols:
            if s.kind is not Kind.GENERATOR or s.site is None:
                continue
            if s.site == leg:
                img = self.images.get(s.on_site(None))
                if img is None:
                    raise UnknownGenerator(s, self.source.name)
                rules[s] = shift_legs(img, leg - 1)
            elif s.site > leg and width != 1:
                rules[s] = s.on_site(s.site + width - 1)
        return substitute(e, rules)

    def compose(self, other: "AlgebraMorphism", leg: int = 1) -> "AlgebraMorphism":
        """``(other on leg) o self``."""
        target_factors = list(self.target.factors)
        target_factors[leg - 1: leg] = list(other.target.factors)
        images = {g: other.on_leg(img, leg) for g, img in self.images.items()}
        return AlgebraMorphism(self.source, tensor(*target_factors), images, f"{other.name}.{self.name}")


def morphism(source, target, images, name="phi") -> AlgebraMorphism:
    return AlgebraMorphism(source, target, dict(images), name)


@dataclass(frozen=True, eq=False)
class Coproduct:
    """A coproduct ``H -> H (x) H``."""

    map: AlgebraMorphism

    @property
    def algebra(self) -> PoissonAlgebraSpec:
        return self.map.source

    def __call__(self, e: Expr) -> Expr:
        return self.map(e)


def coproduct(spec: PoissonAlgebraSpec, images: Mapping[Symbol, Expr]) -> Coproduct:
    return Coproduct(AlgebraMorphism(spec, tensor(spec, spec), dict(images), f"Delta[{spec.name}]"))


def primitive_coproduct(spec: PoissonAlgebraSpec) -> Coproduct:
    """``Delta(X) = X (x) 1 + 1 (x) X`` on every generator."""
    return coproduct(spec, {g: g.on_site(1) + g.on_site(2) for g in spec.generators})


@dataclass(frozen=True, eq=False)
class Coaction:
    """A right coaction ``A -> A (x) H`` together with the coproduct of ``H``."""

    map: AlgebraMorphism
    hopf: Coproduct

    def __post_init__(self):
        facs = self.map.target.factors
        if len(facs) != 2 or facs[0] is not self.map.source or facs[1] is not self.hopf.algebra:
            raise ValueError("coaction target must be source (x) Hopf algebra")

    @property
    def source(self) -> PoissonAlgebraSpec:
        return self.map.source

    @property
    def comodule(self) -> PoissonAlgebraSpec:
        return self.map.source

    @property
    def algebra(self) -> PoissonAlgebraSpec:
        return self.hopf.algebra

    def __call__(self, e: Expr) -> Expr:
        return self.map(e)


def coaction(source: PoissonAlgebraSpec, hopf: Coproduct, images: Mapping[Symbol, Expr], name="phi") -> Coaction:
    return Coaction(AlgebraMorphism(source, tensor(source, hopf.algebra), dict(images), name), hopf)


def self_coaction(hopf: Coproduct) -> Coaction:
    """A Hopf algebra coacting on itself through its coproduct."""
    return Coaction(hopf.map, hopf)


# ---------------------------------------------------------------------------
# verifiers
# ---------------------------------------------------------------------------

def _sampler(sampler):
    return sampler if sampler is not None else DomainSampler()


def verify_homomorphism(
    phi: AlgebraMorphism,
    trials: int = DEFAULT_TRIALS,
    tol: float = DEFAULT_TOL,
    sampler: DomainSampler | None = None,
) -> Report:
    """Bracket and product preservation on all generator pairs."""
    if isinstance(phi, (Coaction, Coproduct)):
        phi = phi.map
    gens = phi.source.generators
    identities = []
    structural = Report("")
    for a, b in combinations(gens, 2):
        lhs = bracket(phi.target, phi.images[a], phi.images[b])
        rhs = phi(phi.source.pair(a, b))
        identities.append((f"bracket {{{a.ident},{b.ident}}}", lhs, rhs))
    for a, b in combinations_with_replacement(gens, 2):
        lhs, rhs = phi(mul(a, b)), mul(phi.images[a], phi.images[b])
        name = f"product {a.ident}*{b.ident}"
        if lhs == rhs:
            structural.add(Check(name, True, "structural", deviation=0.0))
        else:
            identities.append((name, lhs, rhs))
    rep = check_identities(identities, trials, tol, _sampler(sampler), f"homomorphism {phi.name}")
    rep.checks.extend(structural.checks)
    return rep


def verify_coassociativity(
    delta: Coproduct,
    trials: int = DEFAULT_TRIALS,
    tol: float = DEFAULT_TOL,
    sampler: DomainSampler | None = None,
) -> Report:
    """``(Delta (x) id) o Delta == (id (x) Delta) o Delta`` generator-wise."""
    ids = []
    for g in delta.algebra.generators:
        d = delta.map.images[g]
        ids.append((f"coassociativity {g.ident}", delta.map.on_leg(d, 1), delta.map.on_leg(d, 2)))
    return check_identities(ids, trials, tol, _sampler(sampler), f"coassociativity of {delta.map.name}")


def verify_comodule_axiom(
    phi: Coaction,
    trials: int = DEFAULT_TRIALS,
    tol: float = DEFAULT_TOL,
    sampler: DomainSampler | None = None,
) -> Report:
    """``(phi (x) id) o phi == (id (x) Delta) o phi`` over ``A (x) H (x) H``."""
    ids = []
    for g in phi.source.generators:
        img = phi.map.images[g]
        ids.append((f"comodule {g.ident}", phi.map.on_leg(img, 1), phi.hopf.map.on_leg(img, 2)))
    return check_identities(ids, trials, tol, _sampler(sampler), f"comodule axiom of {phi.map.name}")


# ---------------------------------------------------------------------------
# iteration and the commuting families
# ---------------------------------------------------------------------------

def iterate(phi, n: int) -> AlgebraMorphism:
    """``phi^(n)``: ``A -> A (x) H^(n-1)`` with ``A`` on leg 1."""
    if isinstance(phi, (Coaction, Coproduct)):
        phi = phi.map
    if n < 2:
        raise ValueError("iterate needs N >= 2")
    out = phi
    for _ in range(n - 2):
        out = out.compose(phi, leg=1)
    return AlgebraMorphism(out.source, out.target, out.images, f"{phi.name}^({n})")


@dataclass
class CasimirCascade:
    coaction: Coaction
    casimir: Expr
    total: TensorAlgebraSpec
    morphisms: dict[int, AlgebraMorphism]
    elements: dict[int, Expr]

    @property
    def n(self) -> int:
        return self.total.legs

    @property
    def top(self) -> AlgebraMorphism:
        return self.morphisms[self.n]

    def __getitem__(self, i: int) -> Expr:
        return self.elements[i]

    def __iter__(self):
        return iter(self.elements.values())

    def __len__(self):
        return len(self.elements)


def cascade(
    phi: Coaction,
    c: Expr,
    n: int,
    check: bool = True,
    trials: int = DEFAULT_TRIALS,
    tol: float = DEFAULT_TOL,
    sampler: DomainSampler | None = None,
) -> CasimirCascade:
    """``C^(i) = phi^(i)(C)`` for ``i = 2..n``, all living on ``A (x) H^(n-1)``."""
    if check:
        res = is_casimir(phi.source, c, trials, tol, _sampler(sampler))
        if not res:
            raise NotCasimir(f"{c} does not commute with {res.witness_generator}")
    morphisms = {2: phi.map}
    for i in range(3, n + 1):
        morphisms[i] = AlgebraMorphism(
            phi.source,
            tensor(phi.source, *([phi.algebra] * (i - 1))),
            morphisms[i - 1].compose(phi.map, leg=1).images,
            f"{phi.map.name}^({i})",
        )
    elements = {i: morphisms[i](c) for i in range(2, n + 1)}
    total = tensor(phi.source, *([phi.algebra] * (n - 1)))
    return CasimirCascade(phi, c, total, morphisms, elements)


def verify_involution(
    total: BracketAlgebra,
    elements: Mapping[str, Expr] | Sequence[Expr],
    morphism: AlgebraMorphism | None = None,
    trials: int = DEFAULT_TRIALS,
    tol: float = DEFAULT_TOL,
    sampler: DomainSampler | None = None,
) -> Report:
    """All pairwise brackets vanish; with ``morphism`` attached, each element
    also commutes with the image of every source generator."""
    if not isinstance(elements, Mapping):
        elements = {f"I{i}": e for i, e in enumerate(elements)}
    zeros = []
    items = list(elements.items())
    for (n1, e1), (n2, e2) in combinations(items, 2):
        zeros.append((f"{{{n1},{n2}}}", bracket(total, e1, e2)))
    if morphism is not None:
        for g in morphism.source.generators:
            img = morphism.images[g]
            for n1, e1 in items:
                zeros.append((f"{{{morphism.name}({g.ident}),{n1}}}", bracket(total, img, e1)))
    return check_zeros(zeros, trials, tol, _sampler(sampler), f"involutivity in {total.name}")


# ---------------------------------------------------------------------------
# subalgebra chains
# ---------------------------------------------------------------------------

@dataclass
class ChainStep:
    """One link ``B_i`` of a chain with its embedding and Casimir.

    ``embedding`` maps generators of ``algebra`` into the two-leg algebra
    ``B_{i-1} (x) A_{i+1}`` (``A_1 (x) A_2`` for the first link), with the
    previous link on leg 1.
    """

    algebra: PoissonAlgebraSpec
    embedding: Mapping[Symbol, Expr]
    casimir: Expr


@dataclass
class ChainResult:
    casimirs: list[Expr]
    embeddings: list[dict[Symbol, Expr]]
    total: TensorAlgebraSpec
    report: Report


def chain_casimirs(
    factors: Sequence[PoissonAlgebraSpec],
    steps: Sequence[ChainStep],
    trials: int = DEFAULT_TRIALS,
    tol: float = DEFAULT_TOL,
    sampler: DomainSampler | None = None,
) -> ChainResult:
    """Commuting family from a chain ``B_1 < A_1(x)A_2``, ``B_{i+1} < B_i(x)A_{i+2}``.

    Returns ``C_i`` = image of ``C_{B_i}`` in ``A_1 (x) ... (x) A_N``, padded by
    units, and a report of pairwise commutation and centrality in ``B_{N-1}``.
    """
    if len(factors) != len(steps) + 1:
        raise ValueError("a chain of N-1 links needs N factor algebras")
    sampler = _sampler(sampler)
    rep = Report("subalgebra chain")
    total = tensor(*factors)
    full: list[dict[Symbol, Expr]] = []
    casimirs: list[Expr] = []
    prev: PoissonAlgebraSpec | None = None
    for i, step in enumerate(steps, start=1):
        left = factors[0] if prev is None else prev
        two_leg = tensor(left, factors[i])
        emb = AlgebraMorphism(step.algebra, two_leg, dict(step.embedding), f"iota_{i}")
        hom = verify_homomorphism(emb, trials, tol, sampler)
        if not hom.passed:
            raise EmbeddingNotHomomorphism(f"link {i}: {hom.failures[0].name}")
        rep.add(Check(f"link {i} embedding is a homomorphism", True))
        cas = is_casimir(step.algebra, step.casimir, trials, tol, sampler)
        if not cas:
            raise NotCasimir(f"link {i}: casimir fails against {cas.witness_generator}")
        rep.add(Check(f"link {i} casimir is central in B_{i}", True))
        # compose with the previous embedding into A_1 (x) ... (x) A_{i+1}
        composed = {}
        for g, img in emb.images.items():
            rules: dict[Symbol, Expr] = {}
            for s in img.symbols:
                if s.kind is not Kind.GENERATOR:
                    continue
                if s.site == 1 and prev is not None:
                    rules[s] = full[-1][s.on_site(None)]
                elif s.site == 2:
                    rules[s] = s.on_site(i + 1)
            composed[g] = substitute(img, rules)
        full.append(composed)
        casimirs.append(substitute(step.casimir, composed))
        prev = step.algebra
    named = {f"C_{i}": c for i, c in enumerate(casimirs, start=1)}
    top = AlgebraMorphism(steps[-1].algebra, total, full[-1], f"iota_{len(steps)}")
    inv = verify_involution(total, named, top, trials, tol, sampler)
    rep.extend(inv)
    return ChainResult(casimirs, full, total, rep)


def chain_from_coaction(phi: Coaction, c: Expr, n: int) -> tuple[list[PoissonAlgebraSpec], list[ChainStep]]:
    """Theorem-1 data recast as a chain with ``B_i = phi^(i+1)(A)``."""
    factors = [phi.source] + [phi.algebra] * (n - 1)
    steps = [ChainStep(phi.source, phi.map.images, c) for _ in range(n - 1)]
    return factors, steps


# ---------------------------------------------------------------------------
# coactions induced by subalgebras of a Hopf algebra
# ---------------------------------------------------------------------------

def induce_coaction_from_subalgebra(
    hopf: Coproduct,
    generators: Sequence[Symbol],
    name: str | None = None,
    casimirs: Mapping[str, Expr] | None = None,
) -> Coaction:
    """Restrict ``Delta_B`` to a subalgebra ``A`` whose coproducts have all
    left-leg factors inside ``A``; the restriction is a coaction ``A -> A (x) B``."""
    B = hopf.algebra
    gens = [g for g in B.generators if g in set(generators)]
    if len(gens) != len(set(generators)):
        unknown = set(generators) - set(B.generators)
        raise UnknownGenerator(next(iter(unknown)), B.name)
    inside = set(gens)
    params = set(B.parameters)
    table = {}
    for a, b in combinations(gens, 2):
        v = B.pair(a, b)
        stray = {s for s in v.symbols if s not in inside and s not in params}
        if stray:
            raise ConditionViolated(f"{{{a.ident},{b.ident}}}", v, sorted(s.ident for s in stray))
        if v != ZERO:
            table[(a, b)] = v
    for g in gens:
        img = hopf.map.images[g]
        terms = img.terms if isinstance(img, Add) else (img,)
        for t in terms:
            left = {s for s in t.symbols if s.kind is Kind.GENERATOR and s.site == 1}
            bad = {s.on_site(None) for s in left} - inside
            if bad:
                raise ConditionViolated(g.ident, t, sorted(s.ident for s in bad))
    sub = poisson_algebra(name or f"sub({B.name})", gens, table, casimirs, B.parameters, check_jacobi=False)
    images = {g: hopf.map.images[g] for g in gens}
    return coaction(sub, hopf, images, name=f"phi[{sub.name}]")
