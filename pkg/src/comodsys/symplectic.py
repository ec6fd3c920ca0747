"""Canonical phase spaces and symplectic realizations of Poisson algebras.

Convention: ``{q_i, p_j} = delta_ij``, so Hamilton's equations read
``dq/dt = dH/dp`` and ``dp/dt = -dH/dq``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Mapping, Sequence

from .errors import SiteCollision, UnknownGenerator
from .expr import ONE, ZERO, Expr, Kind, Symbol, add, differentiate, mul, momentum, position, substitute
from .poisson import BracketAlgebra, PoissonAlgebraSpec, check_identities, check_zeros
from .report import Check, Report
from .sampling import DomainSampler


@dataclass(frozen=True, eq=False)
class PhaseSpace(BracketAlgebra):
    """Canonical pairs ``(q_i, p_i)`` for ``i`` in ``sites``."""

    sites: tuple[int, ...]

    def __post_init__(self):
        if len(set(self.sites)) != len(self.sites):
            raise ValueError("duplicate phase-space site")
        gens = []
        for i in self.sites:
            gens += [position(i), momentum(i)]
        object.__setattr__(self, "generators", tuple(gens))
        object.__setattr__(self, "name", f"R^{2 * len(self.sites)}")

    @classmethod
    def of_degree(cls, n: int) -> "PhaseSpace":
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def covering(cls, *exprs: Expr) -> "PhaseSpace":
        sites = sorted({s.site for e in exprs for s in e.symbols if s.is_canonical})
        return cls(tuple(sites))

    @property
    def degrees(self) -> int:
        return len(self.sites)

    @property
    def positions(self) -> tuple[Symbol, ...]:
        return tuple(position(i) for i in self.sites)

    @property
    def momenta(self) -> tuple[Symbol, ...]:
        return tuple(momentum(i) for i in self.sites)

    @property
    def coordinates(self) -> tuple[Symbol, ...]:
        """State ordering ``(q_1..q_N, p_1..p_N)``."""
        return self.positions + self.momenta

    def pair(self, x: Symbol, y: Symbol) -> Expr:
        if x.site != y.site:
            return ZERO
        if x.kind is Kind.POSITION and y.kind is Kind.MOMENTUM:
            return ONE
        if x.kind is Kind.MOMENTUM and y.kind is Kind.POSITION:
            return mul(-1, ONE)
        return ZERO


def canonical_bracket(f: Expr, g: Expr, ps: PhaseSpace | None = None) -> Expr:
    """``sum_i df/dq_i dg/dp_i - df/dp_i dg/dq_i``."""
    if ps is None:
        ps = PhaseSpace.covering(f, g)
    for s in (f.symbols | g.symbols):
        if s.kind is Kind.GENERATOR or (s.is_canonical and not ps.knows(s)):
            raise UnknownGenerator(s, ps.name)
    terms = []
    for q, p in zip(ps.positions, ps.momenta):
        fq = differentiate(f, q) if q in f.symbols else ZERO
        gp = differentiate(g, p) if p in g.symbols else ZERO
        if fq != ZERO and gp != ZERO:
            terms.append(mul(fq, gp))
        fp = differentiate(f, p) if p in f.symbols else ZERO
        gq = differentiate(g, q) if q in g.symbols else ZERO
        if fp != ZERO and gq != ZERO:
            terms.append(mul(-1, fp, gq))
    return add(*terms)


@dataclass(frozen=True, eq=False)
class SymplecticRealization:
    """Generator images over local canonical sites ``1..pairs``."""

    algebra: PoissonAlgebraSpec
    images: Mapping[Symbol, Expr]
    pairs: int
    name: str = "realization"

    def __post_init__(self):
        for g in self.algebra.generators:
            if g not in self.images:
                raise ValueError(f"{self.name}: no image for {g.ident}")
        for img in self.images.values():
            for s in img.symbols:
                if s.kind is Kind.GENERATOR:
                    raise UnknownGenerator(s, "phase space")
                if s.is_canonical and not 1 <= s.site <= self.pairs:
                    raise ValueError(f"{self.name}: {s.ident} outside local sites 1..{self.pairs}")

    def shifted(self, offset: int) -> dict[Symbol, Expr]:
        if offset == 0:
            return dict(self.images)
        rules = {}
        for i in range(1, self.pairs + 1):
            rules[position(i)] = position(i + offset)
            rules[momentum(i)] = momentum(i + offset)
        return {g: substitute(img, rules) for g, img in self.images.items()}

    def __call__(self, e: Expr, offset: int = 0) -> Expr:
        return substitute(e, self.shifted(offset))

    @property
    def phase_space(self) -> PhaseSpace:
        return PhaseSpace.of_degree(self.pairs)


def verify_realization(
    spec: PoissonAlgebraSpec,
    real: SymplecticRealization,
    trials: int = 100,
    tol: float = 1e-9,
    sampler: DomainSampler | None = None,
    casimir_values: Mapping[str, Expr] | None = None,
) -> Report:
    """Bracket preservation on generator pairs plus casimir constancy.

    A casimir must realize to a phase-space constant; when an expected value
    is supplied the realized expression is also compared with it.
    """
    sampler = sampler if sampler is not None else DomainSampler()
    ps = real.phase_space
    ids = []
    for a, b in combinations(spec.generators, 2):
        lhs = canonical_bracket(real.images[a], real.images[b], ps)
        rhs = real(spec.pair(a, b))
        ids.append((f"{{{a.ident},{b.ident}}}", lhs, rhs))
    rep = check_identities(ids, trials, tol, sampler, f"realization {real.name} of {spec.name}")
    casimir_values = casimir_values or {}
    for cname, c in spec.casimirs.items():
        val = real(c)
        grads = [(f"d({cname})/d{x.ident}", differentiate(val, x)) for x in ps.coordinates]
        flat = check_zeros(grads, trials, tol, sampler, "")
        rep.add(Check(f"casimir {cname} is constant", flat.passed, "" if flat.passed else "realized casimir depends on phase space",
                      deviation=max((c_.deviation or 0.0) for c_ in flat.checks) if flat.checks else 0.0))
        if cname in casimir_values:
            r = check_identities([(f"casimir {cname} value", val, casimir_values[cname])], trials, tol, sampler, "")
            rep.extend(r)
    return rep


def assign_sites(pairs_per_leg: Sequence[int], start: int = 0) -> list[int]:
    """Consecutive site offsets for legs consuming the given numbers of pairs."""
    out, off = [], start
    for n in pairs_per_leg:
        out.append(off)
        off += n
    return out


@dataclass(frozen=True, eq=False)
class LegAssignment:
    """Per-leg realizations with site offsets into one phase space."""

    legs: tuple[tuple[SymplecticRealization, int], ...]

    def __post_init__(self):
        used: dict[int, int] = {}
        for leg, (real, off) in enumerate(self.legs, start=1):
            for i in range(off + 1, off + real.pairs + 1):
                if i in used:
                    raise SiteCollision(f"legs {used[i]} and {leg} both claim canonical pair {i}")
                used[i] = leg

    @classmethod
    def sequential(cls, reals: Sequence[SymplecticRealization]) -> "LegAssignment":
        offs = assign_sites([r.pairs for r in reals])
        return cls(tuple(zip(reals, offs)))

    @property
    def phase_space(self) -> PhaseSpace:
        sites = sorted(i for real, off in self.legs for i in range(off + 1, off + real.pairs + 1))
        return PhaseSpace(tuple(sites))

    def rules(self) -> dict[Symbol, Expr]:
        rules: dict[Symbol, Expr] = {}
        for leg, (real, off) in enumerate(self.legs, start=1):
            for g, img in real.shifted(off).items():
                rules[g.on_site(leg)] = img
        return rules


def realize(e: Expr, legs: LegAssignment | Sequence[tuple[SymplecticRealization, int]]) -> Expr:
    """Push a tensor-algebra element to phase space leg by leg."""
    if not isinstance(legs, LegAssignment):
        legs = LegAssignment(tuple(legs))
    rules = legs.rules()
    for s in e.symbols:
        if s.kind is Kind.GENERATOR and s not in rules:
            raise UnknownGenerator(s, "the realized legs")
    return substitute(e, rules)
