"""Poisson algebras presented by generators and a bracket table.

A bracket table fixes ``{x_i, x_j}`` for generators; the bracket of arbitrary
expressions follows from bilinearity and the Leibniz rule,

    {f, g} = sum_ij  df/dx_i * dg/dx_j * {x_i, x_j},

which also covers non-polynomial functions (exp, rational powers) through
the chain rule.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .errors import UnknownGenerator
from .expr import ZERO, Expr, Kind, Symbol, add, differentiate, mul, substitute
from .report import Check, Report
from .sampling import DomainSampler, EqualityResult, zero_many


class BracketAlgebra:
    """Anything with generators and a generator bracket table."""

    name: str
    generators: tuple[Symbol, ...]

    def pair(self, x: Symbol, y: Symbol) -> Expr:
        raise NotImplementedError

    def knows(self, s: Symbol) -> bool:
        return s in self._generator_set

    @property
    def _generator_set(self) -> frozenset:
        cache = self.__dict__.get("_gset")
        if cache is None:
            cache = frozenset(self.generators)
            object.__setattr__(self, "_gset", cache)
        return cache


@dataclass(frozen=True, eq=False)
class PoissonAlgebraSpec(BracketAlgebra):
    name: str
    generators: tuple[Symbol, ...]
    table: Mapping[tuple[Symbol, Symbol], Expr]
    casimirs: Mapping[str, Expr] = field(default_factory=dict)
    parameters: tuple[Symbol, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "_index", {g: i for i, g in enumerate(self.generators)})

    def pair(self, x: Symbol, y: Symbol) -> Expr:
        ix, iy = self._index[x], self._index[y]
        if ix == iy:
            return ZERO
        if ix < iy:
            return self.table.get((x, y), ZERO)
        v = self.table.get((y, x))
        return ZERO if v is None else mul(-1, v)

    @property
    def dimension(self) -> int:
        return len(self.generators)

    def __repr__(self):
        return f"PoissonAlgebraSpec({self.name!r}, {len(self.generators)} generators)"


def poisson_algebra(
    name: str,
    generators: Sequence[Symbol],
    brackets: Mapping[tuple[Symbol, Symbol], Expr],
    casimirs: Mapping[str, Expr] | None = None,
    parameters: Sequence[Symbol] = (),
    check_jacobi: bool = True,
    sampler: DomainSampler | None = None,
) -> PoissonAlgebraSpec:
    """Build a spec from brackets given in either orientation.

    Pairs absent from ``brackets`` Poisson-commute.  Unless
    ``check_jacobi`` is false the Jacobi identity is verified on all
    generator triples and a ``ValueError`` is raised on failure.
    """
    gens = tuple(generators)
    index = {g: i for i, g in enumerate(gens)}
    if len(index) != len(gens):
        raise ValueError("duplicate generator")
    allowed = set(gens) | set(parameters)
    table: dict[tuple[Symbol, Symbol], Expr] = {}
    for (x, y), v in brackets.items():
        for s in (x, y):
            if s not in index:
                raise UnknownGenerator(s, name)
        v = v if isinstance(v, Expr) else mul(v)
        stray = v.symbols - allowed
        if stray:
            raise UnknownGenerator(next(iter(stray)), name)
        if x == y:
            if v != ZERO:
                raise ValueError(f"{{{x.ident},{x.ident}}} must vanish")
            continue
        key, val = ((x, y), v) if index[x] < index[y] else ((y, x), mul(-1, v))
        if key in table and table[key] != val:
            raise ValueError(f"conflicting brackets for {key[0].ident}, {key[1].ident}")
        if val != ZERO:
            table[key] = val
    spec = PoissonAlgebraSpec(name, gens, table, dict(casimirs or {}), tuple(parameters))
    if check_jacobi:
        rep = jacobi_check(spec, sampler=sampler)
        if not rep.passed:
            raise ValueError(f"Jacobi identity fails for {name}: {rep.failures[0].name}")
    return spec


@dataclass(frozen=True, eq=False)
class TensorAlgebraSpec(BracketAlgebra):
    """Ordered tensor product; factor ``i`` (1-based) lives on site ``i``."""

    factors: tuple[PoissonAlgebraSpec, ...]

    def __post_init__(self):
        gens = []
        for leg, f in enumerate(self.factors, start=1):
            gens.extend(g.on_site(leg) for g in f.generators)
        object.__setattr__(self, "generators", tuple(gens))
        object.__setattr__(self, "name", " (x) ".join(f.name for f in self.factors))
        object.__setattr__(self, "_leg_cache", {})

    @property
    def legs(self) -> int:
        return len(self.factors)

    @property
    def parameters(self) -> tuple[Symbol, ...]:
        seen: dict[Symbol, None] = {}
        for f in self.factors:
            for p in f.parameters:
                seen[p] = None
        return tuple(seen)

    def factor(self, leg: int) -> PoissonAlgebraSpec:
        return self.factors[leg - 1]

    def leg_map(self, leg: int) -> dict[Symbol, Symbol]:
        """Unsited factor generator -> generator on ``leg``."""
        return {g: g.on_site(leg) for g in self.factor(leg).generators}

    def pair(self, x: Symbol, y: Symbol) -> Expr:
        if x.site != y.site or x.site is None:
            return ZERO
        key = (x, y)
        cache = self._leg_cache
        if key not in cache:
            f = self.factor(x.site)
            val = f.pair(x.on_site(None), y.on_site(None))
            cache[key] = substitute(val, self.leg_map(x.site)) if val != ZERO else ZERO
        return cache[key]

    def place(self, e: Expr, leg: int) -> Expr:
        """Embed an expression of factor ``leg`` as ``1 (x) .. e .. (x) 1``."""
        return substitute(e, self.leg_map(leg))

    def __repr__(self):
        return f"TensorAlgebraSpec({self.name})"


def tensor(*specs) -> TensorAlgebraSpec:
    """Tensor product; nested tensors are flattened into one leg list."""
    factors: list[PoissonAlgebraSpec] = []
    for s in specs:
        if isinstance(s, TensorAlgebraSpec):
            factors.extend(s.factors)
        else:
            factors.append(s)
    return TensorAlgebraSpec(tuple(factors))


def tensor_power(spec: PoissonAlgebraSpec, n: int) -> TensorAlgebraSpec:
    return tensor(*([spec] * n))


def _active(alg: BracketAlgebra, e: Expr) -> list[Symbol]:
    out = []
    for s in e.symbols:
        if s.kind is Kind.PARAMETER:
            continue
        if not alg.knows(s):
            raise UnknownGenerator(s, alg.name)
        out.append(s)
    return out


def bracket(alg: BracketAlgebra, f: Expr, g: Expr) -> Expr:
    """Leibniz-extended bracket ``{f, g}``."""
    fs, gs = _active(alg, f), _active(alg, g)
    if not fs or not gs:
        return ZERO
    memo_f: dict = {}
    memo_g: dict = {}
    df: dict[Symbol, Expr] = {}
    dg: dict[Symbol, Expr] = {}
    terms = []
    for x in fs:
        for y in gs:
            pxy = alg.pair(x, y)
            if pxy == ZERO:
                continue
            if x not in df:
                df[x] = differentiate(f, x, memo_f)
                memo_f.clear()
            if y not in dg:
                dg[y] = differentiate(g, y, memo_g)
                memo_g.clear()
            terms.append(mul(df[x], dg[y], pxy))
    return add(*terms)


def jacobiator(alg: BracketAlgebra, a: Expr, b: Expr, c: Expr) -> tuple[Expr, Expr, Expr]:
    return (
        bracket(alg, a, bracket(alg, b, c)),
        bracket(alg, c, bracket(alg, a, b)),
        bracket(alg, b, bracket(alg, c, a)),
    )


def jacobi_check(
    alg: BracketAlgebra,
    trials: int = 100,
    tol: float = 1e-9,
    sampler: DomainSampler | None = None,
) -> Report:
    """Jacobi identity on every triple of distinct generators."""
    rep = Report(f"Jacobi identity for {alg.name}")
    triples = list(combinations(alg.generators, 3))
    exprs, names = [], []
    for a, b, c in triples:
        exprs.append(add(*jacobiator(alg, a, b, c)))
        names.append(f"({a.ident},{b.ident},{c.ident})")
    nontrivial = [(n, e) for n, e in zip(names, exprs) if e != ZERO]
    results = zero_many([e for _, e in nontrivial], trials, tol, sampler or DomainSampler())
    res_by_name = {n: r for (n, _), r in zip(nontrivial, results)}
    for n in names:
        r = res_by_name.get(n)
        if r is None:
            rep.add(Check(f"jacobi {n}", True, "vanishes structurally", deviation=0.0))
        else:
            rep.add(Check(f"jacobi {n}", r.equal, "" if r.equal else "Jacobiator nonzero", r.witness, r.deviation))
    return rep


@dataclass
class CasimirResult:
    is_casimir: bool
    witness_generator: Symbol | None = None
    witness: dict[str, float] | None = None
    deviation: float = 0.0

    def __bool__(self):
        return self.is_casimir


def is_casimir(
    alg: BracketAlgebra,
    c: Expr,
    trials: int = 100,
    tol: float = 1e-9,
    sampler: DomainSampler | None = None,
) -> CasimirResult:
    """Whether ``{c, x}`` vanishes for every generator ``x``."""
    brs = [(g, bracket(alg, c, g)) for g in alg.generators]
    live = [(g, b) for g, b in brs if b != ZERO]
    results = zero_many([b for _, b in live], trials, tol, sampler or DomainSampler())
    worst = 0.0
    for (g, _), r in zip(live, results):
        worst = max(worst, r.deviation)
        if not r.equal:
            return CasimirResult(False, g, r.witness, r.deviation)
    return CasimirResult(True, deviation=worst)


def check_identities(
    named: Iterable[tuple[str, Expr, Expr]],
    trials: int,
    tol: float,
    sampler: DomainSampler | None,
    title: str,
) -> Report:
    """Batch ``lhs == rhs`` checks into a report.

    Each identity is tested as ``lhs - rhs == 0`` with the term-scaled
    residual of :func:`zero_many`, so large cancelling terms near a pole do
    not masquerade as violations.
    """
    named = list(named)
    rep = Report(title)
    diffs = [(n, add(l, mul(-1, r))) for n, l, r in named]
    live = [(n, d) for n, d in diffs if d != ZERO]
    results: list[EqualityResult] = zero_many([d for _, d in live], trials, tol, sampler or DomainSampler())
    by_name = {n: r for (n, _), r in zip(live, results)}
    for n, _ in diffs:
        r = by_name.get(n)
        if r is None:
            rep.add(Check(n, True, "identical", deviation=0.0))
        else:
            rep.add(Check(n, r.equal, "" if r.equal else "identity violated", r.witness, r.deviation))
    return rep


def check_zeros(
    named: Iterable[tuple[str, Expr]],
    trials: int,
    tol: float,
    sampler: DomainSampler | None,
    title: str,
) -> Report:
    named = list(named)
    rep = Report(title)
    live = [(n, e) for n, e in named if e != ZERO]
    results = zero_many([e for _, e in live], trials, tol, sampler or DomainSampler())
    by_name = {n: r for (n, _), r in zip(live, results)}
    for n, _ in named:
        r = by_name.get(n)
        if r is None:
            rep.add(Check(n, True, "vanishes structurally", deviation=0.0))
        else:
            rep.add(Check(n, r.equal, "" if r.equal else "nonzero", r.witness, r.deviation))
    return rep
