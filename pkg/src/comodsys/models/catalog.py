"""Catalog of ready-made integrable models.

Each family builds a :class:`ClassicalBundle` (Poisson coaction, cascade,
Hamiltonian, integrals and a symplectic realization) or a
:class:`QuantumBundle` (noncommutative coaction and its commuting family).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Any, Callable, Mapping

from ..coaction import (
    CasimirCascade,
    Coaction,
    cascade,
    verify_coassociativity,
    verify_comodule_axiom,
    verify_homomorphism,
    verify_involution,
)
from ..errors import InvalidParameter, UnknownModel
from ..expr import Expr, Symbol, add, const, mul
from ..poisson import TensorAlgebraSpec, check_identities, check_zeros, is_casimir, jacobi_check
from ..report import Check, Report
from ..sampling import DomainSampler
from ..symplectic import LegAssignment, PhaseSpace, SymplecticRealization, canonical_bracket, realize, verify_realization
from . import algebras as alg
from . import reference

DEFAULT_TRIALS = 100
DEFAULT_TOL = 1e-9


# ---------------------------------------------------------------------------
# parameter schemas
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ParamSpec:
    name: str
    kind: str  # int | float | list | choice
    default: Any
    doc: str
    minimum: float | None = None
    maximum: float | None = None
    positive: bool = False
    choices: tuple = ()
    aliases: tuple = ()

    def coerce(self, value):
        try:
            if self.kind == "int":
                if isinstance(value, float) and not value.is_integer():
                    raise ValueError
                v = int(value)
            elif self.kind == "float":
                v = float(value)
                if not math.isfinite(v):
                    raise ValueError
            elif self.kind == "list":
                if isinstance(value, (int, float)):
                    value = [value]
                v = [float(x) for x in value]
                if not all(math.isfinite(x) for x in v):
                    raise ValueError
            else:
                v = str(value)
        except (TypeError, ValueError):
            raise InvalidParameter(f"{self.name}: cannot use {value!r} as {self.kind}") from None
        if self.kind == "choice" and v not in self.choices:
            raise InvalidParameter(f"{self.name} must be one of {list(self.choices)}, got {v!r}")
        if self.kind in ("int", "float"):
            if self.minimum is not None and v < self.minimum:
                raise InvalidParameter(f"{self.name} must be >= {self.minimum}, got {v}")
            if self.maximum is not None and v > self.maximum:
                raise InvalidParameter(f"{self.name} must be <= {self.maximum}, got {v}")
            if self.positive and v <= 0:
                raise InvalidParameter(f"{self.name} must be positive, got {v}")
        return v

    def to_dict(self) -> dict:
        out = {"name": self.name, "type": self.kind, "default": self.default, "doc": self.doc}
        if self.minimum is not None:
            out["minimum"] = self.minimum
        if self.maximum is not None:
            out["maximum"] = self.maximum
        if self.choices:
            out["choices"] = list(self.choices)
        return out


def resolve_params(specs: tuple[ParamSpec, ...], given: Mapping[str, Any] | None) -> dict[str, Any]:
    by_name = {}
    for s in specs:
        by_name[s.name] = s
        for a in s.aliases:
            by_name[a] = s
    out = {s.name: (list(s.default) if isinstance(s.default, list) else s.default) for s in specs}
    for key, value in (given or {}).items():
        spec = by_name.get(key)
        if spec is None:
            raise InvalidParameter(f"unknown parameter {key!r}; expected one of {[s.name for s in specs]}")
        if value is None:
            continue
        out[spec.name] = spec.coerce(value)
    return out


def _pad(values: list[float], n: int, name: str, fill: float = 1.0) -> list[float]:
    if len(values) > n:
        raise InvalidParameter(f"{name} has {len(values)} entries, at most {n} allowed")
    return list(values) + [fill] * (n - len(values))


# ---------------------------------------------------------------------------
# bundles
# ---------------------------------------------------------------------------

@dataclass
class ModelBundle:
    name: str
    kind: str
    params: dict[str, Any]
    info: "ModelInfo"

    def describe(self) -> dict:
        return {"name": self.name, "kind": self.kind, "params": self.params, "construction": self.info.construction}


@dataclass
class ClassicalBundle(ModelBundle):
    coaction: Coaction
    total: TensorAlgebraSpec
    casimir_name: str
    cascade: CasimirCascade
    hamiltonian: Expr
    integrals: dict[str, Expr]
    legs: LegAssignment
    parameter_values: dict[Symbol, float]
    x0: list[float]
    closed_forms: list = field(default_factory=list)
    casimir_values: dict[str, dict[str, Expr]] = field(default_factory=dict)
    declared: dict[str, Expr] = field(default_factory=dict)

    @property
    def phase_space(self) -> PhaseSpace:
        return self.legs.phase_space

    @property
    def degrees_of_freedom(self) -> int:
        return self.phase_space.degrees

    def realized(self, e: Expr) -> Expr:
        return realize(e, self.legs)

    @cached_property
    def realized_hamiltonian(self) -> Expr:
        return self.realized(self.hamiltonian)

    @cached_property
    def realized_integrals(self) -> dict[str, Expr]:
        return {n: self.realized(e) for n, e in self.integrals.items()}

    def sampler(self, seed: int = 0) -> DomainSampler:
        return DomainSampler(seed=seed, fixed=dict(self.parameter_values))

    def realizations(self) -> list[SymplecticRealization]:
        seen, out = set(), []
        for real, _ in self.legs.legs:
            key = (real.name, real.algebra.name, tuple(sorted((g.ident, str(v)) for g, v in real.images.items())))
            if key not in seen:
                seen.add(key)
                out.append(real)
        return out


@dataclass
class QuantumBundle(ModelBundle):
    model: Any
    verifier: Callable[[Any], Report]

    @property
    def hamiltonian(self):
        return self.model.hamiltonian

    @property
    def integrals(self) -> dict:
        return self.model.named_integrals()


@dataclass(frozen=True)
class ModelInfo:
    name: str
    kind: str
    summary: str
    construction: str
    params: tuple[ParamSpec, ...]
    builder: Callable[[dict], ModelBundle]

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "kind": self.kind,
            "summary": self.summary,
            "construction": self.construction,
            "params": [p.to_dict() for p in self.params],
        }


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------

def _cascade(phi: Coaction, cname: str, n: int) -> CasimirCascade:
    return cascade(phi, phi.source.casimirs[cname], n, check=False)


def _x0(dof: int, qs: list[float], ps: list[float]) -> list[float]:
    q = [qs[i % len(qs)] + 0.05 * (i // len(qs)) for i in range(dof)]
    p = [ps[i % len(ps)] for i in range(dof)]
    return q + p


def _tail_repeat(dof: int, qs: list[float], ps: list[float]) -> list[float]:
    # most q-oscillator orbits escape along the noncompact N flow; this start
    # stays bounded up to t = 20 for k <= 5 and 0.05 <= z <= 0.2
    q = [qs[min(i, len(qs) - 1)] for i in range(dof)]
    p = [ps[min(i, len(ps) - 1)] for i in range(dof)]
    return q + p


def _build_so22(info: "ModelInfo", params: dict) -> ClassicalBundle:
    n = params["N"]
    cs = _pad(params["c"], n - 1, "c")
    phi = alg.so22_coaction()
    cas = _cascade(phi, "C1", n)
    top = cas.top
    integrals: dict[str, Expr] = {}
    if params["variant"] == "calogero":
        h = top.images[alg.Jp]
        integrals["H"] = h
        integrals.update({f"C1({m})": cas[m] for m in range(2, n + 1)})
        integrals["Np"] = top.images[alg.Np]
    else:
        h = add(top.images[alg.Jp], mul(-1, top.images[alg.Jm]))
        integrals["H"] = h
        integrals.update({f"C1({m})": cas[m] for m in range(2, n + 1)})
        integrals["Np-Nm"] = add(top.images[alg.Np], mul(-1, top.images[alg.Nm]))
    legs = LegAssignment.sequential([alg.so22_realization()] + [alg.so21_realization(alg.coupling(k + 2)) for k in range(1, n)])
    values = {alg.a12: params["a12"], alg.b12: params["b12"]}
    values.update({alg.coupling(k + 3): c for k, c in enumerate(cs)})
    forms = [f for f in reference.closed_forms(max_m=min(n, 4)) if f.name.startswith("C_")]
    dval = {"C1": mul(-1, add(alg.a12, alg.b12)), "C2": mul(Fraction(-1, 2), add(alg.a12, mul(-1, alg.b12)))}
    return ClassicalBundle(
        info.name, "classical", params, info, phi, cas.total, "C1", cas, h, integrals, legs, values,
        _x0(n + 1, [1.3, 0.4, 0.9, 1.1, 0.7, 1.5], [0.2, -0.3, 0.1, -0.2, 0.25]),
        forms, {"D": dval},
    )


def _build_schrodinger(kind: str):
    def build(info: "ModelInfo", params: dict) -> ClassicalBundle:
        n = params["N"]
        lams = _pad(params["lam"], n, "lam")
        phi = alg.gl2_sigma_coaction() if kind == "sigma" else alg.gl2_tau_coaction()
        cas = _cascade(phi, "CA", n)
        h = cas.top(add(alg.H, alg.C))
        integrals = {"H": h}
        integrals.update({f"C({m})": cas[m] for m in range(2, n + 1)})
        reals = [alg.gl2_realization()] + [alg.schrodinger_realization(alg.mass(k)) for k in range(2, n + 1)]
        legs = LegAssignment.sequential(reals)
        deform = alg.sigma if kind == "sigma" else alg.tau
        values = {deform: params[kind]}
        values.update({alg.mass(k + 1): v for k, v in enumerate(lams)})
        forms = [f for f in reference.closed_forms(max_m=2) if f"{kind}-deformed" in f.name]
        return ClassicalBundle(
            info.name, "classical", params, info, phi, cas.total, "CA", cas, h, integrals, legs, values,
            _x0(n, [0.6, -0.4, 0.3, -0.5, 0.45], [0.3, 0.5, -0.2, 0.4, -0.35]),
            forms, {"S": {"CA": const(0)}},
        )

    return build


def _build_q_oscillator(info: "ModelInfo", params: dict) -> ClassicalBundle:
    k = params["k"]
    phi = alg.q_oscillator_coaction()
    cas = _cascade(phi, "Cq", k)
    top = cas.top
    h = mul(top.images[alg.QAd], top.images[alg.QA])
    integrals = {"H": h}
    integrals.update({f"C({m})": cas[m] for m in range(2, k + 1)})
    integrals["N"] = top.images[alg.QN]
    legs = LegAssignment.sequential([alg.q_oscillator_realization()] + [alg.suq2_realization()] * (k - 1))
    values = {alg.z: params["z"]}
    return ClassicalBundle(
        info.name, "classical", params, info, phi, cas.total, "Cq", cas, h, integrals, legs, values,
        _tail_repeat(k, [-1.4, 0.1, -0.1], [-1.3, 0.4, 1.1]),
        [], {"R": {"Cq": const(0)}},
    )


def _build_quantum_oscillator(info: "ModelInfo", params: dict) -> QuantumBundle:
    from ..nc.quantum import build_quantum_hamiltonian, verify_quantum_oscillator

    model = build_quantum_hamiltonian(params["k"])
    return QuantumBundle(info.name, "quantum", params, info, model, verify_quantum_oscillator)


def _build_re(info: "ModelInfo", params: dict) -> QuantumBundle:
    from ..nc.quantum import build_re_model, casimir_factorization_check

    model = build_re_model(params["k"])
    return QuantumBundle(info.name, "quantum", params, info, model, lambda m: casimir_factorization_check(m.k))


_SIZE = lambda name, default, maximum=None: ParamSpec(name, "int", default, "number of tensor legs", minimum=2, maximum=maximum)

CATALOG: dict[str, ModelInfo] = {}


def _register(info: ModelInfo) -> None:
    CATALOG[info.name] = info


_register(ModelInfo(
    "so22-calogero", "classical",
    "(N+1)-body Calogero-type system with inverse-square couplings",
    "so(2,2) comodule algebra over so(2,1) with primitive coproduct; two-body Calogero realization D on leg 1, "
    "one-body S(c_k) on the other legs",
    (
        _SIZE("N", 2),
        ParamSpec("a12", "float", 1.0, "coupling of 1/(q1+q2)^2"),
        ParamSpec("b12", "float", 1.0, "coupling of 1/(q1-q2)^2"),
        ParamSpec("c", "list", [1.0], "couplings c_3..c_{N+1} (padded with 1)"),
        ParamSpec("variant", "choice", "calogero", "H = phi(J+) or the confined phi(J+) - phi(J-)", choices=("calogero", "confined")),
    ),
    _build_so22,
))
_register(ModelInfo(
    "schrodinger-sigma", "classical",
    "space-type deformation of the N-dimensional isotropic oscillator",
    "gl(2) comodule algebra induced from the sigma-deformed Poisson-Schrodinger coproduct; H = H + C",
    (
        _SIZE("N", 2),
        ParamSpec("sigma", "float", 0.1, "deformation parameter", aliases=("σ",)),
        ParamSpec("lam", "list", [1.0], "scales lambda_1..lambda_N (padded with 1)", aliases=("λ", "lambda")),
    ),
    _build_schrodinger("sigma"),
))
_register(ModelInfo(
    "schrodinger-tau", "classical",
    "time-type deformation of the N-dimensional isotropic oscillator",
    "gl(2) comodule algebra induced from the tau-deformed Poisson-Schrodinger coproduct; H = H + C",
    (
        _SIZE("N", 2),
        ParamSpec("tau", "float", 0.1, "deformation parameter", aliases=("τ",)),
        ParamSpec("lam", "list", [1.0], "scales lambda_1..lambda_N (padded with 1)", aliases=("λ", "lambda")),
    ),
    _build_schrodinger("tau"),
))
_register(ModelInfo(
    "q-oscillator-classical", "classical",
    "classical q-oscillator chain H = phi(A+) phi(A) with k degrees of freedom",
    "Poisson q-oscillator algebra coacted on by Poisson su_q(2); C_q = 0 realization on leg 1, "
    "one-pair su_q(2) realizations on the other legs",
    (
        _SIZE("k", 2),
        ParamSpec("z", "float", 0.1, "deformation parameter (q = e^z)", positive=True),
    ),
    _build_q_oscillator,
))
_register(ModelInfo(
    "q-oscillator-quantum", "quantum",
    "quantum q-deformed three-wave type Hamiltonian H = phi(A+) phi(A)",
    "q-oscillator algebra A_q as a su_q(2) comodule algebra; exact normal forms over Q(q^(1/2))[s]",
    (_SIZE("k", 2, maximum=4),),
    _build_quantum_oscillator,
))
_register(ModelInfo(
    "re-algebra", "quantum",
    "reflection-equation algebra with a sample polynomial Hamiltonian",
    "RE algebra with GL_q(2) matrix coaction K -> T K T^t; Casimirs c1 = beta - q gamma, c2 = alpha delta - q^2 beta gamma",
    (_SIZE("k", 2, maximum=4),),
    _build_re,
))


def list_models() -> list[dict]:
    return [info.to_dict() for info in CATALOG.values()]


def model_info(name: str) -> ModelInfo:
    try:
        return CATALOG[name]
    except KeyError:
        raise UnknownModel(f"unknown model {name!r}; available: {sorted(CATALOG)}") from None


def build_model(name: str, params: Mapping[str, Any] | None = None) -> ModelBundle:
    """Build a catalog model.  Verification is deferred to :func:`verify_bundle`."""
    info = model_info(name)
    resolved = resolve_params(info.params, params)
    return info.builder(info, resolved)


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------

def verify_bundle(bundle: ModelBundle, trials: int = DEFAULT_TRIALS, tol: float = DEFAULT_TOL, seed: int = 0) -> Report:
    if isinstance(bundle, QuantumBundle):
        rep = Report(f"verify {bundle.name}")
        rep.extend(bundle.verifier(bundle.model))
        return rep
    return _verify_classical(bundle, trials, tol, seed)


def _verify_classical(b: ClassicalBundle, trials: int, tol: float, seed: int) -> Report:
    rep = Report(f"verify {b.name}")
    mk = lambda: b.sampler(seed)
    phi = b.coaction
    rep.extend(jacobi_check(phi.source, trials, tol, mk()))
    rep.extend(jacobi_check(phi.algebra, trials, tol, mk()))
    rep.extend(verify_homomorphism(phi.hopf, trials, tol, mk()))
    rep.extend(verify_coassociativity(phi.hopf, trials, tol, mk()))
    rep.extend(verify_homomorphism(phi, trials, tol, mk()))
    rep.extend(verify_comodule_axiom(phi, trials, tol, mk()))
    for name, c in phi.source.casimirs.items():
        r = is_casimir(phi.source, c, trials, tol, mk())
        rep.add(Check(f"casimir {name} of {phi.source.name}", r.is_casimir,
                      "" if r else f"fails against {r.witness_generator}", r.witness, r.deviation))
    cascade_elems = {f"{b.casimir_name}({m})": b.cascade[m] for m in range(2, b.cascade.n + 1)}
    rep.extend(verify_involution(b.total, cascade_elems, b.cascade.top, trials, tol, mk()), prefix="cascade")
    rep.extend(verify_involution(b.total, b.integrals, None, trials, tol, mk()), prefix="integrals")
    for real in b.realizations():
        rep.extend(verify_realization(real.algebra, real, trials, tol, mk(), b.casimir_values.get(real.name)))
    ps = b.phase_space
    realized = b.realized_integrals
    names = list(realized)
    zeros = [(f"{{{a},{c}}} realized", canonical_bracket(realized[a], realized[c], ps))
             for i, a in enumerate(names) for c in names[i + 1:]]
    rep.extend(check_zeros(zeros, trials, tol, mk(), ""))
    rep.add(Check(
        "integral count covers degrees of freedom", len(realized) >= ps.degrees,
        f"{len(realized)} integrals for {ps.degrees} degrees of freedom",
    ))
    rank = integral_rank(b, seed)
    rep.add(Check(
        "Jacobian rank of the integrals (informational)", True,
        f"numerical rank {rank} of {len(realized)} integrals on {ps.degrees} degrees of freedom",
        flagged=rank < ps.degrees,
    ))
    if b.closed_forms:
        rep.extend(reference.crosscheck(b.closed_forms, trials, tol, seed))
    if b.declared:
        # realized expressions stored alongside an imported model
        current = {"hamiltonian": b.realized_hamiltonian, **realized}
        ids = [(f"declared {n} matches its derivation", current[n], e) for n, e in b.declared.items() if n in current]
        rep.extend(check_identities(ids, trials, tol, mk(), ""))
        for n in b.declared:
            if n not in current:
                rep.add(Check(f"declared {n} matches its derivation", False, "no integral of that name"))
    return rep


def integral_rank(b: ClassicalBundle, seed: int = 0, points: int = 5) -> int:
    from ..dynamics import independence_rank
    import numpy as np

    realized = list(b.realized_integrals.values())
    ps = b.phase_space
    pts = b.sampler(seed).sample(realized, points)
    arr = np.column_stack([pts[s] if s in pts else np.zeros(points) for s in ps.coordinates])
    params = {s: v for s, v in b.parameter_values.items()}
    return independence_rank(realized, ps, arr, params)
