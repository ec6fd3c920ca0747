"""Declarative JSON model files.

A model file describes a classical bundle (Poisson algebras, coproduct,
coaction, realizations, Hamiltonian, integrals) or a quantum one (rewrite
systems, tensor algebras, morphisms, central elements, integrals).
Expressions are stored in Python syntax as produced by
:func:`comodsys.expr.to_string`; :func:`parse_expr` reads them back.

Exported files also carry machine-derived realized expressions.  On import
they are kept as declarations and re-checked by :func:`verify_bundle`.
"""

from __future__ import annotations

import ast
import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Any, Mapping

from .coaction import cascade, coaction, coproduct
from .errors import ComodsysError, ModelFileError
from .expr import (
    Expr,
    Kind,
    Symbol,
    add,
    exp,
    generator,
    momentum,
    mul,
    parameter,
    position,
    power,
    sqrt,
    to_string,
)
from .models.catalog import ClassicalBundle, ModelBundle, ModelInfo, QuantumBundle
from .nc.algebra import NCAlgebra, NCPoly, RewriteSystem
from .nc.morphism import NCMorphism, verify_nc_morphism
from .nc.qcoeff import QCoeff
from .poisson import PoissonAlgebraSpec, poisson_algebra
from .report import Check, Report
from .symplectic import LegAssignment, SymplecticRealization

FORMAT = "comodsys-model"
SCHEMA_VERSION = 1

_CANONICAL = re.compile(r"^([qp])([0-9]+)$")
_SITED = re.compile(r"^(.+)_([0-9]+)$")


# ---------------------------------------------------------------------------
# expressions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Namespace:
    """Declared generator and parameter names used to resolve identifiers."""

    generators: frozenset = frozenset()
    parameters: frozenset = frozenset()

    def resolve(self, name: str) -> Symbol:
        if name in self.parameters:
            return parameter(name)
        m = _CANONICAL.match(name)
        if m:
            i = int(m.group(2))
            return position(i) if m.group(1) == "q" else momentum(i)
        if name in self.generators:
            return generator(name)
        m = _SITED.match(name)
        if m and m.group(1) in self.generators:
            return generator(m.group(1), int(m.group(2)))
        raise ModelFileError(f"undeclared symbol {name!r}")


def _const_value(node: ast.AST) -> Fraction | None:
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
        return Fraction(str(node.value)) if isinstance(node.value, float) else Fraction(node.value)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _const_value(node.operand)
        return None if v is None else (-v if isinstance(node.op, ast.USub) else v)
    if isinstance(node, ast.BinOp) and isinstance(node.op, ast.Div):
        a, b = _const_value(node.left), _const_value(node.right)
        if a is not None and b is not None and b != 0:
            return a / b
    return None


def parse_expr(text: str, ns: Namespace) -> Expr:
    """Parse an expression written with ``+ - * / **``, ``exp`` and ``sqrt``."""
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as e:
        raise ModelFileError(f"cannot parse {text!r}: {e.msg}") from None

    def go(node: ast.AST) -> Expr:
        v = _const_value(node)
        if v is not None:
            return mul(v)
        if isinstance(node, ast.Name):
            return ns.resolve(node.id)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
            return mul(-1, go(node.operand))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.UAdd):
            return go(node.operand)
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Add):
                return add(go(node.left), go(node.right))
            if isinstance(node.op, ast.Sub):
                return add(go(node.left), mul(-1, go(node.right)))
            if isinstance(node.op, ast.Mult):
                return mul(go(node.left), go(node.right))
            if isinstance(node.op, ast.Div):
                return mul(go(node.left), power(go(node.right), -1))
            if isinstance(node.op, ast.Pow):
                e = _const_value(node.right)
                if e is None:
                    raise ModelFileError(f"exponent must be a rational constant in {text!r}")
                return power(go(node.left), e)
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and len(node.args) == 1 and not node.keywords:
            if node.func.id == "exp":
                return exp(go(node.args[0]))
            if node.func.id == "sqrt":
                return sqrt(go(node.args[0]))
        raise ModelFileError(f"unsupported syntax {ast.dump(node)[:60]} in {text!r}")

    return go(tree.body)


# ---------------------------------------------------------------------------
# classical export
# ---------------------------------------------------------------------------

def _algebra_dict(spec: PoissonAlgebraSpec) -> dict:
    return {
        "name": spec.name,
        "generators": [g.ident for g in spec.generators],
        "parameters": [p.ident for p in spec.parameters],
        "brackets": [[x.ident, y.ident, to_string(v)] for (x, y), v in spec.table.items()],
        "casimirs": {n: to_string(c) for n, c in spec.casimirs.items()},
    }


def _images(images: Mapping[Symbol, Expr]) -> dict:
    return {g.ident: to_string(v) for g, v in images.items()}


def _header(bundle: ModelBundle) -> dict:
    return {
        "format": FORMAT,
        "schema_version": SCHEMA_VERSION,
        "name": bundle.name,
        "kind": bundle.kind,
        "summary": bundle.info.summary,
        "construction": bundle.info.construction,
        "catalog_params": bundle.params,
    }


def classical_to_dict(b: ClassicalBundle) -> dict:
    phi = b.coaction
    algebras = [phi.source] if phi.source is phi.algebra else [phi.source, phi.algebra]
    reals: list[SymplecticRealization] = []
    legs = []
    for real, off in b.legs.legs:
        idx = next((i for i, r in enumerate(reals) if r is real), None)
        if idx is None:
            reals.append(real)
            idx = len(reals) - 1
        legs.append({"realization": idx, "offset": off})
    declared: dict[str, dict] = {}
    for a in algebras + [r.algebra for r in reals]:
        d = _algebra_dict(a)
        if declared.setdefault(a.name, d) != d:
            raise ModelFileError(f"two different algebras named {a.name}")
    out = _header(b)
    out.update({
        "parameters": {s.ident: float(v) for s, v in b.parameter_values.items()},
        "algebras": list(declared.values()),
        "coproduct": {"algebra": phi.algebra.name, "images": _images(phi.hopf.map.images)},
        "coaction": {"name": phi.map.name, "source": phi.source.name, "images": _images(phi.map.images)},
        "cascade": {"casimir": b.casimir_name, "legs": b.cascade.n},
        "hamiltonian": to_string(b.hamiltonian),
        "integrals": {n: to_string(e) for n, e in b.integrals.items()},
        "realizations": [
            {"name": r.name, "algebra": r.algebra.name, "pairs": r.pairs, "images": _images(r.images)} for r in reals
        ],
        "legs": legs,
        "casimir_values": {r: {c: to_string(v) for c, v in vals.items()} for r, vals in b.casimir_values.items()},
        "initial_state": [float(x) for x in b.x0],
        "derived": {
            "realized_hamiltonian": to_string(b.realized_hamiltonian),
            "realized_integrals": {n: to_string(e) for n, e in b.realized_integrals.items()},
        },
    })
    return out


# ---------------------------------------------------------------------------
# classical import
# ---------------------------------------------------------------------------

def _need(d: Mapping, key: str, where: str):
    if key not in d:
        raise ModelFileError(f"{where}: missing field {key!r}")
    return d[key]


def _namespace(doc: Mapping) -> Namespace:
    gens, params = set(), set(doc.get("parameters", {}))
    for a in _need(doc, "algebras", "model"):
        gens.update(_need(a, "generators", f"algebra {a.get('name')}"))
        params.update(a.get("parameters", []))
    return Namespace(frozenset(gens), frozenset(params))


def _algebra_from_dict(d: Mapping, ns: Namespace) -> PoissonAlgebraSpec:
    name = _need(d, "name", "algebra")
    gens = [ns.resolve(g) for g in _need(d, "generators", name)]
    brackets = {}
    for item in d.get("brackets", []):
        if len(item) != 3:
            raise ModelFileError(f"{name}: bracket entries are [x, y, value]")
        x, y, v = item
        brackets[(ns.resolve(x), ns.resolve(y))] = parse_expr(v, ns)
    casimirs = {n: parse_expr(v, ns) for n, v in d.get("casimirs", {}).items()}
    params = [ns.resolve(p) for p in d.get("parameters", [])]
    try:
        return poisson_algebra(name, gens, brackets, casimirs, params, check_jacobi=False)
    except (ComodsysError, ValueError) as e:
        raise ModelFileError(f"algebra {name}: {e}") from None


def _parse_images(d: Mapping[str, str], ns: Namespace) -> dict[Symbol, Expr]:
    return {ns.resolve(g): parse_expr(v, ns) for g, v in d.items()}


def classical_from_dict(doc: Mapping) -> ClassicalBundle:
    ns = _namespace(doc)
    algebras = {}
    for a in doc["algebras"]:
        spec = _algebra_from_dict(a, ns)
        if spec.name in algebras:
            raise ModelFileError(f"algebra {spec.name} declared twice")
        algebras[spec.name] = spec

    def algebra(name: str) -> PoissonAlgebraSpec:
        if name not in algebras:
            raise ModelFileError(f"undeclared algebra {name!r}")
        return algebras[name]

    try:
        cp = _need(doc, "coproduct", "model")
        hopf = coproduct(algebra(_need(cp, "algebra", "coproduct")), _parse_images(_need(cp, "images", "coproduct"), ns))
        ca = _need(doc, "coaction", "model")
        source = algebra(_need(ca, "source", "coaction"))
        phi = coaction(source, hopf, _parse_images(_need(ca, "images", "coaction"), ns), ca.get("name", "phi"))
        cs = _need(doc, "cascade", "model")
        cname, n = _need(cs, "casimir", "cascade"), int(_need(cs, "legs", "cascade"))
        if cname not in source.casimirs:
            raise ModelFileError(f"cascade casimir {cname!r} is not declared on {source.name}")
        if n < 2:
            raise ModelFileError("cascade needs at least 2 legs")
        cas = cascade(phi, source.casimirs[cname], n, check=False)
        reals = [
            SymplecticRealization(algebra(r["algebra"]), _parse_images(r["images"], ns), int(r["pairs"]), r.get("name", "realization"))
            for r in _need(doc, "realizations", "model")
        ]
        leg_items = _need(doc, "legs", "model")
        if len(leg_items) != n:
            raise ModelFileError(f"{len(leg_items)} leg realizations for a {n}-leg cascade")
        legs = LegAssignment(tuple((reals[int(l["realization"])], int(l["offset"])) for l in leg_items))
        h = parse_expr(_need(doc, "hamiltonian", "model"), ns)
        integrals = {k: parse_expr(v, ns) for k, v in _need(doc, "integrals", "model").items()}
    except ModelFileError:
        raise
    except (ComodsysError, ValueError, KeyError, IndexError, TypeError) as e:
        raise ModelFileError(f"inconsistent model: {e}") from None
    for e in [h, *integrals.values()]:
        for s in e.symbols:
            if s.kind is Kind.GENERATOR and not cas.total.knows(s):
                raise ModelFileError(f"{s.ident} is not a generator of the {n}-leg tensor algebra")
    values = {ns.resolve(k): float(v) for k, v in doc.get("parameters", {}).items()}
    declared = {}
    derived = doc.get("derived") or {}
    if "realized_hamiltonian" in derived:
        declared["hamiltonian"] = parse_expr(derived["realized_hamiltonian"], ns)
    for k, v in derived.get("realized_integrals", {}).items():
        declared[k] = parse_expr(v, ns)
    casimir_values = {
        r: {c: parse_expr(v, ns) for c, v in vals.items()} for r, vals in doc.get("casimir_values", {}).items()
    }
    dof = legs.phase_space.degrees
    x0 = [float(x) for x in doc.get("initial_state", [0.5] * (2 * dof))]
    info = _imported_info(doc)
    return ClassicalBundle(
        info.name, "classical", dict(doc.get("catalog_params", {})), info, phi, cas.total, cname, cas, h, integrals,
        legs, values, x0, [], casimir_values, declared,
    )


def _imported_info(doc: Mapping) -> ModelInfo:
    return ModelInfo(
        doc.get("name", "imported"), doc.get("kind", "classical"), doc.get("summary", ""),
        doc.get("construction", "imported from a model file"), (), lambda params: None,
    )


# ---------------------------------------------------------------------------
# quantum models
# ---------------------------------------------------------------------------

@dataclass
class QuantumSystem:
    """A quantum model read from a file: algebras, maps and a commuting family."""

    systems: dict[str, RewriteSystem]
    algebras: dict[str, NCAlgebra]
    morphisms: list[NCMorphism]
    central: dict[str, NCPoly]
    integrals: dict[str, NCPoly] = field(default_factory=dict)

    @property
    def hamiltonian(self) -> NCPoly:
        return self.integrals["H"]

    def named_integrals(self) -> dict[str, NCPoly]:
        return dict(self.integrals)


def _fmt_fraction(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _legword_json(lw) -> list:
    return [[n, _fmt_fraction(e)] for n, e in lw]


def _legpoly_json(lp: Mapping) -> list:
    return [[c.to_json(), _legword_json(w)] for w, c in lp.items()]


def _poly_json(p: NCPoly) -> list:
    return [[c.to_json(), [[leg, _legword_json(lw)] for leg, lw in w]] for w, c in p.terms.items()]


def _system_json(s: RewriteSystem) -> dict:
    return {
        "name": s.name,
        "order": list(s.order),
        "grouplike": [n for n in s.order if n in s.grouplike],
        "weights": [[g, x, _fmt_fraction(w)] for (g, x), w in s.weights.items()],
        "rules": [[y, x, _legpoly_json(rhs)] for (y, x), rhs in s.rules.items()],
        "contractions": [[x, y, _legpoly_json(rhs)] for (x, y), rhs in s.contractions.items()],
    }


def _algebra_json(a: NCAlgebra) -> dict:
    return {"name": a.name, "legs": [[leg, s.name] for leg, s in a.legs.items()]}


def _quantum_parts(model) -> tuple[list[NCMorphism], dict[str, NCPoly]]:
    from .nc.presets import q_oscillator_casimir, re_casimirs, single, suq2_casimir, det_q, glq2_system, q_oscillator_system, re_system, suq2_system
    from .nc.quantum import QuantumOscillatorModel, REModel

    if isinstance(model, QuantumSystem):
        return list(model.morphisms), dict(model.central)
    morphisms = [model.morphisms[m] for m in sorted(model.morphisms)]
    if isinstance(model, QuantumOscillatorModel):
        central = {
            "C_q": q_oscillator_casimir(single(q_oscillator_system())),
            "L_q": suq2_casimir(single(suq2_system())),
        }
    elif isinstance(model, REModel):
        r = single(re_system(), 0)
        c1, c2 = re_casimirs(r, 0)
        central = {"c1": c1, "c2": c2, "det_q": det_q(single(glq2_system(), 1), 1)}
    else:
        raise ModelFileError(f"cannot export quantum model of type {type(model).__name__}")
    return morphisms, central


def quantum_to_dict(b: QuantumBundle) -> dict:
    morphisms, central = _quantum_parts(b.model)
    integrals = b.model.named_integrals()
    algebras: dict[str, NCAlgebra] = {}
    for a in [m.source for m in morphisms] + [m.target for m in morphisms] + [p.alg for p in central.values()] + [p.alg for p in integrals.values()]:
        if a.name in algebras and algebras[a.name] != a:
            raise ModelFileError(f"two different algebras named {a.name}")
        algebras.setdefault(a.name, a)
    systems: dict[str, RewriteSystem] = {}
    for a in algebras.values():
        for s in a.legs.values():
            if s.name in systems and systems[s.name] is not s:
                raise ModelFileError(f"two different rewrite systems named {s.name}")
            systems.setdefault(s.name, s)
    out = _header(b)
    out.update({
        "systems": [_system_json(s) for s in systems.values()],
        "algebras": [_algebra_json(a) for a in algebras.values()],
        "morphisms": [
            {"name": m.name, "source": m.source.name, "target": m.target.name,
             "images": {n: _poly_json(m.images[n]) for n in m.system.order}}
            for m in morphisms
        ],
        "central": {n: {"algebra": p.alg.name, "poly": _poly_json(p)} for n, p in central.items()},
        "integrals": {n: {"algebra": p.alg.name, "poly": _poly_json(p)} for n, p in integrals.items()},
    })
    return out


def _legword(data) -> tuple:
    return tuple((n, Fraction(e)) for n, e in data)


def _legpoly(data) -> dict:
    return {_legword(w): QCoeff.from_json(c) for c, w in data}


def _plain_exponents(w: tuple, sys_: RewriteSystem) -> tuple:
    return tuple((n, e if sys_.is_grouplike(n) else int(e)) for n, e in w)


def _poly(data, alg: NCAlgebra) -> NCPoly:
    terms = {}
    for c, w in data:
        word = tuple((int(leg), _plain_exponents(_legword(lw), alg.system(int(leg)))) for leg, lw in w)
        terms[word] = QCoeff.from_json(c)
    return NCPoly(alg, terms)


def quantum_from_dict(doc: Mapping) -> QuantumBundle:
    try:
        systems = {}
        for s in _need(doc, "systems", "model"):
            order = s["order"]
            sys_tmp = set(s.get("grouplike", []))
            fix = lambda lp: {tuple((n, e if n in sys_tmp else int(e)) for n, e in w): c for w, c in _legpoly(lp).items()}
            systems[s["name"]] = RewriteSystem(
                s["name"], order, s.get("grouplike", []),
                {(g, x): Fraction(w) for g, x, w in s.get("weights", [])},
                {(y, x): fix(rhs) for y, x, rhs in s.get("rules", [])},
                {(x, y): fix(rhs) for x, y, rhs in s.get("contractions", [])},
            )
        algebras = {}
        for a in _need(doc, "algebras", "model"):
            legs = {}
            for leg, sname in a["legs"]:
                if sname not in systems:
                    raise ModelFileError(f"algebra {a['name']}: undeclared system {sname!r}")
                legs[int(leg)] = systems[sname]
            algebras[a["name"]] = NCAlgebra(legs, a["name"])

        def algebra(name):
            if name not in algebras:
                raise ModelFileError(f"undeclared algebra {name!r}")
            return algebras[name]

        morphisms = []
        for m in doc.get("morphisms", []):
            tgt = algebra(m["target"])
            images = {n: _poly(p, tgt) for n, p in m["images"].items()}
            morphisms.append(NCMorphism(algebra(m["source"]), tgt, images, m.get("name", "phi")))
        central = {n: _poly(d["poly"], algebra(d["algebra"])) for n, d in doc.get("central", {}).items()}
        integrals = {n: _poly(d["poly"], algebra(d["algebra"])) for n, d in _need(doc, "integrals", "model").items()}
    except ModelFileError:
        raise
    except (ComodsysError, ValueError, KeyError, IndexError, TypeError) as e:
        raise ModelFileError(f"inconsistent quantum model: {e}") from None
    if "H" not in integrals:
        raise ModelFileError("quantum model needs an integral named 'H'")
    model = QuantumSystem(systems, algebras, morphisms, central, integrals)
    info = _imported_info(doc)
    return QuantumBundle(info.name, "quantum", dict(doc.get("catalog_params", {})), info, model, verify_quantum_system)


def verify_quantum_system(model: QuantumSystem) -> Report:
    """Audits, relation preservation, centrality and pairwise commutators."""
    rep = Report("quantum model")
    for s in model.systems.values():
        rep.extend(s.audit(), prefix=s.name)
    for m in model.morphisms:
        rep.extend(verify_nc_morphism(m))
    for name, c in model.central.items():
        for leg, sys_ in c.alg.legs.items():
            for letter in sys_.order:
                x = c.alg.gen(letter, leg)
                comm = c * x - x * c
                rep.add(Check(f"{name} central: [{name}, {letter}_{leg}] = 0", comm.is_zero(),
                              "" if comm.is_zero() else f"{len(comm)} terms survive"))
    items = list(model.integrals.items())
    for (n1, e1), (n2, e2) in combinations(items, 2):
        if e1.alg != e2.alg:
            rep.add(Check(f"[{n1}, {n2}] = 0", False, "integrals live in different algebras"))
            continue
        comm = e1 * e2 - e2 * e1
        rep.add(Check(f"[{n1}, {n2}] = 0", comm.is_zero(), "" if comm.is_zero() else f"{len(comm)} terms survive"))
    return rep


# ---------------------------------------------------------------------------
# entry points
# ---------------------------------------------------------------------------

def to_dict(bundle: ModelBundle) -> dict:
    if isinstance(bundle, ClassicalBundle):
        return classical_to_dict(bundle)
    if isinstance(bundle, QuantumBundle):
        return quantum_to_dict(bundle)
    raise ModelFileError(f"cannot export {type(bundle).__name__}")


def from_dict(doc: Mapping[str, Any]) -> ModelBundle:
    if not isinstance(doc, Mapping):
        raise ModelFileError("model file must hold a JSON object")
    if doc.get("format") != FORMAT:
        raise ModelFileError(f"not a {FORMAT} document")
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ModelFileError(f"unsupported schema version {version!r} (expected {SCHEMA_VERSION})")
    kind = doc.get("kind")
    if kind == "classical":
        return classical_from_dict(doc)
    if kind == "quantum":
        return quantum_from_dict(doc)
    raise ModelFileError(f"kind must be 'classical' or 'quantum', got {kind!r}")


def dumps(bundle: ModelBundle) -> str:
    return json.dumps(to_dict(bundle), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def loads(text: str) -> ModelBundle:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ModelFileError(f"invalid JSON: {e}") from None
    return from_dict(doc)


def export_model(bundle: ModelBundle, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(bundle))


def import_model(path) -> ModelBundle:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())
