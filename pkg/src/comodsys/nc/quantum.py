"""Quantum integrable models built from iterated coactions.

Two families: the q-oscillator coacted on by su_q(2), whose Hamiltonian
``H = A+ A`` is pushed through ``phi^(k)``, and the reflection-equation
algebra coacted on by GL_q(2), whose two Casimirs factor through
q-determinants.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable

from ..errors import BudgetExceeded, NonTerminating
from ..report import Check, Report
from .algebra import NCAlgebra, NCPoly, _merge, check_budget, legword_str
from .morphism import NCMorphism, compose_on_first_leg, verify_nc_morphism
from .presets import (
    det_q,
    jordan_schwinger,
    q,
    q_oscillator_casimir,
    q_oscillator_coaction,
    q_oscillator_system,
    re_casimirs,
    re_coaction,
    re_coaction_target,
    re_system,
    s,
    single,
    suq2_casimir,
    suq2_coproduct,
    suq2_system,
    glq2_system,
)

DEFAULT_MAX_TERMS = 50_000
MAX_K = 4


def _lift(p: NCPoly, alg: NCAlgebra) -> NCPoly:
    """Embed ``p`` into a larger tensor algebra (missing legs carry units)."""
    for leg in p.legs():
        if alg.system(leg) is not p.alg.system(leg):
            raise ValueError(f"leg {leg} carries a different algebra")
    return NCPoly(alg, p.terms)


def classical_limit(p: NCPoly) -> dict[tuple, Fraction]:
    """Coefficients at ``q = 1`` with group-like letters set to 1.

    Words become tuples of ``(leg, name, exponent)`` over plain letters.
    """
    out: dict[tuple, Fraction] = {}
    for w, c in p.terms.items():
        v = c.at_q_one()
        if not v:
            continue
        key = []
        for leg, lw in w:
            sys_ = p.alg.system(leg)
            key.extend((leg, n, e) for n, e in _merge(tuple(t for t in lw if not sys_.is_grouplike(t[0]))))
        key = tuple(key)
        out[key] = out.get(key, Fraction(0)) + v
        if not out[key]:
            del out[key]
    return out


def limit_str(limit: dict[tuple, Fraction]) -> str:
    if not limit:
        return "0"
    parts = []
    for key, v in limit.items():
        word = "*".join(f"{n}_{leg}" + ("" if e == 1 else f"^{e}") for leg, n, e in key) or "1"
        parts.append(f"{v}*{word}" if v != 1 else word)
    return " + ".join(parts)


def _guard(p: NCPoly, max_terms: int, what: str) -> NCPoly:
    try:
        check_budget(p, max_terms)
    except BudgetExceeded as e:
        raise BudgetExceeded(f"{what}: {e}") from None
    return p


# ---------------------------------------------------------------------------
# q-oscillator tower
# ---------------------------------------------------------------------------

def oscillator_target(k: int) -> NCAlgebra:
    """``A_q`` on leg 1 and su_q(2) on legs 2..k."""
    return NCAlgebra({1: q_oscillator_system(), **{l: suq2_system() for l in range(2, k + 1)}})


def oscillator_tower(k: int) -> dict[int, NCMorphism]:
    """``phi^(m)`` for ``m = 2..k``."""
    if k < 2:
        raise ValueError("k >= 2 required")
    phi = q_oscillator_coaction()
    maps = {2: phi}
    for m in range(3, k + 1):
        maps[m] = compose_on_first_leg(phi, maps[m - 1], oscillator_target(m), f"phi^({m})")
    return maps


@dataclass
class QuantumOscillatorModel:
    k: int
    algebra: NCAlgebra
    morphisms: dict[int, NCMorphism]
    hamiltonian: NCPoly
    integrals: dict[int, NCPoly]
    hamiltonians: dict[int, NCPoly] = field(default_factory=dict)

    def named_integrals(self) -> dict[str, NCPoly]:
        out = {"H": self.hamiltonian}
        out.update({f"C({m})": c for m, c in self.integrals.items()})
        return out


def build_quantum_hamiltonian(k: int, max_terms: int = DEFAULT_MAX_TERMS, budget: int | None = None) -> QuantumOscillatorModel:
    """``H^(k) = phi^(k)(A+) phi^(k)(A)`` and ``C^(m)`` for ``m = 2..k``.

    ``C^(m) = H^(m) - (q^(-2 phi^(m)(N)) - 1)/(q^-2 - 1)``; the number
    operator enters only through the group-like image of ``q^N``.
    """
    if k < 2:
        raise ValueError("k >= 2 required")
    if k > MAX_K:
        raise BudgetExceeded(f"k = {k} exceeds the supported size {MAX_K}")
    maps = oscillator_tower(k)
    alg = oscillator_target(k)
    inv = (q(-2) - 1).inverse()
    hs, cs = {}, {}
    alg.begin(budget)
    try:
        for m in range(2, k + 1):
            mm = maps[m]
            h = _guard(mm.images["Ad"] * mm.images["A"], max_terms, f"H^({m})")
            shift = (mm.letter_image("EN", -2) - 1).scale(inv)
            hs[m] = _lift(h, alg)
            cs[m] = _lift(h - shift, alg)
    except NonTerminating as e:
        raise BudgetExceeded(str(e)) from None
    finally:
        alg.end()
    return QuantumOscillatorModel(k, alg, maps, hs[k], cs, hs)


def printed_oscillator_h2() -> NCPoly:
    """Hand-expanded ``H^(2)``:
    ``A+A q^2J + (q - q^-1) q^-2N X+X- + s q^-N q^J (q^-1 A X+ + q A+ X-)``."""
    g = oscillator_target(2).gen
    return (
        g("Ad", 1) * g("A", 1) * g("EJ", 2, 2)
        + (g("EN", 1, -2) * g("Xp", 2) * g("Xm", 2)).scale(q(1) - q(-1))
        + (g("EN", 1, -1) * g("EJ", 2) * ((g("A", 1) * g("Xp", 2)).scale(q(-1)) + (g("Ad", 1) * g("Xm", 2)).scale(q(1)))).scale(s())
    )


def _commutes(a: NCPoly, b: NCPoly) -> tuple[bool, int]:
    c = a * b - b * a
    return c.is_zero(), len(c)


def audit_report(systems) -> Report:
    rep = Report("rewrite-system audits")
    for sys_ in systems:
        rep.extend(sys_.audit(), prefix=sys_.name)
    return rep


def verify_quantum_oscillator(model: QuantumOscillatorModel) -> Report:
    rep = Report(f"quantum q-oscillator model, k = {model.k}")
    rep.extend(audit_report([q_oscillator_system(), q_oscillator_system(True), suq2_system()]))
    rep.extend(verify_nc_morphism(q_oscillator_coaction()))
    rep.extend(verify_nc_morphism(suq2_coproduct()))
    rep.extend(verify_nc_morphism(jordan_schwinger()))
    a = single(q_oscillator_system())
    cq = q_oscillator_casimir(a)
    for n in ("A", "Ad", "EN"):
        ok, size = _commutes(cq, a.gen(n))
        rep.add(Check(f"C_q central: [C_q, {n}] = 0", ok, "" if ok else f"{size} terms survive"))
    u = single(suq2_system())
    lq = suq2_casimir(u)
    for n in ("Xp", "Xm", "EJ"):
        ok, size = _commutes(lq, u.gen(n))
        rep.add(Check(f"L_q central: [L_q, {n}] = 0", ok, "" if ok else f"{size} terms survive"))
    items = list(model.named_integrals().items())
    for (n1, e1), (n2, e2) in combinations(items, 2):
        ok, size = _commutes(e1, e2)
        rep.add(Check(f"[{n1}, {n2}] = 0", ok, "" if ok else f"{size} terms survive"))
    h2 = model.hamiltonians[2]
    ok = (h2 - _lift(printed_oscillator_h2(), model.algebra)).is_zero()
    rep.add(Check("H^(2) agrees with its hand expansion", ok))
    lim = classical_limit(h2)
    ok = lim == {((1, "Ad", 1), (1, "A", 1)): Fraction(1)}
    rep.add(Check("H^(2) at q = 1 reduces to A+ A", ok, limit_str(lim)))
    return rep


# ---------------------------------------------------------------------------
# reflection-equation algebra
# ---------------------------------------------------------------------------

def _re_sample_hamiltonian(alg: NCAlgebra, leg: int = 0) -> NCPoly:
    g = lambda n: alg.gen(n, leg)
    return g("alpha") * g("delta") + g("beta") + g("gamma") * g("gamma")


@dataclass
class REModel:
    k: int
    algebra: NCAlgebra
    morphisms: dict[int, NCMorphism]
    hamiltonian: NCPoly
    integrals: dict[str, NCPoly]

    def named_integrals(self) -> dict[str, NCPoly]:
        return {"H": self.hamiltonian, **self.integrals}


def build_re_model(
    k: int,
    hamiltonian: Callable[[NCAlgebra, int], NCPoly] | None = None,
    max_terms: int = DEFAULT_MAX_TERMS,
) -> REModel:
    """``H^(k)`` for a polynomial ``H(alpha, beta, gamma, delta)`` and ``c_i^(m)``."""
    if k < 2:
        raise ValueError("k >= 2 required")
    if k > MAX_K:
        raise BudgetExceeded(f"k = {k} exceeds the supported size {MAX_K}")
    hamiltonian = hamiltonian or _re_sample_hamiltonian
    alg = re_coaction_target(k)
    maps = {m: re_coaction(m) for m in range(2, k + 1)}
    integrals = {}
    for m, phi in maps.items():
        c1, c2 = re_casimirs(phi.source, 0)
        integrals[f"c1({m})"] = _lift(_guard(phi(c1), max_terms, f"c1^({m})"), alg)
        integrals[f"c2({m})"] = _lift(_guard(phi(c2), max_terms, f"c2^({m})"), alg)
    src = maps[k].source
    h = _guard(maps[k](hamiltonian(src, 0)), max_terms, f"H^({k})")
    return REModel(k, alg, maps, h, integrals)


def casimir_factorization_check(k: int, sample_hamiltonian: bool = True) -> Report:
    """``phi^(k)(c_1) = prod det_q T_l c_1`` and the squared version for ``c_2``,
    plus the commutation relations among ``H^(m)``, ``c_1^(k)`` and ``c_2^(p)``."""
    if k < 2:
        raise ValueError("k >= 2 required")
    rep = Report(f"RE casimir factorization, k = {k}")
    rep.extend(audit_report([re_system(), glq2_system()]))
    g1 = single(glq2_system(), 1)
    d = det_q(g1, 1)
    for n in "abcd":
        ok, size = _commutes(d, g1.gen(n, 1))
        rep.add(Check(f"det_q central: [det_q T, {n}] = 0", ok, "" if ok else f"{size} terms survive"))
    r = single(re_system(), 0)
    for i, c in enumerate(re_casimirs(r, 0), start=1):
        for n in ("alpha", "beta", "gamma", "delta"):
            ok, size = _commutes(c, r.gen(n, 0))
            rep.add(Check(f"c{i} central: [c{i}, {n}] = 0", ok, "" if ok else f"{size} terms survive"))
    for m in range(2, k + 1):
        phi = re_coaction(m)
        rep.extend(verify_nc_morphism(phi))
        tgt = phi.target
        c1, c2 = re_casimirs(phi.source, 0)
        dets = tgt.one()
        for l in range(1, m):
            dets = dets * det_q(tgt, l)
        k1, k2 = re_casimirs(tgt, 0)
        i1, i2 = phi(c1), phi(c2)
        rep.add(Check(f"c1^({m}) = prod det_q T_l * c1", (i1 - dets * k1).is_zero()))
        rep.add(Check(f"c2^({m}) = prod (det_q T_l)^2 * c2", (i2 - dets * dets * k2).is_zero()))
    if sample_hamiltonian:
        model = build_re_model(k)
        items = list(model.named_integrals().items())
        for (n1, e1), (n2, e2) in combinations(items, 2):
            ok, size = _commutes(e1, e2)
            rep.add(Check(f"[{n1}, {n2}] = 0", ok, "" if ok else f"{size} terms survive"))
    return rep


def describe(p: NCPoly, limit: int = 12) -> str:
    """Short human rendering of a long polynomial."""
    items = list(p.terms.items())
    parts = []
    for w, c in items[:limit]:
        ws = " ".join(legword_str(lw, leg) for leg, lw in w) or "1"
        parts.append(f"[{c}] {ws}")
    more = f" + ... ({len(items) - limit} more terms)" if len(items) > limit else ""
    return " + ".join(parts) + more if parts else "0"
