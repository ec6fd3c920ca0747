"""Catalog models: parameters, verification at defaults, closed forms.

Realized Casimir values and low-order integrals are re-derived here with
sympy from the raw realizations, independently of the expression engine.
"""

from fractions import Fraction

import pytest
import sympy as sp

from comodsys.errors import InvalidParameter, UnknownModel
from comodsys.expr import evaluate_exact, momentum, position
from comodsys.models import algebras as alg
from comodsys.models import reference
from comodsys.models.catalog import CATALOG, ClassicalBundle, QuantumBundle, build_model, list_models, verify_bundle

CLASSICAL = ["so22-calogero", "schrodinger-sigma", "schrodinger-tau", "q-oscillator-classical"]
QUANTUM = ["q-oscillator-quantum", "re-algebra"]

q1, q2, q3, p1, p2, p3 = sp.symbols("q1 q2 q3 p1 p2 p3")
A12, B12, C3 = sp.symbols("a12 b12 c3")


def so22_images_sympy():
    plus, minus = A12 / (q1 + q2) ** 2, B12 / (q1 - q2) ** 2
    half = sp.Rational(1, 2)
    return {
        "J3": p1 * q1 + p2 * q2, "Jp": half * (p1**2 + p2**2) + plus + minus, "Jm": -half * (q1**2 + q2**2),
        "N3": p1 * q2 + p2 * q1, "Np": p1 * p2 + plus - minus, "Nm": -q1 * q2,
    }


def so22_casimirs_sympy(g):
    half = sp.Rational(1, 2)
    c1 = half * g["J3"] ** 2 + half * g["N3"] ** 2 + 2 * g["Jp"] * g["Jm"] + 2 * g["Np"] * g["Nm"]
    c2 = half * g["J3"] * g["N3"] + g["Jp"] * g["Nm"] + g["Jm"] * g["Np"]
    return c1, c2


def to_sympy(e):
    from comodsys.expr import to_string

    return sp.sympify(to_string(e))


# -- catalog -------------------------------------------------------------------

def test_catalog_contents():
    names = [m["name"] for m in list_models()]
    assert names == CLASSICAL + QUANTUM
    for m in list_models():
        assert m["construction"] and m["summary"]
        assert all("default" in p for p in m["params"])


@pytest.mark.parametrize("name", CLASSICAL + QUANTUM)
def test_defaults_build(name):
    b = build_model(name)
    assert isinstance(b, ClassicalBundle if name in CLASSICAL else QuantumBundle)
    if isinstance(b, ClassicalBundle):
        assert len(b.x0) == 2 * b.degrees_of_freedom
        assert "H" in b.integrals


@pytest.mark.parametrize("name, params", [
    ("so22-calogero", {}),
    ("so22-calogero", {"N": 3, "variant": "confined", "c": [0.5, 2.0]}),
    ("schrodinger-sigma", {"N": 3}),
    ("schrodinger-tau", {"tau": 0.3, "lam": [1.2, 0.8]}),
    ("q-oscillator-classical", {"k": 3, "z": 0.2}),
])
def test_classical_models_verify(name, params):
    rep = verify_bundle(build_model(name, params), trials=40)
    assert rep.passed, rep.render()


@pytest.mark.parametrize("name", QUANTUM)
def test_quantum_models_verify(name):
    rep = verify_bundle(build_model(name))
    assert rep.passed, rep.render()


@pytest.mark.parametrize("name, params", [
    ("so22-calogero", {"N": 1}),
    ("so22-calogero", {"M": 3}),
    ("so22-calogero", {"N": 2.5}),
    ("so22-calogero", {"N": 2, "c": [1, 2]}),
    ("so22-calogero", {"variant": "other"}),
    ("schrodinger-sigma", {"sigma": "x"}),
    ("schrodinger-tau", {"tau": float("nan")}),
    ("q-oscillator-classical", {"z": 0.0}),
    ("q-oscillator-quantum", {"k": 5}),
])
def test_invalid_parameters(name, params):
    with pytest.raises(InvalidParameter):
        build_model(name, params)


def test_unknown_model():
    with pytest.raises(UnknownModel):
        build_model("kepler")


def test_parameter_aliases_and_padding():
    b = build_model("schrodinger-sigma", {"σ": 0.25, "N": 3, "lam": [2.0]})
    assert b.params["sigma"] == 0.25
    assert b.parameter_values[alg.mass(1)] == 2.0
    assert b.parameter_values[alg.mass(3)] == 1.0


def test_integral_counts():
    for name, size_key in [("so22-calogero", "N"), ("schrodinger-tau", "N"), ("q-oscillator-classical", "k")]:
        for n in (2, 3):
            b = build_model(name, {size_key: n})
            assert len(b.integrals) >= b.degrees_of_freedom


# -- realized Casimir values against sympy -------------------------------------

def test_two_body_casimirs_by_sympy():
    c1, c2 = so22_casimirs_sympy(so22_images_sympy())
    assert sp.simplify(c1 + A12 + B12) == 0
    assert sp.simplify(c2 + (A12 - B12) / 2) == 0


def test_one_body_casimir_by_sympy():
    y3, yp, ym = p1 * q1, sp.Rational(1, 2) * p1**2 + C3 / q1**2, -sp.Rational(1, 2) * q1**2
    assert sp.simplify(sp.Rational(1, 2) * y3**2 + 2 * yp * ym) == -C3


def test_printed_two_step_casimir_by_sympy():
    # C_1 of D(x) + S(y) expanded from scratch
    g = so22_images_sympy()
    s = {"3": p3 * q3, "p": sp.Rational(1, 2) * p3**2 + C3 / q3**2, "m": -sp.Rational(1, 2) * q3**2}
    tot = {"J3": g["J3"] + s["3"], "Jp": g["Jp"] + s["p"], "Jm": g["Jm"] + s["m"],
           "N3": g["N3"] + s["3"], "Np": g["Np"] + s["p"], "Nm": g["Nm"] + s["m"]}
    c1, _ = so22_casimirs_sympy(tot)
    assert sp.simplify(c1 - to_sympy(reference.printed_c1_2())) == 0
    assert sp.simplify(c1 - to_sympy(reference.derived_c1(2))) == 0


@pytest.mark.parametrize("pt", [
    (Fraction(1, 3), Fraction(2), Fraction(-1, 5), Fraction(7, 2)),
    (Fraction(-3, 2), Fraction(1, 4), Fraction(2), Fraction(-5, 3)),
])
def test_casimir_values_exact_at_rational_points(pt):
    d = alg.so22_realization()
    qa, qb, pa, pb = pt
    a, b = Fraction(3, 7), Fraction(5, 4)
    binding = {alg.a12: a, alg.b12: b, position(1): qa, position(2): qb, momentum(1): pa, momentum(2): pb}
    assert evaluate_exact(d(alg.so22().casimirs["C1"]), binding) == -(a + b)
    assert evaluate_exact(d(alg.so22().casimirs["C2"]), binding) == -(a - b) / 2


# -- closed forms --------------------------------------------------------------

def test_closed_form_crosscheck():
    rep = reference.crosscheck(trials=60)
    assert rep.passed
    flagged = {c.name for c in rep.flags}
    assert flagged == {
        "C_1^(2) general-M closed form", "C_1^(3) general-M closed form", "C_1^(4) general-M closed form",
        "C^(2) sigma-deformed oscillator", "H^(2) tau-deformed oscillator",
    }
    for c in rep.flags:
        assert "matches when read as" in c.detail
        assert c.witness


def test_corrected_readings_match_derivation():
    for form in reference.closed_forms(max_m=3):
        for reading in form.corrections:
            r = reference.check_identities([("", form.derived(), reading.build())], 60, 1e-9,
                                           reference._sampler(1), "")
            assert r.passed, form.name


def test_undeformed_limits_by_sympy():
    for kind in ("sigma", "tau"):
        h = to_sympy(reference.derived_schrodinger(kind, "H")).subs({kind: 0, "lam1": 1, "lam2": 1})
        c = to_sympy(reference.derived_schrodinger(kind, "C")).subs({kind: 0, "lam1": 1, "lam2": 1})
        assert sp.simplify(h - (p1**2 + p2**2 + q1**2 + q2**2) / 2) == 0
        assert sp.simplify(c + (p2 * q1 - p1 * q2) ** 2 / 4) == 0


def test_q_oscillator_realization_casimir_vanishes():
    r = alg.q_oscillator_realization()
    cq = r(alg.q_oscillator().casimirs["Cq"])
    assert sp.simplify(to_sympy(cq)) == 0


def test_catalog_registry_is_consistent():
    for name, info in CATALOG.items():
        assert info.name == name
        assert info.kind in ("classical", "quantum")
