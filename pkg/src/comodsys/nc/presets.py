"""Built-in quantum algebras: q-oscillator, su_q(2), GL_q(2) and the RE algebra.

Letter names: q-oscillator ``Ad < EN < A`` (``Ad`` = A^+, ``EN`` = q^N);
su_q(2) ``Xp < EJ < Xm`` (``EJ`` = q^J); GL_q(2) ``a < b < c < d``;
RE ``alpha < beta < gamma < delta``.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from ..errors import RewriteError
from .algebra import NCAlgebra, NCPoly, RewriteSystem, terms
from .morphism import NCMorphism, q_det
from .qcoeff import QCoeff

HALF = Fraction(1, 2)


def q(e=1) -> QCoeff:
    return QCoeff.q(e)


def s() -> QCoeff:
    return QCoeff.s()


def _q_number_2j():
    # 1 / (q - q^-1)
    return (q(1) - q(-1)).inverse()


@lru_cache(maxsize=None)
def q_oscillator_system(quotient: bool = False) -> RewriteSystem:
    """``[N,A] = -A``, ``[N,A+] = A+``, ``[A,A+] = q^-2N``.

    With ``quotient`` the Casimir is set to zero: ``A+ A = (q^-2N - 1)/(q^-2 - 1)``.
    """
    contractions = {}
    if quotient:
        inv = (q(-2) - 1).inverse()
        contractions[("Ad", "A")] = terms((inv, ("EN", Fraction(-2))), (-inv,))
    return RewriteSystem(
        "A_q/(C_q)" if quotient else "A_q",
        ["Ad", "EN", "A"],
        grouplike=["EN"],
        weights={("EN", "Ad"): 1, ("EN", "A"): -1},
        rules={("A", "Ad"): terms((1, "Ad", "A"), (1, ("EN", Fraction(-2))))},
        contractions=contractions,
    )


@lru_cache(maxsize=None)
def suq2_system() -> RewriteSystem:
    """``[J, X+-] = +-X+-``, ``[X+, X-] = (q^2J - q^-2J)/(q - q^-1)``."""
    k = _q_number_2j()
    return RewriteSystem(
        "su_q(2)",
        ["Xp", "EJ", "Xm"],
        grouplike=["EJ"],
        weights={("EJ", "Xp"): 1, ("EJ", "Xm"): -1},
        rules={("Xm", "Xp"): terms((1, "Xp", "Xm"), (-k, ("EJ", Fraction(2))), (k, ("EJ", Fraction(-2))))},
    )


@lru_cache(maxsize=None)
def glq2_system() -> RewriteSystem:
    """``ab = q ba``, ``ac = q ca``, ``bd = q db``, ``cd = q dc``,
    ``[b,c] = 0``, ``[a,d] = (q - q^-1) bc``."""
    qi = q(-1)
    return RewriteSystem(
        "GL_q(2)",
        ["a", "b", "c", "d"],
        rules={
            ("b", "a"): terms((qi, "a", "b")),
            ("c", "a"): terms((qi, "a", "c")),
            ("d", "a"): terms((1, "a", "d"), (-(q(1) - q(-1)), "b", "c")),
            ("c", "b"): terms((1, "b", "c")),
            ("d", "b"): terms((qi, "b", "d")),
            ("d", "c"): terms((qi, "c", "d")),
        },
    )


@lru_cache(maxsize=None)
def re_system() -> RewriteSystem:
    """Reflection-equation algebra in the ordered letters alpha < beta < gamma < delta."""
    w = q(1) - q(-1)
    return RewriteSystem(
        "RE",
        ["alpha", "beta", "gamma", "delta"],
        rules={
            ("beta", "alpha"): terms((1, "alpha", "beta"), (-w, "alpha", "gamma")),
            ("gamma", "alpha"): terms((q(-2), "alpha", "gamma")),
            ("delta", "alpha"): terms((1, "alpha", "delta"), (-w * q(1), "beta", "gamma"), (-w, "gamma", "gamma")),
            ("gamma", "beta"): terms((1, "beta", "gamma")),
            ("delta", "beta"): terms((1, "beta", "delta"), (-w, "gamma", "delta")),
            ("delta", "gamma"): terms((q(-2), "gamma", "delta")),
        },
    )


PRESETS = {
    "q-oscillator": lambda: q_oscillator_system(False),
    "q-oscillator-quotient": lambda: q_oscillator_system(True),
    "suq2": suq2_system,
    "glq2": glq2_system,
    "re": re_system,
}


def preset(name: str) -> RewriteSystem:
    try:
        return PRESETS[name]()
    except KeyError:
        raise RewriteError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


# ---------------------------------------------------------------------------
# distinguished elements
# ---------------------------------------------------------------------------

def single(system: RewriteSystem, leg: int = 1) -> NCAlgebra:
    return NCAlgebra({leg: system})


def q_oscillator_casimir(alg: NCAlgebra, leg: int = 1) -> NCPoly:
    """``C_q = A+ A - (q^-2N - 1)/(q^-2 - 1)``."""
    inv = (q(-2) - 1).inverse()
    return alg.gen("Ad", leg) * alg.gen("A", leg) - (alg.gen("EN", leg, -2) - 1).scale(inv)


def suq2_casimir(alg: NCAlgebra, leg: int = 1) -> NCPoly:
    """``L_q = X+ X- + (q^(2J-1) + q^(1-2J) - q - q^-1)/(q - q^-1)^2``, i.e.
    ``[J]_q [J-1]_q + X+ X-``."""
    k = _q_number_2j()
    e = lambda x: alg.gen("EJ", leg, x)
    poly = (e(2).scale(q(-1)) + e(-2).scale(q(1)) - (q(1) + q(-1))).scale(k * k)
    return alg.gen("Xp", leg) * alg.gen("Xm", leg) + poly


def glq2_matrix(alg: NCAlgebra, leg: int) -> list[list[NCPoly]]:
    g = lambda n: alg.gen(n, leg)
    return [[g("a"), g("b")], [g("c"), g("d")]]


def re_matrix(alg: NCAlgebra, leg: int) -> list[list[NCPoly]]:
    g = lambda n: alg.gen(n, leg)
    return [[g("alpha"), g("beta")], [g("gamma"), g("delta")]]


def re_casimirs(alg: NCAlgebra, leg: int) -> tuple[NCPoly, NCPoly]:
    """``c1 = beta - q gamma``, ``c2 = alpha delta - q^2 beta gamma``."""
    g = lambda n: alg.gen(n, leg)
    c1 = g("beta") - g("gamma").scale(q(1))
    c2 = g("alpha") * g("delta") - (g("beta") * g("gamma")).scale(q(2))
    return c1, c2


def det_q(alg: NCAlgebra, leg: int) -> NCPoly:
    return q_det(glq2_matrix(alg, leg))


# ---------------------------------------------------------------------------
# coactions
# ---------------------------------------------------------------------------

def q_oscillator_coaction() -> NCMorphism:
    """``N -> N + J``, ``A -> A q^J + s q^-N X-``, ``A+ -> A+ q^J + s q^-N X+``."""
    src = single(q_oscillator_system())
    tgt = NCAlgebra({1: q_oscillator_system(), 2: suq2_system()})
    g = tgt.gen
    images = {
        "EN": g("EN", 1) * g("EJ", 2),
        "A": g("A", 1) * g("EJ", 2) + (g("EN", 1, -1) * g("Xm", 2)).scale(s()),
        "Ad": g("Ad", 1) * g("EJ", 2) + (g("EN", 1, -1) * g("Xp", 2)).scale(s()),
    }
    return NCMorphism(src, tgt, images, "phi[A_q]")


def suq2_coproduct() -> NCMorphism:
    """``EJ -> EJ (x) EJ``, ``X+- -> X+- (x) EJ + EJ^-1 (x) X+-``."""
    src = single(suq2_system())
    tgt = NCAlgebra({1: suq2_system(), 2: suq2_system()})
    g = tgt.gen
    images = {
        "EJ": g("EJ", 1) * g("EJ", 2),
        "Xp": g("Xp", 1) * g("EJ", 2) + g("EJ", 1, -1) * g("Xp", 2),
        "Xm": g("Xm", 1) * g("EJ", 2) + g("EJ", 1, -1) * g("Xm", 2),
    }
    return NCMorphism(src, tgt, images, "Delta[su_q(2)]")


def jordan_schwinger() -> NCMorphism:
    """su_q(2) inside two copies of the ``C_q = 0`` q-oscillator.

    ``q^J -> q^(N1/2) q^(-N2/2)``, ``X+ -> B+ q^(N1/2) q^(N2/2) C``,
    ``X- -> q^(N1/2) B C+ q^(N2/2)``; copy 1 (``B``) on leg 1, copy 2 (``C``)
    on leg 2.
    """
    src = single(suq2_system())
    osc = q_oscillator_system(True)
    tgt = NCAlgebra({1: osc, 2: osc})
    g = tgt.gen
    images = {
        "EJ": g("EN", 1, HALF) * g("EN", 2, -HALF),
        "Xp": g("Ad", 1) * g("EN", 1, HALF) * g("EN", 2, HALF) * g("A", 2),
        "Xm": g("EN", 1, HALF) * g("A", 1) * g("Ad", 2) * g("EN", 2, HALF),
    }
    return NCMorphism(src, tgt, images, "Jordan-Schwinger")


def re_coaction_target(k: int) -> NCAlgebra:
    """RE on leg 0 and GL_q(2) copies on legs 1..k-1."""
    legs = {0: re_system()}
    for l in range(1, k):
        legs[l] = glq2_system()
    return NCAlgebra(legs)


def re_coaction(k: int = 2) -> NCMorphism:
    """``K -> T_{k-1} ... T_1 K T_1^t ... T_{k-1}^t``."""
    from .morphism import matrix_coaction

    if k < 2:
        raise ValueError("k >= 2 required")
    src = NCAlgebra({0: re_system()})
    tgt = re_coaction_target(k)
    m = re_matrix(tgt, 0)
    for l in range(1, k):
        m = matrix_coaction(glq2_matrix(tgt, l), m)
    images = {"alpha": m[0][0], "beta": m[0][1], "gamma": m[1][0], "delta": m[1][1]}
    return NCMorphism(src, tgt, images, f"phi^({k})[RE]")
