"""Built-in classical Poisson algebras, coproducts, coactions and realizations."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from ..coaction import Coaction, Coproduct, coaction, coproduct, induce_coaction_from_subalgebra, primitive_coproduct
from ..expr import Expr, Kind, Symbol, exp, generator, momentum, parameter, position, power, sqrt, substitute
from ..poisson import PoissonAlgebraSpec, poisson_algebra
from ..symplectic import SymplecticRealization

HALF = Fraction(1, 2)

# parameters
a12, b12 = parameter("a12"), parameter("b12")
sigma, tau, z = parameter("sigma"), parameter("tau"), parameter("z")


def coupling(k: int) -> Symbol:
    """Inverse-square coupling ``c_k`` of the particle on site ``k``."""
    return parameter(f"c{k}")


def mass(k: int) -> Symbol:
    """Central-charge scale ``lambda_k`` of a Schrodinger leg."""
    return parameter(f"lam{k}")


# ---------------------------------------------------------------------------
# so(2,2) and so(2,1)
# ---------------------------------------------------------------------------

J3, Jp, Jm = generator("J3"), generator("Jp"), generator("Jm")
N3, Np, Nm = generator("N3"), generator("Np"), generator("Nm")
Y3, Yp, Ym = generator("Y3"), generator("Yp"), generator("Ym")


@lru_cache(maxsize=None)
def so22() -> PoissonAlgebraSpec:
    c1 = HALF * J3**2 + HALF * N3**2 + 2 * Jp * Jm + 2 * Np * Nm
    c2 = HALF * J3 * N3 + Jp * Nm + Jm * Np
    return poisson_algebra(
        "so(2,2)",
        [J3, Jp, Jm, N3, Np, Nm],
        {
            (J3, Jp): 2 * Jp, (J3, Jm): -2 * Jm,
            (N3, Np): 2 * Jp, (N3, Nm): -2 * Jm,
            (J3, Np): 2 * Np, (J3, Nm): -2 * Nm,
            (N3, Jp): 2 * Np, (N3, Jm): -2 * Nm,
            (Jp, Jm): J3, (Np, Nm): J3,
            (Jp, Nm): N3, (Jm, Np): -N3,
        },
        casimirs={"C1": c1, "C2": c2},
    )


@lru_cache(maxsize=None)
def so21() -> PoissonAlgebraSpec:
    return poisson_algebra(
        "so(2,1)",
        [Y3, Yp, Ym],
        {(Y3, Yp): 2 * Yp, (Y3, Ym): -2 * Ym, (Yp, Ym): Y3},
        casimirs={"C": HALF * Y3**2 + 2 * Yp * Ym},
    )


@lru_cache(maxsize=None)
def so21_coproduct() -> Coproduct:
    return primitive_coproduct(so21())


@lru_cache(maxsize=None)
def so22_coaction() -> Coaction:
    """``X -> X (x) 1 + 1 (x) Y`` pairing J_a and N_a with Y_a."""
    partner = {J3: Y3, N3: Y3, Jp: Yp, Np: Yp, Jm: Ym, Nm: Ym}
    images = {g: g.on_site(1) + y.on_site(2) for g, y in partner.items()}
    return coaction(so22(), so21_coproduct(), images, name="phi[so(2,2)]")


@lru_cache(maxsize=None)
def so21_self_coaction() -> Coaction:
    d = so21_coproduct()
    return Coaction(d.map, d)


def so22_realization() -> SymplecticRealization:
    """Two-body rational Calogero-type realization on two canonical pairs."""
    q1, q2, p1, p2 = position(1), position(2), momentum(1), momentum(2)
    plus, minus = a12 / (q1 + q2) ** 2, b12 / (q1 - q2) ** 2
    images = {
        J3: p1 * q1 + p2 * q2,
        Jp: HALF * (p1**2 + p2**2) + plus + minus,
        Jm: -HALF * (q1**2 + q2**2),
        N3: p1 * q2 + p2 * q1,
        Np: p1 * p2 + plus - minus,
        Nm: -q1 * q2,
    }
    return SymplecticRealization(so22(), images, 2, "D")


def so21_realization(c: Expr) -> SymplecticRealization:
    q, p = position(1), momentum(1)
    images = {Y3: p * q, Yp: HALF * p**2 + c / q**2, Ym: -HALF * q**2}
    return SymplecticRealization(so21(), images, 1, "S")


# ---------------------------------------------------------------------------
# Schrodinger algebra and its two deformed coproducts
# ---------------------------------------------------------------------------

M, H, D, C = generator("M"), generator("H"), generator("D"), generator("C")
P, K = generator("P"), generator("K")
GL2 = (M, H, D, C)


@lru_cache(maxsize=None)
def schrodinger() -> PoissonAlgebraSpec:
    return poisson_algebra(
        "schrodinger",
        [M, H, D, C, P, K],
        {
            (D, P): -P, (D, K): K, (K, P): M,
            (D, H): -2 * H, (D, C): 2 * C, (H, C): D,
            (P, C): -K, (K, H): P,
        },
        parameters=(sigma, tau),
    )


def gl2_casimir() -> Expr:
    return Fraction(1, 4) * D**2 - H * C


def _legs(e: Expr, leg: int) -> Expr:
    return substitute(e, {s: s.on_site(leg) for s in e.free(Kind.GENERATOR) if s.site is None})


@lru_cache(maxsize=None)
def schrodinger_sigma() -> Coproduct:
    """Space-type deformation: ``P`` is shifted group-like."""
    l = lambda e: _legs(e, 1)
    r = lambda e: _legs(e, 2)
    d1 = l(D + HALF * M)
    inv = power(1 + sigma * r(P), -1)
    images = {
        M: l(M) + r(M),
        H: r(H) + l(H) * (1 + sigma * r(P)) ** 2,
        D: r(D) + l(D) * inv - HALF * l(M) * sigma * r(P) * inv,
        C: r(C) + l(C) * inv**2 + sigma * d1 * inv * r(K) + sigma**2 / 2 * d1**2 * r(M) * inv**2,
        P: r(P) + l(P) + sigma * l(P) * r(P),
        K: r(K) + l(K) * inv + sigma * d1 * r(M) * inv,
    }
    return coproduct(schrodinger(), images)


@lru_cache(maxsize=None)
def schrodinger_tau() -> Coproduct:
    """Time-type deformation: ``H`` is shifted group-like."""
    l = lambda e: _legs(e, 1)
    r = lambda e: _legs(e, 2)
    d1 = l(D + HALF * M)
    inv = power(1 + tau * r(H), -1)
    images = {
        M: l(M) + r(M),
        H: r(H) + l(H) + tau * l(H) * r(H),
        D: r(D) + l(D) * inv - HALF * l(M) * tau * r(H) * inv,
        C: r(C) + l(C) * inv - tau / 2 * d1 * inv * r(D) + tau**2 / 4 * d1**2 * r(H) * inv**2,
        P: r(P) + l(P) * sqrt(1 + tau * r(H)),
        K: r(K) + l(K) * power(1 + tau * r(H), -HALF) + tau / 2 * d1 * r(P) * inv,
    }
    return coproduct(schrodinger(), images)


@lru_cache(maxsize=None)
def gl2_sigma_coaction() -> Coaction:
    return induce_coaction_from_subalgebra(schrodinger_sigma(), GL2, "gl(2)", {"CA": gl2_casimir()})


@lru_cache(maxsize=None)
def gl2_tau_coaction() -> Coaction:
    return induce_coaction_from_subalgebra(schrodinger_tau(), GL2, "gl(2)", {"CA": gl2_casimir()})


def schrodinger_realization(lam: Expr) -> SymplecticRealization:
    q, p = position(1), momentum(1)
    images = {C: HALF * q**2, H: HALF * p**2, D: -p * q, M: lam**2, K: lam * q, P: lam * p}
    return SymplecticRealization(schrodinger(), images, 1, "S")


def gl2_realization() -> SymplecticRealization:
    q, p = position(1), momentum(1)
    images = {C: HALF * q**2, H: HALF * p**2, D: -p * q, M: mass(1) ** 2}
    return SymplecticRealization(gl2_sigma_coaction().source, images, 1, "S")


# ---------------------------------------------------------------------------
# classical q-oscillator and Poisson su_q(2)
# ---------------------------------------------------------------------------

QN, QA, QAd = generator("N"), generator("A"), generator("Ad")
QJ, Xp, Xm = generator("J"), generator("Xp"), generator("Xm")


@lru_cache(maxsize=None)
def q_oscillator() -> PoissonAlgebraSpec:
    cq = QAd * QA - (1 - exp(-2 * z * QN)) / (2 * z)
    return poisson_algebra(
        "A_q",
        [QN, QA, QAd],
        {(QN, QA): -QA, (QN, QAd): QAd, (QA, QAd): exp(-2 * z * QN)},
        casimirs={"Cq": cq},
        parameters=(z,),
    )


@lru_cache(maxsize=None)
def suq2() -> PoissonAlgebraSpec:
    return poisson_algebra(
        "su_q(2)",
        [QJ, Xp, Xm],
        {(QJ, Xp): Xp, (QJ, Xm): -Xm, (Xp, Xm): (exp(2 * z * QJ) - exp(-2 * z * QJ)) / (2 * z)},
        casimirs={"Lq": _suq2_casimir()},
        parameters=(z,),
    )


def _suq2_casimir() -> Expr:
    # d/dJ of sinh(zJ)^2 / z^2 is sinh(2zJ)/z, which balances {X+, X-}
    s = (exp(z * QJ) - exp(-z * QJ)) / 2
    return Xp * Xm + s**2 / z**2


@lru_cache(maxsize=None)
def suq2_coproduct() -> Coproduct:
    l, r = (lambda g: g.on_site(1)), (lambda g: g.on_site(2))
    images = {
        QJ: l(QJ) + r(QJ),
        Xp: l(Xp) * exp(z * r(QJ)) + exp(-z * l(QJ)) * r(Xp),
        Xm: l(Xm) * exp(z * r(QJ)) + exp(-z * l(QJ)) * r(Xm),
    }
    return coproduct(suq2(), images)


@lru_cache(maxsize=None)
def q_oscillator_coaction() -> Coaction:
    l, r = (lambda g: g.on_site(1)), (lambda g: g.on_site(2))
    root = sqrt(2 * z)
    images = {
        QN: l(QN) + r(QJ),
        QA: l(QA) * exp(z * r(QJ)) + root * exp(-z * l(QN)) * r(Xm),
        QAd: l(QAd) * exp(z * r(QJ)) + root * exp(-z * l(QN)) * r(Xp),
    }
    return coaction(q_oscillator(), suq2_coproduct(), images, name="phi[A_q]")


def q_oscillator_realization() -> SymplecticRealization:
    """Realization on one pair with ``C_q = 0``."""
    q, p = position(1), momentum(1)
    images = {
        QN: p * q,
        QAd: p,
        QA: HALF * (1 - exp(-2 * z * p * q)) / (z * p * q) * q,
    }
    return SymplecticRealization(q_oscillator(), images, 1, "R")


def suq2_realization() -> SymplecticRealization:
    """One-pair realization of Poisson su_q(2): ``J = p``, ``X+ = e^-q``."""
    q, p = position(1), momentum(1)
    s = (exp(z * p) - exp(-z * p)) / (2 * z)
    images = {QJ: p, Xp: exp(-q), Xm: -exp(q) * s**2}
    return SymplecticRealization(suq2(), images, 1, "U")
