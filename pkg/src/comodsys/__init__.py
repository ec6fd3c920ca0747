"""Integrable systems from comodule algebras.

Classical side: symbolic expressions, Poisson algebras, coproducts and
coactions, Casimir cascades, symplectic realizations and trajectory
integration.  Quantum side (:mod:`comodsys.nc`): exact normal forms of
noncommutative polynomials over ``Q(q^(1/2))``.
"""

from .coaction import (
    AlgebraMorphism,
    Coaction,
    Coproduct,
    cascade,
    chain_casimirs,
    coaction,
    coproduct,
    primitive_coproduct,
    verify_coassociativity,
    verify_comodule_axiom,
    verify_homomorphism,
    verify_involution,
)
from .dynamics import IntegratorConfig, conservation_scan, integrate, time_reversal_error, vector_field
from .errors import ComodsysError
from .expr import Expr, Symbol, evaluate, exp, generator, momentum, parameter, position, sqrt, to_string
from .models.catalog import ClassicalBundle, QuantumBundle, build_model, list_models, verify_bundle
from .models.simulate import run_dynamics
from .poisson import PoissonAlgebraSpec, bracket, jacobi_check, poisson_algebra, tensor
from .report import Check, Report
from .sampling import DomainSampler
from .symplectic import LegAssignment, PhaseSpace, SymplecticRealization, canonical_bracket, realize

__version__ = "0.1.0"

__all__ = [
    "AlgebraMorphism", "Check", "ClassicalBundle", "Coaction", "ComodsysError", "Coproduct", "DomainSampler",
    "Expr", "IntegratorConfig", "LegAssignment", "PhaseSpace", "PoissonAlgebraSpec", "QuantumBundle", "Report",
    "Symbol", "SymplecticRealization", "bracket", "build_model", "canonical_bracket", "cascade", "chain_casimirs",
    "coaction", "conservation_scan", "coproduct", "evaluate", "exp", "generator", "integrate", "jacobi_check",
    "list_models", "momentum", "parameter", "poisson_algebra", "position", "primitive_coproduct", "realize",
    "run_dynamics", "sqrt", "tensor", "time_reversal_error", "to_string", "vector_field", "verify_bundle",
    "verify_coassociativity", "verify_comodule_axiom", "verify_homomorphism", "verify_involution",
]
