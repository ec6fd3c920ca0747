"""Hamilton's equations for realized Hamiltonians and conservation checks.

Trajectories are integrated with scipy's adaptive Runge-Kutta 5(4); an
event function watches every denominator and fractional-power base of the
vector field so that runs stop cleanly before a singular locus.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Mapping, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .errors import SingularityApproach, StepSizeUnderflow, UnboundParameter
from .expr import Add, Expr, Kind, Symbol, compile_exprs, differentiate, mul, singular_bases, to_string
from .symplectic import PhaseSpace, canonical_bracket

METHODS = ("RK45", "DOP853", "midpoint")


@dataclass(frozen=True)
class IntegratorConfig:
    """``method`` is ``RK45`` (default), ``DOP853`` or the fixed-step
    symplectic ``midpoint`` rule (step ``step``)."""

    method: str = "RK45"
    rtol: float = 1e-10
    atol: float = 1e-12
    max_step: float = math.inf
    guard_radius: float = 1e-3
    samples: int = 401
    step: float = 1e-3

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; choose from {METHODS}")
        if self.rtol <= 0 or self.atol <= 0:
            raise ValueError("tolerances must be positive")
        if self.guard_radius <= 0:
            raise ValueError("guard radius must be positive")
        if self.max_step <= 0 or self.step <= 0:
            raise ValueError("step sizes must be positive")
        if self.samples < 2:
            raise ValueError("at least two output samples are needed")


def _free_parameters(exprs: Sequence[Expr]) -> set[Symbol]:
    out = set()
    for e in exprs:
        out |= {s for s in e.symbols if s.kind is Kind.PARAMETER}
    return out


def vector_field(h: Expr, ps: PhaseSpace | None = None, params: Mapping[Symbol, float] | None = None) -> list[Expr]:
    """``(dq_i/dt, dp_i/dt) = (dH/dp_i, -dH/dq_i)`` in the state order of ``ps``.

    With ``params`` given, every parameter of ``h`` must be bound.
    """
    ps = ps or PhaseSpace.covering(h)
    for s in h.symbols:
        if s.kind is Kind.GENERATOR or (s.is_canonical and not ps.knows(s)):
            raise ValueError(f"{s.ident} is not a coordinate of {ps.name}")
    if params is not None:
        unbound = _free_parameters([h]) - set(params)
        if unbound:
            raise UnboundParameter(f"unbound parameter {sorted(s.ident for s in unbound)[0]}")
    qdot = [differentiate(h, p) for p in ps.momenta]
    pdot = [mul(-1, differentiate(h, q)) for q in ps.positions]
    return qdot + pdot


@dataclass
class Trajectory:
    t: np.ndarray
    states: np.ndarray
    phase_space: PhaseSpace
    integrals: dict[str, np.ndarray] = field(default_factory=dict)
    method: str = "RK45"
    nfev: int = 0

    @property
    def dimension(self) -> int:
        return self.states.shape[1]

    def point(self, i: int) -> dict[Symbol, float]:
        return dict(zip(self.phase_space.coordinates, self.states[i]))

    def columns(self) -> list[str]:
        return ["t"] + [s.ident for s in self.phase_space.coordinates] + list(self.integrals)


class _Compiled:
    """Vector field, guards and bound parameters compiled once."""

    def __init__(self, h: Expr, ps: PhaseSpace, params: Mapping[Symbol, float]):
        self.ps = ps
        self.field = vector_field(h, ps, params)
        self.params = {s: float(v) for s, v in params.items() if s in _free_parameters([h])}
        coords = list(ps.coordinates)
        order = coords + list(self.params)
        self.pvals = list(self.params.values())
        self.f = compile_exprs(self.field, order)
        self.guards = [b for b, _ in singular_bases([h] + self.field)]
        self.g = compile_exprs(self.guards, order) if self.guards else None

    def rhs(self, t, y):
        return np.array(self.f(*y, *self.pvals), dtype=float)

    def guard_values(self, y) -> list[float]:
        if self.g is None:
            return []
        return [abs(v) for v in self.g(*y, *self.pvals)]

    def nearest_guard(self, y) -> str:
        vals = self.guard_values(y)
        i = int(np.argmin(vals))
        return to_string(self.guards[i])


def integrate(
    h: Expr,
    x0: Sequence[float],
    t_end: float,
    cfg: IntegratorConfig | None = None,
    ps: PhaseSpace | None = None,
    params: Mapping[Symbol, float] | None = None,
    integrals: Mapping[str, Expr] | None = None,
    t_start: float = 0.0,
) -> Trajectory:
    """Integrate Hamilton's equations from ``x0`` (ordered ``q..., p...``)."""
    cfg = cfg or IntegratorConfig()
    ps = ps or PhaseSpace.covering(h, *(integrals or {}).values())
    comp = _Compiled(h, ps, params or {})
    y0 = np.asarray(x0, dtype=float)
    if y0.shape != (2 * ps.degrees,):
        raise ValueError(f"initial state needs {2 * ps.degrees} entries, got {y0.size}")
    if comp.g is not None and min(comp.guard_values(y0)) <= cfg.guard_radius:
        raise SingularityApproach(t_start, y0, comp.nearest_guard(y0))
    t_eval = np.linspace(t_start, t_end, cfg.samples)

    if cfg.method == "midpoint":
        t, states, nfev = _implicit_midpoint(comp, y0, t_start, t_end, cfg)
    else:
        t, states, nfev = _adaptive(comp, y0, t_eval, cfg)
    traj = Trajectory(t, states, ps, method=cfg.method, nfev=nfev)
    if integrals:
        traj.integrals = evaluate_along(traj, integrals, params or {})
    return traj


def _adaptive(comp: _Compiled, y0, t_eval, cfg: IntegratorConfig):
    events = []
    if comp.g is not None:
        def guard(t, y):
            return min(comp.guard_values(y)) - cfg.guard_radius

        guard.terminal = True
        events.append(guard)

    def rhs(t, y):
        return comp.rhs(t, y)

    with np.errstate(all="ignore"):
        sol = solve_ivp(
            rhs, (t_eval[0], t_eval[-1]), y0, method=cfg.method, t_eval=t_eval,
            rtol=cfg.rtol, atol=cfg.atol, max_step=cfg.max_step, events=events or None,
        )
    if sol.status == 1:
        te = float(sol.t_events[0][0])
        ye = sol.y_events[0][0]
        raise SingularityApproach(te, ye, comp.nearest_guard(ye))
    if sol.status != 0:
        if "step size" in sol.message.lower():
            raise StepSizeUnderflow(sol.message)
        raise StepSizeUnderflow(f"integration failed: {sol.message}")
    states = sol.y.T
    if not np.all(np.isfinite(states)):
        raise StepSizeUnderflow("state became non-finite")
    return sol.t, states, int(sol.nfev)


def _implicit_midpoint(comp: _Compiled, y0, t0: float, t1: float, cfg: IntegratorConfig):
    from scipy.optimize import fsolve

    n = max(1, int(math.ceil(abs(t1 - t0) / cfg.step)))
    h = (t1 - t0) / n
    ts = np.linspace(t0, t1, n + 1)
    keep = np.unique(np.linspace(0, n, min(cfg.samples, n + 1)).round().astype(int))
    y = y0.copy()
    out = [y.copy()]
    nfev = 0
    for i in range(1, n + 1):
        guess = y + h * comp.rhs(0, y)
        nfev += 1
        for _ in range(50):
            nxt = y + h * comp.rhs(0, 0.5 * (y + guess))
            nfev += 1
            if np.max(np.abs(nxt - guess)) <= 1e-14 * (1 + np.max(np.abs(nxt))):
                guess = nxt
                break
            guess = nxt
        else:
            guess = fsolve(lambda z: z - y - h * comp.rhs(0, 0.5 * (y + z)), guess, xtol=1e-14)
        y = guess
        if not np.all(np.isfinite(y)):
            raise StepSizeUnderflow("state became non-finite")
        if comp.g is not None and min(comp.guard_values(y)) <= cfg.guard_radius:
            raise SingularityApproach(float(ts[i]), y, comp.nearest_guard(y))
        out.append(y.copy())
    states = np.array(out)[keep]
    return ts[keep], states, nfev


def evaluate_along(traj: Trajectory, exprs: Mapping[str, Expr], params: Mapping[Symbol, float]) -> dict[str, np.ndarray]:
    coords = list(traj.phase_space.coordinates)
    names = list(exprs)
    fn = compile_exprs([exprs[n] for n in names], coords + list(params), backend="numpy")
    args = [traj.states[:, i] for i in range(len(coords))] + [np.full(len(traj.t), float(v)) for v in params.values()]
    with np.errstate(all="ignore"):
        vals = fn(*args)
    return {n: np.broadcast_to(np.asarray(v, dtype=float), traj.t.shape).copy() for n, v in zip(names, vals)}


# ---------------------------------------------------------------------------
# conservation
# ---------------------------------------------------------------------------

@dataclass
class ConservationReport:
    drift: dict[str, float]
    bracket_residuals: dict[str, float]
    rank: int
    count: int
    degrees: int

    @property
    def max_drift(self) -> float:
        return max(self.drift.values(), default=0.0)

    @property
    def max_residual(self) -> float:
        return max(self.bracket_residuals.values(), default=0.0)

    def to_dict(self) -> dict:
        return {
            "drift": {k: float(f"{v:.6e}") for k, v in self.drift.items()},
            "bracket_residuals": {k: float(f"{v:.6e}") for k, v in self.bracket_residuals.items()},
            "max_drift": float(f"{self.max_drift:.6e}"),
            "max_bracket_residual": float(f"{self.max_residual:.6e}"),
            "independence_rank": self.rank,
            "integral_count": self.count,
            "degrees_of_freedom": self.degrees,
        }


def relative_drift(values: np.ndarray) -> float:
    """``max |I(t) - I(0)| / max(1, |I(0)|)``."""
    v0 = values[0]
    return float(np.max(np.abs(values - v0)) / max(1.0, abs(v0)))


def _term_scaled(exprs: Sequence[Expr], coords, states: np.ndarray, params: Mapping[Symbol, float]) -> list[float]:
    out = []
    for e in exprs:
        terms = list(e.terms) if isinstance(e, Add) else [e]
        fn = compile_exprs(terms, list(coords) + list(params), backend="numpy")
        args = [states[:, i] for i in range(len(coords))] + [np.full(len(states), float(v)) for v in params.values()]
        with np.errstate(all="ignore"):
            vals = np.array([np.broadcast_to(v, (len(states),)) for v in fn(*args)], dtype=float)
        res = np.abs(vals.sum(axis=0)) / (1.0 + np.abs(vals).sum(axis=0))
        out.append(float(np.max(res)))
    return out


def independence_rank(
    exprs: Sequence[Expr], ps: PhaseSpace, points: np.ndarray, params: Mapping[Symbol, float] | None = None, rtol: float = 1e-8
) -> int:
    """Largest numerical rank of the Jacobian of ``exprs`` over ``points``."""
    params = params or {}
    coords = list(ps.coordinates)
    grads = [differentiate(e, x) for e in exprs for x in coords]
    fn = compile_exprs(grads, coords + list(params), backend="numpy")
    args = [points[:, i] for i in range(len(coords))] + [np.full(len(points), float(v)) for v in params.values()]
    with np.errstate(all="ignore"):
        vals = np.array([np.broadcast_to(v, (len(points),)) for v in fn(*args)], dtype=float)
    best = 0
    for k in range(len(points)):
        jac = vals[:, k].reshape(len(exprs), len(coords))
        if not np.all(np.isfinite(jac)):
            continue
        sv = np.linalg.svd(jac, compute_uv=False)
        if sv.size and sv[0] > 0:
            best = max(best, int(np.sum(sv > rtol * sv[0])))
    return best


def conservation_scan(
    traj: Trajectory,
    integrals: Mapping[str, Expr],
    params: Mapping[Symbol, float] | None = None,
    bracket_points: int = 25,
) -> ConservationReport:
    """Drift of each integral along ``traj`` and pairwise bracket residuals
    at a subset of trajectory points."""
    params = params or {}
    vals = traj.integrals if set(integrals) <= set(traj.integrals) else evaluate_along(traj, integrals, params)
    drift = {n: relative_drift(vals[n]) for n in integrals}
    idx = np.unique(np.linspace(0, len(traj.t) - 1, min(bracket_points, len(traj.t))).round().astype(int))
    pts = traj.states[idx]
    pairs = list(combinations(integrals, 2))
    brackets = [canonical_bracket(integrals[a], integrals[b], traj.phase_space) for a, b in pairs]
    res = _term_scaled(brackets, traj.phase_space.coordinates, pts, params)
    residuals = {f"{{{a},{b}}}": r for (a, b), r in zip(pairs, res)}
    rank = independence_rank(list(integrals.values()), traj.phase_space, pts[: min(5, len(pts))], params)
    return ConservationReport(drift, residuals, rank, len(integrals), traj.phase_space.degrees)


def time_reversal_error(
    h: Expr,
    x0: Sequence[float],
    t_end: float,
    cfg: IntegratorConfig | None = None,
    ps: PhaseSpace | None = None,
    params: Mapping[Symbol, float] | None = None,
) -> float:
    """Integrate to ``t_end`` and back; max-norm distance to ``x0``."""
    fwd = integrate(h, x0, t_end, cfg, ps, params)
    back = integrate(h, fwd.states[-1], 0.0, cfg, fwd.phase_space, params, t_start=t_end)
    return float(np.max(np.abs(back.states[-1] - np.asarray(x0, dtype=float))))


# ---------------------------------------------------------------------------
# export
# ---------------------------------------------------------------------------

def write_csv(traj: Trajectory, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(traj.columns())
        for i, t in enumerate(traj.t):
            row = [repr(float(t))] + [repr(float(x)) for x in traj.states[i]]
            row += [repr(float(traj.integrals[n][i])) for n in traj.integrals]
            w.writerow(row)


def summary(traj: Trajectory, report: ConservationReport, **extra) -> dict:
    out = {
        "t_start": float(traj.t[0]),
        "t_end": float(traj.t[-1]),
        "samples": int(len(traj.t)),
        "method": traj.method,
        "function_evaluations": traj.nfev,
        "initial_state": [float(x) for x in traj.states[0]],
        "final_state": [float(x) for x in traj.states[-1]],
    }
    out.update(report.to_dict())
    out.update(extra)
    return out


def write_summary(data: dict, path) -> None:
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")
