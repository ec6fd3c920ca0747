"""Randomized evaluation: domain sampling and probabilistic identity checks.

Equality of two expressions is decided by evaluating both at random points
of a box that avoids the singular loci of every denominator and
fractional-power base occurring in them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import SamplerExhausted
from .expr import Add, Expr, Symbol, compile_exprs, singular_bases

Interval = tuple[float, float]
DEFAULT_BOX: tuple[Interval, ...] = ((-2.0, -0.2), (0.2, 2.0))


@dataclass
class DomainSampler:
    """Uniform sampler over a union of intervals per variable.

    ``boxes`` overrides the default box per symbol; keys may be a
    :class:`Symbol`, its ``ident`` or its bare ``name``.  ``fixed`` binds
    symbols (typically model parameters) to constants.
    """

    seed: int | None = 0
    box: tuple[Interval, ...] = DEFAULT_BOX
    boxes: Mapping = field(default_factory=dict)
    fixed: Mapping[Symbol, float] = field(default_factory=dict)
    min_magnitude: float = 1e-3
    max_rounds: int = 200

    def __post_init__(self):
        self.rng = np.random.default_rng(self.seed)

    def spawn(self, **changes) -> "DomainSampler":
        """A sampler with the same configuration and a fresh seeded stream."""
        cfg = dict(
            seed=self.seed,
            box=self.box,
            boxes=dict(self.boxes),
            fixed=dict(self.fixed),
            min_magnitude=self.min_magnitude,
            max_rounds=self.max_rounds,
        )
        cfg.update(changes)
        return DomainSampler(**cfg)

    def intervals(self, s: Symbol) -> tuple[Interval, ...]:
        for key in (s, s.ident, s.name):
            if key in self.boxes:
                return tuple(self.boxes[key])
        return self.box

    def _draw(self, symbols: Sequence[Symbol], n: int) -> dict[Symbol, np.ndarray]:
        out = {}
        for s in symbols:
            ivs = self.intervals(s)
            lengths = np.array([hi - lo for lo, hi in ivs], dtype=float)
            which = self.rng.choice(len(ivs), size=n, p=lengths / lengths.sum())
            u = self.rng.random(n)
            lo = np.array([iv[0] for iv in ivs])[which]
            out[s] = lo + u * lengths[which]
        return out

    def sample(self, exprs: Iterable[Expr], n: int) -> dict[Symbol, np.ndarray]:
        """``n`` points binding every free symbol of ``exprs``.

        Points where a guarded base is small (or negative under a fractional
        power), or where any expression is not finite, are rejected.
        """
        exprs = list(exprs)
        free = set().union(*(e.symbols for e in exprs)) if exprs else set()
        variables = sorted((s for s in free if s not in self.fixed), key=_sym_key)
        fixed = {s: v for s, v in self.fixed.items() if s in free}
        guards = singular_bases(exprs)
        order = variables + list(fixed)
        guard_fn = compile_exprs([g for g, _ in guards], order, backend="numpy") if guards else None
        value_fn = compile_exprs(exprs, order, backend="numpy") if exprs else None
        frac_mask = np.array([f for _, f in guards], dtype=bool)

        kept: dict[Symbol, list[np.ndarray]] = {s: [] for s in variables}
        have = 0
        batch = max(2 * n, 64)
        for _ in range(self.max_rounds):
            cand = self._draw(variables, batch)
            args = [cand[s] for s in variables] + [np.full(batch, float(v)) for v in fixed.values()]
            ok = np.ones(batch, dtype=bool)
            with np.errstate(all="ignore"):
                if guard_fn is not None:
                    g = np.array([np.broadcast_to(v, (batch,)) for v in guard_fn(*args)])
                    ok &= np.all(np.isfinite(g), axis=0)
                    ok &= np.all(np.abs(g) >= self.min_magnitude, axis=0)
                    if frac_mask.any():
                        ok &= np.all(g[frac_mask] > 0, axis=0)
                if value_fn is not None:
                    vals = [np.broadcast_to(v, (batch,)) for v in value_fn(*args)]
                    for v in vals:
                        ok &= np.isfinite(v)
            idx = np.nonzero(ok)[0][: n - have]
            for s in variables:
                kept[s].append(cand[s][idx])
            have += len(idx)
            if have >= n:
                break
        else:
            raise SamplerExhausted(
                f"only {have}/{n} admissible points after {self.max_rounds} rounds"
            )
        out = {s: np.concatenate(kept[s]) for s in variables}
        for s, v in fixed.items():
            out[s] = np.full(n, float(v))
        return out

    def sample_rational(self, exprs: Iterable[Expr], n: int, denominator: int = 16) -> list[dict[Symbol, Fraction]]:
        """Random rational points (grid of the given denominator)."""
        pts = self.sample(exprs, n)
        out = []
        for i in range(n):
            point = {}
            for s, arr in pts.items():
                if s in self.fixed:
                    point[s] = Fraction(self.fixed[s]).limit_denominator(10**6)
                else:
                    point[s] = Fraction(round(float(arr[i]) * denominator), denominator)
            out.append(point)
        return out


def _sym_key(s: Symbol):
    return (s.kind.value, s.name, -1 if s.site is None else s.site)


@dataclass
class EqualityResult:
    equal: bool
    deviation: float
    witness: dict[str, float] | None = None

    def __bool__(self):
        return self.equal


def _witness(points: Mapping[Symbol, np.ndarray], i: int) -> dict[str, float]:
    return {s.ident: float(v[i]) for s, v in points.items()}


def evaluate_points(exprs: Sequence[Expr], points: Mapping[Symbol, np.ndarray]) -> list[np.ndarray]:
    syms = list(points)
    n = len(next(iter(points.values()))) if points else 1
    fn = compile_exprs(exprs, syms, backend="numpy")
    with np.errstate(all="ignore"):
        vals = fn(*(points[s] for s in syms))
    return [np.broadcast_to(np.asarray(v, dtype=float), (n,)) for v in vals]


def equal_probabilistic(
    e1: Expr,
    e2: Expr,
    trials: int = 100,
    tol: float = 1e-9,
    sampler: DomainSampler | None = None,
) -> EqualityResult:
    """``|e1 - e2| <= tol * (1 + |e1| + |e2|)`` at ``trials`` random points."""
    if trials < 1 or tol <= 0:
        raise ValueError("trials >= 1 and tol > 0 required")
    return equal_many([(e1, e2)], trials, tol, sampler)[0]


def equal_many(
    pairs: Sequence[tuple[Expr, Expr]],
    trials: int = 100,
    tol: float = 1e-9,
    sampler: DomainSampler | None = None,
) -> list[EqualityResult]:
    """Check many identities on one shared set of sample points."""
    if not pairs:
        return []
    sampler = sampler if sampler is not None else DomainSampler()
    flat = [e for pair in pairs for e in pair]
    points = sampler.sample(flat, trials)
    vals = evaluate_points(flat, points)
    out = []
    for k in range(len(pairs)):
        a, b = vals[2 * k], vals[2 * k + 1]
        scale = 1.0 + np.abs(a) + np.abs(b)
        dev = np.abs(a - b) / scale
        bad = ~(dev <= tol)
        if bad.any():
            i = int(np.nonzero(bad)[0][0])
            out.append(EqualityResult(False, float(np.nanmax(np.where(np.isfinite(dev), dev, np.inf))), _witness(points, i)))
        else:
            out.append(EqualityResult(True, float(dev.max())))
    return out


def _terms(e: Expr) -> tuple[Expr, ...]:
    return e.terms if isinstance(e, Add) else (e,)


def zero_many(
    exprs: Sequence[Expr],
    trials: int = 100,
    tol: float = 1e-9,
    sampler: DomainSampler | None = None,
) -> list[EqualityResult]:
    """Check that expressions vanish identically.

    The residual at a point is ``|sum t_i| / (1 + sum |t_i|)`` over the
    top-level summands ``t_i``: cancellation is measured against the size
    of the terms that cancel.
    """
    if not exprs:
        return []
    sampler = sampler if sampler is not None else DomainSampler()
    term_lists = [_terms(e) for e in exprs]
    flat = [t for ts in term_lists for t in ts]
    points = sampler.sample(list(exprs), trials)
    vals = evaluate_points(flat, points) if flat else []
    out = []
    pos = 0
    for ts in term_lists:
        block = vals[pos: pos + len(ts)]
        pos += len(ts)
        s = np.sum(block, axis=0)
        mag = 1.0 + np.sum(np.abs(block), axis=0)
        dev = np.abs(s) / mag
        bad = ~(dev <= tol)
        if bad.any():
            i = int(np.nonzero(bad)[0][0])
            out.append(EqualityResult(False, float(np.nanmax(np.where(np.isfinite(dev), dev, np.inf))), _witness(points, i)))
        else:
            out.append(EqualityResult(True, float(dev.max()) if len(dev) else 0.0))
    return out
