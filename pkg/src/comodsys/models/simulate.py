"""Trajectory runs for catalog bundles: integrate, scan integrals, reverse."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ..dynamics import (
    ConservationReport,
    IntegratorConfig,
    Trajectory,
    conservation_scan,
    integrate,
    summary,
    time_reversal_error,
)
from .catalog import ClassicalBundle


@dataclass
class DynamicsRun:
    trajectory: Trajectory
    conservation: ConservationReport
    reversal_error: float | None

    def summary(self, **extra) -> dict:
        if self.reversal_error is not None:
            extra["time_reversal_error"] = float(f"{self.reversal_error:.6e}")
        return summary(self.trajectory, self.conservation, **extra)


def run_dynamics(
    bundle: ClassicalBundle,
    t_end: float = 20.0,
    x0: Sequence[float] | None = None,
    cfg: IntegratorConfig | None = None,
    reversal: bool = True,
) -> DynamicsRun:
    """Integrate ``bundle``'s realized Hamiltonian and scan every integral.

    Raises :class:`~comodsys.errors.SingularityApproach` or
    :class:`~comodsys.errors.StepSizeUnderflow` when the orbit leaves the
    regular domain.
    """
    cfg = cfg or IntegratorConfig()
    x0 = list(bundle.x0 if x0 is None else x0)
    h, ps, params = bundle.realized_hamiltonian, bundle.phase_space, bundle.parameter_values
    traj = integrate(h, x0, t_end, cfg, ps, params, bundle.realized_integrals)
    report = conservation_scan(traj, bundle.realized_integrals, params)
    rev = time_reversal_error(h, x0, t_end, cfg, ps, params) if reversal else None
    return DynamicsRun(traj, report, rev)
