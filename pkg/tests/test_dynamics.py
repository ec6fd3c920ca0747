import json
import math

import numpy as np
import pytest

from comodsys.dynamics import (
    IntegratorConfig,
    conservation_scan,
    independence_rank,
    integrate,
    relative_drift,
    summary,
    time_reversal_error,
    vector_field,
    write_csv,
    write_summary,
)
from comodsys.errors import SingularityApproach, StepSizeUnderflow, UnboundParameter
from comodsys.expr import add, momentum, mul, parameter, position, power
from comodsys.models.catalog import build_model
from comodsys.models.simulate import run_dynamics
from comodsys.symplectic import PhaseSpace

q1, p1, q2, p2 = position(1), momentum(1), position(2), momentum(2)
HALF = 0.5
OSC = add(mul(HALF, power(p1, 2)), mul(HALF, power(q1, 2)))


def test_vector_field_signs():
    f = vector_field(OSC)
    assert f == [p1, mul(-1, q1)]


def test_vector_field_rejects_unbound_parameter():
    w = parameter("w")
    with pytest.raises(UnboundParameter):
        vector_field(mul(w, OSC), params={})


@pytest.mark.parametrize("method", ["RK45", "DOP853", "midpoint"])
def test_oscillator_matches_closed_solution(method):
    cfg = IntegratorConfig(method=method, step=1e-3, samples=51)
    traj = integrate(OSC, [1.0, 0.0], 2.0, cfg)
    t = traj.t
    tol = 1e-7 if method != "midpoint" else 1e-6
    assert np.allclose(traj.states[:, 0], np.cos(t), atol=tol)
    assert np.allclose(traj.states[:, 1], -np.sin(t), atol=tol)


def test_midpoint_conserves_quadratic_energy():
    cfg = IntegratorConfig(method="midpoint", step=0.05, samples=101)
    traj = integrate(OSC, [0.3, 0.8], 30.0, cfg, integrals={"H": OSC})
    assert relative_drift(traj.integrals["H"]) < 1e-12


def test_parameters_are_bound():
    w = parameter("w")
    h = add(mul(HALF, power(p1, 2)), mul(HALF, w, power(q1, 2)))
    traj = integrate(h, [1.0, 0.0], 1.0, params={w: 4.0}, cfg=IntegratorConfig(samples=11))
    assert traj.states[-1, 0] == pytest.approx(math.cos(2.0), abs=1e-8)


def test_singularity_guard():
    # inverse-square repulsion with the particle started moving into the wall
    c = parameter("c")
    h = add(mul(HALF, power(p1, 2)), mul(-1, c, power(q1, -2)))
    with pytest.raises(SingularityApproach) as info:
        integrate(h, [0.5, -1.0], 5.0, params={c: 1.0})
    assert info.value.guard == "q1"
    with pytest.raises(SingularityApproach):
        integrate(h, [0.0005, 1.0], 1.0, params={c: 1.0})


def test_bad_initial_state_and_config():
    with pytest.raises(ValueError):
        integrate(OSC, [1.0], 1.0)
    with pytest.raises(ValueError):
        IntegratorConfig(method="euler")
    with pytest.raises(ValueError):
        IntegratorConfig(rtol=0)
    with pytest.raises(ValueError):
        IntegratorConfig(samples=1)


def test_drift_metric():
    assert relative_drift(np.array([2.0, 2.5, 1.0])) == pytest.approx(0.5)
    assert relative_drift(np.array([0.1, 0.3])) == pytest.approx(0.2)


def test_time_reversal():
    assert time_reversal_error(OSC, [0.4, -0.2], 10.0) < 1e-8


def test_independence_rank():
    ps = PhaseSpace.of_degree(2)
    pts = np.array([[0.3, -0.7, 1.1, 0.4], [1.2, 0.5, -0.3, 0.9]])
    h1 = add(mul(HALF, power(p1, 2)), mul(HALF, power(q1, 2)))
    h2 = add(mul(HALF, power(p2, 2)), mul(HALF, power(q2, 2)))
    assert independence_rank([h1, h2], ps, pts) == 2
    assert independence_rank([h1, mul(2, h1)], ps, pts) == 1


def test_conservation_scan_and_files(tmp_path):
    h2 = add(mul(HALF, power(p2, 2)), mul(HALF, power(q2, 2)))
    ints = {"H1": OSC, "H2": h2, "L": add(mul(q1, p2), mul(-1, q2, p1))}
    h = add(OSC, h2)
    traj = integrate(h, [0.3, 0.5, -0.2, 0.7], 5.0, IntegratorConfig(samples=21), integrals=ints)
    rep = conservation_scan(traj, ints)
    assert rep.max_drift < 1e-8
    assert rep.bracket_residuals["{H1,H2}"] == 0.0
    assert rep.rank == 3 and rep.count == 3 and rep.degrees == 2
    write_csv(traj, tmp_path / "run.csv")
    lines = (tmp_path / "run.csv").read_text().splitlines()
    assert lines[0] == "t,q1,q2,p1,p2,H1,H2,L"
    assert len(lines) == 22
    doc = summary(traj, rep, extra=1)
    write_summary(doc, tmp_path / "run.json")
    back = json.loads((tmp_path / "run.json").read_text())
    assert back["samples"] == 21 and back["extra"] == 1 and back["independence_rank"] == 3


@pytest.mark.parametrize("name, params", [
    ("so22-calogero", {"N": 3}),
    ("schrodinger-sigma", {}),
    ("schrodinger-tau", {"N": 3}),
    ("q-oscillator-classical", {}),
])
def test_catalog_short_runs(name, params):
    run = run_dynamics(build_model(name, params), t_end=3.0)
    assert run.conservation.max_drift < 1e-7
    assert run.conservation.max_residual < 1e-8
    assert run.reversal_error < 1e-6
    s = run.summary()
    assert s["time_reversal_error"] == pytest.approx(run.reversal_error, rel=1e-5)


def test_escaping_q_oscillator_orbit_aborts():
    b = build_model("q-oscillator-classical", {"k": 3, "z": 0.3})
    with pytest.raises((StepSizeUnderflow, SingularityApproach)):
        run_dynamics(b, 20.0, reversal=False)
