"""Command-line front end: ``comodsys list | verify | integrate | export``.

Every command builds its output as a JSON document first; the human-readable
text is a rendering of that document.  Randomized checks are seeded by
``--seed`` (default: ``$COMODSYS_SEED``, else 0), so equal seeds give
byte-identical JSON.

Exit codes: 0 success, 1 a check or drift bound failed, 2 bad usage or
parameters, 3 the computation could not be completed.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path
from typing import Any, Sequence

from .errors import (
    BudgetExceeded,
    ComodsysError,
    InvalidParameter,
    ModelFileError,
    NonTerminating,
    SingularityApproach,
    StepSizeUnderflow,
    UnknownModel,
)

REPORT_SCHEMA = "comodsys-report"
REPORT_VERSION = 1
SEED_ENV = "COMODSYS_SEED"

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_ERROR = 0, 1, 2, 3

# command-line flag -> catalog parameter name
MODEL_FLAGS = {
    "N": "N", "k": "k", "sigma": "sigma", "tau": "tau", "z": "z",
    "a12": "a12", "b12": "b12", "c": "c", "lam": "lam", "variant": "variant",
}


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV, "").strip()
    if not raw:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise InvalidParameter(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _positive(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return v


def _model_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("model", help="catalog name or path to a model file (.json)")
    g = p.add_argument_group("model parameters (only those of the chosen family apply)")
    g.add_argument("--N", type=int, help="number of tensor legs (so22, schrodinger)")
    g.add_argument("--k", type=int, help="number of tensor legs (q-oscillator, re-algebra)")
    g.add_argument("--sigma", type=float)
    g.add_argument("--tau", type=float)
    g.add_argument("--z", type=float)
    g.add_argument("--a12", type=float)
    g.add_argument("--b12", type=float)
    g.add_argument("--c", type=_float_list, help="couplings c3,c4,...")
    g.add_argument("--lam", type=_float_list, help="scales lam1,lam2,...")
    g.add_argument("--variant", choices=["calogero", "confined"])


def _json_flag(p: argparse.ArgumentParser) -> None:
    p.add_argument("--json", action="store_true", help="print the JSON document instead of text")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="comodsys", description="Integrable systems from comodule algebras: build, verify, integrate, export.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("list", help="list the model catalog")
    _json_flag(p)

    p = sub.add_parser("verify", help="run the axiom and involution suites")
    _model_options(p)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--tol", type=_positive, default=1e-9)
    p.add_argument("--seed", type=int, default=None, help=f"sampling seed (default ${SEED_ENV} or 0)")
    _json_flag(p)

    p = sub.add_parser("integrate", help="integrate a trajectory and scan the integrals")
    _model_options(p)
    p.add_argument("--t-end", type=_positive, default=20.0)
    p.add_argument("--x0", type=_float_list, help="initial state q1,...,qn,p1,...,pn")
    p.add_argument("--rel-tol", type=_positive, default=1e-10)
    p.add_argument("--abs-tol", type=_positive, default=1e-12)
    p.add_argument("--method", choices=["RK45", "DOP853", "midpoint"], default="RK45")
    p.add_argument("--samples", type=int, default=401, help="output grid size")
    p.add_argument("--drift-max", type=_positive, default=1e-5)
    p.add_argument("--no-reversal", action="store_true", help="skip the time-reversal check")
    p.add_argument("--out", help="write OUT.csv (trajectory) and OUT.json (summary)")
    _json_flag(p)

    p = sub.add_parser("export", help="write the model file, including derived integrals")
    _model_options(p)
    p.add_argument("--out", help="output path (default: stdout)")
    return parser


def _given_params(args) -> dict[str, Any]:
    return {name: getattr(args, flag) for flag, name in MODEL_FLAGS.items() if getattr(args, flag, None) is not None}


def load_bundle(args):
    from .models.catalog import CATALOG, build_model
    from .modelfile import import_model

    params = _given_params(args)
    name = args.model
    if name not in CATALOG and (name.endswith(".json") or Path(name).is_file()):
        if params:
            raise InvalidParameter("model parameters cannot be combined with a model file")
        return import_model(name)
    return build_model(name, params)


def envelope(command: str, body: dict) -> dict:
    return {"schema": REPORT_SCHEMA, "schema_version": REPORT_VERSION, "command": command, **body}


def dump(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_list(args) -> tuple[dict, int]:
    from .models.catalog import list_models

    return envelope("list", {"models": list_models()}), EXIT_OK


def render_list(doc: dict) -> str:
    lines = []
    for m in doc["models"]:
        params = ", ".join(f"{p['name']}={p['default']}" for p in m["params"])
        lines.append(f"{m['name']}  [{m['kind']}]  {m['summary']}")
        lines.append(f"    construction: {m['construction']}")
        lines.append(f"    parameters:   {params}")
    return "\n".join(lines)


def cmd_verify(args) -> tuple[dict, int]:
    from .models.catalog import verify_bundle

    seed = default_seed() if args.seed is None else args.seed
    if args.trials < 1:
        raise InvalidParameter("--trials must be at least 1")
    bundle = load_bundle(args)
    rep = verify_bundle(bundle, trials=args.trials, tol=args.tol, seed=seed)
    body = {
        "model": bundle.name,
        "kind": bundle.kind,
        "params": bundle.params,
        "seed": seed,
        "trials": args.trials,
        "tol": args.tol,
        "passed": rep.passed,
        "summary": {"checks": len(rep.checks), "failed": len(rep.failures), "flagged": len(rep.flags)},
        "report": rep.to_dict(),
    }
    return envelope("verify", body), EXIT_OK if rep.passed else EXIT_FAIL


def render_verify(doc: dict) -> str:
    from .report import Check, Report

    r = doc["report"]
    rep = Report(r["title"], [
        Check(c["name"], c["passed"], c.get("detail", ""), c.get("witness"), c.get("deviation"), c.get("flagged", False))
        for c in r["checks"]
    ])
    s = doc["summary"]
    tail = f"{s['checks']} checks, {s['failed']} failed, {s['flagged']} flagged (seed {doc['seed']}, {doc['trials']} trials, tol {doc['tol']:g})"
    return rep.render() + "\n" + tail


def cmd_integrate(args) -> tuple[dict, int]:
    from .dynamics import IntegratorConfig, write_csv, write_summary
    from .models.catalog import ClassicalBundle
    from .models.simulate import run_dynamics

    bundle = load_bundle(args)
    if not isinstance(bundle, ClassicalBundle):
        raise InvalidParameter(f"{bundle.name} is a quantum model; integrate needs a classical one")
    if args.samples < 2:
        raise InvalidParameter("--samples must be at least 2")
    dim = 2 * bundle.degrees_of_freedom
    if args.x0 is not None and len(args.x0) != dim:
        raise InvalidParameter(f"--x0 needs {dim} entries (q1..q{dim // 2}, p1..p{dim // 2}), got {len(args.x0)}")
    cfg = IntegratorConfig(method=args.method, rtol=args.rel_tol, atol=args.abs_tol, samples=args.samples)
    run = run_dynamics(bundle, args.t_end, args.x0, cfg, reversal=not args.no_reversal)
    summary = run.summary(drift_max=args.drift_max)
    ok = run.conservation.max_drift < args.drift_max
    body = {"model": bundle.name, "params": bundle.params, "rel_tol": args.rel_tol, "passed": ok, "summary": summary}
    if args.out:
        stem = args.out[:-4] if args.out.endswith(".csv") else args.out
        write_csv(run.trajectory, stem + ".csv")
        write_summary(envelope("integrate", body), stem + ".json")
        body["files"] = [stem + ".csv", stem + ".json"]
    return envelope("integrate", body), EXIT_OK if ok else EXIT_FAIL


def render_integrate(doc: dict) -> str:
    s = doc["summary"]
    lines = [f"{doc['model']}: t = {s['t_start']:g} .. {s['t_end']:g}, {s['samples']} samples, {s['function_evaluations']} evaluations"]
    for name, d in s["drift"].items():
        mark = "ok  " if d < s["drift_max"] else "FAIL"
        lines.append(f"  [{mark}] drift of {name}: {d:.3e}")
    lines.append(f"  max bracket residual along the orbit: {s['max_bracket_residual']:.3e}")
    if "time_reversal_error" in s:
        lines.append(f"  time-reversal error: {s['time_reversal_error']:.3e}")
    lines.append(f"  independence rank {s['independence_rank']} of {s['integral_count']} integrals, {s['degrees_of_freedom']} degrees of freedom")
    for f in doc.get("files", []):
        lines.append(f"  wrote {f}")
    lines.append("PASS" if doc["passed"] else f"FAIL: max drift {s['max_drift']:.3e} >= {s['drift_max']:g}")
    return "\n".join(lines)


def cmd_export(args) -> tuple[str, int]:
    from .modelfile import dumps

    text = dumps(load_bundle(args))
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        return f"wrote {args.out}", EXIT_OK
    return text.rstrip("\n"), EXIT_OK


COMMANDS = {
    "list": (cmd_list, render_list),
    "verify": (cmd_verify, render_verify),
    "integrate": (cmd_integrate, render_integrate),
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "export":
            text, code = cmd_export(args)
            print(text)
            return code
        run, render = COMMANDS[args.command]
        doc, code = run(args)
    except (UnknownModel, InvalidParameter, ModelFileError) as e:
        print(f"comodsys: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (SingularityApproach, StepSizeUnderflow, BudgetExceeded, NonTerminating) as e:
        print(f"comodsys: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_ERROR
    except ComodsysError as e:
        print(f"comodsys: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_ERROR
    print(dump(doc) if getattr(args, "json", False) else render(doc))
    if code == EXIT_FAIL and args.command == "verify":
        for c in doc["report"]["checks"]:
            if not c["passed"]:
                print(f"comodsys: check failed: {c['name']}", file=sys.stderr)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
