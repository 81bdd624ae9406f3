"""Batch front door: one JSON job in, one JSON report out.

A job is ``{"command": ..., "inputs": {...}, "config": {...}}``. Spaces,
tensors and decompositions use the payloads of :mod:`pitensor.banach` and
:mod:`pitensor.tensor`; dual operators are plain matrices over the spaces of
the accompanying tensor.

Exit codes: 0 success, 2 inconclusive or heuristic result, 3 refuted
certificate, 4 input error, 5 budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
import warnings

import numpy as np

from . import banach
from .attain import (
    caratheodory_reduce,
    certify_attainment,
    extract_attainment_pairs,
    perturb_to_attaining,
)
from .config import SolverConfig
from .errors import (
    BudgetExceeded,
    InputError,
    NotAttainingAtZ,
    NotNormOne,
    PitensorError,
    SchemaError,
    VertexBudgetExceeded,
)
from .pi_property import SeriesTensor, approx_pipeline
from .projnorm import nuclear_norm, operator_norm, proj_norm
from .tensor import (
    DualOperator,
    assemble,
    decomposition_from_json,
    decomposition_to_json,
    injective_norm,
    tensor_from_json,
)

EXIT_OK, EXIT_INCONCLUSIVE, EXIT_REFUTED, EXIT_INPUT, EXIT_BUDGET = 0, 2, 3, 4, 5

COMMANDS = ("proj-norm", "inj-norm", "nuclear-norm", "op-norm", "certify", "reduce",
            "extract-pairs", "perturb", "pipeline", "selftest")

# required and optional input fields per command
SCHEMA = {
    "proj-norm": ({"tensor"}, {"method"}),
    "inj-norm": ({"tensor"}, set()),
    "nuclear-norm": ({"X", "Y", "matrix"}, {"method"}),
    "op-norm": ({"X", "Y", "matrix"}, set()),
    "certify": ({"tensor", "decomposition", "dual"}, {"tol"}),
    "reduce": ({"X", "Y", "decomposition"}, set()),
    "extract-pairs": ({"tensor", "decomposition", "dual"}, {"tol"}),
    "perturb": ({"X", "Y", "decomposition", "dual", "eta", "eps"}, {"cert_tol"}),
    "pipeline": ({"series", "eps"}, {"mode"}),
    "selftest": (set(), set()),
}


# ---------------------------------------------------------------- serialisation

def _encode(obj):
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return '"nan"'
        if math.isinf(x):
            return '"inf"' if x > 0 else '"-inf"'
        return format(x + 0.0, ".17g")
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        return _encode(obj.tolist())
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_encode(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_encode(v) for v in obj) + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj):
    """JSON text with every float written to 17 significant digits."""
    return _encode(obj)


# ---------------------------------------------------------------- job parsing

def parse_job(job):
    if not isinstance(job, dict):
        raise SchemaError("job must be a JSON object")
    extra = set(job) - {"command", "inputs", "config"}
    if extra:
        raise SchemaError(f"unknown job fields: {sorted(extra)}")
    cmd = job.get("command")
    if cmd not in COMMANDS:
        raise SchemaError(f"command must be one of {list(COMMANDS)}, got {cmd!r}")
    inputs = job.get("inputs", {}) or {}
    if not isinstance(inputs, dict):
        raise SchemaError("inputs must be an object")
    required, optional = SCHEMA[cmd]
    missing = required - set(inputs)
    unknown = set(inputs) - required - optional
    if missing:
        raise SchemaError(f"{cmd}: missing inputs {sorted(missing)}")
    if unknown:
        raise SchemaError(f"{cmd}: unknown inputs {sorted(unknown)}")
    config = SolverConfig.from_json(job.get("config"))
    seed = os.environ.get("PITENSOR_SEED")
    if seed is not None:
        try:
            config = config.with_(seed=int(seed))
        except ValueError as exc:
            raise SchemaError(f"PITENSOR_SEED must be an integer, got {seed!r}") from exc
    return cmd, inputs, config


def _spaces(inputs):
    return banach.space_from_json(inputs["X"]), banach.space_from_json(inputs["Y"])


def _dual(matrix, X, Y):
    return DualOperator(np.asarray(matrix, dtype=float), X, Y)


# ---------------------------------------------------------------- commands

def _proj_norm(inputs, config):
    t = tensor_from_json(inputs["tensor"])
    r = proj_norm(t, config, inputs.get("method", "auto"))
    code = EXIT_OK
    if r.budget_exceeded:
        code = EXIT_BUDGET
    elif r.op_norm_status == "heuristic":
        code = EXIT_INCONCLUSIVE
    return r.to_json(), r.warnings, code


def _nuclear_norm(inputs, config):
    X, Y = _spaces(inputs)
    r = nuclear_norm(np.asarray(inputs["matrix"], dtype=float), X, Y, config,
                     inputs.get("method", "auto"))
    code = EXIT_BUDGET if r.budget_exceeded else (
        EXIT_INCONCLUSIVE if r.op_norm_status == "heuristic" else EXIT_OK)
    return r.to_json(), r.warnings, code


def _inj_norm(inputs, config):
    r = injective_norm(tensor_from_json(inputs["tensor"]), config)
    payload = {"value": r.value, "method": r.method, "x_star": r.x_star.tolist(),
               "y_star": r.y_star.tolist()}
    if r.exact:
        return payload, [], EXIT_OK
    return payload, ["injective norm is a heuristic lower bound"], EXIT_INCONCLUSIVE


def _op_norm(inputs, config):
    X, Y = _spaces(inputs)
    r = operator_norm(_dual(inputs["matrix"], X, Y), config)
    if r.status == "exact":
        return r.to_json(), [], EXIT_OK
    return r.to_json(), ["operator norm is a lower bound"], EXIT_INCONCLUSIVE


def _certify(inputs, config):
    t = tensor_from_json(inputs["tensor"])
    d = decomposition_from_json(inputs["decomposition"], t.X, t.Y)
    G = _dual(inputs["dual"], t.X, t.Y)
    c = certify_attainment(t, d, G, float(inputs.get("tol", 1e-6)), config)
    code = {"certified": EXIT_OK, "refuted": EXIT_REFUTED}.get(c.verdict, EXIT_INCONCLUSIVE)
    return c.to_json(), [], code


def _reduce(inputs, config):
    X, Y = _spaces(inputs)
    d = decomposition_from_json(inputs["decomposition"], X, Y)
    r = caratheodory_reduce(d, X, Y)
    residual = float(np.max(np.abs(assemble(r, X, Y).Z - assemble(d, X, Y).Z), initial=0.0))
    return {"decomposition": decomposition_to_json(r), "atoms_in": len(d), "atoms_out": len(r),
            "value": r.value(), "residual": residual}, [], EXIT_OK


def _extract(inputs, config):
    t = tensor_from_json(inputs["tensor"])
    d = decomposition_from_json(inputs["decomposition"], t.X, t.Y)
    G = _dual(inputs["dual"], t.X, t.Y)
    pairs = extract_attainment_pairs(G, t, d, float(inputs.get("tol", 1e-6)), config)
    return {"pairs": [{"x": x.tolist(), "y": y.tolist()} for x, y in pairs]}, [], EXIT_OK


def _perturb(inputs, config):
    X, Y = _spaces(inputs)
    d = decomposition_from_json(inputs["decomposition"], X, Y)
    G = _dual(inputs["dual"], X, Y)
    out, rep = perturb_to_attaining(d, G, float(inputs["eta"]), float(inputs["eps"]),
                                    config=config, cert_tol=float(inputs.get("cert_tol", 1e-6)))
    payload = {"decomposition": decomposition_to_json(out), "report": rep.to_json()}
    warn = [] if rep.hypotheses_met else ["discarded mass exceeds eta; distance bound unproved"]
    code = EXIT_OK if rep.certificate.certified else EXIT_INCONCLUSIVE
    return payload, warn, code


def _pipeline(inputs, config):
    u = SeriesTensor.from_json(inputs["series"])
    r = approx_pipeline(u, float(inputs["eps"]), inputs.get("mode", "a"), config)
    code = EXIT_OK if r.certified else EXIT_INCONCLUSIVE
    return r.to_json(), r.warnings, code


def _selftest(inputs, config):
    from .selftest import run_selftest

    res = run_selftest(config)
    return res, [], EXIT_OK if res["failed"] == 0 else EXIT_INCONCLUSIVE


HANDLERS = {
    "proj-norm": _proj_norm, "inj-norm": _inj_norm, "nuclear-norm": _nuclear_norm,
    "op-norm": _op_norm, "certify": _certify, "reduce": _reduce, "extract-pairs": _extract,
    "perturb": _perturb, "pipeline": _pipeline, "selftest": _selftest,
}


def _exit_for(exc):
    if isinstance(exc, (VertexBudgetExceeded, BudgetExceeded)):
        return EXIT_BUDGET
    if isinstance(exc, (InputError, NotNormOne, NotAttainingAtZ)):
        return EXIT_INPUT
    return EXIT_INCONCLUSIVE


def run(job):
    """Execute one job and return the report dictionary."""
    start = time.perf_counter()
    command = job.get("command") if isinstance(job, dict) else None
    try:
        cmd, inputs, config = parse_job(job)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            result, warn, code = HANDLERS[cmd](inputs, config)
        warn = list(warn) + [str(w.message) for w in caught if str(w.message) not in warn]
    except (PitensorError, ValueError, TypeError, KeyError) as exc:
        result = {"error": type(exc).__name__, "message": str(exc)}
        warn = []
        code = _exit_for(exc) if isinstance(exc, PitensorError) else EXIT_INPUT
    return {"command": command, "result": result,
            "timing_ms": (time.perf_counter() - start) * 1e3,
            "warnings": warn, "exit_code": code}


def _summary(report):
    res = report["result"]
    head = f"{report['command']}: exit {report['exit_code']}"
    if "error" in res:
        return f"{head} ({res['error']}: {res['message']})"
    for key in ("verdict", "upper", "value", "failed"):
        if key in res:
            extra = f", lower {res['lower']:.12g}" if key == "upper" else ""
            v = res[key]
            v = f"{v:.12g}" if isinstance(v, float) else v
            return f"{head}, {key} {v}{extra}"
    return head


def main(argv=None):
    ap = argparse.ArgumentParser(prog="pitensor", description=__doc__.splitlines()[0])
    ap.add_argument("--job", help="job file (JSON); stdin when omitted")
    ap.add_argument("--out", help="report file; stdout when omitted")
    ap.add_argument("--quiet", action="store_true", help="suppress the summary on stderr")
    args = ap.parse_args(argv)
    try:
        text = open(args.job).read() if args.job else sys.stdin.read()
        job = json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        report = {"command": None, "result": {"error": type(exc).__name__, "message": str(exc)},
                  "timing_ms": 0.0, "warnings": [], "exit_code": EXIT_INPUT}
    else:
        report = run(job)
    out = dumps(report) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    if not args.quiet:
        print(_summary(report), file=sys.stderr)
    return report["exit_code"]


if __name__ == "__main__":
    sys.exit(main())
