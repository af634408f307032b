"""Command-line front end.

Subcommands::

    risbound gen      --ns 8 --seed 0 --out model.json
    risbound bound    --model model.json --loads pm --bounds ni,nio,ibd,sdr
    risbound optimize --model model.json --loads pm --methods es,cd,ga,psdr
    risbound sweep    --model model.json --loads pm --ns 1,2,4,8
    risbound verify   --seed 0 --count 20

Exit codes: 0 success, 1 verification property failure, 2 configuration
error, 3 numerical failure.  Post-parse errors emit one JSON record on
stderr so callers can dispatch on ``error``/``message`` fields.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .bounds import NioOptions, ibd_bound, ni_bound, nio_bound
from .errors import (
    GaugeError,
    InvalidNoise,
    NotContractive,
    NotUnitModulusLoads,
    NumericalFailure,
    ParseError,
    RisboundError,
    SingularResolvent,
    SingularUpdate,
    SolverNotConverged,
    TooLarge,
    ZeroMatrix,
)
from .model import ModelParameters, capacity_from_gain, reduce_model
from .optimize import (
    coordinate_descent,
    exhaustive_search,
    genetic_algorithm,
    project_sdr,
)
from .reports import ResultRow, write_csv, write_json
from .scenarios import (
    LOAD_SETS,
    ScenarioSpec,
    generate_scenario,
    load_model,
    load_set,
    save_model,
    with_loads,
)
from .sdr import sdr_bound
from .verify import run_verification

__all__ = ["main", "build_parser"]

BOUND_ORDER = ("ni", "nio", "ibd", "sdr")
METHOD_ORDER = ("es", "cd", "ga", "psdr")
DEFAULT_PT_MW = 10.0
DEFAULT_SIGMA2_MW = 1e-5


def _csv_set(raw: str, allowed, flag: str):
    names = [tok.strip().lower() for tok in raw.split(",") if tok.strip()]
    if not names:
        raise ValueError(f"{flag} must select at least one of {','.join(allowed)}")
    bad = sorted(set(names) - set(allowed))
    if bad:
        raise ValueError(f"unknown {flag} entries {bad}; choose from {','.join(allowed)}")
    return [name for name in allowed if name in names]


def _int_list(raw: str, flag: str):
    try:
        values = [int(tok) for tok in raw.split(",") if tok.strip()]
    except ValueError as exc:
        raise ValueError(f"{flag} must be a comma-separated integer list") from exc
    if not values or any(v < 1 for v in values):
        raise ValueError(f"{flag} entries must be positive integers")
    return values


def _resolve_model(args) -> tuple[ModelParameters, str, str]:
    """Model, scenario label, load-set label implied by --model/--ns/--loads."""
    if args.model is not None:
        theta = load_model(args.model)
        label = str(args.model).rsplit("/", 1)[-1]
        if label.endswith(".json"):
            label = label[: -len(".json")]
    elif getattr(args, "ns", None):
        ns = args.ns if isinstance(args.ns, int) else args.ns[0]
        theta = generate_scenario(ScenarioSpec(n_s=ns, seed=args.seed, direct_path="random"))
        label = f"seed{args.seed}-n{ns}"
    else:
        raise ValueError("either --model or --ns must be given")
    loads_label = "custom"
    if args.loads is not None:
        ls = load_set(args.loads)
        theta = with_loads(theta, ls)
        loads_label = ls.name
    return theta, label, loads_label


@contextlib.contextmanager
def _out_stream(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _emit(rows, args, include_runtime=True):
    with _out_stream(args.out) as stream:
        if args.format == "json":
            write_json(rows, stream, include_runtime=include_runtime)
        else:
            write_csv(rows, stream, include_runtime=include_runtime)


def _capacity(value: float, args) -> float:
    if np.isfinite(value) and value >= 0:
        return capacity_from_gain(value, args.pt_mw, args.sigma2_mw)
    return float("nan")


def _row(args, label, theta, loads_label, method, kind, value, valid, runtime, seed=None):
    return ResultRow(
        scenario=label,
        n_s=theta.n_s,
        load_set=loads_label,
        method=method,
        kind=kind,
        value=float(value),
        capacity=_capacity(float(value), args),
        valid=valid,
        seed=seed,
        runtime_s=runtime,
    )


def _bound_rows(args, theta, label, loads_label, which):
    rows = []
    for name in which:
        t0 = time.perf_counter()
        if name == "ni":
            rep = ni_bound(theta)
            value, valid = rep.value, rep.valid
        elif name == "nio":
            opts = NioOptions(
                restarts=args.nio_restarts, max_iters=args.nio_iters, seed=args.seed
            )
            rep = nio_bound(theta, opts)
            value, valid = rep.value, rep.valid
        elif name == "ibd":
            try:
                rep, _ = ibd_bound(theta)
                value, valid = rep.value, rep.valid
            except (NotUnitModulusLoads, NotContractive):
                value, valid = float("nan"), False  # reported as N/A, not an error
        else:
            sol = sdr_bound(theta)
            value, valid = sol.bound, sol.certified
        rows.append(
            _row(
                args,
                label,
                theta,
                loads_label,
                name,
                "bound",
                value,
                valid,
                time.perf_counter() - t0,
                seed=args.seed,
            )
        )
    return rows


def _optimize_rows(args, theta, label, loads_label, which):
    rows = []
    for name in which:
        t0 = time.perf_counter()
        if name == "es":
            res = exhaustive_search(theta)
        elif name == "cd":
            res = coordinate_descent(theta, seed=args.seed)
        elif name == "ga":
            res = genetic_algorithm(theta, seed=args.seed)
        else:
            res = project_sdr(theta, sdr_bound(theta).x_check)
        rows.append(
            _row(
                args,
                label,
                theta,
                loads_label,
                name,
                "gain",
                res.gain,
                True,
                time.perf_counter() - t0,
                seed=args.seed,
            )
        )
    return rows


def cmd_gen(args) -> int:
    spec = ScenarioSpec(
        n_s=args.ns,
        seed=args.seed,
        max_singular_value=args.max_sv,
        reciprocal=args.reciprocal,
        coupling_scale=args.coupling_scale,
        direct_path=args.direct_path,
    )
    theta = generate_scenario(spec)
    if args.loads is not None:
        theta = with_loads(theta, load_set(args.loads))
    save_model(theta, args.out)
    return 0


def cmd_bound(args) -> int:
    theta, label, loads_label = _resolve_model(args)
    which = _csv_set(args.bounds, BOUND_ORDER, "--bounds")
    _emit(_bound_rows(args, theta, label, loads_label, which), args)
    return 0


def cmd_optimize(args) -> int:
    theta, label, loads_label = _resolve_model(args)
    which = _csv_set(args.methods, METHOD_ORDER, "--methods")
    _emit(_optimize_rows(args, theta, label, loads_label, which), args)
    return 0


def cmd_sweep(args) -> int:
    if args.model is None:
        raise ValueError("sweep requires --model (--ns selects the sweep points)")
    theta, label, loads_label = _resolve_model(args)
    ns_list = sorted(set(_int_list(args.ns, "--ns")))
    if ns_list[-1] > theta.n_s:
        raise ValueError(f"--ns entries must not exceed the model size {theta.n_s}")
    bounds = _csv_set(args.bounds, BOUND_ORDER, "--bounds") if args.bounds else []
    methods = _csv_set(args.methods, METHOD_ORDER, "--methods") if args.methods else []
    if not bounds and not methods:
        raise ValueError("sweep needs at least one of --bounds/--methods")

    def point(k):
        reduced = reduce_model(theta, range(k), fixed_state="alpha")
        rows = _bound_rows(args, reduced, label, loads_label, bounds)
        rows += _optimize_rows(args, reduced, label, loads_label, methods)
        return rows

    results = {}
    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            futures = {k: pool.submit(point, k) for k in ns_list}
        for k, fut in futures.items():
            results[k] = fut.result()
    else:
        for k in ns_list:
            results[k] = point(k)
    rows = [row for k in ns_list for row in results[k]]
    _emit(rows, args)
    return 0


def cmd_verify(args) -> int:
    outcome = run_verification(seed=args.seed, count=args.count, jobs=args.jobs)
    with _out_stream(args.out) as stream:
        if args.format == "json":
            write_json(outcome.rows, stream, include_runtime=False)
        else:
            write_csv(outcome.rows, stream, include_runtime=False)
    for failure in outcome.failures:
        print(f"FAIL {failure}", file=sys.stderr)
    status = "passed" if outcome.passed else "FAILED"
    print(
        f"verification {status}: {outcome.checks} checks on {args.count} scenarios, "
        f"{len(outcome.failures)} failure(s)",
        file=sys.stderr,
    )
    return 0 if outcome.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="risbound",
        description="Bounds and optimizers for 1-bit programmable scattering channels.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, model=True):
        if model:
            p.add_argument("--model", help="model file produced by `risbound gen`")
        p.add_argument(
            "--loads",
            choices=sorted(k.lower() for k in LOAD_SETS),
            help="replace the model's load states with a named pair",
        )
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--pt-mw", type=float, default=DEFAULT_PT_MW, dest="pt_mw")
        p.add_argument("--sigma2-mw", type=float, default=DEFAULT_SIGMA2_MW, dest="sigma2_mw")
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--nio-restarts", type=int, default=8, dest="nio_restarts")
        p.add_argument("--nio-iters", type=int, default=500, dest="nio_iters")

    p = sub.add_parser("gen", help="generate a random passive scenario file")
    p.add_argument("--ns", type=int, required=True, help="number of programmable elements")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-sv", type=float, default=0.95, dest="max_sv")
    p.add_argument("--coupling-scale", type=float, default=1.0, dest="coupling_scale")
    p.add_argument("--direct-path", choices=("zero", "random"), default="zero")
    p.add_argument("--reciprocal", action="store_true")
    p.add_argument("--loads", choices=sorted(k.lower() for k in LOAD_SETS))
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bound", help="compute the selected channel-gain upper bounds")
    common(p)
    p.add_argument("--ns", type=int, help="generate a scenario instead of loading one")
    p.add_argument("--bounds", default=",".join(BOUND_ORDER))
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("optimize", help="run the selected discrete optimizers")
    common(p)
    p.add_argument("--ns", type=int, help="generate a scenario instead of loading one")
    p.add_argument("--methods", default=",".join(METHOD_ORDER))
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("sweep", help="bounds/optimizers vs element count on reduced models")
    common(p)
    p.add_argument(
        "--ns",
        required=True,
        help="comma-separated element counts; inactive elements are frozen at alpha",
    )
    p.add_argument("--bounds", default=",".join(BOUND_ORDER))
    p.add_argument("--methods", default=",".join(METHOD_ORDER))
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="run the randomized property suite")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", help="row output path (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_verify)
    return parser


def _error_record(exc: BaseException) -> None:
    record = {"error": type(exc).__name__, "message": str(exc)}
    print(json.dumps(record), file=sys.stderr)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (
        np.linalg.LinAlgError,  # subclasses ValueError, so listed before the config group
        SolverNotConverged,
        NumericalFailure,
        SingularResolvent,
        SingularUpdate,
        ZeroMatrix,
        ArithmeticError,
    ) as exc:
        _error_record(exc)
        return 3
    except (ParseError, TooLarge, InvalidNoise, GaugeError, ValueError, OSError) as exc:
        _error_record(exc)
        return 2
    except RisboundError as exc:
        _error_record(exc)
        return 3


if __name__ == "__main__":
    sys.exit(main())
