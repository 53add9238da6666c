"""JSON job runner.

A job is a single JSON document naming a command::

    {"command": "member", "params": {...}, "series": {...}, "options": {...}}

It is read from standard input or ``--job FILE`` and the result is written
as one JSON line to standard output.  Exit status is 0 when everything was
computed and every checked bound held, 1 when a check found a violation,
and 2 for invalid input.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import sys
from typing import Any, Callable, Mapping, Optional, Sequence

import jsonschema
import numpy as np

from . import schemas
from .bounds import (
    DiskRadiusKind,
    derivative_distortion_bounds,
    derivative_distortion_report,
    disk_radius_variants,
    distortion_bounds,
    distortion_report,
    frac_derivative_distortion,
    frac_distortion_report,
    frac_integral_distortion,
    printed_fractional_coefficient,
    radius_with_minimizer,
    TailCheckError,
)
from .classes import (
    ClassParams,
    Verdict,
    coefficient_bound,
    coefficient_margin,
    extremal_function,
    is_member,
)
from .fps import DomainError, FractionalSeries, Sign, evaluate_polar
from .geometry import (
    THREADS_ENV,
    FunctionalKind,
    NonMonotonicProfileError,
    PoleError,
    VerificationGrid,
    brute_force_radius,
    grid_records,
    l2_integral,
    subordination_residual,
    verify_integral_means_dominance,
    write_grid_csv,
)
from .operators import frac_derivative, frac_derivative_higher, frac_integral

EXIT_OK, EXIT_VIOLATION, EXIT_INVALID = 0, 1, 2
MAX_SWEEP_STEPS = 10_000
RADIUS_AGREEMENT = 1e-3
NECESSITY_MARGIN = 1e-3


class InvalidJob(ValueError):
    pass


class Violation(Exception):
    """Carries a result document whose checks did not all hold."""

    def __init__(self, payload: dict):
        super().__init__("verification found a violation")
        self.payload = payload


def fmt_float(x: float) -> float:
    """Round to 9 significant digits; ``repr`` then gives a stable spelling."""
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite value {x}")
    return float(f"{x:.9g}")


def _normalize(obj: Any) -> Any:
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return fmt_float(float(obj))
    if isinstance(obj, Mapping):
        return {str(k): _normalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_normalize(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any) -> str:
    return json.dumps(_normalize(obj), allow_nan=False)


# ---------------------------------------------------------------------------
# option helpers


def _opt(options: Mapping, name: str, default=None, *, kind=float,
         check: Optional[Callable[[Any], bool]] = None, what: str = ""):
    if name not in options:
        if default is None:
            raise InvalidJob(f"missing option {name!r}")
        return default
    value = options[name]
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise InvalidJob(f"option {name!r} must be a number")
        value = float(value)
        if not math.isfinite(value):
            raise InvalidJob(f"option {name!r} must be finite")
    elif kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise InvalidJob(f"option {name!r} must be an integer")
    elif kind is str:
        if not isinstance(value, str):
            raise InvalidJob(f"option {name!r} must be a string")
    if check is not None and not check(value):
        raise InvalidJob(f"option {name!r} = {value!r} out of range {what}".rstrip())
    return value


def _params(job: Mapping) -> ClassParams:
    if "params" not in job:
        raise InvalidJob(f"command {job['command']!r} needs 'params'")
    return ClassParams.from_json(job["params"])


def _series(job: Mapping, p: Optional[ClassParams]) -> FractionalSeries:
    if "series" not in job:
        raise InvalidJob(f"command {job['command']!r} needs 'series'")
    default_mu = None if p is None else p.mu
    f = FractionalSeries.from_json(job["series"], default_mu=default_mu)
    if p is not None and f.mu != p.mu:
        raise InvalidJob(f"series mu {f.mu} differs from params mu {p.mu}")
    return f


def _grid(options: Mapping) -> VerificationGrid:
    spec = options.get("grid", {})
    if not isinstance(spec, Mapping):
        raise InvalidJob("option 'grid' must be an object")
    kwargs = {}
    if "radii" in spec:
        kwargs["radii"] = tuple(spec["radii"])
    if "angular_samples" in spec:
        kwargs["angular_samples"] = spec["angular_samples"]
    if "slit_margin" in spec:
        kwargs["slit_margin"] = spec["slit_margin"]
    return VerificationGrid(**kwargs)


def _kind(options: Mapping) -> FunctionalKind:
    return FunctionalKind(_opt(options, "kind", "starlike", kind=str))


def _unit(x):
    return 0.0 < x < 1.0


def _psi_range(x):
    return 0.0 <= x < 1.0


# ---------------------------------------------------------------------------
# commands


def cmd_member(job, options) -> dict:
    p = _params(job)
    f = _series(job, p)
    return {"verdict": is_member(p, f).value, "margin": coefficient_margin(p, f)}


def _radius_row(p: ClassParams, kind: FunctionalKind, psi: float, n_max: int, tol: float):
    res = radius_with_minimizer(kind, p, psi, n_max)
    oracle = brute_force_radius(extremal_function(p, res.minimizer_n), kind, psi, tol)
    return res, oracle


def cmd_radius(job, options) -> dict:
    p = _params(job)
    kind = _kind(options)
    psi = _opt(options, "psi", 0.0, check=_psi_range, what="[0, 1)")
    n_max = _opt(options, "n_max", 512, kind=int, check=lambda n: 16 <= n <= 100_000)
    tol = _opt(options, "tol", 1e-6, check=lambda t: 0 < t < 0.05)
    res, oracle = _radius_row(p, kind, psi, n_max, tol)
    out = {"radius": res.radius, "minimizer_n": res.minimizer_n, "oracle": oracle}
    if abs(res.radius - oracle) > RADIUS_AGREEMENT:
        raise Violation({**out, "violations": ["radius_oracle_disagreement"]})
    return out


_DISTORT_KINDS = ("f", "derivative", "frac_integral", "frac_derivative")


def cmd_distort(job, options) -> dict:
    p = _params(job)
    r = _opt(options, "r", check=_unit, what="(0, 1)")
    which = _opt(options, "which", "f", kind=str, check=lambda w: w in _DISTORT_KINDS,
                 what=str(_DISTORT_KINDS))
    out: dict = {}
    if which == "f":
        lo, hi = distortion_bounds(p, r)
    elif which == "derivative":
        lo, hi = derivative_distortion_bounds(p, r)
    else:
        kind = DiskRadiusKind(which)
        if kind is DiskRadiusKind.FRAC_INTEGRAL:
            delta = _opt(options, "delta", check=lambda d: d > 0, what="(0, inf)")
            lo, hi = frac_integral_distortion(p, delta, r)
        else:
            delta = _opt(options, "delta", check=lambda d: 0 <= d < 1, what="[0, 1)")
            lo, hi = frac_derivative_distortion(p, delta, r)
        radii = disk_radius_variants(kind, p, delta)
        out["disk_radius"] = {"upper": radii.upper, "lower_sign": radii.lower_sign}
        out["printed_coefficient"] = printed_fractional_coefficient(p, delta)
    out = {"lower": lo, "upper": hi, **out}
    if "series" in job:
        f = _series(job, p)
        if is_member(p, f) is not Verdict.MEMBER_CERTIFIED:
            raise InvalidJob("distortion containment needs a certified member series")
        if which == "f":
            reports = distortion_report(p, f, r)
        elif which == "derivative":
            reports = derivative_distortion_report(p, f, r)
        else:
            reports = frac_distortion_report(which, p, f, delta, r)
        out["reports"] = [rep.to_json() for rep in reports]
        if not all(rep.holds for rep in reports):
            raise Violation({**out, "violations": [rep.kind for rep in reports if not rep.holds]})
    return out


def cmd_fracop(job, options) -> dict:
    p = ClassParams.from_json(job["params"]) if "params" in job else None
    f = _series(job, p)
    op = _opt(options, "op", "derivative", kind=str,
              check=lambda o: o in ("derivative", "integral", "derivative_higher"))
    if op == "integral":
        delta = _opt(options, "delta", check=lambda d: d > 0, what="(0, inf)")
        image = frac_integral(f, delta)
    else:
        delta = _opt(options, "delta", check=lambda d: 0 <= d < 1, what="[0, 1)")
        if op == "derivative":
            image = frac_derivative(f, delta)
        else:
            upsilon = _opt(options, "upsilon", 0, kind=int, check=lambda u: u >= 0)
            image = frac_derivative_higher(f, delta, upsilon)
    return image.to_json()


def cmd_means(job, options) -> dict:
    p = _params(job)
    f = _series(job, p)
    q = _opt(options, "q", check=lambda v: v > 0, what="(0, inf)")
    r = _opt(options, "r", check=_unit, what="(0, 1)")
    nq = _opt(options, "quadrature_n", 4096, kind=int, check=lambda n: 4 <= n <= 2**22)
    if is_member(p, f) is not Verdict.MEMBER_CERTIFIED:
        raise InvalidJob("integral-means dominance needs a certified member series")
    report = verify_integral_means_dominance(p, f, q, r, nq)
    out: dict = {"report": report.to_json()}
    if q == 2:
        out["l2_exact"] = l2_integral(f, r)
    if not report.holds:
        raise Violation({**out, "violations": ["integral_means_dominance"]})
    return out


def cmd_extremal(job, options) -> dict:
    p = _params(job)
    n = _opt(options, "n", 2, kind=int, check=lambda v: 2 <= v <= 100_000)
    f = extremal_function(p, n)
    return {
        "series": f.to_json(),
        "coefficient_bound": coefficient_bound(p, n),
        "margin": coefficient_margin(p, f),
    }


def cmd_verify(job, options) -> dict:
    """Membership, subordination residual and every bound that applies."""
    p = _params(job)
    f = _series(job, p)
    grid = _grid(options)
    verdict = is_member(p, f)
    margin = coefficient_margin(p, f)
    residual = subordination_residual(p, f, grid)
    violations: list[str] = []
    checks = []
    extra: dict = {}
    if verdict is Verdict.MEMBER_CERTIFIED:
        if residual > 1.0 + 1e-9:
            violations.append("certified_member_residual_exceeds_one")
        if f.sign is Sign.MINUS:
            for r in _opt(options, "radii", [0.25, 0.5, 0.75, 0.9], kind=list):
                if not _unit(r):
                    raise InvalidJob("verification radii must lie in (0, 1)")
                checks += distortion_report(p, f, r)
                checks += derivative_distortion_report(p, f, r)
                checks += frac_distortion_report("frac_integral", p, f, 0.5, r)
                checks += frac_distortion_report("frac_derivative", p, f, 0.5, r)
                if p.mu.denominator == 1:
                    for q in (1.0, 2.0):
                        checks.append(verify_integral_means_dominance(p, f, q, r))
    elif verdict is Verdict.NOT_MEMBER:
        # Necessity only shows up as r -> 1; a clear coefficient excess must
        # push the residual past 1 on a grid reaching 0.9999.
        boundary = VerificationGrid(
            grid.radii + tuple(x for x in (0.999, 0.9999) if x > grid.radii[-1]),
            grid.angular_samples, grid.slit_margin,
        )
        try:
            extra["boundary_residual"] = subordination_residual(p, f, boundary)
        except PoleError:
            extra["boundary_residual"] = None
        clear_excess = margin < -NECESSITY_MARGIN * p.scale
        if clear_excess and extra["boundary_residual"] is not None and extra["boundary_residual"] <= 1.0:
            violations.append("non_member_residual_within_one")
    violations += [c.kind for c in checks if not c.holds]
    out = {
        "verdict": verdict.value,
        "margin": margin,
        "residual": residual,
        "checks": [c.to_json() for c in checks],
        "violations": violations,
        **extra,
    }
    if violations:
        raise Violation(out)
    return out


# ---------------------------------------------------------------------------
# sweep


def _sweep_values(spec: Mapping) -> np.ndarray:
    if not isinstance(spec, Mapping):
        raise InvalidJob("option 'range' must be an object")
    var = spec.get("var")
    if var not in ("psi", "gamma", "delta", "r"):
        raise InvalidJob("range.var must be one of psi, gamma, delta, r")
    start = _opt(spec, "start")
    stop = _opt(spec, "stop")
    steps = _opt(spec, "steps", kind=int)
    if not 1 <= steps <= MAX_SWEEP_STEPS:
        raise InvalidJob(f"range.steps must lie in 1..{MAX_SWEEP_STEPS}")
    return np.linspace(start, stop, steps)


def sweep(job: Mapping) -> tuple[list[str], list[list]]:
    """Rows of inputs, closed-form value, oracle value and margin."""
    options = job.get("options", {})
    p = _params(job)
    target = _opt(options, "target", "radius", kind=str,
                  check=lambda t: t in ("radius", "distortion", "frac_integral", "frac_derivative"))
    if "range" not in options:
        raise InvalidJob("sweep needs options.range")
    var = options["range"].get("var") if isinstance(options["range"], Mapping) else None
    values = _sweep_values(options["range"])
    allowed = {"radius": ("psi", "gamma"), "distortion": ("r", "gamma"),
               "frac_integral": ("r", "delta", "gamma"), "frac_derivative": ("r", "delta", "gamma")}
    if var not in allowed[target]:
        raise InvalidJob(f"target {target!r} cannot sweep {var!r}")

    rows = []
    if target == "radius":
        kind = _kind(options)
        header = [var, "radius", "minimizer_n", "oracle", "margin"]
        for v in values:
            psi = float(v) if var == "psi" else _opt(options, "psi", 0.0, check=_psi_range)
            q = dataclasses.replace(p, gamma=float(v)) if var == "gamma" else p
            if not _psi_range(psi):
                raise InvalidJob("psi out of range [0, 1)")
            res, oracle = _radius_row(q, kind, psi, 512, 1e-6)
            rows.append([float(v), res.radius, res.minimizer_n, oracle, oracle - res.radius])
        return header, rows

    header = [var, "lower", "upper", "oracle", "margin"]
    for v in values:
        r = float(v) if var == "r" else _opt(options, "r", check=_unit, what="(0, 1)")
        q = dataclasses.replace(p, gamma=float(v)) if var == "gamma" else p
        if not _unit(r):
            raise InvalidJob("r out of range (0, 1)")
        f = extremal_function(q, 2)
        if target == "distortion":
            lo, hi = distortion_bounds(q, r)
            image = f
        elif target == "frac_integral":
            delta = float(v) if var == "delta" else _opt(options, "delta", check=lambda d: d > 0)
            if not delta > 0:
                raise InvalidJob("delta must be positive")
            lo, hi = frac_integral_distortion(q, delta, r)
            image = frac_integral(f, delta)
        else:
            delta = float(v) if var == "delta" else _opt(options, "delta", check=lambda d: 0 <= d < 1)
            if not 0 <= delta < 1:
                raise InvalidJob("delta must lie in [0, 1)")
            lo, hi = frac_derivative_distortion(q, delta, r)
            image = frac_derivative(f, delta)
        oracle = abs(complex(evaluate_polar(image, r, 0.0)))
        rows.append([float(v), lo, hi, oracle, oracle - lo])
    return header, rows


def write_sweep_csv(header: Sequence[str], rows: Sequence[Sequence], fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([c if isinstance(c, int) else repr(fmt_float(c)) for c in row])


COMMANDS = {
    "member": cmd_member,
    "radius": cmd_radius,
    "distort": cmd_distort,
    "fracop": cmd_fracop,
    "means": cmd_means,
    "extremal": cmd_extremal,
    "verify": cmd_verify,
}


# ---------------------------------------------------------------------------
# entry points


def _validate(job: Any) -> None:
    try:
        jsonschema.validate(job, schemas.JOB)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(x) for x in exc.absolute_path) or "<root>"
        raise InvalidJob(f"{path}: {exc.message}") from None
    if not isinstance(job.get("options", {}), Mapping):
        raise InvalidJob("options must be an object")


def run(job: Mapping, *, out_path: Optional[str] = None,
        grid_csv: Optional[str] = None) -> tuple[int, str]:
    """Execute one job; returns the exit code and the text for standard output."""
    try:
        _validate(job)
        options = job.get("options", {})
        command = job["command"]
        if command == "sweep":
            header, rows = sweep(job)
            buf = io.StringIO()
            write_sweep_csv(header, rows, buf)
            if out_path:
                with open(out_path, "w", encoding="utf-8", newline="") as fh:
                    fh.write(buf.getvalue())
                return EXIT_OK, dumps({"rows": len(rows), "out": out_path}) + "\n"
            return EXIT_OK, buf.getvalue()
        try:
            result = COMMANDS[command](job, options)
            code = EXIT_OK
        except Violation as exc:
            result, code = exc.payload, EXIT_VIOLATION
        if grid_csv and "series" in job and "params" in job:
            p = _params(job)
            write_grid_csv(grid_csv, grid_records(p, _series(job, p), _kind(options), _grid(options)))
        return code, dumps(result) + "\n"
    except (PoleError, NonMonotonicProfileError, TailCheckError) as exc:
        return EXIT_VIOLATION, dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n"
    except (InvalidJob, DomainError, ValueError, TypeError, KeyError) as exc:
        return EXIT_INVALID, dumps({"error": "invalid_input", "message": str(exc)}) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracanalytic",
        description="Run a JSON job (member, radius, distort, fracop, means, extremal, "
                    "verify, sweep) and print the JSON result.",
        epilog=f"Exit codes: 0 ok, 1 violation found, 2 invalid input. "
               f"Set {THREADS_ENV}=N to evaluate grid rings on N threads.",
    )
    parser.add_argument("--job", metavar="FILE", help="read the job from FILE instead of stdin")
    parser.add_argument("--out", metavar="FILE", help="write sweep CSV to FILE")
    parser.add_argument("--grid-csv", metavar="FILE",
                        help="dump per-gridpoint r, theta, re_functional, abs_w to FILE")
    return parser


def main(argv: Optional[Sequence[str]] = None, stdin=None, stdout=None) -> int:
    args = build_parser().parse_args(argv)
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout
    try:
        if args.job:
            with open(args.job, encoding="utf-8") as fh:
                text = fh.read()
        else:
            text = stdin.read()
        job = json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        stdout.write(dumps({"error": "invalid_input", "message": str(exc)}) + "\n")
        return EXIT_INVALID
    code, text = run(job, out_path=args.out, grid_csv=args.grid_csv)
    stdout.write(text)
    return code


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
