"""Command-line front end.

Exit codes: 0 success, 1 a pipeline stage failed, 2 bad input (parse or
usage), 3 singular metric, pole or excluded base point, 4 metric not
conformally flat, 5 quadric check FAIL.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import tempfile
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import k3
from .errors import (DimensionError, NotIntegrableError, ParseError, PoleError,
                     SingularMetricError)
from .holonomic import generate_pf_system, parse_system, reduce_system, serialize_system
from .metricfile import format_metric, load_metric
from .series import verify_quadric_condition
from .tensors import TENSORS, Metric, flatness_verdict

EXIT_OK, EXIT_STAGE, EXIT_INPUT, EXIT_SINGULAR, EXIT_NOT_FLAT, EXIT_QUADRIC = 0, 1, 2, 3, 4, 5

BUILTIN_METRICS = {
    "msy": k3.msy_metric,
    "kummer-gprime": k3.reference_kummer_metric,
}

DEFAULT_BASE_POINT = "2,3,5"


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def resolve_metric(source: str) -> Metric:
    if source in BUILTIN_METRICS:
        return BUILTIN_METRICS[source]()
    path = Path(source)
    if not path.exists():
        raise CliError(f"unknown metric {source!r}: not a built-in name ({', '.join(BUILTIN_METRICS)}) or a file", EXIT_INPUT)
    return load_metric(path)


def parse_point(text: str, variables) -> dict[str, Fraction]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != len(variables):
        raise CliError(f"base point needs {len(variables)} coordinates, got {len(parts)}", EXIT_INPUT)
    try:
        return {v: Fraction(p) for v, p in zip(variables, parts)}
    except (ValueError, ZeroDivisionError) as exc:
        raise CliError(f"bad rational in base point {text!r}: {exc}", EXIT_INPUT) from None


def write_output(text: str, out: str | None) -> None:
    """Write to --out atomically (temp file + rename), else stdout."""
    if out is None:
        sys.stdout.write(text)
        return
    target = Path(out)
    fd, tmp = tempfile.mkstemp(dir=target.parent or ".", prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def _dump(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


# --- commands -----------------------------------------------------------------------


def cmd_curvature(args) -> int:
    g = resolve_metric(args.metric)
    t = TENSORS[args.tensor](g)
    if args.format == "json":
        write_output(t.to_json(indent=2) + "\n", args.out)
        return EXIT_OK
    lines = [f"{args.tensor} of {args.metric} ({t.variance}, variables {' '.join(t.variables)})"]
    nz = list(t.nonzero())
    if not nz:
        lines.append("all components vanish")
    lines.extend(f"  {list(idx)}: {val}" for idx, val in nz)
    write_output("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_flatcheck(args) -> int:
    g = resolve_metric(args.metric)
    v = flatness_verdict(g)
    if args.format == "json":
        doc = {"metric": args.metric, "tensor": v.tensor, "flat": v.flat}
        if not v.flat:
            doc["witness"] = {"index": list(v.witness_index), "value": str(v.witness_value)}
        write_output(_dump(doc), args.out)
    else:
        write_output(v.describe() + "\n", args.out)
    return EXIT_OK if v.flat else EXIT_NOT_FLAT


def cmd_pf_derive(args) -> int:
    g = resolve_metric(args.metric)
    system = reduce_system(generate_pf_system(g))
    if args.format == "json":
        write_output(serialize_system(system), args.out)
        return EXIT_OK
    lines = [f"reduced system for {args.metric}: {len(system.operators)} operators, declared rank {system.declared_rank}"]
    v = system.variables
    for k, op in enumerate(system.operators):
        lines.append(f"operator {k} {op.pairs}:")
        for a in range(op.n):
            for b in range(a, op.n):
                c = op.second_order[a][b]
                if not c.is_zero():
                    lines.append(f"  w_{v[a]}{v[b]}: {c if a == b else c * 2}")
        for p in range(op.n):
            if not op.first_order[p].is_zero():
                lines.append(f"  w_{v[p]}: {op.first_order[p]}")
        if not op.zeroth_order.is_zero():
            lines.append(f"  w: {op.zeroth_order}")
    write_output("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_quadric_check(args) -> int:
    if args.system:
        try:
            system = parse_system(Path(args.system).read_text())
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise CliError(f"malformed system file: {exc}", EXIT_INPUT) from None
    elif args.metric:
        system = reduce_system(generate_pf_system(resolve_metric(args.metric)))
    else:
        raise CliError("quadric-check needs a system file or --metric", EXIT_INPUT)
    point = parse_point(args.base_point, system.variables)
    report = verify_quadric_condition(system, point, args.order)
    text = _dump(report.to_dict()) if args.format == "json" else report.to_text() + "\n"
    write_output(text, args.out)
    return EXIT_OK if report.passed else EXIT_QUADRIC


# --- pipeline -----------------------------------------------------------------------


@dataclass
class Stage:
    name: str
    status: str
    digest: str
    seconds: float
    detail: str = ""


@dataclass
class PipelineReport:
    stages: list[Stage] = field(default_factory=list)

    @property
    def overall(self) -> str:
        return "PASS" if self.stages and all(s.status == "PASS" for s in self.stages) else "FAIL"

    def to_dict(self, timings: bool = True) -> dict:
        doc = {
            "stages": [{"name": s.name, "status": s.status, "digest": s.digest, "detail": s.detail} for s in self.stages],
            "overall": self.overall,
        }
        if timings:
            doc["timings"] = {s.name: round(s.seconds, 3) for s in self.stages}
        return doc

    def to_text(self, timings: bool = True) -> str:
        lines = []
        for k, s in enumerate(self.stages, 1):
            t = f" [{s.seconds:.2f}s]" if timings else ""
            lines.append(f"{k}. {s.name}: {s.status}{t} sha256:{s.digest[:16]}")
            if s.detail:
                lines.append(f"   {s.detail}")
        lines.append(f"overall: {self.overall}")
        return "\n".join(lines)


def _digest(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def _tensor_artifact(t) -> str:
    return t.to_json(sort_keys=True)


def run_kummer_pipeline(point: dict[str, Fraction], order: int = 6) -> PipelineReport:
    """Nine stages from G to the series certificate; stops at the first failure."""
    report = PipelineReport()
    state: dict = {}

    def stage(name, fn):
        t0 = time.perf_counter()
        ok, artifact, detail = fn()
        report.stages.append(Stage(name, "PASS" if ok else "FAIL", _digest(artifact), time.perf_counter() - t0, detail))
        return ok

    def build_g():
        state["G"] = k3.msy_metric()
        return True, format_metric(state["G"]), "4x4 metric in x1..x4"

    def weyl_g():
        v = flatness_verdict(state["G"])
        return v.flat, v.describe(), v.describe()

    def pullback():
        g = k3.kummer_pullback()
        state["pulled"] = g
        nondeg = not g.determinant().is_zero()
        return nondeg, format_metric(g), "nondegenerate" if nondeg else "degenerate pullback"

    def rescale():
        state["rescaled"] = k3.conformal_rescale(state["pulled"], k3.kummer_scale())
        return True, format_metric(state["rescaled"]), f"factor 1/({k3.KUMMER_SCALE_INVERSE})"

    def compare():
        ref = k3.reference_kummer_metric()
        state["gprime"] = ref
        if state["rescaled"] == ref:
            return True, format_metric(ref), "identical to the tabulated g'"
        lam = k3.conformally_equivalent(state["rescaled"], ref)
        if lam is None:
            return False, "none", "not conformally equivalent to the tabulated g'"
        return True, str(lam), f"same conformal class as g'; residual factor {lam}"

    def cotton_gprime():
        v = flatness_verdict(state["gprime"])
        return v.flat, v.describe(), v.describe()

    def generate():
        state["system"] = generate_pf_system(state["gprime"])
        return True, serialize_system(state["system"]), f"{len(state['system'].operators)} operators"

    def reduce():
        state["reduced"] = reduce_system(state["system"])
        n = len(state["reduced"].operators)
        return n == 5, serialize_system(state["reduced"]), f"{n} operators"

    def series():
        rep = verify_quadric_condition(state["reduced"], point, order)
        return rep.passed, _dump(rep.to_dict()), (
            f"rank {rep.rank} (D-1: {rep.rank_prev}), quadric_dim {rep.quadric_dim}, det B {rep.det}")

    steps = [
        ("build G", build_g),
        ("W(G) = 0", weyl_g),
        ("pull back along Psi o iota", pullback),
        ("rescale", rescale),
        ("compare to g'", compare),
        ("C(g') = 0", cotton_gprime),
        ("generate system", generate),
        ("reduce", reduce),
        (f"series verification D={order}", series),
    ]
    for name, fn in steps:
        if not stage(name, fn):
            break
    return report


def cmd_pipeline(args) -> int:
    point = parse_point(args.base_point, k3.ABC)
    k3.KUMMER_DOMAIN.check(point)
    report = run_kummer_pipeline(point, args.order)
    timings = not args.no_timings
    if args.format == "json":
        text = _dump(report.to_dict(timings))
    else:
        text = report.to_text(timings) + "\n"
    write_output(text, args.out)
    return EXIT_OK if report.overall == "PASS" else EXIT_STAGE


# --- entry point --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hcs-forge", description="Exact curvature, flatness and holonomic-system checks.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--out", metavar="PATH", help="write output here (atomically) instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("curvature", parents=[common], help="print one curvature tensor")
    p.add_argument("--metric", required=True, help="built-in name or metric file")
    p.add_argument("--tensor", required=True, choices=sorted(TENSORS))
    p.set_defaults(func=cmd_curvature)

    p = sub.add_parser("flatcheck", parents=[common], help="local conformal flatness verdict")
    p.add_argument("--metric", required=True)
    p.set_defaults(func=cmd_flatcheck)

    p = sub.add_parser("pf-derive", parents=[common], help="reduced holonomic system of an integrable metric")
    p.add_argument("--metric", required=True)
    p.set_defaults(func=cmd_pf_derive)

    p = sub.add_parser("quadric-check", parents=[common], help="rank and quadric certificate at a base point")
    p.add_argument("system", nargs="?", help="system JSON as written by pf-derive --format json")
    p.add_argument("--metric", help="derive the system from this metric instead of reading a file")
    p.add_argument("--base-point", required=True, metavar="R1,R2,...")
    p.add_argument("--order", type=int, default=6)
    p.set_defaults(func=cmd_quadric_check)

    p = sub.add_parser("pipeline", parents=[common], help="end-to-end Kummer sublocus run")
    p.add_argument("which", choices=("kummer",))
    p.add_argument("--base-point", default=DEFAULT_BASE_POINT, metavar="A,B,C")
    p.add_argument("--order", type=int, default=6)
    p.add_argument("--no-timings", action="store_true", help="omit wall-clock timings (byte-stable output)")
    p.set_defaults(func=cmd_pipeline)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "order", 6) < 1:
        print("error: --order must be positive", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except NotIntegrableError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_FLAT
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (SingularMetricError, PoleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    except (DimensionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
