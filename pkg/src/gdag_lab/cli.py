"""Command-line interface.

Exit codes: 0 = computed, 1 = property violated / condition not
established (check-style commands), 2 = usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from .graph import GDag, GraphError, parse_gdag
from .dsep import (
    CIStatement,
    d_separated,
    d_separated_via_partition,
    observable_ci_set,
)
from .models import (
    ConditionalDistribution,
    Distribution,
    ModelError,
    satisfies_I,
)
from .inequalities import (
    instrumental_value,
    triangle_gpt_feasible,
    triangle_monogamy_margin,
)
from .classify import (
    AddEdgeParentSubset,
    AddEdgeUnobservedPath,
    RemoveEdge,
    RemoveIsolatedUnobserved,
    reduce as reduce_gdag,
    sufficient_condition_holds,
)
from .enumeration import classification_census
from .cones import (
    ConeError,
    derive_classical_cone,
    derive_independence_cone,
    implied_by,
)


class CliError(Exception):
    pass


def _read_graph(path: str) -> GDag:
    try:
        with open(path) as f:
            return parse_gdag(f.read())
    except OSError as e:
        raise CliError(f"cannot read {path}: {e.strerror}") from None
    except GraphError as e:
        raise CliError(str(e)) from None


def _read_json(path: str) -> str:
    try:
        with open(path) as f:
            return f.read()
    except OSError as e:
        raise CliError(f"cannot read {path}: {e.strerror}") from None


def _split(arg: str | None) -> frozenset[str]:
    if not arg:
        return frozenset()
    return frozenset(x for x in arg.split(",") if x)


def _step_json(step) -> dict:
    if isinstance(step, RemoveEdge):
        return {"op": "remove-edge", "a": step.a, "b": step.b}
    if isinstance(step, RemoveIsolatedUnobserved):
        return {"op": "remove-isolated-unobserved", "node": step.n}
    if isinstance(step, AddEdgeUnobservedPath):
        return {"op": "add-edge-unobserved-path", "a": step.a, "b": step.b}
    if isinstance(step, AddEdgeParentSubset):
        return {"op": "add-edge-parent-subset", "a": step.a, "b": step.b}
    raise CliError(f"unknown step {step!r}")


def _cmd_dsep(args) -> int:
    g = _read_graph(args.graph)
    x, y, z = _split(args.x), _split(args.y), _split(args.z)
    try:
        st = CIStatement(x, y, z)
        unknown = (x | y | z) - set(g.names)
        if unknown:
            raise ValueError(f"unknown nodes: {sorted(unknown)}")
    except ValueError as e:
        raise CliError(str(e)) from None
    if args.witness:
        w = d_separated_via_partition(g, st.x, st.y, st.z)
        if w is None:
            print("false")
        else:
            print("true")
            print(
                json.dumps(
                    {
                        "u": sorted(w.u),
                        "v": sorted(w.v),
                        "z": sorted(w.z),
                        "w": sorted(w.w),
                    },
                    separators=(", ", ": "),
                )
            )
    else:
        print("true" if d_separated(g, st.x, st.y, st.z) else "false")
    return 0


def _cmd_ci_set(args) -> int:
    g = _read_graph(args.graph)
    print(observable_ci_set(g).to_json())
    return 0


def _parse_dist(text: str):
    obj = json.loads(text)
    if "given" in obj and obj["given"]:
        return ConditionalDistribution.from_json(text)
    return Distribution.from_json(text)


def _cmd_check_dist(args) -> int:
    g = _read_graph(args.graph)
    try:
        dist = _parse_dist(_read_json(args.dist))
    except (json.JSONDecodeError, ModelError) as e:
        raise CliError(f"bad distribution: {e}") from None

    out: dict = {}
    code = 0
    if isinstance(dist, ConditionalDistribution):
        if len(dist.given) == 1:
            v = instrumental_value(dist)
            out["instrumental_value"] = str(v)
            if v > 1:
                code = 1
        else:
            raise CliError("conditional distributions need exactly one given")
    else:
        report = satisfies_I(g, dist)
        out["satisfies_I"] = report.holds
        out["violated"] = [
            {"x": sorted(s.x), "y": sorted(s.y), "z": sorted(s.z)}
            for s in report.violated
        ]
        if not report.holds:
            code = 1
        if len(dist.variables) == 3:
            margin = triangle_monogamy_margin(dist)
            feas = triangle_gpt_feasible(dist)
            out["triangle_monogamy_margin"] = margin
            out["triangle_gpt_feasible"] = feas
            if margin > 1e-9 or not feas:
                code = 1
    print(json.dumps(out, separators=(", ", ": ")))
    return code


def _cmd_ineq(args) -> int:
    try:
        dist = _parse_dist(_read_json(args.dist))
    except (json.JSONDecodeError, ModelError) as e:
        raise CliError(f"bad distribution: {e}") from None
    if args.family == "triangle":
        if not isinstance(dist, Distribution):
            raise CliError("triangle inequalities need a joint distribution")
        margin = triangle_monogamy_margin(dist)
        feas = triangle_gpt_feasible(dist)
        print(
            json.dumps(
                {"monogamy_margin": margin, "gpt_feasible": feas},
                separators=(", ", ": "),
            )
        )
        return 1 if margin > 1e-9 or not feas else 0
    if not isinstance(dist, ConditionalDistribution) or len(dist.given) != 1:
        raise CliError(
            "instrumental inequality needs a conditional distribution "
            "with one given variable"
        )
    v = instrumental_value(dist)
    print(json.dumps({"value": str(v)}, separators=(", ", ": ")))
    return 1 if v > 1 else 0


def _cmd_classify(args) -> int:
    g = _read_graph(args.graph)
    cert = sufficient_condition_holds(g)
    if cert is None:
        print("unknown")
        return 1
    print(
        json.dumps(
            {
                "steps": [_step_json(s) for s in cert.steps],
                "final": json.loads(cert.final.to_json()),
            },
            separators=(", ", ": "),
        )
    )
    return 0


def _cmd_reduce(args) -> int:
    g = _read_graph(args.graph)
    print(reduce_gdag(g).to_json())
    return 0


def _cmd_census(args) -> int:
    if not 1 <= args.n <= 7:
        raise CliError("census supports 1 <= n <= 7")
    if args.n >= 6 and not args.long_run:
        raise CliError(f"census --n {args.n} requires --long-run")
    report = classification_census(args.n, progress=args.progress)
    print(report.csv_row())
    return 0


def _cmd_entropic(args) -> int:
    g = _read_graph(args.graph)
    try:
        ec = derive_classical_cone(
            g, allow_large=args.long_run, progress=args.progress
        )
        ei = derive_independence_cone(g, allow_large=args.long_run)
    except ConeError as e:
        raise CliError(str(e)) from None
    out = {
        "classical": json.loads(ec.to_json()),
        "independence": json.loads(ei.to_json()),
    }
    if args.compare:
        extra = [
            {
                "coeffs": {
                    ",".join(sorted(s)): f"{c.numerator}/{c.denominator}"
                    for s, c in sorted(
                        ineq.coeffs.items(), key=lambda kv: sorted(kv[0])
                    )
                }
            }
            for ineq in ec.ineqs()
            if not implied_by(ineq, ei)
        ]
        out["not_implied_by_independence"] = extra
    print(json.dumps(out, separators=(", ", ": ")))
    return 0


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gdag-lab")
    p.add_argument(
        "--deterministic",
        action="store_true",
        help="single-threaded byte-reproducible output",
    )
    p.add_argument(
        "--jobs",
        type=int,
        default=int(os.environ.get("GDAG_LAB_JOBS", "1")),
        help="worker pool size hint (computation is sequential)",
    )
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("dsep", help="d-separation query")
    sp.add_argument("graph")
    sp.add_argument("--x", required=True)
    sp.add_argument("--y", required=True)
    sp.add_argument("--z", default="")
    sp.add_argument("--witness", action="store_true")
    sp.set_defaults(func=_cmd_dsep)

    sp = sub.add_parser("ci-set", help="all observable CI statements")
    sp.add_argument("graph")
    sp.set_defaults(func=_cmd_ci_set)

    sp = sub.add_parser("check-dist", help="check a distribution against I")
    sp.add_argument("graph")
    sp.add_argument("dist")
    sp.set_defaults(func=_cmd_check_dist)

    sp = sub.add_parser("ineq", help="theory-independent inequalities")
    sp.add_argument("family", choices=["triangle", "instrumental"])
    sp.add_argument("dist")
    sp.set_defaults(func=_cmd_ineq)

    sp = sub.add_parser("classify", help="search for a C = I certificate")
    sp.add_argument("graph")
    sp.set_defaults(func=_cmd_classify)

    sp = sub.add_parser("reduce", help="apply reduction rules to a fixpoint")
    sp.add_argument("graph")
    sp.set_defaults(func=_cmd_reduce)

    sp = sub.add_parser("census", help="classification census CSV row")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--long-run", action="store_true")
    sp.add_argument("--progress", action="store_true")
    sp.set_defaults(func=_cmd_census)

    sp = sub.add_parser("entropic", help="derive E_C and E_I")
    sp.add_argument("graph")
    sp.add_argument("--compare", action="store_true")
    sp.add_argument("--long-run", action="store_true")
    sp.add_argument("--progress", action="store_true")
    sp.set_defaults(func=_cmd_entropic)

    return p


def run(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0
    try:
        return args.func(args)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())
