"""Command-line front end: validate, analyze, generate, couple.

Reports are JSON by default (``--format text`` renders the same content
as indented key/value lines).  Exit codes partition outcomes:

* 0 -- success; for ``analyze``, non-contextual or not applicable
* 1 -- contextual (``analyze``) or infeasible (``couple``)
* 2 -- invalid system
* 3 -- usage, parse, or I/O error
* 4 -- resource guard refusal

Witness and certificate artifacts are written to the ``--witness`` path
(``-`` embeds them in the report on stdout) rather than cluttering the
report.  A path of ``-`` for input reads the system from stdin, so
``generate`` output can be piped straight into ``analyze``.
"""

import argparse
import hashlib
import json
import sys
from fractions import Fraction
from typing import Any, Mapping

from . import __version__
from .bell import ShapeError, chsh, correlation_table
from .coupling import (
    DEFAULT_VAR_CAP,
    ConnectionArityError,
    GuardExceededError,
    any_coupling,
    constrained_coupling_feasible,
    identity_coupling_feasible,
    max_connection_equality,
    max_total_connection_equality,
)
from .generators import (
    cyclic_design,
    deterministic_system,
    pr_box,
    random_consistent_system,
    singlet_system,
    two_by_two_design,
    two_context_design,
)
from .rationals import decimal_str, format_rational, parse_rational
from .system import InvalidSystemError, System, loads_system

EXIT_OK = 0
EXIT_CONTEXTUAL = 1
EXIT_INFEASIBLE = 1
EXIT_INVALID = 2
EXIT_USAGE = 3
EXIT_GUARD = 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse calls sys.exit(2) on bad flags; route that to exit 3."""

    def error(self, message: str):
        raise UsageError(message)


def _read_input(path: str) -> tuple[str, str]:
    if path == "-":
        text = sys.stdin.read()
        name = "<stdin>"
    else:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
        name = path
    return name, text


def _digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _load(path: str) -> tuple[System, dict[str, Any]]:
    name, text = _read_input(path)
    system = loads_system(text)
    return system, {"path": name, "sha256": _digest(text)}


def _render_text(value: Any, indent: int = 0) -> list[str]:
    pad = "  " * indent
    lines: list[str] = []
    if isinstance(value, Mapping):
        for key, inner in value.items():
            if isinstance(inner, (Mapping, list)) and inner:
                lines.append(f"{pad}{key}:")
                lines.extend(_render_text(inner, indent + 1))
            else:
                lines.append(f"{pad}{key}: {_scalar(inner)}")
    elif isinstance(value, list):
        for inner in value:
            if isinstance(inner, (Mapping, list)):
                lines.append(f"{pad}-")
                lines.extend(_render_text(inner, indent + 1))
            else:
                lines.append(f"{pad}- {_scalar(inner)}")
    else:
        lines.append(f"{pad}{_scalar(value)}")
    return lines


def _scalar(value: Any) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (Mapping, list)):
        return "{}" if isinstance(value, Mapping) else "[]"
    return str(value)


def _emit(report: Mapping[str, Any], fmt: str) -> None:
    if fmt == "text":
        print("\n".join(_render_text(report)))
    else:
        print(json.dumps(report, indent=2))


def _witness_artifact(result) -> dict[str, Any]:
    if result.feasible:
        return result.witness.to_json_dict()
    if result.certificate is not None:
        return {"dual": [format_rational(u) for u in result.certificate]}
    return {"note": result.detail or "infeasible"}


def _write_artifact(artifact: Mapping[str, Any], path: str | None, report: dict) -> None:
    if path is None:
        return
    if path == "-":
        report["artifact"] = dict(artifact)
        return
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(artifact, handle, indent=2)
        handle.write("\n")
    report["artifact_path"] = path


def _system_digest(system: System) -> dict[str, Any]:
    return {
        "contents": {c: list(a) for c, a in system.contents.items()},
        "contexts": list(system.contexts),
        "variables": len(system.variables()),
        "assignments": system.assignment_count(),
    }


def _consistency_section(system: System) -> dict[str, Any]:
    report = system.consistency_report()
    return {
        "consistent": report.consistent,
        "failures": [
            {
                "content": f.content,
                "marginals": {
                    ctx: {label: format_rational(p) for label, p in marg}
                    for ctx, marg in f.marginals
                },
            }
            for f in report.failures
        ],
    }


def cmd_validate(args: argparse.Namespace) -> int:
    try:
        system, source = _load(args.path)
    except InvalidSystemError as exc:
        _emit(
            {
                "valid": False,
                "violations": [
                    {"location": v.location, "message": v.message}
                    for v in exc.violations
                ],
            },
            args.format,
        )
        return EXIT_INVALID
    _emit(
        {
            "valid": True,
            "tool": {"name": "contextuality", "version": __version__},
            "input": source,
            "system": _system_digest(system),
        },
        args.format,
    )
    return EXIT_OK


def cmd_analyze(args: argparse.Namespace) -> int:
    try:
        system, source = _load(args.path)
    except InvalidSystemError as exc:
        _emit(
            {
                "valid": False,
                "violations": [
                    {"location": v.location, "message": v.message}
                    for v in exc.violations
                ],
            },
            args.format,
        )
        return EXIT_INVALID

    report: dict[str, Any] = {
        "tool": {"name": "contextuality", "version": __version__},
        "input": source,
        "system": _system_digest(system),
    }
    consistency = _consistency_section(system)
    report["consistency"] = consistency

    try:
        table = correlation_table(system)
        chsh_report = chsh(table)
        section = chsh_report.to_json_dict()
        section["applicable"] = True
        if not consistency["consistent"]:
            section["advisory"] = (
                "system is not consistently connected; CHSH bounds assume "
                "equal marginals within every connection"
            )
        report["chsh"] = section
    except ShapeError as exc:
        report["chsh"] = {"applicable": False, "reason": str(exc)}

    connections = system.connections()
    connection_sections = []
    all_pairwise = True
    for conn in connections:
        entry: dict[str, Any] = {
            "content": conn.content,
            "contexts": list(conn.contexts),
        }
        if conn.arity() == 2:
            entry["max_equality"] = format_rational(
                max_connection_equality(system, conn)
            )
        else:
            all_pairwise = False
            entry["max_equality"] = None
            entry["note"] = "connection spans more than 2 contexts; unsupported"
        connection_sections.append(entry)
    report["connections"] = connection_sections

    contextual: bool | None = None
    if args.skip_lp:
        report["identity_coupling"] = {"skipped": True}
        report["total_equality"] = {"skipped": True}
    else:
        try:
            identity = identity_coupling_feasible(system, args.lp_var_cap)
        except GuardExceededError as exc:
            _emit({"error": str(exc), "count": exc.count}, args.format)
            return EXIT_GUARD
        identity_section: dict[str, Any] = {"status": identity.status}
        if identity.detail:
            identity_section["note"] = identity.detail
        _write_artifact(_witness_artifact(identity), args.witness, identity_section)
        report["identity_coupling"] = identity_section

        if connections and all_pairwise:
            try:
                total = max_total_connection_equality(system, args.lp_var_cap)
            except GuardExceededError as exc:
                _emit({"error": str(exc), "count": exc.count}, args.format)
                return EXIT_GUARD
            individual = sum(
                (max_connection_equality(system, c) for c in connections),
                Fraction(0),
            )
            contextual = total.optimum < individual
            report["total_equality"] = {
                "optimum": format_rational(total.optimum),
                "optimum_decimal": decimal_str(total.optimum),
                "individual_sum": format_rational(individual),
                "individual_sum_decimal": decimal_str(individual),
            }
        elif not connections:
            contextual = False
            report["total_equality"] = {
                "optimum": "0",
                "individual_sum": "0",
                "note": "no connections: nothing to couple across contexts",
            }
        else:
            report["total_equality"] = {
                "skipped": True,
                "note": "connections of arity > 2 are unsupported",
            }
    report["contextual"] = contextual
    _emit(report, args.format)
    if contextual:
        return EXIT_CONTEXTUAL
    return EXIT_OK


def _parse_angles(token: str):
    try:
        alice_part, bob_part = token.split(";")
        alice = tuple(s.strip() for s in alice_part.split(","))
        bob = tuple(s.strip() for s in bob_part.split(","))
        if len(alice) != 2 or len(bob) != 2:
            raise ValueError
    except ValueError:
        raise UsageError(
            "--angles must look like 'a1,a2;b1,b2' (four angle tokens)"
        ) from None
    return alice, bob


def _parse_assignment(token: str) -> dict[str, str]:
    assignment = {}
    for part in token.split(","):
        if "=" not in part:
            raise UsageError(f"bad assignment entry {part!r}; use CONTENT=OUTCOME")
        content, outcome = part.split("=", 1)
        assignment[content.strip()] = outcome.strip()
    return assignment


def _design_for_shape(shape: str):
    if shape == "2x2":
        return two_by_two_design()
    if shape == "two-context":
        return two_context_design()
    if shape.startswith("cyclic"):
        try:
            n = int(shape[len("cyclic"):])
        except ValueError:
            raise UsageError(f"bad cyclic shape {shape!r}; use e.g. cyclic3") from None
        if n < 2:
            raise UsageError("cyclic shapes need at least 2 contents")
        return cyclic_design(n)
    raise UsageError(f"unknown shape {shape!r}; use 2x2, cyclicN, or two-context")


def cmd_generate(args: argparse.Namespace) -> int:
    try:
        if args.kind == "singlet":
            alice, bob = _parse_angles(args.angles)
            system = singlet_system(
                alice, bob, visibility=args.visibility, precision=args.precision
            )
        elif args.kind == "prbox":
            system = pr_box()
        elif args.kind == "deterministic":
            design = two_by_two_design()
            system = deterministic_system(_parse_assignment(args.assignment), design)
        else:
            design = _design_for_shape(args.shape)
            system = random_consistent_system(
                args.seed, design, denominator=args.denominator
            )
    except (ValueError, UsageError) as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return EXIT_USAGE
    payload = system.to_json() + "\n"
    if args.out == "-":
        sys.stdout.write(payload)
    else:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(payload)
    return EXIT_OK


def _parse_demand(system: System, token: str):
    try:
        head, bound_text = token.split(">=")
        content, contexts_text = head.split("@")
        wanted = {c.strip() for c in contexts_text.split("~")}
        content = content.strip()
        if not content or len(wanted) != 2:
            raise ValueError
    except ValueError:
        raise UsageError(
            f"bad demand {token!r}; use CONTENT@CTX1~CTX2>=BOUND"
        ) from None
    try:
        bound = parse_rational(bound_text.strip())
    except ValueError as exc:
        raise UsageError(f"bad demand bound in {token!r}: {exc}") from None
    try:
        connection = system.connection(content)
    except KeyError as exc:
        raise UsageError(str(exc)) from None
    if connection.arity() != 2:
        raise UsageError(
            f"connection {content!r} spans {connection.arity()} contexts; "
            "demands support exactly 2"
        )
    if set(connection.contexts) != wanted:
        raise UsageError(
            f"connection {content!r} lives in contexts "
            f"{sorted(connection.contexts)}, not {sorted(wanted)}"
        )
    if not 0 <= bound <= 1:
        raise UsageError(f"demand bound must lie in [0, 1], got {bound_text.strip()!r}")
    return connection, bound


def cmd_couple(args: argparse.Namespace) -> int:
    try:
        system, source = _load(args.path)
    except InvalidSystemError as exc:
        _emit(
            {
                "valid": False,
                "violations": [
                    {"location": v.location, "message": v.message}
                    for v in exc.violations
                ],
            },
            args.format,
        )
        return EXIT_INVALID

    report: dict[str, Any] = {
        "tool": {"name": "contextuality", "version": __version__},
        "input": source,
    }
    try:
        if args.identity:
            report["query"] = "identity"
            result = identity_coupling_feasible(system, args.lp_var_cap)
        elif args.product:
            report["query"] = "product"
            result = any_coupling(system, args.lp_var_cap)
        elif args.maximize:
            report["query"] = "maximize"
            total = max_total_connection_equality(system, args.lp_var_cap)
            report["optimum"] = format_rational(total.optimum)
            report["optimum_decimal"] = decimal_str(total.optimum)
            report["status"] = "feasible"
            _write_artifact(total.witness.to_json_dict(), args.witness, report)
            _emit(report, args.format)
            return EXIT_OK
        else:
            report["query"] = "demands"
            demands = [
                _parse_demand(system, token)
                for spec in args.demands
                for token in spec.split(";")
                if token.strip()
            ]
            report["demands"] = [
                {
                    "content": c.content,
                    "contexts": list(c.contexts),
                    "bound": format_rational(b),
                }
                for c, b in demands
            ]
            result = constrained_coupling_feasible(system, demands, args.lp_var_cap)
    except GuardExceededError as exc:
        _emit({"error": str(exc), "count": exc.count}, args.format)
        return EXIT_GUARD
    except ConnectionArityError as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return EXIT_USAGE

    report["status"] = result.status
    if result.detail:
        report["note"] = result.detail
    _write_artifact(_witness_artifact(result), args.witness, report)
    _emit(report, args.format)
    return EXIT_OK if result.feasible else EXIT_INFEASIBLE


def build_parser() -> _Parser:
    parser = _Parser(
        prog="contextuality",
        description=(
            "Validate, analyze, generate, and couple systems of random "
            "variables indexed by (content, context)."
        ),
    )
    parser.add_argument(
        "--version", action="version", version=f"contextuality {__version__}"
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--format", choices=("json", "text"), default="json", help="report format"
    )
    common.add_argument(
        "--lp-var-cap",
        type=int,
        default=DEFAULT_VAR_CAP,
        metavar="N",
        help="refuse linear programs with more than N variables",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check a system file")
    p.add_argument("path", help="system JSON file, or - for stdin")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser(
        "analyze", parents=[common], help="full report: consistency, CHSH, couplings"
    )
    p.add_argument("path", help="system JSON file, or - for stdin")
    p.add_argument("--skip-lp", action="store_true", help="skip coupling programs")
    p.add_argument(
        "--witness",
        metavar="PATH",
        help="write the identity witness/certificate JSON here (- embeds it)",
    )
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("generate", parents=[common], help="emit a canonical system")
    p.add_argument(
        "kind", choices=("singlet", "prbox", "deterministic", "random")
    )
    p.add_argument("--out", default="-", metavar="PATH", help="output file (- stdout)")
    p.add_argument(
        "--angles",
        default="0,1/2 pi;1/4 pi,3/4 pi",
        help="singlet angles 'a1,a2;b1,b2' (rational multiples of pi or radians)",
    )
    p.add_argument("--visibility", default="1", help="singlet visibility in [0,1]")
    p.add_argument(
        "--precision",
        type=int,
        default=10**6,
        help="denominator bound for rounded cosines",
    )
    p.add_argument(
        "--assignment",
        default="A1=+1,A2=+1,B1=+1,B2=+1",
        help="deterministic outcomes, e.g. 'A1=+1,A2=-1,B1=+1,B2=-1'",
    )
    p.add_argument("--seed", type=int, default=0, help="random system seed")
    p.add_argument(
        "--shape", default="2x2", help="random design: 2x2, cyclicN, two-context"
    )
    p.add_argument(
        "--denominator",
        type=int,
        default=24,
        help="probability grain for random systems",
    )
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("couple", parents=[common], help="coupling queries")
    p.add_argument("path", help="system JSON file, or - for stdin")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--identity", action="store_true", help="identity coupling")
    mode.add_argument("--product", action="store_true", help="product coupling")
    mode.add_argument(
        "--maximize",
        action="store_true",
        help="maximize summed connection equality probabilities",
    )
    mode.add_argument(
        "--demands",
        action="append",
        metavar="SPEC",
        help="lower bounds like 'A1@A1|B1~A1|B2>=3/4'; repeat or join with ;",
    )
    p.add_argument(
        "--witness",
        metavar="PATH",
        help="write witness/certificate JSON here (- embeds it)",
    )
    p.set_defaults(func=cmd_couple)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return EXIT_USAGE
    except (OSError, json.JSONDecodeError) as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return EXIT_USAGE


def entry_point() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
