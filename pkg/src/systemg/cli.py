"""Command-line front end.

Exit codes: 0 success or confirmation, 1 counterexample or shape failure,
2 usage or parse error, 3 node limit exceeded.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from .normalize import DEFAULT_NODE_LIMIT, NodeLimitExceeded, normalize
from .semantics import Model, is_globally_true, truth_set
from .syntax import ParseError, ShapeFailure, modal_depth, parse, render, udnf_shape
from .testkit import Confirmation, check_equivalence, enumerate_models, schema_suite

EXIT_OK, EXIT_FOUND, EXIT_USAGE, EXIT_LIMIT = 0, 1, 2, 3


class _UsageError(Exception):
    pass


def _formula(args, attr: str = "formula"):
    text = getattr(args, attr)
    if getattr(args, "file", None):
        if text is not None:
            raise _UsageError("give either a formula or --file, not both")
        with open(args.file) as fh:
            text = fh.read()
    if text is None:
        raise _UsageError("missing formula")
    return parse(text)


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2))


def cmd_parse(args) -> int:
    f = _formula(args)
    shape = udnf_shape(f) if args.udnf else None
    if args.json:
        out = {"formula": render(f), "resugared": render(f, resugar=True),
               "modal_depth": modal_depth(f)}
        if args.udnf:
            out["udnf"] = str(shape) if not isinstance(shape, ShapeFailure) else None
            out["udnf_failure"] = str(shape) if isinstance(shape, ShapeFailure) else None
        _emit(out)
    else:
        print(render(f))
        if args.udnf:
            print(f"not in UDNF: {shape}" if isinstance(shape, ShapeFailure) else "in UDNF")
    return EXIT_FOUND if isinstance(shape, ShapeFailure) else EXIT_OK


def cmd_depth(args) -> int:
    f = _formula(args)
    d = modal_depth(f)
    if args.json:
        _emit({"formula": render(f, resugar=True), "modal_depth": d})
    else:
        print(d)
    return EXIT_OK


def cmd_normalize(args) -> int:
    f = _formula(args)
    try:
        u, trace = normalize(f, node_limit=args.node_limit, simplify=not args.no_simplify)
    except NodeLimitExceeded as exc:
        for line in exc.trace.lines():
            print(line, file=sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    text = str(u)
    if args.json:
        _emit({"input": render(f, resugar=True), "udnf": text,
               "disjuncts": len(u.disjuncts),
               "trace": trace.lines() if args.trace else None})
        return EXIT_OK
    if args.trace:
        for line in trace.lines():
            print(line)
    print(text)
    return EXIT_OK


def cmd_eval(args) -> int:
    f = _formula(args)
    try:
        with open(args.model) as fh:
            model = Model.from_json(fh.read())
        ts = truth_set(model, f)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        # InvalidModelError and JSON errors are ValueErrors
        raise _UsageError(f"bad model file {args.model}: {exc}") from exc
    ordered = [w for w in model.worlds if w in ts]
    if args.world is not None:
        if args.world not in model.world_set:
            raise _UsageError(f"unknown world {args.world!r}")
        value = args.world in ts
        if args.json:
            _emit({"world": args.world, "value": value})
        else:
            print("true" if value else "false")
        return EXIT_OK
    status = is_globally_true(model, f)
    if args.json:
        _emit({"status": status.value, "truth_set": ordered})
    elif status.value == "mixed":
        print(f"mixed: {', '.join(ordered)}")
    else:
        print(status.value)
    return EXIT_OK


def cmd_equiv(args) -> int:
    f, g = parse(args.left), parse(args.right)
    _check_worlds(args.max_worlds)
    result = check_equivalence(f, g, args.max_worlds)
    if isinstance(result, Confirmation):
        if args.json:
            _emit({"equivalent_up_to_bound": True, "max_worlds": result.max_worlds,
                   "models_checked": result.models_checked})
        else:
            print(result.label)
        return EXIT_OK
    if args.json:
        _emit({"equivalent_up_to_bound": False, "counterexample": result.to_dict()})
    else:
        print(f"counterexample at world {result.world}: left is {result.left_value}, "
              f"right is {result.right_value}")
        print(result.model.to_json())
    return EXIT_FOUND


def cmd_schemas(args) -> int:
    _check_worlds(args.max_worlds)
    report = schema_suite(args.max_worlds, args.depth)
    if args.json:
        print(report.to_json())
    else:
        by_schema: dict[str, list] = {}
        for r in report.results:
            by_schema.setdefault(r.schema, []).append(r)
        for name, results in by_schema.items():
            bad = [r for r in results if not r.ok]
            models = sum(r.models_checked for r in results)
            verdict = "ok" if not bad else f"FAILED ({len(bad)} instance(s))"
            print(f"{name:18s} {len(results):5d} instance(s) {models:9d} models  {verdict}")
            for r in bad:
                c = r.counterexamples[0]
                print(f"    {render(r.instance, resugar=True)} false at {c.world} in {c.model.to_json()}")
        print(f"no counterexample up to {args.max_worlds} world(s)" if report.ok
              else f"{len(report.failures())} failing instance(s)")
    return EXIT_OK if report.ok else EXIT_FOUND


def cmd_models(args) -> int:
    _check_worlds(args.worlds)
    atoms = [a for a in (args.atoms or "").split(",") if a]
    for a in atoms:
        parse(a)  # validates the identifier
    for m in enumerate_models(args.worlds, atoms):
        print(m.to_json())
    return EXIT_OK


def _check_worlds(n: int) -> None:
    if not 1 <= n <= 5:
        raise _UsageError(f"number of worlds must be between 1 and 5, got {n}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="systemg", description="Dyadic deontic logic G: parse, evaluate, normalise.")
    sub = parser.add_subparsers(dest="command", required=True)

    def formula_cmd(name, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("formula", nargs="?")
        p.add_argument("--file", help="read the formula from a file")
        p.add_argument("--json", action="store_true")
        return p

    p = formula_cmd("parse", "print the core (desugared) form")
    p.add_argument("--udnf", action="store_true", help="also check the UDNF shape")
    p.set_defaults(func=cmd_parse)

    p = formula_cmd("depth", "print the modal depth")
    p.set_defaults(func=cmd_depth)

    p = formula_cmd("normalize", "compute an equivalent UDNF formula")
    p.add_argument("--trace", action="store_true", help="print the rewrite steps")
    p.add_argument("--no-simplify", action="store_true")
    p.add_argument("--node-limit", type=int, default=DEFAULT_NODE_LIMIT)
    p.set_defaults(func=cmd_normalize)

    p = formula_cmd("eval", "evaluate in a JSON model file")
    p.add_argument("--model", required=True)
    p.add_argument("--world")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("equiv", help="bounded search for a distinguishing model")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--max-worlds", type=int, default=3)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_equiv)

    p = sub.add_parser("schemas", help="check axiom and derived schemas on small models")
    p.add_argument("--max-worlds", type=int, default=3)
    p.add_argument("--depth", choices=("atomic", "propositional"), default="atomic")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_schemas)

    p = sub.add_parser("models", help="print every model of a given size, one JSON per line")
    p.add_argument("--worlds", type=int, required=True)
    p.add_argument("--atoms", default="")
    p.set_defaults(func=cmd_models)
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (_UsageError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
