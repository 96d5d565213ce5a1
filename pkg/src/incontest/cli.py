"""Command-line front end.

Exit codes: 0 pass, 1 property failure, 2 input error, 3 mechanism-spec
error, 4 enumeration budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from typing import Optional, Sequence

from . import corpus, mechanisms, oracle
from .errors import (
    BudgetExceeded,
    InstanceTooLarge,
    ListCapExceeded,
    MechanismSpecError,
    UnknownId,
    ValidationError,
)
from .model import (
    InterimInfo,
    MechanismSpec,
    assignment_from_json,
    dump_json,
    id_key,
    load_problem,
    problem_to_json,
)
from .priority_sets import incontestability_verdict, smallest_top_priority_set

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_SPEC, EXIT_BUDGET = range(5)


def _seat(s):
    return "self" if s is None else s


def _emit(args, payload: dict, table: Optional[str] = None) -> None:
    if args.format == "table" and table is not None:
        text = table.rstrip("\n") + "\n"
    else:
        text = dump_json(payload)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _seat_table(seats: dict) -> str:
    rows = [f"{i:<8} {_seat(s)}" for i, s in sorted(seats.items(), key=lambda kv: id_key(kv[0]))]
    return "\n".join(["student  seat", *rows])


def _outcomes(values) -> list:
    return sorted((_seat(s) for s in values), key=lambda x: (x == "self", id_key(x)))


def cmd_solve(args) -> int:
    spec = MechanismSpec.parse(args.mechanism)
    p = load_problem(args.instance)
    result = mechanisms.run(spec, p, trace=args.trace)
    _emit(args, result.to_json(p), _seat_table(dict(result.outcome.seats)))
    return EXIT_OK


def cmd_audit(args) -> int:
    p = load_problem(args.instance)
    with open(args.assignment, encoding="utf-8") as fh:
        a = assignment_from_json(json.load(fh), p)
    report = incontestability_verdict(p, a)
    lines = [f"incontestable: {report.incontestable}"]
    for c in report.complaints:
        w = c.to_json()["witness"]
        lines.append(f"  {c.student}: {c.kind} {w if w is not None else ''}".rstrip())
    _emit(args, report.to_json(), "\n".join(lines))
    return EXIT_OK if report.incontestable else EXIT_FAIL


def _student(args, p) -> str:
    if not args.student:
        raise ValidationError("--student is required")
    p.require_student(args.student)
    return args.student


def cmd_attainable(args) -> int:
    spec = MechanismSpec.parse(args.mechanism)
    p = load_problem(args.instance)
    i = _student(args, p)
    info = InterimInfo(p, i, p.prefs[i])
    got = oracle.attainable_set(spec, info, args.k, args.budget, args.sample, args.seed or 0)
    predicted = smallest_top_priority_set(p, i)
    agree = got.outcomes == predicted.outcomes
    payload = {
        "mechanism": str(spec),
        "attainable": got.to_json(),
        "predicted": predicted.to_json(),
        "agree": agree,
    }
    table = "\n".join(
        [
            f"student    {i}",
            f"attainable {', '.join(_outcomes(got.outcomes))}",
            f"predicted  {', '.join(_outcomes(predicted.outcomes))}",
            f"agree      {agree}",
        ]
    )
    _emit(args, payload, table)
    return EXIT_OK


def cmd_strategy(args) -> int:
    p = load_problem(args.instance)
    i = _student(args, p)
    k = args.k
    spec = MechanismSpec.parse(args.mechanism) if args.mechanism else MechanismSpec("sosm")
    wanted = [n for n in ("safe", "maxmin", "dominant") if getattr(args, n)]
    if not wanted:
        wanted = ["safe", "maxmin", "dominant"]
    payload: dict = {"student": i, "k": k}
    lines = []
    if "safe" in wanted:
        if k is None:
            raise ValidationError("-k is required for the safe-strategy analysis")
        v = oracle.has_safe_strategy(p, i, k)
        payload["safe"] = {"exists": v.exists, "strategy": list(v.strategy or [])}
        lines.append(
            f"safe strategy: {list(v.strategy)}" if v.exists else "no safe strategy"
        )
    if "maxmin" in wanted:
        r = oracle.check_maxmin_optimal(spec, p, i, p.prefs[i], k, args.budget)
        payload["maxmin"] = {
            "passed": r.passed,
            "truthful": list(r.truthful),
            "worst": r.truthful_worst,
            "violations": [{"strategy": list(s), "worst": w} for s, w in r.violations],
        }
        lines.append(f"maxmin truthful worst: {_seat(r.truthful_worst)} (optimal: {r.passed})")
    if "dominant" in wanted:
        if k is None:
            raise ValidationError("-k is required for the dominant-strategy analysis")
        v = oracle.has_dominant_strategy(spec, p, i, p.prefs[i], k)
        payload["dominant"] = {"exists": v.exists, "strategy": list(v.strategy or [])}
        lines.append(
            f"dominant strategy: {list(v.strategy)}" if v.exists else "no dominant strategy"
        )
    _emit(args, payload, "\n".join(lines))
    if "maxmin" in payload and not payload["maxmin"]["passed"]:
        return EXIT_FAIL
    return EXIT_OK


# Profiles beyond this count are sampled rather than enumerated.
CONSISTENCY_CAP = 200_000


def cmd_consistency(args) -> int:
    spec = MechanismSpec.parse(args.mechanism)
    if args.instance:
        problems = [load_problem(path) for path in args.instance]
    else:
        frames = corpus.small_frames(args.students, args.schools, args.frames)
        per_frame = (len(corpus.all_lists(frames[0].schools)) ** args.students) if frames else 0
        if per_frame * len(frames) <= CONSISTENCY_CAP:
            problems = [p for fr in frames for p in corpus.all_profiles(fr)]
        else:
            rng = random.Random(args.seed or 0)
            problems = [
                corpus.random_problem(rng, args.students, args.schools, 1)
                for _ in range(args.samples)
            ]
    run = mechanisms.runner(spec)
    contestable = []
    for n, p in enumerate(problems):
        rep = incontestability_verdict(p, run(p))
        if not rep.incontestable:
            contestable.append({"problem": n, "complaints": rep.to_json()["complaints"]})
    tt = oracle.audit_top_top_consistency(spec, problems)
    position = {id(p): n for n, p in enumerate(problems)}
    violations = sorted(
        (
            {
                "problem": position[id(v.problem)],
                "pair": list(v.pair),
                "student": v.student,
                "full": v.full,
                "reduced": v.reduced,
            }
            for v in tt
        ),
        key=lambda d: (d["problem"], id_key(d["student"])),
    )
    payload = {
        "mechanism": str(spec),
        "problems": len(problems),
        "contestable": contestable,
        "top_top_violations": violations,
    }
    table = "\n".join(
        [
            f"mechanism            {spec}",
            f"problems             {len(problems)}",
            f"contestable outcomes {len(contestable)}",
            f"top-top violations   {len(violations)}",
        ]
    )
    _emit(args, payload, table)
    return EXIT_OK if not contestable and not violations else EXIT_FAIL


def cmd_gen(args) -> int:
    p = corpus.generate_instance(args.students, args.schools, args.seed or 0, args.max_cap)
    _emit(args, problem_to_json(p))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="incontest", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, instance=True, mech=False):
        if instance:
            sp.add_argument("-i", "--instance", required=True, help="instance JSON file")
        if mech:
            sp.add_argument("-m", "--mechanism", required=True, help="e.g. sosm, ar:2, ttc@k=2")
        sp.add_argument("-o", "--output", help="write output here instead of stdout")
        sp.add_argument("--format", choices=("json", "table"), default="json")

    sp = sub.add_parser("solve", help="run a mechanism")
    common(sp, mech=True)
    sp.add_argument("--trace", action="store_true", help="include the event trace")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("audit", help="audit an assignment for incontestability")
    common(sp)
    sp.add_argument("-a", "--assignment", required=True, help="assignment JSON file")
    sp.set_defaults(func=cmd_audit)

    sp = sub.add_parser("attainable", help="enumerate a student's attainable outcomes")
    common(sp, mech=True)
    sp.add_argument("--student", required=True)
    sp.add_argument("-k", type=int, default=None, help="list cap for every student")
    sp.add_argument("--budget", type=int, default=None)
    sp.add_argument("--sample", type=int, default=None, help="sample this many profiles")
    sp.add_argument("--seed", type=int, default=None)
    sp.set_defaults(func=cmd_attainable)

    sp = sub.add_parser("strategy", help="safe, maxmin and dominant strategy analyses")
    common(sp)
    sp.add_argument("-m", "--mechanism", default=None)
    sp.add_argument("--student", required=True)
    sp.add_argument("-k", type=int, default=None)
    sp.add_argument("--safe", action="store_true")
    sp.add_argument("--maxmin", action="store_true")
    sp.add_argument("--dominant", action="store_true")
    sp.add_argument("--budget", type=int, default=None)
    sp.set_defaults(func=cmd_strategy)

    sp = sub.add_parser("consistency", help="incontestability and top-top audits over a corpus")
    sp.add_argument("-m", "--mechanism", required=True)
    sp.add_argument("-i", "--instance", action="append", help="instance file (repeatable)")
    sp.add_argument("--students", type=int, default=3)
    sp.add_argument("--schools", type=int, default=2)
    sp.add_argument("--frames", type=int, default=12, help="priority profiles to enumerate")
    sp.add_argument("--samples", type=int, default=2000)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("-o", "--output")
    sp.add_argument("--format", choices=("json", "table"), default="json")
    sp.set_defaults(func=cmd_consistency)

    sp = sub.add_parser("gen", help="emit a seeded random instance")
    sp.add_argument("--students", type=int, required=True)
    sp.add_argument("--schools", type=int, required=True)
    sp.add_argument("--max-cap", type=int, default=2)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("-o", "--output")
    sp.add_argument("--format", choices=("json",), default="json")
    sp.set_defaults(func=cmd_gen)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except MechanismSpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SPEC
    except (BudgetExceeded, InstanceTooLarge) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ValidationError, UnknownId, ListCapExceeded, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
