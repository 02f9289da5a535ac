"""Command-line front end.

Exit codes: 0 on success, 1 on an input problem (parse, validation, or an
impossible query), 2 when the run hits the timeout or the node cap.
"""

from __future__ import annotations

import argparse
import json
import signal
import sys
from dataclasses import replace

from . import benchgen, infer, oracle
from .bdd import NodeLimitError, available_kernels
from .compiler import CompileError, compile_program, compile_query
from .grounder import GroundingError, StratificationError, format_ground, ground
from .model import Assignment, Literal, validate
from .parser import ParseError, parse_atom, parse_literal, parse_program


class _Timeout(Exception):
    pass


def _read_program(args):
    try:
        with open(args.program, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise ParseError(str(exc))
    program = parse_program(text, filename=args.program)
    for warning in program.warnings:
        print("warning: %s" % warning, file=sys.stderr)
    if args.evidence:
        extra = tuple(parse_literal(text) for text in args.evidence)
        program = replace(program, evidence=program.evidence + extra)
    return program


def _query_atom(args, program):
    if getattr(args, "query", None):
        return parse_atom(args.query)
    if program.queries:
        return program.queries[0]
    raise ParseError("no query: pass --query or add a query directive")


def _emit(args, result):
    if args.json:
        json.dump(result.to_json_dict(), sys.stdout, sort_keys=True)
        sys.stdout.write("\n")
    else:
        for line in result.to_text_lines():
            print(line)
        if args.stats:
            for key, val in sorted(result.stats.to_json_dict().items()):
                print("stat %s: %s" % (key, val))


def _dump_ground(args, gp):
    if args.dump_ground:
        print(format_ground(gp), file=sys.stderr)


def _write_dot(args, cp, ref):
    if getattr(args, "dot", None):
        with open(args.dot, "w", encoding="utf-8") as handle:
            handle.write(cp.manager.to_dot(ref))


def _cmd_prob(args):
    program = _read_program(args)
    query = _query_atom(args, program)
    gp = ground(program)
    _dump_ground(args, gp)
    result = infer.prob_result(
        program, query, kernel=args.kernel, node_cap=args.node_cap, gp=gp
    )
    if args.dot:
        cp = compile_program(gp, task="prob", kernel=args.kernel, node_cap=args.node_cap)
        _write_dot(args, cp, compile_query(cp, [Literal(query)]))
    _emit(args, result)
    return 0


def _cmd_best(args, task):
    program = _read_program(args)
    gp = ground(program)
    _dump_ground(args, gp)
    kw = {
        "normalize": args.normalize,
        "kernel": args.kernel,
        "node_cap": args.node_cap,
        "gp": gp,
    }
    if task == "mpe":
        result = infer.mpe(program, **kw)
    else:
        result = infer.map_query(program, **kw)
    if args.dot:
        cp = compile_program(gp, task=task, kernel=args.kernel, node_cap=args.node_cap)
        _write_dot(args, cp, compile_query(cp, list(program.evidence)))
    _emit(args, result)
    return 0


def _oracle_result(args):
    program = _read_program(args)
    gp = ground(program)
    _dump_ground(args, gp)
    evidence = list(program.evidence)
    if args.task == "prob":
        query = [Literal(_query_atom(args, program))]
        if evidence:
            value = oracle.exact_cond_prob(gp, query, evidence)
        else:
            value = oracle.exact_prob(gp, query)
        return value, None
    if args.task == "mpe":
        value, sels = oracle.exact_mpe(gp, evidence)
    else:
        query_cvs = [cv.index for cv in gp.choice_vars if cv.is_query]
        if not query_cvs:
            raise CompileError("the map task needs map_query clauses")
        value, sels = oracle.exact_map(gp, evidence, query_cvs)
    best = min(sorted(sel.items()) for sel in sels)
    entries = tuple((gp.choice_vars[ci], k) for ci, k in best)
    return value, Assignment(entries)


def _cmd_oracle(args):
    value, assignment = _oracle_result(args)
    if args.json:
        out = {
            "task": args.task,
            "value": value,
            "assignment": None if assignment is None else assignment.to_rule_dicts(),
        }
        json.dump(out, sys.stdout, sort_keys=True)
        sys.stdout.write("\n")
    else:
        print("value: %r" % value)
        if assignment is not None:
            for line in assignment.to_rule_lines():
                print(line)
    return 0


def _cmd_ground(args):
    program = _read_program(args)
    gp = ground(program)
    print(format_ground(gp))
    return 0


def _cmd_dot(args):
    program = _read_program(args)
    gp = ground(program)
    cp = compile_program(gp, task=args.task, kernel=args.kernel, node_cap=args.node_cap)
    if args.task == "prob":
        literals = [Literal(_query_atom(args, program))]
    else:
        literals = list(program.evidence)
    ref = compile_query(cp, literals)
    text = cp.manager.to_dot(ref)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        print(text)
    return 0


def _cmd_bench(args):
    rows = []
    for size in args.size:
        for seed in range(args.seeds):
            for task in args.task:
                if task == "map" and not args.fraction:
                    raise ValueError("map runs need at least one --fraction")
                fractions = args.fraction if task == "map" else [None]
                for fraction in fractions:
                    spec = benchgen.BenchSpec(
                        family=args.family,
                        size=size,
                        seed=seed,
                        task=task,
                        map_fraction=fraction,
                        timeout=args.timeout,
                        kernel=args.kernel,
                        node_cap=args.node_cap,
                    )
                    rows.append(benchgen.run_bench(spec))
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as handle:
            benchgen.write_rows(rows, handle)
    else:
        benchgen.write_rows(rows, sys.stdout)
    return 0


def _add_common(sub, query_flag=False):
    sub.add_argument("program", help="program file")
    sub.add_argument("--evidence", action="append", metavar="LITERAL",
                     help="extra evidence literal (repeatable)")
    sub.add_argument("--kernel", choices=available_kernels(), default=None)
    sub.add_argument("--node-cap", type=int, default=None)
    sub.add_argument("--json", action="store_true", help="emit JSON")
    sub.add_argument("--stats", action="store_true",
                     help="print run statistics (text mode)")
    sub.add_argument("--dump-ground", action="store_true",
                     help="print the ground program to stderr")
    sub.add_argument("--timeout", type=float, default=None, metavar="SECONDS")
    if query_flag:
        sub.add_argument("--query", metavar="ATOM", help="query atom")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="lpadc",
        description="Probabilistic inference for logic programs with "
        "annotated disjunctions.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("prob", help="marginal or conditional probability")
    _add_common(p, query_flag=True)
    p.add_argument("--dot", metavar="FILE", help="write the query BDD as DOT")

    for name, text in (("mpe", "most probable total explanation"),
                       ("map", "most probable query-clause selection")):
        p = subs.add_parser(name, help=text)
        _add_common(p)
        p.add_argument("--normalize", action="store_true",
                       help="divide by the evidence probability")
        p.add_argument("--dot", metavar="FILE",
                       help="write the evidence BDD as DOT")

    p = subs.add_parser("oracle", help="answer by world enumeration")
    p.add_argument("task", choices=("prob", "mpe", "map"))
    _add_common(p, query_flag=True)

    p = subs.add_parser("ground", help="print the relevant ground program")
    _add_common(p)

    p = subs.add_parser("dot", help="write a compiled BDD as DOT")
    p.add_argument("--task", choices=("prob", "mpe", "map"), default="prob")
    p.add_argument("-o", "--out", metavar="FILE")
    _add_common(p, query_flag=True)

    p = subs.add_parser("bench", help="generate and time benchmark instances")
    p.add_argument("--family", choices=benchgen.BENCH_FAMILIES, required=True)
    p.add_argument("--size", type=int, action="append", required=True)
    p.add_argument("--seeds", type=int, default=1,
                   help="run seeds 0..N-1 (default 1)")
    p.add_argument("--task", choices=benchgen.BENCH_TASKS, action="append",
                   required=True)
    p.add_argument("--fraction", type=float, action="append",
                   help="fraction of clauses marked query for map runs")
    p.add_argument("--timeout", type=float, default=None, metavar="SECONDS")
    p.add_argument("--kernel", choices=available_kernels(), default=None)
    p.add_argument("--node-cap", type=int, default=None)
    p.add_argument("--out", metavar="FILE", help="CSV output path")
    return parser


_COMMANDS = {
    "prob": _cmd_prob,
    "mpe": lambda args: _cmd_best(args, "mpe"),
    "map": lambda args: _cmd_best(args, "map"),
    "oracle": _cmd_oracle,
    "ground": _cmd_ground,
    "dot": _cmd_dot,
    "bench": _cmd_bench,
}


def _alarm(signum, frame):
    raise _Timeout()


def main(argv=None):
    args = build_parser().parse_args(argv)
    handler = _COMMANDS[args.command]
    timeout = getattr(args, "timeout", None)
    old = None
    if timeout and args.command != "bench":
        old = signal.signal(signal.SIGALRM, _alarm)
        signal.setitimer(signal.ITIMER_REAL, timeout)
    try:
        return handler(args)
    except (ParseError, GroundingError, StratificationError, CompileError,
            infer.InferError, oracle.OracleCapError, ValueError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    except _Timeout:
        print("error: timed out after %ss" % timeout, file=sys.stderr)
        return 2
    except NodeLimitError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    finally:
        if old is not None:
            signal.setitimer(signal.ITIMER_REAL, 0)
            signal.signal(signal.SIGALRM, old)


if __name__ == "__main__":
    sys.exit(main())
