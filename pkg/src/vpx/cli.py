"""Command line front end.

    vpx solve|oracle|certify|compare <problem-file> [options]

Exit codes: 0 success (solve: optimal-certified), 1 malformed input,
2 iteration limit, 3 singular basis, 4 refused certificate or uncertified
solve.
"""

import argparse
import csv
import io
import os
import sys
import time

from .errors import ProblemFormatError, VpxError
from .oracle import lp_minimax
from .problemfile import (certificate_dict, dumps, load_coefficients, load_problem,
                          solve_options, solve_report)
from .solver import (ITERATION_LIMIT, OPTIMAL, SINGULAR, certify_optimality,
                     certify_tolerance, solve_minimax)
from .core import deviation_profile

EXIT_OK, EXIT_INPUT, EXIT_ITER, EXIT_SINGULAR, EXIT_REFUSED = 0, 1, 2, 3, 4
STATUS_EXIT = {OPTIMAL: EXIT_OK, ITERATION_LIMIT: EXIT_ITER, SINGULAR: EXIT_SINGULAR}

COMPARE_HEADER = ["problem", "status", "solver_sigma", "oracle_sigma", "abs_diff",
                  "iterations", "solver_seconds", "oracle_seconds"]


def _emit(text, out):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _options(args, file_options):
    return solve_options(file_options, tol=args.tol, max_iter=args.max_iter,
                         seed=args.seed, policy=args.singular_policy,
                         retries=args.retries)


def cmd_solve(args):
    problem, file_options = load_problem(args.problem)
    opts = _options(args, file_options)
    result = solve_minimax(problem, opts)
    _emit(dumps(solve_report(result, problem)), args.out)
    return STATUS_EXIT.get(result.status, EXIT_REFUSED)


def cmd_oracle(args):
    problem, _ = load_problem(args.problem)
    A, sigma = lp_minimax(problem)
    report = {
        "command": "oracle",
        "status": "optimal",
        "sigma": float(sigma),
        "coefficients": [float(a) for a in A],
        "labels": ["1", *problem.family.labels],
    }
    _emit(dumps(report), args.out)
    return EXIT_OK


def cmd_certify(args):
    problem, file_options = load_problem(args.problem)
    opts = _options(args, file_options)
    A = load_coefficients(args.coefficients, problem.n)
    max_abs = deviation_profile(A, problem).max_abs
    cert = certify_optimality(A, problem, certify_tolerance(opts, max_abs))
    body = certificate_dict(cert)
    report = {"command": "certify", "max_abs": float(max_abs), **body}
    _emit(dumps(report), args.out)
    return EXIT_OK if body["certified"] else EXIT_REFUSED


def _problem_files(paths):
    files = []
    for p in paths:
        if os.path.isdir(p):
            files.extend(os.path.join(p, f) for f in sorted(os.listdir(p))
                         if f.endswith(".json"))
        else:
            files.append(p)
    return files


def compare_row(path, args):
    problem, file_options = load_problem(path)
    opts = _options(args, file_options)
    t0 = time.perf_counter()
    result = solve_minimax(problem, opts)
    t1 = time.perf_counter()
    _, oracle_sigma = lp_minimax(problem)
    t2 = time.perf_counter()
    diff = abs(result.sigma - oracle_sigma) if result.sigma is not None else None
    return [path, result.status, result.sigma, oracle_sigma, diff,
            len(result.iterations), round(t1 - t0, 6), round(t2 - t1, 6)]


def cmd_compare(args):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COMPARE_HEADER)
    for path in _problem_files(args.problem):
        writer.writerow(["" if v is None else v for v in compare_row(path, args)])
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="vpx", description="Best uniform approximation on finite point sets.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--tol", type=float, help="termination tolerance (default 1e-9)")
        p.add_argument("--max-iter", type=int, dest="max_iter")
        p.add_argument("--seed", type=int)
        p.add_argument("--singular-policy", choices=["fail", "retry"], dest="singular_policy")
        p.add_argument("--retries", type=int)
        p.add_argument("--out", help="write the report here instead of stdout")

    p = sub.add_parser("solve", help="run the exchange solver")
    p.add_argument("problem")
    common(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("oracle", help="solve the LP reference")
    p.add_argument("problem")
    common(p)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("certify", help="check optimality of given coefficients")
    p.add_argument("problem")
    p.add_argument("coefficients", help="JSON list or a solve/oracle report")
    common(p)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("compare", help="solver vs oracle, one CSV row per problem")
    p.add_argument("problem", nargs="*", help="problem files or directories")
    common(p)
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ProblemFormatError as exc:
        print(f"vpx: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except VpxError as exc:
        print(f"vpx: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SINGULAR if "Singular" in type(exc).__name__ else EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
