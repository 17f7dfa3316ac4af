"""
Command-line surface of the branching toolkit.

Exit codes: 0 when the queried property holds (or the battery passes), 1 when it fails,
2 on invalid input, 3 when an exact division or an oracle self-check breaks.
"""

import argparse
import json
import logging
import sys
from typing import List, Optional, Sequence, Tuple

import pandas as pd

from branching import settings
from lowering.src.combinatorics import BranchContext, parse_weight
from lowering.src.criteria import CriterionQuery, check, exists_M_inner, exists_M_terminal
from lowering.src.generator import EXTENDED_TABLE1, KNOWN_TABLE1, ReachMode, reach_report, reachable, table1_rows
from lowering.src.symbolic import IntegralityError, RationalTag, expand_T, rho
from oracle.src.modrep import OracleConsistencyError, build_weyl, dual_realization, lowering_verdict, oracle_summary
from verification.src.battery import CHECKS, BatteryConfig, run_battery, summarize


_logger = logging.getLogger(__name__)

EXIT_OK, EXIT_FAILED, EXIT_INVALID, EXIT_INCONSISTENT = 0, 1, 2, 3


def parse_columns(text: Optional[str]) -> Tuple[int, ...]:
    """Comma-separated column indices; empty text is the empty set."""
    if text is None or not text.strip():
        return ()
    return parse_weight(text)


def parse_cells(text: str) -> List[Tuple[int, int]]:
    """Table cells as "p,n;p,n"."""
    cells = []
    for part in text.split(";"):
        cell = parse_weight(part)
        if len(cell) != 2:
            raise ValueError(f"table cells should look like p,n, but received {part!r}")
        cells.append(cell)
    return cells


def emit(payload, fmt: str = "json", text: Optional[str] = None):
    if fmt == "text" and text is not None:
        sys.stdout.write(text.rstrip("\n") + "\n")
        return
    payload = {"schema": settings.JSON_SCHEMA, **payload}
    sys.stdout.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _context(args) -> BranchContext:
    return BranchContext(parse_weight(args.lam), parse_weight(args.mu), args.p)


def cmd_check(args) -> int:
    ctx = _context(args)
    verdict = check(CriterionQuery(ctx, args.i, args.j, args.d, parse_columns(args.M)))
    text = "holds" if verdict.holds else f"fails: {verdict.reason}"
    emit({"verdict": verdict.to_dict()}, args.format, text)
    return EXIT_OK if verdict.holds else EXIT_FAILED


def cmd_exists_m(args) -> int:
    ctx = _context(args)
    if args.j == ctx.n:
        verdict = exists_M_terminal(ctx, args.i, args.d)
    else:
        verdict = exists_M_inner(ctx, args.i, args.j, args.d, mode=args.mode)
    text = f"M = {list(verdict.M)}" if verdict.holds else f"no M: {verdict.reason}"
    emit({"verdict": verdict.to_dict()}, args.format, text)
    return EXIT_OK if verdict.holds else EXIT_FAILED


def cmd_expand(args) -> int:
    T = expand_T(args.i, args.j, args.d, parse_columns(args.M), args.n)
    emit({"i": args.i, "j": args.j, "d": args.d, "M": list(parse_columns(args.M)), "terms": T.to_dict()},
         args.format, T.to_text())
    return EXIT_OK


def cmd_rho(args) -> int:
    value = rho(parse_weight(args.C), args.i, args.j, parse_weight(args.K), parse_weight(args.L),
                parse_columns(args.M), RationalTag(args.R))
    emit({"rho": str(value)}, args.format, str(value))
    return EXIT_OK


def cmd_oracle(args) -> int:
    lam = parse_weight(args.lam)
    payload = oracle_summary(lam, args.p, args.tensor_limit)
    holds = True
    if args.mu is not None:
        nabla = dual_realization(build_weyl(lam, args.p, args.tensor_limit))
        T = expand_T(args.i, args.j, args.d, parse_columns(args.M), len(lam))
        verdict = lowering_verdict(nabla, T, parse_weight(args.mu))
        payload["query"] = {"mu": list(parse_weight(args.mu)), "i": args.i, "j": args.j, "d": args.d,
                            "M": list(parse_columns(args.M)), **verdict.to_dict()}
        holds = verdict.holds
    emit(payload)
    return EXIT_OK if holds else EXIT_FAILED


def cmd_reach(args) -> int:
    lam = parse_weight(args.lam)
    if args.mode == "both":
        payload = reach_report(lam, args.p).to_dict()
    else:
        result = reachable(lam, args.p, ReachMode(args.mode))
        payload = {
            "lambda": list(lam),
            "p": args.p,
            "mode": result.mode.value,
            "reached": [result.nodes[mu].to_dict() for mu in sorted(result.nodes, reverse=True)],
            "flagged": [f.to_dict() for f in result.flagged],
        }
    emit(payload)
    return EXIT_OK


def cmd_table1(args) -> int:
    if args.cells:
        cells = parse_cells(args.cells)
    else:
        cells = list(KNOWN_TABLE1) + (list(EXTENDED_TABLE1) if args.extended else [])
    rows, discrepancies = table1_rows(cells, args.jobs)
    frame = pd.DataFrame(rows, columns=["p", "n", "max", "argmax_lambda", "elapsed_ms", "expected"])
    frame.to_csv(sys.stdout, sep="\t", index=False)
    if discrepancies:
        sys.stderr.write(json.dumps({"schema": settings.JSON_SCHEMA, "discrepancies": discrepancies},
                                    sort_keys=True, indent=2) + "\n")
        return EXIT_FAILED
    return EXIT_OK


def cmd_verify(args) -> int:
    config = BatteryConfig(
        p=args.p,
        n=args.n,
        seed=args.seed,
        samples=args.samples,
        hall_samples=args.hall_samples,
        jobs=args.jobs,
        tensor_limit=args.tensor_limit,
        inject_fault=args.inject_fault,
        symbolic_n=args.symbolic_n,
        symbolic_d=args.symbolic_d,
        integrality_n=args.integrality_n,
        only=tuple(args.only or ()),
    )
    summary = summarize(run_battery(config))
    emit(summary)
    return EXIT_OK if summary["passed"] else EXIT_FAILED


def _add_query_arguments(parser: argparse.ArgumentParser, with_M: bool = True):
    parser.add_argument("--lambda", dest="lam", required=True, help="GL_n weight, e.g. 2,1,0")
    parser.add_argument("--mu", required=True, help="GL_{n-1} weight interlacing lambda, e.g. 2,0")
    parser.add_argument("--p", type=int, required=True)
    parser.add_argument("--i", type=int, required=True)
    parser.add_argument("--j", type=int, required=True)
    parser.add_argument("--d", type=int, required=True)
    if with_M:
        parser.add_argument("--M", default="", help="comma-separated columns in (i..j)")
    parser.add_argument("--format", choices=["text", "json"], default="json")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="branching", description="Lowering operators and branching for GL_n in characteristic p")
    parser.add_argument("--log-level", default=None)
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="decide whether T_{i,j}^{(d)}(M,1) f_{mu,lambda} is a nonzero high weight vector")
    _add_query_arguments(p_check)
    p_check.set_defaults(handler=cmd_check)

    p_exists = sub.add_parser("exists-m", help="search for a set M that works")
    _add_query_arguments(p_exists, with_M=False)
    p_exists.add_argument("--mode", choices=["part1", "part2"], default="part2")
    p_exists.set_defaults(handler=cmd_exists_m)

    p_expand = sub.add_parser("expand", help="PBW expansion of T_{i,j}^{(d)}(M,1)")
    p_expand.add_argument("--i", type=int, required=True)
    p_expand.add_argument("--j", type=int, required=True)
    p_expand.add_argument("--d", type=int, required=True)
    p_expand.add_argument("--M", default="")
    p_expand.add_argument("--n", type=int, default=None)
    p_expand.add_argument("--format", choices=["text", "json"], default="text")
    p_expand.set_defaults(handler=cmd_expand)

    p_rho = sub.add_parser("rho", help="coefficient polynomial rho^{(C)}(i,j,K,L,M,R)")
    p_rho.add_argument("--C", required=True, help="c_1,...,c_{n-1}")
    p_rho.add_argument("--i", type=int, required=True)
    p_rho.add_argument("--j", type=int, required=True)
    p_rho.add_argument("--K", required=True)
    p_rho.add_argument("--L", required=True)
    p_rho.add_argument("--M", default="")
    p_rho.add_argument("--R", choices=[tag.value for tag in RationalTag], default=RationalTag.ONE.value)
    p_rho.add_argument("--format", choices=["text", "json"], default="text")
    p_rho.set_defaults(handler=cmd_rho)

    p_oracle = sub.add_parser("oracle", help="brute-force Delta, L and Nabla over F_p")
    p_oracle.add_argument("--lambda", dest="lam", required=True)
    p_oracle.add_argument("--p", type=int, required=True)
    p_oracle.add_argument("--mu", default=None)
    p_oracle.add_argument("--i", type=int, default=1)
    p_oracle.add_argument("--j", type=int, default=2)
    p_oracle.add_argument("--d", type=int, default=1)
    p_oracle.add_argument("--M", default="")
    p_oracle.add_argument("--tensor-limit", type=int, default=settings.TENSOR_LIMIT)
    p_oracle.set_defaults(handler=cmd_oracle)

    p_reach = sub.add_parser("reach", help="weights reached from the top by the lowering steps")
    p_reach.add_argument("--lambda", dest="lam", required=True)
    p_reach.add_argument("--p", type=int, required=True)
    p_reach.add_argument("--mode", choices=["both"] + [mode.value for mode in ReachMode], default="both")
    p_reach.set_defaults(handler=cmd_reach)

    p_table = sub.add_parser("table1", help="maximal number of weights reached only through d >= 2")
    p_table.add_argument("--cells", default=None, help='cells as "p,n;p,n"')
    p_table.add_argument("--extended", action="store_true")
    p_table.add_argument("--jobs", type=int, default=settings.JOBS)
    p_table.set_defaults(handler=cmd_table1)

    p_verify = sub.add_parser("verify", help="cross-validation battery")
    p_verify.add_argument("--p", type=int, default=3)
    p_verify.add_argument("--n", type=int, default=3)
    p_verify.add_argument("--seed", type=int, default=settings.SEED)
    p_verify.add_argument("--samples", type=int, default=settings.VERIFY_SAMPLES)
    p_verify.add_argument("--hall-samples", type=int, default=settings.HALL_SAMPLES)
    p_verify.add_argument("--jobs", type=int, default=settings.JOBS)
    p_verify.add_argument("--tensor-limit", type=int, default=settings.TENSOR_LIMIT)
    p_verify.add_argument("--symbolic-n", type=int, default=settings.SYMBOLIC_N)
    p_verify.add_argument("--symbolic-d", type=int, default=settings.SYMBOLIC_D)
    p_verify.add_argument("--integrality-n", type=int, default=settings.INTEGRALITY_N)
    p_verify.add_argument("--inject-fault", action="store_true")
    p_verify.add_argument("--only", nargs="*", choices=CHECKS, default=None)
    p_verify.set_defaults(handler=cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    settings.configure_logging(args.log_level)
    try:
        return args.handler(args)
    except ValueError as exc:
        _logger.debug("Invalid input", exc_info=True)
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INVALID
    except (IntegralityError, OracleConsistencyError) as exc:
        _logger.debug("Internal consistency check failed", exc_info=True)
        sys.stderr.write(f"internal error: {type(exc).__name__}: {exc}\n")
        return EXIT_INCONSISTENT
