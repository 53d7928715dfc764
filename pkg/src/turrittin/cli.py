"""Command-line front-end.

Subcommands:
  analyze   print system invariants
  reduce    run a reduction pipeline, emit normal form + chain artifacts
  verify    replay a chain against a claimed output and check the form
  trace     pretty-print a chain step by step with recomputed invariants

Exit codes: 0 success / all checks pass; 1 verification failure;
2 parse or usage error; 3 invalid field descriptor; 4 insufficient
precision; 5 unsupported tower; 6 resonant residual; 7 domain error;
70 internal error.
"""

import argparse
import sys
from pathlib import Path

from .documents import (
    chain_from_json,
    chain_to_json,
    dumps,
    loads,
    normal_form_to_json,
    parse_system,
    report_to_json,
    system_to_json,
)
from .errors import (
    InvalidFieldDescriptorError,
    ParseError,
    PrecisionError,
    ResonantResidualError,
    TurrittinError,
    UnsupportedTowerError,
)
from .rationals import QQ
from .reduce_complex import (
    deresonate,
    eliminate_tail,
    render_formal_solution,
    trs_rank0,
)
from .reduce_real import (
    real_deresonate,
    real_eliminate_tail,
    rtrs_rank0,
    carve_real_normal_form,
)
from .reduce_complex import carve_normal_form
from .systems import TransformChain, apply_step, replay, system_invariants
from .verify import check_form, check_gauge_chain, invariants_report


def _read(path):
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}")


def _emit(args, text):
    sys.stdout.write(text)
    if not text.endswith("\n"):
        sys.stdout.write("\n")


def _write_artifact(out_dir, name, text):
    path = Path(out_dir) / name
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return path


def cmd_analyze(args):
    system = parse_system(_read(args.system))
    report = invariants_report(system)
    if args.format == "json":
        _emit(args, dumps(report_to_json(report)))
    else:
        for name, _, witness in report.checks:
            _emit(args, f"{name}: {witness}")
    return 0


def cmd_reduce(args):
    system = parse_system(_read(args.system))
    if args.precision is not None:
        if system.relative_order < args.precision:
            raise PrecisionError(
                "declared precision exceeds the document truncation",
                required=args.precision,
                available=system.relative_order,
            )
        system = system.truncate(args.precision)
    mu = args.degree
    if args.mode == "complex":
        chain, nf = trs_rank0(system)
        work = nf.reduced_system
        chain_d, work = deresonate(work)
        chain = chain + chain_d
        if mu > 0:
            step_mu, work = eliminate_tail(work, mu)
            chain = chain + [step_mu]
        nf = carve_normal_form(
            work, ramification=chain.ramification_index(), degree=mu
        )
        solution = render_formal_solution(nf)
        mode = "trs"
    else:
        chain, nf = rtrs_rank0(system)
        work = nf.reduced_system
        chain_d, work = real_deresonate(work)
        chain = chain + chain_d
        if mu > 0:
            step_mu, work = real_eliminate_tail(work, mu)
            chain = chain + [step_mu]
        nf = carve_real_normal_form(
            work, ramification=chain.ramification_index(), degree=mu
        )
        solution = None
        mode = "rtrs"
    chain_doc = dumps(chain_to_json(chain, work.field))
    nf_doc = dumps(normal_form_to_json(nf, mode))
    claimed_doc = dumps(system_to_json(nf.reduced_system))
    if args.out:
        _write_artifact(args.out, "chain.json", chain_doc)
        _write_artifact(args.out, "normal_form.json", nf_doc)
        _write_artifact(args.out, "claimed.json", claimed_doc)
        if solution is not None:
            _write_artifact(args.out, "solution.txt", solution + "\n")
        _emit(args, f"wrote artifacts to {args.out}")
    if args.format == "json":
        _emit(args, nf_doc)
    else:
        _emit(args, f"mode: {mode}")
        _emit(args, f"rank: {nf.rank}  degree: {nf.degree}  ramification: {nf.ramification}")
        if solution is not None:
            _emit(args, solution)
    return 0


def cmd_verify(args):
    system = parse_system(_read(args.system))
    chain, _ = chain_from_json(loads(_read(args.chain)))
    claimed = parse_system(_read(args.claimed))
    report = check_gauge_chain(system, chain, claimed)
    if args.form:
        rank = args.rank
        if rank is None:
            v = claimed.valuation()
            rank = 0 if v is None else max(-v - 1, 0)
        form_report = check_form(claimed, args.form, rank, args.degree)
        report = report.merged(form_report)
    if args.format == "json":
        _emit(args, dumps(report_to_json(report)))
    else:
        for name, ok, witness in report.checks:
            status = "pass" if ok else "FAIL"
            suffix = f" ({witness})" if witness and not ok else ""
            _emit(args, f"{status}: {name}{suffix}")
    return 0 if report.all_pass else 1


def cmd_trace(args):
    system = parse_system(_read(args.system))
    chain, _ = chain_from_json(loads(_read(args.chain)))
    current = system
    for idx, step in enumerate(chain):
        before = system_invariants(current) if not current.is_zero() else None
        current = apply_step(current, step)
        after = system_invariants(current) if not current.is_zero() else None

        def fmt(inv):
            if inv is None:
                return "zero system"
            return f"nu={inv.order} q={inv.poincare_rank} k={inv.radiality_index}"

        if step.kind == "ramification":
            detail = f"r={step.payload}"
        elif step.kind == "diagonal-monomial":
            detail = f"exponents={list(step.payload)}"
        else:
            detail = f"degree={step.degree()}"
        _emit(args, f"step[{idx}] {step.kind} {detail}: {fmt(before)} -> {fmt(after)}")
    return 0


EXIT_CODES = [
    (ParseError, 2),
    (InvalidFieldDescriptorError, 3),
    (PrecisionError, 4),
    (UnsupportedTowerError, 5),
    (ResonantResidualError, 6),
    (TurrittinError, 7),
]


def build_parser():
    parser = argparse.ArgumentParser(
        prog="turrittin",
        description="Exact reduction of meromorphic linear ODE systems to "
        "Turrittin-Ramis-Sibuya normal forms.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="print system invariants")
    p.add_argument("system")
    p.add_argument("--format", choices=["json", "text"], default="text")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("reduce", help="reduce to a normal form")
    p.add_argument("system")
    p.add_argument("--mode", choices=["complex", "real"], required=True)
    p.add_argument("--degree", type=int, default=0, help="tail-elimination degree mu")
    p.add_argument(
        "--precision",
        type=int,
        default=None,
        help="truncate the input to this relative order first",
    )
    p.add_argument("--out", default=None, help="directory for artifacts")
    p.add_argument("--format", choices=["json", "text"], default="text")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("verify", help="replay a chain and check the form")
    p.add_argument("system")
    p.add_argument("--chain", required=True)
    p.add_argument("--claimed", required=True)
    p.add_argument("--form", choices=["trs", "rtrs"], default=None)
    p.add_argument("--rank", type=int, default=None)
    p.add_argument("--degree", type=int, default=0)
    p.add_argument("--format", choices=["json", "text"], default="text")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("trace", help="pretty-print a chain step by step")
    p.add_argument("system")
    p.add_argument("--chain", required=True)
    p.add_argument("--format", choices=["json", "text"], default="text")
    p.set_defaults(func=cmd_trace)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except TurrittinError as exc:
        sys.stderr.write(f"error [{exc.tag}]: {exc}\n")
        for klass, code in EXIT_CODES:
            if isinstance(exc, klass):
                return code
        return 7
    except Exception as exc:  # pragma: no cover - defensive
        sys.stderr.write(f"internal error: {exc!r}\n")
        return 70


if __name__ == "__main__":
    sys.exit(main())
