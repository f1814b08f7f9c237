"""Command-line front end.

Subcommands: validate, solve, rate, report, serve. Exit codes are a stable
contract: 0 ok, 1 consistency failure under --strict, 2 input error,
3 convergence failure, 4 integrity failure. Human-readable output goes to
stdout, diagnostics to stderr; ANP_NO_COLOR (or a non-tty stdout) disables
ANSI styling so piped output is byte-deterministic.
"""

import argparse
import os
import sys

from . import __version__
from .errors import (
    AnpError,
    ConsistencyRejection,
    ConvergenceFailure,
    IncompleteModel,
    IntegrityError,
    InvalidScaleValue,
)
from .judgments import (
    ConsistencyPolicy,
    SaatyJudgment,
    build_matrix,
    principal_eigenvector,
    screen_consistency,
)
from .model_io import (
    ModelDocument,
    export_report,
    load,
    load_result,
    missing_pairs,
    save,
    save_result,
    solve_document,
    verify_result,
    with_judgment,
)
from .network import all_judgment_slots, validate as validate_network

EXIT_OK = 0
EXIT_CONSISTENCY = 1
EXIT_INPUT = 2
EXIT_CONVERGENCE = 3
EXIT_INTEGRITY = 4
EXIT_INTERRUPT = 130


def _color_enabled() -> bool:
    return sys.stdout.isatty() and not os.environ.get("ANP_NO_COLOR")


def _style(text: str, code: str) -> str:
    if _color_enabled():
        return f"\x1b[{code}m{text}\x1b[0m"
    return text


_VERDICT_STYLE = {"pass": "32", "warn": "33", "fail": "31"}


def _verdict(word: str) -> str:
    return _style(word, _VERDICT_STYLE.get(word, "0"))


def _err(message: str) -> None:
    print(f"error: {message}", file=sys.stderr)


def _warn(message: str) -> None:
    print(f"warning: {message}", file=sys.stderr)


def _default_result_path(model_path: str) -> str:
    if model_path.endswith(".anp.json"):
        return model_path[: -len(".anp.json")] + ".result.json"
    return model_path + ".result.json"


# ---------------------------------------------------------------------------
# subcommands


def cmd_validate(args) -> int:
    doc = load(args.model)
    report = validate_network(doc.network)
    gaps = missing_pairs(doc)
    for line in report.lines():
        print(line)
    for slot_key, pairs in gaps.items():
        print(f"{slot_key}: missing {len(pairs)} judgment(s): {', '.join(pairs)}")
    if report.violations or gaps:
        return EXIT_CONSISTENCY
    print("ok: model is complete and well-formed")
    return EXIT_OK


def _print_ranking(res) -> None:
    ranking = res.ranking
    print("Ranking (limit weights):")
    for position, nid in enumerate(ranking["order"], start=1):
        label = res.nodes.get(nid, nid)
        print(
            f"  {position}. {label:<20s} {ranking['alternatives'][nid]:.4f}"
            f"  (normalized {ranking['renormalized'][nid]:.4f})"
        )


def cmd_solve(args) -> int:
    doc = load(args.model)
    res = solve_document(
        doc,
        policy=args.policy,
        strict=True if args.strict else None,
        tolerance=args.tolerance,
        max_power=args.max_power,
    )
    out = args.output or _default_result_path(args.model)
    save_result(res, out)
    _print_ranking(res)
    for slot_key, slot in res.slots.items():
        if slot["verdict"] != "pass":
            _warn(
                f"{slot_key}: CR {slot['cr']:.4f} exceeds threshold "
                f"{slot['threshold']:.2f} ({slot['verdict']})"
            )
    print(f"result written to {out}", file=sys.stderr)
    return EXIT_OK


def cmd_report(args) -> int:
    res = load_result(args.result)
    if args.model:
        verify_result(res, load(args.model))
    sys.stdout.buffer.write(export_report(res, args.format))
    sys.stdout.buffer.flush()
    return EXIT_OK


def _ask_pair(control_label: str, a_label: str, b_label: str) -> SaatyJudgment:
    prompt = (
        f"With respect to {control_label}: how much more important is "
        f"{a_label} than {b_label}? "
    )
    while True:
        raw = input(prompt).strip()
        try:
            return SaatyJudgment.parse(raw)
        except InvalidScaleValue as exc:
            print(
                f"  {exc}\n  enter a value from the comparison scale: "
                "1..9, or a reciprocal like 1/3 (A less important than B)"
            )


def _rate_slot(doc: ModelDocument, slot, pairs_to_ask):
    """Ask the given pairs; return the updated document."""
    net = doc.network
    control_label = net.node(slot.control_node).label
    for a, b in pairs_to_ask:
        judgment = _ask_pair(control_label, net.node(a).label, net.node(b).label)
        doc = with_judgment(doc, slot.key, f"{a},{b}", str(judgment))
    return doc


def _slot_verdict(doc: ModelDocument, slot, policy: ConsistencyPolicy):
    stored = doc.judgments[slot.key]
    index = {e: i for i, e in enumerate(slot.elements)}
    matrix = build_matrix(
        slot.order,
        [(index[a], index[b], stored[(a, b)]) for (a, b) in slot.pairs()],
        labels=slot.elements,
    )
    pv = principal_eigenvector(matrix)
    return screen_consistency(pv.cr, slot.order, policy)


def cmd_rate(args) -> int:
    doc = load(args.model)
    policy = ConsistencyPolicy.parse(args.policy or doc.options.policy)
    out = args.output or args.model
    slots = {s.key: s for s in all_judgment_slots(doc.network)}
    try:
        gaps = missing_pairs(doc)
        if not gaps:
            print("nothing to rate: every judgment slot is complete")
            save(doc, out)
            return EXIT_OK
        for slot_key in gaps:
            slot = slots[slot_key]
            print(f"\n[{slot_key}] {len(gaps[slot_key])} judgment(s) needed")
            to_ask = [tuple(p.split(",")) for p in gaps[slot_key]]
            while True:
                doc = _rate_slot(doc, slot, to_ask)
                verdict = _slot_verdict(doc, slot, policy)
                print(
                    f"{slot_key}: CR {verdict.cr:.4f} against threshold "
                    f"{verdict.threshold:.2f}: {_verdict(verdict.status.value)}"
                )
                if verdict.status.value == "pass":
                    break
                answer = input("re-rate this matrix? [y/N] ").strip().lower()
                if answer not in ("y", "yes"):
                    break
                to_ask = list(slot.pairs())
        save(doc, out)
        print(f"\nsaved {out}")
        return EXIT_OK
    except (KeyboardInterrupt, EOFError):
        save(doc, out)
        remaining = len(missing_pairs(doc))
        print(
            f"\ninterrupted: partial document saved to {out} "
            f"({remaining} slot(s) still unrated)",
            file=sys.stderr,
        )
        return EXIT_INTERRUPT


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    host, _, port = args.addr.rpartition(":")
    app = create_app(
        store_dir=args.store_dir,
        policy=ConsistencyPolicy.parse(args.policy),
        strict=args.strict,
        static_dir=args.static_dir,
    )
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port))
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _add_policy_flags(sub, with_strict=True):
    sub.add_argument(
        "--policy",
        choices=[p.value for p in ConsistencyPolicy],
        default=None,
        help="consistency screening policy (default: from the document)",
    )
    if with_strict:
        sub.add_argument(
            "--strict",
            action="store_true",
            help="refuse to solve when any matrix fails its CR screen",
        )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="anp",
        description="Analytic Network Process decision engine",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", metavar="command")

    p = sub.add_parser("validate", help="check a model document and report problems")
    p.add_argument("model", help="path to a .anp.json model document")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("solve", help="run the full pipeline and write a result document")
    p.add_argument("model", help="path to a .anp.json model document")
    p.add_argument("--output", help="result path (default: <model>.result.json)")
    _add_policy_flags(p)
    p.add_argument("--tolerance", type=float, default=None, help="limit convergence tolerance")
    p.add_argument("--max-power", type=int, default=None, dest="max_power",
                   help="cap on the supermatrix power")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("rate", help="interactive judgment entry for unfilled slots")
    p.add_argument("model", help="path to a .anp.json model document")
    p.add_argument("--output", help="where to save (default: in place)")
    _add_policy_flags(p, with_strict=False)
    p.set_defaults(func=cmd_rate)

    p = sub.add_parser("report", help="render a result document")
    p.add_argument("result", help="path to a .result.json file")
    p.add_argument("--format", choices=["json", "csv", "markdown"], default="markdown")
    p.add_argument("--model", help="verify the result against this model document")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--addr", default="127.0.0.1:8000", help="bind address host:port")
    p.add_argument("--store-dir", default=".", dest="store_dir",
                   help="directory for persisted models")
    p.add_argument("--policy", choices=[pol.value for pol in ConsistencyPolicy],
                   default="saaty1994")
    p.add_argument("--strict", action="store_true")
    p.add_argument("--static-dir", default=None, dest="static_dir",
                   help="serve this directory's index.html at / (default: $ANP_STATIC_DIR)")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not getattr(args, "func", None):
        parser.print_help(sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except ConsistencyRejection as exc:
        _err(str(exc))
        for key, cr in exc.failures:
            print(f"  {key}: CR {cr:.4f}", file=sys.stderr)
        return EXIT_CONSISTENCY
    except ConvergenceFailure as exc:
        _err(str(exc))
        return EXIT_CONVERGENCE
    except IntegrityError as exc:
        _err(str(exc))
        return EXIT_INTEGRITY
    except IncompleteModel as exc:
        _err(str(exc))
        for key in exc.missing:
            print(f"  unfilled slot: {key}", file=sys.stderr)
        return EXIT_INPUT
    except (AnpError, OSError, ValueError) as exc:
        _err(str(exc))
        return EXIT_INPUT


if __name__ == "__main__":
    raise SystemExit(main())
