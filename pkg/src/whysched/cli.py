"""Command-line front end wrapping the library: schedule generation,
one-shot query answering, the evaluation harness, and the HTTP service."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .catalog import load_catalog
from .encoder import encode
from .evalharness import (LEVELS, render_report_figures, run_eval, split_total)
from .explainer import AlternativeSchedule, explain
from .llm_gateway import GatewayConfig
from .queryparse import QueryError, parse, parse_llm, restate, to_foil
from .refiner import refine_llm, refine_template
from .resources import sample_catalog_path
from .scheduler import Infeasible, Schedule, generate_schedule, next_schedule


def _add_catalog_arg(p: argparse.ArgumentParser) -> None:
    p.add_argument("--catalog", type=Path, default=None,
                   help="catalog JSON file (default: bundled sample)")


def _add_llm_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--llm-mode", choices=["live", "stub", "disabled"],
                   default="disabled")
    p.add_argument("--llm-endpoint", default="")
    p.add_argument("--llm-model", default="")
    p.add_argument("--llm-fixtures", type=Path, default=None,
                   help="stub fixture file (required for stub mode)")
    p.add_argument("--credential-env", default="WHYSCHED_LLM_KEY")


def _gateway(args) -> GatewayConfig:
    return GatewayConfig(mode=args.llm_mode, endpoint=args.llm_endpoint,
                         model=args.llm_model, credential_env=args.credential_env,
                         stub_fixtures=args.llm_fixtures)


def _catalog(args):
    return load_catalog(args.catalog or sample_catalog_path())


def _print_schedule(schedule: Schedule, catalog) -> None:
    for s in range(catalog.requirements.num_semesters):
        codes = schedule.placements.get(s, ())
        total = schedule.credits_per_semester.get(s, 0)
        names = ", ".join(codes) if codes else "(empty)"
        print(f"  Semester {s + 1} ({total} cr): {names}")


def cmd_schedule(args) -> int:
    catalog = _catalog(args)
    kb = encode(catalog)
    result = generate_schedule(kb)
    if isinstance(result, Infeasible):
        print("No schedule satisfies the catalog requirements.")
        return 1
    produced = [result]
    while len(produced) < args.count:
        nxt = next_schedule(kb, produced[-1])
        if not isinstance(nxt, Schedule):
            print(f"(only {len(produced)} distinct schedules exist)")
            break
        produced.append(nxt)
    for i, schedule in enumerate(produced, 1):
        if args.json:
            print(json.dumps(schedule.to_document(catalog)))
        else:
            print(f"Schedule {i}:")
            _print_schedule(schedule, catalog)
    return 0


def _parse_query(args, text, schedule, catalog):
    gw = _gateway(args)
    if gw.mode == "disabled":
        return parse(text, schedule, catalog)
    return parse_llm(text, schedule, catalog, gw)


def cmd_ask(args) -> int:
    catalog = _catalog(args)
    kb = encode(catalog)
    schedule = generate_schedule(kb)
    if isinstance(schedule, Infeasible):
        print("No schedule satisfies the catalog requirements.")
        return 1
    try:
        query = _parse_query(args, args.text, schedule, catalog)
    except QueryError as e:
        print(f"Could not parse the query: {e}")
        return 2
    print(restate(query, schedule).text)
    return 0


def cmd_explain(args) -> int:
    catalog = _catalog(args)
    kb = encode(catalog)
    schedule = generate_schedule(kb)
    if isinstance(schedule, Infeasible):
        print("No schedule satisfies the catalog requirements.")
        return 1
    print("Current schedule:")
    _print_schedule(schedule, catalog)
    try:
        query = _parse_query(args, args.text, schedule, catalog)
    except QueryError as e:
        print(f"Could not parse the query: {e}")
        return 2
    restatement = restate(query, schedule)
    print(restatement.text)
    if not args.yes:
        answer = input("Is that what you are asking? [y/N] ").strip().lower()
        if answer not in ("y", "yes"):
            print("Discarded.")
            return 0
    try:
        foil = to_foil(query, schedule, kb)
    except QueryError as e:
        print(f"Cannot evaluate the query: {e}")
        return 2
    result = explain(kb, foil)
    if isinstance(result, AlternativeSchedule):
        print("That is possible. Alternative schedule:")
        _print_schedule(result.schedule, catalog)
        return 0
    gw = _gateway(args)
    if gw.mode == "disabled":
        refined = refine_template(result.explanation, schedule, catalog)
    else:
        refined = refine_llm(result.explanation, schedule, catalog, gw)
    print(refined.text)
    if args.show_constraints:
        for cid in result.explanation.constraint_ids:
            print(f"  [{cid}]")
    return 0


def cmd_eval(args) -> int:
    catalog = _catalog(args)
    levels = [int(x) for x in args.levels.split(",")]
    if args.total is not None:
        counts = split_total(args.total, levels)
    else:
        counts = [args.n] * len(levels)
    progress = None
    if not args.quiet:
        def progress(done, total):
            if done % 25 == 0 or done == total:
                print(f"\r  {done}/{total} queries", end="", flush=True)
    report = run_eval(catalog, levels, counts, seed=args.seed, mode=args.llm_mode,
                      progress=progress)
    if not args.quiet:
        print()
    report.to_csv(args.out)
    print(f"Report written to {args.out}")
    for row in report.rows:
        print(f"  level {row.level}: n={row.n} accuracy={row.accuracy_pct:.1f}% "
              f"words={row.avg_words:.1f} runtime={row.avg_runtime_sec:.3f}s")
    if not args.no_figures:
        for path in render_report_figures(report, args.out):
            print(f"Figure written to {path}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import ServiceConfig, create_app

    host, _, port = args.listen.rpartition(":")
    config = ServiceConfig(
        catalog_path=args.catalog or sample_catalog_path(),
        data_dir=args.data_dir,
        llm=_gateway(args),
        static_dir=args.static_dir if args.static_dir and args.static_dir.is_dir()
        else None)
    app = create_app(config)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="whysched",
        description="Explainable course scheduling: generate schedules and "
                    "answer contrastive why/why-not queries.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("schedule", help="generate one or more schedules")
    _add_catalog_arg(p)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_schedule)

    p = sub.add_parser("ask", help="parse a query and show its restatement")
    _add_catalog_arg(p)
    _add_llm_args(p)
    p.add_argument("text")
    p.set_defaults(func=cmd_ask)

    p = sub.add_parser("explain", help="answer a contrastive query end to end")
    _add_catalog_arg(p)
    _add_llm_args(p)
    p.add_argument("text")
    p.add_argument("--yes", action="store_true",
                   help="skip the interactive verification step")
    p.add_argument("--show-constraints", action="store_true")
    p.set_defaults(func=cmd_explain)

    p = sub.add_parser("eval", help="run the correctness evaluation harness")
    _add_catalog_arg(p)
    p.add_argument("--levels", default=",".join(str(l) for l in LEVELS))
    p.add_argument("--n", type=int, default=50, help="queries per level")
    p.add_argument("--total", type=int, default=None,
                   help="total query budget split across levels")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--out", type=Path, default=Path("report.csv"))
    p.add_argument("--no-figures", action="store_true")
    p.add_argument("--quiet", action="store_true")
    p.add_argument("--llm-mode", choices=["stub", "disabled"], default="disabled")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("serve", help="run the HTTP service and web UI")
    _add_catalog_arg(p)
    _add_llm_args(p)
    p.add_argument("--data-dir", type=Path, default=Path("./whysched-data"))
    p.add_argument("--listen", default="127.0.0.1:8000")
    p.add_argument("--static-dir", type=Path,
                   default=Path("frontend/dist"))
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
