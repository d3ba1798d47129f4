"""stitkit command line.

Usage:
    stitkit parse --formula "[a] p"
    stitkit check --model m.json --state w1 --formula "[a] p"
    stitkit frame --model m.json --class C
    stitkit validity --formula "[a] p -> p" --max-states 3 --agents 1
    stitkit translate --formula "[a] p"
    stitkit translate-check --bt-model fork.json --formula "[a] p"
    stitkit morphism --model f1.json --target f2.json --map f.json --depth 2
    stitkit fuzz --models 500 --seed 7

Every command prints one JSON document on stdout. Exit 0 when the property holds, 1 on a
countermodel or failed check (the witness is in the output), 2 on usage, parse or
validation errors.

Output is a function of argv, the input files and the seed, except for the wall-clock
``elapsedMs`` field of ``validity``; ``--no-timing`` drops that field so repeated runs
print byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Any, Optional, Sequence

import yaml
from pydantic import ValidationError

from config import settings
from stitkit import bridge, logic, mc, morphism
from stitkit.btac import Index, eval_cstit, validate_btac
from stitkit.model_files import load_btac_model, load_nbhd_model, load_state_map, report_json
from stitkit.models import (
    AxiomTag,
    CheckReport,
    FormulaSyntaxError,
    FuzzConfig,
    SearchBounds,
    SearchResult,
    SearchTimeout,
    StitkitError,
    UsageError,
    Verdict,
)
from stitkit.nbhd import is_class_C, is_class_P
from stitkit.syntax import (
    Formula,
    agents_of,
    children,
    modal_depth,
    normalize,
    parse,
    render,
    translate_tr,
    vars_of,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_ERROR = 2


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that raises instead of exiting, so usage errors get the JSON error shape."""

    def error(self, message: str):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--model", help="neighbourhood model file (JSON or YAML)")
    common.add_argument("--bt-model", dest="bt_model", help="BT+AC model file")
    common.add_argument("--formula", help="formula text")
    common.add_argument("--state", help="state name, or moment/history for BT+AC models")
    common.add_argument("--max-states", dest="max_states", type=int)
    common.add_argument("--agents", type=int)
    common.add_argument("--atoms", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--schemas", help="comma-separated schema tags, e.g. Incl,M,N")
    common.add_argument("--depth", type=int)
    common.add_argument("--models", type=int)
    common.add_argument("--class", dest="frame_class", choices=["C", "P"], default="C")
    common.add_argument("--target", help="target model file of a morphism")
    common.add_argument("--map", dest="map_path", help="state map file of a morphism")
    common.add_argument("--workers", type=int)
    common.add_argument("--json", action="store_true", help="compact one-line JSON")
    common.add_argument("--no-timing", dest="no_timing", action="store_true", help="omit elapsedMs")
    common.add_argument("--log-level", dest="log_level")

    parser = _Parser(prog="stitkit", description="Strategic stit model checking and search")
    commands = parser.add_subparsers(dest="command", parser_class=_Parser)
    commands.required = True
    for name, help_text in [
        ("parse", "parse and normalize a formula"),
        ("check", "evaluate a formula in a model"),
        ("frame", "check frame conditions of a model"),
        ("validity", "bounded validity search"),
        ("translate", "print tr(formula)"),
        ("translate-check", "check translation equivalence on a BT+AC model"),
        ("morphism", "check a bounded core morphism"),
        ("fuzz", "soundness fuzzing of the axiom schemas"),
    ]:
        commands.add_parser(name, parents=[common], help=help_text)
    return parser


# ── Helpers ───────────────────────────────────────────────────────────


def _require(args: argparse.Namespace, *names: str) -> None:
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        flags = ", ".join("--" + n.replace("_", "-") for n in missing)
        raise UsageError(f"{args.command} needs {flags}")


def _seed(args: argparse.Namespace) -> int:
    return args.seed if args.seed is not None else settings.seed


def _formula(args: argparse.Namespace) -> Formula:
    _require(args, "formula")
    return parse(args.formula)


def formula_ast(f: Formula) -> dict[str, Any]:
    """Nested {"kind", ...} rendering of a formula tree."""
    node: dict[str, Any] = {"kind": type(f).__name__}
    for attr in ("name", "agent"):
        if hasattr(f, attr):
            node[attr] = getattr(f, attr)
    kids = children(f)
    if kids:
        node["args"] = [formula_ast(c) for c in kids]
    return node


def _report_exit(report: CheckReport) -> int:
    return EXIT_OK if report.holds else EXIT_FAILED


# ── Commands ──────────────────────────────────────────────────────────


def cmd_parse(args) -> tuple[Any, int]:
    f = _formula(args)
    out = {
        "ast": formula_ast(f),
        "normalized": render(normalize(f)),
        "rendered": render(f),
        "vars": sorted(vars_of(f)),
        "agents": sorted(agents_of(f)),
        "depth": modal_depth(f),
    }
    return out, EXIT_OK


def cmd_check(args) -> tuple[Any, int]:
    f = _formula(args)
    if args.bt_model:
        _require(args, "state")
        model = load_btac_model(args.bt_model)
        moment, sep, history = args.state.partition("/")
        if not sep:
            raise UsageError("--state for a BT+AC model is moment/history")
        return {"value": eval_cstit(model, Index(moment, history), f)}, EXIT_OK
    _require(args, "model")
    model = load_nbhd_model(args.model)
    if args.state is None:
        return {"extension": model.states.names_of(mc.extension(model, f))}, EXIT_OK
    return {"value": mc.eval(model, args.state, f)}, EXIT_OK


def cmd_frame(args) -> tuple[Any, int]:
    if args.bt_model:
        report = validate_btac(load_btac_model(args.bt_model))
        return report, _report_exit(report)
    _require(args, "model")
    frame = load_nbhd_model(args.model).frame
    report = is_class_P(frame) if args.frame_class == "P" else is_class_C(frame)
    return report, _report_exit(report)


def cmd_validity(args) -> tuple[Any, int]:
    f = _formula(args)
    bounds = SearchBounds(
        max_states=args.max_states or settings.max_states,
        agent_count=args.agents or settings.agent_count,
        atom_count=args.atoms or settings.atom_count,
        max_seconds=settings.max_seconds,
    )
    try:
        result = logic.validity_search(f, bounds)
    except SearchTimeout as e:
        result = SearchResult(verdict=Verdict.TIMEOUT, states_explored=e.explored, elapsed_ms=e.elapsed_ms)
        return _timing(result, args), EXIT_ERROR
    return _timing(result, args), EXIT_OK if result.is_valid else EXIT_FAILED


def _timing(result: SearchResult, args: argparse.Namespace) -> SearchResult:
    return result.model_copy(update={"elapsed_ms": None}) if args.no_timing else result


def cmd_translate(args) -> tuple[Any, int]:
    f = _formula(args)
    return {"formula": render(f), "translation": render(translate_tr(f))}, EXIT_OK


def cmd_translate_check(args) -> tuple[Any, int]:
    if args.bt_model:
        report = bridge.check_translation_equiv(load_btac_model(args.bt_model), _formula(args))
    else:
        report = bridge.translation_sweep(
            models=args.models or 200,
            seed=_seed(args),
            depth=args.depth if args.depth is not None else 3,
            workers=args.workers,
        )
    return report, _report_exit(report)


def cmd_morphism(args) -> tuple[Any, int]:
    _require(args, "model", "target", "map_path")
    source = load_nbhd_model(args.model)
    target = load_nbhd_model(args.target)
    m = morphism.CoreMorphism.from_names(source.frame, target.frame, load_state_map(args.map_path))
    checks = [morphism.is_bounded_core_morphism(m), morphism.surjectivity_report(m)]
    if args.depth is not None and all(c.holds for c in checks):
        checks.append(morphism.check_modal_equivalence(m, source, args.depth))
    report = CheckReport.conjoin("morphism", checks)
    return report, _report_exit(report)


def cmd_fuzz(args) -> tuple[Any, int]:
    schemas = (
        [AxiomTag(tag.strip()) for tag in args.schemas.split(",") if tag.strip()]
        if args.schemas
        else list(AxiomTag)
    )
    config = FuzzConfig(
        frames=args.models or settings.fuzz_models,
        bounds=SearchBounds(
            max_states=args.max_states or settings.max_states,
            agent_count=args.agents or 3,
            atom_count=args.atoms or 3,
        ),
        schemas=schemas,
        seed=_seed(args),
        depth=args.depth if args.depth is not None else settings.fuzz_formula_depth,
        formulas_per_schema=settings.fuzz_formulas_per_schema,
        workers=args.workers or settings.workers,
    )
    report = logic.soundness_fuzz(config)
    return report, _report_exit(report)


COMMANDS = {
    "parse": cmd_parse,
    "check": cmd_check,
    "frame": cmd_frame,
    "validity": cmd_validity,
    "translate": cmd_translate,
    "translate-check": cmd_translate_check,
    "morphism": cmd_morphism,
    "fuzz": cmd_fuzz,
}


# ── Entry points ──────────────────────────────────────────────────────


def _emit(obj: Any, compact: bool) -> None:
    print(report_json(obj, indent=0 if compact else None), flush=True)


def _error(e: Exception) -> dict[str, Any]:
    out: dict[str, Any] = {"error": str(e), "kind": type(e).__name__}
    if isinstance(e, FormulaSyntaxError):
        out["offset"] = e.offset
        out["expected"] = e.expected
    return out


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Run one command; returns the exit code."""
    argv = list(sys.argv[1:] if argv is None else argv)
    compact = "--json" in argv
    try:
        args = build_parser().parse_args(argv)
        level = (args.log_level or settings.log_level).upper()
        logging.basicConfig(
            level=getattr(logging, level, logging.WARNING),
            stream=sys.stderr,
            format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        )
        out, code = COMMANDS[args.command](args)
    except (StitkitError, ValidationError, json.JSONDecodeError, yaml.YAMLError, ValueError) as e:
        logger.debug(f"run | error | kind={type(e).__name__}")
        _emit(_error(e), compact)
        return EXIT_ERROR
    _emit(out, compact)
    return code


def main() -> int:
    return run()


if __name__ == "__main__":
    sys.exit(main())
