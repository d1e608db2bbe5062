"""The ``annot`` command line: batch consistency checking, suggestion
listing, block delimitation, and the project server.

Exit codes: 0 clean, 2 at least one inconsistency found, 1 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import AnnotError
from .project import DEFAULT_CONFIG_NAME, Project, ProjectConfig, discover_config

# ProjectConfig is this module's configuration surface; re-exported on purpose.
__all__ = ["ProjectConfig", "main", "entrypoint"]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="annot",
        description="Annotate enterprise models with ontology semantics and check consistency.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", type=Path, help=f"project file (default: ./{DEFAULT_CONFIG_NAME})")
        p.add_argument("--model", type=Path, help="model file (overrides config)")
        p.add_argument(
            "--ontology", type=Path, action="append", dest="ontologies", help="ontology file (repeatable)"
        )
        p.add_argument("--rules", type=Path, action="append", help="rule file (repeatable)")
        p.add_argument("--annotations", type=Path, help="annotation store file")
        p.add_argument("--sbr-mode", choices=["strict", "symmetric"], help="SBR validation mode")
        p.add_argument("--subclass-closure", action="store_true", default=None,
                       help="close block comparison and type matching over rdfs:subClassOf")
        p.add_argument("--auto-accept", action="store_true", default=None,
                       help="let inferred suggestions join the consistency check")
        p.add_argument("--max-depth", type=int, help="transitive suggestion depth limit")
        p.add_argument("--out", default="-", help="output path, '-' for stdout")

    check = sub.add_parser("check", help="run the pipeline and gate on inconsistencies")
    add_common(check)

    suggest = sub.add_parser("suggest", help="run the pipeline and print suggestions only")
    add_common(suggest)

    sb = sub.add_parser("sb", help="delimit a semantic block around a main concept")
    add_common(sb)
    sb.add_argument("--main", required=True, help="main concept, e.g. '&AIPL;P0110'")
    sb.add_argument("--depth", type=int, help="depth bound (default: unbounded)")

    serve = sub.add_parser("serve", help="serve the project API")
    add_common(serve)
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--host", default="127.0.0.1")
    return parser


def _absolute(path: Path | None) -> Path | None:
    if path is None:
        return None
    return path if path.is_absolute() else Path.cwd() / path


def _absolute_list(paths: list[Path] | None) -> list[Path] | None:
    if paths is None:
        return None
    return [p if p.is_absolute() else Path.cwd() / p for p in paths]


def _load_config(args: argparse.Namespace) -> ProjectConfig:
    # Paths given on the command line resolve against the invocation cwd,
    # paths from the config file against the config's own directory.
    overrides = dict(
        model=_absolute(args.model),
        ontologies=_absolute_list(args.ontologies),
        rules=_absolute_list(args.rules),
        annotations=_absolute(args.annotations),
        sbr_mode=args.sbr_mode,
        subclass_closure=args.subclass_closure,
        max_inference_depth=args.max_depth,
        auto_accept=args.auto_accept,
    )
    config_path = args.config or discover_config()
    if config_path is not None:
        return ProjectConfig.from_file(config_path, **overrides)
    required = {k: overrides[k] for k in ("model", "ontologies", "rules", "annotations")}
    missing = [k for k, v in required.items() if not v]
    if missing:
        raise AnnotError(
            "no project config found; pass --config or all of --model/--ontology/--rules/--annotations"
        )
    defaults = dict(
        sbr_mode="symmetric", subclass_closure=False, max_inference_depth=4, auto_accept=False
    )
    defaults.update({k: v for k, v in overrides.items() if v is not None})
    return ProjectConfig(base_dir=Path.cwd(), **defaults)  # type: ignore[arg-type]


def _ontology_paths(args: argparse.Namespace) -> list[Path]:
    config_path = args.config or discover_config()
    if config_path is None:
        paths = _absolute_list(args.ontologies)
        if not paths:
            raise AnnotError("no ontologies given; pass --config or --ontology")
        return paths
    return _load_config(args).ontologies


def _write_out(payload: bytes, out: str) -> None:
    if out == "-":
        sys.stdout.buffer.write(payload)
        sys.stdout.flush()
    else:
        Path(out).write_bytes(payload)


def _dump(doc: object) -> bytes:
    return (json.dumps(doc, indent=2, sort_keys=True) + "\n").encode("utf-8")


def cmd_check(args: argparse.Namespace) -> int:
    project = Project.load(_load_config(args))
    report = project.run()
    _write_out(report.canonical_bytes(), args.out)
    return 2 if report.inconsistent_findings() else 0


def cmd_suggest(args: argparse.Namespace) -> int:
    project = Project.load(_load_config(args))
    report = project.run()
    _write_out(_dump([s.to_json_dict() for s in report.suggestions]), args.out)
    return 0


def cmd_sb(args: argparse.Namespace) -> int:
    # Only the ontologies are needed to delimit a block.
    from .blocks import Selector, delimit_sb
    from .kstore import KnowledgeStore

    knowledge = KnowledgeStore.load_files(_ontology_paths(args))
    selector = Selector.everything() if args.depth is None else Selector.depth_bounded(args.depth)
    block = delimit_sb(knowledge.union_graph(), args.main, selector)
    _write_out(_dump(block.to_json_dict()), args.out)
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app, find_ui_dir

    project = Project.load(_load_config(args))
    app = create_app(project, ui_dir=find_ui_dir())
    try:
        uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    except (OSError, SystemExit) as exc:
        print(f"annot: failed to serve: {exc}", file=sys.stderr)
        return 1
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {"check": cmd_check, "suggest": cmd_suggest, "sb": cmd_sb, "serve": cmd_serve}
    try:
        return handlers[args.command](args)
    except AnnotError as exc:
        print(f"annot: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"annot: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    raise SystemExit(main())
