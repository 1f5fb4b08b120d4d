"""The ``mm`` command line.

Batch counterpart to the service: validate meta-models, load model documents,
run query pipelines, tag, compute metrics, report duplication, and re-export
canonically.  All output is byte-deterministic for a fixed input; failures
print one ``error: <reason>`` line on stderr and exit 1.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import MmkitError
from .interchange import (
    built_in_registry,
    export_model,
    import_metamodel,
    import_model,
    import_vcs_log,
)
from .metamodel import ClassDef, MetaModel, Multiplicity, TypeDef
from .model import Model
from .pipeline import run_pipeline
from .tags import cohesion, coupling, tag as apply_tag
from .tools import duplication_report


class CliError(Exception):
    pass


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror or exc}") from exc


def _write_text(path: str, text: str) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc.strerror or exc}") from exc


def _registry(args: argparse.Namespace) -> dict[str, MetaModel]:
    registry = built_in_registry()
    extra = getattr(args, "metamodel_file", None)
    if extra:
        meta_model = import_metamodel(_read_text(extra), registry)
        registry[meta_model.name] = meta_model
    return registry


def _load_model(args: argparse.Namespace) -> Model:
    path = args.model
    model = import_model(_read_text(path), _registry(args), name=Path(path).stem)
    return model


def _counts(model: Model) -> str:
    return (
        f"entities={len(model.entities)}"
        f" links={model.link_count()}"
        f" tags={len(model.tags)}"
    )


# -- commands -------------------------------------------------------------------


def _format_type(type_def: TypeDef) -> list[str]:
    table = type_def.slot_table
    flavor = "class" if isinstance(type_def, ClassDef) else "trait"
    lines = [f"{type_def.name} ({flavor}, {len(table)} slots)"]
    for slot in table.property_slots:
        origin = "" if slot.origin == type_def.name else f"  [{slot.origin}]"
        lines.append(f"  {slot.name}: {slot.kind.value}{origin}")
    for slot in table.link_slots:
        arity = "many" if slot.multiplicity is Multiplicity.MANY else "one"
        origin = "" if slot.origin == type_def.name else f"  [{slot.origin}]"
        lines.append(f"  {slot.name}: {arity} {slot.target}{origin}")
    return lines


def cmd_metamodel(args: argparse.Namespace) -> int:
    if args.action != "check":
        raise CliError(f"unknown metamodel action {args.action!r}")
    meta_model = import_metamodel(_read_text(args.file), built_in_registry())
    out = []
    for type_def in list(meta_model.traits.values()) + list(meta_model.classes.values()):
        out.extend(_format_type(type_def))
    print("\n".join(out))
    return 0


def cmd_import(args: argparse.Namespace) -> int:
    registry = _registry(args)
    model = import_model(_read_text(args.file), registry, name=Path(args.file).stem)
    if args.metamodel and model.metamodel.name != args.metamodel:
        raise CliError(
            f"document uses meta-model '{model.metamodel.name}', not '{args.metamodel}'"
        )
    if args.out:
        _write_text(args.out, export_model(model))
    print(_counts(model))
    return 0


def cmd_import_vcs(args: argparse.Namespace) -> int:
    model = import_vcs_log(_read_text(args.file), name=Path(args.file).stem)
    if args.out:
        _write_text(args.out, export_model(model))
    print(_counts(model))
    return 0


def cmd_query(args: argparse.Namespace) -> int:
    model = _load_model(args)
    result = run_pipeline(model, args.pipeline)
    for entity_id in result.ids:
        entity = model.entities[entity_id]
        print(f"{entity.id}\t{entity.type.name}\t{entity.name_or_empty()}")
    return 0


def cmd_tag(args: argparse.Namespace) -> int:
    model = _load_model(args)
    result = run_pipeline(model, args.pipeline)
    tag_obj = apply_tag(model, args.name, result.ids, color=args.color)
    _write_text(args.out or args.model, export_model(model))
    print(f"tag={tag_obj.name} members={len(tag_obj.members)}")
    return 0


def cmd_metrics(args: argparse.Namespace) -> int:
    model = _load_model(args)
    tag_obj = next((t for t in model.tags.values() if t.name == args.tag), None)
    if tag_obj is None:
        raise CliError(f"no tag named '{args.tag}'")
    print(f"cohesion={cohesion(tag_obj)!r} coupling={coupling(tag_obj)}")
    return 0


def cmd_dup(args: argparse.Namespace) -> int:
    model = _load_model(args)
    entities = [model.entities[i] for i in sorted(model.entities)]
    report = duplication_report(model, entities, args.min_tokens)
    print(json.dumps(report, indent=2, ensure_ascii=False))
    return 0


def cmd_export(args: argparse.Namespace) -> int:
    model = _load_model(args)
    _write_text(args.file, export_model(model))
    print(_counts(model))
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    from .service import Service, run_server

    service = Service(_registry(args))
    if args.model:
        service.add_model(_load_model(args))
    ui_dir = Path(args.ui).resolve() if args.ui else None
    if ui_dir is not None and not ui_dir.is_dir():
        raise CliError(f"ui directory not found: {ui_dir}")
    server = run_server(service, args.port, ui_dir)
    print(f"serving on http://127.0.0.1:{args.port}/", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mm", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("metamodel", help="validate a meta-model document")
    p.add_argument("action", choices=["check"])
    p.add_argument("file")
    p.set_defaults(func=cmd_metamodel)

    p = sub.add_parser("import", help="load a model document and print counts")
    p.add_argument("file")
    p.add_argument("--metamodel", help="name the document must conform to")
    p.add_argument("--metamodel-file", help="meta-model document to register first")
    p.add_argument("--out", help="write the canonical document here")
    p.set_defaults(func=cmd_import)

    p = sub.add_parser("import-vcs", help="load a commit-log CSV and print counts")
    p.add_argument("file")
    p.add_argument("--out", help="write the resulting model document here")
    p.set_defaults(func=cmd_import_vcs)

    p = sub.add_parser("query", help="run a query pipeline against a model")
    p.add_argument("pipeline")
    p.add_argument("--model", required=True, help="model document path")
    p.add_argument("--metamodel-file", help="meta-model document to register first")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("tag", help="tag the entities a pipeline selects")
    p.add_argument("pipeline")
    p.add_argument("--model", required=True, help="model document path")
    p.add_argument("--name", required=True, help="tag name")
    p.add_argument("--color", help="display color, freeform")
    p.add_argument("--out", help="write here instead of updating --model in place")
    p.add_argument("--metamodel-file", help="meta-model document to register first")
    p.set_defaults(func=cmd_tag)

    p = sub.add_parser("metrics", help="cohesion and coupling of a tag")
    p.add_argument("--model", required=True, help="model document path")
    p.add_argument("--tag", required=True, help="tag name")
    p.add_argument("--metamodel-file", help="meta-model document to register first")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("dup", help="duplication report over anchored sources")
    p.add_argument("--model", required=True, help="model document path")
    p.add_argument("--min-tokens", type=int, default=5)
    p.add_argument("--metamodel-file", help="meta-model document to register first")
    p.set_defaults(func=cmd_dup)

    p = sub.add_parser("export", help="write the canonical model document")
    p.add_argument("file", help="output path")
    p.add_argument("--model", required=True, help="model document path")
    p.add_argument("--metamodel-file", help="meta-model document to register first")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--port", type=int, default=8787)
    p.add_argument("--model", help="model document to preload")
    p.add_argument("--ui", help="directory with a static UI to serve at /")
    p.add_argument("--metamodel-file", help="meta-model document to register first")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (MmkitError, CliError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
