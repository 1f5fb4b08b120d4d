"""JSON interchange for models and meta-models, plus a commit-log importer.

Model documents are canonical: UTF-8, compact separators, fixed key order,
entities sorted by id, links stored once from their primary end and sorted
by (source, slot, target).  Exporting an imported document reproduces it
byte for byte.  Meta-model documents mirror the builder operations one to
one, so anything the DSL can build is expressible as data.
"""

from __future__ import annotations

import csv
import io
import json
from typing import Any

from .errors import InterchangeError, MmkitError
from .metamodel import (
    AssociationShape,
    ClassDef,
    MetaModel,
    MetaModelBuilder,
    TraitCategory,
    TraitDef,
    ValueKind,
    standard_library,
)
from .model import Model
from .tags import tag as make_tag

FORMAT_VERSION = "1.0"


def _dumps(doc: Any) -> str:
    try:
        return json.dumps(doc, separators=(",", ":"), ensure_ascii=False)
    except (TypeError, ValueError) as exc:
        raise InterchangeError(f"value not serializable: {exc}") from exc


def _loads(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InterchangeError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise InterchangeError("document root must be an object")
    return doc


def _check_version(doc: dict) -> None:
    version = doc.get("formatVersion")
    if version != FORMAT_VERSION:
        raise InterchangeError(f"unsupported format version {version!r}")


# -- model documents -----------------------------------------------------------


def export_model(model: Model) -> str:
    entities = []
    for entity_id in sorted(model.entities):
        entity = model.entities[entity_id]
        record: dict[str, Any] = {"id": entity_id, "type": entity.type.name}
        for slot in entity.table.property_slots:
            if slot.name in entity.values:
                record[slot.name] = entity.values[slot.name]
        entities.append(record)

    links = []
    for entity_id in sorted(model.entities):
        entity = model.entities[entity_id]
        for slot in entity.table.link_slots:
            if not slot.is_primary:
                continue
            for target_id in sorted(entity.links.get(slot.name, ())):
                links.append(
                    {"slot": slot.name, "source": entity_id, "target": target_id}
                )
    links.sort(key=lambda l: (l["source"], l["slot"], l["target"]))

    tag_records = []
    for tag_obj in model.tags.values():
        record = {"name": tag_obj.name}
        if tag_obj.color is not None:
            record["color"] = tag_obj.color
        record["members"] = list(tag_obj.members)
        tag_records.append(record)

    doc: dict[str, Any] = {
        "formatVersion": FORMAT_VERSION,
        "metamodel": model.metamodel.name,
        "entities": entities,
        "links": links,
        "tags": tag_records,
    }
    if model.source_texts:
        doc["sourceFiles"] = [
            [path, model.source_texts[path]] for path in sorted(model.source_texts)
        ]
    return _dumps(doc)


def import_model(
    text: str, registry: dict[str, MetaModel], name: str = "imported"
) -> Model:
    doc = _loads(text)
    _check_version(doc)
    metamodel_name = doc.get("metamodel")
    metamodel = registry.get(metamodel_name)
    if metamodel is None:
        raise InterchangeError(f"unknown meta-model {metamodel_name!r}")

    model = Model(name, metamodel)
    for path, content in doc.get("sourceFiles", ()):
        if not isinstance(path, str) or not isinstance(content, str):
            raise InterchangeError("sourceFiles entries must be [path, text] pairs")
        model.add_source_text(path, content)

    previous_id = 0
    for index, record in enumerate(doc.get("entities", ())):
        if not isinstance(record, dict):
            raise InterchangeError(f"entity record must be an object (entity index {index})")
        entity_id = record.get("id")
        type_name = record.get("type")
        if not isinstance(entity_id, int) or entity_id <= previous_id:
            raise InterchangeError(
                f"entity ids must be strictly increasing (entity index {index})"
            )
        previous_id = entity_id
        type_def = metamodel.find_type(type_name) if isinstance(type_name, str) else None
        if type_def is None or not metamodel.instantiable(type_def):
            raise InterchangeError(
                f"unknown type {type_name!r} (entity index {index})"
            )
        entity = model.create_entity(type_def, entity_id=entity_id)
        for key, value in record.items():
            if key in ("id", "type"):
                continue
            try:
                entity.set_property(key, value)
            except MmkitError as exc:
                raise InterchangeError(f"{exc} (entity index {index})") from exc

    for index, record in enumerate(doc.get("links", ())):
        if not isinstance(record, dict):
            raise InterchangeError(f"link record must be an object (link index {index})")
        try:
            source = model.entity(record.get("source"))
            target = model.entity(record.get("target"))
            model.link(source, record.get("slot"), target)
        except MmkitError as exc:
            raise InterchangeError(f"{exc} (link index {index})") from exc

    for index, record in enumerate(doc.get("tags", ())):
        if not isinstance(record, dict) or not isinstance(record.get("name"), str):
            raise InterchangeError(f"bad tag record (tag index {index})")
        try:
            members = [model.entity(i) for i in record.get("members", ())]
        except MmkitError as exc:
            raise InterchangeError(f"{exc} (tag index {index})") from exc
        make_tag(model, record["name"], members, color=record.get("color"))

    return model


# -- meta-model documents ---------------------------------------------------------


def export_metamodel(meta_model: MetaModel) -> str:
    """Declarative mirror of the builder calls that produced ``meta_model``."""
    trait_records = []
    for trait in meta_model.traits.values():
        record: dict[str, Any] = {"name": trait.name, "category": trait.category.value}
        if trait.used_traits:
            record["uses"] = [t.name for t in trait.used_traits]
        if trait.own_properties:
            record["properties"] = [
                {"name": p.name, "kind": p.kind.value} for p in trait.own_properties
            ]
        trait_records.append(record)

    class_records = []
    for cls in meta_model.classes.values():
        record = {"name": cls.name}
        if cls.superclass is not None:
            record["superclass"] = cls.superclass.name
        if cls.used_traits:
            record["uses"] = [t.name for t in cls.used_traits]
        if cls.own_properties:
            record["properties"] = [
                {"name": p.name, "kind": p.kind.value} for p in cls.own_properties
            ]
        if cls.resolutions:
            record["resolutions"] = [
                {
                    "kind": r.kind,
                    "trait": r.source_trait.name,
                    "slot": r.slot_name,
                    **({"newName": r.new_name} if r.new_name else {}),
                }
                for r in cls.resolutions
            ]
        class_records.append(record)

    pairs = []
    for type_def in list(meta_model.classes.values()) + list(meta_model.traits.values()):
        for end in type_def.association_ends:
            if not end.is_primary:
                continue
            shape = _shape_of(end)
            record = {
                "a": end.owner.name,
                "b": end.target.name,
                "shape": shape.value,
                "nameA": end.name,
                "nameB": end.opposite.name,
            }
            if end.kind is not None:
                record["kind"] = end.kind.name
            pairs.append((end.pair_index, record))
    pairs.sort(key=lambda item: item[0])

    doc = {
        "formatVersion": FORMAT_VERSION,
        "name": meta_model.name,
        "imports": [m.name for m in meta_model.imports],
        "traits": trait_records,
        "classes": class_records,
        "associations": [record for _, record in pairs],
    }
    return _dumps(doc)


def _shape_of(end) -> AssociationShape:
    from .metamodel import Multiplicity

    if end.is_container_end:
        return AssociationShape.CONTAINMENT_ONE_TO_MANY
    if end.opposite.is_container_end:
        return AssociationShape.CONTAINMENT_MANY_TO_ONE
    if end.multiplicity is Multiplicity.ONE:
        return AssociationShape.MANY_TO_ONE
    if end.opposite.multiplicity is Multiplicity.ONE:
        return AssociationShape.ONE_TO_MANY
    return AssociationShape.MANY_TO_MANY


def import_metamodel(text: str, registry: dict[str, MetaModel]) -> MetaModel:
    doc = _loads(text)
    _check_version(doc)
    name = doc.get("name")
    if not isinstance(name, str) or not name:
        raise InterchangeError("meta-model document needs a name")

    imports = []
    for import_name in doc.get("imports", ()):
        imported = registry.get(import_name)
        if imported is None:
            raise InterchangeError(f"unknown import {import_name!r}")
        imports.append(imported)

    builder = MetaModelBuilder(name, imports=imports)
    trait_records = doc.get("traits", ())
    class_records = doc.get("classes", ())

    for record in trait_records:
        category = record.get("category", TraitCategory.CORE.value)
        try:
            builder.new_trait(record["name"], TraitCategory(category))
        except (KeyError, ValueError) as exc:
            raise InterchangeError(f"bad trait record: {exc}") from exc
    for record in class_records:
        try:
            builder.new_class(record["name"])
        except KeyError as exc:
            raise InterchangeError(f"bad class record: {exc}") from exc

    for record in trait_records:
        owner = builder.find(record["name"])
        for used in record.get("uses", ()):
            builder.add_generalization(owner, builder.trait(used))
        for prop in record.get("properties", ()):
            _add_property(builder, owner, prop)
    for record in class_records:
        owner = builder.find(record["name"])
        superclass = record.get("superclass")
        if superclass is not None:
            builder.add_generalization(owner, builder.find(superclass))
        for used in record.get("uses", ()):
            builder.add_generalization(owner, builder.trait(used))
        for prop in record.get("properties", ()):
            _add_property(builder, owner, prop)
        for res in record.get("resolutions", ()):
            trait = builder.trait(res["trait"])
            if res.get("kind") == "alias":
                builder.alias_slot(owner, trait, res["slot"], res["newName"])
            elif res.get("kind") == "exclude":
                builder.exclude_slot(owner, trait, res["slot"])
            else:
                raise InterchangeError(f"bad resolution kind {res.get('kind')!r}")

    for record in doc.get("associations", ()):
        try:
            a = builder.find(record["a"])
            b = builder.find(record["b"])
            shape = AssociationShape(record["shape"])
        except (KeyError, ValueError) as exc:
            raise InterchangeError(f"bad association record: {exc}") from exc
        kind = None
        if record.get("kind") is not None:
            kind = builder.trait(record["kind"])
        builder.add_association(a, b, shape, record["nameA"], record["nameB"], kind=kind)

    return builder.generate()


def _add_property(builder: MetaModelBuilder, owner, prop: dict) -> None:
    try:
        builder.add_property(owner, prop["name"], ValueKind(prop["kind"]))
    except (KeyError, ValueError) as exc:
        raise InterchangeError(f"bad property record: {exc}") from exc


# -- commit-log CSV -----------------------------------------------------------------

_VCS_COLUMNS = ["revision", "date", "author", "message", "files"]
_VCS_MM: MetaModel | None = None


def commit_log_metamodel() -> MetaModel:
    """Files, commits, and authors: the classic tiny versioning meta-model."""
    global _VCS_MM
    if _VCS_MM is not None:
        return _VCS_MM
    b = MetaModelBuilder("vcs", imports=(standard_library(),))
    entity = b.new_class("Entity")
    file_cls = b.new_class("File")
    commit = b.new_class("Commit")
    author = b.new_class("Author")
    named = b.trait("TNamedEntity")
    b.add_generalization(file_cls, entity)
    b.add_generalization(file_cls, named)
    b.add_generalization(commit, entity)
    b.add_generalization(author, entity)
    b.add_generalization(author, named)
    b.add_property(commit, "revision", ValueKind.NUMBER)
    b.add_property(commit, "date", ValueKind.OBJECT)
    b.add_property(commit, "message", ValueKind.STRING)
    b.add_association(
        file_cls, commit, AssociationShape.MANY_TO_MANY, "commits", "files"
    )
    b.add_association(
        commit, author, AssociationShape.MANY_TO_ONE, "author", "commits"
    )
    _VCS_MM = b.generate()
    return _VCS_MM


def import_vcs_log(text: str, name: str = "vcs-log") -> Model:
    """Build a commit-log model from CSV with ;-separated file lists."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise InterchangeError("empty commit log: missing header") from None
    if header != _VCS_COLUMNS:
        expected = ",".join(_VCS_COLUMNS)
        raise InterchangeError(f"unexpected header {','.join(header)!r}, want {expected!r}")

    model = Model(name, commit_log_metamodel())
    files: dict[str, Any] = {}
    authors: dict[str, Any] = {}
    for row in reader:
        line = reader.line_num
        if not row:
            continue
        if len(row) != len(_VCS_COLUMNS):
            raise InterchangeError(f"malformed row with {len(row)} fields (line {line})")
        revision_text, date, author_name, message, file_list = row
        try:
            revision = int(revision_text)
        except ValueError:
            raise InterchangeError(
                f"bad revision {revision_text!r} (line {line})"
            ) from None
        commit = model.create_entity("Commit")
        commit.set_property("revision", revision)
        commit.set_property("date", date)
        commit.set_property("message", message)
        author = authors.get(author_name)
        if author is None:
            author = model.create_entity("Author")
            author.set_property("name", author_name)
            authors[author_name] = author
        model.link(commit, "author", author)
        for path in filter(None, file_list.split(";")):
            file_entity = files.get(path)
            if file_entity is None:
                file_entity = model.create_entity("File")
                file_entity.set_property("name", path)
                files[path] = file_entity
            model.link(file_entity, "commits", commit)
    return model


def built_in_registry() -> dict[str, MetaModel]:
    return {"std": standard_library(), "vcs": commit_log_metamodel()}
