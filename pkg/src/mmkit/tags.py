"""Tags: named entity groups that behave like virtual containers.

A tag lives in its model's id space, may hold any entities, and answers
dependency queries as if it were a package containing its members.  The two
derived metrics treat each dependency instance as internal (both endpoints
lift into the member set) or external (exactly one endpoint does):

    cohesion = internal / (internal + external), 0 when there are no edges
    coupling = external
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .errors import ModelError
from .model import Entity, Model
from .query import QueryResult, _dependency_query


@dataclass(eq=False)
class Tag:
    id: int
    name: str
    model: Model
    color: str | None = None
    members: list[int] = field(default_factory=list)

    def __repr__(self) -> str:
        return f"<Tag {self.name} ({len(self.members)} members)>"

    def member_entities(self) -> list[Entity]:
        return [self.model.entity(i) for i in self.members]


def _member_id(model: Model, entity: Entity | int) -> int:
    if isinstance(entity, int):
        entity = model.entity(entity)
    model._check_mine(entity)
    return entity.id


def tag(
    model: Model,
    name: str,
    entities: Iterable[Entity | int] = (),
    color: str | None = None,
) -> Tag:
    """Create a tag, or extend an existing one with more members."""
    found = model.tags.get(name)
    if found is None:
        found = Tag(id=model._take_id(), name=name, model=model, color=color)
        model.tags[name] = found
    elif color is not None:
        found.color = color
    for entity in entities:
        member = _member_id(model, entity)
        if member not in found.members:
            found.members.append(member)
    return found


def untag(tag_obj: Tag, entities: Iterable[Entity | int]) -> None:
    """Remove members; entities that are not members are ignored."""
    for entity in entities:
        member = entity if isinstance(entity, int) else entity.id
        if member in tag_obj.members:
            tag_obj.members.remove(member)


def remove_tag(model: Model, tag_obj: Tag) -> None:
    if model.tags.get(tag_obj.name) is not tag_obj:
        raise ModelError(f"tag {tag_obj.name!r} does not belong to this model")
    del model.tags[tag_obj.name]


def query_tag_dependencies(tag_obj: Tag, direction: str = "outgoing") -> QueryResult:
    """Aggregated dependencies of the member group, member-internal edges excluded."""
    if direction not in ("outgoing", "incoming"):
        raise ModelError(f"direction must be outgoing or incoming, got {direction!r}")
    return _dependency_query(
        tag_obj.member_entities(), None, incoming=direction == "incoming"
    )


def _edge_split(tag_obj: Tag) -> tuple[int, int]:
    model = tag_obj.model
    inside = model.subtree_ids(tag_obj.member_entities())
    internal = external = 0
    for source, target, _kind in model.association_instances():
        in_src = source.id in inside
        in_tgt = target.id in inside
        if in_src and in_tgt:
            internal += 1
        elif in_src or in_tgt:
            external += 1
    return internal, external


def cohesion(tag_obj: Tag) -> float:
    internal, external = _edge_split(tag_obj)
    if internal + external == 0:
        return 0.0
    return internal / (internal + external)


def coupling(tag_obj: Tag) -> int:
    return _edge_split(tag_obj)[1]
