"""Entity models: typed instances, inverse-maintained links, containment.

An entity stores exactly the slots its generated type declares.  Reads of
declared-but-unset properties return the ABSENT marker; any access outside
the slot table raises.  Links are symmetric (both ends always agree), to-one
slots displace their previous value, and container-end links keep the
containment relation a forest.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Any, Iterable, Iterator

from .errors import (
    ConformanceError,
    ContainmentCycleError,
    ForeignEntityError,
    KindMismatchError,
    ModelError,
    UnknownEntityError,
    UnknownSlotError,
    UnknownTypeError,
)
from .metamodel import (
    LinkSlot,
    MetaModel,
    Multiplicity,
    SlotTable,
    TypeDef,
    ValueKind,
)

if TYPE_CHECKING:
    from .tags import Tag


class _Absent:
    _instance = None

    def __new__(cls) -> "_Absent":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "ABSENT"

    def __bool__(self) -> bool:
        return False


ABSENT = _Absent()


@dataclass(frozen=True)
class SourceAnchor:
    """A 1-based inclusive character range inside one source file."""

    file: str
    start: int
    end: int

    def check_against(self, text: str) -> None:
        if not (1 <= self.start <= self.end <= len(text)):
            raise ModelError(
                f"anchor {self.file}:{self.start}-{self.end} outside text "
                f"of length {len(text)}"
            )

    def slice(self, text: str) -> str:
        self.check_against(text)
        return text[self.start - 1 : self.end]


class Entity:
    """One instance of a generated type.  Created through Model.create_entity."""

    __slots__ = ("model", "id", "type", "values", "links")

    def __init__(self, model: "Model", entity_id: int, type_def: TypeDef):
        self.model = model
        self.id = entity_id
        self.type = type_def
        self.values: dict[str, Any] = {}
        self.links: dict[str, list[int]] = {}

    def __repr__(self) -> str:
        return f"<Entity {self.id} {self.type.name}>"

    @property
    def table(self) -> SlotTable:
        return self.type.slot_table

    def slot_capacity(self) -> int:
        """How many slots this entity can store: exactly its SlotTable size."""
        return len(self.table)

    # -- properties ---------------------------------------------------------

    def set_property(self, name: str, value: Any) -> None:
        slot = self.table.property_slot(name)
        if slot is None:
            raise UnknownSlotError(
                f"unknown slot '{name}' on type '{self.type.name}'"
            )
        kind = slot.kind
        ok = (
            (kind is ValueKind.STRING and isinstance(value, str))
            or (
                kind is ValueKind.NUMBER
                and isinstance(value, (int, float))
                and not isinstance(value, bool)
            )
            or (kind is ValueKind.BOOLEAN and isinstance(value, bool))
            or kind is ValueKind.OBJECT
        )
        if not ok:
            raise KindMismatchError(
                f"slot '{name}' on type '{self.type.name}' holds {kind.value}, "
                f"got {type(value).__name__}"
            )
        self.values[name] = value

    def get_property(self, name: str) -> Any:
        if self.table.property_slot(name) is None:
            raise UnknownSlotError(
                f"unknown slot '{name}' on type '{self.type.name}'"
            )
        return self.values.get(name, ABSENT)

    def name_or_empty(self) -> str:
        """The name property when declared and set, otherwise ''."""
        if self.table.property_slot("name") is None:
            return ""
        value = self.values.get("name", "")
        return value if isinstance(value, str) else ""

    # -- links ----------------------------------------------------------------

    def linked(self, slot_name: str) -> list["Entity"]:
        slot = self.table.link_slot(slot_name)
        if slot is None:
            raise UnknownSlotError(
                f"unknown slot '{slot_name}' on type '{self.type.name}'"
            )
        return [self.model.entity(i) for i in self.links.get(slot_name, ())]


class Model:
    """A mutable entity graph over one generated meta-model.

    Single writer, any number of readers.  Entity ids are unique for the
    lifetime of the model and never reused after deletion.  Tags share the
    same id space.
    """

    def __init__(self, name: str, metamodel: MetaModel):
        if not metamodel.generated:
            raise UnknownTypeError(
                f"meta-model {metamodel.name!r} must be generated first"
            )
        self.name = name
        self.metamodel = metamodel
        self.entities: dict[int, Entity] = {}
        self.tags: dict[str, "Tag"] = {}
        self.source_texts: dict[str, str] = {}
        self._next_id = 1

    def __repr__(self) -> str:
        return f"<Model {self.name} ({len(self.entities)} entities)>"

    # -- entity lifecycle -----------------------------------------------------

    def _take_id(self, wanted: int | None = None) -> int:
        if wanted is None:
            wanted = self._next_id
        elif wanted < 1:
            raise UnknownEntityError(f"entity ids are positive, got {wanted}")
        elif wanted in self.entities or any(
            t.id == wanted for t in self.tags.values()
        ):
            raise UnknownEntityError(f"id {wanted} already in use")
        self._next_id = max(self._next_id, wanted + 1)
        return wanted

    def create_entity(self, type_def: TypeDef | str, entity_id: int | None = None) -> Entity:
        if isinstance(type_def, str):
            type_def = self.metamodel.require_type(type_def)
        if self.metamodel.find_type(type_def.name) is not type_def:
            raise UnknownTypeError(
                f"type {type_def.name!r} does not belong to meta-model "
                f"{self.metamodel.name!r}"
            )
        if not self.metamodel.instantiable(type_def):
            raise UnknownTypeError(
                f"type {type_def.name!r} is a composition fragment and cannot "
                "be instantiated"
            )
        entity = Entity(self, self._take_id(entity_id), type_def)
        self.entities[entity.id] = entity
        return entity

    def entity(self, entity_id: int) -> Entity:
        found = self.entities.get(entity_id)
        if found is None:
            raise UnknownEntityError(f"no entity with id {entity_id}")
        return found

    def lookup(self, item_id: int) -> "Entity | Tag | None":
        """Resolve an id to an entity or a tag (tags share the id space)."""
        found = self.entities.get(item_id)
        if found is not None:
            return found
        for tag in self.tags.values():
            if tag.id == item_id:
                return tag
        return None

    def delete_entity(self, entity: Entity) -> None:
        self._check_mine(entity)
        for slot in entity.table.link_slots:
            for partner_id in list(entity.links.get(slot.name, ())):
                self.unlink(entity, slot.name, self.entity(partner_id))
        del self.entities[entity.id]
        for tag in self.tags.values():
            if entity.id in tag.members:
                tag.members.remove(entity.id)

    def _check_mine(self, entity: Entity) -> None:
        if entity.model is not self or self.entities.get(entity.id) is not entity:
            raise ForeignEntityError(
                f"entity {entity.id} does not live in model {self.name!r}"
            )

    # -- links ----------------------------------------------------------------

    def _link_slot(self, entity: Entity, slot_name: str) -> LinkSlot:
        slot = entity.table.link_slot(slot_name)
        if slot is None:
            raise UnknownSlotError(
                f"unknown slot '{slot_name}' on type '{entity.type.name}'"
            )
        return slot

    def link(self, a: Entity, slot_name: str, b: Entity) -> None:
        self._check_mine(a)
        self._check_mine(b)
        slot = self._link_slot(a, slot_name)
        if slot.target not in b.type.ancestry:
            raise ConformanceError(
                f"slot '{slot_name}' on '{a.type.name}' links to "
                f"'{slot.target}', got '{b.type.name}'"
            )
        if b.id in a.links.get(slot_name, ()):
            return  # links form an ordered set, never duplicated

        if slot.is_container_end or slot.is_child_end:
            container, child = (a, b) if slot.is_container_end else (b, a)
            node: Entity | None = container
            while node is not None:
                if node is child:
                    raise ContainmentCycleError(
                        f"linking {child.id} under {container.id} would close "
                        "a containment loop"
                    )
                node = self.container_of(node)
            self._drop_parent(child)

        opposite = slot.opposite_name
        if slot.multiplicity is Multiplicity.ONE:
            for existing in list(a.links.get(slot_name, ())):
                self.unlink(a, slot_name, self.entity(existing))
        b_slot = b.table.link_slot(opposite)
        if b_slot is not None and b_slot.multiplicity is Multiplicity.ONE:
            for existing in list(b.links.get(opposite, ())):
                self.unlink(b, opposite, self.entity(existing))

        a.links.setdefault(slot_name, []).append(b.id)
        b.links.setdefault(opposite, []).append(a.id)

    def unlink(self, a: Entity, slot_name: str, b: Entity) -> None:
        self._check_mine(a)
        slot = self._link_slot(a, slot_name)
        bucket = a.links.get(slot_name, [])
        if b.id not in bucket:
            return
        bucket.remove(b.id)
        other = b.links.get(slot.opposite_name, [])
        if a.id in other:
            other.remove(a.id)

    def _drop_parent(self, child: Entity) -> None:
        for slot in child.table.link_slots:
            if slot.is_child_end:
                for parent_id in list(child.links.get(slot.name, ())):
                    self.unlink(child, slot.name, self.entity(parent_id))

    # -- containment -----------------------------------------------------------

    def container_of(self, entity: Entity) -> Entity | None:
        for slot in entity.table.link_slots:
            if slot.is_child_end:
                bucket = entity.links.get(slot.name)
                if bucket:
                    return self.entity(bucket[0])
        return None

    def children_of(self, entity: Entity) -> list[Entity]:
        out: list[Entity] = []
        for slot in entity.table.link_slots:
            if slot.is_container_end:
                out.extend(self.entity(i) for i in entity.links.get(slot.name, ()))
        return out

    def subtree_ids(self, roots: Iterable[Entity]) -> set[int]:
        """Ids of the given entities plus all containment descendants."""
        seen: set[int] = set()
        stack = [e for e in roots]
        while stack:
            current = stack.pop()
            if current.id in seen:
                continue
            seen.add(current.id)
            stack.extend(self.children_of(current))
        return seen

    def link_count(self) -> int:
        """Stored links, each counted once from its primary end."""
        total = 0
        for entity in self.entities.values():
            for slot in entity.table.link_slots:
                if slot.is_primary:
                    total += len(entity.links.get(slot.name, ()))
        return total

    # -- dependencies ------------------------------------------------------------

    def association_instances(
        self, kinds: set[str] | None = None
    ) -> Iterator[tuple[Entity, Entity, str]]:
        """Every dependency link as a (source, target, kind) triple.

        Triples are derived from source-role slots only, so each stored link
        appears exactly once, ordered by source id, slot order, link order.
        """
        for entity_id in sorted(self.entities):
            entity = self.entities[entity_id]
            for slot in entity.table.link_slots:
                if slot.kind is None or slot.role is None or slot.role.value != "source":
                    continue
                if kinds is not None and slot.kind not in kinds:
                    continue
                for target_id in entity.links.get(slot.name, ()):
                    yield entity, self.entity(target_id), slot.kind

    # -- source text ---------------------------------------------------------------

    def add_source_text(self, path: str, text: str) -> None:
        self.source_texts[path] = text

    def source_anchor_of(self, entity: Entity) -> SourceAnchor | None:
        """Follow the entity's anchor link, when its meta-model has anchors."""
        anchor_trait = self.metamodel.find_type("TSourceAnchor")
        if anchor_trait is None:
            return None
        for slot in entity.table.link_slots:
            target = self.metamodel.find_type(slot.target)
            if target is None or "TSourceAnchor" not in target.ancestry:
                continue
            for anchor_id in entity.links.get(slot.name, ()):
                anchor = self.entity(anchor_id)
                file_name = anchor.values.get("file")
                start = anchor.values.get("start")
                end = anchor.values.get("end")
                if not isinstance(file_name, str) or not isinstance(start, int):
                    continue
                if not isinstance(end, int):
                    continue
                found = SourceAnchor(file_name, start, end)
                text = self.source_texts.get(file_name)
                if text is None:
                    return None
                found.check_against(text)
                return found
        return None

    def source_slice(self, entity: Entity) -> str | None:
        anchor = self.source_anchor_of(entity)
        if anchor is None:
            return None
        return anchor.slice(self.source_texts[anchor.file])
