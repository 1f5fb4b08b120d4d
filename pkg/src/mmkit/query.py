"""Scope-aware navigation over entity models.

Scope operations follow the containment forest: ``at_scope`` lifts each
input to its first ancestor (itself included) conforming to the requested
type and silently drops inputs that have none, ``to_scope`` descends to all
conforming descendants.  Dependency queries aggregate over an entity's
whole containment subtree while excluding edges internal to it, so asking a
package for its outgoing invocations returns what the package's content
calls elsewhere; on a group they run per member and union the results.
All results are duplicate-free and ordered by entity id.

The engine only reads slot-table metadata (container flags, association
kinds); no entity type is special-cased.
"""

from __future__ import annotations

from typing import Any, Iterable, Sequence

from .errors import QueryError
from .metamodel import TraitCategory, TraitDef, TypeDef
from .model import ABSENT, Entity, Model


class QueryResult:
    """An ordered, duplicate-free group of entities from one model.

    Dependency queries attach provenance: one (source, target, kind) triple
    per association instance that contributed to the result.
    """

    def __init__(
        self,
        model: Model | None,
        items: Iterable[Entity],
        provenance: Sequence[tuple[Entity, Entity, str]] | None = None,
    ):
        unique: dict[int, Entity] = {}
        for entity in items:
            unique.setdefault(entity.id, entity)
        self.model = model
        self.items: tuple[Entity, ...] = tuple(
            unique[i] for i in sorted(unique)
        )
        self.provenance = tuple(provenance) if provenance is not None else None

    @property
    def ids(self) -> tuple[int, ...]:
        return tuple(e.id for e in self.items)

    def __iter__(self):
        return iter(self.items)

    def __len__(self) -> int:
        return len(self.items)

    def __contains__(self, entity: Entity) -> bool:
        return any(e.id == entity.id for e in self.items)

    def __repr__(self) -> str:
        return f"<QueryResult {list(self.ids)}>"

    # chaining sugar, mirroring the module-level operations

    def at_scope(self, scope_type: TypeDef | str) -> "QueryResult":
        return at_scope(self, scope_type)

    def to_scope(self, scope_type: TypeDef | str) -> "QueryResult":
        return to_scope(self, scope_type)

    def outgoing(self, kind: TraitDef | str) -> "QueryResult":
        return query_outgoing(self, kind)

    def incoming(self, kind: TraitDef | str) -> "QueryResult":
        return query_incoming(self, kind)

    def all_outgoing(self) -> "QueryResult":
        return query_all_outgoing(self)

    def all_incoming(self) -> "QueryResult":
        return query_all_incoming(self)

    def children(self) -> "QueryResult":
        return children(self)

    def parent(self) -> "QueryResult":
        return parent(self)


def _group(receiver: Entity | QueryResult | Iterable[Entity]) -> tuple[Model | None, list[Entity]]:
    if isinstance(receiver, Entity):
        return receiver.model, [receiver]
    if isinstance(receiver, QueryResult):
        return receiver.model, list(receiver.items)
    entities = list(receiver)
    return (entities[0].model if entities else None), entities


def _resolve_scope(model: Model, scope_type: TypeDef | str) -> str:
    if isinstance(scope_type, TypeDef):
        return scope_type.name
    found = model.metamodel.find_type(scope_type)
    if found is None:
        raise QueryError(f"unknown scope type {scope_type!r}")
    return found.name


def _resolve_kind(model: Model, kind: TraitDef | str) -> str:
    name = kind.name if isinstance(kind, TraitDef) else kind
    found = model.metamodel.find_type(name)
    if (
        not isinstance(found, TraitDef)
        or found.category is not TraitCategory.ASSOCIATION
    ):
        raise QueryError(f"{name!r} is not an association kind of this meta-model")
    return name


def at_scope(
    receiver: Entity | QueryResult | Iterable[Entity], scope_type: TypeDef | str
) -> QueryResult:
    """Lift each input to its nearest conforming ancestor, itself included.

    Inputs with no conforming ancestor are dropped.  Idempotent: applying
    the same scope twice changes nothing.
    """
    model, entities = _group(receiver)
    if model is None:
        return QueryResult(None, ())
    scope = _resolve_scope(model, scope_type)
    lifted: list[Entity] = []
    for entity in entities:
        node: Entity | None = entity
        while node is not None:
            if scope in node.type.ancestry:
                lifted.append(node)
                break
            node = model.container_of(node)
    return QueryResult(model, lifted)


def to_scope(
    receiver: Entity | QueryResult | Iterable[Entity], scope_type: TypeDef | str
) -> QueryResult:
    """All conforming containment descendants of the inputs, inputs included."""
    model, entities = _group(receiver)
    if model is None:
        return QueryResult(None, ())
    scope = _resolve_scope(model, scope_type)
    found: list[Entity] = []
    stack = list(entities)
    seen: set[int] = set()
    while stack:
        node = stack.pop()
        if node.id in seen:
            continue
        seen.add(node.id)
        if scope in node.type.ancestry:
            found.append(node)
        stack.extend(model.children_of(node))
    return QueryResult(model, found)


def _dependency_query(
    receiver: Entity | QueryResult | Iterable[Entity],
    kinds: set[str] | None,
    incoming: bool,
) -> QueryResult:
    """Dependencies of the receiver treated as ONE containment subtree.

    Edges with both endpoints inside the (union) subtree are internal and
    excluded.  This is the virtual-container reading used by tags; the
    public query functions apply it per member instead.
    """
    model, entities = _group(receiver)
    if model is None:
        return QueryResult(None, (), provenance=())
    if kinds is None:
        kinds = {k.name for k in model.metamodel.association_kinds()}
    subtree = model.subtree_ids(entities)
    items: list[Entity] = []
    provenance: list[tuple[Entity, Entity, str]] = []
    for source, target, kind in model.association_instances(kinds):
        inside_src = source.id in subtree
        inside_tgt = target.id in subtree
        if inside_src and inside_tgt:
            continue  # internal to the receiver's subtree
        if incoming and inside_tgt:
            items.append(source)
            provenance.append((source, target, kind))
        elif not incoming and inside_src:
            items.append(target)
            provenance.append((source, target, kind))
    return QueryResult(model, items, provenance=_sorted_triples(provenance))


def _sorted_triples(
    triples: Iterable[tuple[Entity, Entity, str]]
) -> tuple[tuple[Entity, Entity, str], ...]:
    unique = {(s.id, t.id, k): (s, t, k) for s, t, k in triples}
    return tuple(unique[key] for key in sorted(unique))


def _per_member_dependencies(
    receiver: Entity | QueryResult | Iterable[Entity],
    kinds: set[str] | None,
    incoming: bool,
) -> QueryResult:
    """Union of the single-entity query over each member of the receiver.

    Each member excludes only the edges internal to its own subtree, so a
    group of packages reports their pairwise dependencies rather than
    treating the whole group as one container.
    """
    model, entities = _group(receiver)
    if model is None:
        return QueryResult(None, (), provenance=())
    items: list[Entity] = []
    provenance: list[tuple[Entity, Entity, str]] = []
    for entity in entities:
        part = _dependency_query(entity, kinds, incoming)
        items.extend(part.items)
        provenance.extend(part.provenance or ())
    return QueryResult(model, items, provenance=_sorted_triples(provenance))


def query_outgoing(
    receiver: Entity | QueryResult | Iterable[Entity], kind: TraitDef | str
) -> QueryResult:
    """Dependencies of one kind leaving each receiver's containment subtree."""
    model, _ = _group(receiver)
    kinds = {_resolve_kind(model, kind)} if model is not None else None
    return _per_member_dependencies(receiver, kinds, incoming=False)


def query_incoming(
    receiver: Entity | QueryResult | Iterable[Entity], kind: TraitDef | str
) -> QueryResult:
    """Dependencies of one kind entering each receiver's containment subtree."""
    model, _ = _group(receiver)
    kinds = {_resolve_kind(model, kind)} if model is not None else None
    return _per_member_dependencies(receiver, kinds, incoming=True)


def query_all_outgoing(
    receiver: Entity | QueryResult | Iterable[Entity],
) -> QueryResult:
    """Union of query_outgoing over every association kind of the meta-model."""
    return _per_member_dependencies(receiver, None, incoming=False)


def query_all_incoming(
    receiver: Entity | QueryResult | Iterable[Entity],
) -> QueryResult:
    """Union of query_incoming over every association kind of the meta-model."""
    return _per_member_dependencies(receiver, None, incoming=True)


def children(receiver: Entity | QueryResult | Iterable[Entity]) -> QueryResult:
    model, entities = _group(receiver)
    if model is None:
        return QueryResult(None, ())
    out: list[Entity] = []
    for entity in entities:
        out.extend(model.children_of(entity))
    return QueryResult(model, out)


def parent(receiver: Entity | QueryResult | Iterable[Entity]) -> QueryResult:
    model, entities = _group(receiver)
    if model is None:
        return QueryResult(None, ())
    out: list[Entity] = []
    for entity in entities:
        found = model.container_of(entity)
        if found is not None:
            out.append(found)
    return QueryResult(model, out)


def describe(receiver: Entity | QueryResult) -> list[tuple[str, str, Any]]:
    """Rows of (slot name, kind, value) for an entity, in slot-table order.

    Property rows carry the stored value or ABSENT, link rows the list of
    linked ids.  For a group of two or more entities the rows are the slots
    common to every member's type, values elided.
    """
    if isinstance(receiver, QueryResult) and len(receiver) != 1:
        ordered: list[tuple[str, str]] | None = None
        for entity in receiver:
            table = entity.type.slot_table
            mine = [(s.name, s.kind.value) for s in table.property_slots]
            mine += [(s.name, "link") for s in table.link_slots]
            if ordered is None:
                ordered = mine
            else:
                keep = set(mine)
                ordered = [key for key in ordered if key in keep]
        return [(name, kind, ABSENT) for name, kind in ordered or []]

    entity = receiver.items[0] if isinstance(receiver, QueryResult) else receiver
    rows: list[tuple[str, str, Any]] = []
    table = entity.type.slot_table
    for slot in table.property_slots:
        rows.append((slot.name, slot.kind.value, entity.values.get(slot.name, ABSENT)))
    for link in table.link_slots:
        rows.append((link.name, "link", list(entity.links.get(link.name, ()))))
    return rows
