"""Trait-composable meta-models compiled to flat slot tables.

A meta-model is built from traits (reusable slot fragments sorted into the
association / technical / core / terminal categories) and classes (single
inheritance plus any number of used traits).  Generation flattens every type
into a SlotTable listing exactly the property and link slots its instances
may hold.  Same-name collisions abort generation unless the class carries an
alias or exclude resolution for one of the offending slots.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum

from .errors import (
    CompositionCycleError,
    DanglingReferenceError,
    DuplicateNameError,
    NotGeneratedError,
    ReadOnlyNamespaceError,
    SlotConflictError,
    UnknownTypeError,
)

_IDENT = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


class ValueKind(str, Enum):
    """Primitive kinds a property slot may hold."""

    STRING = "String"
    NUMBER = "Number"
    BOOLEAN = "Boolean"
    OBJECT = "Object"


class TraitCategory(str, Enum):
    ASSOCIATION = "association"
    TECHNICAL = "technical"
    CORE = "core"
    TERMINAL = "terminal"


class Multiplicity(str, Enum):
    ONE = "one"
    MANY = "many"


class AssociationShape(str, Enum):
    MANY_TO_MANY = "manyToMany"
    MANY_TO_ONE = "manyToOne"
    ONE_TO_MANY = "oneToMany"
    CONTAINMENT_MANY_TO_ONE = "containmentManyToOne"
    CONTAINMENT_ONE_TO_MANY = "containmentOneToMany"


class EndRole(str, Enum):
    """Which side of a dependency instance an association end's owner is."""

    SOURCE = "source"
    TARGET = "target"


def _check_ident(name: str, what: str) -> None:
    if not isinstance(name, str) or not _IDENT.match(name):
        raise DuplicateNameError(f"invalid {what} name: {name!r}")


@dataclass(eq=False)
class PropertyDef:
    name: str
    kind: ValueKind
    owner: "TypeDef | None" = None


@dataclass(eq=False)
class AssociationEndDef:
    """One navigable end of an association pair.

    The pair is symmetric (``end.opposite.opposite is end``).  At most one end
    of a pair is a container end; the children of an entity are the values of
    its container-end slots.  ``kind`` names the association trait the pair
    instantiates, if any, and ``role`` says which side of such a dependency
    the owner is.  Exactly one end per pair is primary: interchange stores
    each link once, from its primary side.
    """

    name: str
    owner: "TypeDef"
    target: "TypeDef"
    multiplicity: Multiplicity
    is_container_end: bool = False
    kind: "TraitDef | None" = None
    role: EndRole | None = None
    is_primary: bool = False
    opposite: "AssociationEndDef | None" = None
    pair_index: int = 0  # creation order within the owning meta-model


@dataclass(eq=False)
class TypeDef:
    name: str
    own_properties: list[PropertyDef] = field(default_factory=list)
    association_ends: list[AssociationEndDef] = field(default_factory=list)
    # Filled by generate().
    _slot_table: "SlotTable | None" = field(default=None, repr=False)
    _ancestry: frozenset[str] = field(default_factory=frozenset, repr=False)

    @property
    def slot_table(self) -> "SlotTable":
        if self._slot_table is None:
            raise NotGeneratedError(f"type {self.name!r} is not generated yet")
        return self._slot_table

    @property
    def ancestry(self) -> frozenset[str]:
        """Names of every type this one conforms to (itself included)."""
        if self._slot_table is None:
            raise NotGeneratedError(f"type {self.name!r} is not generated yet")
        return self._ancestry

    def conforms_to(self, other: "TypeDef | str") -> bool:
        name = other if isinstance(other, str) else other.name
        return name in self.ancestry


@dataclass(eq=False)
class TraitDef(TypeDef):
    category: TraitCategory = TraitCategory.CORE
    used_traits: list["TraitDef"] = field(default_factory=list)
    resolutions: list["ConflictResolution"] = field(default_factory=list)


@dataclass(eq=False)
class ClassDef(TypeDef):
    superclass: "ClassDef | None" = None
    used_traits: list[TraitDef] = field(default_factory=list)
    resolutions: list["ConflictResolution"] = field(default_factory=list)


@dataclass(frozen=True)
class ConflictResolution:
    """Alias or exclude one trait-provided slot on one composing type."""

    kind: str  # "alias" | "exclude"
    source_trait: TraitDef
    slot_name: str
    new_name: str | None = None


# -- compiled slot tables -----------------------------------------------------


@dataclass(frozen=True)
class PropertySlot:
    name: str
    kind: ValueKind
    origin: str


@dataclass(frozen=True)
class LinkSlot:
    name: str
    multiplicity: Multiplicity
    is_container_end: bool
    is_child_end: bool
    opposite_name: str
    target: str
    origin: str
    kind: str | None
    role: EndRole | None
    is_primary: bool


@dataclass(frozen=True)
class SlotTable:
    property_slots: tuple[PropertySlot, ...]
    link_slots: tuple[LinkSlot, ...]

    def __len__(self) -> int:
        return len(self.property_slots) + len(self.link_slots)

    def property_slot(self, name: str) -> PropertySlot | None:
        for slot in self.property_slots:
            if slot.name == name:
                return slot
        return None

    def link_slot(self, name: str) -> LinkSlot | None:
        for slot in self.link_slots:
            if slot.name == name:
                return slot
        return None

    @property
    def slot_names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.property_slots) + tuple(
            s.name for s in self.link_slots
        )


# -- meta-model namespace -----------------------------------------------------


@dataclass(eq=False)
class MetaModel:
    """A named namespace of classes and traits, plus read-only imports."""

    name: str
    imports: tuple["MetaModel", ...] = ()
    classes: dict[str, ClassDef] = field(default_factory=dict)
    traits: dict[str, TraitDef] = field(default_factory=dict)
    generated: bool = False
    _pair_counter: int = field(default=0, repr=False)

    def find_type(self, name: str) -> TypeDef | None:
        """Resolve a type name, local definitions shadowing imports."""
        found = self.classes.get(name) or self.traits.get(name)
        if found is not None:
            return found
        for imported in self.imports:
            found = imported.find_type(name)
            if found is not None:
                return found
        return None

    def require_type(self, name: str) -> TypeDef:
        found = self.find_type(name)
        if found is None:
            raise UnknownTypeError(f"unknown type {name!r} in meta-model {self.name!r}")
        return found

    def owns(self, type_def: TypeDef) -> bool:
        return (
            self.classes.get(type_def.name) is type_def
            or self.traits.get(type_def.name) is type_def
        )

    def all_types(self) -> list[TypeDef]:
        """Local types plus every imported type, locals first."""
        seen: dict[int, TypeDef] = {}
        for t in list(self.classes.values()) + list(self.traits.values()):
            seen[id(t)] = t
        for imported in self.imports:
            for t in imported.all_types():
                seen.setdefault(id(t), t)
        return list(seen.values())

    def association_kinds(self) -> list[TraitDef]:
        """Association traits visible in this namespace, locals first."""
        return [
            t
            for t in self.all_types()
            if isinstance(t, TraitDef) and t.category is TraitCategory.ASSOCIATION
        ]

    def instantiable(self, type_def: TypeDef) -> bool:
        """Classes and terminal traits may be instantiated directly."""
        if isinstance(type_def, ClassDef):
            return True
        return (
            isinstance(type_def, TraitDef)
            and type_def.category is TraitCategory.TERMINAL
        )

    @property
    def compiled(self) -> dict[TypeDef, SlotTable]:
        if not self.generated:
            raise NotGeneratedError(f"meta-model {self.name!r} is not generated")
        out: dict[TypeDef, SlotTable] = {}
        for t in list(self.classes.values()) + list(self.traits.values()):
            out[t] = t.slot_table
        return out


# -- builder ------------------------------------------------------------------

_END_MULTIPLICITIES: dict[AssociationShape, tuple[Multiplicity, Multiplicity]] = {
    AssociationShape.MANY_TO_MANY: (Multiplicity.MANY, Multiplicity.MANY),
    AssociationShape.MANY_TO_ONE: (Multiplicity.ONE, Multiplicity.MANY),
    AssociationShape.ONE_TO_MANY: (Multiplicity.MANY, Multiplicity.ONE),
    AssociationShape.CONTAINMENT_MANY_TO_ONE: (Multiplicity.ONE, Multiplicity.MANY),
    AssociationShape.CONTAINMENT_ONE_TO_MANY: (Multiplicity.MANY, Multiplicity.ONE),
}


class MetaModelBuilder:
    """Accumulates definitions, then compiles them with :func:`generate`.

    Builders are single use: after a successful ``generate()`` every mutating
    call raises, and extension happens in a new builder importing the result.
    """

    def __init__(self, name: str, imports: tuple[MetaModel, ...] | list[MetaModel] = ()):
        _check_ident(name.replace("-", "_"), "meta-model")
        self.meta_model = MetaModel(name=name, imports=tuple(imports))

    # lookups -----------------------------------------------------------------

    def find(self, name: str) -> TypeDef:
        return self.meta_model.require_type(name)

    def trait(self, name: str) -> TraitDef:
        found = self.meta_model.require_type(name)
        if not isinstance(found, TraitDef):
            raise UnknownTypeError(f"{name!r} is a class, not a trait")
        return found

    # mutating operations -------------------------------------------------------

    def _check_open(self) -> None:
        if self.meta_model.generated:
            raise ReadOnlyNamespaceError(
                f"meta-model {self.meta_model.name!r} is generated and immutable"
            )

    def _check_local(self, type_def: TypeDef) -> None:
        if not self.meta_model.owns(type_def):
            raise ReadOnlyNamespaceError(
                f"type {type_def.name!r} belongs to an imported meta-model "
                "and cannot be modified"
            )

    def _check_fresh_name(self, name: str) -> None:
        if name in self.meta_model.classes or name in self.meta_model.traits:
            raise DuplicateNameError(
                f"name {name!r} already defined in meta-model {self.meta_model.name!r}"
            )

    def new_class(self, name: str) -> ClassDef:
        self._check_open()
        _check_ident(name, "class")
        self._check_fresh_name(name)
        cls = ClassDef(name=name)
        self.meta_model.classes[name] = cls
        return cls

    def new_trait(
        self, name: str, category: TraitCategory = TraitCategory.CORE
    ) -> TraitDef:
        self._check_open()
        _check_ident(name, "trait")
        self._check_fresh_name(name)
        trait = TraitDef(name=name, category=TraitCategory(category))
        self.meta_model.traits[name] = trait
        return trait

    def add_generalization(self, child: TypeDef, parent: TypeDef) -> None:
        """Set the superclass (class parent) or add a used trait (trait parent)."""
        self._check_open()
        self._check_local(child)
        if isinstance(parent, ClassDef):
            if not isinstance(child, ClassDef):
                raise DanglingReferenceError(
                    f"trait {child.name!r} cannot inherit from class {parent.name!r}"
                )
            if child.superclass is not None and child.superclass is not parent:
                raise DuplicateNameError(
                    f"class {child.name!r} already has superclass "
                    f"{child.superclass.name!r}"
                )
            if self._reaches(parent, child):
                raise CompositionCycleError(
                    f"generalization {child.name!r} -> {parent.name!r} creates a cycle"
                )
            child.superclass = parent
        elif isinstance(parent, TraitDef):
            used = child.used_traits  # both ClassDef and TraitDef carry this
            if parent in used:
                return
            if isinstance(child, TraitDef) and self._reaches(parent, child):
                raise CompositionCycleError(
                    f"trait use {child.name!r} -> {parent.name!r} creates a cycle"
                )
            used.append(parent)
        else:
            raise DanglingReferenceError(f"not a type: {parent!r}")

    @staticmethod
    def _reaches(start: TypeDef, goal: TypeDef) -> bool:
        # True when `goal` is reachable from `start` over superclass and
        # used-trait edges, i.e. adding goal -> start would close a loop.
        stack, seen = [start], set()
        while stack:
            current = stack.pop()
            if current is goal:
                return True
            if id(current) in seen:
                continue
            seen.add(id(current))
            if isinstance(current, ClassDef) and current.superclass:
                stack.append(current.superclass)
            stack.extend(getattr(current, "used_traits", ()))
        return False

    def add_property(
        self, owner: TypeDef, name: str, kind: ValueKind | str
    ) -> PropertyDef:
        self._check_open()
        self._check_local(owner)
        _check_ident(name, "property")
        if any(p.name == name for p in owner.own_properties) or any(
            e.name == name for e in owner.association_ends
        ):
            raise DuplicateNameError(
                f"type {owner.name!r} already declares a slot named {name!r}"
            )
        prop = PropertyDef(name=name, kind=ValueKind(kind), owner=owner)
        owner.own_properties.append(prop)
        return prop

    def add_association(
        self,
        a: TypeDef,
        b: TypeDef,
        shape: AssociationShape | str,
        name_a: str,
        name_b: str,
        kind: TraitDef | None = None,
    ) -> tuple[AssociationEndDef, AssociationEndDef]:
        """Create the symmetric end pair for one association.

        ``name_a`` is the slot placed on ``a`` (its values are ``b`` entities)
        and ``name_b`` the slot placed on ``b``.  Containment shapes mark the
        end owned by the one-multiplicity side as the container end.  When
        ``kind`` names an association trait, links through this pair count as
        dependencies of that kind with ``a`` as source.
        """
        self._check_open()
        shape = AssociationShape(shape)
        for owner in (a, b) if a is not b else (a,):
            self._check_local(owner)
        _check_ident(name_a, "association end")
        _check_ident(name_b, "association end")
        for owner, slot in ((a, name_a), (b, name_b)):
            if any(p.name == slot for p in owner.own_properties) or any(
                e.name == slot for e in owner.association_ends
            ):
                raise DuplicateNameError(
                    f"type {owner.name!r} already declares a slot named {slot!r}"
                )
        if a is b and name_a == name_b:
            raise DuplicateNameError(
                f"self-association on {a.name!r} needs two distinct end names"
            )
        if kind is not None and kind.category is not TraitCategory.ASSOCIATION:
            raise DanglingReferenceError(
                f"kind {kind.name!r} is not an association trait"
            )

        mult_a, mult_b = _END_MULTIPLICITIES[shape]
        container_a = shape is AssociationShape.CONTAINMENT_ONE_TO_MANY
        container_b = shape is AssociationShape.CONTAINMENT_MANY_TO_ONE
        pair_index = self.meta_model._pair_counter
        self.meta_model._pair_counter += 1
        end_a = AssociationEndDef(
            name=name_a,
            owner=a,
            target=b,
            multiplicity=mult_a,
            is_container_end=container_a,
            kind=kind,
            role=EndRole.SOURCE if kind else None,
            is_primary=True,
            pair_index=pair_index,
        )
        end_b = AssociationEndDef(
            name=name_b,
            owner=b,
            target=a,
            multiplicity=mult_b,
            is_container_end=container_b,
            kind=kind,
            role=EndRole.TARGET if kind else None,
            is_primary=False,
            pair_index=pair_index,
        )
        end_a.opposite = end_b
        end_b.opposite = end_a
        a.association_ends.append(end_a)
        b.association_ends.append(end_b)
        return end_a, end_b

    def alias_slot(
        self, owner: ClassDef | TraitDef, source_trait: TraitDef, slot: str, new_name: str
    ) -> None:
        self._check_open()
        self._check_local(owner)
        _check_ident(new_name, "slot alias")
        owner.resolutions.append(
            ConflictResolution("alias", source_trait, slot, new_name)
        )

    def exclude_slot(
        self, owner: ClassDef | TraitDef, source_trait: TraitDef, slot: str
    ) -> None:
        self._check_open()
        self._check_local(owner)
        owner.resolutions.append(ConflictResolution("exclude", source_trait, slot))

    def generate(self) -> MetaModel:
        return generate(self.meta_model)


# -- generation ---------------------------------------------------------------


def generate(meta_model: MetaModel) -> MetaModel:
    """Compile every local type to its SlotTable.  Idempotent.

    Fails without partial effect on composition cycles, dangling references,
    or unresolved slot conflicts.
    """
    for imported in meta_model.imports:
        if not imported.generated:
            raise NotGeneratedError(
                f"import {imported.name!r} must be generated before "
                f"{meta_model.name!r}"
            )

    local_types = list(meta_model.classes.values()) + list(meta_model.traits.values())
    for t in local_types:
        _check_acyclic(t)

    tables: dict[int, tuple[SlotTable, frozenset[str]]] = {}
    conflicts: list[tuple[str, str, tuple[str, ...]]] = []
    for t in local_types:
        try:
            tables[id(t)] = _compose(t)
        except SlotConflictError as exc:
            conflicts.extend(exc.conflicts)
    if conflicts:
        raise SlotConflictError(conflicts)

    for t in local_types:
        table, ancestry = tables[id(t)]
        t._slot_table = table
        t._ancestry = ancestry
    meta_model.generated = True
    return meta_model


def _check_acyclic(root: TypeDef) -> None:
    # Depth-first walk over superclass and used-trait edges.
    state: dict[int, int] = {}  # 1 = in progress, 2 = done

    def visit(t: TypeDef, path: list[str]) -> None:
        mark = state.get(id(t))
        if mark == 2:
            return
        if mark == 1:
            loop = " -> ".join(path + [t.name])
            raise CompositionCycleError(f"composition cycle: {loop}")
        state[id(t)] = 1
        if isinstance(t, ClassDef) and t.superclass is not None:
            visit(t.superclass, path + [t.name])
        for trait in getattr(t, "used_traits", ()):
            visit(trait, path + [t.name])
        state[id(t)] = 2

    visit(root, [])


def _compose(type_def: TypeDef) -> tuple[SlotTable, frozenset[str]]:
    # Collection order: superclass chain first, then used traits depth-first
    # in declaration order, own slots last.  The same definition object
    # reached over two paths contributes once.
    entries: list[tuple[PropertyDef | AssociationEndDef, TypeDef]] = []
    seen_defs: set[int] = set()
    seen_types: set[int] = set()
    ancestry: set[str] = set()

    def add_own(t: TypeDef) -> None:
        for prop in t.own_properties:
            if id(prop) not in seen_defs:
                seen_defs.add(id(prop))
                entries.append((prop, t))
        for end in t.association_ends:
            if id(end) not in seen_defs:
                seen_defs.add(id(end))
                entries.append((end, t))

    def add_type(t: TypeDef) -> None:
        if id(t) in seen_types:
            return
        seen_types.add(id(t))
        ancestry.add(t.name)
        if isinstance(t, ClassDef) and t.superclass is not None:
            add_type(t.superclass)
        for trait in getattr(t, "used_traits", ()):
            add_type(trait)
        add_own(t)

    add_type(type_def)

    resolutions = list(getattr(type_def, "resolutions", ()))
    visible: list[tuple[str, PropertyDef | AssociationEndDef, TypeDef]] = []
    for slot_def, origin in entries:
        name = slot_def.name
        dropped = False
        for res in resolutions:
            if res.source_trait is not origin or res.slot_name != slot_def.name:
                continue
            if res.kind == "exclude":
                dropped = True
            elif res.kind == "alias":
                name = res.new_name or name
        if not dropped:
            visible.append((name, slot_def, origin))

    by_name: dict[str, list[str]] = {}
    for name, _slot, origin in visible:
        by_name.setdefault(name, []).append(origin.name)
    clashes = [
        (type_def.name, name, tuple(origins))
        for name, origins in by_name.items()
        if len(origins) > 1
    ]
    if clashes:
        raise SlotConflictError(clashes)

    props: list[PropertySlot] = []
    links: list[LinkSlot] = []
    for name, slot_def, origin in visible:
        if isinstance(slot_def, PropertyDef):
            props.append(PropertySlot(name=name, kind=slot_def.kind, origin=origin.name))
        else:
            opposite = slot_def.opposite
            assert opposite is not None
            links.append(
                LinkSlot(
                    name=name,
                    multiplicity=slot_def.multiplicity,
                    is_container_end=slot_def.is_container_end,
                    is_child_end=opposite.is_container_end,
                    opposite_name=opposite.name,
                    target=slot_def.target.name,
                    origin=origin.name,
                    kind=slot_def.kind.name if slot_def.kind else None,
                    role=slot_def.role,
                    is_primary=slot_def.is_primary,
                )
            )
    return SlotTable(tuple(props), tuple(links)), frozenset(ancestry)


# -- standard library ----------------------------------------------------------

_STD: MetaModel | None = None


def standard_library() -> MetaModel:
    """The shared catalog of traits most code meta-models start from.

    Terminal traits (TClass, TMethod, ...) bundle core fragments and may be
    instantiated directly; language-specific meta-models refine them by
    composing extra traits in their own namespace.
    """
    global _STD
    if _STD is not None:
        return _STD

    b = MetaModelBuilder("std")
    t = b.new_trait

    # Association kinds.
    inheritance = t("Inheritance", TraitCategory.ASSOCIATION)
    invocation = t("Invocation", TraitCategory.ASSOCIATION)
    access = t("Access", TraitCategory.ASSOCIATION)
    reference = t("Reference", TraitCategory.ASSOCIATION)
    deref_invocation = t("DereferencedInvocation", TraitCategory.ASSOCIATION)
    file_include = t("FileInclude", TraitCategory.ASSOCIATION)
    trait_usage = t("TraitUsage", TraitCategory.ASSOCIATION)

    # Core fragments.
    named = t("TNamedEntity")
    b.add_property(named, "name", ValueKind.STRING)

    typed = t("TTypedEntity")
    ttype = t("TType")
    b.add_association(
        typed, ttype, AssociationShape.MANY_TO_ONE, "declaredType", "typedEntities"
    )

    modifiers = t("TWithModifiers")
    b.add_property(modifiers, "visibility", ValueKind.STRING)
    b.add_property(modifiers, "modifiers", ValueKind.OBJECT)

    packageable = t("TPackageable")
    with_attributes = t("TWithAttributes")
    with_comments = t("TWithComments")
    with_inheritances = t("TWithInheritances")
    with_methods = t("TWithMethods")
    with_functions = t("TWithFunctions")
    with_globals = t("TWithGlobalVariables")
    invocations_receiver = t("TInvocationsReceiver")
    with_invocations = t("TWithInvocations")
    with_accesses = t("TWithAccesses")
    accessible = t("TAccessible")
    with_references = t("TWithReferences")
    referenceable = t("TReferenceable")
    with_derefs = t("TWithDereferencedInvocations")
    dereferenceable = t("TDereferenceable")
    with_includes = t("TWithFileIncludes")
    includable = t("TIncludable")
    with_trait_usages = t("TWithTraitUsages")
    usable_as_trait = t("TUsableAsTrait")

    # Technical fragments: source anchoring.
    anchor = t("TSourceAnchor", TraitCategory.TECHNICAL)
    b.add_property(anchor, "file", ValueKind.STRING)
    b.add_property(anchor, "start", ValueKind.NUMBER)
    b.add_property(anchor, "end", ValueKind.NUMBER)
    sourced = t("TSourcedEntity", TraitCategory.TECHNICAL)
    b.add_association(
        sourced, anchor, AssociationShape.MANY_TO_ONE, "sourceAnchor", "anchoredEntity"
    )

    # Terminal bundles.
    tclass = t("TClass", TraitCategory.TERMINAL)
    tmethod = t("TMethod", TraitCategory.TERMINAL)
    tfunction = t("TFunction", TraitCategory.TERMINAL)
    tpackage = t("TPackage", TraitCategory.TERMINAL)
    tattribute = t("TAttribute", TraitCategory.TERMINAL)
    tglobal = t("TGlobalVariable", TraitCategory.TERMINAL)
    tcomment = t("TComment", TraitCategory.TERMINAL)
    b.add_property(tcomment, "content", ValueKind.STRING)

    # Dependency end pairs, one per association kind.
    b.add_association(
        with_inheritances,
        with_inheritances,
        AssociationShape.MANY_TO_MANY,
        "superInheritances",
        "subInheritances",
        kind=inheritance,
    )
    b.add_association(
        with_invocations,
        invocations_receiver,
        AssociationShape.MANY_TO_MANY,
        "outgoingInvocations",
        "incomingInvocations",
        kind=invocation,
    )
    b.add_association(
        with_accesses,
        accessible,
        AssociationShape.MANY_TO_MANY,
        "outgoingAccesses",
        "incomingAccesses",
        kind=access,
    )
    b.add_association(
        with_references,
        referenceable,
        AssociationShape.MANY_TO_MANY,
        "outgoingReferences",
        "incomingReferences",
        kind=reference,
    )
    b.add_association(
        with_derefs,
        dereferenceable,
        AssociationShape.MANY_TO_MANY,
        "outgoingDereferencedInvocations",
        "incomingDereferencedInvocations",
        kind=deref_invocation,
    )
    b.add_association(
        with_includes,
        includable,
        AssociationShape.MANY_TO_MANY,
        "outgoingIncludes",
        "incomingIncludes",
        kind=file_include,
    )
    b.add_association(
        with_trait_usages,
        usable_as_trait,
        AssociationShape.MANY_TO_MANY,
        "outgoingTraitUsages",
        "incomingTraitUsages",
        kind=trait_usage,
    )

    # Ownership end pairs (the containment skeleton).
    b.add_association(
        tpackage,
        packageable,
        AssociationShape.CONTAINMENT_ONE_TO_MANY,
        "packagedEntities",
        "parentPackage",
    )
    b.add_association(
        tmethod,
        with_methods,
        AssociationShape.CONTAINMENT_MANY_TO_ONE,
        "parentType",
        "methods",
    )
    b.add_association(
        tattribute,
        with_attributes,
        AssociationShape.CONTAINMENT_MANY_TO_ONE,
        "parentType",
        "attributes",
    )
    b.add_association(
        tfunction,
        with_functions,
        AssociationShape.CONTAINMENT_MANY_TO_ONE,
        "parentContainer",
        "functions",
    )
    b.add_association(
        tglobal,
        with_globals,
        AssociationShape.CONTAINMENT_MANY_TO_ONE,
        "parentScope",
        "globalVariables",
    )
    b.add_association(
        tcomment,
        with_comments,
        AssociationShape.CONTAINMENT_MANY_TO_ONE,
        "commentedEntity",
        "comments",
    )

    # Terminal compositions.  TClass deliberately stays minimal: no name of
    # its own, language meta-models add TNamedEntity when they want one.
    for trait in (
        invocations_receiver,
        packageable,
        ttype,
        with_attributes,
        with_comments,
        with_inheritances,
        with_methods,
    ):
        b.add_generalization(tclass, trait)
    for trait in (
        named,
        sourced,
        with_invocations,
        invocations_receiver,
        with_accesses,
        with_references,
        with_comments,
    ):
        b.add_generalization(tmethod, trait)
    for trait in (named, sourced, with_invocations, invocations_receiver, with_accesses, with_references):
        b.add_generalization(tfunction, trait)
    for trait in (named, packageable):
        b.add_generalization(tpackage, trait)
    for trait in (named, sourced, typed, accessible):
        b.add_generalization(tattribute, trait)
    for trait in (named, sourced, typed, accessible):
        b.add_generalization(tglobal, trait)
    b.add_generalization(tcomment, sourced)

    _STD = b.generate()
    return _STD
