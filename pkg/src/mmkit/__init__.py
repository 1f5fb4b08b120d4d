"""Composable meta-models for software analysis models.

Define meta-models from reusable traits, instantiate entity graphs that
expose exactly the slots their type composed, query them by containment
scope and dependency kind, tag and measure groups, detect duplicated
source fragments, and wire interactive tools together over publication
buses.  ``mmkit.cli`` and ``mmkit.service`` expose the same operations
to the shell and to HTTP clients.
"""

from .bus import Bus, BusMessage, ToolHub, ToolInstance, ToolMode
from .clones import Fragment, Occurrence, detect, tokenize
from .errors import (
    BusError,
    CompositionCycleError,
    ConformanceError,
    ContainmentCycleError,
    DanglingReferenceError,
    DetachedToolError,
    DuplicateNameError,
    ForeignEntityError,
    InterchangeError,
    KindMismatchError,
    MetaModelError,
    MmkitError,
    ModelError,
    NotGeneratedError,
    PipelineError,
    QueryError,
    ReadOnlyNamespaceError,
    SlotConflictError,
    UnknownEntityError,
    UnknownSlotError,
    UnknownTypeError,
)
from .interchange import (
    built_in_registry,
    commit_log_metamodel,
    export_metamodel,
    export_model,
    import_metamodel,
    import_model,
    import_vcs_log,
)
from .metamodel import (
    AssociationShape,
    ClassDef,
    MetaModel,
    MetaModelBuilder,
    Multiplicity,
    SlotTable,
    TraitCategory,
    TraitDef,
    TypeDef,
    ValueKind,
    standard_library,
)
from .model import ABSENT, Entity, Model, SourceAnchor
from .pipeline import run_pipeline
from .query import (
    QueryResult,
    at_scope,
    children,
    describe,
    parent,
    query_all_incoming,
    query_all_outgoing,
    query_incoming,
    query_outgoing,
    to_scope,
)
from .tags import Tag, cohesion, coupling, query_tag_dependencies, remove_tag, tag, untag
from .tools import (
    TOOL_KINDS,
    create_tool,
    describe_item,
    duplication_report,
    entity_label,
    tool_state,
)

__version__ = "0.1.0"

__all__ = [
    "ABSENT",
    "AssociationShape",
    "Bus",
    "BusError",
    "BusMessage",
    "ClassDef",
    "CompositionCycleError",
    "ConformanceError",
    "ContainmentCycleError",
    "DanglingReferenceError",
    "DetachedToolError",
    "DuplicateNameError",
    "Entity",
    "ForeignEntityError",
    "Fragment",
    "InterchangeError",
    "KindMismatchError",
    "MetaModel",
    "MetaModelBuilder",
    "MetaModelError",
    "MmkitError",
    "Model",
    "ModelError",
    "Multiplicity",
    "NotGeneratedError",
    "Occurrence",
    "PipelineError",
    "QueryError",
    "QueryResult",
    "ReadOnlyNamespaceError",
    "SlotConflictError",
    "SlotTable",
    "SourceAnchor",
    "TOOL_KINDS",
    "Tag",
    "ToolHub",
    "ToolInstance",
    "ToolMode",
    "TraitCategory",
    "TraitDef",
    "TypeDef",
    "UnknownEntityError",
    "UnknownSlotError",
    "UnknownTypeError",
    "ValueKind",
    "at_scope",
    "built_in_registry",
    "children",
    "cohesion",
    "commit_log_metamodel",
    "coupling",
    "create_tool",
    "describe",
    "describe_item",
    "detect",
    "duplication_report",
    "entity_label",
    "export_metamodel",
    "export_model",
    "import_metamodel",
    "import_model",
    "import_vcs_log",
    "parent",
    "query_all_incoming",
    "query_all_outgoing",
    "query_incoming",
    "query_outgoing",
    "query_tag_dependencies",
    "remove_tag",
    "run_pipeline",
    "standard_library",
    "tag",
    "to_scope",
    "tokenize",
    "tool_state",
    "untag",
]
