"""Exception hierarchy shared by every mmkit module."""

from __future__ import annotations


class MmkitError(Exception):
    """Base class for all errors raised by this package."""


# -- meta-model construction and generation ---------------------------------


class MetaModelError(MmkitError):
    pass


class DuplicateNameError(MetaModelError):
    pass


class CompositionCycleError(MetaModelError):
    pass


class ReadOnlyNamespaceError(MetaModelError):
    pass


class DanglingReferenceError(MetaModelError):
    pass


class SlotConflictError(MetaModelError):
    """Two visible slots share a name and no resolution disambiguates them.

    ``conflicts`` holds one (type name, slot name, origin names) triple per
    unresolved collision.
    """

    def __init__(self, conflicts: list[tuple[str, str, tuple[str, ...]]]):
        self.conflicts = conflicts
        lines = ", ".join(
            f"{type_name}.{slot} (from {' and '.join(origins)})"
            for type_name, slot, origins in conflicts
        )
        super().__init__(f"conflicting slots: {lines}")


class UnknownTypeError(MetaModelError):
    pass


class NotGeneratedError(MetaModelError):
    pass


# -- model store -------------------------------------------------------------


class ModelError(MmkitError):
    pass


class UnknownSlotError(ModelError):
    pass


class KindMismatchError(ModelError):
    pass


class ConformanceError(ModelError):
    pass


class ContainmentCycleError(ModelError):
    pass


class ForeignEntityError(ModelError):
    pass


class UnknownEntityError(ModelError):
    pass


# -- queries and pipelines ----------------------------------------------------


class QueryError(MmkitError):
    pass


class PipelineError(MmkitError):
    pass


# -- interchange --------------------------------------------------------------


class InterchangeError(MmkitError):
    pass


# -- tool bus -----------------------------------------------------------------


class BusError(MmkitError):
    pass


class DetachedToolError(BusError):
    pass
