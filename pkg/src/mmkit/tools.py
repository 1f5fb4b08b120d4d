"""Headless cores of the analysis tools that ride the bus.

Each tool consumes the entity groups arriving on its buses and derives a
payload a front end can render: query results, slot descriptions, a direct
dependency graph, a duplication report, a source slice, or a publication
log.  Payloads are pure functions of tool state and the model, so they are
recomputed on demand; only the logger accumulates history of its own.
"""

from __future__ import annotations

from typing import Any

from .bus import Bus, BusMessage, ToolHub, ToolInstance
from .clones import detect, tokenize
from .errors import BusError
from .model import ABSENT, Entity, Model
from .pipeline import run_pipeline
from .query import QueryResult, describe
from .tags import Tag

TOOL_KINDS = (
    "query",
    "inspector",
    "dependency-graph",
    "duplication",
    "source",
    "logger",
)


def entity_label(model: Model, item_id: int) -> dict[str, Any]:
    """Minimal denormalized label for ids carried on buses."""
    found = model.lookup(item_id) if model is not None else None
    if isinstance(found, Tag):
        return {"id": item_id, "type": "Tag", "name": found.name}
    if isinstance(found, Entity):
        return {"id": item_id, "type": found.type.name, "name": found.name_or_empty()}
    return {"id": item_id, "type": "?", "name": ""}


def describe_item(model: Model, item_id: int) -> list[dict[str, Any]]:
    """Inspector rows for one entity or tag; empty when the id is unknown."""
    found = model.lookup(item_id)
    if isinstance(found, Tag):
        return [
            {"slot": "name", "kind": "String", "value": found.name},
            {"slot": "color", "kind": "String", "value": found.color},
            {"slot": "members", "kind": "link", "value": list(found.members)},
        ]
    if isinstance(found, Entity):
        return [
            {"slot": slot, "kind": kind, "value": None if value is ABSENT else value}
            for slot, kind, value in describe(found)
        ]
    return []


def _resolve_entities(model: Model, ids) -> list[Entity]:
    """Entities for the given ids; tags expand to their members."""
    out: list[Entity] = []
    seen: set[int] = set()
    for item_id in ids:
        found = model.lookup(item_id)
        if isinstance(found, Tag):
            candidates = found.member_entities()
        elif isinstance(found, Entity):
            candidates = [found]
        else:
            continue
        for entity in candidates:
            if entity.id not in seen:
                seen.add(entity.id)
                out.append(entity)
    return out


class QueryTool(ToolInstance):
    kind = "query"

    def __init__(self, hub: ToolHub, tool_id: str, bridge: bool = False):
        super().__init__(hub, tool_id, bridge)
        self.last_pipeline: str | None = None
        self.last_result: tuple[int, ...] = ()

    def run(self, pipeline_text: str) -> QueryResult:
        """Run a pipeline over the bus entities and publish the result."""
        model = self.hub.model
        if model is None:
            raise BusError("no model selected")
        initial = None
        if self.current_entities:
            initial = QueryResult(model, _resolve_entities(model, self.current_entities))
        result = run_pipeline(model, pipeline_text, initial=initial)
        self.last_pipeline = pipeline_text
        self.last_result = result.ids
        self.select(result.ids)
        return result

    def state_payload(self) -> dict[str, Any]:
        return {"pipeline": self.last_pipeline, "result": list(self.last_result)}


class InspectorTool(ToolInstance):
    kind = "inspector"

    def rows(self) -> list[dict[str, Any]]:
        model = self.hub.model
        if model is None or not self.current_entities:
            return []
        if len(self.current_entities) == 1:
            return describe_item(model, self.current_entities[0])
        entities = _resolve_entities(model, self.current_entities)
        if len(entities) == 1:
            return describe_item(model, entities[0].id)
        if not entities:
            return []
        group = QueryResult(model, entities)
        return [
            {"slot": slot, "kind": kind, "value": None if value is ABSENT else value}
            for slot, kind, value in describe(group)
        ]

    def state_payload(self) -> dict[str, Any]:
        return {"rows": self.rows()}


class DependencyGraphTool(ToolInstance):
    kind = "dependency-graph"

    def graph(self) -> dict[str, Any]:
        """Direct dependencies of the current entities, no subtree aggregation."""
        model = self.hub.model
        if model is None:
            return {"nodes": [], "edges": []}
        inputs = _resolve_entities(model, self.current_entities)
        input_ids = {e.id for e in inputs}
        node_ids = set(input_ids)
        edges = []
        for source, target, kind in model.association_instances():
            if source.id in input_ids or target.id in input_ids:
                node_ids.add(source.id)
                node_ids.add(target.id)
                edges.append({"source": source.id, "target": target.id, "kind": kind})
        edges.sort(key=lambda e: (e["source"], e["target"], e["kind"]))
        nodes = [entity_label(model, i) for i in sorted(node_ids)]
        return {"nodes": nodes, "edges": edges}

    def state_payload(self) -> dict[str, Any]:
        return self.graph()


class DuplicationTool(ToolInstance):
    kind = "duplication"

    def __init__(self, hub: ToolHub, tool_id: str, bridge: bool = False):
        super().__init__(hub, tool_id, bridge)
        self.min_tokens = 5

    def report(self) -> dict[str, Any]:
        model = self.hub.model
        if model is None:
            return {"minTokens": self.min_tokens, "fragments": [], "skipped": []}
        entities = _resolve_entities(model, self.current_entities)
        return duplication_report(model, entities, self.min_tokens)

    def state_payload(self) -> dict[str, Any]:
        return self.report()


def duplication_report(
    model: Model, entities: list[Entity], min_tokens: int
) -> dict[str, Any]:
    """Exact duplicate fragments across the entities' anchored source slices."""
    anchored = []
    skipped = []
    for entity in sorted(entities, key=lambda e: e.id):
        anchor = model.source_anchor_of(entity)
        if anchor is None:
            skipped.append(entity.id)
            continue
        text = anchor.slice(model.source_texts[anchor.file])
        anchored.append((entity, anchor, tokenize(text)))

    fragments = detect([[t.text for t in tokens] for _, _, tokens in anchored], min_tokens)
    out = []
    for fragment in fragments:
        occurrences = []
        for occ in fragment.occurrences:
            entity, anchor, tokens = anchored[occ.sequence]
            first, last = tokens[occ.first_token], tokens[occ.last_token]
            occurrences.append(
                {
                    "entity": entity.id,
                    "file": anchor.file,
                    "startToken": occ.first_token,
                    "endToken": occ.last_token,
                    # anchor.start maps slice offset 1 onto the file.
                    "start": anchor.start + first.start - 1,
                    "end": anchor.start + last.end - 1,
                }
            )
        occurrences.sort(key=lambda o: (o["entity"], o["startToken"]))
        out.append(
            {
                "id": fragment.fragment_id,
                "color": fragment.color,
                "tokens": len(fragment.tokens),
                "text": fragment.text,
                "occurrences": occurrences,
            }
        )
    return {"minTokens": min_tokens, "fragments": out, "skipped": skipped}


class SourceCodeTool(ToolInstance):
    kind = "source"

    def view(self) -> dict[str, Any] | None:
        """The source slice, only when exactly one anchored entity is shown."""
        model = self.hub.model
        if model is None or len(self.current_entities) != 1:
            return None
        found = model.lookup(self.current_entities[0])
        if not isinstance(found, Entity):
            return None
        anchor = model.source_anchor_of(found)
        if anchor is None:
            return None
        return {
            "entity": found.id,
            "file": anchor.file,
            "start": anchor.start,
            "end": anchor.end,
            "text": anchor.slice(model.source_texts[anchor.file]),
        }

    def state_payload(self) -> dict[str, Any]:
        return {"view": self.view()}


class LoggerTool(ToolInstance):
    kind = "logger"

    def __init__(self, hub: ToolHub, tool_id: str, bridge: bool = False):
        super().__init__(hub, tool_id, bridge)
        self.records: list[dict[str, Any]] = []

    def react(self, message: BusMessage) -> None:
        self.records.append(
            {
                "index": len(self.records),
                "timestamp": message.timestamp,
                "bus": message.bus_id,
                "producer": message.producer_id,
                "entities": list(message.entity_ids),
            }
        )

    def replay(self, index: int) -> list[BusMessage]:
        """Republish one recorded group as a fresh publication."""
        if not 0 <= index < len(self.records):
            raise BusError(f"no recorded group {index}")
        return self.select(self.records[index]["entities"])

    def export(self, fmt: str = "txt") -> str:
        """Render the recorded groups, one line per entity, header first."""
        if fmt not in ("txt", "csv"):
            raise BusError(f"unsupported export format {fmt!r}")
        separator = "," if fmt == "csv" else "\t"
        lines = [separator.join(["timestamp", "producer", "entity", "type", "name"])]
        model = self.hub.model
        for record in self.records:
            for entity_id in record["entities"]:
                label = entity_label(model, entity_id)
                cells = [
                    str(record["timestamp"]),
                    record["producer"],
                    str(entity_id),
                    label["type"],
                    label["name"],
                ]
                if fmt == "csv":
                    cells = [_csv_escape(c) for c in cells]
                lines.append(separator.join(cells))
        return "\n".join(lines) + "\n"

    def state_payload(self) -> dict[str, Any]:
        return {"groups": [dict(r) for r in self.records]}


def _csv_escape(cell: str) -> str:
    if any(ch in cell for ch in ',"\n'):
        return '"' + cell.replace('"', '""') + '"'
    return cell


_TOOL_CLASSES: dict[str, type[ToolInstance]] = {
    "query": QueryTool,
    "inspector": InspectorTool,
    "dependency-graph": DependencyGraphTool,
    "duplication": DuplicationTool,
    "source": SourceCodeTool,
    "logger": LoggerTool,
}


def create_tool(
    hub: ToolHub,
    kind: str,
    buses: tuple[Bus, ...] | list[Bus] = (),
    tool_id: str | None = None,
    bridge: bool = False,
) -> ToolInstance:
    tool_class = _TOOL_CLASSES.get(kind)
    if tool_class is None:
        raise BusError(f"unknown tool kind {kind!r}")
    if tool_id is None:
        tool_id = hub.fresh_tool_id(kind)
    tool = tool_class(hub, tool_id, bridge=bridge)
    return hub.add_tool(tool, buses)


def tool_state(tool: ToolInstance) -> dict[str, Any]:
    """The JSON shape served for one tool, shared by service and tests."""
    payload = tool.state_payload() if hasattr(tool, "state_payload") else {}
    model = tool.hub.model
    return {
        "id": tool.id,
        "kind": tool.kind,
        "mode": tool.mode.value,
        "bridge": tool.bridge,
        "buses": [bus.id for bus in tool.buses],
        "currentEntities": [
            entity_label(model, i) for i in tool.current_entities
        ],
        "highlighted": list(tool.highlighted),
        "payload": payload,
    }
