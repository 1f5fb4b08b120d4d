"""The text form of queries used by the CLI, the service, and the query tool.

    pipeline := stage ("|" stage)*
    stage    := selector | verb
    selector := "type:" NAME | "id:" INT | "name:" QUOTED | "tag:" WORD
    verb     := "outgoing" NAME | "incoming" NAME
              | "all-outgoing" | "all-incoming"
              | "at-scope" NAME | "to-scope" NAME
              | "children" | "parent"

A pipeline normally starts with a selector; it may start with a verb only
when the caller supplies an input group (the query tool passes the entities
currently on its buses).  A selector appearing after the first stage filters
the flowing group instead of reselecting from the whole model.
"""

from __future__ import annotations

import re

from .errors import PipelineError
from .model import Model
from .query import QueryResult

_TYPE = re.compile(r"^type:([A-Za-z_][A-Za-z0-9_]*)$")
_ID = re.compile(r"^id:(\d+)$")
_NAME = re.compile(r'^name:"((?:[^"\\]|\\.)*)"$')
_TAG = re.compile(r"^tag:(\S+)$")
_VERBS_WITH_ARG = {"outgoing", "incoming", "at-scope", "to-scope"}
_VERBS_PLAIN = {"all-outgoing", "all-incoming", "children", "parent"}


def _split_stages(text: str) -> list[str]:
    stages: list[str] = []
    current: list[str] = []
    in_quotes = False
    escaped = False
    for ch in text:
        if escaped:
            current.append(ch)
            escaped = False
        elif ch == "\\" and in_quotes:
            current.append(ch)
            escaped = True
        elif ch == '"':
            current.append(ch)
            in_quotes = not in_quotes
        elif ch == "|" and not in_quotes:
            stages.append("".join(current).strip())
            current = []
        else:
            current.append(ch)
    if in_quotes:
        raise PipelineError("unterminated quote in pipeline")
    stages.append("".join(current).strip())
    return stages


def _select(model: Model, stage: str) -> QueryResult | None:
    """Parse a selector stage; None when the stage is not a selector."""
    m = _TYPE.match(stage)
    if m:
        wanted = m.group(1)
        if model.metamodel.find_type(wanted) is None:
            raise PipelineError(f"unknown type {wanted!r}")
        items = [
            e
            for _, e in sorted(model.entities.items())
            if wanted in e.type.ancestry
        ]
        return QueryResult(model, items)
    m = _ID.match(stage)
    if m:
        entity = model.entities.get(int(m.group(1)))
        return QueryResult(model, [entity] if entity else [])
    m = _NAME.match(stage)
    if m:
        wanted = m.group(1).replace('\\"', '"').replace("\\\\", "\\")
        items = [
            e
            for _, e in sorted(model.entities.items())
            if e.table.property_slot("name") is not None
            and e.values.get("name") == wanted
        ]
        return QueryResult(model, items)
    m = _TAG.match(stage)
    if m:
        tag_obj = model.tags.get(m.group(1))
        if tag_obj is None:
            raise PipelineError(f"unknown tag {m.group(1)!r}")
        return QueryResult(model, tag_obj.member_entities())
    return None


def _filter(group: QueryResult, model: Model, stage: str) -> QueryResult | None:
    selected = _select(model, stage)
    if selected is None:
        return None
    keep = {e.id for e in selected}
    return QueryResult(model, [e for e in group if e.id in keep])


def _apply_verb(group: QueryResult, stage: str) -> QueryResult:
    parts = stage.split()
    verb = parts[0]
    if verb in _VERBS_PLAIN:
        if len(parts) != 1:
            raise PipelineError(f"verb {verb!r} takes no argument")
        if verb == "all-outgoing":
            return group.all_outgoing()
        if verb == "all-incoming":
            return group.all_incoming()
        if verb == "children":
            return group.children()
        return group.parent()
    if verb in _VERBS_WITH_ARG:
        if len(parts) != 2:
            raise PipelineError(f"verb {verb!r} needs exactly one argument")
        argument = parts[1]
        if verb == "outgoing":
            return group.outgoing(argument)
        if verb == "incoming":
            return group.incoming(argument)
        if verb == "at-scope":
            return group.at_scope(argument)
        return group.to_scope(argument)
    raise PipelineError(f"bad stage {stage!r}")


def run_pipeline(
    model: Model, text: str, initial: QueryResult | None = None
) -> QueryResult:
    if not text or not text.strip():
        raise PipelineError("empty pipeline")
    stages = _split_stages(text)
    group: QueryResult | None = initial

    for stage in stages:
        if not stage:
            raise PipelineError("empty stage in pipeline")
        if group is None:
            group = _select(model, stage)
            if group is None:
                raise PipelineError(
                    f"pipeline must start with a selector, got {stage!r}"
                )
            continue
        filtered = _filter(group, model, stage)
        if filtered is not None:
            group = filtered
            continue
        group = _apply_verb(group, stage)

    assert group is not None
    return group
