"""HTTP facade over models, queries, and the tool bus.

The Service class is a thin adapter: every mutation it accepts maps onto one
in-process operation, so driving the service and driving the library give
the same results.  Routing is plain (method, path) dispatch returning JSON,
which keeps the logic testable without sockets; run_server wraps it in a
threaded stdlib HTTP server that adds an event stream at GET /events
(server-sent events, one JSON object per event, in delivery order).

The JSON surface is frozen in PROTOCOL.md.
"""

from __future__ import annotations

import json
import queue
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Any
from urllib.parse import parse_qs, urlparse

from .bus import ToolHub, ToolMode
from .errors import BusError, InterchangeError, MmkitError, PipelineError, QueryError
from .interchange import export_model, import_model
from .metamodel import MetaModel
from .model import Model
from .pipeline import run_pipeline
from .tools import (
    TOOL_KINDS,
    LoggerTool,
    QueryTool,
    create_tool,
    describe_item,
    entity_label,
    tool_state,
)


class ServiceError(Exception):
    def __init__(self, status: int, code: str, detail: str):
        super().__init__(detail)
        self.status = status
        self.code = code
        self.detail = detail


def _error(status: int, code: str, detail: str) -> ServiceError:
    return ServiceError(status, code, detail)


class Service:
    """One session: a model registry, one hub, and any number of listeners."""

    def __init__(self, registry: dict[str, MetaModel] | None = None):
        self.registry = dict(registry or {})
        self.models: dict[str, Model] = {}
        self.active_model: str | None = None
        self.hub = ToolHub()
        self.subscribers: list[queue.SimpleQueue] = []
        self.hub.on_message = self._emit_message
        self.hub.on_tool_state = self._emit_tool_state

    # -- event stream ----------------------------------------------------------

    def subscribe(self) -> queue.SimpleQueue:
        q: queue.SimpleQueue = queue.SimpleQueue()
        self.subscribers.append(q)
        return q

    def unsubscribe(self, q: queue.SimpleQueue) -> None:
        if q in self.subscribers:
            self.subscribers.remove(q)

    def _broadcast(self, event: dict[str, Any]) -> None:
        for q in list(self.subscribers):
            q.put(event)

    def _emit_message(self, bus, message) -> None:
        model = self.hub.model
        self._broadcast(
            {
                "event": "message",
                "bus": bus.id,
                "messageId": message.message_id,
                "lineage": message.lineage_id,
                "producer": message.producer_id,
                "timestamp": message.timestamp,
                "entities": [entity_label(model, i) for i in message.entity_ids],
            }
        )

    def _emit_tool_state(self, tool) -> None:
        self._broadcast({"event": "toolState", **tool_state(tool)})

    # -- model management ----------------------------------------------------------

    def add_model(self, model: Model) -> None:
        if model.name in self.models:
            raise _error(409, "conflict", f"model {model.name!r} already loaded")
        self.models[model.name] = model
        if self.active_model is None:
            self.active_model = model.name
            self.hub.set_model(model)

    def _model(self, name: str) -> Model:
        model = self.models.get(name)
        if model is None:
            raise _error(404, "unknown-model", f"no model named {name!r}")
        return model

    def _model_summary(self, model: Model) -> dict[str, Any]:
        return {
            "name": model.name,
            "metamodel": model.metamodel.name,
            "entities": len(model.entities),
            "links": model.link_count(),
            "tags": len(model.tags),
        }

    def _tool(self, tool_id: str):
        tool = self.hub.tools.get(tool_id)
        if tool is None:
            raise _error(404, "unknown-tool", f"no tool named {tool_id!r}")
        return tool

    def _bus(self, bus_id: str):
        bus = self.hub.buses.get(bus_id)
        if bus is None:
            raise _error(404, "unknown-bus", f"no bus named {bus_id!r}")
        return bus

    # -- request dispatch ------------------------------------------------------------

    def handle(
        self, method: str, path: str, body: dict[str, Any] | None = None
    ) -> tuple[int, Any]:
        """Serve one request; returns (status, json-serializable payload)."""
        try:
            return 200, self._route(method, path, body or {})
        except ServiceError as exc:
            return exc.status, {"error": exc.code, "detail": exc.detail}
        except (PipelineError, QueryError) as exc:
            return 400, {"error": "bad-pipeline", "detail": str(exc)}
        except InterchangeError as exc:
            return 400, {"error": "bad-document", "detail": str(exc)}
        except BusError as exc:
            return 400, {"error": "bus-error", "detail": str(exc)}
        except MmkitError as exc:
            return 400, {"error": "bad-request", "detail": str(exc)}

    def _route(self, method: str, path: str, body: dict[str, Any]) -> Any:
        parsed = urlparse(path)
        query = {k: v[0] for k, v in parse_qs(parsed.query).items()}
        parts = [p for p in parsed.path.split("/") if p]
        key = (method.upper(), *parts)

        if key == ("GET", "models"):
            return {
                "models": [self._model_summary(m) for m in self.models.values()]
            }
        if key == ("POST", "models"):
            document = body.get("document")
            if not isinstance(document, (dict, str)):
                raise _error(400, "bad-request", "body needs a document")
            text = document if isinstance(document, str) else json.dumps(document)
            name = body.get("name") or f"model{len(self.models) + 1}"
            model = import_model(text, self.registry, name=name)
            self.add_model(model)
            return {"model": self._model_summary(model)}

        if len(parts) >= 2 and parts[0] == "models":
            return self._route_model(method, parts, query, body)

        if key == ("GET", "session"):
            return {
                "activeModel": self.active_model,
                "buses": sorted(self.hub.buses),
                "tools": sorted(self.hub.tools),
            }
        if key == ("POST", "session", "model"):
            model = self._model(body.get("name", ""))
            self.active_model = model.name
            self.hub.set_model(model)
            return {"activeModel": model.name}

        if key == ("GET", "buses"):
            return {
                "buses": [
                    {
                        "id": bus.id,
                        "attached": [t.id for t in bus.attached],
                        "messages": len(bus.history),
                    }
                    for bus in self.hub.buses.values()
                ]
            }
        if key == ("POST", "buses"):
            bus_id = body.get("id")
            if bus_id is not None and not isinstance(bus_id, str):
                raise _error(400, "bad-request", "bus id must be a string")
            if bus_id is not None and bus_id in self.hub.buses:
                raise _error(409, "conflict", f"bus {bus_id!r} already exists")
            bus = self.hub.create_bus(bus_id)
            return {"bus": {"id": bus.id, "attached": [], "messages": 0}}

        if key == ("GET", "tools"):
            return {"tools": [tool_state(t) for t in self.hub.tools.values()]}
        if key == ("POST", "tools"):
            kind = body.get("kind")
            if kind not in TOOL_KINDS:
                raise _error(400, "unknown-kind", f"unknown tool kind {kind!r}")
            buses = [self._bus(b) for b in body.get("buses", ())]
            tool_id = body.get("id")
            if tool_id is not None and tool_id in self.hub.tools:
                raise _error(409, "conflict", f"tool {tool_id!r} already exists")
            tool = create_tool(
                self.hub,
                kind,
                buses=buses,
                tool_id=tool_id,
                bridge=bool(body.get("bridge", False)),
            )
            return {"tool": tool_state(tool)}

        if len(parts) >= 2 and parts[0] == "tools":
            return self._route_tool(method, parts, query, body)

        raise _error(404, "not-found", f"no route for {method} {parsed.path}")

    def _route_model(
        self, method: str, parts: list[str], query: dict[str, str], body: dict
    ) -> Any:
        model = self._model(parts[1])
        rest = parts[2:]
        if method == "GET" and rest == ["entities"]:
            entities = [model.entities[i] for i in sorted(model.entities)]
            type_filter = query.get("type")
            if type_filter:
                if model.metamodel.find_type(type_filter) is None:
                    raise _error(400, "bad-request", f"unknown type {type_filter!r}")
                entities = [e for e in entities if type_filter in e.type.ancestry]
            limit = int(query.get("limit", "0") or 0)
            if limit > 0:
                entities = entities[:limit]
            return {
                "entities": [entity_label(model, e.id) for e in entities],
                "tags": [
                    {"id": t.id, "name": t.name, "color": t.color, "members": list(t.members)}
                    for t in model.tags.values()
                ],
            }
        if method == "GET" and len(rest) == 2 and rest[0] == "entities":
            try:
                item_id = int(rest[1])
            except ValueError:
                raise _error(400, "bad-request", "entity id must be an integer") from None
            if model.lookup(item_id) is None:
                raise _error(404, "unknown-entity", f"no entity with id {item_id}")
            return {
                "entity": entity_label(model, item_id),
                "rows": describe_item(model, item_id),
            }
        if method == "POST" and rest == ["query"]:
            pipeline = body.get("pipeline")
            if not isinstance(pipeline, str):
                raise _error(400, "bad-pipeline", "body needs a pipeline string")
            result = run_pipeline(model, pipeline)
            return {"items": [entity_label(model, i) for i in result.ids]}
        if method == "GET" and rest == ["export"]:
            return {"document": json.loads(export_model(model))}
        raise _error(404, "not-found", f"no model route for {'/'.join(rest)}")

    def _route_tool(
        self, method: str, parts: list[str], query: dict[str, str], body: dict
    ) -> Any:
        tool = self._tool(parts[1])
        rest = parts[2:]
        if method == "GET" and not rest:
            return {"tool": tool_state(tool)}
        if method == "POST" and rest == ["mode"]:
            mode = body.get("mode")
            try:
                self.hub.set_mode(tool, ToolMode(mode))
            except ValueError:
                raise _error(400, "bad-request", f"unknown mode {mode!r}") from None
            return {"tool": tool_state(tool)}
        if method == "POST" and rest == ["attach"]:
            self.hub.attach(tool, self._bus(body.get("bus", "")))
            self._emit_tool_state(tool)
            return {"tool": tool_state(tool)}
        if method == "POST" and rest == ["detach"]:
            self.hub.detach(tool, self._bus(body.get("bus", "")))
            self._emit_tool_state(tool)
            return {"tool": tool_state(tool)}
        if method == "POST" and rest == ["select"]:
            entities = body.get("entities")
            if not isinstance(entities, list):
                raise _error(400, "bad-request", "body needs an entities list")
            published = tool.select(entities)
            return {"published": len(published)}
        if method == "POST" and rest == ["run"]:
            if not isinstance(tool, QueryTool):
                raise _error(400, "wrong-kind", f"tool {tool.id!r} is not a query tool")
            pipeline = body.get("pipeline")
            if not isinstance(pipeline, str):
                raise _error(400, "bad-pipeline", "body needs a pipeline string")
            result = tool.run(pipeline)
            model = self.hub.model
            return {"items": [entity_label(model, i) for i in result.ids]}
        if method == "POST" and rest == ["replay"]:
            if not isinstance(tool, LoggerTool):
                raise _error(400, "wrong-kind", f"tool {tool.id!r} is not a logger")
            index = body.get("index")
            if not isinstance(index, int):
                raise _error(400, "bad-request", "body needs an integer index")
            published = tool.replay(index)
            return {"published": len(published)}
        if method == "GET" and rest == ["export"]:
            if not isinstance(tool, LoggerTool):
                raise _error(400, "wrong-kind", f"tool {tool.id!r} is not a logger")
            fmt = query.get("format", "txt")
            return {"format": fmt, "content": tool.export(fmt)}
        if method == "POST" and rest == ["min-tokens"]:
            if tool.kind != "duplication":
                raise _error(400, "wrong-kind", f"tool {tool.id!r} is not a duplication tool")
            value = body.get("minTokens")
            if not isinstance(value, int) or value < 1:
                raise _error(400, "bad-request", "minTokens must be a positive integer")
            tool.min_tokens = value
            self._emit_tool_state(tool)
            return {"tool": tool_state(tool)}
        raise _error(404, "not-found", f"no tool route for {'/'.join(rest)}")


# -- HTTP adapter -----------------------------------------------------------------


def make_handler(service: Service, lock: threading.Lock, ui_dir: Path | None):
    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def log_message(self, *args) -> None:  # keep test output quiet
            pass

        def _send_json(self, status: int, payload: Any) -> None:
            data = json.dumps(payload).encode("utf-8")
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(data)))
            self.send_header("Access-Control-Allow-Origin", "*")
            self.end_headers()
            self.wfile.write(data)

        def _serve_static(self, name: str) -> bool:
            if ui_dir is None:
                return False
            target = (ui_dir / name).resolve()
            if not str(target).startswith(str(ui_dir.resolve())) or not target.is_file():
                return False
            types = {
                ".html": "text/html; charset=utf-8",
                ".js": "text/javascript; charset=utf-8",
                ".css": "text/css; charset=utf-8",
            }
            data = target.read_bytes()
            self.send_response(200)
            self.send_header("Content-Type", types.get(target.suffix, "application/octet-stream"))
            self.send_header("Content-Length", str(len(data)))
            self.end_headers()
            self.wfile.write(data)
            return True

        def _serve_events(self) -> None:
            q = service.subscribe()
            try:
                self.send_response(200)
                self.send_header("Content-Type", "text/event-stream")
                self.send_header("Cache-Control", "no-cache")
                self.send_header("Connection", "keep-alive")
                self.end_headers()
                while True:
                    try:
                        event = q.get(timeout=15)
                    except queue.Empty:
                        self.wfile.write(b": ping\n\n")
                        self.wfile.flush()
                        continue
                    data = json.dumps(event)
                    self.wfile.write(f"data: {data}\n\n".encode("utf-8"))
                    self.wfile.flush()
            except (BrokenPipeError, ConnectionResetError):
                pass
            finally:
                service.unsubscribe(q)

        def _dispatch(self, method: str) -> None:
            parsed = urlparse(self.path)
            if method == "GET" and parsed.path == "/events":
                self._serve_events()
                return
            if method == "GET" and parsed.path in ("/", "/index.html"):
                if self._serve_static("index.html"):
                    return
            if method == "GET" and self._serve_static(parsed.path.lstrip("/")):
                return
            body: dict[str, Any] | None = None
            length = int(self.headers.get("Content-Length") or 0)
            if length:
                raw = self.rfile.read(length)
                try:
                    body = json.loads(raw)
                except json.JSONDecodeError:
                    self._send_json(400, {"error": "bad-request", "detail": "invalid JSON body"})
                    return
            with lock:
                status, payload = service.handle(method, self.path, body)
            self._send_json(status, payload)

        def do_GET(self) -> None:
            self._dispatch("GET")

        def do_POST(self) -> None:
            self._dispatch("POST")

    return Handler


def run_server(
    service: Service, port: int, ui_dir: Path | None = None
) -> ThreadingHTTPServer:
    lock = threading.Lock()
    handler = make_handler(service, lock, ui_dir)
    server = ThreadingHTTPServer(("127.0.0.1", port), handler)
    return server
