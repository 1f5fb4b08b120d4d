"""Publish/subscribe buses that keep analysis tools synchronized.

Tools publish ordered groups of entity ids on buses.  Every other tool
attached to the bus receives the message exactly once; what it does with it
depends on its mode:

    following     replace current entities with the incoming group (default)
    frozen        ignore incoming groups entirely, publishing still allowed
    highlighting  keep current entities, highlight incoming ∩ current

A tool marked as a bridge republishes what it receives onto its other buses.
Loop freedom comes from a per-lineage record of visited buses: one original
publication traverses each bus at most once, however the bridges are wired.
Deliveries are serialized; reactions (such as bridge forwards) are queued
behind the delivery in progress, never run inside it.  All ordering is
deterministic, so identical publication sequences give identical histories.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

from .errors import BusError, DetachedToolError, UnknownEntityError
from .model import Model


class ToolMode(str, Enum):
    FOLLOWING = "following"
    FROZEN = "frozen"
    HIGHLIGHTING = "highlighting"


@dataclass(frozen=True)
class BusMessage:
    message_id: int
    lineage_id: int  # original publication this message descends from
    bus_id: str
    producer_id: str
    entity_ids: tuple[int, ...]
    visited_buses: frozenset[str]
    timestamp: int


@dataclass(eq=False)
class Bus:
    id: str
    history: list[BusMessage] = field(default_factory=list)
    attached: list["ToolInstance"] = field(default_factory=list)


class ToolInstance:
    """Base tool: mode handling and current/highlighted entity state.

    Subclasses (see tools.py) add their payloads by overriding react().
    """

    kind = "generic"

    def __init__(self, hub: "ToolHub", tool_id: str, bridge: bool = False):
        self.hub = hub
        self.id = tool_id
        self.bridge = bridge
        self.mode = ToolMode.FOLLOWING
        self.current_entities: tuple[int, ...] = ()
        self.highlighted: tuple[int, ...] = ()
        self.buses: list[Bus] = []  # attachment order

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.id} {self.mode.value}>"

    def receive(self, message: BusMessage) -> bool:
        """Apply one incoming message; True when visible state changed."""
        if self.mode is ToolMode.FROZEN:
            return False
        if self.mode is ToolMode.HIGHLIGHTING:
            current = set(self.current_entities)
            self.highlighted = tuple(
                i for i in message.entity_ids if i in current
            )
        else:
            self.current_entities = tuple(dict.fromkeys(message.entity_ids))
            self.react(message)
        return True

    def react(self, message: BusMessage) -> None:
        """Hook for tool-specific recomputation after following a message."""

    def publish(self, bus: Bus, entity_ids) -> BusMessage:
        return self.hub.publish(self, bus, entity_ids)

    def select(self, entity_ids) -> list[BusMessage]:
        """Publish a user selection to every attached bus."""
        return [self.hub.publish(self, bus, entity_ids) for bus in self.buses]


class ToolHub:
    """Owns buses and tools, resolves ids against one model, and delivers."""

    def __init__(self, model: Model | None = None):
        self.model = model
        self.buses: dict[str, Bus] = {}
        self.tools: dict[str, ToolInstance] = {}
        self._clock = 0
        self._lineage_buses: dict[int, set[str]] = {}
        self._queue: list[tuple[Bus, BusMessage]] = []
        self._draining = False
        self.on_message: Callable[[Bus, BusMessage], None] | None = None
        self.on_tool_state: Callable[[ToolInstance], None] | None = None

    def set_model(self, model: Model) -> None:
        self.model = model

    # -- registry ---------------------------------------------------------------

    def create_bus(self, bus_id: str | None = None) -> Bus:
        if bus_id is None:
            bus_id = f"bus{len(self.buses) + 1}"
        if bus_id in self.buses:
            raise BusError(f"bus {bus_id!r} already exists")
        bus = Bus(id=bus_id)
        self.buses[bus_id] = bus
        return bus

    def add_tool(self, tool: ToolInstance, buses: tuple[Bus, ...] | list[Bus] = ()) -> ToolInstance:
        if tool.id in self.tools:
            raise BusError(f"tool {tool.id!r} already exists")
        self.tools[tool.id] = tool
        for bus in buses:
            self.attach(tool, bus)
        return tool

    def fresh_tool_id(self, kind: str) -> str:
        n = 1
        while f"{kind}{n}" in self.tools:
            n += 1
        return f"{kind}{n}"

    # -- attachment and modes -----------------------------------------------------

    def attach(self, tool: ToolInstance, bus: Bus) -> None:
        if self.buses.get(bus.id) is not bus:
            raise BusError(f"bus {bus.id!r} does not belong to this hub")
        if bus not in tool.buses:
            tool.buses.append(bus)
            bus.attached.append(tool)

    def detach(self, tool: ToolInstance, bus: Bus) -> None:
        if bus in tool.buses:
            tool.buses.remove(bus)
            bus.attached.remove(tool)

    def set_mode(self, tool: ToolInstance, mode: ToolMode | str) -> None:
        mode = ToolMode(mode)
        if tool.mode is mode:
            return
        tool.mode = mode
        if mode is not ToolMode.HIGHLIGHTING:
            self.highlight_reset(tool)
        if self.on_tool_state:
            self.on_tool_state(tool)

    @staticmethod
    def highlight_reset(tool: ToolInstance) -> None:
        tool.highlighted = ()

    # -- publication ----------------------------------------------------------------

    def _check_ids(self, entity_ids) -> tuple[int, ...]:
        if self.model is None:
            raise BusError("hub has no model to resolve entity ids against")
        ids = tuple(dict.fromkeys(entity_ids))
        for entity_id in ids:
            if self.model.lookup(entity_id) is None:
                raise UnknownEntityError(f"no entity with id {entity_id}")
        return ids

    def publish(self, tool: ToolInstance, bus: Bus, entity_ids) -> BusMessage:
        """Start a new message lineage from ``tool`` on ``bus``."""
        if bus not in tool.buses:
            raise DetachedToolError(
                f"tool {tool.id!r} is not attached to bus {bus.id!r}"
            )
        ids = self._check_ids(entity_ids)
        self._clock += 1
        message = BusMessage(
            message_id=self._clock,
            lineage_id=self._clock,
            bus_id=bus.id,
            producer_id=tool.id,
            entity_ids=ids,
            visited_buses=frozenset({bus.id}),
            timestamp=self._clock,
        )
        self._lineage_buses[message.lineage_id] = {bus.id}
        self._enqueue(bus, message)
        return message

    def _forward(self, bridge: ToolInstance, incoming: BusMessage) -> None:
        visited = self._lineage_buses.setdefault(
            incoming.lineage_id, set(incoming.visited_buses)
        )
        for bus in list(bridge.buses):
            if bus.id in visited:
                continue
            visited.add(bus.id)
            self._clock += 1
            forwarded = BusMessage(
                message_id=self._clock,
                lineage_id=incoming.lineage_id,
                bus_id=bus.id,
                producer_id=bridge.id,
                entity_ids=incoming.entity_ids,
                visited_buses=frozenset(visited),
                timestamp=self._clock,
            )
            self._enqueue(bus, forwarded)

    def _enqueue(self, bus: Bus, message: BusMessage) -> None:
        bus.history.append(message)
        if self.on_message:
            self.on_message(bus, message)
        self._queue.append((bus, message))
        if not self._draining:
            self._drain()

    def _drain(self) -> None:
        self._draining = True
        try:
            while self._queue:
                bus, message = self._queue.pop(0)
                # Snapshot: tools attaching mid-delivery wait for the next message.
                receivers = [
                    t for t in bus.attached if t.id != message.producer_id
                ]
                for tool in receivers:
                    changed = tool.receive(message)
                    if changed and self.on_tool_state:
                        self.on_tool_state(tool)
                    if tool.bridge and tool.mode is not ToolMode.FROZEN:
                        self._forward(tool, message)
        finally:
            self._draining = False
