from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import NamedTuple, Protocol, Sequence

from ..geometry import Point
from ..trees import Branch, Tree


class Kind(str, Enum):
    FACE_L = "L"
    FACE_R = "R"
    GREEDY = "G"
    RECOVERY = "P"

    @property
    def is_face(self) -> bool:
        return self in (Kind.FACE_L, Kind.FACE_R)


class Recovery(NamedTuple):
    """Perimeter-mode state: where recovery began and the last face-change point."""

    entry: Point
    entry_dist: float
    lf: Point


@dataclass(frozen=True, eq=False)
class RoutingMessage:
    session: str
    kind: Kind
    source: int
    sender: int
    receiver: int
    ttl: int | None
    tree: Tree | None = None
    route: Branch | None = None
    targets: tuple[Point, ...] = ()
    recovery: Recovery | None = None

    def hop(self, kind: Kind, receiver: int, **changes) -> "RoutingMessage":
        """The message as re-sent by its current receiver, one TTL unit spent."""
        ttl = None if self.ttl is None else self.ttl - 1
        return replace(self, kind=kind, sender=self.receiver, receiver=receiver, ttl=ttl, **changes)


@dataclass
class Actions:
    """What a node does with one received message."""

    deliveries: list[int] = field(default_factory=list)
    enqueues: list[RoutingMessage] = field(default_factory=list)
    cancellations: list[RoutingMessage] = field(default_factory=list)
    tags: list[str] = field(default_factory=list)
    error: bool = False


class RoutingProtocol(Protocol):
    name: str
    source: int
    target_nodes: tuple[int, ...]

    def start(self, ttl: int | None) -> list[RoutingMessage]: ...

    def on_receive(self, n: int, msg: RoutingMessage,
                   queue: Sequence[RoutingMessage]) -> Actions: ...


def mate_of(m1: RoutingMessage, m2: RoutingMessage) -> bool:
    """Opposite-direction face messages crossing the same edge of the same session."""
    if not (m1.kind.is_face and m2.kind.is_face) or m1.kind == m2.kind:
        return False
    if m1.session != m2.session or m1.source != m2.source:
        return False
    if m1.sender != m2.receiver or m1.receiver != m2.sender:
        return False
    return m1.tree is m2.tree or m1.tree == m2.tree
