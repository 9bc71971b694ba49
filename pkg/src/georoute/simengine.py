"""Slotted discrete-event simulator with per-node send queues.

In every slot each node whose queue holds a message enqueued in an earlier
slot transmits its head message. Transmissions within a slot are processed one
at a time in node-id order, so each one is an atomic step: the receiver's
handler runs, may cancel a pending mate from its own queue, and enqueues new
messages that become eligible in the next slot. Each transmission is lost
independently with the configured probability.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

from .geometry import dist
from .netgraph import Graph, shortest_path_hops
from .protocols.messages import RoutingMessage, RoutingProtocol

RECEIVED = "delivered-to-node"
LOST = "lost"
MATE_CANCELLED = "mate-cancelled"
TTL_DROPPED = "ttl-dropped"
UNSENT = "unsent"


@dataclass
class SimConfig:
    loss_probability: float = 0.0
    ttl: int | None = None
    max_slots: int | None = None
    rng_seed: object = 0
    batched_transmission_counting: bool = True
    flush_batches: bool = False

    def __post_init__(self):
        if not 0.0 <= self.loss_probability < 1.0:
            raise ValueError("loss_probability must be in [0, 1)")
        if self.max_slots is not None and self.max_slots <= 0:
            raise ValueError("max_slots must be positive")
        if self.ttl is not None and self.ttl <= 0:
            raise ValueError("ttl must be positive or None (unlimited)")


@dataclass(frozen=True)
class Event:
    slot: int
    sender: int
    receiver: int
    kind: str
    outcome: str
    uid: int


@dataclass
class DeliveryLog:
    first_slot: dict[int, int] = field(default_factory=dict)
    duplicates: int = 0

    def record(self, node: int, slot: int) -> None:
        if node in self.first_slot:
            self.duplicates += 1
        else:
            self.first_slot[node] = slot


@dataclass
class Transcript:
    source: int
    targets: tuple[int, ...]
    events: list[Event] = field(default_factory=list)
    deliveries: DeliveryLog = field(default_factory=DeliveryLog)
    raw_transmissions: int = 0
    batched_transmissions: int = 0
    created: int = 0
    slots: int = 0
    quiescent: bool = True
    visited: set[int] = field(default_factory=set)
    counters: dict[str, int] = field(default_factory=dict)
    protocol_errors: int = 0
    batched_counting: bool = True

    @property
    def transmissions(self) -> int:
        return self.batched_transmissions if self.batched_counting else self.raw_transmissions

    def outcome_counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for e in self.events:
            out[e.outcome] = out.get(e.outcome, 0) + 1
        return out

    def to_text(self) -> str:
        lines = [f"{e.slot} {e.sender} {e.receiver} {e.kind} {e.outcome}" for e in self.events]
        return "\n".join(lines) + ("\n" if lines else "")

    def write(self, path) -> None:
        Path(path).write_text(self.to_text())


@dataclass
class _Entry:
    uid: int
    msg: RoutingMessage
    slot: int
    batch: int


def default_max_slots(g: Graph, ttl: int | None) -> int:
    return 10 * (len(g) + (ttl or 0))


def run(g: Graph, planar_g: Graph, protocol: RoutingProtocol, cfg: SimConfig,
        observer: Callable[[int, Mapping[int, Sequence[RoutingMessage]]], None] | None = None
        ) -> Transcript:
    """Simulate one multicast session to quiescence or ``cfg.max_slots``.

    ``observer`` (tests only) is called after every atomic step with the
    current slot and a read-only view of all non-empty queues.
    """
    rng = random.Random(cfg.rng_seed)
    loss = cfg.loss_probability
    max_slots = cfg.max_slots or default_max_slots(g, cfg.ttl)
    tr = Transcript(protocol.source, tuple(protocol.target_nodes),
                    batched_counting=cfg.batched_transmission_counting)
    queues: dict[int, deque[_Entry]] = {}
    uid = 0
    events = tr.events

    def enqueue(msg: RoutingMessage, slot: int, batch: int) -> None:
        nonlocal uid
        uid += 1
        tr.created += 1
        if msg.ttl is not None and msg.ttl <= 0:
            events.append(Event(slot, msg.sender, msg.receiver, msg.kind.value, TTL_DROPPED, uid))
            return
        queues.setdefault(msg.sender, deque()).append(_Entry(uid, msg, slot, batch))

    def notify(slot):
        if observer is not None:
            observer(slot, {u: [e.msg for e in q] for u, q in queues.items() if q})

    tr.visited.add(protocol.source)
    for msg in protocol.start(cfg.ttl):
        enqueue(msg, 0, 0)
    notify(0)

    slot = 0
    while any(queues.values()):
        if slot >= max_slots:
            tr.quiescent = False
            break
        slot += 1
        for u in sorted(k for k, q in queues.items() if q):
            q = queues[u]
            if not q or q[0].slot >= slot:
                continue
            head = q.popleft()
            batch = [head]
            if cfg.flush_batches:
                while q and q[0].batch == head.batch and q[0].slot < slot:
                    batch.append(q.popleft())
            tr.batched_transmissions += 1
            tr.raw_transmissions += len(batch)
            for entry in batch:
                msg = entry.msg
                if loss and rng.random() < loss:
                    events.append(Event(slot, u, msg.receiver, msg.kind.value, LOST, entry.uid))
                    continue
                events.append(Event(slot, u, msg.receiver, msg.kind.value, RECEIVED, entry.uid))
                v = msg.receiver
                tr.visited.add(v)
                rq = queues.get(v, ())
                act = protocol.on_receive(v, msg, [e.msg for e in rq])
                if act.error:
                    tr.protocol_errors += 1
                for tag in act.tags:
                    tr.counters[tag] = tr.counters.get(tag, 0) + 1
                for dead in act.cancellations:
                    for i, e in enumerate(rq):
                        if e.msg is dead:
                            del rq[i]
                            events.append(Event(slot, v, dead.receiver, dead.kind.value,
                                                MATE_CANCELLED, e.uid))
                            break
                for t in act.deliveries:
                    tr.deliveries.record(t, slot)
                for out in act.enqueues:
                    enqueue(out, slot, entry.uid)
                notify(slot)
    tr.slots = slot
    for u in sorted(queues):
        for e in queues[u]:
            events.append(Event(slot, u, e.msg.receiver, e.msg.kind.value, UNSENT, e.uid))
    return tr


# -- metrics -----------------------------------------------------------------

def delivery_ratio_of(transcript: Transcript, targets: Iterable[int] | None = None) -> float:
    targets = list(transcript.targets if targets is None else targets)
    if not targets:
        return 0.0
    got = sum(1 for t in set(targets) if t in transcript.deliveries.first_slot)
    return got / len(set(targets))


def furthest_target(g: Graph, source: int, targets: Sequence[int]) -> int:
    P = g.nodes
    return max(targets, key=lambda t: (dist(P[source], P[t]), -t))


def latency_of(transcript: Transcript, targets: Sequence[int] | None, g: Graph) -> float | None:
    """Furthest target's delivery slot over its optimal hop count, over the delivery ratio.

    None when that target was never delivered.
    """
    targets = list(transcript.targets if targets is None else targets)
    ratio = delivery_ratio_of(transcript, targets)
    if ratio == 0 or not targets:
        return None
    far = furthest_target(g, transcript.source, targets)
    slot = transcript.deliveries.first_slot.get(far)
    hops = shortest_path_hops(g, transcript.source, far)
    if slot is None or not hops:
        return None
    return slot / hops / ratio


def message_cost_of(transcript: Transcript, m_targets: int | None = None) -> float | None:
    m = len(transcript.targets) if m_targets is None else m_targets
    ratio = delivery_ratio_of(transcript)
    if ratio == 0 or m == 0:
        return None
    return transcript.transmissions / m / ratio
