"""Publish/subscribe orchestration with a deterministic gather barrier.

Experts can run in-process (default transport, synchronous dispatch) or
behind any transport honouring the same envelope schema.  The gather
barrier keys responses by expert id, so solve results never depend on
response arrival order.

Payload schemas (JSON, field names are fixed):

* ``clue.request``: ``{"correlation", "clue text", "length",
  "active expert ids"}``
* ``clue.response``: ``{"correlation", "expert id", "confidence",
  "candidates": [{"answer", "probability"}]}``
* ``solver.status``: ``{"run id", "phase", "progress fraction"}``
"""

from __future__ import annotations

import json
import logging
import threading
import time
from dataclasses import dataclass
from typing import Callable, Protocol

from .experts.base import Candidate, CandidateList, Expert, empty_list, expert_generate

log = logging.getLogger("cruciver.bus")

TOPICS = ("clue.request", "clue.response", "solver.status")

TOPIC_REQUEST = "clue.request"
TOPIC_RESPONSE = "clue.response"
TOPIC_STATUS = "solver.status"


class BusTimeoutError(RuntimeError):
    pass


@dataclass(frozen=True)
class Envelope:
    topic: str
    correlation_id: str
    payload: str
    sender: str
    timestamp: float

    def __post_init__(self):
        if self.topic not in TOPICS:
            raise ValueError(f"unknown topic {self.topic!r}")


@dataclass(frozen=True)
class GatherPolicy:
    deadline_ms: float = 5000.0
    required: frozenset[str] = frozenset()
    optional: frozenset[str] = frozenset()

    def __post_init__(self):
        if self.deadline_ms <= 0:
            raise ValueError("deadline must be positive")

    @property
    def expert_ids(self) -> tuple[str, ...]:
        return tuple(sorted(self.required | self.optional))


Subscriber = Callable[[Envelope], None]
Delivery = tuple[Subscriber, Envelope]


class Transport(Protocol):
    """Delivery strategy; in-process is synchronous, others may buffer."""

    def submit(self, deliveries: list[Delivery]) -> None: ...

    def pump(self) -> int: ...


class InProcessTransport:
    """Immediate synchronous delivery, FIFO per publisher and topic."""

    def submit(self, deliveries: list[Delivery]) -> None:
        for subscriber, envelope in deliveries:
            subscriber(envelope)

    def pump(self) -> int:
        return 0


class PermutingTransport:
    """Buffers deliveries and releases them in reversed order on pump().

    Exists to prove that solve results are arrival-order independent.
    """

    def __init__(self):
        self._pending: list[Delivery] = []

    def submit(self, deliveries: list[Delivery]) -> None:
        self._pending.extend(deliveries)

    def pump(self) -> int:
        pending, self._pending = self._pending, []
        for subscriber, envelope in reversed(pending):
            subscriber(envelope)
        return len(pending)


class MessageBus:
    """Topic-based bus; publish is safe from any thread."""

    def __init__(self, transport: Transport | None = None):
        self._transport = transport or InProcessTransport()
        self._subscribers: dict[str, list[Subscriber]] = {t: [] for t in TOPICS}
        self._lock = threading.Lock()

    def subscribe(self, topic: str, subscriber: Subscriber) -> Callable[[], None]:
        if topic not in TOPICS:
            raise ValueError(f"unknown topic {topic!r}")
        with self._lock:
            self._subscribers[topic].append(subscriber)

        def unsubscribe():
            with self._lock:
                if subscriber in self._subscribers[topic]:
                    self._subscribers[topic].remove(subscriber)

        return unsubscribe

    def publish(self, envelope: Envelope) -> int:
        """Deliver to all current subscribers; returns the delivery count."""
        with self._lock:
            targets = list(self._subscribers[envelope.topic])
        self._transport.submit([(t, envelope) for t in targets])
        return len(targets)

    def pump(self) -> int:
        return self._transport.pump()


# --- payload codecs -------------------------------------------------------


def encode_request(correlation: str, clue: str, length: int, active: tuple[str, ...]) -> str:
    return json.dumps(
        {
            "correlation": correlation,
            "clue text": clue,
            "length": length,
            "active expert ids": list(active),
        },
        sort_keys=True,
    )


def decode_request(payload: str) -> dict:
    return json.loads(payload)


def encode_response(correlation: str, clist: CandidateList) -> str:
    return json.dumps(
        {
            "correlation": correlation,
            "expert id": clist.expert_id,
            "confidence": clist.confidence,
            "candidates": [
                {"answer": c.answer, "probability": c.probability}
                for c in clist.candidates
            ],
        },
        sort_keys=True,
    )


def decode_response(payload: str, clue_id: str = "") -> tuple[str, CandidateList]:
    data = json.loads(payload)
    candidates = tuple(
        Candidate(item["answer"], item["probability"]) for item in data["candidates"]
    )
    clist = CandidateList(clue_id, candidates, data["expert id"], data["confidence"])
    return data["correlation"], clist


def encode_status(run_id: str, phase: str, progress: float) -> str:
    return json.dumps(
        {"run id": run_id, "phase": phase, "progress fraction": progress},
        sort_keys=True,
    )


# --- expert responder and gather barrier -----------------------------------


class ExpertResponder:
    """Subscribes an expert to clue requests, answering when active."""

    def __init__(self, bus: MessageBus, expert: Expert):
        self.bus = bus
        self.expert = expert
        self._unsubscribe = bus.subscribe(TOPIC_REQUEST, self._on_request)

    def _on_request(self, envelope: Envelope) -> None:
        request = decode_request(envelope.payload)
        if self.expert.expert_id not in request["active expert ids"]:
            return
        clist = expert_generate(self.expert, request["clue text"], request["length"])
        self.bus.publish(
            Envelope(
                TOPIC_RESPONSE,
                request["correlation"],
                encode_response(request["correlation"], clist),
                self.expert.expert_id,
                time.time(),
            )
        )

    def close(self) -> None:
        self._unsubscribe()


class CandidateGatherer:
    """Fans a clue out to the experts and gathers one list per expert.

    The returned map is keyed (and iterated) by expert id, which makes
    downstream merging independent of response arrival order.  Stale
    responses (unknown correlation ids) are discarded and counted.
    """

    def __init__(self, bus: MessageBus, run_id: str = "run", sender: str = "solver"):
        self.bus = bus
        self.run_id = run_id
        self.sender = sender
        self.stale_responses = 0
        self._sequence = 0
        self._inbox: dict[str, dict[str, CandidateList]] = {}
        self._unsubscribe = bus.subscribe(TOPIC_RESPONSE, self._on_response)

    def _on_response(self, envelope: Envelope) -> None:
        correlation, clist = decode_response(envelope.payload)
        pending = self._inbox.get(correlation)
        if pending is None or clist.expert_id in pending:
            self.stale_responses += 1
            return
        pending[clist.expert_id] = clist

    def request_candidates(
        self, clue: str, length: int, policy: GatherPolicy
    ) -> dict[str, CandidateList]:
        self._sequence += 1
        correlation = f"{self.run_id}:{self._sequence}"
        self._inbox[correlation] = {}
        active = policy.expert_ids
        self.bus.publish(
            Envelope(
                TOPIC_REQUEST,
                correlation,
                encode_request(correlation, clue, length, active),
                self.sender,
                time.time(),
            )
        )
        deadline = time.monotonic() + policy.deadline_ms / 1000.0
        pending = self._inbox[correlation]
        while True:
            delivered = self.bus.pump()
            if policy.required <= set(pending):
                break
            if time.monotonic() >= deadline:
                missing = sorted(policy.required - set(pending))
                del self._inbox[correlation]
                raise BusTimeoutError(f"expert timeout: {', '.join(missing)}")
            if delivered == 0:
                time.sleep(0.001)
        gathered = self._inbox.pop(correlation)
        result = {}
        for expert_id in active:
            clist = gathered.get(expert_id)
            result[expert_id] = clist if clist is not None else empty_list(expert_id)
        return result

    def close(self) -> None:
        self._unsubscribe()
