from __future__ import annotations

from collections import Counter, defaultdict
from typing import Callable, DefaultDict

from smtad.contracts.types import EpochRecord, EventType, GuardEvent, MetricsReport, SweepCellResult

EventHandler = Callable[[object], None]

PAYLOAD_TYPES: dict[EventType, type] = {
    EventType.EPOCH: EpochRecord,
    EventType.GUARD: GuardEvent,
    EventType.METRICS: MetricsReport,
    EventType.CELL: SweepCellResult,
}


class EventBus:
    """Synchronous fan-out of run events to subscribers (journal, tests).

    Every payload must be the contract dataclass of its event type; the
    journal decodes records back into exactly that type.
    """

    def __init__(self) -> None:
        self._subscribers: DefaultDict[EventType, list[EventHandler]] = defaultdict(list)
        self.counts: Counter[EventType] = Counter()

    def subscribe(self, event_type: EventType, handler: EventHandler) -> Callable[[], None]:
        self._subscribers[event_type].append(handler)

        def _detach() -> None:
            if handler in self._subscribers[event_type]:
                self._subscribers[event_type].remove(handler)

        return _detach

    def publish(self, event_type: EventType, payload: object) -> None:
        expected = PAYLOAD_TYPES[event_type]
        if not isinstance(payload, expected):
            raise TypeError(f"{event_type.value} payload must be {expected.__name__}, got {type(payload).__name__}")
        self.counts[event_type] += 1
        for handler in list(self._subscribers.get(event_type, [])):
            handler(payload)
