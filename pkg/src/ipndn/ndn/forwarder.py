"""NDN forwarder: FIB longest-prefix match, PIT aggregation, Content Store.

Times are integer microseconds of simulation time. Face identifiers are any
hashable values; the simulator uses neighbour node ids plus ``"app"`` for the
local application face.
"""

from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Hashable, Iterable

from .name import Name
from .packet import DEFAULT_INTEREST_LIFETIME_MS, Data, Interest, Packet

FaceId = Hashable
Emission = tuple[FaceId, Packet]

DEFAULT_CS_CAPACITY = 256


@dataclass
class FibEntry:
    prefix: Name
    next_hops: list = field(default_factory=list)


def fib_lookup(fib: Iterable[FibEntry], name: Name) -> list:
    """Next hops of the longest FIB prefix matching ``name``, or ``[]``."""
    best = None
    for entry in fib:
        if entry.prefix.is_prefix_of(name) and (best is None or len(entry.prefix) > len(best.prefix)):
            best = entry
    return list(best.next_hops) if best is not None else []


class Fib:
    """FIB indexed by prefix components; lookup walks from longest to shortest."""

    def __init__(self, entries: Iterable[FibEntry] = ()):
        self._by_prefix: dict[tuple[bytes, ...], FibEntry] = {}
        for e in entries:
            self.add(e.prefix, *e.next_hops)

    def add(self, prefix: Name, *faces: FaceId) -> None:
        entry = self._by_prefix.get(prefix.components)
        if entry is None:
            entry = self._by_prefix[prefix.components] = FibEntry(prefix, [])
        for f in faces:
            if f not in entry.next_hops:
                entry.next_hops.append(f)

    def remove(self, prefix: Name) -> None:
        self._by_prefix.pop(prefix.components, None)

    def lookup(self, name: Name) -> list:
        comps = name.components
        for i in range(len(comps), -1, -1):
            entry = self._by_prefix.get(comps[:i])
            if entry is not None:
                return list(entry.next_hops)
        return []

    def __iter__(self):
        return iter(self._by_prefix.values())

    def __len__(self) -> int:
        return len(self._by_prefix)


@dataclass
class PitEntry:
    name: Name
    expiry: int
    # dicts used as insertion-ordered sets so emission order is reproducible
    in_faces: dict = field(default_factory=dict)
    seen_nonces: set = field(default_factory=set)


@dataclass
class CsEntry:
    data: Data
    inserted_at: int

    def fresh(self, now: int) -> bool:
        return now < self.inserted_at + self.data.freshness_ms * 1000


@dataclass
class ForwarderCounters:
    interests_in: int = 0
    interests_out: int = 0
    data_in: int = 0
    data_out: int = 0
    cs_hits: int = 0
    aggregated: int = 0
    duplicate_nonce: int = 0
    no_route: int = 0
    unsolicited: int = 0
    pit_expired: int = 0


class Forwarder:
    """Per-router forwarding state. Single-owner; not thread-safe."""

    def __init__(
        self,
        fib: Fib | None = None,
        cs_capacity: int = DEFAULT_CS_CAPACITY,
        default_lifetime_ms: int = DEFAULT_INTEREST_LIFETIME_MS,
    ):
        self.fib = fib if fib is not None else Fib()
        self.pit: dict[Name, PitEntry] = {}
        self.cs: OrderedDict[Name, CsEntry] = OrderedDict()
        self.cs_capacity = cs_capacity
        self.default_lifetime_ms = default_lifetime_ms
        self.counters = ForwarderCounters()

    def _live_pit(self, name: Name, now: int) -> PitEntry | None:
        entry = self.pit.get(name)
        if entry is not None and entry.expiry <= now:
            del self.pit[name]
            self.counters.pit_expired += 1
            return None
        return entry

    def on_interest(self, interest: Interest, in_face: FaceId, now: int) -> list[Emission]:
        c = self.counters
        c.interests_in += 1
        name = interest.name

        cached = self.cs.get(name)
        if cached is not None and cached.fresh(now):
            c.cs_hits += 1
            c.data_out += 1
            return [(in_face, cached.data)]

        entry = self._live_pit(name, now)
        if entry is not None:
            if interest.nonce in entry.seen_nonces:
                c.duplicate_nonce += 1
                return []
            entry.seen_nonces.add(interest.nonce)
            entry.in_faces[in_face] = None
            c.aggregated += 1
            return []

        out_faces = [f for f in self.fib.lookup(name) if f != in_face]
        if not out_faces:
            c.no_route += 1
            return []
        lifetime = interest.lifetime_ms or self.default_lifetime_ms
        entry = PitEntry(name, now + lifetime * 1000)
        entry.in_faces[in_face] = None
        entry.seen_nonces.add(interest.nonce)
        self.pit[name] = entry
        c.interests_out += len(out_faces)
        return [(f, interest) for f in out_faces]

    def on_data(self, data: Data, in_face: FaceId, now: int) -> list[Emission]:
        c = self.counters
        c.data_in += 1
        entry = self._live_pit(data.name, now)
        if entry is None:
            c.unsolicited += 1
            return []
        del self.pit[data.name]
        self._cache(data, now)
        faces = [f for f in entry.in_faces if f != in_face]
        c.data_out += len(faces)
        return [(f, data) for f in faces]

    def _cache(self, data: Data, now: int) -> None:
        if self.cs_capacity <= 0:
            return
        self.cs.pop(data.name, None)
        self.cs[data.name] = CsEntry(data, now)
        while len(self.cs) > self.cs_capacity:
            self.cs.popitem(last=False)

    def purge(self, now: int) -> int:
        """Drop expired PIT entries; returns how many were removed."""
        expired = [n for n, e in self.pit.items() if e.expiry <= now]
        for n in expired:
            del self.pit[n]
        self.counters.pit_expired += len(expired)
        return len(expired)
