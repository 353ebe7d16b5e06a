"""Partial orders of spacetime events from interval timestamps and link delays.

An event is stamped with an interval that is guaranteed to contain its true
time in a shared reference frame.  Agents are nodes of a communication graph
whose all-pairs shortest-path delays bound how fast information can travel.
Two stamped events are strictly ordered when the gap between them exceeds the
travel delay; the transitive closure of that pairwise relation is the version
poset used for snapshots.

Version posets can also be given directly as an explicit DAG of cover edges,
bypassing intervals entirely.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Iterable, Mapping, Sequence

Time = int | Fraction
INFINITE_DELAY = math.inf


class InvalidDelay(ValueError):
    """A communication link was given a negative delay."""


class CausalityViolation(ValueError):
    """The derived (or supplied) strict order contains a cycle."""


class UnknownEvent(KeyError):
    """An event id is not part of the patch."""


class UnknownVersion(KeyError):
    """A version id is not part of the poset."""


@dataclass(frozen=True)
class Eventstamp:
    """An agent-located interval timestamp for one event."""

    event_id: Hashable
    agent: Hashable
    start: Time
    end: Time

    def __post_init__(self) -> None:
        if self.start > self.end:
            raise ValueError(f"event {self.event_id!r}: interval start exceeds end")


class SpaceGraph:
    """Directed communication links between agents, with derived delay matrix.

    ``delays[a][b]`` is the shortest-path delay from a to b; unreachable pairs
    get +inf (no causal relation is ever possible between them).
    """

    def __init__(self, agents: Iterable[Hashable], links: Iterable[tuple[Hashable, Hashable, Time]] = ()):
        self.agents = tuple(agents)
        if len(set(self.agents)) != len(self.agents):
            raise ValueError("duplicate agent identifiers")
        self.links = tuple(links)
        known = set(self.agents)
        for src, dst, delay in self.links:
            if src not in known or dst not in known:
                raise ValueError(f"link {src!r}->{dst!r} references unknown agent")
            if delay < 0:
                raise InvalidDelay(f"link {src!r}->{dst!r} has negative delay {delay}")
        self.delays = self._all_pairs()

    def _all_pairs(self) -> dict[Hashable, dict[Hashable, Time | float]]:
        d: dict[Hashable, dict[Hashable, Time | float]] = {
            a: {b: (0 if a == b else INFINITE_DELAY) for b in self.agents} for a in self.agents
        }
        for src, dst, delay in self.links:
            if delay < d[src][dst]:
                d[src][dst] = delay
        for k in self.agents:
            for a in self.agents:
                dak = d[a][k]
                if dak is INFINITE_DELAY:
                    continue
                for b in self.agents:
                    via = dak + d[k][b] if d[k][b] is not INFINITE_DELAY else INFINITE_DELAY
                    if via < d[a][b]:
                        d[a][b] = via
        return d

    def delay(self, a: Hashable, b: Hashable) -> Time | float:
        return self.delays[a][b]


def derive_delays(graph: SpaceGraph) -> SpaceGraph:
    """Return the graph with its all-pairs delay matrix filled (idempotent)."""
    return graph


def strictly_causal(e: Eventstamp, f: Eventstamp, graph: SpaceGraph) -> bool:
    """True when the gap between e's latest end and f's earliest start exceeds
    the travel delay from e's agent to f's agent (strict inequality)."""
    d = graph.delay(e.agent, f.agent)
    return e.end < f.start and f.start - e.end > d


def possibly_causal(e: Eventstamp, f: Eventstamp, graph: SpaceGraph) -> bool:
    """True when e might lie in f's past: the widest reading of the intervals
    leaves enough time for information to travel."""
    d = graph.delay(e.agent, f.agent)
    return e.start < f.end and f.end - e.start > d


def _transitive_closure(ids: Sequence[Hashable], pairs: set[tuple[Hashable, Hashable]]) -> set[tuple[Hashable, Hashable]]:
    succ: dict[Hashable, set[Hashable]] = {i: set() for i in ids}
    for a, b in pairs:
        succ[a].add(b)
    for k in ids:
        for a in ids:
            if k in succ[a]:
                succ[a] |= succ[k]
    return {(a, b) for a in ids for b in succ[a]}


class Patch:
    """A spacetime patch: a communication graph, stamped events, and the
    derived strict and possible causal orders (both transitively closed)."""

    def __init__(self, graph: SpaceGraph, events: Iterable[Eventstamp]):
        self.graph = graph
        self.events = tuple(events)
        self._by_id = {e.event_id: e for e in self.events}
        if len(self._by_id) != len(self.events):
            raise ValueError("duplicate event ids in patch")
        for e in self.events:
            if e.agent not in graph.delays:
                raise ValueError(f"event {e.event_id!r} on unknown agent {e.agent!r}")
        ids = tuple(self._by_id)
        strict = {
            (e.event_id, f.event_id)
            for e, f in itertools.permutations(self.events, 2)
            if strictly_causal(e, f, graph)
        }
        possible = {
            (e.event_id, f.event_id)
            for e, f in itertools.permutations(self.events, 2)
            if possibly_causal(e, f, graph)
        }
        self.strict_order = frozenset(_transitive_closure(ids, strict))
        self.possible_order = frozenset(_transitive_closure(ids, possible))
        for i in ids:
            if (i, i) in self.strict_order:
                raise CausalityViolation(f"strict order has a cycle through {i!r}")

    def event(self, event_id: Hashable) -> Eventstamp:
        try:
            return self._by_id[event_id]
        except KeyError:
            raise UnknownEvent(event_id) from None

    def strictly_precedes(self, a: Hashable, b: Hashable) -> bool:
        self.event(a)
        self.event(b)
        return (a, b) in self.strict_order

    def possibly_precedes(self, a: Hashable, b: Hashable) -> bool:
        self.event(a)
        self.event(b)
        return (a, b) in self.possible_order

    def is_antichain(self, event_ids: Iterable[Hashable]) -> bool:
        ids = list(event_ids)
        for i in ids:
            self.event(i)
        return not any((a, b) in self.strict_order for a, b in itertools.permutations(ids, 2))

    def past(self, event_id: Hashable) -> set[Hashable]:
        """Inclusive past light cone {f : f <= event_id} in the strict order."""
        self.event(event_id)
        return {event_id} | {a for (a, b) in self.strict_order if b == event_id}

    def hasse_covers(self) -> list[tuple[Hashable, Hashable]]:
        covers = []
        for a, b in self.strict_order:
            if not any((a, m) in self.strict_order and (m, b) in self.strict_order for m in self._by_id):
                covers.append((a, b))
        return sorted(covers, key=lambda p: (str(p[0]), str(p[1])))

    def to_version_poset(self) -> "VersionPoset":
        return VersionPoset(tuple(self._by_id), self.hasse_covers())


def build_patch(graph: SpaceGraph, events: Iterable[Eventstamp]) -> Patch:
    return Patch(graph, events)


def is_antichain(event_ids: Iterable[Hashable], patch: Patch) -> bool:
    return patch.is_antichain(event_ids)


class VersionPoset:
    """A finite poset of version labels, given by its cover (Hasse) edges."""

    def __init__(self, versions: Iterable[Hashable], covers: Iterable[tuple[Hashable, Hashable]] = ()):
        self.versions = tuple(versions)
        self._known = frozenset(self.versions)
        if len(self._known) != len(self.versions):
            raise ValueError("duplicate versions")
        self.covers = tuple((u, v) for u, v in covers)
        for u, v in self.covers:
            if u not in self._known or v not in self._known:
                raise UnknownVersion(f"cover ({u!r}, {v!r}) references unknown version")
        below = _transitive_closure(self.versions, set(self.covers))
        for v in self.versions:
            if (v, v) in below:
                raise CausalityViolation(f"version order has a cycle through {v!r}")
        self._lt = frozenset(below)

    @classmethod
    def antichain(cls, versions: Iterable[Hashable]) -> "VersionPoset":
        return cls(versions, ())

    @classmethod
    def chain(cls, versions: Sequence[Hashable]) -> "VersionPoset":
        return cls(versions, tuple(zip(versions, versions[1:])))

    def __contains__(self, v: Hashable) -> bool:
        return v in self._known

    def require(self, v: Hashable) -> None:
        if v not in self._known:
            raise UnknownVersion(v)

    def leq(self, u: Hashable, v: Hashable) -> bool:
        self.require(u)
        self.require(v)
        return u == v or (u, v) in self._lt

    def down_set(self, v: Hashable) -> set[Hashable]:
        """The order ideal (inclusive past) of v."""
        self.require(v)
        return {v} | {u for (u, w) in self._lt if w == v}

    def maximal(self, versions: Iterable[Hashable]) -> set[Hashable]:
        vs = set(versions)
        return {v for v in vs if not any(v != w and self.leq(v, w) for w in vs)}

    def is_antichain(self, versions: Iterable[Hashable]) -> bool:
        vs = list(versions)
        return not any(a != b and self.leq(a, b) for a in vs for b in vs)

    def with_child(self, parent: Hashable, child: Hashable) -> "VersionPoset":
        self.require(parent)
        if child in self._known:
            raise ValueError(f"version {child!r} already present")
        return VersionPoset(self.versions + (child,), self.covers + ((parent, child),))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, VersionPoset):
            return NotImplemented
        return set(self.versions) == set(other.versions) and self._lt == other._lt

    def __repr__(self) -> str:
        return f"VersionPoset({list(self.versions)!r}, covers={list(self.covers)!r})"
