"""Place/Transition nets, the token game, and bounded reachability graphs."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

from .errors import ModelError, NotEnabledError, StateSpaceLimitError
from .multiset import Marking

TAU = "tau"


class PlaceId(NamedTuple):
    index: int
    name: str


@dataclass(frozen=True)
class Transition:
    """A net transition: consumes `pre`, produces `post`, observably `label`.

    The pre-set is never empty; the post-set may be.
    """

    tid: str
    pre: Marking
    label: str
    post: Marking

    def __post_init__(self):
        if self.pre.size == 0:
            raise ModelError(f"transition {self.tid!r} has an empty pre-set")

    @property
    def is_silent(self) -> bool:
        return self.label == TAU


class Net:
    """An immutable P/T net: places, labelled transitions, named markings."""

    def __init__(
        self,
        name: str,
        places: Sequence[str],
        transitions: Sequence[Transition] = (),
        named_markings: dict | None = None,
    ):
        if len(set(places)) != len(places):
            raise ModelError("duplicate place declaration")
        if TAU in places:
            raise ModelError(f"{TAU!r} is reserved and cannot name a place")
        self.name = name
        self.places: tuple[str, ...] = tuple(places)
        self.place_index: dict[str, int] = {p: i for i, p in enumerate(self.places)}
        self.place_ids: tuple[PlaceId, ...] = tuple(
            PlaceId(i, p) for i, p in enumerate(self.places)
        )
        seen = set()
        for t in transitions:
            if t.tid in seen:
                raise ModelError(f"duplicate transition id {t.tid!r}")
            seen.add(t.tid)
            for place in list(t.pre) + list(t.post):
                if place not in self.place_index:
                    raise ModelError(
                        f"transition {t.tid!r} uses undeclared place {place!r}"
                    )
        self.transitions: tuple[Transition, ...] = tuple(transitions)
        self.transition_index: dict[str, Transition] = {
            t.tid: t for t in self.transitions
        }
        self.named_markings: dict[str, Marking] = dict(named_markings or {})
        for mname, m in self.named_markings.items():
            for place in m:
                if place not in self.place_index:
                    raise ModelError(
                        f"marking {mname!r} uses undeclared place {place!r}"
                    )

    def check_marking(self, m: Marking) -> None:
        for place in m:
            if place not in self.place_index:
                raise ModelError(f"marking uses undeclared place {place!r}")

    def check_transition(self, t: Transition) -> None:
        """Accepts any structurally valid transition over declared places.

        Transitions synthesized on demand (idling steps) are allowed even
        though they are never stored in `transitions`.
        """
        for place in list(t.pre) + list(t.post):
            if place not in self.place_index:
                raise ModelError(f"transition {t.tid!r} uses undeclared place {place!r}")

    def marking_key(self, m: Marking) -> tuple:
        """Canonical ordering key: lexicographic on (place index, count)."""
        return tuple(sorted((self.place_index[p], n) for p, n in m.items()))

    def format_marking(self, m: Marking) -> str:
        """Render a marking in canonical place order; the empty one is '0'."""
        if m.size == 0:
            return "0"
        parts = []
        for idx, n in self.marking_key(m):
            p = self.places[idx]
            parts.append(f"{n}*{p}" if n > 1 else p)
        return "+".join(parts)

    def components(self) -> list[frozenset]:
        """Weakly connected components of the place/transition graph."""
        parent = {p: p for p in self.places}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        def union(a, b):
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[rb] = ra

        for t in self.transitions:
            touched = list(t.pre) + list(t.post)
            for other in touched[1:]:
                union(touched[0], other)
        groups: dict[str, set] = {}
        for p in self.places:
            groups.setdefault(find(p), set()).add(p)
        comps = [frozenset(g) for g in groups.values()]
        comps.sort(key=lambda c: min(self.place_index[p] for p in c))
        return comps

    def component_of(self, places: Iterable[str]) -> frozenset:
        """Union of the components touched by the given places."""
        wanted = set(places)
        out: set = set()
        for comp in self.components():
            if comp & wanted:
                out |= comp
        return frozenset(out)

    def __repr__(self) -> str:
        return (
            f"Net({self.name!r}, {len(self.places)} places, "
            f"{len(self.transitions)} transitions)"
        )


def enabled(net: Net, m: Marking, t: Transition) -> bool:
    """True iff the pre-set of t is contained in m (pointwise)."""
    net.check_transition(t)
    net.check_marking(m)
    return m.covers(t.pre)


def fire(net: Net, m: Marking, t: Transition) -> Marking:
    """Fire t at m, producing (m - pre) + post. t must be enabled."""
    if not enabled(net, m, t):
        raise NotEnabledError(f"transition {t.tid!r} is not enabled at {m!r}")
    return (m - t.pre) + t.post


@dataclass
class Lts:
    """A reachability graph: deduplicated markings and labelled edges."""

    states: list[Marking] = field(default_factory=list)
    edges: list[tuple[int, str, int]] = field(default_factory=list)
    initials: list[int] = field(default_factory=list)


def reach_lts(
    net: Net,
    initials: Sequence[Marking],
    state_cap: int = 10_000,
    edge_cap: int = 100_000,
) -> Lts:
    """Breadth-first closure of the initial markings under firing.

    State numbering is deterministic: initials in the given order, then
    discovered states level by level, each expansion batch sorted by the
    canonical marking ordering. Exceeding a cap raises
    StateSpaceLimitError carrying the count reached.
    """
    if state_cap <= 0 or edge_cap <= 0:
        raise ModelError("state and edge caps must be positive")
    lts = Lts()
    index: dict[Marking, int] = {}
    queue: deque[int] = deque()

    def intern(m: Marking) -> int:
        if m in index:
            return index[m]
        if len(lts.states) >= state_cap:
            raise StateSpaceLimitError(
                f"state space too large or unbounded (cap {state_cap})",
                count=len(lts.states),
            )
        index[m] = len(lts.states)
        lts.states.append(m)
        queue.append(index[m])
        return index[m]

    for m in initials:
        net.check_marking(m)
        lts.initials.append(intern(m))
    while queue:
        src = queue.popleft()
        m = lts.states[src]
        successors = []
        for t in net.transitions:
            if m.covers(t.pre):
                successors.append(((m - t.pre) + t.post, t.label))
        successors.sort(key=lambda pair: (net.marking_key(pair[0]), pair[1]))
        for m2, label in successors:
            dst = intern(m2)
            if len(lts.edges) >= edge_cap:
                raise StateSpaceLimitError(
                    f"edge count exceeded cap {edge_cap}", count=len(lts.edges)
                )
            lts.edges.append((src, label, dst))
    return lts


def is_safe(net: Net, initials: Sequence[Marking], state_cap: int = 10_000) -> bool:
    """True iff every reachable marking has all multiplicities <= 1."""
    lts = reach_lts(net, initials, state_cap=state_cap, edge_cap=10 * state_cap)
    return all(all(n <= 1 for n in m.values()) for m in lts.states)
