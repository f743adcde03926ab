"""Interleaving-style bisimilarity oracles on bounded reachability graphs.

These ignore all token structure and work purely on the labelled graph, so
they serve as independent cross-checks: place-based verdicts must imply
the corresponding graph-level ones on bounded nets.
"""
from __future__ import annotations

from collections import deque

from .errors import ModelError
from .multiset import Marking
from .net import TAU, Lts, Net, reach_lts


def _check_state(lts: Lts, i: int) -> None:
    if not (0 <= i < len(lts.states)):
        raise ModelError(f"state index {i} out of range")


def strong_partition(lts: Lts) -> list:
    """Greatest strong bisimulation as a state partition.

    Partition refinement: split blocks by the multiset of (label, target
    block) signatures until stable.
    """
    n = len(lts.states)
    succ = [[] for _ in range(n)]
    for src, label, dst in lts.edges:
        succ[src].append((label, dst))
    block = [0] * n
    while True:
        signatures = {}
        new_block = [0] * n
        for s in range(n):
            sig = (block[s], frozenset((label, block[d]) for label, d in succ[s]))
            if sig not in signatures:
                signatures[sig] = len(signatures)
            new_block[s] = signatures[sig]
        if new_block == block:
            return block
        block = new_block


def strong_bisim(lts: Lts, i: int, j: int) -> bool:
    """True iff states i and j are strongly bisimilar."""
    _check_state(lts, i)
    _check_state(lts, j)
    part = strong_partition(lts)
    return part[i] == part[j]


def _eps_reach(lts: Lts) -> list:
    """Per-state silent reachability (reflexive-transitive tau closure)."""
    n = len(lts.states)
    tau_succ = [[] for _ in range(n)]
    for src, label, dst in lts.edges:
        if label == TAU:
            tau_succ[src].append(dst)
    out = []
    for s in range(n):
        seen = {s}
        queue = deque([s])
        while queue:
            cur = queue.popleft()
            for nxt in tau_succ[cur]:
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
        out.append(tuple(sorted(seen)))
    return out


def branching_relation(lts: Lts) -> frozenset:
    """Greatest branching bisimulation, as a set of state pairs.

    Greatest-fixpoint computation: start from all pairs and delete every
    pair with an unanswerable move until stable. A silent move may be
    answered by a silent path whose endpoint matches both before and after;
    a visible move by a silent path followed by an equally-labelled step,
    with the intermediate state related to the source.
    """
    n = len(lts.states)
    succ = [[] for _ in range(n)]
    for src, label, dst in lts.edges:
        succ[src].append((label, dst))
    eps = _eps_reach(lts)
    rel = {(i, j) for i in range(n) for j in range(n)}

    def answered(mover, other, left_moved, rel):
        # left_moved orients the membership tests (left, right) correctly.
        def related(a, b):
            return (a, b) in rel if left_moved else (b, a) in rel

        for label, i2 in succ[mover]:
            ok = False
            if label == TAU:
                for j2 in eps[other]:
                    if related(mover, j2) and related(i2, j2):
                        ok = True
                        break
            if not ok:
                for jmid in eps[other]:
                    for lab2, j2 in succ[jmid]:
                        if lab2 == label and related(mover, jmid) and related(i2, j2):
                            ok = True
                            break
                    if ok:
                        break
            if not ok:
                return False
        return True

    changed = True
    while changed:
        changed = False
        for (i, j) in sorted(rel):
            if not answered(i, j, True, rel) or not answered(j, i, False, rel):
                rel.discard((i, j))
                changed = True
    return frozenset(rel)


def branching_bisim(lts: Lts, i: int, j: int) -> bool:
    """True iff states i and j are branching bisimilar."""
    _check_state(lts, i)
    _check_state(lts, j)
    return (i, j) in branching_relation(lts)


def decide_interleaving(
    net: Net,
    m1: Marking,
    m2: Marking,
    branching: bool,
    state_cap: int = 10_000,
    edge_cap: int = 100_000,
):
    """Graph-level equivalence of two markings on the joint bounded graph.

    Returns (equivalent, lts). Unbounded nets raise StateSpaceLimitError
    from the construction.
    """
    lts = reach_lts(net, [m1, m2], state_cap=state_cap, edge_cap=edge_cap)
    i, j = lts.initials[0], lts.initials[1]
    if branching:
        return branching_bisim(lts, i, j), lts
    return strong_bisim(lts, i, j), lts
