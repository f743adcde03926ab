"""Cross-check the compiled checker against a naive reimplementation.

The naive checker recomputes the finite game conditions from scratch:
related markings by enumerating all same-size multisets, closure
memberships by the permutation oracle, and silent responses by exhaustive
enumeration of block orders and acyclic per-token walks. Any divergence
from check_relation on randomized nets is a bug in one of them.
"""
import itertools
import random

import pytest

from pneq import (
    Marking,
    Net,
    PlaceRelation,
    THETA,
    TAU,
    Transition,
    check_relation,
    decide,
)
from bruteforce import d_perm_member, perm_member


def _acyclic_walks(adj, start, limit):
    """All acyclic single-token walks from start (position lists)."""
    walks = [[start]]  # the one-step idle block is handled by the caller

    def extend(path):
        for nxt in adj.get(path[-1], ()):
            if nxt in path[1:]:
                continue
            walks.append(path + [nxt])
            if nxt != path[0]:
                extend(path + [nxt])

    extend([start])
    return [w for w in walks if len(w) <= limit + 1]


def _responses(net, start: Marking):
    """Every acyclic silent response from start: (trace markings, final)."""
    adj = {}
    for t in net.transitions:
        if t.label == TAU and t.pre.size == 1 and t.post.size == 1:
            adj.setdefault(next(iter(t.pre)), []).append(next(iter(t.post)))
    tokens = list(start.tokens())
    limit = len(net.places)
    out = []
    for order in set(itertools.permutations(range(len(tokens)))):
        walk_options = [_acyclic_walks(adj, tokens[i], limit) for i in order]
        for combo in itertools.product(*walk_options):
            positions = list(tokens)
            trace = [Marking(positions)]
            for slot, walk in zip(order, combo):
                if len(walk) == 1:  # idle block: one step, same marking
                    trace.append(Marking(positions))
                    continue
                idx = positions.index(tokens[slot])
                for nxt in walk[1:]:
                    positions[idx] = nxt
                    trace.append(Marking(positions))
            out.append((trace, Marking(positions)))
    return out


def _related_markings_brute(pairs, m: Marking, places, side, d=False):
    member = d_perm_member if d else perm_member
    out = []
    sizes = [m.size] if not d else range(0, m.size + len(places) + 1)
    for k in sizes:
        for combo in itertools.combinations_with_replacement(sorted(places), k):
            cand = Marking(combo)
            hit = member(pairs, m, cand) if side == 1 else member(pairs, cand, m)
            if hit:
                out.append(cand)
    return out


def _brute_check(net, pairs, kind) -> bool:
    d = kind in ("dplace", "bdplace")
    branching = kind in ("bplace", "bdplace")
    core = {p for p in pairs if THETA not in p}
    member_pre = perm_member
    member_post = d_perm_member if d else perm_member
    places = net.places

    if d:
        lefts = {a for a, _ in pairs}
        rights = {b for _, b in pairs}
        for t in net.transitions:
            dom = set(t.pre)
            if dom <= lefts and any((p, THETA) in pairs for p in dom):
                return False
            if dom <= rights and any((THETA, p) in pairs for p in dom):
                return False

    for side in (1, 2):
        for t in net.transitions:
            rel_markings = _related_markings_brute(core, t.pre, places, side)
            for m in rel_markings:
                answered = False
                tau_seq = t.label == TAU and t.pre.size == 1 and t.post.size == 1
                if branching:
                    for trace, final in _responses(net, m):
                        psi = all(
                            member_pre(core, t.pre, mk)
                            if side == 1
                            else member_pre(core, mk, t.pre)
                            for mk in trace[:-1]
                        )
                        if not psi:
                            continue
                        if tau_seq:
                            if side == 1:
                                okf = member_pre(core, t.pre, final) and member_pre(
                                    core, t.post, final
                                )
                            else:
                                okf = member_pre(core, final, t.pre) and member_pre(
                                    core, final, t.post
                                )
                            if okf:
                                answered = True
                                break
                        for t2 in net.transitions:
                            if t2.label != t.label or t2.pre != final:
                                continue
                            if side == 1:
                                okp = member_pre(core, t.pre, t2.pre) and member_post(
                                    pairs, t.post, t2.post
                                )
                            else:
                                okp = member_pre(core, t2.pre, t.pre) and member_post(
                                    pairs, t2.post, t.post
                                )
                            if okp:
                                answered = True
                                break
                        if answered:
                            break
                else:
                    for t2 in net.transitions:
                        if t2.label != t.label or t2.pre != m:
                            continue
                        if side == 1:
                            okp = member_post(pairs, t.post, t2.post)
                        else:
                            okp = member_post(pairs, t2.post, t.post)
                        if okp:
                            answered = True
                            break
                if not answered:
                    return False
    return True


def _random_net(rng, n_places=None) -> Net:
    n = n_places or rng.randint(3, 5)
    places = [f"p{i}" for i in range(n)]
    transitions = []
    for i in range(rng.randint(2, 5)):
        label = rng.choice(["a", "a", "b", TAU, TAU])
        pre = Marking([rng.choice(places) for _ in range(rng.randint(1, 2))])
        post = Marking([rng.choice(places) for _ in range(rng.randint(0, 2))])
        transitions.append(Transition(f"t{i}", pre, label, post))
    return Net("rand", places, transitions)


def _random_relation(rng, net, d) -> PlaceRelation:
    pairs = set()
    for a in net.places:
        for b in net.places:
            if rng.random() < 0.25:
                pairs.add((a, b))
    if d:
        for a in net.places:
            if rng.random() < 0.15:
                pairs.add((a, THETA))
            if rng.random() < 0.15:
                pairs.add((THETA, a))
    return PlaceRelation.of(pairs)


@pytest.mark.parametrize("kind", ["place", "bplace", "dplace", "bdplace"])
def test_check_relation_matches_the_naive_checker(kind):
    rng = random.Random(hash(kind) % 100000 + 31337)
    d = kind in ("dplace", "bdplace")
    agree = 0
    for _ in range(120):
        net = _random_net(rng)
        rel = _random_relation(rng, net, d)
        expected = _brute_check(net, rel.pairs, kind)
        got = check_relation(net, rel, kind).ok
        assert got == expected, (kind, net.transitions, sorted(rel.pairs, key=str))
        agree += 1
    assert agree == 120


def _brute_decide(net, m1, m2, kind):
    """Reference decision: scan every subset of the full pair universe."""
    d = kind in ("dplace", "bdplace")
    places = list(net.places)
    universe = [(a, b) for a in places for b in places]
    if d:
        universe += [(a, THETA) for a in places] + [(THETA, b) for b in places]
    n = len(places)
    idx = net.place_index

    def pair_key(pr):
        return (
            n if pr[0] is THETA else idx[pr[0]],
            n if pr[1] is THETA else idx[pr[1]],
        )

    universe.sort(key=pair_key)
    member = d_perm_member if d else perm_member
    for size in range(len(universe) + 1):
        for combo in itertools.combinations(universe, size):
            pairs = set(combo)
            if not member(pairs, m1, m2):
                continue
            if _brute_check(net, pairs, kind):
                return "related", frozenset(pairs)
    return "not-related", None


def _random_marking(rng, net, max_tokens=2):
    return Marking([rng.choice(net.places) for _ in range(rng.randint(0, max_tokens))])


@pytest.mark.parametrize("kind", ["place", "bplace"])
def test_decide_matches_the_brute_force_scan(kind):
    # 3-place nets keep the 2^9 reference scan affordable
    rng = random.Random(hash(kind) % 100000 + 2718)
    verdicts = {"related": 0, "not-related": 0}
    for i in range(40):
        net = _random_net(rng, n_places=3)
        m1 = _random_marking(rng, net)
        # bias towards equal or permuted markings so both verdicts occur
        if i % 3 == 0:
            m2 = m1
        elif i % 3 == 1:
            swap = dict(zip(net.places, net.places[1:] + net.places[:1]))
            m2 = Marking([swap[p] for p in m1.tokens()])
        else:
            m2 = _random_marking(rng, net)
        expected, witness = _brute_decide(net, m1, m2, kind)
        got = decide(net, m1, m2, kind, "exhaustive")
        assert got.status == expected, (net.transitions, m1, m2)
        if expected == "related":
            assert got.witness.pairs == witness
        verdicts[expected] += 1
    assert verdicts["related"] >= 10 and verdicts["not-related"] >= 5


@pytest.mark.parametrize("kind", ["dplace", "bdplace"])
def test_decide_matches_the_brute_force_scan_theta(kind):
    # 2 places plus theta rows/columns: an 8-pair reference universe
    rng = random.Random(hash(kind) % 100000 + 1414)
    verdicts = {"related": 0, "not-related": 0}
    for i in range(25):
        net = _random_net(rng, n_places=2)
        m1 = _random_marking(rng, net)
        m2 = m1 if i % 3 == 0 else _random_marking(rng, net)
        expected, witness = _brute_decide(net, m1, m2, kind)
        got = decide(net, m1, m2, kind, "exhaustive")
        assert got.status == expected, (net.transitions, m1, m2)
        if expected == "related":
            assert got.witness.pairs == witness
        verdicts[expected] += 1
    assert verdicts["related"] >= 6 and verdicts["not-related"] >= 4
