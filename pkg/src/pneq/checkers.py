"""Relation checking and equivalence decision procedures.

Four equivalences are supported, named by their CLI spellings:

* ``place``   - every move must be answered immediately by a transition
                whose pre-set is the related marking, with closure-related
                post-sets.
* ``dplace``  - as ``place``, but the relation may pair places with the
                empty marking; pre-sets match under the theta-stripped
                closure, post-sets under the theta-extended one.
* ``bplace``  - silent tau-sequential moves may be answered by acyclic
                silent responses whose traversed markings stay related to
                the moving transition's pre-set.
* ``bdplace`` - the branching conditions with the theta-extended closure
                on post-sets.

A relation is verified against finitely many conditions: one per
transition and per marking related to its pre-set. Deciding a marking
pair enumerates candidate relations over the relevant place universe.
"""
from __future__ import annotations

import itertools
import time
from concurrent.futures import ThreadPoolExecutor
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from .errors import ModelError, PneqError
from .multiset import Marking
from .net import TAU, Net
from .relations import (
    THETA,
    MatchWitness,
    PlaceRelation,
    _match,
    additive_member,
    d_additive_member,
    format_side,
    iter_matchings,
)
from .silent import run_search, silent_graph, silent_reachable

KINDS = ("place", "dplace", "bplace", "bdplace")


@dataclass(frozen=True)
class Violation:
    transition: str
    marking: Marking
    side: int  # 1: the transition moved on the left, 2: on the right
    reason: str  # "no-response" | "closure-failure"
    details: str = ""


@dataclass
class CheckReport:
    ok: bool
    violations: tuple = ()
    silent_witnesses: tuple = ()  # (anchor, direction, trace markings) triples

    def __post_init__(self):
        assert self.ok == (not self.violations)


@dataclass
class DecideCaps:
    max_pairs: int = 22  # auto mode: exhaustive at or below this universe size
    node_budget: int = 1_000_000
    max_relations: Optional[int] = None
    guided_nodes: int = 20_000
    guided_width: int = 12
    threads: int = 1

    def __post_init__(self):
        if self.max_pairs <= 0 or self.node_budget <= 0 or self.threads <= 0:
            raise ModelError("caps must be positive")


@dataclass
class Verdict:
    status: str  # related | not-related | unknown
    witness: Optional[PlaceRelation]
    mode_used: str  # exhaustive | guided | verify
    stats: dict = field(default_factory=dict)


def _is_d(kind: str) -> bool:
    return kind in ("dplace", "bdplace")


def _is_branching(kind: str) -> bool:
    return kind in ("bplace", "bdplace")


def _check_kind(kind: str) -> None:
    if kind not in KINDS:
        raise ModelError(f"unknown equivalence kind {kind!r}")


# ---------------------------------------------------------------------------
# the compiled checking engine
# ---------------------------------------------------------------------------


class _Engine:
    """Relation checks compiled against a fixed pair universe.

    Candidate relations are bitmasks over the universe. Every derived
    query (image sets, response feasibility) is cached keyed by the bits
    it can actually observe, which makes scanning millions of candidate
    relations affordable.
    """

    def __init__(self, net: Net, universe, kind: str, node_budget: int):
        self.net = net
        self.kind = kind
        self.d = _is_d(kind)
        self.branching = _is_branching(kind)
        self.node_budget = node_budget
        self.pairs = list(universe)
        self.bit = {pair: 1 << i for i, pair in enumerate(self.pairs)}
        self.universe_mask = (1 << len(self.pairs)) - 1
        self.core_mask = 0
        self.theta_row: dict = {}
        self.theta_col: dict = {}
        row_items: dict = {}
        col_items: dict = {}
        self.rowmask: dict = {}
        self.colmask: dict = {}
        for pair, b in self.bit.items():
            a, c = pair
            if a is THETA:
                self.theta_col[c] = self.theta_col.get(c, 0) | b
            elif c is THETA:
                self.theta_row[a] = self.theta_row.get(a, 0) | b
            else:
                self.core_mask |= b
                row_items.setdefault(a, []).append((c, b))
                col_items.setdefault(c, []).append((a, b))
                self.rowmask[a] = self.rowmask.get(a, 0) | b
                self.colmask[c] = self.colmask.get(c, 0) | b
        key = net.place_index
        self.row = {p: sorted(v, key=lambda e: key[e[0]]) for p, v in row_items.items()}
        self.col = {p: sorted(v, key=lambda e: key[e[0]]) for p, v in col_items.items()}
        self.adj = silent_graph(net)
        self._reach: dict = {}
        self.trans = list(net.transitions)
        self.pre_tok = [t.pre.tokens() for t in self.trans]
        self.post_tok = [t.post.tokens() for t in self.trans]
        self.tau_seq = [
            t.label == TAU and t.pre.size == 1 and t.post.size == 1
            for t in self.trans
        ]
        self.by_label: dict = {}
        self.by_pre: dict = {}
        for i, t in enumerate(self.trans):
            self.by_label.setdefault(t.label, []).append(i)
            self.by_pre.setdefault((t.label, self.pre_tok[i]), []).append(i)
        self._images_cache: dict = {}
        self._resp_meta: dict = {}
        self._member_cache: dict = {}
        self.matchings_solved = 0

    # -- closure membership ------------------------------------------------

    def _pairs_from_bits(self, rbits, supp1, supp2, d):
        out = []
        for a in supp1:
            for c in supp2:
                b = self.bit.get((a, c))
                if b and rbits & b:
                    out.append((a, c))
        if d:
            for a in supp1:
                b = self.theta_row.get(a, 0)
                if rbits & b:
                    out.append((a, THETA))
            for c in supp2:
                b = self.theta_col.get(c, 0)
                if rbits & b:
                    out.append((THETA, c))
        return out

    def member_plain(self, m1, m2, rbits) -> bool:
        if len(m1) != len(m2):
            return False
        k = len(m1)
        if k == 0:
            return True
        self.matchings_solved += 1
        bit = self.bit
        if k == 1:
            b = bit.get((m1[0], m2[0]))
            return bool(b and rbits & b)
        if k == 2:
            a, b_ = m1
            c, d_ = m2
            x1 = bit.get((a, c))
            x2 = bit.get((b_, d_))
            if x1 and x2 and rbits & x1 and rbits & x2:
                return True
            x3 = bit.get((a, d_))
            x4 = bit.get((b_, c))
            return bool(x3 and x4 and rbits & x3 and rbits & x4)
        supp1, supp2 = set(m1), set(m2)
        allowed = self._pairs_from_bits(rbits, supp1, supp2, False)
        return _match(allowed, Marking(m1), Marking(m2), d=False) is not None

    def member_d(self, m1, m2, rbits) -> bool:
        self.matchings_solved += 1
        bit = self.bit
        if len(m1) == 0 and len(m2) == 0:
            return True
        if len(m1) == 1 and len(m2) == 1:
            b = bit.get((m1[0], m2[0]))
            if b and rbits & b:
                return True
            return bool(
                rbits & self.theta_row.get(m1[0], 0)
                and rbits & self.theta_col.get(m2[0], 0)
            )
        if len(m1) == 1 and len(m2) == 0:
            return bool(rbits & self.theta_row.get(m1[0], 0))
        if len(m1) == 0 and len(m2) == 1:
            return bool(rbits & self.theta_col.get(m2[0], 0))
        allowed = self._pairs_from_bits(rbits, set(m1), set(m2), True)
        return _match(allowed, Marking(m1), Marking(m2), d=True) is not None

    def member_posts(self, mleft, mright, rbits) -> bool:
        if self.d:
            return self.member_d(mleft, mright, rbits)
        return self.member_plain(mleft, mright, rbits)

    # -- image sets ----------------------------------------------------------

    def images(self, tokens, rbits, side) -> tuple:
        table = self.row if side == 1 else self.col
        masks = self.rowmask if side == 1 else self.colmask
        mask = 0
        for p in set(tokens):
            mask |= masks.get(p, 0)
        key = (tokens, side, rbits & mask)
        hit = self._images_cache.get(key)
        if hit is not None:
            return hit
        per_token = []
        for p in tokens:
            imgs = [q for q, b in table.get(p, ()) if rbits & b]
            if not imgs:
                self._images_cache[key] = ()
                return ()
            per_token.append(imgs)
        seen = set()
        for combo in itertools.product(*per_token):
            seen.add(tuple(sorted(combo)))
        out = tuple(sorted(seen))
        self._images_cache[key] = out
        return out

    # -- silent reachability ---------------------------------------------------

    def reach(self, places) -> frozenset:
        key = frozenset(places)
        if key not in self._reach:
            self._reach[key] = silent_reachable(self.adj, key)
        return self._reach[key]

    # -- response feasibility ---------------------------------------------------

    def _oriented_bit(self, a, b, side):
        return self.bit.get((a, b) if side == 1 else (b, a), 0)

    def _resp_mask(self, ti: int, m: tuple, side: int) -> int:
        t = self.trans[ti]
        resp = self.reach(set(m))
        mask = 0
        anchor_supp = set(self.pre_tok[ti])
        post_supp = set(self.post_tok[ti])
        for a in anchor_supp | post_supp:
            for b in resp:
                mask |= self._oriented_bit(a, b, side)
        for cj in self.by_label.get(t.label, ()):
            cpre = set(self.pre_tok[cj])
            cpost = set(self.post_tok[cj])
            if self.branching and len(self.pre_tok[cj]) != len(m):
                continue
            if not self.branching and self.pre_tok[cj] != m:
                continue
            for a in anchor_supp:
                for b in cpre:
                    mask |= self._oriented_bit(a, b, side)
            for a in post_supp:
                for b in cpost:
                    mask |= self._oriented_bit(a, b, side)
            if self.d:
                left_supp = post_supp if side == 1 else cpost
                right_supp = cpost if side == 1 else post_supp
                for a in left_supp:
                    mask |= self.theta_row.get(a, 0)
                for b in right_supp:
                    mask |= self.theta_col.get(b, 0)
        return mask

    def respond(self, ti: int, m: tuple, side: int, rbits) -> bool:
        meta = self._resp_meta.get((ti, m, side))
        if meta is None:
            meta = (self._resp_mask(ti, m, side), {})
            self._resp_meta[(ti, m, side)] = meta
        mask, cache = meta
        masked = rbits & mask
        hit = cache.get(masked)
        if hit is not None:
            return hit
        ok = self._respond_compute(ti, m, side, rbits)
        cache[masked] = ok
        return ok

    def _respond_compute(
        self, ti: int, m: tuple, side: int, rbits, collector=None
    ) -> bool:
        t = self.trans[ti]
        bar = rbits & self.core_mask if self.d else rbits
        anchor = self.pre_tok[ti]
        post = self.post_tok[ti]

        if side == 1:
            psi_ok = lambda mk: self.member_plain(anchor, mk, bar)
        else:
            psi_ok = lambda mk: self.member_plain(mk, anchor, bar)

        def record(markings):
            if collector is not None:
                collector.append(
                    (Marking(anchor), "psi" if side == 1 else "phi", tuple(markings))
                )

        if not self.branching:
            for cj in self.by_pre.get((t.label, m), ()):
                cpost = self.post_tok[cj]
                left, right = (post, cpost) if side == 1 else (cpost, post)
                if self.member_posts(left, right, rbits):
                    return True
            return False

        if self.tau_seq[ti]:
            if side == 1:
                final_ok = lambda f: self.member_plain(anchor, f, bar) and self.member_plain(
                    post, f, bar
                )
            else:
                final_ok = lambda f: self.member_plain(f, anchor, bar) and self.member_plain(
                    f, post, bar
                )
            if final_ok(m):
                record((Marking(m), Marking(m)))
                return True
            hit = run_search(
                self.adj, m, psi_ok, final_ok=final_ok, node_budget=self.node_budget
            )
            if hit is not None:
                record(hit[1])
                return True

        for cj in self.by_label.get(t.label, ()):
            cpre = self.pre_tok[cj]
            if len(cpre) != len(m):
                continue
            cpost = self.post_tok[cj]
            if side == 1:
                if not self.member_plain(anchor, cpre, bar):
                    continue
                if not self.member_posts(post, cpost, rbits):
                    continue
            else:
                if not self.member_plain(cpre, anchor, bar):
                    continue
                if not self.member_posts(cpost, post, rbits):
                    continue
            if cpre == m:
                # answering with idling on every token
                record([Marking(m)] * (len(m) + 1))
                return True
            hit = run_search(
                self.adj, m, psi_ok, target=cpre, node_budget=self.node_budget
            )
            if hit is not None:
                record(hit[1])
                return True
        return False

    # -- theta viability ---------------------------------------------------------

    def theta_violations(self, rbits) -> list:
        out = []
        if not self.d:
            return out
        for ti, t in enumerate(self.trans):
            dom = set(self.pre_tok[ti])
            covered = all(
                rbits & (self.rowmask.get(p, 0) | self.theta_row.get(p, 0))
                for p in dom
            )
            if covered and any(rbits & self.theta_row.get(p, 0) for p in dom):
                out.append(
                    Violation(
                        t.tid,
                        t.pre,
                        1,
                        "closure-failure",
                        "a pre-set place is related to the empty marking, so the "
                        "move cannot be answered when its token is matched away",
                    )
                )
            covered = all(
                rbits & (self.colmask.get(p, 0) | self.theta_col.get(p, 0))
                for p in dom
            )
            if covered and any(rbits & self.theta_col.get(p, 0) for p in dom):
                out.append(
                    Violation(
                        t.tid,
                        t.pre,
                        2,
                        "closure-failure",
                        "a pre-set place is related to the empty marking, so the "
                        "move cannot be answered when its token is matched away",
                    )
                )
        return out

    # -- the full check -------------------------------------------------------

    def check(self, rbits, collect_all=False, collector=None):
        violations = self.theta_violations(rbits)
        if violations and not collect_all:
            return False, violations[:1]
        bar = rbits & self.core_mask if self.d else rbits
        for side in (1, 2):
            for ti, t in enumerate(self.trans):
                for m in self.images(self.pre_tok[ti], bar, side):
                    if collector is not None:
                        ok = self._respond_compute(ti, m, side, rbits, collector)
                    else:
                        ok = self.respond(ti, m, side, rbits)
                    if not ok:
                        violations.append(
                            Violation(
                                t.tid,
                                Marking(m),
                                side,
                                "no-response",
                                f"no matching response from {Marking(m)!r}",
                            )
                        )
                        if not collect_all:
                            return False, violations
        return (not violations), violations

    # -- static pruning ------------------------------------------------------

    def static_bad_mask(self) -> int:
        """Bits whose pairs kill every relation containing them.

        A pair is statically bad when one of the finite conditions it
        induces fails even under the full universe (response feasibility
        is monotone in the relation, so no candidate can rescue it).
        """
        singleton_dom = {}
        for ti in range(len(self.trans)):
            dom = set(self.pre_tok[ti])
            if len(dom) == 1:
                singleton_dom.setdefault(next(iter(dom)), []).append(ti)
        bad = 0
        full = self.universe_mask
        for pair, b in self.bit.items():
            a, c = pair
            if a is THETA:
                if c in singleton_dom:
                    bad |= b
            elif c is THETA:
                if a in singleton_dom:
                    bad |= b
            else:
                for ti in singleton_dom.get(a, ()):
                    m = (c,) * len(self.pre_tok[ti])
                    if not self.respond(ti, m, 1, full):
                        bad |= b
                        break
                if not bad & b:
                    for ti in singleton_dom.get(c, ()):
                        m = (a,) * len(self.pre_tok[ti])
                        if not self.respond(ti, m, 2, full):
                            bad |= b
                            break
        return bad


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------


def _pair_sort_key(net: Net, pair):
    n = len(net.places)
    a, b = pair
    return (
        n if a is THETA else net.place_index[a],
        n if b is THETA else net.place_index[b],
    )


def pair_universe(net: Net, m1: Marking, m2: Marking, kind: str) -> list:
    """Candidate pairs for deciding (m1, m2).

    When the two markings live in disjoint weakly-connected components the
    universe is the product of the two component place sets (any witness
    restricts to those pairs); otherwise the joint component set squared.
    The theta-extended kinds add a theta row and column.
    """
    _check_kind(kind)
    s1 = net.component_of(m1.support())
    s2 = net.component_of(m2.support())
    if s1 & s2:
        s1 = s2 = s1 | s2
    key = net.place_index.get
    left = sorted(s1, key=key)
    right = sorted(s2, key=key)
    pairs = [(a, b) for a in left for b in right]
    if _is_d(kind):
        pairs += [(a, THETA) for a in left]
        pairs += [(THETA, b) for b in right]
    return pairs


def check_relation(
    net: Net,
    rel: PlaceRelation,
    kind: str,
    node_budget: int = 1_000_000,
    collect_witnesses: bool = False,
) -> CheckReport:
    """Verify the finite game conditions for a candidate relation.

    Search-budget exhaustion raises SearchBudgetError: an inconclusive
    check is never reported as a violation.
    """
    _check_kind(kind)
    if not _is_d(kind) and rel.is_d_extended:
        raise ModelError(f"{kind} requires a plain relation")
    for a, b in rel.pairs:
        for p in (a, b):
            if p is not THETA and p not in net.place_index:
                raise ModelError(f"relation uses undeclared place {p!r}")
    universe = sorted(rel.pairs, key=lambda pr: _pair_sort_key(net, pr))
    engine = _Engine(net, universe, kind, node_budget)
    collector = [] if collect_witnesses else None
    ok, violations = engine.check(
        engine.universe_mask, collect_all=True, collector=collector
    )
    return CheckReport(ok, tuple(violations), tuple(collector or ()))


def membership(rel: PlaceRelation, kind: str, m1: Marking, m2: Marking) -> Optional[MatchWitness]:
    """Closure membership of (m1, m2) under the kind's closure."""
    if _is_d(kind):
        return d_additive_member(rel, m1, m2)
    return additive_member(rel, m1, m2)


def verify(
    net: Net,
    rel: PlaceRelation,
    kind: str,
    m1: Marking,
    m2: Marking,
    node_budget: int = 1_000_000,
) -> Verdict:
    """Check a user-supplied relation and the membership of the query pair.

    Related means both hold; anything else is reported as unknown (a
    failed candidate never proves the markings inequivalent).
    """
    t0 = time.perf_counter()
    report = check_relation(net, rel, kind, node_budget=node_budget)
    member = membership(rel, kind, m1, m2)
    ok = report.ok and member is not None
    stats = {
        "relation_ok": report.ok,
        "membership_ok": member is not None,
        "wall_time_s": time.perf_counter() - t0,
    }
    return Verdict(
        "related" if ok else "unknown",
        rel if ok else None,
        "verify",
        stats,
    )


def decide(
    net: Net,
    m1: Marking,
    m2: Marking,
    kind: str,
    mode: str = "auto",
    caps: Optional[DecideCaps] = None,
) -> Verdict:
    """Decide whether two markings are equivalent under the given kind.

    Exhaustive mode enumerates candidate relations over the pair universe
    by increasing pair count, then lexicographically, so a related verdict
    carries the minimal witness in that order and exhausting the space is
    conclusive. Guided mode grows a candidate from the query pair and
    answers related or unknown, never not-related.
    """
    _check_kind(kind)
    if mode not in ("exhaustive", "guided", "auto"):
        raise ModelError(f"unknown mode {mode!r}")
    caps = caps or DecideCaps()
    net.check_marking(m1)
    net.check_marking(m2)
    t0 = time.perf_counter()
    if not _is_d(kind) and m1.size != m2.size:
        return Verdict(
            "not-related",
            None,
            "exhaustive" if mode != "guided" else "guided",
            {
                "reason": "size mismatch",
                "universe": 0,
                "relations_examined": 0,
                "wall_time_s": time.perf_counter() - t0,
            },
        )
    universe = pair_universe(net, m1, m2, kind)
    resolved = mode
    if mode == "auto":
        resolved = "exhaustive" if len(universe) <= caps.max_pairs else "guided"
    engine = _Engine(net, universe, kind, caps.node_budget)
    if resolved == "exhaustive":
        verdict = _decide_exhaustive(engine, net, m1, m2, kind, caps, universe)
    else:
        verdict = _decide_guided(engine, net, m1, m2, kind, caps, universe)
    verdict.stats["universe"] = len(universe)
    verdict.stats["matchings_solved"] = engine.matchings_solved
    verdict.stats["wall_time_s"] = time.perf_counter() - t0
    return verdict


def _witness_verdict(net, kind, pairs, mode, stats) -> Verdict:
    rel = PlaceRelation.of(pairs)
    report = check_relation(net, rel, kind)
    if not report.ok:
        raise PneqError("internal error: candidate witness failed re-verification")
    return Verdict("related", rel, mode, stats)


def _decide_exhaustive(engine, net, m1, m2, kind, caps, universe) -> Verdict:
    d = _is_d(kind)
    match_masks = []
    for q in iter_matchings(universe, m1, m2, d):
        mask = 0
        for pr in q:
            if pr[0] is THETA and pr[1] is THETA:
                continue
            mask |= engine.bit[pr]
        match_masks.append(mask)
    match_masks = sorted(set(match_masks))
    stats = {"relations_examined": 0, "relations_checked": 0, "pruned_pairs": 0}
    if not match_masks:
        stats["reason"] = "no association over the pair universe"
        return Verdict("not-related", None, "exhaustive", stats)
    bad = engine.static_bad_mask()
    stats["pruned_pairs"] = bin(bad).count("1")
    match_masks = [mm for mm in match_masks if not (mm & bad)]
    if not match_masks:
        stats["reason"] = "every association uses a statically infeasible pair"
        return Verdict("not-related", None, "exhaustive", stats)
    good_bits = [
        engine.bit[pair] for pair in engine.pairs if not (engine.bit[pair] & bad)
    ]

    def scan(size, offset, step):
        examined = checked = 0
        found = None
        for i, combo in enumerate(itertools.combinations(good_bits, size)):
            if i % step != offset:
                continue
            examined += 1
            rbits = 0
            for b in combo:
                rbits |= b
            if not any(rbits & mm == mm for mm in match_masks):
                continue
            checked += 1
            ok, _ = engine.check(rbits)
            if ok:
                found = (i, rbits)
                break
        return examined, checked, found

    for size in range(len(good_bits) + 1):
        if caps.threads == 1:
            results = [scan(size, 0, 1)]
        else:
            with ThreadPoolExecutor(max_workers=caps.threads) as pool:
                futures = [
                    pool.submit(scan, size, w, caps.threads)
                    for w in range(caps.threads)
                ]
                results = [f.result() for f in futures]
        hits = []
        for examined, checked, found in results:
            stats["relations_examined"] += examined
            stats["relations_checked"] += checked
            if found is not None:
                hits.append(found)
        if (
            caps.max_relations is not None
            and stats["relations_examined"] > caps.max_relations
        ):
            raise PneqError(
                f"exhausted the relation budget ({caps.max_relations}) "
                "before reaching a verdict"
            )
        if hits:
            _, rbits = min(hits)
            pairs = [pair for pair in engine.pairs if rbits & engine.bit[pair]]
            return _witness_verdict(net, kind, pairs, "exhaustive", stats)
    return Verdict("not-related", None, "exhaustive", stats)


def _decide_guided(engine, net, m1, m2, kind, caps, universe) -> Verdict:
    d = _is_d(kind)
    universe_set = set(universe)
    core_universe = {pr for pr in universe_set if THETA not in pr}
    stats = {"relations_examined": 0, "relations_checked": 0}

    def pairs_key(pairs):
        return tuple(sorted((format_side(a), format_side(b)) for a, b in pairs))

    seeds = sorted(
        (frozenset(q) for q in iter_matchings(universe, m1, m2, d)),
        key=pairs_key,
    )
    queue = deque(seeds)
    seen = set()
    while queue and stats["relations_examined"] < caps.guided_nodes:
        rel_pairs = queue.popleft()
        if rel_pairs in seen:
            continue
        seen.add(rel_pairs)
        stats["relations_examined"] += 1
        stats["relations_checked"] += 1
        rbits = 0
        for pr in rel_pairs:
            rbits |= engine.bit[pr]
        ok, violations = engine.check(rbits)
        if ok:
            return _witness_verdict(net, kind, rel_pairs, "guided", stats)
        v = violations[0]
        if v.reason == "closure-failure":
            continue  # theta viability cannot be repaired by adding pairs
        options = _repair_options(
            engine, net, v, rbits, rel_pairs, universe_set, core_universe, caps
        )
        for additions in options[: caps.guided_width]:
            queue.append(rel_pairs | additions)
    stats["reason"] = "guided search exhausted without finding a witness"
    return Verdict("unknown", None, "guided", stats)


def _repair_options(
    engine, net, violation, rbits, rel_pairs, universe_set, core_universe, caps
):
    """Pair additions that could discharge the failed condition."""
    ti = next(
        i for i, t in enumerate(engine.trans) if t.tid == violation.transition
    )
    t = engine.trans[ti]
    side = violation.side
    m = violation.marking.tokens()
    anchor = engine.pre_tok[ti]
    post = engine.post_tok[ti]
    d = engine.d
    bar = rbits & engine.core_mask if d else rbits

    def oriented(x, y):
        return (x, y) if side == 1 else (y, x)

    requirements_sets = []
    always_true = lambda mk: True
    if engine.branching:
        sigma_limit = 4
        if engine.tau_seq[ti]:
            for blocks, markings in run_search(
                engine.adj,
                m,
                always_true,
                final_ok=lambda f: True,
                node_budget=caps.node_budget,
                collect=sigma_limit,
            ):
                final = markings[-1].tokens()
                reqs = [
                    (oriented(anchor, mk.tokens()), "core")
                    for mk in markings[:-1]
                ]
                reqs.append((oriented(anchor, final), "core"))
                reqs.append((oriented(post, final), "core"))
                requirements_sets.append(reqs)
        for cj in engine.by_label.get(t.label, ()):
            cpre = engine.pre_tok[cj]
            if len(cpre) != len(m):
                continue
            cpost = engine.post_tok[cj]
            for blocks, markings in run_search(
                engine.adj,
                m,
                always_true,
                target=cpre,
                node_budget=caps.node_budget,
                collect=sigma_limit,
            ):
                reqs = [
                    (oriented(anchor, mk.tokens()), "core")
                    for mk in markings[:-1]
                ]
                reqs.append((oriented(anchor, cpre), "core"))
                reqs.append((oriented(post, cpost), "post"))
                requirements_sets.append(reqs)
    else:
        for cj in engine.by_pre.get((t.label, m), ()):
            cpost = engine.post_tok[cj]
            requirements_sets.append([(oriented(post, cpost), "post")])

    options = []
    seen = set()
    for reqs in requirements_sets:
        choice_lists = []
        feasible = True
        for (left, right), closure in reqs:
            use_d = d and closure == "post"
            member = (
                engine.member_d(left, right, rbits)
                if use_d
                else engine.member_plain(left, right, bar)
            )
            if member:
                continue
            allowed = universe_set if use_d else core_universe
            choices = [
                frozenset(q) - rel_pairs
                for q in itertools.islice(
                    iter_matchings(
                        allowed, Marking(left), Marking(right), use_d
                    ),
                    caps.guided_width,
                )
            ]
            if not choices:
                feasible = False
                break
            choice_lists.append(choices)
        if not feasible:
            continue
        if not choice_lists:
            continue  # nothing addable would change this response
        for combo in itertools.islice(
            itertools.product(*choice_lists), caps.guided_width * 4
        ):
            additions = frozenset().union(*combo)
            if additions and additions not in seen:
                seen.add(additions)
                options.append(additions)
    options.sort(
        key=lambda s: (len(s), sorted((format_side(a), format_side(b)) for a, b in s))
    )
    return options
