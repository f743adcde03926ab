import pytest

from pneq import (
    DecideCaps,
    KINDS,
    Marking,
    ModelError,
    PlaceRelation,
    SearchBudgetError,
    THETA,
    check_relation,
    compose,
    decide,
    identity,
    inverse,
    pair_universe,
    parse_marking,
    verify,
)


class TestCheckRelationPlace:
    def test_identity_and_swap_are_bisimulations(self, nets):
        net = nets["handshake"]
        swap = PlaceRelation.of({("s1", "s2"), ("s2", "s1"), ("s3", "s3")})
        assert check_relation(net, identity(net), "place").ok
        assert check_relation(net, swap, "place").ok

    def test_union_of_bisimulations_can_fail(self, nets):
        net = nets["handshake"]
        swap = PlaceRelation.of({("s1", "s2"), ("s2", "s1"), ("s3", "s3")})
        union = PlaceRelation.of(identity(net).pairs | swap.pairs)
        report = check_relation(net, union, "place")
        assert not report.ok
        assert all(v.reason == "no-response" for v in report.violations)
        sizes = {
            (net.transition_index[v.transition].pre.size, v.marking.size)
            for v in report.violations
        }
        assert sizes == {(2, 2)}

    def test_componentwise_relation_fails_on_joint_presets(self, nets):
        net = nets["triple_sync"]
        rel = PlaceRelation.of({("s1", "r1"), ("s2", "r2"), ("s3", "r3")})
        report = check_relation(net, rel, "place")
        assert not report.ok
        assert any(
            v.transition == "t2" and v.marking == parse_marking("r1+r3", net)
            for v in report.violations
        )

    def test_empty_relation_is_a_bisimulation_of_every_kind(self, nets):
        empty = PlaceRelation.of(set())
        for kind in KINDS:
            assert check_relation(nets["tau_loops"], empty, kind).ok

    def test_plain_kinds_reject_theta(self, nets):
        rel = PlaceRelation.of({("s1", THETA)})
        with pytest.raises(ModelError):
            check_relation(nets["handshake"], rel, "place")

    def test_unknown_place_rejected(self, nets):
        rel = PlaceRelation.of({("s1", "zz")})
        with pytest.raises(ModelError):
            check_relation(nets["handshake"], rel, "place")


class TestCheckRelationBranching:
    def test_producer_consumer_relation_passes(self, nets, relations):
        report = check_relation(
            nets["producer_consumer"], relations["producer_consumer"], "bplace"
        )
        assert report.ok

    def test_detour_relations_pass(self, nets, relations):
        net = nets["tau_loops"]
        assert check_relation(net, relations["tau_loops_r1"], "bplace").ok
        assert check_relation(net, relations["tau_loops_r2"], "bplace").ok

    def test_union_with_identity_fails(self, nets, relations):
        net = nets["tau_loops"]
        union = PlaceRelation.of(relations["tau_loops_r1"].pairs | identity(net).pairs)
        report = check_relation(net, union, "bplace")
        assert not report.ok
        markings = {v.marking for v in report.violations if v.transition == "ta"}
        assert parse_marking("s2+s3", net) in markings

    def test_budget_exhaustion_is_an_error_not_a_violation(self, nets, relations):
        with pytest.raises(SearchBudgetError):
            check_relation(
                nets["producer_consumer"],
                relations["producer_consumer"],
                "bplace",
                node_budget=1,
            )


class TestCheckRelationD:
    def test_spawn_deadlock_relation(self, nets, relations):
        assert check_relation(nets["spawn_deadlock"], relations["spawn_deadlock"], "dplace").ok

    def test_stuck_sync_relation(self, nets, relations):
        assert check_relation(nets["stuck_sync"], relations["stuck_sync"], "dplace").ok

    def test_tau_chain_relation(self, nets, relations):
        assert check_relation(nets["tau_chain"], relations["tau_chain"], "bdplace").ok

    def test_theta_on_an_enabled_place_is_rejected(self, nets):
        # relating a place with outgoing transitions to the empty marking
        # (and its partner from the empty marking) must not pass
        net = nets["token_pump"]
        rel = PlaceRelation.of({("s1", THETA), (THETA, "s3")})
        report = check_relation(net, rel, "bdplace")
        assert not report.ok
        assert all(v.reason == "closure-failure" for v in report.violations)

    def test_theta_on_a_dead_place_is_fine(self, nets):
        net = nets["spawn_deadlock"]
        rel = PlaceRelation.of({("s3", THETA), (THETA, "s5")})
        assert check_relation(net, rel, "dplace").ok


class TestDecide:
    def test_handshake_tokens_swap(self, nets):
        net = nets["handshake"]
        v = decide(net, Marking(["s1"]), Marking(["s2"]), "place", "exhaustive")
        assert v.status == "related"
        assert v.witness is not None
        assert check_relation(net, v.witness, "place").ok

    def test_size_mismatch_short_circuits(self, nets):
        net = nets["handshake"]
        v = decide(net, Marking(["s1"]), parse_marking("s1+s2", net), "place")
        assert v.status == "not-related"
        assert v.stats.get("reason") == "size mismatch"

    def test_componentwise_games_do_not_imply_the_joint_one(self, nets):
        # the one-step game holds piecewise, yet the triple is not related
        net = nets["triple_sync"]
        assert (
            decide(net, parse_marking("s1+s3", net), parse_marking("r1+r2", net),
                   "place", "exhaustive").status
            == "related"
        )
        assert (
            decide(net, Marking(["s2"]), Marking(["r3"]), "place", "exhaustive").status
            == "related"
        )
        v = decide(
            net,
            parse_marking("s1+s2+s3", net),
            parse_marking("r1+r2+r3", net),
            "place",
            "exhaustive",
        )
        assert v.status == "not-related"

    @pytest.mark.parametrize(
        "m1,m2,expected",
        [
            ("s1", "s2", "related"),
            ("s1", "s4", "related"),
            ("s2", "s5", "not-related"),
            ("s2", "s6", "not-related"),
        ],
    )
    def test_silent_cells_suite(self, nets, m1, m2, expected):
        net = nets["silent_cells"]
        v = decide(net, Marking([m1]), Marking([m2]), "bplace", "exhaustive")
        assert v.status == expected

    def test_dead_partner_not_d_related(self, nets):
        net = nets["dead_partner"]
        v = decide(net, Marking(["s1"]), parse_marking("s3+s4", net), "dplace", "exhaustive")
        assert v.status == "not-related"

    def test_identity_pairs_relate_everything_to_itself(self, nets):
        net = nets["tau_loops"]
        m = parse_marking("s1+s2", net)
        for kind in KINDS:
            v = decide(net, m, m, kind, "exhaustive")
            assert v.status == "related"
            needed = {(p, p) for p in m.support()}
            assert needed <= set(v.witness.pairs)

    def test_guided_finds_the_producer_consumer_witness(self, nets):
        net = nets["producer_consumer"]
        v = decide(
            net,
            parse_marking("P1+C", net),
            parse_marking("P1'+C'", net),
            "bplace",
            "guided",
        )
        assert v.status == "related"
        assert check_relation(net, v.witness, "bplace").ok

    def test_guided_handles_theta_pairs(self, nets, relations):
        net = nets["tau_chain"]
        v = decide(
            net, Marking(["s1"]), parse_marking("s4+s5", net), "bdplace", "guided"
        )
        assert v.status == "related"
        assert v.witness.pairs == relations["tau_chain"].pairs

    def test_guided_never_answers_not_related(self, nets):
        net = nets["silent_cells"]
        v = decide(net, Marking(["s2"]), Marking(["s5"]), "bplace", "guided")
        assert v.status == "unknown"

    def test_auto_picks_exhaustive_on_small_universes(self, nets):
        net = nets["silent_cells"]
        v = decide(net, Marking(["s1"]), Marking(["s2"]), "bplace", "auto")
        assert v.mode_used == "exhaustive"

    def test_auto_picks_guided_past_the_pair_cap(self, nets):
        net = nets["producer_consumer"]
        v = decide(
            net,
            parse_marking("P1+C", net),
            parse_marking("P1'+C'", net),
            "bplace",
            "auto",
        )
        assert v.mode_used == "guided"
        assert v.status == "related"

    def test_threads_do_not_change_the_verdict_or_witness(self, nets):
        net = nets["latent_sync"]
        one = decide(net, Marking(["s1"]), Marking(["s4"]), "place", "exhaustive")
        two = decide(
            net,
            Marking(["s1"]),
            Marking(["s4"]),
            "place",
            "exhaustive",
            DecideCaps(threads=2),
        )
        assert one.status == two.status == "not-related"
        net2 = nets["handshake"]
        one = decide(net2, Marking(["s1"]), Marking(["s2"]), "place", "exhaustive")
        two = decide(
            net2, Marking(["s1"]), Marking(["s2"]), "place", "exhaustive",
            DecideCaps(threads=3),
        )
        assert one.witness.pairs == two.witness.pairs

    def test_minimal_witness_in_pair_count(self, nets):
        net = nets["handshake"]
        v = decide(net, Marking(["s1"]), Marking(["s2"]), "place", "exhaustive")
        assert v.witness.pairs == frozenset({("s1", "s2")})

    def test_exhaustive_finds_a_silent_detour_witness(self, nets, relations):
        net = nets["tau_loops"]
        v = decide(
            net,
            parse_marking("s1+s2", net),
            parse_marking("s3+s5", net),
            "bplace",
            "exhaustive",
        )
        assert v.status == "related"
        assert v.witness.pairs == relations["tau_loops_r1"].pairs

    def test_exhaustive_node_budget_errors_out(self, nets):
        net = nets["tau_loops"]
        with pytest.raises(SearchBudgetError):
            decide(
                net,
                parse_marking("s1+s2", net),
                parse_marking("s3+s5", net),
                "bplace",
                "exhaustive",
                DecideCaps(node_budget=1),
            )


class TestVerify:
    def test_producer_consumer(self, nets, relations):
        net = nets["producer_consumer"]
        v = verify(
            net,
            relations["producer_consumer"],
            "bplace",
            parse_marking("P1+C", net),
            parse_marking("P1'+C'", net),
        )
        assert v.status == "related"

    def test_wrong_membership_is_unknown_not_negative(self, nets, relations):
        net = nets["tau_loops"]
        v = verify(
            net,
            relations["tau_loops_r1"],
            "bplace",
            parse_marking("s1+s2", net),
            parse_marking("s6+s8", net),
        )
        assert v.status == "unknown"
        assert v.stats["relation_ok"] and not v.stats["membership_ok"]

    def test_witness_symmetry_under_inverse(self, nets, relations):
        net = nets["tau_loops"]
        v = verify(
            net,
            inverse(relations["tau_loops_r1"]),
            "bplace",
            parse_marking("s3+s5", net),
            parse_marking("s1+s2", net),
        )
        assert v.status == "related"

    def test_composed_witnesses_still_check(self, nets, relations):
        net = nets["producer_consumer"]
        rel = relations["producer_consumer"]
        assert check_relation(net, compose(rel, inverse(rel)), "bplace").ok


class TestUniverse:
    def test_disjoint_components_give_the_product(self, nets):
        net = nets["silent_cells"]
        u = pair_universe(net, Marking(["s2"]), Marking(["s6"]), "bplace")
        assert set(u) == {(a, b) for a in ("s2", "s3") for b in ("s6", "s7", "s8")}

    def test_shared_component_gives_the_square(self, nets):
        net = nets["token_pump"]
        u = pair_universe(net, Marking(["s1"]), Marking(["s3"]), "bplace")
        assert len(u) == 16

    def test_theta_rows_and_columns_for_d_kinds(self, nets):
        net = nets["token_pump"]
        u = pair_universe(net, Marking(["s1"]), Marking(["s3"]), "bdplace")
        assert len(u) == 24
        assert ("s1", THETA) in u and (THETA, "s4") in u


class TestInclusionChain:
    def test_place_witness_passes_the_coarser_checks(self, nets):
        net = nets["handshake"]
        v = decide(net, Marking(["s1"]), Marking(["s2"]), "place", "exhaustive")
        for kind in ("dplace", "bplace", "bdplace"):
            assert check_relation(net, v.witness, kind).ok

    def test_branching_witness_passes_the_d_check(self, nets, relations):
        net = nets["tau_loops"]
        assert check_relation(net, relations["tau_loops_r1"], "bdplace").ok

    def test_silent_free_nets_collapse_place_and_branching(self, nets):
        for name in ("handshake", "triple_sync", "latent_sync"):
            net = nets[name]
            for m1, m2 in [("s1", "s2")] if name == "handshake" else []:
                a = decide(net, Marking([m1]), Marking([m2]), "place", "exhaustive")
                b = decide(net, Marking([m1]), Marking([m2]), "bplace", "exhaustive")
                assert a.status == b.status
            ident = identity(net)
            assert check_relation(net, ident, "place").ok
            assert check_relation(net, ident, "bplace").ok
