from adlog import (Atom, Constant, Database, DeltaSet, Program, Rule,
                   StdLiteral, UpdateProgram, embed_database, ground,
                   parse_database, parse_program, render, rewrite_bm,
                   rewrite_st, stable_family)
from adlog.rewrite import (KIND_BRIDGE_DELETE, KIND_BRIDGE_INSERT, KIND_GUARD,
                           KIND_RENAMED, StandardProgram)

from conftest import load_update_program


def plain(program: Program) -> StandardProgram:
    return StandardProgram(program.rules, {})


class TestEmbedDatabase:
    def test_true_facts_become_facts(self):
        program = parse_program("q(X) :- p(X).")
        db = parse_database("p(a). p(b).")
        embedded = embed_database(program, db)
        assert Rule(Atom("p", (Constant("a"),))) in embedded.rules
        assert len(embedded.rules) == 3

    def test_unknown_fact_becomes_self_negating_rule(self):
        db = parse_database("emp(a)?")
        embedded = embed_database(Program(), db)
        (rule,) = embedded.rules
        assert str(rule) == "emp(a) :- not emp(a)."

    def test_empty_database_is_identity(self):
        program = parse_program("p(a).")
        assert embed_database(program, Database()) == program


class TestRewriteSt:
    def test_cascade_matches_golden(self, fixtures_dir):
        up, _ = load_update_program("project_cascade")
        golden = (fixtures_dir / "golden" / "project_cascade_rewrite.adl").read_text()
        assert render(rewrite_st(up)) == golden

    def test_every_action_rule_has_one_guard(self):
        up, _ = load_update_program("project_cascade")
        std = rewrite_st(up)
        for rule in std.rules:
            if std.provenance.get(rule.head.predicate) == KIND_RENAMED:
                guards = [lit for lit in rule.body
                          if lit.atom.predicate.startswith("@ck_")]
                assert len(guards) == 1
                assert not guards[0].positive
                assert guards[0].atom.args == rule.head.args

    def test_guard_definitions_cover_exactly_the_action_predicates(self):
        up, _ = load_update_program("promotion")
        std = rewrite_st(up)
        defined = {r.head.predicate[len("@ck_"):] for r in std.rules
                   if r.head.predicate.startswith("@ck_") }
        assert defined == set(up.program.action_predicates())

    def test_renamed_updates_only_in_bridge_and_guard_bodies(self):
        # Outside rule heads, @plus_/@minus_ atoms may appear only inside the
        # bodies of bridge and guard definitions; user-rule bodies see bridges.
        for name in ("project_cascade", "confirm_manager", "new_hire_roles"):
            up, _ = load_update_program(name)
            std = rewrite_st(up)
            for rule in std.rules:
                head_kind = std.provenance.get(rule.head.predicate)
                for lit in rule.body:
                    if isinstance(lit, StdLiteral) and \
                            lit.atom.predicate.startswith(("@plus_", "@minus_")):
                        assert head_kind in (KIND_GUARD, KIND_BRIDGE_INSERT,
                                             KIND_BRIDGE_DELETE), str(rule)

    def test_bridging_applies_under_negation(self):
        up, _ = load_update_program("confirm_manager")
        std = rewrite_st(up)
        negated = [lit for rule in std.rules for lit in rule.body
                   if not lit.positive and lit.atom.predicate == "@insb_mgr"]
        assert negated, "negated update literal was not routed through its bridge"

    def test_delta_markers_become_facts(self):
        up, _ = load_update_program("confirm_manager")
        std = rewrite_st(up)
        assert Rule(Atom("@ins_confirm", (Constant("x"), Constant("d")))) in std.rules

    def test_update_free_program_gets_no_bridges_or_markers(self):
        program = parse_program("+p(X) :- q(X).\nr(X) :- q(X).")
        std = rewrite_st(UpdateProgram(DeltaSet(), program))
        predicates = {r.head.predicate for r in std.rules}
        assert predicates == {"@plus_p", "r", "@ck_p"}

    def test_provenance_kinds(self):
        up, _ = load_update_program("project_cascade")
        std = rewrite_st(up)
        assert std.provenance["@ck_mgr"] == "guard"
        assert std.provenance["@del_proj"] == "delta-delete"
        assert std.provenance["@delb_proj"] == "bridge-delete"
        assert std.provenance["@plus_mgr"] == "renamed-update"
        assert std.provenance["diff_mgr"] == "user"


class TestRewriteBm:
    def test_confirm_manager_core_rules(self):
        up, _ = load_update_program("confirm_manager")
        text = render(rewrite_bm(up))
        assert "@plus_mgr(X,D) :- @plus_confirm(X,D), not @minus_mgr(X,D)." in text
        assert "@minus_mgr(X,D) :- mgr(X,D), not @plus_mgr(X,D), @plus_confirm(Y,D)." in text
        assert "@plus_confirm(x,d) :- not @minus_confirm(x,d)." in text

    def test_insertions_feed_the_base_relation(self):
        up, _ = load_update_program("confirm_manager")
        text = render(rewrite_bm(up))
        assert "mgr(X1,X2) :- @plus_mgr(X1,X2)." in text

    def test_existing_complement_guard_is_not_duplicated(self):
        up, _ = load_update_program("confirm_manager")
        std = rewrite_bm(up)
        for rule in std.rules:
            assert len(set(rule.body)) == len(rule.body), str(rule)

    def test_cascade_guards_and_delta_rule(self):
        up, _ = load_update_program("project_cascade")
        text = render(rewrite_bm(up))
        assert "@minus_proj(p) :- not @plus_proj(p)." in text
        assert ("@minus_mgr(X,P,D) :- @delb_proj(P)") not in text  # no bridges in this mode
        assert "@plus_mgr(X,P,D) :- @minus_mgr(X,P,D), not diff_mgr(X,D), " \
               "not @minus_mgr(X,P,D)." in text

    def test_pure_deductive_program_is_unchanged(self):
        program = parse_program("q(X) :- p(X), not r(X).")
        std = rewrite_bm(UpdateProgram(DeltaSet(), program))
        assert Program(std.rules) == program


class TestGround:
    def test_false_neq_instances_are_dropped(self):
        program = plain(parse_program("diff(X,D) :- mgr(Y,P,D), Y != X."))
        db_rules = plain(parse_program("mgr(x,p,d).", validate=False))
        merged = StandardProgram(program.rules + db_rules.rules, {})
        rules = {str(r) for r in ground(merged).rules}
        assert "diff(x,d) :- mgr(x,p,d)." not in rules  # x != x is false
        assert "diff(p,d) :- mgr(x,p,d)." in rules

    def test_propositional_program_grounds_to_itself(self, fixtures_dir):
        program = plain(parse_program((fixtures_dir / "zoo_join.adl").read_text()))
        g = ground(program)
        assert frozenset(g.rules) == frozenset(program.rules)

    def test_two_instances_for_two_constants(self):
        program = plain(parse_program("p(X) :- q(X).\nq(a).\nq(b)."))
        g = ground(program)
        p_rules = [r for r in g.rules if r.head.predicate == "p"]
        assert len(p_rules) == 2

    def test_builtin_literals_are_eliminated(self):
        program = plain(parse_program("p(X) :- q(X), X != a.\nq(a).\nq(b)."))
        g = ground(program)
        (p_rule,) = [r for r in g.rules if r.head.predicate == "p"]
        assert str(p_rule) == "p(b) :- q(b)."

    def test_pruning_keeps_stable_models_on_derivable_atoms(self, fixtures_dir):
        for name in ("zoo_choice_nofact", "zoo_join", "zoo_chain"):
            program = plain(parse_program((fixtures_dir / f"{name}.adl").read_text()))
            full = stable_family(ground(program, prune=False))
            pruned = stable_family(ground(program, prune=True))
            kept = ground(program, prune=True).universe
            full_restricted = sorted(
                frozenset((a, v) for a, v in m.literal_set() if a in kept)
                | frozenset((a, "?") for a in m.undefined_atoms() if a in kept)
                for m in full.models())
            pruned_view = sorted(
                frozenset(m.literal_set())
                | frozenset((a, "?") for a in m.undefined_atoms())
                for m in pruned.models())
            assert full_restricted == pruned_view, name

    def test_unused_constant_changes_nothing_after_pruning(self):
        up, _ = load_update_program("new_hire_worker")
        base = ground(embed_database(rewrite_st(up), Database()), prune=True)
        extended = ground(embed_database(rewrite_st(up), Database()), prune=True,
                          extra_constants=["zz"])
        base_family = stable_family(base)
        extended_family = stable_family(extended)
        original = base.universe
        restricted = sorted(
            frozenset((a, v) for a, v in m.literal_set() if a in original)
            for m in extended_family.models())
        assert restricted == sorted(frozenset(m.literal_set())
                                    for m in base_family.models())

    def test_ground_program_has_no_variables_or_builtins(self):
        up, _ = load_update_program("project_cascade", db=True)
        g = ground(embed_database(rewrite_st(up),
                                  parse_database("proj(p). mgr(x,p,d).")))
        for rule in g.rules:
            assert rule.is_ground()
