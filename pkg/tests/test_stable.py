import itertools
import random

import pytest

from adlog import (Atom, Constant, Database, Interpretation,
                   ResourceLimitError, TruthValue, embed_database,
                   enumerate_pstable, gl_reduct, greatest_unfounded, ground,
                   immediate_consequence, is_pstable, least_3v_model,
                   max_deterministic, parse_program, rewrite_st,
                   stable_family, well_founded, wf_step)
from adlog.rewrite import StandardProgram
from adlog.selftest import brute_force_family, random_ground_program
from adlog.stable import FLAG_L_STABLE, FLAG_M_STABLE, FLAG_T_STABLE

from conftest import load_update_program

a, b, c, p, q = Atom("a"), Atom("b"), Atom("c"), Atom("p"), Atom("q")


def ground_of(text: str):
    return ground(StandardProgram(parse_program(text).rules, {}))


def interp(universe, true=(), false=()):
    return Interpretation(frozenset(universe), frozenset(true), frozenset(false))


def oracle_unfounded(program, interpretation):
    """Greatest unfounded set by enumerating candidate subsets.

    Checks the defining condition directly on every subset of the candidate
    atoms and returns the union of all sets that satisfy it; independent of
    the erosion computation under test.
    """
    atoms = sorted(program.universe, key=str)
    def is_unfounded(subset):
        for rule in program.rules:
            if rule.head not in subset:
                continue
            body_false = any(
                (lit.positive and interpretation.value(lit.atom) is TruthValue.FALSE)
                or (not lit.positive and interpretation.value(lit.atom) is TruthValue.TRUE)
                for lit in rule.body)
            circular = any(lit.positive and lit.atom in subset for lit in rule.body)
            if not (body_false or circular):
                return False
        return True
    best: set = set()
    for size in range(len(atoms) + 1):
        for combo in itertools.combinations(atoms, size):
            if is_unfounded(set(combo)):
                best |= set(combo)
    return best


class TestImmediateConsequence:
    def test_negative_body_false_fires(self):
        g = ground_of("a :- not b.")
        assert immediate_consequence(g, interp([a, b], false=[b])) == {a}

    def test_undefined_body_does_not_fire(self):
        g = ground_of("a :- not b.")
        assert immediate_consequence(g, interp([a, b])) == set()

    def test_factless_program_from_empty(self, fixtures_dir):
        g = ground_of((fixtures_dir / "zoo_join.adl").read_text())
        assert immediate_consequence(g, Interpretation.empty(g.universe)) == set()


class TestGreatestUnfounded:
    def test_ruleless_atom_is_unfounded(self):
        g = ground_of("a :- not q.")
        assert q in greatest_unfounded(g, Interpretation.empty(g.universe))

    def test_self_supporting_loop(self):
        g = ground_of("p :- p.")
        assert greatest_unfounded(g, Interpretation.empty(g.universe)) == {p}

    def test_matches_subset_oracle_on_choice_program(self, fixtures_dir):
        g = ground_of((fixtures_dir / "zoo_choice.adl").read_text())
        empty = Interpretation.empty(g.universe)
        assert greatest_unfounded(g, empty) == oracle_unfounded(g, empty) == set()

    def test_matches_subset_oracle_on_random_programs(self):
        rng = random.Random(7)
        for _ in range(25):
            g = random_ground_program(rng)
            if len(g.universe) > 6:
                continue
            empty = Interpretation.empty(g.universe)
            assert greatest_unfounded(g, empty) == oracle_unfounded(g, empty)
            wf = well_founded(g)
            assert greatest_unfounded(g, wf) == oracle_unfounded(g, wf)


class TestWfStep:
    def test_empty_program_makes_everything_false(self):
        g = ground_of("")
        step = wf_step(g, interp([a, b]))
        assert step.false_atoms == {a, b}

    def test_single_fact(self):
        g = ground_of("a.")
        step = wf_step(g, Interpretation.empty(g.universe | {b}))
        assert step.true_atoms == {a}
        assert step.false_atoms == {b}

    def test_choice_program_first_step_derives_the_fact(self, fixtures_dir):
        g = ground_of((fixtures_dir / "zoo_choice.adl").read_text())
        current = Interpretation.empty(g.universe)
        seen = []
        for _ in range(6):
            nxt = wf_step(g, current)
            assert current.issubset(nxt)  # inflationary along the iteration
            seen.append(nxt)
            if nxt == current:
                break
            current = nxt
        assert a in seen[0].true_atoms
        assert all(q in s.undefined_atoms() for s in seen)


class TestWellFounded:
    def test_choice_program(self, fixtures_dir):
        wf = well_founded(ground_of((fixtures_dir / "zoo_choice.adl").read_text()))
        assert wf.true_atoms == {a}
        assert wf.false_atoms == set()
        assert wf.undefined_count == 6

    def test_join_program_all_undefined(self, fixtures_dir):
        wf = well_founded(ground_of((fixtures_dir / "zoo_join.adl").read_text()))
        assert wf.undefined_count == 4

    def test_choice_program_without_fact(self, fixtures_dir):
        wf = well_founded(ground_of((fixtures_dir / "zoo_choice_nofact.adl").read_text()))
        assert wf.true_atoms == set()
        assert wf.false_atoms == {a, Atom("d"), Atom("e")}


class TestReduct:
    def test_false_negation_becomes_true_floor(self):
        g = ground_of("a :- not b.")
        reduct = gl_reduct(g, interp([a, b], false=[b]))
        (rule,) = [r for r in reduct.rules if r.head == a]
        assert rule.floor is TruthValue.TRUE

    def test_undefined_negation_becomes_undefined_floor(self):
        g = ground_of("a :- not b.")
        reduct = gl_reduct(g, interp([a, b]))
        (rule,) = [r for r in reduct.rules if r.head == a]
        assert rule.floor is TruthValue.UNDEFINED

    def test_join_program_reduct(self, fixtures_dir):
        g = ground_of((fixtures_dir / "zoo_join.adl").read_text())
        m = interp(g.universe, true=[c], false=[Atom("d")])
        reduct = gl_reduct(g, m)
        floors = {(str(r.head), tuple(map(str, r.positive))): r.floor for r in reduct.rules}
        assert floors[("a", ())] is TruthValue.UNDEFINED
        assert floors[("b", ())] is TruthValue.UNDEFINED
        assert floors[("c", ())] is TruthValue.TRUE      # c :- not d.
        assert floors[("d", ())] is TruthValue.FALSE     # d :- not c.
        assert floors[("c", ("a",))] is TruthValue.TRUE  # positive atom kept


class TestLeast3vModel:
    def test_true_floor(self):
        g = ground_of("a :- not b.")
        m = least_3v_model(gl_reduct(g, interp([a, b], false=[b])))
        assert m.value(a) is TruthValue.TRUE

    def test_undefined_floor(self):
        g = ground_of("a :- not b.")
        m = least_3v_model(gl_reduct(g, interp([a, b])))
        assert m.value(a) is TruthValue.UNDEFINED

    def test_join_program_least_model(self, fixtures_dir):
        g = ground_of((fixtures_dir / "zoo_join.adl").read_text())
        m = least_3v_model(gl_reduct(g, interp(g.universe, true=[c], false=[Atom("d")])))
        assert m.value(c) is TruthValue.TRUE
        assert m.value(Atom("d")) is TruthValue.FALSE
        assert m.value(a) is TruthValue.UNDEFINED
        assert m.value(b) is TruthValue.UNDEFINED


class TestIsPstable:
    def test_join_program_partial_model(self, fixtures_dir):
        g = ground_of((fixtures_dir / "zoo_join.adl").read_text())
        assert is_pstable(g, interp(g.universe, true=[c], false=[Atom("d")]))

    def test_unstable_assignment(self, fixtures_dir):
        g = ground_of((fixtures_dir / "zoo_join.adl").read_text())
        assert not is_pstable(g, interp(g.universe, true=[a], false=[b]))

    def test_well_founded_is_always_stable(self):
        rng = random.Random(11)
        for _ in range(20):
            g = random_ground_program(rng)
            assert is_pstable(g, well_founded(g))


class TestEnumerate:
    def test_single_fact(self):
        family = enumerate_pstable(ground_of("a."))
        assert [m.render_key() for m in family.models()] == ["a."]

    def test_counts_on_fixture_programs(self, fixtures_dir):
        for name, count in (("zoo_choice", 5), ("zoo_join", 4),
                            ("zoo_choice_nofact", 3), ("zoo_chain", 1)):
            g = ground_of((fixtures_dir / f"{name}.adl").read_text())
            assert len(enumerate_pstable(g).records) == count, name

    def test_cap_exceeded(self):
        text = "\n".join(f"p{i} :- not q{i}.\nq{i} :- not p{i}." for i in range(4))
        with pytest.raises(ResourceLimitError) as exc:
            enumerate_pstable(ground_of(text), cap=5)
        assert exc.value.cap == 5

    def test_matches_exhaustive_oracle(self):
        rng = random.Random(5)
        for _ in range(15):
            g = random_ground_program(rng)
            assert list(enumerate_pstable(g).models()) == brute_force_family(g)


class TestClassify:
    def test_well_founded_is_intersection_and_subset_of_all(self, fixtures_dir):
        for name in ("zoo_choice", "zoo_join", "zoo_choice_nofact"):
            g = ground_of((fixtures_dir / f"{name}.adl").read_text())
            family = stable_family(g)
            wf = well_founded(g)
            for record in family.records:
                assert wf.issubset(record.model)
            sets = [m.literal_set() for m in family.models()]
            assert frozenset.intersection(*sets) == wf.literal_set()

    def test_t_stable_models_are_total_and_their_reducts_two_valued(self, fixtures_dir):
        g = ground_of((fixtures_dir / "zoo_join.adl").read_text())
        for record in stable_family(g).with_flag(FLAG_T_STABLE):
            assert record.model.is_total
            least = least_3v_model(gl_reduct(g, record.model))
            assert least.undefined_count == 0

    def test_l_equals_t_when_totals_exist(self):
        rng = random.Random(3)
        checked = 0
        for _ in range(40):
            g = random_ground_program(rng)
            family = stable_family(g)
            totals = family.with_flag(FLAG_T_STABLE)
            if totals:
                checked += 1
                assert set(family.with_flag(FLAG_L_STABLE)) == set(totals)
        assert checked > 5

    def test_m_stable_maximality(self, fixtures_dir):
        g = ground_of((fixtures_dir / "zoo_choice.adl").read_text())
        family = stable_family(g)
        maximal = {r.model.render_key() for r in family.with_flag(FLAG_M_STABLE)}
        assert maximal == {
            "a. b. not c. d? e? p? q?",
            "a. not b. c. not d. e. not p. q?",
            "a. not b. c. d. not e. not p. not q.",
        }


class TestMaxDeterministic:
    def test_join_program(self, fixtures_dir):
        g = ground_of((fixtures_dir / "zoo_join.adl").read_text())
        md = max_deterministic(g)
        assert md.true_atoms == {c}
        assert md.false_atoms == {Atom("d")}

    def test_unique_model_program(self):
        md = max_deterministic(ground_of("a."))
        assert md.true_atoms == {a}

    def test_rewritten_choice_update_program(self):
        up, _ = load_update_program("new_hire_roles")
        g = ground(embed_database(rewrite_st(up), Database()), prune=True)
        md = max_deterministic(g)
        arg = (Constant("a"),)
        assert md.value(Atom("@plus_worker", arg)) is TruthValue.TRUE
        assert md.value(Atom("@plus_emp", arg)) is TruthValue.UNDEFINED
        assert md.value(Atom("@plus_mgr", arg)) is TruthValue.UNDEFINED
        assert md.value(Atom("@plus_noworker", arg)) is TruthValue.FALSE
