"""Rewriting of update programs into standard Datalog with negation, plus grounding.

Two rewritings are provided.  The primary one (`rewrite_st`) guards every
action with a consistency-check predicate, routes input updates through
auxiliary facts, and bridges body update atoms so that an update event is
visible whether it was derived by a rule or requested in the input delta.
The rival one (`rewrite_bm`) guards each action with the complementary
update only and turns input updates into guarded rules.

All generated predicates live in the reserved '@' namespace:

    @ck_a     consistency guard for action predicate a
    @ins_p    input-delta insertion marker (fact per +p(t) in the delta)
    @del_p    input-delta deletion marker
    @insb_p   bridge: insertion of p derived by a rule or present in the delta
    @delb_p   bridge: deletion of p derived by a rule or present in the delta
    @plus_p   standard renaming of the update atom +p
    @minus_p  standard renaming of the update atom -p
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping

from .model import (Atom, BuiltinLiteral, Constant, Database, Literal,
                    Polarity, Program, Rule, StdLiteral, UpdateAtom,
                    UpdateProgram, UpdLiteral, ValidationError, Variable)

KIND_USER = "user"
KIND_GUARD = "guard"
KIND_DELTA_INSERT = "delta-insert"
KIND_DELTA_DELETE = "delta-delete"
KIND_BRIDGE_INSERT = "bridge-insert"
KIND_BRIDGE_DELETE = "bridge-delete"
KIND_RENAMED = "renamed-update"


def guard_predicate(action: str) -> str:
    return f"@ck_{action}"


def delta_marker_predicate(polarity: Polarity, predicate: str) -> str:
    return f"@ins_{predicate}" if polarity is Polarity.INSERT else f"@del_{predicate}"


def bridge_predicate(polarity: Polarity, predicate: str) -> str:
    return f"@insb_{predicate}" if polarity is Polarity.INSERT else f"@delb_{predicate}"


def renamed_update_predicate(polarity: Polarity, predicate: str) -> str:
    return f"@plus_{predicate}" if polarity is Polarity.INSERT else f"@minus_{predicate}"


def renamed_update_atom(uatom: UpdateAtom) -> Atom:
    return Atom(renamed_update_predicate(uatom.polarity, uatom.atom.predicate), uatom.atom.args)


def base_atom_of_renamed(atom: Atom) -> tuple[Polarity, Atom] | None:
    """Invert the step-7 renaming, or None for non-update predicates."""
    if atom.predicate.startswith("@plus_"):
        return Polarity.INSERT, Atom(atom.predicate[len("@plus_"):], atom.args)
    if atom.predicate.startswith("@minus_"):
        return Polarity.DELETE, Atom(atom.predicate[len("@minus_"):], atom.args)
    return None


@dataclass(frozen=True, eq=False)
class StandardProgram:
    """Datalog program over standard atoms only, with generated-predicate provenance."""

    rules: tuple[Rule, ...]
    provenance: Mapping[str, str]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, StandardProgram):
            return NotImplemented
        return frozenset(self.rules) == frozenset(other.rules)

    def __hash__(self) -> int:
        return hash(frozenset(self.rules))

    def constants(self) -> set[str]:
        return Program(self.rules).constants()

    def as_program(self) -> Program:
        return Program(self.rules)


@dataclass(frozen=True, eq=False)
class GroundProgram:
    """Variable-free, builtin-free rules plus the slice of the Herbrand base they mention."""

    rules: tuple[Rule, ...]
    universe: frozenset[Atom]
    provenance: Mapping[str, str]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GroundProgram):
            return NotImplemented
        return frozenset(self.rules) == frozenset(other.rules) and self.universe == other.universe

    def __hash__(self) -> int:
        return hash((frozenset(self.rules), self.universe))


# ---------------------------------------------------------------------------
# Database embedding
# ---------------------------------------------------------------------------

def embed_database(program, database: Database):
    """Add one fact per true tuple and one rule `p(t) :- not p(t).` per unknown tuple."""
    extra: list[Rule] = []
    for atom in sorted(database.true_facts, key=str):
        extra.append(Rule(atom, ()))
    for atom in sorted(database.unknown_facts, key=str):
        extra.append(Rule(atom, (StdLiteral(atom, positive=False),)))
    if isinstance(program, StandardProgram):
        return StandardProgram(program.rules + tuple(extra), program.provenance)
    return Program(program.rules + tuple(extra))


# ---------------------------------------------------------------------------
# Primary rewriting
# ---------------------------------------------------------------------------

def _body_update_pairs(program: Program) -> set[tuple[Polarity, str, int]]:
    pairs = set()
    for rule in program.rules:
        for lit in rule.body:
            if isinstance(lit, UpdLiteral):
                pairs.add((lit.uatom.polarity, lit.uatom.atom.predicate, lit.uatom.atom.arity))
    return pairs


def _bridge_body_literal(lit: UpdLiteral) -> StdLiteral:
    atom = Atom(bridge_predicate(lit.uatom.polarity, lit.uatom.atom.predicate),
                lit.uatom.atom.args)
    return StdLiteral(atom, lit.positive)


def _generic_args(arity: int) -> tuple[Variable, ...]:
    return tuple(Variable(f"X{i + 1}") for i in range(arity))


def rewrite_st(up: UpdateProgram) -> StandardProgram:
    """Guarded rewriting with delta markers and bridge predicates."""
    provenance: dict[str, str] = {}
    rules: list[Rule] = []
    actions = up.program.action_predicates()

    for rule in up.program.rules:
        body: list[Literal] = []
        for lit in rule.body:
            if isinstance(lit, UpdLiteral):
                bridged = _bridge_body_literal(lit)
                kind = (KIND_BRIDGE_INSERT if lit.uatom.polarity is Polarity.INSERT
                        else KIND_BRIDGE_DELETE)
                provenance[bridged.atom.predicate] = kind
                body.append(bridged)
            else:
                body.append(lit)
        if rule.is_active:
            head_atom = renamed_update_atom(rule.head)
            provenance[head_atom.predicate] = KIND_RENAMED
            guard = Atom(guard_predicate(rule.head.atom.predicate), rule.head.atom.args)
            body.append(StdLiteral(guard, positive=False))
            rules.append(Rule(head_atom, tuple(body), rule.origin))
        else:
            rules.append(Rule(rule.head, tuple(body), rule.origin))
        for atom in _user_atoms(rule):
            provenance.setdefault(atom.predicate, KIND_USER)

    for action in sorted(actions):
        args = _generic_args(actions[action])
        head = Atom(guard_predicate(action), args)
        provenance[head.predicate] = KIND_GUARD
        plus = Atom(renamed_update_predicate(Polarity.INSERT, action), args)
        minus = Atom(renamed_update_predicate(Polarity.DELETE, action), args)
        provenance.setdefault(plus.predicate, KIND_RENAMED)
        provenance.setdefault(minus.predicate, KIND_RENAMED)
        rules.append(Rule(head, (StdLiteral(plus), StdLiteral(minus))))

    for uatom in sorted(up.delta.updates, key=str):
        marker = Atom(delta_marker_predicate(uatom.polarity, uatom.atom.predicate),
                      uatom.atom.args)
        provenance[marker.predicate] = (KIND_DELTA_INSERT if uatom.polarity is Polarity.INSERT
                                        else KIND_DELTA_DELETE)
        provenance.setdefault(uatom.atom.predicate, KIND_USER)
        rules.append(Rule(marker, ()))

    for polarity, predicate, arity in sorted(_body_update_pairs(up.program),
                                             key=lambda p: (p[1], p[0].value)):
        args = _generic_args(arity)
        bridge = Atom(bridge_predicate(polarity, predicate), args)
        renamed = Atom(renamed_update_predicate(polarity, predicate), args)
        marker = Atom(delta_marker_predicate(polarity, predicate), args)
        provenance.setdefault(renamed.predicate, KIND_RENAMED)
        provenance.setdefault(marker.predicate,
                              KIND_DELTA_INSERT if polarity is Polarity.INSERT
                              else KIND_DELTA_DELETE)
        rules.append(Rule(bridge, (StdLiteral(renamed),)))
        rules.append(Rule(bridge, (StdLiteral(marker),)))

    return StandardProgram(tuple(rules), provenance)


def _user_atoms(rule: Rule):
    yield rule.head_atom()
    for lit in rule.body:
        if isinstance(lit, StdLiteral):
            yield lit.atom
        elif isinstance(lit, UpdLiteral):
            yield lit.uatom.atom


# ---------------------------------------------------------------------------
# Rival rewriting
# ---------------------------------------------------------------------------

def rewrite_bm(up: UpdateProgram) -> StandardProgram:
    """Complement-guarded rewriting: no delta markers, no bridges.

    Each action rule gets the complementary update as an extra negative guard,
    each input update becomes a guarded rule, and body update atoms are renamed
    in place.  Insertion events additionally feed the base relation itself
    (`p(t) :- @plus_p(t)`), so conditions read the post-update state: this is
    what leaves an atom undefined when its insertion and deletion chase each
    other through the rules, instead of resolving the race in favour of one
    side.
    """
    provenance: dict[str, str] = {}
    rules: list[Rule] = []
    insertable: dict[str, int] = {}

    for rule in up.program.rules:
        body: list[Literal] = []
        for lit in rule.body:
            if isinstance(lit, UpdLiteral):
                renamed = StdLiteral(renamed_update_atom(lit.uatom), lit.positive)
                provenance[renamed.atom.predicate] = KIND_RENAMED
                body.append(renamed)
            else:
                body.append(lit)
        if rule.is_active:
            head_atom = renamed_update_atom(rule.head)
            provenance[head_atom.predicate] = KIND_RENAMED
            complement = Polarity.DELETE if rule.head.polarity is Polarity.INSERT \
                else Polarity.INSERT
            guard = StdLiteral(Atom(renamed_update_predicate(complement,
                                                             rule.head.atom.predicate),
                                    rule.head.atom.args), positive=False)
            provenance.setdefault(guard.atom.predicate, KIND_RENAMED)
            if guard not in body:
                body.append(guard)
            if rule.head.polarity is Polarity.INSERT:
                insertable[rule.head.atom.predicate] = rule.head.atom.arity
            rules.append(Rule(head_atom, tuple(body), rule.origin))
        else:
            rules.append(Rule(rule.head, tuple(body), rule.origin))
        for atom in _user_atoms(rule):
            provenance.setdefault(atom.predicate, KIND_USER)

    for uatom in sorted(up.delta.updates, key=str):
        head = renamed_update_atom(uatom)
        complement = Polarity.DELETE if uatom.polarity is Polarity.INSERT else Polarity.INSERT
        guard_atom = Atom(renamed_update_predicate(complement, uatom.atom.predicate),
                          uatom.atom.args)
        provenance[head.predicate] = KIND_RENAMED
        provenance.setdefault(guard_atom.predicate, KIND_RENAMED)
        provenance.setdefault(uatom.atom.predicate, KIND_USER)
        rules.append(Rule(head, (StdLiteral(guard_atom, positive=False),)))
        if uatom.polarity is Polarity.INSERT:
            insertable[uatom.atom.predicate] = uatom.atom.arity

    for predicate in sorted(insertable):
        args = _generic_args(insertable[predicate])
        plus = Atom(renamed_update_predicate(Polarity.INSERT, predicate), args)
        rules.append(Rule(Atom(predicate, args), (StdLiteral(plus),)))

    return StandardProgram(tuple(rules), provenance)


# ---------------------------------------------------------------------------
# Grounding
# ---------------------------------------------------------------------------

def ground(program: StandardProgram, *, prune: bool = False,
           extra_constants: Iterable[str] = ()) -> GroundProgram:
    """Instantiate over the active constant domain, evaluating builtins away.

    Rule instances with a false builtin are dropped; true builtins are removed
    from bodies.  With `prune`, rules whose positive body atoms can never be
    derived are discarded; this cannot change any stable model on the atoms
    that remain derivable.
    """
    constants = sorted(program.constants() | set(extra_constants))
    ground_rules: list[Rule] = []
    for rule in program.rules:
        variables = sorted(rule.variables(), key=lambda v: v.name)
        if isinstance(rule.head, UpdateAtom) or any(isinstance(lit, UpdLiteral)
                                                    for lit in rule.body):
            raise ValidationError(f"rule {rule} still contains update atoms")
        if variables and not constants:
            continue
        for combo in itertools.product(constants, repeat=len(variables)):
            binding = {v: Constant(c) for v, c in zip(variables, combo)}
            ground_rules.append(_instantiate(rule, binding))
    ground_rules = [r for r in ground_rules if r is not None]
    if prune:
        ground_rules = _prune_underivable(ground_rules)
    universe: set[Atom] = set()
    for rule in ground_rules:
        universe.add(rule.head)
        for lit in rule.body:
            universe.add(lit.atom)
    return GroundProgram(tuple(dict.fromkeys(ground_rules)), frozenset(universe),
                         program.provenance)


def _instantiate(rule: Rule, binding) -> Rule | None:
    body: list[StdLiteral] = []
    for lit in rule.body:
        if isinstance(lit, BuiltinLiteral):
            if not lit.substitute(binding).evaluate():
                return None
            continue
        body.append(StdLiteral(lit.atom.substitute(binding), lit.positive))
    return Rule(rule.head.substitute(binding), tuple(body), rule.origin)


def _prune_underivable(rules: list[Rule]) -> list[Rule]:
    derivable: set[Atom] = set()
    changed = True
    while changed:
        changed = False
        for rule in rules:
            if rule.head in derivable:
                continue
            if all(lit.atom in derivable for lit in rule.body if lit.positive):
                derivable.add(rule.head)
                changed = True
    return [r for r in rules
            if all(lit.atom in derivable for lit in r.body if lit.positive)]
