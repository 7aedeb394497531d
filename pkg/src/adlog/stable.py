"""Three-valued model theory: well-founded fixpoint, reducts, stable-model families.

The well-founded model is computed as the least fixpoint of the transformation
W(I) = T(I) + not-U(I), where T is the immediate consequence operator and U the
greatest unfounded set.  Families of partial stable models are produced by
exhaustively extending the undefined residue of the well-founded model and
filtering with the reduct-based stability check.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable

from .model import (Atom, EngineError, Interpretation, ResourceLimitError,
                    TruthValue)
from .rewrite import GroundProgram

DEFAULT_ENUMERATION_CAP = 20

FLAG_WELL_FOUNDED = "well-founded"
FLAG_T_STABLE = "t-stable"
FLAG_M_STABLE = "m-stable"
FLAG_L_STABLE = "l-stable"
FLAG_DETERMINISTIC = "deterministic"
FLAG_MAX_DETERMINISTIC = "max-deterministic"

ALL_FLAGS = (FLAG_WELL_FOUNDED, FLAG_T_STABLE, FLAG_M_STABLE, FLAG_L_STABLE,
             FLAG_DETERMINISTIC, FLAG_MAX_DETERMINISTIC)

_TRUE = int(TruthValue.TRUE)
_UNDEF = int(TruthValue.UNDEFINED)
_FALSE = int(TruthValue.FALSE)


class _Indexed:
    """Integer-indexed view of a ground program for the fixpoint loops."""

    def __init__(self, program: GroundProgram, extra_atoms: Iterable[Atom] = ()):
        self.atoms: list[Atom] = sorted(program.universe | set(extra_atoms), key=str)
        self.index = {atom: i for i, atom in enumerate(self.atoms)}
        self.rules: list[tuple[int, tuple[int, ...], tuple[int, ...]]] = []
        for rule in program.rules:
            head = self.index[rule.head]
            pos = tuple(self.index[lit.atom] for lit in rule.body if lit.positive)
            neg = tuple(self.index[lit.atom] for lit in rule.body if not lit.positive)
            self.rules.append((head, pos, neg))

    def values_of(self, interp: Interpretation) -> list[int]:
        return [int(interp.value(atom)) for atom in self.atoms]

    def to_interpretation(self, vals: list[int]) -> Interpretation:
        true_atoms = frozenset(a for a, v in zip(self.atoms, vals) if v == _TRUE)
        false_atoms = frozenset(a for a, v in zip(self.atoms, vals) if v == _FALSE)
        return Interpretation(frozenset(self.atoms), true_atoms, false_atoms)


def _consequences(idx: _Indexed, vals: list[int]) -> set[int]:
    out = set()
    for head, pos, neg in idx.rules:
        if all(vals[p] == _TRUE for p in pos) and all(vals[n] == _FALSE for n in neg):
            out.add(head)
    return out


def _unfounded(idx: _Indexed, vals: list[int]) -> set[int]:
    # Greatest unfounded set, computed by eroding the candidate set: an atom
    # escapes as soon as some rule for it is neither false in the current
    # interpretation nor circular through the remaining candidates.
    in_u = [v != _TRUE for v in vals]
    changed = True
    while changed:
        changed = False
        for head, pos, neg in idx.rules:
            if not in_u[head]:
                continue
            if any(vals[p] == _FALSE for p in pos) or any(vals[n] == _TRUE for n in neg):
                continue
            if all(not in_u[p] for p in pos):
                in_u[head] = False
                changed = True
    return {i for i, flag in enumerate(in_u) if flag}


def immediate_consequence(program: GroundProgram, interp: Interpretation) -> set[Atom]:
    """Heads of rules whose entire body is true in the interpretation."""
    idx = _Indexed(program, interp.universe)
    vals = idx.values_of(interp)
    return {idx.atoms[i] for i in _consequences(idx, vals)}


def greatest_unfounded(program: GroundProgram, interp: Interpretation) -> set[Atom]:
    """Largest atom set whose every rule is false in `interp` or circular through the set."""
    idx = _Indexed(program, interp.universe)
    vals = idx.values_of(interp)
    return {idx.atoms[i] for i in _unfounded(idx, vals)}


def wf_step(program: GroundProgram, interp: Interpretation) -> Interpretation:
    idx = _Indexed(program, interp.universe)
    vals = idx.values_of(interp)
    true_ids = _consequences(idx, vals)
    false_ids = _unfounded(idx, vals)
    if true_ids & false_ids:
        raise EngineError("well-founded step produced an inconsistent literal set")
    return Interpretation(frozenset(idx.atoms),
                          frozenset(idx.atoms[i] for i in true_ids),
                          frozenset(idx.atoms[i] for i in false_ids))


def well_founded(program: GroundProgram) -> Interpretation:
    """Least fixpoint of the T/unfounded transformation, from the empty interpretation."""
    idx = _Indexed(program)
    vals = [_UNDEF] * len(idx.atoms)
    prev_defined = -1
    while True:
        true_ids = _consequences(idx, vals)
        false_ids = _unfounded(idx, vals)
        if true_ids & false_ids:
            raise EngineError("well-founded step produced an inconsistent literal set")
        new_vals = [_UNDEF] * len(idx.atoms)
        for i in true_ids:
            new_vals[i] = _TRUE
        for i in false_ids:
            new_vals[i] = _FALSE
        for old, new in zip(vals, new_vals):
            if old != _UNDEF and old != new:
                raise EngineError("well-founded iteration is not inflationary")
        defined = len(true_ids) + len(false_ids)
        if defined == prev_defined:
            return idx.to_interpretation(new_vals)
        prev_defined = defined
        vals = new_vals


# ---------------------------------------------------------------------------
# Reducts and stability
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ReductRule:
    """Positive rule; `floor` folds the truth constants substituted for negated literals."""

    head: Atom
    positive: tuple[Atom, ...]
    floor: TruthValue

    def __str__(self) -> str:
        parts = [str(a) for a in self.positive] + [str(self.floor)]
        return f"{self.head} :- {', '.join(parts)}."


@dataclass(frozen=True)
class ReductProgram:
    rules: tuple[ReductRule, ...]
    universe: frozenset[Atom]


def gl_reduct(program: GroundProgram, interp: Interpretation) -> ReductProgram:
    """Replace each negated body literal with the complement of its value in `interp`."""
    rules = []
    for rule in program.rules:
        positive = tuple(lit.atom for lit in rule.body if lit.positive)
        floor = TruthValue.TRUE
        for lit in rule.body:
            if not lit.positive:
                floor = min(floor, interp.value(lit.atom).negate())
        rules.append(ReductRule(rule.head, positive, floor))
    return ReductProgram(tuple(rules), program.universe)


def least_3v_model(reduct: ReductProgram) -> Interpretation:
    """Least three-valued model of a positive program, by increasing fixpoint from all-false."""
    atoms = sorted(reduct.universe, key=str)
    index = {atom: i for i, atom in enumerate(atoms)}
    vals = [_FALSE] * len(atoms)
    rules = [(index[r.head], tuple(index[a] for a in r.positive), int(r.floor))
             for r in reduct.rules]
    changed = True
    while changed:
        changed = False
        for head, pos, floor in rules:
            v = floor
            for p in pos:
                if vals[p] < v:
                    v = vals[p]
            if v > vals[head]:
                vals[head] = v
                changed = True
    return Interpretation(frozenset(atoms),
                          frozenset(a for a, v in zip(atoms, vals) if v == _TRUE),
                          frozenset(a for a, v in zip(atoms, vals) if v == _FALSE))


def _stable(idx: _Indexed, vals: list[int]) -> bool:
    floors = []
    for head, pos, neg in idx.rules:
        floor = _TRUE
        for n in neg:
            complement = 2 - vals[n]
            if complement < floor:
                floor = complement
        floors.append((head, pos, floor))
    least = [_FALSE] * len(vals)
    changed = True
    while changed:
        changed = False
        for head, pos, floor in floors:
            v = floor
            for p in pos:
                if least[p] < v:
                    v = least[p]
            if v > least[head]:
                least[head] = v
                changed = True
    return least == vals


def is_pstable(program: GroundProgram, interp: Interpretation) -> bool:
    """True when `interp` equals the least model of its own reduct."""
    idx = _Indexed(program, interp.universe)
    return _stable(idx, idx.values_of(interp))


# ---------------------------------------------------------------------------
# Model families
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ModelRecord:
    model: Interpretation
    flags: frozenset[str] = frozenset()

    @property
    def undefined_count(self) -> int:
        return self.model.undefined_count

    def has(self, flag: str) -> bool:
        return flag in self.flags


@dataclass(frozen=True)
class ModelFamily:
    records: tuple[ModelRecord, ...]

    def models(self) -> tuple[Interpretation, ...]:
        return tuple(r.model for r in self.records)

    def with_flag(self, flag: str) -> tuple[ModelRecord, ...]:
        return tuple(r for r in self.records if r.has(flag))

    def counts(self) -> dict[str, int]:
        out = {"models": len(self.records)}
        for flag in ALL_FLAGS:
            out[flag.replace("-", "_")] = len(self.with_flag(flag))
        return out


def enumerate_pstable(program: GroundProgram,
                      cap: int = DEFAULT_ENUMERATION_CAP) -> ModelFamily:
    """All partial stable models, as extensions of the well-founded model.

    Every partial stable model agrees with the well-founded model on its
    defined part, so only the undefined residue is enumerated (3^k candidates,
    refused above `cap` undefined atoms).
    """
    wf = well_founded(program)
    undefined = sorted(wf.undefined_atoms(), key=str)
    if len(undefined) > cap:
        raise ResourceLimitError(
            f"{len(undefined)} atoms undefined in the well-founded model "
            f"exceeds the enumeration cap of {cap}", cap)
    idx = _Indexed(program)
    base = idx.values_of(wf)
    slots = [idx.index[a] for a in undefined]
    models = []
    for combo in itertools.product((_FALSE, _UNDEF, _TRUE), repeat=len(slots)):
        vals = list(base)
        for slot, value in zip(slots, combo):
            vals[slot] = value
        if _stable(idx, vals):
            models.append(idx.to_interpretation(vals))
    models.sort(key=lambda m: m.render_key())
    if wf not in models:
        raise EngineError("well-founded model missing from the enumerated family")
    return ModelFamily(tuple(ModelRecord(m) for m in models))


def classify(program: GroundProgram, family: ModelFamily) -> ModelFamily:
    """Attach the model-class flags to an enumerated family."""
    models = family.models()
    if not models:
        raise EngineError("empty stable model family")
    literal_sets = [m.literal_set() for m in models]
    intersection = frozenset.intersection(*literal_sets)
    wf = well_founded(program)
    if intersection != wf.literal_set():
        raise EngineError("family intersection disagrees with the well-founded model")

    maximal = [not any(ls < other for other in literal_sets) for ls in literal_sets]
    least_undefined = min((m.undefined_count for m, is_max in zip(models, maximal) if is_max),
                          default=0)
    deterministic = [all(m.union_consistent(n) for n in models) for m in models]

    det_sets = [ls for ls, d in zip(literal_sets, deterministic) if d]
    max_det_ids = [i for i, (ls, d) in enumerate(zip(literal_sets, deterministic))
                   if d and all(other <= ls for other in det_sets)]
    if len(max_det_ids) != 1:
        raise EngineError("deterministic family has no unique maximum")

    records = []
    for i, model in enumerate(models):
        flags = set()
        if literal_sets[i] == intersection:
            flags.add(FLAG_WELL_FOUNDED)
        if model.is_total:
            flags.add(FLAG_T_STABLE)
        if maximal[i]:
            flags.add(FLAG_M_STABLE)
            if model.undefined_count == least_undefined:
                flags.add(FLAG_L_STABLE)
        if deterministic[i]:
            flags.add(FLAG_DETERMINISTIC)
        if i in max_det_ids:
            flags.add(FLAG_MAX_DETERMINISTIC)
        records.append(ModelRecord(model, frozenset(flags)))
    return ModelFamily(tuple(records))


def stable_family(program: GroundProgram,
                  cap: int = DEFAULT_ENUMERATION_CAP) -> ModelFamily:
    """Enumerate and classify in one step."""
    return classify(program, enumerate_pstable(program, cap))


def max_deterministic(program: GroundProgram,
                      cap: int = DEFAULT_ENUMERATION_CAP) -> Interpretation:
    """The top of the deterministic-model lattice."""
    family = stable_family(program, cap)
    (record,) = family.with_flag(FLAG_MAX_DETERMINISTIC)
    return record.model
