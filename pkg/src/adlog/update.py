"""Applying derived updates to three-valued databases under selectable semantics.

A run rewrites the update program, embeds the database, grounds, computes the
model(s) the chosen semantics asks for, extracts the update literals from the
model and applies them.  The input delta is applied to the database first; the
derived updates second, so rule-derived deletions can override requested
insertions of the same fact.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass
from functools import cached_property

from .model import (AdlogError, Atom, ConsistencyError, Database, DeltaSet,
                    EngineError, Interpretation, Polarity, PreconditionError,
                    TruthValue, UpdateProgram, _record_arity, info_leq,
                    validate_update_program)
from .rewrite import (GroundProgram, base_atom_of_renamed, embed_database,
                      ground, rewrite_bm, rewrite_st)
from .stable import (DEFAULT_ENUMERATION_CAP, FLAG_M_STABLE,
                     FLAG_MAX_DETERMINISTIC, FLAG_T_STABLE, ModelFamily,
                     stable_family, well_founded)


class Semantics(enum.Enum):
    """The selectable update semantics."""

    WS = "ws"          # well-founded
    MD = "md"          # max-deterministic
    TWFS = "twfs"      # well-founded, restricted to total transformations
    TMDS = "tmds"      # max-deterministic, restricted to total transformations
    UTS = "uts"        # unique total stable model
    TS = "ts"          # chosen total stable model
    MS = "ms"          # chosen maximal stable model
    MSTT = "mstt"      # chosen maximal stable model with total transformation
    WS_BM = "ws-bm"    # well-founded over the complement-guarded rewriting

    @staticmethod
    def parse(text: str) -> "Semantics":
        normal = text.strip().lower().replace("_", "-")
        for sem in Semantics:
            if sem.value == normal:
                return sem
        raise ValueError(f"unknown semantics {text!r}")


TOTAL_ONLY = frozenset({Semantics.TWFS, Semantics.TMDS, Semantics.UTS,
                        Semantics.TS, Semantics.MS, Semantics.MSTT})
NONDETERMINISTIC = frozenset({Semantics.TS, Semantics.MS, Semantics.MSTT})

STATUS_APPLIED = "applied"
STATUS_REJECTED = "rejected-unchanged"


# ---------------------------------------------------------------------------
# Update outcomes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class UpdateOutcome:
    """Update literals of a model, split by polarity and certainty."""

    certain_insert: frozenset[Atom] = frozenset()
    certain_delete: frozenset[Atom] = frozenset()
    undef_insert: frozenset[Atom] = frozenset()
    undef_delete: frozenset[Atom] = frozenset()

    def __post_init__(self) -> None:
        if self.certain_insert & self.certain_delete:
            raise ConsistencyError("update set requests both +A and -A")
        if self.certain_insert & self.undef_delete:
            raise ConsistencyError("certain insertion with undefined deletion")
        if self.certain_delete & self.undef_insert:
            raise ConsistencyError("certain deletion with undefined insertion")
        if self.certain_insert & self.undef_insert or self.certain_delete & self.undef_delete:
            raise ConsistencyError("an update cannot be both certain and undefined")

    @property
    def is_empty(self) -> bool:
        return not (self.certain_insert or self.certain_delete
                    or self.undef_insert or self.undef_delete)

    def atoms(self) -> frozenset[Atom]:
        return self.certain_insert | self.certain_delete | self.undef_insert | self.undef_delete


def extract_updates(model: Interpretation, schema: frozenset[str] | None = None) -> UpdateOutcome:
    """Read the renamed update atoms out of a model; auxiliary atoms are ignored."""
    certain_insert, certain_delete, undef_insert, undef_delete = set(), set(), set(), set()
    for atom in model.universe:
        parsed = base_atom_of_renamed(atom)
        if parsed is None:
            continue
        polarity, base = parsed
        if schema is not None and base.predicate not in schema:
            raise EngineError(f"extracted update on unknown predicate {base.predicate}")
        value = model.value(atom)
        if value is TruthValue.TRUE:
            (certain_insert if polarity is Polarity.INSERT else certain_delete).add(base)
        elif value is TruthValue.UNDEFINED:
            (undef_insert if polarity is Polarity.INSERT else undef_delete).add(base)
    return UpdateOutcome(frozenset(certain_insert), frozenset(certain_delete),
                         frozenset(undef_insert), frozenset(undef_delete))


def apply_updates(outcome: UpdateOutcome, database: Database) -> Database:
    """New database state: certain updates applied, undefined ones blur facts they touch."""
    removed = outcome.certain_delete | outcome.undef_delete
    new_true = outcome.certain_insert | (database.true_facts - removed)
    certain = outcome.certain_insert | outcome.certain_delete
    new_unknown = (database.unknown_facts - certain) \
        | (database.true_facts & outcome.undef_delete) \
        | (outcome.undef_insert - database.true_facts - database.unknown_facts)
    return Database(frozenset(new_true), frozenset(new_unknown))


def apply_delta(delta: DeltaSet, database: Database) -> Database:
    """Input updates are certain: insertions and deletions, no undefined part."""
    outcome = UpdateOutcome(certain_insert=delta.inserts(), certain_delete=delta.deletes())
    return apply_updates(outcome, database)


def is_total_transformation(model: Interpretation, database: Database) -> bool:
    """Totality test of a transformation over a total database.

    Holds when the model is total, or every undefined insertion concerns a fact
    already true and every undefined deletion a fact already false.
    """
    if model.is_total:
        return True
    for atom in model.undefined_atoms():
        parsed = base_atom_of_renamed(atom)
        if parsed is None:
            continue
        polarity, base = parsed
        if polarity is Polarity.INSERT and base not in database.true_facts:
            return False
        if polarity is Polarity.DELETE and (base in database.true_facts
                                            or base in database.unknown_facts):
            return False
    return True


# ---------------------------------------------------------------------------
# Runs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RunReport:
    semantics: Semantics
    input_db: Database
    output_db: Database
    status: str
    chosen_model: Interpretation | None
    family_stats: dict[str, int] | None
    policy: str
    seed: int | None

    @property
    def applied(self) -> bool:
        return self.status == STATUS_APPLIED

    def to_json_dict(self) -> dict:
        def db_dict(db: Database) -> dict:
            return {"true": sorted(str(a) for a in db.true_facts),
                    "unknown": sorted(str(a) for a in db.unknown_facts)}
        return {
            "semantics": self.semantics.value,
            "status": self.status,
            "policy": self.policy,
            "seed": self.seed,
            "input": db_dict(self.input_db),
            "output": db_dict(self.output_db),
            "model": self.chosen_model.render_key() if self.chosen_model else None,
            "family": dict(self.family_stats) if self.family_stats is not None else None,
        }


class _Session:
    """Shared pipeline state so several semantics can reuse one grounding."""

    def __init__(self, up: UpdateProgram, database: Database, *,
                 cap: int = DEFAULT_ENUMERATION_CAP, prune: bool = True):
        validate_update_program(up)
        arities = up.program.predicate_arities()
        for uatom in up.delta.updates:
            _record_arity(arities, uatom.atom)
        for atom in database.true_facts | database.unknown_facts:
            _record_arity(arities, atom)
        idb = up.program.idb_predicates()
        self.schema = frozenset(p for p in arities if p not in idb and not p.startswith("@"))
        self.up = up
        self.database = database
        self.cap = cap
        self.prune = prune

    @cached_property
    def delta_applied(self) -> Database:
        return apply_delta(self.up.delta, self.database)

    @cached_property
    def st_ground(self) -> GroundProgram:
        return ground(embed_database(rewrite_st(self.up), self.database), prune=self.prune)

    @cached_property
    def bm_ground(self) -> GroundProgram:
        return ground(embed_database(rewrite_bm(self.up), self.database), prune=self.prune)

    @cached_property
    def st_wf(self) -> Interpretation:
        return well_founded(self.st_ground)

    @cached_property
    def bm_wf(self) -> Interpretation:
        return well_founded(self.bm_ground)

    @cached_property
    def st_family(self) -> ModelFamily:
        return stable_family(self.st_ground, self.cap)

    def apply_model(self, model: Interpretation, base: Database) -> Database:
        outcome = extract_updates(model, self.schema)
        output = apply_updates(outcome, base)
        if base.is_total and is_total_transformation(model, base) != output.is_total:
            raise EngineError("totality test disagrees with the applied database")
        return output

    def run(self, semantics: Semantics, policy: str = "lex",
            seed: int | None = None) -> RunReport:
        if semantics in TOTAL_ONLY and not self.database.is_total:
            raise PreconditionError(
                f"{semantics.value} semantics requires a total input database")
        if policy == "random" and seed is None:
            seed = random.randrange(2 ** 32)  # recorded below, for replay

        chosen: Interpretation | None = None
        stats: dict[str, int] | None = None
        status = STATUS_APPLIED
        output = self.database

        if semantics is Semantics.WS:
            chosen = self.st_wf
            output = self.apply_model(chosen, self.delta_applied)
        elif semantics is Semantics.WS_BM:
            chosen = self.bm_wf
            output = self.apply_model(chosen, self.database)
        elif semantics is Semantics.MD:
            family = self.st_family
            stats = family.counts()
            (record,) = family.with_flag(FLAG_MAX_DETERMINISTIC)
            chosen = record.model
            output = self.apply_model(chosen, self.delta_applied)
        elif semantics is Semantics.TWFS:
            chosen = self.st_wf
            candidate = self.apply_model(chosen, self.delta_applied)
            if candidate.is_total:
                output = candidate
            else:
                status = STATUS_REJECTED
        elif semantics is Semantics.TMDS:
            family = self.st_family
            stats = family.counts()
            (record,) = family.with_flag(FLAG_MAX_DETERMINISTIC)
            chosen = record.model
            candidate = self.apply_model(chosen, self.delta_applied)
            if candidate.is_total:
                output = candidate
            else:
                status = STATUS_REJECTED
        elif semantics is Semantics.UTS:
            family = self.st_family
            stats = family.counts()
            totals = family.with_flag(FLAG_T_STABLE)
            if len(totals) == 1:
                chosen = totals[0].model
                output = self.apply_model(chosen, self.delta_applied)
            else:
                status = STATUS_REJECTED
        elif semantics is Semantics.TS:
            family = self.st_family
            stats = family.counts()
            totals = family.with_flag(FLAG_T_STABLE)
            if totals:
                chosen = _select(totals, policy, seed)
                output = self.apply_model(chosen, self.delta_applied)
            else:
                status = STATUS_REJECTED
        elif semantics is Semantics.MS:
            family = self.st_family
            stats = family.counts()
            chosen = _select(family.with_flag(FLAG_M_STABLE), policy, seed)
            output = self.apply_model(chosen, self.delta_applied)
        elif semantics is Semantics.MSTT:
            family = self.st_family
            stats = family.counts()
            eligible = [r for r in family.with_flag(FLAG_M_STABLE)
                        if self.apply_model(r.model, self.delta_applied).is_total]
            if eligible:
                chosen = _select(eligible, policy, seed)
                output = self.apply_model(chosen, self.delta_applied)
            else:
                status = STATUS_REJECTED
        else:  # pragma: no cover
            raise EngineError(f"unhandled semantics {semantics}")

        if status == STATUS_REJECTED:
            output = self.database
        return RunReport(semantics, self.database, output, status, chosen, stats,
                         policy, seed if policy == "random" else None)


def _select(records, policy: str, seed: int | None) -> Interpretation:
    ordered = sorted(records, key=lambda r: r.model.render_key())
    if policy == "lex":
        return ordered[0].model
    if policy == "random":
        return random.Random(seed).choice(ordered).model
    raise ValueError(f"unknown selection policy {policy!r}")


def run(up: UpdateProgram, database: Database, semantics: Semantics,
        *, policy: str = "lex", seed: int | None = None,
        cap: int = DEFAULT_ENUMERATION_CAP, prune: bool = True) -> RunReport:
    """Apply an update program to a database under one semantics."""
    return _Session(up, database, cap=cap, prune=prune).run(semantics, policy, seed)


@dataclass(frozen=True)
class CompareRow:
    semantics: Semantics
    report: RunReport | None
    error: str | None


@dataclass(frozen=True)
class CompareResult:
    rows: tuple[CompareRow, ...]

    def report_of(self, semantics: Semantics) -> RunReport | None:
        for row in self.rows:
            if row.semantics is semantics:
                return row.report
        return None

    def info_matrix(self) -> dict[tuple[Semantics, Semantics], bool]:
        out = {}
        good = [(row.semantics, row.report.output_db)
                for row in self.rows if row.report is not None]
        for s1, d1 in good:
            for s2, d2 in good:
                out[(s1, s2)] = info_leq(d1, d2)
        return out


def compare(up: UpdateProgram, database: Database,
            *, cap: int = DEFAULT_ENUMERATION_CAP, prune: bool = True) -> CompareResult:
    """Run every semantics with the lexicographic policy, recording per-row errors."""
    session = _Session(up, database, cap=cap, prune=prune)
    rows = []
    for semantics in Semantics:
        try:
            rows.append(CompareRow(semantics, session.run(semantics), None))
        except AdlogError as exc:
            rows.append(CompareRow(semantics, None, str(exc)))
    return CompareResult(tuple(rows))
