"""Core data model: terms, rules, programs, three-valued databases and interpretations.

All types are immutable values; they can be shared freely between threads.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Union


class AdlogError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(AdlogError):
    def __init__(self, message: str, origin: str = "<string>", line: int = 0, column: int = 0):
        super().__init__(f"{origin}:{line}:{column}: {message}")
        self.origin = origin
        self.line = line
        self.column = column


class ValidationError(AdlogError):
    """A program, database or delta violates a well-formedness condition."""


class SchemaError(AdlogError):
    """Predicate arities disagree between two objects that must share a schema."""


class UniverseError(AdlogError):
    """An atom was evaluated against an interpretation that does not know it."""


class ResourceLimitError(AdlogError):
    def __init__(self, message: str, cap: int):
        super().__init__(message)
        self.cap = cap


class PreconditionError(AdlogError):
    """An operation was invoked on inputs its semantics does not accept."""


class ConsistencyError(AdlogError):
    """An extracted update set contradicts itself; inside the engine this is a bug."""


class EngineError(AdlogError):
    """Internal invariant violation; always indicates a defect, never bad input."""


# ---------------------------------------------------------------------------
# Terms and atoms
# ---------------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class Constant:
    symbol: str

    def __str__(self) -> str:
        if self.symbol and (self.symbol[0].islower() or self.symbol[0].isdigit()) \
                and all(c.isalnum() or c == "_" for c in self.symbol):
            return self.symbol
        return f"'{self.symbol}'"


@dataclass(frozen=True, order=True)
class Variable:
    name: str

    def __str__(self) -> str:
        return self.name


Term = Union[Constant, Variable]


@dataclass(frozen=True, order=True)
class Atom:
    predicate: str
    args: tuple[Term, ...] = ()

    @property
    def arity(self) -> int:
        return len(self.args)

    def is_ground(self) -> bool:
        return all(isinstance(t, Constant) for t in self.args)

    def variables(self) -> set[Variable]:
        return {t for t in self.args if isinstance(t, Variable)}

    def constants(self) -> set[str]:
        return {t.symbol for t in self.args if isinstance(t, Constant)}

    def substitute(self, binding: Mapping[Variable, Constant]) -> "Atom":
        return Atom(self.predicate, tuple(binding.get(t, t) if isinstance(t, Variable) else t
                                          for t in self.args))

    def rename(self, rho: Mapping[str, str]) -> "Atom":
        return Atom(self.predicate, tuple(Constant(rho.get(t.symbol, t.symbol))
                                          if isinstance(t, Constant) else t
                                          for t in self.args))

    def __str__(self) -> str:
        if not self.args:
            return self.predicate
        return f"{self.predicate}({','.join(str(t) for t in self.args)})"


class Polarity(enum.Enum):
    INSERT = "+"
    DELETE = "-"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True, order=True)
class UpdateAtom:
    polarity: Polarity
    atom: Atom

    def is_ground(self) -> bool:
        return self.atom.is_ground()

    def __str__(self) -> str:
        return f"{self.polarity}{self.atom}"


# ---------------------------------------------------------------------------
# Literals and rules
# ---------------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class StdLiteral:
    atom: Atom
    positive: bool = True

    def negated(self) -> "StdLiteral":
        return StdLiteral(self.atom, not self.positive)

    def __str__(self) -> str:
        return str(self.atom) if self.positive else f"not {self.atom}"


@dataclass(frozen=True, order=True)
class UpdLiteral:
    uatom: UpdateAtom
    positive: bool = True

    def __str__(self) -> str:
        return str(self.uatom) if self.positive else f"not {self.uatom}"


@dataclass(frozen=True, order=True)
class BuiltinLiteral:
    op: str  # "=" or "!="
    left: Term
    right: Term

    def evaluate(self) -> bool:
        """Ground comparison by constant identity."""
        if not (isinstance(self.left, Constant) and isinstance(self.right, Constant)):
            raise EngineError(f"builtin {self} evaluated before grounding")
        same = self.left.symbol == self.right.symbol
        return same if self.op == "=" else not same

    def substitute(self, binding: Mapping[Variable, Constant]) -> "BuiltinLiteral":
        sub = lambda t: binding.get(t, t) if isinstance(t, Variable) else t
        return BuiltinLiteral(self.op, sub(self.left), sub(self.right))

    def __str__(self) -> str:
        return f"{self.left} {self.op} {self.right}"


Literal = Union[StdLiteral, UpdLiteral, BuiltinLiteral]
Head = Union[Atom, UpdateAtom]


@dataclass(frozen=True)
class Rule:
    head: Head
    body: tuple[Literal, ...] = ()
    origin: str | None = field(default=None, compare=False)

    @property
    def is_active(self) -> bool:
        return isinstance(self.head, UpdateAtom)

    def head_atom(self) -> Atom:
        return self.head.atom if isinstance(self.head, UpdateAtom) else self.head

    def variables(self) -> set[Variable]:
        out = self.head_atom().variables()
        for lit in self.body:
            if isinstance(lit, (StdLiteral, UpdLiteral)):
                atom = lit.atom if isinstance(lit, StdLiteral) else lit.uatom.atom
                out |= atom.variables()
            else:
                out |= {t for t in (lit.left, lit.right) if isinstance(t, Variable)}
        return out

    def is_ground(self) -> bool:
        return not self.variables()

    def __str__(self) -> str:
        if not self.body:
            return f"{self.head}."
        return f"{self.head} :- {', '.join(str(lit) for lit in self.body)}."


def _atoms_of_literal(lit: Literal) -> Iterator[Atom]:
    if isinstance(lit, StdLiteral):
        yield lit.atom
    elif isinstance(lit, UpdLiteral):
        yield lit.uatom.atom


# ---------------------------------------------------------------------------
# Programs
# ---------------------------------------------------------------------------

RESERVED_PREFIX = "@"


@dataclass(frozen=True, eq=False)
class Program:
    """A set of rules; insertion order is kept only for iteration."""

    rules: tuple[Rule, ...] = ()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Program):
            return NotImplemented
        return frozenset(self.rules) == frozenset(other.rules)

    def __hash__(self) -> int:
        return hash(frozenset(self.rules))

    @property
    def is_active(self) -> bool:
        return any(r.is_active for r in self.rules)

    def idb_predicates(self) -> set[str]:
        """Predicates defined by some deductive rule head."""
        return {r.head.predicate for r in self.rules if not r.is_active}

    def action_predicates(self) -> dict[str, int]:
        """Predicates appearing in active rule heads, with arities."""
        return {r.head.atom.predicate: r.head.atom.arity for r in self.rules if r.is_active}

    def predicate_arities(self) -> dict[str, int]:
        arities: dict[str, int] = {}
        for rule in self.rules:
            for atom in self._all_atoms(rule):
                _record_arity(arities, atom)
        return arities

    @staticmethod
    def _all_atoms(rule: Rule) -> Iterator[Atom]:
        yield rule.head_atom()
        for lit in rule.body:
            yield from _atoms_of_literal(lit)

    def constants(self) -> set[str]:
        out: set[str] = set()
        for rule in self.rules:
            for atom in self._all_atoms(rule):
                out |= atom.constants()
            for lit in rule.body:
                if isinstance(lit, BuiltinLiteral):
                    out |= {t.symbol for t in (lit.left, lit.right) if isinstance(t, Constant)}
        return out


def _record_arity(arities: dict[str, int], atom: Atom) -> None:
    seen = arities.setdefault(atom.predicate, atom.arity)
    if seen != atom.arity:
        raise ValidationError(
            f"predicate {atom.predicate} used with arity {atom.arity} and {seen}")


def validate_program(program: Program, *, allow_reserved: bool = False) -> None:
    """Check arity consistency, the reserved namespace, update-atom targets and safety.

    Safety here means safe negation: a variable occurring in a negative literal
    must also occur in a positive non-builtin body literal.  Variables occurring
    only in the head or in builtins are allowed and range over the active domain
    when the rule is grounded.
    """
    arities: dict[str, int] = {}
    idb = program.idb_predicates()
    for rule in program.rules:
        where = f" in rule '{rule}'" + (f" ({rule.origin})" if rule.origin else "")
        for atom in Program._all_atoms(rule):
            if not allow_reserved and atom.predicate.startswith(RESERVED_PREFIX):
                raise ValidationError(
                    f"reserved predicate name {atom.predicate}{where}")
            _record_arity(arities, atom)
        update_atoms = [rule.head] if rule.is_active else []
        update_atoms += [lit.uatom for lit in rule.body if isinstance(lit, UpdLiteral)]
        for uatom in update_atoms:
            if uatom.atom.predicate in idb:
                raise ValidationError(
                    f"update atom {uatom} targets derived predicate{where}")
        positive = set()
        for lit in rule.body:
            if isinstance(lit, StdLiteral) and lit.positive:
                positive |= lit.atom.variables()
            elif isinstance(lit, UpdLiteral) and lit.positive:
                positive |= lit.uatom.atom.variables()
        for lit in rule.body:
            if isinstance(lit, StdLiteral) and not lit.positive:
                loose = lit.atom.variables() - positive
            elif isinstance(lit, UpdLiteral) and not lit.positive:
                loose = lit.uatom.atom.variables() - positive
            else:
                continue
            if loose:
                name = sorted(v.name for v in loose)[0]
                raise ValidationError(
                    f"unsafe rule: variable {name} occurs under negation "
                    f"but in no positive body literal{where}")


# ---------------------------------------------------------------------------
# Databases and deltas
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Database:
    """Three-valued database: explicit true and unknown facts, false implicit."""

    true_facts: frozenset[Atom] = frozenset()
    unknown_facts: frozenset[Atom] = frozenset()

    def __post_init__(self) -> None:
        overlap = self.true_facts & self.unknown_facts
        if overlap:
            atom = sorted(str(a) for a in overlap)[0]
            raise ValidationError(f"fact {atom} is both true and unknown")
        for atom in self.true_facts | self.unknown_facts:
            if not atom.is_ground():
                raise ValidationError(f"database fact {atom} is not ground")
        self.predicate_arities()

    @staticmethod
    def of(true: Iterable[Atom] = (), unknown: Iterable[Atom] = ()) -> "Database":
        return Database(frozenset(true), frozenset(unknown))

    @property
    def is_total(self) -> bool:
        return not self.unknown_facts

    def predicate_arities(self) -> dict[str, int]:
        arities: dict[str, int] = {}
        for atom in self.true_facts | self.unknown_facts:
            _record_arity(arities, atom)
        return arities

    def constants(self) -> set[str]:
        out: set[str] = set()
        for atom in self.true_facts | self.unknown_facts:
            out |= atom.constants()
        return out

    def rename(self, rho: Mapping[str, str]) -> "Database":
        return Database(frozenset(a.rename(rho) for a in self.true_facts),
                        frozenset(a.rename(rho) for a in self.unknown_facts))


@dataclass(frozen=True)
class DeltaSet:
    """Ground input updates; conflict-free by construction."""

    updates: frozenset[UpdateAtom] = frozenset()

    def __post_init__(self) -> None:
        atoms = {}
        for u in self.updates:
            if not u.is_ground():
                raise ValidationError(f"update {u} is not ground")
            other = atoms.setdefault(u.atom, u.polarity)
            if other != u.polarity:
                raise ValidationError(f"conflicting updates +{u.atom} and -{u.atom}")

    @staticmethod
    def of(updates: Iterable[UpdateAtom]) -> "DeltaSet":
        return DeltaSet(frozenset(updates))

    def inserts(self) -> frozenset[Atom]:
        return frozenset(u.atom for u in self.updates if u.polarity is Polarity.INSERT)

    def deletes(self) -> frozenset[Atom]:
        return frozenset(u.atom for u in self.updates if u.polarity is Polarity.DELETE)

    def constants(self) -> set[str]:
        out: set[str] = set()
        for u in self.updates:
            out |= u.atom.constants()
        return out

    def rename(self, rho: Mapping[str, str]) -> "DeltaSet":
        return DeltaSet(frozenset(UpdateAtom(u.polarity, u.atom.rename(rho))
                                  for u in self.updates))


@dataclass(frozen=True)
class UpdateProgram:
    delta: DeltaSet
    program: Program


def validate_update_program(up: UpdateProgram) -> None:
    """Validate the program plus cross-checks between delta and program."""
    validate_program(up.program)
    arities = up.program.predicate_arities()
    idb = up.program.idb_predicates()
    for u in up.delta.updates:
        if u.atom.predicate.startswith(RESERVED_PREFIX):
            raise ValidationError(f"reserved predicate name in update {u}")
        if u.atom.predicate in idb:
            raise ValidationError(f"input update {u} targets derived predicate")
        _record_arity(arities, u.atom)


# ---------------------------------------------------------------------------
# Truth values and interpretations
# ---------------------------------------------------------------------------

class TruthValue(enum.IntEnum):
    FALSE = 0
    UNDEFINED = 1
    TRUE = 2

    def negate(self) -> "TruthValue":
        return TruthValue(2 - self.value)

    def __str__(self) -> str:
        return self.name.lower()


@dataclass(frozen=True)
class Interpretation:
    """Consistent three-valued assignment over a finite ground atom universe."""

    universe: frozenset[Atom]
    true_atoms: frozenset[Atom] = frozenset()
    false_atoms: frozenset[Atom] = frozenset()

    def __post_init__(self) -> None:
        if self.true_atoms & self.false_atoms:
            raise EngineError("interpretation assigns an atom both true and false")
        if not (self.true_atoms <= self.universe and self.false_atoms <= self.universe):
            raise UniverseError("literal set mentions atoms outside the universe")

    @staticmethod
    def empty(universe: Iterable[Atom]) -> "Interpretation":
        return Interpretation(frozenset(universe))

    def value(self, atom: Atom) -> TruthValue:
        if atom in self.true_atoms:
            return TruthValue.TRUE
        if atom in self.false_atoms:
            return TruthValue.FALSE
        if atom not in self.universe:
            raise UniverseError(f"atom {atom} outside interpretation universe")
        return TruthValue.UNDEFINED

    @property
    def is_total(self) -> bool:
        return len(self.true_atoms) + len(self.false_atoms) == len(self.universe)

    def undefined_atoms(self) -> frozenset[Atom]:
        return self.universe - self.true_atoms - self.false_atoms

    @property
    def undefined_count(self) -> int:
        return len(self.universe) - len(self.true_atoms) - len(self.false_atoms)

    def literal_set(self) -> frozenset[tuple[Atom, bool]]:
        """The set view {A | A true} as (atom, True) plus {not A | A false} as (atom, False)."""
        return frozenset((a, True) for a in self.true_atoms) | \
            frozenset((a, False) for a in self.false_atoms)

    def issubset(self, other: "Interpretation") -> bool:
        return self.true_atoms <= other.true_atoms and self.false_atoms <= other.false_atoms

    def union_consistent(self, other: "Interpretation") -> bool:
        return not (self.true_atoms & other.false_atoms or self.false_atoms & other.true_atoms)

    def render_key(self) -> str:
        """Deterministic rendering used for canonical model ordering."""
        parts = []
        for atom in sorted(self.universe, key=str):
            v = self.value(atom)
            if v is TruthValue.TRUE:
                parts.append(f"{atom}.")
            elif v is TruthValue.FALSE:
                parts.append(f"not {atom}.")
            else:
                parts.append(f"{atom}?")
        return " ".join(parts)


def eval_literal(lit: Literal, interp: Interpretation) -> TruthValue:
    """Truth value of a ground literal; negation flips true/false and fixes undefined."""
    if isinstance(lit, BuiltinLiteral):
        return TruthValue.TRUE if lit.evaluate() else TruthValue.FALSE
    if isinstance(lit, StdLiteral):
        value = interp.value(lit.atom)
        return value if lit.positive else value.negate()
    # Update literals read the renamed standard atom they stand for.
    from .rewrite import renamed_update_atom
    value = interp.value(renamed_update_atom(lit.uatom))
    return value if lit.positive else value.negate()


def rule_satisfied(rule: Rule, interp: Interpretation) -> bool:
    """A ground rule holds when the head value is at least the minimum body value."""
    body = min((eval_literal(lit, interp) for lit in rule.body), default=TruthValue.TRUE)
    if isinstance(rule.head, UpdateAtom):
        from .rewrite import renamed_update_atom
        head = interp.value(renamed_update_atom(rule.head))
    else:
        head = interp.value(rule.head)
    return head >= body


def is_model(program: Program, interp: Interpretation) -> bool:
    return all(rule_satisfied(rule, interp) for rule in program.rules)


# ---------------------------------------------------------------------------
# Knowledge ordering and genericity support
# ---------------------------------------------------------------------------

def info_leq(first: Database, second: Database) -> bool:
    """True when `second` is at least as informative: its unknown set is contained."""
    merged: dict[str, int] = {}
    for atom in first.true_facts | first.unknown_facts | second.true_facts | second.unknown_facts:
        try:
            _record_arity(merged, atom)
        except ValidationError as exc:
            raise SchemaError(str(exc)) from exc
    return second.unknown_facts <= first.unknown_facts


def check_renaming(rho: Mapping[str, str], vocabulary: Iterable[str]) -> None:
    """Reject maps that are not injective once extended with identity."""
    vocab = set(vocabulary)
    image = {rho.get(c, c) for c in vocab}
    if len(image) != len(vocab):
        raise ValidationError("constant renaming is not a bijection on the vocabulary")


def rename_constants(obj, rho: Mapping[str, str]):
    """Apply a constant renaming to a Program, Database or DeltaSet."""
    if isinstance(obj, Database):
        check_renaming(rho, obj.constants())
        return obj.rename(rho)
    if isinstance(obj, DeltaSet):
        check_renaming(rho, obj.constants())
        return obj.rename(rho)
    if isinstance(obj, Program):
        check_renaming(rho, obj.constants())
        return Program(tuple(_rename_rule(r, rho) for r in obj.rules))
    raise TypeError(f"cannot rename constants of {type(obj).__name__}")


def _rename_rule(rule: Rule, rho: Mapping[str, str]) -> Rule:
    if isinstance(rule.head, UpdateAtom):
        head: Head = UpdateAtom(rule.head.polarity, rule.head.atom.rename(rho))
    else:
        head = rule.head.rename(rho)
    body: list[Literal] = []
    for lit in rule.body:
        if isinstance(lit, StdLiteral):
            body.append(StdLiteral(lit.atom.rename(rho), lit.positive))
        elif isinstance(lit, UpdLiteral):
            body.append(UpdLiteral(UpdateAtom(lit.uatom.polarity, lit.uatom.atom.rename(rho)),
                                   lit.positive))
        else:
            sub = lambda t: Constant(rho.get(t.symbol, t.symbol)) if isinstance(t, Constant) else t
            body.append(BuiltinLiteral(lit.op, sub(lit.left), sub(lit.right)))
    return Rule(head, tuple(body), rule.origin)
