from __future__ import annotations

from dataclasses import dataclass
from typing import FrozenSet, Iterable, Iterator, Optional

from app.models.formula import FALSE, Formula, Predicate, PredicateKind, conjoin, disjoin, literal


@dataclass(frozen=True, order=True)
class Literal:
    pred: Predicate
    positive: bool = True

    def negated(self) -> "Literal":
        return Literal(self.pred, not self.positive)

    def to_formula(self) -> Formula:
        return literal(self.pred, self.positive)

    def __str__(self):
        return self.pred.name if self.positive else "!" + self.pred.name


@dataclass(frozen=True)
class Clause:
    """Disjunction of fluted literals read at a common depth"""
    literals: FrozenSet[Literal]

    @classmethod
    def of(cls, literals: Iterable[Literal]) -> Optional["Clause"]:
        """Build a clause, returning None for tautologies"""
        lits = frozenset(literals)
        if any(lit.negated() in lits for lit in lits):
            return None
        return cls(lits)

    @property
    def is_empty(self) -> bool:
        return not self.literals

    @property
    def arity(self) -> int:
        return max((lit.pred.arity for lit in self.literals), default=0)

    def ordinary_at(self, arity: int) -> FrozenSet[Literal]:
        return frozenset(l for l in self.literals if l.pred.is_ordinary and l.pred.arity == arity)

    def sorted_literals(self):
        return sorted(self.literals, key=lambda l: (l.pred.arity, l.pred.name, not l.positive))

    def to_formula(self) -> Formula:
        if not self.literals:
            return FALSE
        return disjoin(l.to_formula() for l in self.sorted_literals())

    def __str__(self):
        if not self.literals:
            return "false"
        return "(" + " | ".join(str(l) for l in self.sorted_literals()) + ")"


EMPTY_CLAUSE = Clause(frozenset())


@dataclass(frozen=True)
class ClauseSet:
    m: int
    clauses: FrozenSet[Clause]

    @classmethod
    def of(cls, m: int, clauses: Iterable[Clause]) -> "ClauseSet":
        return cls(m, frozenset(c for c in clauses if c is not None))

    def __iter__(self) -> Iterator[Clause]:
        return iter(sorted(self.clauses, key=str))

    def __len__(self):
        return len(self.clauses)

    @property
    def has_empty(self) -> bool:
        return EMPTY_CLAUSE in self.clauses

    def union(self, *others: "ClauseSet") -> "ClauseSet":
        merged = set(self.clauses)
        for other in others:
            merged |= other.clauses
        return ClauseSet(max([self.m] + [o.m for o in others]), frozenset(merged))

    def with_depth(self, m: int) -> "ClauseSet":
        return ClauseSet(m, self.clauses)

    def predicates(self) -> FrozenSet[Predicate]:
        return frozenset(l.pred for c in self.clauses for l in c.literals)

    def max_ordinary_arity(self) -> int:
        return max(
            (l.pred.arity for c in self.clauses for l in c.literals if l.pred.kind != PredicateKind.EQUALITY),
            default=0,
        )

    def to_formula(self) -> Formula:
        return conjoin(c.to_formula() for c in self)

    def __str__(self):
        return "{" + ", ".join(str(c) for c in self) + "}"
