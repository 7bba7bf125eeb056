"""Fluted formulas and their signatures.

Formulas are variable-free: an atom of arity k occurring under d quantifiers
reads the last k of the d variables bound so far.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, Mapping, Optional, Sequence, Tuple

from app.errors import UnknownPredicate

EQUALITY = "="


class PredicateKind(str, enum.Enum):
    ORDINARY = "ordinary"
    TRANSITIVE = "transitive"
    EQUALITY = "equality"
    T_HAT = "t_hat"


@dataclass(frozen=True, order=True)
class Predicate:
    name: str
    arity: int
    kind: PredicateKind = PredicateKind.ORDINARY

    @property
    def is_ordinary(self) -> bool:
        # T-hat is an ordinary unary predicate tied to the diagonal of T
        return self.kind in (PredicateKind.ORDINARY, PredicateKind.T_HAT)

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Signature:
    predicates: Tuple[Predicate, ...]
    _index: Dict[str, Predicate] = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        ordered = tuple(sorted(set(self.predicates), key=lambda p: (p.arity, p.name)))
        index: Dict[str, Predicate] = {}
        for pred in ordered:
            if pred.name in index:
                raise ValueError(f"predicate '{pred.name}' declared twice")
            if pred.kind in (PredicateKind.TRANSITIVE, PredicateKind.EQUALITY) and pred.arity != 2:
                raise ValueError(f"predicate '{pred.name}' must be binary")
            if pred.kind == PredicateKind.T_HAT and pred.arity != 1:
                raise ValueError(f"predicate '{pred.name}' must be unary")
            index[pred.name] = pred
        object.__setattr__(self, "predicates", ordered)
        object.__setattr__(self, "_index", index)

    @classmethod
    def build(
        cls,
        ordinary: Mapping[str, int] | Iterable[Tuple[str, int]] = (),
        transitive: Sequence[str] = (),
        equality: bool = True,
        t_hat: Optional[str] = None,
    ) -> "Signature":
        """Build a signature; with exactly one transitive symbol T its diagonal T-hat is added"""
        items = ordinary.items() if isinstance(ordinary, Mapping) else ordinary
        preds = [Predicate(name, arity) for name, arity in items]
        preds += [Predicate(name, 2, PredicateKind.TRANSITIVE) for name in transitive]
        if equality:
            preds.append(Predicate(EQUALITY, 2, PredicateKind.EQUALITY))
        if len(transitive) == 1:
            preds.append(Predicate(t_hat or f"{transitive[0]}hat", 1, PredicateKind.T_HAT))
        return cls(tuple(preds))

    def __iter__(self) -> Iterator[Predicate]:
        return iter(self.predicates)

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def lookup(self, name: str) -> Predicate:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownPredicate(name) from None

    def extend(self, *preds: Predicate) -> "Signature":
        return Signature(self.predicates + tuple(preds))

    def of_arity(self, arity: int) -> Tuple[Predicate, ...]:
        return tuple(p for p in self.predicates if p.arity == arity and p.kind != PredicateKind.EQUALITY)

    @property
    def transitive(self) -> Tuple[Predicate, ...]:
        return tuple(p for p in self.predicates if p.kind == PredicateKind.TRANSITIVE)

    @property
    def equality(self) -> Optional[Predicate]:
        return self._index.get(EQUALITY)

    @property
    def t_hat(self) -> Optional[Predicate]:
        for p in self.predicates:
            if p.kind == PredicateKind.T_HAT:
                return p
        return None

    @property
    def unary(self) -> Tuple[Predicate, ...]:
        return self.of_arity(1)

    @property
    def max_arity(self) -> int:
        return max((p.arity for p in self.predicates), default=0)

    def fresh_name(self, prefix: str, taken: Iterable[str] = ()) -> str:
        taken = set(taken)
        n = 1
        while f"{prefix}{n}" in self._index or f"{prefix}{n}" in taken:
            n += 1
        return f"{prefix}{n}"


class Formula:
    __slots__ = ()


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Bottom(Formula):
    pass


@dataclass(frozen=True)
class Atom(Formula):
    pred: Predicate


@dataclass(frozen=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True)
class And(Formula):
    parts: Tuple[Formula, ...]


@dataclass(frozen=True)
class Or(Formula):
    parts: Tuple[Formula, ...]


@dataclass(frozen=True)
class Xor(Formula):
    """Exactly one of the parts holds"""
    parts: Tuple[Formula, ...]


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Forall(Formula):
    body: Formula


@dataclass(frozen=True)
class Exists(Formula):
    body: Formula


TRUE = Top()
FALSE = Bottom()


def conjoin(parts: Iterable[Formula]) -> Formula:
    kept = []
    for part in parts:
        if isinstance(part, Bottom):
            return FALSE
        if isinstance(part, Top) or part in kept:
            continue
        kept.append(part)
    if not kept:
        return TRUE
    return kept[0] if len(kept) == 1 else And(tuple(kept))


def disjoin(parts: Iterable[Formula]) -> Formula:
    kept = []
    for part in parts:
        if isinstance(part, Top):
            return TRUE
        if isinstance(part, Bottom) or part in kept:
            continue
        kept.append(part)
    if not kept:
        return FALSE
    return kept[0] if len(kept) == 1 else Or(tuple(kept))


def negate(formula: Formula) -> Formula:
    if isinstance(formula, Top):
        return FALSE
    if isinstance(formula, Bottom):
        return TRUE
    if isinstance(formula, Not):
        return formula.body
    return Not(formula)


def literal(pred: Predicate, positive: bool = True) -> Formula:
    return Atom(pred) if positive else Not(Atom(pred))


def forall_n(body: Formula, count: int) -> Formula:
    for _ in range(count):
        body = Forall(body)
    return body


def children(formula: Formula) -> Tuple[Formula, ...]:
    if isinstance(formula, (And, Or, Xor)):
        return formula.parts
    if isinstance(formula, Implies):
        return (formula.left, formula.right)
    if isinstance(formula, (Not, Forall, Exists)):
        return (formula.body,)
    return ()


def predicates_of(formula: Formula) -> frozenset:
    found = set()
    stack = [formula]
    while stack:
        node = stack.pop()
        if isinstance(node, Atom):
            found.add(node.pred)
        stack.extend(children(node))
    return frozenset(found)


def is_quantifier_free(formula: Formula) -> bool:
    if isinstance(formula, (Forall, Exists)):
        return False
    return all(is_quantifier_free(c) for c in children(formula))
