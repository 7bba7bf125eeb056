from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Mapping, Optional, Tuple

from app.models.formula import Predicate, PredicateKind, Signature

Relation = FrozenSet[Tuple[int, ...]]


@dataclass(frozen=True)
class Structure:
    """Finite interpretation over elements 0..size-1.

    Equality is the identity and is never stored.
    """
    size: int
    signature: Signature
    relations: Tuple[Tuple[str, Relation], ...]
    _table: Dict[str, Relation] = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        table = {}
        for name, tuples in self.relations:
            table[name] = frozenset(tuple(t) for t in tuples)
        for pred in self.signature:
            if pred.kind != PredicateKind.EQUALITY:
                table.setdefault(pred.name, frozenset())
        object.__setattr__(self, "relations", tuple(sorted(table.items())))
        object.__setattr__(self, "_table", table)

    @classmethod
    def build(cls, size: int, signature: Signature, relations: Mapping[str, Iterable] = None) -> "Structure":
        """Build from a name to tuples mapping; unary relations may list bare elements"""
        table = {}
        for name, tuples in (relations or {}).items():
            pred = signature.lookup(name)
            table[name] = frozenset((t,) if isinstance(t, int) else tuple(t) for t in tuples)
            for t in table[name]:
                if len(t) != pred.arity or any(not 0 <= a < size for a in t):
                    raise ValueError(f"tuple {t} does not fit predicate '{name}' on {size} elements")
        return cls(size, signature, tuple(table.items()))

    @property
    def elements(self) -> range:
        return range(self.size)

    def relation(self, name: str) -> Relation:
        return self._table[name]

    def holds(self, pred: Predicate, args: Tuple[int, ...]) -> bool:
        if pred.kind == PredicateKind.EQUALITY:
            return args[0] == args[1]
        return args in self._table[pred.name]

    def with_relations(self, updates: Mapping[str, Iterable]) -> "Structure":
        table = dict(self._table)
        for name, tuples in updates.items():
            table[name] = frozenset(tuple(t) for t in tuples)
        return Structure(self.size, self.signature, tuple(table.items()))

    def restrict(self, keep: Iterable[int]) -> "Structure":
        """Induced substructure, renumbered in increasing order"""
        order = sorted(set(keep))
        renumber = {a: i for i, a in enumerate(order)}
        table = {
            name: [tuple(renumber[a] for a in t) for t in tuples if all(a in renumber for a in t)]
            for name, tuples in self._table.items()
        }
        return Structure.build(len(order), self.signature, table)

    def transitive_name(self) -> Optional[str]:
        transitive = self.signature.transitive
        return transitive[0].name if len(transitive) == 1 else None

    def to_dict(self) -> dict:
        doc = {"size": self.size, "unary": {}, "binary": {}, "transitive": [p.name for p in self.signature.transitive]}
        nullary, other = [], {}
        for pred in self.signature:
            if pred.kind == PredicateKind.EQUALITY:
                continue
            tuples = sorted(self._table[pred.name])
            if pred.arity == 0:
                if tuples:
                    nullary.append(pred.name)
            elif pred.arity == 1:
                doc["unary"][pred.name] = [t[0] for t in tuples]
            elif pred.arity == 2:
                doc["binary"][pred.name] = [list(t) for t in tuples]
            else:
                other[pred.name] = [list(t) for t in tuples]
        if nullary or any(p.arity == 0 for p in self.signature):
            doc["nullary"] = {p.name: p.name in nullary for p in self.signature.of_arity(0)}
        if other:
            doc["relations"] = other
        return doc

    @classmethod
    def from_dict(cls, doc: Mapping) -> "Structure":
        size = int(doc["size"])
        transitive = list(doc.get("transitive", []))
        ordinary: Dict[str, int] = {}
        relations: Dict[str, list] = {}
        for name, value in dict(doc.get("nullary", {})).items():
            ordinary[name] = 0
            relations[name] = [()] if value else []
        for name, members in dict(doc.get("unary", {})).items():
            ordinary[name] = 1
            relations[name] = [(a,) for a in members]
        for name, pairs in dict(doc.get("binary", {})).items():
            if name not in transitive:
                ordinary[name] = 2
            relations[name] = [tuple(p) for p in pairs]
        for name, tuples in dict(doc.get("relations", {})).items():
            ordinary[name] = len(tuples[0]) if tuples else int(doc.get("arities", {}).get(name, 3))
            relations[name] = [tuple(t) for t in tuples]
        t_hat = None
        if len(transitive) == 1:
            t_hat = f"{transitive[0]}hat"
            ordinary.pop(t_hat, None)
        signature = Signature.build(ordinary, transitive, equality=True, t_hat=t_hat)
        if t_hat is not None and t_hat not in relations:
            relations[t_hat] = [(a,) for a, b in relations.get(transitive[0], []) if a == b]
        return cls.build(size, signature, relations)


@dataclass(frozen=True, order=True)
class FlutedType:
    """Maximal consistent set of fluted literals; the equality literal is keyed by '='"""
    arity: int
    literals: Tuple[Tuple[str, bool], ...]

    @classmethod
    def of(cls, arity: int, values: Mapping[str, bool]) -> "FlutedType":
        return cls(arity, tuple(sorted(values.items())))

    def value(self, name: str) -> bool:
        for key, positive in self.literals:
            if key == name:
                return positive
        raise KeyError(name)

    def get(self, name: str) -> Optional[bool]:
        return dict(self.literals).get(name)

    def as_dict(self) -> Dict[str, bool]:
        return dict(self.literals)

    def replace(self, **values: bool) -> "FlutedType":
        merged = self.as_dict()
        merged.update(values)
        return FlutedType.of(self.arity, merged)

    def extend(self, values: Mapping[str, bool]) -> "FlutedType":
        merged = self.as_dict()
        merged.update(values)
        return FlutedType.of(self.arity, merged)

    def render(self) -> str:
        return "[" + ", ".join(name if positive else "!" + name for name, positive in self.literals) + "]"

    def __str__(self):
        return self.render()


@dataclass(frozen=True)
class CliquePartition:
    blocks: Tuple[FrozenSet[int], ...]
    soliton_flags: Tuple[bool, ...]

    def block_of(self, element: int) -> int:
        for index, block in enumerate(self.blocks):
            if element in block:
                return index
        raise KeyError(element)


@dataclass(frozen=True)
class WellformednessReport:
    transitivity_violations: Tuple[Tuple[str, int, int, int], ...] = ()
    t_hat_mismatches: Tuple[int, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.transitivity_violations and not self.t_hat_mismatches

    def describe(self) -> str:
        lines = [f"{name}: ({a},{b}) and ({b},{c}) but not ({a},{c})" for name, a, b, c in self.transitivity_violations]
        lines += [f"T-hat disagrees with the diagonal at {a}" for a in self.t_hat_mismatches]
        return "\n".join(lines) or "ok"


@dataclass(frozen=True)
class KingReport:
    kings: FrozenSet[int]
    royal_types: FrozenSet[FlutedType]
