from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Mapping, Optional, Tuple

from app.models.structure import FlutedType


@dataclass(frozen=True)
class CliqueType:
    """Multiset of 1-types with counts truncated at 2"""
    counts: Tuple[Tuple[FlutedType, int], ...]

    def __post_init__(self):
        cleaned = {}
        for pi, count in self.counts:
            if count not in (0, 1, 2):
                raise ValueError(f"clique-type count must be 0, 1 or 2, got {count}")
            if count:
                cleaned[pi] = count
        if not cleaned:
            raise ValueError("a clique-type realizes at least one 1-type")
        object.__setattr__(self, "counts", tuple(sorted(cleaned.items())))

    @classmethod
    def of(cls, counts: Mapping[FlutedType, int]) -> "CliqueType":
        return cls(tuple((pi, min(c, 2)) for pi, c in counts.items()))

    def count(self, pi: FlutedType) -> int:
        return dict(self.counts).get(pi, 0)

    @property
    def support(self) -> FrozenSet[FlutedType]:
        return frozenset(pi for pi, _ in self.counts)

    def __contains__(self, pi: FlutedType) -> bool:
        return self.count(pi) > 0

    def is_soliton(self, t_hat: str) -> bool:
        return any(not pi.value(t_hat) for pi in self.support)


@dataclass(frozen=True)
class CliqueSuperType:
    xi: CliqueType
    pi: FrozenSet[FlutedType]

    def sort_key(self):
        return (self.xi.counts, tuple(sorted(self.pi)))


@dataclass(frozen=True)
class Certificate:
    omega: Tuple[CliqueSuperType, ...]
    ll: FrozenSet[Tuple[FlutedType, FlutedType]]
    v: FrozenSet[FlutedType]
    unary: Tuple[str, ...]
    transitive: str = "T"
    t_hat: str = "That"

    def __post_init__(self):
        object.__setattr__(self, "omega", tuple(sorted(set(self.omega), key=CliqueSuperType.sort_key)))

    def occurs(self, pi: FlutedType) -> bool:
        return any(pi in s.xi for s in self.omega)

    def types(self) -> List[FlutedType]:
        found = set(self.v)
        for s in self.omega:
            found |= s.xi.support | s.pi
        for a, b in self.ll:
            found |= {a, b}
        return sorted(found)

    def to_dict(self) -> dict:
        types = self.types()
        index = {pi: i for i, pi in enumerate(types)}
        return {
            "format": 1,
            "unary": list(self.unary),
            "transitive": self.transitive,
            "t_hat": self.t_hat,
            "types": [[name if positive else "!" + name for name, positive in pi.literals] for pi in types],
            "omega": [
                {"xi": {str(index[pi]): c for pi, c in s.xi.counts}, "pi": sorted(index[pi] for pi in s.pi)}
                for s in self.omega
            ],
            "ll": sorted([index[a], index[b]] for a, b in self.ll),
            "v": sorted(index[pi] for pi in self.v),
        }

    @classmethod
    def from_dict(cls, doc: Mapping) -> "Certificate":
        types = []
        for literals in doc["types"]:
            types.append(FlutedType.of(1, {l.lstrip("!"): not l.startswith("!") for l in literals}))
        omega = [
            CliqueSuperType(
                CliqueType.of({types[int(i)]: int(c) for i, c in entry["xi"].items()}),
                frozenset(types[i] for i in entry["pi"]),
            )
            for entry in doc["omega"]
        ]
        unary = doc.get("unary") or sorted({name for pi in types for name, _ in pi.literals})
        return cls(
            tuple(omega),
            frozenset((types[a], types[b]) for a, b in doc.get("ll", [])),
            frozenset(types[i] for i in doc.get("v", [])),
            tuple(unary),
            doc.get("transitive", "T"),
            doc.get("t_hat", "That"),
        )


@dataclass(frozen=True)
class ConditionReport:
    violations: Tuple[Tuple[str, str], ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def conditions(self) -> FrozenSet[str]:
        return frozenset(c for c, _ in self.violations)


class SearchStatus(str, enum.Enum):
    SAT = "sat"
    UNSAT_AT_CAP = "unsat_at_cap"
    BUDGET_EXHAUSTED = "budget_exhausted"


@dataclass
class SearchResult:
    status: SearchStatus
    certificate: Optional[Certificate] = None
    nodes: int = 0
    stats: Dict[str, int] = field(default_factory=dict)
