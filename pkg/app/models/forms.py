"""Staged normal forms produced by the compilation pipeline"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Optional, Tuple

from app.models.clauses import ClauseSet, Literal
from app.models.formula import Formula, Signature


@dataclass(frozen=True, order=True)
class ControlFormula:
    """One of T & =, T & !=, !T & =, !T & !="""
    t_positive: bool
    equal: bool

    def literals(self, signature: Signature) -> Tuple[Literal, Literal]:
        return (
            Literal(signature.transitive[0], self.t_positive),
            Literal(signature.equality, self.equal),
        )

    def render(self) -> str:
        return f"{'' if self.t_positive else '!'}T & {'=' if self.equal else '!='}"


CONTROL_FORMULAS = (
    ControlFormula(True, True),
    ControlFormula(True, False),
    ControlFormula(False, True),
    ControlFormula(False, False),
)


@dataclass(frozen=True)
class ExistConjunct:
    mu: Formula
    kappa: ControlFormula
    gamma: ClauseSet


@dataclass(frozen=True)
class UnivConjunct:
    nu: Formula
    delta: ClauseSet


@dataclass(frozen=True)
class NormalForm:
    m: int
    signature: Signature
    exist: Tuple[ExistConjunct, ...]
    univ: Tuple[UnivConjunct, ...]
    omega: ClauseSet
    provenance: Dict[str, str] = field(default_factory=dict, compare=False, hash=False)


@dataclass(frozen=True)
class SpreadExist:
    mu: Formula
    marker: Optional[str]
    kappa: ControlFormula
    gamma: ClauseSet


@dataclass(frozen=True)
class SpreadNormalForm:
    signature: Signature
    lambdas: Tuple[Formula, ...]
    exist: Tuple[SpreadExist, ...]
    univ: Tuple[UnivConjunct, ...]
    omega: ClauseSet
    o_disjointness: Tuple[Tuple[str, str], ...]
    provenance: Dict[str, str] = field(default_factory=dict, compare=False, hash=False)


@dataclass(frozen=True)
class MinimalCover:
    """Cover of an index set none of whose proper subsets is a cover"""
    cells: Tuple[FrozenSet[int], ...]

    @property
    def union(self) -> FrozenSet[int]:
        return frozenset().union(*self.cells)

    def __len__(self):
        return len(self.cells)

    def __str__(self):
        return "[" + ", ".join("{" + ",".join(map(str, sorted(c))) + "}" for c in self.cells) + "]"
