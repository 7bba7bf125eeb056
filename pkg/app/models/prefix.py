from __future__ import annotations

from dataclasses import dataclass
from typing import FrozenSet, Tuple

from app.models.structure import FlutedType, Structure


@dataclass(frozen=True, order=True)
class CellAddress:
    super_type: int
    copy: int

    def __str__(self):
        return f"({self.super_type},{self.copy})"


@dataclass(frozen=True)
class ElementTag:
    pi: FlutedType
    cell: CellAddress
    polarity: str

    def label(self) -> str:
        return f"a{self.polarity}{self.cell}"


@dataclass(frozen=True)
class SynthesizedPrefix:
    structure: Structure
    tags: Tuple[ElementTag, ...]
    depth: int
    cells: Tuple[CellAddress, ...]
    t1_edges: FrozenSet[Tuple[CellAddress, CellAddress]]
    t2_edges: FrozenSet[Tuple[CellAddress, CellAddress]]

    def to_dict(self) -> dict:
        doc = self.structure.to_dict()
        doc["tags"] = [
            {"element": a, "cell": [t.cell.super_type, t.cell.copy], "polarity": t.polarity, "type": t.pi.render()}
            for a, t in enumerate(self.tags)
        ]
        doc["depth"] = self.depth
        return doc


@dataclass(frozen=True)
class PrefixCheck:
    check: str
    subject: str
    verdict: str  # ok, failed or unchecked
    detail: str = ""


@dataclass(frozen=True)
class PrefixReport:
    checks: Tuple[PrefixCheck, ...]

    @property
    def ok(self) -> bool:
        return all(c.verdict != "failed" for c in self.checks)

    def failures(self) -> Tuple[PrefixCheck, ...]:
        return tuple(c for c in self.checks if c.verdict == "failed")

    def unchecked(self) -> Tuple[PrefixCheck, ...]:
        return tuple(c for c in self.checks if c.verdict == "unchecked")
