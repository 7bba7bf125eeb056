from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Tuple

from app.models.formula import (
    TRUE, Atom, Exists, Forall, Formula, Implies, Not, Or, Signature, conjoin,
)
from app.models.structure import FlutedType


class BasicKind(str, enum.Enum):
    B1 = "B1"  # forall (pi -> exists (mu & T & !=))
    B2 = "B2"  # forall (pi -> exists (mu & !T & !=))
    B3 = "B3"  # forall (pi -> forall (pi' -> T))
    B4 = "B4"  # forall (pi -> forall (pi' -> !T))
    B5 = "B5"  # forall (pi -> forall (pi -> (= | T)))
    B6 = "B6"  # forall (pi -> forall (pi -> (= | !T)))
    B7 = "B7"  # forall mu
    B8 = "B8"  # exists mu


@dataclass(frozen=True)
class BasicFormula:
    kind: BasicKind
    pi: Optional[FlutedType] = None
    pi2: Optional[FlutedType] = None
    mu: Optional[Formula] = None

    def __post_init__(self):
        needs_pi = self.kind not in (BasicKind.B7, BasicKind.B8)
        if needs_pi and self.pi is None:
            raise ValueError(f"{self.kind.value} needs a 1-type")
        if self.kind in (BasicKind.B3, BasicKind.B4):
            if self.pi2 is None or self.pi2 == self.pi:
                raise ValueError(f"{self.kind.value} needs two distinct 1-types")
        if self.kind in (BasicKind.B1, BasicKind.B2, BasicKind.B7, BasicKind.B8) and self.mu is None:
            object.__setattr__(self, "mu", TRUE)

    def to_formula(self, signature: Signature) -> Formula:
        t = Atom(signature.transitive[0])
        eq = Atom(signature.equality)
        kind = self.kind
        if kind == BasicKind.B7:
            return Forall(self.mu)
        if kind == BasicKind.B8:
            return Exists(self.mu)
        pi = _type_formula(self.pi, signature)
        if kind in (BasicKind.B1, BasicKind.B2):
            control = t if kind == BasicKind.B1 else Not(t)
            return Forall(Implies(pi, Exists(conjoin((self.mu, control, Not(eq))))))
        if kind in (BasicKind.B3, BasicKind.B4):
            target = t if kind == BasicKind.B3 else Not(t)
            return Forall(Implies(pi, Forall(Implies(_type_formula(self.pi2, signature), target))))
        target = t if kind == BasicKind.B5 else Not(t)
        return Forall(Implies(pi, Forall(Implies(pi, Or((eq, target))))))


@dataclass(frozen=True)
class BasicSet:
    formulas: Tuple[BasicFormula, ...]
    signature: Signature
    padding: Tuple[str, ...] = ()

    def __post_init__(self):
        seen = []
        for formula in self.formulas:
            if formula not in seen:
                seen.append(formula)
        object.__setattr__(self, "formulas", tuple(seen))

    def of_kind(self, *kinds: BasicKind) -> Tuple[BasicFormula, ...]:
        return tuple(f for f in self.formulas if f.kind in kinds)

    def __len__(self):
        return len(self.formulas)


def _type_formula(pi: FlutedType, signature: Signature) -> Formula:
    return conjoin(
        Atom(signature.lookup(name)) if positive else Not(Atom(signature.lookup(name)))
        for name, positive in pi.literals
    )
