from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from app import config
from app.models.basic import BasicSet
from app.models.certificate import Certificate, SearchStatus
from app.models.forms import NormalForm, SpreadNormalForm
from app.models.prefix import PrefixReport, SynthesizedPrefix
from app.models.structure import FlutedType


@dataclass
class SolveOptions:
    max_omega: int = field(default_factory=lambda: config.MAX_OMEGA)
    royal_cap: int = field(default_factory=lambda: config.ROYAL_CAP)
    depth: int = 4
    budget_seconds: float = field(default_factory=lambda: config.BUDGET_SECONDS)
    clique_width: int = field(default_factory=lambda: config.CLIQUE_WIDTH)
    literal_case3: bool = False

    def as_dict(self) -> dict:
        return {
            "max_omega": self.max_omega,
            "royal_cap": self.royal_cap,
            "depth": self.depth,
            "budget_seconds": self.budget_seconds,
            "clique_width": self.clique_width,
            "literal_case3": self.literal_case3,
        }


@dataclass
class SolveOutcome:
    status: SearchStatus
    normal_forms: List[NormalForm] = field(default_factory=list)
    nullary: Dict[str, bool] = field(default_factory=dict)
    royal: Tuple[FlutedType, ...] = ()
    spread: Optional[SpreadNormalForm] = None
    basic: Optional[BasicSet] = None
    quadratic: Optional[BasicSet] = None
    certificate: Optional[Certificate] = None
    prefix: Optional[SynthesizedPrefix] = None
    prefix_report: Optional[PrefixReport] = None
    guesses: int = 0
    nodes: int = 0

    @property
    def sat(self) -> bool:
        return self.status == SearchStatus.SAT
