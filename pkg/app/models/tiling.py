from __future__ import annotations

from dataclasses import dataclass
from typing import FrozenSet, Mapping, Optional, Tuple

from app.errors import InvalidDocument

Pair = Tuple[str, str]


@dataclass(frozen=True)
class TilingSystem:
    """Tiles with horizontal and vertical compatibility pairs and optional corner conditions"""
    tiles: Tuple[str, ...]
    h: FrozenSet[Pair]
    v: FrozenSet[Pair]
    initial: Optional[str] = None
    final: Optional[str] = None

    def __post_init__(self):
        known = set(self.tiles)
        if len(known) != len(self.tiles):
            raise InvalidDocument("tile names must be distinct")
        if not self.tiles:
            raise InvalidDocument("a tiling system needs at least one tile")
        for label, pairs in (("h", self.h), ("v", self.v)):
            for pair in pairs:
                if len(pair) != 2 or not set(pair) <= known:
                    raise InvalidDocument(f"{label} pair {list(pair)} uses an unknown tile")
        for label, tile in (("initial", self.initial), ("final", self.final)):
            if tile is not None and tile not in known:
                raise InvalidDocument(f"{label} tile '{tile}' is not among the tiles")

    @classmethod
    def from_dict(cls, doc: Mapping) -> "TilingSystem":
        try:
            return cls(
                tiles=tuple(str(t) for t in doc["tiles"]),
                h=frozenset(tuple(p) for p in doc.get("h", [])),
                v=frozenset(tuple(p) for p in doc.get("v", [])),
                initial=doc.get("initial"),
                final=doc.get("final"),
            )
        except (KeyError, TypeError) as exc:
            raise InvalidDocument(f"malformed tiling system: {exc}") from exc

    @classmethod
    def single(cls, tile: str = "c") -> "TilingSystem":
        """One self-compatible tile that is also the initial and final tile"""
        return cls((tile,), frozenset({(tile, tile)}), frozenset({(tile, tile)}), tile, tile)

    def to_dict(self) -> dict:
        return {
            "format": 1,
            "tiles": list(self.tiles),
            "h": sorted(list(p) for p in self.h),
            "v": sorted(list(p) for p in self.v),
            "initial": self.initial,
            "final": self.final,
        }

    def right_of(self, tile: str) -> Tuple[str, ...]:
        return tuple(t for t in self.tiles if (tile, t) in self.h)

    def left_of(self, tile: str) -> Tuple[str, ...]:
        return tuple(t for t in self.tiles if (t, tile) in self.h)

    def above(self, tile: str) -> Tuple[str, ...]:
        return tuple(t for t in self.tiles if (tile, t) in self.v)

    def below(self, tile: str) -> Tuple[str, ...]:
        return tuple(t for t in self.tiles if (t, tile) in self.v)


@dataclass(frozen=True)
class BoustrophedonState:
    t: int
    coords: Tuple[int, int]
    local_address: Tuple[str, int, int]
    controls: FrozenSet[str]

    @property
    def address(self) -> str:
        kind, i, j = self.local_address
        return f"{kind}{i}{j}"

    def to_dict(self) -> dict:
        return {
            "t": self.t,
            "coords": list(self.coords),
            "address": self.address,
            "controls": sorted(self.controls),
        }
