"""Formulas and canonical structures for the worked examples and the two-relation grid encoding"""
import itertools
import logging
from typing import Dict, Iterable, List, Optional, Tuple

import networkx as nx

from app.errors import MissingInitialTile
from app.models.formula import (
    EQUALITY, Atom, Exists, Forall, Formula, Implies, Not, Signature, Xor,
    conjoin, disjoin, negate,
)
from app.models.prefix import PrefixCheck, PrefixReport
from app.models.structure import Structure
from app.models.tiling import TilingSystem

logger = logging.getLogger(__name__)

Point = Tuple[int, int]


def _atom(signature: Signature, name: str) -> Atom:
    return Atom(signature.lookup(name))


def tile_name(tile: str) -> str:
    return f"tile_{tile}"


def example_formulas() -> Dict[str, Tuple[Signature, Formula]]:
    """The single-relation sentence with equality and the two-relation sentence without it"""
    sig1 = Signature.build({}, ["T1"], equality=True)
    t1 = _atom(sig1, "T1")
    phi1 = conjoin([Forall(Exists(t1)), Forall(Forall(Implies(t1, Not(_atom(sig1, EQUALITY)))))])

    sig2 = Signature.build({"p0": 1, "p1": 1, "p2": 1}, ["T1", "T2"], equality=False)
    p = [_atom(sig2, f"p{i}") for i in range(3)]
    either = disjoin([_atom(sig2, "T1"), _atom(sig2, "T2")])
    parts: List[Formula] = [
        Exists(p[0]),
        Forall(Xor(tuple(p))),
        Forall(Forall(negate(conjoin([_atom(sig2, "T1"), _atom(sig2, "T2")])))),
    ]
    for i in range(3):
        parts.append(Forall(Implies(p[i], conjoin([
            Exists(conjoin([p[(i + 1) % 3], negate(either)])),
            Forall(Implies(p[(i + 2) % 3], either)),
        ]))))
    return {"phi1": (sig1, phi1), "phi2": (sig2, conjoin(parts))}


def example2_prefix(n: int) -> Structure:
    """First n naturals with p_i by residue, T1 as 'a + 1 < b' and T2 as 'a > b'"""
    if n < 1:
        raise ValueError("the prefix needs at least one element")
    signature, _ = example_formulas()["phi2"]
    relations = {f"p{i}": [k for k in range(n) if k % 3 == i] for i in range(3)}
    relations["T1"] = [(a, b) for a in range(n) for b in range(n) if a + 1 < b]
    relations["T2"] = [(a, b) for a in range(n) for b in range(n) if a > b]
    return Structure.build(n, signature, relations)


# Two transitive relations with equality: 4x4 local addresses on the plane

def address_2T(i: int, j: int) -> str:
    return f"c{i % 4}{j % 4}"


def signature_2T(ts: Optional[TilingSystem] = None) -> Signature:
    ordinary = {address_2T(i, j): 1 for i in range(4) for j in range(4)}
    if ts is not None:
        ordinary.update({tile_name(t): 1 for t in ts.tiles})
    return Signature.build(ordinary, ["T1", "T2"], equality=True)


def _h(sig: Signature, i: int, j: int) -> Formula:
    colour = "T1" if i % 2 == 0 else "T2"
    return conjoin([_atom(sig, colour), _atom(sig, address_2T(i + 1, j))])


def _v(sig: Signature, i: int, j: int) -> Formula:
    colour = "T1" if j % 2 == 0 else "T2"
    return conjoin([_atom(sig, colour), _atom(sig, address_2T(i, j + 1))])


def grid_conjuncts_2T(sig: Signature) -> List[Formula]:
    c = lambda i, j: _atom(sig, address_2T(i, j))
    t1, t2, eq = _atom(sig, "T1"), _atom(sig, "T2"), _atom(sig, EQUALITY)
    either = disjoin([t1, t2])

    parts: List[Formula] = [
        Exists(c(0, 0)),
        Forall(Xor(tuple(c(i, j) for i in range(4) for j in range(4)))),
    ]
    for i, j in itertools.product(range(4), repeat=2):
        parts.append(Forall(Implies(c(i, j), Forall(Implies(conjoin([either, c(i, j)]), eq)))))

    def square(colour: Atom, i: int, j: int) -> Formula:
        corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1), (i, j)]
        return Forall(conjoin([
            Implies(c(*a), Exists(conjoin([colour, c(*b)]))) for a, b in zip(corners, corners[1:])
        ]))

    parts += [square(t1, i, j) for i in (0, 2) for j in (0, 2)]
    parts += [square(t2, i, j) for i in (1, 3) for j in (1, 3)]

    # red clique mates in the neighbouring blue blocks are blue-linked as well;
    # guarding on either relation would also catch the same address two blocks away
    def linked(source: Point, targets: Iterable[Point]) -> Formula:
        guard = conjoin([t2, disjoin([c(*t) for t in targets])])
        return Forall(Implies(c(*source), Forall(Implies(guard, t1))))

    parts += [linked((i, i), [(i, i - 1), (i - 1, i)]) for i in (0, 2)]
    parts += [linked((i, i), [(i, i + 1), (i + 1, i)]) for i in (1, 3)]
    parts += [linked((i, i + 1), [(i, i + 2), (i - 1, i + 1)]) for i in (0, 2)]
    # c_{i,i-1} shares its red clique with c_{i+1,i-1} and c_{i,i-2}, not with c_{i,i}
    parts += [linked((i, i - 1), [(i + 1, i - 1), (i, i - 2)]) for i in (1, 3)]
    return parts


def tile_conjuncts_2T(ts: TilingSystem, sig: Signature) -> List[Formula]:
    tiles = [_atom(sig, tile_name(t)) for t in ts.tiles]
    parts: List[Formula] = [
        Forall(conjoin([disjoin(tiles)] + [
            disjoin([negate(a), negate(b)]) for a, b in itertools.combinations(tiles, 2)
        ])),
        Exists(conjoin([_atom(sig, address_2T(0, 0)), _atom(sig, tile_name(ts.initial))])),
    ]
    for tile in ts.tiles:
        right = disjoin([_atom(sig, tile_name(t)) for t in ts.right_of(tile)])
        up = disjoin([_atom(sig, tile_name(t)) for t in ts.above(tile)])
        for i, j in itertools.product(range(4), repeat=2):
            parts.append(Forall(Implies(
                conjoin([_atom(sig, tile_name(tile)), _atom(sig, address_2T(i, j))]),
                Forall(conjoin([Implies(_h(sig, i, j), right), Implies(_v(sig, i, j), up)])),
            )))
    return parts


def phi_grid_2T() -> Tuple[Signature, Formula]:
    sig = signature_2T()
    return sig, conjoin(grid_conjuncts_2T(sig))


def encode_2T(ts: TilingSystem) -> Tuple[Signature, Formula]:
    """Grid axioms plus tile placement; satisfiable iff the system tiles the quadrant"""
    if ts.initial is None:
        raise MissingInitialTile("the two-relation encoding needs an initial tile")
    sig = signature_2T(ts)
    parts = grid_conjuncts_2T(sig) + tile_conjuncts_2T(ts, sig)
    logger.info("encoded %d tiles into %d conjuncts", len(ts.tiles), len(parts))
    return sig, conjoin(parts)


def conjunct_count_2T(tile_count: int) -> int:
    return 36 + 16 * tile_count


def _grid_structure(points: List[Point], wrap: Optional[int], tiling: Optional[Dict[Point, str]],
                    ts: Optional[TilingSystem]) -> Structure:
    index = {p: k for k, p in enumerate(points)}

    def norm(x: int, y: int) -> Optional[Point]:
        if wrap is not None:
            return x % wrap, y % wrap
        return (x, y) if (x, y) in index else None

    def block(p: Point, offset: int) -> Point:
        return (p[0] - offset) // 2, (p[1] - offset) // 2

    def members(corner: Point) -> List[int]:
        cells = (norm(corner[0] + dx, corner[1] + dy) for dx in (0, 1) for dy in (0, 1))
        return [index[q] for q in cells if q is not None]

    t1 = nx.DiGraph()
    t2 = nx.DiGraph()
    t1.add_nodes_from(range(len(points)))
    t2.add_nodes_from(range(len(points)))
    corners1 = {(2 * block(p, 0)[0], 2 * block(p, 0)[1]) for p in points}
    corners2 = {(2 * block(p, 1)[0] + 1, 2 * block(p, 1)[1] + 1) for p in points}
    for corner in corners1:
        group = members(corner)
        t1.add_edges_from(itertools.product(group, repeat=2))
    for corner in corners2:
        group = members(corner)
        t2.add_edges_from(itertools.product(group, repeat=2))
    # blue blocks form a checkerboard; even blocks reach their four neighbours, which
    # puts a blue arrow on every red clique edge between blocks of opposite parity
    for corner in corners1:
        if (corner[0] // 2 + corner[1] // 2) % 2:
            continue
        source = members(corner)
        for dx, dy in ((2, 0), (-2, 0), (0, 2), (0, -2)):
            anchor = norm(corner[0] + dx, corner[1] + dy)
            if anchor is None:
                continue
            t1.add_edges_from(itertools.product(source, members(anchor)))

    sig = signature_2T(ts)
    relations: Dict[str, list] = {address_2T(i, j): [] for i in range(4) for j in range(4)}
    for (x, y), k in index.items():
        relations[address_2T(x, y)].append(k)
    if tiling is not None:
        for tile in ts.tiles:
            relations[tile_name(tile)] = [index[p] for p, name in tiling.items() if name == tile]
    relations["T1"] = nx.transitive_closure(t1, reflexive=False).edges()
    relations["T2"] = nx.transitive_closure(t2, reflexive=False).edges()
    return Structure.build(len(points), sig, relations)


def grid_points(width: int, height: int) -> List[Point]:
    return [(x, y) for y in range(height) for x in range(width)]


def build_2T_grid(width: int, height: int, ts: Optional[TilingSystem] = None,
                  tiling: Optional[Dict[Point, str]] = None) -> Structure:
    """Finite window of the intended plane model; elements are numbered row by row"""
    if width < 4 or height < 4:
        raise ValueError("grid dimensions must be at least 4")
    return _grid_structure(grid_points(width, height), None, tiling, ts)


def build_2T_torus(m: int, ts: Optional[TilingSystem] = None,
                   tiling: Optional[Dict[Point, str]] = None) -> Structure:
    """Plane model folded onto a 4m x 4m torus"""
    if m < 1:
        raise ValueError("torus size must be positive")
    side = 4 * m
    return _grid_structure(grid_points(side, side), side, tiling, ts)


def uniform_tiling(points: Iterable[Point], tile: str) -> Dict[Point, str]:
    return {p: tile for p in points}


def grid2t_properties(s: Structure, width: int, height: int) -> PrefixReport:
    """Neighbour existence and square confluence, checked exhaustively on a row-major grid"""
    points = grid_points(width, height)
    sig = s.signature
    succ: Dict[str, Dict[int, set]] = {}
    for colour in ("T1", "T2"):
        table: Dict[int, set] = {k: set() for k in s.elements}
        for a, b in s.relation(colour):
            table[a].add(b)
        succ[colour] = table
    address = {k: (x % 4, y % 4) for k, (x, y) in enumerate(points)}

    def relation(kind: str, i: int, j: int) -> Dict[int, set]:
        if kind == "h":
            colour, target = ("T1" if i % 2 == 0 else "T2"), ((i + 1) % 4, j)
        else:
            colour, target = ("T1" if j % 2 == 0 else "T2"), (i, (j + 1) % 4)
        return {a: {b for b in succ[colour][a] if address[b] == target}
                for a in s.elements if address[a] == (i, j)}

    h = {(i, j): relation("h", i, j) for i in range(4) for j in range(4)}
    v = {(i, j): relation("v", i, j) for i in range(4) for j in range(4)}

    checks: List[PrefixCheck] = []
    missing = []
    for k, (x, y) in enumerate(points):
        if x + 1 >= width or y + 1 >= height:
            continue
        i, j = address[k]
        if not h[(i, j)][k] or not v[(i, j)][k]:
            missing.append((x, y))
    checks.append(PrefixCheck("propagate", "interior points", "failed" if missing else "ok",
                              f"no neighbour at {missing[:5]}" if missing else ""))

    broken = []
    applicable = 0
    for a in s.elements:
        i, j = address[a]
        for b in h[(i, j)][a]:
            for a2 in v[(i, j)][a]:
                for b2 in v[((i + 1) % 4, j)][b]:
                    applicable += 1
                    if b2 not in h[(i, (j + 1) % 4)][a2]:
                        broken.append((points[a], points[b], points[a2], points[b2]))
    checks.append(PrefixCheck("confluence", f"{applicable} quadruples", "failed" if broken else "ok",
                              f"not closed at {broken[:3]}" if broken else ""))
    return PrefixReport(tuple(checks))
