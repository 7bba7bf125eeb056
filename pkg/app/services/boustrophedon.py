"""Three transitive colours without equality: the boustrophedon encoding.

Elements are laid out along a snake path through the quarter plane. Points
strictly above the diagonal carry a local address c{i}{j}, the others d{i}{j},
with i, j the coordinates mod 6. Five control predicates mark the bottom row
(bt), the left column (lf), the diagonal (dg), the cells just above it (dgp)
and, in the finite variant, the rightmost column (rt). The colours T0, T1, T2
link consecutive steps and are propagated to neighbouring cells by the
transfer formulas.
"""
import itertools
import logging
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Sequence, Set, Tuple, Union

from app.errors import MissingTiles
from app.models.formula import (
    Atom, Exists, Forall, Formula, Implies, Predicate, PredicateKind, Signature, Xor,
    conjoin, disjoin, negate,
)
from app.models.prefix import PrefixCheck, PrefixReport
from app.models.structure import Structure
from app.models.tiling import BoustrophedonState, TilingSystem
from app.services.corpus import tile_name
from app.services.propositional import evaluate
from app.services.semantics import evaluate_partial

logger = logging.getLogger(__name__)

Point = Tuple[int, int]

COLOURS = ("T0", "T1", "T2")
CONTROLS = ("bt", "lf", "dg", "dgp")
RIGHT = "rt"

# colour families of the four generation rules that walk along a column or a row
COLUMN_UP = "column-up"
COLUMN_DOWN = "column-down"
ROW_LEFT = "row-left"
ROW_RIGHT = "row-right"
FAMILIES = (COLUMN_UP, COLUMN_DOWN, ROW_LEFT, ROW_RIGHT)


def mod6(i: int) -> int:
    return i % 6


def mod3(i: int) -> int:
    return i % 3


def colour_indices(family: str, k: int) -> Tuple[int, int]:
    """Primary and secondary colour of a column or row step from index k"""
    if family == COLUMN_UP:
        return mod3(k // 2), mod3((k + 1) // 2 + 1)
    if family == COLUMN_DOWN:
        return mod3(k // 2 + 1), mod3((k + 1) // 2 - 1)
    if family == ROW_LEFT:
        return mod3(k // 2 - 1), mod3((k + 1) // 2)
    if family == ROW_RIGHT:
        return mod3(k // 2 + 1), mod3((k + 1) // 2 - 1)
    raise ValueError(f"unknown colour family '{family}'")


def colour_table() -> Dict[str, Tuple[Tuple[int, int], ...]]:
    """Primary and secondary colour of each family, one row per index 0..5"""
    return {
        COLUMN_UP: ((0, 1), (0, 2), (1, 2), (1, 0), (2, 0), (2, 1)),
        COLUMN_DOWN: ((1, 2), (0, 2), (0, 1), (2, 1), (2, 0), (1, 0)),
        ROW_LEFT: ((2, 0), (1, 0), (1, 2), (0, 2), (0, 1), (2, 1)),
        ROW_RIGHT: ((1, 2), (1, 0), (2, 0), (2, 1), (0, 1), (0, 2)),
    }


def address(kind: str, i: int, j: int) -> str:
    return f"{kind}{mod6(i)}{mod6(j)}"


def addresses() -> List[str]:
    return [address(kind, i, j) for kind in "cd" for i in range(6) for j in range(6)]


def _unary(name: str) -> Atom:
    return Atom(Predicate(name, 1))


def _c(i: int, j: int) -> Atom:
    return _unary(address("c", i, j))


def _d(i: int, j: int) -> Atom:
    return _unary(address("d", i, j))


def _colour(k: int) -> Atom:
    return Atom(Predicate(COLOURS[mod3(k)], 2, PredicateKind.TRANSITIVE))


def _signed(name: str, positive: bool) -> Formula:
    return _unary(name) if positive else negate(_unary(name))


BT, LF, DG, DGP, RT = (_unary(n) for n in CONTROLS + (RIGHT,))
ANY_COLOUR = (0, 1, 2)


def signature_3T(ts: Optional[TilingSystem] = None, finite: bool = False) -> Signature:
    ordinary = {name: 1 for name in addresses()}
    ordinary.update({name: 1 for name in CONTROLS})
    if finite:
        ordinary[RIGHT] = 1
    if ts is not None:
        ordinary.update({tile_name(t): 1 for t in ts.tiles})
    return Signature.build(ordinary, list(COLOURS), equality=False)


@dataclass(frozen=True)
class UnaryRule:
    group: str
    name: str
    body: Formula

    def formula(self) -> Formula:
        return Forall(self.body)


@dataclass(frozen=True)
class InitialRule:
    group: str
    name: str
    body: Formula

    def formula(self) -> Formula:
        return Exists(self.body)


@dataclass(frozen=True)
class GenerationRule:
    """∀(source → ∃(target ∧ colours)): the next step of the snake"""
    group: str
    name: str
    source: Formula
    target: Formula
    colours: Tuple[int, ...]

    def witness(self) -> Formula:
        return conjoin([self.target] + [_colour(k) for k in self.colours])

    def formula(self) -> Formula:
        return Forall(Implies(self.source, Exists(self.witness())))


@dataclass(frozen=True)
class LinkRule:
    """∀(source → ∀(some colour ∧ target → conclusion))"""
    group: str
    name: str
    source: Formula
    colours: Tuple[int, ...]
    target: Formula
    conclusion: Formula

    def formula(self) -> Formula:
        guard = conjoin([disjoin([_colour(k) for k in self.colours]), self.target])
        return Forall(Implies(self.source, Forall(Implies(guard, self.conclusion))))


Rule = Union[UnaryRule, InitialRule, GenerationRule, LinkRule]

EVEN = (0, 2, 4)
ODD = (1, 3, 5)
SIX = range(6)


def _interaction_rules(finite: bool) -> List[Rule]:
    rules: List[Rule] = [
        UnaryRule("interaction", "bt", Implies(BT, disjoin([_d(i, 0) for i in SIX]))),
        UnaryRule("interaction", "lf", Implies(LF, disjoin([_c(0, j) for j in SIX]))),
        UnaryRule("interaction", "dg", Implies(DG, disjoin([_d(i, i) for i in SIX]))),
        UnaryRule("interaction", "dgp", Implies(DGP, disjoin([_c(j, j + 1) for j in SIX]))),
    ]
    if finite:
        # the rightmost column 2n-1 is odd
        rules.append(UnaryRule("interaction", "rt", Implies(RT, disjoin([_d(i, j) for i in ODD for j in SIX]))))
    return rules


def generation_rules(finite: bool = False) -> List[GenerationRule]:
    def rule(family: str, where: str, source, target, colours) -> GenerationRule:
        return GenerationRule("generation", f"{family} {where}", conjoin(source), conjoin(target), tuple(colours))

    rules = [rule("lift", "d00", [BT, DG], [_c(0, 1), DGP, LF], (1,))]
    for i in EVEN:
        for j in SIX:
            rules.append(rule(COLUMN_UP, address("d", i, j), [_d(i, j), negate(DG)],
                              [_d(i, j + 1), negate(BT)], colour_indices(COLUMN_UP, j)))
    for i in ODD:
        for j in SIX:
            rules.append(rule(COLUMN_DOWN, address("d", i, j), [_d(i, j), negate(BT)],
                              [_d(i, j - 1), negate(DG)], colour_indices(COLUMN_DOWN, j)))
    for i in ODD:
        source = [_d(i, 0), BT, negate(DG)] + ([negate(RT)] if finite else [])
        rules.append(rule("bottom-step", address("d", i, 0), source,
                          [_d(i + 1, 0), BT, negate(DG)], (0,)))
    for i in EVEN:
        rules.append(rule("diagonal-exit", address("d", i, i), [_d(i, i), negate(BT), DG],
                          [_c(i - 1, i), DGP, negate(LF)], (i // 2 - 1, i // 2)))
    for j in EVEN:
        for i in SIX:
            rules.append(rule(ROW_LEFT, address("c", i, j), [_c(i, j), negate(LF)],
                              [_c(i - 1, j), negate(DGP)], colour_indices(ROW_LEFT, i)))
    for j in ODD:
        for i in SIX:
            rules.append(rule(ROW_RIGHT, address("c", i, j), [_c(i, j), negate(DGP)],
                              [_c(i + 1, j), negate(LF)], colour_indices(ROW_RIGHT, i)))
    for j in EVEN:
        rules.append(rule("left-step", address("c", 0, j), [_c(0, j), LF],
                          [_c(0, j + 1), LF, negate(DGP)], (1,)))
    for j in ODD:
        rules.append(rule("diagonal-entry", address("c", j - 1, j), [_c(j - 1, j), DGP],
                          [_d(j, j), DG, negate(BT)], ((j + 1) // 2, (j + 3) // 2)))
    return [GenerationRule(r.group, r.name, r.source, r.target, tuple(mod3(k) for k in r.colours)) for r in rules]


def _transfer(where: str, source: Formula, target: Formula, before: int, after: int) -> LinkRule:
    return LinkRule("transfer", f"{where} T{mod3(before)}>T{mod3(after)}", source, (mod3(before),),
                    target, _colour(after))


def transfer_rules() -> List[LinkRule]:
    rules = []
    for i in ODD:
        for j in EVEN:
            rules.append(_transfer(address("d", i, j), _d(i, j), _d(i + 1, j), j // 2 - 1, j // 2))
    for i in EVEN:
        for j in ODD:
            rules.append(_transfer(address("d", i, j), _d(i, j), _d(i + 1, j), j // 2 - 1, j // 2 + 1))
    for i in EVEN:
        rules.append(_transfer(address("d", i, i), conjoin([_d(i, i), DG]), _c(i, i + 1), i // 2, i // 2 + 1))
    for i in ODD:
        rules.append(_transfer(address("d", i, i), conjoin([_d(i, i), DG]), _c(i, i + 1), i // 2, i // 2 - 1))
    for i in EVEN:
        for j in EVEN:
            rules.append(_transfer(address("c", i, j), _c(i, j), _c(i, j + 1), i // 2, i // 2 + 1))
    for i in ODD:
        for j in ODD:
            rules.append(_transfer(address("c", i, j), _c(i, j), _c(i, j + 1), i // 2, i // 2 - 1))
    return rules


def _control_pair(where: str, source: Formula, target: Formula, control: str) -> List[LinkRule]:
    return [
        LinkRule("control", f"{where} {'' if positive else 'not '}{control}",
                 conjoin([source, _signed(control, positive)]), ANY_COLOUR, target, _signed(control, positive))
        for positive in (True, False)
    ]


def control_rules(finite: bool = False) -> List[LinkRule]:
    rules = []
    for i in SIX:
        rules += _control_pair(address("d", i, i), _d(i, i), _d(i + 1, i + 1), "dg")
        rules += _control_pair(address("d", i, 0), _d(i, 0), _d(i + 1, 0), "bt")
        rules += _control_pair(address("c", i - 1, i), _c(i - 1, i), _c(i, i + 1), "dgp")
        rules += _control_pair(address("c", 0, i), _c(0, i), _c(0, i + 1), "lf")
    if finite:
        for i, j in itertools.product(SIX, SIX):
            rules += _control_pair(address("d", i, j), _d(i, j), _d(i, j - 1), RIGHT)
    return rules


def _tile(t: str) -> Atom:
    return _unary(tile_name(t))


def tile_rules(ts: TilingSystem, finite: bool = False) -> List[Rule]:
    tiles = [_tile(t) for t in ts.tiles]
    partition = conjoin(
        [disjoin(tiles)]
        + [negate(conjoin([a, b])) for a, b in itertools.combinations(tiles, 2)]
        + [Implies(conjoin([BT, DG]), _tile(ts.initial))]
    )
    rules: List[Rule] = [UnaryRule("tiles", "partition", partition)]

    def link(kind: str, tile: str, source: Formula, target: Formula, allowed: Sequence[str]) -> LinkRule:
        return LinkRule("tiles", f"{kind} {tile}", conjoin([_tile(tile), source]), ANY_COLOUR, target,
                        disjoin([_tile(t) for t in allowed]))

    for tile in ts.tiles:
        for i, j in itertools.product(SIX, SIX):
            either = disjoin([_c(i, j), _d(i, j)])
            rules.append(link("right", tile, _d(i, j), _d(i + 1, j), ts.right_of(tile)))
            rules.append(link("up", tile, either, _c(i, j + 1), ts.above(tile)))
            if j % 2:
                rules.append(link("right", tile, _c(i, j), disjoin([_c(i + 1, j), _d(i + 1, j)]), ts.right_of(tile)))
            else:
                rules.append(link("left", tile, either, _c(i - 1, j), ts.left_of(tile)))
            if i % 2 == 0:
                rules.append(link("up", tile, _d(i, j), _d(i, j + 1), ts.above(tile)))
            else:
                rules.append(link("down", tile, _d(i, j), _d(i, j - 1), ts.below(tile)))
    if finite:
        rules.append(UnaryRule("final", "final", Implies(conjoin([DG, RT]), _tile(ts.final))))
    return rules


def conjuncts_3T(ts: Optional[TilingSystem] = None, finite: bool = False) -> List[Rule]:
    start = [_d(0, 0), DG, BT] + ([negate(RT)] if finite else [])
    rules: List[Rule] = [UnaryRule("partition", "addresses", Xor(tuple(_unary(a) for a in addresses())))]
    rules += _interaction_rules(finite)
    rules.append(InitialRule("start", "d00", conjoin(start)))
    rules += generation_rules(finite)
    rules += transfer_rules()
    rules += control_rules(finite)
    if ts is not None:
        rules += tile_rules(ts, finite)
    return rules


def phi_grid_3T(finite: bool = False) -> Tuple[Signature, Formula]:
    return signature_3T(finite=finite), conjoin([r.formula() for r in conjuncts_3T(finite=finite)])


def encode_3T(ts: TilingSystem) -> Tuple[Signature, Formula]:
    """Sentence satisfiable iff the tiling system tiles the quarter plane"""
    if ts.initial is None:
        raise MissingTiles("the boustrophedon encoding needs an initial tile")
    rules = conjuncts_3T(ts)
    logger.info("emitted %d boustrophedon conjuncts for %d tiles", len(rules), len(ts.tiles))
    return signature_3T(ts), conjoin([r.formula() for r in rules])


def encode_3T_finite(ts: TilingSystem) -> Tuple[Signature, Formula]:
    """Sentence satisfiable iff the tiling system tiles some finite square from the initial to the final tile"""
    if ts.initial is None or ts.final is None:
        raise MissingTiles("the finite-square encoding needs both an initial and a final tile")
    rules = conjuncts_3T(ts, finite=True)
    logger.info("emitted %d finite-square conjuncts for %d tiles", len(rules), len(ts.tiles))
    return signature_3T(ts, finite=True), conjoin([r.formula() for r in rules])


def _path() -> Iterator[Point]:
    yield 0, 0
    n = 1
    while True:
        if n % 2:
            for x in range(n):
                yield x, n
            for y in range(n, -1, -1):
                yield n, y
        else:
            for y in range(n + 1):
                yield n, y
            for x in range(n - 1, -1, -1):
                yield x, n
        n += 1


def controls_at(x: int, y: int, rt_column: Optional[int] = None) -> frozenset:
    flags = set()
    if y == 0:
        flags.add("bt")
    if x == 0 and y > 0:
        flags.add("lf")
    if x == y:
        flags.add("dg")
    if y == x + 1:
        flags.add("dgp")
    if rt_column is not None and x == rt_column:
        flags.add(RIGHT)
    return frozenset(flags)


def boustrophedon(steps: int, rt_column: Optional[int] = None) -> List[BoustrophedonState]:
    """The first `steps` states of the snake path with their addresses and control flags"""
    if steps < 1:
        raise ValueError("the path needs at least one step")
    states = []
    for t, (x, y) in enumerate(itertools.islice(_path(), steps)):
        kind = "c" if x < y else "d"
        states.append(BoustrophedonState(t, (x, y), (kind, mod6(x), mod6(y)), controls_at(x, y, rt_column)))
    return states


def _facts(state: BoustrophedonState) -> Set[str]:
    return {state.address} | set(state.controls)


def _holds(formula: Formula, facts: Set[str]) -> bool:
    return bool(evaluate(formula, lambda pred: pred.name in facts))


def firing_rule(rules: Sequence[GenerationRule], facts: Set[str]) -> Optional[GenerationRule]:
    return next((r for r in rules if _holds(r.source, facts)), None)


class _ColourChase:
    """Per-colour transitive closure with transfer formulas applied to every new pair"""

    def __init__(self, size: int, transfers: Sequence[LinkRule], facts: Sequence[Set[str]]):
        self.succ = [[set() for _ in range(size)] for _ in COLOURS]
        self.pred = [[set() for _ in range(size)] for _ in COLOURS]
        self.by_colour: Dict[int, List[Tuple[Set[int], Set[int], int]]] = {k: [] for k in ANY_COLOUR}
        for rule in transfers:
            sources = {a for a in range(size) if _holds(rule.source, facts[a])}
            targets = {a for a in range(size) if _holds(rule.target, facts[a])}
            if sources and targets:
                after = COLOURS.index(rule.conclusion.pred.name)
                self.by_colour[rule.colours[0]].append((sources, targets, after))

    def add(self, colour: int, a: int, b: int):
        pending = [(colour, a, b)]
        while pending:
            k, a, b = pending.pop()
            if b in self.succ[k][a]:
                continue
            befores = self.pred[k][a] | {a}
            afters = self.succ[k][b] | {b}
            for x in befores:
                for y in afters:
                    if y in self.succ[k][x]:
                        continue
                    self.succ[k][x].add(y)
                    self.pred[k][y].add(x)
                    for sources, targets, after in self.by_colour[k]:
                        if x in sources and y in targets:
                            pending.append((after, x, y))

    def relation(self, colour: int) -> List[Tuple[int, int]]:
        return [(x, y) for x, ys in enumerate(self.succ[colour]) for y in ys]


def intended_3T_prefix(steps: int, rt_column: Optional[int] = None, ts: Optional[TilingSystem] = None,
                       tiling: Optional[Dict[Point, str]] = None) -> Structure:
    """The canonical model restricted to the first `steps` points of the snake path"""
    if rt_column is not None and (rt_column % 2 == 0 or steps > (rt_column + 1) ** 2):
        raise ValueError("the rightmost column must be odd and the path must stay inside its square")
    if tiling is not None and ts is None:
        raise ValueError("a tiling needs its tiling system")
    finite = rt_column is not None
    states = boustrophedon(steps, rt_column)
    facts = [_facts(s) for s in states]
    chase = _ColourChase(steps, transfer_rules(), facts)
    generation = generation_rules(finite)
    for t in range(steps - 1):
        rule = firing_rule(generation, facts[t])
        if rule is None or not _holds(rule.target, facts[t + 1]):
            raise RuntimeError(f"no generation rule leads from {states[t].coords} to {states[t + 1].coords}")
        for k in rule.colours:
            chase.add(k, t, t + 1)

    relations: Dict[str, list] = {name: [] for name in addresses() + list(CONTROLS)}
    if finite:
        relations[RIGHT] = []
    for s in states:
        relations[s.address].append(s.t)
        for flag in s.controls:
            relations[flag].append(s.t)
    if tiling is not None:
        for t in ts.tiles:
            relations[tile_name(t)] = [s.t for s in states if tiling.get(s.coords) == t]
    for k, name in enumerate(COLOURS):
        relations[name] = chase.relation(k)
    logger.debug("intended prefix of %d steps: %s", steps, {n: len(relations[n]) for n in COLOURS})
    return Structure.build(steps, signature_3T(ts, finite), relations)


def intended_3T_square(n: int, ts: Optional[TilingSystem] = None,
                       tiling: Optional[Dict[Point, str]] = None) -> Structure:
    """The whole 2n x 2n square of the finite variant"""
    if n < 1:
        raise ValueError("the square needs n >= 1")
    side = 2 * n
    return intended_3T_prefix(side * side, rt_column=side - 1, ts=ts, tiling=tiling)


def _successors(s: Structure, colours: Sequence[int]) -> Dict[int, Set[int]]:
    result: Dict[int, Set[int]] = {a: set() for a in s.elements}
    for k in colours:
        for a, b in s.relation(COLOURS[k]):
            result[a].add(b)
    return result


def _verdict(check: str, subject: str, failures: List[str], unchecked: List[str] = ()) -> PrefixCheck:
    if failures:
        return PrefixCheck(check, subject, "failed", "; ".join(failures[:5]))
    if unchecked:
        return PrefixCheck(check, subject, "unchecked", "; ".join(unchecked[:5]))
    return PrefixCheck(check, subject, "ok")


def check_rule(s: Structure, rule: Rule, successors: Optional[Dict[int, Set[int]]] = None) -> PrefixCheck:
    """Evaluate one conjunct on a prefix whose last element may lack its successor"""
    last = s.size - 1

    def true_at(formula: Formula, *context: int) -> bool:
        return evaluate_partial(formula, s.holds, s.size, context) is True

    if isinstance(rule, UnaryRule):
        return _verdict(rule.group, rule.name, [str(a) for a in s.elements if not true_at(rule.body, a)])
    if isinstance(rule, InitialRule):
        found = any(true_at(rule.body, a) for a in s.elements)
        return _verdict(rule.group, rule.name, [] if found else ["no element"])
    if isinstance(rule, GenerationRule):
        failures, open_ends = [], []
        for a in s.elements:
            if not true_at(rule.source, a):
                continue
            if not any(true_at(rule.witness(), a, b) for b in s.elements):
                (open_ends if a == last else failures).append(str(a))
        return _verdict(rule.group, rule.name, failures, open_ends)
    successors = successors if successors is not None else _successors(s, rule.colours)
    failures = [
        f"{a}->{b}"
        for a in s.elements if true_at(rule.source, a)
        for b in sorted(successors[a]) if true_at(rule.target, b) and not true_at(rule.conclusion, a, b)
    ]
    return _verdict(rule.group, rule.name, failures)


def check_prefix_3T(s: Structure, rules: Sequence[Rule]) -> PrefixReport:
    """Check every conjunct on a finite prefix of a boustrophedon model"""
    cache: Dict[Tuple[int, ...], Dict[int, Set[int]]] = {}
    checks = []
    for rule in rules:
        successors = None
        if isinstance(rule, LinkRule):
            successors = cache.setdefault(rule.colours, _successors(s, rule.colours))
        checks.append(check_rule(s, rule, successors))
    report = PrefixReport(tuple(checks))
    logger.info("checked %d conjuncts on %d elements: %d failed, %d unchecked",
                len(checks), s.size, len(report.failures()), len(report.unchecked()))
    return report


def neighbour_links(x: int, y: int) -> List[Tuple[Point, Point]]:
    """Pairs of grid neighbours that the intended model links by some colour"""
    if x >= y:
        links = [((x, y), (x + 1, y))]
        if x % 2 == 0:
            links.append(((x, y), (x, y + 1)))
        elif y + 1 <= x:
            links.append(((x, y + 1), (x, y)))
    else:
        links = [((x, y), (x, y + 1))]
        if y % 2 == 0:
            links.append(((x + 1, y), (x, y)))
        else:
            links.append(((x, y), (x + 1, y)))
    return links


def check_states(states: Sequence[BoustrophedonState], s: Structure) -> PrefixReport:
    """Addresses, control flags and colour links of a snake path against a structure"""
    index = {st.coords: st.t for st in states}
    names = addresses()
    flags = list(CONTROLS) + ([RIGHT] if RIGHT in s.signature else [])
    finite = RIGHT in flags
    generation = generation_rules(finite)
    linked = _successors(s, ANY_COLOUR)

    distinct = [] if len(index) == len(states) else ["repeated coordinates"]
    wrong_address, wrong_flags, broken_steps, broken_links = [], [], [], []
    for st in states:
        x, y = st.coords
        held = {n for n in names if (st.t,) in s.relation(n)}
        kind = "c" if x < y else "d"
        if held != {address(kind, x, y)} or st.address != address(kind, x, y):
            wrong_address.append(f"{st.t}@{st.coords}")
        present = {f for f in flags if (st.t,) in s.relation(f)}
        if present != set(st.controls):
            wrong_flags.append(f"{st.t}@{st.coords}")
        if st.t + 1 < len(states):
            rule = firing_rule(generation, present | held)
            if rule is None or any((st.t, st.t + 1) not in s.relation(COLOURS[k]) for k in rule.colours):
                broken_steps.append(f"{st.t}->{st.t + 1}")
        for p, q in neighbour_links(x, y):
            if p in index and q in index and index[q] not in linked[index[p]]:
                broken_links.append(f"{p}->{q}")
    return PrefixReport((
        _verdict("path", "distinct coordinates", distinct),
        _verdict("path", "local addresses", wrong_address),
        _verdict("path", "control flags", wrong_flags),
        _verdict("path", "consecutive colours", broken_steps),
        _verdict("path", "neighbour links", broken_links),
    ))
