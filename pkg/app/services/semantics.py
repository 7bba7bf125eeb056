"""Evaluation and structural analysis of finite structures"""
import itertools
import logging
from collections import defaultdict
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import networkx as nx

from app.errors import ArityExceedsContext, ContextTooShort, NotWellFormed, SignatureNotTwoVariable
from app.models.formula import (
    EQUALITY, And, Atom, Bottom, Exists, Forall, Formula, Implies, Not, Or,
    Predicate, PredicateKind, Top, Xor,
)
from app.models.structure import CliquePartition, FlutedType, KingReport, Structure, WellformednessReport
from app.services.syntax import validate

logger = logging.getLogger(__name__)

# Returns None when the atom is not yet decided
Lookup = Callable[[Predicate, Tuple[int, ...]], Optional[bool]]


def evaluate_partial(formula: Formula, lookup: Lookup, size: int, context: Tuple[int, ...] = ()) -> Optional[bool]:
    """Three-valued (Kleene) evaluation; total lookups give a definite answer"""
    if isinstance(formula, Atom):
        pred = formula.pred
        args = context[len(context) - pred.arity:] if pred.arity else ()
        if pred.kind == PredicateKind.EQUALITY:
            return args[0] == args[1]
        return lookup(pred, args)
    if isinstance(formula, Top):
        return True
    if isinstance(formula, Bottom):
        return False
    if isinstance(formula, Not):
        value = evaluate_partial(formula.body, lookup, size, context)
        return None if value is None else not value
    if isinstance(formula, And):
        result = True
        for part in formula.parts:
            value = evaluate_partial(part, lookup, size, context)
            if value is False:
                return False
            if value is None:
                result = None
        return result
    if isinstance(formula, Or):
        result = False
        for part in formula.parts:
            value = evaluate_partial(part, lookup, size, context)
            if value is True:
                return True
            if value is None:
                result = None
        return result
    if isinstance(formula, Implies):
        left = evaluate_partial(formula.left, lookup, size, context)
        if left is False:
            return True
        right = evaluate_partial(formula.right, lookup, size, context)
        if right is True:
            return True
        if left is True and right is False:
            return False
        return None
    if isinstance(formula, Xor):
        true_count = unknown = 0
        for part in formula.parts:
            value = evaluate_partial(part, lookup, size, context)
            if value is True:
                true_count += 1
                if true_count > 1:
                    return False
            elif value is None:
                unknown += 1
        if unknown:
            return None
        return true_count == 1
    if isinstance(formula, Forall):
        result = True
        for a in range(size):
            value = evaluate_partial(formula.body, lookup, size, context + (a,))
            if value is False:
                return False
            if value is None:
                result = None
        return result
    if isinstance(formula, Exists):
        result = False
        for a in range(size):
            value = evaluate_partial(formula.body, lookup, size, context + (a,))
            if value is True:
                return True
            if value is None:
                result = None
        return result
    raise TypeError(f"not a formula: {formula!r}")


def eval_formula(s: Structure, formula: Formula, context: Sequence[int] = ()) -> bool:
    """Truth of a fluted formula; atoms read the last elements of the context"""
    try:
        validate(formula, len(context))
    except ArityExceedsContext as exc:
        raise ContextTooShort(str(exc)) from exc
    return evaluate_partial(formula, s.holds, s.size, tuple(context))


def check_wellformed(s: Structure) -> WellformednessReport:
    violations = []
    for pred in s.signature.transitive:
        relation = s.relation(pred.name)
        successors = defaultdict(set)
        for a, b in relation:
            successors[a].add(b)
        for a, b in sorted(relation):
            for c in sorted(successors[b]):
                if (a, c) not in relation:
                    violations.append((pred.name, a, b, c))
    mismatches = []
    t_hat = s.signature.t_hat
    if t_hat is not None and len(s.signature.transitive) == 1:
        relation = s.relation(s.signature.transitive[0].name)
        marked = s.relation(t_hat.name)
        mismatches = [a for a in s.elements if ((a,) in marked) != ((a, a) in relation)]
    return WellformednessReport(tuple(violations), tuple(mismatches))


def close_transitive(s: Structure) -> Structure:
    """Replace every transitive relation by its transitive closure and resynchronise T-hat"""
    updates = {}
    for pred in s.signature.transitive:
        graph = nx.DiGraph()
        graph.add_nodes_from(s.elements)
        graph.add_edges_from(s.relation(pred.name))
        updates[pred.name] = nx.transitive_closure(graph, reflexive=False).edges()
    t_hat = s.signature.t_hat
    if t_hat is not None and len(s.signature.transitive) == 1:
        updates[t_hat.name] = [(a,) for a, b in updates[s.signature.transitive[0].name] if a == b]
    return s.with_relations(updates)


def fluted_type_of(s: Structure, elements: Sequence[int]) -> FlutedType:
    m = len(elements)
    values: Dict[str, bool] = {}
    for pred in s.signature:
        if pred.kind == PredicateKind.EQUALITY or pred.arity > m:
            continue
        values[pred.name] = s.holds(pred, tuple(elements[m - pred.arity:]))
    if m >= 2:
        values[EQUALITY] = elements[-2] == elements[-1]
    return FlutedType.of(m, values)


def realized_types(s: Structure, arity: int) -> frozenset:
    return frozenset(fluted_type_of(s, t) for t in itertools.product(s.elements, repeat=arity))


def _transitive_name(s: Structure, relation: Optional[str]) -> str:
    if relation is not None:
        return relation
    transitive = s.signature.transitive
    if len(transitive) != 1:
        raise NotWellFormed("structure must have exactly one distinguished transitive relation")
    return transitive[0].name


def cliques(s: Structure, relation: Optional[str] = None) -> CliquePartition:
    name = _transitive_name(s, relation)
    graph = nx.DiGraph()
    graph.add_nodes_from(s.elements)
    graph.add_edges_from(s.relation(name))
    blocks = sorted((frozenset(c) for c in nx.strongly_connected_components(graph)), key=min)
    flags = tuple(len(b) == 1 and (min(b), min(b)) not in s.relation(name) for b in blocks)
    return CliquePartition(tuple(blocks), flags)


def kings(s: Structure) -> KingReport:
    by_type = defaultdict(list)
    for a in s.elements:
        by_type[fluted_type_of(s, (a,))].append(a)
    royal = {t: members[0] for t, members in by_type.items() if len(members) == 1}
    return KingReport(frozenset(royal.values()), frozenset(royal))


def is_quadratic(s: Structure) -> bool:
    partition = cliques(s)
    types_in: List[frozenset] = [frozenset(fluted_type_of(s, (a,)) for a in block) for block in partition.blocks]
    occurs = defaultdict(set)
    for index, types in enumerate(types_in):
        for t in types:
            occurs[t].add(index)
    for index, types in enumerate(types_in):
        if any(occurs[t] == {index} for t in types):
            continue
        for first, second in itertools.combinations(sorted(types), 2):
            if occurs[first] & occurs[second] == {index}:
                logger.debug("clique %d is determined by %s and %s but unique for no type", index, first, second)
                return False
    return True


def inflate(s: Structure, copies: int) -> Structure:
    """Return the structure with `copies` disjoint copies of its non-king part.

    Pairs of distinct elements with different originals take the 2-type of
    their originals. Two copies of the same element a are related like a and
    a clique-mate of a when one exists, and otherwise like a and another
    element of the same 1-type to which a is not T-related from that side.
    """
    if copies < 1:
        raise ValueError("copies must be at least 1")
    if any(p.arity > 2 for p in s.signature):
        raise SignatureNotTwoVariable("inflation is defined for signatures of arity at most 2")
    t_name = _transitive_name(s, None)
    non_kings = sorted(set(s.elements) - kings(s).kings)
    if copies == 1 or not non_kings:
        return s

    origin = list(s.elements)
    for _ in range(2, copies + 1):
        origin.extend(non_kings)
    size = len(origin)

    t_relation = s.relation(t_name)
    partition = cliques(s, t_name)
    types = {a: fluted_type_of(s, (a,)) for a in s.elements}
    witness: Dict[int, Tuple[int, int]] = {}
    for a in non_kings:
        block = partition.blocks[partition.block_of(a)]
        mates = sorted(block - {a})
        if mates:
            witness[a] = (mates[0], a)
            continue
        twin = min(b for b in s.elements if b != a and types[b] == types[a])
        witness[a] = (twin, a) if (twin, a) not in t_relation else (a, twin)

    relations: Dict[str, set] = {}
    for pred in s.signature:
        if pred.kind == PredicateKind.EQUALITY:
            continue
        if pred.arity == 0:
            relations[pred.name] = set(s.relation(pred.name))
        elif pred.arity == 1:
            relations[pred.name] = {(x,) for x in range(size) if (origin[x],) in s.relation(pred.name)}
        else:
            tuples = set()
            for x in range(size):
                for y in range(size):
                    a, b = origin[x], origin[y]
                    if x != y and a == b:
                        pair = witness[a]
                    else:
                        pair = (a, b)
                    if pair in s.relation(pred.name):
                        tuples.add((x, y))
            relations[pred.name] = tuples
    logger.debug("inflated %d elements to %d", s.size, size)
    return Structure.build(size, s.signature, relations)
