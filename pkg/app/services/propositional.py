"""Propositional manipulation of quantifier-free fluted formulas"""
import itertools
from typing import Callable, Dict, FrozenSet, Iterable, List, Mapping, Optional, Set

from app.models.clauses import EMPTY_CLAUSE, Clause, ClauseSet, Literal
from app.models.formula import (
    FALSE, TRUE, And, Atom, Bottom, Exists, Forall, Formula, Implies, Not, Or,
    Predicate, Top, Xor, conjoin, disjoin, negate, predicates_of,
)
from app.models.structure import FlutedType

MAX_TRUTH_TABLE_ATOMS = 20


def nnf(formula: Formula, positive: bool = True) -> Formula:
    """Negation normal form over And/Or/Forall/Exists with Implies and Xor expanded"""
    if isinstance(formula, Top):
        return TRUE if positive else FALSE
    if isinstance(formula, Bottom):
        return FALSE if positive else TRUE
    if isinstance(formula, Atom):
        return formula if positive else Not(formula)
    if isinstance(formula, Not):
        return nnf(formula.body, not positive)
    if isinstance(formula, And):
        parts = [nnf(p, positive) for p in formula.parts]
        return conjoin(parts) if positive else disjoin(parts)
    if isinstance(formula, Or):
        parts = [nnf(p, positive) for p in formula.parts]
        return disjoin(parts) if positive else conjoin(parts)
    if isinstance(formula, Implies):
        return nnf(Or((Not(formula.left), formula.right)), positive)
    if isinstance(formula, Xor):
        parts = formula.parts
        some = disjoin(nnf(p) for p in parts)
        pairs = [conjoin((nnf(a), nnf(b))) for a, b in itertools.combinations(parts, 2)]
        if positive:
            # at least one and no two
            return conjoin([some] + [disjoin((nnf(a, False), nnf(b, False))) for a, b in itertools.combinations(parts, 2)])
        return disjoin([conjoin(nnf(p, False) for p in parts)] + pairs)
    if isinstance(formula, Forall):
        return Forall(nnf(formula.body)) if positive else Exists(nnf(formula.body, False))
    if isinstance(formula, Exists):
        return Exists(nnf(formula.body)) if positive else Forall(nnf(formula.body, False))
    raise TypeError(f"not a formula: {formula!r}")


def evaluate(formula: Formula, valuation: Callable[[Predicate], Optional[bool]]) -> Optional[bool]:
    """Kleene evaluation of a quantifier-free formula"""
    if isinstance(formula, Top):
        return True
    if isinstance(formula, Bottom):
        return False
    if isinstance(formula, Atom):
        return valuation(formula.pred)
    if isinstance(formula, Not):
        value = evaluate(formula.body, valuation)
        return None if value is None else not value
    if isinstance(formula, Implies):
        return evaluate(Or((Not(formula.left), formula.right)), valuation)
    if isinstance(formula, (And, Or)):
        stop = isinstance(formula, Or)
        result = not stop
        for part in formula.parts:
            value = evaluate(part, valuation)
            if value is stop:
                return stop
            if value is None:
                result = None
        return result
    if isinstance(formula, Xor):
        values = [evaluate(p, valuation) for p in formula.parts]
        if values.count(True) > 1:
            return False
        if None in values:
            return None
        return values.count(True) == 1
    raise ValueError("quantified formula in a propositional context")


def satisfies(fluted_type: FlutedType, formula: Formula) -> bool:
    """Truth of a quantifier-free formula under a fluted type; unassigned atoms are an error"""
    values = fluted_type.as_dict()

    def valuation(pred: Predicate) -> bool:
        return values[pred.name]

    return evaluate(formula, valuation)


def substitute(formula: Formula, values: Mapping[str, bool]) -> Formula:
    """Replace atoms named in `values` by constants and simplify"""
    if isinstance(formula, Atom):
        if formula.pred.name in values:
            return TRUE if values[formula.pred.name] else FALSE
        return formula
    if isinstance(formula, Not):
        return negate(substitute(formula.body, values))
    if isinstance(formula, And):
        return conjoin(substitute(p, values) for p in formula.parts)
    if isinstance(formula, Or):
        return disjoin(substitute(p, values) for p in formula.parts)
    if isinstance(formula, Implies):
        return disjoin((negate(substitute(formula.left, values)), substitute(formula.right, values)))
    if isinstance(formula, Xor):
        return substitute(nnf(formula), values)
    if isinstance(formula, Forall):
        return Forall(substitute(formula.body, values))
    if isinstance(formula, Exists):
        return Exists(substitute(formula.body, values))
    return formula


def rename_atoms(formula: Formula, mapping: Mapping[str, Formula]) -> Formula:
    """Replace atoms by formulas, e.g. T by its value under a control literal"""
    if isinstance(formula, Atom):
        return mapping.get(formula.pred.name, formula)
    if isinstance(formula, Not):
        return negate(rename_atoms(formula.body, mapping))
    if isinstance(formula, And):
        return conjoin(rename_atoms(p, mapping) for p in formula.parts)
    if isinstance(formula, Or):
        return disjoin(rename_atoms(p, mapping) for p in formula.parts)
    if isinstance(formula, Implies):
        return Implies(rename_atoms(formula.left, mapping), rename_atoms(formula.right, mapping))
    if isinstance(formula, Xor):
        return Xor(tuple(rename_atoms(p, mapping) for p in formula.parts))
    if isinstance(formula, (Forall, Exists)):
        return type(formula)(rename_atoms(formula.body, mapping))
    return formula


def _literal_of(formula: Formula) -> Optional[Literal]:
    if isinstance(formula, Atom):
        return Literal(formula.pred, True)
    if isinstance(formula, Not) and isinstance(formula.body, Atom):
        return Literal(formula.body.pred, False)
    return None


def _drop_subsumed(clauses: Iterable[Clause]) -> Set[Clause]:
    ordered = sorted(set(clauses), key=lambda c: len(c.literals))
    kept: List[Clause] = []
    for clause in ordered:
        if not any(k.literals <= clause.literals for k in kept):
            kept.append(clause)
    return set(kept)


def to_clauses(formula: Formula) -> FrozenSet[Clause]:
    """Conjunctive normal form of a quantifier-free formula as a set of clauses"""

    def cnf(node: Formula) -> Set[Clause]:
        if isinstance(node, Top):
            return set()
        if isinstance(node, Bottom):
            return {EMPTY_CLAUSE}
        lit = _literal_of(node)
        if lit is not None:
            return {Clause(frozenset([lit]))}
        if isinstance(node, And):
            result: Set[Clause] = set()
            for part in node.parts:
                result |= cnf(part)
            return _drop_subsumed(result)
        if isinstance(node, Or):
            result = {EMPTY_CLAUSE}
            for part in node.parts:
                product = set()
                for left in result:
                    for right in cnf(part):
                        merged = Clause.of(left.literals | right.literals)
                        if merged is not None:
                            product.add(merged)
                result = _drop_subsumed(product)
                if not result:
                    return set()
            return result
        raise ValueError(f"expected a quantifier-free formula, got {type(node).__name__}")

    return frozenset(cnf(nnf(formula)))


def to_clause_set(formula: Formula, m: int) -> ClauseSet:
    return ClauseSet(m, to_clauses(formula))


def simplify_clauses(clauses: Iterable[Clause], true_literals: Iterable[Literal]) -> Optional[FrozenSet[Clause]]:
    """Simplify under literals assumed true; None when a clause becomes empty"""
    truths = set(true_literals)
    falsities = {lit.negated() for lit in truths}
    result = set()
    for clause in clauses:
        if clause.literals & truths:
            continue
        reduced = clause.literals - falsities
        if not reduced:
            return None
        result.add(Clause(reduced))
    return frozenset(result)


def is_satisfiable(formula: Formula) -> bool:
    """Truth-table check of a quantifier-free formula"""
    atoms = sorted(predicates_of(formula), key=lambda p: p.name)
    if len(atoms) > MAX_TRUTH_TABLE_ATOMS:
        raise ValueError(f"too many atoms for a truth table: {len(atoms)}")
    for bits in itertools.product((False, True), repeat=len(atoms)):
        values: Dict[str, bool] = {p.name: b for p, b in zip(atoms, bits)}
        if evaluate(formula, lambda p: values[p.name]):
            return True
    return False


def type_formula(fluted_type: FlutedType, signature) -> Formula:
    """Conjunction of the literals of a type, resolved against a signature"""
    return conjoin(
        Atom(signature.lookup(name)) if positive else Not(Atom(signature.lookup(name)))
        for name, positive in fluted_type.literals
    )
