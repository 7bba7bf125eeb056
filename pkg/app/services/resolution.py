"""Maximal ordinary resolution over fluted clauses"""
import logging
from typing import Iterator, List, Mapping, Optional

from app.models.clauses import EMPTY_CLAUSE, Clause, ClauseSet, Literal
from app.models.formula import PredicateKind
from app.models.structure import FlutedType

logger = logging.getLogger(__name__)


def _resolvable(clause: Clause, lit: Literal) -> bool:
    return lit.pred.is_ordinary and lit.pred.arity == clause.arity


def mo_resolvents(g: Clause, d: Clause) -> Iterator[Clause]:
    """All maximal ordinary resolvents of g (positive side) and d (negative side); tautologies skipped"""
    for lit in sorted(g.literals):
        if not lit.positive or not _resolvable(g, lit):
            continue
        negative = lit.negated()
        if negative not in d.literals or not _resolvable(d, negative):
            continue
        resolvent = Clause.of((g.literals - {lit}) | (d.literals - {negative}))
        if resolvent is not None:
            yield resolvent


def mo_resolve(g: Clause, d: Clause, m: int = None) -> Optional[Clause]:
    return next(mo_resolvents(g, d), None)


def saturate(gamma: ClauseSet) -> ClauseSet:
    """Close under mo-resolution; stops early once the empty clause appears"""
    known = set(gamma.clauses)
    if EMPTY_CLAUSE in known:
        return ClauseSet(gamma.m, frozenset(known))
    pending: List[Clause] = sorted(known, key=str)
    while pending:
        clause = pending.pop()
        for other in list(known):
            for g, d in ((clause, other), (other, clause)):
                for resolvent in mo_resolvents(g, d):
                    if resolvent in known:
                        continue
                    known.add(resolvent)
                    if resolvent.is_empty:
                        logger.debug("saturation derived the empty clause")
                        return ClauseSet(gamma.m, frozenset(known))
                    pending.append(resolvent)
    return ClauseSet(gamma.m, frozenset(known))


def restrict(gstar: ClauseSet) -> ClauseSet:
    """Drop every clause mentioning an ordinary predicate of the full arity m"""
    kept = [c for c in gstar.clauses if not c.ordinary_at(gstar.m)]
    return ClauseSet(gstar.m, frozenset(kept))


def _value(lit: Literal, values: Mapping[str, bool]) -> Optional[bool]:
    value = values.get(lit.pred.name)
    if value is None:
        return None
    return value == lit.positive


def violates(clause: Clause, values: Mapping[str, bool]) -> bool:
    """True when every literal of the clause is assigned and false"""
    return all(_value(lit, values) is False for lit in clause.literals)


def extend_type(gamma: ClauseSet, tau: FlutedType) -> Optional[FlutedType]:
    """Extend tau by the ordinary arity-m predicates of gamma so no clause of gamma is violated"""
    values = tau.as_dict()
    if any(violates(c, values) for c in restrict(saturate(gamma)).clauses):
        return None
    missing = sorted(
        {l.pred for c in gamma.clauses for l in c.literals
         if l.pred.name not in values and l.pred.kind != PredicateKind.EQUALITY},
        key=lambda p: (p.arity, p.name),
    )
    clauses = list(gamma.clauses)

    def search(index: int) -> bool:
        if any(violates(c, values) for c in clauses):
            return False
        if index == len(missing):
            return True
        for choice in (True, False):
            values[missing[index].name] = choice
            if search(index + 1):
                return True
        del values[missing[index].name]
        return False

    if not search(0):
        return None
    return FlutedType.of(tau.arity, values)
