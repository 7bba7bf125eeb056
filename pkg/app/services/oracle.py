"""Exhaustive finite model search and model checking.

The search assigns ground atoms element by element: first the nullary atoms,
then for each element k its unary atoms followed by every tuple whose largest
element is k. Partial assignments are pruned with Kleene evaluation of the
whole sentence. Transitive relations stay closed under the true edges decided
so far, so a decision that forces an edge already decided false fails at once.
"""
import itertools
import logging
from typing import Dict, List, Optional, Tuple

from app import config
from app.errors import BoundExceeded, UnknownPredicate
from app.models.formula import Formula, Predicate, PredicateKind, Signature, predicates_of
from app.models.structure import Structure
from app.services.semantics import check_wellformed, close_transitive, eval_formula, evaluate_partial

logger = logging.getLogger(__name__)

AT_MOST = "at_most"
EXACTLY = "exactly"

Ground = Tuple[str, Tuple[int, ...]]


def formula_signature(formula: Formula) -> Signature:
    preds = set(predicates_of(formula))
    transitive = [p for p in preds if p.kind == PredicateKind.TRANSITIVE]
    if len(transitive) == 1 and not any(p.kind == PredicateKind.T_HAT for p in preds):
        preds.add(Predicate(f"{transitive[0].name}hat", 1, PredicateKind.T_HAT))
    return Signature(tuple(preds))


class _ModelSearch:
    def __init__(self, formula: Formula, signature: Signature, size: int):
        self.formula = formula
        self.signature = signature
        self.size = size
        self.transitive = {p.name for p in signature.transitive}
        t_hat = signature.t_hat
        self.t_hat = t_hat.name if t_hat is not None and len(self.transitive) == 1 else None
        self.t_name = next(iter(self.transitive)) if self.t_hat else None
        self.values: Dict[Ground, bool] = {}
        self.trail: List[Ground] = []
        self.unary = [p for p in signature.unary if p.name != self.t_hat]
        self.order = self._order()
        self.nodes = 0

    def _order(self) -> List[Ground]:
        searched = [p for p in self.signature if p.kind != PredicateKind.EQUALITY and p.name != self.t_hat]
        order: List[Ground] = [(p.name, ()) for p in searched if p.arity == 0]
        for k in range(self.size):
            order += [(p.name, (k,)) for p in self.unary]
            for p in searched:
                if p.arity < 2:
                    continue
                for t in itertools.product(range(k + 1), repeat=p.arity):
                    if max(t) == k:
                        order.append((p.name, t))
        return order

    def lookup(self, pred: Predicate, args: Tuple[int, ...]) -> Optional[bool]:
        if pred.name == self.t_hat:
            return self.values.get((self.t_name, (args[0], args[0])))
        return self.values.get((pred.name, args))

    def assign(self, atom: Ground, value: bool) -> bool:
        """Record a decision and its transitive consequences; False on conflict"""
        pending = [(atom, value)]
        while pending:
            (name, args), val = pending.pop()
            known = self.values.get((name, args))
            if known is not None:
                if known != val:
                    return False
                continue
            self.values[(name, args)] = val
            self.trail.append((name, args))
            if val and name in self.transitive:
                a, b = args
                before = [x for x in range(self.size) if self.values.get((name, (x, a)))] + [a]
                after = [y for y in range(self.size) if self.values.get((name, (b, y)))] + [b]
                pending.extend(((name, (x, y)), True) for x in before for y in after)
        return True

    def undo(self, mark: int):
        while len(self.trail) > mark:
            del self.values[self.trail.pop()]

    def unary_vector(self, element: int) -> Tuple[bool, ...]:
        return tuple(bool(self.values.get((p.name, (element,)))) for p in self.unary)

    def breaks_symmetry(self, atom: Ground) -> bool:
        """Elements must carry non-decreasing unary vectors"""
        name, args = atom
        if len(args) != 1 or not args[0] or not self.unary or name != self.unary[-1].name:
            return False
        return self.unary_vector(args[0] - 1) > self.unary_vector(args[0])

    def run(self, position: int = 0) -> bool:
        self.nodes += 1
        if evaluate_partial(self.formula, self.lookup, self.size) is False:
            return False
        if position == len(self.order):
            return True
        atom = self.order[position]
        if atom in self.values:
            return self.run(position + 1)
        for value in (False, True):
            mark = len(self.trail)
            if self.assign(atom, value) and not self.breaks_symmetry(atom) and self.run(position + 1):
                return True
            self.undo(mark)
        return False

    def structure(self) -> Structure:
        relations: Dict[str, list] = {p.name: [] for p in self.signature if p.kind != PredicateKind.EQUALITY}
        for (name, args), value in self.values.items():
            if value:
                relations[name].append(args)
        if self.t_hat:
            relations[self.t_hat] = [(a,) for a, b in relations[self.t_name] if a == b]
        return Structure.build(self.size, self.signature, relations)


def find_model(formula: Formula, size: int, mode: str = AT_MOST,
               signature: Optional[Signature] = None) -> Optional[Structure]:
    """Search for a well-formed model with the requested number of elements"""
    if mode not in (AT_MOST, EXACTLY):
        raise ValueError(f"unknown mode '{mode}'")
    if size > config.ORACLE_MAX_SIZE:
        raise BoundExceeded(f"oracle size {size} exceeds the bound {config.ORACLE_MAX_SIZE}")
    signature = signature or formula_signature(formula)
    sizes = range(1, size + 1) if mode == AT_MOST else [size]
    for n in sizes:
        engine = _ModelSearch(formula, signature, n)
        if len(engine.order) > config.ORACLE_MAX_ATOMS:
            raise BoundExceeded(f"{len(engine.order)} ground atoms at size {n} exceed {config.ORACLE_MAX_ATOMS}")
        found = engine.run()
        logger.debug("oracle explored %d nodes at size %d", engine.nodes, n)
        if found:
            model = engine.structure()
            logger.info("oracle found a model of size %d", n)
            return model
    logger.info("oracle found no model of size %s %d", "at most" if mode == AT_MOST else "exactly", size)
    return None


def check_model(s: Structure, formula: Formula) -> bool:
    if not check_wellformed(s).ok:
        return False
    return eval_formula(s, formula)


def prepare_model(s: Structure, formula: Formula, repair_closure: bool = False) -> Structure:
    """Make sure the model interprets every predicate of the formula, closing it on request"""
    for pred in sorted(predicates_of(formula)):
        if pred.kind != PredicateKind.EQUALITY and pred.name not in s.signature:
            raise UnknownPredicate(pred.name)
    return close_transitive(s) if repair_closure else s
