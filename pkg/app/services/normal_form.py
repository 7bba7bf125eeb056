"""Normal form and spread normal form.

A sentence is compiled into conjuncts of three shapes, all read at depth m:

    forall^{m-1} (mu -> exists (kappa & Gamma))
    forall^{m-1} (nu -> forall Delta)
    forall^m Omega

Every quantified subformula is replaced by a fresh trigger predicate whose
arity is the depth at which it occurs.
"""
import itertools
import logging
from typing import Dict, Iterable, List, Mapping, Sequence, Set

from app.errors import ArityExceedsContext, NotASentence, NotWellFormed, SignatureNotTwoVariable, VariableBoundExceeded
from app.models.clauses import EMPTY_CLAUSE, Clause, ClauseSet, Literal
from app.models.formula import (
    TRUE, And, Atom, Bottom, Exists, Forall, Formula, Implies, Not, Or, Predicate,
    PredicateKind, Signature, Top, conjoin, disjoin, forall_n, is_quantifier_free, negate,
)
from app.models.forms import (
    CONTROL_FORMULAS, ControlFormula, ExistConjunct, NormalForm, SpreadExist,
    SpreadNormalForm, UnivConjunct,
)
from app.models.structure import FlutedType
from app.services.propositional import nnf, simplify_clauses, substitute, to_clauses, type_formula
from app.services.syntax import print_formula, validate

logger = logging.getLogger(__name__)


class Namer:
    """Hands out predicate names unused in a signature"""

    def __init__(self, signature: Signature):
        self.taken: Set[str] = {p.name for p in signature}
        self.created: List[Predicate] = []

    def fresh(self, prefix: str, arity: int, numbered: bool = True) -> Predicate:
        if numbered:
            n = 1
            while f"{prefix}{n}" in self.taken:
                n += 1
            name = f"{prefix}{n}"
        else:
            name = prefix
            while name in self.taken:
                name += "_"
        self.taken.add(name)
        pred = Predicate(name, arity)
        self.created.append(pred)
        return pred


def pipeline_signature(signature: Signature) -> Signature:
    """Make sure the signature has equality and exactly one transitive symbol with its diagonal"""
    transitive = signature.transitive
    if len(transitive) > 1:
        raise NotWellFormed("the decision pipeline handles one distinguished transitive relation")
    extra = []
    if signature.equality is None:
        extra.append(Predicate("=", 2, PredicateKind.EQUALITY))
    if not transitive:
        name = "T" if "T" not in signature else signature.fresh_name("T")
        extra.append(Predicate(name, 2, PredicateKind.TRANSITIVE))
        transitive = (extra[-1],)
    if signature.t_hat is None:
        hat = f"{transitive[0].name}hat"
        while hat in signature:
            hat += "_"
        extra.append(Predicate(hat, 1, PredicateKind.T_HAT))
    return signature.extend(*extra) if extra else signature


class NormalFormBuilder:
    def __init__(self, signature: Signature, m: int):
        self.signature = signature
        self.m = m
        self.namer = Namer(signature)
        self.exist: List[ExistConjunct] = []
        self.univ: List[UnivConjunct] = []
        self.omega: Set[Clause] = set()
        self.provenance: Dict[str, str] = {}

    def trigger(self, arity: int, source: Formula) -> Atom:
        pred = self.namer.fresh("s", arity)
        self.provenance[pred.name] = print_formula(source)
        return Atom(pred)

    def add_omega(self, formula: Formula):
        self.omega |= to_clauses(formula)

    def add_univ(self, guard: Formula, clauses: Iterable[Clause]):
        self.univ.append(UnivConjunct(guard, ClauseSet(self.m, frozenset(clauses))))

    def assert_(self, phi: Formula, depth: int, guard: Formula):
        """Emit conjuncts expressing forall^depth (guard -> phi)"""
        if isinstance(phi, Top):
            return
        if is_quantifier_free(phi):
            self.add_omega(disjoin((negate(guard), phi)))
            return
        if isinstance(phi, And):
            for part in phi.parts:
                self.assert_(part, depth, guard)
            return
        if isinstance(phi, Forall):
            if isinstance(guard, Top) and depth < self.m:
                self.assert_(phi.body, depth + 1, TRUE)
                return
            body = self.rename(phi.body, depth + 1)
            self.add_univ(guard, to_clauses(body))
            return
        if isinstance(phi, Exists):
            body = self.rename(phi.body, depth + 1)
            self.existential(guard, to_clauses(body))
            return
        if isinstance(phi, Or):
            plain = [p for p in phi.parts if is_quantifier_free(p)]
            quantified = [p for p in phi.parts if not is_quantifier_free(p)]
            if len(quantified) == 1:
                self.assert_(quantified[0], depth, conjoin([guard] + [negate(p) for p in plain]))
                return
            triggers = []
            for part in quantified:
                trigger = self.trigger(depth, part)
                self.assert_(part, depth, trigger)
                triggers.append(trigger)
            self.add_omega(disjoin([negate(guard)] + plain + triggers))
            return
        raise TypeError(f"unexpected node {type(phi).__name__} in negation normal form")

    def rename(self, phi: Formula, depth: int) -> Formula:
        """Replace maximal quantified subformulas by triggers of arity depth"""
        if isinstance(phi, (Forall, Exists)):
            trigger = self.trigger(depth, phi)
            self.assert_(phi, depth, trigger)
            return trigger
        if isinstance(phi, And):
            return conjoin(self.rename(p, depth) for p in phi.parts)
        if isinstance(phi, Or):
            return disjoin(self.rename(p, depth) for p in phi.parts)
        return phi

    def existential(self, guard: Formula, clauses: frozenset):
        cases = []
        for kappa in CONTROL_FORMULAS:
            simplified = simplify_clauses(clauses, kappa.literals(self.signature))
            if simplified is not None:
                cases.append((kappa, simplified))
        if not cases:
            self.add_univ(guard, [EMPTY_CLAUSE])
        elif len(cases) == 1:
            kappa, gamma = cases[0]
            self.exist.append(ExistConjunct(guard, kappa, ClauseSet(self.m, gamma)))
        else:
            triggers = []
            for kappa, gamma in cases:
                pred = self.namer.fresh("s", self.m - 1)
                self.provenance[pred.name] = f"control case {kappa.render()}"
                self.exist.append(ExistConjunct(Atom(pred), kappa, ClauseSet(self.m, gamma)))
                triggers.append(Atom(pred))
            self.add_univ(conjoin((guard, negate(disjoin(triggers)))), [EMPTY_CLAUSE])

    def result(self) -> NormalForm:
        return NormalForm(
            m=self.m,
            signature=self.signature.extend(*self.namer.created),
            exist=tuple(self.exist),
            univ=tuple(self.univ),
            omega=ClauseSet(self.m, frozenset(self.omega)),
            provenance=dict(self.provenance),
        )


def to_normal_form(formula: Formula, m: int, signature: Signature) -> NormalForm:
    """Compile a sentence into an equisatisfiable normal form at depth m"""
    if m < 2:
        raise VariableBoundExceeded("normal forms need at least two variables")
    try:
        bound = validate(formula, 0).variable_bound
    except ArityExceedsContext as exc:
        raise NotASentence(str(exc)) from exc
    if bound > m:
        raise VariableBoundExceeded(f"sentence needs {bound} variables but m = {m}")
    builder = NormalFormBuilder(pipeline_signature(signature), m)
    builder.assert_(nnf(formula), 0, TRUE)
    nf = builder.result()
    logger.debug("normal form: %d existential, %d universal conjuncts, %d omega clauses",
                 len(nf.exist), len(nf.univ), len(nf.omega))
    return nf


def control_formula(kappa: ControlFormula, signature: Signature) -> Formula:
    return conjoin(lit.to_formula() for lit in kappa.literals(signature))


def normal_form_conjuncts(nf: NormalForm) -> List[Formula]:
    conjuncts = []
    for e in nf.exist:
        body = conjoin((control_formula(e.kappa, nf.signature), e.gamma.to_formula()))
        conjuncts.append(forall_n(Implies(e.mu, Exists(body)), nf.m - 1))
    for u in nf.univ:
        conjuncts.append(forall_n(Implies(u.nu, Forall(u.delta.to_formula())), nf.m - 1))
    if nf.omega.clauses:
        conjuncts.append(forall_n(nf.omega.to_formula(), nf.m))
    return conjuncts


def normal_form_to_formula(nf: NormalForm) -> Formula:
    return conjoin(normal_form_conjuncts(nf))


def _assign_clauses(clauses: ClauseSet, values: Mapping[str, bool]) -> ClauseSet:
    result = set()
    for clause in clauses.clauses:
        kept = []
        satisfied = False
        for lit in clause.literals:
            if lit.pred.name in values:
                if values[lit.pred.name] == lit.positive:
                    satisfied = True
                    break
            else:
                kept.append(lit)
        if not satisfied:
            result.add(Clause(frozenset(kept)))
    return ClauseSet(clauses.m, frozenset(result))


def assign_nullary(nf: NormalForm, values: Mapping[str, bool]) -> NormalForm:
    """Fix the nullary predicates and drop them from the signature"""
    exist = []
    for e in nf.exist:
        mu = substitute(e.mu, values)
        if not isinstance(mu, Bottom):
            exist.append(ExistConjunct(mu, e.kappa, _assign_clauses(e.gamma, values)))
    univ = []
    for u in nf.univ:
        nu = substitute(u.nu, values)
        if not isinstance(nu, Bottom):
            univ.append(UnivConjunct(nu, _assign_clauses(u.delta, values)))
    signature = Signature(tuple(p for p in nf.signature if p.arity > 0 or p.name not in values))
    return NormalForm(nf.m, signature, tuple(exist), tuple(univ), _assign_clauses(nf.omega, values), nf.provenance)


def _pattern(bits: Sequence[Predicate], value: int) -> Formula:
    return conjoin(Atom(w) if (value >> b) & 1 else Not(Atom(w)) for b, w in enumerate(bits))


def to_spread(nf: NormalForm, royal: Sequence[FlutedType]) -> SpreadNormalForm:
    """Spread the existential demands of a two-variable normal form over the royal types.

    Each existential conjunct i whose witness is distinct from the element
    gets a marker o_i and its own block of bit predicates. Pattern 0 asks
    for a fresh witness marked o_i and pattern l routes the demand to the king
    of the l-th royal type. Some pattern must hold wherever mu_i does.
    """
    if nf.m != 2:
        raise SignatureNotTwoVariable(f"spread normal form needs m = 2, got {nf.m}")
    if nf.signature.of_arity(0):
        raise SignatureNotTwoVariable("nullary predicates must be assigned before spreading")
    signature = nf.signature
    namer = Namer(signature)
    provenance = dict(nf.provenance)
    royal = sorted(royal)
    lambdas = tuple(type_formula(pi, signature) for pi in royal)
    width = len(royal).bit_length()

    exist: List[SpreadExist] = []
    univ: List[UnivConjunct] = list(nf.univ)
    for index, conjunct in enumerate(nf.exist, start=1):
        if conjunct.kappa.equal:
            # the witness is the element itself
            exist.append(SpreadExist(conjunct.mu, None, conjunct.kappa, conjunct.gamma))
            continue
        marker = namer.fresh("o", 1)
        provenance[marker.name] = f"witness marker of existential conjunct {index}"
        bits = []
        for b in range(width):
            bit = namer.fresh(f"w{index}_{b}", 1, numbered=False)
            provenance[bit.name] = f"bit {b} of the routing pattern of existential conjunct {index}"
            bits.append(bit)
        exist.append(SpreadExist(conjoin((conjunct.mu, _pattern(bits, 0))), marker.name, conjunct.kappa, conjunct.gamma))
        demand = list(conjunct.gamma.clauses) + [Clause(frozenset([lit])) for lit in conjunct.kappa.literals(signature)]
        for position, pi in enumerate(royal, start=1):
            not_pi = {Literal(signature.lookup(name), not positive) for name, positive in pi.literals}
            routed = [Clause.of(c.literals | not_pi) for c in demand]
            univ.append(UnivConjunct(
                conjoin((conjunct.mu, _pattern(bits, position))),
                ClauseSet(2, frozenset(c for c in routed if c is not None)),
            ))
        unrouted = conjoin((conjunct.mu, negate(disjoin(_pattern(bits, v) for v in range(len(royal) + 1)))))
        if not isinstance(unrouted, Bottom):
            univ.append(UnivConjunct(unrouted, ClauseSet(2, frozenset([EMPTY_CLAUSE]))))

    markers = [e.marker for e in exist if e.marker is not None]
    return SpreadNormalForm(
        signature=signature.extend(*namer.created),
        lambdas=lambdas,
        exist=tuple(exist),
        univ=tuple(univ),
        omega=nf.omega,
        o_disjointness=tuple(itertools.combinations(markers, 2)),
        provenance=provenance,
    )


def spread_conjuncts(snf: SpreadNormalForm) -> List[Formula]:
    sig = snf.signature
    conjuncts: List[Formula] = [Exists(l) for l in snf.lambdas]
    for e in snf.exist:
        marker = Atom(sig.lookup(e.marker)) if e.marker is not None else TRUE
        body = conjoin((marker, control_formula(e.kappa, sig), e.gamma.to_formula()))
        conjuncts.append(Forall(Implies(e.mu, Exists(body))))
    for u in snf.univ:
        conjuncts.append(Forall(Implies(u.nu, Forall(u.delta.to_formula()))))
    for first, second in snf.o_disjointness:
        conjuncts.append(Forall(Not(And((Atom(sig.lookup(first)), Atom(sig.lookup(second)))))))
    if snf.omega.clauses:
        conjuncts.append(forall_n(snf.omega.to_formula(), 2))
    return conjuncts


def spread_to_formula(snf: SpreadNormalForm) -> Formula:
    return conjoin(spread_conjuncts(snf))
