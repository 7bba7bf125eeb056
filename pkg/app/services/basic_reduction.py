"""Reduction of spread normal forms to basic formulas, and the quadratic transformation"""
import itertools
import logging
from typing import Dict, FrozenSet, Iterable, List, Sequence, Tuple

from app import config
from app.errors import BoundExceeded, FlutedSyntaxError, SignatureNotTwoVariable
from app.models.basic import BasicFormula, BasicKind, BasicSet
from app.models.clauses import Clause, ClauseSet, Literal
from app.models.formula import (
    FALSE, TRUE, Atom, Formula, Implies, Not, And, PredicateKind, Signature, Top,
    conjoin, disjoin, negate,
)
from app.models.forms import SpreadNormalForm
from app.models.structure import FlutedType
from app.services.normal_form import Namer
from app.services.propositional import rename_atoms, satisfies
from app.services.resolution import restrict, saturate
from app.services.syntax import parse, parse_header, print_formula, print_header

logger = logging.getLogger(__name__)


def unary_types(signature: Signature) -> List[FlutedType]:
    """All fluted 1-types over the unary predicates, in literal-vector order"""
    preds = [p.name for p in signature.unary]
    if 2 ** len(preds) > config.TYPE_LIMIT:
        raise BoundExceeded(f"{len(preds)} unary predicates give more than {config.TYPE_LIMIT} 1-types")
    types = [FlutedType.of(1, dict(zip(preds, bits))) for bits in itertools.product((False, True), repeat=len(preds))]
    return sorted(types)


class _Reducer:
    def __init__(self, snf: SpreadNormalForm):
        self.snf = snf
        self.signature = snf.signature
        self.t_name = self.signature.transitive[0].name
        self.t_hat = Atom(self.signature.t_hat)
        self.nus = [u.nu for u in snf.univ]
        self.cache: Dict[Tuple[FrozenSet[Clause], FrozenSet[int]], ClauseSet] = {}

    def selection(self, pi: FlutedType) -> FrozenSet[int]:
        return frozenset(j for j, nu in enumerate(self.nus) if satisfies(pi, nu))

    def guard(self, selection: Iterable[int]) -> Formula:
        return conjoin(self.nus[j] for j in sorted(selection))

    def theta(self, extra: FrozenSet[Clause], selection: FrozenSet[int]) -> ClauseSet:
        key = (extra, selection)
        if key not in self.cache:
            clauses = set(extra) | set(self.snf.omega.clauses)
            for j in selection:
                clauses |= self.snf.univ[j].delta.clauses
            self.cache[key] = restrict(saturate(ClauseSet(2, frozenset(clauses))))
        return self.cache[key]

    def on_diagonal(self, theta: ClauseSet, t_value: Formula) -> Formula:
        return rename_atoms(theta.to_formula(), {"=": TRUE, self.t_name: t_value})

    def off_diagonal(self, theta: ClauseSet, t_positive: bool) -> Formula:
        return rename_atoms(theta.to_formula(), {"=": FALSE, self.t_name: TRUE if t_positive else FALSE})


def spread_to_basic(snf: SpreadNormalForm) -> BasicSet:
    """Reduce a spread normal form to basic formulas over its unary signature"""
    signature = snf.signature
    if any(p.arity == 0 or p.arity > 2 for p in signature):
        raise SignatureNotTwoVariable("basic reduction needs a signature of unary and binary predicates")
    reducer = _Reducer(snf)
    formulas: List[BasicFormula] = [BasicFormula(BasicKind.B8, mu=TRUE)]
    formulas += [BasicFormula(BasicKind.B8, mu=l) for l in snf.lambdas]
    for first, second in snf.o_disjointness:
        pair = And((Atom(signature.lookup(first)), Atom(signature.lookup(second))))
        formulas.append(BasicFormula(BasicKind.B7, mu=Not(pair)))

    types = unary_types(signature)
    selections = sorted({reducer.selection(pi) for pi in types} | {frozenset()}, key=sorted)

    # Universal demands between an element and itself
    for selection in selections:
        theta = reducer.theta(frozenset(), selection)
        body = disjoin((negate(reducer.guard(selection)), reducer.on_diagonal(theta, reducer.t_hat)))
        if not isinstance(body, Top):
            formulas.append(BasicFormula(BasicKind.B7, mu=body))

    # Existential demands met by the element itself
    for e in snf.exist:
        if not e.kappa.equal:
            continue
        extra = set(e.gamma.clauses)
        if e.marker is not None:
            extra.add(Clause(frozenset([Literal(signature.lookup(e.marker))])))
        t_hat = reducer.t_hat if e.kappa.t_positive else Not(reducer.t_hat)
        for selection in selections:
            theta = reducer.theta(frozenset(extra), selection)
            demand = conjoin((t_hat, reducer.on_diagonal(theta, TRUE if e.kappa.t_positive else FALSE)))
            body = disjoin((negate(conjoin((e.mu, reducer.guard(selection)))), demand))
            if not isinstance(body, Top):
                formulas.append(BasicFormula(BasicKind.B7, mu=body))

    exclusions = [f.mu for f in formulas if f.kind == BasicKind.B7]
    admissible = [pi for pi in types if all(satisfies(pi, mu) for mu in exclusions)]
    logger.debug("%d of %d 1-types are admissible", len(admissible), len(types))

    # Existential demands met by another element
    for e in snf.exist:
        if e.kappa.equal:
            continue
        extra = set(e.gamma.clauses) | {Clause(frozenset([l])) for l in e.kappa.literals(signature)}
        extra.add(Clause(frozenset([Literal(signature.lookup(e.marker))])))
        kind = BasicKind.B1 if e.kappa.t_positive else BasicKind.B2
        for pi in admissible:
            if not satisfies(pi, e.mu):
                continue
            theta = reducer.theta(frozenset(extra), reducer.selection(pi))
            formulas.append(BasicFormula(kind, pi=pi, mu=reducer.off_diagonal(theta, e.kappa.t_positive)))

    # Universal demands between distinct elements
    for pi in admissible:
        theta = reducer.theta(frozenset(), reducer.selection(pi))
        options = {value: reducer.off_diagonal(theta, value) for value in (True, False)}
        for other in admissible:
            allowed = {value for value, body in options.items() if satisfies(other, body)}
            if pi != other:
                if True not in allowed:
                    formulas.append(BasicFormula(BasicKind.B4, pi=pi, pi2=other))
                if False not in allowed:
                    formulas.append(BasicFormula(BasicKind.B3, pi=pi, pi2=other))
            else:
                if True not in allowed:
                    formulas.append(BasicFormula(BasicKind.B6, pi=pi))
                if False not in allowed:
                    formulas.append(BasicFormula(BasicKind.B5, pi=pi))

    basic_signature = Signature(tuple(p for p in signature if p.arity == 1 or p.kind in (
        PredicateKind.TRANSITIVE, PredicateKind.EQUALITY)))
    result = BasicSet(tuple(formulas), basic_signature)
    logger.info("basic reduction produced %d formulas over %d unary predicates",
                len(result), len(basic_signature.unary))
    return result


def quadratic_transform(phi: BasicSet) -> BasicSet:
    """Add padding predicates so that satisfiable sets have quadratic models"""
    namer = Namer(phi.signature)
    width = 2 * len(phi.signature.unary)
    padding = [namer.fresh(f"p{k}", 1, numbered=False) for k in range(width)]
    blank = {p.name: False for p in padding}
    proper = conjoin(Not(Atom(p)) for p in padding)

    formulas = []
    for f in phi.formulas + (BasicFormula(BasicKind.B8, mu=TRUE),):
        if f.kind in (BasicKind.B1, BasicKind.B2):
            formulas.append(BasicFormula(f.kind, pi=f.pi.extend(blank), mu=conjoin((f.mu, proper))))
        elif f.kind in (BasicKind.B3, BasicKind.B4):
            formulas.append(BasicFormula(f.kind, pi=f.pi.extend(blank), pi2=f.pi2.extend(blank)))
        elif f.kind in (BasicKind.B5, BasicKind.B6):
            formulas.append(BasicFormula(f.kind, pi=f.pi.extend(blank)))
        elif f.kind == BasicKind.B7:
            formulas.append(BasicFormula(f.kind, mu=Implies(proper, f.mu) if padding else f.mu))
        else:
            formulas.append(BasicFormula(f.kind, mu=conjoin((f.mu, proper))))
    return BasicSet(tuple(formulas), phi.signature.extend(*padding), tuple(p.name for p in padding))


def proper_types(sigma_star: Signature, padding: Sequence[str]) -> Dict[FlutedType, FlutedType]:
    """Map each proper 1-type over the padded signature to its 1-type over the original one"""
    original = Signature(tuple(p for p in sigma_star if p.name not in set(padding)))
    blank = {name: False for name in padding}
    return {pi.extend(blank): pi for pi in unary_types(original)}


def render_basic_set(phi: BasicSet) -> str:
    lines = [print_header(phi.signature)]
    if phi.padding:
        lines.append("pad { " + ", ".join(phi.padding) + " }")
    for f in phi.formulas:
        parts = [f.kind.value]
        if f.pi is not None:
            parts.append(f.pi.render())
        if f.pi2 is not None:
            parts.append(f.pi2.render())
        if f.kind in (BasicKind.B1, BasicKind.B2, BasicKind.B7, BasicKind.B8):
            parts.append(": " + print_formula(f.mu))
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def parse_type(text: str, signature: Signature, line: int = 0) -> FlutedType:
    values = {}
    for item in text.strip().strip("[]").split(","):
        item = item.strip()
        if not item:
            continue
        name = item[1:] if item.startswith("!") else item
        signature.lookup(name)
        values[name] = not item.startswith("!")
    if set(values) != {p.name for p in signature.unary}:
        raise FlutedSyntaxError(f"line {line}: 1-type does not cover the unary signature", 0)
    return FlutedType.of(1, values)


def parse_basic_set(text: str) -> BasicSet:
    """Read the line format written by render_basic_set"""
    lines = [l.split("#", 1)[0].strip() for l in text.splitlines()]
    lines = [(n, l) for n, l in enumerate(lines, start=1) if l]
    if not lines:
        raise FlutedSyntaxError("empty basic set", 0)
    signature = parse_header(lines[0][1])
    padding: Tuple[str, ...] = ()
    formulas = []
    for number, line in lines[1:]:
        if line.startswith("pad"):
            padding = tuple(n.strip() for n in line[3:].strip().strip("{}").split(",") if n.strip())
            continue
        head, _, rest = line.partition(" ")
        try:
            kind = BasicKind(head)
        except ValueError:
            raise FlutedSyntaxError(f"line {number}: unknown basic form '{head}'", 0) from None
        types_text, _, mu_text = rest.partition(":")
        types = [t + "]" for t in types_text.split("]") if t.strip()]
        pis = [parse_type(t, signature, number) for t in types]
        mu = parse(mu_text, signature) if mu_text.strip() else None
        formulas.append(BasicFormula(
            kind,
            pi=pis[0] if pis else None,
            pi2=pis[1] if len(pis) > 1 else None,
            mu=mu,
        ))
    return BasicSet(tuple(formulas), signature, padding)
