"""Minimal covers, the reduction from m+1 to m variables, and the top-level solve loop"""
import itertools
import logging
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from app import config
from app.errors import IndexSetTooLarge, NotReducible
from app.models.basic import BasicKind
from app.models.certificate import SearchStatus
from app.models.clauses import Clause, ClauseSet, Literal
from app.models.formula import TRUE, Atom, Formula, Signature, conjoin, disjoin, negate
from app.models.forms import MinimalCover, NormalForm
from app.models.solve import SolveOptions, SolveOutcome
from app.models.structure import FlutedType
from app.services.basic_reduction import quadratic_transform, spread_to_basic, unary_types
from app.services.certificate import Budget, search
from app.services.model_synthesis import synthesize, verify_prefix
from app.services.normal_form import NormalFormBuilder, assign_nullary, to_normal_form, to_spread
from app.services.propositional import satisfies
from app.services.resolution import restrict, saturate

logger = logging.getLogger(__name__)

Observer = Callable[[str, dict], None]


def minimal_covers(indices: Iterable[int]) -> Tuple[MinimalCover, ...]:
    """All minimal covers of an index set, fewest cells first"""
    items = sorted(set(indices))
    if len(items) > config.COVER_BOUND:
        raise IndexSetTooLarge(f"index set of size {len(items)} exceeds the cover bound {config.COVER_BOUND}")
    if not items:
        return (MinimalCover(()),)
    full = frozenset(items)
    cells = [frozenset(c) for size in range(1, len(items) + 1) for c in itertools.combinations(items, size)]
    covers = []
    for count in range(1, len(items) + 1):
        for chosen in itertools.combinations(cells, count):
            if frozenset().union(*chosen) != full:
                continue
            # dropping any one cell must break the cover
            if any(frozenset().union(*(c for c in chosen if c is not cell)) == full for cell in chosen):
                continue
            covers.append(MinimalCover(tuple(sorted(chosen, key=lambda c: (len(c), sorted(c))))))
    return tuple(covers)


def _names(index_set: FrozenSet[int], j_set: FrozenSet[int]) -> str:
    return "p_i" + "i".join(map(str, sorted(index_set))) + "_j" + "j".join(map(str, sorted(j_set)))


def _omega_closure(m: int, clauses: Iterable[Clause]) -> FrozenSet[Clause]:
    return restrict(saturate(ClauseSet(m, frozenset(clauses)))).clauses


def reduce_arity(nf: NormalForm) -> NormalForm:
    """Trade one variable for fresh predicates over the same domains"""
    if nf.m <= 2:
        raise NotReducible("a normal form at m = 2 cannot lose another variable")
    m = nf.m - 1
    signature = nf.signature
    builder = NormalFormBuilder(signature, m)
    builder.provenance.update(nf.provenance)
    namer = builder.namer

    gammas = [
        frozenset(e.gamma.clauses) | {Clause(frozenset([lit])) for lit in e.kappa.literals(signature)}
        for e in nf.exist
    ]
    s_indices = list(range(1, len(nf.exist) + 1))
    t_indices = list(range(1, len(nf.univ) + 1))
    omega = frozenset(nf.omega.clauses)

    def guard(index_set, j_set) -> Formula:
        return conjoin([nf.exist[i - 1].mu for i in sorted(index_set)] + [nf.univ[j - 1].nu for j in sorted(j_set)])

    def deltas(j_set) -> FrozenSet[Clause]:
        result = set(omega)
        for j in j_set:
            result |= nf.univ[j - 1].delta.clauses
        return frozenset(result)

    j_sets = [frozenset(c) for size in range(len(t_indices) + 1) for c in itertools.combinations(t_indices, size)]
    for j_set in j_sets:
        if j_set:
            q = namer.fresh("q_j" + "j".join(map(str, sorted(j_set))), m - 1, numbered=False)
            builder.provenance[q.name] = f"universal demands {sorted(j_set)} hold"
            builder.add_omega(disjoin((negate(guard((), j_set)), Atom(q))))
            univ_guard: Formula = Atom(q)
        else:
            univ_guard = TRUE
        builder.add_univ(univ_guard, _omega_closure(m + 1, deltas(j_set)))

    for size in range(1, len(s_indices) + 1):
        for index_set in map(frozenset, itertools.combinations(s_indices, size)):
            covers = minimal_covers(index_set)
            for j_set in j_sets:
                name = _names(index_set, j_set)
                p = namer.fresh(name, m - 1, numbered=False)
                builder.provenance[p.name] = f"existential demands {sorted(index_set)} with universal demands {sorted(j_set)}"
                builder.add_omega(disjoin((negate(guard(index_set, j_set)), Atom(p))))
                chosen = []
                for k, cover in enumerate(covers, start=1):
                    pm = namer.fresh(f"{name}_m{k}", m - 1, numbered=False)
                    builder.provenance[pm.name] = f"cover {cover} of {sorted(index_set)}"
                    chosen.append(Atom(pm))
                    cells = []
                    for h, cell in enumerate(cover.cells, start=1):
                        ph = namer.fresh(f"{name}_m{k}_h{h}", m, numbered=False)
                        cells.append(ph)
                        demand = set(deltas(j_set))
                        for i in cell:
                            demand |= gammas[i - 1]
                        closed = set(_omega_closure(m + 1, demand))
                        closed.add(Clause(frozenset([Literal(ph)])))
                        builder.existential(Atom(pm), frozenset(closed))
                    for first, second in itertools.combinations(cells, 2):
                        builder.add_omega(negate(conjoin((Atom(first), Atom(second)))))
                builder.add_omega(disjoin([negate(Atom(p))] + chosen))

    reduced = builder.result()
    kept = Signature(tuple(p for p in reduced.signature if p.arity <= m))
    result = NormalForm(reduced.m, kept, reduced.exist, reduced.univ, reduced.omega, reduced.provenance)
    logger.info("reduced a normal form from m = %d to m = %d: %d existential, %d universal conjuncts",
                nf.m, m, len(result.exist), len(result.univ))
    return result


def _nullary_assignments(nf: NormalForm) -> List[Dict[str, bool]]:
    names = [p.name for p in nf.signature.of_arity(0)]
    return [dict(zip(names, bits)) for bits in itertools.product((False, True), repeat=len(names))]


def royal_candidates(nf: NormalForm) -> List[FlutedType]:
    """1-types not ruled out by the universal constraints on a single element"""
    spread = to_spread(nf, ())
    basic = spread_to_basic(spread)
    exclusions = [f.mu for f in basic.of_kind(BasicKind.B7)]
    markers = {name: False for name in (e.marker for e in spread.exist) if name is not None}
    return [pi for pi in unary_types(nf.signature) if all(satisfies(pi.extend(markers), mu) for mu in exclusions)]


def royal_guesses(candidates: Sequence[FlutedType], cap: int) -> Iterable[Tuple[FlutedType, ...]]:
    for size in range(min(cap, len(candidates)) + 1):
        yield from itertools.combinations(candidates, size)


def solve(formula: Formula, m: int, signature: Signature, options: Optional[SolveOptions] = None,
          observer: Optional[Observer] = None) -> SolveOutcome:
    """Decide satisfiability by reducing to m = 2 and searching for certificates"""
    options = options or SolveOptions()
    notify = observer or (lambda event, data: None)
    budget = Budget(seconds=options.budget_seconds)

    nf = to_normal_form(formula, m, signature)
    outcome = SolveOutcome(SearchStatus.UNSAT_AT_CAP, normal_forms=[nf])
    notify("solve.normalized", {"m": nf.m, "exist": len(nf.exist), "univ": len(nf.univ), "omega": len(nf.omega)})
    while nf.m > 2:
        nf = reduce_arity(nf)
        outcome.normal_forms.append(nf)
        notify("solve.reduced", {"m": nf.m, "exist": len(nf.exist), "univ": len(nf.univ)})

    for values in _nullary_assignments(nf):
        assigned = assign_nullary(nf, values) if values else nf
        for royal in royal_guesses(royal_candidates(assigned), options.royal_cap):
            if budget.exhausted:
                break
            outcome.guesses += 1
            notify("solve.royal_guess", {"nullary": values, "royal": [pi.render() for pi in royal]})
            logger.info("trying royal set of size %d with %d nullary values", len(royal), len(values))
            spread = to_spread(assigned, royal)
            basic = spread_to_basic(spread)
            quadratic = quadratic_transform(basic)
            result = search(quadratic, options.max_omega, budget, options.literal_case3, options.clique_width)
            outcome.nodes += result.nodes
            if result.status == SearchStatus.BUDGET_EXHAUSTED:
                outcome.status = SearchStatus.BUDGET_EXHAUSTED
                break
            if result.status != SearchStatus.SAT:
                continue
            outcome.status = SearchStatus.SAT
            outcome.nullary = values
            outcome.royal = tuple(royal)
            outcome.spread, outcome.basic, outcome.quadratic = spread, basic, quadratic
            outcome.certificate = result.certificate
            outcome.prefix = synthesize(result.certificate, options.depth)
            outcome.prefix_report = verify_prefix(outcome.prefix, result.certificate, quadratic)
            notify("solve.certificate", {"super_types": len(result.certificate.omega), "nodes": outcome.nodes})
            notify("solve.finished", {"status": outcome.status.value, "guesses": outcome.guesses})
            return outcome
        if budget.exhausted:
            outcome.status = SearchStatus.BUDGET_EXHAUSTED
            break
    notify("solve.finished", {"status": outcome.status.value, "guesses": outcome.guesses})
    return outcome
