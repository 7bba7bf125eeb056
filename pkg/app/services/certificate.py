"""Certificates for sets of basic formulas: checking, extraction and search"""
import itertools
import logging
import time
from collections import defaultdict
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

import networkx as nx

from app import config
from app.errors import InvalidCertificate, NotQuadratic, NotWellFormed
from app.models.basic import BasicFormula, BasicKind, BasicSet
from app.models.certificate import (
    Certificate, CliqueSuperType, CliqueType, ConditionReport, SearchResult, SearchStatus,
)
from app.models.formula import Formula
from app.models.structure import FlutedType, Structure
from app.services.basic_reduction import proper_types, unary_types
from app.services.propositional import satisfies
from app.services.semantics import check_wellformed, cliques, fluted_type_of, is_quadratic

logger = logging.getLogger(__name__)


def check_conditions(c: Certificate) -> ConditionReport:
    violations: List[Tuple[str, str]] = []
    omega, ll, v = c.omega, c.ll, c.v

    for a, b in sorted(ll):
        if a == b:
            violations.append(("strict", f"{a} << {a}"))
        for b2, d in sorted(ll):
            if b2 == b and (a, d) not in ll:
                violations.append(("strict", f"{a} << {b} << {d} but not {a} << {d}"))

    for index, s in enumerate(omega):
        xi = s.xi.support
        for target in sorted(s.pi):
            if not any(
                target in t.xi and (t.pi | t.xi.support) <= s.pi and not (xi & v & t.pi)
                for t in omega
            ):
                violations.append(("C1", f"super-type {index} reaches {target} without a witness"))
        for j, t in enumerate(omega):
            if j != index:
                for a, b in itertools.product(sorted(xi), sorted(t.xi.support)):
                    if (a, b) in ll and not (t.xi.support | t.pi) <= s.pi:
                        violations.append(("C2", f"{a} << {b} but super-type {j} is not below {index}"))
                if j > index and xi & t.xi.support & v:
                    violations.append(("C3", f"super-types {index} and {j} share a unique 1-type"))
        if s.xi.is_soliton(c.t_hat) and not (len(s.xi.counts) == 1 and s.xi.counts[0][1] == 1):
            violations.append(("C4", f"soliton super-type {index} is not a single element"))
        for a, b in sorted(ll):
            if b in xi and a in s.pi:
                violations.append(("C5", f"super-type {index} realizes {b} and reaches {a} << {b}"))
            if a in xi and b in xi and not (xi & v):
                violations.append(("C6", f"super-type {index} realizes {a} << {b} but no unique 1-type"))
    return ConditionReport(tuple(violations))


def cert_satisfies(c: Certificate, psi: BasicFormula, literal_case3: bool = False) -> bool:
    """Whether the certificate satisfies a basic formula.

    With literal_case3 the third alternative for B3 quantifies over the
    super-types whose reach (rather than whose clique) contains the first type.
    """
    omega, ll, v = c.omega, c.ll, c.v
    kind, pi, mu = psi.kind, psi.pi, psi.mu
    holding = [s for s in omega if pi is not None and pi in s.xi]

    if kind == BasicKind.B1:
        for s in holding:
            if satisfies(pi, mu) and s.xi.count(pi) == 2:
                continue
            if any(other != pi and satisfies(other, mu) for other in s.xi.support):
                continue
            if any(satisfies(other, mu) for other in s.pi):
                continue
            return False
        return True
    if kind == BasicKind.B2:
        for s in holding:
            if not any(_b2_witness(s, t, mu, ll, v) for t in omega):
                return False
        return True
    if kind == BasicKind.B3:
        first, second = pi, psi.pi2
        if not c.occurs(first) or not c.occurs(second):
            return True
        if (first, second) in ll:
            return True
        sources = [s for s in omega if first in (s.pi if literal_case3 else s.xi.support)]
        targets = [t for t in omega if second in t.xi]
        return all(s == t and s.xi.support & v for s in sources for t in targets)
    if kind == BasicKind.B4:
        return all(psi.pi2 not in (s.xi.support | s.pi) for s in holding)
    if kind == BasicKind.B5:
        return len(holding) <= 1 and all(s.xi.support & v for s in holding)
    if kind == BasicKind.B6:
        return all(not (pi in s.xi and pi in s.pi) and s.xi.count(pi) <= 1 for s in omega)
    if kind == BasicKind.B7:
        return all(satisfies(t, mu) for s in omega for t in s.xi.support)
    if kind == BasicKind.B8:
        return any(satisfies(t, mu) for s in omega for t in s.xi.support)
    raise ValueError(f"unknown basic form {kind}")


def _b2_witness(s: CliqueSuperType, t: CliqueSuperType, mu: Formula, ll, v) -> bool:
    if not any(satisfies(other, mu) for other in t.xi.support):
        return False
    if any((a, b) in ll for a in s.pi for b in t.xi.support):
        return False
    if t.xi.support & s.pi & v:
        return False
    if s == t and s.xi.support & v:
        return False
    return True


def certificate_of(s: Structure) -> Certificate:
    """Extract the certificate realized by a well-formed quadratic structure"""
    report = check_wellformed(s)
    if not report.ok:
        raise NotWellFormed(report.describe())
    if not is_quadratic(s):
        raise NotQuadratic("structure is not quadratic")
    t_name = s.transitive_name()
    t_hat = s.signature.t_hat
    relation = s.relation(t_name)
    partition = cliques(s)
    types = {a: fluted_type_of(s, (a,)) for a in s.elements}

    omega = []
    clique_of = {}
    for index, block in enumerate(partition.blocks):
        counts = defaultdict(int)
        for a in block:
            counts[types[a]] += 1
            clique_of[a] = index
        anchor = min(block)
        reach = frozenset(types[b] for b in s.elements if (anchor, b) in relation and (b, anchor) not in relation)
        omega.append(CliqueSuperType(CliqueType.of(counts), reach))

    by_type = defaultdict(list)
    for a in s.elements:
        by_type[types[a]].append(a)

    def all_related(first: FlutedType, second: FlutedType) -> bool:
        return all((a, b) in relation for a in by_type[first] for b in by_type[second])

    ll = frozenset(
        (first, second)
        for first, second in itertools.permutations(by_type, 2)
        if all_related(first, second) and not all_related(second, first)
    )
    v = frozenset(t for t, members in by_type.items() if len({clique_of[a] for a in members}) == 1)
    unary = tuple(p.name for p in s.signature.unary)
    return Certificate(tuple(omega), ll, v, unary, t_name, t_hat.name)


class BudgetExhausted(Exception):
    pass


class Budget:
    """Wall-clock and node limits shared by a run"""

    def __init__(self, seconds: Optional[float] = None, nodes: Optional[int] = None):
        self.deadline = time.monotonic() + seconds if seconds is not None else None
        self.nodes = nodes
        self.used = 0
        self.exhausted = False

    def tick(self):
        self.used += 1
        if (self.nodes is not None and self.used > self.nodes) or (
                self.deadline is not None and time.monotonic() > self.deadline):
            self.exhausted = True
            raise BudgetExhausted()


class _Search:
    """Agenda-driven construction of certificates.

    A partial certificate is a list of clique-types together with reachability
    edges between them. The reach of a node is the union of the clique-types
    reachable from it in one or more steps, so the first condition holds by
    construction and only the unique-type part is checked at the end.
    """

    def __init__(self, phi: BasicSet, max_omega: int, budget: Budget, literal_case3: bool,
                 clique_width: int):
        self.phi = phi
        self.max_omega = max_omega
        self.budget = budget
        self.literal_case3 = literal_case3
        self.signature = phi.signature
        self.t_name = self.signature.transitive[0].name
        self.t_hat = self.signature.t_hat.name
        self.unary = tuple(p.name for p in self.signature.unary)
        self.b1 = phi.of_kind(BasicKind.B1)
        self.b2 = phi.of_kind(BasicKind.B2)
        self.b8 = phi.of_kind(BasicKind.B8)
        self.b4 = {(f.pi, f.pi2) for f in phi.of_kind(BasicKind.B4)}
        self.b5 = {f.pi for f in phi.of_kind(BasicKind.B5)}
        self.b6 = {f.pi for f in phi.of_kind(BasicKind.B6)}
        self.types = self._viable_types()
        self.padding_types = self._padding_types()
        self.candidates = self._candidates(clique_width)
        self.nodes_seen = 0

    def _viable_types(self) -> List[FlutedType]:
        exclusions = [f.mu for f in self.phi.of_kind(BasicKind.B7)]
        if self.phi.padding:
            types = sorted(proper_types(self.signature, self.phi.padding))
        else:
            types = unary_types(self.signature)
        viable = [pi for pi in types if all(satisfies(pi, mu) for mu in exclusions)]
        changed = True
        while changed:
            changed = False
            for pi in list(viable):
                for f in self.b1 + self.b2:
                    if f.pi != pi:
                        continue
                    witnesses = [w for w in viable if satisfies(w, f.mu)]
                    if not witnesses:
                        viable.remove(pi)
                        changed = True
                        break
        logger.debug("%d viable 1-types", len(viable))
        return viable

    def _padding_types(self) -> List[FlutedType]:
        if not self.phi.padding:
            return []
        width = len(self.phi.padding)
        base = {name: False for name in self.unary}
        base[self.t_hat] = True
        result = []
        for k in range(1, min(2 ** width, self.max_omega + 1)):
            values = dict(base)
            for bit, name in enumerate(self.phi.padding):
                values[name] = bool((k >> bit) & 1)
            result.append(FlutedType.of(1, values))
        return result

    def _candidates(self, width: int) -> List[CliqueType]:
        solitons = [CliqueType.of({pi: 1}) for pi in self.types if not pi.value(self.t_hat)]
        reflexive = [pi for pi in self.types if pi.value(self.t_hat)]
        cliques_ = []
        for size in range(1, width + 1):
            for support in itertools.combinations(reflexive, size):
                if any((a, b) in self.b4 for a in support for b in support if a != b):
                    continue
                for counts in itertools.product((1, 2), repeat=size):
                    if any(c == 2 and pi in self.b6 for pi, c in zip(support, counts)):
                        continue
                    cliques_.append(CliqueType.of(dict(zip(support, counts))))
        return solitons + cliques_

    # state helpers

    def reach(self, nodes: List[CliqueType], edges: Set[Tuple[int, int]]) -> List[FrozenSet[FlutedType]]:
        graph = nx.DiGraph()
        graph.add_nodes_from(range(len(nodes)))
        graph.add_edges_from(edges)
        # a node reaches itself only through a cycle
        closure = nx.transitive_closure(graph, reflexive=False)
        result = []
        for index in range(len(nodes)):
            reached = set()
            for target in closure.successors(index):
                reached |= nodes[target].support
            result.append(frozenset(reached))
        return result

    def violates_monotone(self, nodes, reach) -> bool:
        for xi, pi_set in zip(nodes, reach):
            support = xi.support
            for a in support:
                if any((a, b) in self.b4 for b in support | pi_set):
                    return True
                if a in self.b6 and a in pi_set:
                    return True
        for pi in self.b5:
            if sum(1 for xi in nodes if pi in xi) > 1:
                return True
        return False

    def b1_met(self, f: BasicFormula, xi: CliqueType, pi_set) -> bool:
        pi = f.pi
        if satisfies(pi, f.mu) and xi.count(pi) == 2:
            return True
        if any(o != pi and satisfies(o, f.mu) for o in xi.support):
            return True
        return any(satisfies(o, f.mu) for o in pi_set)

    # search

    def run(self) -> Optional[Certificate]:
        return self.expand([], set())

    def expand(self, nodes: List[CliqueType], edges: Set[Tuple[int, int]]) -> Optional[Certificate]:
        self.budget.tick()
        self.nodes_seen += 1
        reach = self.reach(nodes, edges)
        if self.violates_monotone(nodes, reach):
            return None

        demand = self.next_demand(nodes, reach)
        if demand is None:
            certificate, failed = self.close(nodes, edges)
            if certificate is not None:
                return certificate
            if failed is None:
                return None
            demand = failed
        kind, index, f = demand
        if kind == "edge":
            for target, xi in enumerate(nodes):
                if any(satisfies(o, f.mu) for o in xi.support) and (index, target) not in edges:
                    found = self.expand(nodes, edges | {(index, target)})
                    if found is not None:
                        return found
        if len(nodes) >= self.max_omega:
            return None
        for xi in self.candidates:
            if not any(satisfies(o, f.mu) for o in xi.support):
                continue
            new_index = len(nodes)
            new_edges = edges | {(index, new_index)} if kind == "edge" else edges
            found = self.expand(nodes + [xi], new_edges)
            if found is not None:
                return found
        return None

    def next_demand(self, nodes, reach):
        for f in self.b8:
            if not any(satisfies(o, f.mu) for xi in nodes for o in xi.support):
                return ("node", None, f)
        for index, (xi, pi_set) in enumerate(zip(nodes, reach)):
            for f in self.b1:
                if f.pi in xi and not self.b1_met(f, xi, pi_set):
                    return ("edge", index, f)
        for index, xi in enumerate(nodes):
            for f in self.b2:
                if f.pi in xi and not any(satisfies(o, f.mu) for other in nodes for o in other.support):
                    return ("node", index, f)
        return None

    def close(self, nodes: List[CliqueType], edges: Set[Tuple[int, int]]):
        """Choose V and the order for a complete agenda; return a certificate or a failing B2"""
        occurrences = defaultdict(set)
        for index, xi in enumerate(nodes):
            for pi in xi.support:
                occurrences[pi].add(index)
        unique = sorted(pi for pi, where in occurrences.items() if len(where) == 1)
        failed_b2 = None
        for chosen in _subsets(unique):
            for padded in self._paddings(nodes):
                self.budget.tick()
                padded_nodes = [xi if extra is None else CliqueType.of({**dict(xi.counts), extra: 1})
                                for xi, extra in zip(nodes, padded)]
                v = frozenset(chosen) | frozenset(e for e in padded if e is not None)
                certificate = self.assemble(padded_nodes, edges, v)
                if certificate is None:
                    continue
                failures = [f for f in self.phi.formulas
                            if not cert_satisfies(certificate, f, self.literal_case3)]
                if not failures and check_conditions(certificate).ok:
                    return certificate, None
                if failed_b2 is None:
                    failed_b2 = next((f for f in failures if f.kind == BasicKind.B2), None)
        if failed_b2 is not None:
            holder = next(i for i, xi in enumerate(nodes) if failed_b2.pi in xi)
            return None, ("node", holder, failed_b2)
        return None, None

    def _paddings(self, nodes: List[CliqueType]):
        """Every choice of non-soliton cliques that get a fresh improper type

        Improper types are interchangeable, so only the choice of cliques matters.
        """
        yield [None] * len(nodes)
        open_ = [i for i, xi in enumerate(nodes) if not xi.is_soliton(self.t_hat)]
        for chosen in _subsets(open_):
            if not chosen or len(chosen) > len(self.padding_types):
                continue
            extras = [None] * len(nodes)
            for extra, index in zip(self.padding_types, chosen):
                extras[index] = extra
            yield extras

    def assemble(self, nodes: List[CliqueType], edges: Set[Tuple[int, int]], v: FrozenSet[FlutedType]):
        occurs = {pi for xi in nodes for pi in xi.support}
        needed = set()
        for f in self.phi.of_kind(BasicKind.B3):
            if f.pi not in occurs or f.pi2 not in occurs:
                continue
            holders = [i for i, xi in enumerate(nodes) if f.pi in xi]
            targets = [j for j, xi in enumerate(nodes) if f.pi2 in xi]
            if all(i == j and nodes[i].support & v for i in holders for j in targets):
                continue
            needed.add((f.pi, f.pi2))
        order = nx.DiGraph()
        order.add_edges_from(needed)
        closure = set(nx.transitive_closure(order, reflexive=False).edges()) if needed else set()
        if any(a == b for a, b in closure):
            return None
        all_edges = set(edges)
        for i, xi in enumerate(nodes):
            for j, other in enumerate(nodes):
                if i != j and any((a, b) in closure for a in xi.support for b in other.support):
                    all_edges.add((i, j))
        reach = self.reach(nodes, all_edges)
        omega = tuple(CliqueSuperType(xi, pi_set) for xi, pi_set in zip(nodes, reach))
        return Certificate(omega, frozenset(closure), v, self.unary, self.t_name, self.t_hat)


def _subsets(items: Sequence) -> Iterable[Tuple]:
    return itertools.chain.from_iterable(
        itertools.combinations(items, size) for size in range(len(items) + 1))


def search(phi: BasicSet, max_omega: int = None, budget: Budget = None,
           literal_case3: bool = False, clique_width: int = None) -> SearchResult:
    """Look for a certificate with at most max_omega clique-super-types"""
    max_omega = max_omega or config.MAX_OMEGA
    budget = budget or Budget(seconds=config.BUDGET_SECONDS)
    engine = _Search(phi, max_omega, budget, literal_case3, clique_width or config.CLIQUE_WIDTH)
    try:
        certificate = engine.run()
    except BudgetExhausted:
        logger.info("certificate search ran out of budget after %d nodes", engine.nodes_seen)
        return SearchResult(SearchStatus.BUDGET_EXHAUSTED, nodes=engine.nodes_seen)
    if certificate is None:
        logger.info("no certificate with at most %d super-types", max_omega)
        return SearchResult(SearchStatus.UNSAT_AT_CAP, nodes=engine.nodes_seen)
    if not check_conditions(certificate).ok or not all(cert_satisfies(certificate, f, literal_case3) for f in phi.formulas):
        raise InvalidCertificate("search produced a certificate that does not validate")
    logger.info("found a certificate with %d super-types after %d nodes", len(certificate.omega), engine.nodes_seen)
    return SearchResult(SearchStatus.SAT, certificate, engine.nodes_seen)
