"""Finite prefixes of the model described by a certificate"""
import logging
from typing import Dict, List, Set, Tuple

import networkx as nx

from app.errors import InvalidCertificate
from app.models.basic import BasicKind, BasicSet
from app.models.certificate import Certificate
from app.models.formula import Signature
from app.models.prefix import CellAddress, ElementTag, PrefixCheck, PrefixReport, SynthesizedPrefix
from app.models.structure import Structure
from app.services.certificate import check_conditions
from app.services.semantics import check_wellformed, eval_formula, fluted_type_of

logger = logging.getLogger(__name__)


def certificate_signature(c: Certificate) -> Signature:
    ordinary = {name: 1 for name in c.unary if name != c.t_hat}
    return Signature.build(ordinary, [c.transitive], equality=True, t_hat=c.t_hat)


def synthesize(c: Certificate, depth: int) -> SynthesizedPrefix:
    """Build cells 0..depth of every super-type and close t0, t1 and t2 transitively"""
    report = check_conditions(c)
    if not report.ok:
        raise InvalidCertificate("; ".join(detail for _, detail in report.violations))
    if depth < 0:
        raise ValueError("depth must be non-negative")
    v = c.v
    single = [bool(s.xi.support & v) for s in c.omega]

    cells: List[CellAddress] = []
    for k, s in enumerate(c.omega):
        for i in range(1 if single[k] else depth + 1):
            cells.append(CellAddress(k, i))

    tags: List[ElementTag] = []
    members: Dict[CellAddress, List[int]] = {}
    for cell in cells:
        members[cell] = []
        for pi, count in c.omega[cell.super_type].xi.counts:
            for polarity in ("+", "-")[:count]:
                members[cell].append(len(tags))
                tags.append(ElementTag(pi, cell, polarity))

    t1: Set[Tuple[CellAddress, CellAddress]] = set()
    t2: Set[Tuple[CellAddress, CellAddress]] = set()
    for u in cells:
        s = c.omega[u.super_type]
        for w in cells:
            t = c.omega[w.super_type]
            if ((t.xi.support | t.pi) <= s.pi
                    and (single[w.super_type] or w.copy >= u.copy + 2)
                    and not (s.xi.support & v & t.pi)):
                t1.add((u, w))
            if u != w and any((a, b) in c.ll for a in s.xi.support for b in t.xi.support):
                t2.add((u, w))

    graph = nx.DiGraph()
    graph.add_nodes_from(range(len(tags)))
    for cell in cells:
        if not c.omega[cell.super_type].xi.is_soliton(c.t_hat):
            graph.add_edges_from((a, b) for a in members[cell] for b in members[cell])
    for u, w in t1 | t2:
        graph.add_edges_from((a, b) for a in members[u] for b in members[w])
    relation = set(nx.transitive_closure(graph, reflexive=False).edges())

    signature = certificate_signature(c)
    relations = {name: [] for name in c.unary}
    for a, tag in enumerate(tags):
        for name, positive in tag.pi.literals:
            if positive and name != c.t_hat:
                relations[name].append(a)
    relations[c.t_hat] = [a for a, b in relation if a == b]
    relations[c.transitive] = relation
    structure = Structure.build(len(tags), signature, relations)
    logger.info("synthesized a prefix of %d elements in %d cells", len(tags), len(cells))
    return SynthesizedPrefix(structure, tuple(tags), depth, tuple(cells), frozenset(t1), frozenset(t2))


def verify_prefix(p: SynthesizedPrefix, c: Certificate, phi: BasicSet) -> PrefixReport:
    checks: List[PrefixCheck] = []

    intra = sorted(u for u, w in p.t1_edges if u == w)
    for u in intra:
        checks.append(PrefixCheck("t1-intra-cell", str(u), "failed", "t1 edge inside a cell"))
    if not intra:
        checks.append(PrefixCheck("t1-intra-cell", "all cells", "ok"))

    cell_graph = nx.DiGraph()
    cell_graph.add_nodes_from(p.cells)
    cell_graph.add_edges_from(p.t1_edges | p.t2_edges)
    acyclic = nx.is_directed_acyclic_graph(cell_graph)
    checks.append(PrefixCheck("acyclic", "cell graph", "ok" if acyclic else "failed"))

    s = p.structure
    wellformed = check_wellformed(s)
    mismatched = [a for a, tag in enumerate(p.tags) if fluted_type_of(s, (a,)) != tag.pi]
    checks.append(PrefixCheck(
        "types", "all elements",
        "ok" if wellformed.ok and not mismatched else "failed",
        "" if wellformed.ok and not mismatched else f"{wellformed.describe()}; mismatched elements {mismatched}",
    ))

    for f in phi.formulas:
        if f.kind in (BasicKind.B1, BasicKind.B2):
            continue
        holds = eval_formula(s, f.to_formula(phi.signature))
        checks.append(PrefixCheck(f.kind.value, _subject(f), "ok" if holds else "failed"))

    t_relation = s.relation(c.transitive)
    for f in phi.of_kind(BasicKind.B1, BasicKind.B2):
        wanted = f.kind == BasicKind.B1
        for a, tag in enumerate(p.tags):
            if tag.pi != f.pi:
                continue
            subject = f"{_subject(f)} at {tag.label()}"
            if tag.cell.copy > p.depth - 2:
                checks.append(PrefixCheck(f.kind.value, subject, "unchecked"))
                continue
            witnessed = any(
                b != a and ((a, b) in t_relation) == wanted and eval_formula(s, f.mu, (b,))
                for b in s.elements
            )
            checks.append(PrefixCheck(f.kind.value, subject, "ok" if witnessed else "failed"))
    return PrefixReport(tuple(checks))


def _subject(f) -> str:
    parts = [f.kind.value]
    if f.pi is not None:
        parts.append(f.pi.render())
    if f.pi2 is not None:
        parts.append(f.pi2.render())
    return " ".join(parts)
