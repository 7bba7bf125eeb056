import random

import pytest

from app.errors import NotQuadratic, NotWellFormed
from app.models.basic import BasicFormula, BasicKind, BasicSet
from app.models.certificate import Certificate, CliqueSuperType, CliqueType, SearchStatus
from app.models.formula import TRUE, And, Atom, Not, Signature
from app.models.structure import FlutedType, Structure
from app.services.certificate import Budget, _Search, cert_satisfies, certificate_of, check_conditions, search
from app.services.semantics import eval_formula, is_quadratic
from tests.conftest import random_basic_formula, random_structure

REFLEXIVE = FlutedType.of(1, {"p": True, "That": True})
PLAIN = FlutedType.of(1, {"p": False, "That": True})
LONE = FlutedType.of(1, {"p": True, "That": False})


def certificate(*super_types, ll=(), v=()):
    return Certificate(tuple(super_types), frozenset(ll), frozenset(v), ("That", "p"))


def chain():
    return certificate(CliqueSuperType(CliqueType.of({REFLEXIVE: 1}), frozenset({REFLEXIVE})))


def test_chain_certificate_is_valid():
    assert check_conditions(chain()).ok


def test_missing_reach_witness_violates_first_condition():
    c = certificate(CliqueSuperType(CliqueType.of({REFLEXIVE: 1}), frozenset({PLAIN})))
    assert "C1" in check_conditions(c).conditions()


def test_soliton_with_two_elements_is_rejected():
    c = certificate(CliqueSuperType(CliqueType.of({LONE: 2}), frozenset()))
    assert "C4" in check_conditions(c).conditions()


def test_order_must_be_strict():
    c = certificate(CliqueSuperType(CliqueType.of({REFLEXIVE: 1}), frozenset()), ll=[(REFLEXIVE, REFLEXIVE)])
    assert "strict" in check_conditions(c).conditions()


def test_shared_unique_type_violates_third_condition():
    c = certificate(
        CliqueSuperType(CliqueType.of({REFLEXIVE: 1}), frozenset()),
        CliqueSuperType(CliqueType.of({REFLEXIVE: 1, PLAIN: 1}), frozenset()),
        v=[REFLEXIVE],
    )
    assert "C3" in check_conditions(c).conditions()


def test_cert_satisfies_per_kind():
    c = chain()
    assert cert_satisfies(c, BasicFormula(BasicKind.B1, pi=REFLEXIVE, mu=TRUE))
    assert not cert_satisfies(c, BasicFormula(BasicKind.B5, pi=REFLEXIVE))
    assert not cert_satisfies(c, BasicFormula(BasicKind.B6, pi=REFLEXIVE))
    assert cert_satisfies(c, BasicFormula(BasicKind.B4, pi=REFLEXIVE, pi2=PLAIN))
    assert cert_satisfies(c, BasicFormula(BasicKind.B3, pi=REFLEXIVE, pi2=PLAIN))

    pair = certificate(CliqueSuperType(CliqueType.of({REFLEXIVE: 2}), frozenset()), v=[REFLEXIVE])
    assert cert_satisfies(pair, BasicFormula(BasicKind.B5, pi=REFLEXIVE))
    assert cert_satisfies(pair, BasicFormula(BasicKind.B1, pi=REFLEXIVE, mu=TRUE))
    assert not cert_satisfies(pair, BasicFormula(BasicKind.B6, pi=REFLEXIVE))


def test_certificate_of_two_clique(sig_pt):
    s = Structure.build(2, sig_pt, {"p": [0, 1], "T": [(0, 0), (0, 1), (1, 0), (1, 1)], "That": [0, 1]})
    c = certificate_of(s)
    assert len(c.omega) == 1
    assert c.omega[0].xi.count(REFLEXIVE) == 2
    assert c.v == {REFLEXIVE}
    assert c.ll == frozenset()
    assert check_conditions(c).ok


def test_certificate_of_order(sig_pt):
    s = Structure.build(2, sig_pt, {"p": [0], "T": [(0, 1)]})
    c = certificate_of(s)
    first, second = LONE, FlutedType.of(1, {"p": False, "That": False})
    assert c.ll == {(first, second)}
    assert check_conditions(c).ok


def test_certificate_of_rejects_bad_structures(sig_pt):
    with pytest.raises(NotWellFormed):
        certificate_of(Structure.build(3, sig_pt, {"T": [(0, 1), (1, 2)]}))
    split = Structure.build(4, sig_pt, {
        "p": [0, 2],
        "T": [(0, 1), (1, 0), (0, 0), (1, 1), (2, 2), (3, 3)],
        "That": [0, 1, 2, 3],
    })
    with pytest.raises(NotQuadratic):
        certificate_of(split)


def test_certificate_document_round_trip():
    c = certificate(
        CliqueSuperType(CliqueType.of({REFLEXIVE: 1}), frozenset({PLAIN})),
        CliqueSuperType(CliqueType.of({PLAIN: 2}), frozenset()),
        ll=[(REFLEXIVE, PLAIN)],
    )
    assert Certificate.from_dict(c.to_dict()) == c


def only_reflexive_p(sig_pt, *extra):
    p, t_hat = Atom(sig_pt.lookup("p")), Atom(sig_pt.lookup("That"))
    formulas = (BasicFormula(BasicKind.B8, mu=TRUE), BasicFormula(BasicKind.B7, mu=And((p, t_hat)))) + extra
    return BasicSet(formulas, sig_pt)


def test_search_finds_certificate(sig_pt):
    phi = only_reflexive_p(sig_pt, BasicFormula(BasicKind.B1, pi=REFLEXIVE, mu=TRUE))
    result = search(phi, max_omega=3)
    assert result.status == SearchStatus.SAT
    assert check_conditions(result.certificate).ok
    assert all(cert_satisfies(result.certificate, f) for f in phi.formulas)


def test_search_exhausts_cap_without_certificate(sig_pt):
    phi = only_reflexive_p(
        sig_pt,
        BasicFormula(BasicKind.B1, pi=REFLEXIVE, mu=TRUE),
        BasicFormula(BasicKind.B6, pi=REFLEXIVE),
    )
    assert search(phi, max_omega=3).status == SearchStatus.UNSAT_AT_CAP


def test_search_respects_budget(sig_pt):
    phi = only_reflexive_p(sig_pt, BasicFormula(BasicKind.B1, pi=REFLEXIVE, mu=TRUE))
    assert search(phi, max_omega=3, budget=Budget(nodes=0)).status == SearchStatus.BUDGET_EXHAUSTED


DOWN = FlutedType.of(1, {"p": False, "That": False})


def irreflexive_successor(sig_pt):
    p, t_hat = Atom(sig_pt.lookup("p")), Atom(sig_pt.lookup("That"))
    return BasicSet((
        BasicFormula(BasicKind.B8, mu=TRUE),
        BasicFormula(BasicKind.B7, mu=And((Not(t_hat), Not(p)))),
        BasicFormula(BasicKind.B1, pi=DOWN, mu=TRUE),
    ), sig_pt)


def test_soliton_may_witness_itself_through_its_reach(sig_pt):
    phi = irreflexive_successor(sig_pt)
    looped = certificate(CliqueSuperType(CliqueType.of({DOWN: 1}), frozenset({DOWN})))
    assert check_conditions(looped).ok
    assert all(cert_satisfies(looped, f) for f in phi.formulas)

    for cap in (2, 3, 4):
        result = search(phi, max_omega=cap)
        assert result.status == SearchStatus.SAT
        assert DOWN in result.certificate.omega[0].pi


def test_paddings_cover_every_choice_of_cliques():
    sig = Signature.build({"p": 1, "z0": 1, "z1": 1}, ["T"])
    phi = BasicSet((BasicFormula(BasicKind.B8, mu=TRUE),), sig, padding=("z0", "z1"))
    engine = _Search(phi, 4, Budget(), False, 1)
    assert len(engine.padding_types) == 3
    reflexive = [pi for pi in engine.types if pi.value("That")]
    soliton = next(pi for pi in engine.types if not pi.value("That"))
    nodes = [CliqueType.of({reflexive[0]: 1}), CliqueType.of({soliton: 1}), CliqueType.of({reflexive[1]: 1})]

    choices = list(engine._paddings(nodes))
    assert len(choices) == 4
    padded = {tuple(i for i, extra in enumerate(choice) if extra is not None) for choice in choices}
    assert padded == {(), (0,), (2,), (0, 2)}
    for choice in choices:
        extras = [e for e in choice if e is not None]
        assert len(set(extras)) == len(extras)
        assert all(e.value("z0") or e.value("z1") for e in extras)


def test_paddings_stop_at_available_improper_types():
    sig = Signature.build({"z0": 1}, ["T"])
    phi = BasicSet((BasicFormula(BasicKind.B8, mu=TRUE),), sig, padding=("z0",))
    engine = _Search(phi, 4, Budget(), False, 1)
    assert len(engine.padding_types) == 1
    reflexive = next(pi for pi in engine.types if pi.value("That"))
    nodes = [CliqueType.of({reflexive: 1}), CliqueType.of({reflexive: 2})]
    padded = [sum(e is not None for e in choice) for choice in engine._paddings(nodes)]
    assert sorted(padded) == [0, 1, 1]


def test_reach_includes_a_node_only_through_a_cycle(sig_pt):
    engine = _Search(irreflexive_successor(sig_pt), 3, Budget(), False, 1)
    nodes = [CliqueType.of({DOWN: 1}), CliqueType.of({REFLEXIVE: 1}), CliqueType.of({PLAIN: 1})]
    assert engine.reach(nodes, {(0, 1)}) == [frozenset({REFLEXIVE}), frozenset(), frozenset()]
    assert engine.reach(nodes, {(0, 0)})[0] == frozenset({DOWN})
    reach = engine.reach(nodes, {(1, 2), (2, 1)})
    assert reach[1] == reach[2] == frozenset({REFLEXIVE, PLAIN})
    assert reach[0] == frozenset()


def test_certificates_of_random_quadratic_structures():
    sig = Signature.build({"p": 1, "q": 1}, ["T"])
    rng = random.Random(12)
    checked = 0
    while checked < 200:
        s = random_structure(rng, sig, rng.randint(1, 6))
        if not is_quadratic(s):
            continue
        c = certificate_of(s)
        assert check_conditions(c).ok
        assert not any(a == b for a, b in c.ll)
        assert all((a, d) in c.ll for a, b in c.ll for b2, d in c.ll if b == b2)
        for _ in range(20):
            f = random_basic_formula(rng, sig)
            if eval_formula(s, f.to_formula(sig)):
                assert cert_satisfies(c, f), f
        checked += 1
