import random

import pytest

from app.errors import BoundExceeded, NotASentence, SignatureNotTwoVariable, VariableBoundExceeded
from app.models.formula import Atom, Forall, Signature, is_quantifier_free, predicates_of
from app.services.normal_form import (
    assign_nullary, normal_form_conjuncts, normal_form_to_formula, pipeline_signature, spread_conjuncts,
    spread_to_formula, to_normal_form, to_spread,
)
from app.services.multivar import royal_candidates
from app.services.oracle import EXACTLY, find_model
from app.services.semantics import eval_formula
from app.services.syntax import parse, validate
from tests.conftest import random_formula


def test_pipeline_signature_adds_missing_symbols():
    sig = pipeline_signature(Signature.build({"p": 1}, [], equality=False))
    assert sig.equality is not None
    assert [p.name for p in sig.transitive] == ["T"]
    assert sig.t_hat.name == "That"


def test_rejects_bad_bounds(sig_pt):
    f = parse("forall exists T", sig_pt)
    with pytest.raises(VariableBoundExceeded):
        to_normal_form(f, 1, sig_pt)
    deep = parse("forall exists exists T", Signature.build({"r": 3}, ["T"]))
    with pytest.raises(VariableBoundExceeded):
        to_normal_form(deep, 2, Signature.build({"r": 3}, ["T"]))
    with pytest.raises(NotASentence):
        to_normal_form(Atom(sig_pt.lookup("p")), 2, sig_pt)


def test_conjunct_shapes(phi1):
    signature, formula = phi1
    nf = to_normal_form(formula, 2, signature)
    assert nf.m == 2
    for conjunct in normal_form_conjuncts(nf):
        assert isinstance(conjunct, Forall)
    for e in nf.exist:
        assert is_quantifier_free(e.mu)
        assert all(p.arity <= 1 for p in predicates_of(e.mu))
    for u in nf.univ:
        assert all(p.arity <= 1 for p in predicates_of(u.nu))
    assert all(name in {p.name for p in nf.signature} for name in nf.provenance)


def test_triggers_record_their_source(sig_pt):
    f = parse("forall (p -> (exists T | forall !T))", sig_pt)
    nf = to_normal_form(f, 2, sig_pt)
    assert "exists T" in nf.provenance.values()
    assert "forall !T" in nf.provenance.values()


def test_phi1_normal_form_has_no_small_model(phi1):
    signature, formula = phi1
    nf = to_normal_form(formula, 2, signature)
    assert find_model(normal_form_to_formula(nf), 3, signature=nf.signature) is None


def test_normal_form_is_equisatisfiable_on_small_domains(sig_pt):
    rng = random.Random(8)
    checked = 0
    while checked < 25:
        formula = random_formula(rng, sig_pt, 0, 3)
        bound = validate(formula).variable_bound
        if bound > 2:
            continue
        nf = to_normal_form(formula, 2, sig_pt)
        direct = find_model(formula, 2, signature=nf.signature)
        compiled = find_model(normal_form_to_formula(nf), 2, signature=nf.signature)
        assert (direct is None) == (compiled is None)
        checked += 1


def test_assign_nullary():
    sig = Signature.build({"a": 0, "p": 1}, ["T"])
    nf = to_normal_form(parse("(a -> forall exists (T & p))", sig), 2, sig)
    assigned = assign_nullary(nf, {"a": False})
    assert not assigned.signature.of_arity(0)
    assert len(assigned.univ) == len(nf.univ) - 1
    for u in assigned.univ:
        assert "a" not in {p.name for p in predicates_of(u.nu)}


def test_spread_markers_and_patterns(phi1):
    signature, formula = phi1
    nf = to_normal_form(formula, 2, signature)
    fresh_witnesses = [e for e in nf.exist if not e.kappa.equal]
    spread = to_spread(nf, ())
    markers = [e.marker for e in spread.exist if e.marker is not None]
    assert len(markers) == len(fresh_witnesses)
    assert len(spread.o_disjointness) == len(markers) * (len(markers) - 1) // 2
    assert spread.lambdas == ()
    assert len(spread_conjuncts(spread)) >= len(spread.exist)


def test_spread_requires_two_variables():
    sig = Signature.build({"r": 3}, ["T"])
    nf = to_normal_form(parse("forall exists exists r", sig), 3, sig)
    with pytest.raises(SignatureNotTwoVariable):
        to_spread(nf, ())


def small_sentences(rng, signature, count):
    found = 0
    while found < count:
        formula = random_formula(rng, signature, 0, 3)
        if validate(formula).variable_bound > 2:
            continue
        found += 1
        yield formula


def models_imply(stage, earlier, signature, size) -> bool:
    try:
        model = find_model(stage, size, signature=signature)
    except BoundExceeded:
        return True
    return model is None or eval_formula(model, earlier)


@pytest.mark.parametrize("count, size", [(30, 3), pytest.param(200, 4, marks=pytest.mark.slow)])
def test_staged_forms_imply_their_input(sig_pt, count, size):
    rng = random.Random(17)
    for formula in small_sentences(rng, sig_pt, count):
        nf = to_normal_form(formula, 2, sig_pt)
        compiled = normal_form_to_formula(nf)
        assert models_imply(compiled, formula, nf.signature, size)

        nullary = {p.name: rng.random() < 0.5 for p in nf.signature.of_arity(0)}
        assigned = assign_nullary(nf, nullary) if nullary else nf
        candidates = royal_candidates(assigned)
        royal = tuple(rng.sample(candidates, min(len(candidates), rng.randint(0, 1))))
        spread = to_spread(assigned, royal)
        assert models_imply(spread_to_formula(spread), normal_form_to_formula(assigned), spread.signature, size)


@pytest.mark.parametrize("size", [1, 2, pytest.param(3, marks=pytest.mark.slow)])
def test_normal_form_keeps_each_cardinality(sig_pt, size):
    rng = random.Random(19)
    for formula in small_sentences(rng, sig_pt, 25):
        nf = to_normal_form(formula, 2, sig_pt)
        direct = find_model(formula, size, mode=EXACTLY, signature=nf.signature)
        compiled = find_model(normal_form_to_formula(nf), size, mode=EXACTLY, signature=nf.signature)
        assert (direct is None) == (compiled is None)
