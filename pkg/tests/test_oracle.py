import pytest

from app.errors import BoundExceeded, UnknownPredicate
from app.models.formula import Signature
from app.models.structure import Structure
from app.services.oracle import EXACTLY, check_model, find_model, formula_signature, prepare_model
from app.services.semantics import check_wellformed, eval_formula
from app.services.syntax import parse


def test_formula_signature_adds_diagonal(sig_pt):
    sig = formula_signature(parse("forall exists T", sig_pt))
    assert sig.t_hat.name == "That"


def test_finds_small_model(sig_pt):
    formula = parse("(exists p & forall (p -> exists (T & !p)))", sig_pt)
    model = find_model(formula, 3)
    assert model is not None and model.size == 2
    assert check_wellformed(model).ok
    assert check_model(model, formula)


def test_exact_size(sig_pt):
    formula = parse("forall forall (T | =)", sig_pt)
    model = find_model(formula, 3, mode=EXACTLY)
    assert model.size == 3
    assert eval_formula(model, formula)


def test_phi1_has_no_model_up_to_three(phi1):
    _, formula = phi1
    assert find_model(formula, 3) is None


@pytest.mark.slow
def test_phi1_has_no_model_up_to_five(phi1):
    _, formula = phi1
    assert find_model(formula, 5) is None


def test_size_bound(phi1):
    _, formula = phi1
    with pytest.raises(BoundExceeded):
        find_model(formula, 100)
    with pytest.raises(ValueError):
        find_model(formula, 2, mode="sometimes")


def test_check_model_requires_transitivity(sig_pt):
    formula = parse("forall forall (T | !T)", sig_pt)
    broken = Structure.build(3, sig_pt, {"T": [(0, 1), (1, 2)]})
    assert not check_model(broken, formula)
    repaired = prepare_model(broken, formula, repair_closure=True)
    assert check_model(repaired, formula)


def test_prepare_model_rejects_unknown_predicates(sig_pt):
    other = Signature.build({"q": 1}, ["T"])
    s = Structure.build(1, sig_pt)
    with pytest.raises(UnknownPredicate):
        prepare_model(s, parse("exists q", other))


@pytest.mark.slow
def test_phi2_has_no_model_up_to_five(phi2):
    signature, formula = phi2
    assert find_model(formula, 5, signature=signature) is None
