import random

import pytest

from app.errors import FlutedSyntaxError
from app.models.basic import BasicFormula, BasicKind, BasicSet
from app.models.formula import TRUE, Signature, conjoin
from app.models.structure import FlutedType
from app.services.basic_reduction import (
    parse_basic_set, parse_type, proper_types, quadratic_transform, render_basic_set, spread_to_basic, unary_types,
)
from app.services.normal_form import to_normal_form, to_spread
from app.services.oracle import find_model
from app.services.semantics import eval_formula
from app.services.syntax import parse
from tests.conftest import random_basic_set


@pytest.fixture
def successor_basic(sig_pt) -> BasicSet:
    nf = to_normal_form(parse("forall exists (T & !=)", sig_pt), 2, sig_pt)
    return spread_to_basic(to_spread(nf, ()))


def test_unary_types_cover_every_vector(sig_pt):
    types = unary_types(sig_pt)
    assert len(types) == 4
    assert types == sorted(types)
    assert FlutedType.of(1, {"p": True, "That": False}) in types


def test_successor_demand_becomes_b1(successor_basic):
    assert BasicFormula(BasicKind.B8, mu=TRUE) in successor_basic.formulas
    b1 = successor_basic.of_kind(BasicKind.B1)
    assert b1
    assert not successor_basic.of_kind(BasicKind.B2)
    assert all(p.arity == 1 for p in successor_basic.signature.unary)


def test_basic_set_text_round_trip(successor_basic):
    again = parse_basic_set(render_basic_set(successor_basic))
    assert again.formulas == successor_basic.formulas
    assert {p.name for p in again.signature.unary} == {p.name for p in successor_basic.signature.unary}


def test_parse_basic_set_errors():
    with pytest.raises(FlutedSyntaxError):
        parse_basic_set("")
    with pytest.raises(FlutedSyntaxError):
        parse_basic_set("sig { p/1 } trans { T } eq\nB9 [p, That]\n")


def test_parse_type_must_cover_signature(sig_pt):
    assert parse_type("[p, !That]", sig_pt) == FlutedType.of(1, {"p": True, "That": False})
    with pytest.raises(FlutedSyntaxError):
        parse_type("[p]", sig_pt)


def test_quadratic_transform_pads_types(successor_basic):
    quadratic = quadratic_transform(successor_basic)
    width = 2 * len(successor_basic.signature.unary)
    assert len(quadratic.padding) == width
    for f in quadratic.of_kind(BasicKind.B1, BasicKind.B2):
        assert all(f.pi.value(name) is False for name in quadratic.padding)
    mapping = proper_types(quadratic.signature, quadratic.padding)
    assert len(mapping) == 2 ** len(successor_basic.signature.unary)
    for padded, original in mapping.items():
        assert padded.as_dict().items() >= original.as_dict().items()


def test_basic_formula_shapes():
    pi = FlutedType.of(1, {"p": True, "That": True})
    with pytest.raises(ValueError):
        BasicFormula(BasicKind.B3, pi=pi, pi2=pi)
    with pytest.raises(ValueError):
        BasicFormula(BasicKind.B1)
    sig = Signature.build({"p": 1}, ["T"])
    assert BasicFormula(BasicKind.B7, mu=None).mu == TRUE
    expected = parse("forall ((That & p) -> forall ((That & p) -> (= | T)))", sig)
    assert BasicFormula(BasicKind.B5, pi=pi).to_formula(sig) == expected


def basic_sentence(phi: BasicSet):
    return conjoin(f.to_formula(phi.signature) for f in phi.formulas)


@pytest.mark.parametrize("count", [15, pytest.param(100, marks=pytest.mark.slow)])
def test_padding_keeps_small_models(sig_pt, count):
    rng = random.Random(31)
    for _ in range(count):
        phi = random_basic_set(rng, sig_pt, count=3)
        star = quadratic_transform(phi)
        original = find_model(basic_sentence(phi), 2, signature=phi.signature)
        padded = find_model(basic_sentence(star), 2, signature=star.signature)
        assert (original is None) == (padded is None)
        if padded is None:
            continue
        proper = [a for a in padded.elements
                  if not any(padded.holds(star.signature.lookup(name), (a,)) for name in star.padding)]
        restricted = padded.restrict(proper)
        assert all(eval_formula(restricted, f.to_formula(phi.signature)) for f in phi.formulas)
