import random

import pytest

from app.errors import ArityExceedsContext, FlutedSyntaxError, UnknownPredicate
from app.models.formula import TRUE, And, Atom, Exists, Forall, Implies, Not, Or, Signature, Xor
from app.services.syntax import (
    parse, parse_document, print_document, print_formula, render_with_variables, validate,
)
from tests.conftest import random_formula
from tests.fo_reader import read


@pytest.fixture
def school() -> Signature:
    return Signature.build({"student": 1, "prof": 1, "admires": 2, "intro": 3}, ["T"])


def test_parse_nobody_admires_every_professor(school):
    f = parse("forall (student -> !forall (prof -> admires))", school)
    assert f == Forall(Implies(
        Atom(school.lookup("student")),
        Not(Forall(Implies(Atom(school.lookup("prof")), Atom(school.lookup("admires"))))),
    ))


def test_parse_constants_and_comments(school):
    assert parse("true", school) == TRUE
    assert parse("# a comment\n  true  ", school) == TRUE


def test_parse_unknown_predicate(school):
    with pytest.raises(UnknownPredicate) as excinfo:
        parse("forall tutor", school)
    assert excinfo.value.name == "tutor"


def test_syntax_error_carries_position(school):
    with pytest.raises(FlutedSyntaxError) as excinfo:
        parse("forall (student -> ", school)
    assert excinfo.value.position == 19


def test_mixed_connectives_need_parentheses(school):
    with pytest.raises(FlutedSyntaxError):
        parse("forall (student & prof | student)", school)


def test_validate_depth_figures(school):
    two = parse("forall (student -> !forall (prof -> admires))", school)
    assert validate(two) == validate(two, 0)
    result = validate(two)
    assert (result.quantifier_depth, result.max_arity, result.variable_bound) == (2, 2, 2)

    three = parse("forall (student -> forall (prof -> exists intro))", school)
    assert validate(three).variable_bound == 3


def test_validate_rejects_atom_above_context(school):
    with pytest.raises(ArityExceedsContext):
        validate(Atom(school.lookup("student")), 0)
    with pytest.raises(ArityExceedsContext) as excinfo:
        validate(parse("forall admires", school))
    assert excinfo.value.predicate == "admires"


def test_validate_is_monotone_in_free_prefix(school):
    f = parse("forall (prof -> admires)", school)
    assert validate(f, 1).variable_bound == 2
    assert validate(f, 2).variable_bound == 3


def test_print_formula_examples():
    sig = Signature.build({"p": 1, "q": 1}, ["T"])
    p, q, t = (Atom(sig.lookup(n)) for n in ("p", "q", "T"))
    assert print_formula(Forall(Implies(p, Exists(t)))) == "forall (p -> exists T)"
    assert print_formula(TRUE) == "true"
    assert print_formula(Xor((p, q))) == "(p ^ q)"


def test_document_round_trip(phi1):
    signature, formula = phi1
    text = print_document(signature, formula)
    header = text.splitlines()[0]
    assert "trans { T1 }" in header and header.endswith("eq")
    again_sig, again = parse_document(text)
    assert again == formula
    assert {p.name for p in again_sig} == {p.name for p in signature}


def test_random_round_trip(sig_pqr):
    rng = random.Random(7)
    for _ in range(1000):
        f = random_formula(rng, sig_pqr, 0, 5)
        assert parse(print_formula(f), sig_pqr) == f


def test_render_with_variables_free_prefix():
    sig = Signature.build({"prof": 1, "admires": 2}, ["T"])
    f = parse("forall (prof -> admires)", sig)
    assert render_with_variables(f, 1) == "forall x2 (prof(x2) -> admires(x1,x2))"
    assert render_with_variables(TRUE) == "true"


def test_rendering_reads_back_as_first_order(school):
    f = parse("forall (student -> !forall (prof -> admires))", school)
    tree = read(render_with_variables(f))
    assert tree[0] == "forall" and tree[1] == "x1"


def test_single_part_connectives_print_as_their_part():
    sig = Signature.build({"p": 1, "q": 1}, ["T"])
    p, q = Atom(sig.lookup("p")), Atom(sig.lookup("q"))
    for node in (And, Or, Xor):
        single = Forall(node((Implies(p, q),)))
        text = print_formula(single)
        assert text == "forall (p -> q)"
        reread = parse(text, sig)
        assert print_formula(reread) == text
        assert reread == Forall(Implies(p, q))


def test_equality_needs_eq_in_the_header():
    plain = Signature.build({"p": 1}, ["T"], equality=False)
    with pytest.raises(UnknownPredicate) as excinfo:
        parse("forall forall (T -> =)", plain)
    assert excinfo.value.name == "="
    with pytest.raises(UnknownPredicate):
        parse_document("sig { p/1 } trans { T }\nforall forall !=\n")
