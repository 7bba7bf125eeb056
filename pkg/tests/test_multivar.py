import random

import pytest

from app.errors import BoundExceeded, IndexSetTooLarge, NotReducible
from app.models.certificate import SearchStatus
from app.models.formula import Signature
from app.models.forms import MinimalCover
from app.models.solve import SolveOptions
from app.services.multivar import minimal_covers, reduce_arity, royal_candidates, royal_guesses, solve
from app.services.normal_form import normal_form_to_formula, to_normal_form
from app.services.oracle import EXACTLY, find_model
from app.services.syntax import parse, validate
from tests.conftest import random_formula

SMALL = SolveOptions(max_omega=3, royal_cap=1, depth=4, budget_seconds=60)


def test_minimal_covers_of_small_sets():
    assert minimal_covers([]) == (MinimalCover(()),)
    assert minimal_covers([5]) == (MinimalCover((frozenset({5}),)),)
    two = minimal_covers([1, 2])
    assert set(two) == {
        MinimalCover((frozenset({1, 2}),)),
        MinimalCover((frozenset({1}), frozenset({2}))),
    }
    assert len(minimal_covers([1, 2, 3])) == 8


def test_minimal_covers_are_minimal():
    for cover in minimal_covers([1, 2, 3, 4]):
        assert cover.union == {1, 2, 3, 4}
        for cell in cover.cells:
            rest = frozenset().union(*(c for c in cover.cells if c is not cell))
            assert rest != {1, 2, 3, 4}


def test_cover_bound():
    with pytest.raises(IndexSetTooLarge):
        minimal_covers(range(6))


def test_reduce_arity_drops_a_variable():
    sig = Signature.build({"r": 3}, ["T"])
    nf = to_normal_form(parse("forall exists (T & != & exists (T & != & r))", sig), 3, sig)
    assert len(nf.exist) == 2
    reduced = reduce_arity(nf)
    assert reduced.m == 2
    assert max(p.arity for p in reduced.signature) <= 2
    assert reduced.exist
    with pytest.raises(NotReducible):
        reduce_arity(reduced)


def test_royal_guesses_respect_cap(sig_pt):
    nf = to_normal_form(parse("forall exists (T & !=)", sig_pt), 2, sig_pt)
    candidates = royal_candidates(nf)
    assert candidates
    guesses = list(royal_guesses(candidates, 1))
    assert guesses[0] == ()
    assert all(len(g) <= 1 for g in guesses)
    assert len(guesses) == len(candidates) + 1


def test_solve_successor_sentence(sig_pt):
    events = []
    outcome = solve(parse("forall exists (T & !=)", sig_pt), 2, sig_pt, SMALL,
                    observer=lambda name, data: events.append(name))
    assert outcome.status == SearchStatus.SAT
    assert outcome.prefix is not None
    assert outcome.prefix_report.ok
    assert events[0] == "solve.normalized"
    assert events[-1] == "solve.finished"
    assert "solve.certificate" in events


def test_solve_phi1_has_only_infinite_models(phi1):
    signature, formula = phi1
    outcome = solve(formula, 2, signature, SMALL)
    assert outcome.status == SearchStatus.SAT
    assert outcome.certificate is not None
    t = outcome.prefix.structure.relation(outcome.certificate.transitive)
    assert t
    assert all(a != b for a, b in t)


def test_solve_reports_unsat_at_cap(sig_pt):
    formula = parse("(forall exists T & forall forall !T)", sig_pt)
    outcome = solve(formula, 2, sig_pt, SMALL)
    assert outcome.status == SearchStatus.UNSAT_AT_CAP
    assert outcome.certificate is None
    assert outcome.guesses >= 1


def test_solve_out_of_budget(phi1):
    signature, formula = phi1
    outcome = solve(formula, 2, signature, SolveOptions(max_omega=3, royal_cap=1, budget_seconds=0))
    assert outcome.status == SearchStatus.BUDGET_EXHAUSTED


def three_variable_normal_forms(rng, signature, count):
    found = 0
    while found < count:
        formula = random_formula(rng, signature, 0, 4)
        if validate(formula).variable_bound != 3:
            continue
        nf = to_normal_form(formula, 3, signature)
        try:
            reduced = reduce_arity(nf)
        except IndexSetTooLarge:
            continue
        found += 1
        yield nf, reduced


@pytest.mark.parametrize("count, sizes", [(5, (1, 2)), pytest.param(20, (1, 2, 3), marks=pytest.mark.slow)])
def test_reduce_arity_keeps_each_cardinality(count, sizes):
    sig = Signature.build({"p": 1, "r": 3}, ["T"])
    rng = random.Random(23)
    compared = 0
    for nf, reduced in three_variable_normal_forms(rng, sig, count):
        for n in sizes:
            try:
                before = find_model(normal_form_to_formula(nf), n, mode=EXACTLY, signature=nf.signature)
                after = find_model(normal_form_to_formula(reduced), n, mode=EXACTLY, signature=reduced.signature)
            except BoundExceeded:
                continue
            assert (before is None) == (after is None)
            compared += 1
    assert compared
