import random

import pytest

from app.errors import ContextTooShort
from app.models.formula import Atom, Exists, Forall, Implies
from app.models.structure import FlutedType, Structure
from app.services.corpus import example2_prefix
from app.services.semantics import (
    check_wellformed, cliques, close_transitive, eval_formula, fluted_type_of, inflate, is_quadratic,
    kings, realized_types,
)
from app.services.syntax import render_with_variables
from tests.conftest import random_formula, random_structure
from tests.fo_reader import evaluate, read


def test_transitivity_violation_reported(sig_pt):
    s = Structure.build(3, sig_pt, {"T": [(0, 1), (1, 2)]})
    assert check_wellformed(s).transitivity_violations == (("T", 0, 1, 2),)
    closed = Structure.build(3, sig_pt, {"T": [(0, 1), (1, 2), (0, 2)]})
    assert check_wellformed(closed).ok


def test_t_hat_mismatch_reported(sig_pt):
    s = Structure.build(1, sig_pt, {"That": [0]})
    report = check_wellformed(s)
    assert report.t_hat_mismatches == (0,)
    assert not report.ok


def test_close_transitive_repairs_structure(sig_pt):
    s = close_transitive(Structure.build(3, sig_pt, {"T": [(0, 1), (1, 0), (1, 2)]}))
    assert check_wellformed(s).ok
    assert {(0, 0), (1, 1), (0, 2)} <= s.relation("T")
    assert s.relation("That") == {(0,), (1,)}


def test_phi1_has_no_three_element_model(phi1):
    signature, formula = phi1
    missing_witness = Structure.build(3, signature, {"T1": [(0, 1), (0, 2), (1, 2)]})
    assert eval_formula(missing_witness, formula) is False
    total = close_transitive(Structure.build(3, signature, {"T1": [(a, b) for a in range(3) for b in range(3)]}))
    assert eval_formula(total, formula) is False


def test_phi2_holds_on_the_natural_number_prefix(phi2):
    _, formula = phi2
    s = example2_prefix(10)
    partition, disjoint = formula.parts[1], formula.parts[2]
    assert eval_formula(s, partition)
    assert eval_formula(s, disjoint)
    for i, conjunct in enumerate(formula.parts[3:]):
        guard = conjunct.body.left
        exists_part, forall_part = conjunct.body.right.parts
        assert eval_formula(s, Forall(Implies(guard, forall_part)))
        for k in range(9):
            if k % 3 == i:
                assert eval_formula(s, exists_part, (k,))


def test_eval_rejects_short_context(sig_pt):
    s = Structure.build(2, sig_pt)
    with pytest.raises(ContextTooShort):
        eval_formula(s, Exists(Atom(sig_pt.lookup("T"))))


def test_fluted_types(sig_pt):
    s = Structure.build(2, sig_pt, {"p": [0], "T": [(0, 1)]})
    assert fluted_type_of(s, (0,)) == FlutedType.of(1, {"p": True, "That": False})
    pair = fluted_type_of(s, (0, 1))
    assert pair.value("T") is True and pair.value("=") is False
    assert fluted_type_of(s, (0, 0)).value("=") is True


def test_cliques_and_solitons(sig_pt):
    s = Structure.build(3, sig_pt, {"T": [(0, 1), (1, 0), (0, 0), (1, 1)], "That": [0, 1]})
    partition = cliques(s)
    assert partition.blocks == (frozenset({0, 1}), frozenset({2}))
    assert partition.soliton_flags == (False, True)

    identity = Structure.build(2, sig_pt, {"T": [(0, 0), (1, 1)], "That": [0, 1]})
    assert cliques(identity).soliton_flags == (False, False)
    assert cliques(Structure.build(1, sig_pt)).soliton_flags == (True,)


def test_kings(sig_pt):
    distinct = Structure.build(2, sig_pt, {"p": [0]})
    assert kings(distinct).kings == {0, 1}
    same = Structure.build(2, sig_pt, {"p": [0, 1]})
    assert kings(same).kings == frozenset()
    three = Structure.build(3, sig_pt, {"p": [0, 1]})
    report = kings(three)
    assert report.kings == {2}
    assert report.royal_types == {fluted_type_of(three, (2,))}


def test_quadratic_examples(sig_pt):
    both = {"T": [(0, 1), (1, 0), (0, 0), (1, 1)], "That": [0, 1]}
    assert is_quadratic(Structure.build(2, sig_pt, {**both, "p": [0]}))

    split = Structure.build(4, sig_pt, {
        "p": [0, 2],
        "T": [(0, 1), (1, 0), (0, 0), (1, 1), (2, 2), (3, 3)],
        "That": [0, 1, 2, 3],
    })
    assert not is_quadratic(split)
    assert is_quadratic(Structure.build(1, sig_pt))


def test_inflate_fixed_points(sig_pt):
    all_kings = Structure.build(2, sig_pt, {"p": [0]})
    assert inflate(all_kings, 3) == all_kings
    s = Structure.build(2, sig_pt, {"p": [0, 1]})
    assert inflate(s, 1) == s
    doubled = inflate(s, 2)
    assert doubled.size == 4
    assert realized_types(doubled, 2) == realized_types(s, 2)


def test_inflate_preserves_two_types_and_transitivity(sig_pt):
    rng = random.Random(11)
    for _ in range(100):
        s = random_structure(rng, sig_pt, rng.randint(1, 5))
        copies = rng.randint(1, 3)
        inflated = inflate(s, copies)
        assert check_wellformed(inflated).ok
        assert realized_types(inflated, 2) == realized_types(s, 2)


def test_cliques_are_homogeneous(sig_pt):
    rng = random.Random(5)
    for _ in range(50):
        s = random_structure(rng, sig_pt, rng.randint(1, 6), density=0.6)
        t = s.relation("T")
        blocks = cliques(s).blocks
        for first in blocks:
            for second in blocks:
                if first is second:
                    continue
                links = {(a, b) in t for a in first for b in second}
                assert len(links) == 1


def test_eval_agrees_with_first_order_reading(sig_pqr):
    rng = random.Random(3)
    for _ in range(200):
        formula = random_formula(rng, sig_pqr, 0, 4)
        s = random_structure(rng, sig_pqr, rng.randint(1, 4))
        assert eval_formula(s, formula) == evaluate(read(render_with_variables(formula)), s)
