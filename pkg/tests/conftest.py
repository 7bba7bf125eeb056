import itertools
import random
from typing import Callable

import pytest

from app.models.basic import BasicFormula, BasicKind, BasicSet
from app.models.formula import (
    FALSE, TRUE, And, Atom, Exists, Forall, Formula, Implies, Not, Or, Signature, Xor,
)
from app.models.structure import Structure
from app.services.basic_reduction import unary_types
from app.services.corpus import example_formulas
from app.services.semantics import close_transitive


@pytest.fixture
def phi1():
    return example_formulas()["phi1"]


@pytest.fixture
def phi2():
    return example_formulas()["phi2"]


@pytest.fixture
def sig_pt() -> Signature:
    """One unary predicate p, transitive T with its diagonal That, and equality"""
    return Signature.build({"p": 1}, ["T"])


@pytest.fixture
def sig_pqr() -> Signature:
    return Signature.build({"p": 1, "q": 1, "r": 2}, ["T"])


def random_formula(rng: random.Random, signature: Signature, context: int, depth: int) -> Formula:
    """A random formula valid at the given context depth"""
    atoms = [p for p in signature if p.arity <= context]
    if depth == 0 or rng.random() < 0.25:
        if not atoms:
            return rng.choice([TRUE, FALSE])
        return Atom(rng.choice(atoms))
    choice = rng.randrange(7)
    if choice == 0:
        return Not(random_formula(rng, signature, context, depth - 1))
    if choice in (1, 2, 3):
        node = (And, Or, Xor)[choice - 1]
        return node(tuple(random_formula(rng, signature, context, depth - 1) for _ in range(rng.randint(2, 3))))
    if choice == 4:
        return Implies(random_formula(rng, signature, context, depth - 1),
                       random_formula(rng, signature, context, depth - 1))
    node = Forall if choice == 5 else Exists
    return node(random_formula(rng, signature, context + 1, depth - 1))


def random_structure(rng: random.Random, signature: Signature, size: int, density: float = 0.4) -> Structure:
    """Random relations with transitive ones closed and That synchronised"""
    relations = {}
    for pred in signature:
        if pred.name == "=" or pred.kind.value == "t_hat":
            continue
        if pred.arity == 0:
            relations[pred.name] = [()] if rng.random() < 0.5 else []
        elif pred.arity == 1:
            relations[pred.name] = [a for a in range(size) if rng.random() < density]
        else:
            relations[pred.name] = [
                t for t in itertools.product(range(size), repeat=pred.arity) if rng.random() < density / 2
            ]
    return close_transitive(Structure.build(size, signature, relations))


def random_unary_condition(rng: random.Random, signature: Signature) -> Formula:
    """A quantifier-free condition on one element"""
    preds = [p for p in signature.unary]
    literals = [
        Atom(p) if rng.random() < 0.5 else Not(Atom(p))
        for p in rng.sample(preds, rng.randint(1, min(2, len(preds))))
    ]
    if len(literals) == 1:
        return literals[0] if rng.random() < 0.8 else TRUE
    return (And if rng.random() < 0.5 else Or)(tuple(literals))


def random_basic_formula(rng: random.Random, signature: Signature) -> BasicFormula:
    types = unary_types(signature)
    kind = rng.choice(list(BasicKind))
    pi, pi2 = rng.sample(types, 2)
    if kind in (BasicKind.B3, BasicKind.B4):
        return BasicFormula(kind, pi=pi, pi2=pi2)
    if kind in (BasicKind.B5, BasicKind.B6):
        return BasicFormula(kind, pi=pi)
    mu = random_unary_condition(rng, signature)
    if kind in (BasicKind.B7, BasicKind.B8):
        return BasicFormula(kind, mu=mu)
    return BasicFormula(kind, pi=pi, mu=mu)


def random_basic_set(rng: random.Random, signature: Signature, count: int = 4) -> BasicSet:
    """A random basic set that always demands a non-empty domain"""
    formulas = [BasicFormula(BasicKind.B8, mu=TRUE)]
    formulas += [random_basic_formula(rng, signature) for _ in range(rng.randint(1, count))]
    return BasicSet(tuple(formulas), signature)


@pytest.fixture
def make_formula() -> Callable:
    return random_formula


@pytest.fixture
def make_structure() -> Callable:
    return random_structure
