import pytest

from app.errors import MissingInitialTile
from app.models.formula import And, Atom, Forall, Implies, Or
from app.models.tiling import TilingSystem
from app.services.corpus import (
    address_2T, build_2T_grid, build_2T_torus, conjunct_count_2T, encode_2T, example2_prefix, grid2t_properties,
    grid_points, phi_grid_2T, uniform_tiling,
)
from app.services.oracle import find_model
from app.services.semantics import check_wellformed, eval_formula


def test_example_signatures(phi1, phi2):
    sig1, _ = phi1
    sig2, _ = phi2
    assert [p.name for p in sig1.transitive] == ["T1"]
    assert sig1.equality is not None
    assert [p.name for p in sig2.transitive] == ["T1", "T2"]
    assert sig2.equality is None


def test_example2_prefix():
    s = example2_prefix(10)
    assert s.relation("p0") == {(0,), (3,), (6,), (9,)}
    assert (0, 2) in s.relation("T1") and (0, 1) not in s.relation("T1")
    assert (3, 1) in s.relation("T2")
    assert check_wellformed(s).ok
    with pytest.raises(ValueError):
        example2_prefix(0)


def test_conjunct_count_grows_with_tiles():
    for count in (1, 2, 3):
        tiles = tuple(f"t{k}" for k in range(count))
        ts = TilingSystem(tiles, frozenset(), frozenset(), tiles[0])
        _, formula = encode_2T(ts)
        assert len(formula.parts) == conjunct_count_2T(count) == 36 + 16 * count


def test_encoding_needs_initial_tile():
    with pytest.raises(MissingInitialTile):
        encode_2T(TilingSystem(("a",), frozenset(), frozenset()))


def test_grid_axioms_hold_on_smallest_torus():
    _, formula = phi_grid_2T()
    torus = build_2T_torus(1)
    assert check_wellformed(torus).ok
    assert eval_formula(torus, formula)


def test_single_tile_encoding_holds_on_uniform_torus():
    ts = TilingSystem.single()
    _, formula = encode_2T(ts)
    torus = build_2T_torus(1, ts, uniform_tiling(grid_points(4, 4), "c"))
    assert eval_formula(torus, formula)


def test_grid_window_properties():
    grid = build_2T_grid(8, 8)
    assert check_wellformed(grid).ok
    assert grid2t_properties(grid, 8, 8).ok
    assert grid2t_properties(build_2T_torus(2), 8, 8).ok
    with pytest.raises(ValueError):
        build_2T_grid(3, 8)


@pytest.mark.parametrize("m", [2, pytest.param(3, marks=pytest.mark.slow)])
def test_grid_encoding_holds_on_larger_tori(m):
    ts = TilingSystem.single()
    _, formula = encode_2T(ts)
    side = 4 * m
    torus = build_2T_torus(m, ts, uniform_tiling(grid_points(side, side), "c"))
    assert check_wellformed(torus).ok
    assert all(eval_formula(torus, part) for part in formula.parts)
    _, grid = phi_grid_2T()
    assert eval_formula(build_2T_torus(m), grid)


def test_blue_links_reach_an_address_twice_beyond_the_smallest_torus():
    sig, _ = phi_grid_2T()
    c = lambda i, j: Atom(sig.lookup(address_2T(i, j)))
    t1, t2 = Atom(sig.lookup("T1")), Atom(sig.lookup("T2"))
    loose = Forall(Implies(c(0, 0), Forall(Implies(And((Or((t1, t2)), Or((c(0, 3), c(3, 0))))), And((t1, t2))))))
    assert eval_formula(build_2T_torus(1), loose)
    assert not eval_formula(build_2T_torus(2), loose)


def test_addresses_follow_coordinates():
    grid = build_2T_grid(8, 8)
    points = grid_points(8, 8)
    for k, (x, y) in enumerate(points):
        assert (k,) in grid.relation(f"c{x % 4}{y % 4}")


def test_no_horizontal_pairs_is_unsat_on_one_element():
    ts = TilingSystem(("a",), frozenset(), frozenset({("a", "a")}), "a")
    _, formula = encode_2T(ts)
    assert find_model(formula, 1) is None


@pytest.mark.slow
def test_no_horizontal_pairs_is_unsat_on_two_elements():
    ts = TilingSystem(("a",), frozenset(), frozenset({("a", "a")}), "a")
    _, formula = encode_2T(ts)
    assert find_model(formula, 2) is None
