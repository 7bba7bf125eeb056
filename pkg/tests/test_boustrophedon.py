import pytest

from app.errors import MissingTiles
from app.models.tiling import TilingSystem
from app.services.boustrophedon import (
    COLUMN_DOWN, COLUMN_UP, FAMILIES, ROW_LEFT, GenerationRule, LinkRule, addresses, boustrophedon, check_prefix_3T,
    check_states, colour_indices, colour_table, conjuncts_3T, encode_3T, encode_3T_finite, intended_3T_prefix,
    intended_3T_square, phi_grid_3T, signature_3T,
)
from app.services.syntax import validate

BACKWARD = (COLUMN_DOWN, ROW_LEFT)


def test_colour_table_rows():
    table = colour_table()
    for family in FAMILIES:
        for k in range(6):
            row = (-k) % 6 if family in BACKWARD else k
            assert colour_indices(family, k) == table[family][row], (family, k)


def test_unknown_family():
    with pytest.raises(ValueError):
        colour_indices("diagonal", 0)


def test_path_start_and_distinctness():
    states = boustrophedon(300)
    assert len({s.coords for s in states}) == 300
    first, second = states[0], states[1]
    assert (first.coords, first.address, first.controls) == ((0, 0), "d00", {"dg", "bt"})
    assert (second.coords, second.address, second.controls) == ((0, 1), "c01", {"dgp", "lf"})
    assert [s.coords for s in states[:9]] == [(0, 0), (0, 1), (1, 1), (1, 0), (2, 0), (2, 1), (2, 2), (1, 2), (0, 2)]
    with pytest.raises(ValueError):
        boustrophedon(0)


def test_signature_has_three_colours():
    sig = signature_3T()
    assert [p.name for p in sig.transitive] == ["T0", "T1", "T2"]
    assert sig.equality is None
    assert sig.t_hat is None
    assert len(addresses()) == 72
    assert "rt" in signature_3T(finite=True)


def test_grid_sentence_is_two_variable():
    _, formula = phi_grid_3T()
    assert validate(formula).variable_bound == 2


def test_encodings_need_corner_tiles():
    with pytest.raises(MissingTiles):
        encode_3T(TilingSystem(("a",), frozenset(), frozenset()))
    with pytest.raises(MissingTiles):
        encode_3T_finite(TilingSystem(("a",), frozenset(), frozenset(), "a"))
    sig, _ = encode_3T(TilingSystem.single())
    assert "tile_c" in sig


def test_intended_prefix_follows_path():
    steps = 300
    s = intended_3T_prefix(steps)
    report = check_states(boustrophedon(steps), s)
    assert report.ok, report.failures()


def test_intended_prefix_satisfies_conjuncts():
    s = intended_3T_prefix(120)
    report = check_prefix_3T(s, conjuncts_3T())
    assert report.ok, report.failures()
    for check in report.unchecked():
        assert check.detail == str(s.size - 1)


def test_rule_groups():
    rules = conjuncts_3T()
    assert any(isinstance(r, GenerationRule) for r in rules)
    assert any(isinstance(r, LinkRule) and r.group == "transfer" for r in rules)


def test_single_tile_square_is_a_model():
    ts = TilingSystem.single()
    states = boustrophedon(16, rt_column=3)
    tiling = {st.coords: "c" for st in states}
    s = intended_3T_square(2, ts, tiling)
    rules = conjuncts_3T(ts, finite=True)
    report = check_prefix_3T(s, rules)
    assert report.ok, report.failures()
    assert not report.unchecked()
    assert check_states(states, s).ok


def test_intended_prefix_arguments():
    with pytest.raises(ValueError):
        intended_3T_prefix(4, rt_column=2)
    with pytest.raises(ValueError):
        intended_3T_prefix(20, rt_column=3)
    with pytest.raises(ValueError):
        intended_3T_prefix(4, tiling={(0, 0): "c"})
    with pytest.raises(ValueError):
        intended_3T_square(0)
