from fractions import Fraction

import pytest
from entanglement_atlas.atlas import builtin_atlas
from entanglement_atlas.classical_invariants import (
    FOUR_QUBITS,
    HVector,
    ZeroPattern,
    check_relations,
    collision_groups,
    collision_table,
    evaluate,
    h_three_qubits,
    h_values,
    parse_polynomial,
    pattern_table,
    zero_pattern,
)
from entanglement_atlas.errors import InvalidArgument, ShapeMismatch
from entanglement_atlas.tensor_state import Shape, parse_state

C33 = "[1,1,1,1]+2*[1,1,2,2]-3*[1,2,1,2]-3*[2,1,2,1]+2*[2,2,1,1]+[2,2,2,2]"


def test_parse_polynomial():
    assert parse_polynomial("+111*122 -2*112*121") == (
        (1, ((0, 0, 0), (0, 1, 1))),
        (-2, ((0, 0, 1), (0, 1, 0))),
    )


def test_evaluate(qubits3):
    v = parse_state("2*[1,1,1]+3*[1,2,2]-[1,1,2]", qubits3)
    assert evaluate("+111*122 -112*121", v) == 6
    assert evaluate("-4*111*111", v) == -16


@pytest.mark.parametrize(("text", "h", "pattern"), [
    ("[1,1,1]+[2,2,2]", (0, 0, 0, 1), "0001"),
    ("[1,1,1]+[1,2,2]+[2,1,2]", (1, 1, -1, 0), "1110"),
    ("[1,1,1]+[2,2,1]", (0, 0, 1, 0), "0010"),
    ("[1,1,1]", (0, 0, 0, 0), "0000"),
])
def test_three_qubit_invariants(qubits3, text, h, pattern):
    values = h_values(parse_state(text, qubits3))
    assert values.values == h
    assert str(zero_pattern(values)) == pattern


def test_hyperdeterminant_scales_with_the_fourth_power(qubits3):
    v = parse_state("[1,1,1]+[2,2,2]", qubits3)
    assert h_three_qubits(v.scaled(Fraction(1, 2)))[4] == Fraction(1, 16)


def test_four_qubit_ghz():
    h = h_values(parse_state("[1,1,1,1]+[2,2,2,2]", FOUR_QUBITS))
    assert h.values == (1, 0, 0, 0, 0, 0, 0)
    assert str(zero_pattern(h)) == "1000000"
    assert check_relations(h)


def test_four_qubit_parametric_class():
    h = h_values(parse_state(C33, FOUR_QUBITS))
    assert (h[1], h[2], h[3], h[4]) == (14, -27, 32, -5)
    assert check_relations(h)
    assert h.to_strings()[:4] == ["14", "-27", "32", "-5"]


def test_relations_detect_inconsistent_values():
    assert not check_relations(HVector(tuple(Fraction(x) for x in (0, 1, 0, 0, 0, 0, 0))))
    with pytest.raises(InvalidArgument):
        check_relations(HVector((Fraction(0),) * 4))


def test_shapes_are_checked(qubits4):
    with pytest.raises(ShapeMismatch):
        h_values(parse_state("[1,1,1]", Shape((2, 2, 3))))
    with pytest.raises(ShapeMismatch):
        h_three_qubits(parse_state("[1,1,1,1]", qubits4))
    with pytest.raises(ShapeMismatch):
        pattern_table(Shape((2, 2, 3)))


def test_zero_pattern_parse():
    pattern = ZeroPattern.parse("0110")
    assert pattern.bits == (False, True, True, False)
    assert pattern.cells() == ["0", "!=0", "!=0", "0"]
    assert str(pattern) == "0110"
    for text in ["", "012"]:
        with pytest.raises(InvalidArgument):
            ZeroPattern.parse(text)


def test_three_qubit_pattern_table(qubits3):
    table = pattern_table(qubits3)
    assert list(table) == ["C0", "C1", "C2", "C3", "C4", "C5", "C6"]
    for record in builtin_atlas(qubits3).records:
        assert zero_pattern(h_values(record.state(qubits3))) in table[record.label]


def test_collision_groups(qubits3):
    groups = collision_groups(pattern_table(qubits3))
    assert groups["0000"] == ["C0", "C1"]
    assert groups["0001"] == ["C6"]
    assert sum(len(labels) for labels in groups.values()) == 7


def test_collision_groups_count_each_class_once():
    patterns = {"A": [ZeroPattern.parse("01"), ZeroPattern.parse("01")], "B": [ZeroPattern.parse("01")]}
    assert collision_groups(patterns) == {"01": ["A", "B"]}


def test_four_qubit_representatives_match_the_pattern_table(qubits4):
    table = pattern_table(qubits4)
    atlas = builtin_atlas(qubits4)
    assert set(table) == set(atlas.labels)
    for record in atlas.records:
        h = h_values(record.state(qubits4))
        assert zero_pattern(h) in table[record.label], record.label
        assert check_relations(h), record.label


def test_generic_representative_of_c82(qubits4):
    v = builtin_atlas(qubits4).record("C82").state(qubits4)
    h = h_values(v)
    assert h.values[0] == 2
    assert str(zero_pattern(h)) == "1111111"


def test_collision_table_is_reproduced_by_the_representatives(qubits4):
    table = collision_table()
    labels = [label for group in table.values() for label in group]
    assert len(labels) == len(set(labels)) == 83
    found = collision_groups({
        record.label: [zero_pattern(h_values(record.state(qubits4)))]
        for record in builtin_atlas(qubits4).records
    })
    assert {pattern: set(group) for pattern, group in found.items()} == {
        pattern: set(group) for pattern, group in table.items()
    }
    assert set(table["1111111"]) == {"C33", "C82"}
