from fractions import Fraction

import pytest
from entanglement_atlas.errors import (
    ArityMismatch,
    BadSubset,
    IndexOutOfRange,
    InvalidArgument,
    InvalidShape,
    ShapeMismatch,
    ShapeNotPermutable,
    StateSyntaxError,
    ZeroState,
)
from entanglement_atlas.ratlinalg import Mat, determinant
from entanglement_atlas.tensor_state import (
    CoeffSpec,
    LocalTransform,
    Shape,
    State,
    apply_local,
    check_permutation,
    extended_flatten,
    flatten,
    format_subset,
    parse_state,
    permute_subsystems,
    random_local_transform,
    random_sl_transform,
    random_state,
    render,
    two_factor_decomposition,
)

X = Mat.from_rows([[0, 1], [1, 0]])
I2 = Mat.identity(2)


def test_shape_parse():
    shape = Shape.parse("2,2,3")
    assert shape.dims == (2, 2, 3)
    assert shape.n == 3
    assert shape.total_dim == 12
    assert str(shape) == "(2,2,3)"


@pytest.mark.parametrize("text", ["2,x", "2", "2,1", ""])
def test_shape_parse_rejects(text):
    with pytest.raises(InvalidShape):
        Shape.parse(text)


def test_shape_subsets():
    shape = Shape((2, 3, 4))
    assert shape.members(0b101) == (0, 2)
    assert shape.dim_of(0b101) == 8
    assert shape.complement(0b101) == 0b010
    assert format_subset(0b101) == "{1,3}"
    with pytest.raises(BadSubset):
        shape.check_subset(0)
    with pytest.raises(BadSubset):
        shape.check_subset(shape.full_mask)


def test_parse_state(qubits3):
    v = parse_state("[1,1,1]+[2,2,2]", qubits3)
    assert v.coefficients == {(0, 0, 0): 1, (1, 1, 1): 1}
    assert v.support_size == 2


def test_parse_rational_coefficients():
    v = parse_state("1/2*[1,2]-3*[2,1]", Shape((2, 2)))
    assert v.coefficient((0, 1)) == Fraction(1, 2)
    assert v.coefficient((1, 0)) == -3
    assert v.coefficient((0, 0)) == 0


def test_parse_leading_sign_and_accumulation():
    shape = Shape((2, 2))
    assert parse_state("-[1,1]", shape).coefficient((0, 0)) == -1
    assert parse_state("[1,1]+[1,1]", shape).coefficient((0, 0)) == 2
    assert parse_state("[1,1]-[1,1]", shape).is_zero()
    assert parse_state("0", shape).is_zero()


@pytest.mark.parametrize(("text", "error"), [
    ("", StateSyntaxError),
    ("[1,1", StateSyntaxError),
    ("1/0*[1,1]", StateSyntaxError),
    ("2[1,1]", StateSyntaxError),
    ("[1,1]*[2,2]", StateSyntaxError),
    ("[3,1]", IndexOutOfRange),
    ("[0,1]", IndexOutOfRange),
    ("[1,1,1]", ArityMismatch),
])
def test_parse_errors(text, error):
    with pytest.raises(error):
        parse_state(text, Shape((2, 2)))


@pytest.mark.parametrize("text", ["1/2*[1,2]-3*[2,1]", "[1,1,1]+[2,2,2]", "-[1,2,1]+2*[2,1,1]", "0"])
def test_render_is_canonical(text):
    shape = Shape((2, 2)) if text.count(",") == 2 else Shape((2, 2, 2))
    assert render(parse_state(text, shape)) == text


def test_dense_and_scaling(qubits3, ghz):
    dense = ghz.dense()
    assert dense[0] == 1 and dense[7] == 1 and sum(dense) == 2
    assert State.from_dense(qubits3, dense) == ghz
    assert ghz.scaled(Fraction(1, 2)).integer_dense() == ghz.integer_dense()
    with pytest.raises(ShapeMismatch):
        State.from_dense(qubits3, [1, 0])


def test_add(qubits3, ghz, product):
    assert render(ghz + product) == "2*[1,1,1]+[2,2,2]"
    with pytest.raises(ShapeMismatch):
        ghz + State.zero(Shape((2, 2)))


def test_flatten():
    m = flatten(parse_state("[1,2]", Shape((2, 3))), 0b01)
    assert (m.rows, m.cols) == (2, 3)
    assert m[0, 1] == 1
    assert sum(m.entries) == 1


def test_flatten_pair_of_subsystems(ghz):
    m = flatten(ghz, 0b011)
    assert (m.rows, m.cols) == (4, 2)
    assert m[0, 0] == 1 and m[3, 1] == 1


def test_flatten_rejects_improper_subsets(ghz):
    with pytest.raises(BadSubset):
        flatten(ghz, 0)
    with pytest.raises(BadSubset):
        flatten(ghz, 0b111)


def test_extended_flatten_shape(ghz):
    m = extended_flatten(ghz, 0b001)
    assert (m.rows, m.cols) == (16, 8)


def test_apply_local_flip(product):
    g = LocalTransform((X, I2, I2))
    assert render(apply_local(product, g)) == "[2,1,1]"
    assert apply_local(product, LocalTransform.identity(product.shape)) == product


def test_apply_local_shape_mismatch(product):
    with pytest.raises(ShapeMismatch):
        apply_local(product, LocalTransform((X, I2)))


def test_then_composes(product):
    g = LocalTransform((X, I2, I2))
    assert apply_local(product, g.then(g)) == product


def test_permute_subsystems(qubits3):
    v = parse_state("[1,1,2]", qubits3)
    assert render(permute_subsystems(v, (1, 2, 0))) == "[2,1,1]"
    with pytest.raises(ShapeNotPermutable):
        permute_subsystems(parse_state("[1,2]", Shape((2, 3))), (1, 0))


def test_check_permutation():
    assert check_permutation([2, 0, 1], 3) == (2, 0, 1)
    with pytest.raises(InvalidArgument):
        check_permutation((0, 0, 1), 3)
    with pytest.raises(ArityMismatch):
        check_permutation((0, 1), 3)


def test_two_factor_decomposition(ghz):
    pairs = two_factor_decomposition(ghz, 0b001)
    assert len(pairs) == 2
    m = flatten(ghz, 0b001)
    for i in range(m.rows):
        for j in range(m.cols):
            assert sum(w[i] * w_rest[j] for w, w_rest in pairs) == m[i, j]


def test_two_factor_decomposition_of_zero(qubits3):
    with pytest.raises(ZeroState):
        two_factor_decomposition(State.zero(qubits3), 0b001)


def test_random_state_is_seeded(qubits3):
    spec = CoeffSpec(low=-9, high=9)
    assert random_state(qubits3, spec, 7) == random_state(qubits3, spec, 7)
    values = CoeffSpec.from_values([0, 1])
    assert set(random_state(qubits3, values, 1).coefficients.values()) <= {1}


def test_coeff_spec_validation():
    with pytest.raises(InvalidArgument):
        CoeffSpec(low=2, high=1)
    with pytest.raises(InvalidArgument):
        CoeffSpec(values=())
    assert CoeffSpec(low=-3, high=3, max_denominator=2).describe() == "[-3,3]/[1,2]"


def test_random_transforms(qubits3):
    g = random_local_transform(qubits3, 11)
    assert g.is_invertible()
    assert random_local_transform(qubits3, 11) == g
    for factor in random_sl_transform(qubits3, 11).factors:
        assert determinant(factor) == 1
