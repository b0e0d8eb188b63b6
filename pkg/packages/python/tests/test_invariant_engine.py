import itertools
from fractions import Fraction

import pytest
from entanglement_atlas.errors import (
    ArityMismatch,
    BadSubset,
    EmptyFamily,
    InvalidArgument,
    UnknownPermutationAction,
    UnsupportedArity,
)
from entanglement_atlas.invariant_engine import (
    GeneratingSet,
    Signature,
    StateInvariants,
    SubsetFamily,
    canonical_generating_set,
    family_nullity,
    m_value,
    mask_from_subset,
    permute_mask,
    proper_subsets,
    reduce_generating_set,
    signature,
)
from entanglement_atlas.ratlinalg import kernel_intersection
from entanglement_atlas.atlas import builtin_atlas
from entanglement_atlas.tensor_state import (
    CoeffSpec,
    Shape,
    State,
    apply_local,
    extended_flatten,
    parse_state,
    permute_subsystems,
    random_local_transform,
    random_state,
)


def test_subset_family_is_canonical():
    family = SubsetFamily.of([[1, 3], [1, 2], [1, 3]])
    assert family.members == (0b011, 0b101)
    assert str(family) == "{{1,2},{1,3}}"
    assert family.union == 0b111
    assert family.to_lists() == [[1, 2], [1, 3]]


def test_subset_family_errors():
    with pytest.raises(EmptyFamily):
        SubsetFamily(())
    with pytest.raises(BadSubset):
        SubsetFamily((0, 1))
    with pytest.raises(BadSubset):
        mask_from_subset([0, 1])
    with pytest.raises(BadSubset):
        SubsetFamily.of([[1, 2, 3]]).check(3)


def test_permute_mask():
    assert permute_mask(0b001, (1, 2, 0)) == 0b010
    assert permute_mask(0b011, (2, 0, 1)) == 0b101


def test_proper_subsets():
    assert proper_subsets(3) == [1, 2, 3, 4, 5, 6]
    with pytest.raises(InvalidArgument):
        proper_subsets(1)


@pytest.mark.parametrize(("n", "size"), [(2, 1), (3, 4), (4, 19)])
def test_canonical_generating_set(n, size):
    R = canonical_generating_set(n)
    assert len(R) == size
    assert R.labels[0] == "Q1"
    assert R.labels[-1] == f"Q{size}"


def test_canonical_generating_set_unknown_arity():
    with pytest.raises(UnsupportedArity):
        canonical_generating_set(5)


def test_generating_set_validation():
    family = SubsetFamily.of([[1]])
    with pytest.raises(InvalidArgument):
        GeneratingSet(3, (family, family))
    with pytest.raises(BadSubset):
        GeneratingSet(2, (SubsetFamily.of([[1, 2]]),))


def test_permutation_action():
    R = canonical_generating_set(3)
    assert R.permutation_action((1, 0, 2)) == (1, 0, 2, 3)
    assert R.is_closed_under((2, 0, 1))
    two = canonical_generating_set(2)
    assert not two.is_closed_under((1, 0))
    with pytest.raises(UnknownPermutationAction):
        two.permutation_action((1, 0))


def test_signature_length_is_checked():
    with pytest.raises(ArityMismatch):
        Signature((0, 0), canonical_generating_set(3))


def test_signature_compares_values_only():
    assert Signature((1,), canonical_generating_set(2)) == Signature((1,), reduce_generating_set(2))
    assert str(Signature((0, 0, 1, 5), canonical_generating_set(3))) == "(0,0,1,5)"


@pytest.mark.parametrize(("text", "expected"), [
    ("0", (2, 2, 2, 8)),
    ("[1,1,1]", (1, 1, 1, 4)),
    ("[1,1,1]+[2,2,1]", (0, 0, 1, 3)),
    ("[1,1,1]+[1,2,2]+[2,1,2]", (0, 0, 0, 1)),
    ("[1,1,1]+[2,2,2]", (0, 0, 0, 0)),
])
def test_three_qubit_signatures(qubits3, text, expected):
    assert signature(parse_state(text, qubits3), canonical_generating_set(3)).values == expected


def test_two_subsystem_signature_is_corank():
    v = parse_state("[1,1]+[2,2]", Shape((2, 3)))
    assert signature(v, canonical_generating_set(2)).values == (0,)


def test_signature_needs_matching_arity(ghz):
    with pytest.raises(ArityMismatch):
        signature(ghz, canonical_generating_set(4))


def test_flattening_ranks(ghz, product):
    assert [StateInvariants(ghz).flattening_rank(J) for J in proper_subsets(3)] == [2] * 6
    invariants = StateInvariants(product)
    assert invariants.flattening_rank(0b001) == 1
    assert invariants.nullity(0b001) == 1


def test_singleton_family_nullity(product):
    assert family_nullity(product, SubsetFamily.of([[1]])) == 4
    assert m_value(product, SubsetFamily.of([[1]])) == 1
    assert m_value(product, SubsetFamily.of([[1, 2]])) == 3


@pytest.mark.parametrize("text", [
    "[1,1,1]",
    "[1,1,1]+[2,2,2]",
    "[1,1,1]+[1,2,2]+[2,1,2]",
    "[1,1,1]+[1,2,2]+[2,1,3]",
    "2*[1,1,1]-[1,2,3]+1/2*[2,2,2]+[2,1,1]",
])
@pytest.mark.parametrize("members", [[[1], [2]], [[1, 2], [1, 3]], [[1, 2], [1, 3], [2, 3]], [[3], [1, 2]]])
def test_family_nullity_matches_stacked_kernels(text, members):
    v = parse_state(text, Shape((2, 2, 3)))
    Q = SubsetFamily.of(members)
    stacked = kernel_intersection([extended_flatten(v, J) for J in Q.members])
    assert family_nullity(v, Q) == stacked.dim


@pytest.mark.parametrize("perm", [(1, 0, 2, 3), (2, 3, 0, 1), (1, 2, 3, 0)])
def test_signature_follows_subsystem_permutations(qubits4, perm):
    v = parse_state("[1,1,1,1]+[2,2,1,1]+[2,1,2,2]", qubits4)
    R = canonical_generating_set(4)
    assert signature(permute_subsystems(v, perm), R) == signature(v, R).permuted(perm)


def test_zero_state_signature(qubits4):
    values = signature(State.zero(qubits4), canonical_generating_set(4)).values
    assert values == (2, 2, 2, 2, 8, 8, 8, 8, 16, 16, 16, 16, 16, 16, 16, 16, 16, 16, 16)


def test_reduced_generating_set_small_arities():
    assert reduce_generating_set(2).families == (SubsetFamily.of([[1]]),)
    R = reduce_generating_set(3)
    assert set(R.families) == set(canonical_generating_set(3).families)
    assert R.labels == ["R1", "R2", "R3", "R4"]


def test_reduced_generating_set_four_subsystems():
    R = reduce_generating_set(4)
    assert len(R) == 19
    for Q in R.families:
        assert all(a & b for a, b in itertools.combinations(Q.members, 2))


@pytest.mark.parametrize(("dims", "seed"), [((2, 2, 2), 11), ((2, 2, 3), 12), ((2, 3, 3), 13), ((2, 2, 2, 2), 14)])
def test_signature_is_invariant_under_local_transformations(dims, seed):
    shape = Shape(dims)
    R = canonical_generating_set(shape.n)
    v = random_state(shape, CoeffSpec.from_values((0, 0, 1, -1, 2)), seed)
    expected = signature(v, R)
    for t in range(3):
        g = random_local_transform(shape, seed * 100 + t)
        assert signature(apply_local(v, g), R) == expected


@pytest.mark.parametrize("label", ["C8", "C33", "C67", "C82"])
def test_four_qubit_classes_survive_local_transformations(qubits4, label):
    atlas = builtin_atlas(qubits4)
    record = atlas.record(label)
    g = random_local_transform(qubits4, int(label[1:]))
    assert signature(apply_local(record.state(qubits4), g), atlas.generating_set) == record.signature


@pytest.mark.parametrize("factor", [Fraction(-1), Fraction(3), Fraction(-2, 7)])
def test_signature_is_invariant_under_rescaling(w_state, qubits4, factor):
    R3 = canonical_generating_set(3)
    assert signature(w_state.scaled(factor), R3) == signature(w_state, R3)
    v = parse_state("[1,1,1,1]+[1,2,2,2]+[2,1,1,2]+[2,2,2,1]", qubits4)
    R4 = canonical_generating_set(4)
    assert signature(v.scaled(factor), R4) == signature(v, R4)
