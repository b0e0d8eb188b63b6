from fractions import Fraction

import pytest
from entanglement_atlas.atlas import builtin_atlas
from entanglement_atlas.errors import InvalidArgument, SearchSpaceTooLarge, Unsupported
from entanglement_atlas.explorer import (
    basis_permutation_maps,
    class_count,
    closed_form_m_values,
    concise_representative,
    enumerate_signatures,
    m_set,
    monte_carlo_search,
    parse_values,
    reference_class_count,
    reference_m_set,
    trial_seed,
)
from entanglement_atlas.invariant_engine import StateInvariants, canonical_generating_set
from entanglement_atlas.settings import ExplorerSettings
from entanglement_atlas.tensor_state import CoeffSpec, Shape, render

R3 = canonical_generating_set(3)


def test_enumerate_three_qubits(qubits3):
    report = enumerate_signatures(qubits3, (0, 1), R3)
    assert report.total_states_examined == 256
    assert report.exhaustive
    assert len(report.hits) == 7
    assert report.hits[0].signature.values == (2, 2, 2, 8)
    assert render(report.hits[0].representative) == "0"
    assert sum(hit.hits for hit in report.hits) == 256
    assert report.signatures() == {record.signature.values for record in builtin_atlas(qubits3).records}


def test_enumerate_keeps_sparsest_representative(qubits3):
    report = enumerate_signatures(qubits3, (0, 1), R3)
    product = report.distinct_signatures[builtin_atlas(qubits3).record("C1").signature]
    assert product.representative.support_size == 1


def test_enumerate_without_cache_agrees(qubits3):
    cached = enumerate_signatures(qubits3, (0, 1), R3)
    plain = enumerate_signatures(qubits3, (0, 1), R3, settings=ExplorerSettings(canonical_permutation_limit=0))
    assert plain.to_json_dict() == cached.to_json_dict()


def test_enumerate_does_not_depend_on_workers(qubits3):
    serial = enumerate_signatures(qubits3, (0, 1), R3)
    parallel = enumerate_signatures(qubits3, (0, 1), R3, settings=ExplorerSettings(parallel=2))
    assert parallel.to_json_dict() == serial.to_json_dict()


def test_enumerate_sparse(qubits3):
    report = enumerate_signatures(qubits3, (0, 1), R3, max_support=1)
    assert report.total_states_examined == 9
    assert len(report.hits) == 2
    assert not report.exhaustive
    assert report.coeff_spec == "{0,1}, support <= 1"


def test_enumerate_guards(qubits3):
    with pytest.raises(SearchSpaceTooLarge):
        enumerate_signatures(qubits3, (0, 1), R3, settings=ExplorerSettings(max_candidates=100))
    with pytest.raises(InvalidArgument):
        enumerate_signatures(qubits3, (), R3)
    with pytest.raises(InvalidArgument):
        enumerate_signatures(qubits3, (0, 1), R3, max_support=-1)


def test_enumerate_json(qubits3):
    data = enumerate_signatures(qubits3, (0, 1), R3, max_support=1).to_json_dict()
    assert data["shape"] == [2, 2, 2]
    assert data["distinct_signatures"] == 2
    assert data["signatures"][1] == {"signature": [1, 1, 1, 4], "representative": "[1,1,1]", "hits": 8}
    assert "seed" not in data


def test_monte_carlo_is_deterministic(qubits3):
    spec = CoeffSpec(low=-2, high=2)
    first = monte_carlo_search(qubits3, 20, 5, spec, R3)
    second = monte_carlo_search(qubits3, 20, 5, spec, R3)
    assert first.to_json_dict() == second.to_json_dict()
    assert first.seed == 5
    assert sum(hit.hits for hit in first.hits) == 20


def test_monte_carlo_finds_nothing_outside_the_atlas(qubits3):
    known = [record.signature for record in builtin_atlas(qubits3).records]
    report = monte_carlo_search(qubits3, 30, 1, CoeffSpec(low=-3, high=3, max_denominator=2), R3, known=known)
    assert report.hits == ()
    assert report.total_states_examined == 30


def test_monte_carlo_needs_trials(qubits3):
    with pytest.raises(InvalidArgument):
        monte_carlo_search(qubits3, 0, 1, CoeffSpec(), R3)


def test_trial_seed():
    assert trial_seed(7, 3) == trial_seed(7, 3)
    assert trial_seed(7, 3) != trial_seed(7, 4)
    assert 0 <= trial_seed(7, 3) < 2 ** 64


def test_basis_permutation_maps():
    maps = basis_permutation_maps(Shape((2, 3)))
    assert len(maps) == 12
    assert maps[0] == tuple(range(6))
    assert all(sorted(g) == list(range(6)) for g in maps)


@pytest.mark.parametrize(("text", "values"), [
    ("2..4, 7", (2, 3, 4, 7)),
    ("-1..1", (-1, 0, 1)),
    ("5, 5, 1", (1, 5)),
])
def test_parse_values(text, values):
    assert parse_values(text) == values


@pytest.mark.parametrize("text", ["", "x", "1.5", "1..", "2,,3"])
def test_parse_values_rejects(text):
    with pytest.raises(InvalidArgument):
        parse_values(text)


@pytest.mark.parametrize(("k", "values"), [
    ((2, 3, 3), (4, 5, 6, 7, 8)),
    ((3, 2, 5), (8, 10)),
    ((3, 3, 9), (18,)),
])
def test_reference_m_set(k, values):
    assert reference_m_set(k) == values


def test_reference_m_set_missing():
    assert reference_m_set((5, 5, 5)) is None


@pytest.mark.parametrize(("k", "values"), [
    ((2, 3, 5), (8, 10)),
    ((3, 3, 9), (18,)),
    ((2, 3, 6), (13,)),
    ((3, 4, 11), (16, 20)),
    ((2, 2, 2), None),
])
def test_closed_form_m_values(k, values):
    assert closed_form_m_values(k) == values


def test_closed_forms_agree_with_the_table():
    for a, b in [(2, 3), (2, 4), (2, 5), (2, 6), (3, 3), (3, 4)]:
        assert closed_form_m_values((a, b, a * b)) == reference_m_set((a, b, a * b))
        largest = reference_m_set((a, b, a * b - 1))[-2:]
        assert closed_form_m_values((a, b, a * b - 1)) == largest


@pytest.mark.parametrize(("dims", "count"), [
    ((2, 2, 2), 7),
    ((2, 2, 7), 10),
    ((3, 2, 3), 17),
    ((2, 3, 9), 26),
    ((3, 3, 3), 39),
    ((4, 2, 4), 39),
    ((2, 2, 2, 2), None),
])
def test_reference_class_count(dims, count):
    assert reference_class_count(Shape(dims)) == count


def test_class_count():
    assert class_count(Shape((2, 2, 2))) == 7
    assert class_count(Shape((2, 3, 9))) == 26
    assert class_count(Shape((3, 3, 3))) == 39
    assert class_count(Shape((2, 2, 2, 2))) == 83
    with pytest.raises(Unsupported):
        class_count(Shape((3, 3, 3, 3)))


def test_m_set_from_atlas(qubits3):
    result = m_set(qubits3, (2, 2, 2))
    assert result.values == (4, 5)
    assert result.exhaustive


def test_m_set_matches_table_for_parametric_shapes():
    assert m_set(Shape((2, 3, 5)), (2, 3, 5)).values == (8, 10)
    assert m_set(Shape((2, 3, 3)), (2, 3, 3)).values == reference_m_set((2, 3, 3))
    assert m_set(Shape((2, 3, 4)), (2, 3, 3)).values == reference_m_set((2, 3, 3))


@pytest.mark.parametrize("dims", [(3, 4, 9), (3, 3, 9)])
def test_m_set_from_concise_state(dims):
    assert m_set(Shape(dims), (3, 3, 9)).values == (18,)


def test_m_set_errors(qubits4):
    with pytest.raises(Unsupported):
        m_set(qubits4, (2, 2, 2))
    with pytest.raises(InvalidArgument):
        m_set(Shape((2, 2, 2)), (3, 2, 2))
    with pytest.raises(InvalidArgument):
        m_set(Shape((2, 2, 2)), (2, 2))


def test_concise_representative():
    shape = Shape((2, 2, 4))
    state = concise_representative(shape, (2, 2, 4))
    assert render(state) == "[1,1,1]+[1,2,2]+[2,1,3]+[2,2,4]"
    invariants = StateInvariants(state)
    assert [invariants.flattening_rank(J) for J in (1, 2, 4)] == [2, 2, 4]
    assert concise_representative(Shape((2, 2, 3)), (2, 2, 3)) is None


def test_concise_representative_rank_in_first_position():
    state = concise_representative(Shape((4, 2, 2)), (4, 2, 2))
    assert render(state) == "[1,1,1]+[2,1,2]+[3,2,1]+[4,2,2]"


def test_coefficients_as_fractions(qubits3):
    report = enumerate_signatures(qubits3, (0, Fraction(1, 2)), R3, max_support=1)
    assert report.coeff_spec == "{0,1/2}, support <= 1"


@pytest.mark.slow
@pytest.mark.parametrize(("dims", "count"), [((2, 2, 3), 9), ((2, 2, 4), 10), ((2, 3, 3), 17)])
def test_exhaustive_enumeration_reaches_every_class(dims, count):
    shape = Shape(dims)
    atlas = builtin_atlas(shape)
    report = enumerate_signatures(shape, (0, 1), atlas.generating_set, settings=ExplorerSettings(parallel=2))
    assert report.exhaustive
    assert len(report.hits) == count
    assert report.signatures() == {record.signature.values for record in atlas.records}


@pytest.mark.slow
def test_four_qubit_enumeration_reaches_tier_one():
    shape = Shape((2, 2, 2, 2))
    atlas = builtin_atlas(shape)
    report = enumerate_signatures(shape, (0, 1), atlas.generating_set, settings=ExplorerSettings(parallel=2))
    assert report.total_states_examined == 65536
    expected = {record.signature.values for record in atlas.records if record.tier == 1}
    assert len(expected) == 78
    assert report.signatures() == expected
