"""Shared fixtures."""

import pytest
from entanglement_atlas.settings import ExplorerSettings, Settings, VerifySettings
from entanglement_atlas.tensor_state import Shape, State, parse_state


@pytest.fixture()
def qubits3() -> Shape:
    """Three qubits."""
    return Shape((2, 2, 2))


@pytest.fixture()
def qubits4() -> Shape:
    """Four qubits."""
    return Shape((2, 2, 2, 2))


@pytest.fixture()
def ghz(qubits3: Shape) -> State:
    """Three-qubit GHZ state."""
    return parse_state("[1,1,1]+[2,2,2]", qubits3)


@pytest.fixture()
def w_state(qubits3: Shape) -> State:
    """Three-qubit W state."""
    return parse_state("[1,1,1]+[1,2,2]+[2,1,2]", qubits3)


@pytest.fixture()
def product(qubits3: Shape) -> State:
    """Fully separable three-qubit state."""
    return parse_state("[1,1,1]", qubits3)


@pytest.fixture()
def small_settings() -> Settings:
    """Settings with reduced sample sizes for the randomized checks."""
    return Settings(
        explorer=ExplorerSettings(parallel=1),
        verify=VerifySettings(random_states_n3=3, random_states_n4=2, transforms_per_state=2, structural_states=6),
    )
