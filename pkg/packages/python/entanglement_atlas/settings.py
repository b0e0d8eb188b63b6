"""
Typed settings.

The settings tree is built by `entanglement_atlas.loaders.config_loader.ConfigLoader` from
the packaged defaults (`data/config.yaml`) and an optional user file.

Usage:

```python
from entanglement_atlas.loaders.config_loader import ConfigLoader

settings = ConfigLoader.load("my-settings.yaml")
settings.explorer.parallel
```
"""

from dataclasses import dataclass, field


@dataclass(frozen=True)
class LoggingSettings:
    """Logging settings."""

    level: str = "INFO"


@dataclass(frozen=True)
class MonteCarloSettings:
    """Coefficient range of Monte Carlo draws (`p / q`, `p ∈ [low, high]`, `q ∈ [1, max_denominator]`)."""

    low: int = -9
    high: int = 9
    max_denominator: int = 1


@dataclass(frozen=True)
class ExplorerSettings:
    """
    Search settings.

    Attributes:
        max_candidates (int): refuse exhaustive searches with more candidates
        parallel (int): worker processes
        canonical_permutation_limit (int): largest basis-permutation group used by the enumeration cache
        progress (bool): show progress bars on stderr
        monte_carlo (MonteCarloSettings): Monte Carlo coefficients
    """

    max_candidates: int = 2 ** 30
    parallel: int = 1
    canonical_permutation_limit: int = 128
    progress: bool = False
    monte_carlo: MonteCarloSettings = field(default_factory=MonteCarloSettings)


@dataclass(frozen=True)
class MSetSettings:
    """M-set search settings."""

    exhaustive_limit: int = 2 ** 20
    max_support: int = 6


@dataclass(frozen=True)
class VerifySettings:
    """Sizes and seed of the randomized verification checks."""

    seed: int = 20220607
    random_states_n3: int = 100
    random_states_n4: int = 50
    transforms_per_state: int = 10
    structural_states: int = 200


@dataclass(frozen=True)
class Settings:
    """Root of the settings tree."""

    logging: LoggingSettings = field(default_factory=LoggingSettings)
    explorer: ExplorerSettings = field(default_factory=ExplorerSettings)
    mset: MSetSettings = field(default_factory=MSetSettings)
    verify: VerifySettings = field(default_factory=VerifySettings)
