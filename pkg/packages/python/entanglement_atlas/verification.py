"""
Reproduction checks for the packaged tables.

Checks are grouped in suites:

- `n3`: class counts, the parametric atlases for `d = 2..12`, M-sets, local invariance,
  the reduced generating set and the orbits of three subsystems.
- `n4`: the 83 four-qubit classes, their 27 orbits, the `{0,1}` enumeration, the C33
  family, local invariance and the reduced generating set.
- `classical`: zero patterns, relations and collision groups of the classical invariants.
- `structural`: linear-algebra identities on random states.

```python
from entanglement_atlas.verification import run_verification

report = run_verification("n3")
report.passed
```

Checks marked slow (exhaustive searches of several minutes) only run with `slow=True`.
"""

import logging
import os
import random
import time
from dataclasses import dataclass
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from entanglement_atlas.atlas import ClassRecord, builtin_atlas, operator_labels, operator_table
from entanglement_atlas.classical_invariants import (
    FOUR_QUBITS,
    THREE_QUBITS,
    check_relations,
    collision_groups,
    collision_table,
    h_four_qubits,
    h_three_qubits,
    pattern_table,
    zero_pattern,
)
from entanglement_atlas.errors import EntanglementAtlasError, InvalidArgument
from entanglement_atlas.explorer import (
    closed_form_m_values,
    enumerate_signatures,
    m_set,
    reference_class_count,
    reference_m_set,
    trial_seed,
)
from entanglement_atlas.invariant_engine import (
    GeneratingSet,
    StateInvariants,
    SubsetFamily,
    canonical_generating_set,
    proper_subsets,
    reduce_generating_set,
    signature,
)
from entanglement_atlas.ratlinalg import Subspace, kernel_intersection, nullspace, orthogonal_complement, rank
from entanglement_atlas.settings import Settings
from entanglement_atlas.tensor_state import (
    CoeffSpec,
    Shape,
    State,
    apply_local,
    extended_flatten,
    flatten,
    random_local_transform,
    random_sl_transform,
    random_state,
)
from jinja2 import Environment, FileSystemLoader, StrictUndefined

logger = logging.getLogger(__name__)

SUITES = ("n3", "n4", "classical", "structural")
TEMPLATES_DIR = os.path.join(os.path.dirname(__file__), "templates")

# Failures listed in a check detail before the rest is summarised.
MAX_FAILURES_SHOWN = 5

CheckOutcome = Tuple[bool, str]


@dataclass(frozen=True)
class CheckResult:
    """
    Outcome of one check.

    Attributes:
        suite (str): suite name
        name (str): check name
        passed (bool): whether the check passed
        detail (str): summary or the first failures
    """

    suite: str
    name: str
    passed: bool
    detail: str

    def to_dict(self) -> Dict[str, Any]:
        """JSON-ready mapping."""
        return {"suite": self.suite, "name": self.name, "passed": self.passed, "detail": self.detail}


@dataclass(frozen=True)
class VerificationReport:
    """Results of a verification run, in execution order."""

    suite: str
    results: Tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        """Whether every check passed."""
        return all(result.passed for result in self.results)

    @property
    def failures(self) -> List[CheckResult]:
        """Checks that failed."""
        return [result for result in self.results if not result.passed]

    def to_json_dict(self) -> Dict[str, Any]:
        """JSON-ready mapping."""
        return {
            "suite": self.suite,
            "passed": self.passed,
            "checks": [result.to_dict() for result in self.results],
        }

    def render_text(self) -> str:
        """Plain-text report, one line per check."""
        environment = Environment(
            loader=FileSystemLoader(TEMPLATES_DIR),
            undefined=StrictUndefined,
            keep_trailing_newline=True,
            trim_blocks=True,
            autoescape=False,
        )
        return environment.get_template("verify_report.txt.j2").render(report=self)


@dataclass(frozen=True)
class _Check:
    suite: str
    name: str
    run: Callable[[Settings], CheckOutcome]
    slow: bool = False


_CHECKS: List[_Check] = []


def check(suite: str, name: str, slow: bool = False) -> Callable[[Callable[[Settings], CheckOutcome]], Callable[[Settings], CheckOutcome]]:
    """
    Register a check function in a suite.

    Args:
        suite (str): one of `SUITES`
        name (str): name shown in the report
        slow (bool): run only when slow checks are requested

    Returns:
        the decorator, which returns the function unchanged
    """
    def register(func: Callable[[Settings], CheckOutcome]) -> Callable[[Settings], CheckOutcome]:
        _CHECKS.append(_Check(suite, name, func, slow))
        return func

    return register


def _outcome(failures: Sequence[str], summary: str) -> CheckOutcome:
    if not failures:
        return True, summary
    shown = "; ".join(failures[:MAX_FAILURES_SHOWN])
    if len(failures) > MAX_FAILURES_SHOWN:
        shown += f"; and {len(failures) - MAX_FAILURES_SHOWN} more"
    return False, shown


def _round_trip(records: Iterable[ClassRecord], shape: Shape, R: GeneratingSet) -> List[str]:
    """Records whose representative does not reproduce the stored signature."""
    failures = []
    for record in records:
        computed = signature(record.state(shape), R)
        if computed != record.signature:
            failures.append(f"{shape} {record.label}: computed {computed}, table {record.signature}")
    return failures


def _same_partition(records: Sequence[ClassRecord], shape: Shape, R: GeneratingSet) -> bool:
    """Whether signatures over `R` separate the records exactly like the stored signatures."""
    def blocks(key: Callable[[ClassRecord], Any]) -> set:
        groups: Dict[Any, List[str]] = {}
        for record in records:
            groups.setdefault(key(record), []).append(record.label)
        return {frozenset(labels) for labels in groups.values()}

    return blocks(lambda r: r.signature.values) == blocks(lambda r: signature(r.state(shape), R).values)


def _monte_carlo_spec(settings: Settings) -> CoeffSpec:
    spec = settings.explorer.monte_carlo
    return CoeffSpec(low=spec.low, high=spec.high, max_denominator=spec.max_denominator)


def _local_invariance(shape: Shape, states: int, settings: Settings) -> CheckOutcome:
    R = canonical_generating_set(shape.n)
    spec = _monte_carlo_spec(settings)
    seed, per_state = settings.verify.seed, settings.verify.transforms_per_state
    failures = []
    for t in range(states):
        v = random_state(shape, spec, trial_seed(seed, t))
        expected = signature(v, R)
        for s in range(per_state):
            g = random_local_transform(shape, trial_seed(seed + 1, t * per_state + s))
            if signature(apply_local(v, g), R) != expected:
                failures.append(f"state {t}, transform {s}")
    return _outcome(failures, f"{states} states x {per_state} transforms")


def _orbits_match_operators(shape: Shape, expected_orbits: int) -> CheckOutcome:
    atlas = builtin_atlas(shape)
    partition = atlas.orbit_partition()
    failures = []
    if len(partition) != expected_orbits:
        failures.append(f"{len(partition)} orbits, expected {expected_orbits}")
    orbit_sets = {frozenset(record.label for record in orbit) for orbit in partition}
    for row in operator_table(shape):
        if frozenset(row.labels) not in orbit_sets:
            failures.append(f"operator row {row.labels} is not an orbit")
        reached = operator_labels(row, shape)
        if reached != set(row.labels):
            failures.append(f"{row.expression!r} reaches {sorted(reached)}, table {row.labels}")
    return _outcome(failures, f"{len(partition)} orbits, each one operator row")


def _class_counts(shapes: Sequence[Tuple[int, ...]], settings: Settings) -> CheckOutcome:
    failures = []
    for dims in shapes:
        shape = Shape(dims)
        R = canonical_generating_set(3)
        if 2 ** shape.total_dim <= settings.mset.exhaustive_limit:
            report = enumerate_signatures(shape, (0, 1), R, settings=settings.explorer)
        else:
            report = enumerate_signatures(shape, (0, 1), R, max_support=settings.mset.max_support, settings=settings.explorer)
        expected = reference_class_count(shape)
        if len(report.hits) != expected:
            failures.append(f"{shape}: {len(report.hits)} signatures, expected {expected}")
        else:
            atlas = builtin_atlas(shape)
            if report.signatures() != {record.signature.values for record in atlas.records}:
                failures.append(f"{shape}: signatures differ from the atlas")
    return _outcome(failures, ", ".join(f"{Shape(dims)}: {reference_class_count(Shape(dims))}" for dims in shapes))


@check("n3", "class counts by {0,1} enumeration")
def check_class_counts(settings: Settings) -> CheckOutcome:
    """Exhaustive `{0,1}` enumeration of the smallest shapes."""
    return _class_counts([(2, 2, 2), (2, 2, 3)], settings)


@check("n3", "class counts of larger shapes", slow=True)
def check_class_counts_slow(settings: Settings) -> CheckOutcome:
    """`(2,2,4)`, `(2,2,5)`, `(2,3,3)` exhaustively and `(2,3,6)` over sparse `{0,1}` states."""
    return _class_counts([(2, 2, 4), (2, 2, 5), (2, 3, 3), (2, 3, 6)], settings)


@check("n3", "parametric atlases d=2..12")
def check_parametric_atlases(settings: Settings) -> CheckOutcome:
    """Every printed representative reproduces its affine signature."""
    failures = []
    for d1, d2 in ((2, 2), (2, 3)):
        for d in range(2, 13):
            shape = Shape((d1, d2, d))
            atlas = builtin_atlas(shape)
            failures.extend(_round_trip(atlas.records, shape, atlas.generating_set))
            distinct = {record.signature for record in atlas.records}
            if len(distinct) != len(atlas.records):
                failures.append(f"{shape}: repeated signatures")
            expected = reference_class_count(shape)
            if expected is not None and len(atlas.records) != expected:
                failures.append(f"{shape}: {len(atlas.records)} classes, expected {expected}")
    return _outcome(failures, "(2,2,d) and (2,3,d) for d = 2..12")


def _m_set_cases(cases: Sequence[Tuple[Tuple[int, ...], Tuple[int, ...]]], settings: Settings) -> CheckOutcome:
    failures = []
    for dims, k in cases:
        result = m_set(Shape(dims), k, settings.mset, settings.explorer)
        expected = reference_m_set(k)
        if result.values != expected:
            failures.append(f"M{k} on {Shape(dims)}: {list(result.values)}, expected {list(expected or ())}")
    return _outcome(failures, ", ".join(f"M{k}" for _, k in cases))


@check("n3", "M-sets")
def check_m_sets(settings: Settings) -> CheckOutcome:
    """Printed M-sets and the closed form for `k3 = k1 k2`."""
    outcome = _m_set_cases([
        ((2, 2, 2), (1, 1, 1)),
        ((2, 2, 2), (2, 2, 2)),
        ((2, 2, 3), (2, 2, 3)),
        ((2, 2, 4), (2, 2, 4)),
        ((2, 3, 3), (2, 3, 3)),
    ], settings)
    failures = [] if outcome[0] else [outcome[1]]
    for k1, k2 in ((1, 2), (2, 2), (2, 3), (3, 3)):
        k = (k1, k2, k1 * k2)
        shape = Shape(tuple(max(2, ki) for ki in k))
        values = m_set(shape, k, settings.mset, settings.explorer).values
        if values != closed_form_m_values(k) or values != (k1 * k1 + k2 * k2,):
            failures.append(f"M{k} on {shape}: {list(values)}, expected [{k1 * k1 + k2 * k2}]")
    return _outcome(failures, outcome[1] + ", closed forms")


@check("n3", "M-set (3,3,3)", slow=True)
def check_m_set_333(settings: Settings) -> CheckOutcome:
    """M-set of `(3,3,3)` over sparse `{0,1}` states."""
    return _m_set_cases([((3, 3, 3), (3, 3, 3))], settings)


@check("n3", "local invariance (2,2,2)")
def check_invariance_n3(settings: Settings) -> CheckOutcome:
    """Signatures are constant under invertible local transformations."""
    return _local_invariance(THREE_QUBITS, settings.verify.random_states_n3, settings)


@check("n3", "reduced generating set n=3")
def check_reducer_n3(settings: Settings) -> CheckOutcome:
    """The reduced set has four families and separates the atlases like the printed set."""
    R = reduce_generating_set(3)
    failures = [] if len(R) == 4 else [f"{len(R)} families, expected 4"]
    for dims in ((2, 2, 4), (2, 3, 6)):
        shape = Shape(dims)
        if not _same_partition(builtin_atlas(shape).records, shape, R):
            failures.append(f"{shape}: partitions differ")
    return _outcome(failures, f"{len(R)} families")


@check("n3", "orbits (2,2,2)")
def check_orbits_n3(settings: Settings) -> CheckOutcome:
    """Five orbits, one per operator row."""
    return _orbits_match_operators(THREE_QUBITS, 5)


@check("n4", "four-qubit atlas")
def check_qubit_atlas(settings: Settings) -> CheckOutcome:
    """The 83 representatives reproduce 83 distinct signatures."""
    atlas = builtin_atlas(FOUR_QUBITS)
    R = atlas.generating_set
    failures = _round_trip(atlas.records, FOUR_QUBITS, R)
    if len(atlas.records) != 83:
        failures.append(f"{len(atlas.records)} records, expected 83")
    if len(R) != 19:
        failures.append(f"{len(R)} families, expected 19")
    if len({record.signature for record in atlas.records}) != len(atlas.records):
        failures.append("repeated signatures")
    return _outcome(failures, f"{len(atlas.records)} classes over {len(R)} families")


@check("n4", "orbits (2,2,2,2)")
def check_orbits_n4(settings: Settings) -> CheckOutcome:
    """27 orbits, one per operator row."""
    return _orbits_match_operators(FOUR_QUBITS, 27)


@check("n4", "{0,1} enumeration (2,2,2,2)")
def check_qubit_enumeration(settings: Settings) -> CheckOutcome:
    """The 65 536 `{0,1}` states reach exactly the tier-1 classes."""
    atlas = builtin_atlas(FOUR_QUBITS)
    report = enumerate_signatures(FOUR_QUBITS, (0, 1), atlas.generating_set, settings=settings.explorer)
    expected = {record.signature.values for record in atlas.records if record.tier == 1}
    failures = []
    if len(expected) != 78:
        failures.append(f"{len(expected)} tier-1 records, expected 78")
    missing, extra = expected - report.signatures(), report.signatures() - expected
    if missing or extra:
        failures.append(f"{len(missing)} tier-1 signatures missing, {len(extra)} unexpected")
    return _outcome(failures, f"{len(report.hits)} signatures in {report.total_states_examined} states")


@check("n4", "C33 family")
def check_c33(settings: Settings) -> CheckOutcome:
    """The parametric representative keeps its signature and all classical invariants nonzero."""
    failures = []
    for c in (2, 3, 5, -3):
        atlas = builtin_atlas(FOUR_QUBITS, c)
        record = atlas.record("C33")
        v = record.state(FOUR_QUBITS)
        computed = signature(v, atlas.generating_set)
        if computed != record.signature:
            failures.append(f"c={c}: computed {computed}, table {record.signature}")
        if not all(zero_pattern(h_four_qubits(v)).bits):
            failures.append(f"c={c}: a classical invariant vanishes")
    return _outcome(failures, "c in {2,3,5,-3}")


@check("n4", "local invariance (2,2,2,2)")
def check_invariance_n4(settings: Settings) -> CheckOutcome:
    """Signatures are constant under invertible local transformations."""
    return _local_invariance(FOUR_QUBITS, settings.verify.random_states_n4, settings)


@check("n4", "reduced generating set n=4")
def check_reducer_n4(settings: Settings) -> CheckOutcome:
    """The reduced set has 19 families and separates the 83 classes."""
    R = reduce_generating_set(4)
    failures = [] if len(R) == 19 else [f"{len(R)} families, expected 19"]
    if not _same_partition(builtin_atlas(FOUR_QUBITS).records, FOUR_QUBITS, R):
        failures.append("partitions differ")
    return _outcome(failures, f"{len(R)} families")


@check("classical", "zero patterns (2,2,2)")
def check_patterns_n3(settings: Settings) -> CheckOutcome:
    """Every three-qubit representative has a tabulated zero pattern."""
    table = pattern_table(THREE_QUBITS)
    failures = []
    for record in builtin_atlas(THREE_QUBITS).records:
        pattern = zero_pattern(h_three_qubits(record.state(THREE_QUBITS)))
        if pattern not in table.get(record.label, []):
            failures.append(f"{record.label}: {pattern}")
    return _outcome(failures, f"{len(table)} classes")


@check("classical", "zero patterns and relations (2,2,2,2)")
def check_patterns_n4(settings: Settings) -> CheckOutcome:
    """Tabulated zero patterns and the four relations for every four-qubit representative."""
    table = pattern_table(FOUR_QUBITS)
    failures = []
    for record in builtin_atlas(FOUR_QUBITS).records:
        h = h_four_qubits(record.state(FOUR_QUBITS))
        pattern = zero_pattern(h)
        if pattern not in table.get(record.label, []):
            failures.append(f"{record.label}: {pattern}")
        if not check_relations(h):
            failures.append(f"{record.label}: relations fail")
    return _outcome(failures, f"{len(table)} classes")


@check("classical", "collision groups (2,2,2,2)")
def check_collisions(settings: Settings) -> CheckOutcome:
    """The printed representatives split into exactly the tabulated collision groups."""
    expected = {pattern: set(labels) for pattern, labels in collision_table().items()}
    found = {
        pattern: set(labels)
        for pattern, labels in collision_groups({
            record.label: [zero_pattern(h_four_qubits(record.state(FOUR_QUBITS)))]
            for record in builtin_atlas(FOUR_QUBITS).records
        }).items()
    }
    failures = []
    for pattern in sorted(expected.keys() | found.keys()):
        missing = sorted(expected.get(pattern, set()) - found.get(pattern, set()))
        extra = sorted(found.get(pattern, set()) - expected.get(pattern, set()))
        if missing or extra:
            failures.append(f"{pattern}: missing {missing}, unexpected {extra}")
    if not any(len(labels) > 1 for labels in found.values()):
        failures.append("zero patterns separate every class")
    return _outcome(failures, f"{len(found)} patterns, {len(expected)} tabulated")


@check("classical", "classical invariance (2,2,2,2)")
def check_classical_invariance(settings: Settings) -> CheckOutcome:
    """`h1` is fixed by determinant-one transformations, zero patterns by invertible ones."""
    seed = settings.verify.seed
    failures = []
    for t, record in enumerate(builtin_atlas(FOUR_QUBITS).records):
        v = record.state(FOUR_QUBITS)
        h = h_four_qubits(v)
        if h_four_qubits(apply_local(v, random_sl_transform(FOUR_QUBITS, trial_seed(seed + 2, t))))[1] != h[1]:
            failures.append(f"{record.label}: h1 changed")
        g = random_local_transform(FOUR_QUBITS, trial_seed(seed + 3, t))
        if zero_pattern(h_four_qubits(apply_local(v, g))) != zero_pattern(h):
            failures.append(f"{record.label}: zero pattern changed")
    return _outcome(failures, "h1 and zero patterns of every class")


def _structural_failures(v: State, rng: random.Random) -> List[str]:
    shape = v.shape
    invariants = StateInvariants(v)
    failures = []
    for J in proper_subsets(shape.n):
        m = flatten(v, J)
        r = rank(m)
        rest = shape.complement(J)
        if r + nullspace(m).dim != m.cols:
            failures.append(f"rank-nullity for J={J}")
        if rank(m.transpose()) != r:
            failures.append(f"transpose rank for J={J}")
        if nullspace(extended_flatten(v, J)).dim != invariants.nullity(J) * shape.dim_of(rest):
            failures.append(f"extended nullity for J={J}")
        image = Subspace.span([m.column(i) for i in range(m.cols)], m.rows)
        if image != orthogonal_complement(nullspace(flatten(v, rest))):
            failures.append(f"image and annihilator for J={J}")

    R = canonical_generating_set(shape.n)
    invariants.signature(R)
    a, b = rng.sample(proper_subsets(shape.n), 2)
    if a | b != shape.full_mask:
        Q = SubsetFamily((a, b))
        stacked = kernel_intersection([extended_flatten(v, a), extended_flatten(v, b)]).dim
        if stacked != invariants.family_nullity(Q):
            failures.append(f"family nullity of {Q}")
        invariants.m_value(Q)
    return failures


@check("structural", "structural identities")
def check_structural(settings: Settings) -> CheckOutcome:
    """Rank identities, extended nullities and divisibility on random states."""
    shapes = (THREE_QUBITS, Shape((2, 3, 4)), FOUR_QUBITS)
    seed, count = settings.verify.seed, settings.verify.structural_states
    spec = _monte_carlo_spec(settings)
    rng = random.Random(seed)
    failures = []
    for t in range(count):
        shape = shapes[t % len(shapes)]
        v = random_state(shape, spec, trial_seed(seed + 4, t))
        failures.extend(f"state {t} {shape}: {failure}" for failure in _structural_failures(v, rng))
    return _outcome(failures, f"{count} states over {len(shapes)} shapes")


def selected_checks(suite: str = "all", slow: bool = False) -> List[Tuple[str, str]]:
    """Suite and name of the checks a run would execute."""
    return [(c.suite, c.name) for c in _select(suite, slow)]


def _select(suite: str, slow: bool) -> List[_Check]:
    if suite != "all" and suite not in SUITES:
        raise InvalidArgument(f"unknown suite {suite!r}; expected all or one of {', '.join(SUITES)}")
    return [c for c in _CHECKS if (suite == "all" or c.suite == suite) and (slow or not c.slow)]


def run_verification(suite: str = "all", settings: Optional[Settings] = None, slow: bool = False) -> VerificationReport:
    """
    Run the checks of a suite.

    A check that raises a library error fails with the error message as detail.

    Args:
        suite (str): `all` or one of `SUITES`. Defaults to `all`.
        settings (Settings, optional): seeds, sample sizes and search settings
        slow (bool): include the slow exhaustive searches

    Returns:
        VerificationReport: the results
    """
    settings = settings or Settings()
    results = []
    for item in _select(suite, slow):
        start = time.perf_counter()
        try:
            passed, detail = item.run(settings)
        except EntanglementAtlasError as error:
            passed, detail = False, f"{type(error).__name__}: {error}"
        elapsed = time.perf_counter() - start
        log = logger.info if passed else logger.error
        log(f"[{item.suite}] {item.name}: {'pass' if passed else 'FAIL'} ({elapsed:.1f}s)")
        results.append(CheckResult(item.suite, item.name, passed, detail))
    return VerificationReport(suite, tuple(results))
