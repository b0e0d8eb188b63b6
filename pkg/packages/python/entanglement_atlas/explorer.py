"""
Searches over coefficient patterns.

- `enumerate_signatures` visits every assignment of a finite coefficient set to the basis
  slots of a shape (row-major odometer, last slot fastest), or every assignment with at
  most `max_support` nonzero slots, and groups the states by signature.
- `monte_carlo_search` draws seeded random states and reports the signatures it finds,
  optionally only those outside a known set.
- `class_count` and `m_set` answer the counting questions for three subsystems from the
  tables where they are printed and by searching otherwise.

Work is split into contiguous chunks of the candidate range; chunks run in worker
processes when `parallel > 1`. Merging keeps, per signature, the representative with the
fewest nonzero terms and then the smallest candidate position, so reports do not depend
on the number of workers.
"""

import hashlib
import itertools
import logging
import math
import re
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Iterable, Iterator, List, Optional, Sequence, Set, Tuple

from entanglement_atlas.atlas import builtin_atlas
from entanglement_atlas.errors import InvalidArgument, SearchSpaceTooLarge, Unsupported
from entanglement_atlas.invariant_engine import GeneratingSet, Signature, StateInvariants, canonical_generating_set
from entanglement_atlas.loaders.table_loader import load_table
from entanglement_atlas.ratlinalg import Scalar
from entanglement_atlas.settings import ExplorerSettings, MSetSettings
from entanglement_atlas.tensor_state import CoeffSpec, Shape, State, random_state, render
from tqdm import tqdm

logger = logging.getLogger(__name__)

CHUNKS_PER_WORKER = 4

_RANGE = re.compile(r"^(-?\d+)\.\.(-?\d+)$")


@dataclass(frozen=True)
class SignatureHit:
    """
    One signature found by a search.

    Attributes:
        signature (Signature): the signature
        representative (State): first state with the fewest nonzero terms
        hits (int): number of examined states with this signature
    """

    signature: Signature
    representative: State
    hits: int

    def to_dict(self) -> Dict[str, Any]:
        """JSON-ready mapping."""
        return {"signature": list(self.signature.values), "representative": render(self.representative), "hits": self.hits}


@dataclass(frozen=True)
class SearchReport:
    """
    Result of a search.

    Attributes:
        shape (Shape): the shape searched
        coeff_spec (str): description of the coefficients
        hits (Tuple[SignatureHit, ...]): signatures in order of their first occurrence
        total_states_examined (int): number of states visited
        seed (int, optional): master seed of a Monte Carlo search
        exhaustive (bool): whether every candidate of the coefficient space was visited
    """

    shape: Shape
    coeff_spec: str
    hits: Tuple[SignatureHit, ...]
    total_states_examined: int
    seed: Optional[int] = None
    exhaustive: bool = True

    @property
    def distinct_signatures(self) -> Dict[Signature, SignatureHit]:
        """Hits keyed by signature."""
        return {hit.signature: hit for hit in self.hits}

    def signatures(self) -> Set[Tuple[int, ...]]:
        """Signature values found."""
        return {hit.signature.values for hit in self.hits}

    def to_json_dict(self) -> Dict[str, Any]:
        """JSON-ready mapping."""
        data: Dict[str, Any] = {
            "shape": list(self.shape.dims),
            "coeff_spec": self.coeff_spec,
            "total_states_examined": self.total_states_examined,
            "exhaustive": self.exhaustive,
            "distinct_signatures": len(self.hits),
            "signatures": [hit.to_dict() for hit in self.hits],
        }
        if self.seed is not None:
            data["seed"] = self.seed
        return data


@dataclass(frozen=True)
class MSet:
    """
    Values of `ñ_{Q4} - d1 d2 d3 + k1 d1 + k2 d2 + k3 d3` over the classes with flattening ranks `k`.

    Attributes:
        k (Tuple[int, int, int]): ranks of the three single-subsystem flattenings
        values (Tuple[int, ...]): sorted distinct values
        exhaustive (bool): whether the candidate search was complete
    """

    k: Tuple[int, int, int]
    values: Tuple[int, ...]
    exhaustive: bool = True


@dataclass
class _Found:
    support: int
    position: int
    first_position: int
    representative: State
    hits: int = 1

    def absorb(self, other: '_Found') -> None:
        self.hits += other.hits
        self.first_position = min(self.first_position, other.first_position)
        if (other.support, other.position) < (self.support, self.position):
            self.support, self.position, self.representative = other.support, other.position, other.representative


@dataclass(frozen=True)
class _SearchTask:
    """Picklable description of one chunk of a search."""

    shape: Shape
    generating_set: GeneratingSet
    mode: str
    start: int
    stop: int
    coefficients: Tuple[Fraction, ...] = ()
    max_support: int = 0
    coeff_spec: Optional[CoeffSpec] = None
    seed: int = 0
    canonical_limit: int = 0


def _odometer(coefficients: Sequence[Fraction], slots: int, start: int, stop: int) -> Iterator[Tuple[int, List[Fraction]]]:
    """Assignments `start..stop-1` of the row-major odometer, last slot fastest."""
    base = len(coefficients)
    digits = [0] * slots
    rest = start
    for slot in range(slots - 1, -1, -1):
        rest, digits[slot] = divmod(rest, base)
    for position in range(start, stop):
        yield position, [coefficients[digit] for digit in digits]
        slot = slots - 1
        while slot >= 0:
            digits[slot] += 1
            if digits[slot] < base:
                break
            digits[slot] = 0
            slot -= 1


def _sparse_assignments(coefficients: Sequence[Fraction], slots: int, max_support: int) -> Iterator[List[Fraction]]:
    """All assignments with at most `max_support` nonzero slots, by support size, then slot combination."""
    nonzero = [x for x in coefficients if x]
    for size in range(max_support + 1):
        for positions in itertools.combinations(range(slots), size):
            for values in itertools.product(nonzero, repeat=size):
                vector = [Fraction(0)] * slots
                for position, value in zip(positions, values):
                    vector[position] = value
                yield vector


def _sparse_count(coefficients: Sequence[Fraction], slots: int, max_support: int) -> int:
    nonzero = sum(1 for x in coefficients if x)
    return sum(math.comb(slots, size) * nonzero ** size for size in range(min(max_support, slots) + 1))


def trial_seed(seed: int, trial: int) -> int:
    """Seed of one Monte Carlo trial: the first eight bytes of `sha256("{seed}:{trial}")`."""
    return int.from_bytes(hashlib.sha256(f"{seed}:{trial}".encode()).digest()[:8], "big")


def basis_permutation_maps(shape: Shape) -> List[Tuple[int, ...]]:
    """
    Coordinate maps of all independent basis permutations inside the subsystems.

    Each map `g` sends the dense vector `x` to `[x[g[y]] for y in range(dim V)]`.

    Args:
        shape (Shape): the shape

    Returns:
        List[Tuple[int, ...]]: `Π d_i!` maps, the identity first
    """
    indices = list(shape.all_indices())
    maps = []
    for local in itertools.product(*(itertools.permutations(range(d)) for d in shape.dims)):
        maps.append(tuple(shape.linear_index(tuple(p[j] for p, j in zip(local, index))) for index in indices))
    return maps


def _candidates(task: _SearchTask) -> Iterator[Tuple[int, State]]:
    shape = task.shape
    if task.mode == "odometer":
        for position, vector in _odometer(task.coefficients, shape.total_dim, task.start, task.stop):
            yield position, State.from_dense(shape, vector)
    elif task.mode == "sparse":
        assignments = _sparse_assignments(task.coefficients, shape.total_dim, task.max_support)
        for position, vector in enumerate(itertools.islice(assignments, task.start, task.stop), start=task.start):
            yield position, State.from_dense(shape, vector)
    else:
        for trial in range(task.start, task.stop):
            yield trial, random_state(shape, task.coeff_spec, trial_seed(task.seed, trial))


def _run_task(task: _SearchTask, progress: Optional[tqdm] = None) -> Dict[Tuple[int, ...], _Found]:
    """Search one chunk and return its signatures."""
    group_order = math.prod(math.factorial(d) for d in task.shape.dims)
    maps = basis_permutation_maps(task.shape) if task.mode != "random" and group_order <= task.canonical_limit else []
    cache: Dict[Tuple[Fraction, ...], Tuple[int, ...]] = {}
    found: Dict[Tuple[int, ...], _Found] = {}
    for position, state in _candidates(task):
        values = None
        if maps:
            dense = state.dense()
            key = min(tuple(dense[i] for i in g) for g in maps)
            values = cache.get(key)
        if values is None:
            values = StateInvariants(state).signature(task.generating_set).values
            if maps:
                cache[key] = values
        candidate = _Found(state.support_size, position, position, state)
        if values in found:
            found[values].absorb(candidate)
        else:
            found[values] = candidate
        if progress is not None:
            progress.update()
    if maps:
        logger.debug(f"chunk {task.start}..{task.stop}: {len(cache)} canonical patterns for {task.stop - task.start} candidates")
    return found


def _merge(target: Dict[Tuple[int, ...], _Found], source: Dict[Tuple[int, ...], _Found]) -> None:
    for values, item in source.items():
        if values in target:
            target[values].absorb(item)
        else:
            target[values] = item


def _execute(tasks: List[_SearchTask], total: int, parallel: int, progress: bool, description: str) -> Dict[Tuple[int, ...], _Found]:
    found: Dict[Tuple[int, ...], _Found] = {}
    if parallel <= 1:
        with tqdm(total=total, desc=description, disable=not progress, unit="state") as bar:
            for task in tasks:
                _merge(found, _run_task(task, bar))
        return found

    logger.debug(f"{description}: {len(tasks)} chunks on {parallel} workers")
    with ProcessPoolExecutor(max_workers=parallel) as executor, \
            tqdm(total=len(tasks), desc=description, disable=not progress, unit="chunk") as bar:
        futures = [executor.submit(_run_task, task) for task in tasks]
        for future in as_completed(futures):
            _merge(found, future.result())
            bar.update()
    return found


def _chunks(total: int, parallel: int) -> List[Tuple[int, int]]:
    count = 1 if parallel <= 1 else max(1, min(total, parallel * CHUNKS_PER_WORKER))
    size = -(-total // count) if total else 0
    return [(start, min(start + size, total)) for start in range(0, total, size)] if size else []


def _report(shape: Shape, R: GeneratingSet, found: Dict[Tuple[int, ...], _Found], **kwargs: Any) -> SearchReport:
    ordered = sorted(found.items(), key=lambda item: item[1].first_position)
    hits = tuple(SignatureHit(Signature(values, R), item.representative, item.hits) for values, item in ordered)
    return SearchReport(shape=shape, hits=hits, **kwargs)


def enumerate_signatures(
    shape: Shape,
    coeff_set: Iterable[Scalar],
    R: GeneratingSet,
    max_support: Optional[int] = None,
    settings: Optional[ExplorerSettings] = None,
) -> SearchReport:
    """
    Visit every coefficient assignment and group the states by signature.

    Args:
        shape (Shape): the shape
        coeff_set (Iterable[Scalar]): coefficients, e.g. `{0, 1}`
        R (GeneratingSet): generating set of the same arity
        max_support (int, optional): visit only assignments with at most this many nonzero slots. Defaults to None.
        settings (ExplorerSettings, optional): worker count, candidate guard, cache limit, progress bars

    Returns:
        SearchReport: the signatures with their first minimal-support representatives
    """
    settings = settings or ExplorerSettings()
    coefficients = tuple(sorted({Fraction(x) for x in coeff_set}))
    if not coefficients:
        raise InvalidArgument("coefficient set is empty")
    if max_support is not None and max_support < 0:
        raise InvalidArgument(f"max support must be nonnegative, got {max_support}")
    slots = shape.total_dim
    if max_support is None or max_support >= slots:
        mode, total = "odometer", len(coefficients) ** slots
    else:
        mode, total = "sparse", _sparse_count(coefficients, slots, max_support)
    if total > settings.max_candidates:
        raise SearchSpaceTooLarge(
            f"{total} candidates for shape {shape} exceed the limit of {settings.max_candidates}; restrict the support")

    description = "{" + ",".join(str(x) for x in coefficients) + "}"
    logger.debug(f"enumerating {total} {mode} candidates of {shape} over {description}")
    tasks = [
        _SearchTask(shape, R, mode, start, stop, coefficients=coefficients, max_support=max_support or 0,
                    canonical_limit=settings.canonical_permutation_limit)
        for start, stop in _chunks(total, settings.parallel)
    ]
    found = _execute(tasks, total, settings.parallel, settings.progress, f"enumerate {shape}")
    if mode == "sparse":
        description += f", support <= {max_support}"
    logger.info(f"{shape} over {description}: {len(found)} signatures in {total} states")
    return _report(shape, R, found, coeff_spec=description, total_states_examined=total, exhaustive=mode == "odometer")


def monte_carlo_search(
    shape: Shape,
    trials: int,
    seed: int,
    coeff_spec: CoeffSpec,
    R: GeneratingSet,
    known: Iterable[Signature] = (),
    settings: Optional[ExplorerSettings] = None,
) -> SearchReport:
    """
    Sample random states and report the signatures outside `known`.

    Trial `t` uses the state `random_state(shape, coeff_spec, trial_seed(seed, t))`.

    Args:
        shape (Shape): the shape
        trials (int): number of samples, at least one
        seed (int): master seed
        coeff_spec (CoeffSpec): coefficient distribution
        R (GeneratingSet): generating set of the same arity
        known (Iterable[Signature]): signatures left out of the report
        settings (ExplorerSettings, optional): worker count and progress bars

    Returns:
        SearchReport: the new signatures with hit counts
    """
    if trials < 1:
        raise InvalidArgument(f"at least one trial is needed, got {trials}")
    settings = settings or ExplorerSettings()
    tasks = [
        _SearchTask(shape, R, "random", start, stop, coeff_spec=coeff_spec, seed=seed)
        for start, stop in _chunks(trials, settings.parallel)
    ]
    found = _execute(tasks, trials, settings.parallel, settings.progress, f"monte carlo {shape}")
    known_values = {sig.values for sig in known}
    new = {values: item for values, item in found.items() if values not in known_values}
    if known_values and new:
        logger.warning(f"{len(new)} signatures of {shape} outside the known set after {trials} trials")
    logger.info(f"{shape}: {len(found)} signatures in {trials} random states, {len(new)} new")
    return _report(shape, R, new, coeff_spec=coeff_spec.describe(), total_states_examined=trials, seed=seed, exhaustive=False)


def reference_class_count(shape: Shape) -> Optional[int]:
    """
    Printed number of classes for three subsystems.

    The count is symmetric in the dimensions; rows marked stable hold for every larger
    last dimension.

    Args:
        shape (Shape): the shape

    Returns:
        int, optional: the count, None when the table has no row for the shape
    """
    if shape.n != 3:
        return None
    dims = sorted(shape.dims)
    for row in load_table("class_counts"):
        row_dims = row["dims"]
        if row_dims == dims or (row.get("stable") and row_dims[:2] == dims[:2] and row_dims[2] <= dims[2]):
            return row["count"]
    return None


def class_count(shape: Shape, settings: Optional[ExplorerSettings] = None) -> int:
    """
    Number of signature classes of a shape.

    Uses the built-in atlas, then the printed counts, then an exhaustive `{0,1}` search for
    shapes of dimension at most 16 (which counts the `{0,1}`-representable classes only).

    Args:
        shape (Shape): the shape
        settings (ExplorerSettings, optional): search settings for the fallback

    Returns:
        int: the number of classes
    """
    try:
        return len(builtin_atlas(shape).records)
    except Unsupported:
        pass
    count = reference_class_count(shape)
    if count is not None:
        return count
    if shape.total_dim <= 16 and shape.n <= 4:
        logger.warning(f"no table for {shape}; counting the classes with {{0,1}} representatives")
        return len(enumerate_signatures(shape, (0, 1), canonical_generating_set(shape.n), settings=settings).hits)
    raise Unsupported(f"no class count for shape {shape}")


def parse_values(text: str) -> Tuple[int, ...]:
    """
    Parse a value list such as `2..8, 10`.

    Args:
        text (str): comma separated integers and inclusive `a..b` ranges

    Returns:
        Tuple[int, ...]: sorted distinct values
    """
    values: Set[int] = set()
    for part in str(text).split(","):
        part = part.strip()
        match = _RANGE.match(part)
        if match:
            values.update(range(int(match.group(1)), int(match.group(2)) + 1))
        elif re.fullmatch(r"-?\d+", part):
            values.add(int(part))
        else:
            raise InvalidArgument(f"malformed value {part!r} in {text!r}")
    return tuple(sorted(values))


def reference_m_set(k: Sequence[int]) -> Optional[Tuple[int, ...]]:
    """Printed M-set for the ranks `k` in any order, None when not printed."""
    key = sorted(k)
    for row in load_table("m_sets"):
        if row["k"] == key:
            return parse_values(row["values"])
    return None


def closed_form_m_values(k: Sequence[int]) -> Optional[Tuple[int, ...]]:
    """
    Closed forms of the M-set.

    With `a ≤ b ≤ c` the sorted ranks: `c = ab` gives the single value `a² + b²`;
    `c = ab - 1` (`a ≥ 2`) gives the two largest values `a² + b² - 2(a + b) + 5` and
    `a² + b² - (a + b) + 2`.

    Args:
        k (Sequence[int]): three ranks

    Returns:
        Tuple[int, ...], optional: the values, None when no closed form applies
    """
    a, b, c = sorted(k)
    if c == a * b:
        return (a * a + b * b,)
    if a >= 2 and c == a * b - 1:
        return tuple(sorted({a * a + b * b - 2 * (a + b) + 5, a * a + b * b - (a + b) + 2}))
    return None


def concise_representative(shape: Shape, k: Sequence[int]) -> Optional[State]:
    """
    State with flattening ranks `k` when one rank is the product of the other two.

    With `k_r = k_p k_q` the state is `Σ_{a ≤ k_p, b ≤ k_q} [.., a, .., b, .., (a-1) k_q + b, ..]`,
    the index `(a-1) k_q + b` sitting at position `r`.

    Args:
        shape (Shape): three subsystems with `d_i ≥ k_i`
        k (Sequence[int]): ranks

    Returns:
        State, optional: the state, None when no rank is the product of the others
    """
    for r in range(3):
        p, q = [i for i in range(3) if i != r]
        if k[r] == k[p] * k[q]:
            terms = []
            for a in range(k[p]):
                for b in range(k[q]):
                    index = [0, 0, 0]
                    index[p], index[q], index[r] = a, b, a * k[q] + b
                    terms.append((tuple(index), 1))
            return State.from_terms(shape, terms)
    return None


def _m_of(values: Sequence[int], shape: Shape, k: Sequence[int]) -> int:
    d1, d2, d3 = shape.dims
    return values[3] - d1 * d2 * d3 + sum(ki * di for ki, di in zip(k, shape.dims))


def m_set(
    shape: Shape,
    k: Sequence[int],
    settings: Optional[MSetSettings] = None,
    explorer_settings: Optional[ExplorerSettings] = None,
) -> MSet:
    """
    M-set of a three-subsystem shape for the flattening ranks `k`.

    Classes come from the built-in atlas when the shape has one, from the unique concise
    representative when one rank is the product of the others, from an exhaustive `{0,1}`
    search when it is small enough, and otherwise from a sparse `{0,1}` search.

    Args:
        shape (Shape): `(d1, d2, d3)`
        k (Sequence[int]): ranks with `1 ≤ k_i ≤ d_i`
        settings (MSetSettings, optional): search limits
        explorer_settings (ExplorerSettings, optional): worker count and progress bars

    Returns:
        MSet: the values found
    """
    settings = settings or MSetSettings()
    if shape.n != 3:
        raise Unsupported(f"M-sets are defined for three subsystems, got shape {shape}")
    k = tuple(k)
    if len(k) != 3 or any(not 1 <= ki <= di for ki, di in zip(k, shape.dims)):
        raise InvalidArgument(f"ranks {k} must satisfy 1 <= k_i <= d_i for shape {shape}")
    target = tuple(d - ki for d, ki in zip(shape.dims, k))
    R = canonical_generating_set(3)

    try:
        atlas = builtin_atlas(shape)
        values = {_m_of(r.signature.values, shape, k) for r in atlas.records if r.signature.values[:3] == target}
        return MSet(k, tuple(sorted(values)))
    except Unsupported:
        pass

    state = concise_representative(shape, k)
    if state is not None:
        sig = StateInvariants(state).signature(R)
        return MSet(k, (_m_of(sig.values, shape, k),))

    explorer_settings = explorer_settings or ExplorerSettings()
    if 2 ** shape.total_dim <= settings.exhaustive_limit:
        report = enumerate_signatures(shape, (0, 1), R, settings=explorer_settings)
    else:
        logger.warning(f"{shape} is too large for an exhaustive search; using states with at most {settings.max_support} terms")
        report = enumerate_signatures(shape, (0, 1), R, max_support=settings.max_support, settings=explorer_settings)
    values = {_m_of(values, shape, k) for values in report.signatures() if values[:3] == target}
    return MSet(k, tuple(sorted(values)), exhaustive=report.exhaustive)
