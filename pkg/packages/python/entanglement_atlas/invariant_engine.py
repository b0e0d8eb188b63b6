"""
Discrete invariants.

For a family `Q` of nonempty proper subsets of `I = {1..n}` the invariant `ñ_Q(v)` is the
dimension of the intersection of the extended kernels `K̃_J(v) = K_J(v) ⊗ V_{I∖J}`,
`J ∈ Q`. The signature of a state is the tuple of the derived values `m_Q(v)` over an
ordered generating set `R`:

```python
from entanglement_atlas.invariant_engine import canonical_generating_set, signature
from entanglement_atlas.tensor_state import Shape, parse_state

shape = Shape((2, 2, 2))
signature(parse_state("[1,1,1]+[2,2,2]", shape), canonical_generating_set(3))  # (0,0,0,0)
```

The kernels are never materialized as subspaces of the large matrices `f̃_J(v)`. Since
`K̃_J(v)` is `ker f_J(v)ᵀ ⊗ V_{I∖J}`, it is cut out by the column basis of the small
flattening repeated over the complement indices; `StateInvariants` caches these per
subset and intersects them inside the kernel with the most constraints.
"""

import itertools
import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Iterable, List, Sequence, Tuple

from entanglement_atlas.errors import (ArityMismatch, BadSubset, DivisibilityViolation, EmptyFamily, InvalidArgument, UnknownPermutationAction,
                                       UnsupportedArity)
from entanglement_atlas.loaders.table_loader import load_table
from entanglement_atlas.ratlinalg import Mat, integer_rank, integer_row_basis, integer_vector, nullspace
from entanglement_atlas.tensor_state import Permutation, Shape, State, check_permutation, format_subset

logger = logging.getLogger(__name__)

SparseVector = Dict[int, int]


def permute_mask(mask: int, perm: Permutation) -> int:
    """Image of a subset bitmask under a 0-based subsystem permutation."""
    image = 0
    for i, j in enumerate(perm):
        if mask >> i & 1:
            image |= 1 << j
    return image


def mask_from_subset(subset: Iterable[int]) -> int:
    """Bitmask of a subset given by 1-based subsystem numbers."""
    mask = 0
    for i in subset:
        if i < 1:
            raise BadSubset(f"subsystem numbers start at 1, got {i}")
        mask |= 1 << (i - 1)
    return mask


@dataclass(frozen=True)
class SubsetFamily:
    """
    A family `Q` of nonempty proper subsets of `I`.

    Attributes:
        members (Tuple[int, ...]): distinct bitmasks, ascending
    """

    members: Tuple[int, ...]

    def __post_init__(self) -> None:
        """Bring the members to canonical form."""
        members = tuple(sorted(set(self.members)))
        if not members:
            raise EmptyFamily("a subset family needs at least one member")
        if members[0] <= 0:
            raise BadSubset("subset families cannot contain the empty subset")
        object.__setattr__(self, 'members', members)

    @classmethod
    def of(cls, subsets: Iterable[Iterable[int]]) -> 'SubsetFamily':
        """
        Build a family from 1-based subsets.

        Args:
            subsets: e.g. `[[1, 2], [1, 3], [2, 3]]`

        Returns:
            SubsetFamily: the family
        """
        return cls(tuple(mask_from_subset(subset) for subset in subsets))

    @property
    def union(self) -> int:
        """Bitmask of the union of the members."""
        union = 0
        for mask in self.members:
            union |= mask
        return union

    def check(self, n: int) -> None:
        """Raise `BadSubset` unless every member is a nonempty proper subset of `{1..n}`."""
        full = (1 << n) - 1
        for mask in self.members:
            if mask >= full:
                raise BadSubset(f"{format_subset(mask)} is not a proper subset of {{1..{n}}}")

    def permuted(self, perm: Permutation) -> 'SubsetFamily':
        """Image `{σ(J) : J ∈ Q}`."""
        return SubsetFamily(tuple(permute_mask(mask, perm) for mask in self.members))

    def to_lists(self) -> List[List[int]]:
        """Members as 1-based lists."""
        return [[i + 1 for i in range(mask.bit_length()) if mask >> i & 1] for mask in self.members]

    def __str__(self) -> str:
        """Render as `{{1,2},{1,3}}`."""
        return "{" + ",".join(format_subset(mask) for mask in self.members) + "}"


@dataclass(frozen=True)
class GeneratingSet:
    """
    Ordered list `R` of distinct subset families over `n` subsystems.

    Attributes:
        n (int): number of subsystems
        families (Tuple[SubsetFamily, ...]): the families, in signature order
        label_prefix (str): prefix of the family labels (`Q1`, `Q2`, ...)
    """

    n: int
    families: Tuple[SubsetFamily, ...]
    label_prefix: str = "Q"

    def __post_init__(self) -> None:
        """Validate the families."""
        object.__setattr__(self, 'families', tuple(self.families))
        if len(set(self.families)) != len(self.families):
            raise InvalidArgument("generating set families must be distinct")
        for family in self.families:
            family.check(self.n)

    def __len__(self) -> int:
        """Number of families."""
        return len(self.families)

    @property
    def labels(self) -> List[str]:
        """Family labels in order."""
        return [f"{self.label_prefix}{k + 1}" for k in range(len(self.families))]

    def permutation_action(self, perm: Sequence[int]) -> Tuple[int, ...]:
        """
        Induced action of a subsystem permutation on the family positions.

        Args:
            perm (Sequence[int]): 0-based images `σ(i)`

        Returns:
            Tuple[int, ...]: position of `σ(Q_k)` for every position `k`
        """
        perm = check_permutation(perm, self.n)
        positions = {family: k for k, family in enumerate(self.families)}
        action = []
        for family in self.families:
            image = family.permuted(perm)
            if image not in positions:
                raise UnknownPermutationAction(f"the generating set is not closed under {perm}: {image} is missing")
            action.append(positions[image])
        return tuple(action)

    def is_closed_under(self, perm: Sequence[int]) -> bool:
        """Return whether `σ(Q) ∈ R` for every family `Q ∈ R`."""
        perm = check_permutation(perm, self.n)
        families = set(self.families)
        return all(family.permuted(perm) in families for family in self.families)

    def describe(self) -> List[Dict[str, object]]:
        """Labels with 1-based members, for JSON output."""
        return [{"label": label, "members": family.to_lists()} for label, family in zip(self.labels, self.families)]


@dataclass(frozen=True)
class Signature:
    """
    Ordered invariant values `(m_Q(v))_{Q ∈ R}`.

    Two signatures compare equal when their values do; the generating set is carried for
    reference only.
    """

    values: Tuple[int, ...]
    generating_set: GeneratingSet = field(compare=False, hash=False, repr=False)

    def __post_init__(self) -> None:
        """Validate the length."""
        object.__setattr__(self, 'values', tuple(self.values))
        if len(self.values) != len(self.generating_set):
            raise ArityMismatch(
                f"signature has {len(self.values)} values, the generating set has {len(self.generating_set)} families")

    def permuted(self, perm: Sequence[int]) -> 'Signature':
        """
        Signature of the permuted state, `new[index(σ(Q))] = old[index(Q)]`.

        Args:
            perm (Sequence[int]): 0-based images `σ(i)`

        Returns:
            Signature: the permuted signature
        """
        action = self.generating_set.permutation_action(perm)
        values = [0] * len(self.values)
        for k, target in enumerate(action):
            values[target] = self.values[k]
        return Signature(tuple(values), self.generating_set)

    def __str__(self) -> str:
        """Render as `(0,0,1,5)`."""
        return "(" + ",".join(str(x) for x in self.values) + ")"


def proper_subsets(n: int) -> List[int]:
    """
    All nonempty proper subsets of `{1..n}`.

    Args:
        n (int): number of subsystems, at least two

    Returns:
        List[int]: the `2^n - 2` bitmasks, ascending
    """
    if n < 2:
        raise InvalidArgument(f"need at least two subsystems, got {n}")
    return list(range(1, (1 << n) - 1))


class StateInvariants:
    """
    Invariant computations for one state, with per-subset caches.

    Args:
        v (State): the state
    """

    def __init__(self, v: State) -> None:
        """Invariant context constructor."""
        self.state = v
        self.shape = v.shape
        self._dense = v.integer_dense()
        self._column_bases: Dict[int, List[List[int]]] = {}
        self._kernels: Dict[int, List[SparseVector]] = {}
        self._constraints: Dict[int, List[SparseVector]] = {}

    def column_basis(self, J: int) -> List[List[int]]:
        """
        Independent integer vectors spanning the columns of `f_J(v)`.

        Args:
            J (int): bitmask of a nonempty proper subset

        Returns:
            rank(f_J(v)) vectors of length `dim V_J`
        """
        if J not in self._column_bases:
            shape = self.shape
            shape.check_subset(J)
            rest = shape.complement(J)
            rows = shape.sub_tuples(J)
            columns = []
            for rest_index in shape.sub_tuples(rest):
                columns.append([self._dense[shape.linear_index(shape.merge(J, part, rest_index))] for part in rows])
            self._column_bases[J] = integer_row_basis(columns)
        return self._column_bases[J]

    def flattening_rank(self, J: int) -> int:
        """Rank of `f_J(v)`."""
        return len(self.column_basis(J))

    def nullity(self, J: int) -> int:
        """`n_J(v) = dim ker f_J(v)`."""
        return self.shape.dim_of(J) - self.flattening_rank(J)

    def _spread(self, J: int, vectors: Iterable[Sequence[int]]) -> List[SparseVector]:
        """Tensor vectors over `V_J` with the standard basis of `V_{I∖J}`, in `V` coordinates."""
        shape = self.shape
        parts = shape.sub_tuples(J)
        spread = []
        for vector in vectors:
            for rest_index in shape.sub_tuples(shape.complement(J)):
                spread.append({
                    shape.linear_index(shape.merge(J, part, rest_index)): x
                    for part, x in zip(parts, vector) if x
                })
        return spread

    def extended_constraints(self, J: int) -> List[SparseVector]:
        """Independent linear forms on `V` whose common zero set is `K̃_J(v)`."""
        if J not in self._constraints:
            self._constraints[J] = self._spread(J, self.column_basis(J))
        return self._constraints[J]

    def extended_kernel(self, J: int) -> List[SparseVector]:
        """Integer basis of `K̃_J(v)` in `V` coordinates."""
        if J not in self._kernels:
            basis = self.column_basis(J)
            kernel = nullspace(Mat.from_rows(basis, self.shape.dim_of(J)))
            self._kernels[J] = self._spread(J, (integer_vector(vector) for vector in kernel.vectors()))
        return self._kernels[J]

    def family_nullity(self, Q: SubsetFamily) -> int:
        """
        `ñ_Q(v) = dim ∩_{J ∈ Q} K̃_J(v)`.

        Args:
            Q (SubsetFamily): the family

        Returns:
            int: the nullity
        """
        Q.check(self.shape.n)
        if len(Q.members) == 1:
            J = Q.members[0]
            return self.nullity(J) * self.shape.dim_of(self.shape.complement(J))

        pivot = max(Q.members, key=lambda J: (self.flattening_rank(J) * self.shape.dim_of(self.shape.complement(J)), -J))
        kernel = self.extended_kernel(pivot)
        if not kernel:
            return 0
        restricted = [
            [sum(x * vector.get(position, 0) for position, x in row.items()) for vector in kernel]
            for J in Q.members if J != pivot
            for row in self.extended_constraints(J)
        ]
        return len(kernel) - integer_rank(restricted)

    def m_value(self, Q: SubsetFamily) -> int:
        """
        `m_Q(v)`: `ñ_Q(v)` when the members cover `I`, else `n_Q(v) = ñ_Q(v) / dim V_{I∖∪Q}`.

        Args:
            Q (SubsetFamily): the family

        Returns:
            int: the value
        """
        value = self.family_nullity(Q)
        union = Q.union
        if union == self.shape.full_mask:
            return value
        quotient, remainder = divmod(value, self.shape.dim_of(self.shape.complement(union)))
        if remainder:
            raise DivisibilityViolation(
                f"ñ_Q = {value} for Q = {Q} is not divisible by dim V over {format_subset(self.shape.complement(union))}")
        return quotient

    def signature(self, R: GeneratingSet) -> Signature:
        """Signature over a generating set."""
        if R.n != self.shape.n:
            raise ArityMismatch(f"generating set acts on {R.n} subsystems, state shape {self.shape} has {self.shape.n}")
        return Signature(tuple(self.m_value(Q) for Q in R.families), R)


def family_nullity(v: State, Q: SubsetFamily) -> int:
    """
    Dimension of the intersection of the extended kernels of the family members.

    Args:
        v (State): the state
        Q (SubsetFamily): nonempty family

    Returns:
        int: `ñ_Q(v)`
    """
    return StateInvariants(v).family_nullity(Q)


def m_value(v: State, Q: SubsetFamily) -> int:
    """
    Derived invariant `m_Q(v)`.

    Args:
        v (State): the state
        Q (SubsetFamily): nonempty family

    Returns:
        int: `ñ_Q(v)`, divided by the dimension of the uncovered factor when `∪Q ⊊ I`
    """
    return StateInvariants(v).m_value(Q)


def signature(v: State, R: GeneratingSet) -> Signature:
    """
    Signature of a state over a generating set.

    Args:
        v (State): the state
        R (GeneratingSet): generating set of the same arity

    Returns:
        Signature: `(m_Q(v))_{Q ∈ R}`
    """
    return StateInvariants(v).signature(R)


@lru_cache(maxsize=None)
def canonical_generating_set(n: int) -> GeneratingSet:
    """
    Printed generating set for two, three or four subsystems, in printed order.

    Args:
        n (int): number of subsystems

    Returns:
        GeneratingSet: `({{1}})`, `(Q1..Q4)` or `(Q1..Q19)`
    """
    for entry in load_table("generating_sets"):
        if entry["n"] == n:
            return GeneratingSet(n, tuple(SubsetFamily.of(family) for family in entry["families"]))
    raise UnsupportedArity(f"no built-in generating set for n={n}; use the reduced generating set")


def _antichains(elements: List[int]) -> List[Tuple[int, ...]]:
    """Nonempty antichains of subsets, each given in ascending order."""
    result: List[Tuple[int, ...]] = []

    def extend(chain: Tuple[int, ...], start: int) -> None:
        for position in range(start, len(elements)):
            mask = elements[position]
            if all(mask & other != mask and mask & other != other for other in chain):
                grown = chain + (mask,)
                result.append(grown)
                extend(grown, position + 1)

    extend((), 0)
    return result


def _maximal(members: Tuple[int, ...]) -> Tuple[int, ...]:
    return tuple(m for m in members if not any(m != other and m & other == m for other in members))


@lru_cache(maxsize=None)
def reduce_generating_set(n: int) -> GeneratingSet:
    """
    Derive a generating set by removing dependent families.

    Starting from all families of nonempty proper subsets, repeat until nothing changes:
    drop members contained in another member of the same family, drop families with two
    disjoint members, drop families contained in another family. Singleton families
    `{{J}}` and `{{I∖J}}` carry the same information; only the one with the
    lexicographically smaller subset is kept. The result is in canonical order.

    Args:
        n (int): number of subsystems

    Returns:
        GeneratingSet: families labelled `R1, R2, ...`
    """
    subsets = proper_subsets(n)
    families = {_maximal(chain) for chain in _antichains(subsets)}
    rounds = 0
    while True:
        rounds += 1
        reduced = {_maximal(members) for members in families}
        reduced = {
            members for members in reduced
            if not any(a & b == 0 for a, b in itertools.combinations(members, 2))
        }
        reduced = {
            members for members in reduced
            if not any(members != other and set(members) <= set(other) for other in reduced)
        }
        if reduced == families:
            break
        families = reduced

    full = (1 << n) - 1

    def subset_key(mask: int) -> Tuple[int, ...]:
        return tuple(i + 1 for i in range(n) if mask >> i & 1)

    for members in sorted(families):
        dual = (full & ~members[0],)
        if len(members) == 1 and members in families and dual in families:
            families.discard(dual if subset_key(members[0]) < subset_key(dual[0]) else members)

    logger.debug(f"reduced generating set for n={n} after {rounds} rounds: {len(families)} families")
    return GeneratingSet(n, tuple(SubsetFamily(members) for members in sorted(families)), label_prefix="R")
