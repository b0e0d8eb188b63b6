"""
Sparse multipartite tensor states.

A state of shape `(d1, ..., dn)` is a vector of `V = V_1 ⊗ ... ⊗ V_n` stored as a sparse
map from multi-indices to nonzero rationals. Multi-indices are 0-based inside the
package and 1-based in the text format, which follows the bracket notation of the
classification tables:

```text
[1,1,1]+[2,2,2]          # GHZ
1/2*[1,2]-3*[2,1]        # explicit rational coefficients
0                        # the zero state
```

Subsets of subsystems are bitmasks: bit `i` (value `1 << i`) stands for subsystem `i + 1`.
Every flattening linearizes indices row-major, subsystems in ascending order on both
sides.
"""

import itertools
import random
import re
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import prod
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from entanglement_atlas.errors import (ArityMismatch, BadSubset, IndexOutOfRange, InvalidArgument, InvalidShape, ShapeMismatch,
                                       ShapeNotPermutable, StateSyntaxError, ZeroState)
from entanglement_atlas.ratlinalg import Mat, Scalar, determinant, integer_vector, rref

Index = Tuple[int, ...]
Permutation = Tuple[int, ...]


@dataclass(frozen=True)
class Shape:
    """
    Dimension vector `(d1, ..., dn)`, `n >= 2`, every `d_i >= 2`.

    Attributes:
        dims (Tuple[int, ...]): local dimensions
    """

    dims: Tuple[int, ...]

    def __post_init__(self) -> None:
        """Validate and freeze the dimension vector."""
        object.__setattr__(self, 'dims', tuple(self.dims))
        if len(self.dims) < 2:
            raise InvalidShape(f"a shape needs at least two subsystems, got {self.dims}")
        if any(not isinstance(d, int) or d < 2 for d in self.dims):
            raise InvalidShape(f"every local dimension must be an integer >= 2, got {self.dims}")

    @classmethod
    def parse(cls, text: str) -> 'Shape':
        """
        Parse a comma separated dimension vector such as `2,2,3`.

        Args:
            text (str): dimension vector

        Returns:
            Shape: the shape
        """
        try:
            return cls(tuple(int(part) for part in text.split(",")))
        except ValueError:
            raise InvalidShape(f"malformed dimension vector {text!r}")

    @property
    def n(self) -> int:
        """Number of subsystems."""
        return len(self.dims)

    @property
    def total_dim(self) -> int:
        """Dimension of `V`."""
        return prod(self.dims)

    @property
    def full_mask(self) -> int:
        """Bitmask of the whole index set `I`."""
        return (1 << self.n) - 1

    def members(self, mask: int) -> Tuple[int, ...]:
        """Return the 0-based subsystems of a bitmask, ascending."""
        return _members(mask, self.n)

    def dim_of(self, mask: int) -> int:
        """Return `dim V_J` for the subset `J` given as bitmask."""
        return prod(self.dims[i] for i in self.members(mask))

    def complement(self, mask: int) -> int:
        """Return `I ∖ J`."""
        return self.full_mask & ~mask

    def check_subset(self, mask: int) -> None:
        """Raise `BadSubset` unless `mask` encodes a nonempty proper subset of `I`."""
        if mask <= 0 or mask >= self.full_mask:
            raise BadSubset(f"subset {format_subset(mask)} is not a nonempty proper subset of {{1..{self.n}}}")

    def linear_index(self, index: Index) -> int:
        """Row-major position of a full multi-index in `V`."""
        position = 0
        for j, d in zip(index, self.dims):
            position = position * d + j
        return position

    def sub_linear(self, index: Index, mask: int) -> int:
        """Row-major position of the `mask` part of a multi-index in `V_J`."""
        position = 0
        for i in self.members(mask):
            position = position * self.dims[i] + index[i]
        return position

    def sub_tuples(self, mask: int) -> List[Index]:
        """All multi-indices over the subsystems of `mask`, row-major."""
        return _sub_tuples(self.dims, mask)

    def merge(self, mask: int, part: Index, rest: Index) -> Index:
        """Merge a multi-index over `mask` and one over its complement into a full multi-index."""
        index = [0] * self.n
        for i, j in zip(self.members(mask), part):
            index[i] = j
        for i, j in zip(self.members(self.complement(mask)), rest):
            index[i] = j
        return tuple(index)

    def is_stable(self, perm: Permutation) -> bool:
        """Return whether `d_σ(i) = d_i` for every subsystem."""
        return all(self.dims[perm[i]] == self.dims[i] for i in range(self.n))

    def all_indices(self) -> Iterable[Index]:
        """Iterate over all multi-indices of `V` in row-major order."""
        return itertools.product(*(range(d) for d in self.dims))

    def __str__(self) -> str:
        """Render as `(d1,...,dn)`."""
        return "(" + ",".join(str(d) for d in self.dims) + ")"


@lru_cache(maxsize=None)
def _members(mask: int, n: int) -> Tuple[int, ...]:
    return tuple(i for i in range(n) if mask >> i & 1)


@lru_cache(maxsize=None)
def _sub_tuples(dims: Tuple[int, ...], mask: int) -> List[Index]:
    return list(itertools.product(*(range(dims[i]) for i in _members(mask, len(dims)))))


def format_subset(mask: int) -> str:
    """Render a bitmask as `{1,2}`."""
    return "{" + ",".join(str(i + 1) for i in range(mask.bit_length()) if mask >> i & 1) + "}"


@dataclass(frozen=True)
class State:
    """
    Sparse tensor `v ∈ V`.

    Attributes:
        shape (Shape): the shape
        terms (Tuple[Tuple[Index, Fraction], ...]): nonzero coefficients sorted by 0-based multi-index
    """

    shape: Shape
    terms: Tuple[Tuple[Index, Fraction], ...]

    @classmethod
    def from_terms(
        cls,
        shape: Shape,
        terms: Union[Mapping[Index, Scalar], Iterable[Tuple[Index, Scalar]]],
        one_based: bool = False,
    ) -> 'State':
        """
        Build a state, accumulating repeated multi-indices and dropping zeros.

        Args:
            shape (Shape): the shape
            terms: multi-index to coefficient pairs
            one_based (bool): whether the multi-indices are 1-based

        Returns:
            State: the state
        """
        items = terms.items() if isinstance(terms, Mapping) else terms
        offset = 1 if one_based else 0
        accumulated: Dict[Index, Fraction] = defaultdict(Fraction)
        for raw_index, coefficient in items:
            index = tuple(j - offset for j in raw_index)
            _check_index(shape, index)
            accumulated[index] += Fraction(coefficient)
        return cls(shape, tuple(sorted((i, c) for i, c in accumulated.items() if c != 0)))

    @classmethod
    def zero(cls, shape: Shape) -> 'State':
        """Return the zero state."""
        return cls(shape, ())

    @classmethod
    def from_dense(cls, shape: Shape, vector: Sequence[Scalar]) -> 'State':
        """Build a state from its row-major coordinate vector."""
        if len(vector) != shape.total_dim:
            raise ShapeMismatch(f"expected {shape.total_dim} coordinates for shape {shape}, got {len(vector)}")
        return cls.from_terms(shape, zip(shape.all_indices(), vector))

    @property
    def coefficients(self) -> Dict[Index, Fraction]:
        """Coefficients keyed by 0-based multi-index."""
        return dict(self.terms)

    def coefficient(self, index: Index) -> Fraction:
        """Coefficient at a 0-based multi-index."""
        return self.coefficients.get(tuple(index), Fraction(0))

    @property
    def support_size(self) -> int:
        """Number of nonzero coefficients."""
        return len(self.terms)

    def is_zero(self) -> bool:
        """Return whether all coefficients vanish."""
        return not self.terms

    def dense(self) -> List[Fraction]:
        """Row-major coordinate vector."""
        vector = [Fraction(0)] * self.shape.total_dim
        for index, coefficient in self.terms:
            vector[self.shape.linear_index(index)] = coefficient
        return vector

    def integer_dense(self) -> List[int]:
        """Row-major coordinate vector rescaled to integers (same kernels, same signature)."""
        return integer_vector(self.dense())

    def scaled(self, factor: Scalar) -> 'State':
        """Return `factor * v`."""
        return State.from_terms(self.shape, ((i, c * factor) for i, c in self.terms))

    def __add__(self, other: 'State') -> 'State':
        """Sum of two states of the same shape."""
        if other.shape != self.shape:
            raise ShapeMismatch(f"cannot add states of shapes {self.shape} and {other.shape}")
        return State.from_terms(self.shape, list(self.terms) + list(other.terms))

    def __str__(self) -> str:
        """Canonical text form."""
        return render(self)


def _check_index(shape: Shape, index: Index) -> None:
    if len(index) != shape.n:
        raise ArityMismatch(f"multi-index {_one_based(index)} has {len(index)} entries, shape {shape} needs {shape.n}")
    for j, d in zip(index, shape.dims):
        if not 0 <= j < d:
            raise IndexOutOfRange(f"multi-index {_one_based(index)} is out of range for shape {shape}")


def _one_based(index: Index) -> str:
    return "[" + ",".join(str(j + 1) for j in index) + "]"


_TOKENS = re.compile(r"\d+|[-+*/\[\],]|\S")


class _StateParser:
    """Recursive descent parser of the term grammar."""

    def __init__(self, text: str, shape: Shape) -> None:
        self.text = text
        self.shape = shape
        self.tokens = _TOKENS.findall(text)
        self.position = 0

    def parse(self) -> State:
        if not self.tokens:
            raise StateSyntaxError("empty state text")
        if self.tokens == ["0"]:
            return State.zero(self.shape)

        terms: List[Tuple[Index, Fraction]] = []
        sign = 1
        if self._peek() in ("+", "-"):
            sign = -1 if self._next() == "-" else 1
        while True:
            coefficient, index = self._term()
            terms.append((index, sign * coefficient))
            if self._peek() is None:
                break
            operator = self._next()
            if operator not in ("+", "-"):
                self._fail(f"expected '+' or '-', found {operator!r}")
            sign = -1 if operator == "-" else 1
        return State.from_terms(self.shape, terms, one_based=True)

    def _term(self) -> Tuple[Fraction, Index]:
        coefficient = Fraction(1)
        if self._peek_is_number():
            numerator = int(self._next())
            denominator = 1
            if self._peek() == "/":
                self._next()
                denominator = self._number()
                if denominator == 0:
                    self._fail("zero denominator")
            coefficient = Fraction(numerator, denominator)
            self._expect("*")
        self._expect("[")
        indices = [self._number()]
        while self._peek() == ",":
            self._next()
            indices.append(self._number())
        self._expect("]")
        return coefficient, tuple(indices)

    def _number(self) -> int:
        if not self._peek_is_number():
            self._fail(f"expected an integer, found {self._peek()!r}")
        return int(self._next())

    def _peek(self) -> Optional[str]:
        return self.tokens[self.position] if self.position < len(self.tokens) else None

    def _peek_is_number(self) -> bool:
        token = self._peek()
        return token is not None and token.isdigit()

    def _next(self) -> str:
        token = self._peek()
        if token is None:
            self._fail("unexpected end of text")
        self.position += 1
        return token

    def _expect(self, token: str) -> None:
        found = self._next()
        if found != token:
            self._fail(f"expected {token!r}, found {found!r}")

    def _fail(self, message: str) -> None:
        raise StateSyntaxError(f"{message} in state {self.text!r}")


def parse_state(text: str, shape: Shape) -> State:
    """
    Parse the text form of a state.

    Grammar: `term (('+'|'-') term)*`, `term := [coeff '*'] '[' j1 ',' ... ',' jn ']'`,
    `coeff := integer | integer '/' positive-integer`. A leading sign is accepted, the
    literal `0` is the zero state, and repeated multi-indices accumulate.

    Args:
        text (str): state text
        shape (Shape): the shape the indices refer to

    Returns:
        State: the parsed state
    """
    return _StateParser(text, shape).parse()


def render(v: State) -> str:
    """
    Render the canonical text form, inverse of `parse_state`.

    Args:
        v (State): the state

    Returns:
        str: terms in ascending multi-index order, `0` for the zero state
    """
    if v.is_zero():
        return "0"
    parts = []
    for position, (index, coefficient) in enumerate(v.terms):
        magnitude = abs(coefficient)
        body = _one_based(index) if magnitude == 1 else f"{magnitude}*{_one_based(index)}"
        if coefficient < 0:
            parts.append("-" + body)
        else:
            parts.append(body if position == 0 else "+" + body)
    return "".join(parts)


def flatten(v: State, J: int) -> Mat:
    """
    Matrix of the flattening `f_J(v): V_J → V_{I∖J}`.

    Args:
        v (State): the state
        J (int): bitmask of a nonempty proper subset

    Returns:
        Mat: `dim V_J × dim V_{I∖J}` matrix, rows over `J`, columns over the complement
    """
    shape = v.shape
    shape.check_subset(J)
    rest = shape.complement(J)
    cols = shape.dim_of(rest)
    entries = [Fraction(0)] * (shape.dim_of(J) * cols)
    for index, coefficient in v.terms:
        entries[shape.sub_linear(index, J) * cols + shape.sub_linear(index, rest)] = coefficient
    return Mat(shape.dim_of(J), cols, tuple(entries))


def extended_flatten(v: State, J: int) -> Mat:
    """
    Matrix of the extended flattening `f̃_J(v) = f_J(v) ⊗ id: V → V_{I∖J} ⊗ V_{I∖J}`.

    The entry at row `(j, k)` and column `(i, k')` is `v_{i,j}` when `k = k'`, else zero.

    Args:
        v (State): the state
        J (int): bitmask of a nonempty proper subset

    Returns:
        Mat: `(dim V_{I∖J})² × dim V` matrix
    """
    shape = v.shape
    shape.check_subset(J)
    rest = shape.complement(J)
    rest_dim = shape.dim_of(rest)
    total = shape.total_dim
    entries = [Fraction(0)] * (rest_dim * rest_dim * total)
    rest_tuples = shape.sub_tuples(rest)
    for index, coefficient in v.terms:
        part = tuple(index[i] for i in shape.members(J))
        j = shape.sub_linear(index, rest)
        for k, rest_index in enumerate(rest_tuples):
            col = shape.linear_index(shape.merge(J, part, rest_index))
            entries[(j * rest_dim + k) * total + col] = coefficient
    return Mat(rest_dim * rest_dim, total, tuple(entries))


@dataclass(frozen=True)
class LocalTransform:
    """
    Element `g = (g_1, ..., g_n)` of the local group, acting by `(g v)_j = Σ_k v_k Π (g_i)_{k_i, j_i}`.

    Attributes:
        factors (Tuple[Mat, ...]): one square matrix per subsystem
    """

    factors: Tuple[Mat, ...]

    @classmethod
    def identity(cls, shape: Shape) -> 'LocalTransform':
        """Return the identity element for a shape."""
        return cls(tuple(Mat.identity(d) for d in shape.dims))

    def is_invertible(self) -> bool:
        """Return whether every factor has a nonzero determinant."""
        return all(determinant(factor) != 0 for factor in self.factors)

    def then(self, other: 'LocalTransform') -> 'LocalTransform':
        """Return the transform equal to applying `self` first and `other` second."""
        if len(other.factors) != len(self.factors):
            raise ShapeMismatch("local transforms act on different numbers of subsystems")
        return LocalTransform(tuple(g @ h for g, h in zip(self.factors, other.factors)))


def apply_local(v: State, g: LocalTransform) -> State:
    """
    Apply a local transformation factor by factor.

    Args:
        v (State): the state
        g (LocalTransform): factor sizes must match the shape

    Returns:
        State: `g v`
    """
    shape = v.shape
    if len(g.factors) != shape.n or any(f.rows != d or f.cols != d for f, d in zip(g.factors, shape.dims)):
        raise ShapeMismatch(f"local transform does not match shape {shape}")
    terms: Dict[Index, Fraction] = dict(v.terms)
    for mode, factor in enumerate(g.factors):
        updated: Dict[Index, Fraction] = defaultdict(Fraction)
        for index, coefficient in terms.items():
            k = index[mode]
            for j in range(factor.cols):
                x = factor[k, j]
                if x:
                    updated[index[:mode] + (j,) + index[mode + 1:]] += coefficient * x
        terms = {i: c for i, c in updated.items() if c}
    return State.from_terms(shape, terms)


def check_permutation(perm: Sequence[int], n: int) -> Permutation:
    """
    Validate a 0-based permutation given as the images `(σ(0), ..., σ(n-1))`.

    Args:
        perm (Sequence[int]): images
        n (int): number of subsystems

    Returns:
        Permutation: the permutation as a tuple
    """
    perm = tuple(perm)
    if len(perm) != n:
        raise ArityMismatch(f"permutation {perm} acts on {len(perm)} subsystems, expected {n}")
    if sorted(perm) != list(range(n)):
        raise InvalidArgument(f"{perm} is not a permutation of 0..{n - 1}")
    return perm


def permute_subsystems(v: State, perm: Sequence[int]) -> State:
    """
    Relabel subsystems: subsystem `i` of `v` becomes subsystem `σ(i)`.

    Args:
        v (State): the state
        perm (Sequence[int]): 0-based images `σ(i)`

    Returns:
        State: the permuted state
    """
    perm = check_permutation(perm, v.shape.n)
    if not v.shape.is_stable(perm):
        raise ShapeNotPermutable(f"shape {v.shape} is not stable under the permutation {perm}")
    permuted = []
    for index, coefficient in v.terms:
        new_index = [0] * len(index)
        for i, j in enumerate(index):
            new_index[perm[i]] = j
        permuted.append((tuple(new_index), coefficient))
    return State.from_terms(v.shape, permuted)


def two_factor_decomposition(v: State, J: int) -> List[Tuple[Tuple[Fraction, ...], Tuple[Fraction, ...]]]:
    """
    Write `v = Σ_i w_i ⊗ w'_i` with `{w_i} ⊂ V_J` and `{w'_i} ⊂ V_{I∖J}` linearly independent.

    The `w'_i` are the pivot rows of the RREF of `f_J(v)`, the `w_i` the matching pivot
    columns of `f_J(v)`.

    Args:
        v (State): a nonzero state
        J (int): bitmask of a nonempty proper subset

    Returns:
        rank(f_J(v)) pairs `(w_i, w'_i)` of coordinate vectors
    """
    if v.is_zero():
        raise ZeroState("the zero state has no two-factor decomposition")
    matrix = flatten(v, J)
    reduced, pivots, _ = rref(matrix)
    return [(matrix.column(col), reduced.row(i)) for i, col in enumerate(pivots)]


@dataclass(frozen=True)
class CoeffSpec:
    """
    Distribution of random coefficients.

    Either a finite set of values drawn uniformly, or rationals `p / q` with `p` uniform in
    `[low, high]` and `q` uniform in `[1, max_denominator]`.
    """

    values: Optional[Tuple[Fraction, ...]] = None
    low: int = -9
    high: int = 9
    max_denominator: int = 1

    def __post_init__(self) -> None:
        """Validate the specification."""
        if self.values is not None:
            object.__setattr__(self, 'values', tuple(Fraction(x) for x in self.values))
            if not self.values:
                raise InvalidArgument("coefficient set is empty")
        elif self.low > self.high or self.max_denominator < 1:
            raise InvalidArgument(f"invalid coefficient range [{self.low},{self.high}]/{self.max_denominator}")

    @classmethod
    def from_values(cls, values: Iterable[Scalar]) -> 'CoeffSpec':
        """Uniform choice from a finite set."""
        return cls(values=tuple(Fraction(x) for x in values))

    def draw(self, rng: random.Random) -> Fraction:
        """Draw one coefficient."""
        if self.values is not None:
            return rng.choice(self.values)
        return Fraction(rng.randint(self.low, self.high), rng.randint(1, self.max_denominator))

    def describe(self) -> str:
        """Short description used in reports."""
        if self.values is not None:
            return "{" + ",".join(str(x) for x in self.values) + "}"
        if self.max_denominator == 1:
            return f"[{self.low},{self.high}]"
        return f"[{self.low},{self.high}]/[1,{self.max_denominator}]"


def random_state(shape: Shape, coeff_spec: CoeffSpec, seed: int) -> State:
    """
    Draw a state with independent coefficients per multi-index.

    Args:
        shape (Shape): the shape
        coeff_spec (CoeffSpec): coefficient distribution
        seed (int): seed, the result is a function of it

    Returns:
        State: the random state
    """
    rng = random.Random(seed)
    return State.from_terms(shape, [(index, coeff_spec.draw(rng)) for index in shape.all_indices()])


def random_local_transform(shape: Shape, seed: int, low: int = -3, high: int = 3) -> LocalTransform:
    """
    Draw an invertible local transformation with integer entries in `[low, high]`.

    Args:
        shape (Shape): the shape
        seed (int): seed
        low (int): smallest entry
        high (int): largest entry

    Returns:
        LocalTransform: factors with nonzero determinant
    """
    rng = random.Random(seed)
    factors = []
    for d in shape.dims:
        while True:
            factor = Mat.from_rows([[rng.randint(low, high) for _ in range(d)] for _ in range(d)])
            if determinant(factor) != 0:
                factors.append(factor)
                break
    return LocalTransform(tuple(factors))


def random_sl_transform(shape: Shape, seed: int) -> LocalTransform:
    """Draw a local transformation whose factors all have determinant one."""
    factors = []
    for factor in random_local_transform(shape, seed).factors:
        det = determinant(factor)
        rows = factor.to_rows()
        rows[0] = [x / det for x in rows[0]]
        factors.append(Mat.from_rows(rows))
    return LocalTransform(tuple(factors))
