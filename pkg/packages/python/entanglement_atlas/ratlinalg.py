"""
Exact rational linear algebra.

Every kernel dimension in the package is computed here, over the rationals, so rank
decisions never depend on a floating point tolerance. Matrices are small and dense;
subspaces are kept as row bases in reduced row-echelon form, which is canonical, so two
subspaces are equal exactly when their bases compare equal.

The hot path of the invariant computation uses `integer_row_basis` / `integer_rank`,
a fraction-free elimination over integer rows (kernels are invariant under rescaling a
row, so denominators can always be cleared first).
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from entanglement_atlas.errors import ColumnMismatch, EmptyFamily, InvalidArgument

Rational = Fraction
Scalar = Union[int, Fraction]


@dataclass(frozen=True)
class Mat:
    """
    Dense exact matrix, entries stored row-major.

    Attributes:
        rows (int): number of rows
        cols (int): number of columns
        entries (Tuple[Fraction, ...]): `rows * cols` entries in row-major order
    """

    rows: int
    cols: int
    entries: Tuple[Fraction, ...]

    def __post_init__(self) -> None:
        """Validate the entry count."""
        if self.rows < 0 or self.cols < 0 or len(self.entries) != self.rows * self.cols:
            raise InvalidArgument(
                f"matrix of size {self.rows}x{self.cols} needs {self.rows * self.cols} entries, got {len(self.entries)}")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Scalar]], cols: Optional[int] = None) -> 'Mat':
        """
        Build a matrix from nested rows.

        Args:
            rows (Sequence[Sequence[Scalar]]): the rows
            cols (int): column count, required when `rows` is empty

        Returns:
            Mat: the matrix
        """
        if cols is None:
            if not rows:
                raise InvalidArgument("column count is required for a matrix without rows")
            cols = len(rows[0])
        entries: List[Fraction] = []
        for row in rows:
            if len(row) != cols:
                raise InvalidArgument(f"ragged row of length {len(row)}, expected {cols}")
            entries.extend(Fraction(x) for x in row)
        return cls(len(rows), cols, tuple(entries))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> 'Mat':
        """Return the zero matrix of the given size."""
        return cls(rows, cols, (Fraction(0),) * (rows * cols))

    @classmethod
    def identity(cls, size: int) -> 'Mat':
        """Return the identity matrix of the given size."""
        return cls(size, size, tuple(Fraction(int(i == j)) for i in range(size) for j in range(size)))

    def __getitem__(self, position: Tuple[int, int]) -> Fraction:
        """Return the entry at `(row, col)`."""
        row, col = position
        return self.entries[row * self.cols + col]

    def row(self, index: int) -> Tuple[Fraction, ...]:
        """Return one row."""
        return self.entries[index * self.cols:(index + 1) * self.cols]

    def to_rows(self) -> List[List[Fraction]]:
        """Return the rows as mutable lists."""
        return [list(self.row(i)) for i in range(self.rows)]

    def transpose(self) -> 'Mat':
        """Return the transpose."""
        return Mat(self.cols, self.rows, tuple(self[i, j] for j in range(self.cols) for i in range(self.rows)))

    def __matmul__(self, other: 'Mat') -> 'Mat':
        """Matrix product."""
        if self.cols != other.rows:
            raise InvalidArgument(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        columns = [other.column(j) for j in range(other.cols)]
        return Mat(self.rows, other.cols, tuple(
            sum((a * b for a, b in zip(self.row(i), column)), Fraction(0))
            for i in range(self.rows) for column in columns
        ))

    def column(self, index: int) -> Tuple[Fraction, ...]:
        """Return one column."""
        return tuple(self.entries[i * self.cols + index] for i in range(self.rows))

    def is_zero(self) -> bool:
        """Return whether every entry is zero."""
        return not any(self.entries)


@dataclass(frozen=True)
class Subspace:
    """
    Subspace of F^ambient_dim given by a row basis in reduced row-echelon form.

    Attributes:
        ambient_dim (int): dimension of the ambient coordinate space
        basis (Mat): linearly independent rows, in RREF
    """

    ambient_dim: int
    basis: Mat

    @classmethod
    def span(cls, vectors: Sequence[Sequence[Scalar]], ambient_dim: int) -> 'Subspace':
        """
        Return the span of arbitrary vectors in canonical form.

        Args:
            vectors (Sequence[Sequence[Scalar]]): spanning vectors
            ambient_dim (int): ambient dimension

        Returns:
            Subspace: the span
        """
        reduced, _, rank_ = rref(Mat.from_rows(vectors, ambient_dim))
        return cls(ambient_dim, Mat(rank_, ambient_dim, reduced.entries[:rank_ * ambient_dim]))

    @property
    def dim(self) -> int:
        """Dimension of the subspace."""
        return self.basis.rows

    def vectors(self) -> List[Tuple[Fraction, ...]]:
        """Return the basis vectors."""
        return [self.basis.row(i) for i in range(self.basis.rows)]

    def contains(self, vector: Sequence[Scalar]) -> bool:
        """Return whether the vector lies in the subspace."""
        return rank(Mat.from_rows(self.vectors() + [list(vector)], self.ambient_dim)) == self.dim


def rref(m: Mat) -> Tuple[Mat, List[int], int]:
    """
    Reduce a matrix to its reduced row-echelon form.

    Args:
        m (Mat): the matrix

    Returns:
        the unique RREF of `m`, the pivot columns and the rank
    """
    rows = m.to_rows()
    pivots: List[int] = []
    pivot_row = 0
    for col in range(m.cols):
        if pivot_row == m.rows:
            break
        found = next((r for r in range(pivot_row, m.rows) if rows[r][col] != 0), None)
        if found is None:
            continue
        rows[pivot_row], rows[found] = rows[found], rows[pivot_row]
        lead = rows[pivot_row][col]
        rows[pivot_row] = [x / lead for x in rows[pivot_row]]
        for r in range(m.rows):
            factor = rows[r][col]
            if r != pivot_row and factor != 0:
                rows[r] = [a - factor * b for a, b in zip(rows[r], rows[pivot_row])]
        pivots.append(col)
        pivot_row += 1
    return Mat.from_rows(rows, m.cols), pivots, len(pivots)


def rank(m: Mat) -> int:
    """Return the rank of a matrix."""
    return integer_rank(_integer_rows(m.to_rows()))


def nullspace(m: Mat) -> Subspace:
    """
    Compute the kernel `{x : m x = 0}`.

    Args:
        m (Mat): the matrix

    Returns:
        Subspace: the kernel, basis in RREF
    """
    reduced, pivots, _ = rref(m)
    pivot_set = set(pivots)
    free = [col for col in range(m.cols) if col not in pivot_set]
    vectors = []
    for free_col in free:
        vector = [Fraction(0)] * m.cols
        vector[free_col] = Fraction(1)
        for i, pivot in enumerate(pivots):
            vector[pivot] = -reduced[i, free_col]
        vectors.append(vector)
    return Subspace.span(vectors, m.cols)


def kernel_intersection(ms: Sequence[Mat]) -> Subspace:
    """
    Intersect the kernels of several matrices with a common column count.

    Args:
        ms (Sequence[Mat]): the matrices

    Returns:
        Subspace: the nullspace of the vertically stacked matrices
    """
    if not ms:
        raise EmptyFamily("kernel intersection over an empty list of matrices")
    cols = ms[0].cols
    if any(m.cols != cols for m in ms):
        raise ColumnMismatch(f"column counts differ: {sorted({m.cols for m in ms})}")
    return nullspace(vstack(ms))


def orthogonal_complement(s: Subspace) -> Subspace:
    """Return the vectors orthogonal to `s` under the standard coordinate pairing."""
    return nullspace(s.basis)


def kronecker_subspace(s: Subspace, d: int) -> Subspace:
    """
    Return `s ⊗ F^d`, with basis `b ⊗ e_k` for the basis vectors `b` of `s`.

    Args:
        s (Subspace): the left factor
        d (int): dimension of the right factor

    Returns:
        Subspace: the tensor product subspace of dimension `dim(s) * d`
    """
    if d < 1:
        raise InvalidArgument(f"kronecker factor dimension must be positive, got {d}")
    vectors = []
    for b in s.vectors():
        for k in range(d):
            vector = [Fraction(0)] * (s.ambient_dim * d)
            for i, x in enumerate(b):
                vector[i * d + k] = x
            vectors.append(vector)
    return Subspace.span(vectors, s.ambient_dim * d)


def kronecker(a: Mat, b: Mat) -> Mat:
    """Return the Kronecker product of two matrices."""
    return Mat(a.rows * b.rows, a.cols * b.cols, tuple(
        a[i, j] * b[k, l]
        for i in range(a.rows) for k in range(b.rows)
        for j in range(a.cols) for l in range(b.cols)
    ))


def vstack(ms: Sequence[Mat]) -> Mat:
    """Stack matrices with equal column counts vertically."""
    cols = ms[0].cols
    return Mat(sum(m.rows for m in ms), cols, tuple(x for m in ms for x in m.entries))


def determinant(m: Mat) -> Fraction:
    """
    Compute the determinant by Gaussian elimination.

    Args:
        m (Mat): a square matrix

    Returns:
        Fraction: the determinant
    """
    if m.rows != m.cols:
        raise InvalidArgument(f"determinant of a non-square {m.rows}x{m.cols} matrix")
    rows = m.to_rows()
    result = Fraction(1)
    for col in range(m.cols):
        found = next((r for r in range(col, m.rows) if rows[r][col] != 0), None)
        if found is None:
            return Fraction(0)
        if found != col:
            rows[col], rows[found] = rows[found], rows[col]
            result = -result
        lead = rows[col][col]
        result *= lead
        for r in range(col + 1, m.rows):
            factor = rows[r][col] / lead
            if factor != 0:
                rows[r] = [a - factor * b for a, b in zip(rows[r], rows[col])]
    return result


def integer_row_basis(rows: Iterable[Sequence[int]]) -> List[List[int]]:
    """
    Fraction-free elimination over integer rows.

    Each step takes a remaining row as pivot, clears its leading column from every other
    remaining row by integer cross-multiplication and divides the results by their content.
    The pivots span the same space as the input and are linearly independent.

    Args:
        rows (Iterable[Sequence[int]]): integer row vectors of equal length

    Returns:
        List[List[int]]: independent integer rows spanning the input rows
    """
    pending = [list(row) for row in rows if any(row)]
    basis: List[List[int]] = []
    while pending:
        pivot = pending.pop()
        col = next(i for i, x in enumerate(pivot) if x)
        lead = pivot[col]
        basis.append(pivot)
        remaining = []
        for row in pending:
            factor = row[col]
            if factor:
                row = [lead * a - factor * b for a, b in zip(row, pivot)]
                content = reduce(gcd, row, 0)
                if content == 0:
                    continue
                if content > 1:
                    row = [a // content for a in row]
            remaining.append(row)
        pending = remaining
    return basis


def integer_rank(rows: Iterable[Sequence[int]]) -> int:
    """Return the rank of a list of integer rows."""
    return len(integer_row_basis(rows))


def integer_vector(vector: Sequence[Scalar]) -> List[int]:
    """
    Scale a rational vector by the lcm of its denominators.

    Args:
        vector (Sequence[Scalar]): rational entries

    Returns:
        List[int]: a positive multiple of the vector with integer entries
    """
    fractions = [Fraction(x) for x in vector]
    scale = reduce(_lcm, (x.denominator for x in fractions), 1)
    return [int(x * scale) for x in fractions]


def _integer_rows(rows: Sequence[Sequence[Scalar]]) -> List[List[int]]:
    return [integer_vector(row) for row in rows]


def _lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b
