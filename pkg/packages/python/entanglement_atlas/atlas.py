"""
Built-in classification tables.

Supported shapes:

- `(d1, d2)`: one class per flattening rank, signature `(d1 - r)` over `{{1}}`.
- `(2, 2, d)` and `(2, 3, d)`, `d ≥ 2`: parametric tables whose signature entries are
  affine in `d`. Rows with a negative entry at the requested `d` are discarded.
- `(2, 2, 2, 2)`: 83 classes. The C33 representative depends on a parameter `c`
  (`c ∉ {-2, -1, 0, 1}`), rendered from a template.

```python
from entanglement_atlas.atlas import classify
from entanglement_atlas.tensor_state import Shape, parse_state

classify(parse_state("[1,1,1]+[2,2,2]", Shape((2, 2, 2)))).label  # 'C6'
```

Records related by a permutation of equal-dimension subsystems share an orbit id.
"""

import csv
import io
import itertools
import logging
import re
from collections import defaultdict
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from tokenize import TokenError
from typing import Any, Dict, List, Mapping, Optional, Sequence, Set, Tuple, Union

import sympy
from entanglement_atlas.errors import ArityMismatch, InvalidArgument, InvalidParameter, NonQubitShape, TableError, Unsupported
from entanglement_atlas.invariant_engine import GeneratingSet, Signature, canonical_generating_set, signature
from entanglement_atlas.loaders.table_loader import load_records, load_table
from entanglement_atlas.miscellaneous.union_find import find_orbits
from entanglement_atlas.ratlinalg import Scalar
from entanglement_atlas.tensor_state import Shape, State, parse_state
from jinja2 import BaseLoader, Environment, StrictUndefined, TemplateError
from sympy.parsing.sympy_parser import parse_expr

logger = logging.getLogger(__name__)

PARAMETRIC_TABLES = {(2, 2): "atlas_22d", (2, 3): "atlas_23d"}
QUBIT_TABLES = {(2, 2, 2, 2): "qubits4"}
OPERATOR_TABLES = {(2, 2, 2): "operators_222", (2, 2, 2, 2): "operators_2222"}
INDEX_LETTERS = "ijkl"

_AFFINE_TERM = re.compile(r"[+-]?[^+-]+")


@dataclass(frozen=True)
class AffineInt:
    """
    Integer affine function `slope * d + constant`.

    Attributes:
        constant (int): value at `d = 0`
        slope (int): coefficient of `d`
    """

    constant: int
    slope: int = 0

    @classmethod
    def parse(cls, text: Union[int, str]) -> 'AffineInt':
        """
        Parse a table entry such as `3d-2`, `d`, `4d` or `2`.

        Args:
            text (Union[int, str]): the entry

        Returns:
            AffineInt: the function
        """
        compact = str(text).replace(" ", "")
        terms = _AFFINE_TERM.findall(compact)
        if not compact or "".join(terms) != compact:
            raise TableError(f"invalid affine entry {text!r}")
        constant, slope = 0, 0
        try:
            for term in terms:
                if term.endswith("d"):
                    factor = term[:-1]
                    slope += -1 if factor == "-" else 1 if factor in ("", "+") else int(factor)
                else:
                    constant += int(term)
        except ValueError:
            raise TableError(f"invalid affine entry {text!r}")
        return cls(constant, slope)

    def at(self, d: int) -> int:
        """Value at `d`."""
        return self.slope * d + self.constant

    def __str__(self) -> str:
        """Render as `3d-2`."""
        if not self.slope:
            return str(self.constant)
        head = "d" if self.slope == 1 else "-d" if self.slope == -1 else f"{self.slope}d"
        if not self.constant:
            return head
        return f"{head}{self.constant:+d}"


@dataclass
class ParameterSpec:
    """Free parameter of a templated representative."""

    name: str
    default: int
    excluded: List[int] = field(default_factory=list)


@dataclass
class AtlasRow:
    """One table row as stored in YAML."""

    label: str
    signature: List[Union[int, str]]
    representative: str
    tier: Optional[int] = None
    parameter: Optional[ParameterSpec] = None


@dataclass
class OperatorRow:
    """Operator-expression representative shared by one permutation orbit."""

    labels: List[str]
    expression: str


@dataclass(frozen=True)
class ClassRecord:
    """
    One class of an instantiated atlas.

    Attributes:
        label (str): e.g. `C17`
        signature (Signature): the invariant values
        representative (str): a member of the class in the state text grammar
        orbit_id (int): 1-based id of the permutation orbit, in table order of first occurrence
        tier (int, optional): four qubits only: 1, 2 or 3 for coefficients in `{0,1}`, `{0,1,-1}` or neither
    """

    label: str
    signature: Signature
    representative: str
    orbit_id: int = 0
    tier: Optional[int] = None

    def state(self, shape: Shape) -> State:
        """Representative as a state."""
        return parse_state(self.representative, shape)

    def to_dict(self) -> Dict[str, Any]:
        """JSON-ready mapping."""
        data: Dict[str, Any] = {
            "label": self.label,
            "signature": list(self.signature.values),
            "representative": self.representative,
            "orbit": self.orbit_id,
        }
        if self.tier is not None:
            data["tier"] = self.tier
        return data


@dataclass(frozen=True)
class UnknownClass:
    """Signature without a matching record."""

    signature: Signature
    label: str = field(default="unknown", init=False)


@dataclass(frozen=True)
class Atlas:
    """
    Instantiated classification table.

    Attributes:
        shape (Shape): the concrete shape
        family (str): table family, e.g. `2,2,d`
        generating_set (GeneratingSet): the families indexing the signatures
        records (Tuple[ClassRecord, ...]): the classes, in table order
    """

    shape: Shape
    family: str
    generating_set: GeneratingSet
    records: Tuple[ClassRecord, ...]

    def lookup(self, sig: Signature) -> Optional[ClassRecord]:
        """Record with the given signature, if any."""
        for record in self.records:
            if record.signature == sig:
                return record
        return None

    def record(self, label: str) -> ClassRecord:
        """Record by label."""
        for record in self.records:
            if record.label == label:
                return record
        raise InvalidArgument(f"no class {label} in the {self.shape} atlas")

    @property
    def labels(self) -> List[str]:
        """Record labels in table order."""
        return [record.label for record in self.records]

    def orbit_partition(self) -> List[List[ClassRecord]]:
        """Records grouped by orbit id."""
        groups: Dict[int, List[ClassRecord]] = defaultdict(list)
        for record in self.records:
            groups[record.orbit_id].append(record)
        return [groups[orbit_id] for orbit_id in sorted(groups)]

    def to_json_dict(self) -> Dict[str, Any]:
        """JSON-ready mapping."""
        return {
            "shape": list(self.shape.dims),
            "family": self.family,
            "generating_set": self.generating_set.labels,
            "records": [record.to_dict() for record in self.records],
        }

    def to_csv(self) -> str:
        """CSV with the columns `label, signature, representative, orbit, tier`."""
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["label", "signature", "representative", "orbit", "tier"])
        for record in self.records:
            tier = "" if record.tier is None else record.tier
            writer.writerow([record.label, str(record.signature), record.representative, record.orbit_id, tier])
        return buffer.getvalue()


def _signed(value: Any) -> str:
    value = Fraction(value)
    return f"+{value}" if value >= 0 else str(value)


_TEMPLATES = Environment(loader=BaseLoader(), undefined=StrictUndefined, autoescape=False)
_TEMPLATES.filters['signed'] = _signed


def render_representative(row: AtlasRow, value: Optional[Scalar] = None) -> str:
    """
    Representative text of a row, substituting its parameter.

    Args:
        row (AtlasRow): the table row
        value (Scalar, optional): parameter value. Defaults to None (the row's default).

    Returns:
        str: text in the state grammar
    """
    if row.parameter is None:
        return row.representative
    spec = row.parameter
    value = Fraction(spec.default if value is None else value)
    if value in {Fraction(x) for x in spec.excluded}:
        raise InvalidParameter(f"{row.label} is not defined for {spec.name}={value}; excluded values are {spec.excluded}")
    try:
        return _TEMPLATES.from_string(row.representative).render({spec.name: value})
    except TemplateError as error:
        raise TableError(f"representative template of {row.label} is invalid: {error}")


def orbits(atlas: Atlas) -> List[List[ClassRecord]]:
    """
    Partition the records into orbits of the subsystem permutations that fix the shape.

    Two records share an orbit when a permutation maps one signature to the other under
    the induced action on the generating set. Permutations under which the generating
    set is not closed act trivially on the signatures and are skipped.

    Args:
        atlas (Atlas): the atlas

    Returns:
        List[List[ClassRecord]]: orbits ordered by first record, records in table order
    """
    shape, R = atlas.shape, atlas.generating_set
    generators = [
        perm for perm in itertools.permutations(range(shape.n))
        if perm != tuple(range(shape.n)) and shape.is_stable(perm) and R.is_closed_under(perm)
    ]
    by_signature = {record.signature.values: record for record in atlas.records}
    partition = find_orbits(
        generators,
        [record.signature.values for record in atlas.records],
        lambda perm, values: Signature(values, R).permuted(perm).values,
    )
    logger.debug(f"{len(atlas.records)} classes of {shape} fall into {len(partition)} orbits")
    return [[by_signature[values] for values in orbit] for orbit in partition]


def _with_orbits(atlas: Atlas) -> Atlas:
    orbit_ids = {}
    for orbit_id, orbit in enumerate(orbits(atlas), start=1):
        for record in orbit:
            orbit_ids[record.label] = orbit_id
    return replace(atlas, records=tuple(replace(record, orbit_id=orbit_ids[record.label]) for record in atlas.records))


def _rank_atlas(shape: Shape) -> Atlas:
    R = canonical_generating_set(2)
    d1, d2 = shape.dims
    records = []
    for r in range(min(d1, d2) + 1):
        representative = "+".join(f"[{a},{a}]" for a in range(1, r + 1)) or "0"
        records.append(ClassRecord(f"C{r}", Signature((d1 - r,), R), representative))
    return Atlas(shape, "d1,d2", R, tuple(records))


def _parametric_atlas(shape: Shape, table: str) -> Atlas:
    document = load_table(table)
    rows = load_records(table, AtlasRow, key="records")
    R = canonical_generating_set(3)
    d = shape.dims[2]
    records = []
    for row in rows:
        values = tuple(AffineInt.parse(entry).at(d) for entry in row.signature)
        if min(values) < 0:
            continue
        records.append(ClassRecord(row.label, Signature(values, R), render_representative(row)))
    logger.debug(f"{table} at d={d}: {len(records)} of {len(rows)} rows kept")
    return Atlas(shape, document["family"], R, tuple(records))


def _qubit_atlas(shape: Shape, table: str, c: Optional[Fraction]) -> Atlas:
    document = load_table(table)
    R = canonical_generating_set(shape.n)
    records = []
    for row in load_records(table, AtlasRow, key="records"):
        values = tuple(int(entry) for entry in row.signature)
        records.append(ClassRecord(row.label, Signature(values, R), render_representative(row, c), tier=row.tier or 1))
    return Atlas(shape, document["family"], R, tuple(records))


@lru_cache(maxsize=None)
def _build_atlas(shape: Shape, c: Optional[Fraction]) -> Atlas:
    if shape.n == 2:
        atlas = _rank_atlas(shape)
    elif shape.n == 3 and shape.dims[:2] in PARAMETRIC_TABLES:
        atlas = _parametric_atlas(shape, PARAMETRIC_TABLES[shape.dims[:2]])
    elif shape.dims in QUBIT_TABLES:
        atlas = _qubit_atlas(shape, QUBIT_TABLES[shape.dims], c)
    else:
        raise Unsupported(f"no built-in atlas for shape {shape}; supported: (d1,d2), (2,2,d), (2,3,d), (2,2,2,2)")
    return _with_orbits(atlas)


def builtin_atlas(shape: Shape, c: Optional[Scalar] = None) -> Atlas:
    """
    Instantiate the built-in table for a shape.

    Args:
        shape (Shape): `(d1, d2)`, `(2, 2, d)`, `(2, 3, d)` or `(2, 2, 2, 2)`
        c (Scalar, optional): parameter of the C33 representative. Defaults to None (`c = 2`).

    Returns:
        Atlas: records with orbit ids
    """
    return _build_atlas(shape, None if c is None else Fraction(c))


def classify(v: State, c: Optional[Scalar] = None) -> Union[ClassRecord, UnknownClass]:
    """
    Find the class of a state.

    Args:
        v (State): the state
        c (Scalar, optional): C33 parameter used for the returned representative

    Returns:
        the matching record, or `UnknownClass` carrying the computed signature
    """
    atlas = builtin_atlas(v.shape, c)
    sig = signature(v, atlas.generating_set)
    record = atlas.lookup(sig)
    if record is None:
        logger.debug(f"signature {sig} of {v.shape} is not in the atlas")
        return UnknownClass(sig)
    return record


@dataclass(frozen=True)
class OperatorExpr:
    """
    Polynomial in the commuting flip operators `a_1 ... a_n`, with `a_i² = 1`.

    `a_i` maps index 1 of subsystem `i` to index 2 and back.

    Attributes:
        terms (Tuple[Tuple[int, Fraction], ...]): bitmask of the flipped subsystems and its nonzero coefficient
    """

    terms: Tuple[Tuple[int, Fraction], ...]

    @classmethod
    def parse(
        cls,
        text: str,
        n: int,
        assignment: Sequence[int] = (),
        parameters: Optional[Mapping[str, Scalar]] = None,
    ) -> 'OperatorExpr':
        """
        Parse an expression such as `1 + a_i*(a_j + a_k)`.

        Args:
            text (str): the expression; `a1` or `a_1` name subsystem 1
            n (int): number of subsystems
            assignment (Sequence[int]): 1-based subsystems bound to `a_i`, `a_j`, `a_k`, `a_l`
            parameters (Mapping[str, Scalar], optional): rational values of other symbols, e.g. `{"c": 2}`

        Returns:
            OperatorExpr: the expanded operator
        """
        flips = [sympy.Symbol(f"a{k}") for k in range(1, n + 1)]
        names: Dict[str, Any] = {}
        for k, symbol in enumerate(flips, start=1):
            names[f"a{k}"] = symbol
            names[f"a_{k}"] = symbol
        for letter, subsystem in zip(INDEX_LETTERS, assignment):
            if not 1 <= subsystem <= n:
                raise ArityMismatch(f"subsystem {subsystem} does not exist for n={n}")
            names[f"a_{letter}"] = flips[subsystem - 1]
        for name, value in (parameters or {}).items():
            value = Fraction(value)
            names[name] = sympy.Rational(value.numerator, value.denominator)

        try:
            expression = sympy.expand(parse_expr(text, local_dict=names))
        except (sympy.SympifyError, SyntaxError, TokenError, TypeError) as error:
            raise InvalidArgument(f"cannot parse operator expression {text!r}: {error}")
        unknown = expression.free_symbols - set(flips)
        if unknown:
            raise InvalidArgument(f"operator expression {text!r} has unbound symbols {sorted(str(s) for s in unknown)}")

        accumulated: Dict[int, Fraction] = defaultdict(Fraction)
        for exponents, coefficient in sympy.Poly(expression, *flips).terms():
            if not coefficient.is_Rational:
                raise InvalidArgument(f"operator expression {text!r} has a non-rational coefficient {coefficient}")
            mask = sum(1 << i for i, exponent in enumerate(exponents) if exponent % 2)
            accumulated[mask] += Fraction(int(coefficient.p), int(coefficient.q))
        return cls(tuple(sorted((mask, x) for mask, x in accumulated.items() if x)))


def rep_from_operator(expr: OperatorExpr, shape: Shape) -> State:
    """
    Apply an operator to `[1, ..., 1]`.

    Args:
        expr (OperatorExpr): the operator
        shape (Shape): a qubit shape

    Returns:
        State: `A [1, ..., 1]`
    """
    if any(d != 2 for d in shape.dims):
        raise NonQubitShape(f"flip operators need every dimension to be 2, got {shape}")
    terms = []
    for mask, coefficient in expr.terms:
        if mask >= 1 << shape.n:
            raise ArityMismatch(f"operator acts on subsystems beyond n={shape.n}")
        terms.append((tuple(mask >> i & 1 for i in range(shape.n)), coefficient))
    return State.from_terms(shape, terms)


def operator_table(shape: Shape) -> List[OperatorRow]:
    """Operator-expression representatives for `(2,2,2)` or `(2,2,2,2)`."""
    if shape.dims not in OPERATOR_TABLES:
        raise Unsupported(f"no operator table for shape {shape}")
    return load_records(OPERATOR_TABLES[shape.dims], OperatorRow)


def operator_labels(row: OperatorRow, shape: Shape, c: Optional[Scalar] = None) -> Set[str]:
    """
    Classes reached by an operator row over every assignment of distinct subsystems to its indices.

    Args:
        row (OperatorRow): the row
        shape (Shape): `(2,2,2)` or `(2,2,2,2)`
        c (Scalar, optional): value of the parameter `c`. Defaults to None (2).

    Returns:
        Set[str]: labels found, `unknown` for signatures outside the atlas
    """
    atlas = builtin_atlas(shape, c)
    parameters = {"c": 2 if c is None else c}
    labels = set()
    for assignment in itertools.permutations(range(1, shape.n + 1)):
        expr = OperatorExpr.parse(row.expression, shape.n, assignment, parameters)
        record = atlas.lookup(signature(rep_from_operator(expr, shape), atlas.generating_set))
        labels.add("unknown" if record is None else record.label)
    return labels
