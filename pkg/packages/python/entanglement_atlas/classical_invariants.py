"""
Classical continuous invariants of three and four qubits.

Polynomials are written as signed products of 1-based coordinate labels, so
`"+111*122 -112*121"` is `v_{1,1,1} v_{1,2,2} - v_{1,1,2} v_{1,2,1}`. Four-qubit `h2..h4`
are 4×4 determinants of coordinate layouts and `h5..h7` are 3×3 determinants of
quadratic entries.

The zero patterns (`1` for a nonzero value) of the atlas classes ship as tables; classes
that split under the continuous invariants list every variant.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Sequence, Tuple

from entanglement_atlas.errors import InvalidArgument, ShapeMismatch
from entanglement_atlas.loaders.table_loader import load_records
from entanglement_atlas.ratlinalg import Mat, determinant
from entanglement_atlas.tensor_state import Shape, State

logger = logging.getLogger(__name__)

THREE_QUBITS = Shape((2, 2, 2))
FOUR_QUBITS = Shape((2, 2, 2, 2))

H_THREE_QUBITS = (
    "+111*122 -112*121 +211*222 -212*221",
    "+111*212 -112*211 +121*222 -122*221",
    "+111*221 -121*211 +112*222 -122*212",
    # Cayley hyperdeterminant
    "+111*111*222*222 +112*112*221*221 +121*121*212*212 +211*211*122*122"
    " -2*111*222*112*221 -2*111*222*121*212 -2*111*222*211*122"
    " -2*112*221*121*212 -2*112*221*211*122 -2*121*212*211*122"
    " +4*111*122*212*221 +4*112*121*211*222",
)

H1_FOUR_QUBITS = (
    "+1111*2222 -1112*2221 -1121*2212 +1122*2211"
    " -1211*2122 +1212*2121 +1221*2112 -1222*2111"
)

COORDINATE_LAYOUTS = (
    (("1111", "1211", "2111", "2211"),
     ("1112", "1212", "2112", "2212"),
     ("1121", "1221", "2121", "2221"),
     ("1122", "1222", "2122", "2222")),
    (("1111", "2111", "1121", "2121"),
     ("1112", "2112", "1122", "2122"),
     ("1211", "2211", "1221", "2221"),
     ("1212", "2212", "1222", "2222")),
    (("1111", "1112", "2111", "2112"),
     ("1121", "1122", "2121", "2122"),
     ("1211", "1212", "2211", "2212"),
     ("1221", "1222", "2221", "2222")),
)

QUADRATIC_LAYOUTS = (
    (
        ("-1112*1121 +1111*1122",
         "+1122*1211 -1121*1212 -1112*1221 +1111*1222",
         "-1212*1221 +1211*1222"),
        ("+1122*2111 -1121*2112 -1112*2121 +1111*2122",
         "+1222*2111 -1221*2112 -1212*2121 +1211*2122 +1122*2211 -1121*2212 -1112*2221 +1111*2222",
         "+1222*2211 -1221*2212 -1212*2221 +1211*2222"),
        ("-2112*2121 +2111*2122",
         "+2122*2211 -2121*2212 -2112*2221 +2111*2222",
         "-2212*2221 +2211*2222"),
    ),
    (
        ("-1112*1211 +1111*1212",
         "-1122*1211 +1121*1212 -1112*1221 +1111*1222",
         "-1122*1221 +1121*1222"),
        ("+1212*2111 -1211*2112 -1112*2211 +1111*2212",
         "+1222*2111 -1221*2112 +1212*2121 -1211*2122 -1122*2211 +1121*2212 -1112*2221 +1111*2222",
         "+1222*2121 -1221*2122 -1122*2221 +1121*2222"),
        ("-2112*2211 +2111*2212",
         "-2122*2211 +2121*2212 -2112*2221 +2111*2222",
         "-2122*2221 +2121*2222"),
    ),
    (
        ("-1121*1211 +1111*1221",
         "-1122*1211 -1121*1212 +1112*1221 +1111*1222",
         "-1122*1212 +1112*1222"),
        ("+1221*2111 -1211*2121 -1121*2211 +1111*2221",
         "+1222*2111 +1221*2112 -1212*2121 -1211*2122 -1122*2211 -1121*2212 +1112*2221 +1111*2222",
         "+1222*2112 -1212*2122 -1122*2212 +1112*2222"),
        ("-2121*2211 +2111*2221",
         "-2122*2211 -2121*2212 +2112*2221 +2111*2222",
         "-2122*2212 +2112*2222"),
    ),
)

Monomial = Tuple[int, Tuple[Tuple[int, ...], ...]]


@lru_cache(maxsize=None)
def parse_polynomial(text: str) -> Tuple[Monomial, ...]:
    """
    Parse a polynomial such as `+111*122 -2*112*121`.

    Args:
        text (str): space separated signed terms; an optional integer factor precedes the labels

    Returns:
        coefficient and 0-based multi-indices per term
    """
    terms = []
    for term in text.split():
        sign, body = (-1 if term[0] == "-" else 1), term.lstrip("+-")
        factors = body.split("*")
        coefficient = sign
        # labels have one digit per subsystem, a factor is shorter
        if len(factors) > 1 and len(factors[0]) < len(factors[-1]):
            coefficient *= int(factors.pop(0))
        terms.append((coefficient, tuple(tuple(int(c) - 1 for c in label) for label in factors)))
    return tuple(terms)


def evaluate(text: str, v: State) -> Fraction:
    """Evaluate a polynomial in the coordinates of `v`."""
    coefficients = v.coefficients
    total = Fraction(0)
    for coefficient, indices in parse_polynomial(text):
        product = Fraction(coefficient)
        for index in indices:
            product *= coefficients.get(index, 0)
            if not product:
                break
        total += product
    return total


@dataclass(frozen=True)
class HVector:
    """Values of `h1, h2, ...` in order."""

    values: Tuple[Fraction, ...]

    def __getitem__(self, k: int) -> Fraction:
        """Return `h_k` (1-based)."""
        return self.values[k - 1]

    def to_strings(self) -> List[str]:
        """Exact values as fraction strings."""
        return [str(x) for x in self.values]


@dataclass(frozen=True)
class ZeroPattern:
    """
    Entrywise zero test of an `HVector`.

    Attributes:
        bits (Tuple[bool, ...]): True where the value is nonzero
    """

    bits: Tuple[bool, ...]

    @classmethod
    def parse(cls, text: str) -> 'ZeroPattern':
        """Parse `0110000`."""
        if not text or set(text) - {"0", "1"}:
            raise InvalidArgument(f"invalid zero pattern {text!r}")
        return cls(tuple(c == "1" for c in text))

    def cells(self) -> List[str]:
        """Table cells, `0` or `!=0`."""
        return ["!=0" if bit else "0" for bit in self.bits]

    def __str__(self) -> str:
        """Render as `0110000`."""
        return "".join("1" if bit else "0" for bit in self.bits)


def _check_shape(v: State, shape: Shape) -> None:
    if v.shape != shape:
        raise ShapeMismatch(f"expected a state of shape {shape}, got {v.shape}")


def h_three_qubits(v: State) -> HVector:
    """
    `h1..h4` of a three-qubit state; `h4` is the hyperdeterminant.

    Args:
        v (State): state of shape `(2,2,2)`

    Returns:
        HVector: four values
    """
    _check_shape(v, THREE_QUBITS)
    return HVector(tuple(evaluate(text, v) for text in H_THREE_QUBITS))


def h_four_qubits(v: State) -> HVector:
    """
    `h1..h7` of a four-qubit state.

    Args:
        v (State): state of shape `(2,2,2,2)`

    Returns:
        HVector: seven values
    """
    _check_shape(v, FOUR_QUBITS)
    coefficients = v.coefficients

    def coordinate(label: str) -> Fraction:
        return coefficients.get(tuple(int(c) - 1 for c in label), Fraction(0))

    values = [evaluate(H1_FOUR_QUBITS, v)]
    for layout in COORDINATE_LAYOUTS:
        values.append(determinant(Mat.from_rows([[coordinate(label) for label in row] for row in layout])))
    for layout in QUADRATIC_LAYOUTS:
        values.append(determinant(Mat.from_rows([[evaluate(entry, v) for entry in row] for row in layout])))
    return HVector(tuple(values))


def h_values(v: State) -> HVector:
    """Classical invariants of a three- or four-qubit state."""
    if v.shape == THREE_QUBITS:
        return h_three_qubits(v)
    if v.shape == FOUR_QUBITS:
        return h_four_qubits(v)
    raise ShapeMismatch(f"classical invariants are defined for (2,2,2) and (2,2,2,2), got {v.shape}")


def check_relations(h: HVector) -> bool:
    """
    Check the four-qubit relations.

    `h2 + h3 + h4 = 0`, `h1 h2 - h6 + h7 = 0`, `h1 h3 - h7 + h5 = 0`, `h1 h4 - h5 + h6 = 0`.

    Args:
        h (HVector): seven values

    Returns:
        bool: whether all four hold
    """
    if len(h.values) != 7:
        raise InvalidArgument(f"the relations need seven values, got {len(h.values)}")
    return (
        h[2] + h[3] + h[4] == 0
        and h[1] * h[2] - h[6] + h[7] == 0
        and h[1] * h[3] - h[7] + h[5] == 0
        and h[1] * h[4] - h[5] + h[6] == 0
    )


def zero_pattern(h: HVector) -> ZeroPattern:
    """Exact entrywise zero test."""
    return ZeroPattern(tuple(x != 0 for x in h.values))


@dataclass
class PatternRow:
    """Zero-pattern variants of one class as stored in YAML."""

    label: str
    patterns: List[str]


def pattern_table(shape: Shape) -> Dict[str, List[ZeroPattern]]:
    """
    Zero-pattern variants per class label.

    Args:
        shape (Shape): `(2,2,2)` or `(2,2,2,2)`

    Returns:
        Dict[str, List[ZeroPattern]]: variants per label
    """
    if shape == THREE_QUBITS:
        name = "classical_222"
    elif shape == FOUR_QUBITS:
        name = "classical_2222"
    else:
        raise ShapeMismatch(f"no zero-pattern table for shape {shape}")
    return {row.label: [ZeroPattern.parse(p) for p in row.patterns] for row in load_records(name, PatternRow)}


def collision_groups(patterns: Dict[str, Sequence[ZeroPattern]]) -> Dict[str, List[str]]:
    """
    Classes sharing a zero pattern.

    Args:
        patterns: variants per class label

    Returns:
        Dict[str, List[str]]: labels per pattern string, in input order
    """
    groups: Dict[str, List[str]] = defaultdict(list)
    for label, variants in patterns.items():
        for pattern in dict.fromkeys(str(p) for p in variants):
            groups[pattern].append(label)
    return dict(groups)


@dataclass
class CollisionRow:
    """Classes whose printed representatives share one zero pattern."""

    pattern: str
    labels: List[str]


def collision_table() -> Dict[str, List[str]]:
    """
    Tabulated collision groups of the printed four-qubit representatives.

    Returns:
        Dict[str, List[str]]: labels per pattern string
    """
    return {str(ZeroPattern.parse(row.pattern)): row.labels for row in load_records("collisions_2222", CollisionRow)}
