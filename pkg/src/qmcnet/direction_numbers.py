"""Sobol' direction numbers in the Joe-Kuo table format.

A table file has an optional header line (anything starting with a
non-digit) followed by rows ``d s a m_1 ... m_s``: the dimension index,
the degree of its primitive polynomial over GF(2), the interior
polynomial coefficients packed into an integer, and the ``s`` initial
odd direction integers.

Dimension 1 is never stored. It is the identity generating matrix, which
makes the first coordinate of every Sobol' point the van der Corput
sequence.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Iterable

BIT_PRECISION = 32
_EMBEDDED_FILE = "new-joe-kuo-6.1024"


class DirectionFileError(ValueError):
    """Raised for a malformed direction-number table."""


@dataclass(frozen=True)
class DirectionEntry:
    dimension_index: int
    degree_s: int
    poly_a: int
    initial_m: tuple[int, ...]

    def __post_init__(self):
        if self.dimension_index < 2:
            raise DirectionFileError(
                f"dimension index must be >= 2, got {self.dimension_index}")
        if self.degree_s < 1:
            raise DirectionFileError(f"degree must be >= 1, got {self.degree_s}")
        if len(self.initial_m) != self.degree_s:
            raise DirectionFileError(
                f"dimension {self.dimension_index}: expected {self.degree_s} "
                f"m-values, got {len(self.initial_m)}")
        if not 0 <= self.poly_a < (1 << (self.degree_s - 1)):
            raise DirectionFileError(
                f"dimension {self.dimension_index}: a={self.poly_a} out of range "
                f"for degree {self.degree_s}")
        for k, m in enumerate(self.initial_m):
            if m % 2 == 0:
                raise DirectionFileError(
                    f"dimension {self.dimension_index}: m_{k + 1}={m} is even")
            if not 0 < m < (1 << (k + 1)):
                raise DirectionFileError(
                    f"dimension {self.dimension_index}: m_{k + 1}={m} must be "
                    f"below 2^{k + 1}")

    def to_row(self) -> str:
        return " ".join(str(v) for v in (
            self.dimension_index, self.degree_s, self.poly_a, *self.initial_m))


@dataclass(frozen=True)
class DirectionTable:
    entries: tuple[DirectionEntry, ...]
    bit_precision: int = BIT_PRECISION

    def __post_init__(self):
        for expected, entry in enumerate(self.entries, start=2):
            if entry.dimension_index != expected:
                raise DirectionFileError(
                    f"dimension indices must run 2, 3, ... without gaps; "
                    f"found {entry.dimension_index} where {expected} was expected")

    @property
    def max_dimension(self) -> int:
        return len(self.entries) + 1

    def entry(self, dim: int) -> DirectionEntry | None:
        """Entry for 1-based dimension ``dim``; ``None`` for dimension 1."""
        if not 1 <= dim <= self.max_dimension:
            raise ValueError(
                f"dimension {dim} outside 1..{self.max_dimension}")
        return None if dim == 1 else self.entries[dim - 2]

    def truncate(self, d: int) -> "DirectionTable":
        if not 1 <= d <= self.max_dimension:
            raise ValueError(
                f"cannot truncate a {self.max_dimension}-dimensional table to {d}")
        return DirectionTable(self.entries[:d - 1], self.bit_precision)

    def to_text(self, header: str = "d s a m_i") -> str:
        rows = [header] + [e.to_row() for e in self.entries]
        return "\n".join(rows) + "\n"


def parse_direction_file(text: str | Iterable[str],
                         max_dimension: int | None = None) -> DirectionTable:
    """Parse a Joe-Kuo style table.

    Parameters
    ----------
    text : str or iterable of str
        Whole file contents or an iterable of lines (an open file works).
    max_dimension : int, optional
        Rows with a dimension index above this cap are skipped.

    Raises
    ------
    DirectionFileError
        On an arity mismatch, an even or oversized m-value, or
        dimension indices that are not 2, 3, 4, ... in order.
    """
    lines = text.splitlines() if isinstance(text, str) else text
    entries = []
    for lineno, line in enumerate(lines, start=1):
        fields = line.split()
        if not fields:
            continue
        if not fields[0][0].isdigit():
            if entries:
                raise DirectionFileError(f"line {lineno}: unexpected header {line!r}")
            continue
        try:
            values = [int(f) for f in fields]
        except ValueError as exc:
            raise DirectionFileError(f"line {lineno}: {exc}") from None
        if len(values) < 3:
            raise DirectionFileError(f"line {lineno}: malformed row {line!r}")
        d, s, a, *m = values
        if max_dimension is not None and d > max_dimension:
            break
        if len(m) != s:
            raise DirectionFileError(
                f"line {lineno}: malformed row, degree {s} needs {s} m-values, "
                f"got {len(m)}")
        expected = len(entries) + 2
        if d != expected:
            raise DirectionFileError(
                f"line {lineno}: non-monotone dimension index {d}, expected {expected}")
        entries.append(DirectionEntry(d, s, a, tuple(m)))
    return DirectionTable(tuple(entries))


def generating_matrix(entry: DirectionEntry | None, bits: int = BIT_PRECISION) -> list[int]:
    """Columns v_1..v_bits of one dimension's generating matrix.

    Each column is an integer whose binary expansion, read from the most
    significant of ``bits`` positions, gives the fraction digits of the
    direction number. ``entry=None`` gives the identity (dimension 1).
    """
    if entry is None:
        if bits < 1:
            raise ValueError("bits must be positive")
        return [1 << (bits - 1 - k) for k in range(bits)]
    s, a = entry.degree_s, entry.poly_a
    if bits < s:
        raise ValueError(f"bits={bits} is below the polynomial degree {s}")
    m = list(entry.initial_m)
    for k in range(s, bits):
        # m_k = 2 a_1 m_{k-1} ^ 4 a_2 m_{k-2} ^ ... ^ 2^s m_{k-s} ^ m_{k-s}
        new = m[k - s] ^ (m[k - s] << s)
        for i in range(1, s):
            if (a >> (s - 1 - i)) & 1:
                new ^= m[k - i] << i
        m.append(new)
    return [m[k] << (bits - 1 - k) for k in range(bits)]


@lru_cache(maxsize=1)
def _embedded_table() -> DirectionTable:
    text = resources.files("qmcnet.data").joinpath(_EMBEDDED_FILE).read_text()
    return parse_direction_file(text)


def embedded_max_dimension() -> int:
    return _embedded_table().max_dimension


def default_table(d: int) -> DirectionTable:
    """Joe-Kuo ``new-joe-kuo-6`` direction numbers for dimensions 1..d."""
    table = _embedded_table()
    if d < 1 or d > table.max_dimension:
        raise ValueError(
            f"d={d} outside the embedded range 1..{table.max_dimension}")
    return table.truncate(d)
