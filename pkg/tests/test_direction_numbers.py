from importlib import resources

import pytest

from qmcnet.direction_numbers import (DirectionEntry, DirectionFileError, default_table,
                                      embedded_max_dimension, generating_matrix,
                                      parse_direction_file)
from qmcnet.sobol import SequenceConfig, point, van_der_corput

# First rows of the published new-joe-kuo-6.21201 file.
JOE_KUO_HEAD = """\
d       s       a       m_i
2       1       0       1
3       2       1       1 3
4       3       1       1 3 1
5       3       2       1 1 1
6       4       1       1 1 3 3
7       4       4       1 3 5 13
8       5       2       1 1 5 5 17
9       5       4       1 1 5 5 5
10      5       7       1 1 7 11 19
"""


def bratley_fox_columns(s, a, m, bits):
    """Direction numbers via the v-space recurrence
    v_k = a_1 v_{k-1} ^ ... ^ a_{s-1} v_{k-s+1} ^ v_{k-s} ^ (v_{k-s} >> s)."""
    v = [m[k] << (bits - 1 - k) for k in range(s)]
    for k in range(s, bits):
        x = v[k - s] ^ (v[k - s] >> s)
        for i in range(1, s):
            if (a >> (s - 1 - i)) & 1:
                x ^= v[k - i]
        v.append(x)
    return v


def gf2_rank(rows):
    rows = [r for r in rows]
    rank = 0
    width = max((r.bit_length() for r in rows), default=0)
    for bit in reversed(range(width)):
        pivot = next((i for i in range(rank, len(rows)) if rows[i] >> bit & 1), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i] >> bit & 1:
                rows[i] ^= rows[rank]
        rank += 1
    return rank


def test_parse_rows():
    table = parse_direction_file(JOE_KUO_HEAD)
    assert table.entries[0] == DirectionEntry(2, 1, 0, (1,))
    assert table.entries[1] == DirectionEntry(3, 2, 1, (1, 3))
    assert table.max_dimension == 10


def test_parse_accepts_iterable_of_lines():
    lines = iter(JOE_KUO_HEAD.splitlines(keepends=True))
    assert parse_direction_file(lines) == parse_direction_file(JOE_KUO_HEAD)


def test_parse_caps_dimension():
    table = parse_direction_file(JOE_KUO_HEAD, max_dimension=4)
    assert table.max_dimension == 4
    assert table.entries[-1] == DirectionEntry(4, 3, 1, (1, 3, 1))


@pytest.mark.parametrize("text, match", [
    ("2 1 0 1\n3 2 1 1 3\n4 3 1 1 3\n", "malformed"),
    ("2 1 0 2\n", "even"),
    ("2 1 0 1\n3 2 1 1 5\n", "below"),
    ("2 1 0 1\n4 2 1 1 3\n", "non-monotone"),
    ("3 2 1 1 3\n", "non-monotone"),
    ("2 1 0 1\n3 2 2 1 3\n", "out of range"),
    ("2 1\n", "malformed"),
    ("2 1 0 x\n", "line 1"),
])
def test_parse_errors(text, match):
    with pytest.raises(DirectionFileError, match=match):
        parse_direction_file(text)


def test_round_trip_embedded_file():
    text = resources.files("qmcnet.data").joinpath("new-joe-kuo-6.1024").read_text()
    table = parse_direction_file(text)
    data_rows = [" ".join(line.split()) for line in text.splitlines()[1:]]
    assert table.to_text().splitlines()[1:] == data_rows


def test_round_trip_whitespace_normalised():
    table = parse_direction_file(JOE_KUO_HEAD)
    expected = [" ".join(line.split()) for line in JOE_KUO_HEAD.splitlines()[1:]]
    assert table.to_text().splitlines()[1:] == expected
    assert parse_direction_file(table.to_text()) == table


def test_embedded_table_matches_published_head():
    published = parse_direction_file(JOE_KUO_HEAD)
    assert default_table(10) == published


def test_generating_matrix_degree_one():
    # m_k = m_{k-1} ^ 2 m_{k-1}: 1, 3, 5, 15, the Pascal matrix mod 2
    assert generating_matrix(DirectionEntry(2, 1, 0, (1,)), 4) == [8, 12, 10, 15]


def test_generating_matrix_dimension_three():
    # Hand recurrence: m_3 = 2*m_2 ^ 4*m_1 ^ m_1 = 6 ^ 4 ^ 1 = 3.
    entry = DirectionEntry(3, 2, 1, (1, 3))
    assert generating_matrix(entry, 3) == [4, 6, 3]
    assert generating_matrix(entry, 3) == bratley_fox_columns(2, 1, (1, 3), 3)


def test_generating_matrix_matches_v_space_recurrence():
    for entry in default_table(200).entries:
        assert generating_matrix(entry, 32) == bratley_fox_columns(
            entry.degree_s, entry.poly_a, entry.initial_m, 32)


@pytest.mark.parametrize("entry", [None, DirectionEntry(2, 1, 0, (1,)),
                                   DirectionEntry(3, 2, 1, (1, 3))])
def test_generating_matrix_rejects_zero_bits(entry):
    with pytest.raises(ValueError):
        generating_matrix(entry, 0)


def test_generating_matrix_bits_below_degree():
    with pytest.raises(ValueError):
        generating_matrix(DirectionEntry(4, 3, 1, (1, 3, 1)), 2)


def test_default_table_sizes():
    assert default_table(1).entries == ()
    assert default_table(2).entries == (DirectionEntry(2, 1, 0, (1,)),)
    assert embedded_max_dimension() >= 64
    with pytest.raises(ValueError):
        default_table(10 ** 6)
    with pytest.raises(ValueError):
        default_table(0)


def test_columns_nonzero_and_independent():
    for entry in default_table(64).entries:
        cols = generating_matrix(entry, 32)
        assert all(cols)
        s = entry.degree_s
        top_rows = [c >> (32 - s) for c in cols[:s]]
        assert gf2_rank(top_rows) == s
        # the full 32 x 32 matrix is upper triangular with a unit diagonal
        assert gf2_rank(cols) == 32


def test_dimension_one_is_identity():
    assert generating_matrix(None, 32) == [1 << (31 - k) for k in range(32)]
    cfg = SequenceConfig(1)
    for i in range(1 << 10):
        assert point(i, cfg).as_fractions()[0] == van_der_corput(i)
