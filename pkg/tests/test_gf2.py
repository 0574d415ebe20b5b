"""GF(2) linear algebra on packed integer rows."""

import numpy as np
import pytest

from icl.gf2 import Gf2Matrix, nullspace, rank_gf2, rank_of, rref


def test_rank_of_known_matrix():
    # rows: 110, 011, 101 -> third = first + second, rank 2
    assert rank_of([0b011, 0b110, 0b101]) == 2


def test_rank_of_identity():
    assert rank_of([1 << i for i in range(5)]) == 5


def test_rank_of_zero_rows():
    assert rank_of([0, 0, 0]) == 0


def test_gf2matrix_validates_width():
    with pytest.raises(ValueError):
        Gf2Matrix((0b100,), 2)


def test_rank_gf2_wraps_rank_of():
    m = Gf2Matrix((0b11, 0b10), 2)
    assert rank_gf2(m) == 2


def test_rref_pivots_and_reduction():
    pivots, rows = rref([0b110, 0b011, 0b101], 3)
    assert len(pivots) == 2
    # Every pivot column appears in exactly one reduced row.
    for p in pivots:
        assert sum(1 for r in rows if r >> p & 1) == 1


def test_nullspace_vectors_annihilate_rows():
    rows = [0b1101, 0b0111]
    for v in nullspace(rows, 4):
        for r in rows:
            assert bin(r & v).count("1") % 2 == 0


def test_nullspace_dimension_complements_rank():
    rng = np.random.default_rng(7)
    for _ in range(30):
        cols = int(rng.integers(1, 12))
        nrows = int(rng.integers(0, 8))
        rows = [int(rng.integers(0, 1 << cols)) for _ in range(nrows)]
        assert len(nullspace(rows, cols)) == cols - rank_of(rows)


def test_nullspace_restricted_columns():
    # Only columns {0,1} are free; column 2 is pinned to zero.
    rows = [0b011]
    vectors = nullspace(rows, 3, allowed=0b011)
    assert vectors == [0b011]


def test_full_rank_matrix_has_trivial_nullspace():
    assert nullspace([0b01, 0b10], 2) == []
