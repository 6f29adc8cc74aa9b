import json

import pytest

from permstat.arith import BiPoly, TruncSeries
from permstat.jointdist import DistResult, f_poly, f_row, f_table, h_poly, h_table, netto_poly
from permstat.oracle import brute_joint, brute_joint_by_last


def P(*terms):
    return BiPoly({(a, b): c for a, b, c in terms})


def test_first_rows():
    rows = list(f_table(3))
    assert rows[0][1] == BiPoly.one()
    assert rows[1][1] == P((1, 1, 1))
    assert rows[1][2] == BiPoly.one()
    assert rows[2][3] == P((0, 0, 1), (1, 1, 1))
    assert rows[2][2] == P((1, 2, 1), (2, 1, 1))
    assert rows[2][1] == P((2, 2, 1), (3, 3, 1))


@pytest.mark.parametrize("n", range(1, 9))
def test_recurrence_matches_enumeration(n):
    row = f_row(n)
    brute, _ = brute_joint_by_last(n)
    assert list(row.entries) == brute
    assert h_poly(n).payload == brute_joint(n)


@pytest.mark.parametrize("n", range(1, 12))
def test_packed_and_sparse_paths_agree(n):
    for row in f_table(n):
        pass
    assert f_row(n) == row


def test_h_is_next_row_last_entry():
    for n in range(1, 9):
        assert h_poly(n).payload == f_row(n + 1)[n + 1]


@pytest.mark.parametrize("n", [1, 5, 12, 20])
def test_marginals_are_netto_products(n):
    h = h_poly(n).payload
    assert h.marginal("p") == netto_poly(n) == h.marginal("q")


def test_h_table_streams_every_n():
    assert [h.n for h in h_table(6)] == list(range(1, 7))
    assert all(h.payload == h_poly(h.n).payload for h in h_table(6))


@pytest.mark.parametrize("n", range(1, 13))
def test_truncated_matches_full(n):
    order = 3
    full = f_row(n)
    trunc = list(f_table(n, order))[-1]
    for i in range(1, n + 1):
        assert trunc[i] == TruncSeries.from_bipoly(full[i], order)


def test_symmetry_and_mass():
    for n in range(1, 9):
        h = h_poly(n).payload
        assert h.swap() == h
        row = f_row(n)
        assert all(row[i].mass() == row[1].mass() for i in range(1, n + 1))


def test_truncated_large_n_is_cheap():
    row = list(f_table(100, 2))[-1]
    assert row.total().coeff(1, 0) == 100 * 99 // 4 * row.total().coeff(0, 0)


def test_dist_json():
    doc = h_poly(2).to_json()
    assert doc == {"n": 2, "representation": "full", "terms": [[0, 0, "1"], [1, 1, "1"]]}
    doc = f_poly(3, 2, order=1).to_json()
    assert doc["i"] == 2 and doc["order"] == 1 and doc["representation"] == "truncated"
    assert ["0", "1"] != doc["terms"][0]
    assert doc["terms"][0] == [0, 0, "2/1"]
    json.dumps(doc)


def test_population():
    assert h_poly(4).population == 24
    assert f_poly(4, 1).population == 6
    assert isinstance(h_poly(1), DistResult)


def test_bad_arguments():
    with pytest.raises(ValueError):
        f_poly(3, 4)
    with pytest.raises(ValueError):
        h_poly(0)


def test_unsummed_form_of_recurrence():
    # F(n,i) = p^(n-i) sum_{j<i} F(n-1,j) + p^(n-i) q^(n-1) sum_{j>=i} F(n-1,j)
    rows = list(f_table(8))
    for prev, row in zip(rows, rows[1:]):
        n = row.n
        for i in range(1, n + 1):
            low = sum((prev[j] for j in range(1, i)), BiPoly.zero())
            high = sum((prev[j] for j in range(i, n)), BiPoly.zero())
            assert row[i] == low.shift(n - i, 0) + high.shift(n - i, n - 1)
