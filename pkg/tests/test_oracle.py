from math import factorial

import pytest

from permstat import oracle as orc


def test_statistics_of_known_permutation():
    pi = orc.parse_permutation("314625")
    assert orc.inv(pi) == 5
    assert orc.maj(pi) == 5
    assert orc.complement(pi) == (4, 6, 3, 1, 5, 2)
    assert orc.inv(pi) + orc.inv(orc.complement(pi)) == 15


def test_parse_permutation_forms():
    assert orc.parse_permutation("3,1,2") == (3, 1, 2)
    assert orc.parse_permutation("10 1 2 3 4 5 6 7 8 9")[0] == 10
    with pytest.raises(ValueError):
        orc.parse_permutation("113")


@pytest.mark.parametrize("n", range(0, 8))
def test_enumeration_is_complete_and_ordered(n):
    perms = list(orc.permutations(n))
    assert len(perms) == factorial(n)
    assert perms == sorted(set(perms))


def test_sharded_enumeration():
    shard = list(orc.permutations(4, first=2))
    assert len(shard) == 6 and all(p[0] == 2 for p in shard)


@pytest.mark.parametrize("n", range(1, 8))
def test_foata_contract(n):
    assert orc.foata_contract_violations(n) == []


def test_complement_reverses_statistics():
    for pi in orc.permutations(5):
        c = orc.complement(pi)
        assert orc.inv(c) == 10 - orc.inv(pi)
        assert c[-1] == 6 - pi[-1]


def test_brute_joint_small():
    assert orc.brute_joint(3).terms() == [(0, 0, 1), (1, 1, 1), (1, 2, 1), (2, 1, 1), (2, 2, 1), (3, 3, 1)]
    assert orc.brute_joint(3, last=2).terms() == [(1, 2, 1), (2, 1, 1)]


def test_worker_count_does_not_change_result():
    one, seen1 = orc.brute_joint_by_last(7, workers=1)
    many, seen4 = orc.brute_joint_by_last(7, workers=4)
    assert one == many and seen1 == seen4 == factorial(7)


def test_cap():
    with pytest.raises(orc.OracleCapExceeded):
        orc.brute_joint(10)
    with pytest.raises(orc.OracleCapExceeded):
        orc.brute_moment(6, 1, 1, cap=5)


def test_brute_moment_flavours():
    # frozen from direct enumeration over S_5 and over length-6 permutations ending in 2
    assert orc.brute_moment(5, 2, 2, central=True) == 30
    assert orc.brute_moment(5, 2, 2, falling=True) == pytest.approx(4795 / 6)
    assert str(orc.brute_moment(5, 4, 0, central=True)) == "1319/30"
    assert str(orc.brute_moment(6, 2, 1, last=2, central=True, falling=True)) == "-5/2"
