"""Weight set construction, projection, and subgroup detection."""

import pytest

from wzs.modarith import units
from wzs.weightsets import (
    by_kind,
    coset_minima,
    cubes,
    custom,
    pm_one,
    project,
    reduced_alphabet,
    singleton_one,
    squares,
    units_weights,
)


def brute_subgroup(elems, n):
    s = set(elems)
    return 1 in s and all(a * b % n in s for a in s for b in s)


def test_cubes_prime_2_mod_3_is_all_units():
    for p in (5, 11, 17, 23, 29):
        assert set(cubes(p).elements) == units(p)


def test_cubes_19_subgroup_of_size_six():
    t = cubes(19)
    assert len(t) == (19 - 1) // 3 == 6
    assert t.is_subgroup


def test_cubes_9_oracle():
    expected = {pow(u, 3, 9) for u in {1, 2, 4, 5, 7, 8}}
    assert expected == {1, 8}
    assert set(cubes(9).elements) == expected


def test_cubes_size_for_primes_1_mod_3():
    for p in (7, 13, 19, 31, 37, 43):
        t = cubes(p)
        assert len(t) == (p - 1) // 3
        assert t.is_subgroup


def test_squares_11_oracle():
    expected = {pow(u, 2, 11) for u in units(11)}
    assert expected == {1, 3, 4, 5, 9}
    assert set(squares(11).elements) == expected


def test_singleton_and_pm_one():
    assert singleton_one(7).elements == (1,)
    assert pm_one(7).elements == (1, 6)
    assert pm_one(2).elements == (1,)


def test_rejects_tiny_modulus():
    with pytest.raises(ValueError):
        cubes(1)


def test_custom_validation():
    with pytest.raises(ValueError):
        custom(7, [])
    with pytest.raises(ValueError):
        custom(7, [0])
    with pytest.raises(ValueError):
        custom(7, [7])
    assert custom(7, [3, 1, 3]).elements == (1, 3)


def test_by_kind_aliases():
    assert by_kind("pm1", 7).kind == "pm_one"
    assert by_kind("one", 7).kind == "singleton_one"
    with pytest.raises(ValueError):
        by_kind("custom", 7)
    with pytest.raises(ValueError):
        by_kind("nope", 7)


def test_project_cubes_95():
    assert project(cubes(95), 19).elements == cubes(19).elements
    assert project(cubes(95), 5).elements == (1, 2, 3, 4)
    assert project(singleton_one(95), 5).elements == (1,)


def test_project_cubes_commutes_with_divisors():
    for n in (35, 55, 95, 385):
        for m in (d for d in range(2, n) if n % d == 0):
            assert project(cubes(n), m).elements == cubes(m).elements


def test_project_rejects_zero_images():
    with pytest.raises(ValueError):
        project(custom(10, [5]), 5)


def test_project_requires_divisor():
    with pytest.raises(ValueError):
        project(cubes(10), 3)
    with pytest.raises(ValueError):
        project(cubes(10), 1)


def test_subgroup_flag_matches_brute_closure():
    kinds = (cubes, squares, units_weights, pm_one, singleton_one)
    moduli = list(range(2, 151)) + [243, 289, 343, 401, 499, 500]
    for n in moduli:
        for make in kinds:
            ws = make(n)
            assert ws.is_subgroup == brute_subgroup(ws.elements, n), (make.__name__, n)


def test_custom_non_subgroup_detected():
    assert not custom(7, [2, 3]).is_subgroup
    assert not custom(7, [1, 2]).is_subgroup
    assert custom(7, [1, 2, 4]).is_subgroup


def test_reduced_alphabet_divisor_anchors():
    for n in (19, 55, 95):
        t = cubes(n)
        rep = coset_minima(t)
        firsts, symbols = reduced_alphabet(t)
        assert set(firsts) <= set(symbols)
        for d in firsts:
            assert rep[d] == d
        assert all(rep[s] == s for s in symbols)
