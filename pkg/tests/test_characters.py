import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lmaps import characters as C


def brute_characters(q):
    """All completely multiplicative, q-periodic maps found by brute force over phi(q)-th roots."""
    units = [a for a in range(q) if math.gcd(a, q) == 1]
    n = len(units)
    roots = [cmath.exp(2j * math.pi * k / n) for k in range(n)]
    found = []

    def extend(assign, k):
        if k == len(units):
            ok = all(
                abs(assign[(a * b) % q] - assign[a] * assign[b]) < 1e-9 for a in units for b in units
            )
            if ok:
                found.append(dict(assign))
            return
        a = units[k]
        for r in roots if a != 1 else [1.0]:
            assign[a] = r
            extend(assign, k + 1)
        del assign[a]

    extend({}, 0)
    return found


def test_totient_and_factorize():
    assert [C.totient(n) for n in range(1, 13)] == [1, 1, 2, 2, 4, 2, 6, 4, 6, 4, 10, 4]
    assert C.factorize(360) == {2: 3, 3: 2, 5: 1}
    assert C.factorize(1) == {}


@pytest.mark.parametrize("q", [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12])
def test_enumeration_matches_brute_force(q):
    ours = C.enumerate_characters(q)
    brute = brute_characters(q)
    assert len(ours) == len(brute) == C.totient(q)
    for b in brute:
        matches = [c for c in ours if all(abs(c(a) - v) < 1e-12 for a, v in b.items())]
        assert len(matches) == 1


def test_index_one_principal_and_distinct():
    for q in range(1, 40):
        cs = C.enumerate_characters(q)
        assert cs[0].is_principal and cs[0].index == 1
        assert len(set(cs)) == len(cs)
        assert [c.index for c in cs] == list(range(1, len(cs) + 1))


def test_value_examples():
    for q in (1, 5, 14, 24):
        for c in C.enumerate_characters(q):
            assert C.value(c, 1) == 1
    for c in C.enumerate_characters(14):
        assert C.value(c, 7) == 0


def test_mod14_labels():
    cs = C.enumerate_characters(14)
    assert [c.conductor for c in cs] == [1, 7, 7, 7, 7, 7]
    assert cs[3].is_real and not cs[3].is_principal and cs[3].parity == 1
    assert not cs[1].is_real and cs[1].parity == 1


def test_conductor_and_primitivity():
    # mod 8: conductors 1, 4, 8, 8
    assert sorted(c.conductor for c in C.enumerate_characters(8)) == [1, 4, 8, 8]
    # no primitive characters mod 2 * odd
    assert not any(c.is_primitive for c in C.enumerate_characters(2))
    assert not any(C.is_primitive(c) for c in C.enumerate_characters(6))
    chi = C.character(14, 4)
    star = C.primitive_character(chi)
    assert star.modulus == 7 and star.is_primitive
    for n in range(1, 200):
        if math.gcd(n, 14) == 1:
            assert abs(chi(n) - star(n)) < 1e-14


def test_induce():
    star = C.character(7, 2)
    chi = C.induce(star, 14)
    assert chi.modulus == 14 and chi.conductor == 7
    assert all(chi(n) == 0 for n in range(0, 28, 2))
    with pytest.raises(ValueError):
        C.induce(star, 15)


def test_gauss_sum_modulus():
    for q in (3, 4, 5, 7, 8, 11, 13, 15):
        for c in C.enumerate_characters(q):
            if c.is_primitive:
                assert abs(abs(C.gauss_sum(c)) - math.sqrt(q)) < 1e-12


def test_conjugate():
    for c in C.enumerate_characters(13):
        d = C.conjugate(c)
        assert np.allclose(d.values, np.conj(c.values))
        assert C.conjugate(d) == c


def test_bad_inputs():
    with pytest.raises(ValueError):
        C.enumerate_characters(0)
    with pytest.raises(ValueError):
        C.character(7, 7)


@settings(max_examples=60, deadline=None)
@given(q=st.integers(1, 60), m=st.integers(-500, 500), n=st.integers(-500, 500), data=st.data())
def test_axioms_property(q, m, n, data):
    j = data.draw(st.integers(1, C.totient(q)))
    chi = C.character(q, j)
    assert abs(chi(m * n) - chi(m) * chi(n)) < 1e-12
    assert chi(n + q) == chi(n)
    assert (chi(n) == 0) == (math.gcd(n, q) != 1)
    if math.gcd(n, q) == 1:
        assert abs(chi(n) ** C.totient(q) - 1) < 1e-9
