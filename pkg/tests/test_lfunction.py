import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lmaps import characters as C
from lmaps import lfunction as lf
from lmaps.errors import NotPrimitive, PoleAtOne

mpmath.mp.dps = 30
ZETA = C.character(1, 1)


def _mp_l(chi, s):
    q = chi.modulus
    if q == 1:
        return mpmath.zeta(s)
    tot = mpmath.mpc(0)
    for a in range(1, q + 1):
        k = chi.exponents[a % q]
        if k >= 0:
            # exact root of unity, so the pole residues cancel at s = 1
            v = mpmath.expjpi(mpmath.mpf(2 * k) / chi.order)
            tot += v * mpmath.zeta(s, mpmath.mpf(a) / q)
    return tot * mpmath.power(q, -s)


def oracle(chi, s):
    """Hurwitz-sum oracle in extended precision."""
    return complex(_mp_l(chi, mpmath.mpc(s.real, s.imag)))


def oracle_deriv(chi, s):
    """Numerical derivative of the extended-precision oracle (stays off s = 1 itself)."""
    return complex(mpmath.diff(lambda z: _mp_l(chi, z), mpmath.mpc(s.real, s.imag), h=mpmath.mpf("1e-8")))


GRID = [complex(x, y) for x in (-2.0, -0.5, 0.3, 0.5, 1.5, 3.0) for y in (0.0, 2.0, -7.5, 25.0)]
CHARS = [(1, 1), (3, 2), (4, 2), (5, 2), (7, 2), (7, 4), (8, 3), (14, 1), (14, 2), (14, 4), (20, 5)]


@pytest.mark.parametrize("q,j", CHARS)
def test_eval_against_mpmath(q, j):
    chi = C.character(q, j)
    for s in GRID:
        if chi.is_principal and abs(s - 1) < 1e-9:
            continue
        if chi.is_principal and q > 1 and abs(s.real) < 1e-12:
            continue
        res = lf.eval(chi, s)
        ref = oracle(chi, s)
        # absolute floor covers the cancellation near Re s = -2 for q ~ 14-20
        assert abs(res.value - ref) < 1e-9 * max(1.0, abs(ref)) + 5e-9, (q, j, s)
        assert abs(res.value - ref) <= max(res.est_error * 10, 1e-12) + 1e-9


def test_spec_values():
    assert abs(lf.eval(ZETA, 0).value + 0.5) < 1e-10
    assert abs(lf.eval(C.character(4, 2), 1).value - math.pi / 4) < 1e-9
    assert abs(lf.eval(C.character(2, 1), 2).value - math.pi**2 / 6 * 0.75) < 1e-10
    assert abs(lf.hurwitz_zeta(2, 1.0).value - math.pi**2 / 6) < 1e-10
    assert abs(lf.hurwitz_zeta(2, 0.5).value - math.pi**2 / 2) < 1e-9
    assert abs(lf.hurwitz_zeta(-1, 1.0).value + 1 / 12) < 1e-10


def test_series_and_euler():
    assert abs(lf.eval_series(ZETA, 2, 10**6).value - math.pi**2 / 6) < 1e-6
    assert lf.eval_series(C.character(5, 3), 2, 1).value == 1
    assert lf.eval_euler(ZETA, 3, 1).value == 1
    a = lf.eval_euler(ZETA, 2, 10**5).value
    b = lf.eval_series(ZETA, 2, 10**7).value
    assert abs(a - b) < 1e-5
    chi = C.character(4, 2)
    assert abs(lf.eval_euler(chi, 3, 10**5).value - lf.eval_series(chi, 3, 10**6).value) < 1e-8
    with pytest.raises(ValueError):
        lf.eval_series(ZETA, 0.5, 10)


def test_pole():
    with pytest.raises(PoleAtOne):
        lf.eval(ZETA, 1)
    with pytest.raises(PoleAtOne):
        lf.eval(C.character(6, 1), 1)
    # nonprincipal characters are entire
    lf.eval(C.character(6, 2), 1)


def test_limit_at_right():
    for q in range(1, 21):
        for chi in C.enumerate_characters(q):
            assert abs(lf.eval(chi, 20 + 5j).value - 1) < 3e-6
            assert abs(lf.eval_derivative(chi, 25).value) < 1e-6


@pytest.mark.parametrize("q,j", [(1, 1), (4, 2), (7, 2), (14, 3)])
def test_derivative_against_mpmath(q, j):
    chi = C.character(q, j)
    for s in (complex(2, 0), complex(1, 0.0) if q != 1 else 2 + 1j, complex(0.5, 14.0), complex(-1.5, 3.0)):
        d = lf.eval_derivative(chi, s).value
        assert abs(d - oracle_deriv(chi, s)) < 1e-8 * max(1, abs(d)) + 1e-8
    if q == 1:
        assert abs(lf.eval_derivative(chi, 2).value + 0.9375482543) < 1e-8


def test_functional_equation_examples():
    assert lf.functional_equation_check(C.character(4, 2), 0.3 + 2j).residual < 1e-8
    assert lf.functional_equation_check(C.character(4, 2), 0.5).residual < 1e-10
    assert lf.functional_equation_check(C.character(7, 2), 0.2 + 5j).residual < 1e-7
    with pytest.raises(NotPrimitive):
        lf.functional_equation_check(C.character(14, 2), 0.3)
    with pytest.raises(NotPrimitive):
        lf.functional_equation_check(ZETA, 0.3)


def test_epsilon_unimodular():
    for q in range(3, 31):
        for chi in C.enumerate_characters(q):
            if chi.is_primitive:
                assert abs(abs(lf.epsilon(chi)) - 1) < 1e-10


def test_conjugation_examples():
    assert lf.conjugation_check(C.character(7, 4), 2 + 3j) < 1e-10
    assert lf.conjugation_check(C.character(7, 2), 0.3 + 10j) < 1e-9
    for s in (0.3, 2.0, -1.5):
        assert lf.conjugation_check(C.character(7, 2), s) < 1e-10


def test_euler_factor_identity():
    zeros_at = [2j * math.pi * k / math.log(2) for k in (1, 2, -1)]
    f, _ = lf.euler_factor(ZETA, 2, np.array(zeros_at))
    assert np.all(np.abs(f) < 1e-12)
    for s in (0.5 + 3j, -1 + 10j, 2.0 + 0j):
        direct = lf.eval(C.character(6, 1), s, method="em").value
        fac = lf.euler_factor(ZETA, 6, np.array([s]))[0][0]
        assert abs(direct - lf.eval(ZETA, s).value * fac) < 1e-9


def test_eval_many_matches_scalar():
    chi = C.character(11, 3)
    pts = np.array([0.5 + 3j, -3.0 + 1j, 2.0 - 4j, 0.7 + 40j])
    v, d, e = lf.eval_many(chi, pts, derivative=True)
    for k, s in enumerate(pts):
        assert abs(v[k] - lf.eval(chi, s).value) < 1e-12 * max(1, abs(v[k]))
        assert abs(d[k] - lf.eval_derivative(chi, s).value) < 1e-10 * max(1, abs(d[k]))
    assert v.shape == d.shape == e.shape == pts.shape


@settings(max_examples=40, deadline=None)
@given(
    q=st.integers(1, 20),
    x=st.floats(1.5, 5.0),
    y=st.sampled_from([0.0, 1.0, -1.0, 10.0, -10.0]),
    data=st.data(),
)
def test_oracle_agreement_property(q, x, y, data):
    chi = C.character(q, data.draw(st.integers(1, C.totient(q))))
    s = complex(x, y)
    a = lf.eval(chi, s)
    b = lf.eval_series(chi, s, 200_000)
    c = lf.eval_euler(chi, s, 200_000)
    assert abs(a.value - b.value) <= a.est_error + b.est_error
    assert abs(a.value - c.value) <= a.est_error + c.est_error
    assert abs(b.value - c.value) <= b.est_error + c.est_error


@settings(max_examples=30, deadline=None)
@given(q=st.integers(3, 25), x=st.floats(-2.0, 3.0), y=st.floats(-30.0, 30.0), data=st.data())
def test_functional_equation_property(q, x, y, data):
    prim = [c for c in C.enumerate_characters(q) if c.is_primitive]
    if not prim:
        return
    chi = data.draw(st.sampled_from(prim))
    assert lf.functional_equation_check(chi, complex(x, y)).residual < 1e-7


@settings(max_examples=60, deadline=None)
@given(
    q=st.sampled_from([1, 3, 4, 7, 14, 20]),
    x=st.floats(-2.0, 3.0),
    y=st.floats(-40.0, 40.0),
    data=st.data(),
)
def test_est_error_honest_under_halving(q, x, y, data):
    """Halving the Euler-Maclaurin cutoff moves the value by less than twice the reported error."""
    chi = C.character(q, data.draw(st.integers(1, C.totient(q))))
    s = complex(x, y)
    if chi.is_principal and q > 1 or abs(s - 1) < 1e-3:
        return
    n = lf.default_cutoff(abs(y))
    full = lf.eval(chi, s, method="em", N=n)
    half = lf.eval(chi, s, method="em", N=max(n // 2, 1))
    assert abs(full.value - half.value) < 2 * full.est_error


def test_reflected_left_half_plane_is_more_accurate():
    chi = C.character(9, 6)
    s = complex(-1.9258335903354356, 35.84517869134421)
    mpmath.mp.dps = 30
    try:
        ref = oracle_deriv(chi, s)
    finally:
        mpmath.mp.dps = 15
    _, direct, _ = lf.eval_many(chi, np.array([s]), derivative=True)
    _, reflected, err = lf.eval_many(chi, np.array([s]), derivative=True, left_edge=0.5)
    assert abs(reflected[0] - ref) < 1e-9 * abs(ref)
    assert abs(reflected[0] - ref) < abs(direct[0] - ref)
    assert err[0] < 1e-8 * abs(ref)
