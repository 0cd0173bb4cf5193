import json
import math

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lmaps import characters as C
from lmaps import lfunction as lf
from lmaps import zeros as Z
from lmaps.errors import NonConvergent

ZETA = C.character(1, 1)


def bisection_oracle(t0, t1, step=0.05):
    """Sign changes of Hardy's Z(t) on the critical line, refined by bisection (mpmath)."""
    out = []
    t = t0
    prev = mpmath.siegelz(t)
    while t < t1:
        nxt = t + step
        cur = mpmath.siegelz(nxt)
        if prev * cur < 0:
            out.append(float(mpmath.findroot(mpmath.siegelz, (t, nxt), solver="bisect")))
        t, prev = nxt, cur
    return out


def test_first_zeta_zeros_match_oracle():
    zs = Z.find_zeros(ZETA, 0, 30)
    ref = bisection_oracle(10, 30)
    assert len(zs) == len(ref) == 3
    for z, r in zip(zs, ref):
        assert abs(z.location - complex(0.5, r)) < 1e-6
        assert z.kind == "nontrivial"
        assert z.residual < 1e-9


def test_fig3_window():
    zs = Z.find_zeros(ZETA, 46, 56)
    assert [round(z.location.imag, 1) for z in zs] == [48.0, 49.8, 53.0]


def test_count_rect():
    assert Z.count_zeros_rect(ZETA, (0, 1, 0, 20)).winding == 1
    assert Z.count_zeros_rect(ZETA, (0, 1, 0, 13)).winding == 0
    assert Z.count_zeros_rect(C.character(5, 2), (0.3, 0.3, 0, 10)).winding == 0


def test_empty_range():
    assert Z.find_zeros(ZETA, 5.0, 5.0) == []


def test_refine():
    z = Z.refine_zero(ZETA, 0.5 + 14.1j)
    assert abs(z.location - (0.5 + 14.134725141734693j)) < 1e-9
    again = Z.refine_zero(ZETA, z.location)
    assert abs(again.location - z.location) < 1e-12
    try:
        far = Z.refine_zero(ZETA, 5 + 0j)
    except NonConvergent:
        pass
    else:
        assert far.residual < 1e-11


def test_trivial_zeros():
    zs = Z.trivial_zeros(ZETA, 4)
    assert [z.location for z in zs] == [-2, -4, -6, -8]
    for z in zs:
        assert abs(lf.eval(ZETA, z.location).value) < 1e-10
    odd = Z.trivial_zeros(C.character(4, 2), 3)
    assert [z.location.real for z in odd] == [-1, -3, -5]
    assert abs(lf.eval(C.character(4, 2), -1).value) < 1e-9
    two = Z.trivial_zeros(C.character(2, 1), 6)
    imag = sorted(z.location.imag for z in two if z.kind == "trivial_imaginary" and z.location.imag > 0)
    assert abs(imag[0] - 2 * math.pi / math.log(2)) < 1e-9
    assert abs(imag[0] - 9.0647) < 1e-4


def test_zero_multiplicity_at_origin():
    # chi_0 mod 6: Euler factors (1 - 2^-s)(1 - 3^-s) both vanish at 0
    zs = Z.trivial_zeros(C.character(6, 1), 3)
    origin = [z for z in zs if z.location == 0]
    assert origin and origin[0].multiplicity == 2


def test_verify_simple_contract():
    assert Z.verify_simple([]).passed
    fake = Z.Zero(0.5 + 1j, "nontrivial", "L", 0.0, 0.0, (1, 1))
    rep = Z.verify_simple([fake])
    assert not rep.passed and rep.failures[0] is fake


def test_verify_rh_zeta_and_mod7():
    assert Z.verify_rh(Z.find_zeros(ZETA, 0, 100), chi=ZETA).passed
    for chi in C.enumerate_characters(7):
        zs = Z.find_zeros(chi, 0, 60)
        rep = Z.verify_rh(zs, chi=chi)
        assert rep.passed, (chi, rep.max_deviation, rep.max_pairing_residual)
    off = Z.Zero(0.6 + 30j, "nontrivial", "L", 0.0, 1.0, (1, 1))
    assert not Z.verify_rh([off]).passed


def test_simple_zeta_to_100():
    rep = Z.verify_simple(Z.find_zeros(ZETA, 0, 100))
    assert rep.passed and rep.count == 29


def test_derivative_zeros_right_of_line():
    zs = Z.find_zeros(ZETA, 0, 40, "Lprime")
    assert [round(z.location.imag, 3) for z in zs] == [23.298, 31.708, 38.49]
    for z in zs:
        assert z.location.real > 0.5
        assert abs(lf.eval_derivative(ZETA, z.location).value) < 1e-9


def test_record_round_trip(tmp_path):
    zs = Z.find_zeros(C.character(5, 2), 0, 20)
    path = tmp_path / "z.json"
    path.write_text(json.dumps([Z.zero_to_record(z) for z in zs]))
    back = [Z.zero_from_record(r) for r in json.loads(path.read_text())]
    assert back == zs


@settings(max_examples=8, deadline=None)
@given(t0=st.floats(0, 40), width=st.floats(1, 8))
def test_count_additive(t0, width):
    """Winding over a rectangle equals the sum over its two halves (both boundaries clear of zeros)."""
    mid = t0 + width / 2
    try:
        whole = Z.count_zeros_rect(ZETA, (-0.3, 1.3, t0, t0 + width), attempts=1)
        lo = Z.count_zeros_rect(ZETA, (-0.3, 1.3, t0, mid), attempts=1)
        hi = Z.count_zeros_rect(ZETA, (-0.3, 1.3, mid, t0 + width), attempts=1)
    except Exception:
        return
    if whole.rect == (-0.3, 1.3, t0, t0 + width) and lo.rect[3] == hi.rect[2]:
        assert whole.winding == lo.winding + hi.winding


def test_induced_character_shares_strip_zeros():
    star = C.character(7, 2)
    a = [z.location for z in Z.find_zeros(star, 0, 60) if z.kind == "nontrivial"]
    b = [z.location for z in Z.find_zeros(C.induce(star, 14), 0, 60) if z.kind == "nontrivial"]
    assert len(a) == len(b) > 0
    assert max(abs(x - y) for x, y in zip(a, b)) < 1e-8
