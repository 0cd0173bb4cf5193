import cmath
import csv
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lmaps import characters as C
from lmaps import lfunction as lf
from lmaps import preimage as P
from lmaps import zeros as Z
from lmaps.errors import SeedNotOnCurve

ZETA = C.character(1, 1)
RHO1 = 0.5 + 14.134725141734693j


def im_residual(chi, verts):
    v = lf.eval_many(chi, np.asarray(verts))[0]
    return np.abs(v.imag) / np.maximum(1.0, np.abs(v))


@pytest.fixture(scope="module")
def zeta_strips():
    return P.find_strips(ZETA, (-2, 6, 40, 60))


def test_trace_through_first_zero():
    c = P.trace_real_preimage(ZETA, RHO1, window=(-2, 6, 0, 30))
    assert abs(c.anchor - RHO1) < 1e-10
    assert np.max(im_residual(ZETA, c.vertices)) < 1e-8
    # both arms leave through the window; L < 1 along the whole traced part
    assert c.ends == ("window", "window")
    assert np.all(c.values.real < 1.0)
    assert c.kind == "gamma_zero"
    # sign of Re L flips exactly at the zero
    col = c.color_per_vertex
    assert np.count_nonzero(np.diff(col)) == 1


def test_trace_real_axis():
    c = P.trace_real_preimage(ZETA, 3.0, window=(-2, 6, -5, 5))
    assert np.max(np.abs(c.vertices.imag)) < 1e-12
    # L runs from 1 (right edge) up to +inf at the pole; the trace must not jump across it
    assert c.ends == ("window", "pole") and c.kind == "gamma_prime"
    assert np.min(c.vertices.real) > 1.0
    left = P.trace_real_preimage(ZETA, -0.5, window=(-2, 6, -5, 5))
    assert "pole" in left.ends and np.max(left.vertices.real) < 1.0


def test_seed_off_curve():
    with pytest.raises(SeedNotOnCurve):
        P.trace_real_preimage(ZETA, 2 + 3j)
    with pytest.raises(SeedNotOnCurve):
        P.trace_real_preimage(ZETA, 50 + 3j)


def test_lprime_trace():
    zp = Z.find_zeros(ZETA, 20, 25, "Lprime")[0]
    c = P.trace_real_preimage(ZETA, zp.location, "Lprime", window=(-2, 6, 15, 30))
    assert c.kind == "upsilon"
    assert abs(c.anchor - zp.location) < 1e-9


@settings(max_examples=25, deadline=None)
@given(theta=st.floats(0.05, math.pi - 0.05), cx=st.floats(-1, 1), cy=st.floats(-1, 1))
def test_level_set_tracer_on_lines(theta, cx, cy):
    """Im(e^{-i theta}(s - c)) = 0 is the line through c at angle theta."""
    rot = cmath.exp(-1j * theta)
    c = complex(cx, cy)

    def G(s):
        return rot * (s - c), rot, s

    verts, vals, ends, branch = P.trace_level_set(G, c, (-3, 3, -3, 3))
    assert ends == ("window", "window") and not branch
    assert np.max(np.abs((rot * (verts - c)).imag)) < 1e-9
    re = (rot * (verts - c)).real
    assert np.all(np.diff(re) > 0)


def test_trace_level_set_circle_loop():
    def G(s):
        return 1j * (np.log(s) - math.log(0.7)), 1j / s, s

    G.period = 2 * math.pi
    verts, vals, ends, _ = P.trace_level_set(G, 0.7 + 0j, (-2, 2, -2, 2))
    assert ends[0] == "loop"
    assert np.max(np.abs(np.abs(verts) - 0.7)) < 1e-9


def test_strip_fig3(zeta_strips):
    full = [s for s in zeta_strips if s.complete]
    target = [s for s in full if any(46 < z.location.imag < 56 for z in s.zeros_inside)]
    assert len(target) == 1
    s = target[0]
    assert [round(z.location.imag, 1) for z in s.zeros_inside] == [48.0, 49.8, 53.0]
    assert len(s.branch_points_inside) == 2 and s.counts_consistent
    assert s.gamma_zero is not None and abs(s.gamma_zero.anchor.imag - 49.77) < 0.1
    for c in (s.lower_boundary, s.upper_boundary):
        assert c.kind == "gamma_prime"
        assert np.all(c.values.real > 1.0)


def test_fundamental_domains(zeta_strips):
    s = [s for s in zeta_strips if s.complete and len(s.zeros_inside) == 3][0]
    doms = P.fundamental_domains(ZETA, s)
    assert len(doms) == 3
    assert all(d.injective and d.samples > 0 for d in doms)
    poly = s.polygon
    for d in doms:
        assert poly.buffer(0.05).contains(__import__("shapely").geometry.Point(d.witness.real, d.witness.imag))


def test_circle_small_loop_around_zero():
    comps = P.circle_preimage(ZETA, 0.05, (0, 1, 13.5, 14.8))
    loops = [c for c in comps if c.closed]
    assert len(loops) == 1
    rep = P.check_color_alternation(loops[0])
    assert rep.passed and rep.crossings == 2
    assert np.max(np.abs(np.abs(loops[0].values) - 0.05)) < 1e-8


def test_circle_unbounded_crosses_gamma_prime():
    comps = P.circle_preimage(ZETA, 1.2, (-2, 6, 0, 30))
    assert comps
    for c in comps:
        assert P.check_color_alternation(c).passed
    assert any(not c.closed and P.check_color_alternation(c).crossings >= 3 for c in comps)


def test_intertwining_zeta():
    strips = P.find_strips(ZETA, (-2, 6, 10, 30))
    checked = 0
    for s in strips:
        for g in (s.lower_boundary, s.upper_boundary):
            rep = P.check_intertwining(ZETA, g, (-2, 6, 10, 30))
            assert rep.passed
            if rep.points:
                assert rep.max_abs_im < 1e-6 and rep.max_re < 0
            checked += len(rep.points)
    assert checked > 0


def test_horizontal_tangents_on_gamma_zero():
    c = P.trace_real_preimage(ZETA, RHO1, window=(-2, 6, 0, 30))
    pts = P.horizontal_tangent_points(ZETA, c)
    for p in pts:
        d = lf.eval_derivative(ZETA, p).value
        assert abs(d.imag) < 1e-6


def test_csv(tmp_path):
    c = P.trace_real_preimage(ZETA, RHO1, window=(0, 1, 13, 15))
    path = tmp_path / "c.csv"
    P.write_curves_csv([c], path)
    rows = list(csv.DictReader(path.open()))
    assert list(rows[0]) == ["component_id", "kind", "vertex_index", "re", "im", "color"]
    assert len(rows) == len(c)
    assert {r["color"] for r in rows} == {"1", "-1"}


def test_principal_strips_count_imaginary_zeros():
    # chi_0 mod 3 has zeros at 2 pi i k / log 3 on Re s = 0, inside the strips
    chi = C.character(3, 1)
    strips = [s for s in P.find_strips(chi, (-2, 6, 0, 30)) if s.complete]
    assert strips
    kinds = set()
    for s in strips:
        j = len(s.zeros_inside)
        assert len(s.branch_points_inside) == j - 1
        kinds |= {z.kind for z in s.zeros_inside}
    assert kinds == {"nontrivial", "trivial_imaginary"}
