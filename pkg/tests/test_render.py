import hashlib

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lmaps import characters as C
from lmaps import render as R
from lmaps import zeros as Z

ZETA = C.character(1, 1)


def read_ppm(path):
    raw = path.read_bytes()
    parts = raw.split(b"\n", 3)
    assert parts[0] == b"P6" and parts[2] == b"255"
    w, h = map(int, parts[1].split())
    pix = np.frombuffer(parts[3], dtype=np.uint8)
    assert pix.size == w * h * 3
    return w, h, pix.reshape(h, w, 3)


def test_pixel_grid_symmetric():
    g = R.pixel_grid((-5, 5, -20, 20), 6, 8)
    assert g.shape == (8, 6)
    assert np.array_equal(g.imag, -g.imag[::-1])
    assert np.array_equal(g.real, -g.real[:, ::-1])
    assert g[0, 0] == complex(-5 + 10 / 12, 20 - 40 / 16)


def test_bad_inputs():
    with pytest.raises(ValueError):
        R.pixel_grid((1, 1, 0, 1), 10, 10)
    with pytest.raises(ValueError):
        R.pixel_grid((0, 1, 0, 1), 0, 10)
    with pytest.raises(ValueError):
        R.ColorScheme(circle_radii=(1.0, 0.5))
    with pytest.raises(ValueError):
        R.ColorScheme(mode="rainbow")


def test_render_function_test_double():
    # f(s) = s: right half positive, band along the real axis
    win = (-1, 1, -1, 1)
    g = R.pixel_grid(win, 40, 40)
    pix = R.render_function(g, np.ones_like(g), win, R.ColorScheme())
    pos, neg = np.array((240, 170, 60)), np.array((50, 100, 200))
    assert np.array_equal(pix[5, 35], pos) and np.array_equal(pix[5, 5], neg)
    shaded = np.floor(pos * 0.35)
    assert np.array_equal(pix[19, 35], shaded) and np.array_equal(pix[20, 35], shaded)


def test_mesh_indices():
    sch = R.ColorScheme(mode="mesh")
    vals = np.array([0.1, 3.0, 3.0 * np.exp(2j * np.pi / 12), -5.0, 0.1 * np.exp(-0.2j)])
    sector, ring = R.mesh_indices(vals, sch)
    assert list(sector) == [0, 0, 1, 6, 0]
    assert list(ring) == [0, 4, 4, 5, 0]


def test_mesh_zeros_darkest():
    img = R.render_mesh(ZETA, (-7, 5, -2, 40), 120, 210)
    pal = R._mesh_palette(R.ColorScheme(mode="mesh"))
    darkest = {tuple(c) for c in pal[:, 0]}
    for z in Z.find_zeros(ZETA, 0, 40):
        r, c = R.pixel_of(img, z.location)
        assert tuple(img.pixels[r, c]) in darkest


def test_two_color_symmetry_and_zeros():
    win = (-5, 5, -20, 20)
    real = R.render_two_color(C.character(14, 4), win, 60, 120)
    cplx = R.render_two_color(C.character(14, 2), win, 60, 120)
    assert R.mirror_symmetric(real)
    assert not R.mirror_symmetric(cplx)
    chi = C.character(14, 2)
    zs = Z.find_zeros(chi, -20, 20)
    assert zs
    for z in zs:
        r, c = R.pixel_of(cplx, z.location)
        nb = cplx.pixels[max(r - 1, 0) : r + 2, max(c - 1, 0) : c + 2].reshape(-1, 3)
        blues = nb[:, 2] > nb[:, 0]
        assert blues.any() and (~blues).any()


def test_pole_pixel_white():
    img = R.render_two_color(ZETA, (0, 2, -1, 1), 21, 21)
    r, c = R.pixel_of(img, 1 + 0j)
    assert tuple(img.pixels[r, c]) == (255, 255, 255)


def test_rotate_and_ppm(tmp_path):
    img = R.render_two_color(C.character(5, 2), (-2, 2, 0, 10), 20, 50, rotate=True)
    assert (img.width, img.height) == (50, 20) and img.rotated
    path = tmp_path / "a.ppm"
    R.write_ppm(img, path)
    w, h, pix = read_ppm(path)
    assert (w, h) == (50, 20) and np.array_equal(pix, img.pixels)
    with pytest.raises(ValueError):
        R.overlay_curves(img, [], [0.5 + 1j])


def test_deterministic(tmp_path):
    digests = []
    for k in range(2):
        p = tmp_path / f"{k}.ppm"
        R.write_ppm(R.render_two_color(C.character(7, 2), (-5, 5, -20, 20), 40, 80), p)
        digests.append(hashlib.sha256(p.read_bytes()).hexdigest())
    assert digests[0] == digests[1]


def test_overlay_copy():
    img = R.render_two_color(ZETA, (0, 1, 10, 20), 30, 60)
    before = img.pixels.copy()
    out = R.overlay_curves(img, [np.array([0.1 + 11j, 0.9 + 19j, 50 + 50j])], [0.5 + 14.134725j])
    assert np.array_equal(img.pixels, before)
    r, c = R.pixel_of(out, 0.5 + 14.134725j)
    assert tuple(out.pixels[r, c]) == (220, 0, 0)
    assert tuple(out.pixels[R.pixel_of(out, 0.1 + 11j)]) == (0, 0, 0)


def test_write_error(tmp_path):
    img = R.render_two_color(ZETA, (2, 3, 0, 1), 2, 2)
    with pytest.raises(OSError):
        R.write_ppm(img, tmp_path / "missing" / "x.ppm")


@settings(max_examples=30, deadline=None)
@given(w=st.integers(1, 30), h=st.integers(1, 30), x=st.floats(-3, 3), y=st.floats(-3, 3))
def test_pixel_of_inverts_grid(w, h, x, y):
    win = (x, x + 2.0, y, y + 3.0)
    g = R.pixel_grid(win, w, h)
    img = R.RasterImage(w, h, win, np.zeros((h, w, 3), np.uint8))
    for r, c in ((0, 0), (h - 1, w - 1), (h // 2, w // 2)):
        assert R.pixel_of(img, g[r, c]) == (r, c)
