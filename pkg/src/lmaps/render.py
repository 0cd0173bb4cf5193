"""Raster figures of L-functions: two-colour real-axis plots and mesh colouring.

Pixels are sampled at their centres with no anti-aliasing.  Row 0 is the top
of the window (largest t).  Pixel coordinates are generated symmetrically
about the window centre so that a window symmetric about the real axis gives
exactly conjugate sample points in mirrored rows.
"""

from __future__ import annotations

import colorsys
from dataclasses import dataclass, replace

import numpy as np

from . import lfunction as lf
from . import zeros as zmod
from .characters import DirichletCharacter

__all__ = [
    "RasterImage",
    "ColorScheme",
    "pixel_grid",
    "render_two_color",
    "render_mesh",
    "render_function",
    "overlay_curves",
    "write_ppm",
    "mirror_symmetric",
    "pixel_of",
]

MAX_SIDE = 8192


@dataclass
class RasterImage:
    width: int
    height: int
    window: tuple[float, float, float, float]
    pixels: np.ndarray  # (height, width, 3) uint8
    rotated: bool = False

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("image dimensions must be positive")
        if self.pixels.shape != (self.height, self.width, 3):
            raise ValueError(f"pixel array shape {self.pixels.shape} does not match {self.height}x{self.width}")

    def copy(self) -> RasterImage:
        return replace(self, pixels=self.pixels.copy())


@dataclass(frozen=True)
class ColorScheme:
    mode: str = "two_color"
    pos_color: tuple[int, int, int] = (240, 170, 60)
    neg_color: tuple[int, int, int] = (50, 100, 200)
    band_shade: float = 0.35
    ray_count: int = 12
    circle_radii: tuple[float, ...] = (0.25, 0.5, 1.0, 2.0, 4.0)
    curve_color: tuple[int, int, int] = (0, 0, 0)
    zero_color: tuple[int, int, int] = (220, 0, 0)
    pole_color: tuple[int, int, int] = (255, 255, 255)

    def __post_init__(self):
        if self.mode not in ("two_color", "mesh"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.ray_count < 2:
            raise ValueError("ray_count must be at least 2")
        r = np.asarray(self.circle_radii, dtype=float)
        if r.size == 0 or np.any(r <= 0) or np.any(np.diff(r) <= 0):
            raise ValueError("circle radii must be positive and strictly increasing")


def _check_window(window, width, height):
    s0, s1, t0, t1 = (float(x) for x in window)
    if not (s1 > s0 and t1 > t0):
        raise ValueError(f"degenerate window {window}")
    if not (1 <= width <= MAX_SIDE and 1 <= height <= MAX_SIDE):
        raise ValueError(f"resolution must be within 1..{MAX_SIDE} per side")
    return s0, s1, t0, t1


def pixel_grid(window, width: int, height: int) -> np.ndarray:
    """Complex sample points at pixel centres, shape (height, width)."""
    s0, s1, t0, t1 = _check_window(window, width, height)
    dx = (s1 - s0) / width
    dy = (t1 - t0) / height
    cx = 0.5 * (s0 + s1)
    cy = 0.5 * (t0 + t1)
    # offsets are exact negatives of each other across the centre
    ox = (np.arange(width) + 0.5 - width / 2) * dx
    oy = (np.arange(height) + 0.5 - height / 2) * dy
    return (cx + ox)[None, :] + 1j * (cy - oy)[:, None]


def pixel_of(image: RasterImage, s: complex) -> tuple[int, int] | None:
    """(row, col) of the pixel containing s, or None outside the window."""
    s0, s1, t0, t1 = image.window
    col = int(np.floor((s.real - s0) / (s1 - s0) * image.width))
    row = int(np.floor((t1 - s.imag) / (t1 - t0) * image.height))
    if 0 <= row < image.height and 0 <= col < image.width:
        return row, col
    return None


def _evaluate(chi: DirichletCharacter, pts: np.ndarray, target: str):
    """Values of the target and of its derivative on a grid; pole samples become NaN."""
    flat = pts.ravel()
    pole = np.zeros(flat.shape, dtype=bool)
    if chi.is_principal:
        pole = np.abs(flat - 1.0) < 1e-12
        flat = np.where(pole, 2.0, flat)
    if target == "L":
        v, d, _ = lf.eval_many(chi, flat, derivative=True)
    elif target == "Lprime":
        h = zmod.FD_STEP
        _, v, _ = lf.eval_many(chi, flat, derivative=True)
        _, dp, _ = lf.eval_many(chi, flat + h, derivative=True)
        _, dm, _ = lf.eval_many(chi, flat - h, derivative=True)
        d = (dp - dm) / (2 * h)
    else:
        raise ValueError(f"target must be 'L' or 'Lprime', got {target!r}")
    v = np.where(pole, np.nan, v).reshape(pts.shape)
    d = np.where(pole, np.nan, d).reshape(pts.shape)
    return v, d


def _pole_pixel(chi, window, width, height):
    if not chi.is_principal:
        return None
    img = RasterImage(width, height, tuple(window), np.zeros((height, width, 3), dtype=np.uint8))
    return pixel_of(img, 1.0 + 0j)


def _rotate(img: RasterImage, rotate: bool) -> RasterImage:
    if not rotate:
        return img
    pix = np.ascontiguousarray(np.rot90(img.pixels))
    return RasterImage(img.height, img.width, img.window, pix, True)


def render_function(values: np.ndarray, derivs: np.ndarray, window, scheme: ColorScheme) -> np.ndarray:
    """Colour a grid of values; shared by the L renderers and test doubles."""
    height, width = values.shape
    pix = np.empty((height, width, 3), dtype=np.uint8)
    if scheme.mode == "two_color":
        pos = np.array(scheme.pos_color, dtype=np.uint8)
        neg = np.array(scheme.neg_color, dtype=np.uint8)
        positive = values.real > 0
        pix[...] = np.where(positive[..., None], pos, neg)
        s0, s1 = window[0], window[1]
        dx = (s1 - s0) / width
        with np.errstate(invalid="ignore"):
            slope = np.abs(derivs)
            band = (np.abs(values.imag) < 2.5 * dx * slope) & (slope >= 1e-4)
        shade = np.where(positive[..., None], pos, neg).astype(np.float64) * scheme.band_shade
        pix[band] = np.floor(shade[band]).astype(np.uint8)
    else:
        pix[...] = _mesh_colors(values, scheme)
    bad = ~np.isfinite(values)
    pix[bad] = np.array(scheme.pole_color, dtype=np.uint8)
    return pix


def _mesh_palette(scheme: ColorScheme) -> np.ndarray:
    n, m = scheme.ray_count, len(scheme.circle_radii) + 1
    pal = np.zeros((n, m, 3), dtype=np.uint8)
    for k in range(n):
        hue = k / n
        sat = 0.35 + 0.65 * (k + 1) / n  # increasing counterclockwise
        for b in range(m):
            val = 0.15 + 0.85 * b / (m - 1)  # increasing outward
            rgb = colorsys.hsv_to_rgb(hue, sat, val)
            pal[k, b] = [int(round(255 * c)) for c in rgb]
    return pal


def mesh_indices(values: np.ndarray, scheme: ColorScheme):
    """(sector, ring) indices; sector 0 is centred on the positive real axis."""
    n = scheme.ray_count
    ang = np.angle(values) / (2 * np.pi) * n + 0.5
    sector = np.floor(np.mod(ang, n)).astype(np.int64) % n
    ring = np.searchsorted(np.asarray(scheme.circle_radii), np.abs(values), side="right")
    return sector, ring


def _mesh_colors(values: np.ndarray, scheme: ColorScheme) -> np.ndarray:
    pal = _mesh_palette(scheme)
    finite = np.isfinite(values)
    safe = np.where(finite, values, 1.0)
    sector, ring = mesh_indices(safe, scheme)
    return pal[sector, ring]


def render_two_color(
    chi: DirichletCharacter,
    window,
    width: int,
    height: int,
    target: str = "L",
    scheme: ColorScheme | None = None,
    rotate: bool = False,
) -> RasterImage:
    """Paint Re f > 0 and Re f < 0 in two colours, darkening a band along Im f = 0."""
    scheme = scheme or ColorScheme()
    if scheme.mode != "two_color":
        scheme = replace(scheme, mode="two_color")
    pts = pixel_grid(window, width, height)
    v, d = _evaluate(chi, pts, target)
    pix = render_function(v, d, window, scheme)
    pp = _pole_pixel(chi, window, width, height)
    if pp is not None:
        pix[pp] = scheme.pole_color
    return _rotate(RasterImage(width, height, tuple(float(x) for x in window), pix), rotate)


def render_mesh(
    chi: DirichletCharacter,
    window,
    width: int,
    height: int,
    scheme: ColorScheme | None = None,
    target: str = "L",
    rotate: bool = False,
) -> RasterImage:
    """Colour by the sector of arg f and the ring of |f| (pre-image of a polar mesh)."""
    scheme = scheme or ColorScheme(mode="mesh")
    if scheme.mode != "mesh":
        scheme = replace(scheme, mode="mesh")
    pts = pixel_grid(window, width, height)
    v, d = _evaluate(chi, pts, target)
    pix = render_function(v, d, window, scheme)
    pp = _pole_pixel(chi, window, width, height)
    if pp is not None:
        pix[pp] = scheme.pole_color
    return _rotate(RasterImage(width, height, tuple(float(x) for x in window), pix), rotate)


def _bresenham(r0, c0, r1, c1):
    dr, dc = abs(r1 - r0), abs(c1 - c0)
    sr = 1 if r1 >= r0 else -1
    sc = 1 if c1 >= c0 else -1
    err = dc - dr
    r, c = r0, c0
    while True:
        yield r, c
        if r == r1 and c == c1:
            return
        e2 = 2 * err
        if e2 > -dr:
            err -= dr
            c += sc
        if e2 < dc:
            err += dc
            r += sr


def overlay_curves(
    image: RasterImage,
    curves=(),
    zeros=(),
    curve_color=(0, 0, 0),
    zero_color=(220, 0, 0),
) -> RasterImage:
    """Draw polylines (1-px Bresenham) and 3x3 zero crosses on a copy of the image.

    Out-of-window vertices are clipped silently.  Rotated images are not
    supported, since their pixel geometry no longer matches the window.
    """
    if image.rotated:
        raise ValueError("overlay before rotating the image")
    out = image.copy()
    pix = out.pixels
    s0, s1, t0, t1 = image.window
    W, H = image.width, image.height

    def rc(s):
        col = int(np.floor((s.real - s0) / (s1 - s0) * W))
        row = int(np.floor((t1 - s.imag) / (t1 - t0) * H))
        return row, col

    cc = np.array(curve_color, dtype=np.uint8)
    for c in curves:
        verts = c.vertices if hasattr(c, "vertices") else np.asarray(c)
        if len(verts) == 1:
            r, k = rc(verts[0])
            if 0 <= r < H and 0 <= k < W:
                pix[r, k] = cc
        for a, b in zip(verts[:-1], verts[1:]):
            (r0, c0), (r1, c1) = rc(a), rc(b)
            if max(abs(r1 - r0), abs(c1 - c0)) > 4 * (W + H):
                continue
            for r, k in _bresenham(r0, c0, r1, c1):
                if 0 <= r < H and 0 <= k < W:
                    pix[r, k] = cc
    zc = np.array(zero_color, dtype=np.uint8)
    for z in zeros:
        loc = z.location if hasattr(z, "location") else complex(z)
        r, k = rc(loc)
        for dr, dk in ((0, 0), (-1, 0), (1, 0), (0, -1), (0, 1)):
            if 0 <= r + dr < H and 0 <= k + dk < W:
                pix[r + dr, k + dk] = zc
    return out


def mirror_symmetric(image: RasterImage) -> bool:
    """True when the image equals its top-bottom mirror pixel for pixel."""
    return bool(np.array_equal(image.pixels, image.pixels[::-1]))


def write_ppm(image: RasterImage, path) -> None:
    """Binary PPM (P6): header, then width*height*3 bytes, top row first."""
    header = f"P6\n{image.width} {image.height}\n255\n".encode("ascii")
    data = np.ascontiguousarray(image.pixels, dtype=np.uint8).tobytes()
    try:
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(data)
    except OSError as exc:
        raise OSError(f"cannot write PPM to {path}: {exc}") from exc
