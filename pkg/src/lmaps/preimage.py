"""Pre-images of the real axis, of circles and of segments under L and L'.

Every curve here is a level set Im g(s) = 0 of some analytic g built from L:

* g = L or g = L' for pre-images of the real axis,
* g = i (log L - log r) for the circle |L| = r,
* g = exp(-i theta) (L - 1) for the line through 1 with direction theta.

A single predictor-corrector tracer follows such level sets.  Along the curve
g is real and s'(x) = 1 / g'(s), so the predictor steps along conj(g')/|g'|
and the corrector moves by -i Im g / g', which lands back on the curve to
first order.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage, optimize
from scipy.spatial import cKDTree
from shapely import contains_xy
from shapely.geometry import Polygon

from . import lfunction as lf
from . import zeros as zmod
from .characters import DirichletCharacter
from .errors import (
    BranchPointEncountered,
    IncompleteStrip,
    NonConvergent,
    SeedNotOnCurve,
    WindowTooSmall,
)

__all__ = [
    "CurveComponent",
    "Strip",
    "FundamentalDomain",
    "AlternationReport",
    "IntertwiningReport",
    "TraceSettings",
    "trace_real_preimage",
    "trace_level_set",
    "trace_all",
    "find_strips",
    "circle_preimage",
    "check_color_alternation",
    "check_intertwining",
    "fundamental_domains",
    "horizontal_tangent_points",
    "write_curves_csv",
]

KINDS = ("gamma_prime", "gamma_zero", "gamma_full", "upsilon", "circle", "cut")
# tangent-point geometry reflects the left half-plane, where the direct sum cancels
GEOMETRY_EDGE = 0.5


@dataclass(frozen=True)
class TraceSettings:
    max_step: float = 0.02
    corrector_tol: float = 1e-10
    branch_tol: float = 1e-6
    slow_zone: float = 1e-3  # |g'| below which the step shrinks
    max_vertices: int = 40000
    min_step: float = 1e-10


DEFAULT = TraceSettings()


@dataclass
class CurveComponent:
    """Polyline approximation of one component of a pre-image curve.

    ``values`` holds the traced function (L, or L' for upsilon curves) at each
    vertex; ``color_per_vertex`` is the sign of its real part.  ``ends``
    records why each end of the trace stopped: window, loop, pole, branch,
    level (reached a target value) or limit.
    """

    vertices: np.ndarray
    kind: str
    values: np.ndarray
    anchor: complex
    ends: tuple[str, str] = ("window", "window")
    target: str = "L"
    branch_points: list[complex] = field(default_factory=list)

    @property
    def color_per_vertex(self) -> np.ndarray:
        return np.where(self.values.real > 0, 1, -1).astype(np.int8)

    @property
    def closed(self) -> bool:
        return self.ends[0] == "loop"

    def __len__(self):
        return len(self.vertices)


# -- function builders -----------------------------------------------------


def _real_axis_fn(chi: DirichletCharacter, target: str):
    """s -> (g, g', f) with g = f = L or L'."""
    if target == "L":

        def G(s):
            v, d, _ = lf.eval_many(chi, np.array([s]), derivative=True)
            return complex(v[0]), complex(d[0]), complex(v[0])

        return G
    if target == "Lprime":
        h = zmod.FD_STEP

        def Gp(s):
            _, d, _ = lf.eval_many(chi, np.array([s, s + h, s - h]), derivative=True)
            return complex(d[0]), complex((d[1] - d[2]) / (2 * h)), complex(d[0])

        return Gp
    raise ValueError(f"target must be 'L' or 'Lprime', got {target!r}")


def _circle_fn(chi: DirichletCharacter, r: float):
    logr = math.log(r)

    def G(s):
        v, d, _ = lf.eval_many(chi, np.array([s]), derivative=True)
        v, d = complex(v[0]), complex(d[0])
        return 1j * (np.log(v) - logr), 1j * d / v, v

    G.period = 2 * math.pi  # Re g = -arg L jumps by 2 pi across the log cut
    return G


def _line_fn(chi: DirichletCharacter, theta: float):
    rot = complex(math.cos(-theta), math.sin(-theta))

    def G(s):
        v, d, _ = lf.eval_many(chi, np.array([s]), derivative=True)
        v, d = complex(v[0]), complex(d[0])
        return rot * (v - 1.0), rot * d, v

    return G


# -- tracer ----------------------------------------------------------------


def _inside(s: complex, window) -> bool:
    s0, s1, t0, t1 = window
    return s0 <= s.real <= s1 and t0 <= s.imag <= t1


def _correct(G, p: complex, tol: float, iters: int = 6):
    """Move p onto Im g = 0; returns (p, g, g', f, ok, n_iter)."""
    g, dg, f = G(p)
    for k in range(iters):
        if abs(g.imag) <= tol * max(1.0, abs(f)):
            return p, g, dg, f, True, k
        if dg == 0 or not np.isfinite(abs(dg)):
            break
        p = p - 1j * g.imag / dg
        g, dg, f = G(p)
    return p, g, dg, f, abs(g.imag) <= tol * max(1.0, abs(f)), iters


def _angle(a: complex, b: complex) -> float:
    return abs(math.atan2((a * b.conjugate()).imag, (a * b.conjugate()).real))


@dataclass
class _Arm:
    vertices: list
    values: list
    end: str
    branch: complex | None = None


def _trace_arm(G, s, g, dg, f, sign, window, cfg: TraceSettings, stop=None, close_to=None):
    """Follow Im g = 0 from s in the direction where Re g moves with ``sign``."""
    verts, vals = [s], [f]
    period = getattr(G, "period", None)
    h = cfg.max_step / 4
    length = 0.0
    while len(verts) < cfg.max_vertices:
        adg = abs(dg)
        if adg < cfg.branch_tol:
            return _Arm(verts, vals, "branch", s)
        d = sign * dg.conjugate() / adg
        cap = cfg.max_step if adg >= cfg.slow_zone else cfg.max_step * max(adg / cfg.slow_zone, 1e-3)
        h = min(h, cap)
        p, gp, dgp, fp, ok, nit = _correct(G, s + h * d, cfg.corrector_tol)
        dn = sign * dgp.conjugate() / abs(dgp) if dgp != 0 else d
        step = abs(p - s)
        rise = (gp - g).real
        if period is not None:
            rise = math.remainder(rise, period)
        good = (
            ok
            and 0 < step < 2.0 * h
            and _angle(d, dn) < 0.35
            # first-order increment of Re g; immune to branch jumps of log L
            and (0.5 * (dg + dgp) * (p - s)).real * sign > 0
            # the actual increment must agree too, or the step jumped over a pole
            and rise * sign > 0
        )
        if not good:
            h *= 0.5
            if h < cfg.min_step:
                # a stall with a small derivative is a branch point on the curve
                if adg < 1e3 * cfg.branch_tol:
                    return _Arm(verts, vals, "branch", s)
                return _Arm(verts, vals, "stall")
            continue
        s, g, dg, f = p, gp, dgp, fp
        verts.append(s)
        vals.append(f)
        length += step
        if nit <= 2 and _angle(d, dn) < 0.1:
            h = min(cap, 1.5 * h)
        if not np.isfinite(abs(f)) or abs(f) > 1e8:
            return _Arm(verts, vals, "pole")
        if not _inside(s, window):
            return _Arm(verts, vals, "window")
        if stop is not None and stop(s, g):
            return _Arm(verts, vals, "level")
        if close_to is not None and length > 4 * cfg.max_step and abs(s - close_to) < max(1.5 * h, 1e-9):
            verts.append(close_to)
            vals.append(vals[0])
            return _Arm(verts, vals, "loop")
    return _Arm(verts, vals, "limit")


def _join(back: _Arm, fwd: _Arm):
    """Concatenate two arms traced from the same seed into one polyline."""
    verts = back.vertices[::-1] + fwd.vertices[1:]
    vals = back.values[::-1] + fwd.values[1:]
    return np.array(verts, dtype=np.complex128), np.array(vals, dtype=np.complex128)


def trace_level_set(G, seed: complex, window, cfg: TraceSettings = DEFAULT, stop=None, both: bool = True):
    """Trace the component of Im g = 0 through ``seed`` (assumed on the curve).

    Returns (vertices, values, ends, branch_points).  The polyline runs from
    the end reached by decreasing Re g to the end reached by increasing it.
    A ``G.period`` attribute marks Re g as defined modulo that period
    (logarithmic level functions).
    """
    g, dg, f = G(seed)
    fwd = _trace_arm(G, seed, g, dg, f, +1, window, cfg, stop=stop, close_to=seed)
    if fwd.end == "loop" or not both:
        branch = [fwd.branch] if fwd.branch is not None else []
        return (
            np.array(fwd.vertices, dtype=np.complex128),
            np.array(fwd.values, dtype=np.complex128),
            (fwd.end, fwd.end if fwd.end == "loop" else "seed"),
            branch,
        )
    back = _trace_arm(G, seed, g, dg, f, -1, window, cfg, stop=stop)
    verts, vals = _join(back, fwd)
    branch = [a.branch for a in (back, fwd) if a.branch is not None]
    return verts, vals, (back.end, fwd.end), branch


def _classify_real(values: np.ndarray, target: str, has_zero: bool) -> str:
    if target == "Lprime":
        return "upsilon"
    re = values.real
    if re.min() > 1.0:
        return "gamma_prime"
    if has_zero and re.max() < 1.0:
        return "gamma_zero"
    return "gamma_full"


def _polish_zero(chi, s, target):
    try:
        z = zmod.refine_zero(chi, s, target)
    except NonConvergent:
        return None
    return z.location if abs(z.location - s) < 1e-4 else None


def trace_real_preimage(
    chi: DirichletCharacter,
    seed,
    target: str = "L",
    window=(-2.0, 6.0, -30.0, 30.0),
    cfg: TraceSettings = DEFAULT,
    seed_tol: float = 1e-6,
) -> CurveComponent:
    """Trace the component of the pre-image of the real axis through ``seed``.

    The seed must satisfy |Im f(seed)| <= seed_tol; it is first moved onto
    the curve (or onto the zero of f it approximates).  Raises
    BranchPointEncountered when the trace runs into a zero of f'.
    """
    G = _real_axis_fn(chi, target)
    seed = complex(seed)
    if not _inside(seed, window):
        raise SeedNotOnCurve(f"seed {seed} lies outside the window {window}")
    g, dg, f = G(seed)
    if not abs(g.imag) <= seed_tol:
        raise SeedNotOnCurve(f"Im f(seed) = {g.imag:.3g} exceeds {seed_tol:g}")
    anchor = None
    if abs(g) < 1e-5:
        anchor = _polish_zero(chi, seed, target)
    if anchor is None:
        seed, g, dg, f, ok, _ = _correct(G, seed, cfg.corrector_tol)
        if not ok:
            raise SeedNotOnCurve(f"corrector failed to reach the curve from {seed}")
        anchor = seed
    else:
        seed = anchor
    verts, vals, ends, branch = trace_level_set(G, seed, window, cfg)
    has_zero = bool(np.any(np.abs(vals) < 1e-8)) or bool(np.any(np.diff(np.sign(vals.real)) != 0))
    curve = CurveComponent(
        verts, _classify_real(vals, target, has_zero), vals, anchor, ends, target, branch
    )
    if branch:
        raise BranchPointEncountered(f"trace from {seed} met a branch point", curve, branch[0])
    return curve


def trace_all(
    chi: DirichletCharacter,
    window,
    target: str = "L",
    sigma_seed: float | None = None,
    cfg: TraceSettings = DEFAULT,
) -> list[CurveComponent]:
    """All real-axis pre-image components through zeros of the target in the
    window or crossing the vertical line Re s = sigma_seed inside it."""
    s0, s1, t0, t1 = (float(x) for x in window)
    window = (s0, s1, t0, t1)
    if sigma_seed is None:
        sigma_seed = min(4.0, s1 - 0.25 * (s1 - s0))
    lo, hi = zmod.STRIP[target]
    lo, hi = max(lo, s0), min(hi, s1)
    seeds = []
    if hi > lo and t1 > t0:
        seeds += [z.location for z in zmod.scan_zeros(chi, t0, t1, target, (lo, hi)).zeros if _inside(z.location, window)]
    G = _real_axis_fn(chi, target)
    ts = np.arange(t0, t1, 0.05)
    ims = np.array([G(complex(sigma_seed, t))[0].imag for t in ts])
    for k in np.nonzero(np.sign(ims[:-1]) * np.sign(ims[1:]) < 0)[0]:
        t = optimize.brentq(lambda x: G(complex(sigma_seed, x))[0].imag, ts[k], ts[k + 1], xtol=1e-14)
        seeds.append(complex(sigma_seed, t))
    if chi.is_real and t0 <= 0.0 <= t1:
        seeds.append(complex(sigma_seed, 0.0))
    curves: list[CurveComponent] = []
    for sd in seeds:
        if _near_curves(sd, curves, 1e-6):
            continue
        try:
            curves.append(trace_real_preimage(chi, sd, target, window, cfg))
        except BranchPointEncountered as exc:
            curves.append(exc.partial)
    return curves


# -- strips ----------------------------------------------------------------


@dataclass
class Strip:
    """The region between two consecutive gamma_prime components."""

    lower_boundary: CurveComponent
    upper_boundary: CurveComponent
    zeros_inside: list
    branch_points_inside: list
    interior_curves: list
    complete: bool
    window: tuple
    gamma_zero: CurveComponent | None = None

    @property
    def polygon(self) -> Polygon:
        return _strip_polygon(self.lower_boundary, self.upper_boundary)

    @property
    def counts_consistent(self) -> bool:
        return len(self.branch_points_inside) == len(self.zeros_inside) - 1


def _right_to_left(c: CurveComponent) -> np.ndarray:
    v = c.vertices
    return v if v[0].real >= v[-1].real else v[::-1]


def _strip_polygon(lower: CurveComponent, upper: CurveComponent) -> Polygon:
    lo = _right_to_left(lower)
    up = _right_to_left(upper)[::-1]
    ring = np.concatenate([lo, up])
    return Polygon(np.column_stack([ring.real, ring.imag])).buffer(0)


def _seed_gamma_prime(chi, sigma, t0, t1, step=0.05):
    """Points sigma + it with Im L = 0 and Re L > 1, by sign scan and bisection."""
    ts = np.arange(t0, t1 + step, step)
    vals, _, _ = lf.eval_many(chi, sigma + 1j * ts)
    im = vals.imag
    seeds = []

    def imL(t):
        return lf.eval_many(chi, np.array([sigma + 1j * t]))[0][0].imag

    for k in np.nonzero(np.sign(im[:-1]) * np.sign(im[1:]) < 0)[0]:
        t = optimize.brentq(imL, ts[k], ts[k + 1], xtol=1e-14)
        v = lf.eval_many(chi, np.array([sigma + 1j * t]))[0][0]
        if v.real > 1.0:
            seeds.append(complex(sigma, t))
    return seeds


def _near_curves(s: complex, curves, tol: float) -> bool:
    for c in curves:
        if np.min(np.abs(c.vertices - s)) < tol:
            return True
    return False


def find_strips(
    chi: DirichletCharacter,
    window=(-2.0, 6.0, 0.0, 60.0),
    sigma_seed: float = 4.0,
    margin: float = 10.0,
    cfg: TraceSettings = DEFAULT,
    zeros=None,
    branch_points=None,
) -> list[Strip]:
    """Strips between consecutive gamma_prime components meeting the window.

    Seeds are found on Re s = sigma_seed over the window's t-range widened by
    ``margin``; each seed is traced inside the widened window.  A strip is
    marked complete when both boundaries cross the window from its right to
    its left edge without leaving its t-range; the zero and branch-point
    counts are meaningful only for complete strips.
    """
    s0, s1, t0, t1 = (float(x) for x in window)
    if not s0 < sigma_seed < s1:
        sigma_seed = 0.5 * (max(s0, 1.5) + s1) if s1 > 1.5 else s1 - 0.1
    wide = (s0, s1, t0 - margin, t1 + margin)
    seeds = _seed_gamma_prime(chi, sigma_seed, wide[2], wide[3])
    curves: list[CurveComponent] = []
    for sd in seeds:
        if _near_curves(sd, curves, 1e-6):
            continue
        try:
            c = trace_real_preimage(chi, sd, "L", wide, cfg)
        except BranchPointEncountered as exc:
            c = exc.partial
        if c.kind == "gamma_prime":
            curves.append(c)
    curves = [c for c in curves if any(_inside(v, (s0, s1, t0, t1)) for v in c.vertices)]
    if not curves:
        raise WindowTooSmall(f"no gamma_prime component meets the window {window}")
    curves.sort(key=lambda c: _right_to_left(c)[0].imag)

    if zeros is None:
        zeros = zmod.find_zeros(chi, t0, t1, "L") if t1 > t0 else []
    if branch_points is None:
        branch_points = zmod.find_zeros(chi, t0, t1, "Lprime") if t1 > t0 else []
    # every zero off the real axis counts, including the imaginary ones of imprimitive characters
    off_axis = [z for z in zeros if z.location.imag != 0]
    off_axis_bp = [b for b in branch_points if b.location.imag != 0]

    strips = []
    for lower, upper in zip(curves[:-1], curves[1:]):
        poly = _strip_polygon(lower, upper)
        complete = _spans(lower, window) and _spans(upper, window)
        zin = _inside_poly(poly, off_axis)
        bin_ = _inside_poly(poly, off_axis_bp)
        interior = []
        gzero = None
        for z in zin:
            try:
                c = trace_real_preimage(chi, z.location, "L", wide, cfg)
            except BranchPointEncountered as exc:
                c = exc.partial
            interior.append(c)
            if c.kind == "gamma_zero":
                gzero = c if gzero is None else gzero
        strips.append(Strip(lower, upper, zin, bin_, interior, complete, (s0, s1, t0, t1), gzero))
    return strips


def _spans(c: CurveComponent, window) -> bool:
    s0, s1, t0, t1 = window
    v = c.vertices
    inside_t = v[(v.real >= s0) & (v.real <= s1)]
    return (
        v.real.max() >= s1
        and v.real.min() <= s0
        and inside_t.imag.min() >= t0
        and inside_t.imag.max() <= t1
    )


def _inside_poly(poly: Polygon, zs):
    if not zs:
        return []
    pts = np.array([z.location for z in zs])
    mask = contains_xy(poly, pts.real, pts.imag)
    return [z for z, m in zip(zs, mask) if m]


# -- circles ---------------------------------------------------------------


def _circle_seeds(chi, r, window, spacing):
    s0, s1, t0, t1 = window
    sig = np.arange(s0 + spacing / 2, s1, spacing)
    ts = np.arange(t0 + spacing / 2, t1, spacing)
    S, T = np.meshgrid(sig, ts)
    vals, _, _ = lf.eval_many(chi, S + 1j * T)
    lev = np.log(np.abs(vals)) - math.log(r)
    seeds = []
    rows, cols = np.nonzero(np.sign(lev[:, :-1]) * np.sign(lev[:, 1:]) < 0)
    for i, j in zip(rows, cols):
        t = ts[i]

        def h(x):
            return math.log(abs(lf.eval_many(chi, np.array([x + 1j * t]))[0][0])) - math.log(r)

        x = optimize.brentq(h, sig[j], sig[j + 1], xtol=1e-13)
        seeds.append(complex(x, t))
    return seeds


def circle_preimage(
    chi: DirichletCharacter,
    r: float,
    window,
    cfg: TraceSettings = DEFAULT,
    spacing: float = 0.02,
    branch_points=None,
) -> list[CurveComponent]:
    """Components of |L(s)| = r meeting the window.

    If r is within 1e-6 of |L(v)| for a known branch point v the radius is
    raised by 1e-6 so the trace passes through the fused configuration rather
    than the singular one.
    """
    if not r > 0:
        raise ValueError("radius must be positive")
    s0, s1, t0, t1 = (float(x) for x in window)
    if branch_points is None:
        lo, hi = max(s0, -1.0), min(s1, 4.0)
        branch_points = zmod.scan_zeros(chi, t0, t1, "Lprime", (lo, hi)).zeros if hi > lo else []
    for b in branch_points:
        if abs(abs(lf.eval_many(chi, np.array([b.location]))[0][0]) - r) < 1e-6:
            r += 1e-6
    G = _circle_fn(chi, r)
    window = (s0, s1, t0, t1)
    out: list[CurveComponent] = []
    for sd in _circle_seeds(chi, r, window, spacing):
        if _near_curves(sd, out, 2 * cfg.max_step):
            continue
        sd, g, dg, f, ok, _ = _correct(G, sd, cfg.corrector_tol)
        if not ok:
            continue
        verts, vals, ends, branch = trace_level_set(G, sd, window, cfg)
        out.append(CurveComponent(verts, "circle", vals, sd, ends, "L", branch))
    return out


@dataclass(frozen=True)
class AlternationReport:
    passed: bool
    crossings: int
    colors: tuple[int, ...]
    closed: bool


def _crossings(curve: CurveComponent):
    im = curve.values.imag
    idx = np.nonzero(np.sign(im[:-1]) * np.sign(im[1:]) < 0)[0]
    colors = []
    for k in idx:
        # the vertex with smaller |Im L| is the better proxy for the crossing
        j = k if abs(im[k]) <= abs(im[k + 1]) else k + 1
        colors.append(1 if curve.values[j].real > 0 else -1)
    return idx, colors


def check_color_alternation(curve: CurveComponent) -> AlternationReport:
    """Crossings of Im L = 0 along a circle pre-image must alternate in sign of Re L."""
    if curve.kind != "circle":
        raise ValueError("color alternation applies to circle components")
    _, colors = _crossings(curve)
    pairs = list(zip(colors[:-1], colors[1:]))
    if curve.closed and len(colors) > 1:
        pairs.append((colors[-1], colors[0]))
    ok = all(a != b for a, b in pairs)
    if curve.closed:
        ok = ok and len(colors) % 2 == 0
    return AlternationReport(ok, len(colors), tuple(colors), curve.closed)


# -- intertwining ----------------------------------------------------------


def _graph_t(chi, sigma: float, t_guess: float) -> float:
    """t with Im L(sigma + i t) = 0 near t_guess (Newton in t)."""
    t = t_guess
    last = math.inf
    for _ in range(40):
        v, d, _ = lf.eval_many(chi, np.array([sigma + 1j * t]), derivative=True, left_edge=GEOMETRY_EDGE)
        # d/dt Im L(sigma + it) = Re L'
        dt = -v[0].imag / d[0].real
        t += dt
        if abs(dt) < 1e-15 * max(1.0, abs(t)) or abs(dt) >= last:
            break
        last = abs(dt)
    return t


def horizontal_tangent_points(chi: DirichletCharacter, curve: CurveComponent, h: float = 1e-3):
    """Points of a real-axis L-curve where its tangent is horizontal.

    Candidates are local extrema of Im s along the polyline.  Each is refined
    geometrically: near the extremum the curve is a graph t = tau(sigma), and
    tau'(sigma) = 0 is solved with tau' taken by central differences of
    re-solved curve points, so L' never enters the location.
    """
    v = curve.vertices
    if len(v) < 3:
        return []
    dt = np.diff(v.imag)
    idx = np.nonzero(np.sign(dt[:-1]) * np.sign(dt[1:]) < 0)[0] + 1
    pts = []
    for k in idx:
        guess = v[k]

        def slope(sig, t_ref=guess.imag):
            tau = [_graph_t(chi, sig + k * h, t_ref) for k in (-2, -1, 1, 2)]
            return (tau[0] - 8 * tau[1] + 8 * tau[2] - tau[3]) / (12 * h)

        a, b = v[k - 1].real, v[k + 1].real
        lo, hi = min(a, b), max(a, b)
        try:
            if slope(lo) * slope(hi) < 0:
                sig = optimize.brentq(slope, lo, hi, xtol=1e-13)
            else:
                sig = optimize.newton(slope, guess.real, tol=1e-13, maxiter=50)
        except (RuntimeError, ValueError):
            continue
        pts.append(complex(sig, _graph_t(chi, sig, guess.imag)))
    return pts


@dataclass(frozen=True)
class IntertwiningReport:
    passed: bool
    points: tuple[complex, ...]
    max_abs_im: float
    max_re: float | None
    color_checked: int
    worst_point: complex | None = None


def check_intertwining(
    chi: DirichletCharacter,
    gamma: CurveComponent,
    window=None,
    im_tol: float = 1e-6,
    zero_re: float | None = None,
) -> IntertwiningReport:
    """At every horizontal-tangent point of gamma, L' must be real.

    For gamma_prime curves the point must also carry the colour Re L' < 0.
    For curves through a zero the colour rule is checked only left of the
    zero (Re s < zero_re, defaulting to the curve's anchor).
    """
    if gamma.target != "L":
        raise ValueError("intertwining is checked on real-axis components of L")
    pts = horizontal_tangent_points(chi, gamma)
    if window is not None:
        pts = [p for p in pts if _inside(p, window)]
    if not pts:
        return IntertwiningReport(True, (), 0.0, None, 0)
    _, d, _ = lf.eval_many(chi, np.array(pts), derivative=True, left_edge=GEOMETRY_EDGE)
    max_im = float(np.abs(d.imag).max())
    worst = pts[int(np.abs(d.imag).argmax())]
    ok = max_im < im_tol
    if gamma.kind == "gamma_prime":
        mask = np.ones(len(pts), dtype=bool)
    else:
        ref = gamma.anchor.real if zero_re is None else zero_re
        mask = np.array([p.real < ref for p in pts])
    checked = d[mask]
    if gamma.kind == "gamma_prime" and checked.size:
        ok = ok and bool(np.all(checked.real < 0))
    max_re = float(checked.real.max()) if checked.size else None
    return IntertwiningReport(ok, tuple(pts), max_im, max_re, int(mask.sum()), worst)


# -- fundamental domains ---------------------------------------------------


@dataclass
class FundamentalDomain:
    boundary: list
    witness: complex
    area: float
    injective: bool
    samples: int


def _branch_arc_seeds(G, v: complex, radius: float, n: int = 256):
    """Points on the circle |s - v| = radius where Im g = 0, with their Re g."""
    ang = 2 * np.pi * np.arange(n) / n
    pts = v + radius * np.exp(1j * ang)
    ims = np.array([G(p)[0].imag for p in pts])
    out = []
    for k in range(n):
        a, b = ims[k], ims[(k + 1) % n]
        if a == 0 or a * b < 0:
            th = optimize.brentq(lambda x: G(v + radius * np.exp(1j * x))[0].imag, ang[k], ang[k] + 2 * np.pi / n)
            p = v + radius * np.exp(1j * th)
            out.append((p, G(p)[0].real))
    return out


def _cut_through_branch(chi, v: complex, window, cfg: TraceSettings):
    """Pre-image of the segment [L(v), 1] through the branch point v."""
    w = complex(lf.eval_many(chi, np.array([v]))[0][0])
    theta = math.atan2((w - 1).imag, (w - 1).real)
    G = _line_fn(chi, theta)
    gv = G(v)[0].real
    radius = 1e-3
    arms = []
    for p, re in _branch_arc_seeds(G, v, radius):
        if re >= gv:
            continue
        p, g, dg, f, ok, _ = _correct(G, p, cfg.corrector_tol)
        arm = _trace_arm(G, p, g, dg, f, -1, window, cfg, stop=lambda s, g: g.real <= 0.0)
        if arm.end == "level":
            u = _solve_level_one(chi, arm.vertices[-1])
            if u is not None:
                arm.vertices[-1] = u
        arms.append(arm)
    if len(arms) != 2:
        raise NonConvergent(f"expected two descending arcs at branch point {v}, found {len(arms)}")
    a, b = arms
    verts = a.vertices[::-1] + [v] + b.vertices
    vals = a.values[::-1] + [w] + b.values
    return CurveComponent(
        np.array(verts), "cut", np.array(vals), v, (a.end, b.end), "L", [v]
    )


def _solve_level_one(chi, s: complex):
    for _ in range(40):
        v, d, _ = lf.eval_many(chi, np.array([s]), derivative=True)
        step = (v[0] - 1.0) / d[0]
        s = s - step
        if abs(step) < 1e-14:
            return complex(s)
    return None


def _one_plus_parts(c: CurveComponent):
    """Sub-polylines of a real-axis curve where L >= 1."""
    mask = c.values.real >= 1.0
    parts, start = [], None
    for i, m in enumerate(mask):
        if m and start is None:
            start = max(i - 1, 0)
        if not m and start is not None:
            parts.append(c.vertices[start : i + 1])
            start = None
    if start is not None:
        parts.append(c.vertices[start:])
    return parts


def _rasterize(polys, grid):
    """Boolean mask of pixels touched by the polylines (8-connected lines)."""
    x0, y0, dx, nx, ny = grid
    mask = np.zeros((ny, nx), dtype=bool)
    for pl in polys:
        pl = np.asarray(pl)
        if len(pl) < 2:
            continue
        seg = np.diff(pl)
        n = np.maximum(1, np.ceil(np.abs(seg) / (0.25 * dx)).astype(int))
        pts = np.concatenate([pl[i] + seg[i] * np.arange(n[i]) / n[i] for i in range(len(seg))] + [pl[-1:]])
        ix = np.floor((pts.real - x0) / dx).astype(int)
        iy = np.floor((pts.imag - y0) / dx).astype(int)
        ok = (ix >= 0) & (ix < nx) & (iy >= 0) & (iy < ny)
        mask[iy[ok], ix[ok]] = True
    return mask


def fundamental_domains(
    chi: DirichletCharacter,
    strip: Strip,
    resolution: float = 0.01,
    samples: int = 50,
    cfg: TraceSettings = DEFAULT,
    min_pixels: int = 200,
) -> list[FundamentalDomain]:
    """Cut a complete strip into sub-strips along the pre-images of [L(v), 1].

    The cuts are the arcs through each branch point v plus the parts of the
    interior curves mapped into [1, +inf).  Regions are found on a pixel grid
    and each gets a witness point and an injectivity check on up to
    samples x samples interior points (images pairwise farther apart than 1e-8).
    """
    if not strip.complete:
        raise IncompleteStrip("strip is not fully contained in the traced window")
    s0, s1, t0, t1 = strip.window
    wide = (s0 - 0.5, s1 + 0.5, t0 - 0.5, t1 + 0.5)
    cuts = [_cut_through_branch(chi, b.location, wide, cfg) for b in strip.branch_points_inside]
    pieces = [c.vertices for c in cuts]
    for c in strip.interior_curves:
        pieces.extend(_one_plus_parts(c))

    poly = strip.polygon
    bx0, by0, bx1, by1 = poly.bounds
    bx0, bx1 = max(bx0, s0), min(bx1, s1)
    by0, by1 = max(by0, t0), min(by1, t1)
    nx = int(math.ceil((bx1 - bx0) / resolution))
    ny = int(math.ceil((by1 - by0) / resolution))
    xs = bx0 + (np.arange(nx) + 0.5) * resolution
    ys = by0 + (np.arange(ny) + 0.5) * resolution
    X, Y = np.meshgrid(xs, ys)
    inside = contains_xy(poly, X, Y)
    grid = (bx0, by0, resolution, nx, ny)
    walls = _rasterize(pieces, grid)
    free = inside & ~walls
    labels, n = ndimage.label(free)
    sizes = ndimage.sum(free, labels, index=np.arange(1, n + 1))
    keep = [k + 1 for k in range(n) if sizes[k] >= min_pixels]
    wall_sets = [(_rasterize([p], grid), p) for p in pieces]
    out = []
    for lab in keep:
        region = labels == lab
        dist = ndimage.distance_transform_edt(region)
        iy, ix = np.unravel_index(np.argmax(dist), dist.shape)
        witness = complex(xs[ix], ys[iy])
        grown = ndimage.binary_dilation(region, iterations=2)
        boundary = [_as_curve(p, "cut") for m, p in wall_sets if (m & grown).any()]
        core = ndimage.binary_erosion(region, iterations=2)
        yy, xx = np.nonzero(core)
        pick = np.unique(np.linspace(0, len(yy) - 1, min(samples * samples, len(yy))).astype(int))
        pts = xs[xx[pick]] + 1j * ys[yy[pick]]
        vals, _, _ = lf.eval_many(chi, pts)
        tree = cKDTree(np.column_stack([vals.real, vals.imag]))
        injective = len(tree.query_pairs(1e-8)) == 0
        out.append(
            FundamentalDomain(boundary, witness, float(region.sum()) * resolution**2, injective, len(pts))
        )
    out.sort(key=lambda d: (d.witness.imag, d.witness.real))
    return out


def _as_curve(verts, kind):
    verts = np.asarray(verts)
    return CurveComponent(verts, kind, np.zeros(len(verts), dtype=np.complex128), verts[0], ("window", "window"))


# -- output ----------------------------------------------------------------


def write_curves_csv(curves, path) -> None:
    """CSV rows: component_id, kind, vertex_index, re, im, color."""
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["component_id", "kind", "vertex_index", "re", "im", "color"])
            for cid, c in enumerate(curves):
                for i, (v, col) in enumerate(zip(c.vertices, c.color_per_vertex)):
                    w.writerow([cid, c.kind, i, repr(float(v.real)), repr(float(v.imag)), int(col)])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
