"""Locating, refining and classifying zeros of L(s; chi) and L'(s; chi).

Zeros are counted by the argument principle on rectangle boundaries and
isolated by recursive subdivision; each isolated zero is polished by
Newton's method.  For principal characters the scanned function is
(s - 1) L(s) (or (s - 1)^2 L'(s)) so that the pole at s = 1 never enters the
count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import lfunction as lf
from .characters import DirichletCharacter, conjugate, factorize
from .errors import BoundaryTooClose, NonConvergent, PoleAtOne

__all__ = [
    "Zero",
    "RectCount",
    "ZeroScan",
    "SimplicityReport",
    "RHReport",
    "count_zeros_rect",
    "scan_zeros",
    "find_zeros",
    "refine_zero",
    "trivial_zeros",
    "verify_simple",
    "verify_rh",
    "zero_to_record",
    "zero_from_record",
]

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
BOUNDARY_MIN = 1e-8
STRIP = {"L": (-1.0, 2.0), "Lprime": (-1.0, 4.0)}
FD_STEP = 1e-6


@dataclass(frozen=True)
class Zero:
    location: complex
    kind: str  # trivial_real | trivial_imaginary | nontrivial
    target: str  # L | Lprime
    residual: float
    deriv_abs: float
    character: tuple[int, int]
    multiplicity: int = 1


@dataclass(frozen=True)
class RectCount:
    rect: tuple[float, float, float, float]
    winding: int
    boundary_min_abs: float


@dataclass
class ZeroScan:
    """Result of a subdivision scan: the zeros plus the completeness tally."""

    zeros: list[Zero]
    full: RectCount
    cell_total: int
    cells: list[RectCount] = field(default_factory=list)

    @property
    def complete(self) -> bool:
        return self.cell_total == self.full.winding


def _residue(chi: DirichletCharacter) -> float:
    r = 1.0
    for p in factorize(chi.modulus):
        r *= 1.0 - 1.0 / p
    return r


def scan_function(chi: DirichletCharacter, target: str):
    """Vectorized entire function whose zeros are those of the target."""
    if target not in STRIP:
        raise ValueError(f"target must be 'L' or 'Lprime', got {target!r}")
    principal = chi.is_principal
    res = _residue(chi) if principal else 0.0

    def f(s):
        s = np.asarray(s, dtype=np.complex128)
        if not principal:
            v, d, _ = lf.eval_many(chi, s, derivative=target == "Lprime")
            return v if target == "L" else d
        near = np.abs(s - 1.0) < 1e-9
        safe = np.where(near, 2.0, s)
        v, d, _ = lf.eval_many(chi, safe, derivative=target == "Lprime")
        if target == "L":
            out = (safe - 1.0) * v
            return np.where(near, res, out)
        out = (safe - 1.0) ** 2 * d
        return np.where(near, -res, out)

    return f


def _function_and_derivative(chi: DirichletCharacter, target: str):
    """Scalar callable s -> (f(s), f'(s)) for Newton steps."""

    if target == "L":

        def fd(s):
            v, d, _ = lf.eval_many(chi, np.array([s]), derivative=True)
            return complex(v[0]), complex(d[0])

        return fd

    def fd2(s):
        pts = np.array([s, s + FD_STEP, s - FD_STEP])
        _, d, _ = lf.eval_many(chi, pts, derivative=True)
        return complex(d[0]), complex((d[1] - d[2]) / (2 * FD_STEP))

    return fd2


def _boundary(rect, step):
    s0, s1, t0, t1 = rect
    pts = []
    for a, b in (
        (complex(s0, t0), complex(s1, t0)),
        (complex(s1, t0), complex(s1, t1)),
        (complex(s1, t1), complex(s0, t1)),
        (complex(s0, t1), complex(s0, t0)),
    ):
        n = max(2, int(math.ceil(abs(b - a) / step)))
        pts.append(a + (b - a) * np.arange(n) / n)
    pts.append(np.array([complex(s0, t0)]))
    return np.concatenate(pts)


def _winding(f, rect, step, max_rounds=45):
    """Winding number of f along the rectangle boundary, with adaptive refinement."""
    pts = _boundary(rect, step)
    vals = f(pts)
    for _ in range(max_rounds):
        if not np.all(np.isfinite(vals)):
            raise BoundaryTooClose("non-finite value on contour")
        mag = np.abs(vals)
        if mag.min() < BOUNDARY_MIN:
            raise BoundaryTooClose(f"|f| = {mag.min():.3g} on contour")
        ratio = vals[1:] / vals[:-1]
        dphi = np.angle(ratio)
        jump = np.abs(vals[1:] - vals[:-1]) > 0.5 * np.minimum(mag[1:], mag[:-1])
        bad = (np.abs(dphi) >= math.pi / 2) | jump
        if not bad.any():
            total = dphi.sum() / (2 * math.pi)
            w = int(round(total))
            if abs(total - w) > 1e-3:
                raise BoundaryTooClose("phase total is not an integer multiple of 2 pi")
            return w, float(mag.min())
        idx = np.nonzero(bad)[0]
        if np.min(np.abs(pts[idx + 1] - pts[idx])) < 1e-13:
            raise BoundaryTooClose("phase refinement stalled")
        mids = 0.5 * (pts[idx] + pts[idx + 1])
        mvals = f(mids)
        pts = np.insert(pts, idx + 1, mids)
        vals = np.insert(vals, idx + 1, mvals)
    raise BoundaryTooClose("phase refinement did not settle")


def _count(f, rect) -> RectCount:
    s0, s1, t0, t1 = rect
    if s1 <= s0 or t1 <= t0:
        return RectCount(rect, 0, math.inf)
    step = min(0.05, min(s1 - s0, t1 - t0) / 16.0)
    w, m = _winding(f, rect, step)
    return RectCount(rect, w, m)


def count_zeros_rect(chi: DirichletCharacter, rect, target: str = "L", attempts: int = 5) -> RectCount:
    """Number of zeros of the target inside rect = (sigma0, sigma1, t0, t1).

    If the boundary passes within 1e-8 of a zero the rectangle is grown by
    golden-ratio offsets; the returned RectCount carries the rectangle that
    was actually used.
    """
    f = scan_function(chi, target)
    return _count_perturbed(f, tuple(float(x) for x in rect), attempts)


def _count_perturbed(f, rect, attempts=5) -> RectCount:
    s0, s1, t0, t1 = rect
    for k in range(attempts + 1):
        d = k * GOLDEN * 1e-3
        r = (s0 - d, s1 + d, t0 - d, t1 + d) if k else rect
        try:
            return _count(f, r)
        except BoundaryTooClose:
            continue
    raise BoundaryTooClose(f"boundary of {rect} stays within {BOUNDARY_MIN} of a zero")


def _classify(chi: DirichletCharacter, s: complex, target: str) -> str:
    if abs(s.imag) < 1e-9 and s.real < 1e-9:
        star = chi.primitive
        at_origin = abs(s.real) < 1e-9
        if target == "L" and at_origin and not (star.modulus > 1 and star.parity == 0):
            return "trivial_imaginary"
        return "trivial_real"
    if target == "L" and abs(s.real) < 1e-9 and not chi.is_primitive:
        return "trivial_imaginary"
    return "nontrivial"


def refine_zero(
    chi: DirichletCharacter,
    s0,
    target: str = "L",
    max_iter: int = 60,
    tol: float = 1e-11,
    multiplicity: int = 1,
) -> Zero:
    """Newton iteration s <- s - m f(s)/f'(s) from s0 (m = multiplicity)."""
    fd = _function_and_derivative(chi, target)
    s = complex(s0)
    try:
        v, d = fd(s)
        for _ in range(max_iter):
            # a multiple zero has |f| ~ dist^m, so the residual alone stops too early
            if abs(v) < tol and (multiplicity == 1 or v == 0):
                break
            if d == 0 or not math.isfinite(abs(d)):
                raise NonConvergent(f"vanishing derivative at {s}")
            step = multiplicity * v / d
            if abs(step) > 2.0:
                step *= 2.0 / abs(step)
            s = s - step
            v, d = fd(s)
            if abs(step) < (1e-15 if multiplicity == 1 else 1e-13) * max(1.0, abs(s)):
                break
    except PoleAtOne as exc:
        raise NonConvergent(f"Newton iteration hit the pole from {s0}") from exc
    if not (abs(v) < tol or (abs(v) < 1e-9 and abs(v / d) < 1e-13 * max(1.0, abs(s)))):
        raise NonConvergent(f"Newton from {s0} stalled at {s} with residual {abs(v):.3g}")
    return Zero(
        location=s,
        kind=_classify(chi, s, target),
        target=target,
        residual=abs(v),
        deriv_abs=abs(d),
        character=(chi.modulus, chi.index),
        multiplicity=multiplicity,
    )


def _multiple_zero(chi, cell: RectCount, target: str) -> Zero | None:
    """A zero of multiplicity cell.winding inside a small cell, if modified Newton finds one."""
    a, b, c, d = cell.rect
    try:
        z = refine_zero(chi, complex(0.5 * (a + b), 0.5 * (c + d)), target, multiplicity=cell.winding)
    except NonConvergent:
        return None
    loc = z.location
    if a <= loc.real <= b and c <= loc.imag <= d and z.deriv_abs < 1e-5:
        return z
    return None


def scan_zeros(
    chi: DirichletCharacter,
    t_min: float,
    t_max: float,
    target: str = "L",
    sigma_range: tuple[float, float] | None = None,
    min_cell: float = 1e-7,
) -> ZeroScan:
    """Subdivision scan of sigma_range x [t_min, t_max] with a completeness tally."""
    s0, s1 = sigma_range or STRIP[target]
    if t_max <= t_min:
        return ZeroScan([], RectCount((s0, s1, t_min, t_max), 0, math.inf), 0)
    f = scan_function(chi, target)
    full = _count_perturbed(f, (s0, s1, float(t_min), float(t_max)))
    zeros: list[Zero] = []
    leaves: list[RectCount] = []
    stack = [full]
    while stack:
        cell = stack.pop()
        if cell.winding == 0:
            leaves.append(cell)
            continue
        a, b, c, d = cell.rect
        diam = math.hypot(b - a, d - c)
        center = complex(0.5 * (a + b), 0.5 * (c + d))
        if cell.winding == 1 and diam <= 1.0:
            try:
                z = refine_zero(chi, center, target)
                loc = z.location
                if a - 1e-9 <= loc.real <= b + 1e-9 and c - 1e-9 <= loc.imag <= d + 1e-9:
                    zeros.append(z)
                    leaves.append(cell)
                    continue
            except NonConvergent:
                pass
        if cell.winding > 1 and diam <= 0.01:
            z = _multiple_zero(chi, cell, target)
            if z is not None:
                zeros.append(z)
                leaves.append(cell)
                continue
        if diam < min_cell:
            raise NonConvergent(f"could not isolate {cell.winding} zeros in {cell.rect}")
        stack.extend(_split(f, cell))
    total = sum(c.winding for c in leaves)
    if total != full.winding:
        raise BoundaryTooClose(f"cell windings sum to {total}, full contour gives {full.winding}")
    zeros.sort(key=lambda z: (z.location.imag, z.location.real))
    return ZeroScan(zeros, full, total, leaves)


def _split(f, cell: RectCount) -> list[RectCount]:
    a, b, c, d = cell.rect
    vertical = (d - c) >= (b - a)
    for k in range(8):
        frac = 0.5 + ((k * GOLDEN) % 1.0 - 0.5) * 0.4 if k else 0.5
        if vertical:
            m = c + frac * (d - c)
            halves = ((a, b, c, m), (a, b, m, d))
        else:
            m = a + frac * (b - a)
            halves = ((a, m, c, d), (m, b, c, d))
        try:
            kids = [_count(f, h) for h in halves]
        except BoundaryTooClose:
            continue
        if sum(k.winding for k in kids) == cell.winding:
            return kids
    raise BoundaryTooClose(f"could not split cell {cell.rect} consistently")


def find_zeros(
    chi: DirichletCharacter,
    t_min: float,
    t_max: float,
    target: str = "L",
    sigma_range: tuple[float, float] | None = None,
) -> list[Zero]:
    """Zeros of the target with t_min <= Im s <= t_max in the scanning strip, sorted by Im."""
    if t_max <= t_min:
        return []
    scan = scan_zeros(chi, t_min, t_max, target, sigma_range)
    pad = 1e-9 * max(1.0, abs(t_min), abs(t_max))
    return [z for z in scan.zeros if t_min - pad <= z.location.imag <= t_max + pad]


def trivial_zeros(chi: DirichletCharacter, count: int) -> list[Zero]:
    """The first ``count`` trivial zeros of L(s; chi) ordered by modulus.

    Real ones come from the sine factor of the functional equation of the
    primitive character; imaginary ones from the Euler factors
    (1 - chi*(p) p^{-s}) for primes p dividing q but not the conductor.
    """
    if count < 1:
        return []
    star = chi.primitive
    d = star.modulus
    mult: dict[complex, int] = {}
    from_sine: set[complex] = set()
    first = 2 if d == 1 else star.parity
    for m in range(count):
        s = complex(-(first + 2 * m), 0.0)
        mult[s] = 1
        from_sine.add(s)
    for p in factorize(chi.modulus):
        if d % p == 0:
            continue
        c = star(p)
        phase = math.atan2(c.imag, c.real)
        for k in range(-count, count + 1):
            s = complex(0.0, round((phase + 2 * math.pi * k) / math.log(p), 12) + 0.0)
            mult[s] = mult.get(s, 0) + 1
    ordered = sorted(mult, key=lambda s: (round(abs(s), 9), s.imag < 0, s.real))[:count]
    pts = np.array(ordered, dtype=np.complex128)
    vals, ders, _ = lf.eval_many(chi, pts, derivative=True)
    out = []
    for s, v, dv in zip(ordered, vals, ders):
        kind = "trivial_real" if s in from_sine else "trivial_imaginary"
        out.append(Zero(s, kind, "L", float(abs(v)), float(abs(dv)), (chi.modulus, chi.index), mult[s]))
    return out


@dataclass(frozen=True)
class SimplicityReport:
    passed: bool
    threshold: float
    count: int
    min_deriv_abs: float
    min_location: complex | None
    failures: list[Zero]


def verify_simple(zeros, threshold: float = 1e-6) -> SimplicityReport:
    """PASS iff every zero has |f'| above threshold."""
    zeros = list(zeros)
    fails = [z for z in zeros if not z.deriv_abs > threshold or z.multiplicity > 1]
    if zeros:
        worst = min(zeros, key=lambda z: z.deriv_abs)
        return SimplicityReport(not fails, threshold, len(zeros), worst.deriv_abs, worst.location, fails)
    return SimplicityReport(True, threshold, 0, math.inf, None, [])


@dataclass(frozen=True)
class RHReport:
    passed: bool
    tol: float
    count: int
    max_deviation: float
    worst_location: complex | None
    max_pairing_residual: float
    failures: list[Zero]


def verify_rh(
    zeros,
    tol: float = 1e-8,
    chi: DirichletCharacter | None = None,
    pairing_tol: float = 1e-7,
) -> RHReport:
    """PASS iff every nontrivial zero has |Re - 1/2| < tol.

    With ``chi`` given, the functional-equation pairing is also checked: for
    the primitive character chi* behind chi, both L(1 - conj(rho); chi*) and
    L(1 - rho; conj(chi*)) must vanish to ``pairing_tol``.
    """
    zs = [z for z in zeros if z.kind == "nontrivial" and z.target == "L"]
    if not zs:
        return RHReport(True, tol, 0, 0.0, None, 0.0, [])
    devs = [abs(z.location.real - 0.5) for z in zs]
    i = int(np.argmax(devs))
    fails = [z for z, dv in zip(zs, devs) if not dv < tol]
    pair = 0.0
    if chi is not None:
        star = chi.primitive
        sbar = conjugate(star)
        rho = np.array([z.location for z in zs])
        a, _, _ = lf.eval_many(star, 1.0 - np.conj(rho))
        b, _, _ = lf.eval_many(sbar, 1.0 - rho)
        pair = float(max(np.abs(a).max(), np.abs(b).max()))
    passed = not fails and pair < pairing_tol
    return RHReport(passed, tol, len(zs), devs[i], zs[i].location, pair, fails)


def zero_to_record(z: Zero) -> dict:
    q, idx = z.character
    return {
        "q": q,
        "index": idx,
        "re": z.location.real,
        "im": z.location.imag,
        "kind": z.kind,
        "residual": z.residual,
        "deriv_abs": z.deriv_abs,
        "target": z.target,
        "multiplicity": z.multiplicity,
    }


def zero_from_record(rec: dict) -> Zero:
    return Zero(
        location=complex(rec["re"], rec["im"]),
        kind=rec["kind"],
        target=rec.get("target", "L"),
        residual=float(rec["residual"]),
        deriv_abs=float(rec["deriv_abs"]),
        character=(int(rec["q"]), int(rec["index"])),
        multiplicity=int(rec.get("multiplicity", 1)),
    )
