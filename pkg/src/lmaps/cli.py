"""Command-line entry point: ``lmaps <subcommand> [flags]``.

Exit codes: 0 on success or PASS, 2 when a verification FAILs, 1 on usage
or runtime errors.  Diagnostics go to standard error; data goes to standard
output or to the requested files.  Every JSON document carries
``"schema_version": 1``.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import characters as chars
from . import lfunction as lf
from . import preimage as pre
from . import render as rnd
from . import zeros as zmod
from .errors import LmapsError

SCHEMA_VERSION = 1
DEFAULT_SEED = 20240601

__all__ = ["run", "main", "report_suite", "VerificationSummary", "parse_complex", "parse_window"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


# -- parsing helpers -------------------------------------------------------

_COMPLEX = re.compile(
    r"^\s*(?P<re>[+-]?\s*(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?"
    r"\s*(?:(?P<sign>[+-])\s*(?P<im>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?\s*[ij])?\s*$"
)


def parse_complex(text: str) -> complex:
    """Parse "a+bi", "a-bi", "a", "bi" (optional whitespace, i or j)."""
    t = text.strip()
    m = re.fullmatch(r"\s*([+-]?)\s*((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?\s*[ij]\s*", t)
    if m and (m.group(2) or m.group(1) is not None):
        mag = float(m.group(2)) if m.group(2) else 1.0
        return complex(0.0, -mag if m.group(1) == "-" else mag)
    m = _COMPLEX.match(t)
    if not m or (m.group("re") is None and m.group("sign") is None) or not t:
        raise ValueError(f"cannot parse complex number {text!r}")
    re_part = float(m.group("re").replace(" ", "")) if m.group("re") else 0.0
    im_part = 0.0
    if m.group("sign"):
        mag = float(m.group("im")) if m.group("im") else 1.0
        im_part = mag if m.group("sign") == "+" else -mag
    return complex(re_part, im_part)


def parse_window(text: str) -> tuple[float, float, float, float]:
    parts = [float(p) for p in text.split(",")]
    if len(parts) != 4:
        raise ValueError("window must be 'sigma0,sigma1,t0,t1'")
    s0, s1, t0, t1 = parts
    if not (s1 > s0 and t1 > t0):
        raise ValueError(f"degenerate window {text!r}")
    return s0, s1, t0, t1


def _complex_arg(text):
    try:
        return parse_complex(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _window_arg(text):
    try:
        return parse_window(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _size_arg(text):
    m = re.fullmatch(r"\s*(\d+)\s*[xX]\s*(\d+)\s*", text)
    if not m:
        raise argparse.ArgumentTypeError("size must be WxH")
    return int(m.group(1)), int(m.group(2))


def _positive(text):
    x = float(text)
    if not x > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return x


def _cx(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"cannot serialize {type(o).__name__}")


def _dump(doc: dict, path: str | None) -> None:
    doc = {"schema_version": SCHEMA_VERSION, **doc}
    text = json.dumps(doc, indent=2, default=_json_default)
    if path in (None, "-"):
        sys.stdout.write(text + "\n")
    else:
        with open(path, "w") as fh:
            fh.write(text + "\n")


# -- summaries -------------------------------------------------------------


@dataclass
class VerificationSummary:
    check: str
    status: str
    worst_value: float
    worst_location: list | None
    tolerance: float
    parameters: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == "PASS"

    def to_dict(self) -> dict:
        return asdict(self)

    def line(self) -> str:
        loc = "" if self.worst_location is None else f" at {self.worst_location}"
        return f"{self.check}: {self.status} (worst {self.worst_value:.3e}{loc}, tol {self.tolerance:g})"


def _summary(check, worst, loc, tol, params, passed=None):
    ok = (worst < tol) if passed is None else passed
    loc = _cx(loc) if isinstance(loc, complex) else loc
    return VerificationSummary(check, "PASS" if ok else "FAIL", float(worst), loc, float(tol), params)


def _random_points(rng, n, sigma=(-2.0, 3.0), tmax=30.0):
    return rng.uniform(*sigma, n) + 1j * rng.uniform(-tmax, tmax, n)


def check_fe(chi, samples=25, seed=DEFAULT_SEED, tol=1e-7) -> VerificationSummary:
    rng = np.random.default_rng(seed)
    pts = _random_points(rng, samples)
    reps = [lf.functional_equation_check(chi, s) for s in pts]
    worst = max(reps, key=lambda r: r.residual)
    eps_dev = abs(abs(reps[0].epsilon_chi) - 1.0)
    params = {"q": chi.modulus, "index": chi.index, "samples": samples, "seed": seed, "epsilon_dev": eps_dev}
    return _summary("fe", worst.residual, worst.s, tol, params, worst.residual < tol and eps_dev < 1e-10)


def check_conj(chi, samples=25, seed=DEFAULT_SEED, tol=1e-9) -> VerificationSummary:
    rng = np.random.default_rng(seed)
    pts = _random_points(rng, samples)
    if chi.is_principal:
        pts = pts[np.abs(pts - 1) > 1e-6]
    res = [lf.conjugation_check(chi, s) for s in pts]
    k = int(np.argmax(res))
    params = {"q": chi.modulus, "index": chi.index, "samples": samples, "seed": seed}
    return _summary("conj", res[k], complex(pts[k]), tol, params)


def factor_grid() -> np.ndarray:
    """20 points: the agreement grid plus continuation points Re s in {-1, 0.5}."""
    pts = [complex(x, y) for x in (1.5, 2.0, 3.0) for y in (0.0, 1.0, 10.0)]
    pts += [complex(x, y) for x in (-1.0, 0.5) for y in (0.0, 1.0, -1.0, 10.0, -10.0)]
    pts += [complex(5.0, 1.0)]
    return np.array(pts)


def factor_residuals(chi, pts=None) -> np.ndarray:
    """|L(s; chi) - L(s; chi*) prod_{p|q}(1 - chi*(p) p^-s)| with L(s; chi) on the EM route."""
    pts = factor_grid() if pts is None else np.asarray(pts)
    direct = lf.eval_many(chi, pts, method="em")[0]
    star = chi.primitive
    sv = lf.eval_many(star, pts)[0]
    fv, _ = lf.euler_factor(star, chi.modulus, pts)
    return np.abs(direct - sv * fv)


def check_factor(chi, tol=1e-9) -> VerificationSummary:
    pts = factor_grid()
    if chi.is_principal and chi.modulus > 1:
        pts = pts[np.abs(pts - 1) > 1e-6]
    res = factor_residuals(chi, pts)
    k = int(np.argmax(res))
    params = {"q": chi.modulus, "index": chi.index, "conductor": chi.conductor, "points": len(pts)}
    return _summary("factor", res[k], complex(pts[k]), tol, params)


def rh_summary(zs, chi=None, tol=1e-8, params=None) -> VerificationSummary:
    r = zmod.verify_rh(zs, tol, chi)
    params = dict(params or {}, count=r.count, pairing_residual=r.max_pairing_residual)
    return _summary("rh", r.max_deviation, r.worst_location, tol, params, r.passed)


def simple_summary(zs, threshold=1e-6, params=None) -> VerificationSummary:
    r = zmod.verify_simple(zs, threshold)
    params = dict(params or {}, count=r.count, failures=len(r.failures))
    worst = r.min_deriv_abs if r.count else math.inf
    return _summary("simple", worst, r.min_location, threshold, params, r.passed)


def check_intertwine(chi, window, tol=1e-6, strips=None) -> VerificationSummary:
    if strips is None:
        strips = pre.find_strips(chi, window)
    seen, worst, loc, ok, npts = set(), 0.0, None, True, 0
    for s in strips:
        for c in (s.lower_boundary, s.upper_boundary):
            if id(c) in seen:
                continue
            seen.add(id(c))
            rep = pre.check_intertwining(chi, c, window, tol)
            npts += len(rep.points)
            ok = ok and rep.passed
            if rep.points and rep.max_abs_im >= worst:
                worst, loc = rep.max_abs_im, rep.worst_point
    params = {"q": chi.modulus, "index": chi.index, "window": list(window), "points": npts, "curves": len(seen)}
    return _summary("intertwine", worst, loc, tol, params, ok)


def check_alternation(chi, r, window) -> VerificationSummary:
    comps = pre.circle_preimage(chi, r, window)
    reps = [pre.check_color_alternation(c) for c in comps]
    bad = [c for c, rep in zip(comps, reps) if not rep.passed]
    params = {
        "q": chi.modulus,
        "index": chi.index,
        "r": r,
        "components": len(comps),
        "crossings": [rep.crossings for rep in reps],
    }
    loc = bad[0].anchor if bad else None
    return _summary("alternation", float(len(bad)), loc, 0.5, params, not bad)


def check_strips(chi, window, with_domains=True, strips=None):
    """Zero and branch-point counts on complete strips, plus domain counts."""
    try:
        if strips is None:
            strips = pre.find_strips(chi, window)
    except LmapsError as exc:
        return [VerificationSummary("strips", "FAIL", math.inf, None, 0.0, {"error": str(exc)})], []
    out, worst, loc = [], 0.0, None
    ok = True
    records = []
    for k, s in enumerate(strips):
        rec = _strip_record(k, s)
        if s.complete:
            j = len(s.zeros_inside)
            dev = abs(len(s.branch_points_inside) - (j - 1)) + (0 if j >= 1 else 1)
            if with_domains and j >= 1:
                try:
                    doms = pre.fundamental_domains(chi, s)
                    rec["domain_count"] = len(doms)
                    rec["domains_injective"] = all(d.injective for d in doms)
                    dev += abs(len(doms) - j) + (0 if rec["domains_injective"] else 1)
                except LmapsError as exc:
                    rec["domain_error"] = str(exc)
                    dev += 1
            if dev > worst:
                worst, loc = dev, complex(s.zeros_inside[0].location) if s.zeros_inside else None
            ok = ok and dev == 0
        records.append(rec)
    params = {"q": chi.modulus, "index": chi.index, "window": list(window), "strips": len(strips),
              "complete": sum(s.complete for s in strips)}
    out.append(_summary("strips", worst, loc, 0.5, params, ok))
    return out, records


def _strip_record(k, s: pre.Strip) -> dict:
    lo = pre._right_to_left(s.lower_boundary)
    up = pre._right_to_left(s.upper_boundary)
    return {
        "strip": k,
        "complete": bool(s.complete),
        "lower_boundary": {"right_end": _cx(lo[0]), "left_end": _cx(lo[-1]), "vertices": len(lo)},
        "upper_boundary": {"right_end": _cx(up[0]), "left_end": _cx(up[-1]), "vertices": len(up)},
        "zeros": [_cx(z.location) for z in s.zeros_inside],
        "branch_points": [_cx(b.location) for b in s.branch_points_inside],
        "gamma_zero_anchor": _cx(s.gamma_zero.anchor) if s.gamma_zero is not None else None,
    }


# -- report suite ----------------------------------------------------------


def _suite_job(args):
    q, index, t_max, seed = args
    chi = chars.character(q, index)
    out = []
    try:
        out.append(check_factor(chi))
    except LmapsError as exc:
        out.append(VerificationSummary("factor", "FAIL", math.inf, None, 1e-9, {"error": str(exc)}))
    if chi.is_primitive and q > 1:
        out.append(check_fe(chi, seed=seed))
    out.append(check_conj(chi, seed=seed))
    base = {"q": q, "index": index, "t_max": t_max}
    if t_max > 0:
        try:
            zl = zmod.find_zeros(chi, 0.0, t_max, "L")
            zp = zmod.find_zeros(chi, 0.0, t_max, "Lprime")
            out.append(rh_summary(zl, chi, params=base))
            simple = [z for z in zl + zp if z.kind == "nontrivial"]
            out.append(simple_summary(simple, params=base))
            window = (-2.0, 6.0, 0.0, t_max)
            strips = pre.find_strips(chi, window, zeros=zl, branch_points=zp)
            strip_sums, _ = check_strips(chi, window, with_domains=(q == 1), strips=strips)
            out.extend(strip_sums)
            out.append(check_intertwine(chi, window, strips=strips))
        except LmapsError as exc:
            out.append(VerificationSummary("zeros", "FAIL", math.inf, None, 0.0, dict(base, error=str(exc))))
    else:
        out.append(VerificationSummary("rh", "PASS", 0.0, None, 1e-8, dict(base, count=0)))
        out.append(VerificationSummary("simple", "PASS", 0.0, None, 1e-6, dict(base, count=0)))
    for s in out:
        s.parameters.setdefault("q", q)
        s.parameters.setdefault("index", index)
    return out


def report_suite(q_max: int, t_max: float, threads: int | None = None, seed: int = DEFAULT_SEED):
    """Run every check for every character with q <= q_max; never aborts on a failure."""
    if not 1 <= q_max <= 100:
        raise ValueError("q_max must lie in 1..100")
    if not 0 <= t_max <= 200:
        raise ValueError("t_max must lie in [0, 200]")
    jobs = [(q, c.index, float(t_max), seed) for q in range(1, q_max + 1) for c in chars.enumerate_characters(q)]
    threads = threads or os.cpu_count() or 1
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_suite_job, jobs))
    else:
        results = [_suite_job(j) for j in jobs]
    return [s for group in results for s in group]


# -- subcommands -----------------------------------------------------------


def _character(args):
    if args.modulus < 1:
        raise UsageError("modulus must be >= 1")
    n = chars.totient(args.modulus)
    if not 1 <= args.index <= n:
        raise UsageError(f"index must be in 1..{n} for modulus {args.modulus}")
    return chars.character(args.modulus, args.index)


def _root_label(k: int, m: int) -> str:
    if k < 0:
        return "0"
    g = math.gcd(k, m)
    k, m = k // g, m // g
    if m == 1:
        return "1"
    return f"e({k}/{m})"


def _true_order(c) -> int:
    return math.lcm(*[m for k, m in c.reduced_exponents if k >= 0] or [1])


def cmd_chars(args):
    if args.modulus < 1:
        raise UsageError("modulus must be >= 1")
    rows = []
    for c in chars.enumerate_characters(args.modulus):
        rows.append(
            {
                "index": c.index,
                "label": c.label(),
                "order": _true_order(c),
                "conductor": c.conductor,
                "primitive": c.is_primitive,
                "parity": c.parity,
                "real": c.is_real,
                "principal": c.is_principal,
                "values": [_root_label(k, c.order) for k in c.exponents],
            }
        )
    if args.json:
        _dump({"modulus": args.modulus, "characters": rows}, None)
    else:
        print(f"{'index':>5} {'cond':>5} {'kappa':>5} {'prim':>5}  values (e(k/m) = exp(2 pi i k/m))")
        for r in rows:
            print(f"{r['index']:>5} {r['conductor']:>5} {r['parity']:>5} {str(r['primitive']):>5}  {' '.join(r['values'])}")
    return 0


def cmd_eval(args):
    chi = _character(args)
    s = args.s
    if args.method == "series":
        res = lf.eval_series(chi, s, args.terms)
    elif args.method == "euler":
        res = lf.eval_euler(chi, s, args.prime_bound)
    else:
        res = lf.eval(chi, s, method=args.method)
    out = {"q": chi.modulus, "index": chi.index, "s": _cx(s), "value": _cx(res.value),
           "est_error": res.est_error, "method": res.method}
    if args.derivative:
        d = lf.eval_derivative(chi, s, method="em" if args.method == "em" else "auto")
        out["derivative"] = _cx(d.value)
        out["derivative_est_error"] = d.est_error
    if args.json:
        _dump(out, None)
    else:
        v = res.value
        print(f"L({s}; {chi.label()}) = {v.real:.15g} {'+' if v.imag >= 0 else '-'} {abs(v.imag):.15g}i"
              f"  (est_error {res.est_error:.2e}, {res.method})")
        if args.derivative:
            d = complex(*out["derivative"])
            print(f"L'({s}; {chi.label()}) = {d.real:.15g} {'+' if d.imag >= 0 else '-'} {abs(d.imag):.15g}i")
    return 0


def _zeros_doc(chi, zs, args, target):
    return {
        "q": chi.modulus,
        "index": chi.index,
        "target": target,
        "t_min": args.t_min,
        "t_max": args.t_max,
        "zeros": [zmod.zero_to_record(z) for z in zs],
    }


def cmd_zeros(args):
    chi = _character(args)
    zs = zmod.find_zeros(chi, args.t_min, args.t_max, args.target)
    doc = _zeros_doc(chi, zs, args, args.target)
    if args.json:
        _dump(doc, args.json)
    if not args.json or args.json != "-":
        for z in zs:
            print(f"{z.location.real:.12f} {z.location.imag:+.12f}i  {z.kind:<18} residual {z.residual:.1e}"
                  f"  |f'| {z.deriv_abs:.4g}")
    return 0


def cmd_trivial(args):
    chi = _character(args)
    zs = zmod.trivial_zeros(chi, args.count)
    if args.json:
        _dump({"q": chi.modulus, "index": chi.index, "zeros": [zmod.zero_to_record(z) for z in zs]}, args.json)
    else:
        for z in zs:
            m = f"  multiplicity {z.multiplicity}" if z.multiplicity > 1 else ""
            print(f"{z.location.real:.12g} {z.location.imag:+.12g}i  {z.kind}{m}")
    return 0


def cmd_trace(args):
    chi = _character(args)
    if args.seed_point is not None:
        try:
            curves = [pre.trace_real_preimage(chi, args.seed_point, args.target, args.window)]
        except pre.BranchPointEncountered as exc:
            print(f"warning: {exc} near {exc.location}", file=sys.stderr)
            curves = [exc.partial]
    else:
        curves = pre.trace_all(chi, args.window, args.target)
    if args.csv:
        pre.write_curves_csv(curves, args.csv)
    for k, c in enumerate(curves):
        print(f"component {k}: {c.kind}, {len(c)} vertices, ends {c.ends}, anchor {c.anchor:.6f}")
    return 0


def cmd_strips(args):
    chi = _character(args)
    sums, records = check_strips(chi, args.window, with_domains=not args.no_domains)
    doc = {"q": chi.modulus, "index": chi.index, "window": list(args.window), "strips": records,
           "summary": [s.to_dict() for s in sums]}
    _dump(doc, args.json)
    return 0


def cmd_domains(args):
    chi = _character(args)
    strips = pre.find_strips(chi, args.window)
    recs = []
    for k, s in enumerate(strips):
        if not s.complete:
            continue
        doms = pre.fundamental_domains(chi, s)
        recs.append(
            {
                "strip": k,
                "zeros": len(s.zeros_inside),
                "domain_count": len(doms),
                "domains": [
                    {"witness": _cx(d.witness), "area": d.area, "injective": d.injective, "samples": d.samples}
                    for d in doms
                ],
            }
        )
    _dump({"q": chi.modulus, "index": chi.index, "window": list(args.window), "strips": recs}, args.json)
    ok = all(r["domain_count"] == r["zeros"] and all(d["injective"] for d in r["domains"]) for r in recs)
    return 0 if ok else 2


def cmd_render(args):
    chi = _character(args)
    w, h = args.size
    if args.style == "two-color":
        img = rnd.render_two_color(chi, args.window, w, h, args.target)
    else:
        img = rnd.render_mesh(chi, args.window, w, h, target=args.target)
    if args.overlay_zeros:
        zs = zmod.find_zeros(chi, args.window[2], args.window[3], args.target)
        img = rnd.overlay_curves(img, [], zs)
    if args.rotate:
        img = rnd._rotate(img, True)
    rnd.write_ppm(img, args.output)
    print(f"wrote {args.output} ({img.width}x{img.height})", file=sys.stderr)
    return 0


def _load_zeros(path):
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise UsageError(f"{path}: unsupported schema_version {doc.get('schema_version')!r}")
    zs = [zmod.zero_from_record(r) for r in doc["zeros"]]
    return doc, zs


def _emit(summary: VerificationSummary, args) -> int:
    if getattr(args, "json", None):
        _dump({"summary": summary.to_dict()}, args.json)
    print(summary.line())
    return 0 if summary.passed else 2


def cmd_verify(args):
    what = args.check
    if what in ("rh", "simple"):
        if args.from_file:
            doc, zs = _load_zeros(args.from_file)
            chi = chars.character(doc["q"], doc["index"]) if what == "rh" and "q" in doc else None
            params = {"source": args.from_file}
        else:
            if args.modulus is None or args.index is None:
                raise UsageError("give --from or --modulus/--index")
            chi = _character(args)
            zs = zmod.find_zeros(chi, args.t_min, args.t_max, "L")
            if what == "simple":
                zs = zs + zmod.find_zeros(chi, args.t_min, args.t_max, "Lprime")
            params = {"q": chi.modulus, "index": chi.index, "t_min": args.t_min, "t_max": args.t_max}
        if what == "rh":
            return _emit(rh_summary(zs, chi, args.tol or 1e-8, params), args)
        zs = [z for z in zs if z.kind == "nontrivial" or z.multiplicity == 1]
        return _emit(simple_summary(zs, args.tol or 1e-6, params), args)
    if args.modulus is None or args.index is None:
        raise UsageError(f"verify {what} needs --modulus and --index")
    chi = _character(args)
    if what == "fe":
        return _emit(check_fe(chi, args.samples, args.seed, args.tol or 1e-7), args)
    if what == "conj":
        return _emit(check_conj(chi, args.samples, args.seed, args.tol or 1e-9), args)
    if what == "factor":
        return _emit(check_factor(chi, args.tol or 1e-9), args)
    window = args.window or (-2.0, 6.0, args.t_min, args.t_max)
    if what == "intertwine":
        return _emit(check_intertwine(chi, window, args.tol or 1e-6), args)
    if what == "alternation":
        return _emit(check_alternation(chi, args.r, window), args)
    raise UsageError(f"unknown check {what}")


def cmd_report(args):
    sums = report_suite(args.q_max, args.t_max, args.threads, args.seed)
    passed = all(s.passed for s in sums)
    doc = {
        "q_max": args.q_max,
        "t_max": args.t_max,
        "seed": args.seed,
        "status": "PASS" if passed else "FAIL",
        "checks": [s.to_dict() for s in sums],
    }
    _dump(doc, args.json)
    fails = [s for s in sums if not s.passed]
    print(f"{len(sums)} checks, {len(fails)} failed", file=sys.stderr)
    for s in fails:
        print("  " + s.line(), file=sys.stderr)
    return 0 if passed else 2


# -- parser ----------------------------------------------------------------


def _char_flags(p, required=True):
    p.add_argument("--modulus", "-q", type=int, required=required)
    p.add_argument("--index", "-j", type=int, required=required)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="lmaps", description="Dirichlet L-functions: values, zeros, pre-image curves and figures.")
    ap.add_argument("--threads", type=int, default=None, help="worker processes (default: all cores)")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("chars", help="list the characters mod q")
    p.add_argument("--modulus", "-q", type=int, required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_chars)

    p = sub.add_parser("eval", help="evaluate L(s; chi)")
    _char_flags(p)
    p.add_argument("--s", type=_complex_arg, required=True, help='point, e.g. "0.5+14.1i"')
    p.add_argument("--method", choices=["auto", "series", "euler", "em"], default="auto")
    p.add_argument("--terms", type=int, default=1_000_000)
    p.add_argument("--prime-bound", type=int, default=100_000)
    p.add_argument("--derivative", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("zeros", help="find zeros in a t-range")
    _char_flags(p)
    p.add_argument("--t-min", type=float, required=True)
    p.add_argument("--t-max", type=float, required=True)
    p.add_argument("--target", choices=["L", "Lprime"], default="L")
    p.add_argument("--json", metavar="PATH")
    p.set_defaults(func=cmd_zeros)

    p = sub.add_parser("trivial-zeros", help="list trivial zeros")
    _char_flags(p)
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--json", metavar="PATH")
    p.set_defaults(func=cmd_trivial)

    p = sub.add_parser("trace", help="trace real-axis pre-image components")
    _char_flags(p)
    p.add_argument("--window", type=_window_arg, required=True, help="sigma0,sigma1,t0,t1")
    p.add_argument("--target", choices=["L", "Lprime"], default="L")
    p.add_argument("--seed-point", type=_complex_arg, default=None, help="trace only the component through this point")
    p.add_argument("--csv", metavar="PATH")
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("strips", help="strip report as JSON")
    _char_flags(p)
    p.add_argument("--window", type=_window_arg, required=True)
    p.add_argument("--no-domains", action="store_true")
    p.add_argument("--json", metavar="PATH")
    p.set_defaults(func=cmd_strips)

    p = sub.add_parser("domains", help="fundamental domains of complete strips")
    _char_flags(p)
    p.add_argument("--window", type=_window_arg, required=True)
    p.add_argument("--json", metavar="PATH")
    p.set_defaults(func=cmd_domains)

    p = sub.add_parser("render", help="render a PPM figure")
    _char_flags(p)
    p.add_argument("--window", type=_window_arg, required=True)
    p.add_argument("--size", type=_size_arg, required=True, help="WxH")
    p.add_argument("--style", choices=["two-color", "mesh"], default="two-color")
    p.add_argument("--target", choices=["L", "Lprime"], default="L")
    p.add_argument("--rotate", action="store_true", help="rotate counterclockwise by pi/2")
    p.add_argument("--overlay-zeros", action="store_true")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("verify", help="numerical checks with PASS/FAIL exit codes")
    p.add_argument("check", choices=["fe", "conj", "factor", "rh", "simple", "intertwine", "alternation"])
    _char_flags(p, required=False)
    p.add_argument("--from", dest="from_file", metavar="PATH", help="zeros JSON file (rh, simple)")
    p.add_argument("--t-min", type=float, default=0.0)
    p.add_argument("--t-max", type=float, default=60.0)
    p.add_argument("--tol", type=_positive, default=None)
    p.add_argument("--samples", type=int, default=25)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--window", type=_window_arg, default=None)
    p.add_argument("--r", type=_positive, default=1.2, help="circle radius (alternation)")
    p.add_argument("--json", metavar="PATH")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("report", help="run the whole verification suite")
    p.add_argument("--q-max", type=int, default=10)
    p.add_argument("--t-max", type=float, default=60.0)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--json", metavar="PATH")
    p.set_defaults(func=cmd_report)
    return ap


_VALUE_FLAGS = {"--window", "--s", "--seed-point", "--t-min", "--t-max"}


def _glue_negative_values(argv):
    """Join "--window -2,6,0,30" into "--window=-2,6,0,30" so argparse keeps the value."""
    out, k = [], 0
    while k < len(argv):
        tok = argv[k]
        nxt = argv[k + 1] if k + 1 < len(argv) else None
        if tok in _VALUE_FLAGS and nxt is not None and re.match(r"-\s*[\d.]", nxt):
            out.append(f"{tok}={nxt}")
            k += 2
        else:
            out.append(tok)
            k += 1
    return out


def run(argv=None) -> int:
    parser = build_parser()
    argv = _glue_negative_values(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"lmaps: error: {exc}", file=sys.stderr)
        return 1
    except (LmapsError, ValueError, OSError) as exc:
        print(f"lmaps: error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())
