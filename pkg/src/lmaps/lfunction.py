"""Dirichlet L-functions, their derivatives, and the identities they satisfy.

The continuation backbone is Euler-Maclaurin summation applied to the
Hurwitz decomposition

    L(s; chi) = q^{-s} sum_{a mod q} chi(a) zeta(s, a/q),

written directly in integer bases: the first N*q terms of the Dirichlet
series are summed exactly and each residue class a contributes an
Euler-Maclaurin tail anchored at y_a = N*q + a.  Far to the left
(Re s < LEFT_EDGE) the sums suffer cancellation, so primitive characters are
reflected through the functional equation and imprimitive ones are factored
through their primitive character.  Principal characters mod q > 1 always go
through zeta(s) * prod_{p | q} (1 - p^{-s}).

All array routines accept any shape of complex input and are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _special
from .characters import DirichletCharacter, conjugate, factorize, gauss_sum
from .errors import NotPrimitive, PoleAtOne

__all__ = [
    "EvalResult",
    "FunctionalEquationReport",
    "eval_series",
    "eval_euler",
    "hurwitz_zeta",
    "eval",
    "eval_derivative",
    "eval_many",
    "functional_equation_check",
    "conjugation_check",
    "epsilon",
    "euler_factor",
    "LEFT_EDGE",
]

EPS = np.finfo(float).eps
LEFT_EDGE = -2.5
BERNOULLI_TERMS = 12
_POLE_TOL = 1e-12
_CHUNK = 1 << 20


@dataclass(frozen=True)
class EvalResult:
    value: complex
    est_error: float
    method: str


@dataclass(frozen=True)
class FunctionalEquationReport:
    s: complex
    lhs: complex
    rhs: complex
    residual: float
    epsilon_chi: complex
    kappa: int


def _as_complex(s) -> complex:
    if isinstance(s, str):
        s = complex(s.replace(" ", "").replace("i", "j"))
    return complex(s)


@lru_cache(maxsize=None)
def _bernoulli_coeffs(m: int) -> np.ndarray:
    """B_{2k} / (2k)! for k = 1..m."""
    return np.array([float(b) / math.factorial(2 * k) for k, b in enumerate(_special.bernoulli_even(m), 1)])


def default_cutoff(t_abs: float) -> int:
    """Euler-Maclaurin truncation N for heights up to t_abs."""
    return max(20, int(math.ceil(2.0 * t_abs)))


@lru_cache(maxsize=512)
def _tables(chi: DirichletCharacter, N: int):
    """Nonzero head terms (log n, chi(n)) for n <= N*q, and tail bases y_a."""
    q = chi.modulus
    vals = chi.values
    n = np.arange(1, N * q + 1)
    w = vals[n % q]
    keep = w != 0
    n = n[keep]
    head_log = np.log(n.astype(float))
    head_w = w[keep]
    a = np.arange(1, q + 1)
    wa = vals[a % q]
    keep = wa != 0
    y = (N * q + a[keep]).astype(float)
    return head_log, head_w, y, wa[keep]


def _em_core(chi: DirichletCharacter, s: np.ndarray, N: int, M: int, deriv: bool):
    """Euler-Maclaurin evaluation of L (and L') on a flat array s."""
    q = chi.modulus
    head_log, head_w, y, wy = _tables(chi, N)
    coeffs = _bernoulli_coeffs(M + 1)
    P = s.size
    val = np.empty(P, dtype=np.complex128)
    dval = np.empty(P, dtype=np.complex128) if deriv else None
    err = np.empty(P)
    step = max(1, _CHUNK // max(1, head_log.size))
    logy = np.log(y)
    ratio = q / y
    for lo in range(0, P, step):
        ss = s[lo : lo + step]
        E = np.exp(-np.outer(ss, head_log))
        v = E @ head_w
        mag = np.abs(E) @ np.abs(head_w)
        if deriv:
            dv = -(E @ (head_w * head_log))
        # tail: sum_a chi(a) y_a^{-s} G_a(s)
        Ey = np.exp(-np.outer(ss, logy))  # (p, A)
        G = np.full(Ey.shape, 0.5, dtype=np.complex128)
        dG = np.zeros_like(G) if deriv else None
        poch = ss[:, None].copy()  # (s)_{1}
        dpoch = np.ones_like(poch)
        r = ratio[None, :]
        rpow = r.copy()
        r2 = r * r
        for k in range(1, M + 1):
            term = coeffs[k - 1] * poch * rpow
            G = G + term
            if deriv:
                dG = dG + coeffs[k - 1] * dpoch * rpow
            # advance (s)_{2k-1} -> (s)_{2k+1}
            a1 = ss[:, None] + (2 * k - 1)
            a2 = ss[:, None] + 2 * k
            dpoch = (dpoch * a1 + poch) * a2 + poch * a1
            poch = poch * a1 * a2
            rpow = rpow * r2
        nxt = np.abs(coeffs[M] * poch * rpow * Ey) @ np.abs(wy)
        sig = ss.real + 2 * M + 1
        fac = np.where(sig > 0, np.maximum(1.0, np.abs(ss + 2 * M + 1) / np.maximum(sig, 1e-300)), np.inf)
        # y^{1-s}/(s-1) = f(s-1) + 1/(s-1); the 1/(s-1) parts cancel unless chi is principal
        u = (ss - 1.0)[:, None]
        f, df = _expm1_ratio(u, logy[None, :], deriv)
        tail = (Ey * G) @ wy + (f @ wy) / q
        mag = mag + np.abs(Ey * G) @ np.abs(wy) + np.abs(f) @ np.abs(wy) / q
        if chi.is_principal:
            tail = tail + wy.sum() / (q * u[:, 0])
        v = v + tail
        val[lo : lo + step] = v
        err[lo : lo + step] = nxt * fac + 8.0 * EPS * mag
        if deriv:
            dtail = (Ey * (dG - logy[None, :] * G)) @ wy + (df @ wy) / q
            if chi.is_principal:
                dtail = dtail - wy.sum() / (q * u[:, 0] ** 2)
            dval[lo : lo + step] = dv + dtail
    return val, dval, err


def _expm1_ratio(u, L, deriv: bool):
    """f(u) = (exp(-u L) - 1) / u and f'(u), stable as u -> 0."""
    z = -u * L
    small = np.abs(z) < 0.5
    with np.errstate(divide="ignore", invalid="ignore"):
        e = np.exp(z)
        f = np.where(small, 0.0, (e - 1.0) / u)
        df = np.where(small, 0.0, ((z - 1.0) * e + 1.0) / (u * u)) if deriv else None
    if small.any():
        # f = sum_{k>=1} (-L)^k u^{k-1} / k!,  f' = sum_{k>=2} (k-1) (-L)^k u^{k-2} / k!
        mL = -L * np.ones_like(u)
        fs = np.zeros_like(z)
        dfs = np.zeros_like(z)
        term = mL.astype(np.complex128)  # (-L)^k u^{k-1} / k! at k = 1
        for k in range(1, 30):
            fs = fs + term
            if deriv and k >= 2:
                dfs = dfs + (k - 1) * term / np.where(u == 0, 1.0, u)
            term = term * mL * u / (k + 1)
        if deriv:
            # the division above fails at u == 0; there f'(0) = L^2 / 2
            dfs = np.where(u == 0, 0.5 * L * L, dfs)
            df = np.where(small, dfs, df)
        f = np.where(small, fs, f)
    return f, df


def _check_pole(chi: DirichletCharacter, s: np.ndarray):
    if chi.is_principal and np.any(np.abs(s - 1.0) < _POLE_TOL):
        raise PoleAtOne(f"L(s; {chi.label()}) has a simple pole at s = 1")


def euler_factor(chi_star: DirichletCharacter, q: int, s, deriv: bool = False):
    """prod_{p | q} (1 - chi*(p) p^{-s}) and optionally its s-derivative."""
    s = np.asarray(s, dtype=np.complex128)
    factors = []
    for p in factorize(q):
        c = chi_star(p)
        if c == 0:
            continue
        x = c * np.exp(-s * math.log(p))
        factors.append((1.0 - x, math.log(p) * x))
    val = np.ones_like(s)
    for f, _ in factors:
        val = val * f
    if not deriv:
        return val, None
    dval = np.zeros_like(s)
    for i, (_, df) in enumerate(factors):
        prod = df
        for j, (f, _) in enumerate(factors):
            if j != i:
                prod = prod * f
        dval = dval + prod
    return val, dval


def epsilon(chi: DirichletCharacter) -> complex:
    """Root number tau(chi) / (i^kappa sqrt(q))."""
    return gauss_sum(chi) / ((1j ** chi.parity) * math.sqrt(chi.modulus))


def _fe_log_factor(chi: DirichletCharacter, s: np.ndarray):
    """log of 2^s pi^{s-1} q^{1/2-s} Gamma(1-s) sin(pi (s + kappa) / 2)."""
    q, kappa = chi.modulus, chi.parity
    return (
        s * math.log(2.0)
        + (s - 1.0) * math.log(math.pi)
        + (0.5 - s) * math.log(q)
        + _special.loggamma(1.0 - s)
        + _special.log_sin(0.5 * math.pi * (s + kappa))
    )


def _fe_log_factor_deriv(chi: DirichletCharacter, s: np.ndarray):
    return (
        math.log(2.0)
        + math.log(math.pi)
        - math.log(chi.modulus)
        - _special.digamma(1.0 - s)
        + 0.5 * math.pi / np.tan(0.5 * math.pi * (s + chi.parity))
    )


def _reflect(chi: DirichletCharacter, s: np.ndarray, deriv: bool):
    """Primitive chi on Re s < LEFT_EDGE via the functional equation."""
    cbar = conjugate(chi)
    w = 1.0 - s
    v, dv, e = _route(cbar, w, deriv)
    eps = epsilon(chi) if chi.modulus > 1 else 1.0
    G = np.exp(_fe_log_factor(chi, s))
    val = eps * v * G
    err = np.abs(eps * G) * e + 1e-13 * np.abs(val)
    dval = None
    if deriv:
        dval = eps * G * (-dv + v * _fe_log_factor_deriv(chi, s))
    return val, dval, err


def _route(
    chi: DirichletCharacter,
    s: np.ndarray,
    deriv: bool,
    method: str = "auto",
    N: int | None = None,
    left_edge: float = LEFT_EDGE,
):
    """Dispatch a flat array of points to the appropriate evaluation path."""
    s = np.asarray(s, dtype=np.complex128).ravel()
    q = chi.modulus
    if method == "auto" and chi.is_principal and q > 1:
        zeta = _zeta_char()
        zv, zd, ze = _route(zeta, s, deriv, "auto", N, left_edge)
        pv, pd = euler_factor(zeta, q, s, deriv)
        val = zv * pv
        dval = zd * pv + zv * pd if deriv else None
        return val, dval, ze * np.abs(pv) + 4 * EPS * np.abs(val)
    val = np.empty(s.size, dtype=np.complex128)
    dval = np.empty(s.size, dtype=np.complex128) if deriv else None
    err = np.empty(s.size)
    left = (s.real < left_edge) if method == "auto" else np.zeros(s.size, bool)
    right = ~left
    if right.any():
        sr = s[right]
        n = N if N is not None else default_cutoff(float(np.max(np.abs(sr.imag))))
        v, d, e = _em_core(chi, sr, n, BERNOULLI_TERMS, deriv)
        val[right], err[right] = v, e
        if deriv:
            dval[right] = d
    if left.any():
        sl = s[left]
        if chi.is_primitive:
            v, d, e = _reflect(chi, sl, deriv)
        else:
            star = chi.primitive
            sv, sd, se = _route(star, sl, deriv, left_edge=left_edge)
            fv, fd = euler_factor(star, q, sl, deriv)
            v, e = sv * fv, se * np.abs(fv)
            d = sd * fv + sv * fd if deriv else None
        val[left], err[left] = v, e
        if deriv:
            dval[left] = d
    return val, dval, err


@lru_cache(maxsize=1)
def _zeta_char() -> DirichletCharacter:
    from .characters import character

    return character(1, 1)


def eval_many(
    chi: DirichletCharacter,
    s,
    derivative: bool = False,
    method: str = "auto",
    left_edge: float = LEFT_EDGE,
):
    """Vectorized L(s; chi) over an array of points.

    Returns ``(values, derivatives_or_None, est_errors)`` with the shape of s.
    ``method`` is "auto" (routing as described in the module docstring) or
    "em" (force the Euler-Maclaurin route everywhere).  Under "auto", points
    with Re s < ``left_edge`` are reflected; raising it toward 1/2 trades
    independence from the functional equation for accuracy near Re s = -2.
    """
    s = np.asarray(s, dtype=np.complex128)
    shape = s.shape
    flat = s.ravel()
    _check_pole(chi, flat)
    v, d, e = _route(chi, flat, derivative, method, left_edge=left_edge)
    return v.reshape(shape), (d.reshape(shape) if derivative else None), e.reshape(shape)


def eval(chi: DirichletCharacter, s, method: str = "auto", N: int | None = None) -> EvalResult:
    """L(s; chi) anywhere in the plane (PoleAtOne at s = 1 for principal chi).

    ``method``: "auto", "em" (Euler-Maclaurin on the Hurwitz decomposition),
    "series" or "euler" (both require Re s > 1).
    """
    s = _as_complex(s)
    if method == "series":
        return eval_series(chi, s, 100_000)
    if method == "euler":
        return eval_euler(chi, s, 100_000)
    arr = np.array([s])
    _check_pole(chi, arr)
    v, _, e = _route(chi, arr, False, method, N)
    if method == "em" or (not (chi.is_principal and chi.modulus > 1) and s.real >= LEFT_EDGE):
        tag = "euler_maclaurin"
    else:
        tag = "factorization"
    return EvalResult(complex(v[0]), float(e[0]), tag)


def eval_derivative(chi: DirichletCharacter, s, method: str = "auto") -> EvalResult:
    """L'(s; chi) by term-wise differentiation of the same expansions."""
    s = _as_complex(s)
    if method == "series":
        return _series(chi, s, 100_000, log_weight=True)
    arr = np.array([s])
    _check_pole(chi, arr)
    _, d, e = _route(chi, arr, True, "em" if method == "em" else "auto")
    # derivative error scales like the value error times a log factor
    return EvalResult(complex(d[0]), float(e[0]) * (1.0 + math.log(2.0 + abs(s))), "euler_maclaurin")


def _series(chi: DirichletCharacter, s: complex, terms: int, log_weight: bool = False) -> EvalResult:
    if s.real <= 1.0:
        raise ValueError(f"Dirichlet series needs Re s > 1, got {s}")
    if terms < 1:
        raise ValueError("terms must be positive")
    q = chi.modulus
    total = 0j
    mag = 0.0
    step = 1 << 20
    for lo in range(1, terms + 1, step):
        n = np.arange(lo, min(terms, lo + step - 1) + 1)
        w = chi.values[n % q]
        logn = np.log(n.astype(float))
        t = w * np.exp(-s * logn)
        if log_weight:
            t = -t * logn
        total += t.sum()
        mag += np.abs(t).sum()
    sig = s.real
    tail = terms ** (1.0 - sig) / (sig - 1.0)
    if log_weight:
        # int_T^inf x^{-sig} log x dx
        tail *= math.log(terms) + 1.0 / (sig - 1.0)
    return EvalResult(complex(total), float(tail + 4 * EPS * mag), "series")


def eval_series(chi: DirichletCharacter, s, terms: int) -> EvalResult:
    """Partial sum of sum_n chi(n) n^{-s} with the integral tail bound as error."""
    return _series(chi, _as_complex(s), terms)


@lru_cache(maxsize=8)
def _primes_upto(n: int) -> np.ndarray:
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(n**0.5) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.nonzero(sieve)[0]


def eval_euler(chi: DirichletCharacter, s, prime_bound: int) -> EvalResult:
    """Truncated Euler product over primes p <= prime_bound."""
    s = _as_complex(s)
    if s.real <= 1.0:
        raise ValueError(f"Euler product needs Re s > 1, got {s}")
    p = _primes_upto(int(prime_bound))
    if p.size == 0:
        return EvalResult(1 + 0j, float(_euler_tail(1, s.real)), "euler_product")
    x = chi.values[p % chi.modulus] * np.exp(-s * np.log(p.astype(float)))
    log_val = -np.sum(np.log1p(-x))
    val = complex(np.exp(log_val))
    bound = _euler_tail(int(prime_bound), s.real)
    err = abs(val) * math.expm1(bound) + 4 * EPS * p.size * abs(val)
    return EvalResult(val, float(err), "euler_product")


def _euler_tail(P: int, sig: float) -> float:
    # sum_{n > P} n^{-sig} <= P^{-sig} + int_P^inf x^{-sig} dx
    return P ** (-sig) + P ** (1.0 - sig) / (sig - 1.0)


def hurwitz_zeta(s, a: float, N: int | None = None) -> EvalResult:
    """zeta(s, a) for 0 < a <= 1 by Euler-Maclaurin summation."""
    s = _as_complex(s)
    if not 0.0 < a <= 1.0:
        raise ValueError(f"shift a must lie in (0, 1], got {a}")
    if abs(s - 1.0) < _POLE_TOL:
        raise PoleAtOne("zeta(s, a) has a simple pole at s = 1")
    M = BERNOULLI_TERMS
    if N is None:
        N = default_cutoff(abs(s.imag))
    n = np.arange(N) + a
    terms = np.exp(-s * np.log(n))
    x = N + a
    head = terms.sum()
    val = head + x ** (1.0 - s) / (s - 1.0) + 0.5 * x ** (-s)
    coeffs = _bernoulli_coeffs(M + 1)
    poch = s
    for k in range(1, M + 1):
        val += coeffs[k - 1] * poch * x ** (-s - 2 * k + 1)
        poch *= (s + 2 * k - 1) * (s + 2 * k)
    nxt = abs(coeffs[M] * poch * x ** (-s - 2 * M - 1))
    sig = s.real + 2 * M + 1
    fac = max(1.0, abs(s + 2 * M + 1) / sig) if sig > 0 else math.inf
    err = nxt * fac + 8 * EPS * float(np.abs(terms).sum())
    return EvalResult(complex(val), float(err), "euler_maclaurin")


def functional_equation_check(chi: DirichletCharacter, s) -> FunctionalEquationReport:
    """Compare L(s; chi) with the right side of the asymmetric functional equation."""
    if chi.modulus == 1 or not chi.is_primitive:
        raise NotPrimitive(f"{chi.label()} is not primitive with q > 1")
    s = _as_complex(s)
    lhs = eval(chi, s).value
    other = eval(conjugate(chi), 1.0 - s).value
    eps = epsilon(chi)
    arr = np.array([s])
    if s.real >= 0.5:
        # Gamma(1-s) sin(pi(s+kappa)/2) = pi / (2 Gamma(s) cos(pi s/2))      (kappa = 0)
        #                               = pi / (2 Gamma(s) sin(pi s/2))      (kappa = 1)
        trig = np.pi / 2 * arr + (0.0 if chi.parity else np.pi / 2)
        logf = (
            arr * math.log(2.0)
            + (arr - 1.0) * math.log(math.pi)
            + (0.5 - arr) * math.log(chi.modulus)
            + math.log(math.pi / 2)
            - _special.loggamma(arr)
            - _special.log_sin(trig)
        )
    else:
        logf = _fe_log_factor(chi, arr)
    rhs = complex(eps * other * np.exp(logf[0]))
    return FunctionalEquationReport(s, lhs, rhs, abs(lhs - rhs), eps, chi.parity)


def conjugation_check(chi: DirichletCharacter, s) -> float:
    """|L(conj s; chi) - conj L(s; conj chi)|."""
    s = _as_complex(s)
    a = eval(chi, s.conjugate()).value
    b = eval(conjugate(chi), s).value
    return abs(a - b.conjugate())
