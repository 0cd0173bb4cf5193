"""Complex gamma-family helpers and Bernoulli numbers, vectorized over numpy arrays."""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

LOG_2PI_HALF = 0.5 * math.log(2.0 * math.pi)

# Lanczos approximation, g = 7, n = 9
_LANCZOS_G = 7.0
_LANCZOS = np.array(
    [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ]
)


@lru_cache(maxsize=None)
def bernoulli_even(count: int) -> tuple[Fraction, ...]:
    """B_2, B_4, ..., B_{2*count} as exact fractions."""
    n_max = 2 * count
    b = [Fraction(0)] * (n_max + 1)
    b[0] = Fraction(1)
    for m in range(1, n_max + 1):
        b[m] = -sum(math.comb(m + 1, k) * b[k] for k in range(m)) / (m + 1)
    return tuple(b[2 * k] for k in range(1, count + 1))


def log_sin(z):
    """A logarithm of sin(z) that stays finite for large |Im z|.

    The branch is arbitrary; only exp(log_sin(z)) is meaningful.
    """
    z = np.asarray(z, dtype=np.complex128)
    upper = z.imag >= 0
    w = np.where(upper, z, np.conj(z))
    # sin w = (i/2) e^{-iw} (1 - e^{2iw}); |e^{2iw}| <= 1 for Im w >= 0
    with np.errstate(divide="ignore"):  # exact zeros of sin give -inf, exp() maps back to 0
        out = np.log(0.5j) - 1j * w + np.log(-np.expm1(2j * w))
    return np.where(upper, out, np.conj(out))


def _loggamma_right(z):
    """Lanczos log-gamma for Re z >= 1/2."""
    zm = z - 1.0
    x = np.full_like(zm, _LANCZOS[0])
    for k in range(1, len(_LANCZOS)):
        x = x + _LANCZOS[k] / (zm + k)
    t = zm + _LANCZOS_G + 0.5
    return LOG_2PI_HALF + (zm + 0.5) * np.log(t) - t + np.log(x)


def loggamma(z):
    """log Gamma(z) for complex z via Lanczos plus reflection (branch arbitrary)."""
    z = np.asarray(z, dtype=np.complex128)
    left = z.real < 0.5
    zr = np.where(left, 1.0 - z, z)
    right = _loggamma_right(zr)
    if not left.any():
        return right
    refl = math.log(math.pi) - log_sin(math.pi * z) - right
    return np.where(left, refl, right)


def gamma(z):
    return np.exp(loggamma(z))


def digamma(z):
    """psi(z) by upward recurrence and the asymptotic series, reflection for Re z < 1/2."""
    z = np.asarray(z, dtype=np.complex128)
    left = z.real < 0.5
    w = np.where(left, 1.0 - z, z)
    acc = np.zeros_like(w)
    shift = np.maximum(0, np.ceil(12.0 - w.real)).astype(int)
    for k in range(int(shift.max()) if shift.size else 0):
        active = shift > k
        acc = acc - np.where(active, 1.0 / (w + k), 0.0)
    w = w + shift
    inv2 = 1.0 / (w * w)
    series = np.zeros_like(w)
    for k, b in enumerate(bernoulli_even(8), start=1):
        series = series + float(b) / (2 * k) * inv2**k
    psi = acc + np.log(w) - 0.5 / w - series
    if not left.any():
        return psi
    refl = psi - math.pi / np.tan(math.pi * z)
    return np.where(left, refl, psi)
