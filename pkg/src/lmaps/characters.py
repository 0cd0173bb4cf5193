"""Dirichlet characters modulo q.

Characters are stored as tables of exact root-of-unity exponents: the value
at n is ``exp(2*pi*i*k/order)`` with ``k = exponents[n]``, or 0 when
``exponents[n] == -1`` (n not coprime to q).  Products and conjugates are
therefore exact integer arithmetic on the exponents.

The canonical labelling decomposes (Z/qZ)* into cyclic factors through the
CRT, using the smallest primitive root for each odd prime power and the pair
{-1, 5} for 2^k with k >= 3.  Characters are ordered lexicographically by
their exponent vector on those generators; index 1 is the principal
character.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np

__all__ = [
    "DirichletCharacter",
    "enumerate_characters",
    "character",
    "value",
    "conductor",
    "is_primitive",
    "primitive_character",
    "gauss_sum",
    "conjugate",
    "induce",
    "factorize",
    "totient",
    "root_of_unity",
]


def factorize(n: int) -> dict[int, int]:
    """Prime factorization by trial division, ``{p: e}`` in increasing p."""
    if n < 1:
        raise ValueError(f"cannot factor {n}")
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def totient(n: int) -> int:
    phi = n
    for p in factorize(n):
        phi -= phi // p
    return phi


def root_of_unity(k: int, m: int) -> complex:
    """exp(2 pi i k / m), exact for the real and purely imaginary cases.

    The exponent is reduced into (-m/2, m/2] so that k and -k give values
    that are exact complex conjugates of each other.
    """
    g = math.gcd(k, m)
    k, m = k // g, m // g
    k %= m
    if m == 1:
        return 1 + 0j
    if m == 2:
        return -1 + 0j
    if m == 4:
        return 1j if k == 1 else -1j
    if 2 * k > m:
        k -= m
    theta = 2.0 * math.pi * k / m
    return complex(math.cos(theta), math.sin(theta))


def _smallest_primitive_root(pe: int, p: int) -> int:
    phi = pe // p * (p - 1)
    ells = list(factorize(phi))
    for g in range(2, pe):
        if g % p == 0:
            continue
        if all(pow(g, phi // ell, pe) != 1 for ell in ells):
            return g
    raise AssertionError(f"no primitive root mod {pe}")


@dataclass(frozen=True)
class _Group:
    """Cyclic decomposition of (Z/qZ)* with a discrete-log table."""

    modulus: int
    generators: tuple[int, ...]
    orders: tuple[int, ...]
    exponent: int  # lcm of the orders
    logs: np.ndarray  # shape (q, r); row n holds the log vector of n, -1 if gcd(n, q) > 1


def _crt_lift(residue: int, pe: int, q: int) -> int:
    """The unit that is ``residue`` mod ``pe`` and 1 mod ``q // pe``."""
    rest = q // pe
    if rest == 1:
        return residue % q
    # x = residue + pe * y with x = 1 (mod rest)
    y = ((1 - residue) * pow(pe, -1, rest)) % rest
    return (residue + pe * y) % q


@lru_cache(maxsize=256)
def _group(q: int) -> _Group:
    gens: list[int] = []
    orders: list[int] = []
    for p, e in factorize(q).items():
        pe = p**e
        if p == 2:
            if e == 1:
                continue
            gens.append(_crt_lift(pe - 1, pe, q))
            orders.append(2)
            if e >= 3:
                gens.append(_crt_lift(5, pe, q))
                orders.append(pe // 4)
        else:
            gens.append(_crt_lift(_smallest_primitive_root(pe, p), pe, q))
            orders.append(pe // p * (p - 1))
    r = len(gens)
    logs = np.full((q, max(r, 1)), -1, dtype=np.int64)
    # walk every exponent vector; the map is a bijection onto the units
    for vec in itertools.product(*(range(o) for o in orders)):
        n = 1 % q
        for g, k in zip(gens, vec):
            n = n * pow(g, k, q) % q
        logs[n, :r] = vec
        if r == 0:
            logs[n, 0] = 0
    exponent = math.lcm(*orders) if orders else 1
    return _Group(q, tuple(gens), tuple(orders), exponent, logs)


@dataclass(frozen=True, eq=False)
class DirichletCharacter:
    """A Dirichlet character mod ``modulus`` held as an exponent table.

    ``exponents[n]`` is k with chi(n) = exp(2 pi i k / order), or -1 where
    chi(n) = 0.  ``index`` is the 1-based canonical label.
    """

    modulus: int
    index: int
    order: int
    exponents: tuple[int, ...] = field(repr=False)

    def __post_init__(self):
        if len(self.exponents) != self.modulus:
            raise ValueError("exponent table length must equal the modulus")

    @cached_property
    def values(self) -> np.ndarray:
        """Complex value table on residues 0..q-1."""
        return np.array(
            [0j if k < 0 else root_of_unity(k, self.order) for k in self.exponents],
            dtype=np.complex128,
        )

    def __call__(self, n: int) -> complex:
        return complex(self.values[n % self.modulus])

    def __eq__(self, other):
        if not isinstance(other, DirichletCharacter):
            return NotImplemented
        return self.modulus == other.modulus and self.reduced_exponents == other.reduced_exponents

    def __hash__(self):
        return hash((self.modulus, self.reduced_exponents))

    @cached_property
    def reduced_exponents(self) -> tuple[tuple[int, int], ...]:
        """Exponents as reduced fractions (k, m), for order-independent comparison."""
        out = []
        for k in self.exponents:
            if k < 0:
                out.append((-1, 0))
            else:
                g = math.gcd(k, self.order)
                out.append(((k // g) % (self.order // g), self.order // g))
        return tuple(out)

    @property
    def is_principal(self) -> bool:
        return all(k <= 0 for k in self.exponents)

    @property
    def is_real(self) -> bool:
        return all(k < 0 or (2 * k) % self.order == 0 for k in self.exponents)

    @property
    def parity(self) -> int:
        """kappa: 0 if chi(-1) = 1, else 1."""
        k = self.exponents[(self.modulus - 1) % self.modulus]
        return 0 if k == 0 or (k > 0 and k % self.order == 0) else 1

    @cached_property
    def conductor(self) -> int:
        return _conductor(self)[0]

    @property
    def is_primitive(self) -> bool:
        return self.conductor == self.modulus

    @cached_property
    def primitive(self) -> DirichletCharacter:
        """The primitive character inducing this one."""
        return _conductor(self)[1]

    def label(self) -> str:
        return f"chi({self.modulus},{self.index})"

    def __repr__(self):
        return f"DirichletCharacter(modulus={self.modulus}, index={self.index})"


def _make(q: int, group: _Group, vec: tuple[int, ...], index: int) -> DirichletCharacter:
    m = group.exponent
    scale = [m // o for o in group.orders]
    exps = []
    for n in range(q):
        row = group.logs[n]
        if row[0] < 0:
            exps.append(-1)
        else:
            exps.append(sum(int(k) * int(l) * s for k, l, s in zip(vec, row, scale)) % m)
    return DirichletCharacter(q, index, m, tuple(exps))


@lru_cache(maxsize=256)
def enumerate_characters(q: int) -> tuple[DirichletCharacter, ...]:
    """All phi(q) characters mod q in canonical order (index 1 = principal)."""
    if q < 1:
        raise ValueError(f"modulus must be positive, got {q}")
    group = _group(q)
    vecs = itertools.product(*(range(o) for o in group.orders))
    return tuple(_make(q, group, vec, j + 1) for j, vec in enumerate(vecs))


def character(q: int, index: int) -> DirichletCharacter:
    chars = enumerate_characters(q)
    if not 1 <= index <= len(chars):
        raise ValueError(f"index must be in 1..{len(chars)} for modulus {q}, got {index}")
    return chars[index - 1]


def value(chi: DirichletCharacter, n: int) -> complex:
    return chi(n)


def _lookup(q: int, order: int, exps) -> DirichletCharacter:
    probe = DirichletCharacter(q, 0, order, tuple(exps))
    for c in enumerate_characters(q):
        if c == probe:
            return c
    raise ValueError("exponent table is not a Dirichlet character mod %d" % q)


def _restrict(chi: DirichletCharacter, d: int):
    """Exponent table of the character mod d inducing chi, or None."""
    q = chi.modulus
    exps = [-1] * d
    for n in range(q):
        k = chi.exponents[n]
        if k < 0:
            continue
        r = n % d
        if exps[r] == -1:
            exps[r] = k
        elif exps[r] != k:
            return None
    # residues coprime to d but hit by no unit mod q cannot occur (CRT)
    return exps


@lru_cache(maxsize=4096)
def _conductor(chi: DirichletCharacter) -> tuple[int, DirichletCharacter]:
    q = chi.modulus
    for d in sorted(d for d in range(1, q + 1) if q % d == 0):
        exps = _restrict(chi, d)
        if exps is None:
            continue
        star = _lookup(d, chi.order, exps) if d < q else chi
        if induce(star, q) == chi:
            return d, star
    raise AssertionError("every character is induced by itself")


def conductor(chi: DirichletCharacter) -> int:
    return chi.conductor


def is_primitive(chi: DirichletCharacter) -> bool:
    return chi.is_primitive


def primitive_character(chi: DirichletCharacter) -> DirichletCharacter:
    return chi.primitive


def gauss_sum(chi: DirichletCharacter) -> complex:
    """tau(chi) = sum_{a=1}^{q} chi(a) exp(2 pi i a / q)."""
    q = chi.modulus
    total = 0j
    for a in range(1, q + 1):
        k = chi.exponents[a % q]
        if k >= 0:
            total += root_of_unity(k, chi.order) * cmath.exp(2j * math.pi * a / q)
    return total


def conjugate(chi: DirichletCharacter) -> DirichletCharacter:
    exps = [k if k < 0 else (-k) % chi.order for k in chi.exponents]
    return _lookup(chi.modulus, chi.order, exps)


def induce(chi_star: DirichletCharacter, q: int) -> DirichletCharacter:
    """The character mod q agreeing with ``chi_star`` on integers coprime to q."""
    d = chi_star.modulus
    if q < 1 or q % d:
        raise ValueError(f"cannot induce a character mod {d} to modulus {q}")
    exps = [
        -1 if math.gcd(n, q) > 1 else chi_star.exponents[n % d]
        for n in range(q)
    ]
    return _lookup(q, chi_star.order, exps)
