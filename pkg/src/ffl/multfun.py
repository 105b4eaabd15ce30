"""Arithmetic functions on F_q[T]: mu, phi, phi*, omega, Omega, rad, d, p_+/-,
square-full/-free predicates, primorials, divisor enumeration, growth probes."""

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import PreconditionError
from .gf import FieldSpec
from .polyring import (Factorization, Poly, constant, enumerate_primes, factor,
                       one as poly_one)

EULER_GAMMA = 0.5772156649015329


def _fact(a: Poly) -> Factorization:
    if a.is_zero():
        raise PreconditionError("arithmetic functions are undefined at 0")
    return factor(a)


def mu(a: Poly) -> int:
    f = _fact(a)
    if any(e > 1 for _, e in f):
        return 0
    return -1 if len(f) % 2 else 1


def omega(a: Poly) -> int:
    return len(_fact(a))


def big_omega(a: Poly) -> int:
    return sum(e for _, e in _fact(a))


def radical(a: Poly) -> Poly:
    out = poly_one(a.field)
    for p, _ in _fact(a):
        out = out * p
    return out


def divisor_count(a: Poly) -> int:
    out = 1
    for _, e in _fact(a):
        out *= e + 1
    return out


def phi_prime_power(q: int, d: int, e: int) -> int:
    """phi(P^e) for a prime of degree d."""
    return q ** (d * (e - 1)) * (q ** d - 1)


def phi(a: Poly) -> int:
    """Euler phi via the product formula |R| prod(1 - |P|^-1); phi(constant) = 1."""
    q = a.field.q
    out = 1
    for p, e in _fact(a):
        out *= phi_prime_power(q, p.deg, e)
    return out


def phi_count_oracle(a: Poly) -> int:
    """Counting definition of phi, used as a test oracle at small degree."""
    from .polyring import poly_gcd, from_code
    if a.deg == 0:
        return 1
    q = a.field.q
    n = 0
    for code in range(q ** a.deg):
        b = from_code(a.field, code)
        if b.is_zero():
            continue
        if poly_gcd(a, b).deg == 0:
            n += 1
    return n


def phi_star(a: Poly) -> int:
    """Number of primitive characters mod a: sum over EF = a of mu(E) phi(F)."""
    if not a.is_monic():
        raise PreconditionError("phi* is defined for monic moduli")
    total = 0
    for e_poly in divisors(a):
        m = mu(e_poly) if not e_poly.is_one() else 1
        if m:
            total += m * phi(a // e_poly)
    return total


def p_minus(a: Poly) -> int:
    f = _fact(a)
    if a.deg < 1:
        raise PreconditionError("p_- needs degree >= 1")
    return min(p.deg for p, _ in f)


def p_plus(a: Poly) -> int:
    f = _fact(a)
    if a.deg < 1:
        raise PreconditionError("p_+ needs degree >= 1")
    return max(p.deg for p, _ in f)


def is_squarefull(a: Poly) -> bool:
    return all(e >= 2 for _, e in _fact(a))


def is_squarefree(a: Poly) -> bool:
    return all(e == 1 for _, e in _fact(a))


def divisors(a: Poly):
    """All monic divisors in canonical order; length equals d(a)."""
    f = _fact(a)
    out = [poly_one(a.field)]
    for p, e in f:
        powers = [p ** k for k in range(e + 1)]
        out = [d * pk for d in out for pk in powers]
    return sorted(out, key=lambda d: d.sort_key())


@dataclass(frozen=True)
class Primorial:
    """Product of the first n monic irreducibles in (degree, code) order."""
    n: int
    value: Poly
    m: int        # largest degree whose primes are all included
    r: int        # count of degree-(m+1) primes used
    primes: tuple

    @property
    def deg(self) -> int:
        return self.value.deg


def primorial(field: FieldSpec, n: int) -> Primorial:
    from .errors import BudgetError
    from .polyring import max_table_entries
    if n < 1:
        raise PreconditionError("primorial index must be >= 1")
    taken = []
    d = 0
    while len(taken) < n:
        d += 1
        if field.q ** d > max_table_entries():
            raise BudgetError(f"primorial index {n} needs primes of degree {d}, "
                              "beyond the table budget")
        for p in enumerate_primes(field, d):
            taken.append(p)
            if len(taken) == n:
                break
    last_deg = taken[-1].deg
    full_count = sum(1 for p in taken if p.deg < last_deg)
    r = n - full_count
    if r == len(enumerate_primes(field, last_deg)):
        m, r = last_deg, 0
    else:
        m = last_deg - 1
    value = constant(field, 1)
    for p in taken:
        value = value * p
    return Primorial(n=n, value=value, m=m, r=r, primes=tuple(taken))


GROWTH_KINDS = ("omega_primorial", "phi_lower", "phi_star_ratio")


def growth_probe(field: FieldSpec, kind: str, n_range):
    """Ratio of the exact quantity to the growth law's main term, per primorial index.

    No assertion is made beyond finiteness; trends are inspected downstream.
    """
    if kind not in GROWTH_KINDS:
        raise PreconditionError(f"unknown growth probe kind {kind!r}")
    q = field.q
    rows = []
    for n in n_range:
        R = primorial(field, n)
        deg = R.deg
        loglog = math.log(deg, q) if deg > 1 else 0.0
        if kind == "omega_primorial":
            value = float(n)
            main = deg / loglog if loglog > 0 else float("inf")
        elif kind == "phi_lower":
            # phi(R)/|R| without big-integer blowup
            dens = 1.0
            for p in R.primes:
                dens *= 1.0 - q ** (-p.deg)
            value = dens
            main = math.exp(-EULER_GAMMA) / loglog if loglog > 0 else float("inf")
        else:
            ratio_ps = 1.0
            for p in R.primes:
                ratio_ps *= (q ** p.deg - 2) / (q ** p.deg - 1)
            value = ratio_ps
            main = math.exp(-EULER_GAMMA) / loglog if loglog > 0 else float("inf")
        ratio = value / main if main not in (0.0, float("inf")) else 0.0
        rows.append({"kind": kind, "n": n, "deg": deg, "m": R.m, "r": R.r,
                     "value": value, "main": main, "ratio": ratio})
    return rows


# -- exact divisor-sum identities (shared by tests and probes) --------------

def mu_sum_over_divisors(R: Poly, s: int) -> Fraction:
    """sum_{E | R} mu(E) / |E|^s, exact."""
    total = Fraction(0)
    for e_poly in divisors(R):
        m = mu(e_poly)
        if m:
            total += Fraction(m, e_poly.norm() ** s if not e_poly.is_zero() else 1)
    return total


def mu_deg_sum_over_divisors(R: Poly, s: int) -> Fraction:
    """sum_{E | R} mu(E) deg(E) / |E|^s, exact."""
    total = Fraction(0)
    for e_poly in divisors(R):
        m = mu(e_poly)
        if m and e_poly.deg > 0:
            total += Fraction(m * e_poly.deg, e_poly.norm() ** s)
    return total
