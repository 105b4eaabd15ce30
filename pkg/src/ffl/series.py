"""Exact truncated power series in u, where u^n tracks polynomial degree n.

These back the bulk degree-indexed sums (2^omega weights, divisor counts,
1/phi sums) through the same Euler products the derivations use; brute
enumeration over actual polynomials stays the independent oracle in tests.
Coefficients are ints or Fractions, never floats.
"""

from fractions import Fraction
from functools import lru_cache
from math import comb

from .polyring import count_primes_exact


@lru_cache(maxsize=None)
def prime_counts(q: int, maxdeg: int):
    """pi_q(d) for d = 0..maxdeg (index 0 is 0)."""
    return (0,) + tuple(count_primes_exact(q, d) for d in range(1, maxdeg + 1))


def series_mul(a, b, L: int):
    out = [0] * (L + 1)
    for i, ai in enumerate(a):
        if i > L:
            break
        if not ai:
            continue
        top = min(len(b) - 1, L - i)
        for j in range(top + 1):
            bj = b[j]
            if bj:
                out[i + j] += ai * bj
    return out


def series_pow(f, m: int, L: int):
    """f(u)^m for m >= 0 by binary exponentiation."""
    result = [1] + [0] * L
    base = list(f[:L + 1]) + [0] * max(0, L + 1 - len(f))
    while m:
        if m & 1:
            result = series_mul(result, base, L)
        base = series_mul(base, base, L)
        m >>= 1
    return result


def binomial_factor(d: int, m: int, L: int, plus: bool):
    """(1 + u^d)^m if plus else (1 - u^d)^m, for any integer m."""
    out = [0] * (L + 1)
    if m >= 0:
        for k in range(0, L // d + 1):
            if k > m:
                break
            c = comb(m, k)
            if not plus:
                c = -c if k % 2 else c
            out[d * k] = c
    else:
        n = -m
        for k in range(0, L // d + 1):
            c = comb(n + k - 1, k)
            if plus:
                c = -c if k % 2 else c
            out[d * k] = c
    return out


def monic_count_series(q: int, L: int, exclude_degs=()):
    """Counts per degree of monic polynomials coprime to fixed primes of the given degrees."""
    out = [1] + [q ** n for n in range(1, L + 1)]
    for d in exclude_degs:
        out = series_mul(out, binomial_factor(d, 1, L, plus=False), L)
    return out


def two_omega_series(q: int, L: int, exclude_degs=()):
    """Sum over monic N of 2^omega(N) per degree, optionally coprime to given primes."""
    out = [1] + [0] * L
    for d in range(1, L + 1):
        pi = prime_counts(q, L)[d]
        if pi:
            f = series_mul(binomial_factor(d, pi, L, plus=True),
                           binomial_factor(d, -pi, L, plus=False), L)
            out = series_mul(out, f, L)
    for d in exclude_degs:
        f = series_mul(binomial_factor(d, 1, L, plus=False),
                       inverse_one_plus(d, L), L)
        out = series_mul(out, f, L)
    return out


def inverse_one_plus(d: int, L: int):
    """(1 + u^d)^{-1}."""
    return binomial_factor(d, -1, L, plus=True)


def divisor_count_series(q: int, L: int, smooth_bound=None, exclude_degs=()):
    """Sum over monic N of d(N) per degree, optionally restricted to p_+(N) <= smooth_bound."""
    out = [1] + [0] * L
    top = L if smooth_bound is None else min(L, smooth_bound)
    for d in range(1, top + 1):
        pi = prime_counts(q, L)[d]
        if pi:
            out = series_mul(out, binomial_factor(d, -2 * pi, L, plus=False), L)
    for d in exclude_degs:
        out = series_mul(out, binomial_factor(d, 2, L, plus=False), L)
    return out


def smooth_count_series(q: int, L: int, smooth_bound: int):
    """Counts per degree of monic N with every prime factor of degree <= smooth_bound."""
    out = [1] + [0] * L
    for d in range(1, min(L, smooth_bound) + 1):
        pi = prime_counts(q, L)[d]
        if pi:
            out = series_mul(out, binomial_factor(d, -pi, L, plus=False), L)
    return out


def inv_phi_series(q: int, L: int):
    """Sum over monic N of 1/phi(N) per degree (Fraction coefficients)."""
    out = [Fraction(1)] + [Fraction(0)] * L
    for d in range(1, L + 1):
        pi = prime_counts(q, L)[d]
        if not pi:
            continue
        # 1 + sum_e u^{de}/phi(P^e), phi(P^e) = q^{d(e-1)}(q^d - 1)
        f = [Fraction(0)] * (L + 1)
        f[0] = Fraction(1)
        qd = q ** d
        for e in range(1, L // d + 1):
            f[d * e] = Fraction(1, qd ** (e - 1) * (qd - 1))
        out = series_mul(out, series_pow(f, pi, L), L)
    return out


def musq_phi_series(q: int, L: int):
    """Sum over monic square-free N of 1/phi(N) per degree (Fraction coefficients)."""
    out = [Fraction(1)] + [Fraction(0)] * L
    for d in range(1, L + 1):
        pi = prime_counts(q, L)[d]
        if not pi:
            continue
        f = [Fraction(0)] * (L + 1)
        f[0] = Fraction(1)
        if d <= L:
            f[d] = Fraction(1, q ** d - 1)
        out = series_mul(out, series_pow(f, pi, L), L)
    return out


def partial_value_at_inv_q(coeffs, q: int, lo: int = 0, hi: int = None) -> Fraction:
    """sum_{n=lo}^{hi} coeffs[n] q^{-n}, exact."""
    hi = len(coeffs) - 1 if hi is None else min(hi, len(coeffs) - 1)
    total = Fraction(0)
    for n in range(lo, hi + 1):
        c = coeffs[n]
        if c:
            total += Fraction(c, 1) / q ** n
    return total


def partial_sum(coeffs, lo: int = 0, hi: int = None) -> Fraction:
    """Plain coefficient sum, for series whose coefficients already carry 1/|N| weights."""
    hi = len(coeffs) - 1 if hi is None else min(hi, len(coeffs) - 1)
    return sum((coeffs[n] for n in range(lo, hi + 1)), Fraction(0))
