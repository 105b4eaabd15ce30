"""The unit group (F_q[T]/R)^*, Dirichlet characters, primitivity, and the
Mobius-weighted sum over primitive character pairs.

Generators come from greedy extraction: repeatedly take the canonically
smallest unit of maximal order in the quotient of what is already generated,
then adjust it by known generators so its absolute order equals its quotient
order.  That adjustment is what makes the discrete-log map additive, which
every character evaluation here relies on.
"""

import itertools
from functools import lru_cache
from math import gcd as igcd, lcm as ilcm, tau as TWO_PI

import numpy as np

from .errors import BudgetError, PreconditionError
from .gf import FieldSpec
from .multfun import divisors, mu, phi
from .polyring import Poly, from_code, poly_gcd, t_gen

DEFAULT_GROUP_BUDGET = 10 ** 6


def _prime_factorization_int(n: int):
    out = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _mulmod_factory(field: FieldSpec, R: Poly):
    """Residue multiplication on integer codes mod R."""
    q = field.q
    rdeg = R.deg
    if rdeg == 0:
        return lambda a, b: 0
    if q == 2:
        rcode = R.code

        def mm2(a, b):
            r = 0
            while a:
                if a & 1:
                    r ^= b
                a >>= 1
                b <<= 1
            bl = r.bit_length()
            while bl > rdeg:
                r ^= rcode << (bl - 1 - rdeg)
                bl = r.bit_length()
            return r
        return mm2
    if field.e == 1:
        p = q
        # slot width must hold convolution digit sums <= rdeg (p-1)^2
        shift = max(9, (rdeg * (p - 1) ** 2).bit_length() + 1)
        mask = (1 << shift) - 1
        # T^k mod R for k = rdeg .. 2rdeg-2, as digit tuples
        red = {}
        powk = (t_gen(field) ** rdeg) % R
        for k in range(rdeg, 2 * rdeg - 1):
            red[k] = tuple(powk.coeffs[i] if i <= powk.deg else 0 for i in range(rdeg))
            powk = (powk.shift(1)) % R
        pack_cache = {}

        def pack(c):
            v = pack_cache.get(c)
            if v is None:
                x, v, s = c, 0, 0
                while x:
                    v |= (x % p) << s
                    x //= p
                    s += shift
                pack_cache[c] = v
            return v

        def mmp(a, b):
            prod = pack(a) * pack(b)
            digits = []
            while prod:
                digits.append((prod & mask) % p)
                prod >>= shift
            for k in range(len(digits) - 1, rdeg - 1, -1):
                c = digits[k]
                if c:
                    row = red[k]
                    for i in range(rdeg):
                        ri = row[i]
                        if ri:
                            digits[i] = (digits[i] + c * ri) % p
                digits[k] = 0
            code = 0
            for d in reversed(digits[:rdeg]):
                code = code * q + d
            return code
        return mmp

    def mm_generic(a, b):
        return ((from_code(field, a) * from_code(field, b)) % R).code
    return mm_generic


class UnitGroup:
    """(F_q[T]/R)^* with canonical unit order, generator basis and additive dlog."""

    def __init__(self, R: Poly, budget: int = None):
        if not R.is_monic():
            raise PreconditionError("modulus must be monic")
        field = R.field
        self.field = field
        self.modulus = R
        self.phi = phi(R)
        limit = budget if budget is not None else DEFAULT_GROUP_BUDGET
        if self.phi > limit:
            raise BudgetError(f"unit group of size {self.phi} exceeds budget {limit}")
        self.mulmod = _mulmod_factory(field, R)
        q = field.q
        if R.deg == 0:
            self.unit_codes = (0,)
            self.identity = 0
        else:
            from .polyring import code_mul_fn, factor
            marked = bytearray(q ** R.deg)
            cmul = code_mul_fn(field)
            for P, _ in factor(R):
                pc = P.code
                for mcode in range(q ** (R.deg - P.deg)):
                    marked[cmul(mcode, pc)] = 1
            self.unit_codes = tuple(c for c in range(1, q ** R.deg) if not marked[c])
            self.identity = 1
        assert len(self.unit_codes) == self.phi
        self.index_of = {c: i for i, c in enumerate(self.unit_codes)}
        if (field.e == 1 or field.p == 2) and self.phi > 64 and R.deg >= 1:
            self._build_basis_vector()
        else:
            self._build_basis_scalar()
        self.lcm_order = ilcm(*self.orders) if self.orders else 1
        self._kernel_cache = {}

    # -- group plumbing ---------------------------------------------------

    def powmod(self, a: int, k: int) -> int:
        if k < 0:
            raise PreconditionError("negative exponent; use invmod")
        result = self.identity
        base = a
        while k:
            if k & 1:
                result = self.mulmod(result, base)
            base = self.mulmod(base, base)
            k >>= 1
        return result

    def _adjust_generator(self, u: int, d: int, gens, orders, dlog) -> int:
        """Rescale the coset pick so its absolute order equals its quotient order d."""
        mm = self.mulmod
        cvec = dlog[self.powmod(u, d)]
        adjusted = u
        for j, (gj, dj) in enumerate(zip(gens, orders)):
            cj = cvec[j]
            if cj == 0:
                continue
            g = igcd(d, dj)
            assert cj % g == 0, "basis adjustment divisibility violated"
            tj = (cj // g) * pow(d // g, -1, dj // g) % (dj // g)
            if tj:
                adjusted = mm(adjusted, self.powmod(gj, dj - tj))
        assert self.powmod(adjusted, d) == self.identity
        return adjusted

    def _build_basis_scalar(self):
        mm = self.mulmod
        exp_primes = sorted(_prime_factorization_int(self.phi)) if self.phi > 1 else []
        gens, orders = [], []
        dlog = {self.identity: ()}
        size = 1
        while size < self.phi:
            in_h = dlog.__contains__
            # exponent of the quotient group, one prime at a time
            m = self.phi
            powers = {}
            for ell in exp_primes:
                while m % ell == 0:
                    k = m // ell
                    pw = {u: self.powmod(u, k) for u in self.unit_codes}
                    if all(in_h(v) for v in pw.values()):
                        m = k
                        powers.clear()   # cached powers refer to the old m
                    else:
                        powers[ell] = pw
                        break
            # canonically smallest unit achieving quotient order m
            best = None
            for u in self.unit_codes:
                ok = True
                for ell in _prime_factorization_int(m):
                    pw = powers.get(ell)
                    v = pw[u] if pw is not None else self.powmod(u, m // ell)
                    if in_h(v):
                        ok = False
                        break
                if ok:
                    best = u
                    break
            assert best is not None
            adjusted = self._adjust_generator(best, m, gens, orders, dlog)
            new_dlog = {}
            for code, vec in dlog.items():
                x = code
                for e in range(m):
                    new_dlog[x] = vec + (e,)
                    x = mm(x, adjusted)
            dlog = new_dlog
            gens.append(adjusted)
            orders.append(m)
            size *= m
        self.gens = tuple(gens)
        self.orders = tuple(orders)
        self.dims = self.orders
        self.dlog = dlog

    def _build_basis_vector(self):
        """Same greedy construction, batched over all units with numpy.

        Prime fields use integer convolutions mod p; characteristic-2 extension
        fields use xor accumulation with a q x q multiplication table.
        """
        F, R = self.field, self.modulus
        q, rdeg = F.q, R.deg
        qpow = np.array([q ** i for i in range(rdeg)], dtype=np.int64)
        red_rows = {}
        powk = (t_gen(F) ** rdeg) % R
        for k in range(rdeg, 2 * rdeg - 1):
            red_rows[k] = np.array([powk.coeffs[i] if i <= powk.deg else 0
                                    for i in range(rdeg)], dtype=np.int64)
            powk = powk.shift(1) % R

        def digits_of(codes):
            out = np.empty((len(codes), rdeg), dtype=np.int64)
            c = np.asarray(codes, dtype=np.int64)
            for i in range(rdeg):
                out[:, i] = c % q
                c = c // q
            return out

        if F.e == 1:
            p = F.p

            def bulk_mul(A, B):
                m = A.shape[0]
                C = np.zeros((m, 2 * rdeg - 1), dtype=np.int64)
                for i in range(rdeg):
                    col = A[:, i]
                    C[:, i:i + rdeg] += col[:, None] * B
                C %= p
                for k in range(2 * rdeg - 2, rdeg - 1, -1):
                    ck = C[:, k]
                    row = red_rows[k]
                    C[:, :rdeg] += ck[:, None] * row[None, :]
                return C[:, :rdeg] % p
        else:
            mul_table = np.array([[F.mul(a, b) for b in range(q)]
                                  for a in range(q)], dtype=np.int64)

            def bulk_mul(A, B):
                m = A.shape[0]
                C = np.zeros((m, 2 * rdeg - 1), dtype=np.int64)
                for i in range(rdeg):
                    C[:, i:i + rdeg] ^= mul_table[A[:, i][:, None], B]
                for k in range(2 * rdeg - 2, rdeg - 1, -1):
                    ck = C[:, k]
                    row = red_rows[k]
                    C[:, :rdeg] ^= mul_table[ck[:, None], row[None, :]]
                return C[:, :rdeg].copy()

        def bulk_pow(A, e):
            result = np.zeros_like(A)
            result[:, 0] = 1
            base = A
            while e:
                if e & 1:
                    result = bulk_mul(result, base)
                e >>= 1
                if e:
                    base = bulk_mul(base, base)
            return result

        def codes_of(A):
            return A @ qpow

        U = digits_of(self.unit_codes)
        exp_primes = sorted(_prime_factorization_int(self.phi))
        gens, orders = [], []
        h_codes = np.array([self.identity], dtype=np.int64)
        h_vecs = np.zeros((1, 0), dtype=np.int64)
        size = 1
        while size < self.phi:
            h_sorted = np.sort(h_codes)

            def in_h(codes):
                pos = np.searchsorted(h_sorted, codes)
                pos = np.minimum(pos, len(h_sorted) - 1)
                return h_sorted[pos] == codes

            m = self.phi
            power_in_h = {}
            for ell in exp_primes:
                while m % ell == 0:
                    k = m // ell
                    inside = in_h(codes_of(bulk_pow(U, k)))
                    if inside.all():
                        m = k
                        power_in_h.clear()   # exponents changed; caches stale
                    else:
                        power_in_h[ell] = inside
                        break
            ach = np.ones(self.phi, dtype=bool)
            for ell in _prime_factorization_int(m):
                inside = power_in_h.get(ell)
                if inside is None:
                    inside = in_h(codes_of(bulk_pow(U, m // ell)))
                ach &= ~inside
            idx = np.nonzero(ach)[0]
            assert idx.size
            best = int(self.unit_codes[idx[0]])
            dlog_now = dict(zip(h_codes.tolist(), map(tuple, h_vecs.tolist())))
            adjusted = self._adjust_generator(best, m, gens, orders, dlog_now)
            # extend H by the new cyclic factor of order m
            h_digits = digits_of(h_codes.tolist())
            g_rep = np.repeat(digits_of([adjusted]), len(h_codes), axis=0)
            blocks_c = [h_codes]
            blocks_v = [np.concatenate(
                [h_vecs, np.zeros((len(h_codes), 1), dtype=np.int64)], axis=1)]
            cur = h_digits
            for e in range(1, m):
                cur = bulk_mul(cur, g_rep)
                blocks_c.append(codes_of(cur))
                blocks_v.append(np.concatenate(
                    [h_vecs, np.full((len(h_codes), 1), e, dtype=np.int64)], axis=1))
            h_codes = np.concatenate(blocks_c)
            h_vecs = np.concatenate(blocks_v)
            gens.append(adjusted)
            orders.append(m)
            size *= m
        self.gens = tuple(gens)
        self.orders = tuple(orders)
        self.dims = self.orders
        self.dlog = dict(zip(h_codes.tolist(), map(tuple, h_vecs.tolist())))

    def dlog_of(self, a: Poly):
        """Exponent vector of a residue; None when gcd(a, R) != 1."""
        if self.modulus.deg == 0:
            return ()
        r = (a % self.modulus).code
        return self.dlog.get(r)

    def invmod(self, a: int) -> int:
        vec = self.dlog[a]
        out = self.identity
        for g, d, x in zip(self.gens, self.orders, vec):
            if x:
                out = self.mulmod(out, self.powmod(g, d - x))
        return out

    def code_of_vec(self, vec) -> int:
        out = self.identity
        for g, x in zip(self.gens, vec):
            if x:
                out = self.mulmod(out, self.powmod(g, x))
        return out

    def kernel_codes(self, S: Poly):
        """Units congruent to 1 mod S, for monic S | R."""
        key = S.code
        cached = self._kernel_cache.get(key)
        if cached is not None:
            return cached
        if S.deg == 0:
            out = tuple(self.unit_codes)
        else:
            out = tuple(u for u in self.unit_codes
                        if (from_code(self.field, u) % S).is_one())
        self._kernel_cache[key] = out
        return out

    # -- grid helpers for bulk character work ------------------------------

    def flat_index(self, code: int) -> int:
        vec = self.dlog[code]
        idx = 0
        for x, d in zip(vec, self.dims):
            idx = idx * d + x
        return idx

    def phase_grid(self, code: int):
        """Grid over all kvec of (sum_i k_i x_i L/d_i) mod L for the unit's dlog x."""
        L = self.lcm_order
        vec = self.dlog[code]
        if not self.dims:
            return np.zeros((), dtype=np.int64)
        total = np.zeros(self.dims, dtype=np.int64)
        for axis, (x, d) in enumerate(zip(vec, self.dims)):
            shape = [1] * len(self.dims)
            shape[axis] = d
            total = total + (np.arange(d, dtype=np.int64) * (x * (L // d) % L)).reshape(shape)
        return total % L


@lru_cache(maxsize=256)
def unit_group(R: Poly, budget: int = None) -> UnitGroup:
    return UnitGroup(R, budget)


class DirichletChar:
    """Character of modulus R given by its exponent vector against the group basis."""

    __slots__ = ("group", "kvec")

    def __init__(self, group: UnitGroup, kvec):
        kvec = tuple(int(k) % d for k, d in zip(kvec, group.dims))
        if len(kvec) != len(group.dims):
            raise PreconditionError("character exponent vector has wrong length")
        self.group = group
        self.kvec = kvec

    @property
    def modulus(self) -> Poly:
        return self.group.modulus

    def is_trivial(self) -> bool:
        return all(k == 0 for k in self.kvec)

    def conj(self):
        return DirichletChar(self.group, tuple(-k % d for k, d in zip(self.kvec, self.group.dims)))

    def __eq__(self, other):
        return (isinstance(other, DirichletChar) and self.group is other.group
                and self.kvec == other.kvec)

    def __hash__(self):
        return hash((self.group.modulus, self.kvec))

    def phase_numerator(self, a: Poly):
        """t with chi(a) = exp(2 pi i t / L), or None when chi(a) = 0."""
        g = self.group
        vec = g.dlog_of(a)
        if vec is None:
            return None
        L = g.lcm_order
        t = 0
        for k, x, d in zip(self.kvec, vec, g.dims):
            t += k * x * (L // d)
        return t % L

    def value(self, a: Poly) -> complex:
        t = self.phase_numerator(a)
        if t is None:
            return 0j
        g = self.group
        return complex(np.exp(1j * (TWO_PI * t / g.lcm_order)))

    def value_code(self, code: int) -> complex:
        g = self.group
        vec = g.dlog.get(code)
        if vec is None:
            return 0j
        L = g.lcm_order
        t = 0
        for k, x, d in zip(self.kvec, vec, g.dims):
            t += k * x * (L // d)
        return complex(np.exp(1j * (TWO_PI * (t % L) / L)))

    # -- parity and primitivity -------------------------------------------

    def is_even(self) -> bool:
        """True when chi(a) = 1 for every nonzero constant a."""
        g = self.group
        if g.modulus.deg == 0:
            return True
        F = g.field
        for c in range(1, F.q):
            t = self.phase_numerator(Poly(F, (c,)))
            if t is None or t != 0:
                return False
        return True

    def _trivial_on(self, codes) -> bool:
        g = self.group
        L = g.lcm_order
        for code in codes:
            vec = g.dlog[code]
            t = 0
            for k, x, d in zip(self.kvec, vec, g.dims):
                t += k * x * (L // d)
            if t % L:
                return False
        return True

    def conductor(self) -> Poly:
        """Smallest modulus inducing chi; asserts the inducing set is a divisor lattice."""
        g = self.group
        inducing = [S for S in divisors(g.modulus)
                    if self._trivial_on(g.kernel_codes(S))]
        smallest = inducing[0]
        for S in inducing:
            assert (S % smallest).is_zero(), "inducing moduli do not form a lattice"
        return smallest

    def is_primitive(self) -> bool:
        g = self.group
        R = g.modulus
        if R.deg == 0:
            return True
        from .polyring import factor
        for p, _ in factor(R):
            if self._trivial_on(g.kernel_codes(R // p)):
                return False
        return True

    def __repr__(self):
        from .polyring import to_pretty
        return f"DirichletChar(mod {to_pretty(self.modulus)}, kvec={self.kvec})"


def characters(R: Poly, budget: int = None):
    """All phi(R) characters mod R, kvec-lex order; index 0 is the trivial one."""
    g = unit_group(R, budget)
    return [DirichletChar(g, kvec) for kvec in itertools.product(*(range(d) for d in g.dims))]


def is_even(chi: DirichletChar) -> bool:
    return chi.is_even()


def is_primitive(chi: DirichletChar) -> bool:
    return chi.is_primitive()


def conductor(chi: DirichletChar) -> Poly:
    return chi.conductor()


def primitive_pair_sum(A: Poly, B: Poly, R: Poly) -> int:
    """sum over primitive chi mod R of chi(A) conj(chi)(B), via Mobius inversion.

    Equals sum_{EF=R, F | (A-B)} mu(E) phi(F) when (AB, R) = 1, else 0.
    """
    if not R.is_monic():
        raise PreconditionError("modulus must be monic")
    if R.deg == 0:
        return 1
    if poly_gcd(A * B, R).deg != 0:
        return 0
    diff = A - B
    total = 0
    for F in divisors(R):
        E = R // F
        m = mu(E)
        if m == 0:
            continue
        if diff.is_zero() or (diff % F).is_zero():
            total += m * phi(F)
    return total


# -- bulk grids for the FFT-based moment and L-value paths -------------------

def primitive_mask(group: UnitGroup):
    """Boolean grid over kvec of which characters are primitive."""
    from .polyring import factor
    R = group.modulus
    if R.deg == 0:
        return np.ones((), dtype=bool)
    if not group.dims:
        # phi(R) = 1: the trivial character, primitive only if R = 1
        return np.zeros((), dtype=bool)
    mask = np.ones(group.dims, dtype=bool)
    for p, _ in factor(R):
        kernel = group.kernel_codes(R // p)
        trivial = np.ones(group.dims, dtype=bool)
        for code in kernel:
            trivial &= (group.phase_grid(code) == 0)
        mask &= ~trivial
    return mask


def even_mask(group: UnitGroup):
    """Boolean grid over kvec of which characters are even."""
    R = group.modulus
    if not group.dims:
        return np.ones((), dtype=bool)
    mask = np.ones(group.dims, dtype=bool)
    F = group.field
    for c in range(1, F.q):
        mask &= (group.phase_grid(c) == 0)
    assert int(mask.sum()) * (F.q - 1) == group.phi, \
        "even characters must form an index q-1 subgroup"
    return mask
