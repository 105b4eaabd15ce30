"""Second and fourth moments over primitive characters: brute-force character
sums, Mobius-exact evaluation in Q(sqrt(q)), closed-form/main-term assembly,
and the diagonal-term check behind the fourth-moment main term."""

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import numpy as np

from .chargroup import UnitGroup, primitive_mask, unit_group
from .errors import BudgetError, PreconditionError
from .lfunc import l_half_table, zeta_a
from .multfun import divisors, is_squarefull, mu, omega, phi, phi_star
from .polyring import Poly, factor, from_code, to_text
from .qsqrt import QSqrt, qs_from_halfpower
from .series import monic_count_series, partial_value_at_inv_q, two_omega_series


@dataclass
class MomentReport:
    modulus: str
    method: str
    value: object                      # QSqrt for exact paths, float otherwise
    value_float: float
    terms: dict = dc_field(default_factory=dict)
    diagnostics: dict = dc_field(default_factory=dict)


# -- shared helpers -----------------------------------------------------------

def _pair_sum_weights(R: Poly):
    """t(w) = sum_{EF=R, F | (w-1)} mu(E) phi(F) for every unit w, plus the grid."""
    g = unit_group(R)
    F = R.field
    pairs = []
    for D in divisors(R):
        m = mu(R // D)
        if m:
            pairs.append((D, m * phi(D)))
    one_poly = from_code(F, g.identity)
    t = {}
    for w in g.unit_codes:
        diff = from_code(F, w) - one_poly
        total = 0
        for D, weight in pairs:
            if diff.is_zero() or (diff % D).is_zero():
                total += weight
        t[w] = total
    return g, t


def _grid_scatter(g: UnitGroup, values: dict):
    out = np.zeros(g.dims or (1,), dtype=np.int64)
    flat = out.reshape(-1)
    for code, v in values.items():
        flat[g.flat_index(code) if g.dims else 0] = v
    return out


def _reverse_grid(a: np.ndarray):
    """a[-x mod dims] along every axis."""
    out = a
    for axis in range(a.ndim):
        out = np.roll(np.flip(out, axis=axis), 1, axis=axis)
    return out


def _correlate(a: np.ndarray, b: np.ndarray):
    """C[y] = sum_x a[(x+y) mod dims] b[x], exact integer arithmetic."""
    out = np.zeros_like(a)
    it = np.ndindex(*a.shape) if a.shape else iter([()])
    for y in it:
        shifted = a
        for axis, off in enumerate(y):
            if off:
                shifted = np.roll(shifted, -off, axis=axis)
        out[y] = np.sum(shifted * b)
    return out


def _convolve(a: np.ndarray, b: np.ndarray):
    """C[u] = sum_x a[x] b[(u-x) mod dims], exact integer arithmetic."""
    return _correlate(_reverse_grid(a), b)


def _s_grids(g: UnitGroup, scale_pow: int):
    """Integer grids of q^{scale_pow - d/2} over monic unit residues of degree d,
    split by parity of d.  Returns (Se, So) with S = (Se + So*sqrt(q)) / q^{scale_pow}.
    """
    q = g.field.q
    se, so = {}, {}
    for code in g.unit_codes:
        d = _deg_of_code(q, code)
        if code // (q ** d) != 1:
            continue   # non-monic residue: not a summand
        if d % 2 == 0:
            se[code] = q ** (scale_pow - d // 2)
        else:
            so[code] = q ** (scale_pow - (d + 1) // 2)
    return _grid_scatter(g, se), _grid_scatter(g, so)


def _deg_of_code(q: int, code: int) -> int:
    d = -1
    while code:
        code //= q
        d += 1
    return d


def _contract(t_grid, rational_grid, sqrt_grid):
    """sum t * (rational + sqrt(q) * sqrt_part) with Python-int accumulation."""
    t_flat = t_grid.reshape(-1).tolist()
    r_flat = rational_grid.reshape(-1).tolist()
    s_flat = sqrt_grid.reshape(-1).tolist()
    a = sum(t * r for t, r in zip(t_flat, r_flat))
    b = sum(t * s for t, s in zip(t_flat, s_flat))
    return a, b


def moment2_chars(R: Poly, budget: int = None) -> float:
    """Sum over primitive chi mod R of |L(1/2, chi)|^2, by direct character sums."""
    q = R.field.q
    if R.deg == 0:
        return abs(zeta_a(q, 0.5)) ** 2
    g = unit_group(R, budget)
    table = l_half_table(g)
    mask = primitive_mask(g)
    vals = np.abs(np.asarray(table)) ** 2
    return float(np.sum(vals, where=np.asarray(mask)) if mask.shape else
                 (float(vals) if mask else 0.0))


def moment2_moebius_exact(R: Poly) -> QSqrt:
    """Exact QSqrt via the Mobius-inverted pair sum over monic A, B of degree < deg R."""
    q = R.field.q
    if R.deg == 0:
        raise PreconditionError("modulus 1 has no finite-sum representation")
    g, t = _pair_sum_weights(R)
    t_grid = _grid_scatter(g, t)
    scale = max(R.deg - 1, 0)
    se, so = _s_grids(g, scale)
    corr_ee = _correlate(se, se)
    corr_oo = _correlate(so, so)
    corr_eo = _correlate(se, so)
    corr_oe = _correlate(so, se)
    a_int, b_int = _contract(t_grid, corr_ee + q * corr_oo, corr_eo + corr_oe)
    den = q ** (2 * scale)
    return QSqrt(q, Fraction(a_int, den), Fraction(b_int, den))


def moment2_formula_terms(R: Poly, variant: str = "proof_final"):
    """The three closed-form terms for square-full R, each exact in Q(sqrt(q)).

    proof_final: coefficient 2 phi^3/|R|^2 on the prime sum (matches brute force).
    theorem_statement: coefficient (phi^3 - phi^2)/|R|^2 (kept for documentation).
    """
    if variant not in ("proof_final", "theorem_statement"):
        raise PreconditionError(f"unknown variant {variant!r}")
    if not is_squarefull(R):
        raise PreconditionError("closed-form second moment needs a square-full modulus")
    q = R.field.q
    ph = Fraction(phi(R))
    norm = Fraction(R.norm())
    deg = R.deg
    t1 = QSqrt(q, ph ** 3 / norm ** 2 * deg)
    psum = Fraction(0)
    for p, _ in factor(R):
        psum += Fraction(p.deg, p.norm() - 1)
    if variant == "proof_final":
        coeff = 2 * ph ** 3 / norm ** 2
    else:
        coeff = (ph ** 3 - ph ** 2) / norm ** 2
    t2 = QSqrt(q, coeff * psum)
    sq1 = qs_from_halfpower(q, 1) - 1          # sqrt(q) - 1
    inv_sq1_sq = (sq1 * sq1).inv()             # 1/(sqrt(q)-1)^2
    prod = QSqrt(q, 1)
    for p, _ in factor(R):
        term = QSqrt(q, 1) - qs_from_halfpower(q, -p.deg)
        prod = prod * (term * term)
    t3 = inv_sq1_sq * (QSqrt(q, -(ph ** 3) / norm ** 2)
                       + 2 * QSqrt(q, ph) * qs_from_halfpower(q, -deg) * prod)
    return {"degree_term": t1, "prime_sum_term": t2, "half_power_term": t3}


def moment2_formula(R: Poly, variant: str = "proof_final") -> QSqrt:
    """Closed-form second moment for square-full R (sum of the three terms)."""
    terms = moment2_formula_terms(R, variant)
    return terms["degree_term"] + terms["prime_sum_term"] + terms["half_power_term"]


def moment2_formula_report(R: Poly, variant: str = "proof_final") -> MomentReport:
    terms = moment2_formula_terms(R, variant)
    total = terms["degree_term"] + terms["prime_sum_term"] + terms["half_power_term"]
    return MomentReport(to_text(R), f"moment2_formula[{variant}]", total,
                        total.to_float(), terms={k: v for k, v in terms.items()})


def moment2_tamam_prime(Q: Poly, sign: str = "minus") -> QSqrt:
    """Average over nontrivial chi mod prime Q of |L(1/2, chi)|^2, exact.

    sign="minus" is the corrected formula (agrees with brute force);
    sign="plus" is the as-printed variant, kept as an erratum witness.
    """
    from .polyring import is_irreducible
    if Q.deg < 1 or not Q.is_monic() or not is_irreducible(Q):
        raise PreconditionError("Tamam's formula applies to monic irreducible moduli")
    if sign not in ("minus", "plus"):
        raise PreconditionError(f"unknown sign {sign!r}")
    q = Q.field.q
    sq1 = qs_from_halfpower(q, 1) - 1
    inv_sq1_sq = (sq1 * sq1).inv()
    norm_half = qs_from_halfpower(q, Q.deg)
    term = inv_sq1_sq * (QSqrt(q, 1) - 2 * (norm_half + 1).inv())
    base = QSqrt(q, Q.deg)
    return base - term if sign == "minus" else base + term


def moment2_tamam_orthogonality(Q: Poly) -> QSqrt:
    """Same average, straight from orthogonality: deg Q - (|Q|^(1/2)-1)^2 / ((sqrt q - 1)^2 phi(Q))."""
    q = Q.field.q
    sq1 = qs_from_halfpower(q, 1) - 1
    nh = qs_from_halfpower(q, Q.deg) - 1
    return QSqrt(q, Q.deg) - (nh * nh) * ((sq1 * sq1) * phi(Q)).inv()


def moment4_chars(R: Poly, budget: int = None) -> float:
    """Sum over primitive chi mod R of |L(1/2, chi)|^4."""
    q = R.field.q
    if R.deg == 0:
        return abs(zeta_a(q, 0.5)) ** 4
    g = unit_group(R, budget)
    table = l_half_table(g)
    mask = primitive_mask(g)
    vals = np.abs(np.asarray(table)) ** 4
    return float(np.sum(vals, where=np.asarray(mask)) if mask.shape else
                 (float(vals) if mask else 0.0))


def moment4_moebius_exact(R: Poly) -> QSqrt:
    """Exact QSqrt via Mobius-inverted quadruple sums (A, B, C, D of degree < deg R)."""
    q = R.field.q
    if R.deg == 0:
        raise PreconditionError("modulus 1 has no finite-sum representation")
    g, t = _pair_sum_weights(R)
    t_grid = _grid_scatter(g, t)
    scale = max(R.deg - 1, 0)
    se, so = _s_grids(g, scale)
    we = _convolve(se, se) + q * _convolve(so, so)
    wo = 2 * _convolve(se, so)
    corr_ee = _correlate(we, we)
    corr_oo = _correlate(wo, wo)
    corr_eo = _correlate(we, wo)
    corr_oe = _correlate(wo, we)
    a_int, b_int = _contract(t_grid, corr_ee + q * corr_oo, corr_eo + corr_oe)
    den = q ** (4 * scale)
    return QSqrt(q, Fraction(a_int, den), Fraction(b_int, den))


def moment4_main_term(R: Poly) -> float:
    """(1 - 1/q)/12 * phi*(R) * prod_{P|R} (1-|P|^-1)^3/(1+|P|^-1) * (deg R)^4."""
    q = R.field.q
    prod = 1.0
    for p, _ in factor(R):
        x = 1.0 / p.norm()
        prod *= (1 - x) ** 3 / (1 + x)
    return (1 - 1 / q) / 12 * phi_star(R) * prod * R.deg ** 4


def moment4_report(R: Poly, budget: int = None) -> MomentReport:
    value = moment4_chars(R, budget)
    main = moment4_main_term(R)
    ratio = value / main if main else float("inf")
    om = omega(R) if R.deg >= 1 else 0
    norm_dev = (abs(ratio - 1) * math.sqrt(R.deg) / math.sqrt(om)
                if om and main else float("nan"))
    return MomentReport(to_text(R), "moment4_report", value, value,
                        terms={"main_term": main},
                        diagnostics={"ratio": ratio, "normalized_deviation": norm_dev})


# -- diagonal of the opened-up fourth moment ---------------------------------

def z_cut(R: Poly) -> float:
    """z_R = deg R - log_q 2^omega(R)."""
    q = R.field.q
    return R.deg - omega(R) * math.log(2, q) if R.deg else 0.0


def z_cut_int(R: Poly) -> int:
    """floor(z_R), exact when 2^omega is a power of q."""
    q = R.field.q
    om = omega(R) if R.deg else 0
    target = 2 ** om
    m, power = 0, 1
    while power < target:
        power *= q
        m += 1
    if power == target:
        return R.deg - m
    return int(math.floor(R.deg - om * math.log(2, q) + 1e-12))


def diagonal_quadruple_sum(R: Poly, zint: int, budget: int = None) -> Fraction:
    """Direct enumeration of sum 1/|ABCD|^{1/2} over monic A,B,C,D coprime to R
    with deg AB <= zint, deg CD <= zint and AC = BD, exact."""
    q = R.field.q
    limit = budget if budget is not None else 1 << 22
    if (zint + 1) ** 2 * q ** (2 * zint) > limit * 64:
        raise BudgetError("diagonal quadruple enumeration over budget")
    F = R.field
    from .polyring import poly_gcd
    coprime = []
    for d in range(zint + 1):
        for code in range(q ** d, 2 * q ** d):
            p = from_code(F, code)
            if R.deg == 0 or poly_gcd(p, R).deg == 0:
                coprime.append(p)
    total = Fraction(0)
    for A in coprime:
        for B in coprime:
            ab_deg = A.deg + B.deg
            if ab_deg > zint:
                continue
            for C in coprime:
                d_deg = A.deg + C.deg - B.deg
                if d_deg < 0 or C.deg + d_deg > zint:
                    continue
                dpoly, rem = divmod(A * C, B)
                if not rem.is_zero() or not dpoly.is_monic() or dpoly.deg != d_deg:
                    continue
                if R.deg > 0 and poly_gcd(dpoly, R).deg != 0:
                    continue
                total += Fraction(1, q ** ((ab_deg + C.deg + d_deg) // 2))
    return total


def diagonal_param_sum(R: Poly, zint: int) -> Fraction:
    """Same diagonal sum through the F,G,U,V parametrization:
    sum_N 2^omega(N)/|N| ( sum_{deg F <= (zint - deg N)/2, (F,R)=1} 1/|F| )^2."""
    q = R.field.q
    if zint < 0:
        return Fraction(0)
    excl = tuple(p.deg for p, _ in factor(R)) if R.deg else ()
    tw = two_omega_series(q, zint, exclude_degs=excl)
    counts = monic_count_series(q, zint, exclude_degs=excl)
    total = Fraction(0)
    for n in range(zint + 1):
        if not tw[n]:
            continue
        fmax = (zint - n) // 2
        h = partial_value_at_inv_q(counts, q, 0, fmax)
        total += Fraction(tw[n], q ** n) * h * h
    return total


def diagonal_term_check(R: Poly, budget: int = None, with_direct: bool = None) -> MomentReport:
    """Dual-enumeration diagonal sum and its ratio to the (1-1/q)/48-scale main term."""
    q = R.field.q
    if R.deg == 0:
        raise PreconditionError("diagonal check needs deg R >= 1")
    zint = z_cut_int(R)
    param = diagonal_param_sum(R, zint)
    if with_direct is None:
        with_direct = (zint + 1) ** 2 * q ** (2 * zint) <= (1 << 26)
    direct = diagonal_quadruple_sum(R, zint, budget) if with_direct else None
    prod = 1.0
    for p, _ in factor(R):
        x = 1.0 / p.norm()
        prod *= (1 - x) ** 3 / (1 + x)
    main = (1 - 1 / q) / 48 * prod * R.deg ** 4
    ratio = float(param) / main if main else float("inf")
    diag = {"z_R": z_cut(R), "z_int": zint, "ratio": ratio, "main_term": main,
            "param_exact": str(param)}
    if direct is not None:
        diag["direct_exact"] = str(direct)
        diag["dual_equal"] = (direct == param)
    return MomentReport(to_text(R), "diagonal_term_check", param, float(param),
                        diagnostics=diag)
