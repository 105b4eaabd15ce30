import numpy as np
import pytest

from ffl.chargroup import (UnitGroup, characters, even_mask, primitive_mask,
                           primitive_pair_sum, unit_group)
from ffl.errors import BudgetError
from ffl.gf import field_make
from ffl.multfun import phi, phi_star
from ffl.polyring import (enumerate_monic, from_code, one, parse_poly, t_gen,
                          to_pretty, zero)

F2 = field_make(2)
F3 = field_make(3)
F4 = field_make(2, 2)


def P2(s):
    return parse_poly(F2, s)


def test_unit_group_examples():
    g = unit_group(P2("T^2"))
    assert g.unit_codes == (1, 3)          # {1, 1+T}
    assert g.orders == (2,)
    assert from_code(F2, g.gens[0]) == P2("T+1")
    g3 = unit_group(P2("T^3"))
    assert g3.phi == 4 and g3.orders == (4,)
    assert from_code(F2, g3.gens[0]) == P2("T+1")
    g1 = unit_group(one(F2))
    assert g1.phi == 1 and g1.dims == ()


def test_unit_group_budget():
    with pytest.raises(BudgetError):
        UnitGroup(P2("T^8"), budget=10)


def test_dlog_additivity_exhaustive():
    mods = [P2("T^2"), P2("T^3"), P2("T^4"), P2("T^2+T+1"), P2("T^3+T+1"),
            P2("T^2") * P2("T+1"), P2("T^2") * P2("T^2+T+1"),
            parse_poly(F3, "T^2"), parse_poly(F3, "T^3"),
            parse_poly(F3, "T^2+1") * t_gen(F3), parse_poly(F4, "[0,0,1]")]
    for R in mods:
        g = unit_group(R)
        assert len(g.dlog) == g.phi == phi(R)
        prod_orders = 1
        for d in g.orders:
            prod_orders *= d
        assert prod_orders == g.phi
        for u in g.unit_codes:
            for v in g.unit_codes:
                du, dv = g.dlog[u], g.dlog[v]
                dp = g.dlog[g.mulmod(u, v)]
                assert all((x + y) % d == z
                           for x, y, z, d in zip(du, dv, dp, g.dims))


def test_characters_count_and_indexing():
    assert len(characters(P2("T^2"))) == 2
    chs = characters(P2("T^2+T+1"))
    assert len(chs) == 3
    assert chs[0].is_trivial()
    vals = sorted(round(c.value(t_gen(F2)).real, 6) for c in chs[1:])
    assert vals == [-0.5, -0.5]            # the two cube roots of unity
    assert len(characters(one(F2))) == 1
    assert characters(one(F2))[0].value(zero(F2)) == 1


def test_multiplicativity_and_conj():
    for R in (P2("T^3"), parse_poly(F3, "T^2"), P2("T^2+T+1")):
        g = unit_group(R)
        for chi in characters(R):
            for u in g.unit_codes:
                for v in g.unit_codes:
                    lhs = chi.value_code(g.mulmod(u, v))
                    rhs = chi.value_code(u) * chi.value_code(v)
                    assert abs(lhs - rhs) < 1e-12
                # chi(A^{-1}) = conj chi(A)
                inv = g.invmod(u)
                assert abs(chi.value_code(inv) - chi.value_code(u).conjugate()) < 1e-12


def test_parity():
    assert all(c.is_even() for c in characters(P2("T^3")))
    R = parse_poly(F3, "T^2")
    chs = characters(R)
    odd = [c for c in chs if not c.is_even()]
    even = [c for c in chs if c.is_even()]
    assert len(even) == phi(R) // (F3.q - 1)
    two = parse_poly(F3, "2")
    for c in odd:
        assert abs(c.value(two) - 1) > 1e-9
    for c in even:
        assert abs(c.value(two) - 1) < 1e-12
    assert chs[0].is_even()
    # even characters form a subgroup of index q-1 across a grid
    for R in (parse_poly(F3, "T^3"), parse_poly(F4, "[0,0,1]"), parse_poly(F3, "T^2+1")):
        chs = characters(R)
        n_even = sum(1 for c in chs if c.is_even())
        assert n_even == phi(R) // (R.field.q - 1)


def test_conductor_and_primitivity_examples():
    chi = characters(P2("T^2"))[1]
    assert chi.is_primitive() and chi.conductor() == P2("T^2")
    # order-2 character mod T^3 is induced from T^2
    for c in characters(P2("T^3")):
        t = c.phase_numerator(P2("T+1"))
        if t is not None and not c.is_trivial() and t * 2 == c.group.lcm_order:
            assert c.conductor() == P2("T^2")
            assert not c.is_primitive()
    # trivial character mod R != 1 has conductor 1
    for R in (P2("T^3"), parse_poly(F3, "T^2+1")):
        chi0 = characters(R)[0]
        assert chi0.conductor() == one(R.field)
        assert not chi0.is_primitive()
    assert characters(one(F2))[0].is_primitive()


def test_primitive_count_matches_phi_star():
    for F in (F2, F3):
        maxd = 5 if F.q == 2 else 4
        for d in range(0, maxd + 1):
            for R in enumerate_monic(F, d):
                g = unit_group(R)
                mask = primitive_mask(g)
                cnt = int(mask.sum()) if mask.shape else int(mask)
                assert cnt == phi_star(R), (F.q, to_pretty(R))
                direct = sum(1 for c in characters(R) if c.is_primitive())
                assert direct == cnt


def test_primitive_pair_sum_examples():
    R = P2("T^2")
    assert primitive_pair_sum(one(F2), one(F2), R) == phi_star(R) == 1
    assert primitive_pair_sum(P2("T+1"), one(F2), R) == -1
    assert primitive_pair_sum(t_gen(F2), one(F2), R) == 0
    assert primitive_pair_sum(one(F3), one(F3), parse_poly(F3, "T^2")) == \
        phi_star(parse_poly(F3, "T^2"))


def test_primitive_pair_sum_vs_direct():
    for R in (P2("T^2"), P2("T^3"), P2("T^2+T+1"), parse_poly(F3, "T^2"),
              P2("T^2") * P2("T+1")):
        g = unit_group(R)
        chs = [c for c in characters(R) if c.is_primitive()]
        for a_code in list(g.dlog) [:12]:
            for b_code in list(g.dlog)[:12]:
                A = from_code(R.field, a_code)
                B = from_code(R.field, b_code)
                direct = sum(c.value(A) * c.value(B).conjugate() for c in chs)
                exact = primitive_pair_sum(A, B, R)
                assert abs(direct - exact) < 1e-8


def test_orthogonality_small():
    # full relation on a small grid; the acceptance suite runs the full grid
    for R in (P2("T^3"), parse_poly(F3, "T^2"), parse_poly(F4, "[0,0,1]")):
        g = unit_group(R)
        q = R.field.q
        chs = characters(R)
        M = np.array([[c.value_code(u) for u in g.unit_codes] for c in chs])
        orth = M.T @ M.conj()
        for i, u in enumerate(g.unit_codes):
            for j, v in enumerate(g.unit_codes):
                expected = g.phi if u == v else 0
                assert abs(orth[i, j] - expected) <= 1e-8 * g.phi
        emask = np.array([c.is_even() for c in chs])
        Me = M[emask]
        orth_e = Me.T @ Me.conj()
        for i, u in enumerate(g.unit_codes):
            for j, v in enumerate(g.unit_codes):
                w = g.mulmod(u, g.invmod(v))
                is_const = w < q
                expected = g.phi / (q - 1) if is_const else 0
                assert abs(orth_e[i, j] - expected) <= 1e-8 * g.phi


def test_masks_match_scalar_predicates():
    for R in (P2("T^3"), parse_poly(F3, "T^3"), parse_poly(F3, "T^2+1")):
        g = unit_group(R)
        pm = primitive_mask(g)
        em = even_mask(g)
        for c in characters(R):
            assert bool(pm[c.kvec]) == c.is_primitive()
            assert bool(em[c.kvec]) == c.is_even()


def test_kvec_stability():
    # external identification (modulus, kvec) must be stable across constructions
    R = parse_poly(F3, "T^2")
    a = UnitGroup(R)
    b = UnitGroup(R)
    assert a.gens == b.gens and a.orders == b.orders
    assert a.dlog == b.dlog


def test_dlog_additivity_large_group_exhaustive():
    # ~10^3-unit group, all pairs, via the digit-matrix bulk engine
    import numpy as np
    R = parse_poly(F2, "[" + "0," * 11 + "1]")     # T^11
    g = UnitGroup(R)
    assert g.phi == 1024
    codes = np.array(g.unit_codes, dtype=np.int64)
    vecs = np.array([g.dlog[int(c)] for c in codes], dtype=np.int64)
    dims = np.array(g.dims, dtype=np.int64)
    mm = g.mulmod
    for i, u in enumerate(g.unit_codes):
        prod_codes = np.array([mm(u, int(v)) for v in codes], dtype=np.int64)
        order = np.argsort(codes)
        pos = order[np.searchsorted(codes[order], prod_codes)]
        expected = (vecs[i][None, :] + vecs) % dims
        assert np.array_equal(vecs[pos], expected)
