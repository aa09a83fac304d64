import math
import random

import pytest
from sympy import factorint, primerange

from logclass.logarith import (
    ANN_CSL,
    ANN_ELL_DIVIDES_H,
    ANN_UNSTABLE,
    class_group_at,
    is_log_principal,
    log_class_group,
    log_divisor,
    log_unit_certificate,
    log_valuation,
    place_degree,
)
from logclass.padic import PadicNum, iwasawa_log
from logclass.quadfield import (
    INERT,
    RATIONALS,
    SPLIT_FIRST,
    SPLIT_SECOND,
    PlaceTag,
    QuadElem,
    field_init,
    splitting,
)
from oracles import fermat_criterion, genus_two_part, log_series, sqrt_brute, v

TABLE_FIELDS = [-1, -5, -7, -11, -13, -31, -3]


def _zero_mod(x: PadicNum, m: int) -> bool:
    return x.with_absprec(m).is_zero()


# -- degrees and valuations ----------------------------------------------------


def test_place_degree_examples():
    d2 = place_degree(RATIONALS, PlaceTag(2, "rational"), 3, 4)
    assert d2.residue() % 81 == 24
    K = field_init(-11)
    assert place_degree(K, splitting(K, 5)[0], 5, 4).residue() == 5
    assert place_degree(RATIONALS, PlaceTag(7, "rational", True), 7, 4).residue() == 7


@pytest.mark.parametrize("d", [-31, -3, -11, 13, 257, -5])
@pytest.mark.parametrize("ell", [3, 5, 7])
def test_wild_degree_is_ell_for_odd_ell(d, ell):
    K = field_init(d)
    for tag in splitting(K, ell):
        assert place_degree(K, tag, ell, 6).residue() == ell


def test_wild_degree_two_is_four():
    for d in (-31, -1, -7, 5, 3):
        K = field_init(d)
        for tag in splitting(K, 2):
            assert place_degree(K, tag, 2, 6).residue() == 4
    assert place_degree(RATIONALS, PlaceTag(2, "rational", True), 2, 6).residue() == 4


def test_log_valuation_examples():
    K = field_init(-31)
    l3 = splitting(K, 3)[0]
    assert l3.kind == INERT
    assert log_valuation(K, K.elem(3), l3, 3, 4).is_zero()
    K = field_init(-11)
    eta = QuadElem(3, 1, 2, -11)
    nu = log_valuation(K, eta, splitting(K, 5)[0], 5, 4)
    assert nu.val == 1
    q = PlaceTag(3, SPLIT_FIRST)
    x = QuadElem(1, 1, 2, -11)  # norm 3
    assert log_valuation(K, x * x * x, q, 5, 4).residue() in (0, 3)


def test_log_divisor_examples():
    K = field_init(-31)
    S = [PlaceTag(3, INERT, True), PlaceTag(2, SPLIT_FIRST), PlaceTag(2, SPLIT_SECOND)]
    zero = log_divisor(K, K.elem(3), S[:1], 3, 4)
    assert all(c.is_zero() for _, c in zero.support)
    alpha = QuadElem(1, 1, 2, -31)
    D = log_divisor(K, alpha, S, 3, 4)
    wild = D.coefficient(S[0])
    expected = -iwasawa_log(PadicNum.from_int(8, 3, 6)) / 3
    assert (wild - expected).with_absprec(4).is_zero()
    tame = sorted(D.coefficient(s).residue() for s in S[1:])
    assert tame == [0, 3]
    D2 = log_divisor(K, K.elem(2), S, 3, 4)
    assert [D2.coefficient(s).residue() for s in S[1:]] == [1, 1]
    assert (D2.coefficient(S[0]) + iwasawa_log(PadicNum.from_int(4, 3, 6)) / 3).with_absprec(4).is_zero()


def test_log_divisor_rejects_non_s_units():
    K = field_init(-31)
    with pytest.raises(ValueError):
        log_divisor(K, K.elem(5), [PlaceTag(3, INERT, True)], 3, 4)


# -- product formula -----------------------------------------------------------


def _random_s_units(rng, K, ell, count):
    """Random integral elements with smooth norms, paired with their support."""
    d = K.d
    out = []
    while len(out) < count:
        if d % 4 == 1:
            a, b = rng.randrange(-60, 60), rng.randrange(-20, 20)
            if (a - b) % 2:
                a += 1
            x = QuadElem(a, b, 2, d)
        else:
            x = QuadElem(rng.randrange(-60, 60), rng.randrange(-20, 20), 1, d)
        if x.is_zero():
            continue
        n = abs(int(x.norm()))
        primes = set(factorint(n)) | {ell}
        if max(primes) > 60:
            continue
        S = []
        for p in sorted(primes):
            S.extend(K.places_above(p, ell))
        out.append((x, S))
    return out


@pytest.mark.parametrize("d,ell", [(-3, 13), (-11, 5), (-31, 3), (13, 3), (-5, 3), (257, 3), (-7, 2), (-1, 5)])
def test_product_formula_random_s_units(d, ell):
    K = field_init(d)
    rng = random.Random(abs(d) * 100 + ell)
    m = 6
    for x, S in _random_s_units(rng, K, ell, 70):
        D = log_divisor(K, x, S, ell, m)  # raises unless the degree vanishes
        assert _zero_mod(D.degree, m)


@pytest.mark.parametrize("d", TABLE_FIELDS + [13, 257, 10, -4027])
@pytest.mark.parametrize("ell", [2, 3, 5, 7, 13])
def test_ell_is_a_logarithmic_unit(d, ell):
    K = field_init(d)
    D = log_divisor(K, K.elem(ell), splitting(K, ell), ell, 6)
    assert all(_zero_mod(c, 6) for _, c in D.support)


# -- class groups ----------------------------------------------------------------


def test_class_group_examples():
    G = log_class_group(field_init(-11), 5)
    assert G.invariants == (1,) and G.stable and G.order == 5
    assert log_class_group(field_init(-3), 7).trivial
    assert log_class_group(RATIONALS, 5).trivial
    G = log_class_group(field_init(-31), 3)
    assert G.invariants == (1,) and ANN_ELL_DIVIDES_H in G.annotations


def test_is_log_principal_examples():
    assert is_log_principal(field_init(-3), 3)
    assert ANN_CSL in log_class_group(field_init(-3), 3).annotations
    assert ANN_CSL in log_class_group(field_init(-1), 2).annotations
    assert not is_log_principal(field_init(-11), 5)
    assert is_log_principal(RATIONALS, 5)


def test_unstable_result_is_flagged():
    G = log_class_group(field_init(-3), 13, cap=4)
    assert not G.stable and ANN_UNSTABLE in G.annotations


def test_record_schema():
    rec = log_class_group(field_init(-11), 5).to_record()
    assert set(rec) == {"d", "ell", "invariants", "order", "stable", "certified_at", "convention", "annotations"}


@pytest.mark.parametrize("d", [-31, -3299, -4027, -12067, 1129, 229, 257, -23, -5])
@pytest.mark.parametrize("ell", [2, 3, 5, 7])
def test_convention_invariance(d, ell):
    K = field_init(d)
    a = log_class_group(K, ell, convention="std", method="full")
    b = log_class_group(K, ell, convention="unit-perturbed", method="full")
    assert a.stable and b.stable
    assert a.invariants == b.invariants


@pytest.mark.parametrize("d,ell", [(-11, 5), (-13, 113), (-3, 13), (-3, 181), (-31, 3), (-31, 2),
                                   (-4027, 3), (-12067, 3), (1129, 3)])
def test_precision_stability(d, ell):
    K = field_init(d)
    for m in (6, 8, 10):
        lo, hi = class_group_at(K, ell, m), class_group_at(K, ell, m + 2)
        assert [e for e in lo if e < m] == [e for e in hi if e < m]


def test_sample_structures():
    assert log_class_group(field_init(-4027), 3).invariants == (1, 1)
    assert log_class_group(field_init(-3299), 2).trivial
    assert log_class_group(field_init(1129), 3).invariants == (1,)
    assert log_class_group(field_init(229), 3).trivial


# -- independent oracles ---------------------------------------------------------


def _eta_brute(d, ell, h):
    """Primitive (x, y) with x^2 - D y^2 = 4 ell^k, k minimal; returns (k, x, y)."""
    D = d if d % 4 == 1 else 4 * d
    for k in range(1, h + 1):
        N = 4 * ell**k
        y = 0
        while -D * y * y <= N:
            t = N + D * y * y
            x = math.isqrt(t) if t >= 0 else -1
            if x * x == t and y and (x % ell or y % ell):
                return k, x, y
            y += 1
    raise AssertionError


@pytest.mark.parametrize("d", [-1, -7, -11, -13, -3, -31, -23])
def test_fermat_quotient_oracle(d):
    K = field_init(d)
    for ell in primerange(3, 700):
        if K.h % ell == 0 or len(splitting(K, ell)) != 2:
            continue
        k, x, y = _eta_brute(d, ell, K.h)
        expected = fermat_criterion(d, ell, (x, y), k)
        assert (not log_class_group(K, ell).trivial) == expected, ell


def test_two_adic_genus_oracle_minus_31():
    # eta = (1 + sqrt -31)/2 has norm 8; at the place where it vanishes its
    # conjugate is a unit u, and 2 - 1 = 1 split places see Log(u).
    prec = 10
    roots = [r for r in sqrt_brute(-31, 2, prec + 1) if r % 2]
    r = roots[0]
    mod = 2**prec
    # r is odd and known mod 2^(prec+1), so halving is exact mod 2^prec
    at = (1 + r) // 2 % mod
    bar = (1 - r) // 2 % mod
    u = bar if at % 2 == 0 else at
    val = v(log_series(u, 2, prec), 2)
    assert val == 3
    # Chevalley: |Cl_S(K_n)^G|_2 = 2 at every layer, so the limit is nontrivial
    assert all(genus_two_part(val, n) == 2 for n in range(1, 6))
    G = log_class_group(field_init(-31), 2)
    assert G.stable and G.invariants == (1,)


# -- logarithmic units -------------------------------------------------------------


def test_certificate_examples():
    c = log_unit_certificate(field_init(-11), 5)
    assert c.rank_logunits == 1 and c.delta_G_zero_certified
    c = log_unit_certificate(field_init(13), 3)
    assert (c.rank_logunits, c.naive_rank) == (2, 1)
    c = log_unit_certificate(field_init(257), 3)
    assert c.rank_logunits == 2 and c.rank_logunits == c.ell_unit_rank
    rec = c.to_record()
    assert rec["naive_rank_status"] == "certified"
    assert rec["not_computed"] == ["mu_K^loc", "delta_K^L"]


@pytest.mark.parametrize("d", TABLE_FIELDS + [13, 257])
@pytest.mark.parametrize("ell", [2, 3, 5, 7, 13])
def test_scolie_rank_identity(d, ell):
    K = field_init(d)
    c = log_unit_certificate(K, ell)
    r, s = K.signature
    assert c.delta_G_zero_certified
    assert c.rank_logunits == r + s


def test_scolie_rank_at_table_primes():
    for d, ell in [(-11, 5), (-13, 113), (-3, 13), (-31, 3), (-5, 5881)]:
        K = field_init(d)
        c = log_unit_certificate(K, ell)
        assert c.delta_G_zero_certified and c.rank_logunits == sum(K.signature)
