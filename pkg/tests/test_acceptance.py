"""Acceptance suite: one PASS/FAIL line per primary criterion.

Tolerances are pinned here: every arithmetic check is exact; runtimes are
wall-clock limits on the machine running the suite.
"""

import itertools
import math
import os
import random
import time

import pytest

from logclass.iwalab import build, check_cap_theorem, random_blocks
from logclass.logarith import ANN_ELL_DIVIDES_H, log_class_group, log_divisor, log_unit_certificate
from logclass.mirror import reflect, wild_kernel_quotient
from logclass.padic import PadicNum, ZmodMatrix, hensel_sqrt, iwasawa_log, snf_mod, teichmuller
from logclass.quadfield import field_init
from logclass.scanner import nontrivial_primes, smallest_nontrivial
from logclass.seo import SexticUnitData, negative_control, norm_index, norm_index_of, verify_log_unit
from oracles import group_structure_brute, v

WORKERS = os.cpu_count() or 1

TABLE = {-1: 29789, -5: 5881, -7: 19531, -11: 5, -13: 113}
MINUS3_SHORT = [13, 181, 2521]
MINUS3_LONG = [13, 181, 2521, 76543, 489061]
QUICK_LIMIT_S = 1.0
SLOW_LIMIT_S = 600.0
MINUS3_SHORT_LIMIT_S = 30.0
MINUS3_LONG_LIMIT_S = 900.0


@pytest.fixture
def report(capsys):
    def emit(name, ok, detail):
        with capsys.disabled():
            print(f"\nACCEPTANCE {'PASS' if ok else 'FAIL'} | {name} | {detail}")
        return ok
    return emit


def _cyclic_of_order_ell(rec):
    return rec is not None and rec.invariants == (1,) and rec.order == rec.ell


def test_table_reproduction(report):
    found, times = {}, {}
    for d in TABLE:
        t0 = time.perf_counter()
        rec = smallest_nontrivial(d, 30000, coprime_to_h=True, workers=WORKERS)
        times[d] = time.perf_counter() - t0
        found[d] = rec
    values_ok = all(found[d] is not None and found[d].ell == ell and _cyclic_of_order_ell(found[d])
                    for d, ell in TABLE.items())
    quick_ok = times[-11] < QUICK_LIMIT_S and times[-13] < QUICK_LIMIT_S
    slow = times[-1] + times[-5] + times[-7]
    ok = values_ok and quick_ok and slow < SLOW_LIMIT_S
    detail = ", ".join(f"d={d}: ell={found[d].ell if found[d] else None}" for d in TABLE)
    detail += f"; times -11/-13: {times[-11]:.2f}s/{times[-13]:.2f}s, -1/-5/-7 total {slow:.1f}s"
    assert report("table reproduction (h_K coprime cases)", ok, detail)


def test_minus_three_list(report):
    t0 = time.perf_counter()
    short = nontrivial_primes(-3, 3000, workers=WORKERS)
    t_short = time.perf_counter() - t0
    t0 = time.perf_counter()
    long = nontrivial_primes(-3, 500_000, workers=WORKERS)
    t_long = time.perf_counter() - t0
    ok = ([r.ell for r in short] == MINUS3_SHORT and [r.ell for r in long] == MINUS3_LONG
          and all(_cyclic_of_order_ell(r) for r in long)
          and t_short < MINUS3_SHORT_LIMIT_S and t_long < MINUS3_LONG_LIMIT_S)
    detail = (f"<=3000: {[r.ell for r in short]} in {t_short:.1f}s; "
              f"<=5e5: {[r.ell for r in long]} in {t_long:.1f}s")
    assert report("Q(sqrt -3) nontrivial primes", ok, detail)


def test_calibration_minus_31(report):
    """Both facts asserted separately; the literal criterion is reported as found.

    The criterion asks for 227 as the smallest nontrivial ell prime to h = 3.
    Scans include ell = 2, and at ell = 2 the group is Z/2: a 2-adic genus
    computation (see test_logarith.test_two_adic_genus_oracle_minus_31)
    shows the 2-class groups of 2-ideals in the cyclotomic Z_2-layers have
    exactly 2 ambiguous classes at every level, so this is not an artifact of
    the degree normalization. 227 is the smallest odd such prime.
    """
    K = field_init(-31)
    first = smallest_nontrivial(-31, 30000, coprime_to_h=True, workers=WORKERS)
    odd = smallest_nontrivial(-31, 30000, coprime_to_h=True, ell_min=3, workers=WORKERS)
    G3 = log_class_group(K, 3)
    ell3_ok = G3.stable and G3.order == 3 and ANN_ELL_DIVIDES_H in G3.annotations
    odd_ok = odd is not None and odd.ell == 227 and _cyclic_of_order_ell(odd)
    literal_ok = first is not None and first.ell == 227 and first.order == 227
    detail = (f"smallest ell prime to h_K: {first.ell} (order {first.order}), expected 227; "
              f"smallest odd: {odd.ell} (order {odd.order}); "
              f"ell=3: order {G3.order}, flagged '{ANN_ELL_DIVIDES_H}'")
    report("calibration probe d=-31", literal_ok and ell3_ok and odd_ok, detail)
    assert ell3_ok, "ell = 3 must be order 3 and carry the calibration flag"
    assert odd_ok, "227 must be the smallest odd nontrivial prime prime to h_K"
    assert literal_ok, "ell = 2 is nontrivial (order 2), so 227 is not the smallest prime to h_K"


def test_ell_adic_oracles(report):
    log3_2 = iwasawa_log(PadicNum.from_int(2, 3, 4)).residue() % 81
    log5_7 = iwasawa_log(PadicNum.from_int(7, 5, 3)).residue() % 125
    omega7 = teichmuller(7, 5, 3).residue()
    root = hensel_sqrt(-3, 13, 3).residue()
    ok = log3_2 == 24 and log5_7 == 100 and omega7 == 57 and root in (2073, 2197 - 2073)
    detail = f"Log_3(2)={log3_2} mod 81, Log_5(7)={log5_7} mod 125, omega(7)={omega7} mod 125, sqrt(-3)={root} mod 2197"
    assert report("ell-adic oracles", ok, detail)


def _naive_flat_verdict(m=2):
    """Flat residues mod 13^m for (d=-3, ell=13): strip 13 from the residue of eta,
    then read nu = -Log(u)/13 off u^12 - 1. Returns True when it calls the group nontrivial."""
    ell = 13
    mod = ell**m
    r = next(s for s in range(mod) if (s * s + 3) % mod == 0 and s % ell == 6)
    x = (7 + r) * pow(2, -1, mod) % mod  # (7 + sqrt -3)/2 at the place of 13
    u = x
    while u % ell == 0:
        u //= ell  # the flat representation drops a digit here
    log_times_12 = (pow(u, ell - 1, mod) - 1) % mod
    nu_times_12 = log_times_12 // ell
    return nu_times_12 % ell == 0


def test_precision_regression(report):
    naive_nontrivial = _naive_flat_verdict()
    G = log_class_group(field_init(-3), 13)
    ok = (not naive_nontrivial) and G.stable and G.invariants == (1,)
    detail = (f"flat residues at m=2: {'nontrivial' if naive_nontrivial else 'trivial'}; "
              f"tracked: invariants {list(G.invariants)} certified at m={G.certified_at}")
    assert report("precision regression d=-3, ell=13", ok, detail)


def _det_divisor_structure(rows, p, m):
    """Cokernel of rows in (Z/p^m)^2 from determinantal divisors of [rows; p^m I]."""
    M = [list(r) for r in rows] + [[p**m, 0], [0, p**m]]
    d1 = 0
    for r in M:
        for x in r:
            d1 = math.gcd(d1, x)
    d2 = 0
    for a, b in itertools.combinations(M, 2):
        d2 = math.gcd(d2, a[0] * b[1] - a[1] * b[0])
    e1 = min(v(d1, p), m)
    e2 = min(v(d2, p) - v(d1, p), m)
    return sorted(e for e in (e1, e2) if e)


def _snf_exhaustive():
    """Every instance with ambient rank <= 2, m <= 2, ell in {3, 5}.

    Subgroups of (Z/ell^m)^2 need at most two generators, so one- and
    two-row matrices cover all relation lattices. Instances too many for
    coset enumeration use determinantal divisors, themselves checked
    against coset enumeration on a random sample.
    """
    rng = random.Random(5)
    for _ in range(300):
        rows = [[rng.randrange(25) for _ in range(2)] for _ in range(2)]
        assert _det_divisor_structure(rows, 5, 2) == group_structure_brute(rows, 5, 2, 2)
    count = 0
    for p in (3, 5):
        for m in (1, 2):
            mod = p**m
            for cols in (1, 2):
                for nrows in (1, 2):
                    big = mod ** (cols * nrows) > 10**4
                    for flat in itertools.product(range(mod), repeat=cols * nrows):
                        rows = [list(flat[i * cols:(i + 1) * cols]) for i in range(nrows)]
                        got = snf_mod(ZmodMatrix.build(rows, p, m, cols=cols))
                        if big:
                            want = _det_divisor_structure(rows, p, m)
                        else:
                            want = group_structure_brute(rows, p, m, cols)
                        if got != want:
                            return False, count
                        count += 1
    return True, count


def test_property_suites(report):
    from test_logarith import _random_s_units

    # product formula over random S-units
    n_units = 0
    for d, ell in [(-3, 13), (-11, 5), (-31, 3), (13, 3), (-5, 3), (257, 3), (-7, 2), (-1, 5)]:
        K = field_init(d)
        for x, S in _random_s_units(random.Random(d * 7 + ell), K, ell, 65):
            D = log_divisor(K, x, S, ell, 6)
            assert D.degree.with_absprec(6).is_zero()
            n_units += 1
    # Scolie rank identity on the table fields
    scolie = []
    for d, ell in [(-1, 29789), (-5, 5881), (-7, 19531), (-11, 5), (-13, 113), (-31, 3), (-31, 227), (-3, 13)]:
        K = field_init(d)
        c = log_unit_certificate(K, ell)
        scolie.append(c.delta_G_zero_certified and c.rank_logunits == sum(K.signature))
    # convention invariance
    conv = []
    for d in (-31, -4027, -12067, -3299, 1129, 257, -1, -5, -7, -11, -13, -3):
        for ell in (2, 3, 5, 7, 13):
            K = field_init(d)
            a = log_class_group(K, ell, convention="std", method="full")
            b = log_class_group(K, ell, convention="unit-perturbed", method="full")
            conv.append(a.stable and b.stable and a.invariants == b.invariants)
    snf_ok, n_snf = _snf_exhaustive()
    ok = n_units >= 500 and all(scolie) and all(conv) and snf_ok
    detail = (f"product formula on {n_units} S-units; Scolie {sum(scolie)}/{len(scolie)}; "
              f"conventions {sum(conv)}/{len(conv)}; SNF {n_snf} instances {'agree' if snf_ok else 'DISAGREE'}")
    assert report("property suites", ok, detail)


def test_lambda_module_suite(report):
    results = []
    for seed in range(24):
        ell = (3, 5)[seed % 2]
        depth = 4 if ell == 3 else 3
        rep = check_cap_theorem(random_blocks(random.Random(1000 + seed), ell, depth), depth=depth)
        results.append((rep.verdict, rep.n0, rep.s))
    passes = sum(1 for v, _, _ in results if v == "pass")
    probe = check_cap_theorem(build("L:3:D=3", depth=3), depth=3)
    inf = check_cap_theorem(build("Z:3", depth=3), depth=3)
    ok = passes == len(results) and probe.verdict == "informational" and inf.verdict == "skipped"
    idx = sorted({(n0, s) for _, n0, s in results if n0 is not None})
    detail = (f"{passes}/{len(results)} random F+XL mixes pass, (n0, s) seen {idx}; "
              f"Lambda/3 probe: {probe.verdict}; Z_3 probe: {inf.verdict}")
    assert report("Lambda-module capitulation suite", ok, detail)


def test_seo_counterexample(report):
    data = SexticUnitData.load()
    rep = norm_index(data)
    neg = norm_index_of(negative_control())
    log_unit = verify_log_unit(257, 3)
    ok = log_unit and rep.index % 3 == 0 and rep.index > 0 and neg.index == 1
    detail = f"verify_log_unit={log_unit}; dataset index {rep.index}; negative control index {neg.index}"
    assert report("Q(sqrt 257) at ell=3: eps not a norm of a 3-unit", ok, detail)


def test_mirror_suite(report):
    special = all(wild_kernel_quotient(-3, i).group == () for i in range(1, 13))
    rng = random.Random(9)
    ds = []
    while len(ds) < 20:
        d = rng.randrange(-2000, 2000)
        if d in (0, 1, -3) or any(e > 1 for e in __import__("sympy").factorint(abs(d)).values()):
            continue
        ds.append(d)
    inv = all(reflect(reflect(d)) == d for d in ds)
    parity = all(wild_kernel_quotient(d, i).group == wild_kernel_quotient(d, i + 2).group
                 for d in ds for i in (1, 2))
    back = all(wild_kernel_quotient(reflect(d), 1).group == wild_kernel_quotient(d, 2).group for d in ds)
    ok = special and inv and parity and back
    detail = f"d=-3 trivial for i=1..12: {special}; involution {inv}; parity {parity}; mirror of mirror {back} (20 fields)"
    assert report("wild kernel quotients via the mirror", ok, detail)
