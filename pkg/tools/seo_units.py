"""
Search for a system of 3-units of k1 = Q(sqrt 257, theta) and write the
dataset consumed by ``logclass.seo``.

Elements of small norm are produced by LLL on weighted Minkowski
embeddings of the order Z[theta] (x) Z[(1 + sqrt 257)/2] (the maximal order:
the discriminants 81 and 257 are coprime). Quotients of elements
generating the same ideal are units; elements of norm +-3^t are 3-units.
A subset whose cubic residue characters are independent over F_3 is kept;
``logclass.seo.saturation_certificate`` re-checks that on load.

Usage: python3 tools/seo_units.py [--seed N] [--rounds N] [--out PATH]
"""

from __future__ import annotations

import argparse
import json
import random
from fractions import Fraction
from pathlib import Path

import mpmath
from sympy import ZZ
from sympy.polys.matrices import DomainMatrix

from logclass.seo import (
    D_SEO,
    SEO_DATASET,
    Sextic,
    SexticUnitData,
    absolute_norm,
    character_matrix,
    f3_rank,
)

HALF = Fraction(1, 2)


def basis(d=D_SEO):
    """theta^i omega^j as Sextic elements."""
    out = []
    for i in range(3):
        for j in range(2):
            c = [[0, 0], [0, 0], [0, 0]]
            c[i] = [1, 0] if j == 0 else [HALF, HALF]
            out.append(Sextic.make(c, d))
    return out


def coords_to_elem(v, B):
    x = Sextic.make([[0, 0], [0, 0], [0, 0]])
    for a, b in zip(v, B):
        if a:
            x = x + Sextic.make([[a * p, a * q] for p, q in b.c])
    return x


def in_order(x: Sextic) -> bool:
    """x in Z[theta] (x) Z[omega]: coordinates a + b sqrt d with 2a, 2b, a - b integral."""
    for a, b in x.c:
        if (2 * a).denominator != 1 or (2 * b).denominator != 1 or (a - b).denominator != 1:
            return False
    return True


def small_elements(rng, rounds, dps=60):
    B = basis()
    emb = [b.embeddings(dps) for b in B]
    found = {}
    with mpmath.workdps(dps):
        for _ in range(rounds):
            lam = [rng.gauss(0, 2.5) for _ in range(6)]
            mean = sum(lam) / 6
            scale = [mpmath.exp(x - mean) for x in lam]
            rows = [[ZZ(int(mpmath.nint(e * s * 10**25))) for e, s in zip(emb[i], scale)] for i in range(6)]
            M = DomainMatrix(rows, (6, 6), ZZ)
            _, T = M.lll_transform()
            for r in T.to_Matrix().tolist():
                x = coords_to_elem([int(v) for v in r], B)
                if x.is_zero():
                    continue
                n = abs(absolute_norm(x))
                if n <= 2000:
                    found.setdefault(n, []).append(x)
    return found


def units_from(found):
    units = []
    for n, xs in found.items():
        k = n
        while k % 3 == 0:
            k //= 3
        if k == 1:
            units.extend(xs)
            continue
        base = xs[0]
        for y in xs[1:]:
            q = y * base.inverse()
            if in_order(q) and in_order(base * y.inverse()):
                units.append(q)
    return units


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--rounds", type=int, default=200)
    ap.add_argument("--out", default=str(SEO_DATASET))
    args = ap.parse_args(argv)
    rng = random.Random(args.seed)
    from logclass.quadfield import field_init

    eps = Sextic.from_k(field_init(D_SEO).fund_unit)
    theta = Sextic.theta()
    one = Sextic.make([[1, 0], [0, 0], [0, 0]])
    seeds = [eps, theta, theta.sigma(), theta + one]
    cands = seeds + units_from(small_elements(rng, args.rounds))
    chosen = []
    for u in cands:
        trial = chosen + [u]
        if f3_rank(character_matrix(trial)) == len(trial):
            chosen = trial
        if len(chosen) == 6:
            break
    print(f"{len(cands)} candidate units, F_3-rank {len(chosen)}")
    if len(chosen) < 6:
        raise SystemExit("not enough independent units mod cubes; raise --rounds")
    prov = (
        "Generated by tools/seo_units.py "
        f"(seed {args.seed}, {args.rounds} LLL rounds on weighted embeddings of "
        "Z[theta] (x) Z[(1+sqrt 257)/2]); entries: eps = 16+sqrt 257, theta, sigma(theta), "
        "theta+1 (generator of the prime above 3) and relative units found by the search. "
        "Cubic residue characters at split primes are independent over F_3, so the "
        "entries are multiplicatively independent and generate a subgroup of the "
        "3-units of index prime to 3 (re-checked on load by saturation_certificate)."
    )
    data = SexticUnitData(D_SEO, tuple(chosen), prov)
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    Path(args.out).write_text(json.dumps(data.to_json(), indent=1) + "\n")
    print("wrote", args.out)


if __name__ == "__main__":
    main()
