"""
Logarithmic valuations, divisors and the ell-group of logarithmic classes.

Conventions. For a place p not above ell we take deg p = Log_ell(Np) and
nu_p = v_p. For p above ell, deg p = ell**k_p where ell**k_p Z_ell is the
image of Log_ell o N_{K_p/Q_ell}; then nu_p(x) = -Log_ell(N x) / deg p.

Reduction lemma. Let S contain the places above ell and finitely many
places whose classes, together with those above ell, generate the
ell-Sylow subgroup of the class group. Then every degree-zero divisor is
equivalent to one supported on S, and a principal divisor supported on S
comes from an S-unit. Hence Cl~ is the quotient of the degree-zero
sublattice of (+)_{p in S} Z_ell p by the divisors of the S-units.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction

from .padic import (
    PadicNum,
    PrecisionError,
    ZmodMatrix,
    iwasawa_log,
    snf_mod,
    split_power,
)
from .quadfield import (
    INERT,
    RAMIFIED,
    RATIONAL,
    SPLIT_FIRST,
    SPLIT_SECOND,
    PlaceTag,
    QuadElem,
    embed,
    prime_power_generator,
    splitting,
    tame_valuation,
)

log = logging.getLogger(__name__)

CONVENTIONS = ("std", "unit-perturbed")
DEFAULT_CONVENTION = "std"
START_PREC, STEP_PREC, MAX_PREC = 4, 2, 40

ANN_CSL = "trivial-with-mu_2ell: Gross-Kuz'min and Leopoldt hold in every layer K_n"
ANN_ELL_DIVIDES_H = "calibration-class: ell divides h_K"
ANN_UNSTABLE = "unstable: precision cap reached"


def _is_split(place: PlaceTag) -> bool:
    return place.kind in (SPLIT_FIRST, SPLIT_SECOND, RATIONAL)


def _tame_scale(convention: str, place: PlaceTag) -> int:
    """Unit of Z_ell multiplying deg p (and dividing nu_p) for tame places."""
    if convention == "std":
        return 1
    if convention == "unit-perturbed":
        return place.p
    raise ValueError(f"unknown convention {convention!r}")


# ---------------------------------------------------------------------------
# data


@dataclass(frozen=True)
class LogPlaceData:
    place: PlaceTag
    deg: PadicNum
    nu_kind: str  # "classical" or "logarithmic"


@dataclass(frozen=True)
class LogDivisor:
    support: tuple[tuple[PlaceTag, PadicNum], ...]
    degree: PadicNum

    def coefficient(self, place: PlaceTag) -> PadicNum | None:
        for p, c in self.support:
            if p == place:
                return c
        return None


@dataclass(frozen=True)
class LogClassGroup:
    d: int
    ell: int
    invariants: tuple[int, ...]
    certified_at: int
    stable: bool
    convention: str = DEFAULT_CONVENTION
    annotations: tuple[str, ...] = ()

    @property
    def order(self) -> int:
        return self.ell ** sum(self.invariants)

    @property
    def trivial(self) -> bool:
        return not self.invariants

    def to_record(self) -> dict:
        return {
            "d": self.d,
            "ell": self.ell,
            "invariants": list(self.invariants),
            "order": self.order,
            "stable": self.stable,
            "certified_at": self.certified_at,
            "convention": self.convention,
            "annotations": list(self.annotations),
        }


@dataclass(frozen=True)
class LogUnitCertificate:
    rank_logunits: int
    delta_G_zero_certified: bool
    naive_rank: int | None
    ell_unit_rank: int
    certified_at: int
    not_computed: tuple[str, ...] = ("mu_K^loc", "delta_K^L")

    def to_record(self) -> dict:
        return {
            "rank_logunits": self.rank_logunits,
            "delta_G_zero_certified": self.delta_G_zero_certified,
            "naive_rank": self.naive_rank,
            "naive_rank_status": "certified" if self.naive_rank is not None else "inconclusive",
            "ell_unit_rank": self.ell_unit_rank,
            "certified_at": self.certified_at,
            "not_computed": list(self.not_computed),
        }


# ---------------------------------------------------------------------------
# local pieces


def _wild_exponent(K, place: PlaceTag, ell: int) -> int:
    """k_p with Log(N(K_p^x)) = ell^k_p Z_ell, from local norm samples.

    Log of a principal unit of Z_ell lies in ell Z_ell (4 Z_2 for ell = 2),
    and norms contain all squares of Z_ell^x, so the image lies between
    ell^floor and ell^(floor+1) (2^3 for ell = 2). Norms of residues modulo
    a large enough power decide which.
    """
    floor = 2 if ell == 2 else 1
    prec = floor + 3
    if _is_split(place):
        norms = [1 + ell, 1 + 2 * ell, 3, 5, 7]
    else:
        box = 8 if ell == 2 else 3
        norms = [(1 + ell) ** 2] + [a * a - K.d * b * b for a in range(box) for b in range(box)]
    best = floor + 1
    for n in norms:
        if n == 0:
            continue
        lg = iwasawa_log(PadicNum.from_int(n, ell, prec))
        if not lg.is_zero():
            best = min(best, lg.val)
        if best == floor:
            break
    return best


def place_degree(K, place: PlaceTag, ell: int, m: int, convention: str = DEFAULT_CONVENTION) -> PadicNum:
    """deg p at absolute precision m (exact ell-power at places above ell)."""
    if m < 2:
        raise ValueError("m must be >= 2")
    if place.p == ell:
        k = _wild_exponent(K, place, ell)
        return PadicNum.from_int(ell**k, ell, m)
    norm = place.p**2 if place.kind == INERT else place.p
    deg = iwasawa_log(PadicNum.from_int(norm, ell, m))
    return deg * _tame_scale(convention, place)


def local_norm_log(K, x, place: PlaceTag, ell: int, absprec: int) -> PadicNum:
    """Log_ell of the local norm of x at a place above ell, to absprec digits."""
    if _is_split(place):
        if place.kind == RATIONAL:
            return iwasawa_log(PadicNum.from_rational(x, ell, absprec))
        v = tame_valuation(K, x, place)
        m = absprec + max(v, 0) + 1
        while True:
            local = embed(x, place, m)
            if local.relprec >= absprec:
                return iwasawa_log(local).with_absprec(absprec)
            m += absprec - local.relprec
    n = x.norm() if isinstance(x, QuadElem) else Fraction(x) ** 2
    return iwasawa_log(PadicNum.from_rational(n, ell, absprec))


def log_valuation(K, x, place: PlaceTag, ell: int, m: int,
                  convention: str = DEFAULT_CONVENTION) -> PadicNum:
    """nu_p(x): classical valuation away from ell, -Log N(x)/deg p above ell."""
    if (isinstance(x, QuadElem) and x.is_zero()) or (not isinstance(x, QuadElem) and x == 0):
        raise ValueError("valuation of zero")
    if place.p != ell:
        v = tame_valuation(K, x, place)
        return PadicNum.from_rational(Fraction(v, _tame_scale(convention, place)), ell, m)
    k = _wild_exponent(K, place, ell)
    lg = local_norm_log(K, x, place, ell, m + k)
    return -lg / PadicNum.from_int(ell**k, ell, m + k)


def log_divisor(K, x, S, ell: int, m: int, convention: str = DEFAULT_CONVENTION) -> LogDivisor:
    """Logarithmic divisor of an S-unit x; its degree is asserted to vanish."""
    _check_s_unit(K, x, S)
    support = []
    degree = PadicNum.zero(ell, m)
    first = True
    for place in S:
        c = log_valuation(K, x, place, ell, m, convention)
        deg = place_degree(K, place, ell, m + 2, convention)
        support.append((place, c))
        term = c * deg
        degree = term if first else degree + term
        first = False
    degree = degree.with_absprec(m)
    if not degree.is_zero():
        raise ArithmeticError(f"product formula violated: degree {degree} for {x}")
    return LogDivisor(tuple(support), degree)


def _check_s_unit(K, x, S) -> None:
    n = x.norm() if isinstance(x, QuadElem) else Fraction(x)
    primes = {p.p for p in S}
    for part in (n.numerator, n.denominator):
        part = abs(part)
        for p in primes:
            while part % p == 0:
                part //= p
        if part != 1:
            raise ValueError(f"{x} is not an S-unit for S = {sorted(primes)}")
    # split primes in S must carry both conjugates unless x is supported on one
    for p in S:
        if p.kind in (SPLIT_FIRST, SPLIT_SECOND):
            for q in K.places_above(p.p):
                if q.kind != p.kind and all(s.kind != q.kind or s.p != q.p for s in S):
                    if tame_valuation(K, x, PlaceTag(q.p, q.kind)) != 0:
                        raise ValueError(f"{x} has support outside S at {q.label()}")


# ---------------------------------------------------------------------------
# S-unit setup


@dataclass
class _Setup:
    """Exact data for one (K, ell): support S and S-unit relation generators."""

    K: object
    ell: int
    wild: list[PlaceTag]
    tame: list[PlaceTag]
    # each relation: (exponent vector over S, generator alpha, divisor hprime)
    relations: list[tuple[tuple[int, ...], object, int]] = field(default_factory=list)
    units: list[object] = field(default_factory=list)

    @property
    def S(self) -> list[PlaceTag]:
        return self.wild + self.tame


_SETUP_CACHE: dict[tuple[int, int, bool], _Setup] = {}


def _ell_sylow_closure(K, keys, hprime: int):
    """Subgroup of the ell-Sylow generated by the hprime-th powers of keys."""
    e = K.identity_key()
    seen = {e}
    frontier = [e]
    gens = [K.key_pow(k, hprime) for k in keys]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = K.key_mul(x, g)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return seen


def _ell_relations(K, places, ell: int, hprime: int):
    """Triangular generators of ker(Z_ell^places -> Cl_ell)."""
    e = K.identity_key()
    H = {e: ()}
    rels = []
    for i, place in enumerate(places):
        g = K.key_pow(K.place_class_key(place), hprime)
        k, x = 1, g
        while x not in H:
            x = K.key_mul(x, g)
            k += 1
        vec = [-c for c in H[x]] + [k] + [0] * (len(places) - i - 1)
        rels.append(tuple(vec))
        if k > 1:
            newH = {}
            power = e
            for j in range(k):
                for elt, v in H.items():
                    newH[K.key_mul(elt, power)] = v + (j,)
                power = K.key_mul(power, g)
            H = newH
        else:
            H = {elt: v + (0,) for elt, v in H.items()}
    return rels


def _setup(K, ell: int, wild_only: bool = False) -> _Setup:
    key = (K.d, ell, wild_only)
    st = _SETUP_CACHE.get(key)
    if st is not None:
        return st
    wild = splitting(K, ell)
    st = _Setup(K, ell, wild, [])
    if K.is_rational:
        st.relations.append(((1,), Fraction(ell), 1))
        _SETUP_CACHE[key] = st
        return st
    v, hprime = split_power(K.h, ell)
    if v and not wild_only:
        target = ell**v
        keys = [K.place_class_key(p) for p in wild]
        q = 1
        from sympy import nextprime

        while len(_ell_sylow_closure(K, keys, hprime)) < target:
            q = nextprime(q)
            if q == ell or len(K.places_above(q)) != 2:
                continue
            pair = K.places_above(q)
            st.tame.extend(pair)
            keys.extend(K.place_class_key(p) for p in pair)
    S = st.S
    for vec in _ell_relations(K, S, ell, hprime):
        factors = [(p, hprime * c) for p, c in zip(S, vec) if c]
        if len(factors) == 1 and factors[0][0].kind in (SPLIT_FIRST, SPLIT_SECOND, RAMIFIED) \
                and factors[0][0].p == ell and K.disc < 0 and factors[0][1] > 0:
            # pure power of a prime above ell: the norm-equation route
            place, e = factors[0]
            hp, eta = prime_power_generator(K, ell, place)
            alpha = eta ** (e // hp) if e % hp == 0 else K.ideal_product_generator(factors)
        else:
            alpha = K.ideal_product_generator(factors)
        st.relations.append((vec, alpha, hprime))
    if K.is_real:
        st.units.append(K.fund_unit)
    _SETUP_CACHE[key] = st
    return st


def _relation_rows(st: _Setup, m: int, convention: str):
    """Divisor vectors of the S-unit generators at absolute precision m."""
    K, ell, S = st.K, st.ell, st.S
    ks = {p: _wild_exponent(K, p, ell) for p in st.wild}
    rows = []

    def wild_coord(x, place, scale):
        k = ks[place]
        lg = local_norm_log(K, x, place, ell, m + k)
        val = -lg / PadicNum.from_int(ell**k * scale, ell, m + k)
        if val.absprec < m:
            raise PrecisionError("wild coordinate lost precision")
        return val

    for vec, alpha, hprime in st.relations:
        row = []
        for place, c in zip(S, vec):
            if place.p == ell:
                row.append(wild_coord(alpha, place, hprime))
            else:
                row.append(PadicNum.from_rational(
                    Fraction(c, _tame_scale(convention, place)), ell, m))
        rows.append(row)
    for u in st.units:
        row = []
        for place in S:
            row.append(wild_coord(u, place, 1) if place.p == ell else PadicNum.zero(ell, m))
        rows.append(row)
    return rows


def _degree_vector(st: _Setup, m: int, convention: str) -> list[PadicNum]:
    return [place_degree(st.K, p, st.ell, m, convention) for p in st.S]


def _pivot_index(degs: list[PadicNum]) -> int:
    """Coordinate whose degree has minimal (certified) valuation."""
    best = None
    for i, g in enumerate(degs):
        v = g.val
        if best is None or v < best[0]:
            best = (v, i, g.is_zero())
    if best[2]:
        raise PrecisionError("degree valuations not certified")
    for i, g in enumerate(degs):
        if g.is_zero() and g.val <= best[0]:
            raise PrecisionError("degree valuations not certified")
    return best[1]


def _residue(x: PadicNum, m: int) -> int:
    x = x.with_absprec(m)
    return 0 if x.is_zero() else x.residue()


def class_group_at(K, ell: int, m: int, convention: str = DEFAULT_CONVENTION) -> list[int]:
    """Exponents of Cl~_K computed at absolute precision m (may be saturated)."""
    if K.is_rational:
        return []
    st = _setup(K, ell)
    rows = _relation_rows(st, m, convention)
    degs = _degree_vector(st, m + 2, convention)
    for row in rows:
        deg = sum((c * g for c, g in zip(row[1:], degs[1:])), row[0] * degs[0])
        if not deg.with_absprec(m).is_zero():
            raise ArithmeticError(f"principal divisor of nonzero degree {deg} in {K}, ell={ell}")
    j = _pivot_index(degs)
    n = len(st.S) - 1
    if n == 0:
        return []
    mat = [[_residue(c, m) for i, c in enumerate(row) if i != j] for row in rows]
    return snf_mod(ZmodMatrix.build(mat, ell, m, cols=n))


# ---------------------------------------------------------------------------
# fast path: ell split, ell prime to h


def split_fast_exponent(K, ell: int, m: int) -> list[int]:
    """Cl~ for split ell not dividing h: Z_ell modulo the nu-values of eta (and eps)."""
    place = splitting(K, ell)[0]
    hp, eta = prime_power_generator(K, ell, place)
    k = _wild_exponent(K, place, ell)
    vals = [-local_norm_log(K, eta, place, ell, m + k) / PadicNum.from_int(ell**k * hp, ell, m + k)]
    if K.is_real:
        vals.append(-local_norm_log(K, K.fund_unit, place, ell, m + k)
                    / PadicNum.from_int(ell**k, ell, m + k))
    nonzero = [x.val for x in vals if not x.is_zero()]
    e = min(nonzero) if nonzero else m
    e = min(e, m)
    return [e] if e > 0 else []


def _method_for(K, ell: int) -> str:
    if K.is_rational:
        return "trivial"
    places = splitting(K, ell)
    if K.h % ell == 0:
        return "full"
    if len(places) == 1:
        return "trivial"
    return "fast"


def _annotations(K, ell: int, inv, stable: bool) -> tuple[str, ...]:
    notes = []
    if not K.is_rational and K.h % ell == 0:
        notes.append(ANN_ELL_DIVIDES_H)
    if stable and not inv and _contains_mu_2ell(K, ell):
        notes.append(ANN_CSL)
    if not stable:
        notes.append(ANN_UNSTABLE)
    return tuple(notes)


def _contains_mu_2ell(K, ell: int) -> bool:
    if K.is_rational:
        return False
    return (ell == 2 and K.d == -1) or (ell == 3 and K.d == -3)


def log_class_group(K, ell: int, convention: str = DEFAULT_CONVENTION, method: str = "auto",
                    start: int = START_PREC, step: int = STEP_PREC, cap: int = MAX_PREC) -> LogClassGroup:
    """Cl~_K with two-point precision certification (m and m + step)."""
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}")
    if method == "auto":
        method = _method_for(K, ell)
    if method == "trivial":
        return LogClassGroup(K.d, ell, (), start, True, convention, _annotations(K, ell, (), True))

    def compute(m):
        if method == "fast":
            return split_fast_exponent(K, ell, m)
        return class_group_at(K, ell, m, convention)

    prev = None
    m = start
    while m <= cap:
        try:
            cur = compute(m)
        except PrecisionError as exc:
            log.debug("d=%s ell=%s m=%s: %s", K.d, ell, m, exc)
            prev = None
            m += step
            continue
        if prev is not None and prev[1] == cur and not any(e >= prev[0] for e in prev[1]) \
                and not any(e >= m for e in cur):
            inv = tuple(cur)
            return LogClassGroup(K.d, ell, inv, prev[0], True, convention,
                                 _annotations(K, ell, inv, True))
        prev = (m, cur)
        m += step
    inv = tuple(prev[1]) if prev else ()
    return LogClassGroup(K.d, ell, inv, prev[0] if prev else cap, False, convention,
                         _annotations(K, ell, inv, False))


def is_log_principal(K, ell: int) -> bool:
    G = log_class_group(K, ell)
    if not G.stable:
        raise PrecisionError(f"unstable logarithmic class group for d={K.d}, ell={ell}")
    return G.trivial


# ---------------------------------------------------------------------------
# logarithmic units


def log_unit_certificate(K, ell: int, start: int = START_PREC, cap: int = MAX_PREC) -> LogUnitCertificate:
    """Rank of the logarithmic units inside the ell-adified ell-units."""
    r, c = K.signature
    wild = splitting(K, ell)
    ell_rank = len(wild) + r + c - 1
    st = _setup(K, ell, wild_only=True)
    m = start
    rank = 0
    while True:
        rows = _relation_rows(st, m, DEFAULT_CONVENTION)
        mat = [[_residue(x, m) for x in row] for row in rows]
        exps = snf_mod(ZmodMatrix.build(mat, ell, m, cols=len(wild)))
        # certified rank = columns minus saturated cokernel directions
        rank = len(wild) - sum(1 for e in exps if e >= m)
        if rank == len(wild) - 1 or m >= cap:
            break
        m += STEP_PREC
    delta_zero = rank == len(wild) - 1
    naive = _naive_rank(K, ell, wild, m, ell_rank)
    return LogUnitCertificate(ell_rank - rank, delta_zero, naive, ell_rank, m)


def _naive_rank(K, ell, wild, m, ell_rank):
    if len(wild) == 1:
        # single place above ell: N(x) = +-ell^t for every ell-unit, so Log N = 0
        return ell_rank
    place = wild[0]
    x = K.fund_unit if K.is_real else prime_power_generator(K, ell, place)[1]
    lg = local_norm_log(K, x, place, ell, m)
    return 1 if not lg.is_zero() else None
