"""
The first cyclotomic 3-layer of Q(sqrt 257) and the norm index of its 3-units.

Elements of k1 = k(theta), theta^3 - 3 theta + 1 = 0, k = Q(sqrt d), are
3 x 2 arrays c[i][j] of rationals standing for sum c[i][j] theta^i sqrt(d)^j.
The generator of Gal(k1/k) sends theta to theta^2 - 2.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import mpmath

from .logarith import log_valuation
from .padic import hensel_sqrt, split_power
from .quadfield import QuadElem, field_init, splitting

D_SEO = 257
ELL = 3
BASIS = "1,theta,theta2 x 1,sqrtd"
DATA_DIR = Path(__file__).parent / "data"
SEO_DATASET = DATA_DIR / "seo_257_units.json"
SEARCH_BOUND = 64


def _frac(x) -> Fraction:
    if isinstance(x, (list, tuple)):
        return Fraction(int(x[0]), int(x[1]))
    return Fraction(x)


@dataclass(frozen=True)
class Sextic:
    """An element of k1 in the basis theta^i sqrt(d)^j."""

    c: tuple[tuple[Fraction, Fraction], ...]
    d: int = D_SEO

    @classmethod
    def make(cls, rows, d: int = D_SEO) -> Sextic:
        rows = [tuple(_frac(x) for x in r) for r in rows]
        if len(rows) != 3 or any(len(r) != 2 for r in rows):
            raise ValueError("need a 3 x 2 coefficient array")
        return cls(tuple(rows), d)

    @classmethod
    def from_flat(cls, flat, d: int = D_SEO) -> Sextic:
        flat = list(flat)
        if len(flat) != 6:
            raise ValueError("need six coefficients")
        return cls.make([flat[0:2], flat[2:4], flat[4:6]], d)

    @classmethod
    def from_k(cls, x: QuadElem) -> Sextic:
        return cls.make([[Fraction(x.a, x.den), Fraction(x.b, x.den)], [0, 0], [0, 0]], x.d)

    @classmethod
    def theta(cls, d: int = D_SEO) -> Sextic:
        return cls.make([[0, 0], [1, 0], [0, 0]], d)

    def flat(self):
        return [x for r in self.c for x in r]

    def _k(self, i) -> tuple[Fraction, Fraction]:
        return self.c[i]

    def __add__(self, other: Sextic) -> Sextic:
        return Sextic.make([[a + b for a, b in zip(r, s)] for r, s in zip(self.c, other.c)], self.d)

    def __sub__(self, other: Sextic) -> Sextic:
        return Sextic.make([[a - b for a, b in zip(r, s)] for r, s in zip(self.c, other.c)], self.d)

    def __mul__(self, other: Sextic) -> Sextic:
        d = self.d
        prod = [[Fraction(0), Fraction(0)] for _ in range(5)]
        for i, (a1, b1) in enumerate(self.c):
            for j, (a2, b2) in enumerate(other.c):
                prod[i + j][0] += a1 * a2 + d * b1 * b2
                prod[i + j][1] += a1 * b2 + a2 * b1
        # theta^3 = 3 theta - 1, theta^4 = 3 theta^2 - theta
        for k in (4, 3):
            a, b = prod[k]
            prod[k - 2][0] += 3 * a
            prod[k - 2][1] += 3 * b
            prod[k - 3][0] -= a
            prod[k - 3][1] -= b
        return Sextic.make(prod[:3], d)

    def __pow__(self, n: int) -> Sextic:
        if n < 0:
            return self.inverse() ** (-n)
        out = Sextic.make([[1, 0], [0, 0], [0, 0]], self.d)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def sigma(self) -> Sextic:
        """theta -> theta^2 - 2."""
        t = Sextic.make([[-2, 0], [0, 0], [1, 0]], self.d)
        t2 = t * t
        out = Sextic.make([self.c[0], [0, 0], [0, 0]], self.d)
        out = out + Sextic.make([[0, 0], [0, 0], [0, 0]], self.d)
        for coeff, power in ((self.c[1], t), (self.c[2], t2)):
            out = out + _scale(power, coeff)
        return out

    def conj_k(self) -> Sextic:
        """sqrt d -> -sqrt d."""
        return Sextic.make([[a, -b] for a, b in self.c], self.d)

    def inverse(self) -> Sextic:
        n = relative_norm(self)
        other = self.sigma() * self.sigma().sigma()
        inv_n = n.inverse()
        return other * Sextic.from_k(inv_n)

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.c for x in r)

    def embeddings(self, dps: int = 50):
        """The six real images, as mpmath numbers."""
        with mpmath.workdps(dps):
            sq = mpmath.sqrt(self.d)
            out = []
            for k in (1, 2, 4):
                t = 2 * mpmath.cos(2 * mpmath.pi * k / 9)
                for s in (sq, -sq):
                    out.append(sum((mpmath.mpf(a.numerator) / a.denominator
                                    + mpmath.mpf(b.numerator) / b.denominator * s) * t**i
                                   for i, (a, b) in enumerate(self.c)))
            return out


def _scale(x: Sextic, coeff) -> Sextic:
    a, b = coeff
    return x * Sextic.make([[a, b], [0, 0], [0, 0]], x.d)


def relative_norm(x: Sextic) -> QuadElem:
    """N_{k1/k}(x) = x sigma(x) sigma^2(x), as an element of k."""
    s1 = x.sigma()
    y = x * s1 * s1.sigma()
    if any(v != 0 for r in y.c[1:] for v in r):
        raise ArithmeticError(f"relative norm has theta-coordinates: {y.c}")
    a, b = y.c[0]
    den = math.lcm(a.denominator, b.denominator)
    return QuadElem(int(a * den), int(b * den), den, x.d)


def absolute_norm(x: Sextic) -> Fraction:
    return relative_norm(x).norm()


def is_three_unit(x: Sextic) -> bool:
    n = absolute_norm(x)
    if n == 0:
        return False
    for part in (abs(n.numerator), n.denominator):
        if split_power(part, ELL)[1] != 1:
            return False
    return True


# ---------------------------------------------------------------------------
# the logarithmic unit of k


def verify_log_unit(d: int = D_SEO, ell: int = ELL, x: QuadElem | None = None, m: int = 8) -> bool:
    """x (default: the fundamental unit) has trivial logarithmic divisor.

    For a unit the tame part vanishes; at the places above ell the check is
    nu~ = 0, i.e. Log_ell of the local norm vanishes. Non-units of the
    ell-integers fail at a tame place.
    """
    K = field_init(d)
    x = K.fund_unit if x is None else x
    if isinstance(x, int):
        x = K.elem(x)
    n = x.norm()
    outside = 1
    for part in (abs(n.numerator), n.denominator):
        outside *= split_power(part, ell)[1]
    if outside != 1:
        return False
    for place in splitting(K, ell):
        if not log_valuation(K, x, place, ell, m).is_zero():
            return False
    return True


# ---------------------------------------------------------------------------
# datasets


@dataclass(frozen=True)
class SexticUnitData:
    d: int
    units: tuple[Sextic, ...]
    provenance: str

    @classmethod
    def load(cls, path=SEO_DATASET) -> SexticUnitData:
        obj = json.loads(Path(path).read_text())
        return cls.from_json(obj)

    @classmethod
    def from_json(cls, obj: dict, validate: bool = True) -> SexticUnitData:
        if obj.get("basis", BASIS) != BASIS:
            raise ValueError(f"unsupported basis {obj.get('basis')!r}")
        d = int(obj.get("d", D_SEO))
        units = tuple(Sextic.from_flat(u, d) for u in obj["units"])
        data = cls(d, units, obj.get("provenance", ""))
        if validate:
            data.validate()
        return data

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "basis": BASIS,
            "units": [[[x.numerator, x.denominator] for x in u.flat()] for u in self.units],
            "provenance": self.provenance,
        }

    def validate(self, min_units: int = 0) -> None:
        for i, u in enumerate(self.units):
            if not is_three_unit(u):
                raise ValueError(f"entry {i} is not a 3-unit: norm {absolute_norm(u)}")
        if len(self.units) < min_units:
            raise ValueError(f"{len(self.units)} entries, expected at least {min_units}")


# ---------------------------------------------------------------------------
# cubic residue characters


def _cubic_places(d: int, count: int):
    """(q, t, s, z): q = 1 mod 9 split in k, t a root of theta's polynomial,
    s a square root of d, z a primitive cube root of unity mod q."""
    from sympy import nextprime

    out = []
    q = 1
    while len(out) < count:
        q = nextprime(q)
        if q % 9 != 1 or pow(d % q, (q - 1) // 2, q) != 1:
            continue
        root = hensel_sqrt(d, q, 1).residue()
        z = next(pow(a, (q - 1) // 3, q) for a in range(2, q) if pow(a, (q - 1) // 3, q) != 1)
        for t in range(q):
            if (t**3 - 3 * t + 1) % q == 0:
                for sq in (root, q - root):
                    out.append((q, t, sq, z))
    return out[:count]


def _reduce_at(x: Sextic, q: int, t: int, sq: int) -> int | None:
    v = 0
    for i, (a, b) in enumerate(x.c):
        for c, w in ((a, 1), (b, sq)):
            if c.denominator % q == 0:
                return None
            v += c.numerator * pow(c.denominator, -1, q) * w * pow(t, i, q)
    v %= q
    return v or None


def character_matrix(units, places: int = 48, d: int | None = None):
    """Rows: units; columns: cubic residue characters with values in F_3."""
    if not units:
        return []
    d = units[0].d if d is None else d
    rows = [[] for _ in units]
    for q, t, sq, z in _cubic_places(d, places):
        vals = [_reduce_at(u, q, t, sq) for u in units]
        if any(v is None for v in vals):
            continue
        for row, v in zip(rows, vals):
            w = pow(v, (q - 1) // 3, q)
            row.append(0 if w == 1 else 1 if w == z else 2)
    return rows


def f3_rank(rows) -> int:
    A = [list(r) for r in rows]
    rank, col = 0, 0
    ncols = len(A[0]) if A else 0
    while rank < len(A) and col < ncols:
        piv = next((i for i in range(rank, len(A)) if A[i][col] % 3), None)
        if piv is None:
            col += 1
            continue
        A[rank], A[piv] = A[piv], A[rank]
        inv = 1 if A[rank][col] % 3 == 1 else 2
        A[rank] = [x * inv % 3 for x in A[rank]]
        for i in range(len(A)):
            if i != rank and A[i][col] % 3:
                f = A[i][col]
                A[i] = [(x - f * y) % 3 for x, y in zip(A[i], A[rank])]
        rank += 1
        col += 1
    return rank


def saturation_certificate(data: SexticUnitData, rank: int = 6) -> bool:
    """True when the entries have F_3-independent cubic characters.

    Then no nontrivial product of them is a cube or a root of unity, so they
    are independent and, when there are rank(E') = 6 of them, generate a
    subgroup of the 3-units of index prime to 3.
    """
    return len(data.units) >= rank and f3_rank(character_matrix(list(data.units))) >= rank


# ---------------------------------------------------------------------------
# norm index


@dataclass
class NormIndexReport:
    index: int
    divisible_by_3: bool
    decompositions: list[tuple[int, int, int]]  # (sign, a, b): N = sign 3^b eps^a
    complete: bool
    warnings: list[str]

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "divisible_by_3": self.divisible_by_3,
            "decompositions": [list(t) for t in self.decompositions],
            "complete": self.complete,
            "warnings": self.warnings,
        }


def decompose(y: QuadElem, eps: QuadElem, ell: int = ELL, dps: int = 50) -> tuple[int, int, int]:
    """(sign, a, b) with y = sign * ell^b * eps^a, confirmed exactly."""
    n = y.norm()
    num, den = abs(n.numerator), n.denominator
    vb_num, rest_num = split_power(num, ell)
    vb_den, rest_den = split_power(den, ell)
    if rest_num != 1 or rest_den != 1 or (vb_num - vb_den) % 2:
        raise ValueError(f"{y} is not of the form +-{ell}^b eps^a")
    b = (vb_num - vb_den) // 2
    z = y * Fraction(1, ell**b) if b >= 0 else y * ell ** (-b)
    with mpmath.workdps(dps):
        ze = abs(mpmath.mpf(z.a) + z.b * mpmath.sqrt(z.d)) / z.den
        ee = mpmath.mpf(eps.a) + eps.b * mpmath.sqrt(eps.d)
        ee = ee / eps.den
        guess = int(mpmath.nint(mpmath.log(ze) / mpmath.log(abs(ee))))
    candidates = [guess] + [a for r in range(SEARCH_BOUND + 1) for a in (r, -r) if a != guess]
    for a in candidates:
        w = z / eps**a if a >= 0 else z * eps ** (-a)
        if w == QuadElem(1, 0, 1, y.d):
            return 1, a, b
        if w == QuadElem(-1, 0, 1, y.d):
            return -1, a, b
    raise ValueError(f"{y} is not of the form +-{ell}^b eps^a with |a| <= {SEARCH_BOUND}")


def lattice_index(vectors) -> int:
    """Index in Z^2 of the lattice spanned by integer vectors (0 if rank < 2)."""
    vectors = [tuple(v) for v in vectors if any(v)]
    g = 0
    for i in range(len(vectors)):
        for j in range(i + 1, len(vectors)):
            (a, b), (c, e) = vectors[i], vectors[j]
            g = math.gcd(g, a * e - b * c)
    return g


def norm_index(data: SexticUnitData, d: int = D_SEO) -> NormIndexReport:
    """Index of N_{k1/k}(E'_{k1}) in E'_k = <-1, eps, 3>, modulo torsion."""
    data.validate()
    return norm_index_of([relative_norm(u) for u in data.units], d)


def norm_index_of(norms, d: int = D_SEO) -> NormIndexReport:
    """Same index for a list of elements of k given directly as norms."""
    eps = field_init(d).fund_unit
    decs = [decompose(y, eps) for y in norms]
    index = lattice_index([(a, b) for _, a, b in decs])
    warnings = []
    complete = index != 0
    if not complete:
        warnings.append("incomplete lattice: the norms span a lattice of rank < 2")
    elif index % 3:
        warnings.append("index prime to 3: eps lies in the norm group of this data")
    return NormIndexReport(index, complete and index % 3 == 0, decs, complete, warnings)


def negative_control(d: int = D_SEO) -> list[QuadElem]:
    """Norm list containing eps itself next to -3 = N(theta + 1): index 1."""
    eps = field_init(d).fund_unit
    return [eps, QuadElem(-3, 0, 1, d), eps**3]
