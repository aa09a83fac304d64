"""
Quadratic fields Q(sqrt d) at desk scale.

Ideals are handled as primitive Z-modules [a, (-b + sqrt D)/2] (the ideal
attached to the binary quadratic form (a, b, c)), optionally carrying an
explicit element alpha so that the ideal equals alpha * [a, ...]. Tracking
alpha through products and reductions is what produces generators of
principal ideals in both the imaginary and the real case.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from sympy import factorint, nextprime
from sympy.matrices import Matrix
from sympy.matrices.normalforms import smith_normal_form
from sympy.polys.domains import ZZ

from .padic import PadicNum, PrecisionError, hensel_sqrt, split_power, sqrt2

DESK_BOUND = 10**5

SPLIT_FIRST = "split-first"
SPLIT_SECOND = "split-second"
INERT = "inert"
RAMIFIED = "ramified"
RATIONAL = "rational"


class NormEquationError(RuntimeError):
    pass


def squarefree_part(n: int) -> int:
    if n == 0:
        raise ValueError("0 has no squarefree part")
    s = -1 if n < 0 else 1
    for p, e in factorint(abs(n)).items():
        if e % 2:
            s *= p
    return s


def kronecker(D: int, p: int) -> int:
    """Kronecker symbol (D|p) for a prime p."""
    if p == 2:
        if D % 2 == 0:
            return 0
        return 1 if D % 8 in (1, 7) else -1
    r = D % p
    if r == 0:
        return 0
    return 1 if pow(r, (p - 1) // 2, p) == 1 else -1


# ---------------------------------------------------------------------------
# elements


@dataclass(frozen=True)
class QuadElem:
    """(a + b*sqrt(d)) / den, normalized with den > 0 and gcd(a, b, den) = 1."""

    a: int
    b: int
    den: int
    d: int

    def __post_init__(self):
        a, b, den = self.a, self.b, self.den
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        if den < 0:
            a, b, den = -a, -b, -den
        g = math.gcd(math.gcd(a, b), den)
        if g > 1:
            a, b, den = a // g, b // g, den // g
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "den", den)

    @classmethod
    def rational(cls, q, d: int) -> QuadElem:
        q = Fraction(q)
        return cls(q.numerator, 0, q.denominator, d)

    def __repr__(self):
        return f"({self.a} + {self.b}*sqrt({self.d}))/{self.den}"

    def _lift(self, other) -> QuadElem:
        if isinstance(other, QuadElem):
            if other.d != self.d:
                raise ValueError("elements of different fields")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadElem.rational(other, self.d)
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        den = self.den * o.den
        return QuadElem(self.a * o.den + o.a * self.den, self.b * o.den + o.b * self.den, den, self.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadElem(-self.a, -self.b, self.den, self.d)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return QuadElem(
            self.a * o.a + self.d * self.b * o.b,
            self.a * o.b + self.b * o.a,
            self.den * o.den,
            self.d,
        )

    __rmul__ = __mul__

    def conj(self) -> QuadElem:
        return QuadElem(self.a, -self.b, self.den, self.d)

    def norm(self) -> Fraction:
        return Fraction(self.a * self.a - self.d * self.b * self.b, self.den * self.den)

    def trace(self) -> Fraction:
        return Fraction(2 * self.a, self.den)

    def inverse(self) -> QuadElem:
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        c = self.conj()
        return QuadElem(c.a * n.denominator, c.b * n.denominator, c.den * n.numerator, self.d)

    def __truediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self._lift(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = QuadElem(1, 0, 1, self.d)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def is_integral(self) -> bool:
        return self.trace().denominator == 1 and self.norm().denominator == 1

    def coords(self) -> tuple[int, int]:
        """Coordinates (x, y) on the integral basis {1, w} (integral elements only)."""
        if not self.is_integral():
            raise ValueError(f"{self} is not integral")
        if self.d % 4 == 1:
            y = Fraction(2 * self.b, self.den)
            x = Fraction(self.a - self.b, self.den)
        else:
            x, y = Fraction(self.a, self.den), Fraction(self.b, self.den)
        return int(x), int(y)

    def is_primitive(self) -> bool:
        x, y = self.coords()
        return math.gcd(x, y) == 1

    def sign(self) -> int:
        """Exact sign under the embedding sqrt(d) > 0 (real fields)."""
        if self.d < 0:
            raise ValueError("imaginary field has no real embedding")
        a, b = self.a, self.b
        if a >= 0 and b >= 0:
            return 0 if a == b == 0 else 1
        if a <= 0 and b <= 0:
            return -1
        # opposite signs: compare a^2 with b^2 d
        big_a = a * a > b * b * self.d
        return (1 if a > 0 else -1) if big_a else (1 if b > 0 else -1)

    def to_float(self) -> float:
        """Value under the embedding sqrt(d) > 0 (real fields)."""
        if self.d < 0:
            raise ValueError("imaginary field has no real embedding")
        return (self.a + self.b * math.sqrt(self.d)) / self.den


def _from_coords(x: int, y: int, d: int) -> QuadElem:
    if d % 4 == 1:
        return QuadElem(2 * x + y, y, 2, d)
    return QuadElem(x, y, 1, d)


# ---------------------------------------------------------------------------
# places


@dataclass(frozen=True)
class PlaceTag:
    p: int
    kind: str
    above_ell: bool = False

    def label(self) -> str:
        suffix = {SPLIT_FIRST: "a", SPLIT_SECOND: "b"}.get(self.kind, "")
        return f"{self.p}{suffix}"


# ---------------------------------------------------------------------------
# primitive ideals [a, (-b + sqrt D)/2]


def _isqrt_floor(D: int) -> int:
    return math.isqrt(D) if D > 0 else 0


def _normalize_b(a: int, b: int, D: int) -> int:
    """Canonical representative of b mod 2a."""
    if D > 0 and a * a < D:
        s = math.isqrt(D)
        return b + 2 * a * ((s - b) // (2 * a))  # largest b' <= sqrt D
    r = b % (2 * a)
    return r - 2 * a if r > a else r


def _hnf_ideal(vecs, sigma: int) -> tuple[int, int, int]:
    """Content n3 and primitive (a, b) of the Z-span of vecs in basis {1, w}."""
    px, py = 0, 0
    n1 = 0
    for x, y in vecs:
        if y == 0:
            n1 = math.gcd(n1, x)
            continue
        if py == 0:
            px, py = x, y
            continue
        g = math.gcd(py, y)
        s, t = _ext(py, y)
        nx = s * px + t * x
        zx = (y // g) * px - (py // g) * x
        n1 = math.gcd(n1, zx)
        px, py = nx, g
    if py < 0:
        px, py = -px, -py
    n1 = abs(n1)
    n3 = py
    if n1 % n3 or px % n3:
        raise ArithmeticError("module is not an ideal")
    a = n1 // n3
    b = -(2 * (px // n3) + sigma)
    return n3, a, b


def _ext(a: int, b: int) -> tuple[int, int]:
    """s, t with s*a + t*b = gcd(a, b)."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_s, old_t = -old_s, -old_t
    return old_s, old_t


@dataclass(frozen=True)
class Ideal:
    """alpha * [a, (-b + sqrt D)/2] with a > 0."""

    a: int
    b: int
    alpha: QuadElem


class QuadField:
    """Q(sqrt d) with its ideal class group and (real case) fundamental unit."""

    def __init__(self, d: int):
        self.d = d
        self.disc = d if d % 4 == 1 else 4 * d
        self.signature = (2, 0) if d > 0 else (0, 1)
        self.f = 1 if d % 4 == 1 else 2  # sqrt(D) = f * sqrt(d)
        self.sigma = self.disc % 2
        self._key_cache: dict[tuple[int, int], tuple[int, int]] = {}
        self._sqrt_cache: dict[tuple[int, int], PadicNum] = {}
        self.h, self.class_structure = self._class_group()
        self.fund_unit = self._fundamental_unit() if d > 0 else None

    def __repr__(self):
        return f"QuadField({self.d})"

    @property
    def is_rational(self) -> bool:
        return False

    @property
    def is_real(self) -> bool:
        return self.d > 0

    def elem(self, a: int, b: int = 0, den: int = 1) -> QuadElem:
        return QuadElem(a, b, den, self.d)

    def one(self) -> QuadElem:
        return QuadElem(1, 0, 1, self.d)

    def torsion_order(self) -> int:
        return {-1: 4, -3: 6}.get(self.d, 2)

    # -- ideal arithmetic -------------------------------------------------------

    def _c(self, a: int, b: int) -> int:
        return (b * b - self.disc) // (4 * a)

    def is_reduced(self, a: int, b: int) -> bool:
        D = self.disc
        if D < 0:
            c = self._c(a, b)
            return -a < b <= a <= c and not (a == c and b < 0)
        # |sqrt D - 2a| < b < sqrt D
        s = math.isqrt(D)
        if not 0 < b <= s:
            return False
        t = 2 * a - b  # need b > |sqrt D - 2a|, i.e. sqrt D - b < 2a and 2a - b < sqrt D
        return 2 * a + b > s and (t < 0 or t * t < D)

    def rho(self, a: int, b: int) -> tuple[int, int, QuadElem]:
        """One reduction step: [a, beta] = factor * [a', beta']."""
        c = self._c(a, b)
        factor = QuadElem(-b, self.f, 2 * c, self.d)  # beta / c
        a2 = abs(c)
        return a2, _normalize_b(a2, -b, self.disc), factor

    def reduce(self, I: Ideal) -> Ideal:
        a, b, alpha = I.a, _normalize_b(I.a, I.b, self.disc), I.alpha
        while not self.is_reduced(a, b):
            a, b, fac = self.rho(a, b)
            alpha = alpha * fac
        return Ideal(a, b, alpha)

    def _reduce_plain(self, a: int, b: int) -> tuple[int, int]:
        b = _normalize_b(a, b, self.disc)
        while not self.is_reduced(a, b):
            c = self._c(a, b)
            a = abs(c)
            b = _normalize_b(a, -b, self.disc)
        return a, b

    def cycle(self, a: int, b: int) -> list[tuple[int, int]]:
        """The rho-cycle through a reduced ideal (real fields)."""
        out = [(a, b)]
        x, y = a, b
        while True:
            c = self._c(x, y)
            x = abs(c)
            y = _normalize_b(x, -y, self.disc)
            if (x, y) == (a, b):
                return out
            out.append((x, y))

    def class_key(self, a: int, b: int) -> tuple[int, int]:
        """Canonical label of the ideal class of [a, (-b + sqrt D)/2]."""
        a, b = self._reduce_plain(a, b)
        if self.disc < 0:
            return (a, b)
        key = self._key_cache.get((a, b))
        if key is None:
            cyc = self.cycle(a, b)
            key = min(cyc)
            for x in cyc:
                self._key_cache[x] = key
        return key

    def mul_ideals(self, I: Ideal, J: Ideal) -> Ideal:
        sg = self.sigma
        w2c = (self.disc - sg) // 4  # w^2 = sigma*w + w2c

        def beta(b):
            return ((-b - sg) // 2, 1)

        x1, y1 = beta(I.b)
        x2, y2 = beta(J.b)
        bb = (x1 * x2 + y1 * y2 * w2c, x1 * y2 + x2 * y1 + sg * y1 * y2)
        vecs = [
            (I.a * J.a, 0),
            (I.a * x2, I.a * y2),
            (J.a * x1, J.a * y1),
            bb,
        ]
        n3, a, b = _hnf_ideal(vecs, sg)
        return Ideal(a, _normalize_b(a, b, self.disc), I.alpha * J.alpha * n3)

    def inverse_ideal(self, I: Ideal) -> Ideal:
        return Ideal(I.a, _normalize_b(I.a, -I.b, self.disc), I.alpha.inverse() * Fraction(1, I.a))

    def unit_ideal(self) -> Ideal:
        return Ideal(1, _normalize_b(1, self.sigma, self.disc), self.one())

    def key_mul(self, k1, k2):
        I = self.mul_ideals(Ideal(*k1, self.one()), Ideal(*k2, self.one()))
        return self.class_key(I.a, I.b)

    def key_pow(self, k, n: int):
        result = self.identity_key()
        base = k
        if n < 0:
            base = self.class_key(k[0], -k[1])
            n = -n
        while n:
            if n & 1:
                result = self.key_mul(result, base)
            base = self.key_mul(base, base)
            n >>= 1
        return result

    def identity_key(self):
        u = self.unit_ideal()
        return self.class_key(u.a, u.b)

    def order_of(self, key) -> int:
        e = self.identity_key()
        x, k = key, 1
        while x != e:
            x = self.key_mul(x, key)
            k += 1
        return k

    def principal_generator(self, I: Ideal) -> QuadElem | None:
        """alpha with I = (alpha), or None when I is not principal."""
        R = self.reduce(I)
        if self.disc < 0:
            return R.alpha if R.a == 1 else None
        a, b, alpha = R.a, R.b, R.alpha
        start = (a, b)
        while a != 1:
            a, b, fac = self.rho(a, b)
            alpha = alpha * fac
            if (a, b) == start:
                return None
        return alpha

    def ideal_product_generator(self, factors) -> QuadElem:
        """Generator of prod P^e over (PlaceTag, e) pairs; the product must be principal."""
        acc = self.unit_ideal()
        for tag, e in factors:
            if e == 0:
                continue
            P = self.prime_ideal(tag)
            if e < 0:
                P = self.inverse_ideal(P)
            base = P
            n = abs(e)
            while n:
                if n & 1:
                    acc = self.reduce(self.mul_ideals(acc, base))
                n >>= 1
                if n:
                    base = self.reduce(self.mul_ideals(base, base))
        gen = self.principal_generator(acc)
        if gen is None:
            raise ArithmeticError(f"ideal product {factors} is not principal in {self}")
        return gen

    # -- class group --------------------------------------------------------

    def reduced_ideals(self) -> list[tuple[int, int]]:
        D = self.disc
        out = []
        if D < 0:
            amax = math.isqrt(-D // 3)
            for a in range(1, amax + 1):
                for b in range(-a + 1, a + 1):
                    if (b - D) % 2 or (b * b - D) % (4 * a):
                        continue
                    if self.is_reduced(a, b):
                        out.append((a, b))
            return out
        s = math.isqrt(D)
        for b in range(1, s + 1):
            if (b - D) % 2:
                continue
            n = (D - b * b) // 4
            for a in _divisors(n):
                if self.is_reduced(a, b):
                    out.append((a, b))
        return out

    def _class_group(self):
        keys = {self.class_key(a, b) for a, b in self.reduced_ideals()}
        h = len(keys)
        if h == 1:
            return 1, []
        # build the group from prime ideal classes with triangular relations
        H = {self.identity_key(): ()}
        rels = []
        p = 1
        while len(H) < h:
            p = nextprime(p)
            for tag in self.places_above(p):
                g = self.class_key(*self._prime_ab(tag))
                if g in H:
                    continue
                k, x = 1, g
                while x not in H:
                    x = self.key_mul(x, g)
                    k += 1
                rels.append([-c for c in H[x]] + [k])
                newH = {}
                power = self.identity_key()
                for j in range(k):
                    for elt, vec in H.items():
                        newH[self.key_mul(elt, power)] = vec + (j,)
                    power = self.key_mul(power, g)
                H = newH
        n = len(rels)
        M = Matrix([r + [0] * (n - len(r)) for r in rels])
        snf = smith_normal_form(M, domain=ZZ)
        inv = sorted(abs(int(snf[i, i])) for i in range(n) if abs(int(snf[i, i])) > 1)
        return h, inv

    # -- primes and places --------------------------------------------------

    def places_above(self, p: int, ell: int | None = None) -> list[PlaceTag]:
        above = ell is not None and p == ell
        k = kronecker(self.disc, p)
        if k == 1:
            return [PlaceTag(p, SPLIT_FIRST, above), PlaceTag(p, SPLIT_SECOND, above)]
        if k == -1:
            return [PlaceTag(p, INERT, above)]
        return [PlaceTag(p, RAMIFIED, above)]

    def sqrt_d(self, p: int, m: int) -> PadicNum:
        """Pinned square root of d in Z_p to absolute precision m (p split)."""
        key = (p, m)
        r = self._sqrt_cache.get(key)
        if r is None:
            r = hensel_sqrt(self.d, p, m) if p != 2 else sqrt2(self.d, m)
            if r is None:
                raise ValueError(f"{p} is not split in {self}")
            self._sqrt_cache[key] = r
        return r

    def _prime_ab(self, tag: PlaceTag, k: int = 1) -> tuple[int, int]:
        """(a, b) of the primitive ideal P^k (P of degree 1); P^1 for inert."""
        p, D = tag.p, self.disc
        if tag.kind == INERT:
            return (1, _normalize_b(1, self.sigma, D))  # (p) = p * O_K
        if tag.kind == RAMIFIED:
            if k != 1:
                raise ValueError("powers of ramified primes are not primitive")
            for b in range(2 * p):
                if (b - D) % 2 == 0 and (b * b - D) % (4 * p) == 0:
                    return (p, _normalize_b(p, b, D))
            raise ArithmeticError("no ramified ideal found")
        N = p**k
        r = self.sqrt_d(p, k + 3 if p == 2 else k).residue()
        if tag.kind == SPLIT_SECOND:
            r = -r
        # (-b + sqrt D)/2 lies in P^k iff b = f*r mod 2N (mod N for odd p)
        if p == 2:
            b = (self.f * r) % (2 * N)
        else:
            b = (self.f * r) % N
            if (b - D) % 2:
                b += N
        if (b * b - D) % (4 * N):
            raise ArithmeticError("bad prime ideal data")
        return (N, _normalize_b(N, b, D))

    def prime_ideal(self, tag: PlaceTag, k: int = 1) -> Ideal:
        if tag.kind == INERT:
            return Ideal(*self._prime_ab(tag), QuadElem(tag.p**k, 0, 1, self.d))
        return Ideal(*self._prime_ab(tag, k), self.one())

    def place_class_key(self, tag: PlaceTag):
        return self.class_key(*self._prime_ab(tag))

    # -- units --------------------------------------------------------------

    def _fundamental_unit(self) -> QuadElem:
        u = self.unit_ideal()
        a, b = self._reduce_plain(u.a, u.b)
        start = (a, b)
        alpha = self.one()
        while True:
            a, b, fac = self.rho(a, b)
            alpha = alpha * fac
            if (a, b) == start:
                break
        eps = alpha
        if abs(eps.norm()) != 1:
            raise ArithmeticError("cycle walk did not produce a unit")
        # normalize to eps > 1 under sqrt d > 0
        if eps.sign() < 0:
            eps = -eps
        # a positive unit exceeds 1 iff both coordinates are positive
        if not (eps.a > 0 and eps.b > 0):
            eps = eps.inverse()
        return eps


def _divisors(n: int) -> list[int]:
    out = [1]
    for p, e in factorint(n).items():
        out = [x * p**k for x in out for k in range(e + 1)]
    return sorted(out)


# ---------------------------------------------------------------------------
# public operations


class RationalField:
    """Q viewed through the same interface (one place above every prime)."""

    d = 1
    disc = 1
    signature = (1, 0)
    h = 1
    class_structure: list[int] = []
    fund_unit = None
    is_rational = True
    is_real = True

    def __repr__(self):
        return "RationalField()"

    def places_above(self, p: int, ell: int | None = None) -> list[PlaceTag]:
        return [PlaceTag(p, RATIONAL, ell is not None and p == ell)]

    def torsion_order(self) -> int:
        return 2


RATIONALS = RationalField()


@lru_cache(maxsize=256)
def field_init(d: int, bound: int = DESK_BOUND) -> QuadField:
    """QuadField for the squarefree part of d."""
    if d == 0:
        raise ValueError("d must be nonzero")
    d = squarefree_part(d)
    if d == 1:
        raise ValueError("d is a square: the field is Q (use RATIONALS)")
    if abs(d) > bound:
        raise ValueError(f"|d| = {abs(d)} exceeds the desk-scale bound {bound}")
    return QuadField(d)


def splitting(K, ell: int) -> list[PlaceTag]:
    return K.places_above(ell, ell)


def _root_for_norm(K: QuadField, tag: PlaceTag, k: int) -> int:
    """b with b = D mod 2 and b^2 = D mod 4 p^k matching the place."""
    _, b = K._prime_ab(tag, k)
    return b


def cornacchia(D: int, N: int, b: int) -> tuple[int, int] | None:
    """Primitive (x, y) with x^2 - D y^2 = 4N (D < 0) attached to the root b."""
    r0, r1 = 2 * N, b % (2 * N)
    lim = math.isqrt(4 * N)
    while r1 > lim:
        r0, r1 = r1, r0 % r1
    t = 4 * N - r1 * r1
    if t % (-D):
        return None
    y2 = t // (-D)
    y = math.isqrt(y2)
    if y * y != y2:
        return None
    return r1, y


def prime_power_generator(K: QuadField, ell: int, place: PlaceTag | None = None) -> tuple[int, QuadElem]:
    """(h', eta) with (eta) = P^h', h' the order of the class of P above ell."""
    if place is None:
        place = splitting(K, ell)[0]
    if place.kind == INERT:
        raise ValueError(f"{ell} is inert in {K}")
    hp = K.order_of(K.place_class_key(place))
    if place.kind == RAMIFIED and hp == 2:
        return 2, K.elem(ell)
    if K.disc < 0:
        b = _root_for_norm(K, place, hp)
        sol = cornacchia(K.disc, ell**hp, b)
        if sol is None:
            sol = cornacchia(K.disc, ell**hp, -b)
        if sol is None:
            raise NormEquationError(f"no solution of norm {ell}^{hp} in {K}")
        x, y = sol
        eta = QuadElem(x, y * K.f, 2, K.d)
        if not _in_place(K, eta, place):
            eta = eta.conj()
        if not _in_place(K, eta, place):
            raise NormEquationError("norm solution does not lie in the requested prime")
        return hp, eta
    eta = K.principal_generator(K.prime_ideal(place, hp) if place.kind != RAMIFIED
                                else K.prime_ideal(place))
    if eta is None:
        raise NormEquationError(f"P^{hp} is not principal in {K}")
    return hp, eta


def _in_place(K: QuadField, x: QuadElem, place: PlaceTag) -> bool:
    if place.kind in (SPLIT_FIRST, SPLIT_SECOND):
        try:
            v = embed(x, place, 4).val
        except PrecisionError:
            return True
        return v > 0
    return x.norm() % place.p == 0


def embed(x: QuadElem, place: PlaceTag, m: int) -> PadicNum:
    """Image of x in Q_p at a split place (p = place.p), absolute precision m."""
    p = place.p
    if place.kind not in (SPLIT_FIRST, SPLIT_SECOND):
        raise ValueError(f"{place.kind} place has no embedding into Q_{p}; use norms")
    if x.is_zero():
        raise ValueError("embedding of zero")
    K = field_init(x.d)
    M = m + split_power(x.den, p)[0]
    r = K.sqrt_d(p, M)
    root = -r if place.kind == SPLIT_SECOND else r
    num = PadicNum.from_int(x.a, p, M) + PadicNum.from_int(x.b, p, M) * root
    num = num.with_absprec(M)
    if num.is_zero():
        raise PrecisionError(f"precision {m} cannot separate the conjugates of {x}")
    return num / PadicNum.from_int(x.den, p, M)


def tame_valuation(K, x: QuadElem, place: PlaceTag) -> int:
    """Classical valuation of x at a finite place."""
    p = place.p
    if place.kind in (SPLIT_FIRST, SPLIT_SECOND):
        m = 8
        while True:
            try:
                return embed(x, place, m).val
            except PrecisionError:
                m *= 2
    if place.kind == RATIONAL:
        q = Fraction(x)
        return split_power(q.numerator, p)[0] - split_power(q.denominator, p)[0]
    n = x.norm()
    v = split_power(n.numerator, p)[0] - split_power(n.denominator, p)[0]
    return v // 2 if place.kind == INERT else v
