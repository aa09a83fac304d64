"""
ℓ-adic numbers with explicit relative precision.

A value is stored as ell**val * (unit + O(ell**relprec)). Keeping the unit
part separate from the valuation means dividing by powers of ell never
silently drops significant digits: the loss shows up in ``relprec``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from sympy.ntheory import sqrt_mod


class PrecisionError(ArithmeticError):
    """Raised when a result would carry no certified digit."""


def vp(n: int, ell: int) -> int:
    """ell-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of 0")
    n = abs(n)
    v = 0
    while n % ell == 0:
        n //= ell
        v += 1
    return v


def split_power(n: int, ell: int) -> tuple[int, int]:
    """Return (v, u) with n = ell**v * u and ell not dividing u."""
    v = vp(n, ell)
    return v, n // ell**v


@dataclass(frozen=True)
class PadicNum:
    ell: int
    val: int
    unit: int
    relprec: int

    def __post_init__(self):
        if self.relprec < 0:
            raise ValueError("negative relative precision")
        if self.relprec == 0:
            if self.unit != 0:
                raise ValueError("a zero-precision value must have unit 0")
        elif self.unit % self.ell == 0:
            raise ValueError("unit part divisible by ell")

    # -- construction -------------------------------------------------------

    @classmethod
    def zero(cls, ell: int, absprec: int) -> PadicNum:
        """O(ell**absprec): nothing certified below absprec."""
        return cls(ell, absprec, 0, 0)

    @classmethod
    def from_residue(cls, r: int, ell: int, absprec: int) -> PadicNum:
        """The value known as r mod ell**absprec."""
        mod = ell**absprec
        r %= mod
        if r == 0:
            return cls.zero(ell, absprec)
        v, u = split_power(r, ell)
        rel = absprec - v
        return cls(ell, v, u % ell**rel, rel)

    @classmethod
    def from_int(cls, n: int, ell: int, prec: int) -> PadicNum:
        """Exact integer n kept to prec significant digits."""
        if n == 0:
            return cls.zero(ell, prec)
        v, u = split_power(n, ell)
        return cls(ell, v, u % ell**prec, prec)

    @classmethod
    def from_rational(cls, q, ell: int, prec: int) -> PadicNum:
        q = Fraction(q)
        if q == 0:
            return cls.zero(ell, prec)
        vn, un = split_power(q.numerator, ell)
        vd, ud = split_power(q.denominator, ell)
        mod = ell**prec
        return cls(ell, vn - vd, un * pow(ud, -1, mod) % mod, prec)

    # -- views --------------------------------------------------------------

    @property
    def absprec(self) -> int:
        return self.val + self.relprec

    def is_zero(self) -> bool:
        return self.relprec == 0

    def valuation(self) -> int:
        if self.is_zero():
            raise PrecisionError(f"value is O({self.ell}^{self.val})")
        return self.val

    def residue(self) -> int:
        """Integer representative mod ell**absprec (requires val >= 0)."""
        if self.val < 0:
            raise ValueError("not an ell-adic integer")
        return (self.unit * self.ell**self.val) % self.ell**self.absprec

    def lift(self) -> Fraction:
        return Fraction(self.unit) * Fraction(self.ell) ** self.val

    def with_absprec(self, absprec: int) -> PadicNum:
        """Truncate to at most the given absolute precision."""
        if absprec >= self.absprec:
            return self
        if absprec <= self.val:
            return PadicNum.zero(self.ell, absprec)
        rel = absprec - self.val
        return PadicNum(self.ell, self.val, self.unit % self.ell**rel, rel)

    def agrees(self, other: PadicNum) -> bool:
        """True when both values coincide on their common certified digits."""
        prec = min(self.absprec, other.absprec)
        return (self.with_absprec(prec) - other.with_absprec(prec)).is_zero()

    def __repr__(self):
        if self.is_zero():
            return f"O({self.ell}^{self.val})"
        return f"{self.ell}^{self.val}*({self.unit} + O({self.ell}^{self.relprec}))"

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other) -> PadicNum:
        if isinstance(other, PadicNum):
            if other.ell != self.ell:
                raise ValueError(f"prime mismatch: {self.ell} vs {other.ell}")
            return other
        if isinstance(other, (int, Fraction)):
            # exact constants never limit precision below self's
            prec = max(self.absprec, 1) + 64
            return PadicNum.from_rational(other, self.ell, prec)
        return NotImplemented

    def __neg__(self):
        if self.is_zero():
            return self
        mod = self.ell**self.relprec
        return PadicNum(self.ell, self.val, (-self.unit) % mod, self.relprec)

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        absprec = min(self.absprec, other.absprec)
        base = min(self.val, other.val, absprec)
        width = absprec - base
        if width <= 0:
            return PadicNum.zero(self.ell, absprec)
        mod = self.ell**width
        s = (
            self.unit * self.ell ** (self.val - base)
            + other.unit * other.ell ** (other.val - base)
        ) % mod
        r = PadicNum.from_residue(s, self.ell, width)
        return PadicNum(self.ell, r.val + base, r.unit, r.relprec)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.is_zero() or other.is_zero():
            # O(ell^a) * y is O(ell^(a + v(y))), with v(y) >= y.val
            return PadicNum.zero(self.ell, self.val + other.val)
        rel = min(self.relprec, other.relprec)
        mod = self.ell**rel
        return PadicNum(self.ell, self.val + other.val, self.unit * other.unit % mod, rel)

    __rmul__ = __mul__

    def inverse(self) -> PadicNum:
        if self.is_zero():
            raise ZeroDivisionError("inverse of an uncertified zero")
        mod = self.ell**self.relprec
        return PadicNum(self.ell, -self.val, pow(self.unit, -1, mod), self.relprec)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        if n == 0:
            return PadicNum.from_int(1, self.ell, max(self.relprec, 1))
        if self.is_zero():
            return PadicNum.zero(self.ell, self.val * n)
        mod = self.ell**self.relprec
        # relative precision survives powering only up to a unit factor n
        rel = self.relprec
        return PadicNum(self.ell, self.val * n, pow(self.unit, n, mod), rel)


# ---------------------------------------------------------------------------
# Teichmüller lift and Iwasawa logarithm


def teichmuller(a: int, ell: int, m: int) -> PadicNum:
    """Root of unity congruent to a mod ell (mod 4 when ell = 2)."""
    if m < 1:
        raise ValueError("precision must be >= 1")
    if a % ell == 0:
        raise ValueError(f"{a} is not a unit mod {ell}")
    mod = ell**m
    if ell == 2:
        return PadicNum(2, 0, (1 if a % 4 == 1 else -1) % mod, m)
    x = a % mod
    for _ in range(m):
        x = pow(x, ell, mod)
    return PadicNum(ell, 0, x, m)


def _log1p(x: int, ell: int, prec: int) -> int:
    """log(1 + x) mod ell**prec for x divisible by ell (by 4 if ell = 2)."""
    if x % ell**prec == 0:
        return 0
    vx = vp(x, ell)

    def floor_log(k):
        e = 0
        while ell ** (e + 1) <= k:
            e += 1
        return e

    # term k has valuation >= k*vx - v(k) >= k*vx - floor_log(k), which
    # increases with k; keep every term that may fall below prec
    k_max = 1
    while (k_max + 1) * vx - floor_log(k_max + 1) < prec:
        k_max += 1
    extra = floor_log(k_max)
    wmod = ell ** (prec + extra)
    mod = ell**prec
    total = 0
    power = 1
    for k in range(1, k_max + 1):
        power = power * x % wmod
        if k % ell == 0:
            v, u = split_power(k, ell)
            term = (power // ell**v) * pow(u, -1, mod)
        else:
            term = power * pow(k, -1, mod)
        total += term if k % 2 else -term
    return total % mod


def iwasawa_log(x: PadicNum) -> PadicNum:
    """Iwasawa logarithm: Log(ell) = 0 and Log kills roots of unity.

    The result is known to absolute precision x.relprec.
    """
    ell = x.ell
    if x.is_zero():
        raise ValueError("logarithm of zero")
    r = x.relprec
    need = 3 if ell == 2 else 2
    if r < need:
        raise PrecisionError(f"relative precision {r} too small for Log_{ell}")
    mod = ell**r
    if ell == 2:
        y = x.unit if x.unit % 4 == 1 else (-x.unit) % mod
        return PadicNum.from_residue(_log1p(y - 1, 2, r), 2, r)
    y = pow(x.unit, ell - 1, mod)
    log = _log1p(y - 1, ell, r) * pow(ell - 1, -1, mod)
    return PadicNum.from_residue(log, ell, r)


def log_int(n, ell: int, prec: int) -> PadicNum:
    """Log_ell of a nonzero rational, known to absolute precision prec."""
    return iwasawa_log(PadicNum.from_rational(n, ell, prec))


# ---------------------------------------------------------------------------
# square roots


def pinned_root_mod(n: int, ell: int) -> int | None:
    """The square root of n mod ell lying in [1, (ell-1)/2], or None."""
    roots = sqrt_mod(n % ell, ell, all_roots=True)
    if not roots:
        return None
    return min(roots)


def hensel_sqrt(n: int, ell: int, m: int) -> PadicNum | None:
    """Square root of n in Z_ell to absolute precision m, or None.

    The root returned is the Hensel lift of the residue in [1, (ell-1)/2];
    the other root is its negative. ell = 2 goes through ``sqrt2``.
    """
    if ell == 2:
        return sqrt2(n, m)
    if n % ell == 0:
        raise ValueError(f"{ell} divides {n}")
    r = pinned_root_mod(n, ell)
    if r is None:
        return None
    mod = ell
    while mod < ell**m:
        mod = min(mod * mod, ell**m)
        r = (r - (r * r - n) * pow(2 * r, -1, mod)) % mod
    return PadicNum(ell, 0, r, m)


def sqrt2(n: int, m: int) -> PadicNum | None:
    """Square root of an odd n in Z_2, pinned to be 1 mod 4; None if absent."""
    if n % 2 == 0:
        raise ValueError("2 divides n")
    if n % 8 != 1:
        return None
    r = 1
    for k in range(3, m + 2):
        # r^2 = n mod 2^k; fix bit k-1 so that r^2 = n mod 2^(k+1)
        if (r * r - n) % 2 ** (k + 1):
            r += 2 ** (k - 1)
    r %= 2 ** (m + 1)
    if r % 4 != 1:
        r = (-r) % 2 ** (m + 1)
    return PadicNum(2, 0, r % 2**m, m)


# ---------------------------------------------------------------------------
# Smith normal form over Z/ell^m


@dataclass(frozen=True)
class ZmodMatrix:
    """Relation rows inside the ambient module (Z/ell^m)^cols."""

    ell: int
    m: int
    cols: int
    rows: tuple[tuple[int, ...], ...]

    @classmethod
    def build(cls, rows, ell: int, m: int, cols: int | None = None) -> ZmodMatrix:
        rows = [list(r) for r in rows]
        if cols is None:
            if not rows:
                raise ValueError("cannot infer the ambient rank of an empty matrix")
            cols = len(rows[0])
        if m < 1:
            raise ValueError("m must be >= 1")
        mod = ell**m
        if any(len(r) != cols for r in rows):
            raise ValueError("ragged rows")
        return cls(ell, m, cols, tuple(tuple(x % mod for x in r) for r in rows))


def snf_mod(M: ZmodMatrix) -> list[int]:
    """Exponents e_i with coker(M) = sum Z/ell^e_i, trivial factors dropped.

    An exponent equal to M.m is a lower bound only (precision-saturated).
    """
    ell, m, mod = M.ell, M.m, M.ell**M.m
    A = [list(r) for r in M.rows]
    ncols = M.cols
    exps = []
    col_alive = list(range(ncols))
    while A and col_alive:
        best = None
        for i, row in enumerate(A):
            for j in col_alive:
                if row[j]:
                    v = vp(row[j], ell)
                    if best is None or v < best[0]:
                        best = (v, i, j)
                        if v == 0:
                            break
            if best is not None and best[0] == 0:
                break
        if best is None:
            break
        v, pi, pj = best
        prow = A.pop(pi)
        u = prow[pj] // ell**v
        uinv = pow(u, -1, mod)
        prow = [x * uinv % mod for x in prow]  # pivot is now ell^v
        for row in A:
            if row[pj]:
                f = row[pj] // ell**v
                for j in col_alive:
                    row[j] = (row[j] - f * prow[j]) % mod
        # column clearing does not change the cokernel once the pivot has
        # minimal valuation: every other entry of the pivot row is divisible
        col_alive.remove(pj)
        A = [r for r in A if any(r[j] for j in col_alive)]
        exps.append(v)
    exps.extend(m for _ in col_alive)
    return sorted(e for e in exps if e > 0)


def is_saturated(exponents: list[int], m: int) -> bool:
    return any(e >= m for e in exponents)


def smith_mod(rows, ell: int, m: int, cols: int):
    """Smith decomposition U A V = D over Z/ell^m.

    Returns (U, vals, V): U and V invertible, vals[t] the valuation of the
    t-th diagonal entry (m where the diagonal is zero, including t beyond
    the row count).
    """
    mod = ell**m
    r = len(rows)
    A = [[x % mod for x in row] for row in rows]
    U = [[int(i == j) for j in range(r)] for i in range(r)]
    V = [[int(i == j) for j in range(cols)] for i in range(cols)]
    vals = []
    for t in range(min(r, cols)):
        best = None
        for i in range(t, r):
            for j in range(t, cols):
                if A[i][j]:
                    v = vp(A[i][j], ell)
                    if best is None or v < best[0]:
                        best = (v, i, j)
        if best is None:
            break
        v, pi, pj = best
        A[t], A[pi] = A[pi], A[t]
        U[t], U[pi] = U[pi], U[t]
        for row in A:
            row[t], row[pj] = row[pj], row[t]
        for row in V:
            row[t], row[pj] = row[pj], row[t]
        uinv = pow(A[t][t] // ell**v, -1, mod)
        A[t] = [x * uinv % mod for x in A[t]]
        U[t] = [x * uinv % mod for x in U[t]]
        piv = ell**v
        for i in range(r):
            if i != t and A[i][t]:
                f = A[i][t] // piv
                A[i] = [(a - f * b) % mod for a, b in zip(A[i], A[t])]
                U[i] = [(a - f * b) % mod for a, b in zip(U[i], U[t])]
        for j in range(t + 1, cols):
            if A[t][j]:
                f = A[t][j] // piv
                for row in A:
                    row[j] = (row[j] - f * row[t]) % mod
                for row in V:
                    row[j] = (row[j] - f * row[t]) % mod
        vals.append(v)
    vals.extend([m] * (cols - len(vals)))
    return U, vals, V
