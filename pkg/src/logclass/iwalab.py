"""
Finite Lambda-modules: coinvariants, invariants, transition maps and
capitulation kernels/cokernels.

A module is a finite abelian ell-group  G / B0  with G = (Z/ell^W)^g (row
vectors) and B0 spanned by the rows ell^{e_i} e_i; gamma acts on the right
by an integer matrix. All subquotients are handled through Smith forms
over Z/ell^W.

Blocks:
  F   finite cyclic Z/ell^e with gamma acting as a unit u = 1 mod ell
  XL  Lambda/(X - ell c) truncated to Z/ell^N, gamma = 1 + ell c
  L   Lambda/(ell^a, omega_D) = (Z/ell^a)[Gamma/Gamma^(ell^D)], gamma a cyclic shift
  Z   Z_ell with trivial action, truncated to Z/ell^N (infinite invariants probe)
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field

from .padic import smith_mod

BLOCK_KINDS = ("F", "XL", "L", "Z")


@dataclass(frozen=True)
class Block:
    kind: str
    ell: int
    exp: int  # e for F, N for XL and Z, a for L
    unit: int = 1  # gamma on F, or c for XL
    depth: int = 0  # D for L

    def spec(self) -> str:
        base = f"{self.kind}:{self.ell}^{self.exp}"
        if self.kind == "F" and self.unit != 1:
            base += f":g={self.unit}"
        if self.kind == "XL" and self.unit != 1:
            base += f":c={self.unit}"
        if self.kind == "L":
            base += f":D={self.depth}"
        return base


@dataclass(frozen=True)
class FiniteLambdaModule:
    ell: int
    W: int
    orders: tuple[int, ...]  # exponent e_i of each generator
    gamma: tuple[tuple[int, ...], ...]
    blocks: tuple[Block, ...] = ()
    depth: int | None = None  # highest level n faithfully represented
    declared_F: tuple[int, ...] | None = None

    @property
    def g(self) -> int:
        return len(self.orders)

    @property
    def mod(self) -> int:
        return self.ell**self.W

    @property
    def mu_positive(self) -> bool:
        return any(b.kind == "L" for b in self.blocks)

    @property
    def infinite_invariants(self) -> bool:
        return any(b.kind == "Z" for b in self.blocks)

    def base_relations(self):
        return [[self.ell**e if i == j else 0 for j in range(self.g)] for i, e in enumerate(self.orders)]


# ---------------------------------------------------------------------------
# matrices mod ell^W


def _matmul(A, B, mod):
    Bt = list(zip(*B))
    return [[sum(a * b for a, b in zip(row, col)) % mod for col in Bt] for row in A]


def _identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _matpow(A, k, mod):
    R = _identity(len(A))
    while k:
        if k & 1:
            R = _matmul(R, A, mod)
        A = _matmul(A, A, mod)
        k >>= 1
    return R


def _sub(A, B, mod):
    return [[(a - b) % mod for a, b in zip(r, s)] for r, s in zip(A, B)]


def _add(A, B, mod):
    return [[(a + b) % mod for a, b in zip(r, s)] for r, s in zip(A, B)]


def omega(T: FiniteLambdaModule, n: int):
    """Matrix of omega_n = gamma^(ell^n) - 1."""
    return _sub(_matpow([list(r) for r in T.gamma], T.ell**n, T.mod), _identity(T.g), T.mod)


def omega_ratio(T: FiniteLambdaModule, n: int, m: int):
    """omega_m / omega_n = sum_{i < ell^(m-n)} gamma^(i ell^n)."""
    step = _matpow([list(r) for r in T.gamma], T.ell**n, T.mod)
    acc = [[0] * T.g for _ in range(T.g)]
    power = _identity(T.g)
    for _ in range(T.ell ** (m - n)):
        acc = _add(acc, power, T.mod)
        power = _matmul(power, step, T.mod)
    return acc


# ---------------------------------------------------------------------------
# subquotients of G = (Z/ell^W)^g


def span_structure(rows, ell: int, W: int, cols: int) -> list[int]:
    """Structure (exponents) of the subgroup of (Z/ell^W)^cols spanned by rows."""
    if not rows:
        return []
    _, vals, _ = smith_mod(rows, ell, W, cols)
    return sorted(W - v for v in vals[: len(rows)] if v < W)


def quotient_structure(A, B, ell: int, W: int, cols: int) -> list[int]:
    """Structure of (span A + span B) / span B."""
    if not A:
        return []
    mod = ell**W
    _, vals, V = smith_mod(B, ell, W, cols) if B else (None, [W] * cols, _identity(cols))
    img = []
    for row in _matmul(A, V, mod):
        img.append([(x % ell**d) * ell ** (W - d) % mod for x, d in zip(row, vals)])
    return span_structure(img, ell, W, cols)


def preimage(P, B, ell: int, W: int, g: int):
    """Generators of {x in G : x P in span B} (P is g x g)."""
    mod = ell**W
    _, vals, V = smith_mod(B, ell, W, g) if B else (None, [W] * g, _identity(g))
    Q = [[(x % ell**d) * ell ** (W - d) % mod for x, d in zip(row, vals)] for row in _matmul(P, V, mod)]
    U, dv, _ = smith_mod(Q, ell, W, g)
    gens = []
    for t in range(g):
        delta = dv[t] if t < len(dv) else W
        gens.append([x * ell ** max(0, W - delta) % mod for x in U[t]])
    return gens


def _B(T: FiniteLambdaModule, n: int):
    return T.base_relations() + omega(T, n)


def _check_level(T: FiniteLambdaModule, *levels):
    if T.depth is not None and max(levels) > T.depth:
        raise ValueError(f"level {max(levels)} beyond truncation depth {T.depth}")


def coinvariants(T: FiniteLambdaModule, n: int) -> list[int]:
    """T_n = T / omega_n T."""
    _check_level(T, n)
    B = _B(T, n)
    return quotient_structure(_identity(T.g), B, T.ell, T.W, T.g)


def invariants(T: FiniteLambdaModule, n: int, m: int | None = None) -> list[int]:
    """Gamma_n-invariants of T_m (of T itself when m is None)."""
    levels = (n,) if m is None else (n, m)
    _check_level(T, *levels)
    B = T.base_relations() if m is None else _B(T, m)
    K = preimage(omega(T, n), B, T.ell, T.W, T.g)
    return quotient_structure(K, B, T.ell, T.W, T.g)


def order(T: FiniteLambdaModule) -> int:
    return T.ell ** sum(T.orders)


@dataclass(frozen=True)
class Transition:
    """The map T_n -> T_m induced by omega_m / omega_n."""

    T: FiniteLambdaModule
    n: int
    m: int
    matrix: tuple[tuple[int, ...], ...]

    def __call__(self, x):
        mod = self.T.mod
        return [sum(a * r[j] for a, r in zip(x, self.matrix)) % mod for j in range(self.T.g)]

    def then(self, other: Transition) -> Transition:
        if other.n != self.m:
            raise ValueError("levels do not compose")
        M = _matmul([list(r) for r in self.matrix], [list(r) for r in other.matrix], self.T.mod)
        return Transition(self.T, self.n, other.m, tuple(map(tuple, M)))

    def equals(self, other: Transition) -> bool:
        """Equality as maps T_n -> T_m (differences must land in omega_m T)."""
        D = _sub([list(r) for r in self.matrix], [list(r) for r in other.matrix], self.T.mod)
        B = _B(self.T, self.m)
        return quotient_structure(D, B, self.T.ell, self.T.W, self.T.g) == []


def transition(T: FiniteLambdaModule, n: int, m: int) -> Transition:
    if m <= n:
        raise ValueError("need m > n")
    _check_level(T, n, m)
    return Transition(T, n, m, tuple(map(tuple, omega_ratio(T, n, m))))


def cap_kernel(T: FiniteLambdaModule, n: int, m: int) -> list[int]:
    P = omega_ratio(T, n, m)
    _check_level(T, n, m)
    K = preimage(P, _B(T, m), T.ell, T.W, T.g)
    return quotient_structure(K, _B(T, n), T.ell, T.W, T.g)


def cap_cokernel(T: FiniteLambdaModule, n: int, m: int) -> list[int]:
    _check_level(T, n, m)
    Bm = _B(T, m)
    inv = preimage(omega(T, n), Bm, T.ell, T.W, T.g)
    image = omega_ratio(T, n, m) + Bm
    return quotient_structure(inv, image, T.ell, T.W, T.g)


# ---------------------------------------------------------------------------
# construction


def parse_blocks(spec: str) -> list[Block]:
    """Parse 'F:3^2;XL:3' style specifications."""
    blocks = []
    for part in filter(None, (p.strip() for p in spec.split(";"))):
        fields = part.split(":")
        kind = fields[0].upper()
        if kind not in BLOCK_KINDS or len(fields) < 2:
            raise ValueError(f"bad block {part!r}")
        mt = re.fullmatch(r"(\d+)(?:\^(\d+))?", fields[1])
        if not mt:
            raise ValueError(f"bad block size {fields[1]!r}")
        ell, exp = int(mt.group(1)), int(mt.group(2) or 0)
        opts = dict(f.split("=", 1) for f in fields[2:])
        if kind == "F":
            blocks.append(Block("F", ell, exp or 1, int(opts.get("g", 1))))
        elif kind == "XL":
            blocks.append(Block("XL", ell, exp, int(opts.get("c", 1))))
        elif kind == "L":
            blocks.append(Block("L", ell, exp or 1, depth=int(opts.get("D", 1))))
        else:
            blocks.append(Block("Z", ell, exp))
    return blocks


def build(blocks, depth: int = 4) -> FiniteLambdaModule:
    """Direct sum of blocks, faithful at every level n <= depth.

    XL and Z blocks given without an explicit truncation (exponent 0) get
    Z/ell^(depth+1), which carries T_n = Z/ell^(n+1) exactly for n <= depth.
    """
    if isinstance(blocks, str):
        blocks = parse_blocks(blocks)
    blocks = list(blocks)
    if not blocks:
        raise ValueError("no blocks")
    ell = blocks[0].ell
    if any(b.ell != ell for b in blocks):
        raise ValueError("blocks over different primes")
    fixed = []
    for b in blocks:
        if b.kind in ("XL", "Z") and b.exp == 0:
            b = Block(b.kind, ell, depth + 1, b.unit)
        if b.kind in ("XL", "Z") and b.exp < depth + 1:
            raise ValueError(f"{b.spec()} is too shallow for depth {depth}")
        if b.kind == "L" and b.depth < depth:
            raise ValueError(f"{b.spec()} is too shallow for depth {depth}")
        if b.kind == "F" and b.unit % ell != 1 % ell:
            raise ValueError("gamma on F must be 1 mod ell")
        if b.kind == "XL" and b.unit % ell == 0:
            raise ValueError("c must be a unit")
        fixed.append(b)
    orders, diag = [], []
    for b in fixed:
        if b.kind == "F":
            orders.append(b.exp)
            diag.append([[b.unit]])
        elif b.kind == "XL":
            orders.append(b.exp)
            diag.append([[1 + ell * b.unit]])
        elif b.kind == "Z":
            orders.append(b.exp)
            diag.append([[1]])
        else:
            size = ell**b.depth
            orders.extend([b.exp] * size)
            diag.append([[int(j == (i + 1) % size) for j in range(size)] for i in range(size)])
    W = max(max(orders), 1)
    g = len(orders)
    gamma = [[0] * g for _ in range(g)]
    off = 0
    for blk in diag:
        for i, row in enumerate(blk):
            for j, x in enumerate(row):
                gamma[off + i][off + j] = x % ell**W
        off += len(blk)
    mixed = any(b.kind in ("L", "Z") for b in fixed)
    F = None if mixed else tuple(sorted(b.exp for b in fixed if b.kind == "F"))
    return FiniteLambdaModule(ell, W, tuple(orders), tuple(map(tuple, gamma)), tuple(fixed), depth, F)


def random_blocks(rng: random.Random, ell: int, depth: int = 4) -> list[Block]:
    """A random mix of F and XL blocks (at least one of each)."""
    out = []
    for _ in range(rng.randint(1, 2)):
        u = 1 + ell * rng.randrange(ell) if rng.random() < 0.5 else 1
        out.append(Block("F", ell, rng.randint(1, 2), u))
    for _ in range(rng.randint(1, 2)):
        c = rng.choice([c for c in range(1, 2 * ell) if c % ell])
        out.append(Block("XL", ell, depth + 1, c))
    rng.shuffle(out)
    return out


# ---------------------------------------------------------------------------
# the capitulation check


@dataclass
class CapReport:
    blocks: list[str]
    n0: int | None
    s: int | None
    kernel_structures: dict = field(default_factory=dict)
    cokernel_structures: dict = field(default_factory=dict)
    verdict: str = "fail"
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "blocks": self.blocks,
            "n0": self.n0,
            "s": self.s,
            "kernel_structures": self.kernel_structures,
            "cokernel_structures": self.cokernel_structures,
            "verdict": self.verdict,
            "notes": self.notes,
        }


def check_cap_theorem(blocks, n_range=None, depth: int = 4) -> CapReport:
    """Kernels and cokernels of T_n -> T_m against the finite submodule F.

    For (a)+(b) mixes finds the least n0 and s with both equal to F for all
    n0 <= n < m, m >= n + s inside the range; the verdict is 'pass' when
    these exist. Other mixes only get an informational report.
    """
    T = blocks if isinstance(blocks, FiniteLambdaModule) else build(blocks, depth)
    top = T.depth if T.depth is not None else depth
    lo, hi = n_range if n_range else (0, top)
    hi = min(hi, top)
    rep = CapReport([b.spec() for b in T.blocks], None, None)
    pairs = [(n, m) for n in range(lo, hi + 1) for m in range(n + 1, hi + 1)]
    for n, m in pairs:
        rep.kernel_structures[f"{n},{m}"] = cap_kernel(T, n, m)
        if not T.infinite_invariants:
            rep.cokernel_structures[f"{n},{m}"] = cap_cokernel(T, n, m)
    if T.infinite_invariants:
        rep.verdict = "skipped"
        rep.notes.append("invariants of T are infinite: cokernel claim not applicable")
        return rep
    if T.mu_positive or T.declared_F is None:
        rep.verdict = "informational"
        sizes = [sum(coinvariants(T, n)) for n in range(lo, hi + 1)]
        rep.notes.append(f"log_ell |T_n| for n = {lo}..{hi}: {sizes}")
        stable = all(rep.kernel_structures[k] == rep.kernel_structures[f"{hi - 1},{hi}"]
                     for k in rep.kernel_structures)
        rep.notes.append("kernels constant over the range" if stable else "kernels vary over the range")
        rep.notes.append("mu-positive: no comparison with a finite submodule is asserted")
        return rep
    F = list(T.declared_F)
    best = None
    for n0 in range(lo, hi):
        for s in range(1, hi - n0 + 1):
            ok = all(rep.kernel_structures[f"{n},{m}"] == F and rep.cokernel_structures[f"{n},{m}"] == F
                     for n, m in pairs if n >= n0 and m >= n + s)
            if ok:
                if best is None or (n0 + s, n0) < (best[0] + best[1], best[0]):
                    best = (n0, s)
                break
    if best is not None:
        rep.n0, rep.s = best
        rep.verdict = "pass"
    else:
        rep.notes.append(f"kernel/cokernel never equal to F = {F} in range")
    return rep


def nakayama_check(T: FiniteLambdaModule) -> bool:
    """T/(gamma - 1)T = 0 exactly when T = 0."""
    co = quotient_structure(_identity(T.g), T.base_relations() + omega(T, 0), T.ell, T.W, T.g)
    return (co == []) == (order(T) == 1)
