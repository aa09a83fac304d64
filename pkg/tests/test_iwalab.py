import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from logclass.iwalab import (
    Block,
    FiniteLambdaModule,
    _matmul,
    build,
    cap_cokernel,
    cap_kernel,
    check_cap_theorem,
    coinvariants,
    invariants,
    nakayama_check,
    omega,
    omega_ratio,
    order,
    parse_blocks,
    random_blocks,
    transition,
)


def _brute_kernel_size(T, M):
    """#{x in T : x M in B0} by enumeration (small T only)."""
    import itertools

    count = 0
    for x in itertools.product(*(range(T.ell**e) for e in T.orders)):
        y = [sum(a * r[j] for a, r in zip(x, M)) for j in range(T.g)]
        if all(v % T.ell**e == 0 for v, e in zip(y, T.orders)):
            count += 1
    return count


def test_build_examples():
    T = build("F:3")
    assert order(T) == 3 and T.declared_F == (1,)
    T = build("XL:3^5", depth=4)
    assert T.gamma == ((4,),) and T.orders == (5,)
    T = build("F:3;XL:3")
    assert T.declared_F == (1,)
    with pytest.raises(ValueError):
        build("XL:3^2", depth=4)
    with pytest.raises(ValueError):
        build("F:3:g=2")
    with pytest.raises(ValueError):
        parse_blocks("Q:3")


def test_block_spec_roundtrip():
    for spec in ("F:3^2", "F:5^1:g=6", "XL:3^5:c=2", "L:3^1:D=2", "Z:5^3"):
        assert parse_blocks(spec)[0].spec() == spec


def test_coinvariant_examples():
    T = build("XL:3", depth=4)
    for n in range(5):
        assert coinvariants(T, n) == [n + 1]
    F = build("F:3^2", depth=4)
    assert all(coinvariants(F, n) == [2] for n in range(1, 5))
    L = build("L:3:D=2", depth=2)
    for n in range(3):
        assert sum(coinvariants(L, n)) == 3**n


def test_invariant_examples():
    T = build("XL:3", depth=4)
    for n in range(4):
        for m in range(n + 1, 5):
            assert invariants(T, n, m) == [n + 1]
    F = build("F:3^2")
    assert invariants(F, 2) == [2]
    Z = build("Z:3", depth=3)
    assert invariants(Z, 1) == [4]


def test_transition_examples():
    T = build("XL:3", depth=4)
    for n in range(4):
        for m in range(n + 1, 5):
            assert cap_kernel(T, n, m) == []
            assert cap_cokernel(T, n, m) == []
    F = build("F:3^2", depth=4)
    assert cap_kernel(F, 1, 2) == [1]
    assert cap_kernel(F, 1, 3) == [2]


def test_cap_examples():
    T = build("F:3^2;XL:3", depth=4)
    assert cap_kernel(T, 1, 4) == [2]
    assert cap_cokernel(T, 1, 4) == [2]
    rep = check_cap_theorem("F:3^2;XL:3")
    assert rep.verdict == "pass"
    assert rep.n0 is not None and rep.s is not None
    d = rep.to_dict()
    assert set(d) >= {"blocks", "n0", "s", "kernel_structures", "cokernel_structures", "verdict"}


@pytest.mark.parametrize("seed", range(20))
def test_cap_theorem_random_mixes(seed):
    rng = random.Random(seed)
    ell = 3 if seed % 2 == 0 else 5
    depth = 4 if ell == 3 else 3
    rep = check_cap_theorem(random_blocks(rng, ell, depth), depth=depth)
    assert rep.verdict == "pass", rep.to_dict()
    F = [b.exp for b in build(random_blocks(random.Random(seed), ell, depth), depth).blocks if b.kind == "F"]
    last = f"{depth - rep.s},{depth}" if depth - rep.s >= rep.n0 else None
    if last:
        assert rep.kernel_structures[last] == sorted(F)


def test_lambda_mod_ell_probe_is_informational():
    rep = check_cap_theorem("L:3:D=3", depth=3)
    assert rep.verdict == "informational"
    assert any("mu-positive" in note for note in rep.notes)
    assert any("[1, 3, 9, 27]" in note for note in rep.notes)


def test_infinite_invariants_probe_is_skipped():
    rep = check_cap_theorem("Z:3", depth=3)
    assert rep.verdict == "skipped"
    assert rep.cokernel_structures == {}


def test_nakayama_examples():
    zero = FiniteLambdaModule(3, 1, (0,), ((1,),))
    assert nakayama_check(zero)
    assert nakayama_check(build("F:3"))
    assert coinvariants(build("F:3"), 0) == [1]
    T = build("F:3^2:g=4")
    assert coinvariants(T, 0) == [1]
    assert nakayama_check(T)


def _random_module(rng, ell, g, W):
    while True:
        gamma = [[rng.randrange(ell**W) for _ in range(g)] for _ in range(g)]
        # invertible mod ell iff the reduction has full rank
        from logclass.padic import ZmodMatrix, snf_mod

        if not snf_mod(ZmodMatrix.build(gamma, ell, 1, cols=g)):
            return FiniteLambdaModule(ell, W, (W,) * g, tuple(map(tuple, gamma)))


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**6), ell=st.sampled_from([2, 3, 5]), g=st.integers(1, 3),
       W=st.integers(1, 2), n=st.integers(0, 2))
def test_herbrand_quotient_is_one(seed, ell, g, W, n):
    T = _random_module(random.Random(seed), ell, g, W)
    assert sum(coinvariants(T, n)) == sum(invariants(T, n))
    if ell ** (g * W) <= 729:
        assert ell ** sum(invariants(T, n)) == _brute_kernel_size(T, omega(T, n))


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10**6), ell=st.sampled_from([3, 5]))
def test_omega_expansion_identity(seed, ell):
    rng = random.Random(seed)
    T = build(random_blocks(rng, ell, 2), depth=2)
    for n in range(2):
        for m in range(n + 1, 3):
            lhs = _matmul(omega_ratio(T, n, m), omega(T, n), T.mod)
            assert lhs == omega(T, m)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_transition_functoriality(seed):
    rng = random.Random(seed)
    blocks = random_blocks(rng, 3, 3)
    if rng.random() < 0.3:
        blocks.append(Block("L", 3, 1, depth=3))
    T = build(blocks, depth=3)
    for n, m, k in [(0, 1, 3), (1, 2, 3), (0, 1, 2)]:
        assert transition(T, n, m).then(transition(T, m, k)).equals(transition(T, n, k))


def test_depth_is_enforced():
    T = build("XL:3", depth=2)
    with pytest.raises(ValueError):
        coinvariants(T, 3)
    with pytest.raises(ValueError):
        transition(T, 1, 1)
