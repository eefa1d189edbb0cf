"""The Weingarten function of the unitary group, exactly in the formal
dimension N, together with its 1/N expansion coefficients.

Wg(N, pi) is the unique class function on S_n with

    sum over tau in S_n of  Wg(sigma tau^{-1}) * N^{#(tau)}  =  [sigma == id],

equivalently the inverse of sigma -> N^{#(sigma)} under convolution.  We
obtain it by inverting that convolution system exactly, reduced to
conjugacy classes: the unknowns are one rational function per cycle type,
the Gram matrix entries are integer polynomials in N, and the solve is
fraction-free.

The expansion of Wg(N, pi) at N = infinity starts at N^-(|pi|+n) and
moves in steps of two; the leading coefficient mu(pi) is multiplicative
over cycles and Catalan-signed on a single cycle, and the two-argument
coefficient mu2 captures the leading order of
Wg(pi1 x pi2) - Wg(pi1) Wg(pi2).
"""

from __future__ import annotations

import itertools
import math
import threading
from fractions import Fraction

from .caps import check_cap
from .partitions import (
    SetPartition,
    interval_partitions,
    is_pi_invariant,
    mobius_interval,
    orbit_partition,
)
from .permutations import Permutation, all_permutations, compose, concatenate, restrict
from .ratfunc import (
    PolynomialZ,
    RationalFunctionN,
    OneOverNSeries,
    series,
    series_coefficient,
    solve_linear_system,
)

_CACHE: dict[tuple[int, tuple[int, ...]], RationalFunctionN] = {}
_VALUE_CACHE: dict[tuple[int, int, tuple[int, ...]], Fraction] = {}
_LOCK = threading.Lock()


def cycle_types(n: int) -> list[tuple[int, ...]]:
    """Integer partitions of n in decreasing order, each sorted decreasingly."""
    out: list[tuple[int, ...]] = []

    def rec(remaining: int, largest: int, prefix: tuple[int, ...]) -> None:
        if remaining == 0:
            out.append(prefix)
            return
        for part in range(min(largest, remaining), 0, -1):
            rec(remaining - part, part, prefix + (part,))

    rec(n, n, ())
    return out


def permutation_of_type(cycle_type: tuple[int, ...]) -> Permutation:
    """Canonical representative: consecutive cycles of the given lengths."""
    n = sum(cycle_type)
    cycles = []
    start = 1
    for length in cycle_type:
        cycles.append(tuple(range(start, start + length)))
        start += length
    from .permutations import from_cycles

    return from_cycles(n, cycles)


def _solve_all_classes(n: int) -> dict[tuple[int, ...], RationalFunctionN]:
    types = cycle_types(n)
    index = {t: i for i, t in enumerate(types)}
    reps = [permutation_of_type(t) for t in types]
    taus = [(tau.inverse(), tau.num_cycles()) for tau in all_permutations(n)]
    matrix: list[list[PolynomialZ]] = []
    for rep in reps:
        row = [[0] * (n + 1) for _ in types]
        for tau_inv, tau_cycles in taus:
            j = index[compose(rep, tau_inv).cycle_type()]
            row[j][tau_cycles] += 1
        matrix.append([PolynomialZ.of(c) for c in row])
    rhs = [
        PolynomialZ.one() if t == (1,) * n else PolynomialZ.zero() for t in types
    ]
    solution = solve_linear_system(matrix, rhs)
    return dict(zip(types, solution))


def weingarten(n: int, p: Permutation) -> RationalFunctionN:
    """Wg(N, p) for p in S_n as an exact rational function of N.

    Depends on p only through its cycle type; results are memoised per
    type (reads of the cache are safe from multiple threads).

    >>> str(weingarten(1, permutation_of_type((1,))))
    '(1) / (N)'
    """
    if p.size != n:
        raise ValueError(f"permutation acts on [{p.size}], expected [{n}]")
    check_cap("WEINGARTEN_CAP", n, f"Weingarten function on S_{n}")
    key = (n, p.cycle_type())
    if key not in _CACHE:
        with _LOCK:
            if key not in _CACHE:
                solved = _solve_all_classes(n)
                for t, f in solved.items():
                    _CACHE[(n, t)] = f
    return _CACHE[key]


def weingarten_by_type(cycle_type: tuple[int, ...]) -> RationalFunctionN:
    n = sum(cycle_type)
    return weingarten(n, permutation_of_type(tuple(sorted(cycle_type, reverse=True))))


def wg_value(N: int, p: Permutation) -> Fraction:
    """Wg(N, p) evaluated exactly at an integer dimension N >= p.size."""
    n = p.size
    if N < n:
        raise ValueError(f"need N >= {n} for a word with {n} U factors, got {N}")
    key = (N, n, p.cycle_type())
    if key not in _VALUE_CACHE:
        _VALUE_CACHE[key] = weingarten(n, p).eval_at(N)
    return _VALUE_CACHE[key]


def wg_series(p: Permutation, terms: int) -> OneOverNSeries:
    """Expansion of Wg(N, p) at infinity; the offset is length(p) + p.size."""
    return series(weingarten(p.size, p), terms)


def mu(p: Permutation) -> int:
    """Leading 1/N coefficient of Wg at order length(p) + p.size.

    Computed straight from the series when p fits under the cap, so that
    multiplicativity over cycles stays a testable fact; beyond the cap it
    falls back to the product over cycles (each cycle must fit).
    """
    from .caps import get_cap

    n = p.size
    if n <= get_cap("WEINGARTEN_CAP"):
        return _mu_direct(p)
    out = 1
    for cycle in p.cycles():
        out *= _mu_direct(restrict(p, cycle))
    return out


def _mu_direct(p: Permutation) -> int:
    expected_offset = p.length() + p.size
    s = wg_series(p, 1)
    if s.offset != expected_offset:
        raise ArithmeticError(
            f"series offset {s.offset} deviates from length+n = {expected_offset}"
        )
    lead = s.coeffs[0]
    if lead.denominator != 1:
        raise ArithmeticError(f"leading coefficient {lead} is not an integer")
    return int(lead)


def mu_cycle(k: int) -> int:
    """mu on a single k-cycle: signed Catalan number (-1)^(k-1) C_(k-1)."""
    return (-1) ** (k - 1) * (math.comb(2 * (k - 1), k - 1) // k)


def mu2(p1: Permutation, p2: Permutation) -> Fraction:
    """Leading coefficient of Wg(p1 x p2) - Wg(p1) Wg(p2).

    The difference starts at N^-(|p1|+|p2|+m+n+2); this returns the
    coefficient there.  Symmetric in its arguments.
    """
    m, n = p1.size, p2.size
    check_cap("WEINGARTEN_CAP", m + n, f"mu2 on S_{m} x S_{n}")
    diff = weingarten(m + n, concatenate(p1, p2)) - weingarten(m, p1) * weingarten(n, p2)
    target = p1.length() + p2.length() + m + n + 2
    if not diff.is_zero:
        offset = diff.den.degree - diff.num.degree
        if offset < target:
            raise ArithmeticError(
                f"difference series starts at {offset}, above the expected order {target}"
            )
    return series_coefficient(diff, target)


def wg_product_over_blocks(p: Permutation, a: SetPartition) -> RationalFunctionN:
    """Product over the blocks of a p-invariant partition of Wg on the restrictions."""
    out = RationalFunctionN.const(1)
    for block in a.blocks:
        q = restrict(p, block)
        out = out * weingarten(q.size, q)
    return out


def relative_cumulant(p: Permutation, a: SetPartition) -> RationalFunctionN:
    """Moebius-inverted Weingarten product over the interval from the
    cycle partition of p up to the invariant partition a.

    Summing these over all partitions in that interval recovers the plain
    blockwise Weingarten product (exact inversion identity).
    """
    if not is_pi_invariant(a, p):
        raise ValueError("partition is not invariant under the permutation")
    bottom = orbit_partition(p)
    out = RationalFunctionN.zero()
    for c in interval_partitions(bottom, a):
        coeff = mobius_interval(c, a)
        out = out + RationalFunctionN.const(coeff) * wg_product_over_blocks(p, c)
    return out


def convolution_check(n: int, g: Permutation) -> RationalFunctionN:
    """The convolution sum at g: equals 1 when g is the identity, else 0."""
    total = RationalFunctionN.zero()
    for tau in all_permutations(n):
        term = weingarten(n, compose(g, tau.inverse()))
        power = PolynomialZ.x(tau.num_cycles())
        total = total + term * RationalFunctionN.make(power, PolynomialZ.one())
    return total


def convolution_check_at(n: int, g: Permutation, N: int) -> Fraction:
    """Numeric convolution sum at dimension N, for sizes past the exact check."""
    total = Fraction(0)
    for tau in all_permutations(n):
        total += wg_value(N, compose(g, tau.inverse())) * Fraction(N) ** tau.num_cycles()
    return total
