"""Exact mixed moments and cumulants of traces of words in a Haar unitary,
their large-N limits, and the covariance rules they converge to.

The central objects:

- :class:`TraceWordSpec` describes a product of traces
  Tr(D U^{e} D' U^{e'} ...), one sign per position, with each position
  optionally carrying a deterministic matrix (index 0 means the identity).
- :func:`exact_mixed_moment` evaluates the expectation of such a product
  over the Haar measure exactly, for any fixed dimension N, by summing
  Wg(N, tilde(pi)) * Tr_{gamma pi^{-1}}(D...) over the sign-compatible
  permutations pi.
- :func:`entrywise_moment_oracle` recomputes the same expectation by brute
  force from matrix entries and the basic Weingarten expansion; it shares
  no enumeration machinery with the path above and exists to check it.
- :func:`limit_k2` evaluates the limiting covariance of two trace words:
  an annular sum weighted by mu, plus planar double sums weighted by mu2
  and by mu against the second-order data of the letters.
- :func:`second_order_free_covariance` is the rotation-matching covariance
  rule for centered cyclically alternating words, and
  :func:`reduced_word_covariance` its specialisation counting matchings of
  reduced words in independent unitaries.
"""

from __future__ import annotations

import dataclasses
import itertools
from fractions import Fraction
from typing import Callable, Iterable, Protocol, Sequence

from .caps import check_cap
from .noncrossing import (
    EpsilonVector,
    enumerate_nc_eps,
    enumerate_snc_eps,
    s_epsilon,
    tilde,
)
from .partitions import enumerate_partitions, mobius_to_top, partitioned_moment
from .permutations import (
    Permutation,
    all_permutations,
    compose,
    concatenate,
    gamma,
    identity,
)
from .weingarten import mu, mu2, wg_value

Matrix = Sequence[Sequence[Fraction]]


# ---------------------------------------------------------------------------
# trace word specifications


@dataclasses.dataclass(frozen=True)
class TraceWordSpec:
    """A product of cyclic trace words; position i carries the matrix with
    index ``letters[i][0]`` (0 = identity) followed by U^(letters[i][1]).

    >>> spec = TraceWordSpec.from_groups([[(0, 1)], [(0, -1)]])  # Tr(U) Tr(U*)
    >>> spec.epsilon().signs
    (1, -1)
    """

    group_lengths: tuple[int, ...]
    letters: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if not self.group_lengths or any(m < 1 for m in self.group_lengths):
            raise ValueError(f"group lengths must be positive: {self.group_lengths}")
        if sum(self.group_lengths) != len(self.letters):
            raise ValueError("group lengths do not add up to the number of letters")
        for d, e in self.letters:
            if e not in (-1, 1):
                raise ValueError(f"exponent must be +1 or -1: {e}")
            if d < 0:
                raise ValueError(f"matrix index must be >= 0: {d}")

    @staticmethod
    def from_groups(groups: Sequence[Sequence[tuple[int, int]]]) -> "TraceWordSpec":
        return TraceWordSpec(
            tuple(len(g) for g in groups),
            tuple((int(d), int(e)) for g in groups for d, e in g),
        )

    @property
    def total_length(self) -> int:
        return len(self.letters)

    def epsilon(self) -> EpsilonVector:
        return EpsilonVector(tuple(e for _, e in self.letters))

    @property
    def balanced(self) -> bool:
        return self.epsilon().balanced

    def gamma(self) -> Permutation:
        return gamma(self.group_lengths)

    def d_indices(self) -> tuple[int, ...]:
        return tuple(d for d, _ in self.letters)

    def groups(self) -> list[list[tuple[int, int]]]:
        out, pos = [], 0
        for m in self.group_lengths:
            out.append(list(self.letters[pos : pos + m]))
            pos += m
        return out


def merge_specs(specs: Sequence[TraceWordSpec]) -> TraceWordSpec:
    """Concatenate several trace-word specs into one multi-group spec."""
    return TraceWordSpec(
        tuple(m for s in specs for m in s.group_lengths),
        tuple(letter for s in specs for letter in s.letters),
    )


def _as_exact_matrix(mat) -> tuple[tuple[Fraction, ...], ...]:
    rows = tuple(tuple(Fraction(x) for x in row) for row in mat)
    if any(len(row) != len(rows) for row in rows):
        raise ValueError("matrices must be square")
    return rows


def _resolve_matrices(spec: TraceWordSpec, matrices, N: int) -> list:
    """Per-position matrix list; None stands for the identity."""
    mats = [_as_exact_matrix(m) for m in matrices] if matrices else []
    for m in mats:
        if len(m) != N:
            raise ValueError(f"matrix dimension {len(m)} does not match N = {N}")
    out = []
    for d, _ in spec.letters:
        if d == 0:
            out.append(None)
        elif d <= len(mats):
            out.append(mats[d - 1])
        else:
            raise ValueError(f"letter references matrix {d} but only {len(mats)} given")
    return out


# ---------------------------------------------------------------------------
# Tr_pi and the exact moment formula


def trace_pi(p: Permutation, matrices: Sequence, dim: int | None = None):
    """Product over the cycles of p of the trace along each cycle.

    ``matrices[i-1]`` is the matrix at position i; None means the identity
    (``dim`` is required if a whole cycle is identities).

    >>> from .permutations import from_cycles
    >>> D = [[[1, 2], [3, 4]], [[0, 1], [1, 0]]]
    >>> trace_pi(from_cycles(2, [(1, 2)]), D)  # Tr(D1 D2)
    5
    """
    if len(matrices) != p.size:
        raise ValueError(f"need {p.size} matrices, got {len(matrices)}")
    sizes = {len(m) for m in matrices if m is not None}
    if len(sizes) > 1:
        raise ValueError(f"matrix dimensions differ: {sorted(sizes)}")
    if sizes:
        if dim is not None and dim not in sizes:
            raise ValueError("dim does not match the matrices")
        dim = sizes.pop()
    out = 1
    for cycle in p.cycles():
        factors = [matrices[i - 1] for i in cycle if matrices[i - 1] is not None]
        if not factors:
            if dim is None:
                raise ValueError("all-identity cycle needs an explicit dim")
            out *= dim
            continue
        prod = factors[0]
        for m in factors[1:]:
            prod = _mat_mul(prod, m)
        out *= sum(prod[i][i] for i in range(len(prod)))
    return out


def _mat_mul(a, b):
    n = len(a)
    bt = list(zip(*b))
    return [[sum(ra[k] * cb[k] for k in range(n)) for cb in bt] for ra in a]


def exact_mixed_moment(spec: TraceWordSpec, matrices, N: int) -> Fraction:
    """Expectation over the Haar measure of the product of traces, exactly.

    The matrices must be deterministic with exact rational entries; the
    sign pattern must balance or the moment is zero.  Requires N >= l
    (half the word length) so the Weingarten function has no pole.
    """
    if not spec.balanced:
        return Fraction(0)
    eps = spec.epsilon()
    l = eps.half
    if N < l:
        raise ValueError(f"need N >= {l} for a word with {l} U factors, got {N}")
    mats = _resolve_matrices(spec, matrices, N)
    g = spec.gamma()
    total = Fraction(0)
    for p in s_epsilon(eps):
        w = wg_value(N, tilde(p, eps))
        t = trace_pi(compose(g, p.inverse()), mats, dim=N)
        total += w * Fraction(t)
    return total


# ---------------------------------------------------------------------------
# independent entrywise oracle


def entrywise_moment_oracle(spec: TraceWordSpec, matrices, N: int) -> Fraction:
    """Brute-force evaluation of the same Haar expectation from entries.

    Each trace is expanded into explicit entry sums; the expectation of
    the resulting monomial in U-entries is the basic two-permutation
    delta sum against Weingarten values.  The deltas are resolved by
    gluing index variables (union-find) and summing the matrix entries
    over the surviving free indices.  Exponential cost; keep N <= 3 and
    the total word length <= 6.
    """
    if N > 3 or spec.total_length > 6:
        raise ValueError("oracle cost cap: N <= 3 and total length <= 6")
    eps = [e for _, e in spec.letters]
    plus = [i for i, e in enumerate(eps) if e == 1]     # 0-based positions
    minus = [i for i, e in enumerate(eps) if e == -1]
    if len(plus) != len(minus):
        return Fraction(0)
    l = len(plus)
    mats = _resolve_matrices(spec, matrices, N)
    g = spec.gamma()
    total_len = spec.total_length

    # variable slots: 0..total_len-1 are the row indices r_t, the rest s_t
    def r_slot(t: int) -> int:
        return t

    def s_slot(t: int) -> int:
        return total_len + t

    total = Fraction(0)
    if l == 0:
        raise ValueError("empty word")
    for alphas in itertools.permutations(range(l)):
        for betas in itertools.permutations(range(l)):
            tilde_perm = _perm_product_inverse(betas, alphas)
            w = wg_value(N, Permutation(tuple(x + 1 for x in tilde_perm)))
            parent = list(range(2 * total_len))

            def find(x: int) -> int:
                while parent[x] != x:
                    parent[x] = parent[parent[x]]
                    x = parent[x]
                return x

            def union(x: int, y: int) -> None:
                rx, ry = find(x), find(y)
                if rx != ry:
                    parent[ry] = rx

            # U factor at position t has row s_t and column r_{gamma(t)};
            # the deltas identify plus rows/cols with minus rows/cols.
            for k in range(l):
                union(r_slot(g(minus[k] + 1) - 1), s_slot(plus[alphas[k]]))
                union(s_slot(minus[k]), r_slot(g(plus[betas[k]] + 1) - 1))
            for t in range(total_len):
                if mats[t] is None:  # identity entry is a delta
                    union(r_slot(t), s_slot(t))
            classes = sorted({find(x) for x in range(2 * total_len)})
            class_index = {c: i for i, c in enumerate(classes)}
            subtotal = Fraction(0)
            for values in itertools.product(range(N), repeat=len(classes)):
                prod = Fraction(1)
                for t in range(total_len):
                    if mats[t] is None:
                        continue
                    r = values[class_index[find(r_slot(t))]]
                    s = values[class_index[find(s_slot(t))]]
                    entry = mats[t][r][s]
                    if entry == 0:
                        prod = Fraction(0)
                        break
                    prod *= entry
                subtotal += prod
            total += w * subtotal
    return total


def _perm_product_inverse(beta: Sequence[int], alpha: Sequence[int]) -> list[int]:
    """beta composed with alpha^{-1}, both 0-based one-line tuples."""
    inv = [0] * len(alpha)
    for i, a in enumerate(alpha):
        inv[a] = i
    return [beta[inv[i]] for i in range(len(alpha))]


# ---------------------------------------------------------------------------
# exact joint cumulants


def exact_cumulant(specs: Sequence[TraceWordSpec], matrices, N: int) -> Fraction:
    """Joint classical cumulant of the trace observables given by ``specs``,
    via Moebius inversion over the partitions of the observable set.

    The matrices are deterministic, so every blockwise expectation is an
    exact mixed moment of the merged words.
    """
    r = len(specs)
    check_cap("CUMULANT_ORDER_CAP", r, f"exact cumulant of order {r}")

    cache: dict[tuple[int, ...], Fraction] = {}

    def block_moment(indices: tuple[int, ...]) -> Fraction:
        if indices not in cache:
            merged = merge_specs([specs[i - 1] for i in indices])
            cache[indices] = exact_mixed_moment(merged, matrices, N)
        return cache[indices]

    total = Fraction(0)
    for c in enumerate_partitions(r):
        total += mobius_to_top(c) * partitioned_moment(block_moment, c)
    return total


# ---------------------------------------------------------------------------
# second-order probability spaces over abstract letters


class SecondOrderSpace(Protocol):
    """First- and second-order data on cyclic words of abstract letters.

    ``phi1`` must be invariant under rotation of its word and send the
    empty word to 1; ``phi2`` must be rotation-invariant in each argument
    and vanish when either argument is the empty (unit) word.
    """

    def phi1(self, word: tuple) -> Fraction: ...

    def phi2(self, left: tuple, right: tuple) -> Fraction: ...


class UnitLetterSpace:
    """Every letter is the unit: phi1 is identically 1 and phi2 vanishes."""

    def phi1(self, word: tuple) -> Fraction:
        return Fraction(1)

    def phi2(self, left: tuple, right: tuple) -> Fraction:
        return Fraction(0)


class HaarLetterSpace:
    """Letters are integer exponents of one extra Haar unitary.

    phi1 of a word is 1 exactly when the exponents sum to zero; phi2 is
    the Diaconis-Shahshahani covariance |a| when the two words carry
    exponent sums a and -a (and zero if either sum vanishes, since that
    argument is the unit).
    """

    def phi1(self, word: tuple) -> Fraction:
        return Fraction(1) if sum(word) == 0 else Fraction(0)

    def phi2(self, left: tuple, right: tuple) -> Fraction:
        a, b = sum(left), sum(right)
        if a == 0 or b == 0:
            return Fraction(0)
        return Fraction(abs(a)) if a == -b else Fraction(0)


class TableSpace:
    """Finite tables of phi1/phi2 values keyed by canonical rotations.

    Letters must be mutually comparable so rotations canonicalise.  A
    lookup outside the table is an error: missing second-order data has
    no default value.
    """

    def __init__(self, phi1_table: dict, phi2_table: dict):
        self._phi1 = {_min_rotation(tuple(k)): Fraction(v) for k, v in phi1_table.items()}
        self._phi2 = {
            (_min_rotation(tuple(k1)), _min_rotation(tuple(k2))): Fraction(v)
            for (k1, k2), v in phi2_table.items()
        }

    def phi1(self, word: tuple) -> Fraction:
        if not word:
            return Fraction(1)
        key = _min_rotation(word)
        if key not in self._phi1:
            raise KeyError(f"phi1 value for the word {word} is not in the table")
        return self._phi1[key]

    def phi2(self, left: tuple, right: tuple) -> Fraction:
        if not left or not right:
            return Fraction(0)
        key = (_min_rotation(left), _min_rotation(right))
        if key not in self._phi2:
            raise KeyError(f"phi2 value for the pair {left}, {right} is not in the table")
        return self._phi2[key]


def _min_rotation(word: tuple) -> tuple:
    return min(word[i:] + word[:i] for i in range(len(word)))


def phi1_extension(p: Permutation, letters: Sequence, space: SecondOrderSpace) -> Fraction:
    """phi1 read along every cycle of p and multiplied out."""
    if len(letters) != p.size:
        raise ValueError(f"need {p.size} letters, got {len(letters)}")
    out = Fraction(1)
    for cycle in p.cycles():
        out *= space.phi1(tuple(letters[i - 1] for i in cycle))
    return out


def phi2_extension(
    p1: Permutation, p2: Permutation, letters: Sequence, space: SecondOrderSpace
) -> Fraction:
    """Bilinear extension of phi2 to a pair of permutations.

    ``p1`` acts on the first block of letters, ``p2`` on the rest.  The
    derivation rule, expanded fully in both arguments, distinguishes one
    cycle on each side and sends everything else through phi1; the result
    does not depend on which side is expanded first.
    """
    m, n = p1.size, p2.size
    if len(letters) != m + n:
        raise ValueError(f"need {m + n} letters, got {len(letters)}")
    left_words = [tuple(letters[i - 1] for i in c) for c in p1.cycles()]
    right_words = [tuple(letters[m + i - 1] for i in c) for c in p2.cycles()]
    total = Fraction(0)
    for i, wi in enumerate(left_words):
        rest_left = Fraction(1)
        for j, wj in enumerate(left_words):
            if j != i:
                rest_left *= space.phi1(wj)
        if rest_left == 0:
            continue
        for k, wk in enumerate(right_words):
            rest_right = Fraction(1)
            for j, wj in enumerate(right_words):
                if j != k:
                    rest_right *= space.phi1(wj)
            if rest_right == 0:
                continue
            total += space.phi2(wi, wk) * rest_left * rest_right
    return total


# ---------------------------------------------------------------------------
# the limiting covariance of two trace words


def limit_k2(
    left: TraceWordSpec,
    right: TraceWordSpec,
    letters: Sequence,
    space: SecondOrderSpace,
) -> Fraction:
    """Large-N limit of the covariance of two trace words.

    Three contributions: the annular non-crossing sum weighted by mu of
    the induced half-size permutation, and the planar-pair double sum
    weighted by mu2 against phi1 and by mu against the phi2 extension.
    Unbalanced sign patterns give zero.
    """
    if len(left.group_lengths) != 1 or len(right.group_lengths) != 1:
        raise ValueError("each side must be a single trace word")
    m, n = left.total_length, right.total_length
    if len(letters) != m + n:
        raise ValueError(f"need {m + n} letters, got {len(letters)}")
    eps_left, eps_right = left.epsilon(), right.epsilon()
    eps = eps_left.concat(eps_right)
    if not eps.balanced:
        return Fraction(0)
    g = gamma([m, n])
    total = Fraction(0)
    for p in enumerate_snc_eps(m, n, eps):
        total += mu(tilde(p, eps)) * phi1_extension(
            compose(g, p.inverse()), letters, space
        )
    gm, gn = gamma([m]), gamma([n])
    for p1 in enumerate_nc_eps(eps_left):
        q1 = compose(gm, p1.inverse())
        t1 = tilde(p1, eps_left)
        for p2 in enumerate_nc_eps(eps_right):
            q2 = compose(gn, p2.inverse())
            t2 = tilde(p2, eps_right)
            total += mu2(t1, t2) * phi1_extension(concatenate(q1, q2), letters, space)
            total += mu(concatenate(t1, t2)) * phi2_extension(q1, q2, letters, space)
    return total


def ds_covariance(r: int, s: int) -> int:
    """Limiting covariance of Tr(U^r) and Tr(U^s): |r| when s = -r, else 0.

    >>> ds_covariance(3, -3), ds_covariance(2, 3)
    (3, 0)
    """
    if r == 0 or s == 0:
        raise ValueError("exponents must be nonzero")
    return abs(r) if r == -s else 0


def power_word_spec(r: int) -> TraceWordSpec:
    """The trace word Tr(U^r) as |r| unit-letter positions of sign sgn(r)."""
    if r == 0:
        raise ValueError("exponent must be nonzero")
    sign = 1 if r > 0 else -1
    return TraceWordSpec.from_groups([[(0, sign)] * abs(r)])


# ---------------------------------------------------------------------------
# covariance rules for alternating words


def second_order_free_covariance(
    a_words: Sequence[tuple],
    b_words: Sequence[tuple],
    phi1_pair: Callable[[tuple, tuple], Fraction],
) -> Fraction:
    """Rotation-matching covariance of two centered cyclically alternating
    words; each element is a (tag, payload) pair and adjacent tags must
    differ cyclically.

    Words of different lengths have covariance 0, as do two single
    letters from different tagged algebras.  Centering of every element
    is the caller's responsibility.  ``phi1_pair(x, y)`` must return the
    first-order value of the product x*y.
    """
    _check_alternating(a_words)
    _check_alternating(b_words)
    n = len(a_words)
    if n != len(b_words):
        return Fraction(0)
    if n == 1:
        if a_words[0][0] != b_words[0][0]:
            return Fraction(0)
        raise ValueError(
            "two single letters from the same algebra are not determined by freeness"
        )
    rev_b = tuple(reversed(b_words))
    total = Fraction(0)
    for k in range(n):
        prod = Fraction(1)
        for j in range(n):
            prod *= Fraction(phi1_pair(a_words[j], rev_b[(j + k) % n]))
            if prod == 0:
                break
        total += prod
    return total


def _check_alternating(words: Sequence[tuple]) -> None:
    if not words:
        raise ValueError("empty word")
    n = len(words)
    if n == 1:
        return
    for j in range(n):
        if words[j][0] == words[(j + 1) % n][0]:
            raise ValueError(f"word is not cyclically alternating at position {j + 1}")


@dataclasses.dataclass(frozen=True)
class ReducedWord:
    """A cyclic word U_{i1}^{k1} ... U_{in}^{kn} with nonzero exponents and
    cyclically distinct neighbouring matrix ids (single letters exempt).

    >>> ReducedWord(((1, 1), (2, -2))).letters
    ((1, 1), (2, -2))
    """

    letters: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if not self.letters:
            raise ValueError("empty word")
        for i, k in self.letters:
            if k == 0:
                raise ValueError("exponents must be nonzero")
            if i < 1:
                raise ValueError("matrix ids are positive integers")
        n = len(self.letters)
        if n > 1:
            for j in range(n):
                if self.letters[j][0] == self.letters[(j + 1) % n][0]:
                    raise ValueError(
                        f"word is not cyclically reduced at position {j + 1}"
                    )

    def inverse(self) -> "ReducedWord":
        return ReducedWord(tuple((i, -k) for i, k in reversed(self.letters)))

    def __str__(self) -> str:
        return " ".join(f"U{i}" if k == 1 else f"U{i}^{k}" for i, k in self.letters)


def reduced_word_covariance(w1: ReducedWord, w2: ReducedWord) -> int:
    """Limiting covariance of Tr(w1) and Tr(w2) over independent Haar
    families: the number of cyclic rotations matching w1 against the
    inverse word of w2 (zero when the lengths differ).

    Matchings are counted on the power-expanded cyclic words.  For words
    of two or more letters this equals the letterwise rotation count,
    because a matching must align the points where the matrix id changes.
    A single letter U_i^k against U_i^{-k} has |k| matchings, one per
    cyclic self-alignment of the power, recovering the covariance |k| of
    Tr(U^k) and Tr(U^{-k}).

    >>> reduced_word_covariance(ReducedWord(((1, 1), (2, 1))),
    ...                         ReducedWord(((2, -1), (1, -1))))
    1
    >>> reduced_word_covariance(ReducedWord(((1, 2),)), ReducedWord(((1, -2),)))
    2
    """
    n = len(w1.letters)
    if n != len(w2.letters):
        return 0
    if n == 1:
        (i1, k1), (i2, k2) = w1.letters[0], w2.letters[0]
        return abs(k1) if i1 == i2 and k1 == -k2 else 0
    target = w2.inverse().letters
    count = 0
    for r in range(n):
        if all(w1.letters[s] == target[(s + r) % n] for s in range(n)):
            count += 1
    return count


# ---------------------------------------------------------------------------
# numeric evaluation of trace-word observables (for Monte Carlo checks)


def evaluate_trace_word(spec: TraceWordSpec, matrices, unitary):
    """The product of traces for one concrete unitary sample.

    ``matrices`` are numeric arrays aligned with the spec's matrix
    indices; ``unitary`` is the sampled U.  Returns a complex number.
    """
    import numpy as np

    u = np.asarray(unitary)
    u_star = u.conj().T
    out = 1.0 + 0.0j
    for group in spec.groups():
        prod = np.eye(u.shape[0], dtype=complex)
        for d, e in group:
            if d > 0:
                prod = prod @ np.asarray(matrices[d - 1], dtype=complex)
            prod = prod @ (u if e == 1 else u_star)
        out *= np.trace(prod)
    return out
