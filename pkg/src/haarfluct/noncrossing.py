"""Non-crossing and annular non-crossing permutations, and the sign-pattern
machinery that encodes which factors of a word are U versus U*.

A permutation pi in S_n is non-crossing when #(pi) + #(gamma_n pi^{-1})
equals n + 1, where gamma_n = (1 ... n); this length characterisation is
used everywhere instead of pictures.  On two circles of sizes m and n the
analogue is connectedness together with |pi| + |gamma_{m,n} pi^{-1}| = m+n.

A sign pattern eps in {-1,+1}^(2l) with zero sum splits the positions into
plus-positions p_1 < ... < p_l and minus-positions q_1 < ... < q_l.  The
permutations exchanging the two camps form S^(eps), which is enumerated
through the bijection with S_l x S_l:

    pi(p_{alpha(k)}) = q_k   and   pi(q_k) = p_{beta(k)}.

The square of such a pi acts on the plus-positions; the induced
permutation of [1,l] is ``tilde(pi)`` and satisfies tilde = beta alpha^-1.
"""

from __future__ import annotations

import dataclasses
import itertools
import math
from typing import Iterator, Sequence

from .caps import check_cap
from .partitions import SetPartition, enumerate_partitions
from .permutations import (
    Permutation,
    all_permutations,
    compose,
    from_cycles,
    gamma,
    is_connected,
)


def catalan(n: int) -> int:
    """The n-th Catalan number.

    >>> [catalan(n) for n in range(6)]
    [1, 1, 2, 5, 14, 42]
    """
    return math.comb(2 * n, n) // (n + 1)


@dataclasses.dataclass(frozen=True)
class EpsilonVector:
    """A pattern of +1/-1 signs marking U and U* positions.

    >>> EpsilonVector((1, -1)).balanced
    True
    >>> EpsilonVector((1, 1)).balanced
    False
    """

    signs: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(s not in (-1, 1) for s in self.signs):
            raise ValueError(f"signs must be +1 or -1: {self.signs}")

    def __len__(self) -> int:
        return len(self.signs)

    @property
    def balanced(self) -> bool:
        return sum(self.signs) == 0

    @property
    def half(self) -> int:
        """l such that the vector has length 2l (balanced vectors only)."""
        if not self.balanced:
            raise ValueError("unbalanced sign pattern has no half-length")
        return len(self.signs) // 2

    def plus_positions(self) -> tuple[int, ...]:
        return tuple(i for i, s in enumerate(self.signs, start=1) if s == 1)

    def minus_positions(self) -> tuple[int, ...]:
        return tuple(i for i, s in enumerate(self.signs, start=1) if s == -1)

    def concat(self, other: "EpsilonVector") -> "EpsilonVector":
        return EpsilonVector(self.signs + other.signs)


def is_noncrossing(p: Permutation) -> bool:
    """Length characterisation: #(p) + #(gamma_n p^{-1}) == n + 1.

    >>> is_noncrossing(from_cycles(4, [(1, 3), (2, 4)]))
    False
    >>> is_noncrossing(gamma([4]))
    True
    """
    n = p.size
    g = gamma([n])
    return p.num_cycles() + compose(g, p.inverse()).num_cycles() == n + 1


def kreweras(p: Permutation, *, require_noncrossing: bool = True) -> Permutation:
    """The complement p^{-1} gamma_n of a non-crossing permutation.

    The formula is defined for every p; by default we insist the input is
    non-crossing, which makes the output non-crossing as well.
    """
    if require_noncrossing and not is_noncrossing(p):
        raise ValueError("input permutation is not non-crossing")
    return compose(p.inverse(), gamma([p.size]))


def is_annular_noncrossing(p: Permutation, m: int, n: int) -> bool:
    """Connected and length-minimal relative to the two circles (m, n).

    >>> is_annular_noncrossing(from_cycles(2, [(1, 2)]), 1, 1)
    True
    >>> is_annular_noncrossing(from_cycles(2, []), 1, 1)
    False
    """
    if p.size != m + n:
        raise ValueError(f"size mismatch: permutation of [{p.size}] on circles ({m},{n})")
    g = gamma([m, n])
    if not is_connected(p, g):
        return False
    return p.length() + compose(g, p.inverse()).length() == m + n


def enumerate_noncrossing_partitions(n: int) -> Iterator[SetPartition]:
    """All non-crossing partitions of [1,n] (Catalan(n) of them)."""
    check_cap("ENUM_CAP", n, f"enumerating non-crossing partitions of [1,{n}]")
    for part in enumerate_partitions(n):
        if _partition_noncrossing(part):
            yield part


def _partition_noncrossing(part: SetPartition) -> bool:
    labels = part.as_labels()
    # a crossing is a < b < c < d with a,c in one block and b,d in another
    for (a, c), (b, d) in itertools.product(
        itertools.combinations(range(part.n), 2), repeat=2
    ):
        if labels[a] == labels[c] != labels[b] == labels[d] and a < b < c < d:
            return False
    return True


def enumerate_nc(n: int) -> Iterator[Permutation]:
    """All non-crossing permutations of [1,n], one per non-crossing partition.

    The unique cycle order turning a non-crossing partition into a
    non-crossing permutation traverses each block increasingly.

    >>> sum(1 for _ in enumerate_nc(4))
    14
    """
    for part in enumerate_noncrossing_partitions(n):
        yield from_cycles(n, part.blocks)


def enumerate_snc(m: int, n: int) -> Iterator[Permutation]:
    """All annular non-crossing permutations on circles (m, n), by filtering S_{m+n}."""
    check_cap("ENUM_CAP", m + n, f"enumerating annular non-crossing on ({m},{n})")
    for p in all_permutations(m + n):
        if is_annular_noncrossing(p, m, n):
            yield p


def is_in_s_epsilon(p: Permutation, eps: EpsilonVector) -> bool:
    """True iff p swaps the plus-positions and minus-positions of eps."""
    if p.size != len(eps):
        raise ValueError(f"size mismatch: {p.size} vs {len(eps)}")
    if not eps.balanced:
        return False
    plus = set(eps.plus_positions())
    return all((p(i) in plus) != (i in plus) for i in range(1, p.size + 1))


def from_alpha_beta(alpha: Permutation, beta: Permutation, eps: EpsilonVector) -> Permutation:
    """The element of S^(eps) encoded by a pair (alpha, beta) in S_l x S_l."""
    if not eps.balanced:
        raise ValueError("sign pattern must be balanced")
    l = eps.half
    if alpha.size != l or beta.size != l:
        raise ValueError(f"alpha, beta must lie in S_{l}")
    plus = eps.plus_positions()
    minus = eps.minus_positions()
    mapping = [0] * len(eps)
    for k in range(1, l + 1):
        mapping[plus[alpha(k) - 1] - 1] = minus[k - 1]
        mapping[minus[k - 1] - 1] = plus[beta(k) - 1]
    return Permutation(tuple(mapping))


def to_alpha_beta(p: Permutation, eps: EpsilonVector) -> tuple[Permutation, Permutation]:
    """Inverse of :func:`from_alpha_beta`."""
    if not is_in_s_epsilon(p, eps):
        raise ValueError("permutation does not swap the two position camps")
    plus = eps.plus_positions()
    minus = eps.minus_positions()
    minus_index = {q: k for k, q in enumerate(minus, start=1)}
    plus_index = {q: k for k, q in enumerate(plus, start=1)}
    l = eps.half
    alpha = [0] * l
    beta = [0] * l
    for j in range(1, l + 1):
        alpha[minus_index[p(plus[j - 1])] - 1] = j
        beta[j - 1] = plus_index[p(minus[j - 1])]
    return Permutation(tuple(alpha)), Permutation(tuple(beta))


def tilde(p: Permutation, eps: EpsilonVector) -> Permutation:
    """The permutation of [1,l] induced by p^2 on the plus-positions.

    Satisfies #(p) == #(tilde(p)) and length(p) == length(tilde(p)) + l.
    """
    if not is_in_s_epsilon(p, eps):
        raise ValueError("permutation does not swap the two position camps")
    plus = eps.plus_positions()
    plus_index = {q: k for k, q in enumerate(plus, start=1)}
    return Permutation(tuple(plus_index[p(p(q))] for q in plus))


def s_epsilon(eps: EpsilonVector) -> Iterator[Permutation]:
    """All permutations swapping the two camps of eps ((l!)^2 of them).

    Unbalanced sign patterns give the empty stream.

    >>> list(s_epsilon(EpsilonVector((1, -1))))[0].cycles()
    ((1, 2),)
    """
    if not eps.balanced:
        return
    l = eps.half
    check_cap("EPS_CAP", l, f"enumerating S^(eps) with l={l}")
    for alpha in all_permutations(l):
        for beta in all_permutations(l):
            yield from_alpha_beta(alpha, beta, eps)


def enumerate_nc_eps(eps: EpsilonVector) -> Iterator[Permutation]:
    """Non-crossing members of S^(eps) on one circle."""
    for p in s_epsilon(eps):
        if is_noncrossing(p):
            yield p


def enumerate_snc_eps(m: int, n: int, eps: EpsilonVector) -> Iterator[Permutation]:
    """Annular non-crossing members of S^(eps) on circles (m, n)."""
    if len(eps) != m + n:
        raise ValueError(f"sign pattern has length {len(eps)}, expected {m + n}")
    for p in s_epsilon(eps):
        if is_annular_noncrossing(p, m, n):
            yield p
