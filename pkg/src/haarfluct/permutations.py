"""Permutations of {1, ..., n} with the cycle and length bookkeeping used
throughout this package.

Conventions, fixed once and used everywhere:

- Points are 1-based, matching the usual cycle notation (1 2 3).
- Composition is ``(p * q)(i) = p(q(i))``, i.e. q acts first.  Products
  written like ``gamma * p.inverse()`` therefore mean the function
  composition gamma(p^{-1}(i)).
- ``cycles()`` is canonical: each cycle starts at its smallest point and
  cycles are sorted by those smallest points, so equal permutations
  always print identically.
- ``length()`` is the minimal number of transpositions, computed as
  ``n - num_cycles()`` (an identity, not a search).
"""

from __future__ import annotations

import dataclasses
import itertools
from typing import Iterable, Iterator, Sequence


@dataclasses.dataclass(frozen=True)
class Permutation:
    """A bijection of {1, ..., n} stored in one-line form.

    ``mapping[i - 1]`` is the image of the point ``i``.

    >>> p = Permutation((2, 3, 1))
    >>> p(1), p(2), p(3)
    (2, 3, 1)
    >>> p.cycles()
    ((1, 2, 3),)
    """

    mapping: tuple[int, ...]

    def __post_init__(self) -> None:
        n = len(self.mapping)
        if sorted(self.mapping) != list(range(1, n + 1)):
            raise ValueError(f"not a bijection of [1,{n}]: {self.mapping}")

    @property
    def size(self) -> int:
        return len(self.mapping)

    def __call__(self, i: int) -> int:
        return self.mapping[i - 1]

    def __mul__(self, other: "Permutation") -> "Permutation":
        return compose(self, other)

    def inverse(self) -> "Permutation":
        inv = [0] * self.size
        for i, image in enumerate(self.mapping, start=1):
            inv[image - 1] = i
        return Permutation(tuple(inv))

    def cycles(self) -> tuple[tuple[int, ...], ...]:
        """Disjoint cycles in canonical order (min first, sorted by min).

        >>> Permutation((2, 1, 3)).cycles()
        ((1, 2), (3,))
        """
        seen = [False] * self.size
        out: list[tuple[int, ...]] = []
        for start in range(1, self.size + 1):
            if seen[start - 1]:
                continue
            cycle = []
            i = start
            while not seen[i - 1]:
                seen[i - 1] = True
                cycle.append(i)
                i = self(i)
            out.append(tuple(cycle))
        return tuple(out)

    def num_cycles(self) -> int:
        return len(self.cycles())

    def cycle_type(self) -> tuple[int, ...]:
        """Cycle lengths in decreasing order, e.g. (2, 1) for a transposition in S_3."""
        return tuple(sorted((len(c) for c in self.cycles()), reverse=True))

    def length(self) -> int:
        """Minimal number of transpositions whose product is this permutation."""
        return self.size - self.num_cycles()

    def fixed_points(self) -> tuple[int, ...]:
        return tuple(i for i in range(1, self.size + 1) if self(i) == i)

    def is_identity(self) -> bool:
        return all(self(i) == i for i in range(1, self.size + 1))

    def __str__(self) -> str:
        return format_cycles(self)

    def to_json(self) -> dict:
        """JSON form with nontrivial cycles only; the size is explicit."""
        return {
            "n": self.size,
            "cycles": [list(c) for c in self.cycles() if len(c) > 1],
        }


def identity(n: int) -> Permutation:
    return Permutation(tuple(range(1, n + 1)))


def transposition(n: int, i: int, j: int) -> Permutation:
    if not (1 <= i <= n and 1 <= j <= n and i != j):
        raise ValueError(f"bad transposition ({i} {j}) in S_{n}")
    mapping = list(range(1, n + 1))
    mapping[i - 1], mapping[j - 1] = j, i
    return Permutation(tuple(mapping))


def compose(p: Permutation, q: Permutation) -> Permutation:
    """The product p*q acting as (p*q)(i) = p(q(i)).

    >>> compose(transposition(3, 1, 2), transposition(3, 2, 3)).cycles()
    ((1, 2, 3),)
    """
    if p.size != q.size:
        raise ValueError(f"size mismatch: {p.size} vs {q.size}")
    return Permutation(tuple(p.mapping[x - 1] for x in q.mapping))


def from_cycles(n: int, cycles: Iterable[Sequence[int]]) -> Permutation:
    """Build a permutation of [1,n] from disjoint cycles; omitted points are fixed.

    >>> from_cycles(5, [(1, 2, 3), (4, 5)]).mapping
    (2, 3, 1, 5, 4)
    """
    mapping = list(range(1, n + 1))
    seen: set[int] = set()
    for cycle in cycles:
        for a in cycle:
            if not 1 <= a <= n:
                raise ValueError(f"point {a} out of range [1,{n}]")
            if a in seen:
                raise ValueError(f"point {a} appears in two cycles")
            seen.add(a)
        for a, b in zip(cycle, cycle[1:]):
            mapping[a - 1] = b
        if cycle:
            mapping[cycle[-1] - 1] = cycle[0]
    return Permutation(tuple(mapping))


def from_json(data: dict) -> Permutation:
    return from_cycles(data["n"], [tuple(c) for c in data["cycles"]])


def format_cycles(p: Permutation) -> str:
    """Cycle-notation string, nontrivial cycles only; identity is "()".

    >>> format_cycles(from_cycles(5, [(1, 2, 3), (4, 5)]))
    '(1 2 3)(4 5)'
    >>> format_cycles(identity(3))
    '()'
    """
    parts = ["(" + " ".join(map(str, c)) + ")" for c in p.cycles() if len(c) > 1]
    return "".join(parts) if parts else "()"


def gamma(block_lengths: Sequence[int]) -> Permutation:
    """Product of full cycles on consecutive intervals.

    gamma([m, n]) is (1 ... m)(m+1 ... m+n), the reference rotation for a
    pair of trace words; gamma([n]) is the full cycle (1 ... n).

    >>> gamma([2, 2]).cycles()
    ((1, 2), (3, 4))
    >>> gamma([1, 1]).is_identity()
    True
    """
    if not block_lengths:
        raise ValueError("need at least one block length")
    if any(m < 1 for m in block_lengths):
        raise ValueError(f"block lengths must be positive: {block_lengths}")
    cycles = []
    start = 1
    for m in block_lengths:
        cycles.append(tuple(range(start, start + m)))
        start += m
    return from_cycles(start - 1, cycles)


def is_connected(p: Permutation, g: Permutation) -> bool:
    """True iff the group generated by p and g acts transitively on [1,n].

    Computed by orbit closure from the point 1.
    """
    if p.size != g.size:
        raise ValueError(f"size mismatch: {p.size} vs {g.size}")
    n = p.size
    if n == 0:
        return True
    seen = [False] * n
    stack = [1]
    seen[0] = True
    count = 1
    while stack:
        i = stack.pop()
        for image in (p(i), g(i)):
            if not seen[image - 1]:
                seen[image - 1] = True
                count += 1
                stack.append(image)
    return count == n


def all_permutations(n: int) -> Iterator[Permutation]:
    """All of S_n in lexicographic one-line order (n! elements)."""
    for mapping in itertools.permutations(range(1, n + 1)):
        yield Permutation(mapping)


def random_permutation(n: int, rng) -> Permutation:
    """Uniformly random element of S_n from a ``random.Random``-like rng."""
    mapping = list(range(1, n + 1))
    rng.shuffle(mapping)
    return Permutation(tuple(mapping))


def concatenate(p: Permutation, q: Permutation) -> Permutation:
    """The permutation p x q of [1, p.size + q.size] acting blockwise."""
    m = p.size
    return Permutation(p.mapping + tuple(x + m for x in q.mapping))


def restrict(p: Permutation, points: Sequence[int]) -> Permutation:
    """Restriction of p to an invariant subset, relabelled order-preservingly.

    ``points`` must be a union of cycles of p.

    >>> restrict(from_cycles(4, [(1, 3), (2, 4)]), [2, 4]).cycles()
    ((1, 2),)
    """
    pts = sorted(points)
    index = {a: i + 1 for i, a in enumerate(pts)}
    mapping = []
    for a in pts:
        image = p(a)
        if image not in index:
            raise ValueError(f"{pts} is not invariant under the permutation")
        mapping.append(index[image])
    return Permutation(tuple(mapping))
